//! Singular locus of a general member `X_d`: cyclic quotient points at the
//! coordinate vertices and on the one-dimensional coordinate strata.
//!
//! A general member has every monomial of degree `d` with a nonzero
//! coefficient; no polynomial is ever built here. Points on the stratum
//! `P_i P_j` are counted as the roots of the restricted binary form after the
//! vertex factors are stripped, `(d - deg gcd) / lcm(w_i, w_j)` of them. This
//! counting rule reproduces every count we have checked but is reported as
//! derived.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::catalog::FamilyRecord;
use crate::error::SingularityError;
use crate::wps::{monomial_gcd, restrict_to_stratum, Monomial, NVARS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Location {
    Vertex(usize),
    Edge(usize, usize),
}

/// A terminal cyclic quotient type `1/r(1, a, r-a)` read off three weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientType {
    pub r: u32,
    pub a: u32,
    /// Unit `u` mod `r` with `u * w ≡ (1, a, r-a)` up to the permutation found.
    pub unit: u32,
    /// `u * w_k mod r` for the three input weights, in input order.
    pub local: [u32; 3],
}

/// Find a unit `u` and a permutation with `u*(w1,w2,w3) ≡ (1,a,r-a) mod r`.
///
/// Permutations are tried in lexicographic order starting from the identity,
/// so the recorded `a` follows the coordinate order: `1/5` with weights
/// `(1,4,6)` is reported as `1/5(1,4,1)`. Returns `None` when the point is
/// not a terminal quotient.
pub fn normalize_quotient(r: u32, w: [u32; 3]) -> Option<QuotientType> {
    if r < 2 {
        return None;
    }
    let m = w.map(|x| x % r);
    if m.contains(&0) {
        return None;
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for p in PERMS {
        let Some(u) = inverse_mod(m[p[0]], r) else { continue };
        let a = (u as u64 * m[p[1]] as u64 % r as u64) as u32;
        let c = (u as u64 * m[p[2]] as u64 % r as u64) as u32;
        if a == 0 || a.gcd(&r) != 1 || !(a + c).is_multiple_of(r) {
            continue;
        }
        let local = m.map(|x| (u as u64 * x as u64 % r as u64) as u32);
        return Some(QuotientType { r, a, unit: u, local });
    }
    None
}

pub(crate) fn inverse_mod(x: u32, r: u32) -> Option<u32> {
    let (x, r) = (x as i64, r as i64);
    let e = x.extended_gcd(&r);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(r) as u32)
}

/// One location class of quotient points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientSingularity {
    pub r: u32,
    pub a: u32,
    pub location: Location,
    pub count: u32,
    /// Local orbifold coordinates, in increasing index order.
    pub transverse: [usize; 3],
    /// `u * w_k mod r` for the transverse coordinates.
    pub local_weights: [u32; 3],
    /// Coordinate that is a nonzero constant at the point.
    pub unit: usize,
    /// Coordinate eliminated by the equation near the point.
    pub dependent: usize,
    /// Human label, `P_y` for a vertex and `P`, `Q`, .. for strata.
    pub label: String,
}

impl QuotientSingularity {
    /// `1/r(1,a,r-a)`.
    pub fn type_string(&self) -> String {
        format!("1/{}(1,{},{})", self.r, self.a, self.r - self.a)
    }

    /// Name of the `k`-th point (0-based) of this class.
    pub fn point_name(&self, k: u32) -> String {
        if self.count == 1 {
            self.label.clone()
        } else {
            format!("{}{}", self.label, k + 1)
        }
    }

    pub fn point_names(&self) -> Vec<String> {
        (0..self.count).map(|k| self.point_name(k)).collect()
    }

    /// Where the class lives, e.g. `P_zP_u` or `P_y`.
    pub fn location_string(&self, names: &[String; NVARS]) -> String {
        match self.location {
            Location::Vertex(i) => format!("P_{}", names[i]),
            Location::Edge(i, j) => format!("P_{}P_{}", names[i], names[j]),
        }
    }

    /// `1/5(1,4,1)_{x,y,t}`: type, then the local coordinates.
    pub fn local_type_string(&self, names: &[String; NVARS]) -> String {
        let lw = self.local_weights;
        let vars: Vec<&str> = self.transverse.iter().map(|&k| names[k].as_str()).collect();
        format!("1/{}({},{},{})_{{{}}}", self.r, lw[0], lw[1], lw[2], vars.join(","))
    }
}

impl fmt::Display for QuotientSingularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} x{} {}", self.label, self.count, self.type_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularLocus {
    pub family: u32,
    pub points: Vec<QuotientSingularity>,
}

impl SingularLocus {
    pub fn total_points(&self) -> u32 {
        self.points.iter().map(|p| p.count).sum()
    }

    pub fn find(&self, label: &str) -> Option<&QuotientSingularity> {
        self.points.iter().find(|p| p.label == label)
    }
}

fn others(exclude: &[usize]) -> [usize; 3] {
    let v: Vec<usize> = (0..NVARS).filter(|k| !exclude.contains(k)).collect();
    [v[0], v[1], v[2]]
}

fn quotient_at(f: &FamilyRecord, r: u32, transverse: [usize; 3]) -> Result<QuotientType, SingularityError> {
    let w = transverse.map(|k| f.weights.get(k));
    normalize_quotient(r, w).ok_or(SingularityError::NotTerminal { r, weights: w })
}

/// Quotient point at the vertex `P_i`, or `None` when `P_i` is not on `X`.
///
/// The dependent coordinate is the partner `x_j` of a tangent monomial
/// `x_i^k x_j`; among several candidates the highest index is taken, which
/// keeps the low-weight coordinates (in particular `x_0`) as local
/// coordinates.
pub fn vertex_singularity(
    f: &FamilyRecord,
    i: usize,
) -> Result<Option<QuotientSingularity>, SingularityError> {
    if i == 0 || i >= NVARS {
        return Err(SingularityError::BadIndex(i));
    }
    let wi = f.weights.get(i);
    let d = f.degree;
    if wi < 2 || d.is_multiple_of(wi) {
        return Ok(None);
    }
    let partner = (0..NVARS)
        .rev()
        .filter(|&j| j != i)
        .find(|&j| {
            let wj = f.weights.get(j);
            d > wj && (d - wj).is_multiple_of(wi)
        })
        .ok_or(SingularityError::NoTangentMonomial { vertex: i, degree: d })?;
    let transverse = others(&[i, partner]);
    let q = quotient_at(f, wi, transverse)?;
    Ok(Some(QuotientSingularity {
        r: wi,
        a: q.a,
        location: Location::Vertex(i),
        count: 1,
        transverse,
        local_weights: q.local,
        unit: i,
        dependent: partner,
        label: format!("P_{}", f.weights.var_name(i)),
    }))
}

/// Quotient points on the stratum `P_i P_j` (`i < j`), with their count.
pub fn stratum_points(
    f: &FamilyRecord,
    i: usize,
    j: usize,
) -> Result<Option<(u32, QuotientSingularity)>, SingularityError> {
    if i >= j || j >= NVARS {
        return Err(SingularityError::BadIndex(j));
    }
    let (wi, wj) = (f.weights.get(i), f.weights.get(j));
    let r = wi.gcd(&wj);
    if r < 2 {
        return Ok(None);
    }
    let d = f.degree;
    let restricted = restrict_to_stratum(&f.weights, d, &[i, j]);
    let g = monomial_gcd(&restricted).ok_or(SingularityError::EmptyRestriction { i, j, degree: d })?;
    let remaining = d - g.degree(&f.weights);
    let l = wi.lcm(&wj);
    if !remaining.is_multiple_of(l) {
        return Err(SingularityError::IndivisibleDegree { i, j, remaining, lcm: l });
    }
    let count = remaining / l;
    if count == 0 {
        return Ok(None);
    }
    let transverse = others(&[i, j]);
    let q = quotient_at(f, r, transverse)?;
    // lower weight stays a unit, the other one is eliminated
    let (unit, dependent) = if wi < wj { (i, j) } else { (j, i) };
    Ok(Some((
        count,
        QuotientSingularity {
            r,
            a: q.a,
            location: Location::Edge(i, j),
            count,
            transverse,
            local_weights: q.local,
            unit,
            dependent,
            label: String::new(),
        },
    )))
}

/// Every singular location: vertices in index order, then strata in
/// decreasing order of `(i, j)`, labelled `P`, `Q`, `R`, ...
pub fn singular_locus(f: &FamilyRecord) -> Result<SingularLocus, SingularityError> {
    let mut points = Vec::new();
    for i in 1..NVARS {
        if let Some(s) = vertex_singularity(f, i)? {
            points.push(s);
        }
    }
    let mut pairs: Vec<(usize, usize)> =
        (1..NVARS).flat_map(|i| ((i + 1)..NVARS).map(move |j| (i, j))).collect();
    pairs.sort_by(|a, b| b.cmp(a));
    let mut letter = b'P';
    for (i, j) in pairs {
        if let Some((_, mut s)) = stratum_points(f, i, j)? {
            s.label = (letter as char).to_string();
            letter += 1;
            points.push(s);
        }
    }
    Ok(SingularLocus { family: f.id, points })
}

/// The tangent monomial `x_i^k x_j` at a vertex point.
pub fn tangent_monomial(f: &FamilyRecord, s: &QuotientSingularity) -> Option<Monomial> {
    match s.location {
        Location::Vertex(i) => {
            let wj = f.weights.get(s.dependent);
            let k = (f.degree - wj) / f.weights.get(i);
            Some(Monomial::pow_var(i, k).mul(&Monomial::var(s.dependent)))
        }
        Location::Edge(..) => None,
    }
}
