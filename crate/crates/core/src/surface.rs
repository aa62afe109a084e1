//! Surface checks: Hirzebruch-Jung chains, strict transforms through them,
//! contraction of -1-curves, Du Val typing and Newton polygons.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::SurfaceError;

/// Chain `[b1, .., bk]` of rational curves with `E_i^2 = -b_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HJChain {
    pub entries: Vec<u32>,
}

impl HJChain {
    /// `b1 - 1/(b2 - 1/(..))`.
    pub fn value(&self) -> BigRational {
        let mut acc: Option<BigRational> = None;
        for &b in self.entries.iter().rev() {
            let b = BigRational::from_integer(BigInt::from(b));
            acc = Some(match acc {
                None => b,
                Some(tail) => b - tail.recip(),
            });
        }
        acc.unwrap_or_else(BigRational::zero)
    }

    /// Intersection matrix: `-b_i` on the diagonal, 1 between neighbours.
    pub fn gram(&self) -> Vec<Vec<BigRational>> {
        let n = self.entries.len();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for (i, &b) in self.entries.iter().enumerate() {
            m[i][i] = BigRational::from_integer(-BigInt::from(b));
            if i + 1 < n {
                m[i][i + 1] = BigRational::one();
                m[i + 1][i] = BigRational::one();
            }
        }
        m
    }

    /// Coefficients `a_i` with `K = pullback K + sum a_i E_i`.
    pub fn discrepancies(&self) -> Result<Vec<BigRational>, SurfaceError> {
        let rhs: Vec<BigRational> =
            self.entries.iter().map(|&b| BigRational::from_integer(BigInt::from(b as i64 - 2))).collect();
        solve(self.gram(), rhs)
    }
}

impl fmt::Display for HJChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Resolution chain of `1/r(1,a)`, the continued fraction of `r/a`.
pub fn hj_resolve(r: u32, a: u32) -> Result<HJChain, SurfaceError> {
    if r < 2 || a == 0 || a >= r || r.gcd(&a) != 1 {
        return Err(SurfaceError::Invalid(format!("1/{r}(1,{a}) is not a cyclic quotient type")));
    }
    let (mut num, mut den) = (r, a);
    let mut entries = Vec::new();
    while den > 0 {
        let b = num.div_ceil(den);
        entries.push(b);
        (num, den) = (den, b * den - num);
    }
    Ok(HJChain { entries })
}

/// Exact Gaussian elimination for a square system.
fn solve(mut m: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Result<Vec<BigRational>, SurfaceError> {
    let n = rhs.len();
    for col in 0..n {
        let p = (col..n).find(|&i| !m[i][col].is_zero()).ok_or(SurfaceError::SingularGram)?;
        m.swap(col, p);
        rhs.swap(col, p);
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let factor = &m[i][col] / &m[col][col];
                let pivot = m[col].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot).skip(col) {
                    *x -= &factor * y;
                }
                let t = &factor * &rhs[col];
                rhs[i] -= t;
            }
        }
    }
    Ok((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

/// A chain met by the strict transform, `C~ . E_i = incidence[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attachment {
    pub chain: HJChain,
    pub incidence: Vec<i64>,
}

/// `(C~^2, K.C~)` for the strict transform of a curve `C` through cyclic
/// points resolved by the given chains.
///
/// Per chain, `C~ = pullback C - sum mu_i E_i` with `M mu = -v`, so
/// `C~^2 = C^2 - mu.v` and `K.C~ = K.C + a.v`.
pub fn strict_transform_numbers(
    c2: &BigRational,
    kc: &BigRational,
    attachments: &[Attachment],
) -> Result<(BigRational, BigRational), SurfaceError> {
    let (mut self_int, mut canonical) = (c2.clone(), kc.clone());
    for att in attachments {
        if att.incidence.len() != att.chain.entries.len() {
            return Err(SurfaceError::Invalid(format!(
                "chain {} has {} curves but {} incidences",
                att.chain,
                att.chain.entries.len(),
                att.incidence.len()
            )));
        }
        let v: Vec<BigRational> =
            att.incidence.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
        let mu = solve(att.chain.gram(), v.iter().map(|x| -x).collect())?;
        let a = att.chain.discrepancies()?;
        for i in 0..v.len() {
            self_int -= &mu[i] * &v[i];
            canonical += &a[i] * &v[i];
        }
    }
    Ok((self_int, canonical))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve {
    pub self_int: i64,
    pub label: String,
}

/// Rational curves on a smooth surface with their intersection numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub curves: Vec<Curve>,
    /// Symmetric, off-diagonal entries only; the diagonal is ignored.
    pub incidence: Vec<Vec<i64>>,
}

impl CurveConfig {
    pub fn new(curves: Vec<Curve>, incidence: Vec<Vec<i64>>) -> Result<Self, SurfaceError> {
        let n = curves.len();
        if incidence.len() != n || incidence.iter().any(|row| row.len() != n) {
            return Err(SurfaceError::Invalid("incidence matrix has the wrong shape".into()));
        }
        for (i, row) in incidence.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if i != j && (x < 0 || x != incidence[j][i]) {
                    return Err(SurfaceError::Invalid(format!("bad incidence at ({i},{j})")));
                }
            }
        }
        Ok(CurveConfig { curves, incidence })
    }

    /// A chain with the given self-intersections, neighbours meeting once.
    pub fn chain(self_ints: &[i64]) -> Self {
        let n = self_ints.len();
        let curves = self_ints
            .iter()
            .enumerate()
            .map(|(i, &s)| Curve { self_int: s, label: format!("C{}", i + 1) })
            .collect();
        let mut incidence = vec![vec![0; n]; n];
        for i in 1..n {
            incidence[i - 1][i] = 1;
            incidence[i][i - 1] = 1;
        }
        CurveConfig { curves, incidence }
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// `-C_i^2` in curve order, the notation `(2,2,1,5)`.
    pub fn negated(&self) -> Vec<i64> {
        self.curves.iter().map(|c| -c.self_int).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.incidence[i][j] == self.incidence[j][i]))
    }
}

/// Contract the -1-curve `i`.
pub fn blow_down(cfg: &CurveConfig, i: usize) -> Result<CurveConfig, SurfaceError> {
    let c = cfg.curves.get(i).ok_or_else(|| SurfaceError::Invalid(format!("no curve {i}")))?;
    if c.self_int != -1 {
        return Err(SurfaceError::NotMinusOne { index: i, self_int: c.self_int });
    }
    let keep: Vec<usize> = (0..cfg.len()).filter(|&k| k != i).collect();
    let row = &cfg.incidence[i];
    let curves = keep
        .iter()
        .map(|&j| Curve {
            self_int: cfg.curves[j].self_int + row[j] * row[j],
            label: cfg.curves[j].label.clone(),
        })
        .collect();
    let incidence = keep
        .iter()
        .map(|&j| {
            keep.iter().map(|&k| if j == k { 0 } else { cfg.incidence[j][k] + row[j] * row[k] }).collect()
        })
        .collect();
    Ok(CurveConfig { curves, incidence })
}

/// Contract the lowest-indexed -1-curve until none is left. The trace lists
/// every stage as `-C_i^2`, starting with the input; it is empty when
/// nothing was contracted.
pub fn run_mmp(cfg: &CurveConfig) -> (CurveConfig, Vec<Vec<i64>>) {
    let mut current = cfg.clone();
    let mut trace = Vec::new();
    while let Some(i) = current.curves.iter().position(|c| c.self_int == -1) {
        if trace.is_empty() {
            trace.push(current.negated());
        }
        current = blow_down(&current, i).expect("curve i is a -1-curve");
        trace.push(current.negated());
    }
    (current, trace)
}

/// Renders a trace as `(2,2,1,5) -> (2,1,4) -> ...`.
pub fn format_trace(trace: &[Vec<i64>]) -> String {
    trace
        .iter()
        .map(|stage| {
            let parts: Vec<String> = stage.iter().map(i64::to_string).collect();
            format!("({})", parts.join(","))
        })
        .collect::<Vec<_>>()
        .join(" -> ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DuVal {
    Smooth,
    A(usize),
    D(usize),
    E6,
    E7,
    E8,
    NotDuVal,
}

impl fmt::Display for DuVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DuVal::Smooth => write!(f, "smooth"),
            DuVal::A(n) => write!(f, "A{n}"),
            DuVal::D(n) => write!(f, "D{n}"),
            DuVal::E6 => write!(f, "E6"),
            DuVal::E7 => write!(f, "E7"),
            DuVal::E8 => write!(f, "E8"),
            DuVal::NotDuVal => write!(f, "not Du Val"),
        }
    }
}

/// ADE type of the singularity obtained by contracting all curves of `cfg`.
pub fn du_val_type(cfg: &CurveConfig) -> DuVal {
    let n = cfg.len();
    if n == 0 {
        return DuVal::Smooth;
    }
    if cfg.curves.iter().any(|c| c.self_int != -2) {
        return DuVal::NotDuVal;
    }
    let mut edges = 0;
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            match cfg.incidence[i][j] {
                0 => {}
                1 => {
                    adj[i].push(j);
                    adj[j].push(i);
                    edges += 1;
                }
                _ => return DuVal::NotDuVal,
            }
        }
    }
    // a tree: connected with n - 1 edges
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    if edges != n - 1 || seen.contains(&false) {
        return DuVal::NotDuVal;
    }
    let branch: Vec<usize> = (0..n).filter(|&v| adj[v].len() > 2).collect();
    match branch.as_slice() {
        [] => DuVal::A(n),
        [c] if adj[*c].len() == 3 => {
            let mut arms: Vec<usize> = adj[*c].iter().map(|&start| arm_length(&adj, *c, start)).collect();
            arms.sort_unstable();
            match arms.as_slice() {
                [1, 1, _] => DuVal::D(n),
                [1, 2, 2] => DuVal::E6,
                [1, 2, 3] => DuVal::E7,
                [1, 2, 4] => DuVal::E8,
                _ => DuVal::NotDuVal,
            }
        }
        _ => DuVal::NotDuVal,
    }
}

fn arm_length(adj: &[Vec<usize>], centre: usize, start: usize) -> usize {
    let (mut prev, mut cur, mut len) = (centre, start, 1);
    loop {
        let next: Vec<usize> = adj[cur].iter().copied().filter(|&u| u != prev).collect();
        match next.as_slice() {
            [u] => {
                (prev, cur) = (cur, *u);
                len += 1;
            }
            _ => return len,
        }
    }
}

/// Exponent triples of weighted degree `d` in three variables.
pub fn newton_points(d: u32, w: [u32; 3]) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for e1 in 0..=d / w[1] {
        for e2 in 0..=(d - e1 * w[1]) / w[2] {
            let rest = d - e1 * w[1] - e2 * w[2];
            if rest.is_multiple_of(w[0]) {
                out.push([rest / w[0], e1, e2]);
            }
        }
    }
    out.sort_unstable();
    out
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Counter-clockwise hull, collinear points dropped.
fn convex_hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Interior lattice points of the Newton polygon of a general curve of
/// degree `d` in `P(w0,w1,w2)`.
pub fn newton_interior_points(d: u32, w: [u32; 3]) -> Result<(usize, Vec<[u32; 3]>), SurfaceError> {
    if w.contains(&0) {
        return Err(SurfaceError::Invalid("weights must be positive".into()));
    }
    let pts = newton_points(d, w);
    if pts.is_empty() {
        return Err(SurfaceError::EmptyPolygon(d));
    }
    // the plane projects isomorphically onto (e1, e2)
    let flat = |e: &[u32; 3]| (e[1] as i64, e[2] as i64);
    let hull = convex_hull(pts.iter().map(flat).collect());
    if hull.len() < 3 {
        return Ok((0, Vec::new()));
    }
    let inside = |p: (i64, i64)| (0..hull.len()).all(|i| cross(hull[i], hull[(i + 1) % hull.len()], p) > 0);
    let interior: Vec<[u32; 3]> =
        pts.into_iter().filter(|e| e.iter().all(|&x| x >= 1) && inside(flat(e))).collect();
    Ok((interior.len(), interior))
}

/// `d - sum w`, the degree of `K` on a hypersurface of degree `d`.
pub fn adjunction_check(d: u32, weights: &[u32]) -> i64 {
    d as i64 - weights.iter().map(|&w| w as i64).sum::<i64>()
}
