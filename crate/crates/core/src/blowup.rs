//! Intersection numbers on the Kawamata blowup `Y -> X` of one quotient
//! point, local vanishing orders in the orbifold chart, and certified
//! section lists.
//!
//! Orders are stored as numerators over `r`: a transverse coordinate of local
//! weight `l/r` contributes `l`, and the exceptional divisor has discrepancy
//! `1/r`, so a numerator is directly the multiplicity along `E` in units of
//! `a_E`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::catalog::FamilyRecord;
use crate::error::PencilError;
use crate::singularity::{singular_locus, QuotientSingularity};
use crate::wps::{monomials_of_degree, Monomial, Weights, NVARS};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `A^3 = d / (w1 w2 w3 w4)`.
pub fn anticanonical_cube(f: &FamilyRecord) -> BigRational {
    let prod: i64 = f.weights.iter().skip(1).map(i64::from).product();
    rat(f.degree as i64, prod)
}

/// Rationals serialize as `"p/q"` strings.
pub mod ratstr {
    use std::str::FromStr;

    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(q)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        BigRational::from_str(&text).map_err(D::Error::custom)
    }
}

/// Intersection numbers of `B = A - E/r` and `E` on `Y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupContext {
    pub family: FamilyRecord,
    pub sing: QuotientSingularity,
    #[serde(with = "ratstr")]
    pub a3: BigRational,
    #[serde(with = "ratstr")]
    pub b3: BigRational,
    #[serde(with = "ratstr")]
    pub b2e: BigRational,
    #[serde(with = "ratstr")]
    pub be2: BigRational,
    #[serde(with = "ratstr")]
    pub e3: BigRational,
}

pub fn blowup_context(f: &FamilyRecord, s: &QuotientSingularity) -> BlowupContext {
    let (r, a) = (s.r as i64, s.a as i64);
    let a3 = anticanonical_cube(f);
    let b3 = &a3 - rat(1, r * a * (r - a));
    BlowupContext {
        family: f.clone(),
        sing: s.clone(),
        a3,
        b3,
        b2e: rat(1, a * (r - a)),
        be2: rat(-r, a * (r - a)),
        e3: rat(r * r, a * (r - a)),
    }
}

impl BlowupContext {
    pub fn r(&self) -> u32 {
        self.sing.r
    }

    /// The correction `1/(r a (r-a))` subtracted from `A^3`.
    pub fn correction(&self) -> BigRational {
        &self.a3 - &self.b3
    }

    /// `(A - E/r)^3` with `A.E.E = A.A.E = 0` expands to the stored values.
    pub fn identity_holds(&self) -> bool {
        let r = BigRational::from_integer(BigInt::from(self.r()));
        let r2 = &r * &r;
        let b3 = &self.a3 - &self.e3 / (&r2 * &r);
        let b2e = &self.e3 / &r2;
        let be2 = -(&self.e3 / &r);
        b3 == self.b3 && b2e == self.b2e && be2 == self.be2
    }
}

/// The class `bB + cE` on `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DivisorClassY {
    pub b: i64,
    pub c: i64,
}

impl DivisorClassY {
    pub const B: DivisorClassY = DivisorClassY { b: 1, c: 0 };
    pub const E: DivisorClassY = DivisorClassY { b: 0, c: 1 };

    pub fn new(b: i64, c: i64) -> Self {
        DivisorClassY { b, c }
    }
}

impl fmt::Display for DivisorClassY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |k: i64, s: &str| match k {
            1 => s.to_string(),
            -1 => format!("-{s}"),
            _ => format!("{k}{s}"),
        };
        match (self.b, self.c) {
            (0, 0) => write!(f, "0"),
            (b, 0) => write!(f, "{}", term(b, "B")),
            (0, c) => write!(f, "{}", term(c, "E")),
            (b, c) if c < 0 => write!(f, "{} - {}", term(b, "B"), term(-c, "E")),
            (b, c) => write!(f, "{} + {}", term(b, "B"), term(c, "E")),
        }
    }
}

/// `D1 . D2 . D3`, expanded trilinearly over `{B, E}`.
pub fn triple_product(
    ctx: &BlowupContext,
    d1: DivisorClassY,
    d2: DivisorClassY,
    d3: DivisorClassY,
) -> BigRational {
    let basis = |k: usize| match k {
        0 => &ctx.b3,
        1 => &ctx.b2e,
        2 => &ctx.be2,
        _ => &ctx.e3,
    };
    let mut total = BigRational::zero();
    for (i, x) in [d1.b, d1.c].into_iter().enumerate() {
        for (j, y) in [d2.b, d2.c].into_iter().enumerate() {
            for (k, z) in [d3.b, d3.c].into_iter().enumerate() {
                let coeff = x * y * z;
                if coeff != 0 {
                    total += basis(i + j + k) * BigRational::from_integer(BigInt::from(coeff));
                }
            }
        }
    }
    total
}

/// `T . Gamma = (bB+cE)^2 . B` for `Gamma = S ∩ T`, `S ∈ |B|`.
pub fn t_gamma(ctx: &BlowupContext, d: DivisorClassY) -> BigRational {
    triple_product(ctx, d, d, DivisorClassY::B)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    /// Local coordinate with weight `numerator / r`.
    Transverse(u32),
    Unit,
    Dependent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalChart {
    pub r: u32,
    pub roles: [Role; NVARS],
}

pub fn local_chart(s: &QuotientSingularity) -> LocalChart {
    let mut roles = [Role::Unit; NVARS];
    roles[s.dependent] = Role::Dependent;
    for (k, &v) in s.transverse.iter().enumerate() {
        roles[v] = Role::Transverse(s.local_weights[k]);
    }
    LocalChart { r: s.r, roles }
}

impl LocalChart {
    /// `a_E = 1/r`.
    pub fn discrepancy(&self) -> BigRational {
        rat(1, self.r as i64)
    }

    /// Order along `E` times `r`; `None` when `m` involves the dependent
    /// coordinate.
    pub fn order_numerator(&self, m: &Monomial) -> Option<u64> {
        let mut total = 0u64;
        for (k, role) in self.roles.iter().enumerate() {
            let e = m.exp(k) as u64;
            match role {
                Role::Transverse(l) => total += e * *l as u64,
                Role::Unit => {}
                Role::Dependent if e > 0 => return None,
                Role::Dependent => {}
            }
        }
        Some(total)
    }

    pub fn weight(&self, k: usize) -> Option<BigRational> {
        match self.roles[k] {
            Role::Transverse(l) => Some(rat(l as i64, self.r as i64)),
            Role::Unit => Some(BigRational::zero()),
            Role::Dependent => None,
        }
    }
}

/// Order of `m` along `E`; `None` means undetermined (dependent coordinate).
pub fn vanishing_order(chart: &LocalChart, m: &Monomial) -> Option<BigRational> {
    chart.order_numerator(m).map(|n| rat(n as i64, chart.r as i64))
}

/// Degree-`b` monomials of order at least `b/r - c`, dependent coordinate
/// excluded. A certified subspace of `H^0(Y, bB + cE)`.
pub fn sections(f: &FamilyRecord, s: &QuotientSingularity, d: DivisorClassY) -> Vec<Monomial> {
    if d.b < 1 {
        return Vec::new();
    }
    let chart = local_chart(s);
    let threshold = d.b - s.r as i64 * d.c;
    monomials_of_degree(&f.weights, d.b as u32)
        .into_iter()
        .filter(|m| chart.order_numerator(m).is_some_and(|o| o as i64 >= threshold))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingCheck {
    pub holds: bool,
    pub degree_bound: u32,
    /// First `(n, m)` with `m ∈ |nB|` outside the span of the generators.
    pub counterexample: Option<(u32, Monomial)>,
}

/// Multiplicative span membership of monomials, memoised.
struct Span<'a> {
    gens: &'a [Monomial],
    memo: HashMap<Monomial, bool>,
}

impl Span<'_> {
    fn contains(&mut self, m: &Monomial) -> bool {
        if *m == Monomial::ONE {
            return true;
        }
        if let Some(&v) = self.memo.get(m) {
            return v;
        }
        let gens = self.gens;
        let v = gens
            .iter()
            .filter(|g| **g != Monomial::ONE)
            .filter_map(|g| m.checked_div(g))
            .any(|q| self.contains(&q));
        self.memo.insert(*m, v);
        v
    }
}

/// Every monomial of `|nB|`, `n <= bound`, is a product of `gens`.
pub fn verify_ring_generators(
    f: &FamilyRecord,
    s: &QuotientSingularity,
    gens: &[Monomial],
    bound: u32,
) -> RingCheck {
    let mut span = Span { gens, memo: HashMap::new() };
    for n in 1..=bound {
        for m in sections(f, s, DivisorClassY::new(n as i64, 0)) {
            if !span.contains(&m) {
                return RingCheck { holds: false, degree_bound: bound, counterexample: Some((n, m)) };
            }
        }
    }
    RingCheck { holds: true, degree_bound: bound, counterexample: None }
}

/// Minimal monomial generators of `⊕ |nB|` in degrees `1..=bound`, in
/// degree order.
pub fn ring_generators(f: &FamilyRecord, s: &QuotientSingularity, bound: u32) -> Vec<Monomial> {
    let mut gens: Vec<Monomial> = Vec::new();
    for n in 1..=bound {
        let fresh: Vec<Monomial> = {
            let mut span = Span { gens: &gens, memo: HashMap::new() };
            sections(f, s, DivisorClassY::new(n as i64, 0))
                .into_iter()
                .filter(|m| !span.contains(m))
                .collect()
        };
        gens.extend(fresh);
    }
    gens
}

/// A pencil (or net) spanned by monomials of one degree `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PencilSystem {
    pub generators: Vec<Monomial>,
    pub n: u32,
}

impl PencilSystem {
    pub fn new(w: &Weights, generators: Vec<Monomial>) -> Result<Self, PencilError> {
        let distinct: BTreeSet<Monomial> = generators.iter().copied().collect();
        if distinct.len() < 2 {
            return Err(PencilError::NotMobile);
        }
        let n = generators[0].degree(w);
        if generators.iter().any(|g| g.degree(w) != n) {
            return Err(PencilError::NotMobile);
        }
        Ok(PencilSystem { generators, n })
    }

    pub fn display(&self, w: &Weights) -> String {
        let parts: Vec<String> = self.generators.iter().map(|g| g.display(w)).collect();
        format!("<{}>", parts.join(", "))
    }
}

/// A possible centre of a canonical-or-worse valuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Centre {
    /// The base curve of a pencil, `{x_i = x_j = 0} ∩ X`.
    Curve,
    Point(String),
}

impl fmt::Display for Centre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Centre::Curve => write!(f, "C"),
            Centre::Point(p) => write!(f, "{p}"),
        }
    }
}

/// Multiplicity of the pencil along its base curve, when the generators cut
/// out a curve (two coordinates in total).
pub fn base_curve_multiplicity(p: &PencilSystem) -> Option<u32> {
    let vars: BTreeSet<usize> = p.generators.iter().flat_map(|g| g.support()).collect();
    if vars.len() != 2 {
        return None;
    }
    p.generators.iter().map(|g| vars.iter().map(|&k| g.exp(k)).sum()).min()
}

/// Centres of `K_X + (1/n) P`: the base curve when its multiplicity is at
/// least `n`, and each quotient point where `min ord / a_E >= n`.
pub fn cs_of_pencil(f: &FamilyRecord, p: &PencilSystem) -> Result<BTreeSet<Centre>, PencilError> {
    let mut out = BTreeSet::new();
    if base_curve_multiplicity(p).is_some_and(|m| m >= p.n) {
        out.insert(Centre::Curve);
    }
    // the locus was validated with the catalog, so an error here means a
    // hand-built record; no points then
    let locus = singular_locus(f).map(|l| l.points).unwrap_or_default();
    for s in &locus {
        let chart = local_chart(s);
        let mut min = u64::MAX;
        for g in &p.generators {
            let o = chart.order_numerator(g).ok_or_else(|| PencilError::DependentGenerator {
                generator: g.display(&f.weights),
                point: s.label.clone(),
            })?;
            min = min.min(o);
        }
        if min >= p.n as u64 {
            out.extend(s.point_names().into_iter().map(Centre::Point));
        }
    }
    Ok(out)
}

/// Sign helper for reports.
pub fn sign_str(q: &BigRational) -> &'static str {
    if q.is_negative() {
        "< 0"
    } else if q.is_zero() {
        "= 0"
    } else {
        "> 0"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singularity::singular_locus;

    fn f75() -> FamilyRecord {
        FamilyRecord::new(75, 30, [1, 4, 5, 6, 15]).unwrap()
    }

    fn point(f: &FamilyRecord, label: &str) -> QuotientSingularity {
        singular_locus(f).unwrap().find(label).unwrap().clone()
    }

    #[test]
    fn context_at_q() {
        let f = f75();
        let ctx = blowup_context(&f, &point(&f, "Q"));
        assert_eq!(ctx.a3, rat(1, 60));
        assert_eq!(ctx.b3, rat(-1, 30));
        assert_eq!(ctx.e3, rat(25, 4));
        assert_eq!(ctx.b2e, rat(1, 4));
        assert_eq!(ctx.be2, rat(-5, 4));
        assert!(ctx.identity_holds());
    }

    #[test]
    fn context_at_p_of_34_is_flat() {
        let f = FamilyRecord::new(34, 18, [1, 1, 2, 6, 9]).unwrap();
        let ctx = blowup_context(&f, &point(&f, "P"));
        assert_eq!(ctx.a3, rat(1, 6));
        assert!(ctx.b3.is_zero());
    }

    #[test]
    fn triple_products_on_75() {
        let f = f75();
        let q = blowup_context(&f, &point(&f, "Q"));
        let four_b = DivisorClassY::new(4, 0);
        assert_eq!(triple_product(&q, four_b, four_b, DivisorClassY::B), rat(-8, 15));
        let py = blowup_context(&f, &point(&f, "P_y"));
        assert_eq!(t_gamma(&py, DivisorClassY::new(10, 1)), rat(-4, 3));
        let zero = DivisorClassY::new(0, 0);
        assert!(triple_product(&py, zero, four_b, four_b).is_zero());
    }

    #[test]
    fn charts() {
        let f = f75();
        let chart = local_chart(&point(&f, "Q"));
        assert_eq!(chart.roles[0], Role::Transverse(1));
        assert_eq!(chart.roles[1], Role::Transverse(4));
        assert_eq!(chart.roles[2], Role::Unit);
        assert_eq!(chart.roles[3], Role::Transverse(1));
        assert_eq!(chart.roles[4], Role::Dependent);
        assert_eq!(vanishing_order(&chart, &Monomial::pow_var(0, 4)), Some(rat(4, 5)));
        assert_eq!(vanishing_order(&chart, &Monomial::var(1)), Some(rat(4, 5)));
        assert_eq!(vanishing_order(&chart, &Monomial::var(2)), Some(rat(0, 1)));
        assert_eq!(vanishing_order(&chart, &Monomial::var(4)), None);

        let g = FamilyRecord::new(34, 18, [1, 1, 2, 6, 9]).unwrap();
        let chart = local_chart(&point(&g, "P"));
        assert_eq!(vanishing_order(&chart, &Monomial::pow_var(0, 2)), Some(rat(2, 3)));
        assert_eq!(vanishing_order(&chart, &Monomial::var(2)), Some(rat(2, 3)));
        assert_eq!(chart.roles[3], Role::Unit);
        assert_eq!(chart.roles[4], Role::Dependent);
    }

    #[test]
    fn section_lists() {
        let f = f75();
        let w = f.weights;
        let q = point(&f, "Q");
        let got: Vec<String> =
            sections(&f, &q, DivisorClassY::new(4, 0)).iter().map(|m| m.display(&w)).collect();
        assert_eq!(got, vec!["x^4", "y"]);
        let py = sections(&f, &point(&f, "P_y"), DivisorClassY::new(10, 1));
        for m in [
            Monomial::pow_var(0, 10),
            Monomial::pow_var(0, 6).mul(&Monomial::var(1)),
            Monomial::pow_var(0, 5).mul(&Monomial::var(2)),
        ] {
            assert!(py.contains(&m), "{}", m.display(&w));
        }
        let r = sections(&f, &point(&f, "R"), DivisorClassY::new(5, 2));
        assert!(r.contains(&Monomial::var(2)));
    }

    #[test]
    fn ring_of_q() {
        let f = f75();
        let q = point(&f, "Q");
        let xy = [Monomial::var(0), Monomial::var(1)];
        assert!(verify_ring_generators(&f, &q, &xy, 60).holds);
        let bad = verify_ring_generators(&f, &q, &xy[..1], 8);
        assert_eq!(bad.counterexample, Some((4, Monomial::var(1))));
        assert_eq!(ring_generators(&f, &q, 15), xy.to_vec());
    }

    #[test]
    fn pencils() {
        let f = f75();
        let w = f.weights;
        let p = PencilSystem::new(&w, vec![Monomial::pow_var(0, 4), Monomial::var(1)]).unwrap();
        assert_eq!(p.n, 4);
        assert_eq!(p.display(&w), "<x^4, y>");
        let cs = cs_of_pencil(&f, &p).unwrap();
        let names: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
        assert_eq!(names, vec!["Q1", "Q2"]);
        assert!(PencilSystem::new(&w, vec![Monomial::var(1)]).is_err());
        assert!(PencilSystem::new(&w, vec![Monomial::var(1), Monomial::var(0)]).is_err());
    }

    #[test]
    fn pencil_through_dependent_coordinate() {
        let f = f75();
        let w = f.weights;
        // u is eliminated at Q, so its order there is not determined
        let y3x3 = Monomial::pow_var(1, 3).mul(&Monomial::pow_var(0, 3));
        let p = PencilSystem::new(&w, vec![Monomial::var(4), y3x3]).unwrap();
        assert!(matches!(cs_of_pencil(&f, &p), Err(PencilError::DependentGenerator { .. })));
    }

    #[test]
    fn class_display() {
        assert_eq!(DivisorClassY::new(10, 1).to_string(), "10B + E");
        assert_eq!(DivisorClassY::new(4, 0).to_string(), "4B");
        assert_eq!(DivisorClassY::new(5, 2).to_string(), "5B + 2E");
    }
}
