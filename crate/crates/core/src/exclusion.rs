//! Exclusion of candidate centres: curves, smooth points and quotient points.
//!
//! The singular-point test needs a surface `T ∈ |bB + cE|` on the blowup
//! whose intersection `Γ = S ∩ T` with `S = {x_0 = 0}` satisfies
//! `T.Γ <= 0`. A class qualifies when a general degree-`b` form of order
//! exactly `b/r - c` along `E` exists and meets `S` properly there (checked
//! on a random member over `F_p`, see [`crate::generic`]), and
//! `(bB + cE)^2 B <= 0`. Irreducibility of `Γ` is a premise.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::blowup::{
    anticanonical_cube, blowup_context, cs_of_pencil, rat, t_gamma, BlowupContext, Centre, DivisorClassY,
    PencilSystem,
};
use crate::catalog::FamilyRecord;
use crate::error::ClassifyError;
use crate::generic::{LocalModel, DEFAULT_SEED};
use crate::singularity::{singular_locus, QuotientSingularity};
use crate::wps::Monomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// `d < w1 w4`, every curve has degree too small.
    CurveDegreeA,
    /// `d < w2 w4` with `{x_0 = x_1 = 0}` irreducible.
    CurveDegreeB,
    /// `l A^3 < 4` at a smooth point.
    SmoothPointBound,
    /// T-class with `c > 0` at a quotient point.
    PositiveTClass,
    /// T-class `bB` with `b = w1 < w2`: the point forces the pencil.
    PencilTClass,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::CurveDegreeA => "curve-degree-a",
            Rule::CurveDegreeB => "curve-degree-b",
            Rule::SmoothPointBound => "smooth-point-bound",
            Rule::PositiveTClass => "t-class-positive",
            Rule::PencilTClass => "t-class-pencil",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subject {
    Curves,
    SmoothPoints,
    Point { label: String, points: Vec<String>, kind: String },
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Curves => f.write_str("curves"),
            Subject::SmoothPoints => f.write_str("smooth points"),
            Subject::Point { points, kind, .. } => write!(f, "{} {}", points.join(","), kind),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    ExcludedAbsolute(Rule),
    ExcludedConditional {
        pencil: PencilSystem,
        display: String,
    },
    /// Curves in CS lie in the given locus.
    Restricted(String),
    Potential,
    NotApplicable(String),
}

impl Outcome {
    pub fn short(&self) -> String {
        match self {
            Outcome::ExcludedAbsolute(r) => format!("excluded ({r})"),
            Outcome::ExcludedConditional { display, .. } => format!("conditional {display}"),
            Outcome::Restricted(l) => format!("restricted to {l}"),
            Outcome::Potential => "potential".into(),
            Outcome::NotApplicable(why) => format!("not applicable: {why}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub subject: Subject,
    pub outcome: Outcome,
    pub t_class: Option<DivisorClassY>,
    pub evidence: Vec<String>,
}

impl Verdict {
    fn new(subject: Subject, outcome: Outcome, evidence: Vec<String>) -> Self {
        Verdict { subject, outcome, t_class: None, evidence }
    }
}

pub fn curve_rule(f: &FamilyRecord) -> Verdict {
    let w = f.weights.as_array();
    let d = f.degree;
    let (w1, w2, w4) = (w[1], w[2], w[4]);
    let names = f.weights.var_names();
    let mut ev = vec![format!("A^3 = {}", anticanonical_cube(f))];
    let outcome = if w1 > 1 {
        if num_integer::gcd(w1, w2) != 1 {
            Outcome::NotApplicable("gcd trick needed".into())
        } else if d < w1 * w4 {
            ev.push(format!("d = {d} < w1*w4 = {}", w1 * w4));
            Outcome::ExcludedAbsolute(Rule::CurveDegreeA)
        } else if d < w2 * w4 && f.general_member_assumed {
            ev.push(format!("d = {d} < w2*w4 = {}", w2 * w4));
            ev.push(format!("w1*A^3 > A^3 since w1 = {w1} > 1"));
            Outcome::ExcludedAbsolute(Rule::CurveDegreeB)
        } else {
            Outcome::NotApplicable(format!("d = {d} is not < w2*w4 = {}", w2 * w4))
        }
    } else if w2 > 1 && d < w2 * w4 {
        ev.push(format!("d = {d} < w2*w4 = {}", w2 * w4));
        Outcome::Restricted(format!("{{{} = {} = 0}}", names[0], names[1]))
    } else {
        Outcome::NotApplicable(format!("d = {d} is not < w2*w4 = {}", w2 * w4))
    };
    Verdict::new(Subject::Curves, outcome, ev)
}

/// `4 / A^3`.
pub fn smooth_point_bound(f: &FamilyRecord) -> BigRational {
    rat(4, 1) / anticanonical_cube(f)
}

pub fn smooth_point_rule(f: &FamilyRecord, l: Option<u32>) -> Verdict {
    let a3 = anticanonical_cube(f);
    match l {
        Some(l) => {
            let lhs = &a3 * rat(l as i64, 1);
            if lhs < rat(4, 1) {
                Verdict::new(
                    Subject::SmoothPoints,
                    Outcome::ExcludedAbsolute(Rule::SmoothPointBound),
                    vec![format!("l*A^3 = {lhs} < 4")],
                )
            } else {
                Verdict::new(
                    Subject::SmoothPoints,
                    Outcome::NotApplicable(format!("l*A^3 = {lhs} >= 4")),
                    vec![format!("4/A^3 = {}", smooth_point_bound(f))],
                )
            }
        }
        None if (3..=95).contains(&f.id) => Verdict::new(
            Subject::SmoothPoints,
            Outcome::ExcludedAbsolute(Rule::SmoothPointBound),
            vec![
                format!("4/A^3 = {}", smooth_point_bound(f)),
                "premise: smooth points are excluded for families 3..95".into(),
            ],
        ),
        None => Verdict::new(
            Subject::SmoothPoints,
            Outcome::NotApplicable(format!("family {} outside 3..95 and no l given", f.id)),
            Vec::new(),
        ),
    }
}

/// Local test for T-classes at one point, backed by a random member.
pub struct TProbe<'a> {
    ctx: &'a BlowupContext,
    model: Option<LocalModel>,
    seed: u64,
}

impl<'a> TProbe<'a> {
    pub fn new(ctx: &'a BlowupContext) -> Self {
        Self::with_seed(ctx, DEFAULT_SEED)
    }

    pub fn with_seed(ctx: &'a BlowupContext, seed: u64) -> Self {
        TProbe { ctx, model: None, seed }
    }

    /// `S = {x_0 = 0}` is in `|B|` only when `x_0` is a local coordinate of
    /// weight `1/r`.
    pub fn applicable(&self) -> bool {
        let s = &self.ctx.sing;
        s.transverse.iter().position(|&v| v == 0).is_some_and(|k| s.local_weights[k] == 1)
    }

    fn meets_properly(&mut self, b: u32, theta: u32) -> bool {
        if self.model.as_ref().is_none_or(|m| m.cap() < theta) {
            let cap = theta.max(2 * self.model.as_ref().map_or(4, |m| m.cap()));
            match LocalModel::new(&self.ctx.family, &self.ctx.sing, cap, self.seed) {
                Ok(m) => self.model = Some(m),
                Err(_) => return false,
            }
        }
        let model = self.model.as_ref().expect("model built above");
        model.meets_properly(&self.ctx.family, b, theta, 0)
    }

    /// The checkable conditions on a T-class: `b > 0`, `b/r >= c >= 0`,
    /// `T.Γ <= 0`, and a general `T` of exactly that class meeting `S`
    /// properly.
    pub fn accepts(&mut self, d: DivisorClassY) -> bool {
        let r = self.ctx.r() as i64;
        if d.b <= 0 || d.c < 0 || r * d.c > d.b || !self.applicable() {
            return false;
        }
        if t_gamma(self.ctx, d).is_positive() {
            return false;
        }
        self.meets_properly(d.b as u32, (d.b - r * d.c) as u32)
    }
}

/// First class over `b = 1..=b_max` ascending, `c = floor(b/r)..=0`
/// descending, accepted by [`TProbe::accepts`].
pub fn t_class_search(ctx: &BlowupContext, b_max: u32) -> Option<DivisorClassY> {
    let mut probe = TProbe::new(ctx);
    if !probe.applicable() {
        return None;
    }
    let r = ctx.r() as i64;
    (1..=b_max as i64)
        .flat_map(|b| (0..=b / r).rev().map(move |c| DivisorClassY::new(b, c)))
        .find(|&d| probe.accepts(d))
}

pub fn verify_t_class(ctx: &BlowupContext, d: DivisorClassY) -> bool {
    TProbe::new(ctx).accepts(d)
}

/// Default search range for T-classes: one multiple of the degree.
pub fn default_b_max(f: &FamilyRecord) -> u32 {
    f.degree
}

fn point_subject(s: &QuotientSingularity) -> Subject {
    Subject::Point { label: s.label.clone(), points: s.point_names(), kind: s.type_string() }
}

pub fn singular_point_rule(f: &FamilyRecord, s: &QuotientSingularity) -> Result<Verdict, ClassifyError> {
    singular_point_rule_with(f, s, default_b_max(f))
}

pub fn singular_point_rule_with(
    f: &FamilyRecord,
    s: &QuotientSingularity,
    b_max: u32,
) -> Result<Verdict, ClassifyError> {
    let ctx = blowup_context(f, s);
    let mut ev = vec![format!("B^3 = {} - {} = {}", ctx.a3, ctx.correction(), ctx.b3)];
    if !ctx.b3.is_negative() {
        return Ok(Verdict::new(point_subject(s), Outcome::Potential, ev));
    }
    let Some(class) = t_class_search(&ctx, b_max) else {
        if !TProbe::new(&ctx).applicable() {
            ev.push("x_0 is not a local coordinate of weight 1/r".into());
        } else {
            ev.push(format!("no T-class with b <= {b_max}"));
        }
        return Ok(Verdict::new(point_subject(s), Outcome::Potential, ev));
    };
    ev.push(format!("T ~ {class}, T.Gamma = {}", t_gamma(&ctx, class)));
    let w = f.weights.as_array();
    let outcome = if class.c > 0 {
        // B^2 E > 0 against B^3 < 0
        if !(ctx.b2e.is_positive() && ctx.b3.is_negative()) {
            return Err(ClassifyError::InconsistentRule(format!(
                "{}: B^2E = {}, B^3 = {}",
                s.label, ctx.b2e, ctx.b3
            )));
        }
        ev.push(format!("B^2E = {} > 0", ctx.b2e));
        Outcome::ExcludedAbsolute(Rule::PositiveTClass)
    } else if class.b == w[1] as i64 && w[1] < w[2] && f.general_member_assumed {
        let gens = vec![Monomial::pow_var(0, class.b as u32), Monomial::var(1)];
        let pencil = PencilSystem::new(&f.weights, gens)?;
        let display = pencil.display(&f.weights);
        ev.push(format!("b = w1 = {} < w2 = {}", w[1], w[2]));
        Outcome::ExcludedConditional { pencil, display }
    } else {
        ev.push("c = 0 and the pencil rule does not apply".into());
        Outcome::Potential
    };
    Ok(Verdict { subject: point_subject(s), outcome, t_class: Some(class), evidence: ev })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CSReport {
    pub family: u32,
    pub verdicts: Vec<Verdict>,
    pub candidate_sets: Vec<BTreeSet<Centre>>,
    pub premises: Vec<String>,
}

impl CSReport {
    pub fn candidate_strings(&self) -> Vec<String> {
        self.candidate_sets
            .iter()
            .map(|set| {
                let names: Vec<String> = set.iter().map(|c| c.to_string()).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect()
    }
}

pub fn cs_candidates(f: &FamilyRecord) -> Result<CSReport, ClassifyError> {
    let locus = singular_locus(f)?;
    let mut verdicts = vec![curve_rule(f), smooth_point_rule(f, None)];
    let mut sets: BTreeSet<BTreeSet<Centre>> = BTreeSet::new();
    for s in &locus.points {
        let v = singular_point_rule(f, s)?;
        match &v.outcome {
            Outcome::Potential => {
                for p in s.point_names() {
                    sets.insert(BTreeSet::from([Centre::Point(p)]));
                }
            }
            Outcome::ExcludedConditional { pencil, display } => {
                let cs = cs_of_pencil(f, pencil)?;
                if let Some(p) = s.point_names().into_iter().find(|p| !cs.contains(&Centre::Point(p.clone())))
                {
                    return Err(ClassifyError::InconsistentRule(format!("{p} is not in CS of {display}")));
                }
                sets.insert(cs);
            }
            _ => {}
        }
        verdicts.push(v);
    }
    let mut premises = vec!["derived counting rule for points on strata".to_string()];
    if f.superrigid {
        premises.push("superrigid: every nonterminal mobile system is strictly canonical".into());
    }
    if f.general_member_assumed {
        premises.push("general member: Gamma and {x0 = x1 = 0} ∩ X irreducible".into());
    }
    premises.push("smooth points excluded by the bound l < 4/A^3".into());
    let conditional = verdicts.iter().any(|v| matches!(v.outcome, Outcome::ExcludedConditional { .. }));
    if conditional && f.id != 75 {
        premises.push(format!(
            "conditional exclusion for family {} extends the pencil argument of family 75",
            f.id
        ));
    }
    Ok(CSReport { family: f.id, verdicts, candidate_sets: sets.into_iter().collect(), premises })
}
