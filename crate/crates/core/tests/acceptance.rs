//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic
//! throughout. Runs without the libtest harness so the lines always print.

use std::collections::BTreeSet;
use std::process::ExitCode;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use fano_sieve::blowup::{
    blowup_context, sections, triple_product, verify_ring_generators, BlowupContext, DivisorClassY,
};
use fano_sieve::catalog::{validate_record, Catalog, FamilyRecord};
use fano_sieve::classify::{classify, emit_report, ClassificationReport, ConclusionKind, Format};
use fano_sieve::exclusion::{
    cs_candidates, curve_rule, singular_point_rule, smooth_point_bound, smooth_point_rule, verify_t_class,
    Outcome, Rule,
};
use fano_sieve::singularity::{singular_locus, Location, QuotientSingularity};
use fano_sieve::surface::{
    adjunction_check, blow_down, du_val_type, format_trace, hj_resolve, newton_interior_points, run_mmp,
    strict_transform_numbers, Attachment, Curve, CurveConfig, DuVal,
};
use fano_sieve::wps::{monomials_of_degree, Monomial, Weights};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eq<T: PartialEq + std::fmt::Debug>(got: T, want: T, what: &str) -> Check {
    ensure(got == want, || format!("{what}: got {got:?}, want {want:?}"))
}

fn family(id: u32) -> FamilyRecord {
    Catalog::bundled().get(id).expect("bundled family").clone()
}

fn point(f: &FamilyRecord, label: &str) -> QuotientSingularity {
    singular_locus(f).expect("locus").find(label).expect("label").clone()
}

fn ctx(f: &FamilyRecord, label: &str) -> BlowupContext {
    blowup_context(f, &point(f, label))
}

fn c1_catalog() -> Check {
    for id in [5, 34, 75, 88, 90] {
        let f = family(id);
        let w = f.weights.as_array();
        eq(f.degree, w[1] + w[2] + w[3] + w[4], &format!("adjunction for {id}"))?;
        for c in validate_record(&f) {
            ensure(c.passed, || format!("family {id}: {} failed: {}", c.check, c.detail))?;
        }
    }
    Ok(())
}

/// `(r, a, count, stratum variables)` in locus order.
fn locus_summary(f: &FamilyRecord) -> Vec<(u32, u32, u32, Vec<usize>)> {
    singular_locus(f)
        .expect("locus")
        .points
        .iter()
        .map(|s| {
            let vars = match s.location {
                Location::Vertex(i) => vec![i],
                Location::Edge(i, j) => vec![i, j],
            };
            (s.r, s.a, s.count, vars)
        })
        .collect()
}

fn c2_singular_loci() -> Check {
    // x y z t u = 0 1 2 3 4
    let want75 =
        vec![(4, 1, 1, vec![1]), (3, 1, 1, vec![3, 4]), (5, 4, 2, vec![2, 4]), (2, 1, 2, vec![1, 3])];
    eq(locus_summary(&family(75)), want75, "family 75")?;
    let py = point(&family(75), "P_y");
    eq(py.transverse, [0, 2, 4], "P_y transverse {x,z,u}")?;
    // x0 x1 y z t = 0 1 2 3 4
    let want34 = vec![(3, 1, 1, vec![3, 4]), (2, 1, 3, vec![2, 3])];
    eq(locus_summary(&family(34)), want34, "family 34")
}

fn c3_blowup_numbers() -> Check {
    let f = family(75);
    // oracle: A^3 = d / (w1 w2 w3 w4), correction 1/(r a (r-a))
    let a3 = q(30, 4 * 5 * 6 * 15);
    eq(a3.clone(), q(1, 60), "A^3 oracle")?;
    let c = ctx(&f, "Q");
    eq(c.a3.clone(), q(1, 60), "A^3")?;
    eq(c.correction(), q(1, 20), "1/(r a (r-a)) at Q")?;
    eq(c.b3.clone(), q(1, 60) - q(1, 20), "B^3 at Q")?;
    eq(c.b3.clone(), q(-1, 30), "B^3 at Q")?;
    for s in singular_locus(&f).expect("locus").points {
        let c = blowup_context(&f, &s);
        let oracle = &a3 - q(1, (s.r * s.a * (s.r - s.a)) as i64);
        eq(c.b3.clone(), oracle, &format!("B^3 at {}", s.label))?;
        ensure(c.b3.is_negative(), || format!("B^3 at {} is {}", s.label, c.b3))?;
        ensure(c.identity_holds(), || format!("(A - E/r)^3 identity at {}", s.label))?;
    }
    Ok(())
}

fn c4_t_classes() -> Check {
    let f = family(75);
    let table = [("P_y", 10, 1), ("P", 5, 1), ("Q", 4, 0), ("R", 5, 2)];
    for (label, b, c) in table {
        let cx = ctx(&f, label);
        let d = DivisorClassY::new(b, c);
        ensure(verify_t_class(&cx, d), || format!("{d} rejected at {label}"))?;
        // oracle: (bB+cE)^2 B = b^2 B^3 + 2bc B^2E + c^2 BE^2
        let oracle = q(b * b, 1) * &cx.b3 + q(2 * b * c, 1) * &cx.b2e + q(c * c, 1) * &cx.be2;
        let tg = triple_product(&cx, d, d, DivisorClassY::B);
        eq(tg.clone(), oracle, &format!("T.Gamma at {label}"))?;
        ensure(!tg.is_positive(), || format!("T.Gamma = {tg} at {label}"))?;
        for (other, b2, c2) in table {
            let accepted = verify_t_class(&cx, DivisorClassY::new(b2, c2));
            ensure(accepted == (other == label), || format!("{b2}B + {c2}E at {label}: {accepted}"))?;
        }
    }
    eq(verify_t_class(&ctx(&f, "Q"), DivisorClassY::new(1, 1)), false, "(1,1) at Q")?;
    eq(verify_t_class(&ctx(&f, "P"), DivisorClassY::new(4, 1)), false, "(4,1) at P")?;

    for label in ["P_y", "P", "R"] {
        let v = singular_point_rule(&f, &point(&f, label)).map_err(|e| e.to_string())?;
        eq(v.outcome, Outcome::ExcludedAbsolute(Rule::PositiveTClass), label)?;
    }
    let v = singular_point_rule(&f, &point(&f, "Q")).map_err(|e| e.to_string())?;
    match v.outcome {
        Outcome::ExcludedConditional { pencil, .. } => {
            eq(pencil.generators, vec![Monomial::pow_var(0, 4), Monomial::var(1)], "pencil at Q")?;
            eq(pencil.n, 4, "pencil degree")
        }
        o => Err(format!("Q: {o:?}")),
    }
}

fn set_strings(f: &FamilyRecord) -> Result<Vec<Vec<String>>, String> {
    let r = cs_candidates(f).map_err(|e| e.to_string())?;
    Ok(r.candidate_sets.iter().map(|s| s.iter().map(|c| c.to_string()).collect()).collect())
}

fn c5_cs_sets() -> Check {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let got75: BTreeSet<Vec<String>> = set_strings(&family(75))?.into_iter().collect();
    eq(got75, BTreeSet::from([s(&["Q1", "Q2"])]), "family 75")?;
    let got34: BTreeSet<Vec<String>> = set_strings(&family(34))?.into_iter().collect();
    eq(got34, BTreeSet::from([s(&["P"]), s(&["C", "P", "Q1", "Q2", "Q3"])]), "family 34")
}

fn c6_curves() -> Check {
    let v = curve_rule(&family(75));
    eq(v.outcome, Outcome::ExcludedAbsolute(Rule::CurveDegreeA), "75")?;
    ensure(v.evidence.iter().any(|e| e.contains("30 < w1*w4 = 60")), || {
        format!("75 evidence {:?}", v.evidence)
    })?;
    let v = curve_rule(&family(88));
    ensure(matches!(v.outcome, Outcome::Restricted(_)), || format!("88: {:?}", v.outcome))?;
    ensure(v.evidence.iter().any(|e| e.contains("42 < w2*w4 = 126")), || {
        format!("88 evidence {:?}", v.evidence)
    })?;
    match curve_rule(&family(34)).outcome {
        Outcome::NotApplicable(why) => ensure(why.contains("18 is not < w2*w4 = 18"), || why.clone()),
        o => Err(format!("34: {o:?}")),
    }
}

fn c7_smooth_points() -> Check {
    let f = family(75);
    eq(smooth_point_bound(&f), q(240, 1), "4/A^3")?;
    ensure(
        matches!(smooth_point_rule(&f, Some(239)).outcome, Outcome::ExcludedAbsolute(Rule::SmoothPointBound)),
        || "l = 239 not excluded".into(),
    )?;
    ensure(matches!(smooth_point_rule(&f, Some(240)).outcome, Outcome::NotApplicable(_)), || {
        "l = 240 excluded".into()
    })
}

fn c8_surface() -> Check {
    eq(hj_resolve(3, 2).map_err(|e| e.to_string())?.entries, vec![2, 2], "[2,2]")?;
    eq(hj_resolve(5, 1).map_err(|e| e.to_string())?.entries, vec![5], "[5]")?;
    // C = S ∩ T on T ~ 4B at Q: C^2 = B.B.4B, K_T.C = (K_Y + T).T.S = 3B.4B.B
    let cx = ctx(&family(75), "Q");
    let (b, four_b, three_b) = (DivisorClassY::B, DivisorClassY::new(4, 0), DivisorClassY::new(3, 0));
    let c2 = triple_product(&cx, b, b, four_b);
    let kc = triple_product(&cx, three_b, four_b, b);
    eq(c2.clone(), q(-2, 15), "C^2 from triple products")?;
    eq(kc.clone(), q(-2, 5), "K.C from triple products")?;
    let atts = [
        Attachment { chain: hj_resolve(3, 2).map_err(|e| e.to_string())?, incidence: vec![0, 1] },
        Attachment { chain: hj_resolve(5, 1).map_err(|e| e.to_string())?, incidence: vec![1] },
    ];
    let (s, k) = strict_transform_numbers(&c2, &kc, &atts).map_err(|e| e.to_string())?;
    ensure(s.is_integer() && k.is_integer(), || format!("non-integral ({s}, {k})"))?;
    eq((s, k), (q(-1, 1), q(-1, 1)), "strict transform")?;
    let (last, trace) = run_mmp(&CurveConfig::chain(&[-2, -2, -1, -5]));
    eq(format_trace(&trace).as_str(), "(2,2,1,5) -> (2,1,4) -> (1,3) -> (2)", "MMP trace")?;
    eq(du_val_type(&last), DuVal::A(1), "final singularity")
}

/// Pick's theorem on the triangle spanned by the pure powers.
fn pick_interior(d: i64, w: [i64; 3]) -> i64 {
    let verts = [(0, 0), (d / w[1], 0), (0, d / w[2])];
    let twice_area = (verts[1].0 * verts[2].1).abs();
    let boundary: i64 = (0..3)
        .map(|i| {
            let (a, b) = (verts[i], verts[(i + 1) % 3]);
            (b.0 - a.0).abs().gcd(&(b.1 - a.1).abs())
        })
        .sum();
    (twice_area - boundary + 2) / 2
}

fn c9_newton() -> Check {
    let (count, pts) = newton_interior_points(18, [1, 6, 9]).map_err(|e| e.to_string())?;
    eq(count as i64, pick_interior(18, [1, 6, 9]), "Pick oracle")?;
    eq((count, pts), (1, vec![[3, 1, 1]]), "interior points")
}

fn c10_adjunction() -> Check {
    eq(adjunction_check(18, &[1, 2, 6, 9]), 0, "(18;1,2,6,9)")?;
    eq(adjunction_check(42, &[1, 6, 14, 21]), 0, "(42;1,6,14,21)")
}

fn c11_rings() -> Check {
    let f = family(75);
    let qp = point(&f, "Q");
    let check = verify_ring_generators(&f, &qp, &[Monomial::var(0), Monomial::var(1)], 60);
    ensure(check.holds, || format!("k[x,y] at Q: {:?}", check.counterexample))?;
    for n in 0..=60i64 {
        let oracle = (0..=n / 4).count();
        let got = if n == 0 { 1 } else { sections(&f, &qp, DivisorClassY::new(n, 0)).len() };
        eq(got, oracle, &format!("|{n}B| at Q"))?;
    }
    let g = family(34);
    let gens = [Monomial::var(0), Monomial::var(1), Monomial::var(2)];
    let check = verify_ring_generators(&g, &point(&g, "P"), &gens, 36);
    ensure(check.holds, || format!("k[x0,x1,y] at P: {:?}", check.counterexample))
}

fn conclusion(
    r: &ClassificationReport,
    kind: ConclusionKind,
) -> Result<(Vec<String>, Vec<String>, String), String> {
    r.conclusions_of(kind)
        .next()
        .map(|c| (c.generators.clone(), c.pencil.clone(), c.base.clone()))
        .ok_or_else(|| format!("family {}: no {kind:?}", r.family.id))
}

fn c12_classify() -> Check {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let r = classify(&family(75)).map_err(|e| e.to_string())?;
    let (_, pencil, base) = conclusion(&r, ConclusionKind::K3)?;
    eq((pencil, base.as_str()), (s(&["x^4", "y"]), "P^1"), "75 K3")?;
    ensure(r.has(ConclusionKind::NoElliptic) && !r.has(ConclusionKind::Elliptic), || "75 elliptic".into())?;
    ensure(r.has(ConclusionKind::FanoRigidity), || "75 rigid".into())?;

    for (id, k3, ell, base) in [
        (34, ["x0", "x1"], ["x0", "x1", "y"], "P(1,1,2)"),
        (88, ["x0", "x1"], ["x0", "x1", "y"], "P(1,1,6)"),
        (90, ["x", "y"], ["x", "y", "z"], "P(1,3,4)"),
    ] {
        let r = classify(&family(id)).map_err(|e| e.to_string())?;
        let (gens, _, k3_base) = conclusion(&r, ConclusionKind::K3)?;
        eq((gens, k3_base.as_str()), (s(&k3), "P^1"), &format!("{id} K3"))?;
        let (gens, _, e_base) = conclusion(&r, ConclusionKind::Elliptic)?;
        eq((gens, e_base.as_str()), (s(&ell), base), &format!("{id} elliptic"))?;
        ensure(r.has(ConclusionKind::FanoRigidity), || format!("{id} rigid"))?;
    }
    Ok(())
}

/// Coefficient of `q^d` in `prod 1/(1 - q^w)`.
fn series_count(w: &[u32; 5], d: usize) -> u64 {
    let mut c = vec![0u64; d + 1];
    c[0] = 1;
    for &wi in w {
        for n in wi as usize..=d {
            c[n] += c[n - wi as usize];
        }
    }
    c[d]
}

fn run_prop<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Check
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config { cases: 64, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn c13_properties() -> Check {
    run_prop("monomial count", (1u32..8, 1u32..10, 1u32..12, 1u32..16, 0usize..=60), |(a, b, c, e, d)| {
        let w = [1, a, b, c, e];
        if let Ok(weights) = Weights::new(w) {
            prop_assert_eq!(monomials_of_degree(&weights, d as u32).len() as u64, series_count(&w, d));
        }
        Ok(())
    })?;

    let f = family(75);
    let cx = ctx(&f, "P_y");
    let class = (-6i64..7, -6i64..7).prop_map(|(b, c)| DivisorClassY::new(b, c));
    run_prop(
        "trilinear",
        (class.clone(), class.clone(), class.clone(), class, -4i64..5),
        |(x, y, z, t, k)| {
            let tp = |a, b, c| triple_product(&cx, a, b, c);
            prop_assert_eq!(tp(x, y, z), tp(y, x, z));
            prop_assert_eq!(tp(x, y, z), tp(z, y, x));
            let sum = DivisorClassY::new(x.b + t.b, x.c + t.c);
            prop_assert_eq!(tp(sum, y, z), tp(x, y, z) + tp(t, y, z));
            let scaled = DivisorClassY::new(k * x.b, k * x.c);
            prop_assert_eq!(tp(scaled, y, z), q(k, 1) * tp(x, y, z));
            Ok(())
        },
    )?;

    run_prop("hj round trip", (2u32..=50, 1u32..50), |(r, a)| {
        let a = a % r;
        if a == 0 || r.gcd(&a) != 1 {
            return Ok(());
        }
        let chain = hj_resolve(r, a).map_err(|e| TestCaseError::fail(e.to_string()))?;
        // oracle: p_k = b_k p_{k-1} - p_{k-2} from the front
        let (mut p0, mut p1) = (BigInt::from(1), BigInt::from(chain.entries[0]));
        let (mut q0, mut q1) = (BigInt::from(0), BigInt::from(1));
        for &b in &chain.entries[1..] {
            let b = BigInt::from(b);
            (p0, p1) = (p1.clone(), &b * &p1 - p0);
            (q0, q1) = (q1.clone(), &b * &q1 - q0);
        }
        prop_assert_eq!(BigRational::new(p1, q1), q(r as i64, a as i64));
        prop_assert!(chain.entries.iter().all(|&b| b >= 2));
        Ok(())
    })?;

    let config = (2usize..7)
        .prop_flat_map(|n| {
            (Just(n), proptest::collection::vec(-5i64..0, n), proptest::collection::vec(0i64..3, n * n), 0..n)
        })
        .prop_map(|(n, mut selfs, raw, i)| {
            selfs[i] = -1;
            let mut inc = vec![vec![0; n]; n];
            for a in 0..n {
                for b in (a + 1)..n {
                    inc[a][b] = raw[a * n + b];
                    inc[b][a] = raw[a * n + b];
                }
            }
            let curves = selfs.iter().map(|&s| Curve { self_int: s, label: String::new() }).collect();
            (CurveConfig::new(curves, inc).expect("valid config"), i)
        });
    run_prop("blow-down symmetry", config, |(cfg, i)| {
        let out = blow_down(&cfg, i).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(out.len(), cfg.len() - 1);
        prop_assert!(out.is_symmetric());
        Ok(())
    })?;

    for id in [5, 34, 75, 88, 90] {
        let f = family(id);
        let a = emit_report(&classify(&f).map_err(|e| e.to_string())?, Format::Json);
        let b = emit_report(&classify(&f).map_err(|e| e.to_string())?, Format::Json);
        ensure(a == b, || format!("family {id}: reports differ"))?;
        ensure(!a.is_empty(), || "empty report".into())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("catalog rows 5, 34, 75, 88, 90 validate", c1_catalog),
        ("singular loci of families 75 and 34", c2_singular_loci),
        ("A^3 = 1/60 and B^3 at all points of 75", c3_blowup_numbers),
        ("T-classes and point verdicts on 75", c4_t_classes),
        ("candidate CS sets of 75 and 34", c5_cs_sets),
        ("curve rule on 75, 88, 34", c6_curves),
        ("smooth-point bound 240 is strict", c7_smooth_points),
        ("surface pipeline: chains, strict transform, MMP", c8_surface),
        ("Newton polygon of degree 18 in (1,6,9)", c9_newton),
        ("adjunction of the K3 fibres", c10_adjunction),
        ("ring generators at Q (75) and P (34)", c11_rings),
        ("classification of 75, 34, 88, 90", c12_classify),
        ("property suites and determinism", c13_properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS {:>2} {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
