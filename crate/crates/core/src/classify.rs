//! Per-family pipeline: singular locus, blowups, exclusion, candidate CS
//! sets, and the fibrations read off the anticanonical ring of the blowup at
//! each candidate centre.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::blowup::{blowup_context, cs_of_pencil, ring_generators, t_gamma, verify_ring_generators, Centre};
use crate::catalog::FamilyRecord;
use crate::error::ClassifyError;
use crate::exclusion::{cs_candidates, Outcome, Subject, Verdict};
use crate::singularity::{singular_locus, QuotientSingularity};
use crate::wps::{describe_wps, Monomial};

pub const REPORT_SCHEMA: &str = "fano-sieve/report/v1";

/// Families whose fibration conclusions have a published reference.
pub const REFERENCE_FAMILIES: [u32; 4] = [34, 75, 88, 90];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConclusionKind {
    K3,
    Elliptic,
    NoElliptic,
    FanoRigidity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conclusion {
    pub kind: ConclusionKind,
    /// Ring generators defining the map.
    pub generators: Vec<String>,
    /// For a K3 fibration, the same map as a pencil of one degree.
    pub pencil: Vec<String>,
    pub base_weights: Vec<u32>,
    /// Normalized base, e.g. `P^1` for `P(1,4)`.
    pub base: String,
    pub centres: Vec<String>,
    pub evidence: Vec<String>,
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocusRow {
    pub label: String,
    pub points: Vec<String>,
    pub kind: String,
    pub local: String,
    pub location: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextRow {
    pub label: String,
    pub a3: String,
    pub b3: String,
    pub b2e: String,
    pub be2: String,
    pub e3: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema: String,
    pub family: FamilyRecord,
    pub label: String,
    pub locus: Vec<LocusRow>,
    pub contexts: Vec<ContextRow>,
    pub verdicts: Vec<Verdict>,
    pub candidate_sets: Vec<Vec<String>>,
    pub premises: Vec<String>,
    pub conclusions: Vec<Conclusion>,
}

impl ClassificationReport {
    pub fn conclusions_of(&self, kind: ConclusionKind) -> impl Iterator<Item = &Conclusion> {
        self.conclusions.iter().filter(move |c| c.kind == kind)
    }

    pub fn has(&self, kind: ConclusionKind) -> bool {
        self.conclusions_of(kind).next().is_some()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ClassifyOptions {
    /// Ring verification bound; defaults to `4 lcm` of the generator degrees.
    pub degree_bound: Option<u32>,
}

fn names(f: &FamilyRecord, ms: &[Monomial]) -> Vec<String> {
    ms.iter().map(|m| m.display(&f.weights)).collect()
}

/// Fibration read off the ring at `s`, or `None` for other generator counts.
fn fibration_at(
    f: &FamilyRecord,
    s: &QuotientSingularity,
    centres: &[String],
    opts: ClassifyOptions,
) -> Result<Option<Conclusion>, ClassifyError> {
    let w4 = f.weights.get(4);
    let gens = ring_generators(f, s, w4);
    let degrees: Vec<u32> = gens.iter().map(|g| g.degree(&f.weights)).collect();
    let kind = match gens.len() {
        2 => ConclusionKind::K3,
        3 => ConclusionKind::Elliptic,
        _ => return Ok(None),
    };
    let lcm = degrees.iter().fold(1u32, |acc, d| acc.lcm(d));
    let bound = opts.degree_bound.unwrap_or(4 * lcm);
    let check = verify_ring_generators(f, s, &gens, bound);
    if let Some((n, m)) = &check.counterexample {
        return Err(ClassifyError::IncompleteEvidence(format!(
            "ring at {} is not generated by {} in degree {n}: {}",
            s.label,
            names(f, &gens).join(","),
            m.display(&f.weights)
        )));
    }
    let pencil = if kind == ConclusionKind::K3 {
        gens.iter()
            .zip(&degrees)
            .map(|(g, d)| {
                let k = lcm / d;
                Monomial(g.exponents().map(|e| e * k))
            })
            .collect()
    } else {
        Vec::new()
    };
    let ring = names(f, &gens).join(",");
    Ok(Some(Conclusion {
        kind,
        generators: names(f, &gens),
        pencil: names(f, &pencil),
        base_weights: degrees.clone(),
        base: describe_wps(&degrees),
        centres: centres.to_vec(),
        evidence: vec![
            format!("R(Y,B) at {} = k[{ring}], verified to degree {bound}", s.label),
            format!("CS set {{{}}}", centres.join(",")),
        ],
        confirmed: REFERENCE_FAMILIES.contains(&f.id),
    }))
}

pub fn classify(f: &FamilyRecord) -> Result<ClassificationReport, ClassifyError> {
    classify_with(f, ClassifyOptions::default())
}

pub fn classify_with(f: &FamilyRecord, opts: ClassifyOptions) -> Result<ClassificationReport, ClassifyError> {
    let locus = singular_locus(f)?;
    let names_w = f.weights.var_names();
    let rows = locus
        .points
        .iter()
        .map(|s| LocusRow {
            label: s.label.clone(),
            points: s.point_names(),
            kind: s.type_string(),
            local: s.local_type_string(&names_w),
            location: s.location_string(&names_w),
        })
        .collect();
    let contexts = locus
        .points
        .iter()
        .map(|s| {
            let c = blowup_context(f, s);
            ContextRow {
                label: s.label.clone(),
                a3: c.a3.to_string(),
                b3: c.b3.to_string(),
                b2e: c.b2e.to_string(),
                be2: c.be2.to_string(),
                e3: c.e3.to_string(),
            }
        })
        .collect();
    let cs = cs_candidates(f)?;

    // which point drives each candidate set
    let mut drivers: BTreeMap<Vec<String>, &QuotientSingularity> = BTreeMap::new();
    for (s, v) in locus.points.iter().zip(cs.verdicts.iter().skip(2)) {
        match &v.outcome {
            Outcome::Potential => {
                for p in s.point_names() {
                    drivers.entry(vec![p]).or_insert(s);
                }
            }
            Outcome::ExcludedConditional { pencil, .. } => {
                let set: Vec<String> = cs_of_pencil(f, pencil)?.iter().map(Centre::to_string).collect();
                drivers.entry(set).or_insert(s);
            }
            _ => {}
        }
    }
    let candidate_sets: Vec<Vec<String>> =
        cs.candidate_sets.iter().map(|set| set.iter().map(Centre::to_string).collect()).collect();

    let mut conclusions: Vec<Conclusion> = Vec::new();
    let mut explained = 0;
    for set in &candidate_sets {
        let Some(s) = drivers.get(set) else { continue };
        if let Some(c) = fibration_at(f, s, set, opts)? {
            explained += 1;
            match conclusions.iter_mut().find(|o| o.kind == c.kind && o.generators == c.generators) {
                Some(o) => o.centres.extend(c.centres),
                None => conclusions.push(c),
            }
        }
    }
    conclusions.sort_by_key(|c| c.kind);
    let confirmed = REFERENCE_FAMILIES.contains(&f.id);
    if !conclusions.iter().any(|c| c.kind == ConclusionKind::Elliptic) {
        conclusions.push(Conclusion {
            kind: ConclusionKind::NoElliptic,
            generators: Vec::new(),
            pencil: Vec::new(),
            base_weights: Vec::new(),
            base: String::new(),
            centres: Vec::new(),
            evidence: vec![format!(
                "no candidate set has a ring with 3 generators ({} set(s) checked)",
                candidate_sets.len()
            )],
            confirmed,
        });
    }
    if f.superrigid && !candidate_sets.is_empty() && explained == candidate_sets.len() {
        conclusions.push(Conclusion {
            kind: ConclusionKind::FanoRigidity,
            generators: Vec::new(),
            pencil: Vec::new(),
            base_weights: Vec::new(),
            base: String::new(),
            centres: Vec::new(),
            evidence: vec![
                "every candidate CS set yields a K3 or elliptic fibration".into(),
                "premise: no nonterminal mobile system leads to another Fano".into(),
            ],
            confirmed,
        });
    }
    let mut premises = cs.premises.clone();
    if !confirmed {
        premises.push("fibration conclusions unconfirmed for this family".into());
    }
    Ok(ClassificationReport {
        schema: REPORT_SCHEMA.into(),
        family: f.clone(),
        label: f.label(),
        locus: rows,
        contexts,
        verdicts: cs.verdicts,
        candidate_sets,
        premises,
        conclusions,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

pub fn emit_report(report: &ClassificationReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => text_report(report),
    }
}

fn text_report(r: &ClassificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "family {}: {}", r.family.id, r.label);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<10} {:<22} {:<10} {:<10} {:<12} verdict",
        "point", "type", "location", "B^3", "class"
    );
    let f = &r.family;
    let locus = singular_locus(f).map(|l| l.points).unwrap_or_default();
    for (row, ctx) in r.locus.iter().zip(&r.contexts) {
        let verdict = r
            .verdicts
            .iter()
            .find(|v| matches!(&v.subject, Subject::Point { label, .. } if *label == row.label));
        let class = verdict.and_then(|v| v.t_class).map(|c| c.to_string()).unwrap_or_else(|| "-".into());
        let outcome = verdict.map(|v| v.outcome.short()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{:<10} {:<22} {:<10} {:<10} {:<12} {}",
            row.points.join(","),
            row.local,
            row.location,
            ctx.b3,
            class,
            outcome
        );
        if let (Some(v), Some(s)) = (verdict, locus.iter().find(|s| s.label == row.label)) {
            if let Some(c) = v.t_class {
                let _ = writeln!(out, "{:<10} T.Gamma = {}", "", t_gamma(&blowup_context(f, s), c));
            }
        }
    }
    let _ = writeln!(out);
    for v in &r.verdicts {
        if matches!(v.subject, Subject::Curves | Subject::SmoothPoints) {
            let _ = writeln!(out, "{}: {}", v.subject, v.outcome.short());
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "candidate CS sets:");
    for set in &r.candidate_sets {
        let _ = writeln!(out, "  {{{}}}", set.join(","));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "conclusions:");
    for c in &r.conclusions {
        let tag = if c.confirmed { "" } else { " [unconfirmed]" };
        let line = match c.kind {
            ConclusionKind::K3 => format!(
                "K3 fibration ({}) -> {} = {}, pencil ({})",
                c.generators.join(","),
                weights_label(&c.base_weights),
                c.base,
                c.pencil.join(",")
            ),
            ConclusionKind::Elliptic => {
                format!("elliptic fibration ({}) -> {}", c.generators.join(","), c.base)
            }
            ConclusionKind::NoElliptic => "no elliptic fibration".into(),
            ConclusionKind::FanoRigidity => "no other Fano model (rigid)".into(),
        };
        let _ = writeln!(out, "  {line}{tag}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "premises:");
    for p in &r.premises {
        let _ = writeln!(out, "  {p}");
    }
    out
}

fn weights_label(w: &[u32]) -> String {
    let parts: Vec<String> = w.iter().map(u32::to_string).collect();
    format!("P({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;

    #[test]
    fn family_75() {
        let cat = Catalog::bundled();
        let r = classify(cat.get(75).unwrap()).unwrap();
        let k3: Vec<&Conclusion> = r.conclusions_of(ConclusionKind::K3).collect();
        assert_eq!(k3.len(), 1);
        assert_eq!(k3[0].pencil, vec!["x^4", "y"]);
        assert_eq!(k3[0].base, "P^1");
        assert!(r.has(ConclusionKind::NoElliptic));
        assert!(r.has(ConclusionKind::FanoRigidity));
    }

    #[test]
    fn text_table_lists_the_classes() {
        let cat = Catalog::bundled();
        let text = emit_report(&classify(cat.get(75).unwrap()).unwrap(), Format::Text);
        for class in ["10B + E", "5B + E", "4B", "5B + 2E"] {
            assert!(text.contains(class), "{class} missing:\n{text}");
        }
    }

    #[test]
    fn json_round_trips() {
        let cat = Catalog::bundled();
        let r = classify(cat.get(34).unwrap()).unwrap();
        let json = emit_report(&r, Format::Json);
        let back: ClassificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
