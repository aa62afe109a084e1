//! The table of weighted hypersurface families, read from a small TSV file.
//!
//! Format: one family per line, tab separated,
//! `id  d  w0 w1 w2 w3 w4  [superrigid 0/1]`; lines starting with `#` are
//! comments. A ninth column `general 0/1` may switch off the generality
//! premise for a row.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CatalogError;
use crate::singularity::singular_locus;
use crate::wps::Weights;

/// The bundled table (families 5, 34, 75, 88, 90).
pub const BUNDLED_CATALOG: &str = include_str!("../data/families.tsv");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub id: u32,
    pub degree: u32,
    pub weights: Weights,
    /// Asserted from outside (not computed here).
    pub superrigid: bool,
    /// Generality premise: irreducibility of the curves and surfaces the
    /// exclusion rules rely on.
    pub general_member_assumed: bool,
}

impl FamilyRecord {
    pub fn new(id: u32, degree: u32, weights: [u32; 5]) -> Result<Self, CatalogError> {
        let weights = Weights::new(weights).map_err(|e| CatalogError::Validation {
            id,
            check: "well-formed weights".into(),
            detail: e.to_string(),
        })?;
        Ok(FamilyRecord { id, degree, weights, superrigid: false, general_member_assumed: true })
    }

    pub fn with_superrigid(mut self, flag: bool) -> Self {
        self.superrigid = flag;
        self
    }

    /// `X_d in P(1,a1,a2,a3,a4)`.
    pub fn label(&self) -> String {
        format!("X_{} in {}", self.degree, self.weights)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(check: &str, passed: bool, detail: String) -> Self {
        CheckResult { check: check.to_string(), passed, detail }
    }
}

/// Run every invariant on one record. Failures are returned as data.
pub fn validate_record(r: &FamilyRecord) -> Vec<CheckResult> {
    let w = r.weights.as_array();
    let mut out = vec![CheckResult::new("w0 = 1", w[0] == 1, format!("w0 = {}", w[0]))];
    let sum: u32 = w[1..].iter().sum();
    out.push(CheckResult::new(
        "adjunction d = w1+w2+w3+w4",
        sum == r.degree,
        format!("d = {}, w1+w2+w3+w4 = {}", r.degree, sum),
    ));
    match singular_locus(r) {
        Ok(locus) => out.push(CheckResult::new(
            "terminal quotient singularities",
            true,
            format!("{} singular location(s), all of type 1/r(1,a,r-a)", locus.points.len()),
        )),
        Err(e) => out.push(CheckResult::new("terminal quotient singularities", false, e.to_string())),
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub records: BTreeMap<u32, FamilyRecord>,
    pub provenance: Provenance,
}

impl Catalog {
    pub fn get(&self, id: u32) -> Result<&FamilyRecord, CatalogError> {
        self.records.get(&id).ok_or(CatalogError::UnknownFamily(id))
    }

    pub fn bundled() -> Self {
        parse_catalog(BUNDLED_CATALOG, "<bundled>").expect("bundled catalog is valid")
    }

    /// TSV text that [`parse_catalog`] reads back to the same records.
    pub fn serialize(&self) -> String {
        let mut out = String::from("# id\td\tw0\tw1\tw2\tw3\tw4\tsuperrigid\n");
        for r in self.records.values() {
            let w = r.weights.as_array();
            let _ = write!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.id,
                r.degree,
                w[0],
                w[1],
                w[2],
                w[3],
                w[4],
                u8::from(r.superrigid)
            );
            if !r.general_member_assumed {
                out.push_str("\t0");
            }
            out.push('\n');
        }
        out
    }
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| CatalogError::Io { path: path.display().to_string(), source })?;
    parse_catalog(&text, &path.display().to_string())
}

pub fn parse_catalog(text: &str, source: &str) -> Result<Catalog, CatalogError> {
    let mut records = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let record = parse_row(line, n + 1)?;
        if let Some(failed) = validate_record(&record).into_iter().find(|c| !c.passed) {
            return Err(CatalogError::Validation {
                id: record.id,
                check: failed.check,
                detail: failed.detail,
            });
        }
        if records.insert(record.id, record.clone()).is_some() {
            return Err(CatalogError::DuplicateId(record.id));
        }
    }
    let digest = Sha256::digest(text.as_bytes());
    let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(Catalog { records, provenance: Provenance { source: source.to_string(), sha256 } })
}

fn parse_row(line: &str, lineno: usize) -> Result<FamilyRecord, CatalogError> {
    let cols: Vec<&str> = line.split('\t').map(str::trim).filter(|c| !c.is_empty()).collect();
    if !(7..=9).contains(&cols.len()) {
        return Err(CatalogError::Parse {
            line: lineno,
            message: format!("expected 7 to 9 tab-separated columns, found {}", cols.len()),
        });
    }
    let mut nums = Vec::with_capacity(cols.len());
    for c in &cols {
        nums.push(
            c.parse::<u32>()
                .map_err(|e| CatalogError::Parse { line: lineno, message: format!("`{c}`: {e}") })?,
        );
    }
    let flag = |k: usize, default: bool| -> Result<bool, CatalogError> {
        match nums.get(k) {
            None => Ok(default),
            Some(0) => Ok(false),
            Some(1) => Ok(true),
            Some(v) => Err(CatalogError::Parse {
                line: lineno,
                message: format!("flag column {} must be 0 or 1, found {v}", k + 1),
            }),
        }
    };
    let superrigid = flag(7, false)?;
    let general = flag(8, true)?;
    let mut rec = FamilyRecord::new(nums[0], nums[1], [nums[2], nums[3], nums[4], nums[5], nums[6]])?
        .with_superrigid(superrigid);
    rec.general_member_assumed = general;
    Ok(rec)
}
