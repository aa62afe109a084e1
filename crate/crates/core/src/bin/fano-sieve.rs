use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fano_sieve::catalog::{load_catalog, validate_record, Catalog};
use fano_sieve::classify::{classify_with, emit_report, ClassifyOptions, Format};
use fano_sieve::error::{CatalogError, ClassifyError};
use fano_sieve::exclusion::cs_candidates;
use fano_sieve::singularity::singular_locus;
use fano_sieve::surface::{hj_resolve, newton_interior_points};

const EXIT_VALIDATION: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;

#[derive(Parser)]
#[command(name = "fano-sieve", version, about = "Exact analysis of weighted Fano 3-fold hypersurfaces")]
struct Cli {
    /// Catalog TSV; the bundled table is used when unset.
    #[arg(long, global = true, env = "FANO_SIEVE_CATALOG")]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Catalog maintenance.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Singular locus of a family.
    Analyze { id: u32 },
    /// Exclusion verdicts and candidate CS sets.
    Exclude { id: u32 },
    /// Full classification report.
    Classify {
        id: u32,
        #[arg(long)]
        json: bool,
        /// Degree up to which ring generators are verified.
        #[arg(long)]
        degree_bound: Option<u32>,
    },
    /// Hirzebruch-Jung chain of 1/r(1,a).
    Resolve { r: u32, a: u32 },
    /// Interior points of the Newton polygon of a degree-d curve.
    Genus { d: u32, w0: u32, w1: u32, w2: u32 },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Parse and check every row of a catalog file.
    Validate { file: PathBuf },
}

#[derive(Debug)]
enum Failure {
    Catalog(CatalogError),
    Classify(ClassifyError),
    Other(String),
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        Failure::Catalog(e)
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        Failure::Classify(e)
    }
}

fn catalog(cli: &Cli) -> Result<Catalog, CatalogError> {
    match &cli.catalog {
        Some(path) => load_catalog(path),
        None => Ok(Catalog::bundled()),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Catalog { action: CatalogAction::Validate { file } } => {
            let cat = load_catalog(file)?;
            for r in cat.records.values() {
                for c in validate_record(r) {
                    println!("{}\t{}\t{}\t{}", r.id, if c.passed { "ok" } else { "FAIL" }, c.check, c.detail);
                }
            }
            println!("{} record(s), sha256 {}", cat.records.len(), cat.provenance.sha256);
        }
        Command::Analyze { id } => {
            let cat = catalog(cli)?;
            let f = cat.get(*id)?;
            let locus = singular_locus(f).map_err(ClassifyError::from)?;
            let names = f.weights.var_names();
            println!("family {}: {}", f.id, f.label());
            for s in &locus.points {
                println!(
                    "{:<10} {:<22} {:<10} x{}",
                    s.point_names().join(","),
                    s.local_type_string(&names),
                    s.location_string(&names),
                    s.count
                );
            }
            println!("{} point(s); stratum counts use the derived counting rule", locus.total_points());
        }
        Command::Exclude { id } => {
            let cat = catalog(cli)?;
            let f = cat.get(*id)?;
            let report = cs_candidates(f)?;
            for v in &report.verdicts {
                let class = v.t_class.map(|c| format!(" [{c}]")).unwrap_or_default();
                println!("{}: {}{}", v.subject, v.outcome.short(), class);
                for e in &v.evidence {
                    println!("    {e}");
                }
            }
            println!("candidate CS sets: {}", report.candidate_strings().join(" "));
        }
        Command::Classify { id, json, degree_bound } => {
            let cat = catalog(cli)?;
            let f = cat.get(*id)?;
            let report = classify_with(f, ClassifyOptions { degree_bound: *degree_bound })?;
            let format = if *json { Format::Json } else { Format::Text };
            print!("{}", emit_report(&report, format));
        }
        Command::Resolve { r, a } => {
            let chain = hj_resolve(*r, *a).map_err(|e| Failure::Other(e.to_string()))?;
            let disc = chain.discrepancies().map_err(|e| Failure::Other(e.to_string()))?;
            let disc: Vec<String> = disc.iter().map(|q| q.to_string()).collect();
            println!("1/{r}(1,{a}): {chain}");
            println!("discrepancies: {}", disc.join(" "));
        }
        Command::Genus { d, w0, w1, w2 } => {
            let (count, pts) =
                newton_interior_points(*d, [*w0, *w1, *w2]).map_err(|e| Failure::Other(e.to_string()))?;
            println!("interior points: {count}");
            for p in pts {
                println!("  ({},{},{})", p[0], p[1], p[2]);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = match &err {
                Failure::Catalog(CatalogError::UnknownFamily(_)) => 1,
                Failure::Catalog(_) => EXIT_VALIDATION,
                Failure::Classify(ClassifyError::IncompleteEvidence(_)) => EXIT_INCOMPLETE,
                Failure::Classify(_) | Failure::Other(_) => 1,
            };
            match err {
                Failure::Catalog(e) => eprintln!("error: {e}"),
                Failure::Classify(e) => eprintln!("error: {e}"),
                Failure::Other(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(code)
        }
    }
}
