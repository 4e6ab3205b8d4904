//! Command-line front end: flag parsing, dispatch into the library, and
//! deterministic report emission.
//!
//! Every command writes one machine-readable report to standard out or the
//! `--out` path. Exit code 0 means success, 2 means the inputs were
//! processed but violated a separation constraint (the report still
//! describes the finding), and 1 covers usage and internal errors. The same
//! configuration always produces byte-identical output.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::burnside::{burnside_order, thm_bounds, BoundReport, BurnsideError};
use crate::certify::{
    certificate, dc_count_bound_for_epsilon, ln_biguint, CertifyError, CountBound,
};
use crate::diagrams::{mu_bar, samples, DiagramError, MuResult, PDCode};
use crate::geometry::{canonical_hopf, split_pair, GeometryError, PLLink};
use crate::grid::{tessellate_with_cap, GridError};
use crate::magnus::{filtration_min_degree, random_lcs_element, MagnusError};
use crate::packing::{
    fit_exponent, generation0, multigeneration, strictly_decreasing, verify_packing, Packing,
    PackingError,
};

/// Fixed default seed so repeated runs reproduce the seeded material.
pub const DEFAULT_SEED: u64 = 0x7365_6564;

/// Environment variable capping the tessellation cell count for `certify`.
pub const MAX_CELLS_VAR: &str = "LINKPACK_MAX_CELLS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FINDING: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    ReadInput {
        path: PathBuf,
        source: io::Error,
    },
    #[error("cannot write {path}: {source}")]
    WriteOutput {
        path: PathBuf,
        source: io::Error,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Magnus(#[from] MagnusError),
    #[error(transparent)]
    Burnside(#[from] BurnsideError),
    #[error(transparent)]
    Packing(#[from] PackingError),
}

impl CliError {
    /// Separation violations in otherwise well-formed inputs are findings
    /// (exit 2); everything else is a usage or internal error (exit 1).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Certify(CertifyError::ConstraintViolation { .. })
            | CliError::Certify(CertifyError::TooClose { .. })
            | CliError::Grid(GridError::ConstraintViolation { .. })
            | CliError::Packing(PackingError::PairTooClose { .. }) => EXIT_FINDING,
            _ => EXIT_ERROR,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// One parsed invocation. The same configuration always produces
/// byte-identical output.
#[derive(Parser, Debug)]
#[command(
    name = "linkpack",
    version,
    about = "Separation certificates, link invariants, and Hopf-pair packings"
)]
pub struct RunConfig {
    /// Seed for the seeded sample material in demo.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Report format; csv applies to density only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard out.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a verified multi-generation Hopf-pair packing.
    Pack {
        /// Required separation within each pair.
        #[arg(long)]
        epsilon: f64,
        /// Maximum number of generations to place.
        #[arg(long, default_value_t = 1)]
        generations: u32,
    },
    /// Re-check a packing file against a separation bound.
    Verify {
        /// Packing JSON produced by pack.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        epsilon: f64,
    },
    /// Build the coloring certificate of a two-component link file.
    Certify {
        /// Link JSON file.
        #[arg(long, default_value = "data/hopf.json")]
        link: PathBuf,
        /// Separation bound; defaults to the link's first declared
        /// constraint.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value = "r")]
        red: String,
        #[arg(long, default_value = "b")]
        blue: String,
    },
    /// Compute a Milnor invariant from a planar-diagram file.
    Mu {
        /// Diagram file: lines "X a,b,c,d +|-" and "C arc component".
        #[arg(long)]
        pd: PathBuf,
        /// Component sequence, digits ("123") or comma-separated ("1,2,3").
        #[arg(long)]
        indices: String,
        /// Also reduce the invariant modulo this prime.
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// Coloring-count and group-order growth bounds.
    Bounds {
        /// Bound family: 1, 2, or 4.
        #[arg(long)]
        theorem: u8,
        #[arg(long)]
        epsilon: f64,
        /// Scale constant in the generator-count formula.
        #[arg(long)]
        a: f64,
        /// Nilpotency class parameter (family 4).
        #[arg(long)]
        k: Option<u64>,
        /// Prime for the quotient (family 4).
        #[arg(long)]
        p: Option<u64>,
    },
    /// Order of the rank-m free exponent-3 group.
    Burnside {
        #[arg(long)]
        m: u64,
    },
    /// Pair-count growth fit across shrinking separations.
    Density {
        /// Comma-separated strictly decreasing separations,
        /// e.g. 0.05,0.025,0.0125.
        #[arg(long)]
        epsilons: String,
        /// Also write the per-sample table as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// One-page tour: certificate, invariants, bounds, and a small packing.
    Demo,
}

/// A finished command: the report body, and whether it documents a
/// constraint violation.
#[derive(Debug)]
pub enum Outcome {
    Report(String),
    Finding(String),
}

impl Outcome {
    pub fn body(&self) -> &str {
        match self {
            Outcome::Report(text) | Outcome::Finding(text) => text,
        }
    }
}

/// Parses real process arguments, runs the command, and emits the report.
pub fn run() -> i32 {
    let config = match RunConfig::try_parse() {
        Ok(config) => config,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = err.print();
            return code;
        }
    };
    match execute(&config) {
        Ok(outcome) => {
            if let Err(err) = emit(config.out.as_deref(), outcome.body()) {
                eprintln!("linkpack: {err}");
                return EXIT_ERROR;
            }
            match outcome {
                Outcome::Report(_) => EXIT_OK,
                Outcome::Finding(_) => EXIT_FINDING,
            }
        }
        Err(err) => {
            eprintln!("linkpack: {err}");
            err.exit_code()
        }
    }
}

fn emit(out: Option<&Path>, body: &str) -> io::Result<()> {
    let mut text = body.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::ReadInput {
        path: path.to_path_buf(),
        source,
    })
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}

/// Honors the cell-count cap passed through the environment before a
/// tessellating command commits to a grid.
fn check_cell_cap(epsilon: f64, cap_text: Option<&str>) -> Result<()> {
    match cap_text {
        Some(text) => {
            let cap: u64 = text.trim().parse().map_err(|_| {
                CliError::Usage(format!("{MAX_CELLS_VAR} must be an integer, got {text:?}"))
            })?;
            tessellate_with_cap(epsilon, cap)?;
            Ok(())
        }
        None => Ok(()),
    }
}

/// Accepts "123" (single digits) or "1,2,3" (arbitrary labels).
fn parse_indices(text: &str) -> Result<Vec<u32>> {
    let bad = || CliError::Usage(format!("cannot parse component sequence {text:?}"));
    if text.contains(',') {
        text.split(',')
            .map(|tok| tok.trim().parse::<u32>().map_err(|_| bad()))
            .collect()
    } else {
        text.chars()
            .map(|c| c.to_digit(10).filter(|&d| d > 0).ok_or_else(bad))
            .collect()
    }
}

fn parse_epsilons(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("cannot parse epsilon {tok:?}")))
        })
        .collect()
}

#[derive(Serialize)]
struct MuOutput {
    sequence: Vec<u32>,
    coefficient: String,
    modulus: Option<u64>,
    residue: Option<u64>,
    indeterminate: bool,
    lower_order: Vec<MuLowerOrder>,
}

#[derive(Serialize)]
struct MuLowerOrder {
    sequence: Vec<u32>,
    coefficient: String,
}

impl MuOutput {
    fn new(result: &MuResult) -> MuOutput {
        MuOutput {
            sequence: result.sequence.clone(),
            coefficient: result.coefficient.to_string(),
            modulus: result.modulus,
            residue: result.residue,
            indeterminate: result.indeterminate,
            lower_order: result
                .lower_order
                .iter()
                .map(|(sequence, coefficient)| MuLowerOrder {
                    sequence: sequence.clone(),
                    coefficient: coefficient.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct BurnsideOutput {
    m: u64,
    order: String,
    digits: usize,
    ln: f64,
}

#[derive(Serialize)]
struct DensityRow {
    epsilon: f64,
    generation: u32,
    count: usize,
    min_pair_distance: f64,
}

#[derive(Serialize)]
struct DensityOutput {
    exponent: f64,
    r2: f64,
    rows: Vec<DensityRow>,
}

fn density_csv(rows: &[DensityRow]) -> String {
    let mut text = String::from("epsilon,generation,count,min_pair_distance\n");
    for row in rows {
        writeln!(
            text,
            "{},{},{},{}",
            row.epsilon, row.generation, row.count, row.min_pair_distance
        )
        .expect("string writes cannot fail");
    }
    text
}

#[derive(Serialize)]
struct DemoCertificate {
    epsilon: f64,
    eq1: bool,
    dim_red: usize,
    dim_blue: usize,
    fingerprint: String,
}

#[derive(Serialize)]
struct DemoPacking {
    epsilon: f64,
    count: usize,
    min_pair_distance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct DemoWord {
    level: usize,
    p: u64,
    vars: usize,
    seed: u64,
    word: String,
    min_degree: Option<usize>,
}

#[derive(Serialize)]
struct DemoOutput {
    hopf_certificate: DemoCertificate,
    split_certificate_eq1: bool,
    borromean_mu: MuOutput,
    count_bound: CountBound,
    theorem1_bound: BoundReport,
    burnside_orders: Vec<String>,
    packing: DemoPacking,
    density_exponent: f64,
    seeded_word: DemoWord,
}

/// Runs one parsed command and renders its report.
pub fn execute(config: &RunConfig) -> Result<Outcome> {
    if config.format == Format::Csv && !matches!(config.command, Command::Density { .. }) {
        return Err(CliError::Usage(
            "csv format is only available for density".to_string(),
        ));
    }
    match &config.command {
        Command::Pack {
            epsilon,
            generations,
        } => {
            let packing = multigeneration(*epsilon, *generations)?;
            let report = verify_packing(&packing, *epsilon);
            if !report.pass {
                return Ok(Outcome::Finding(to_pretty(&report)));
            }
            Ok(Outcome::Report(packing.to_json_string()))
        }
        Command::Verify { input, epsilon } => {
            let packing = Packing::from_json_str(&read_input(input)?)?;
            let report = verify_packing(&packing, *epsilon);
            let body = to_pretty(&report);
            if report.pass {
                Ok(Outcome::Report(body))
            } else {
                Ok(Outcome::Finding(body))
            }
        }
        Command::Certify {
            link,
            epsilon,
            red,
            blue,
        } => {
            let link = PLLink::from_json_str(&read_input(link)?)?;
            let epsilon = match epsilon {
                Some(value) => *value,
                None => link
                    .constraints()
                    .first()
                    .map(|c| c.min_dist)
                    .ok_or_else(|| {
                        CliError::Usage(
                            "--epsilon required: the link declares no constraint".to_string(),
                        )
                    })?,
            };
            check_cell_cap(epsilon, std::env::var(MAX_CELLS_VAR).ok().as_deref())?;
            let cert = certificate(&link, red, blue, epsilon)?;
            Ok(Outcome::Report(cert.to_json_string()))
        }
        Command::Mu {
            pd,
            indices,
            modulus,
        } => {
            let code = PDCode::parse(&read_input(pd)?)?;
            let sequence = parse_indices(indices)?;
            let result = mu_bar(&code, &sequence, *modulus)?;
            Ok(Outcome::Report(to_pretty(&MuOutput::new(&result))))
        }
        Command::Bounds {
            theorem,
            epsilon,
            a,
            k,
            p,
        } => {
            let report = thm_bounds(*theorem, *epsilon, *a, *k, *p)?;
            Ok(Outcome::Report(to_pretty(&report)))
        }
        Command::Burnside { m } => {
            let order = burnside_order(*m)?;
            let text = order.to_string();
            Ok(Outcome::Report(to_pretty(&BurnsideOutput {
                m: *m,
                digits: text.len(),
                ln: ln_biguint(&order),
                order: text,
            })))
        }
        Command::Density { epsilons, csv } => {
            let epsilons = parse_epsilons(epsilons)?;
            if !strictly_decreasing(&epsilons) {
                return Err(PackingError::NotDecreasing.into());
            }
            let mut rows = Vec::with_capacity(epsilons.len());
            let mut samples = Vec::with_capacity(epsilons.len());
            for &epsilon in &epsilons {
                let generation = generation0(epsilon)?;
                let count = generation.count();
                let packing = Packing {
                    epsilon,
                    generations: vec![generation],
                };
                let report = verify_packing(&packing, epsilon);
                rows.push(DensityRow {
                    epsilon,
                    generation: 0,
                    count,
                    min_pair_distance: report.min_pair_distance,
                });
                samples.push((epsilon, count as f64));
            }
            let fit = fit_exponent(&samples)?;
            let table = density_csv(&rows);
            if let Some(path) = csv {
                emit(Some(path), &table).map_err(|source| CliError::WriteOutput {
                    path: path.clone(),
                    source,
                })?;
            }
            let body = match config.format {
                Format::Json => to_pretty(&DensityOutput {
                    exponent: fit.exponent,
                    r2: fit.r2,
                    rows,
                }),
                Format::Csv => table,
            };
            Ok(Outcome::Report(body))
        }
        Command::Demo => demo(config.seed),
    }
}

fn demo(seed: u64) -> Result<Outcome> {
    let epsilon = 0.2;
    let hopf = canonical_hopf(epsilon)?;
    let cert = certificate(&hopf, "r", "b", epsilon)?;
    let split = certificate(&split_pair(epsilon)?, "r", "b", epsilon)?;
    let borromean = mu_bar(&PDCode::parse(samples::BORROMEAN_PD)?, &[1, 2, 3], Some(3))?;
    let generation = generation0(0.05)?;
    let packing = Packing {
        epsilon: 0.05,
        generations: vec![generation],
    };
    let report = verify_packing(&packing, 0.05);
    let mut samples_fit = Vec::new();
    for epsilon in [0.05, 0.025, 0.0125] {
        samples_fit.push((epsilon, generation0(epsilon)?.count() as f64));
    }
    let fit = fit_exponent(&samples_fit)?;
    let word = random_lcs_element(2, 3, 3, seed)?;
    let output = DemoOutput {
        hopf_certificate: DemoCertificate {
            epsilon,
            eq1: cert.eq1(),
            dim_red: cert.dim_red(),
            dim_blue: cert.dim_blue(),
            fingerprint: cert.fingerprint().to_string(),
        },
        split_certificate_eq1: split.eq1(),
        borromean_mu: MuOutput::new(&borromean),
        count_bound: dc_count_bound_for_epsilon(epsilon)?,
        theorem1_bound: thm_bounds(1, 0.1, 1.0, None, None)?,
        burnside_orders: (1..=3)
            .map(|m| burnside_order(m).expect("small ranks are valid").to_string())
            .collect(),
        packing: DemoPacking {
            epsilon: 0.05,
            count: packing.total_count(),
            min_pair_distance: report.min_pair_distance,
            pass: report.pass,
        },
        density_exponent: fit.exponent,
        seeded_word: DemoWord {
            level: 2,
            p: 3,
            vars: 3,
            seed,
            word: word.to_text(),
            min_degree: filtration_min_degree(&word, 3, 3)?,
        },
    };
    Ok(Outcome::Report(to_pretty(&output)))
}
