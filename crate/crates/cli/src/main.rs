//! Command-line front end: builds face lattices and complexes, runs the
//! integrity checks, and evaluates topology reports and twist invariants.
//!
//! Exit codes: 0 on success, 2 for input errors (bad parameters, malformed
//! or inconsistent documents), 3 when a built object fails an integrity
//! check. All JSON output is UTF-8, newline-terminated, and byte-identical
//! across runs with the same inputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use morsec::cells::{
    check_branched_covering, check_delta_transitivity, check_regularity, skeleton_dot,
    CellsError, ComplexPoset,
};
use morsec::schema::{
    self, ComplexDto, InvariantsOutDto, ObstructionDto, SchemaError, SetupDto,
    WordLetterDto,
};
use morsec::topology::{self, TopologyError};
use morsec::winding::{self, CriticalSetup, TwistWord};
use morsec::{build_complex, enumerate_faces};

/// Cap on the number of refinement chains sampled per cell by the
/// transitivity check; below it the check is exhaustive.
const TRANSITIVITY_CAP: usize = 20_000;

#[derive(Parser)]
#[command(name = "morsec", version, about = "Complexes of Morse functions with fixed critical points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the face lattice of the permutohedron P^{q-1}
    Permutohedron {
        /// Number of saddle labels (ground set 1..=q)
        #[arg(long)]
        q: u32,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the complex K_{p,q,r} of framed molecules
    Complex {
        /// Number of minima
        #[arg(long)]
        p: u32,
        /// Number of saddles
        #[arg(long)]
        q: u32,
        /// Number of maxima
        #[arg(long)]
        r: u32,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Verify regularity, the branched covering, split transitivity
        /// and connectivity; failures exit with code 3
        #[arg(long)]
        check: bool,
        /// Seed for the sampled transitivity check
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write a DOT rendering of the 1-skeleton to this path
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Report topology of a previously built complex
    Topology {
        /// Complex JSON produced by `complex`
        #[arg(long = "in")]
        input: PathBuf,
        /// Which report to emit
        #[arg(long, value_enum)]
        kind: ReportKind,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate winding invariants of a Dehn-twist word
    Invariants {
        /// Setup JSON: {"p","q","r","curves":[...]}
        #[arg(long = "in")]
        input: PathBuf,
        /// Word JSON: [{"curve": name, "power": k}, ...]
        #[arg(long)]
        word: PathBuf,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportKind {
    Homology,
    Pi1,
    Rank,
}

enum CliError {
    /// Bad parameters or malformed input documents → exit 2.
    Input(String),
    /// A built object failed verification → exit 3.
    Integrity(String),
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Integrity(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Permutohedron { q, out } => cmd_permutohedron(q, out.as_deref()),
        Command::Complex { p, q, r, out, check, seed, dot } => {
            cmd_complex(p, q, r, out.as_deref(), check, seed, dot.as_deref())
        }
        Command::Topology { input, kind, out } => cmd_topology(&input, kind, out.as_deref()),
        Command::Invariants { input, word, out } => {
            cmd_invariants(&input, &word, out.as_deref())
        }
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Input(format!("serialization failed: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{} is not valid JSON: {e}", path.display())))
}

fn cmd_permutohedron(q: u32, out: Option<&Path>) -> Result<(), CliError> {
    let faces = enumerate_faces(q).map_err(|e| CliError::Input(e.to_string()))?;
    emit(&schema::faces_to_dto(&faces), out)
}

fn cmd_complex(
    p: u32,
    q: u32,
    r: u32,
    out: Option<&Path>,
    check: bool,
    seed: u64,
    dot: Option<&Path>,
) -> Result<(), CliError> {
    let cx = build_complex(p, q, r).map_err(|e| match e {
        CellsError::BadParameters { .. } => CliError::Input(e.to_string()),
        other => CliError::Integrity(other.to_string()),
    })?;
    emit(&schema::complex_to_dto(&cx)?, out)?;
    if let Some(path) = dot {
        fs::write(path, skeleton_dot(&cx))
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    if check {
        run_checks(&cx, seed)?;
    }
    Ok(())
}

fn run_checks(cx: &ComplexPoset, seed: u64) -> Result<(), CliError> {
    let regularity = check_regularity(cx);
    if !regularity.is_valid() {
        return Err(CliError::Integrity(format!(
            "regularity check failed with {} violations; first: {:?}",
            regularity.violations.len(),
            regularity.violations[0]
        )));
    }
    let covering = check_branched_covering(cx);
    if !covering.is_valid() {
        return Err(CliError::Integrity(format!(
            "branched-covering check failed with {} violations; first: {:?}",
            covering.violations.len(),
            covering.violations[0]
        )));
    }
    let transitivity = check_delta_transitivity(cx, seed, TRANSITIVITY_CAP);
    if !transitivity.violations.is_empty() {
        return Err(CliError::Integrity(format!(
            "split transitivity failed on {} of {} checked chains; first: {:?}",
            transitivity.violations.len(),
            transitivity.checked,
            transitivity.violations[0]
        )));
    }
    if !cx.is_connected() {
        return Err(CliError::Integrity("complex is disconnected".into()));
    }
    Ok(())
}

fn cmd_topology(input: &Path, kind: ReportKind, out: Option<&Path>) -> Result<(), CliError> {
    let dto: ComplexDto = read_json(input)?;
    let cx = schema::complex_from_dto(&dto)?;
    let irregular = |e: TopologyError| match e {
        TopologyError::Irregular(_) | TopologyError::Disconnected(_) => {
            CliError::Integrity(e.to_string())
        }
        TopologyError::BadComplex(_) => CliError::Input(e.to_string()),
    };
    match kind {
        ReportKind::Homology => {
            let sc = topology::order_complex(&cx).map_err(irregular)?;
            emit(&schema::homology_to_dto(&topology::homology(&sc))?, out)
        }
        ReportKind::Pi1 => {
            let sc = topology::order_complex(&cx).map_err(irregular)?;
            let basepoint = sc.simplices(0)[0][0];
            let group = topology::pi1(&sc, basepoint).map_err(irregular)?;
            emit(&schema::pi1_to_dto(&group), out)
        }
        ReportKind::Rank => {
            let report = topology::rank_report(&cx, cx.genus()).map_err(irregular)?;
            emit(&schema::rank_to_dto(&report), out)
        }
    }
}

fn cmd_invariants(input: &Path, word_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let setup_dto: SetupDto = read_json(input)?;
    let letters: Vec<WordLetterDto> = read_json(word_path)?;
    let (setup, curves) = schema::setup_from_dto(&setup_dto)?;
    let word = schema::word_from_dto(&letters, &curves)?;
    let b = winding::eval_b(&setup, &word).map_err(|e| CliError::Input(e.to_string()))?;
    let b_abs =
        winding::eval_b_abs(&setup, &word).map_err(|e| CliError::Input(e.to_string()))?;
    let obstructions = obstruction_verdicts(&setup, &word)?;
    emit(&InvariantsOutDto { b, b_abs, obstructions }, out)
}

/// One verdict per distinct genus-0 curve in the word, in order of first
/// use: what the twist about that disk boundary says about the stabilizer.
fn obstruction_verdicts(
    setup: &CriticalSetup,
    word: &TwistWord,
) -> Result<Vec<ObstructionDto>, CliError> {
    let mut seen = Vec::new();
    let mut verdicts = Vec::new();
    for letter in &word.letters {
        let curve = &letter.curve;
        if curve.genus_enclosed != 0 || seen.contains(&curve.name) {
            continue;
        }
        seen.push(curve.name.clone());
        let saddles = curve.enclosed.iter().filter(|&&i| i <= setup.q()).count() as u32;
        let extrema = curve.enclosed.len() as u32 - saddles;
        let verdict = winding::gamma_f_obstruction(setup, saddles, extrema)
            .map_err(|e| CliError::Input(e.to_string()))?;
        verdicts.push(ObstructionDto {
            curve: curve.name.clone(),
            value: verdict.value,
            in_gamma_f_possible: verdict.in_gamma_f_possible,
        });
    }
    Ok(verdicts)
}
