//! `cotype`: command-line front end for the cotype library.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cotype::Error;

/// Exit codes are a stable contract for scripts.
pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_RESOURCE: u8 = 2;
pub const EXIT_VERIFY: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "cotype", version, about = "Sublattices of Z^d by cotype: counts, densities, identities, simulations")]
struct Cli {
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Write the run manifest here instead of standard error.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    /// Largest number of matrices an enumeration may visit.
    #[arg(long, global = true, env = "COTYPE_MATRIX_CAP", default_value_t = cotype::lattice::DEFAULT_MATRIX_CAP)]
    cap: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exact cotype counts over all sublattices of Z^d with index < X (strict).
    Tally(TallyArgs),
    /// Corank densities, residues and local Z_d(p,m) values.
    Density(DensityArgs),
    /// Run an identity suite; exits with code 3 and a counterexample on failure.
    Verify(VerifyArgs),
    /// Sample random cokernels and compare with predicted masses.
    Simulate(SimulateArgs),
    /// Local zeta factor and its coefficients.
    Zeta(ZetaArgs),
    /// Re-run a recorded manifest and check the output checksum.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TallyFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
pub struct TallyArgs {
    #[arg(short = 'd')]
    pub d: usize,
    /// Count sublattices of index strictly less than X.
    #[arg(short = 'X')]
    pub x: u64,
    #[arg(long, value_enum, default_value_t = TallyFormat::Json)]
    pub format: TallyFormat,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[arg(short = 'd')]
    pub d: usize,
    #[arg(short = 'm')]
    pub m: usize,
    /// Largest prime kept in the Euler products.
    #[arg(long, default_value_t = 1_000_000)]
    pub cutoff: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[command(subcommand)]
    pub suite: Suite,
    /// Perturb one side of the first identity checked, to exercise the
    /// failure path.
    #[arg(long, global = true)]
    pub inject_fault: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// The two q-identities behind the corank residues.
    Qident {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        e: usize,
        /// Largest d for the second identity.
        #[arg(long, default_value_t = 6)]
        d: usize,
    },
    /// Three-way agreement of the descent polynomials.
    Descent {
        #[arg(long, default_value_t = 7)]
        d: usize,
    },
    /// Local coefficient formula against exact enumeration.
    Oracle {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        emax: u32,
    },
    /// Automorphism group orders by three routes.
    Autorder {
        #[arg(long, default_value_t = 64)]
        max_order: u64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2u64, 3])]
        primes: Vec<u64>,
    },
    /// Stanley–Wang corank probabilities against the density p-factors.
    Zidentity {
        #[arg(long, default_value_t = 6)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2u64, 3, 5])]
        primes: Vec<u64>,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[command(subcommand)]
    pub model: SimModel,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimModel {
    /// d x d matrices with entries uniform on [-k, k].
    Matrix {
        #[arg(short = 'd')]
        d: usize,
        #[arg(short = 'k')]
        k: u64,
        #[arg(short = 'p', default_value_t = 2)]
        p: u64,
        #[arg(short = 'n', default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Walk every matrix once instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        /// Types with a part above this are pooled as "other".
        #[arg(long, default_value_t = 3)]
        max_part: u32,
        #[arg(long, default_value_t = cotype::sim::DEFAULT_SIGMA)]
        sigma: f64,
    },
    /// Uniform sublattices of index < X.
    Sublattice {
        #[arg(short = 'd')]
        d: usize,
        #[arg(short = 'X')]
        x: u64,
        #[arg(short = 'p', default_value_t = 2)]
        p: u64,
        #[arg(short = 'n', default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_part: u32,
        #[arg(long, default_value_t = cotype::sim::DEFAULT_SIGMA)]
        sigma: f64,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct ZetaArgs {
    #[arg(short = 'd')]
    pub d: usize,
    #[command(subcommand)]
    pub action: ZetaAction,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaAction {
    /// Print the local factor as a rational function in t_1, ..., t_d.
    PrintLocal {
        #[arg(long)]
        json: bool,
    },
    /// Number of sublattices with cotype (p^nu_1, ..., p^nu_d).
    Coeff {
        #[arg(short = 'p')]
        p: u64,
        #[arg(long, value_delimiter = ',')]
        nu: Vec<u32>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub file: PathBuf,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct RunManifest {
    pub subcommand: String,
    /// Arguments after the program name, sufficient to rerun.
    pub argv: Vec<String>,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub matrix_cap: u64,
    pub tool_version: String,
    pub wall_time_seconds: f64,
    pub output_sha256: String,
}

/// Result of one command: the primary output, a short summary printed when
/// the output goes to a file, and whether a verification failed.
pub struct Outcome {
    pub primary: String,
    pub summary: Option<String>,
    pub verify_failed: Option<String>,
}

pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::ResourceLimit(_) | Error::CapExceeded { .. } => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Simulate(SimulateArgs {
            model: SimModel::Matrix { seed, exhaustive: false, .. },
        }) => Some(*seed),
        Command::Simulate(SimulateArgs {
            model: SimModel::Sublattice { seed, .. },
        }) => Some(*seed),
        _ => None,
    }
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Tally(_) => "tally",
        Command::Density(_) => "density",
        Command::Verify(_) => "verify",
        Command::Simulate(_) => "simulate",
        Command::Zeta(_) => "zeta",
        Command::Replay(_) => "replay",
    }
}

fn write_primary(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Argument list with the output and manifest destinations removed, so a
/// replay writes to standard output.
fn replayable_argv(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--manifest" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") || a.starts_with("--manifest=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

fn replay(file: &PathBuf) -> Result<Outcome, (u8, String)> {
    let text = std::fs::read_to_string(file).map_err(|e| (EXIT_USAGE, format!("cannot read {}: {e}", file.display())))?;
    let m: RunManifest = serde_json::from_str(&text).map_err(|e| (EXIT_USAGE, format!("bad manifest: {e}")))?;
    let argv = std::iter::once("cotype".to_string()).chain(m.argv.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err((EXIT_USAGE, "a manifest cannot replay another replay".into()));
    }
    let out = commands::run(&cli.command, m.matrix_cap).map_err(|e| (exit_code_for(&e), e.to_string()))?;
    let sum = sha256_hex(out.primary.as_bytes());
    if sum != m.output_sha256 {
        return Err((
            EXIT_VERIFY,
            format!("replay output checksum {sum} differs from recorded {}", m.output_sha256),
        ));
    }
    Ok(out)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let started = Instant::now();
    let result = match &cli.command {
        Command::Replay(r) => replay(&r.file),
        cmd => commands::run(cmd, cli.cap).map_err(|e| (exit_code_for(&e), e.to_string())),
    };
    let outcome = match result {
        Ok(o) => o,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(code);
        }
    };
    if let Err(e) = write_primary(cli.out.as_ref(), &outcome.primary) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    if cli.out.is_some() {
        if let Some(s) = &outcome.summary {
            print!("{s}");
        }
    }
    if !matches!(cli.command, Command::Replay(_)) {
        let manifest = RunManifest {
            subcommand: subcommand_name(&cli.command).to_string(),
            argv: replayable_argv(&args[1..]),
            parameters: serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null),
            seed: seed_of(&cli.command),
            matrix_cap: cli.cap,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds: started.elapsed().as_secs_f64(),
            output_sha256: sha256_hex(outcome.primary.as_bytes()),
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        match &cli.manifest {
            Some(p) => {
                if let Err(e) = std::fs::write(p, json + "\n") {
                    eprintln!("error: cannot write manifest: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            None => eprintln!("{json}"),
        }
    }
    if let Some(c) = outcome.verify_failed {
        eprintln!("verification failed; counterexample: {c}");
        return ExitCode::from(EXIT_VERIFY);
    }
    ExitCode::from(EXIT_OK)
}
