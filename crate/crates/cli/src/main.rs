use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use nonlocal::classify::analyze;
use nonlocal::protocols::{
    bell_grouping_protocol, elimination_tournament, exact_success_probability, per_state_success,
    sample_success, z_parity_guess_protocol, ProtocolTree,
};
use nonlocal::scan::{run_scan, to_csv, AxisRange, ScanSpec};
use nonlocal::secretshare::{decode_full_collaboration, encode_2bit, strong_pair_shares};
use nonlocal::states::{a_basis, theta_basis, FamilyParams, OrthonormalBasis};
use nonlocal::Error;

#[derive(Parser)]
#[command(
    name = "nonlocal",
    version,
    about = "Multi-copy local discrimination of two-qubit bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one basis and print a report.v1 document.
    Analyze(BasisArgs),
    /// Evaluate a parameter grid and write CSV.
    Scan(ScanArgs),
    /// Run a protocol exactly and by seeded sampling.
    Simulate(SimulateArgs),
    /// Secret-sharing demonstrations.
    #[command(subcommand)]
    SecretShare(ShareCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "theta")]
    Theta,
}

#[derive(Args, Clone)]
struct BasisArgs {
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// basis.v1 JSON document.
    #[arg(long, conflicts_with = "family")]
    basis_file: Option<PathBuf>,
    /// Read angles in degrees.
    #[arg(long)]
    degrees: bool,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// `MIN:MAX:STEPS` or a single value.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Comma-separated subset of columns.
    #[arg(long)]
    columns: Option<String>,
    /// Write CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    degrees: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolChoice {
    Tournament,
    BellGrouping,
    ZParity,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    protocol: ProtocolChoice,
    #[command(flatten)]
    basis: BasisArgs,
    /// Angle of the bell-grouping protocol; defaults to the basis theta or pi/4.
    #[arg(long)]
    grouping_theta: Option<f64>,
    #[arg(long, default_value_t = 3)]
    copies: usize,
    #[arg(long, default_value_t = 10_000)]
    runs: u64,
    #[arg(long, env = "NONLOCAL_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum ShareCommand {
    /// Encode a 2-bit message into three copies.
    Encode {
        #[arg(long)]
        message: u8,
        #[command(flatten)]
        basis: BasisArgs,
    },
    /// Encode then decode with all six parties collaborating (every message unless one is given).
    Decode {
        #[arg(long)]
        message: Option<u8>,
        #[command(flatten)]
        basis: BasisArgs,
    },
    /// Build the mixed pair shares on pair (i, j) and certify security.
    StrongPair {
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 0.5)]
        mu: f64,
        #[command(flatten)]
        basis: BasisArgs,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

fn angle(v: f64, degrees: bool) -> f64 {
    if degrees {
        v.to_radians()
    } else {
        v
    }
}

impl BasisArgs {
    fn require(v: Option<f64>, name: &str, degrees: bool) -> CliResult<f64> {
        match v {
            Some(x) => Ok(angle(x, degrees)),
            None => usage(format!("--{name} is required for this family")),
        }
    }

    fn resolve(&self) -> CliResult<(OrthonormalBasis, Option<FamilyParams>, Option<f64>)> {
        if let Some(path) = &self.basis_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            return Ok((OrthonormalBasis::from_json(&text)?, None, None));
        }
        match self.family {
            Some(Family::A) => {
                let p = FamilyParams::new(
                    Self::require(self.alpha, "alpha", self.degrees)?,
                    Self::require(self.beta, "beta", self.degrees)?,
                    Self::require(self.gamma, "gamma", self.degrees)?,
                )?;
                Ok((a_basis(&p), Some(p), None))
            }
            Some(Family::Theta) => {
                let t = Self::require(self.theta, "theta", self.degrees)?;
                Ok((theta_basis(t)?, None, Some(t)))
            }
            None => usage("give --family A|theta with its angles, or --basis-file"),
        }
    }
}

fn parse_range(text: Option<&str>, name: &str, degrees: bool) -> CliResult<AxisRange> {
    let Some(text) = text else {
        return usage(format!("--{name} is required for this family"));
    };
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map(|v| angle(v, degrees))
            .map_err(|_| Failure::Usage(format!("--{name}: cannot parse {s:?}")))
    };
    match parts.as_slice() {
        [v] => Ok(AxisRange::fixed(num(v)?)),
        [lo, hi, steps] => {
            let steps = steps
                .trim()
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("--{name}: bad step count {steps:?}")))?;
            Ok(AxisRange::new(num(lo)?, num(hi)?, steps))
        }
        _ => usage(format!("--{name} expects MIN:MAX:STEPS or a single value")),
    }
}

fn print_json(v: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("json value serializes")
    );
}

fn cmd_analyze(args: &BasisArgs) -> CliResult<()> {
    let (b, params, _) = args.resolve()?;
    let report = analyze(&b, params.as_ref())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).map_err(Error::from)?
    );
    Ok(())
}

fn cmd_scan(args: &ScanArgs) -> CliResult<()> {
    let mut spec = match args.family {
        Family::A => ScanSpec::family_a(
            parse_range(args.alpha.as_deref(), "alpha", args.degrees)?,
            parse_range(args.beta.as_deref(), "beta", args.degrees)?,
            parse_range(args.gamma.as_deref(), "gamma", args.degrees)?,
        ),
        Family::Theta => {
            ScanSpec::family_theta(parse_range(args.theta.as_deref(), "theta", args.degrees)?)
        }
    };
    spec.outputs = args
        .columns
        .as_ref()
        .map(|c| c.split(',').map(|s| s.trim().to_string()).collect());
    let csv = to_csv(&spec, &run_scan(&spec)?);
    match &args.output {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let (b, _, basis_theta) = args.basis.resolve()?;
    let (name, tree): (&str, ProtocolTree) = match args.protocol {
        ProtocolChoice::Tournament => ("tournament", elimination_tournament(&b, args.copies)?),
        ProtocolChoice::BellGrouping => {
            let t = args
                .grouping_theta
                .map(|t| angle(t, args.basis.degrees))
                .or(basis_theta)
                .unwrap_or(FRAC_PI_4);
            ("bell-grouping", bell_grouping_protocol(t)?)
        }
        ProtocolChoice::ZParity => ("z-parity", z_parity_guess_protocol()),
    };
    let exact = exact_success_probability(&tree, &b)?;
    let per_state = per_state_success(&tree, &b)?;
    let s = sample_success(&tree, &b, args.runs, args.seed)?;
    print_json(&json!({
        "protocol": name,
        "basis": b.label(),
        "copies": tree.copies,
        "exact_success": exact,
        "per_state_success": per_state,
        "runs": s.runs,
        "successes": s.successes,
        "empirical_success": s.empirical_rate,
        "ci95": s.ci95,
        "seed": s.seed,
    }));
    Ok(())
}

fn cmd_secret_share(cmd: &ShareCommand) -> CliResult<()> {
    match cmd {
        ShareCommand::Encode { message, basis } => {
            let (b, _, _) = basis.resolve()?;
            println!("{}", encode_2bit(*message, &b)?.to_json());
        }
        ShareCommand::Decode { message, basis } => {
            let (b, _, _) = basis.resolve()?;
            let messages: Vec<u8> = match message {
                Some(m) => vec![*m],
                None => (0..4).collect(),
            };
            let mut rounds = Vec::new();
            let mut warnings = Vec::new();
            for &m in &messages {
                let shares = encode_2bit(m, &b)?;
                warnings = shares.warnings.clone();
                let d = decode_full_collaboration(&shares, &b)?;
                rounds.push(json!({
                    "message": m,
                    "decoded": d.message,
                    "probability": d.probability,
                    "recovered": d.message == m,
                }));
            }
            let all = rounds.iter().all(|r| r["recovered"] == true);
            print_json(&json!({
                "schema": nonlocal::secretshare::SHARES_SCHEMA,
                "kind": "round_trip",
                "basis": b.label(),
                "rounds": rounds,
                "all_recovered": all,
                "warnings": warnings,
            }));
        }
        ShareCommand::StrongPair {
            i,
            j,
            lambda,
            mu,
            basis,
        } => {
            let (b, _, _) = basis.resolve()?;
            println!(
                "{}",
                strong_pair_shares(&b, *i, *j, *lambda, *mu)?.to_json()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::SecretShare(c) => cmd_secret_share(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
