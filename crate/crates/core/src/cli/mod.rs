//! Command-line front end.
//!
//! Data goes to stdout (or `--out`), diagnostics to stderr. Exit codes:
//! 0 ok, 1 check failure, 2 usage or configuration error.

pub mod config;
pub mod validate;

use std::f64::consts::FRAC_PI_4;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::couplings::{derive_couplings, validate_regime};
use crate::error::Error;
use crate::exec::Execution;
use crate::hamiltonians::SecularForm;
use crate::protocol::{
    derived_correction, half_pi_rotation, run_transfer, sample_successes_with, PartyRoles, ProtocolSchedule,
};
use crate::qcore::{DenseOperator, QubitState, StateVector};
use crate::sweep::{curve_csv, fidelity_curve, linspace, secular_csv, secular_sweep, CurveSpec};

pub use config::{ConfigError, CorrectionKind, CouplingSource, Format, RunConfig, Setting};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Fidelity required of a τ = π/4 transfer for `transfer` to exit 0.
pub const TRANSFER_FIDELITY_GATE: f64 = 1.0 - 1e-8;

#[derive(Debug, Parser)]
#[command(name = "aqst", version, about = "Three-party quantum state transfer simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file (`key = value` lines with `[section]` headers).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `[protocol] seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write data here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one transfer and report both measurement branches as JSON.
    Transfer,
    /// Closed-form and simulated success probability and fidelity over a τ (and θ) grid.
    FidelityCurve,
    /// Effective couplings and regime report for a `[physical]` block.
    Couplings,
    /// Secular-approximation error for each Γ/J₀ ratio.
    SecularSweep,
    /// Run the built-in consistency checks.
    Validate {
        /// Run a single named check.
        #[arg(long)]
        only: Option<String>,
        /// Use the unprojected secular coefficient (expected to fail).
        #[arg(long)]
        literal_secular: bool,
    },
    /// Monte Carlo estimate of the success rate.
    Sample,
}

enum Failure {
    Usage(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Emitted {
    data: String,
    exit: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    match execute(&cli, stderr) {
        Ok(out) => {
            let path = cli.out.clone();
            let written = match path {
                Some(p) => std::fs::write(&p, &out.data).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => stdout.write_all(out.data.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => out.exit,
                Err(msg) => {
                    let _ = writeln!(stderr, "error: {msg}");
                    EXIT_USAGE
                }
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.protocol.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.path = Some(out.clone());
    }
    if let Some(format) = cli.format {
        cfg.output.format = Some(format);
    }
    Ok(cfg)
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> Result<Emitted, Failure> {
    let mut cfg = load_config(cli)?;
    if cli.dump_config {
        return Ok(Emitted {
            data: cfg.to_string(),
            exit: EXIT_OK,
        });
    }
    // `--out` is handled by the caller; a config-file path applies otherwise.
    let redirect = cli.out.is_none().then(|| cfg.output.path.take()).flatten();
    let emitted = match &cli.command {
        Command::Transfer => cmd_transfer(&cfg)?,
        Command::FidelityCurve => cmd_fidelity_curve(&cfg, stderr)?,
        Command::Couplings => cmd_couplings(&cfg, stderr)?,
        Command::SecularSweep => cmd_secular_sweep(&cfg, stderr)?,
        Command::Validate { only, literal_secular } => cmd_validate(only.as_deref(), *literal_secular)?,
        Command::Sample => cmd_sample(&cfg)?,
    };
    match redirect {
        Some(path) => {
            std::fs::write(&path, &emitted.data)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(Emitted {
                data: String::new(),
                exit: emitted.exit,
            })
        }
        None => Ok(emitted),
    }
}

fn format_or(cfg: &RunConfig, default: Format) -> Format {
    cfg.output.format.unwrap_or(default)
}

fn json_only(cfg: &RunConfig, command: &str) -> Result<(), Failure> {
    match cfg.output.format {
        Some(Format::Csv) => Err(Failure::Usage(format!("`{command}` only emits json"))),
        _ => Ok(()),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn correction_operator(kind: CorrectionKind, k1: u32) -> DenseOperator {
    match kind {
        CorrectionKind::Derived => derived_correction(k1),
        CorrectionKind::HalfPi => half_pi_rotation(),
        CorrectionKind::Identity => DenseOperator::identity(2),
    }
}

fn roles(cfg: &RunConfig) -> Result<PartyRoles, Failure> {
    Ok(PartyRoles::new(cfg.protocol.sender, cfg.protocol.receiver)?)
}

fn fixed(setting: Setting, field: &str, command: &str) -> Result<f64, Failure> {
    match setting {
        Setting::Value(v) => Ok(v),
        Setting::Sweep => {
            Err(ConfigError::field(field, format!("`{command}` needs a fixed value, not `sweep`")).into())
        }
    }
}

fn schedule(cfg: &RunConfig, tau: f64) -> Result<ProtocolSchedule, Failure> {
    let roles = roles(cfg)?;
    let gammas = cfg.source.gamma();
    if gammas[roles.sender - 1] <= 0.0 {
        return Err(Error::ZeroSenderGamma(gammas[roles.sender - 1]).into());
    }
    Ok(ProtocolSchedule::new(
        roles,
        cfg.protocol.k1,
        tau,
        gammas[roles.receiver - 1],
        correction_operator(cfg.protocol.correction, cfg.protocol.k1),
    )?)
}

fn matrix_json(m: &DenseOperator) -> serde_json::Value {
    let e = m.entries();
    json!((0..e.nrows())
        .map(|i| (0..e.ncols()).map(|j| [e[(i, j)].re, e[(i, j)].im]).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn cmd_transfer(cfg: &RunConfig) -> Result<Emitted, Failure> {
    json_only(cfg, "transfer")?;
    let theta = fixed(cfg.protocol.theta, "theta", "transfer")?;
    let tau = fixed(cfg.protocol.tau, "tau", "transfer")?;
    let schedule = schedule(cfg, tau)?;
    let gammas = cfg.source.gamma();
    let target = QubitState::from_theta(theta);
    let report = run_transfer(&schedule, &target, gammas)?;

    let mut notes = Vec::new();
    if report.success.receiver_state.is_none() {
        notes.push("success branch has zero probability; transfer fails deterministically");
    }
    let gated = (tau - FRAC_PI_4).abs() < 1e-12;
    let fidelity = report.success.fidelity;
    let exit = if gated && fidelity.is_none_or(|f| f < TRANSFER_FIDELITY_GATE) {
        notes.push("fidelity below 1 - 1e-8 at tau = pi/4");
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    };
    let doc = json!({
        "command": "transfer",
        "inputs": {
            "theta": theta,
            "tau": tau,
            "target": target,
            "gammas": gammas,
            "roles": schedule.roles,
        },
        "schedule": {
            "k1": schedule.k1,
            "t1": schedule.t1,
            "tau": schedule.tau,
        },
        "correction": {
            "kind": cfg.protocol.correction.name(),
            "matrix": matrix_json(&schedule.correction),
        },
        "success": report.success,
        "failure": report.failure,
        "success_probability": report.success.branch_probability,
        "fidelity": fidelity,
        "notes": notes,
    });
    Ok(Emitted {
        data: to_json(&doc),
        exit,
    })
}

fn cmd_fidelity_curve(cfg: &RunConfig, stderr: &mut dyn Write) -> Result<Emitted, Failure> {
    if cfg.protocol.tau != Setting::Sweep {
        return Err(ConfigError::field("tau", "`fidelity-curve` needs `tau = sweep`").into());
    }
    let s = &cfg.sweep;
    let thetas = match cfg.protocol.theta {
        Setting::Value(v) => vec![v],
        Setting::Sweep => linspace(s.theta.start, s.theta.stop, s.theta.count),
    };
    let roles = roles(cfg)?;
    let gammas = cfg.source.gamma();
    if gammas[roles.sender - 1] <= 0.0 {
        return Err(Error::ZeroSenderGamma(gammas[roles.sender - 1]).into());
    }
    let spec = CurveSpec {
        roles,
        gammas,
        k1: cfg.protocol.k1,
        correction: correction_operator(cfg.protocol.correction, cfg.protocol.k1),
        thetas,
        taus: linspace(s.tau.start, s.tau.stop, s.tau.count),
    };
    let rows = fidelity_curve(Execution::default(), &spec)?;
    let undefined = rows.iter().filter(|r| r.f_theta.is_nan()).count();
    if undefined > 0 {
        let _ = writeln!(
            stderr,
            "warning: {undefined} grid point(s) have zero success probability; f_theta emitted as nan"
        );
    }
    let data = match format_or(cfg, Format::Csv) {
        Format::Csv => curve_csv(&rows),
        Format::Json => to_json(&rows),
    };
    Ok(Emitted { data, exit: EXIT_OK })
}

fn cmd_couplings(cfg: &RunConfig, stderr: &mut dyn Write) -> Result<Emitted, Failure> {
    json_only(cfg, "couplings")?;
    let CouplingSource::Physical(block) = &cfg.source else {
        return Err(Failure::Usage("`couplings` needs a [physical] section".into()));
    };
    let couplings = match derive_couplings(&block.params) {
        Ok(c) => c,
        Err(e) => {
            let kind = match e {
                Error::SingularDenominator { .. } => "singular_denominator",
                _ => "invalid_parameters",
            };
            let _ = write!(
                stderr,
                "{}",
                to_json(&json!({ "error": { "kind": kind, "message": e.to_string() } }))
            );
            return Err(Failure::Usage(e.to_string()));
        }
    };
    let regime = validate_regime(&block.params, &couplings);
    let doc = json!({
        "command": "couplings",
        "units": if block.units == config::Units::Kappa { "kappa" } else { "SI" },
        "params": block.params,
        "couplings": couplings,
        "regime": regime,
    });
    Ok(Emitted {
        data: to_json(&doc),
        exit: EXIT_OK,
    })
}

fn cmd_secular_sweep(cfg: &RunConfig, stderr: &mut dyn Write) -> Result<Emitted, Failure> {
    let j0 = match &cfg.source {
        CouplingSource::Direct(d) => d.j0,
        CouplingSource::Physical(b) => {
            let c = derive_couplings(&b.params)?;
            if c.j_spread() > 1e-12 * c.j[0].abs() {
                let _ = writeln!(stderr, "warning: couplings are not symmetric; using |J12|");
            }
            c.j[0].abs()
        }
    };
    if j0.is_nan() || j0 <= 0.0 {
        return Err(Failure::Usage(format!("coupling J0 must be nonzero, got {j0}")));
    }
    let psi = StateVector::basis_state("egg")?;
    let rows = secular_sweep(Execution::default(), j0, &cfg.sweep.ratios, cfg.sweep.time_points, &psi)?;
    let data = match format_or(cfg, Format::Csv) {
        Format::Csv => secular_csv(&rows),
        Format::Json => to_json(&rows),
    };
    Ok(Emitted { data, exit: EXIT_OK })
}

fn cmd_validate(only: Option<&str>, literal: bool) -> Result<Emitted, Failure> {
    let form = if literal {
        SecularForm::Literal
    } else {
        SecularForm::Projector
    };
    let results = validate::run_checks(only, form).map_err(Failure::Usage)?;
    let mut data = String::new();
    for r in &results {
        data.push_str(&format!(
            "{} {}: {}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        ));
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(Emitted { data, exit: EXIT_OK })
    } else {
        data.push_str(&format!("failed checks: {}\n", failed.join(", ")));
        Ok(Emitted {
            data,
            exit: EXIT_CHECK_FAILED,
        })
    }
}

fn cmd_sample(cfg: &RunConfig) -> Result<Emitted, Failure> {
    json_only(cfg, "sample")?;
    let theta = fixed(cfg.protocol.theta, "theta", "sample")?;
    let tau = fixed(cfg.protocol.tau, "tau", "sample")?;
    let schedule = schedule(cfg, tau)?;
    let report = run_transfer(&schedule, &QubitState::from_theta(theta), cfg.source.gamma())?;
    let p = report.success.branch_probability;
    let n = cfg.protocol.samples;
    let successes = sample_successes_with(Execution::default(), p, n, cfg.protocol.seed);
    let doc = json!({
        "command": "sample",
        "seed": cfg.protocol.seed,
        "samples": n,
        "theta": theta,
        "tau": tau,
        "branch_probability": p,
        "successes": successes,
        "empirical_rate": successes as f64 / n as f64,
        "binomial_sigma": (p * (1.0 - p) / n as f64).sqrt(),
    });
    Ok(Emitted {
        data: to_json(&doc),
        exit: EXIT_OK,
    })
}
