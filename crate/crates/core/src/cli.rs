//! Command-line front end.
//!
//! Every command reads an optional JSON [`RunConfig`], applies flag
//! overrides, validates, computes, and writes its files atomically into the
//! output directory. Exit codes: 0 success, 2 configuration error,
//! 3 numerical failure.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chsh::{self, OpPool};
use crate::error::Error;
use crate::potential;
use crate::protocol::{self, DeviceGraph};
use crate::spectral::{self, ChargeBasis, CircuitRun, SweepConfig};
use crate::CircuitParams;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "vortexgate", version, about = "Vortex phase gate simulation and protocol compiler")]
pub struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Base seed for every random stream
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parameter grids.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Potential slices and minima for a list of flux values.
    Potential,
    /// Gate phase against junction asymmetry, with instanton estimates.
    PhaseSweep,
    /// Dynamic-range tables over asymmetry and gate charge.
    DynamicRange,
    /// Exact and sampled CHSH values over a rotation-angle grid.
    Chsh(ChshFlags),
    /// Compiled measurement configurations and experiment scripts.
    Protocol(ProtocolFlags),
}

#[derive(Debug, Args)]
pub struct ChshFlags {
    /// Also evaluate CHSH at the angle produced by the simulated circuit.
    #[arg(long)]
    pub theta_from_circuit: bool,
    /// Random braid/measurement search for the Clifford ceiling.
    #[arg(long)]
    pub clifford_only: bool,
    /// Measurement shots per correlator
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ProtocolFlags {
    /// Named measurement of the two-qubit device, e.g. `upperX`.
    #[arg(long, conflicts_with_all = ["pauli", "theta"])]
    pub target: Option<String>,
    /// Pauli word over the three-qubit device, e.g. `XIZ`.
    #[arg(long, conflicts_with = "theta")]
    pub pauli: Option<String>,
    /// Rotation angle of the CHSH script; accepts forms like `pi/8`.
    #[arg(long)]
    pub theta: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialJob {
    pub fluxes: Vec<f64>,
    pub points: usize,
    pub grid: usize,
}

impl Default for PotentialJob {
    fn default() -> Self {
        Self {
            fluxes: vec![0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2],
            points: 512,
            grid: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseSweepJob {
    pub epsilons: Vec<f64>,
    /// `(Q+, Q-)` settings.
    pub gate_charges: Vec<[f64; 2]>,
}

impl Default for PhaseSweepJob {
    fn default() -> Self {
        Self {
            epsilons: (0..26).map(|k| 0.005 * k as f64).collect(),
            gate_charges: vec![[0.25, 0.0]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicRangeJob {
    pub epsilons: Vec<f64>,
    pub q_plus_grid: Vec<f64>,
    /// Asymmetry used for the gate-charge scan.
    pub scan_epsilon: f64,
}

impl Default for DynamicRangeJob {
    fn default() -> Self {
        Self {
            epsilons: (0..11).map(|k| 0.01 * k as f64).collect(),
            q_plus_grid: (0..17).map(|k| 0.05 + 0.025 * k as f64).collect(),
            scan_epsilon: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChshJob {
    pub thetas: Vec<f64>,
    pub shots: u64,
    pub trials: usize,
    pub theta_from_circuit: bool,
    pub clifford_only: bool,
}

impl Default for ChshJob {
    fn default() -> Self {
        Self {
            thetas: (0..=16).map(|k| PI / 64.0 * k as f64).collect(),
            shots: 10_000,
            trials: 1000,
            theta_from_circuit: false,
            clifford_only: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolJob {
    pub theta: Option<f64>,
    pub target: Option<String>,
    pub pauli: Option<String>,
}

/// Everything a command needs; loaded from JSON with defaults for missing
/// fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: CircuitParams,
    pub sweep: SweepConfig,
    pub basis: ChargeBasis,
    pub seed: u64,
    pub threads: usize,
    pub potential: PotentialJob,
    pub phase_sweep: PhaseSweepJob,
    pub dynamic_range: DynamicRangeJob,
    pub chsh: ChshJob,
    pub protocol: ProtocolJob,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: CircuitParams::default(),
            sweep: SweepConfig::default(),
            basis: ChargeBasis::default(),
            seed: 0,
            threads: 1,
            potential: PotentialJob::default(),
            phase_sweep: PhaseSweepJob::default(),
            dynamic_range: DynamicRangeJob::default(),
            chsh: ChshJob::default(),
            protocol: ProtocolJob::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> crate::Result<()> {
        self.params.validate()?;
        self.sweep.validate()?;
        if self.basis.n_cutoff < 2 {
            return Err(Error::InvalidParams("n_cutoff must be at least 2".into()));
        }
        if self.threads == 0 {
            return Err(Error::InvalidParams("threads must be positive".into()));
        }
        Ok(())
    }
}

/// Failure of a command, mapped onto an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Engine(e) => match e {
                Error::InvalidParams(_)
                | Error::ConditionViolated(_)
                | Error::ResolutionTooCoarse(_)
                | Error::Unattainable { .. }
                | Error::ShortCircuit(_)
                | Error::TareMissing
                | Error::OddSet(_)
                | Error::Unreachable(_)
                | Error::Device(_) => EXIT_CONFIG,
                Error::RefinementFailed { .. }
                | Error::Degenerate
                | Error::Eigensolver(_)
                | Error::OverlapCollapse { .. }
                | Error::ImpossibleOutcome { .. }
                | Error::NonTermination(_) => EXIT_NUMERICAL,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `pi/8`, `3pi/16`, `0.25pi`, `pi` or a plain number of radians.
pub fn parse_angle(text: &str) -> Option<f64> {
    let t = text.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(v) = t.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().ok()?),
        None => (t.clone(), 1.0),
    };
    let coeff = num.strip_suffix("pi")?.trim_end_matches('*');
    let c = match coeff {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    let v = c * PI / den;
    v.is_finite().then_some(v)
}

fn load_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    match &cli.command {
        Command::Chsh(f) => {
            cfg.chsh.theta_from_circuit |= f.theta_from_circuit;
            cfg.chsh.clifford_only |= f.clifford_only;
            if let Some(s) = f.shots {
                cfg.chsh.shots = s;
            }
        }
        Command::Protocol(f) => {
            if let Some(t) = &f.theta {
                let v = parse_angle(t).ok_or_else(|| CliError::Config(format!("cannot parse angle {t}")))?;
                cfg.protocol = ProtocolJob {
                    theta: Some(v),
                    ..ProtocolJob::default()
                };
            }
            if let Some(t) = &f.target {
                cfg.protocol = ProtocolJob {
                    target: Some(t.clone()),
                    ..ProtocolJob::default()
                };
            }
            if let Some(p) = &f.pauli {
                cfg.protocol = ProtocolJob {
                    pauli: Some(p.clone()),
                    ..ProtocolJob::default()
                };
            }
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Output sink that stamps provenance and renames into place.
struct Output<'a> {
    dir: PathBuf,
    command: &'a str,
    config: &'a RunConfig,
    written: Vec<PathBuf>,
}

impl<'a> Output<'a> {
    fn new(dir: PathBuf, command: &'a str, config: &'a RunConfig) -> CliResult<Self> {
        std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(Self {
            dir,
            command,
            config,
            written: Vec::new(),
        })
    }

    fn provenance(&self) -> Value {
        json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.config.seed,
            "config": self.config,
        })
    }

    fn csv(&mut self, name: &str, body: &str) -> CliResult<()> {
        let header = format!(
            "# {} {}\n# command: {}\n# seed: {}\n# config: {}\n",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.config.seed,
            serde_json::to_string(self.config).expect("plain data"),
        );
        self.write(name, &(header + body))
    }

    fn json(&mut self, name: &str, result: Value) -> CliResult<()> {
        let doc = json!({ "provenance": self.provenance(), "result": result });
        let mut text = serde_json::to_string_pretty(&doc).expect("plain data");
        text.push('\n');
        self.write(name, &text)
    }

    fn write(&mut self, name: &str, text: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        atomic_write(&path, text.as_bytes()).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }
}

/// Writes to a sibling temporary file, then renames over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data")
}

fn cmd_potential(cfg: &RunConfig, out: &mut Output) -> CliResult<()> {
    let job = &cfg.potential;
    if job.fluxes.is_empty() || job.points < 2 {
        return Err(CliError::Config("potential needs fluxes and at least 2 points".into()));
    }
    let grid = potential::delta_phi_grid(job.points);
    let mut minima = Vec::new();
    for (k, &flux) in job.fluxes.iter().enumerate() {
        let rows = potential::landscape_slice(&cfg.params, flux, &grid);
        let body = format!("# flux_rad: {flux:.16e}\n{}", potential::slice_csv(&cfg.params, &rows));
        out.csv(&format!("potential_{k}.csv"), &body)?;
        let found = potential::minimize_potential(&cfg.params, flux, job.grid)?;
        minima.push(json!({ "flux_rad": flux, "minima": to_value(&found) }));
    }
    out.json("potential_minima.json", Value::Array(minima))
}

fn cmd_phase_sweep(cfg: &RunConfig, out: &mut Output) -> CliResult<()> {
    let mut points = Vec::new();
    for &[qp, qm] in &cfg.phase_sweep.gate_charges {
        let template = cfg.params.with_gate_charges(qp, qm);
        points.extend(spectral::phase_vs_epsilon_sweep(
            &template,
            &cfg.phase_sweep.epsilons,
            &cfg.sweep,
            cfg.basis,
            cfg.threads,
        )?);
    }
    out.csv("phase_sweep.csv", &spectral::phase_csv(&points))?;
    out.json("phase_sweep.json", to_value(&points))
}

fn cmd_dynamic_range(cfg: &RunConfig, out: &mut Output) -> CliResult<()> {
    let job = &cfg.dynamic_range;
    let q_plus = cfg.params.q_plus();
    let eps_settings: Vec<(f64, f64)> = job.epsilons.iter().map(|&e| (e, q_plus)).collect();
    let by_eps = spectral::dynamic_range_table(&cfg.params, &eps_settings, &cfg.sweep, cfg.basis, cfg.threads)?;
    out.csv("dynamic_range_epsilon.csv", &spectral::zeta_csv(&by_eps))?;

    let scan_settings: Vec<(f64, f64)> = job.q_plus_grid.iter().map(|&q| (job.scan_epsilon, q)).collect();
    let by_q = spectral::dynamic_range_table(&cfg.params, &scan_settings, &cfg.sweep, cfg.basis, cfg.threads)?;
    let template = cfg.params.with_epsilon(job.scan_epsilon);
    let resonance = spectral::locate_resonance(&template, &job.q_plus_grid, &cfg.sweep, cfg.basis)?;
    let mut body = String::from("# epsilon,q_plus_2e,q_minus_2e,zeta,resonance_q_plus_2e\n");
    for p in &by_q {
        body.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            p.epsilon, p.q_plus, p.q_minus, p.range.zeta, resonance.q_plus
        ));
    }
    out.csv("dynamic_range_qplus.csv", &body)?;
    out.json(
        "dynamic_range.json",
        json!({
            "by_epsilon": to_value(&by_eps),
            "by_q_plus": to_value(&by_q),
            "resonance": to_value(&resonance),
        }),
    )
}

fn cmd_chsh(cfg: &RunConfig, out: &mut Output) -> CliResult<()> {
    let job = &cfg.chsh;
    let reports = job
        .thetas
        .iter()
        .map(|&t| chsh::chsh_report(t, job.shots, cfg.seed))
        .collect::<crate::Result<Vec<_>>>()?;
    let max_exact = reports.iter().map(|r| r.exact_value).fold(f64::NEG_INFINITY, f64::max);
    let mut result = json!({ "reports": to_value(&reports), "max_exact": max_exact });
    if job.clifford_only {
        let ceiling = chsh::clifford_ceiling_search(job.trials, cfg.seed, OpPool::Clifford)?;
        result["clifford_ceiling"] = json!({ "trials": job.trials, "max_chsh": ceiling });
    }
    if job.theta_from_circuit {
        let run = CircuitRun::new(&cfg.params, &cfg.sweep, cfg.basis)?;
        let phase = run.qubit_phase()?;
        let report = chsh::chsh_report(0.5 * phase, job.shots, cfg.seed)?;
        result["from_circuit"] = json!({
            "qubit_phase_rad": phase,
            "min_overlap": run.min_overlap()?,
            "report": to_value(&report),
        });
    }
    out.json("chsh.json", result)
}

fn cmd_protocol(cfg: &RunConfig, out: &mut Output) -> CliResult<()> {
    let job = &cfg.protocol;
    let result = if let Some(target) = &job.target {
        to_value(&protocol::compile_measurement(&DeviceGraph::chsh_device(), target)?)
    } else if let Some(word) = &job.pauli {
        to_value(&protocol::compile_pauli_product(&DeviceGraph::ramm_device(), word)?)
    } else {
        let theta = job.theta.unwrap_or(PI / 8.0);
        to_value(&protocol::chsh_script(&DeviceGraph::chsh_device(), theta, &cfg.params, cfg.seed)?)
    };
    out.json("protocol.json", result)
}

/// Runs a parsed command line, returning the files written.
pub fn run(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let cfg = load_config(cli)?;
    let name = match cli.command {
        Command::Potential => "potential",
        Command::PhaseSweep => "phase-sweep",
        Command::DynamicRange => "dynamic-range",
        Command::Chsh(_) => "chsh",
        Command::Protocol(_) => "protocol",
    };
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut out = Output::new(dir, name, &cfg)?;
    match cli.command {
        Command::Potential => cmd_potential(&cfg, &mut out)?,
        Command::PhaseSweep => cmd_phase_sweep(&cfg, &mut out)?,
        Command::DynamicRange => cmd_dynamic_range(&cfg, &mut out)?,
        Command::Chsh(_) => cmd_chsh(&cfg, &mut out)?,
        Command::Protocol(_) => cmd_protocol(&cfg, &mut out)?,
    }
    Ok(out.written)
}

/// Entry point shared by the binary and tests; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
