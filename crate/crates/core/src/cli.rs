//! Command-line front end: JSON run configs, seeded runs and JSON reports.
//!
//! Exit codes: 0 success, 1 simulation error, 2 config error, 3 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::interference::{scan_pattern, EmissionConfig, Grid, PatternSource, TwoAtomState};
use crate::mps::{prepare_mps, prepare_via_rus, preset_recipe, MpsRecipe, PresetKind};
use crate::mubgate::{attempts_until_success, expected_attempts, rus_cz, GateTranscript, LossModel};
use crate::photonics::{map_all_sources, EmissionReport};
use crate::qstate::{LocalUnitary, StateVector, SubsystemLayout, ZERO_PROB};
use crate::rng::{seeded, trial_rng};

/// Largest register whose amplitudes are written out in full.
pub const MAX_REPORTED_QUBITS: usize = 12;
/// Rounds after which a `stats` trial is counted as unfinished.
pub const STATS_ROUND_CAP: usize = 1 << 20;
/// Default directory for CSV output when `output` is not set.
pub const OUT_DIR_ENV: &str = "MULTIPHOTON_OUT_DIR";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Rus,
    #[default]
    Prepare,
    Map,
    Interfere,
    Stats,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GateMode {
    /// Every CZ runs through the repeat-until-success gate.
    #[default]
    Rus,
    Ideal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RusInput {
    /// `|+⟩|+⟩`, which the gate turns into a maximally entangled state.
    #[default]
    Plus,
    Random,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AtomState {
    Symmetric,
    Antisymmetric,
    Ground,
    /// Both atoms in the stationary state of the drive.
    #[default]
    Steady,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        let g = Grid::default();
        GridSpec { n_theta: g.n_theta, n_phi: g.n_phi }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub trials: usize,
    /// Number of sources for `prepare` and `map`.
    pub n: usize,
    pub preset: PresetKind,
    /// Recipe file; replaces `preset` when set.
    pub recipe: Option<PathBuf>,
    pub gates: GateMode,
    pub max_rounds: usize,
    pub eta: f64,
    pub input: RusInput,
    pub grid: GridSpec,
    pub state: AtomState,
    /// `k0 · |r1 − r2|`.
    pub k0r: f64,
    pub gamma: f64,
    pub omega: f64,
    pub delta: f64,
    /// CSV path for `interfere`.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::default(),
            seed: 0,
            trials: 1,
            n: 3,
            preset: PresetKind::Ghz,
            recipe: None,
            gates: GateMode::default(),
            max_rounds: crate::mubgate::DEFAULT_MAX_ROUNDS,
            eta: 1.0,
            input: RusInput::default(),
            grid: GridSpec::default(),
            state: AtomState::default(),
            k0r: 6.0 * std::f64::consts::PI,
            gamma: 1.0,
            omega: 1.0,
            delta: 0.0,
            output: None,
        }
    }
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials < 1 {
            return Err(field_error("trials", "must be at least 1"));
        }
        if self.n < 2 {
            return Err(field_error("n", format!("must be at least 2, got {}", self.n)));
        }
        if self.n > 24 {
            return Err(field_error("n", format!("at most 24 sources are supported, got {}", self.n)));
        }
        if self.max_rounds < 1 {
            return Err(field_error("max_rounds", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(field_error("eta", format!("must lie in [0, 1], got {}", self.eta)));
        }
        if self.grid.n_theta < 2 || self.grid.n_phi < 2 {
            return Err(field_error("grid", "n_theta and n_phi must be at least 2"));
        }
        if !(self.k0r.is_finite() && self.k0r > 0.0) {
            return Err(field_error("k0r", format!("must be finite and positive, got {}", self.k0r)));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(field_error("gamma", format!("must be positive, got {}", self.gamma)));
        }
        if !self.omega.is_finite() {
            return Err(field_error("omega", "must be finite"));
        }
        if !self.delta.is_finite() {
            return Err(field_error("delta", "must be finite"));
        }
        Ok(())
    }

    /// Parse and validate a JSON config.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("simulation error: {0}")]
    Simulation(#[from] Error),
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Simulation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

// ---- flags -----------------------------------------------------------------

/// Simulate on-demand multi-photon entanglement from single-photon sources.
#[derive(Debug, Parser)]
#[command(name = "multiphoton", version)]
pub struct Cli {
    pub command: Command,
    /// JSON run config; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Default, clap::Args)]
pub struct Flags {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub preset: Option<PresetKind>,
    #[arg(long)]
    pub recipe: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub gates: Option<GateMode>,
    #[arg(long)]
    pub max_rounds: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, value_enum)]
    pub input: Option<RusInput>,
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub n_phi: Option<usize>,
    #[arg(long, value_enum)]
    pub state: Option<AtomState>,
    #[arg(long)]
    pub k0r: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Flags {
    fn apply(self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        set!(seed, trials, n, preset, gates, max_rounds, eta, input, state, k0r, gamma, omega, delta);
        if let Some(v) = self.n_theta {
            cfg.grid.n_theta = v;
        }
        if let Some(v) = self.n_phi {
            cfg.grid.n_phi = v;
        }
        if self.recipe.is_some() {
            cfg.recipe = self.recipe;
        }
        if self.output.is_some() {
            cfg.output = self.output;
        }
    }
}

/// Read an optional config file, then apply flags on top of it.
pub fn load_config(command: Command, path: Option<&Path>, flags: Flags) -> Result<RunConfig, CliError> {
    let mut cfg = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_error(p, e))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    cfg.command = command;
    flags.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

// ---- reports ---------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateDump {
    pub qubits: usize,
    pub norm: f64,
    /// Basis states with non-negligible weight.
    pub support: usize,
    pub max_probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

impl StateDump {
    pub fn of(state: &StateVector) -> Self {
        let layout = state.layout();
        let qubits = layout.active_count();
        let probs: Vec<f64> = state.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        let full = qubits <= MAX_REPORTED_QUBITS;
        StateDump {
            qubits,
            norm: state.norm(),
            support: probs.iter().filter(|&&p| p > ZERO_PROB).count(),
            max_probability: probs.iter().cloned().fold(0.0, f64::max),
            labels: full.then(|| (0..state.dim()).map(|i| layout.basis_label(i)).collect()),
            amplitudes: full.then(|| state.amplitudes().iter().map(|a| [a.re, a.im]).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RusOutput {
    pub input_state: StateDump,
    pub output_state: StateDump,
    /// Overlap with `U_CZ` applied ideally to the input.
    pub fidelity_to_ideal: f64,
    pub transcript: GateTranscript,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrepareOutput {
    pub source_state: StateDump,
    pub transcripts: Vec<GateTranscript>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapOutput {
    pub source_state: StateDump,
    pub photon_state: StateDump,
    pub reports: Vec<EmissionReport>,
    pub transcripts: Vec<GateTranscript>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterfereOutput {
    pub csv: PathBuf,
    pub grid: GridSpec,
    pub max_intensity: f64,
    /// `[theta, phi]` of the global maximum.
    pub argmax: [f64; 2],
    /// `[theta, phi]` of local maxima above half the global maximum.
    pub maxima: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsOutput {
    pub trials: usize,
    pub eta: f64,
    pub round_success_probability: f64,
    pub expected_attempts: f64,
    pub mean_rounds: f64,
    pub stderr_rounds: Option<f64>,
    pub completion_frequency: f64,
    pub completion_stderr: f64,
    pub total_rounds: usize,
    /// Trials still running after the round cap.
    pub unfinished: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Outputs {
    Rus(RusOutput),
    Prepare(PrepareOutput),
    Map(MapOutput),
    Interfere(InterfereOutput),
    Stats(StatsOutput),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    #[serde(flatten)]
    pub outputs: Outputs,
    /// Kept out of the file so reports stay reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Writes every float in scientific notation with 17 significant digits.
struct PreciseFloats;

impl serde_json::ser::Formatter for PreciseFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, PreciseFloats);
        self.serialize(&mut ser).expect("report serialization cannot fail");
        buf.push(b'\n');
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

/// Write the report as JSON to `path`, or to stdout when `path` is `None`.
pub fn write_report(report: &RunReport, path: Option<&Path>) -> Result<(), CliError> {
    let text = report.to_json();
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_error(p, e)),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

// ---- running ---------------------------------------------------------------

fn load_recipe(cfg: &RunConfig) -> Result<MpsRecipe, CliError> {
    match &cfg.recipe {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_error(p, e))?;
            MpsRecipe::from_json(&text).map_err(|e| CliError::Config(format!("recipe {}: {e}", p.display())))
        }
        None => Ok(preset_recipe(cfg.preset, cfg.n)?),
    }
}

fn prepare_sources(cfg: &RunConfig) -> Result<(StateVector, Vec<GateTranscript>), CliError> {
    let recipe = load_recipe(cfg)?;
    Ok(match cfg.gates {
        GateMode::Ideal => (prepare_mps(&recipe)?, Vec::new()),
        GateMode::Rus => prepare_via_rus(&recipe, &mut seeded(cfg.seed))?,
    })
}

fn run_rus(cfg: &RunConfig) -> Result<RusOutput, CliError> {
    let mut rng = seeded(cfg.seed);
    let (layout, ids) = SubsystemLayout::with_sources(2);
    let input = match cfg.input {
        RusInput::Plus => {
            let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            StateVector::product_state(layout, &[[h, h], [h, h]])?
        }
        RusInput::Random => StateVector::random(layout, &mut rng),
    };
    let (output, transcript) = rus_cz(&input, ids[0], ids[1], &mut rng, cfg.max_rounds)?;
    let ideal = input.apply_unitary(&LocalUnitary::cz(ids[0], ids[1])?)?;
    Ok(RusOutput {
        input_state: StateDump::of(&input),
        output_state: StateDump::of(&output),
        fidelity_to_ideal: output.fidelity_up_to_phase(&ideal)?,
        transcript,
    })
}

fn run_map(cfg: &RunConfig) -> Result<MapOutput, CliError> {
    let (sources, transcripts) = prepare_sources(cfg)?;
    let (photons, reports) = map_all_sources(&sources)?;
    Ok(MapOutput {
        source_state: StateDump::of(&sources),
        photon_state: StateDump::of(&photons),
        reports,
        transcripts,
    })
}

fn default_csv_path() -> PathBuf {
    let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_default();
    dir.join("intensity.csv")
}

fn run_interfere(cfg: &RunConfig) -> Result<InterfereOutput, CliError> {
    let emission = EmissionConfig::standard(cfg.k0r)?.with_drive(cfg.gamma, cfg.omega, cfg.delta)?;
    let source = match cfg.state {
        AtomState::Symmetric => PatternSource::Explicit(TwoAtomState::symmetric()),
        AtomState::Antisymmetric => PatternSource::Explicit(TwoAtomState::antisymmetric()),
        AtomState::Ground => PatternSource::Explicit(TwoAtomState::ground()),
        AtomState::Steady => PatternSource::Steady,
    };
    let grid = Grid::new(cfg.grid.n_theta, cfg.grid.n_phi)?;
    let map = scan_pattern(&emission, &source, grid)?;
    let csv = cfg.output.clone().unwrap_or_else(default_csv_path);
    let file = fs::File::create(&csv).map_err(|e| io_error(&csv, e))?;
    map.write_csv(io::BufWriter::new(file)).map_err(|e| io_error(&csv, e))?;
    let angles = |(i, j): (usize, usize)| [grid.theta(i), grid.phi(j)];
    Ok(InterfereOutput {
        csv,
        grid: cfg.grid,
        max_intensity: map.max(),
        argmax: angles(map.argmax()),
        maxima: map.local_maxima(0.5).into_iter().map(angles).collect(),
    })
}

fn mean_and_stderr(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

fn run_stats(cfg: &RunConfig) -> Result<StatsOutput, CliError> {
    let loss = LossModel::new(cfg.eta)?;
    let expected = expected_attempts(&loss)?;
    let per_trial: Vec<Option<usize>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t as u64);
            let (layout, ids) = SubsystemLayout::with_sources(2);
            let input = StateVector::random(layout, &mut rng);
            attempts_until_success(&input, ids[0], ids[1], &loss, &mut rng, STATS_ROUND_CAP)
        })
        .collect::<Result<_, Error>>()?;
    let finished: Vec<f64> = per_trial.iter().flatten().map(|&r| r as f64).collect();
    let unfinished = per_trial.len() - finished.len();
    let total_rounds = finished.iter().sum::<f64>() as usize + unfinished * STATS_ROUND_CAP;
    let (mean_rounds, stderr_rounds) = if finished.is_empty() {
        (f64::NAN, None)
    } else {
        mean_and_stderr(&finished)
    };
    let p = finished.len() as f64 / total_rounds as f64;
    Ok(StatsOutput {
        trials: cfg.trials,
        eta: cfg.eta,
        round_success_probability: loss.round_success_probability(),
        expected_attempts: expected,
        mean_rounds,
        stderr_rounds,
        completion_frequency: p,
        completion_stderr: (p * (1.0 - p) / total_rounds as f64).sqrt(),
        total_rounds,
        unfinished,
    })
}

/// Run a validated config.
pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let outputs = match cfg.command {
        Command::Rus => Outputs::Rus(run_rus(cfg)?),
        Command::Prepare => {
            let (state, transcripts) = prepare_sources(cfg)?;
            Outputs::Prepare(PrepareOutput { source_state: StateDump::of(&state), transcripts })
        }
        Command::Map => Outputs::Map(run_map(cfg)?),
        Command::Interfere => Outputs::Interfere(run_interfere(cfg)?),
        Command::Stats => Outputs::Stats(run_stats(cfg)?),
    };
    Ok(RunReport { config: cfg.clone(), outputs, wall_time: start.elapsed() })
}

/// Parse arguments, run, write the report; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = load_config(cli.command, cli.config.as_deref(), cli.flags)
        .and_then(|cfg| run(&cfg))
        .and_then(|report| {
            write_report(&report, cli.report.as_deref())?;
            Ok(report.wall_time)
        });
    match result {
        Ok(wall) => {
            eprintln!("done in {:.3} s", wall.as_secs_f64());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
