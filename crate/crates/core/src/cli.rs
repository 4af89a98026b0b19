//! Run configuration, subcommand dispatch and artifact emission.
//!
//! A run reads one TOML file with dotted sections (`params.gamma`, `grid.N`,
//! ...) and writes everything under `--out`. Every JSON report embeds the
//! resolved configuration and every CSV carries it as a `# config:` comment.
//! Exit codes: 0 success, 1 numerical failure, 2 usage or config error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::decay::kernels::{k1_symbol, k2_symbol, k3_symbol, k_symbol};
use crate::decay::{
    fit_algebraic_tail, fit_exponential_tail, kernel_fft_oracle, kernel_k, kernel_k1, kernel_k2, kernel_k3, DecayReport,
    FitOptions, Normalization, TailKind,
};
use crate::error::{Error, Result};
use crate::evolution::{relative_l2_error, EvolutionConfig, Evolver};
use crate::functionals::{constraint_f, energy_e, hamiltonian_h, quadratic_form_check, Mu2Mode};
use crate::params::{eta_roots, Depth, Family, ModelParams};
use crate::solvers::{
    assemble_bo_pair, constrained_minimize, continue_in_c, continue_in_mu2, petviashvili_ground_state, solve_bfd_reduced,
    system_residual, SolitaryBranch, SolverConfig,
};
use crate::spectral::{write_columns, Grid, Multiplier, RealField, WavePair};

const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Series tolerance and term cap for the `K3` closed form.
const K3_TOL: f64 = 1e-12;
const K3_MAX_TERMS: usize = 1 << 16;

#[derive(Parser, Debug)]
#[command(name = "interwave", version, about = "Solitary waves of two-layer internal-wave systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct IoArgs {
    /// TOML run configuration.
    #[arg(short, long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(short, long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Parameter validation and admissibility report.
    Validate(IoArgs),
    /// Compute one solitary wave.
    Solve(IoArgs),
    /// Continue a wave in its speed or in the depth parameter.
    Continue(IoArgs),
    /// Fit the tails of a computed or stored wave.
    Decay(IoArgs),
    /// Compare kernel closed forms with FFT symbol inversion.
    KernelCheck(IoArgs),
    /// Time evolution with Hamiltonian and a-priori monitors.
    Evolve(IoArgs),
    /// Seeded random positivity sweep over admissible parameters.
    Sweep(IoArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Solve(_) => "solve",
            Command::Continue(_) => "continue",
            Command::Decay(_) => "decay",
            Command::KernelCheck(_) => "kernel-check",
            Command::Evolve(_) => "evolve",
            Command::Sweep(_) => "sweep",
        }
    }

    pub fn io(&self) -> &IoArgs {
        match self {
            Command::Validate(a)
            | Command::Solve(a)
            | Command::Continue(a)
            | Command::Decay(a)
            | Command::KernelCheck(a)
            | Command::Evolve(a)
            | Command::Sweep(a) => a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub half_length: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            half_length: 40.0,
            n: 1024,
        }
    }
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.half_length, self.n)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// Petviashvili on the reduced scalar equation, polished by Newton.
    #[default]
    Reduced,
    /// Constrained minimisation of `E` on `{F = lambda}`.
    Variational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveConfig {
    pub family: Family,
    /// `omega` for B-FD, `c` for BO and ILW.
    pub speed: f64,
    pub method: SolveMethod,
    /// Constraint level of the variational method.
    pub lambda: f64,
}

impl Default for WaveConfig {
    fn default() -> Self {
        WaveConfig {
            family: Family::BfdInf,
            speed: 0.0,
            method: SolveMethod::Reduced,
            lambda: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuationParameter {
    #[default]
    Speed,
    Mu2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationConfig {
    pub parameter: ContinuationParameter,
    /// Final speed, or the smallest `mu2` of a depth branch.
    pub target: f64,
    /// Depth values the branch must hit exactly.
    pub stations: Vec<f64>,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            parameter: ContinuationParameter::Speed,
            target: 0.05,
            stations: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    /// Stored `(x, xi, nu)` CSV; `None` computes the wave from `[wave]`.
    pub input: Option<PathBuf>,
    /// `None` picks exponential at finite depth and algebraic otherwise.
    pub kind: Option<TailKind>,
    pub window: Option<(f64, f64)>,
    pub periodic_images: bool,
    pub core_width: Option<f64>,
    pub predicted_xi: Option<f64>,
    pub predicted_nu: Option<f64>,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            input: None,
            kind: None,
            window: None,
            periodic_images: true,
            core_width: None,
            predicted_xi: None,
            predicted_nu: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(rename = "L")]
    pub half_length: f64,
    #[serde(rename = "N")]
    pub n: usize,
    /// Sample points; each must be a node of the kernel grid.
    pub points: Vec<f64>,
    /// Rate of `K1`; `None` uses `sigma` of the parameters.
    pub sigma: Option<f64>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            half_length: 256.0,
            n: 1 << 18,
            points: vec![1.0, 2.0, 5.0],
            sigma: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// `zeta = A exp(-(x/w)^2)`, `v = (A/2)(x/w) exp(-(x/w)^2)`.
    #[default]
    Bump,
    /// The solitary wave of `[wave]`.
    Solitary,
    /// A stored `(x, zeta, v)` CSV.
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub width: f64,
    pub path: Option<PathBuf>,
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig {
            kind: InitialKind::Bump,
            amplitude: 0.1,
            width: 2.0,
            path: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub draws: usize,
    /// Random band-limited pairs per draw for the `E >= 0` check.
    pub field_pairs: usize,
    /// Speeds are drawn from `(-f, f)` times the speed bound.
    pub omega_fraction: f64,
    /// Probability of a finite `mu2` above the threshold.
    pub finite_depth_fraction: f64,
    /// Grid of the per-frequency check.
    pub symbol_grid: GridConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            draws: 200,
            field_pairs: 5,
            omega_fraction: 0.95,
            finite_depth_fraction: 0.5,
            symbol_grid: GridConfig {
                half_length: 60.0,
                n: 2048,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ModelParams,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub wave: WaveConfig,
    #[serde(default)]
    pub continuation: ContinuationConfig,
    #[serde(default)]
    pub decay: DecayConfig,
    #[serde(default)]
    pub kernels: KernelConfig,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub seed: u64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} = {v} must be finite and positive")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_toml(&text)
    }

    /// Check every key the command reads before any numerics run.
    pub fn validate(&self, command: &str) -> Result<()> {
        self.grid.grid()?;
        self.solver.validate()?;
        if !self.wave.speed.is_finite() {
            return Err(Error::Config("wave.speed must be finite".into()));
        }
        match command {
            "validate" => self.validate_family(self.wave.family),
            "solve" | "decay" => {
                self.validate_family(self.wave.family)?;
                if self.wave.method == SolveMethod::Variational {
                    if !self.wave.family.is_bfd() {
                        return Err(Error::Config("wave.method = \"variational\" needs a B-FD family".into()));
                    }
                    positive("wave.lambda", self.wave.lambda)?;
                }
                if command == "decay" {
                    if let Some((a, b)) = self.decay.window {
                        if !(a >= 0.0 && b > a) {
                            return Err(Error::Config(format!("decay.window = ({a}, {b}) must satisfy 0 <= start < end")));
                        }
                    }
                    if let Some(w) = self.decay.core_width {
                        positive("decay.core_width", w)?;
                    }
                }
                Ok(())
            }
            "continue" => {
                let c = &self.continuation;
                match c.parameter {
                    ContinuationParameter::Speed => {
                        self.validate_family(self.wave.family)?;
                        if !(c.target.is_finite() && c.target != 0.0) {
                            return Err(Error::Config("continuation.target must be a finite nonzero speed".into()));
                        }
                        if self.wave.family == Family::Ilw && self.params.mu2.is_infinite() {
                            return Err(Error::Config("ILW continuation in c needs a finite params.mu2".into()));
                        }
                    }
                    ContinuationParameter::Mu2 => {
                        positive("continuation.target", c.target)?;
                        if !matches!(self.wave.family, Family::Ilw | Family::Bo) {
                            return Err(Error::Config("depth continuation starts from the BO wave (family bo or ilw)".into()));
                        }
                        self.params.with_mu2(Depth::Infinite).validate_for(Family::Bo)?;
                        for &s in &c.stations {
                            positive("continuation.stations", s)?;
                        }
                    }
                }
                Ok(())
            }
            "kernel-check" => {
                Grid::new(self.kernels.half_length, self.kernels.n)?;
                if self.kernels.points.is_empty() {
                    return Err(Error::Config("kernels.points is empty".into()));
                }
                for &x in &self.kernels.points {
                    if !(x.is_finite() && x.abs() < self.kernels.half_length) {
                        return Err(Error::Config(format!("kernel point {x} lies outside the kernel grid")));
                    }
                }
                if let Some(s) = self.kernels.sigma {
                    positive("kernels.sigma", s)?;
                }
                Ok(())
            }
            "evolve" => {
                self.validate_family(self.wave.family)?;
                positive("evolution.t_final", self.evolution.t_final)?;
                if let Some(dt) = self.evolution.dt {
                    positive("evolution.dt", dt)?;
                }
                if let Some(s) = self.evolution.snapshot_every {
                    positive("evolution.snapshot_every", s)?;
                }
                if self.evolution.monitor_every == 0 {
                    return Err(Error::Config("evolution.monitor_every must be at least 1".into()));
                }
                match self.initial.kind {
                    InitialKind::Bump => {
                        if !self.initial.amplitude.is_finite() {
                            return Err(Error::Config("initial.amplitude must be finite".into()));
                        }
                        positive("initial.width", self.initial.width)
                    }
                    InitialKind::File if self.initial.path.is_none() => {
                        Err(Error::Config("initial.kind = \"file\" needs initial.path".into()))
                    }
                    _ => Ok(()),
                }
            }
            "sweep" => {
                let s = &self.sweep;
                if s.draws == 0 {
                    return Err(Error::Config("sweep.draws must be at least 1".into()));
                }
                if !(s.omega_fraction > 0.0 && s.omega_fraction < 1.0) {
                    return Err(Error::Config("sweep.omega_fraction must lie in (0, 1)".into()));
                }
                if !(0.0..=1.0).contains(&s.finite_depth_fraction) {
                    return Err(Error::Config("sweep.finite_depth_fraction must lie in [0, 1]".into()));
                }
                s.symbol_grid.grid()?;
                Ok(())
            }
            other => Err(Error::Config(format!("unknown command {other}"))),
        }
    }

    fn validate_family(&self, family: Family) -> Result<()> {
        self.params.validate_for(family)
    }

    fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serialises")
    }
}

/// Writes reports, CSVs and the schema into the output directory.
pub struct Emitter {
    out: PathBuf,
    command: &'static str,
    config: Value,
    written: Vec<PathBuf>,
}

impl Emitter {
    pub fn new(out: &Path, command: &'static str, config: &RunConfig) -> Result<Emitter> {
        fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        Ok(Emitter {
            out: out.to_path_buf(),
            command,
            config: config.to_value(),
            written: Vec::new(),
        })
    }

    pub fn comments(&self) -> Vec<String> {
        vec![
            format!("interwave {VERSION} {}", self.command),
            format!("config: {}", serde_json::to_string(&self.config).expect("config serialises")),
        ]
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn context(&self) -> Value {
        json!({ "command": self.command, "config": self.config, "metadata": { "version": VERSION } })
    }

    pub fn json(&mut self, name: &str, report: &impl Serialize) -> Result<()> {
        let mut doc = self.context();
        doc["report"] = serde_json::to_value(report)?;
        let path = self.path(name);
        let text = serde_json::to_string_pretty(&doc)?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn wave(&mut self, name: &str, w: &WavePair, extra: &[String]) -> Result<()> {
        let mut c = self.comments();
        c.extend_from_slice(extra);
        let path = self.path(name);
        w.write_csv(&path, &c)?;
        self.written.push(path);
        Ok(())
    }

    pub fn columns(&mut self, name: &str, header: &[&str], cols: &[&[f64]]) -> Result<()> {
        let path = self.path(name);
        write_columns(&path, &self.comments(), header, cols)?;
        self.written.push(path);
        Ok(())
    }

    pub fn branch(&mut self, dir: &str, b: &SolitaryBranch) -> Result<()> {
        let path = self.path(dir);
        b.write(&path, &self.comments(), &self.context())?;
        self.written.push(path);
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<PathBuf>> {
        let path = self.path("schema.json");
        let text = serde_json::to_string_pretty(&csv_schema())?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        self.written.push(path);
        Ok(self.written)
    }
}

/// Column documentation for every CSV the CLI writes.
pub fn csv_schema() -> Value {
    let wave = json!([
        { "name": "x", "description": "grid node x_j = -L + j dx" },
        { "name": "xi", "description": "first component (xi of a wave, zeta of an evolution state)" },
        { "name": "nu", "description": "second component (nu of a wave, v of an evolution state)" }
    ]);
    json!({
        "comments": "lines starting with '#' carry the command and the resolved config as JSON",
        "files": {
            "solution.csv": wave,
            "final.csv": wave,
            "initial.csv": wave,
            "branch/sample_NNN.csv": wave,
            "snapshots/snapshot_NNN.csv": wave,
            "quadratic_form.csv": [
                { "name": "k", "description": "wavenumber, FFT order" },
                { "name": "min_eigen", "description": "smaller eigenvalue of the 2x2 symbol matrix of E" },
                { "name": "split_min", "description": "min{(1-gamma)J_c - |omega|J_b, L - |omega|J_b}" }
            ],
            "tail_xi.csv / tail_nu.csv": [
                { "name": "x", "description": "node in the fit window, x > 0" },
                { "name": "value", "description": "profile value" },
                { "name": "x2_value", "description": "x^2 times the value (algebraic) or NaN" },
                { "name": "log_abs_value", "description": "ln|value| (exponential) or NaN" }
            ],
            "kernels.csv": [
                { "name": "x", "description": "sample point" },
                { "name": "<kernel>", "description": "closed form of K, K1, K2, K3 (NaN when not applicable)" },
                { "name": "<kernel>_fft", "description": "FFT symbol-inversion oracle at the same point" }
            ],
            "monitors.csv": [
                { "name": "t", "description": "time" },
                { "name": "hamiltonian", "description": "H(t), NaN when not conserved by the family" },
                { "name": "h_drift", "description": "|H(t) - H(0)| / |H(0)|" },
                { "name": "sup_zeta", "description": "sup_x |zeta|" },
                { "name": "min_one_minus", "description": "min_x 1 - (eps/gamma) zeta" },
                { "name": "h1_norm", "description": "(|zeta|_{H^1}^2 + |v|_{H^1}^2)^{1/2}" },
                { "name": "mass_zeta", "description": "integral of zeta" },
                { "name": "mass_v", "description": "integral of v" },
                { "name": "high_mode_fraction", "description": "spectral energy share of the top third of the retained band" }
            ],
            "sweep.csv": [
                { "name": "draw", "description": "draw index" },
                { "name": "gamma", "description": "" },
                { "name": "epsilon", "description": "" },
                { "name": "mu", "description": "" },
                { "name": "mu2", "description": "depth, inf for infinite depth" },
                { "name": "a", "description": "" },
                { "name": "b", "description": "b = d" },
                { "name": "c", "description": "" },
                { "name": "omega", "description": "speed" },
                { "name": "speed_bound", "description": "(1-gamma) min{1, |c|/b}" },
                { "name": "f_min", "description": "minimum of the symbol f" },
                { "name": "m_value", "description": "M(omega)" },
                { "name": "global_min", "description": "min over frequencies of the smaller symbol eigenvalue" },
                { "name": "split_global_min", "description": "min over frequencies of the split bound" },
                { "name": "min_energy", "description": "smallest E over the random band-limited pairs" }
            ]
        }
    })
}

/// Map an error to the process exit code.
pub fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() {
        1
    } else {
        2
    }
}

/// Parse the command line, run, and report.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Load the configuration, validate it for the command and dispatch.
/// Returns the written paths.
pub fn run(command: &Command) -> Result<Vec<PathBuf>> {
    let io = command.io();
    let cfg = RunConfig::load(&io.config)?;
    run_config(command.name(), &cfg, &io.out)
}

pub fn run_config(command: &str, cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate(command)?;
    let name: &'static str = match command {
        "validate" => "validate",
        "solve" => "solve",
        "continue" => "continue",
        "decay" => "decay",
        "kernel-check" => "kernel-check",
        "evolve" => "evolve",
        "sweep" => "sweep",
        other => return Err(Error::Config(format!("unknown command {other}"))),
    };
    let mut em = Emitter::new(out, name, cfg)?;
    let outcome = match name {
        "validate" => cmd_validate(cfg, &mut em),
        "solve" => cmd_solve(cfg, &mut em),
        "continue" => cmd_continue(cfg, &mut em),
        "decay" => cmd_decay(cfg, &mut em),
        "kernel-check" => cmd_kernel_check(cfg, &mut em),
        "evolve" => cmd_evolve(cfg, &mut em),
        _ => cmd_sweep(cfg, &mut em),
    };
    let files = em.finish()?;
    outcome.map(|_| files)
}

pub fn cmd_validate(cfg: &RunConfig, em: &mut Emitter) -> Result<()> {
    let p = &cfg.params;
    let omega = cfg.wave.speed;
    let rates = p.decay_rates(4);
    if !cfg.wave.family.is_bfd() {
        let theta = p.theta();
        em.json(
            "validate.json",
            &json!({
                "family": cfg.wave.family,
                "valid": true,
                "theta": theta,
                "eta_roots": theta.map(|t| eta_roots(t, 4)),
                "decay_rates": rates,
            }),
        )?;
        return Ok(());
    }
    let report = p.admissibility(omega)?;
    let grid = cfg.grid.grid()?;
    let qf = quadratic_form_check(p, omega, &grid, Mu2Mode::of(p))?;
    let mut c = em.comments();
    c.push(format!("omega = {omega}"));
    let path = em.path("quadratic_form.csv");
    qf.write_csv(&path, &c)?;
    em.written.push(path);
    em.json(
        "validate.json",
        &json!({
            "family": cfg.wave.family,
            "admissibility": report,
            "quadratic_form": {
                "global_min": qf.global_min,
                "split_global_min": qf.split_global_min,
                "coercivity_const": qf.coercivity_const,
                "positive_definite": qf.positive_definite,
            },
            "decay_rates": rates,
        }),
    )?;
    if report.admissible {
        Ok(())
    } else {
        Err(Error::Inadmissible(format!(
            "omega = {omega}, mu2 = {} (speed bound {}, f_min {:?}, M {}, mu2 threshold {:?})",
            p.mu2, report.speed_bound, report.f_min, report.m_value, report.mu2_threshold
        )))
    }
}

/// A computed solitary wave with its solve record.
#[derive(Clone, Debug)]
pub struct SolvedWave {
    pub family: Family,
    pub speed: f64,
    pub pair: WavePair,
    pub residual: f64,
    pub detail: Value,
}

fn branch_end(b: &SolitaryBranch, target: f64, what: &'static str) -> Result<WavePair> {
    match b.find(target) {
        Some(i) => Ok(b.waves[i].clone()),
        None => Err(Error::NonConvergence {
            what,
            iterations: b.len(),
            residual: b.residuals.last().copied().unwrap_or(f64::NAN),
        }),
    }
}

/// The BO ground-state pair continued to the depth in `p`.
fn ilw_start(p: &ModelParams, grid: &Grid, solver: &SolverConfig) -> Result<(WavePair, Value)> {
    let bo = p.with_mu2(Depth::Infinite);
    let gs = petviashvili_ground_state(&bo, grid, solver)?;
    let pair = assemble_bo_pair(&bo, &gs.nu0);
    match p.mu2 {
        Depth::Infinite => Ok((pair, json!({ "ground_state": gs.summary() }))),
        Depth::Finite(m) => {
            let b = continue_in_mu2(p, &pair, m, &[m], solver)?;
            let w = branch_end(&b, 1.0 / m.sqrt(), "depth continuation")?;
            Ok((w, json!({ "ground_state": gs.summary(), "depth_branch": b.summary() })))
        }
    }
}

pub fn compute_wave(cfg: &RunConfig) -> Result<SolvedWave> {
    let p = &cfg.params;
    let grid = cfg.grid.grid()?;
    let (family, speed, solver) = (cfg.wave.family, cfg.wave.speed, &cfg.solver);
    let (pair, detail) = match family {
        Family::BfdInf | Family::BfdFinite => {
            let mode = if family == Family::BfdInf {
                Mu2Mode::Infinite
            } else {
                Mu2Mode::Finite
            };
            match cfg.wave.method {
                SolveMethod::Reduced => {
                    let s = solve_bfd_reduced(p, speed, &grid, mode, solver)?;
                    let d = serde_json::to_value(s.summary())?;
                    (s.pair, d)
                }
                SolveMethod::Variational => {
                    let m = constrained_minimize(p, speed, cfg.wave.lambda, &grid, mode, solver)?;
                    let d = json!({
                        "lambda": cfg.wave.lambda,
                        "lagrange_k": m.lagrange_k,
                        "lagrange_k_lsq": m.lagrange_k_lsq,
                        "energy": m.energy,
                        "constraint": m.constraint,
                        "iterations": m.iterations,
                    });
                    (m.solitary_wave(), d)
                }
            }
        }
        Family::Bo | Family::Ilw => {
            let (start, mut d) = if family == Family::Bo {
                ilw_start(&p.with_mu2(Depth::Infinite), &grid, solver)?
            } else {
                ilw_start(p, &grid, solver)?
            };
            if speed == 0.0 {
                (start, d)
            } else {
                let b = continue_in_c(family, p, &start, speed, solver)?;
                d["speed_branch"] = serde_json::to_value(b.summary())?;
                (branch_end(&b, speed, "continuation in c")?, d)
            }
        }
    };
    let residual = system_residual(family, p, speed, &pair)?;
    Ok(SolvedWave {
        family,
        speed,
        pair,
        residual,
        detail,
    })
}

fn wave_diagnostics(p: &ModelParams, w: &SolvedWave) -> Result<Value> {
    let mut d = json!({
        "family": w.family,
        "speed": w.speed,
        "residual": w.residual,
        "amplitude_xi": w.pair.xi.sup_norm(),
        "amplitude_nu": w.pair.nu.sup_norm(),
        "nyquist_ratio_xi": w.pair.xi.nyquist_ratio(),
        "nyquist_ratio_nu": w.pair.nu.nyquist_ratio(),
        "evenness_defect": w.pair.evenness_defect(),
        "solver": w.detail,
    });
    if w.family.is_bfd() {
        let mode = if w.family == Family::BfdInf {
            Mu2Mode::Infinite
        } else {
            Mu2Mode::Finite
        };
        d["energy_e"] = json!(energy_e(p, w.speed, &w.pair, mode)?);
        d["constraint_f"] = json!(constraint_f(p, &w.pair)?);
        if p.b == p.d {
            d["hamiltonian"] = json!(hamiltonian_h(p, &w.pair)?);
        }
    }
    Ok(d)
}

pub fn cmd_solve(cfg: &RunConfig, em: &mut Emitter) -> Result<()> {
    let w = compute_wave(cfg)?;
    em.wave("solution.csv", &w.pair, &[format!("family = {}, speed = {}", w.family.name(), w.speed)])?;
    em.json("solution.json", &wave_diagnostics(&cfg.params, &w)?)
}

pub fn cmd_continue(cfg: &RunConfig, em: &mut Emitter) -> Result<()> {
    let p = &cfg.params;
    let grid = cfg.grid.grid()?;
    let c = &cfg.continuation;
    let branch = match c.parameter {
        ContinuationParameter::Speed => {
            let start_cfg = RunConfig {
                wave: WaveConfig {
                    speed: 0.0,
                    ..cfg.wave.clone()
                },
                ..cfg.clone()
            };
            let start = compute_wave(&start_cfg)?;
            continue_in_c(cfg.wave.family, p, &start.pair, c.target, &cfg.solver)?
        }
        ContinuationParameter::Mu2 => {
            let (start, _) = ilw_start(&p.with_mu2(Depth::Infinite), &grid, &cfg.solver)?;
            continue_in_mu2(p, &start, c.target, &c.stations, &cfg.solver)?
        }
    };
    em.branch("branch", &branch)?;
    em.json("continue.json", &branch.summary())?;
    match &branch.truncated {
        Some(why) => {
            eprintln!("{why}");
            Err(Error::NonConvergence {
                what: "continuation (branch truncated, see continue.json)",
                iterations: branch.len(),
                residual: branch.residuals.last().copied().unwrap_or(f64::NAN),
            })
        }
        None => Ok(()),
    }
}

/// Predicted exponential rates `(xi, nu)` for the family, when known.
fn predicted_rates(p: &ModelParams, family: Family, speed: f64) -> (Option<f64>, Option<f64>) {
    match family {
        Family::BfdFinite => {
            let r = p.decay_rates(0);
            (r.sigma0, r.sigma)
        }
        Family::Ilw => match p.theta() {
            Some(t) if p.beta > 1.0 => {
                let nu = eta_roots(t, 1)[0] / p.mu2.finite().expect("finite depth").sqrt();
                // At zero speed xi is quadratic in nu.
                (Some(if speed == 0.0 { 2.0 * nu } else { nu }), Some(nu))
            }
            _ => (None, None),
        },
        _ => (None, None),
    }
}

fn tail_columns(f: &RealField, r: &DecayReport) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let (mut x, mut v, mut x2, mut lg) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (&xj, &vj) in f.grid().x().iter().zip(f.values()) {
        if xj >= r.fit_window.0 && xj <= r.fit_window.1 {
            x.push(xj);
            v.push(vj);
            match r.kind {
                TailKind::Algebraic => {
                    x2.push(xj * xj * vj);
                    lg.push(f64::NAN);
                }
                TailKind::Exponential => {
                    x2.push(f64::NAN);
                    lg.push(vj.abs().ln());
                }
            }
        }
    }
    (x, v, x2, lg)
}

pub fn cmd_decay(cfg: &RunConfig, em: &mut Emitter) -> Result<()> {
    let d = &cfg.decay;
    let family = cfg.wave.family;
    let (pair, source) = match &d.input {
        Some(path) => (WavePair::read_csv(path)?, json!({ "input": path })),
        None => {
            let w = compute_wave(cfg)?;
            em.wave("solution.csv", &w.pair, &[format!("family = {}, speed = {}", family.name(), w.speed)])?;
            let diag = wave_diagnostics(&cfg.params, &w)?;
            (w.pair, diag)
        }
    };
    let kind = d.kind.unwrap_or(match family {
        Family::BfdFinite | Family::Ilw => TailKind::Exponential,
        Family::BfdInf | Family::Bo => TailKind::Algebraic,
    });
    let (pred_xi, pred_nu) = match kind {
        TailKind::Exponential => predicted_rates(&cfg.params, family, cfg.wave.speed),
        TailKind::Algebraic => (None, None),
    };
    let mut reports = serde_json::Map::new();
    for (name, field, predicted) in [
        ("xi", &pair.xi, d.predicted_xi.or(pred_xi)),
        ("nu", &pair.nu, d.predicted_nu.or(pred_nu)),
    ] {
        let opts = FitOptions {
            window: d.window,
            periodic_images: d.periodic_images,
            core_width: d.core_width,
            predicted,
        };
        let fit = match kind {
            TailKind::Algebraic => fit_algebraic_tail(field, &opts),
            TailKind::Exponential => fit_exponential_tail(field, &opts),
        };
        match fit {
            Ok(r) => {
                let (x, v, x2, lg) = tail_columns(field, &r);
                em.columns(&format!("tail_{name}.csv"), &["x", "value", "x2_value", "log_abs_value"], &[&x, &v, &x2, &lg])?;
                reports.insert(name.into(), serde_json::to_value(&r)?);
            }
            Err(e @ (Error::BadWindow(_) | Error::NotApplicable(_))) => {
                reports.insert(name.into(), json!({ "error": e.to_string() }));
            }
            Err(e) => return Err(e),
        }
    }
    em.json("decay.json", &json!({ "kind": kind, "source": source, "fits": reports }))
}

struct KernelCase {
    name: &'static str,
    symbol: Result<Multiplier>,
    norm: Normalization,
    closed: Box<dyn Fn(f64) -> Result<f64>>,
}

pub fn cmd_kernel_check(cfg: &RunConfig, em: &mut Emitter) -> Result<()> {
    let k = &cfg.kernels;
    let grid = Grid::new(k.half_length, k.n)?;
    let p = cfg.params.clone();
    let sigma = k.sigma.map_or_else(|| p.sigma(), Ok).map_err(|e| e.to_string());
    let sigma_closed = sigma.clone();
    let (p1, p2, p3) = (p.clone(), p.clone(), p.clone());
    let cases = vec![
        KernelCase {
            name: "K",
            symbol: k_symbol(&p, &grid),
            norm: Normalization::Unitary,
            closed: Box::new(move |x| kernel_k(&p1, x)),
        },
        KernelCase {
            name: "K1",
            symbol: sigma.clone().map(|s| k1_symbol(s, &grid)).map_err(Error::NotApplicable),
            norm: Normalization::Plain,
            closed: Box::new(move |x| sigma_closed.clone().map(|s| kernel_k1(s, x)).map_err(Error::NotApplicable)),
        },
        KernelCase {
            name: "K2",
            symbol: p.validate_ilw().map(|_| k2_symbol(&p, &grid)),
            norm: Normalization::Unitary,
            closed: Box::new(move |x| kernel_k2(&p2, x)),
        },
        KernelCase {
            name: "K3",
            symbol: k3_symbol(&p, &grid),
            norm: Normalization::Unitary,
            closed: Box::new(move |x| kernel_k3(&p3, x, K3_TOL, K3_MAX_TERMS).map(|s| s.value)),
        },
    ];
    let mut idx = Vec::new();
    for &x in &k.points {
        idx.push(
            grid.index_of(x)
                .ok_or_else(|| Error::Config(format!("kernel point {x} is not a node of the kernel grid (dx = {})", grid.dx())))?,
        );
    }
    let mut columns: Vec<(String, Vec<f64>)> = vec![("x".into(), k.points.clone())];
    let mut results = serde_json::Map::new();
    for case in cases {
        let outcome = case.symbol.and_then(|m| {
            let oracle = kernel_fft_oracle(&m, case.norm)?;
            let mut rows = Vec::new();
            for (&x, &j) in k.points.iter().zip(&idx) {
                rows.push((x, (case.closed)(x)?, oracle.values()[j]));
            }
            Ok(rows)
        });
        match outcome {
            Ok(rows) => {
                let max_diff = rows.iter().map(|r| (r.1 - r.2).abs()).fold(0.0, f64::max);
                results.insert(
                    case.name.into(),
                    json!({
                        "points": rows.iter().map(|r| json!({ "x": r.0, "closed": r.1, "fft": r.2, "abs_diff": (r.1 - r.2).abs() })).collect::<Vec<_>>(),
                        "max_abs_diff": max_diff,
                    }),
                );
                columns.push((case.name.into(), rows.iter().map(|r| r.1).collect()));
                columns.push((format!("{}_fft", case.name), rows.iter().map(|r| r.2).collect()));
            }
            Err(e) if !e.is_numerical() || matches!(e, Error::SingularOperator { .. }) => {
                results.insert(case.name.into(), json!({ "skipped": e.to_string() }));
                columns.push((case.name.into(), vec![f64::NAN; k.points.len()]));
                columns.push((format!("{}_fft", case.name), vec![f64::NAN; k.points.len()]));
            }
            Err(e) => return Err(e),
        }
    }
    let header: Vec<&str> = columns.iter().map(|c| c.0.as_str()).collect();
    let cols: Vec<&[f64]> = columns.iter().map(|c| c.1.as_slice()).collect();
    em.columns("kernels.csv", &header, &cols)?;
    let rates = cfg.params.decay_rates(4);
    em.json(
        "kernels.json",
        &json!({ "grid": { "L": k.half_length, "N": k.n }, "constants": rates, "kernels": results }),
    )
}

fn initial_state(cfg: &RunConfig, grid: &Grid) -> Result<(WavePair, Option<SolvedWave>)> {
    let i = &cfg.initial;
    match i.kind {
        InitialKind::Bump => {
            let (a, w) = (i.amplitude, i.width);
            Ok((
                WavePair {
                    xi: RealField::from_fn(grid, |x| a * (-(x / w).powi(2)).exp()),
                    nu: RealField::from_fn(grid, |x| 0.5 * a * (x / w) * (-(x / w).powi(2)).exp()),
                },
                None,
            ))
        }
        InitialKind::Solitary => {
            let w = compute_wave(cfg)?;
            Ok((w.pair.clone(), Some(w)))
        }
        InitialKind::File => {
            let path = i.path.as_ref().expect("validated");
            let w = WavePair::read_csv(path)?;
            if !w.grid().same_as(grid) {
                return Err(Error::Config(format!("{} is not on the grid of [grid]", path.display())));
            }
            Ok((w, None))
        }
    }
}

pub fn cmd_evolve(cfg: &RunConfig, em: &mut Emitter) -> Result<()> {
    let grid = cfg.grid.grid()?;
    let ev = Evolver::new(cfg.wave.family, &cfg.params, &grid)?;
    let (init, wave) = initial_state(cfg, &grid)?;
    em.wave("initial.csv", &init, &[])?;
    let traj = ev.run(&init, &cfg.evolution)?;
    let s = &traj.summary;
    let nan = f64::NAN;
    let col = |f: &dyn Fn(&crate::evolution::MonitorSample) -> f64| s.monitors.iter().map(f).collect::<Vec<f64>>();
    let cols = [
        col(&|m| m.t),
        col(&|m| m.hamiltonian.unwrap_or(nan)),
        col(&|m| m.h_drift.unwrap_or(nan)),
        col(&|m| m.sup_zeta),
        col(&|m| m.min_one_minus),
        col(&|m| m.h1_norm),
        col(&|m| m.mass_zeta),
        col(&|m| m.mass_v),
        col(&|m| m.high_mode_fraction),
    ];
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    em.columns(
        "monitors.csv",
        &[
            "t",
            "hamiltonian",
            "h_drift",
            "sup_zeta",
            "min_one_minus",
            "h1_norm",
            "mass_zeta",
            "mass_v",
            "high_mode_fraction",
        ],
        &refs,
    )?;
    em.wave("final.csv", &traj.final_fields, &[format!("t = {}", traj.state.t)])?;
    if !traj.snapshots.is_empty() {
        let dir = em.path("snapshots");
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for (i, (t, w)) in traj.snapshots.iter().enumerate() {
            em.wave(&format!("snapshots/snapshot_{i:03}.csv"), w, &[format!("t = {t}")])?;
        }
    }
    let travelling = match &wave {
        Some(w) => Some(json!({
            "speed": w.speed,
            "residual": w.residual,
            "shape_error": relative_l2_error(&traj.final_fields, &w.pair.translate(w.speed * traj.state.t))?,
        })),
        None => None,
    };
    let mut summary = serde_json::to_value(s)?;
    if let Value::Object(m) = &mut summary {
        m.remove("monitors");
    }
    em.json(
        "trajectory.json",
        &json!({ "summary": summary, "final_state": traj.state, "snapshots": traj.snapshots.len(), "travelling_wave": travelling }),
    )
}

#[derive(Clone, Debug, Serialize)]
struct SweepRow {
    draw: usize,
    params: ModelParams,
    omega: f64,
    speed_bound: f64,
    f_min: f64,
    m_value: f64,
    global_min: f64,
    split_global_min: f64,
    min_energy: f64,
}

/// Draw an admissible B-FD set with `b = d`, a speed and a depth.
fn draw_admissible(rng: &mut ChaCha8Rng, s: &SweepConfig) -> (ModelParams, f64) {
    loop {
        let gamma = rng.gen_range(0.1..0.9);
        let epsilon = rng.gen_range(0.01..0.5);
        let mu = rng.gen_range(0.01..1.0);
        let b = rng.gen_range(1.0 / 6.0..2.0);
        let t = rng.gen_range(0.05..0.95);
        let spread = 2.0 * b - 1.0 / 3.0;
        let p = ModelParams::bfd(gamma, epsilon, mu, Depth::Infinite, -t * spread, b, -(1.0 - t) * spread);
        let Ok(bound) = p.speed_window() else { continue };
        let omega = rng.gen_range(-s.omega_fraction..s.omega_fraction) * bound;
        let p = if rng.gen_bool(s.finite_depth_fraction) {
            match p.mu2_threshold(omega) {
                Ok(th) => p.with_mu2(Depth::Finite(th * rng.gen_range(1.2..20.0))),
                Err(_) => continue,
            }
        } else {
            p
        };
        if p.admissibility(omega).is_ok_and(|r| r.admissible) {
            return (p, omega);
        }
    }
}

fn band_limited(grid: &Grid, jmax: usize, rng: &mut ChaCha8Rng) -> RealField {
    use num_complex::Complex64;
    let n = grid.n();
    let mut s = vec![Complex64::new(0.0, 0.0); n];
    s[0] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
    for j in 1..=jmax {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        s[j] = z;
        s[n - j] = z.conj();
    }
    let f = RealField::from_spectrum(grid, s);
    let m = f.sup_norm();
    f.scale(1.0 / m)
}

fn sweep_draw(i: usize, cfg: &RunConfig, qgrid: &Grid, fgrid: &Grid) -> Result<SweepRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(i as u64);
    let (p, omega) = draw_admissible(&mut rng, &cfg.sweep);
    let mode = Mu2Mode::of(&p);
    let rep = p.admissibility(omega)?;
    let q = quadratic_form_check(&p, omega, qgrid, mode)?;
    let mut min_energy = f64::INFINITY;
    for _ in 0..cfg.sweep.field_pairs {
        let jmax = rng.gen_range(1..(fgrid.n() / 3).max(2));
        let w = WavePair::new(band_limited(fgrid, jmax, &mut rng), band_limited(fgrid, jmax, &mut rng))?;
        min_energy = min_energy.min(energy_e(&p, omega, &w, mode)?);
    }
    Ok(SweepRow {
        draw: i,
        omega,
        speed_bound: rep.speed_bound,
        f_min: rep.f_min.unwrap_or(f64::NAN),
        m_value: rep.m_value,
        global_min: q.global_min,
        split_global_min: q.split_global_min,
        min_energy,
        params: p,
    })
}

pub fn cmd_sweep(cfg: &RunConfig, em: &mut Emitter) -> Result<()> {
    let qgrid = cfg.sweep.symbol_grid.grid()?;
    let fgrid = cfg.grid.grid()?;
    let rows: Vec<SweepRow> = (0..cfg.sweep.draws)
        .into_par_iter()
        .map(|i| sweep_draw(i, cfg, &qgrid, &fgrid))
        .collect::<Result<_>>()?;
    let col = |f: &dyn Fn(&SweepRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let cols = [
        col(&|r| r.draw as f64),
        col(&|r| r.params.gamma),
        col(&|r| r.params.epsilon),
        col(&|r| r.params.mu),
        col(&|r| r.params.mu2.finite().unwrap_or(f64::INFINITY)),
        col(&|r| r.params.a),
        col(&|r| r.params.b),
        col(&|r| r.params.c),
        col(&|r| r.omega),
        col(&|r| r.speed_bound),
        col(&|r| r.f_min),
        col(&|r| r.m_value),
        col(&|r| r.global_min),
        col(&|r| r.split_global_min),
        col(&|r| r.min_energy),
    ];
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    em.columns(
        "sweep.csv",
        &[
            "draw",
            "gamma",
            "epsilon",
            "mu",
            "mu2",
            "a",
            "b",
            "c",
            "omega",
            "speed_bound",
            "f_min",
            "m_value",
            "global_min",
            "split_global_min",
            "min_energy",
        ],
        &refs,
    )?;
    let count = |f: &dyn Fn(&SweepRow) -> bool| rows.iter().filter(|r| f(r)).count();
    let fold_min = |f: &dyn Fn(&SweepRow) -> f64| rows.iter().map(f).fold(f64::INFINITY, f64::min);
    em.json(
        "sweep.json",
        &json!({
            "seed": cfg.seed,
            "draws": rows.len(),
            "field_pairs": rows.len() * cfg.sweep.field_pairs,
            "global_min_failures": count(&|r| !(r.global_min > 0.0)),
            "split_min_failures": count(&|r| !(r.split_global_min > 0.0)),
            "energy_failures": count(&|r| !(r.min_energy >= 0.0)),
            "smallest_global_min": fold_min(&|r| r.global_min),
            "smallest_split_min": fold_min(&|r| r.split_global_min),
            "smallest_energy": fold_min(&|r| r.min_energy),
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const P1: &str = r#"
seed = 7
params.gamma = 0.5
params.epsilon = 0.1
params.mu = 0.1
params.a = -0.08333333333333333
params.b = 0.25
params.c = -0.08333333333333333
params.d = 0.25
grid.L = 30.0
grid.N = 256
wave.speed = 0.1
"#;

    fn p1() -> RunConfig {
        RunConfig::from_toml(P1).unwrap()
    }

    #[test]
    fn dotted_keys_parse() {
        let c = p1();
        assert_eq!(c.params, ModelParams::p1());
        assert_eq!(c.grid.n, 256);
        assert_eq!(c.seed, 7);
        assert_eq!(c.solver, SolverConfig::default());
    }

    #[test]
    fn unknown_and_missing_keys_are_config_errors() {
        let e = RunConfig::from_toml(&format!("{P1}\ngrid.M = 3\n")).unwrap_err();
        assert_eq!(exit_code(&e), 2);
        let e = RunConfig::from_toml("params.gamma = 0.5\nparams.mu = 0.1\n").unwrap_err();
        assert!(matches!(e, Error::Config(ref m) if m.contains("epsilon")), "{e}");
        assert_eq!(exit_code(&e), 2);
    }

    #[test]
    fn validate_reports_and_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let files = run_config("validate", &p1(), dir.path()).unwrap();
        assert!(files.iter().any(|f| f.ends_with("schema.json")));
        let doc: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("validate.json")).unwrap()).unwrap();
        assert_eq!(doc["report"]["admissibility"]["admissible"], json!(true));
        assert_eq!(doc["config"]["params"]["gamma"], json!(0.5));

        let mut fast = p1();
        fast.wave.speed = 0.2;
        let e = run_config("validate", &fast, dir.path()).unwrap_err();
        assert_eq!(exit_code(&e), 1);

        let mut bad = p1();
        bad.params.b = 0.1;
        bad.params.d = 0.1;
        let e = run_config("validate", &bad, dir.path()).unwrap_err();
        assert_eq!(exit_code(&e), 2);
    }

    #[test]
    fn solve_writes_embedded_config() {
        let dir = tempfile::tempdir().unwrap();
        run_config("solve", &p1(), dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
        assert!(text.lines().any(|l| l.starts_with("# config: {")));
        let w = WavePair::read_csv(&dir.path().join("solution.csv")).unwrap();
        assert!(system_residual(Family::BfdInf, &ModelParams::p1(), 0.1, &w).unwrap() < 1e-9);
    }

    #[test]
    fn sweep_is_deterministic() {
        let mut c = p1();
        c.sweep.draws = 6;
        c.sweep.field_pairs = 2;
        c.sweep.symbol_grid = GridConfig {
            half_length: 20.0,
            n: 256,
        };
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run_config("sweep", &c, a.path()).unwrap();
        run_config("sweep", &c, b.path()).unwrap();
        for f in ["sweep.json", "sweep.csv"] {
            assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
        }
    }
}
