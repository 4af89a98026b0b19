//! Natural-parameter continuation with a secant predictor and adaptive steps,
//! in the speed `c` (or `omega`) and in the depth parameter `s = 1/sqrt(mu2)`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Depth, Family, ModelParams};
use crate::solvers::newton::newton_solve;
use crate::solvers::{system_residual, SolverConfig};
use crate::spectral::WavePair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchParameter {
    /// Wave speed `c` (BO, ILW) or `omega` (B-FD).
    Speed,
    /// `s = 1/sqrt(mu2)`, zero at infinite depth.
    InvSqrtMu2,
}

#[derive(Clone, Debug)]
pub struct SolitaryBranch {
    pub family: Family,
    pub parameter: BranchParameter,
    pub parameter_values: Vec<f64>,
    pub waves: Vec<WavePair>,
    pub residuals: Vec<f64>,
    pub newton_iterations: Vec<usize>,
    pub lagrange_k: Option<Vec<f64>>,
    /// Set when the step collapsed before the target was reached.
    pub truncated: Option<String>,
    pub params: ModelParams,
    /// Fixed speed for depth branches.
    pub speed: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchSummary {
    pub family: Family,
    pub parameter: BranchParameter,
    pub parameter_values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub newton_iterations: Vec<usize>,
    pub amplitudes_nu: Vec<f64>,
    pub lagrange_k: Option<Vec<f64>>,
    pub truncated: Option<String>,
    pub files: Vec<String>,
}

impl SolitaryBranch {
    fn new(family: Family, parameter: BranchParameter, params: &ModelParams, speed: f64) -> Self {
        SolitaryBranch {
            family,
            parameter,
            parameter_values: Vec::new(),
            waves: Vec::new(),
            residuals: Vec::new(),
            newton_iterations: Vec::new(),
            lagrange_k: None,
            truncated: None,
            params: params.clone(),
            speed,
        }
    }

    fn push(&mut self, value: f64, w: WavePair, residual: f64, iterations: usize) {
        self.parameter_values.push(value);
        self.waves.push(w);
        self.residuals.push(residual);
        self.newton_iterations.push(iterations);
    }

    pub fn len(&self) -> usize {
        self.waves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waves.is_empty()
    }

    /// `mu2` of sample `i` on a depth branch.
    pub fn mu2_at(&self, i: usize) -> Depth {
        Depth::from_inv_sqrt(self.parameter_values[i])
    }

    /// Index of the sample whose parameter equals `value`.
    pub fn find(&self, value: f64) -> Option<usize> {
        self.parameter_values.iter().position(|&v| v == value)
    }

    fn file_name(i: usize) -> String {
        format!("sample_{i:03}.csv")
    }

    pub fn summary(&self) -> BranchSummary {
        BranchSummary {
            family: self.family,
            parameter: self.parameter,
            parameter_values: self.parameter_values.clone(),
            residuals: self.residuals.clone(),
            newton_iterations: self.newton_iterations.clone(),
            amplitudes_nu: self.waves.iter().map(|w| w.nu.sup_norm()).collect(),
            lagrange_k: self.lagrange_k.clone(),
            truncated: self.truncated.clone(),
            files: (0..self.len()).map(Self::file_name).collect(),
        }
    }

    /// Write `branch.json` and one CSV per sample into `dir`. `context` is
    /// embedded in `branch.json` next to the summary.
    pub fn write(&self, dir: &Path, comments: &[String], context: &serde_json::Value) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (i, w) in self.waves.iter().enumerate() {
            let mut c = comments.to_vec();
            c.push(format!("{:?} = {}", self.parameter, self.parameter_values[i]));
            w.write_csv(&dir.join(Self::file_name(i)), &c)?;
        }
        let path = dir.join("branch.json");
        let doc = serde_json::json!({ "context": context, "branch": self.summary() });
        let text = serde_json::to_string_pretty(&doc)?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

/// Secant extrapolation from the last two samples, or the last sample alone.
fn predict(values: &[f64], waves: &[WavePair], target: f64) -> Result<WavePair> {
    let n = waves.len();
    let last = waves[n - 1].clone();
    if n < 2 {
        return Ok(last);
    }
    let (p0, p1) = (values[n - 2], values[n - 1]);
    let t = (target - p1) / (p1 - p0);
    last.axpy(-t, &waves[n - 2])?.axpy(t, &last)
}

struct Stepper<'a> {
    cfg: &'a SolverConfig,
    step: f64,
}

impl Stepper<'_> {
    fn adapt(&mut self, newton_iterations: usize) {
        if newton_iterations <= 3 {
            self.step = (self.step * 1.5).min(self.cfg.max_step);
        } else if newton_iterations >= 8 {
            self.step = (self.step * 0.5).max(self.cfg.min_step);
        }
    }
}

/// Continue a converged pair `start` at speed zero toward `c_max` (either sign).
/// The first sample is `start` itself. Parameters are used as given, so an
/// ILW family needs a finite `mu2` in `p`.
pub fn continue_in_c(family: Family, p: &ModelParams, start: &WavePair, c_max: f64, cfg: &SolverConfig) -> Result<SolitaryBranch> {
    cfg.validate()?;
    let mut branch = SolitaryBranch::new(family, BranchParameter::Speed, p, 0.0);
    let r0 = system_residual(family, p, 0.0, start)?;
    let (w0, r0, it0) = if r0 > cfg.tol_residual {
        let (w, rep) = newton_solve(family, p, 0.0, start, cfg)?;
        (w, rep.residual, rep.iterations)
    } else {
        (start.clone(), r0, 0)
    };
    branch.push(0.0, w0, r0, it0);
    let dir = c_max.signum();
    let mut stepper = Stepper {
        cfg,
        step: cfg.continuation_step,
    };
    let mut c = 0.0;
    while dir * (c_max - c) > 0.0 {
        let target = if dir * (c_max - (c + dir * stepper.step)) < 0.0 {
            c_max
        } else {
            c + dir * stepper.step
        };
        let guess = predict(&branch.parameter_values, &branch.waves, target)?;
        match newton_solve(family, p, target, &guess, cfg) {
            Ok((w, rep)) => {
                c = target;
                stepper.adapt(rep.iterations);
                branch.push(c, w, rep.residual, rep.iterations);
            }
            Err(e) if e.is_numerical() => {
                if stepper.step <= cfg.min_step {
                    branch.truncated = Some(format!(
                        "step collapsed at c = {c}; numerical delta estimate {}; last error: {e}",
                        c.abs()
                    ));
                    break;
                }
                stepper.step = (stepper.step * 0.5).max(cfg.min_step);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(branch)
}

/// Continue the infinite-depth pair `bo_pair` (ILW at `s = 0`) in `s = 1/sqrt(mu2)`
/// up to `1/sqrt(mu2_min)`, landing exactly on every `mu2` in `stations`.
pub fn continue_in_mu2(
    p: &ModelParams,
    bo_pair: &WavePair,
    mu2_min: f64,
    stations: &[f64],
    cfg: &SolverConfig,
) -> Result<SolitaryBranch> {
    cfg.validate()?;
    if !(mu2_min > 0.0 && mu2_min.is_finite()) {
        return Err(Error::Config(format!("mu2_min = {mu2_min} must be finite and positive")));
    }
    let bo = p.with_mu2(Depth::Infinite);
    let r0 = system_residual(Family::Ilw, &bo, 0.0, bo_pair)?;
    let mut branch = SolitaryBranch::new(Family::Ilw, BranchParameter::InvSqrtMu2, &bo, 0.0);
    branch.push(0.0, bo_pair.clone(), r0, 0);
    let s_max = 1.0 / mu2_min.sqrt();
    let mut targets: Vec<f64> = stations
        .iter()
        .filter(|&&m| m >= mu2_min && m.is_finite())
        .map(|&m| 1.0 / m.sqrt())
        .chain(std::iter::once(s_max))
        .collect();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    let mut stepper = Stepper {
        cfg,
        step: cfg.continuation_step,
    };
    let mut s = 0.0;
    let mut next_station = 0;
    while s < s_max {
        let station = targets[next_station];
        let target = if s + stepper.step >= station { station } else { s + stepper.step };
        let pt = p.with_mu2(Depth::from_inv_sqrt(target));
        let guess = predict(&branch.parameter_values, &branch.waves, target)?;
        match newton_solve(Family::Ilw, &pt, 0.0, &guess, cfg) {
            Ok((w, rep)) => {
                s = target;
                if s == station {
                    next_station += 1;
                }
                stepper.adapt(rep.iterations);
                branch.push(s, w, rep.residual, rep.iterations);
            }
            Err(e) if e.is_numerical() => {
                if stepper.step <= cfg.min_step {
                    let sigma = if s > 0.0 { 1.0 / (s * s) } else { f64::INFINITY };
                    branch.truncated = Some(format!(
                        "step collapsed at 1/sqrt(mu2) = {s}; numerical depth estimate mu2 > {sigma}; last error: {e}"
                    ));
                    break;
                }
                stepper.step = (stepper.step * 0.5).max(cfg.min_step);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(branch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{assemble_bo_pair, petviashvili_ground_state};
    use crate::spectral::Grid;

    fn bo() -> ModelParams {
        ModelParams::ilw(0.5, 0.1, 0.1, Depth::Infinite, 2.0)
    }

    fn start() -> WavePair {
        let g = Grid::new(50.0, 512).unwrap();
        let gs = petviashvili_ground_state(&bo(), &g, &SolverConfig::default()).unwrap();
        assemble_bo_pair(&bo(), &gs.nu0)
    }

    #[test]
    fn speed_branch_reaches_target() {
        let w0 = start();
        let cfg = SolverConfig::default();
        let b = continue_in_c(Family::Bo, &bo(), &w0, 0.03, &cfg).unwrap();
        assert!(b.truncated.is_none());
        assert_eq!(*b.parameter_values.last().unwrap(), 0.03);
        assert!(b.residuals.iter().all(|&r| r <= cfg.tol_residual));
        assert!(b.waves.iter().all(|w| w.evenness_defect() < 1e-10));
        let neg = continue_in_c(Family::Bo, &bo(), &w0, -0.02, &cfg).unwrap();
        assert_eq!(*neg.parameter_values.last().unwrap(), -0.02);
    }

    #[test]
    fn depth_branch_hits_stations() {
        let w0 = start();
        let cfg = SolverConfig {
            continuation_step: 0.02,
            max_step: 0.05,
            ..SolverConfig::default()
        };
        let b = continue_in_mu2(&bo(), &w0, 25.0, &[400.0, 100.0, 25.0], &cfg).unwrap();
        assert!(b.truncated.is_none());
        assert_eq!(b.waves[0].nu.values(), w0.nu.values());
        for m in [400.0, 100.0, 25.0] {
            let i = b.find(1.0 / f64::sqrt(m)).unwrap();
            let Depth::Finite(got) = b.mu2_at(i) else { panic!() };
            assert!((got - m).abs() <= 1e-12 * m);
        }
        assert!(b.residuals.iter().all(|&r| r <= cfg.tol_residual));
    }

    #[test]
    fn branch_files() {
        let w0 = start();
        let b = continue_in_c(Family::Bo, &bo(), &w0, 0.01, &SolverConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        b.write(dir.path(), &["test".into()], &serde_json::Value::Null).unwrap();
        let doc: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("branch.json")).unwrap()).unwrap();
        let s: BranchSummary = serde_json::from_value(doc["branch"].clone()).unwrap();
        assert_eq!(s.files.len(), b.len());
        let back = WavePair::read_csv(&dir.path().join(&s.files[1])).unwrap();
        assert!(back.nu.sub(&b.waves[1].nu).unwrap().sup_norm() < 1e-15);
    }
}
