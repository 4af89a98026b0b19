//! Solitary-wave solvers: Petviashvili iteration, Newton–Krylov, continuation
//! in the speed and in the depth, and constrained minimisation.

pub mod continuation;
pub mod newton;
pub mod petviashvili;
pub mod reduced;
pub mod system;
pub mod variational;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Family, ModelParams};
use crate::spectral::{RealField, WavePair};

pub use continuation::{continue_in_c, continue_in_mu2, BranchParameter, SolitaryBranch};
pub use newton::{newton_solve, NewtonReport};
pub use petviashvili::{assemble_bo_pair, petviashvili_ground_state, GroundState};
pub use reduced::{solve_bfd_reduced, ReducedSolution};
pub use system::SolitarySystem;
pub use variational::{constrained_minimize, Minimizer};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Sup-norm residual at which a solve counts as converged.
    pub tol_residual: f64,
    /// Iteration cap for fixed-point and gradient iterations.
    pub max_iters: usize,
    /// Petviashvili power `q`; `None` picks `p/(p-1)` from the leading degree `p`.
    pub petviashvili_exponent: Option<f64>,
    /// Target `|S - 1|` at termination of a Petviashvili iteration.
    pub tol_stabilizer: f64,
    /// Initial Newton step length.
    pub newton_damping: f64,
    pub max_newton: usize,
    pub gmres_restart: usize,
    pub gmres_max_iters: usize,
    /// Relative GMRES tolerance used for each Newton correction.
    pub gmres_tol: f64,
    /// Initial continuation step in `c` or in `1/sqrt(mu2)`.
    pub continuation_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Relaxation of the normalised gradient flow.
    pub gradient_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_residual: 1e-11,
            max_iters: 5000,
            petviashvili_exponent: None,
            tol_stabilizer: 1e-13,
            newton_damping: 1.0,
            max_newton: 30,
            gmres_restart: 80,
            gmres_max_iters: 800,
            gmres_tol: 1e-12,
            continuation_step: 0.01,
            min_step: 1e-4,
            max_step: 0.05,
            gradient_step: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.tol_residual > 0.0) {
            bad.push(format!("tol_residual = {} must be positive", self.tol_residual));
        }
        if self.max_iters < 1 || self.max_newton < 1 || self.gmres_restart < 1 {
            bad.push("iteration caps must be at least 1".to_string());
        }
        if let Some(q) = self.petviashvili_exponent {
            if !(q > 1.0 && q < 3.0) {
                bad.push(format!("petviashvili_exponent = {q} must lie in (1, 3)"));
            }
        }
        if !(self.newton_damping > 0.0 && self.newton_damping <= 1.0) {
            bad.push(format!("newton_damping = {} must lie in (0, 1]", self.newton_damping));
        }
        if !(self.min_step > 0.0 && self.min_step <= self.continuation_step && self.continuation_step <= self.max_step) {
            bad.push("need 0 < min_step <= continuation_step <= max_step".to_string());
        }
        if !(self.gradient_step > 0.0 && self.gradient_step <= 1.0) {
            bad.push(format!("gradient_step = {} must lie in (0, 1]", self.gradient_step));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad.join("; ")))
        }
    }
}

/// Amplitude below which a computed wave counts as the trivial solution:
/// `1e-3 / sqrt(eta gamma)` with `eta` the effective cubic coefficient.
pub fn nontrivial_threshold(p: &ModelParams) -> f64 {
    let g = p.gamma;
    let eta = p.epsilon * p.epsilon / (2.0 * g * g * (1.0 - g));
    1e-3 / (eta * g).sqrt()
}

pub(crate) fn check_nontrivial(p: &ModelParams, nu: &RealField) -> Result<()> {
    let norm = nu.sup_norm();
    let threshold = nontrivial_threshold(p);
    if norm < threshold {
        Err(Error::TrivialSolution { norm, threshold })
    } else {
        Ok(())
    }
}

/// Residual of `family`'s stationary system at `speed`, in the sup norm.
pub fn system_residual(family: Family, p: &ModelParams, speed: f64, w: &WavePair) -> Result<f64> {
    let sys = SolitarySystem::new(family, p, speed, w.grid())?;
    Ok(sys.residual_norm(w))
}
