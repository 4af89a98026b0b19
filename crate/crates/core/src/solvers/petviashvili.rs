//! Petviashvili iteration for `M nu = N(nu)` with a homogeneous or mixed
//! polynomial nonlinearity, and the BO ground state
//! `alpha |D| nu + nu/gamma - eta nu^3 = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::solvers::{check_nontrivial, SolverConfig};
use crate::spectral::{Grid, Multiplier, RealField, WavePair};

/// Stabilising power `q = p/(p-1)` for leading degree `p`.
pub fn default_exponent(degree: u32) -> f64 {
    let p = degree as f64;
    p / (p - 1.0)
}

#[derive(Clone, Debug)]
pub struct PetviashviliOutcome {
    pub nu: RealField,
    /// Stabilising factor `S = <M nu, nu> / <N(nu), nu>` at the last iterate.
    pub stabilizer: f64,
    pub iterations: usize,
    /// Sup-norm residual `|M nu - N(nu)|`.
    pub residual: f64,
}

/// Iterate `nu <- S^q M^{-1} N(nu)` from `guess` until the residual falls to
/// `cfg.tol_residual` and `|S - 1| <= cfg.tol_stabilizer`. Iterates are kept even.
pub fn petviashvili(
    m: &Multiplier,
    nonlinearity: impl Fn(&RealField) -> Result<RealField>,
    guess: &RealField,
    q: f64,
    cfg: &SolverConfig,
) -> Result<PetviashviliOutcome> {
    let (out, converged) = petviashvili_run(m, nonlinearity, guess, q, cfg)?;
    if converged {
        Ok(out)
    } else {
        Err(Error::NonConvergence {
            what: "Petviashvili iteration",
            iterations: out.iterations,
            residual: out.residual,
        })
    }
}

/// As [`petviashvili`], but hands back the last iterate when the cap is hit.
pub fn petviashvili_run(
    m: &Multiplier,
    nonlinearity: impl Fn(&RealField) -> Result<RealField>,
    guess: &RealField,
    q: f64,
    cfg: &SolverConfig,
) -> Result<(PetviashviliOutcome, bool)> {
    let mut nu = guess.clone();
    nu.symmetrize_even();
    let mut it = 0;
    loop {
        let mnu = m.apply(&nu)?;
        let nnu = nonlinearity(&nu)?;
        let res = mnu.sub(&nnu)?.sup_norm();
        let s = mnu.dot(&nu)? / nnu.dot(&nu)?;
        if !(s.is_finite() && s > 0.0 && res.is_finite()) {
            return Err(Error::NonConvergence {
                what: "Petviashvili iteration (stabilising factor left (0, inf))",
                iterations: it,
                residual: res,
            });
        }
        let converged = res <= cfg.tol_residual && (s - 1.0).abs() <= cfg.tol_stabilizer;
        if converged || it == cfg.max_iters {
            let out = PetviashviliOutcome {
                nu,
                stabilizer: s,
                iterations: it,
                residual: res,
            };
            return Ok((out, converged));
        }
        let mut next = m.invert(&nnu)?.scale(s.powf(q));
        next.symmetrize_even();
        nu = next;
        it += 1;
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub nu0: RealField,
    pub stabilizer: f64,
    pub iterations: usize,
    pub residual: f64,
    pub alpha: f64,
    pub eta: f64,
}

/// Coefficients `(alpha, eta)` of the ground-state equation.
pub fn ground_state_coefficients(p: &ModelParams) -> (f64, f64) {
    let g = p.gamma;
    let alpha = (p.beta - 1.0) / (g * g) * p.mu.sqrt();
    let eta = p.epsilon * p.epsilon / (2.0 * g * g * (1.0 - g));
    (alpha, eta)
}

/// Default even positive guess: a Lorentzian-squared bump of width `alpha gamma`
/// with amplitude chosen by a scan of the residual.
pub fn ground_state_guess(p: &ModelParams, grid: &Grid) -> Result<RealField> {
    let (alpha, eta) = ground_state_coefficients(p);
    let g = p.gamma;
    let w = (alpha * g).max(4.0 * grid.dx());
    let shape = RealField::from_fn(grid, |x| 1.0 / (1.0 + (x / w).powi(2)).powi(2));
    let a0 = (1.0 / (g * eta)).sqrt();
    let m = bo_operator(p, grid);
    let mut best = (f64::INFINITY, a0);
    for i in 0..=40 {
        let a = a0 * 10f64.powf(-1.0 + i as f64 / 20.0);
        let nu = shape.scale(a);
        let res = m.apply(&nu)?.axpy(-eta, &nu.map(|v| v * v * v))?.l2_norm() / a;
        if res < best.0 {
            best = (res, a);
        }
    }
    Ok(shape.scale(best.1))
}

/// `alpha |D| + 1/gamma`, the operator `B` of the BO system.
pub fn bo_operator(p: &ModelParams, grid: &Grid) -> Multiplier {
    crate::spectral::symbol_bo_ops(p, grid).1
}

pub fn petviashvili_ground_state(p: &ModelParams, grid: &Grid, cfg: &SolverConfig) -> Result<GroundState> {
    let guess = ground_state_guess(p, grid)?;
    petviashvili_ground_state_from(p, &guess, cfg)
}

pub fn petviashvili_ground_state_from(p: &ModelParams, guess: &RealField, cfg: &SolverConfig) -> Result<GroundState> {
    p.validate_ilw()?;
    cfg.validate()?;
    if guess.min() < 0.0 {
        return Err(Error::LossOfPositivity { min: guess.min() });
    }
    let (alpha, eta) = ground_state_coefficients(p);
    let m = bo_operator(p, guess.grid());
    let q = cfg.petviashvili_exponent.unwrap_or_else(|| default_exponent(3));
    let out = petviashvili(&m, |nu| Ok(nu.map(|v| eta * v * v * v)), guess, q, cfg)?;
    let min = out.nu.min();
    if min < -1e-10 * out.nu.sup_norm() {
        return Err(Error::LossOfPositivity { min });
    }
    check_nontrivial(p, &out.nu)?;
    Ok(GroundState {
        nu0: out.nu,
        stabilizer: out.stabilizer,
        iterations: out.iterations,
        residual: out.residual,
        alpha,
        eta,
    })
}

/// `(xi0, nu0)` with `xi0 = r nu0^2 / (1 - gamma)`.
pub fn assemble_bo_pair(p: &ModelParams, nu0: &RealField) -> WavePair {
    let s = p.r() / (1.0 - p.gamma);
    WavePair {
        xi: nu0.map(|v| s * v * v),
        nu: nu0.clone(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroundStateSummary {
    pub alpha: f64,
    pub eta: f64,
    pub stabilizer: f64,
    pub iterations: usize,
    pub residual: f64,
    pub amplitude: f64,
}

impl GroundState {
    pub fn summary(&self) -> GroundStateSummary {
        GroundStateSummary {
            alpha: self.alpha,
            eta: self.eta,
            stabilizer: self.stabilizer,
            iterations: self.iterations,
            residual: self.residual,
            amplitude: self.nu0.sup_norm(),
        }
    }
}
