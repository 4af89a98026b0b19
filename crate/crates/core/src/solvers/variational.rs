//! Minimisation of `E` on `{F = lambda}` by a relaxed, normalised
//! preconditioned gradient iteration.
//!
//! Each step maps `u` to `A^{-1} grad F(u)`, where `A` is the symbol matrix of
//! `E`, blends it with the current iterate and rescales to `F = lambda`. At a
//! fixed point `A u = K grad F(u)` with `K = 2E/(3 lambda)`, and `K u` solves
//! the stationary B-FD system.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functionals::{constraint_f, constraint_gradient, energy_e, symbol_matrix, Mu2Mode};
use crate::params::{Family, ModelParams};
use crate::solvers::{system_residual, SolverConfig};
use crate::spectral::{Grid, RealField, WavePair};

/// Residual above which a stalled minimisation is reported as a failure.
pub const STALL_RESIDUAL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Minimizer {
    /// Minimiser normalised to `F = lambda`.
    pub pair: WavePair,
    /// `K = 2E/(3 lambda)`.
    pub lagrange_k: f64,
    /// `K` by least squares from the first Lagrange equation.
    pub lagrange_k_lsq: f64,
    pub energy: f64,
    /// Sup-norm residual of the stationary system at `K pair`.
    pub residual: f64,
    pub iterations: usize,
    pub constraint: f64,
}

impl Minimizer {
    /// The solitary wave `K (xi, nu)`.
    pub fn solitary_wave(&self) -> WavePair {
        self.pair.scale(self.lagrange_k)
    }
}

struct BlockInverse {
    grid: Grid,
    /// Inverse symbol matrix entries `(A', B', C')` per frequency.
    inv: Vec<(f64, f64, f64)>,
}

impl BlockInverse {
    fn new(p: &ModelParams, omega: f64, grid: &Grid) -> Result<BlockInverse> {
        let mut inv = Vec::with_capacity(grid.n());
        for &k in grid.k().iter() {
            let (a, b, c) = symbol_matrix(p, omega, k);
            let det = a * c - b * b;
            if !(det > 1e-12 * (a * a + c * c)) {
                return Err(Error::Inadmissible(format!(
                    "symbol matrix of E is not positive definite at k = {k} (det = {det:e})"
                )));
            }
            inv.push((c / det, -b / det, a / det));
        }
        Ok(BlockInverse { grid: grid.clone(), inv })
    }

    fn apply(&self, w: &WavePair) -> WavePair {
        let (xs, ns) = (w.xi.spectrum(), w.nu.spectrum());
        let mut ox = vec![Complex64::new(0.0, 0.0); xs.len()];
        let mut on = ox.clone();
        for (j, &(a, b, c)) in self.inv.iter().enumerate() {
            ox[j] = xs[j] * a + ns[j] * b;
            on[j] = xs[j] * b + ns[j] * c;
        }
        WavePair {
            xi: RealField::from_spectrum(&self.grid, ox),
            nu: RealField::from_spectrum(&self.grid, on),
        }
    }
}

fn normalize(p: &ModelParams, w: &WavePair, lambda: f64) -> Result<WavePair> {
    let f = constraint_f(p, w)?;
    if !(f > 0.0) {
        return Err(Error::NonConvergence {
            what: "constrained minimisation (constraint left F > 0)",
            iterations: 0,
            residual: f,
        });
    }
    let mut out = w.scale((lambda / f).cbrt());
    out.symmetrize_even();
    Ok(out)
}

fn initial_guess(p: &ModelParams, omega: f64, grid: &Grid) -> WavePair {
    let g = p.gamma;
    let mut width = (p.mu * (1.0 / (g * g) - p.a)).sqrt().max(4.0 * grid.dx());
    if let Ok(s) = p.sigma() {
        width = width.max(1.0 / s);
    }
    let sign = if omega < 0.0 { -1.0 } else { 1.0 };
    let shape = |x: f64| 1.0 / (1.0 + (x / width).powi(2)).powi(2);
    WavePair {
        xi: RealField::from_fn(grid, shape),
        nu: RealField::from_fn(grid, |x| sign * shape(x)),
    }
}

/// Minimise `E` under `F = lambda` from the default guess.
pub fn constrained_minimize(
    p: &ModelParams,
    omega: f64,
    lambda: f64,
    grid: &Grid,
    mode: Mu2Mode,
    cfg: &SolverConfig,
) -> Result<Minimizer> {
    constrained_minimize_from(p, omega, lambda, &initial_guess(p, omega, grid), mode, cfg)
}

pub fn constrained_minimize_from(
    p: &ModelParams,
    omega: f64,
    lambda: f64,
    guess: &WavePair,
    mode: Mu2Mode,
    cfg: &SolverConfig,
) -> Result<Minimizer> {
    cfg.validate()?;
    if !(lambda > 0.0) {
        return Err(Error::Config(format!("lambda = {lambda} must be positive")));
    }
    let p = mode.params(p)?;
    let family = match mode {
        Mu2Mode::Infinite => Family::BfdInf,
        Mu2Mode::Finite => Family::BfdFinite,
    };
    let report = p.admissibility(omega)?;
    if !report.admissible {
        return Err(Error::Inadmissible(format!(
            "omega = {omega} with mu2 = {} is outside the admissible set",
            p.mu2
        )));
    }
    let inv = BlockInverse::new(&p, omega, guess.grid())?;
    let tau = cfg.gradient_step;
    let mut u = normalize(&p, guess, lambda)?;
    let mut it = 0;
    let (k, residual) = loop {
        let energy = energy_e(&p, omega, &u, mode)?;
        let k = 2.0 * energy / (3.0 * lambda);
        let residual = system_residual(family, &p, omega, &u.scale(k))?;
        if residual <= cfg.tol_residual {
            break (k, residual);
        }
        if it == cfg.max_iters {
            if residual > STALL_RESIDUAL {
                return Err(Error::NonConvergence {
                    what: "constrained minimisation",
                    iterations: it,
                    residual,
                });
            }
            break (k, residual);
        }
        let v = normalize(&p, &inv.apply(&constraint_gradient(&p, &u)?), lambda)?;
        let next = normalize(&p, &u.scale(1.0 - tau).axpy(tau, &v)?, lambda)?;
        let change = next.axpy(-1.0, &u)?.sup_norm();
        u = next;
        it += 1;
        if change <= 1e-15 * u.sup_norm() {
            let residual = system_residual(family, &p, omega, &u.scale(k))?;
            if residual > STALL_RESIDUAL {
                return Err(Error::NonConvergence {
                    what: "constrained minimisation (stalled)",
                    iterations: it,
                    residual,
                });
            }
            break (2.0 * energy_e(&p, omega, &u, mode)? / (3.0 * lambda), residual);
        }
    };
    let energy = energy_e(&p, omega, &u, mode)?;
    let lagrange_k_lsq = lsq_multiplier(&p, omega, &u)?;
    Ok(Minimizer {
        constraint: constraint_f(&p, &u)?,
        pair: u,
        lagrange_k: k,
        lagrange_k_lsq,
        energy,
        residual,
        iterations: it,
    })
}

/// Least-squares `K` in `(1-gamma) J_c xi - omega J_b nu = K r nu^2`.
fn lsq_multiplier(p: &ModelParams, omega: f64, u: &WavePair) -> Result<f64> {
    let g = u.grid();
    let jc = crate::spectral::symbol_j(p, crate::spectral::JKind::C, g);
    let jb = crate::spectral::symbol_j(p, crate::spectral::JKind::B, g);
    let lhs = jc.apply(&u.xi)?.scale(1.0 - p.gamma).axpy(-omega, &jb.apply(&u.nu)?)?;
    let rhs = u.nu.mul(&u.nu)?.scale(p.r());
    Ok(lhs.dot(&rhs)? / rhs.dot(&rhs)?)
}
