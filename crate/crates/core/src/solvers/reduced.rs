//! B-FD solitary waves through the scalar equation for `nu`.
//!
//! Eliminating `xi = J_c^{-1}(omega J_b nu + r nu^2) / (1 - gamma)` from the
//! stationary system (with `J_d = J_b`) leaves
//!
//! ```text
//! [(1-gamma) L - omega^2 J_b^2 J_c^{-1}] nu
//!     = omega r [J_b J_c^{-1}(nu^2) + 2 nu J_c^{-1} J_b nu] + 2 r^2 nu J_c^{-1}(nu^2).
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::Mu2Mode;
use crate::params::{Family, ModelParams};
use crate::solvers::newton::newton_solve;
use crate::solvers::petviashvili::{default_exponent, petviashvili_run};
use crate::solvers::{check_nontrivial, NewtonReport, SolitarySystem, SolverConfig};
use crate::spectral::{symbol, symbol_j, Grid, JKind, Multiplier, RealField, WavePair};

#[derive(Clone, Debug)]
pub struct ReducedSolution {
    pub pair: WavePair,
    pub family: Family,
    pub omega: f64,
    /// Sup-norm residual of the full two-component system.
    pub residual: f64,
    pub petviashvili_iterations: usize,
    pub stabilizer: f64,
    pub newton: Option<NewtonReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReducedSummary {
    pub family: Family,
    pub omega: f64,
    pub residual: f64,
    pub petviashvili_iterations: usize,
    pub stabilizer: f64,
    pub newton_iterations: usize,
    pub amplitude_nu: f64,
    pub amplitude_xi: f64,
}

impl ReducedSolution {
    pub fn summary(&self) -> ReducedSummary {
        ReducedSummary {
            family: self.family,
            omega: self.omega,
            residual: self.residual,
            petviashvili_iterations: self.petviashvili_iterations,
            stabilizer: self.stabilizer,
            newton_iterations: self.newton.as_ref().map_or(0, |n| n.iterations),
            amplitude_nu: self.pair.nu.sup_norm(),
            amplitude_xi: self.pair.xi.sup_norm(),
        }
    }
}

/// Linear operator of the reduced equation.
pub fn reduced_operator(p: &ModelParams, omega: f64, grid: &Grid) -> Multiplier {
    let p = p.clone();
    Multiplier::new("M_reduced", grid, move |k| {
        let jb = symbol::j_b(&p, k);
        (1.0 - p.gamma) * symbol::l_hat(&p, k) - omega * omega * jb * jb / symbol::j_c(&p, k)
    })
}

/// Right-hand side of the reduced equation.
pub fn reduced_nonlinearity(p: &ModelParams, omega: f64, grid: &Grid) -> impl Fn(&RealField) -> Result<RealField> {
    let r = p.r();
    let jc = symbol_j(p, JKind::C, grid);
    let jb_over_jc = symbol_j(p, JKind::B, grid).over(&jc).expect("same grid");
    move |nu: &RealField| {
        let nu2 = nu.mul(nu)?;
        let inv_nu2 = jc.invert(&nu2)?;
        let mut out = inv_nu2.mul(nu)?.scale(2.0 * r * r);
        if omega != 0.0 {
            let a = jb_over_jc.apply(&nu2)?;
            let b = nu.mul(&jb_over_jc.apply(nu)?)?;
            out = out.axpy(omega * r, &a)?.axpy(2.0 * omega * r, &b)?;
        }
        Ok(out)
    }
}

/// `xi = J_c^{-1}(omega J_b nu + r nu^2) / (1 - gamma)`.
pub fn reconstruct_xi(p: &ModelParams, omega: f64, nu: &RealField) -> Result<RealField> {
    let g = nu.grid();
    let jc = symbol_j(p, JKind::C, g);
    let jb_nu = symbol_j(p, JKind::B, g).apply(nu)?;
    let rhs = jb_nu.scale(omega).axpy(p.r(), &nu.mul(nu)?)?;
    Ok(jc.invert(&rhs)?.scale(1.0 / (1.0 - p.gamma)))
}

fn guess(p: &ModelParams, omega: f64, grid: &Grid, m: &Multiplier, n: &dyn Fn(&RealField) -> Result<RealField>) -> Result<RealField> {
    let g = p.gamma;
    let width = (p.mu * (1.0 / (g * g) - p.a)).sqrt().max(4.0 * grid.dx());
    let width = match p.sigma() {
        Ok(s) => width.max(1.0 / s),
        Err(_) => width,
    };
    let sign = if omega < 0.0 { -1.0 } else { 1.0 };
    let shape = if p.mu2.is_infinite() {
        RealField::from_fn(grid, |x| sign / (1.0 + (x / width).powi(2)).powi(2))
    } else {
        RealField::from_fn(grid, |x| sign / (x / width).cosh().powi(2))
    };
    let a0 = ((1.0 - g) / (2.0 * p.r() * p.r() * g)).sqrt();
    let mut best = (f64::INFINITY, a0);
    for i in 0..=40 {
        let a = a0 * 10f64.powf(-1.0 + i as f64 / 20.0);
        let nu = shape.scale(a);
        let res = m.apply(&nu)?.sub(&n(&nu)?)?.l2_norm() / a;
        if res < best.0 {
            best = (res, a);
        }
    }
    Ok(shape.scale(best.1))
}

/// Solve the reduced equation by Petviashvili iteration, rebuild `xi`, and
/// polish the pair with Newton on the full system.
pub fn solve_bfd_reduced(p: &ModelParams, omega: f64, grid: &Grid, mode: Mu2Mode, cfg: &SolverConfig) -> Result<ReducedSolution> {
    cfg.validate()?;
    let p = mode.params(p)?;
    let family = match mode {
        Mu2Mode::Infinite => Family::BfdInf,
        Mu2Mode::Finite => Family::BfdFinite,
    };
    let report = p.admissibility(omega)?;
    if !report.admissible {
        return Err(Error::Inadmissible(format!(
            "omega = {omega} with mu2 = {} is outside the admissible set (speed bound {}, mu2 threshold {:?})",
            p.mu2, report.speed_bound, report.mu2_threshold
        )));
    }
    let m = reduced_operator(&p, omega, grid);
    if !(m.min() > 0.0) {
        return Err(Error::Inadmissible(format!("reduced operator has min symbol {}", m.min())));
    }
    let n = reduced_nonlinearity(&p, omega, grid);
    let nu0 = guess(&p, omega, grid, &m, &n)?;
    let q = cfg.petviashvili_exponent.unwrap_or_else(|| default_exponent(3));
    let pet_cfg = SolverConfig {
        tol_residual: cfg.tol_residual.max(1e-9),
        tol_stabilizer: 1e-9,
        ..cfg.clone()
    };
    // A stalled iteration still hands a good starting point to Newton.
    let (out, _) = petviashvili_run(&m, &n, &nu0, q, &pet_cfg)?;
    let (nu, iterations, stabilizer) = (out.nu, out.iterations, out.stabilizer);
    check_nontrivial(&p, &nu)?;
    let xi = reconstruct_xi(&p, omega, &nu)?;
    let pair = WavePair::new(xi, nu)?;
    let sys = SolitarySystem::new(family, &p, omega, grid)?;
    let (pair, newton) = if sys.residual_norm(&pair) > cfg.tol_residual {
        let (w, rep) = newton_solve(family, &p, omega, &pair, cfg)?;
        (w, Some(rep))
    } else {
        (pair, None)
    };
    let residual = sys.residual_norm(&pair);
    Ok(ReducedSolution {
        pair,
        family,
        omega,
        residual,
        petviashvili_iterations: iterations,
        stabilizer,
        newton,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{constraint_f, energy_e};
    use crate::params::Depth;

    #[test]
    fn infinite_depth_wave() {
        let p = ModelParams::p1();
        let g = Grid::new(40.0, 1024).unwrap();
        let s = solve_bfd_reduced(&p, 0.1, &g, Mu2Mode::Infinite, &SolverConfig::default()).unwrap();
        assert!(s.residual <= 1e-10, "{}", s.residual);
        assert!(s.pair.nu.values()[512] > 0.0);
        assert!(energy_e(&p, 0.1, &s.pair, Mu2Mode::Infinite).unwrap() > 0.0);
        assert!(constraint_f(&p, &s.pair).unwrap() != 0.0);
        assert!(s.pair.evenness_defect() < 1e-10);
    }

    #[test]
    fn finite_depth_wave() {
        let p = ModelParams::p1().with_mu2(Depth::Finite(4.0));
        let g = Grid::new(30.0, 512).unwrap();
        let s = solve_bfd_reduced(&p, 0.0, &g, Mu2Mode::Finite, &SolverConfig::default()).unwrap();
        assert!(s.residual <= 1e-10, "{}", s.residual);
    }

    #[test]
    fn inadmissible_rejected() {
        let p = ModelParams::p1();
        let g = Grid::new(30.0, 256).unwrap();
        let r = solve_bfd_reduced(&p, 0.2, &g, Mu2Mode::Infinite, &SolverConfig::default());
        assert!(matches!(r, Err(Error::Inadmissible(_))));
        let shallow = p.with_mu2(Depth::Finite(0.5));
        let r = solve_bfd_reduced(&shallow, 0.0, &g, Mu2Mode::Finite, &SolverConfig::default());
        assert!(matches!(r, Err(Error::Inadmissible(_))));
    }
}
