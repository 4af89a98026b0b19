//! Tail fits: algebraic plateau at infinite depth, exponential rate for ILW.

use interwave::decay::{fit_algebraic_tail, fit_exponential_tail, FitOptions};
use interwave::functionals::Mu2Mode;
use interwave::params::eta_roots;
use interwave::solvers::{assemble_bo_pair, continue_in_mu2, petviashvili_ground_state, solve_bfd_reduced, SolverConfig};
use interwave::{Depth, Grid, ModelParams};

fn main() -> interwave::Result<()> {
    let cfg = SolverConfig::default();
    let p1 = ModelParams::p1();
    let w = solve_bfd_reduced(&p1, 0.1, &Grid::new(200.0, 4096)?, Mu2Mode::Infinite, &cfg)?;
    let r = fit_algebraic_tail(&w.pair.nu, &FitOptions::default())?;
    println!("P1 nu: x^2 nu plateau = {:.6e}, flatness = {:?}", r.measured, r.max_deviation);

    let bo = ModelParams::ilw(0.5, 0.1, 0.1, Depth::Infinite, 2.0);
    let grid = Grid::new(40.0, 4096)?;
    let start = assemble_bo_pair(&bo, &petviashvili_ground_state(&bo, &grid, &cfg)?.nu0);
    let branch = continue_in_mu2(&bo, &start, 4.0, &[4.0], &cfg)?;
    let ilw = branch.waves.last().expect("branch end");
    let theta = bo.with_mu2(Depth::Finite(4.0)).theta().expect("theta");
    let predicted = eta_roots(theta, 1)[0] / 2.0;
    let r = fit_exponential_tail(&ilw.nu, &FitOptions::predicting(predicted))?;
    println!("ILW nu at mu2 = 4: rate = {:.6}, predicted = {predicted:.6}, r^2 = {:.8}", r.measured, r.r_squared);
    Ok(())
}
