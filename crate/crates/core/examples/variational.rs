//! Constrained minimiser of `E` on `{F = lambda}` and its Lagrange multiplier.

use interwave::functionals::Mu2Mode;
use interwave::solvers::{constrained_minimize, solve_bfd_reduced, SolverConfig};
use interwave::{Grid, ModelParams};

fn main() -> interwave::Result<()> {
    let p = ModelParams::p1();
    let grid = Grid::new(40.0, 1024)?;
    let cfg = SolverConfig::default();
    for lambda in [0.5, 1.0, 2.0] {
        let m = constrained_minimize(&p, 0.1, lambda, &grid, Mu2Mode::Infinite, &cfg)?;
        println!(
            "lambda = {lambda}: E = {:.6e}, K = {:.6e}, K (lsq) = {:.6e}, residual = {:.2e}, iterations = {}",
            m.energy, m.lagrange_k, m.lagrange_k_lsq, m.residual, m.iterations
        );
    }
    let m = constrained_minimize(&p, 0.1, 1.0, &grid, Mu2Mode::Infinite, &cfg)?;
    let red = solve_bfd_reduced(&p, 0.1, &grid, Mu2Mode::Infinite, &cfg)?;
    let diff = m.solitary_wave().nu.sub(&red.pair.nu)?.sup_norm() / red.pair.nu.sup_norm();
    println!("relative difference from the reduced solver: {diff:.2e}");
    Ok(())
}
