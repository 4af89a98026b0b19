//! BO wave continued in the speed, then in the depth through fixed stations.

use interwave::params::Family;
use interwave::solvers::{assemble_bo_pair, continue_in_c, continue_in_mu2, petviashvili_ground_state, SolverConfig};
use interwave::{Depth, Grid, ModelParams};

fn main() -> interwave::Result<()> {
    let cfg = SolverConfig::default();
    let p = ModelParams::ilw(0.5, 0.1, 0.1, Depth::Infinite, 2.0);
    let grid = Grid::new(200.0, 4096)?;
    let start = assemble_bo_pair(&p, &petviashvili_ground_state(&p, &grid, &cfg)?.nu0);

    let speed = continue_in_c(Family::Bo, &p, &start, 0.05, &cfg)?;
    for (c, r) in speed.parameter_values.iter().zip(&speed.residuals) {
        println!("c = {c:+.4}  residual = {r:.2e}");
    }

    let depth = continue_in_mu2(&p, &start, 25.0, &[400.0, 100.0, 25.0], &cfg)?;
    for (i, w) in depth.waves.iter().enumerate() {
        println!("mu2 = {:?}  sup|nu| = {:.6}  residual = {:.2e}", depth.mu2_at(i), w.nu.sup_norm(), depth.residuals[i]);
    }
    Ok(())
}
