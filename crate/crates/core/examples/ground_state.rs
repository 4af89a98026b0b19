//! BO ground state by Petviashvili iteration and the assembled pair.

use interwave::params::Family;
use interwave::solvers::{assemble_bo_pair, petviashvili_ground_state, system_residual, SolverConfig};
use interwave::{Grid, ModelParams};

fn main() -> interwave::Result<()> {
    let p = ModelParams::ilw(0.5, 0.1, 0.1, interwave::Depth::Infinite, 2.0);
    let grid = Grid::new(200.0, 4096)?;
    let gs = petviashvili_ground_state(&p, &grid, &SolverConfig::default())?;
    println!("{:#?}", gs.summary());
    let pair = assemble_bo_pair(&p, &gs.nu0);
    println!("system residual = {:.3e}", system_residual(Family::Bo, &p, 0.0, &pair)?);
    Ok(())
}
