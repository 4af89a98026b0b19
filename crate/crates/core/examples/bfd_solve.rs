//! Infinite- and finite-depth B-FD waves of P1 from the reduced equation.

use interwave::functionals::{energy_e, hamiltonian_h, Mu2Mode};
use interwave::solvers::{solve_bfd_reduced, SolverConfig};
use interwave::{Depth, Grid, ModelParams};

fn main() -> interwave::Result<()> {
    let cfg = SolverConfig::default();
    let p = ModelParams::p1();
    let inf = solve_bfd_reduced(&p, 0.1, &Grid::new(200.0, 4096)?, Mu2Mode::Infinite, &cfg)?;
    println!("infinite depth: {:?}", inf.summary());
    println!("E = {:.6e}, H = {:.6e}", energy_e(&p, 0.1, &inf.pair, Mu2Mode::Infinite)?, hamiltonian_h(&p, &inf.pair)?);

    let pf = p.with_mu2(Depth::Finite(4.0));
    let fin = solve_bfd_reduced(&pf, 0.1, &Grid::new(30.0, 1024)?, Mu2Mode::Finite, &cfg)?;
    println!("mu2 = 4: {:?}", fin.summary());
    Ok(())
}
