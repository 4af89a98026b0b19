//! P1 flow of a small bump: Hamiltonian drift, a-priori bound, global criterion.

use interwave::evolution::{check_global_criterion, EvolutionConfig, Evolver, Integrator};
use interwave::params::Family;
use interwave::{Grid, ModelParams, RealField, WavePair};

fn main() -> interwave::Result<()> {
    let p = ModelParams::p1();
    let grid = Grid::new(40.0, 512)?;
    let bump = |x: f64| 0.1 * (-(x / 2.0).powi(2)).exp();
    let init = WavePair::new(RealField::from_fn(&grid, bump), RealField::from_fn(&grid, |x| 0.5 * (x / 2.0) * bump(x)))?;
    println!("{:?}", check_global_criterion(&p, &init)?);
    let ev = Evolver::new(Family::BfdInf, &p, &grid)?;
    let cfg = EvolutionConfig {
        integrator: Integrator::Etdrk4,
        t_final: 50.0,
        dt: Some(0.02),
        monitor_every: 500,
        ..EvolutionConfig::default()
    };
    let traj = ev.run(&init, &cfg)?;
    for m in &traj.summary.monitors {
        println!("t = {:6.2}  H drift = {:.2e}  sup|zeta| = {:.5}", m.t, m.h_drift.unwrap_or(f64::NAN), m.sup_zeta);
    }
    println!("max H drift = {:.2e}", traj.summary.max_h_drift.unwrap_or(f64::NAN));
    Ok(())
}
