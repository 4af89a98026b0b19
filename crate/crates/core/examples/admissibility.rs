//! Speed window, depth threshold and per-frequency positivity of `E` for P1.

use interwave::functionals::{quadratic_form_check, Mu2Mode};
use interwave::{Depth, Grid, ModelParams};

fn main() -> interwave::Result<()> {
    let p = ModelParams::p1();
    let bound = p.speed_window()?;
    println!("speed bound (1-gamma) min{{1, |c|/b}} = {bound:.6}");
    let grid = Grid::new(60.0, 2048)?;
    for omega in [0.0, 0.1, 0.16, 1.05 * bound] {
        let r = p.admissibility(omega)?;
        let q = quadratic_form_check(&p, omega, &grid, Mu2Mode::Infinite)?;
        println!(
            "omega = {omega:.4}: admissible = {}, f_min = {:?}, mu2 threshold = {:?}, min eigen = {:.3e}, split min = {:.3e}",
            r.admissible, r.f_min, r.mu2_threshold, q.global_min, q.split_global_min
        );
    }
    let th = p.mu2_threshold(0.1)?;
    for mu2 in [0.5 * th, 2.0 * th] {
        let r = p.with_mu2(Depth::Finite(mu2)).admissibility(0.1)?;
        println!("mu2 = {mu2:.4} at omega = 0.1: admissible = {}", r.admissible);
    }
    Ok(())
}
