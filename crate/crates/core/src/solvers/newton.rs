//! Damped Newton–Krylov solver with right-preconditioned restarted GMRES.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Family, ModelParams};
use crate::solvers::{check_nontrivial, SolitarySystem, SolverConfig};
use crate::spectral::WavePair;

/// A square nonlinear system on flat vectors.
pub trait NonlinearProblem {
    fn dim(&self) -> usize;
    fn residual(&self, u: &[f64]) -> Vec<f64>;
    fn jacobian_apply(&self, u: &[f64], du: &[f64]) -> Vec<f64>;
    /// Approximate inverse of the Jacobian.
    fn precondition(&self, v: &[f64]) -> Vec<f64> {
        v.to_vec()
    }
    /// Projection onto the solution subspace, applied to iterates and Krylov vectors.
    fn project(&self, _u: &mut [f64]) {}
    /// Residual level set by round-off at `u`; a stalled line search below it counts as converged.
    fn roundoff_floor(&self, _u: &[f64]) -> f64 {
        0.0
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub relative_residual: f64,
    pub iterations: usize,
}

/// Solve `A x = b` with `A v = apply(v)` and right preconditioner `m`.
pub fn gmres(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    precond: impl Fn(&[f64]) -> Vec<f64>,
    project: impl Fn(&mut [f64]),
    b: &[f64],
    tol: f64,
    restart: usize,
    max_iters: usize,
) -> GmresOutcome {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return GmresOutcome {
            x,
            relative_residual: 0.0,
            iterations: 0,
        };
    }
    let mut total = 0;
    let mut rel = 1.0;
    while total < max_iters {
        let ax = apply(&x);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        project(&mut r);
        let beta = norm2(&r);
        rel = beta / bnorm;
        if rel <= tol {
            break;
        }
        let m = restart.min(max_iters - total);
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        v.push(r.iter().map(|ri| ri / beta).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut kdone = 0;
        for k in 0..m {
            let mut z = precond(&v[k]);
            project(&mut z);
            let mut w = apply(&z);
            project(&mut w);
            for i in 0..=k {
                h[i][k] = dot(&w, &v[i]);
                let hik = h[i][k];
                w.iter_mut().zip(&v[i]).for_each(|(wj, vj)| *wj -= hik * vj);
            }
            let hn = norm2(&w);
            h[k + 1][k] = hn;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let d = (h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]).sqrt();
            if d == 0.0 {
                kdone = k;
                break;
            }
            cs[k] = h[k][k] / d;
            sn[k] = h[k + 1][k] / d;
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            kdone = k + 1;
            total += 1;
            rel = g[k + 1].abs() / bnorm;
            if rel <= tol || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|wj| wj / hn).collect());
        }
        // Back substitution for the Krylov coefficients.
        let mut y = vec![0.0; kdone];
        for i in (0..kdone).rev() {
            let s: f64 = (i + 1..kdone).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        let mut update = vec![0.0; n];
        for (i, yi) in y.iter().enumerate() {
            update.iter_mut().zip(&v[i]).for_each(|(u, vi)| *u += yi * vi);
        }
        let mut dz = precond(&update);
        project(&mut dz);
        x.iter_mut().zip(&dz).for_each(|(xi, d)| *xi += d);
        if rel <= tol || kdone == 0 {
            break;
        }
    }
    GmresOutcome {
        x,
        relative_residual: rel,
        iterations: total,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Sup-norm residual before each step and after the last.
    pub residual_history: Vec<f64>,
    pub gmres_iterations: Vec<usize>,
    pub residual: f64,
}

/// Newton–Krylov iteration on a generic problem.
pub fn newton_krylov<P: NonlinearProblem>(prob: &P, u0: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, NewtonReport)> {
    let mut u = u0.to_vec();
    prob.project(&mut u);
    let mut r = prob.residual(&u);
    prob.project(&mut r);
    let mut res = sup(&r);
    let mut report = NewtonReport {
        iterations: 0,
        residual_history: vec![res],
        gmres_iterations: Vec::new(),
        residual: res,
    };
    while res > cfg.tol_residual {
        if !res.is_finite() {
            return Err(Error::NonConvergence {
                what: "Newton iteration (non-finite residual)",
                iterations: report.iterations,
                residual: res,
            });
        }
        if report.iterations >= cfg.max_newton {
            return Err(Error::NonConvergence {
                what: "Newton iteration",
                iterations: report.iterations,
                residual: res,
            });
        }
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let sol = gmres(
            |v| prob.jacobian_apply(&u, v),
            |v| prob.precondition(v),
            |v| prob.project(v),
            &neg,
            cfg.gmres_tol,
            cfg.gmres_restart,
            cfg.gmres_max_iters,
        );
        report.gmres_iterations.push(sol.iterations);
        if !(sol.relative_residual < 0.5) {
            return Err(Error::SingularJacobian(format!(
                "GMRES reached relative residual {:e} after {} iterations",
                sol.relative_residual, sol.iterations
            )));
        }
        let mut lambda = cfg.newton_damping;
        let accepted = loop {
            let trial: Vec<f64> = u.iter().zip(&sol.x).map(|(a, d)| a + lambda * d).collect();
            let mut rt = prob.residual(&trial);
            prob.project(&mut rt);
            let rt_norm = sup(&rt);
            if rt_norm.is_finite() && rt_norm < (1.0 - 1e-4 * lambda) * res {
                break Some((trial, rt, rt_norm));
            }
            lambda *= 0.5;
            if lambda < 1e-4 {
                break None;
            }
        };
        let Some((trial, rt, rt_norm)) = accepted else {
            if res <= prob.roundoff_floor(&u) {
                break;
            }
            return Err(Error::NonConvergence {
                what: "Newton line search",
                iterations: report.iterations,
                residual: res,
            });
        };
        u = trial;
        r = rt;
        res = rt_norm;
        report.iterations += 1;
        report.residual_history.push(res);
    }
    report.residual = res;
    Ok((u, report))
}

/// Solve the stationary system of `family` at `speed` from `guess`, in the even subspace.
pub fn newton_solve(
    family: Family,
    p: &ModelParams,
    speed: f64,
    guess: &WavePair,
    cfg: &SolverConfig,
) -> Result<(WavePair, NewtonReport)> {
    cfg.validate()?;
    let sys = SolitarySystem::new(family, p, speed, guess.grid())?;
    let (u, report) = newton_krylov(&sys, &guess.to_flat(), cfg)?;
    let mut w = WavePair::from_flat(guess.grid(), &u);
    w.symmetrize_even();
    check_nontrivial(p, &w.nu)?;
    Ok((w, report))
}
