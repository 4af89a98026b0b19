//! The stationary two-component systems in a common form
//!
//! ```text
//! R1 = A11 xi + A12 nu - 2 r xi nu
//! R2 = A21 xi + A22 nu - r nu^2
//! ```
//!
//! with per-frequency symbols:
//!
//! | family | A11        | A12 | A21            | A22        |
//! |--------|------------|-----|----------------|------------|
//! | B-FD   | `-w J_b`   | `L` | `(1-g) J_c`    | `-w J_d`   |
//! | ILW    | `-c W`     | `Z` | `1-g`          | `-c`       |
//! | BO     | `-c D`     | `B` | `1-g`          | `-c`       |

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{Depth, Family, ModelParams};
use crate::solvers::newton::NonlinearProblem;
use crate::spectral::{symbol, Grid, RealField, WavePair};

/// Multiple of `eps * (max symbol * sup|u| + nonlinear scale)` taken as the round-off floor.
const ROUNDOFF_FACTOR: f64 = 16.0;

#[derive(Clone, Debug)]
pub struct SolitarySystem {
    family: Family,
    params: ModelParams,
    speed: f64,
    grid: Grid,
    a11: Vec<f64>,
    a12: Vec<f64>,
    a21: Vec<f64>,
    a22: Vec<f64>,
}

impl SolitarySystem {
    /// Build the system. The BO family always uses infinite depth; the ILW
    /// family at infinite depth coincides with BO.
    pub fn new(family: Family, p: &ModelParams, speed: f64, grid: &Grid) -> Result<SolitarySystem> {
        let params = match family {
            Family::BfdInf | Family::Bo => p.with_mu2(Depth::Infinite),
            Family::BfdFinite => {
                if p.mu2.is_infinite() {
                    return Err(Error::Config("bfd_finite needs a finite mu2".into()));
                }
                p.clone()
            }
            Family::Ilw => p.clone(),
        };
        let k = grid.k();
        let n = k.len();
        let (mut a11, mut a12, mut a21, mut a22) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let g = params.gamma;
        for (j, &kk) in k.iter().enumerate() {
            let (x11, x12, x21, x22) = if family.is_bfd() {
                (
                    -speed * symbol::j_b(&params, kk),
                    symbol::l_hat(&params, kk),
                    (1.0 - g) * symbol::j_c(&params, kk),
                    -speed * symbol::j_d(&params, kk),
                )
            } else {
                (
                    -speed * symbol::ilw_w(&params, kk),
                    symbol::ilw_z(&params, kk),
                    1.0 - g,
                    -speed,
                )
            };
            a11[j] = x11;
            a12[j] = x12;
            a21[j] = x21;
            a22[j] = x22;
        }
        Ok(SolitarySystem {
            family,
            params,
            speed,
            grid: grid.clone(),
            a11,
            a12,
            a21,
            a22,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Determinant of the linear symbol block per frequency.
    pub fn linear_determinant(&self) -> Vec<f64> {
        (0..self.a11.len())
            .map(|j| self.a11[j] * self.a22[j] - self.a12[j] * self.a21[j])
            .collect()
    }

    fn linear(&self, xi: &[f64], nu: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (xs, ns) = (self.grid.fft(xi), self.grid.fft(nu));
        let mut o1 = vec![Complex64::new(0.0, 0.0); xs.len()];
        let mut o2 = o1.clone();
        for j in 0..xs.len() {
            o1[j] = xs[j] * self.a11[j] + ns[j] * self.a12[j];
            o2[j] = xs[j] * self.a21[j] + ns[j] * self.a22[j];
        }
        (self.grid.ifft(o1), self.grid.ifft(o2))
    }

    fn residual_flat(&self, xi: &[f64], nu: &[f64]) -> Vec<f64> {
        let r = self.params.r();
        let (mut l1, l2) = self.linear(xi, nu);
        let n = xi.len();
        l1.reserve(n);
        for j in 0..n {
            l1[j] -= 2.0 * r * xi[j] * nu[j];
        }
        l1.extend(l2.iter().zip(nu).map(|(a, v)| a - r * v * v));
        l1
    }

    pub fn residual(&self, w: &WavePair) -> WavePair {
        WavePair::from_flat(&self.grid, &self.residual_flat(w.xi.values(), w.nu.values()))
    }

    pub fn residual_norm(&self, w: &WavePair) -> f64 {
        self.residual_flat(w.xi.values(), w.nu.values())
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Recover `xi` from `nu` through the second equation.
    pub fn xi_from_nu(&self, nu: &RealField) -> Result<RealField> {
        let r = self.params.r();
        let nu2 = nu.mul(nu)?;
        let mut rhs = self.grid.fft(nu.values());
        let s2 = nu2.spectrum();
        for j in 0..rhs.len() {
            rhs[j] = (s2[j] * r - rhs[j] * self.a22[j]) / self.a21[j];
        }
        Ok(RealField::from_spectrum(&self.grid, rhs))
    }
}

fn split(u: &[f64]) -> (&[f64], &[f64]) {
    u.split_at(u.len() / 2)
}

impl NonlinearProblem for SolitarySystem {
    fn dim(&self) -> usize {
        2 * self.grid.n()
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let (xi, nu) = split(u);
        self.residual_flat(xi, nu)
    }

    fn jacobian_apply(&self, u: &[f64], du: &[f64]) -> Vec<f64> {
        let r = self.params.r();
        let (xi, nu) = split(u);
        let (dxi, dnu) = split(du);
        let (mut l1, l2) = self.linear(dxi, dnu);
        let n = xi.len();
        for j in 0..n {
            l1[j] -= 2.0 * r * (nu[j] * dxi[j] + xi[j] * dnu[j]);
        }
        l1.extend((0..n).map(|j| l2[j] - 2.0 * r * nu[j] * dnu[j]));
        l1
    }

    fn roundoff_floor(&self, u: &[f64]) -> f64 {
        let m = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let sym = (0..self.a11.len())
            .map(|j| self.a11[j].abs() + self.a12[j].abs() + self.a21[j].abs() + self.a22[j].abs())
            .fold(0.0, f64::max);
        ROUNDOFF_FACTOR * f64::EPSILON * (sym * m + 2.0 * self.params.r() * m * m)
    }

    fn precondition(&self, v: &[f64]) -> Vec<f64> {
        let (a, b) = split(v);
        let (sa, sb) = (self.grid.fft(a), self.grid.fft(b));
        let mut o1 = vec![Complex64::new(0.0, 0.0); sa.len()];
        let mut o2 = o1.clone();
        for j in 0..sa.len() {
            let det = self.a11[j] * self.a22[j] - self.a12[j] * self.a21[j];
            if det == 0.0 {
                o1[j] = sa[j];
                o2[j] = sb[j];
                continue;
            }
            o1[j] = (sa[j] * self.a22[j] - sb[j] * self.a12[j]) / det;
            o2[j] = (sb[j] * self.a11[j] - sa[j] * self.a21[j]) / det;
        }
        let mut out = self.grid.ifft(o1);
        out.extend(self.grid.ifft(o2));
        out
    }

    fn project(&self, u: &mut [f64]) {
        let n = self.grid.n();
        for half in u.chunks_mut(n) {
            for j in 1..n / 2 {
                let m = 0.5 * (half[j] + half[n - j]);
                half[j] = m;
                half[n - j] = m;
            }
        }
    }
}
