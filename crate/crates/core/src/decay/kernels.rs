//! Closed-form kernels and their Fourier symbols.
//!
//! Transforms are unitary, `f(x) = (2 pi)^{-1/2} int m(y) e^{ixy} dy`, except for
//! `K1 = pi e^{-sigma|x|}`, which is the plain inverse `int m(y) e^{ixy} dy` of
//! `sigma / (sigma^2 + y^2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::decay::quadrature::integrate;
use crate::error::{Error, Result};
use crate::params::{eta_roots, ModelParams};
use crate::spectral::{symbol, Grid, Multiplier, RealField};

/// Absolute tolerance of the Laplace-type integrals.
pub const QUAD_TOL: f64 = 1e-12;
/// The integrals are cut at `y = Y` with `e^{-|x| Y} = e^{-LAPLACE_CUT}`.
const LAPLACE_CUT: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `(2 pi)^{-1/2} int m(y) e^{ixy} dy`.
    Unitary,
    /// `int m(y) e^{ixy} dy`.
    Plain,
}

fn refuse_origin(x: f64, name: &str) -> Result<()> {
    if x == 0.0 || !x.is_finite() {
        Err(Error::NotApplicable(format!("{name} is not evaluated at x = {x}")))
    } else {
        Ok(())
    }
}

fn laplace(f: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    let ax = x.abs();
    Ok(integrate(|y| y * (-ax * y).exp() * f(y), 0.0, LAPLACE_CUT / ax, QUAD_TOL)?.value)
}

/// Constants `(ell, c_K)` after checking `4 c_K - ell^2 > 0`.
fn k_constants(p: &ModelParams) -> Result<(f64, f64)> {
    let (_, ell, c) = p.kernel_constants();
    if !p.check_kernel_discriminant() {
        return Err(Error::NotApplicable(format!(
            "kernel discriminant 4c - ell^2 = {} is not positive",
            p.kernel_discriminant()
        )));
    }
    Ok((ell, c))
}

/// `K(x)`, the unitary inverse of `1 / (y^2 - ell|y| + c_K)`.
pub fn kernel_k(p: &ModelParams, x: f64) -> Result<f64> {
    refuse_origin(x, "K")?;
    let (ell, c) = k_constants(p)?;
    let s = (4.0 * c - ell * ell).sqrt();
    let i = laplace(|y| 1.0 / ((c - y * y).powi(2) + ell * ell * y * y), x)?;
    let sq = (2.0 * PI).sqrt();
    Ok(-2.0 * ell / sq * i + 2.0 * sq / s * (-0.5 * s * x.abs()).exp() * (0.5 * ell * x).cos())
}

pub fn k_symbol(p: &ModelParams, grid: &Grid) -> Result<Multiplier> {
    let (ell, c) = k_constants(p)?;
    Ok(Multiplier::new("K", grid, move |y| 1.0 / (y * y - ell * y + c)))
}

/// `K1(x) = pi e^{-sigma|x|}`.
pub fn kernel_k1(sigma: f64, x: f64) -> f64 {
    PI * (-sigma * x.abs()).exp()
}

pub fn k1_symbol(sigma: f64, grid: &Grid) -> Multiplier {
    Multiplier::new("K1", grid, move |y| sigma / (sigma * sigma + y * y))
}

/// `alpha = gamma / ((beta - 1) sqrt(mu))`.
pub fn k2_alpha(p: &ModelParams) -> f64 {
    p.gamma / ((p.beta - 1.0) * p.mu.sqrt())
}

/// `K2(x)`, the unitary inverse of `1 / (|y| + alpha)`.
pub fn kernel_k2(p: &ModelParams, x: f64) -> Result<f64> {
    refuse_origin(x, "K2")?;
    let a = k2_alpha(p);
    Ok((2.0 / PI).sqrt() * laplace(|y| 1.0 / (a * a + y * y), x)?)
}

pub fn k2_symbol(p: &ModelParams, grid: &Grid) -> Multiplier {
    let a = k2_alpha(p);
    Multiplier::new("K2", grid, move |y| 1.0 / (y + a))
}

/// Partial sum of the `K3` series with its truncation bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub truncation_bound: f64,
    pub terms: usize,
}

fn k3_theta(p: &ModelParams) -> Result<(f64, f64)> {
    let m2 = p
        .mu2
        .finite()
        .ok_or_else(|| Error::NotApplicable("K3 needs a finite mu2".into()))?;
    let theta = p.theta().expect("finite depth");
    Ok((theta, m2.sqrt()))
}

/// `K3(x) = theta / sqrt(mu2) h_theta(x / sqrt(mu2))` summed over `n_terms` poles.
/// Fails with [`Error::Truncation`] when the tail bound exceeds `tol`.
pub fn kernel_k3_series(p: &ModelParams, x: f64, n_terms: usize, tol: f64) -> Result<SeriesValue> {
    refuse_origin(x, "K3")?;
    let (theta, s2) = k3_theta(p)?;
    let u = x.abs() / s2;
    let etas = eta_roots(theta, n_terms + 1);
    let pre = (2.0 * PI).sqrt() * theta / s2;
    let term = |e: f64| {
        let t = e.tan();
        pre * t / (e * t - theta - 1.0) * (-e * u).exp()
    };
    let value = etas[..n_terms].iter().map(|&e| term(e)).sum();
    // Roots are at least pi/2 apart and the coefficients decrease once eta^2 > theta^2 + theta.
    let truncation_bound = term(etas[n_terms]).abs() / (1.0 - (-0.5 * PI * u).exp());
    if truncation_bound > tol {
        return Err(Error::Truncation {
            achieved: truncation_bound,
            requested: tol,
        });
    }
    Ok(SeriesValue {
        value,
        truncation_bound,
        terms: n_terms,
    })
}

/// Smallest number of terms that meets `tol`, capped at `max_terms`.
pub fn kernel_k3(p: &ModelParams, x: f64, tol: f64, max_terms: usize) -> Result<SeriesValue> {
    let mut n = 8;
    loop {
        match kernel_k3_series(p, x, n, tol) {
            Err(Error::Truncation { .. }) if n < max_terms => n = (2 * n).min(max_terms),
            other => return other,
        }
    }
}

pub fn k3_symbol(p: &ModelParams, grid: &Grid) -> Result<Multiplier> {
    let m2 = k3_theta(p)?.1.powi(2);
    let p = p.clone();
    let c = (p.beta - 1.0) / p.gamma * p.mu.sqrt();
    Ok(Multiplier::new("K3", grid, move |y| {
        1.0 / (1.0 + c * symbol::kcoth(y, crate::params::Depth::Finite(m2)))
    }))
}

/// Inverse transform of a tabulated kernel symbol, sampled on the grid.
pub fn kernel_fft_oracle(m: &Multiplier, norm: Normalization) -> Result<RealField> {
    let grid = m.grid();
    let min = m.min();
    if !(min > 0.0) {
        return Err(Error::SingularOperator {
            name: m.name().to_string(),
            min_abs: min,
        });
    }
    let n = grid.n();
    let dk = PI / grid.half_length();
    let scale = match norm {
        Norm::Unitary => dk * n as f64 / (2.0 * PI).sqrt(),
        Norm::Plain => dk * n as f64,
    };
    // x_0 = -L turns e^{i k_m x_j} into (-1)^m e^{2 pi i m j / N}.
    let spec = m
        .table()
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            num_complex::Complex64::new(sign * v * scale, 0.0)
        })
        .collect();
    RealField::new(grid, grid.ifft(spec))
}

use Normalization as Norm;

/// Evaluate `f` at every `x` in parallel.
pub fn sample(xs: &[f64], f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    xs.par_iter().map(|&x| f(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Depth;

    fn bo() -> ModelParams {
        ModelParams::ilw(0.5, 0.1, 0.1, Depth::Infinite, 2.0)
    }

    fn at(field: &RealField, x: f64) -> f64 {
        field.values()[field.grid().index_of(x).unwrap()]
    }

    #[test]
    fn k_reference_values_and_parity() {
        let p = ModelParams::p1();
        for (x, want) in [(1.0, 0.190412), (2.0, -0.0517148), (5.0, -0.0104400)] {
            let v = kernel_k(&p, x).unwrap();
            assert!((v - want).abs() < 2e-6, "K({x}) = {v}");
            assert_eq!(v, kernel_k(&p, -x).unwrap());
        }
        assert!(kernel_k(&p, 0.0).is_err());
    }

    #[test]
    fn k_plateau() {
        let p = ModelParams::p1();
        let plateau = p.decay_rates(1).algebraic_plateau_k;
        for x in [60.0, 80.0, 100.0] {
            let v = x * x * kernel_k(&p, x).unwrap();
            assert!((v / plateau - 1.0).abs() < 0.03, "{x}: {v}");
        }
    }

    #[test]
    fn k1_identities() {
        assert_eq!(kernel_k1(2.0, 0.0), PI);
        assert!((kernel_k1(2.0, 0.5) / kernel_k1(2.0, 0.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn k2_positive_with_plateau() {
        let a = k2_alpha(&bo());
        assert!((a - 1.5811).abs() < 1e-4);
        let target = (2.0 / PI).sqrt() / (a * a);
        assert!((target - 0.3192).abs() < 1e-4);
        for x in [40.0, 60.0, 80.0] {
            let v = kernel_k2(&bo(), x).unwrap();
            assert!(v > 0.0);
            assert!((x * x * v / target - 1.0).abs() < 0.03);
        }
    }

    #[test]
    fn k3_series_reference_values() {
        let p = bo().with_mu2(Depth::Finite(4.0));
        for (x, want) in [(1.0, 0.192351), (2.0, 0.0455080), (4.0, 0.00360239)] {
            let v = kernel_k3(&p, x, 1e-12, 4096).unwrap();
            assert!((v.value - want).abs() < 2e-6, "K3({x}) = {}", v.value);
            assert!(v.truncation_bound <= 1e-12);
        }
        assert!(matches!(kernel_k3_series(&p, 0.01, 2, 1e-12), Err(Error::Truncation { .. })));
    }

    #[test]
    fn fft_oracle_matches_closed_forms() {
        let g = Grid::new(1024.0, 1 << 21).unwrap();
        let p = ModelParams::p1();
        let k = kernel_fft_oracle(&k_symbol(&p, &g).unwrap(), Normalization::Unitary).unwrap();
        for x in [1.0, 2.0, 5.0] {
            assert!((at(&k, x) - kernel_k(&p, x).unwrap()).abs() < 1e-6);
        }
        let k2 = kernel_fft_oracle(&k2_symbol(&bo(), &g), Normalization::Unitary).unwrap();
        for x in [1.0, 5.0, 10.0] {
            assert!((at(&k2, x) - kernel_k2(&bo(), x).unwrap()).abs() < 1e-6);
        }
        let k1 = kernel_fft_oracle(&k1_symbol(3.0, &g), Normalization::Plain).unwrap();
        for x in [0.5, 1.0, 2.0] {
            let e = (at(&k1, x) - kernel_k1(3.0, x)).abs();
            assert!(e < 1e-8);
        }
    }

    #[test]
    fn oracle_is_even_and_rejects_sign_change() {
        let g = Grid::new(20.0, 256).unwrap();
        let f = kernel_fft_oracle(&k1_symbol(1.0, &g), Normalization::Plain).unwrap();
        assert!(f.evenness_defect() < 1e-15);
        let bad = Multiplier::new("bad", &g, |y| 1.0 - y);
        assert!(kernel_fft_oracle(&bad, Normalization::Unitary).is_err());
    }
}
