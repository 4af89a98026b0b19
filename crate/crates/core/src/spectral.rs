//! Periodic pseudo-spectral discretisation: grids, transforms and the
//! Fourier multipliers of the three model families.
//!
//! The grid covers `[-L, L)` with `x_j = -L + j dx` and wavenumbers
//! `k_j = pi j / L` in FFT order. Every symbol is even and tabulated from
//! `|k|`, so the tables are bit-for-bit symmetric under `j -> N - j`.

use std::fmt;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::params::{Depth, ModelParams};

/// Below this value of `sqrt(mu2)|k|` the series `1/z + z/3` replaces `coth`.
const COTH_SERIES_CUTOFF: f64 = 1e-4;

struct GridInner {
    half_length: f64,
    n: usize,
    dx: f64,
    x: Vec<f64>,
    k: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Periodic grid on `[-L, L)`; cheap to clone and shareable across threads.
#[derive(Clone)]
pub struct Grid(Arc<GridInner>);

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_length", &self.0.half_length)
            .field("n", &self.0.n)
            .finish()
    }
}

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Grid> {
        if !(half_length > 0.0 && half_length.is_finite()) {
            return Err(Error::InvalidGrid(format!("L = {half_length} must be positive")));
        }
        if n < 16 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("N = {n} must be even and at least 16")));
        }
        let dx = 2.0 * half_length / n as f64;
        let x = (0..n).map(|j| -half_length + j as f64 * dx).collect();
        let k = (0..n)
            .map(|j| std::f64::consts::PI * signed_index(j, n) as f64 / half_length)
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Grid(Arc::new(GridInner {
            half_length,
            n,
            dx,
            x,
            k,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })))
    }

    pub fn half_length(&self) -> f64 {
        self.0.half_length
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn dx(&self) -> f64 {
        self.0.dx
    }

    pub fn x(&self) -> &[f64] {
        &self.0.x
    }

    /// Wavenumbers in FFT order; the Nyquist entry carries `-pi N / (2L)`.
    pub fn k(&self) -> &[f64] {
        &self.0.k
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.n() == other.n() && self.half_length() == other.half_length())
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Index of `-x_j` on the grid.
    /// Index of the node at `x`, if `x` is a grid point.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let t = (x + self.half_length()) / self.dx();
        let j = t.round();
        if (t - j).abs() < 1e-9 && j >= 0.0 && (j as usize) < self.n() {
            Some(j as usize)
        } else {
            None
        }
    }

    pub fn reflect(&self, j: usize) -> usize {
        (self.n() - j) % self.n()
    }

    /// Modes kept by the 2/3 rule: `3|j| < N`.
    pub fn dealias_mask(&self) -> Vec<bool> {
        let n = self.n();
        (0..n).map(|j| 3 * signed_index(j, n).unsigned_abs() < n as u64).collect()
    }

    /// Unnormalised forward DFT of real samples.
    pub fn fft(&self, v: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = v.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        self.0.forward.process(&mut buf);
        buf
    }

    /// Normalised inverse DFT, complex output.
    pub fn ifft_complex(&self, mut s: Vec<Complex64>) -> Vec<Complex64> {
        self.0.inverse.process(&mut s);
        let scale = 1.0 / self.n() as f64;
        s.iter_mut().for_each(|z| *z *= scale);
        s
    }

    /// Normalised inverse DFT, real part.
    pub fn ifft(&self, s: Vec<Complex64>) -> Vec<f64> {
        self.ifft_complex(s).into_iter().map(|z| z.re).collect()
    }
}

/// Signed FFT index; the Nyquist index maps to `-N/2`.
pub fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Real samples on a grid.
#[derive(Clone, Debug)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<RealField> {
        if values.len() != grid.n() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.n()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("sample {j} is not finite")));
        }
        Ok(RealField { grid: grid.clone(), values })
    }

    pub(crate) fn from_vec_unchecked(grid: &Grid, values: Vec<f64>) -> RealField {
        debug_assert_eq!(values.len(), grid.n());
        RealField { grid: grid.clone(), values }
    }

    pub fn zeros(grid: &Grid) -> RealField {
        RealField::from_vec_unchecked(grid, vec![0.0; grid.n()])
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> RealField {
        RealField::from_vec_unchecked(grid, grid.x().iter().map(|&x| f(x)).collect())
    }

    pub fn from_spectrum(grid: &Grid, s: Vec<Complex64>) -> RealField {
        RealField::from_vec_unchecked(grid, grid.ifft(s))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn spectrum(&self) -> Vec<Complex64> {
        self.grid.fft(&self.values)
    }

    /// Trapezoid quadrature, spectrally exact for periodic band-limited fields.
    pub fn integral(&self) -> f64 {
        self.grid.dx() * self.values.iter().sum::<f64>()
    }

    pub fn dot(&self, other: &RealField) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self.grid.dx() * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>())
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.dx() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField::from_vec_unchecked(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Result<RealField> {
        self.grid.check_same(&other.grid)?;
        Ok(RealField::from_vec_unchecked(
            &self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn scale(&self, s: f64) -> RealField {
        self.map(|v| s * v)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &RealField) -> Result<RealField> {
        self.zip_with(other, |a, b| a + s * b)
    }

    pub fn sub(&self, other: &RealField) -> Result<RealField> {
        self.axpy(-1.0, other)
    }

    pub fn mul(&self, other: &RealField) -> Result<RealField> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Replace the field by its even part about `x = 0`.
    pub fn symmetrize_even(&mut self) {
        let n = self.grid.n();
        for j in 1..n / 2 {
            let m = 0.5 * (self.values[j] + self.values[n - j]);
            self.values[j] = m;
            self.values[n - j] = m;
        }
    }

    /// `max_j |f(x_j) - f(-x_j)|`.
    pub fn evenness_defect(&self) -> f64 {
        let n = self.grid.n();
        (0..n)
            .map(|j| (self.values[j] - self.values[self.grid.reflect(j)]).abs())
            .fold(0.0, f64::max)
    }

    /// Circular translation by `shift` (in x units) through a Fourier phase.
    pub fn translate(&self, shift: f64) -> RealField {
        let k = self.grid.k();
        let n = self.grid.n();
        let mut s = self.spectrum();
        for (j, z) in s.iter_mut().enumerate() {
            if j == n / 2 {
                *z *= (k[j] * shift).cos();
            } else {
                *z *= Complex64::from_polar(1.0, -k[j] * shift);
            }
        }
        RealField::from_spectrum(&self.grid, s)
    }

    /// Modulus of the Nyquist coefficient relative to the largest coefficient.
    pub fn nyquist_ratio(&self) -> f64 {
        let s = self.spectrum();
        let max = s.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if max == 0.0 {
            0.0
        } else {
            s[self.grid.n() / 2].norm() / max
        }
    }

    pub fn check_resolved(&self, tol: f64) -> Result<()> {
        let ratio = self.nyquist_ratio();
        if ratio > tol {
            Err(Error::Unresolved { ratio, tol })
        } else {
            Ok(())
        }
    }

    /// Two-column CSV `(x, value)`.
    pub fn write_csv(&self, path: &Path, comments: &[String]) -> Result<()> {
        write_columns(path, comments, &["x", "value"], &[self.grid.x(), &self.values])
    }
}

/// A pair of fields `(xi, nu)` on one grid; `(zeta, v)` in evolution.
#[derive(Clone, Debug)]
pub struct WavePair {
    pub xi: RealField,
    pub nu: RealField,
}

impl WavePair {
    pub fn new(xi: RealField, nu: RealField) -> Result<WavePair> {
        xi.grid().check_same(nu.grid())?;
        Ok(WavePair { xi, nu })
    }

    pub fn zeros(grid: &Grid) -> WavePair {
        WavePair {
            xi: RealField::zeros(grid),
            nu: RealField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.xi.grid()
    }

    pub fn scale(&self, s: f64) -> WavePair {
        WavePair {
            xi: self.xi.scale(s),
            nu: self.nu.scale(s),
        }
    }

    pub fn axpy(&self, s: f64, other: &WavePair) -> Result<WavePair> {
        Ok(WavePair {
            xi: self.xi.axpy(s, &other.xi)?,
            nu: self.nu.axpy(s, &other.nu)?,
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.xi.sup_norm().max(self.nu.sup_norm())
    }

    pub fn dot(&self, other: &WavePair) -> Result<f64> {
        Ok(self.xi.dot(&other.xi)? + self.nu.dot(&other.nu)?)
    }

    pub fn symmetrize_even(&mut self) {
        self.xi.symmetrize_even();
        self.nu.symmetrize_even();
    }

    pub fn evenness_defect(&self) -> f64 {
        self.xi.evenness_defect().max(self.nu.evenness_defect())
    }

    pub fn translate(&self, shift: f64) -> WavePair {
        WavePair {
            xi: self.xi.translate(shift),
            nu: self.nu.translate(shift),
        }
    }

    /// Flatten to `[xi..., nu...]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.xi.values().to_vec();
        v.extend_from_slice(self.nu.values());
        v
    }

    pub fn from_flat(grid: &Grid, v: &[f64]) -> WavePair {
        let n = grid.n();
        WavePair {
            xi: RealField::from_vec_unchecked(grid, v[..n].to_vec()),
            nu: RealField::from_vec_unchecked(grid, v[n..2 * n].to_vec()),
        }
    }

    /// Three-column CSV `(x, xi, nu)`.
    pub fn write_csv(&self, path: &Path, comments: &[String]) -> Result<()> {
        write_columns(
            path,
            comments,
            &["x", "xi", "nu"],
            &[self.grid().x(), self.xi.values(), self.nu.values()],
        )
    }

    /// Read a pair written by [`WavePair::write_csv`]; the grid is recovered from the x column.
    pub fn read_csv(path: &Path) -> Result<WavePair> {
        let cols = read_columns(path, 3)?;
        let (x, xi, nu) = (&cols[0], &cols[1], &cols[2]);
        if x.len() < 2 {
            return Err(Error::InvalidGrid(format!("{} has too few rows", path.display())));
        }
        let half_length = -x[0];
        let grid = Grid::new(half_length, x.len())?;
        if ((x[1] - x[0]) - grid.dx()).abs() > 1e-9 * grid.dx() {
            return Err(Error::InvalidGrid(format!(
                "{}: x column is not a periodic grid on [-L, L)",
                path.display()
            )));
        }
        WavePair::new(RealField::new(&grid, xi.clone())?, RealField::new(&grid, nu.clone())?)
    }
}

/// Write equally long columns as CSV, preceded by `# ` comment lines.
pub fn write_columns(path: &Path, comments: &[String], header: &[&str], cols: &[&[f64]]) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    for c in comments {
        writeln!(file, "# {c}").map_err(|e| Error::io(path, e))?;
    }
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    let rows = cols.first().map_or(0, |c| c.len());
    for i in 0..rows {
        w.write_record(cols.iter().map(|c| format!("{:e}", c[i])))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read the first `ncols` numeric columns of a CSV with a header row and `#` comments.
pub fn read_columns(path: &Path, ncols: usize) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Config(format!("{}: {other:?}", path.display())),
        })?;
    let mut cols = vec![Vec::new(); ncols];
    for rec in r.records() {
        let rec = rec?;
        for (i, col) in cols.iter_mut().enumerate() {
            let v: f64 = rec
                .get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Config(format!("{}: bad value in column {i}", path.display())))?;
            col.push(v);
        }
    }
    Ok(cols)
}

type SymbolFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real even Fourier symbol with its table on a grid.
#[derive(Clone)]
pub struct Multiplier {
    name: String,
    grid: Grid,
    table: Arc<[f64]>,
    eval: SymbolFn,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multiplier")
            .field("name", &self.name)
            .field("grid", &self.grid)
            .finish()
    }
}

impl Multiplier {
    /// Tabulate `eval(|k_j|)` on the grid.
    pub fn new(name: impl Into<String>, grid: &Grid, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Multiplier {
        let eval: SymbolFn = Arc::new(eval);
        let table = grid.k().iter().map(|k| eval(k.abs())).collect();
        Multiplier {
            name: name.into(),
            grid: grid.clone(),
            table,
            eval,
        }
    }

    pub fn identity(grid: &Grid) -> Multiplier {
        Multiplier::new("1", grid, |_| 1.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn eval(&self, k: f64) -> f64 {
        (self.eval)(k.abs())
    }

    pub fn min_abs(&self) -> f64 {
        self.table.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.table.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Pointwise combination of two symbols on the same grid.
    pub fn combine(&self, other: &Multiplier, name: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Result<Multiplier> {
        self.grid.check_same(&other.grid)?;
        let (e1, e2) = (self.eval.clone(), other.eval.clone());
        let f = Arc::new(f);
        let table = self.table.iter().zip(other.table.iter()).map(|(&a, &b)| f(a, b)).collect();
        Ok(Multiplier {
            name: name.into(),
            grid: self.grid.clone(),
            table,
            eval: Arc::new(move |k| f(e1(k), e2(k))),
        })
    }

    pub fn times(&self, other: &Multiplier) -> Result<Multiplier> {
        let name = format!("{}*{}", self.name, other.name);
        self.combine(other, name, |a, b| a * b)
    }

    pub fn over(&self, other: &Multiplier) -> Result<Multiplier> {
        let name = format!("{}/{}", self.name, other.name);
        self.combine(other, name, |a, b| a / b)
    }

    pub fn map(&self, name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Multiplier {
        let e = self.eval.clone();
        let f = Arc::new(f);
        let g = f.clone();
        Multiplier {
            name: name.into(),
            grid: self.grid.clone(),
            table: self.table.iter().map(|&v| g(v)).collect(),
            eval: Arc::new(move |k| f(e(k))),
        }
    }

    /// Multiply each coefficient of a spectrum in place.
    pub fn apply_spectrum(&self, s: &mut [Complex64]) {
        for (z, m) in s.iter_mut().zip(self.table.iter()) {
            *z *= *m;
        }
    }

    pub fn apply(&self, f: &RealField) -> Result<RealField> {
        self.grid.check_same(f.grid())?;
        let mut s = f.spectrum();
        self.apply_spectrum(&mut s);
        Ok(RealField::from_spectrum(&self.grid, s))
    }

    pub fn invert(&self, f: &RealField) -> Result<RealField> {
        self.grid.check_same(f.grid())?;
        let min_abs = self.min_abs();
        if !(min_abs > 1e-12) {
            return Err(Error::SingularOperator {
                name: self.name.clone(),
                min_abs,
            });
        }
        let mut s = f.spectrum();
        for (z, m) in s.iter_mut().zip(self.table.iter()) {
            *z /= *m;
        }
        Ok(RealField::from_spectrum(&self.grid, s))
    }

    /// CSV `(k, symbol)` in FFT order.
    pub fn write_csv(&self, path: &Path, comments: &[String]) -> Result<()> {
        write_columns(path, comments, &["k", "symbol"], &[self.grid.k(), &self.table])
    }
}

/// Scalar symbol evaluators. Each takes `k` and depends only on `|k|`.
pub mod symbol {
    use super::COTH_SERIES_CUTOFF;
    use crate::params::{Depth, ModelParams};

    /// `|k| coth(sqrt(mu2)|k|)`, equal to `|k|` at infinite depth and `1/sqrt(mu2)` at `k = 0`.
    pub fn kcoth(k: f64, mu2: Depth) -> f64 {
        let k = k.abs();
        match mu2 {
            Depth::Infinite => k,
            Depth::Finite(m) => {
                let s = m.sqrt();
                let z = s * k;
                if z < COTH_SERIES_CUTOFF {
                    (1.0 + z * z / 3.0) / s
                } else {
                    k / z.tanh()
                }
            }
        }
    }

    pub fn j_b(p: &ModelParams, k: f64) -> f64 {
        1.0 + p.mu * p.b * k * k
    }

    pub fn j_c(p: &ModelParams, k: f64) -> f64 {
        1.0 - p.mu * p.c * k * k
    }

    pub fn j_d(p: &ModelParams, k: f64) -> f64 {
        1.0 + p.mu * p.d * k * k
    }

    /// Symbol of `L_{mu2}` at the depth stored in `p` (the infinite-depth
    /// operator when `p.mu2` is infinite).
    pub fn l_hat(p: &ModelParams, k: f64) -> f64 {
        l_hat_at(p, p.mu2, k)
    }

    pub fn l_hat_at(p: &ModelParams, mu2: Depth, k: f64) -> f64 {
        let g = p.gamma;
        let kc = kcoth(k, mu2);
        1.0 / g - p.mu.sqrt() / (g * g) * kc + p.mu / (g * g * g) * kc * kc - p.mu * p.a / g * k * k
    }

    pub fn l_inf(p: &ModelParams, k: f64) -> f64 {
        let g = p.gamma;
        1.0 / g - p.mu.sqrt() / (g * g) * k.abs() + p.mu / g * (1.0 / (g * g) - p.a) * k * k
    }

    /// `g(k) = (beta/gamma) sqrt(mu) |k| coth(sqrt(mu2)|k|)`.
    pub fn ilw_g(p: &ModelParams, k: f64) -> f64 {
        p.beta / p.gamma * p.mu.sqrt() * kcoth(k, p.mu2)
    }

    /// `W = 1 + g`; reduces to `D` at infinite depth.
    pub fn ilw_w(p: &ModelParams, k: f64) -> f64 {
        1.0 + ilw_g(p, k)
    }

    /// `Z = (1/gamma)(1 + ((beta-1)/gamma) sqrt(mu) |k| coth(sqrt(mu2)|k|))`; reduces to `B`.
    pub fn ilw_z(p: &ModelParams, k: f64) -> f64 {
        (1.0 + (p.beta - 1.0) / p.gamma * p.mu.sqrt() * kcoth(k, p.mu2)) / p.gamma
    }

    pub fn bo_d(p: &ModelParams, k: f64) -> f64 {
        1.0 + p.beta / p.gamma * p.mu.sqrt() * k.abs()
    }

    pub fn bo_b(p: &ModelParams, k: f64) -> f64 {
        (1.0 + (p.beta - 1.0) / p.gamma * p.mu.sqrt() * k.abs()) / p.gamma
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JKind {
    B,
    C,
    D,
}

pub fn symbol_j(p: &ModelParams, which: JKind, grid: &Grid) -> Multiplier {
    let p = p.clone();
    match which {
        JKind::B => Multiplier::new("J_b", grid, move |k| symbol::j_b(&p, k)),
        JKind::C => Multiplier::new("J_c", grid, move |k| symbol::j_c(&p, k)),
        JKind::D => Multiplier::new("J_d", grid, move |k| symbol::j_d(&p, k)),
    }
}

pub fn symbol_l_mu2(p: &ModelParams, grid: &Grid) -> Result<Multiplier> {
    if p.mu2.is_infinite() {
        return Err(Error::NotApplicable("L_mu2 needs a finite mu2".into()));
    }
    let p = p.clone();
    Ok(Multiplier::new("L_mu2", grid, move |k| symbol::l_hat(&p, k)))
}

pub fn symbol_l_inf(p: &ModelParams, grid: &Grid) -> Multiplier {
    let p = p.clone();
    Multiplier::new("L_inf", grid, move |k| symbol::l_inf(&p, k))
}

/// `L_{mu2}` or `L_inf` according to `p.mu2`.
pub fn symbol_l(p: &ModelParams, grid: &Grid) -> Multiplier {
    match p.mu2 {
        Depth::Infinite => symbol_l_inf(p, grid),
        Depth::Finite(_) => symbol_l_mu2(p, grid).expect("finite depth"),
    }
}

pub fn symbol_ilw_ops(p: &ModelParams, grid: &Grid) -> Result<(Multiplier, Multiplier)> {
    if p.mu2.is_infinite() {
        return Err(Error::NotApplicable("ILW symbols need a finite mu2".into()));
    }
    Ok(ilw_or_bo_ops(p, grid))
}

pub fn symbol_bo_ops(p: &ModelParams, grid: &Grid) -> (Multiplier, Multiplier) {
    let (p1, p2) = (p.clone(), p.clone());
    (
        Multiplier::new("D", grid, move |k| symbol::bo_d(&p1, k)),
        Multiplier::new("B", grid, move |k| symbol::bo_b(&p2, k)),
    )
}

/// `(W, Z)` at finite depth, `(D, B)` at infinite depth.
pub fn ilw_or_bo_ops(p: &ModelParams, grid: &Grid) -> (Multiplier, Multiplier) {
    match p.mu2 {
        Depth::Infinite => symbol_bo_ops(p, grid),
        Depth::Finite(_) => {
            let (p1, p2) = (p.clone(), p.clone());
            (
                Multiplier::new("W", grid, move |k| symbol::ilw_w(&p1, k)),
                Multiplier::new("Z", grid, move |k| symbol::ilw_z(&p2, k)),
            )
        }
    }
}

/// `|D|`.
pub fn abs_d(grid: &Grid) -> Multiplier {
    Multiplier::new("|D|", grid, |k| k)
}
