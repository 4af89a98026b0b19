//! Energy `E`, constraint `F`, Hamiltonian `H` and per-frequency quadratic-form checks.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Depth, ModelParams};
use crate::solvers::{variational, SolverConfig};
use crate::spectral::{self, symbol, write_columns, Grid, JKind, Multiplier, RealField, WavePair};

/// Which depth operator enters `E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mu2Mode {
    /// `L_{mu2}` with the finite `mu2` stored in the parameters.
    Finite,
    /// `L_inf` regardless of the stored depth.
    Infinite,
}

impl Mu2Mode {
    pub fn of(p: &ModelParams) -> Mu2Mode {
        if p.mu2.is_infinite() {
            Mu2Mode::Infinite
        } else {
            Mu2Mode::Finite
        }
    }

    /// Parameters whose depth matches the mode.
    pub fn params(self, p: &ModelParams) -> Result<ModelParams> {
        match (self, p.mu2) {
            (Mu2Mode::Infinite, _) => Ok(p.with_mu2(Depth::Infinite)),
            (Mu2Mode::Finite, Depth::Finite(_)) => Ok(p.clone()),
            (Mu2Mode::Finite, Depth::Infinite) => Err(Error::NotApplicable("finite mode needs a finite mu2".into())),
        }
    }
}

/// `E = int (1-gamma)/2 xi J_c xi + 1/2 nu L nu - omega xi J_b nu`, evaluated by
/// applying the operators and integrating on the grid.
pub fn energy_e(p: &ModelParams, omega: f64, w: &WavePair, mode: Mu2Mode) -> Result<f64> {
    let p = mode.params(p)?;
    let g = w.grid();
    let jc_xi = spectral::symbol_j(&p, JKind::C, g).apply(&w.xi)?;
    let l_nu = spectral::symbol_l(&p, g).apply(&w.nu)?;
    let jb_nu = spectral::symbol_j(&p, JKind::B, g).apply(&w.nu)?;
    Ok(0.5 * (1.0 - p.gamma) * w.xi.dot(&jc_xi)? + 0.5 * w.nu.dot(&l_nu)? - omega * w.xi.dot(&jb_nu)?)
}

/// The same energy summed in frequency space through the 2x2 symbol matrix.
pub fn energy_e_spectral(p: &ModelParams, omega: f64, w: &WavePair, mode: Mu2Mode) -> Result<f64> {
    let p = mode.params(p)?;
    let g = w.grid();
    let (xs, ns) = (w.xi.spectrum(), w.nu.spectrum());
    let mut sum = 0.0;
    for (j, &k) in g.k().iter().enumerate() {
        let (a, b, c) = symbol_matrix(&p, omega, k);
        let (x, n) = (xs[j], ns[j]);
        sum += 0.5 * a * x.norm_sqr() + 0.5 * c * n.norm_sqr() + b * (x * n.conj()).re;
    }
    Ok(sum * g.dx() / g.n() as f64)
}

/// Entries `(A, B, C)` of the symmetric symbol matrix `[[A, B], [B, C]]` of `E`.
pub fn symbol_matrix(p: &ModelParams, omega: f64, k: f64) -> (f64, f64, f64) {
    (
        (1.0 - p.gamma) * symbol::j_c(p, k),
        -omega * symbol::j_b(p, k),
        symbol::l_hat(p, k),
    )
}

fn min_eigen(a: f64, b: f64, c: f64) -> f64 {
    0.5 * (a + c) - (0.25 * (a - c) * (a - c) + b * b).sqrt()
}

/// `F = r int xi nu^2`.
pub fn constraint_f(p: &ModelParams, w: &WavePair) -> Result<f64> {
    let nu2 = w.nu.mul(&w.nu)?;
    Ok(p.r() * w.xi.dot(&nu2)?)
}

/// Gradient of `F`: `(r nu^2, 2 r xi nu)`.
pub fn constraint_gradient(p: &ModelParams, w: &WavePair) -> Result<WavePair> {
    let r = p.r();
    WavePair::new(w.nu.zip_with(&w.nu, |a, b| r * a * b)?, w.xi.zip_with(&w.nu, |a, b| 2.0 * r * a * b)?)
}

/// Depth used inside the `coth` factors of the Hamiltonian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CothArgument {
    /// `coth(sqrt(mu2)|D|)`, matching the evolution operator.
    #[default]
    Mu2,
    /// `coth(sqrt(mu)|D|)`.
    Mu,
}

/// Term-by-term decomposition of `H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerms {
    pub coth_argument: CothArgument,
    /// `(1-gamma)/2 int zeta^2`.
    pub zeta_sq: f64,
    /// `-(mu c/2)(1-gamma) int zeta_x^2`.
    pub zeta_x: f64,
    /// `1/(2 gamma) int v^2`.
    pub v_sq: f64,
    /// `-(sqrt(mu)/(2 gamma^2)) int |L1^{1/2} v|^2`.
    pub l1: f64,
    /// `-(a mu/(2 gamma)) int v_x^2`.
    pub v_x: f64,
    /// `(mu/(2 gamma^3)) int |L2 v_x|^2`.
    pub l2: f64,
    /// `-r int zeta v^2`.
    pub cubic: f64,
    pub quadratic: f64,
    pub total: f64,
}

pub fn hamiltonian_h(p: &ModelParams, state: &WavePair) -> Result<f64> {
    Ok(hamiltonian_terms(p, state, CothArgument::Mu2)?.total)
}

/// The Hamiltonian of the `b = d` system,
/// `H = int (1-gamma)/2 zeta J_c zeta + 1/2 v L v - r zeta v^2`, with `L` expanded
/// into its `L1 = |D| coth` and `L2 = coth` pieces.
pub fn hamiltonian_terms(p: &ModelParams, state: &WavePair, arg: CothArgument) -> Result<HamiltonianTerms> {
    if p.b != p.d {
        return Err(Error::NotApplicable(format!("Hamiltonian needs b = d (b = {}, d = {})", p.b, p.d)));
    }
    let g = state.grid();
    let (zeta, v) = (&state.xi, &state.nu);
    let depth = match arg {
        CothArgument::Mu2 => p.mu2,
        CothArgument::Mu => Depth::Finite(p.mu),
    };
    let gm = p.gamma;
    let dx = Multiplier::new("|D|", g, |k| k);
    let sq = |f: &RealField| f.dot(f);
    let zeta_x = dx.apply(zeta)?;
    let v_x = dx.apply(v)?;
    let l1_half = Multiplier::new("L1^1/2", g, move |k| symbol::kcoth(k, depth).sqrt()).apply(v)?;
    let l2_v_x = Multiplier::new("L2|D|", g, move |k| symbol::kcoth(k, depth)).apply(v)?;
    let t = HamiltonianTerms {
        coth_argument: arg,
        zeta_sq: 0.5 * (1.0 - gm) * sq(zeta)?,
        zeta_x: -0.5 * p.mu * p.c * (1.0 - gm) * sq(&zeta_x)?,
        v_sq: sq(v)? / (2.0 * gm),
        l1: -p.mu.sqrt() / (2.0 * gm * gm) * sq(&l1_half)?,
        v_x: -p.a * p.mu / (2.0 * gm) * sq(&v_x)?,
        l2: p.mu / (2.0 * gm * gm * gm) * sq(&l2_v_x)?,
        cubic: -p.r() * zeta.dot(&v.mul(v)?)?,
        quadratic: 0.0,
        total: 0.0,
    };
    let quadratic = t.zeta_sq + t.zeta_x + t.v_sq + t.l1 + t.v_x + t.l2;
    Ok(HamiltonianTerms {
        quadratic,
        total: quadratic + t.cubic,
        ..t
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFormReport {
    pub omega: f64,
    pub mode: Mu2Mode,
    /// Wavenumbers in FFT order.
    pub k: Vec<f64>,
    /// Smaller eigenvalue of `[[(1-gamma)J_c, -omega J_b], [-omega J_b, L]]` per frequency.
    pub min_eigen_by_freq: Vec<f64>,
    pub global_min: f64,
    /// `min{(1-gamma)J_c - |omega|J_b, L - |omega|J_b}` per frequency: the bound
    /// obtained by splitting the cross term with `2|xi nu| <= xi^2 + nu^2`.
    pub split_min_by_freq: Vec<f64>,
    pub split_global_min: f64,
    /// `min_k lambda_min(k) / (1 + k^2)`: `E >= C/2 ||(xi, nu)||_{H^1 x H^1}^2`.
    pub coercivity_const: f64,
    pub positive_definite: bool,
}

impl QuadraticFormReport {
    pub fn write_csv(&self, path: &Path, comments: &[String]) -> Result<()> {
        write_columns(
            path,
            comments,
            &["k", "min_eigen", "split_min"],
            &[&self.k, &self.min_eigen_by_freq, &self.split_min_by_freq],
        )
    }
}

pub fn quadratic_form_check(p: &ModelParams, omega: f64, grid: &Grid, mode: Mu2Mode) -> Result<QuadraticFormReport> {
    let p = mode.params(p)?;
    let k = grid.k().to_vec();
    let mut eig = Vec::with_capacity(k.len());
    let mut split = Vec::with_capacity(k.len());
    let mut coer = f64::INFINITY;
    for &kk in &k {
        let (a, b, c) = symbol_matrix(&p, omega, kk);
        let e = min_eigen(a, b, c);
        coer = coer.min(e / (1.0 + kk * kk));
        eig.push(e);
        let jb = symbol::j_b(&p, kk);
        split.push((a - omega.abs() * jb).min(c - omega.abs() * jb));
    }
    let global_min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let split_global_min = split.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(QuadraticFormReport {
        omega,
        mode,
        k,
        min_eigen_by_freq: eig,
        global_min,
        split_min_by_freq: split,
        split_global_min,
        coercivity_const: coer,
        positive_definite: global_min > 0.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ILambdaEstimate {
    pub lambda: f64,
    /// `E` at the computed constrained minimiser (an upper estimate of `I_lambda`).
    pub value: f64,
    pub lagrange_k: f64,
    /// Residual of the soliton system after rescaling by `K`.
    pub residual: f64,
    pub iterations: usize,
}

pub fn estimate_i_lambda(
    p: &ModelParams,
    omega: f64,
    lambda: f64,
    grid: &Grid,
    mode: Mu2Mode,
    cfg: &SolverConfig,
) -> Result<ILambdaEstimate> {
    let m = variational::constrained_minimize(p, omega, lambda, grid, mode, cfg)?;
    if !(m.energy > 0.0) {
        return Err(Error::NonConvergence {
            what: "constrained minimisation (non-positive energy)",
            iterations: m.iterations,
            residual: m.residual,
        });
    }
    Ok(ILambdaEstimate {
        lambda,
        value: m.energy,
        lagrange_k: m.lagrange_k,
        residual: m.residual,
        iterations: m.iterations,
    })
}
