//! Pseudo-spectral time integration of the time-dependent systems
//!
//! ```text
//! J_b zeta_t = -d_x (L v - 2 r zeta v),   J_d v_t = -d_x ((1-gamma) J_c zeta - r v^2)   (B-FD)
//! W zeta_t   = -d_x (Z v - 2 r zeta v),   v_t     = -d_x ((1-gamma) zeta - r v^2)       (ILW)
//! ```
//!
//! with the BO system obtained from ILW at infinite depth. The linear part of
//! each mode is the 2x2 block `A = [[0, p], [q, 0]]`, `p = -ik P`, `q = -ik Q`,
//! so `(hA)^2 = h^2 p q I` and every matrix function reduces to two scalars.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::hamiltonian_h;
use crate::params::{Depth, Family, ModelParams};
use crate::spectral::{signed_index, symbol, Grid, WavePair};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    #[default]
    Etdrk4,
    ImexBdf2,
}

type C = Complex64;

/// `c I + [[0, b], [d, 0]]` acting on one mode.
#[derive(Clone, Copy, Debug)]
struct Block {
    c: f64,
    b: C,
    d: C,
}

impl Block {
    const ZERO: Block = Block {
        c: 0.0,
        b: C::new(0.0, 0.0),
        d: C::new(0.0, 0.0),
    };

    fn apply(&self, z: C, v: C) -> (C, C) {
        (z * self.c + v * self.b, z * self.d + v * self.c)
    }
}

/// `(C_n(w), S_n(w))` for `n = 0..=3`, where `phi_n(hA) = C_n I + S_n hA` and `w = h^2 p q`.
fn phi_pairs(w: f64) -> [(f64, f64); 4] {
    let mut out = [(0.0, 0.0); 4];
    if w.abs() < 1.0 {
        let fact: Vec<f64> = (0..64).scan(1.0, |f, j| {
            let v = *f;
            *f *= (j + 1) as f64;
            Some(v)
        })
        .collect();
        for (n, o) in out.iter_mut().enumerate() {
            let (mut c, mut s, mut wm) = (0.0, 0.0, 1.0);
            for m in 0..28 {
                c += wm / fact[2 * m + n];
                s += wm / fact[2 * m + n + 1];
                wm *= w;
            }
            *o = (c, s);
        }
        return out;
    }
    let s = C::new(w, 0.0).sqrt();
    let phis = |z: C| {
        let mut v = [z.exp(), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)];
        let mut fact = 1.0;
        for k in 0..3 {
            v[k + 1] = (v[k] - 1.0 / fact) / z;
            fact *= (k + 1) as f64;
        }
        v
    };
    let (pp, pm) = (phis(s), phis(-s));
    for n in 0..4 {
        out[n] = (((pp[n] + pm[n]) * 0.5).re, ((pp[n] - pm[n]) / (s * 2.0)).re);
    }
    out
}

/// Spectral operators of one family on one grid.
#[derive(Clone, Debug)]
pub struct Evolver {
    family: Family,
    params: ModelParams,
    grid: Grid,
    /// Linear coefficients `p = -ik P` and `q = -ik Q`; zero on dealiased modes.
    p: Vec<C>,
    q: Vec<C>,
    /// Nonlinear coefficients: `zeta_t += nz (zeta v)^`, `v_t += nv (v^2)^`.
    nz: Vec<C>,
    nv: Vec<C>,
    mask: Vec<bool>,
    hamiltonian: bool,
}

impl Evolver {
    pub fn new(family: Family, p: &ModelParams, grid: &Grid) -> Result<Evolver> {
        let params = match family {
            Family::BfdInf | Family::Bo => p.with_mu2(Depth::Infinite),
            Family::BfdFinite if p.mu2.is_infinite() => {
                return Err(Error::Config("bfd_finite needs a finite mu2".into()));
            }
            _ => p.clone(),
        };
        params.validate_for(family)?;
        let n = grid.n();
        let mask = grid.dealias_mask();
        let (mut pv, mut qv, mut nz, mut nv) = (vec![C::new(0.0, 0.0); n], vec![C::new(0.0, 0.0); n], vec![C::new(0.0, 0.0); n], vec![C::new(0.0, 0.0); n]);
        let r = params.r();
        let g = params.gamma;
        for (j, &k) in grid.k().iter().enumerate() {
            if !mask[j] {
                continue;
            }
            let (big_p, big_q, ez, ev) = if family.is_bfd() {
                let jb = symbol::j_b(&params, k);
                let jd = symbol::j_d(&params, k);
                (symbol::l_hat(&params, k) / jb, (1.0 - g) * symbol::j_c(&params, k) / jd, jb, jd)
            } else {
                let w = symbol::ilw_w(&params, k);
                (symbol::ilw_z(&params, k) / w, 1.0 - g, w, 1.0)
            };
            let mik = C::new(0.0, -k);
            pv[j] = mik * big_p;
            qv[j] = mik * big_q;
            nz[j] = -mik * (2.0 * r / ez);
            nv[j] = -mik * (r / ev);
        }
        Ok(Evolver {
            family,
            hamiltonian: family.is_bfd() && params.b == params.d,
            params,
            grid: grid.clone(),
            p: pv,
            q: qv,
            nz,
            nv,
            mask,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Largest linear frequency `max |k| sqrt|P Q|` over the retained modes.
    pub fn max_frequency(&self) -> f64 {
        self.p
            .iter()
            .zip(&self.q)
            .map(|(p, q)| (p * q).norm().sqrt())
            .fold(0.0, f64::max)
    }

    /// Step for which the fastest linear phase advances by `pi/4`.
    pub fn suggest_dt(&self) -> f64 {
        let w = self.max_frequency();
        if w == 0.0 {
            f64::INFINITY
        } else {
            0.25 * PI / w
        }
    }

    fn to_spectral(&self, w: &WavePair) -> Result<(Vec<C>, Vec<C>)> {
        if !w.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let mut z = self.grid.fft(w.xi.values());
        let mut v = self.grid.fft(w.nu.values());
        for j in 0..z.len() {
            if !self.mask[j] {
                z[j] = C::new(0.0, 0.0);
                v[j] = C::new(0.0, 0.0);
            }
        }
        Ok((z, v))
    }

    fn to_physical(&self, z: &[C], v: &[C]) -> WavePair {
        WavePair::from_flat(
            &self.grid,
            &[self.grid.ifft(z.to_vec()), self.grid.ifft(v.to_vec())].concat(),
        )
    }

    /// 2/3-rule projection of a state.
    pub fn dealias(&self, w: &WavePair) -> Result<WavePair> {
        let (z, v) = self.to_spectral(w)?;
        Ok(self.to_physical(&z, &v))
    }

    fn nonlinear(&self, z: &[C], v: &[C]) -> (Vec<C>, Vec<C>) {
        let zp = self.grid.ifft(z.to_vec());
        let vp = self.grid.ifft(v.to_vec());
        let zv: Vec<f64> = zp.iter().zip(&vp).map(|(a, b)| a * b).collect();
        let v2: Vec<f64> = vp.iter().map(|b| b * b).collect();
        let (mut a, mut b) = (self.grid.fft(&zv), self.grid.fft(&v2));
        for j in 0..a.len() {
            a[j] *= self.nz[j];
            b[j] *= self.nv[j];
        }
        (a, b)
    }

    fn linear(&self, z: &[C], v: &[C]) -> (Vec<C>, Vec<C>) {
        (
            v.iter().zip(&self.p).map(|(v, p)| v * p).collect(),
            z.iter().zip(&self.q).map(|(z, q)| z * q).collect(),
        )
    }

    /// Time derivative `(zeta_t, v_t)` of a state, products dealiased.
    pub fn rhs(&self, w: &WavePair) -> Result<WavePair> {
        let (z, v) = self.to_spectral(w)?;
        let (lz, lv) = self.linear(&z, &v);
        let (nz, nv) = self.nonlinear(&z, &v);
        let a: Vec<C> = lz.iter().zip(&nz).map(|(a, b)| a + b).collect();
        let b: Vec<C> = lv.iter().zip(&nv).map(|(a, b)| a + b).collect();
        Ok(self.to_physical(&a, &b))
    }

    /// Per-mode linear energy `|Q| |zeta_k|^2 + |P| |v_k|^2`, invariant under the linear flow.
    pub fn mode_energies(&self, w: &WavePair) -> Result<Vec<f64>> {
        let (z, v) = self.to_spectral(w)?;
        Ok((0..z.len())
            .map(|j| self.q[j].norm() * z[j].norm_sqr() + self.p[j].norm() * v[j].norm_sqr())
            .collect())
    }

    fn blocks(&self, h: f64) -> Vec<[Block; 4]> {
        (0..self.p.len())
            .map(|j| {
                if !self.mask[j] {
                    return [Block::ZERO; 4];
                }
                let (p, q) = (self.p[j], self.q[j]);
                let w = (p * q).re * h * h;
                let ph = phi_pairs(w);
                let mk = |c: f64, s: f64| Block {
                    c,
                    b: p * (s * h),
                    d: q * (s * h),
                };
                [
                    mk(ph[0].0, ph[0].1),
                    mk(ph[1].0, ph[1].1),
                    mk(ph[2].0, ph[2].1),
                    mk(ph[3].0, ph[3].1),
                ]
            })
            .collect()
    }

    /// A reusable stepper for step size `dt`.
    pub fn stepper(&self, integrator: Integrator, dt: f64, linear_only: bool) -> Result<Stepper<'_>> {
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::Config(format!("dt = {dt} must be finite and nonzero")));
        }
        let half = self.blocks(0.5 * dt);
        let full = self.blocks(dt);
        let lin = |b: &[Block; 4]| b[0];
        let comb = |b: &[Block; 4], a1: f64, a2: f64, a3: f64| Block {
            c: a1 * b[1].c + a2 * b[2].c + a3 * b[3].c,
            b: b[1].b * a1 + b[2].b * a2 + b[3].b * a3,
            d: b[1].d * a1 + b[2].d * a2 + b[3].d * a3,
        };
        let etd = Etd {
            e_half: half.iter().map(lin).collect(),
            phi1_half: half.iter().map(|b| comb(b, 0.5 * dt, 0.0, 0.0)).collect(),
            e_full: full.iter().map(lin).collect(),
            f1: full.iter().map(|b| comb(b, dt, -3.0 * dt, 4.0 * dt)).collect(),
            f2: full.iter().map(|b| comb(b, 0.0, dt, -2.0 * dt)).collect(),
            f3: full.iter().map(|b| comb(b, 0.0, -dt, 4.0 * dt)).collect(),
        };
        let alpha = 1.5 / dt;
        let bdf = (0..self.p.len())
            .map(|j| {
                let (p, q) = (self.p[j], self.q[j]);
                let det = C::new(alpha * alpha, 0.0) - p * q;
                Block {
                    c: (C::new(alpha, 0.0) / det).re,
                    b: p / det,
                    d: q / det,
                }
            })
            .collect();
        Ok(Stepper {
            ev: self,
            integrator,
            dt,
            linear_only,
            etd,
            bdf,
            previous: None,
        })
    }
}

struct Etd {
    e_half: Vec<Block>,
    phi1_half: Vec<Block>,
    e_full: Vec<Block>,
    f1: Vec<Block>,
    f2: Vec<Block>,
    f3: Vec<Block>,
}

type Spec = (Vec<C>, Vec<C>);

pub struct Stepper<'a> {
    ev: &'a Evolver,
    integrator: Integrator,
    dt: f64,
    linear_only: bool,
    etd: Etd,
    bdf: Vec<Block>,
    /// `(u^{n-1}, N(u^{n-1}))` for BDF2.
    previous: Option<(Spec, Spec)>,
}

fn apply_blocks(m: &[Block], u: &Spec) -> Spec {
    let (mut a, mut b) = (vec![C::new(0.0, 0.0); m.len()], vec![C::new(0.0, 0.0); m.len()]);
    for j in 0..m.len() {
        let (x, y) = m[j].apply(u.0[j], u.1[j]);
        a[j] = x;
        b[j] = y;
    }
    (a, b)
}

fn add(u: &Spec, v: &Spec, s: f64) -> Spec {
    (
        u.0.iter().zip(&v.0).map(|(a, b)| a + b * s).collect(),
        u.1.iter().zip(&v.1).map(|(a, b)| a + b * s).collect(),
    )
}

impl Stepper<'_> {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn n(&self, u: &Spec) -> Spec {
        if self.linear_only {
            let z = vec![C::new(0.0, 0.0); u.0.len()];
            (z.clone(), z)
        } else {
            self.ev.nonlinear(&u.0, &u.1)
        }
    }

    fn etdrk4(&self, u: &Spec) -> Spec {
        let e = &self.etd;
        let nu = self.n(u);
        let eu = apply_blocks(&e.e_half, u);
        let a = add(&eu, &apply_blocks(&e.phi1_half, &nu), 1.0);
        let na = self.n(&a);
        let b = add(&eu, &apply_blocks(&e.phi1_half, &na), 1.0);
        let nb = self.n(&b);
        let two_nb_minus_nu = add(&nb, &add(&nb, &nu, -1.0), 1.0);
        let c = add(&apply_blocks(&e.e_half, &a), &apply_blocks(&e.phi1_half, &two_nb_minus_nu), 1.0);
        let nc = self.n(&c);
        let mut out = apply_blocks(&e.e_full, u);
        out = add(&out, &apply_blocks(&e.f1, &nu), 1.0);
        out = add(&out, &apply_blocks(&e.f2, &add(&na, &nb, 1.0)), 2.0);
        add(&out, &apply_blocks(&e.f3, &nc), 1.0)
    }

    fn advance_spec(&mut self, u: Spec) -> Spec {
        match self.integrator {
            Integrator::Etdrk4 => self.etdrk4(&u),
            Integrator::ImexBdf2 => {
                let nu = self.n(&u);
                let next = match self.previous.take() {
                    // Start-up step with ETDRK4.
                    None => self.etdrk4(&u),
                    Some((um1, num1)) => {
                        let a = 1.0 / (2.0 * self.dt);
                        // (4u - u_{-1})/(2 dt) + 2N(u) - N(u_{-1})
                        let mut r0 = vec![C::new(0.0, 0.0); u.0.len()];
                        let mut r1 = r0.clone();
                        for j in 0..u.0.len() {
                            r0[j] = (u.0[j] * 4.0 - um1.0[j]) * a + nu.0[j] * 2.0 - num1.0[j];
                            r1[j] = (u.1[j] * 4.0 - um1.1[j]) * a + nu.1[j] * 2.0 - num1.1[j];
                        }
                        apply_blocks(&self.bdf, &(r0, r1))
                    }
                };
                self.previous = Some((u, nu));
                next
            }
        }
    }

    /// Advance `w` by one step.
    pub fn step(&mut self, w: &WavePair) -> Result<WavePair> {
        let u = self.ev.to_spectral(w)?;
        let out = self.advance_spec(u);
        Ok(self.ev.to_physical(&out.0, &out.1))
    }
}

/// Outcome of the small-data global-existence test on initial data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalCriterionReport {
    pub hamiltonian: f64,
    /// `gamma^2 (1-gamma) sqrt(mu |c|) / eps^2`.
    pub threshold: f64,
    /// `inf_x (1 - (eps/gamma) zeta_0)`.
    pub inf_one_minus: f64,
    pub h_condition: bool,
    pub positivity_condition: bool,
    pub satisfied: bool,
    /// `sqrt(H / ((1-gamma) sqrt(mu |c|)))`, reported when the criterion holds.
    pub alpha: Option<f64>,
    pub gamma_over_eps: f64,
    /// `a = 0`, the degenerate case of the criterion.
    pub degenerate: bool,
}

pub fn global_threshold(p: &ModelParams) -> f64 {
    p.gamma * p.gamma * (1.0 - p.gamma) * (p.mu * p.c.abs()).sqrt() / (p.epsilon * p.epsilon)
}

pub fn check_global_criterion(p: &ModelParams, initial: &WavePair) -> Result<GlobalCriterionReport> {
    if p.b != p.d || !(p.b > 0.0) {
        return Err(Error::NotApplicable(format!("criterion needs b = d > 0 (b = {}, d = {})", p.b, p.d)));
    }
    if p.c >= 0.0 {
        return Err(Error::NotApplicable(format!("criterion needs c < 0 (c = {})", p.c)));
    }
    if p.a > 0.0 {
        return Err(Error::NotApplicable(format!("criterion needs a <= 0 (a = {})", p.a)));
    }
    let h = hamiltonian_h(p, initial)?;
    let threshold = global_threshold(p);
    let ratio = p.epsilon / p.gamma;
    let inf_one_minus = initial.xi.values().iter().map(|z| 1.0 - ratio * z).fold(f64::INFINITY, f64::min);
    let h_condition = h.abs() < threshold;
    let positivity_condition = inf_one_minus > 0.0;
    let satisfied = h_condition && positivity_condition;
    let alpha = satisfied.then(|| (h.max(0.0) / ((1.0 - p.gamma) * (p.mu * p.c.abs()).sqrt())).sqrt());
    Ok(GlobalCriterionReport {
        hamiltonian: h,
        threshold,
        inf_one_minus,
        h_condition,
        positivity_condition,
        satisfied,
        alpha,
        gamma_over_eps: p.gamma / p.epsilon,
        degenerate: p.a == 0.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub integrator: Integrator,
    pub t_final: f64,
    /// `None` uses [`Evolver::suggest_dt`].
    pub dt: Option<f64>,
    /// Time between stored snapshots; `None` stores none.
    pub snapshot_every: Option<f64>,
    /// Steps between monitor samples.
    pub monitor_every: usize,
    /// Abort when the a-priori bound is exceeded.
    pub enforce_apriori: bool,
    /// Drop the nonlinear terms.
    pub linear_only: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            integrator: Integrator::Etdrk4,
            t_final: 1.0,
            dt: None,
            snapshot_every: None,
            monitor_every: 1,
            enforce_apriori: true,
            linear_only: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorSample {
    pub t: f64,
    pub hamiltonian: Option<f64>,
    pub h_drift: Option<f64>,
    pub sup_zeta: f64,
    pub min_one_minus: f64,
    /// `(||zeta||_{H^1}^2 + ||v||_{H^1}^2)^{1/2}`.
    pub h1_norm: f64,
    pub mass_zeta: f64,
    pub mass_v: f64,
    /// Spectral energy in the top third of the retained band, relative to the total.
    pub high_mode_fraction: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvolutionState {
    pub t: f64,
    #[serde(skip)]
    pub fields: Option<WavePair>,
    pub h_value: Option<f64>,
    /// Running maximum of `|H(t) - H(0)| / max(|H(0)|, 1e-15)`.
    pub h_drift: Option<f64>,
    /// Running minimum over `x` and `t` of `1 - (eps/gamma) zeta`.
    pub min_one_minus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub family: Family,
    pub integrator: Integrator,
    pub dt: f64,
    pub steps: usize,
    pub t_final: f64,
    pub h0: Option<f64>,
    pub max_h_drift: Option<f64>,
    pub max_sup_zeta: f64,
    pub min_one_minus: f64,
    pub max_mass_drift: f64,
    pub max_high_mode_fraction: f64,
    pub criterion: Option<GlobalCriterionReport>,
    pub apriori_bound_held: Option<bool>,
    pub monitors: Vec<MonitorSample>,
}

pub struct Trajectory {
    pub state: EvolutionState,
    pub final_fields: WavePair,
    pub summary: TrajectorySummary,
    pub snapshots: Vec<(f64, WavePair)>,
}

impl Evolver {
    fn monitor(&self, t: f64, w: &WavePair, h0: Option<f64>) -> Result<MonitorSample> {
        let h = if self.hamiltonian {
            Some(hamiltonian_h(&self.params, w)?)
        } else {
            None
        };
        let ratio = self.params.epsilon / self.params.gamma;
        let (z, v) = self.to_spectral(w)?;
        let n = z.len();
        let scale = self.grid.dx() / n as f64;
        let mut h1 = 0.0;
        let (mut total, mut top) = (0.0, 0.0);
        for (j, &k) in self.grid.k().iter().enumerate() {
            let e = z[j].norm_sqr() + v[j].norm_sqr();
            h1 += (1.0 + k * k) * e;
            total += e;
            let m = signed_index(j, n).unsigned_abs() as usize;
            if 9 * m >= 2 * n && self.mask[j] {
                top += e;
            }
        }
        Ok(MonitorSample {
            t,
            hamiltonian: h,
            h_drift: h.zip(h0).map(|(h, h0)| (h - h0).abs() / h0.abs().max(1e-15)),
            sup_zeta: w.xi.sup_norm(),
            min_one_minus: w.xi.values().iter().map(|z| 1.0 - ratio * z).fold(f64::INFINITY, f64::min),
            h1_norm: (h1 * scale).sqrt(),
            mass_zeta: w.xi.integral(),
            mass_v: w.nu.integral(),
            high_mode_fraction: if total > 0.0 { top / total } else { 0.0 },
        })
    }

    /// Integrate from `initial` to `cfg.t_final`.
    pub fn run(&self, initial: &WavePair, cfg: &EvolutionConfig) -> Result<Trajectory> {
        if !(cfg.t_final > 0.0 && cfg.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final = {} must be positive", cfg.t_final)));
        }
        if cfg.monitor_every == 0 {
            return Err(Error::Config("monitor_every must be at least 1".into()));
        }
        let dt0 = cfg.dt.unwrap_or_else(|| self.suggest_dt()).min(cfg.t_final);
        if !(dt0 > 0.0) {
            return Err(Error::Config(format!("dt = {dt0} must be positive")));
        }
        let steps = (cfg.t_final / dt0 - 1e-9).ceil().max(1.0) as usize;
        let dt = cfg.t_final / steps as f64;
        let criterion = if self.hamiltonian && self.params.c < 0.0 && !cfg.linear_only {
            Some(check_global_criterion(&self.params, initial)?)
        } else {
            None
        };
        let alpha = criterion.as_ref().and_then(|c| c.alpha);
        let mut w = self.dealias(initial)?;
        let first = self.monitor(0.0, &w, None)?;
        let h0 = first.hamiltonian;
        let first = MonitorSample {
            h_drift: h0.map(|_| 0.0),
            ..first
        };
        let (m0z, m0v) = (first.mass_zeta, first.mass_v);
        let mut monitors = vec![first];
        let mut snapshots = Vec::new();
        let mut next_snap = cfg.snapshot_every;
        if cfg.snapshot_every.is_some() {
            snapshots.push((0.0, w.clone()));
        }
        let mut stepper = self.stepper(cfg.integrator, dt, cfg.linear_only)?;
        let mut bound_held = alpha.map(|_| true);
        for s in 1..=steps {
            w = stepper.step(&w)?;
            let t = s as f64 * dt;
            let finite = w.xi.values().iter().chain(w.nu.values()).all(|v| v.is_finite());
            if !finite {
                return Err(Error::BlowUp {
                    t,
                    reason: "non-finite field values".into(),
                });
            }
            if let Some(a) = alpha {
                let sup = w.xi.sup_norm();
                if sup > a {
                    bound_held = Some(false);
                    if cfg.enforce_apriori {
                        return Err(Error::AprioriViolated { t, sup, alpha: a });
                    }
                }
            }
            if s % cfg.monitor_every == 0 || s == steps {
                monitors.push(self.monitor(t, &w, h0)?);
            }
            if let (Some(every), Some(at)) = (cfg.snapshot_every, next_snap) {
                if t >= at - 1e-9 * dt {
                    snapshots.push((t, w.clone()));
                    next_snap = Some(at + every);
                }
            }
        }
        let max_h_drift = h0.map(|_| monitors.iter().filter_map(|m| m.h_drift).fold(0.0, f64::max));
        let min_one_minus = monitors.iter().map(|m| m.min_one_minus).fold(f64::INFINITY, f64::min);
        let summary = TrajectorySummary {
            family: self.family,
            integrator: cfg.integrator,
            dt,
            steps,
            t_final: cfg.t_final,
            h0,
            max_h_drift,
            max_sup_zeta: monitors.iter().map(|m| m.sup_zeta).fold(0.0, f64::max),
            min_one_minus,
            max_mass_drift: monitors
                .iter()
                .map(|m| (m.mass_zeta - m0z).abs().max((m.mass_v - m0v).abs()))
                .fold(0.0, f64::max),
            max_high_mode_fraction: monitors.iter().map(|m| m.high_mode_fraction).fold(0.0, f64::max),
            criterion,
            apriori_bound_held: bound_held,
            monitors,
        };
        let last = summary.monitors.last().expect("at least one monitor");
        let state = EvolutionState {
            t: cfg.t_final,
            fields: Some(w.clone()),
            h_value: last.hamiltonian,
            h_drift: max_h_drift,
            min_one_minus,
        };
        Ok(Trajectory {
            state,
            final_fields: w,
            summary,
            snapshots,
        })
    }
}

/// One-off right-hand side evaluation.
pub fn rhs(family: Family, p: &ModelParams, state: &WavePair) -> Result<WavePair> {
    Evolver::new(family, p, state.grid())?.rhs(state)
}

/// Relative L2 distance between `w` and `reference`.
pub fn relative_l2_error(w: &WavePair, reference: &WavePair) -> Result<f64> {
    let d = w.axpy(-1.0, reference)?;
    Ok((d.dot(&d)? / reference.dot(reference)?).sqrt())
}
