//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per criterion,
//! preceded by its sub-checks, and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use interwave::decay::{
    fit_algebraic_tail, fit_exponential_tail, kernel_fft_oracle, kernel_k, kernel_k1, kernel_k2, kernel_k3, DecayReport,
    FitOptions, Normalization,
};
use interwave::decay::kernels::{k1_symbol, k2_alpha, k2_symbol, k3_symbol, k_symbol};
use interwave::evolution::{relative_l2_error, EvolutionConfig, Evolver, Integrator};
use interwave::functionals::{energy_e, estimate_i_lambda, quadratic_form_check, Mu2Mode};
use interwave::params::{eta_roots, Family};
use interwave::solvers::{
    assemble_bo_pair, constrained_minimize, continue_in_c, continue_in_mu2, newton_solve, petviashvili_ground_state,
    solve_bfd_reduced, system_residual, SolitaryBranch, SolverConfig,
};
use interwave::{Depth, Grid, ModelParams, RealField, Result, WavePair};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL_ADMISSIBILITY: f64 = 1e-6;
/// Relative tolerance for values quoted to four significant figures.
const TOL_QUOTED: f64 = 5e-4;
const TOL_BRUTE_FORCE: f64 = 1e-10;
const N_PARAM_DRAWS: usize = 200;
const N_FIELD_DRAWS: usize = 1000;
const TOL_GROUND_RESIDUAL: f64 = 1e-10;
const TOL_STABILIZER: f64 = 1e-12;
const TOL_SCALING: f64 = 1e-8;
const TOL_SYSTEM_RESIDUAL: f64 = 1e-9;
const TOL_BRANCH_LIMIT: f64 = 0.05;
const TOL_SIGN_SYMMETRY: f64 = 1e-9;
const TOL_SCALING_EXPONENT: f64 = 0.01;
const TOL_TWO_SOLVERS: f64 = 1e-4;
const TOL_KERNEL: f64 = 1e-5;
const TOL_PLATEAU: f64 = 0.03;
const TOL_PLATEAU_FLATNESS: f64 = 0.1;
const TOL_RATE: f64 = 0.1;
const TOL_H_DRIFT: f64 = 1e-8;
const TOL_SHAPE: f64 = 1e-3;
const ORDER_RANGE: (f64, f64) = (3.7, 4.3);
const SEED: u64 = 20_240_611;

struct Criterion {
    checks: Vec<(String, bool, String)>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push((name.into(), ok, detail.into()));
    }

    fn near(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.check(name, err <= tol, format!("got {got:.10}, oracle {want:.10}, |diff| {err:.2e} (tol {tol:.0e})"));
    }

    /// Agreement with a value quoted to a few significant figures.
    fn quoted(&mut self, name: &str, got: f64, quoted: f64) {
        let rel = (got / quoted - 1.0).abs();
        self.check(name, rel <= TOL_QUOTED, format!("got {got:.10}, quoted {quoted}, rel diff {rel:.2e} (tol {TOL_QUOTED:.0e})"));
    }

    fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.1)
    }
}

fn bo_params() -> ModelParams {
    ModelParams::ilw(0.5, 0.1, 0.1, Depth::Infinite, 2.0)
}

fn p2() -> ModelParams {
    ModelParams::bfd(0.5, 0.1, 0.1, Depth::Finite(1.0), -10.0, 61.0 / 6.0, -10.0)
}

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

/// Relative sup distance `|a - b| / |b|`.
fn rel_sup(a: &RealField, b: &RealField) -> f64 {
    a.sub(b).unwrap().sup_norm() / b.sup_norm()
}

fn negate_nu(w: &WavePair) -> WavePair {
    WavePair::new(w.xi.clone(), w.nu.scale(-1.0)).unwrap()
}

/// Waves shared between criteria.
struct Waves {
    bo_pair: WavePair,
    bo_branch: Option<SolitaryBranch>,
    bo_branch_neg: Option<SolitaryBranch>,
    depth_branch: Option<SolitaryBranch>,
    bfd_inf: Option<WavePair>,
    bfd_finite: Option<WavePair>,
}

fn criterion_1() -> Result<Criterion> {
    let mut c = Criterion::new();
    let p = ModelParams::p1();
    let (g, mu, a, b, cc): (f64, f64, f64, f64, f64) = (0.5, 0.1, -1.0 / 12.0, 0.25, -1.0 / 12.0);
    c.check("P1 accepted", p.validate_bfd().is_ok(), "sum rule, signs and ranges");

    let speed = (1.0 - g) * f64::min(1.0, cc.abs() / b);
    c.near("speed_bound", p.speed_window()?, speed, TOL_ADMISSIBILITY);
    c.near("speed_bound = 1/6", p.speed_window()?, 1.0 / 6.0, TOL_ADMISSIBILITY);

    let beta0 = -(a - 1.0 / (g * g)) / g;
    let f_min = 1.0 / g - 1.0 / (4.0 * g.powi(4) * beta0);
    let fm = p.f_min(0.0)?;
    c.near("beta0_tilde(0) = 49/6", fm.beta0_tilde, 49.0 / 6.0, TOL_ADMISSIBILITY);
    c.near("f_min(0)", fm.f_min, f_min, TOL_ADMISSIBILITY);
    c.quoted("f_min(0) ~ 1.51020", fm.f_min, 1.51020);

    let f = |x: f64| 1.0 / g - mu.sqrt() / (g * g) * x.abs() - mu * (b * 0.0 + (a - 1.0 / (g * g)) / g) * x * x;
    let x0 = 1.0 / (2.0 * mu.sqrt() * g * g * beta0);
    let n = 2_000_000;
    let brute = (0..=n).map(|i| f(10.0 * x0 * i as f64 / n as f64)).fold(f64::INFINITY, f64::min);
    c.near("f_min vs brute-force min of f on [0, 10 x0]", fm.f_min, brute, TOL_BRUTE_FORCE);

    let threshold = mu / (g * g * f_min).powi(2);
    c.near("mu2 threshold", p.mu2_threshold(0.0)?, threshold, TOL_ADMISSIBILITY);
    c.quoted("mu2 threshold ~ 0.7014", p.mu2_threshold(0.0)?, 0.7014);

    let m0 = 4.0 * (1.0 - b * 0.0 - a * g * g) - 1.0;
    c.near("M(0)", p.m_value(0.0), m0, TOL_ADMISSIBILITY);
    c.quoted("M(0) ~ 3.0833", p.m_value(0.0), 3.0833);

    let beta1 = (mu / g) * (1.0 / (g * g) - a);
    let ell = mu.sqrt() / (beta1 * g * g);
    let c_k = 1.0 / (beta1 * g);
    c.near("4 c_K - ell^2", p.kernel_discriminant(), 4.0 * c_k - ell * ell, TOL_ADMISSIBILITY);
    c.quoted("4 c_K - ell^2 ~ 7.40", p.kernel_discriminant(), 7.40);

    let rep = p.admissibility(0.1)?;
    c.check("omega = 0.1 admissible", rep.admissible, format!("{rep:?}"));
    let rep = p.admissibility(0.17)?;
    c.check("omega = 0.17 rejected", !rep.admissible, format!("in window {}", rep.in_speed_window));
    Ok(c)
}

fn band_limited(grid: &Grid, jmax: usize, rng: &mut impl Rng) -> RealField {
    let n = grid.n();
    let mut s = vec![Complex64::new(0.0, 0.0); n];
    s[0] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
    for j in 1..=jmax {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        s[j] = z;
        s[n - j] = z.conj();
    }
    let f = RealField::from_spectrum(grid, s);
    let m = f.sup_norm();
    f.scale(1.0 / m)
}

/// A random admissible B-FD set with `b = d`, speed and depth.
fn random_admissible(rng: &mut impl Rng) -> (ModelParams, f64) {
    loop {
        let gamma = rng.gen_range(0.1..0.9);
        let epsilon = rng.gen_range(0.01..0.5);
        let mu = rng.gen_range(0.01..1.0);
        let b = rng.gen_range(1.0 / 6.0..2.0);
        let t = rng.gen_range(0.05..0.95);
        let spread = 2.0 * b - 1.0 / 3.0;
        let (a, c) = (-t * spread, -(1.0 - t) * spread);
        let p = ModelParams::bfd(gamma, epsilon, mu, Depth::Infinite, a, b, c);
        let Ok(bound) = p.speed_window() else { continue };
        let omega = rng.gen_range(-0.95..0.95) * bound;
        let p = if rng.gen_bool(0.5) {
            p
        } else {
            match p.mu2_threshold(omega) {
                Ok(th) => p.with_mu2(Depth::Finite(th * rng.gen_range(1.2..20.0))),
                Err(_) => continue,
            }
        };
        if p.admissibility(omega).is_ok_and(|r| r.admissible) {
            return (p, omega);
        }
    }
}

fn criterion_2() -> Result<Criterion> {
    let mut c = Criterion::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let qgrid = Grid::new(60.0, 2048)?;
    let fgrid = Grid::new(20.0, 256)?;
    let (mut worst_global, mut worst_split, mut worst_e) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let (mut bad_global, mut bad_split, mut bad_e) = (0, 0, 0);
    let per_draw = N_FIELD_DRAWS / N_PARAM_DRAWS;
    for _ in 0..N_PARAM_DRAWS {
        let (p, omega) = random_admissible(&mut rng);
        let mode = Mu2Mode::of(&p);
        let q = quadratic_form_check(&p, omega, &qgrid, mode)?;
        worst_global = worst_global.min(q.global_min);
        worst_split = worst_split.min(q.split_global_min);
        bad_global += usize::from(!(q.global_min > 0.0));
        bad_split += usize::from(!(q.split_global_min > 0.0));
        for _ in 0..per_draw {
            let jmax = rng.gen_range(1..fgrid.n() / 3);
            let w = WavePair::new(band_limited(&fgrid, jmax, &mut rng), band_limited(&fgrid, jmax, &mut rng))?;
            let e = energy_e(&p, omega, &w, mode)?;
            worst_e = worst_e.min(e);
            bad_e += usize::from(!(e >= 0.0));
        }
    }
    c.check(
        format!("{N_PARAM_DRAWS} admissible draws: global_min > 0"),
        bad_global == 0,
        format!("{bad_global} failures, smallest global_min {worst_global:.4e}"),
    );
    c.check(
        format!("{N_PARAM_DRAWS} admissible draws: split bound > 0"),
        bad_split == 0,
        format!("{bad_split} failures, smallest split min {worst_split:.4e}"),
    );
    c.check(
        format!("{N_FIELD_DRAWS} band-limited pairs: E >= 0"),
        bad_e == 0,
        format!("{bad_e} failures, smallest E {worst_e:.4e}"),
    );
    let p = ModelParams::p1();
    let outside = 1.05 * p.speed_window()?;
    let q = quadratic_form_check(&p, outside, &qgrid, Mu2Mode::Infinite)?;
    c.check(
        format!("P1 omega = {outside:.4} (outside window): global_min < 0 detected"),
        q.global_min < 0.0,
        format!("global_min {:.4e}", q.global_min),
    );
    c.check(
        format!("P1 omega = {outside:.4} (outside window): split bound < 0 detected"),
        q.split_global_min < 0.0,
        format!("split min {:.4e}", q.split_global_min),
    );
    Ok(c)
}

fn criterion_3(waves: &mut Option<Waves>) -> Result<Criterion> {
    let mut c = Criterion::new();
    let grid = Grid::new(200.0, 4096)?;
    let p = bo_params();
    let gs = petviashvili_ground_state(&p, &grid, &cfg())?;
    c.check(
        "Petviashvili residual",
        gs.residual <= TOL_GROUND_RESIDUAL,
        format!("{:.3e} after {} iterations", gs.residual, gs.iterations),
    );
    c.check(
        "|S - 1|",
        (gs.stabilizer - 1.0).abs() <= TOL_STABILIZER,
        format!("{:.3e}", (gs.stabilizer - 1.0).abs()),
    );
    c.check("nu0 positive and even", gs.nu0.min() > 0.0 && gs.nu0.evenness_defect() == 0.0, format!("min {:.3e}", gs.nu0.min()));
    for s in [2.0, 0.5] {
        let mut ps = p.clone();
        ps.epsilon = p.epsilon / s;
        let gss = petviashvili_ground_state(&ps, &grid, &cfg())?;
        let err = rel_sup(&gs.nu0.scale(s), &gss.nu0);
        c.check(
            format!("scaling eta -> eta/s^2 vs s nu0, s = {s}"),
            err <= TOL_SCALING,
            format!("relative sup error {err:.3e} (eta {:.5e} -> {:.5e})", gs.eta, gss.eta),
        );
    }
    *waves = Some(Waves {
        bo_pair: assemble_bo_pair(&p, &gs.nu0),
        bo_branch: None,
        bo_branch_neg: None,
        depth_branch: None,
        bfd_inf: None,
        bfd_finite: None,
    });
    Ok(c)
}

fn criterion_5(waves: &mut Waves) -> Result<Criterion> {
    let mut c = Criterion::new();
    let p = bo_params();
    let c_max = 0.05;
    let branch = continue_in_c(Family::Bo, &p, &waves.bo_pair, c_max, &cfg())?;
    let neg = continue_in_c(Family::Bo, &p, &waves.bo_pair, -c_max, &cfg())?;
    let nu0 = &branch.waves[0].nu;
    let dist: Vec<f64> = branch.waves.iter().map(|w| rel_sup(&w.nu, nu0)).collect();
    c.check(
        format!("branch reached c = {c_max}"),
        branch.truncated.is_none() && branch.parameter_values.last() == Some(&c_max),
        format!("{} samples, truncated {:?}", branch.len(), branch.truncated),
    );
    c.check(
        "smallest-|c| sample within 5% of nu0",
        dist.len() > 1 && dist[1] <= TOL_BRANCH_LIMIT,
        format!("c = {:.4}: |nu_c - nu0|/|nu0| = {:.3e}", branch.parameter_values[1], dist.get(1).copied().unwrap_or(f64::NAN)),
    );
    let monotone = dist.windows(2).all(|d| d[1] > d[0]);
    c.check(
        "|nu_c - nu0| decreases to 0 as c -> 0",
        monotone && dist[0] == 0.0,
        format!(
            "distances {:?}",
            dist.iter().zip(&branch.parameter_values).map(|(d, c)| format!("{c:.3}:{d:.2e}")).collect::<Vec<_>>()
        ),
    );

    let c1 = branch.parameter_values[1];
    let w1 = &branch.waves[1];
    let (flipped, _) = newton_solve(Family::Bo, &p, c1, &negate_nu(&waves.bo_pair), &cfg())?;
    let lit = flipped.axpy(-1.0, &negate_nu(w1))?.sup_norm();
    c.check(
        format!("(xi_c1, nu_c1) = (xi_c, -nu_c) at c = {c1:.4}"),
        lit <= TOL_SIGN_SYMMETRY,
        format!("sup difference {lit:.3e}"),
    );
    match neg.find(-c1) {
        Some(i) => {
            let d = flipped.axpy(-1.0, &negate_nu(&neg.waves[i]))?.sup_norm();
            c.check(
                format!("(xi_c1, nu_c1) = (xi_-c, -nu_-c) at c = {c1:.4}"),
                d <= TOL_SIGN_SYMMETRY,
                format!("sup difference {d:.3e}"),
            );
        }
        None => c.check("negative branch hits -c1", false, format!("values {:?}", neg.parameter_values)),
    }
    let stations = [400.0, 100.0, 25.0];
    let depth = continue_in_mu2(&p, &waves.bo_pair, 25.0, &stations, &cfg())?;
    let mut d = Vec::new();
    for m in stations {
        let i = depth.find(1.0 / m.sqrt()).expect("station on branch");
        d.push(depth.waves[i].nu.sub(&waves.bo_pair.nu)?.sup_norm());
    }
    c.check(
        "|nu_{0,mu2} - nu0| decreases over mu2 = 25, 100, 400",
        d[0] < d[1] && d[1] < d[2],
        format!("mu2 = 400: {:.3e}, 100: {:.3e}, 25: {:.3e}", d[0], d[1], d[2]),
    );
    waves.bo_branch = Some(branch);
    waves.bo_branch_neg = Some(neg);
    waves.depth_branch = Some(depth);
    Ok(c)
}

fn criterion_4(waves: &mut Waves) -> Result<Criterion> {
    let mut c = Criterion::new();
    let bo = bo_params();
    let record = |c: &mut Criterion, name: String, r: f64| {
        c.check(name, r <= TOL_SYSTEM_RESIDUAL, format!("residual {r:.3e}"));
    };
    let r = system_residual(Family::Bo, &bo, 0.0, &waves.bo_pair)?;
    record(&mut c, "BO ground-state pair".into(), r);
    for branch in [&waves.bo_branch, &waves.bo_branch_neg].into_iter().flatten() {
        let worst = (0..branch.len())
            .map(|i| system_residual(Family::Bo, &bo, branch.parameter_values[i], &branch.waves[i]))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        record(&mut c, format!("BO branch to c = {:.3} ({} pairs)", branch.parameter_values.last().unwrap(), branch.len()), worst);
    }
    if let Some(branch) = &waves.depth_branch {
        let mut worst = 0.0_f64;
        for i in 1..branch.len() {
            let pi = bo.with_mu2(branch.mu2_at(i));
            worst = worst.max(system_residual(Family::Ilw, &pi, 0.0, &branch.waves[i])?);
        }
        record(&mut c, format!("ILW depth branch ({} pairs)", branch.len() - 1), worst);
    }
    let p1 = ModelParams::p1();
    let g = Grid::new(200.0, 4096)?;
    let inf = solve_bfd_reduced(&p1, 0.1, &g, Mu2Mode::Infinite, &cfg())?;
    record(&mut c, "B-FD mu2 = inf, omega = 0.1".into(), system_residual(Family::BfdInf, &p1, 0.1, &inf.pair)?);
    let fin_p = p1.with_mu2(Depth::Finite(4.0));
    let gf = Grid::new(30.0, 1024)?;
    let fin = solve_bfd_reduced(&fin_p, 0.0, &gf, Mu2Mode::Finite, &cfg())?;
    record(&mut c, "B-FD mu2 = 4, omega = 0".into(), system_residual(Family::BfdFinite, &fin_p, 0.0, &fin.pair)?);
    let fin_w = solve_bfd_reduced(&fin_p, 0.1, &gf, Mu2Mode::Finite, &cfg())?;
    record(&mut c, "B-FD mu2 = 4, omega = 0.1".into(), system_residual(Family::BfdFinite, &fin_p, 0.1, &fin_w.pair)?);
    waves.bfd_inf = Some(inf.pair);
    waves.bfd_finite = Some(fin.pair);
    Ok(c)
}

fn criterion_6() -> Result<Criterion> {
    let mut c = Criterion::new();
    let p = ModelParams::p1();
    let omega = 0.1;
    let g = Grid::new(40.0, 1024)?;
    let mode = Mu2Mode::Infinite;
    let base = estimate_i_lambda(&p, omega, 1.0, &g, mode, &cfg())?;
    c.check("I_1 > 0", base.value > 0.0, format!("I_1 = {:.8}", base.value));
    let mut values = vec![(1.0, base.value)];
    for tau in [0.5, 2.0, 4.0] {
        let e = estimate_i_lambda(&p, omega, tau, &g, mode, &cfg())?;
        let ratio = e.value / base.value;
        let want = tau.powf(2.0 / 3.0);
        c.check(
            format!("I_{{tau lambda}} / I_lambda = tau^(2/3), tau = {tau}"),
            (ratio / want - 1.0).abs() <= TOL_SCALING_EXPONENT,
            format!("ratio {ratio:.8}, tau^(2/3) {want:.8}"),
        );
        values.push((tau, e.value));
    }
    let i_half = values[1].1;
    c.check(
        "strict subadditivity I_1 < I_0.5 + I_0.5",
        base.value < 2.0 * i_half,
        format!("{:.6} < {:.6}", base.value, 2.0 * i_half),
    );
    let m = constrained_minimize(&p, omega, 1.0, &g, mode, &cfg())?;
    c.check("K > 0", m.lagrange_k > 0.0, format!("K = {:.10}, least-squares K = {:.10}", m.lagrange_k, m.lagrange_k_lsq));
    let red = solve_bfd_reduced(&p, omega, &g, mode, &cfg())?;
    let w = m.solitary_wave();
    let (ex, en) = (rel_sup(&w.xi, &red.pair.xi), rel_sup(&w.nu, &red.pair.nu));
    c.check(
        "K-rescaled minimiser vs reduced-equation solution",
        ex.max(en) <= TOL_TWO_SOLVERS,
        format!("relative sup error xi {ex:.3e}, nu {en:.3e}"),
    );
    Ok(c)
}

fn criterion_7() -> Result<Criterion> {
    let mut c = Criterion::new();
    let grid = Grid::new(1024.0, 1 << 21)?;
    let p1 = ModelParams::p1();
    let bo = bo_params();
    let bo4 = bo.with_mu2(Depth::Finite(4.0));
    let at = |f: &RealField, x: f64| f.values()[grid.index_of(x).expect("grid node")];

    let oracle = kernel_fft_oracle(&k_symbol(&p1, &grid)?, Normalization::Unitary)?;
    for x in [1.0, 2.0, 5.0] {
        c.near(&format!("K({x}) vs FFT"), kernel_k(&p1, x)?, at(&oracle, x), TOL_KERNEL);
    }
    let sigma = 1.3;
    let oracle = kernel_fft_oracle(&k1_symbol(sigma, &grid), Normalization::Plain)?;
    for x in [0.5, 1.0, 2.0] {
        c.near(&format!("K1({x}), sigma = {sigma}, vs FFT"), kernel_k1(sigma, x), at(&oracle, x), TOL_KERNEL);
    }
    let oracle = kernel_fft_oracle(&k2_symbol(&bo, &grid), Normalization::Unitary)?;
    for x in [1.0, 2.0, 5.0] {
        c.near(&format!("K2({x}) vs FFT"), kernel_k2(&bo, x)?, at(&oracle, x), TOL_KERNEL);
    }
    let oracle = kernel_fft_oracle(&k3_symbol(&bo4, &grid)?, Normalization::Unitary)?;
    for x in [1.0, 2.0, 4.0] {
        let s = kernel_k3(&bo4, x, 1e-12, 1 << 16)?;
        c.near(&format!("K3({x}), mu2 = 4, vs FFT"), s.value, at(&oracle, x), TOL_KERNEL);
    }

    let rates = p1.decay_rates(0);
    let plateau = -2.0 * rates.ell / (rates.c_k * rates.c_k * (2.0 * PI).sqrt());
    c.quoted("K plateau constant ~ -0.2061", plateau, -0.2061);
    let x = 400.0;
    let got = x * x * kernel_k(&p1, x)?;
    c.check(
        format!("x^2 K(x) at x = {x}"),
        (got / plateau - 1.0).abs() <= TOL_PLATEAU,
        format!("{got:.6} vs {plateau:.6}, rel {:.2e}", (got / plateau - 1.0).abs()),
    );
    let alpha = k2_alpha(&bo);
    let plateau2 = 2f64.sqrt() / (PI.sqrt() * alpha * alpha);
    c.quoted("K2 plateau constant ~ 0.3192", plateau2, 0.3192);
    let got = x * x * kernel_k2(&bo, x)?;
    c.check(
        format!("x^2 K2(x) at x = {x}"),
        (got / plateau2 - 1.0).abs() <= TOL_PLATEAU,
        format!("{got:.6} vs {plateau2:.6}, rel {:.2e}", (got / plateau2 - 1.0).abs()),
    );
    Ok(c)
}

fn describe(r: &DecayReport) -> String {
    format!(
        "measured {:.5}, predicted {:?}, rel err {:?}, window ({:.1}, {:.1}), {} pts, core {:.3}, dev {:?}, r^2 {:.5}, rate cap {:?}{}",
        r.measured,
        r.predicted,
        r.rel_error.map(|e| format!("{e:.3e}")),
        r.fit_window.0,
        r.fit_window.1,
        r.n_points,
        r.core_width,
        r.max_deviation.map(|d| format!("{d:.3e}")),
        r.r_squared,
        r.resolvable_rate_cap.map(|v| format!("{v:.3}")),
        r.note.as_ref().map(|n| format!(", note: {n}")).unwrap_or_default()
    )
}

fn plateau_check(c: &mut Criterion, name: &str, f: &RealField) -> Result<()> {
    let r = fit_algebraic_tail(f, &FitOptions::default())?;
    let dev = r.max_deviation.unwrap_or(f64::INFINITY);
    c.check(name, !r.flagged && dev < TOL_PLATEAU_FLATNESS, describe(&r));
    Ok(())
}

fn rate_check(c: &mut Criterion, name: &str, f: &RealField, predicted: f64) -> Result<()> {
    let r = fit_exponential_tail(f, &FitOptions::predicting(predicted))?;
    let ok = !r.flagged && r.rel_error.is_some_and(|e| e <= TOL_RATE);
    c.check(name, ok, describe(&r));
    Ok(())
}

fn criterion_8(waves: &Waves) -> Result<Criterion> {
    let mut c = Criterion::new();
    plateau_check(&mut c, "BO system c = 0: x^2 nu plateau", &waves.bo_pair.nu)?;
    if let Some(b) = &waves.bo_branch {
        let i = b.len() - 1;
        let name = format!("BO system c = {:.3}", b.parameter_values[i]);
        plateau_check(&mut c, &format!("{name}: x^2 nu plateau"), &b.waves[i].nu)?;
        plateau_check(&mut c, &format!("{name}: x^2 xi plateau"), &b.waves[i].xi)?;
    }
    if let Some(w) = &waves.bfd_inf {
        plateau_check(&mut c, "B-FD mu2 = inf, omega = 0.1: x^2 nu plateau", &w.nu)?;
        plateau_check(&mut c, "B-FD mu2 = inf, omega = 0.1: x^2 xi plateau", &w.xi)?;
    }

    let p1f = ModelParams::p1().with_mu2(Depth::Finite(4.0));
    if let Some(w) = &waves.bfd_finite {
        rate_check(&mut c, "P1 B-FD mu2 = 4, omega = 0: nu rate vs sigma", &w.nu, p1f.sigma()?)?;
    }
    let p2 = p2();
    let g2 = Grid::new(60.0, 1024)?;
    let w2 = solve_bfd_reduced(&p2, 0.0, &g2, Mu2Mode::Finite, &cfg())?;
    c.check("P2 wave residual", w2.residual <= TOL_SYSTEM_RESIDUAL, format!("{:.3e}", w2.residual));
    rate_check(&mut c, "P2 B-FD mu2 = 1, omega = 0: nu rate vs sigma", &w2.pair.nu, p2.sigma()?)?;

    let bo = bo_params();
    let g = Grid::new(40.0, 4096)?;
    let gs = petviashvili_ground_state(&bo, &g, &cfg())?;
    let depth = continue_in_mu2(&bo, &assemble_bo_pair(&bo, &gs.nu0), 4.0, &[4.0], &cfg())?;
    let i = depth.find(0.5).expect("mu2 = 4 station");
    let p4 = bo.with_mu2(Depth::Finite(4.0));
    let w = &depth.waves[i];
    c.check(
        "ILW mu2 = 4 wave residual",
        system_residual(Family::Ilw, &p4, 0.0, w)? <= TOL_SYSTEM_RESIDUAL,
        format!("{:.3e}", system_residual(Family::Ilw, &p4, 0.0, w)?),
    );
    let eta1 = eta_roots(p4.theta().expect("finite depth"), 1)[0];
    rate_check(&mut c, "ILW mu2 = 4, c = 0: nu rate vs eta1/sqrt(mu2)", &w.nu, eta1 / 2.0)?;
    Ok(c)
}

fn bump(g: &Grid, amp: f64) -> WavePair {
    WavePair {
        xi: RealField::from_fn(g, |x| amp * (-x * x / 4.0).exp()),
        nu: RealField::from_fn(g, |x| amp * 0.5 * x * (-x * x / 4.0).exp()),
    }
}

fn criterion_9() -> Result<Criterion> {
    let mut c = Criterion::new();
    let p = ModelParams::p1();
    let g = Grid::new(40.0, 512)?;
    let ev = Evolver::new(Family::BfdInf, &p, &g)?;
    let run = ev.run(
        &bump(&g, 0.1),
        &EvolutionConfig {
            t_final: 50.0,
            dt: Some(0.02),
            monitor_every: 10,
            ..EvolutionConfig::default()
        },
    )?;
    let s = &run.summary;
    let drift = s.max_h_drift.unwrap_or(f64::INFINITY);
    c.check("H drift over T = 50 (P1, b = d)", drift <= TOL_H_DRIFT, format!("max relative drift {drift:.3e}, H0 {:?}", s.h0));
    match &s.criterion {
        Some(cr) => {
            c.check(
                "initial data satisfy the small-data criterion",
                cr.satisfied,
                format!("H {:.4e} < threshold {:.4}, inf(1 - eps zeta/gamma) {:.4}", cr.hamiltonian, cr.threshold, cr.inf_one_minus),
            );
            let alpha = cr.alpha.unwrap_or(f64::NAN);
            c.check(
                "sup|zeta| <= alpha < gamma/eps for the whole run",
                s.apriori_bound_held == Some(true) && s.max_sup_zeta <= alpha && alpha < cr.gamma_over_eps,
                format!("max sup|zeta| {:.4e}, alpha {alpha:.4e}, gamma/eps {}", s.max_sup_zeta, cr.gamma_over_eps),
            );
        }
        None => c.check("criterion evaluated", false, "no report"),
    }

    let omega = 0.15;
    let gw = Grid::new(20.0, 512)?;
    let wave = solve_bfd_reduced(&p, omega, &gw, Mu2Mode::Infinite, &cfg())?;
    let t_final = gw.half_length() / (2.0 * omega);
    let evw = Evolver::new(Family::BfdInf, &p, &gw)?;
    let run = evw.run(
        &wave.pair,
        &EvolutionConfig {
            t_final,
            dt: Some(0.01),
            monitor_every: 100,
            enforce_apriori: false,
            ..EvolutionConfig::default()
        },
    )?;
    let err = relative_l2_error(&run.final_fields, &wave.pair.translate(omega * t_final))?;
    c.check(
        format!("solitary wave omega = {omega} over a quarter crossing (T = {t_final:.3})"),
        err <= TOL_SHAPE,
        format!("relative L2 shape error {err:.3e}, wave residual {:.2e}", wave.residual),
    );

    let init = bump(&g, 0.5);
    let t = 4.0;
    let solve = |dt: f64| -> Result<WavePair> {
        let mut st = ev.stepper(Integrator::Etdrk4, dt, false)?;
        let steps = (t / dt).round() as usize;
        let mut w = init.clone();
        for _ in 0..steps {
            w = st.step(&w)?;
        }
        Ok(w)
    };
    let dts: Vec<f64> = (0..5).map(|i| 0.4 / 2f64.powi(i)).collect();
    let reference = solve(dts[4] / 16.0)?;
    let errs: Vec<f64> = dts.iter().map(|&dt| relative_l2_error(&solve(dt)?, &reference)).collect::<Result<_>>()?;
    let (lx, ly): (Vec<f64>, Vec<f64>) = dts.iter().zip(&errs).map(|(d, e)| (d.ln(), e.ln())).unzip();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let slope = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    c.check(
        format!("ETDRK4 self-convergence order, dt {} .. {}", dts[0], dts[4]),
        (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&slope),
        format!("fitted order {slope:.3}, errors {:?}", errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()),
    );
    Ok(c)
}

fn report(n: usize, result: Result<Criterion>, started: Instant) -> bool {
    let c = result.unwrap_or_else(|e| {
        let mut c = Criterion::new();
        c.check("run", false, format!("error: {e}"));
        c
    });
    for (name, ok, detail) in &c.checks {
        println!("  [{}] {name}: {detail}", if *ok { "ok" } else { "FAIL" });
    }
    let pass = c.passed();
    println!("criterion {n}: {} ({:.1} s)", if pass { "PASS" } else { "FAIL" }, started.elapsed().as_secs_f64());
    pass
}

fn main() -> ExitCode {
    let mut all = true;
    let t = Instant::now();
    all &= report(1, criterion_1(), t);
    let t = Instant::now();
    all &= report(2, criterion_2(), t);
    let mut waves = None;
    let t = Instant::now();
    all &= report(3, criterion_3(&mut waves), t);
    let Some(mut waves) = waves else {
        println!("criterion 4: FAIL (no ground state)");
        println!("criterion 5: FAIL (no ground state)");
        println!("criterion 8: FAIL (no ground state)");
        report(6, criterion_6(), Instant::now());
        report(7, criterion_7(), Instant::now());
        report(9, criterion_9(), Instant::now());
        return ExitCode::FAILURE;
    };
    let t = Instant::now();
    let c5 = criterion_5(&mut waves);
    let t4 = Instant::now();
    all &= report(4, criterion_4(&mut waves), t4);
    all &= report(5, c5, t);
    let t = Instant::now();
    all &= report(6, criterion_6(), t);
    let t = Instant::now();
    all &= report(7, criterion_7(), t);
    let t = Instant::now();
    all &= report(8, criterion_8(&waves), t);
    let t = Instant::now();
    all &= report(9, criterion_9(), t);
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
