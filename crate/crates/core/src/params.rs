//! Model coefficients, admissibility windows and closed-form decay constants.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Absolute tolerance on the sum rule `a + b + c + d = 1/3`.
pub const SUM_RULE_TOL: f64 = 1e-12;

/// Lower-layer depth parameter `mu2`; infinite depth is a distinct value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Depth {
    Finite(f64),
    Infinite,
}

impl Depth {
    pub fn is_infinite(self) -> bool {
        matches!(self, Depth::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Depth::Finite(v) => Some(v),
            Depth::Infinite => None,
        }
    }

    /// `1/sqrt(mu2)`, zero at infinite depth.
    pub fn inv_sqrt(self) -> f64 {
        match self {
            Depth::Finite(v) => 1.0 / v.sqrt(),
            Depth::Infinite => 0.0,
        }
    }

    /// Inverse of [`Depth::inv_sqrt`].
    pub fn from_inv_sqrt(s: f64) -> Depth {
        if s == 0.0 {
            Depth::Infinite
        } else {
            Depth::Finite(1.0 / (s * s))
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(v) => write!(f, "{v}"),
            Depth::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Depth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Depth::Finite(v) => s.serialize_f64(*v),
            Depth::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Depth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v.is_infinite() && v > 0.0 => Ok(Depth::Infinite),
            Raw::Num(v) => Ok(Depth::Finite(v)),
            Raw::Str(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(Depth::Infinite),
                other => other
                    .parse::<f64>()
                    .map(Depth::Finite)
                    .map_err(|_| serde::de::Error::custom(format!("mu2: expected a number or \"inf\", got {s:?}"))),
            },
        }
    }
}

/// Model family of the stationary and evolution systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// B-FD system with infinite lower layer.
    BfdInf,
    /// B-FD system with finite `mu2`.
    BfdFinite,
    /// Benjamin–Ono system.
    Bo,
    /// Intermediate-long-wave system.
    Ilw,
}

impl Family {
    pub fn is_bfd(self) -> bool {
        matches!(self, Family::BfdInf | Family::BfdFinite)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::BfdInf => "bfd_inf",
            Family::BfdFinite => "bfd_finite",
            Family::Bo => "bo",
            Family::Ilw => "ilw",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bfd_inf" => Ok(Family::BfdInf),
            "bfd_finite" => Ok(Family::BfdFinite),
            "bo" => Ok(Family::Bo),
            "ilw" => Ok(Family::Ilw),
            other => Err(Error::Config(format!("unknown family {other:?}"))),
        }
    }
}

fn default_beta() -> f64 {
    2.0
}

fn default_mu2() -> Depth {
    Depth::Infinite
}

/// All model coefficients. `r = epsilon / (2 gamma)` is derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub gamma: f64,
    pub epsilon: f64,
    pub mu: f64,
    #[serde(default = "default_mu2")]
    pub mu2: Depth,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub d: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Basic ranges of gamma, epsilon, mu, mu2, beta.
    Basic,
    /// `a + b + c + d = 1/3`.
    Sum,
    /// `a <= 0`, `c <= 0`, `b, d >= 0`.
    Sign,
    /// `b = d`.
    Symmetry,
    /// `b >= 1/6` and `1/3 - 2b <= a, c <= 0`.
    Range,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} rule: {}", self.rule, self.detail)
    }
}

impl ModelParams {
    /// Build a B-FD parameter set with `d = b`.
    pub fn bfd(gamma: f64, epsilon: f64, mu: f64, mu2: Depth, a: f64, b: f64, c: f64) -> Self {
        ModelParams {
            gamma,
            epsilon,
            mu,
            mu2,
            a,
            b,
            c,
            d: b,
            beta: default_beta(),
        }
    }

    /// Build an ILW/BO parameter set; the B-FD coefficients are left at zero.
    pub fn ilw(gamma: f64, epsilon: f64, mu: f64, mu2: Depth, beta: f64) -> Self {
        ModelParams {
            gamma,
            epsilon,
            mu,
            mu2,
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            beta,
        }
    }

    /// The reference set `{gamma=0.5, b=d=0.25, a=c=-1/12, mu=0.1, epsilon=0.1}`.
    pub fn p1() -> Self {
        Self::bfd(0.5, 0.1, 0.1, Depth::Infinite, -1.0 / 12.0, 0.25, -1.0 / 12.0)
    }

    pub fn with_mu2(&self, mu2: Depth) -> Self {
        ModelParams { mu2, ..self.clone() }
    }

    pub fn r(&self) -> f64 {
        self.epsilon / (2.0 * self.gamma)
    }

    fn basic_violations(&self, need_beta: bool) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut push = |ok: bool, detail: String| {
            if !ok {
                v.push(Violation { rule: Rule::Basic, detail });
            }
        };
        push(
            self.gamma > 0.0 && self.gamma < 1.0,
            format!("gamma = {} must lie in (0, 1)", self.gamma),
        );
        push(self.epsilon > 0.0, format!("epsilon = {} must be positive", self.epsilon));
        push(self.mu > 0.0, format!("mu = {} must be positive", self.mu));
        if let Depth::Finite(m) = self.mu2 {
            push(m > 0.0 && m.is_finite(), format!("mu2 = {m} must be positive"));
        }
        if need_beta {
            push(self.beta > 1.0, format!("beta = {} must exceed 1", self.beta));
        }
        for (name, x) in [
            ("gamma", self.gamma),
            ("epsilon", self.epsilon),
            ("mu", self.mu),
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("beta", self.beta),
        ] {
            push(x.is_finite(), format!("{name} = {x} is not finite"));
        }
        v
    }

    /// Check every B-FD constraint and report each violated rule.
    pub fn validate_bfd(&self) -> Result<()> {
        let mut v = self.basic_violations(false);
        let sum = self.a + self.b + self.c + self.d;
        if (sum - 1.0 / 3.0).abs() > SUM_RULE_TOL {
            v.push(Violation {
                rule: Rule::Sum,
                detail: format!("a + b + c + d = {sum} differs from 1/3"),
            });
        }
        for (name, x, nonpos) in [("a", self.a, true), ("c", self.c, true), ("b", self.b, false), ("d", self.d, false)] {
            let bad = if nonpos { x > 0.0 } else { x < 0.0 };
            if bad {
                let want = if nonpos { "<= 0" } else { ">= 0" };
                v.push(Violation {
                    rule: Rule::Sign,
                    detail: format!("{name} = {x} must be {want}"),
                });
            }
        }
        if self.b != self.d {
            v.push(Violation {
                rule: Rule::Symmetry,
                detail: format!("b = {} and d = {} must coincide", self.b, self.d),
            });
        }
        let tol = SUM_RULE_TOL;
        if self.b < 1.0 / 6.0 - tol {
            v.push(Violation {
                rule: Rule::Range,
                detail: format!("b = {} is below 1/6", self.b),
            });
        }
        let lo = 1.0 / 3.0 - 2.0 * self.b;
        for (name, x) in [("a", self.a), ("c", self.c)] {
            if x < lo - tol {
                v.push(Violation {
                    rule: Rule::Range,
                    detail: format!("{name} = {x} is below 1/3 - 2b = {lo}"),
                });
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(v))
        }
    }

    /// Check the ILW/BO constraints (`gamma`, `epsilon`, `mu`, `mu2`, `beta > 1`).
    pub fn validate_ilw(&self) -> Result<()> {
        let v = self.basic_violations(true);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(v))
        }
    }

    pub fn validate_for(&self, family: Family) -> Result<()> {
        match family {
            Family::BfdInf | Family::BfdFinite => self.validate_bfd()?,
            Family::Bo | Family::Ilw => self.validate_ilw()?,
        }
        match (family, self.mu2) {
            (Family::BfdFinite | Family::Ilw, Depth::Infinite) => Err(Error::Config(format!(
                "family {family} needs a finite mu2"
            ))),
            _ => Ok(()),
        }
    }

    /// `(1 - gamma) min{1, |c|/b}`.
    pub fn speed_window(&self) -> Result<f64> {
        if self.b <= 0.0 {
            return Err(Error::Degenerate(format!(
                "speed window undefined for b = {}",
                self.b
            )));
        }
        Ok((1.0 - self.gamma) * (1.0f64).min(self.c.abs() / self.b))
    }

    /// `-[b|omega| + (a - 1/gamma^2)/gamma]`.
    pub fn beta0_tilde(&self, omega: f64) -> f64 {
        let g = self.gamma;
        -(self.b * omega.abs() + (self.a - 1.0 / (g * g)) / g)
    }

    /// Symbol `f(x) = 1/gamma - |omega| - (sqrt(mu)/gamma^2)|x| + mu beta0_tilde x^2`,
    /// i.e. the symbol of `L_inf - |omega| J_b`.
    pub fn f_symbol(&self, omega: f64, x: f64) -> f64 {
        let g = self.gamma;
        1.0 / g - omega.abs() - self.mu.sqrt() / (g * g) * x.abs() + self.mu * self.beta0_tilde(omega) * x * x
    }

    pub fn f_min(&self, omega: f64) -> Result<FMin> {
        let bt = self.beta0_tilde(omega);
        if bt <= 0.0 {
            return Err(Error::Inadmissible(format!(
                "beta0_tilde = {bt} <= 0: the symbol is unbounded below"
            )));
        }
        let g2 = self.gamma * self.gamma;
        Ok(FMin {
            f_min: 1.0 / self.gamma - omega.abs() - 1.0 / (4.0 * g2 * g2 * bt),
            x0: 1.0 / (2.0 * self.mu.sqrt() * g2 * bt),
            beta0_tilde: bt,
        })
    }

    /// Infimum of admissible finite `mu2`: `mu / (gamma^2 f_min)^2`.
    pub fn mu2_threshold(&self, omega: f64) -> Result<f64> {
        let FMin { f_min, .. } = self.f_min(omega)?;
        if f_min <= 0.0 {
            return Err(Error::Inadmissible(format!(
                "f_min = {f_min} <= 0: no finite mu2 is admissible"
            )));
        }
        let t = self.gamma * self.gamma * f_min;
        Ok(self.mu / (t * t))
    }

    /// `M(omega) = 4(1 - gamma|omega|)[1 - b gamma^3 |omega| - a gamma^2] - 1`.
    pub fn m_value(&self, omega: f64) -> f64 {
        let g = self.gamma;
        let w = omega.abs();
        4.0 * (1.0 - g * w) * (1.0 - self.b * g * g * g * w - self.a * g * g) - 1.0
    }

    pub fn admissibility(&self, omega: f64) -> Result<AdmissibilityReport> {
        self.validate_bfd()?;
        let speed_bound = self.speed_window()?;
        let m_value = self.m_value(omega);
        let (f_min, x0, beta0_tilde) = match self.f_min(omega) {
            Ok(f) => (Some(f.f_min), Some(f.x0), f.beta0_tilde),
            Err(_) => (None, None, self.beta0_tilde(omega)),
        };
        let mu2_threshold = self.mu2_threshold(omega).ok();
        let in_window = omega.abs() < speed_bound;
        let positive = f_min.is_some_and(|f| f > 0.0) && m_value > 0.0;
        let depth_ok = match (self.mu2, mu2_threshold) {
            (Depth::Infinite, _) => true,
            (Depth::Finite(m), Some(t)) => m > t,
            (Depth::Finite(_), None) => false,
        };
        Ok(AdmissibilityReport {
            omega,
            mu2: self.mu2,
            speed_bound,
            f_min,
            x0,
            beta0_tilde,
            mu2_threshold,
            m_value,
            kernel_discriminant: self.kernel_discriminant(),
            in_speed_window: in_window,
            mu2_admissible: depth_ok,
            admissible: in_window && positive && depth_ok,
        })
    }

    /// Constants of the infinite-depth kernel: `(beta1, ell, c_K)`.
    pub fn kernel_constants(&self) -> (f64, f64, f64) {
        let g = self.gamma;
        let beta1 = -(self.mu / g) * (self.a - 1.0 / (g * g));
        let ell = self.mu.sqrt() / (beta1 * g * g);
        let c_k = 1.0 / (beta1 * g);
        (beta1, ell, c_k)
    }

    /// `4 c_K - ell^2`.
    pub fn kernel_discriminant(&self) -> f64 {
        let (_, ell, c_k) = self.kernel_constants();
        4.0 * c_k - ell * ell
    }

    pub fn check_kernel_discriminant(&self) -> bool {
        self.kernel_discriminant() > 0.0
    }

    /// `theta = gamma sqrt(mu2) / ((beta - 1) sqrt(mu))`, defined for finite `mu2`.
    pub fn theta(&self) -> Option<f64> {
        let m2 = self.mu2.finite()?;
        Some(self.gamma * m2.sqrt() / ((self.beta - 1.0) * self.mu.sqrt()))
    }

    /// Exponential rate `sigma` for finite-depth B-FD waves.
    pub fn sigma(&self) -> Result<f64> {
        let m2 = self
            .mu2
            .finite()
            .ok_or_else(|| Error::NotApplicable("sigma needs a finite mu2".into()))?;
        if self.a >= 0.0 {
            return Err(Error::Degenerate(format!("sigma undefined for a = {}", self.a)));
        }
        let g = self.gamma;
        let q = self.mu.sqrt() / (g * m2.sqrt());
        if q >= 1.0 {
            return Err(Error::NotApplicable(format!(
                "sqrt(mu)/(gamma sqrt(mu2)) = {q} is not below 1"
            )));
        }
        let s2 = (1.0 + self.mu / (m2 * g * g) - q) / (-self.a * self.mu);
        Ok(s2.sqrt())
    }

    pub fn decay_rates(&self, n_eta: usize) -> DecayRates {
        let (beta1, ell, c_k) = self.kernel_constants();
        let sigma = self.sigma().ok();
        let sigma0 = match sigma {
            Some(s) if self.c < 0.0 => Some(s.min(0.5 * (-self.c * self.mu).sqrt())),
            _ => None,
        };
        let theta = if self.beta > 1.0 { self.theta() } else { None };
        let eta_roots = theta.map(|t| eta_roots(t, n_eta)).unwrap_or_default();
        DecayRates {
            algebraic_plateau_k: -2.0 * ell / (c_k * c_k * (2.0 * PI).sqrt()),
            beta1,
            ell,
            c_k,
            discriminant: 4.0 * c_k - ell * ell,
            sigma,
            sigma0,
            theta,
            eta_roots,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FMin {
    pub f_min: f64,
    pub x0: f64,
    pub beta0_tilde: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub omega: f64,
    pub mu2: Depth,
    pub speed_bound: f64,
    pub f_min: Option<f64>,
    pub x0: Option<f64>,
    pub beta0_tilde: f64,
    pub mu2_threshold: Option<f64>,
    #[serde(rename = "M_value")]
    pub m_value: f64,
    pub kernel_discriminant: f64,
    pub in_speed_window: bool,
    pub mu2_admissible: bool,
    pub admissible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRates {
    /// Limit of `x^2 K(x)`.
    #[serde(rename = "algebraic_plateau_K")]
    pub algebraic_plateau_k: f64,
    pub beta1: f64,
    pub ell: f64,
    pub c_k: f64,
    pub discriminant: f64,
    pub sigma: Option<f64>,
    pub sigma0: Option<f64>,
    pub theta: Option<f64>,
    pub eta_roots: Vec<f64>,
}

/// Width by which root brackets are pulled in from the poles of `tan`.
const BRACKET_SHRINK: f64 = 1e-9;

/// First `n` roots of `eta + theta tan(eta) = 0`, one in each `((2m-1)pi/2, m pi)`.
pub fn eta_roots(theta: f64, n: usize) -> Vec<f64> {
    let g = |e: f64| e + theta * e.tan();
    (1..=n)
        .map(|m| {
            let m = m as f64;
            let lo = (2.0 * m - 1.0) * PI / 2.0 + BRACKET_SHRINK;
            let hi = m * PI - BRACKET_SHRINK;
            bisect(g, lo, hi)
        })
        .collect()
}

/// Bisection to machine precision on a sign-changing bracket.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}
