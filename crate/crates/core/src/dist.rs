//! Continuous distributions: CDF, survival function and quantile.
//!
//! Everything here is built on [`crate::special`]. Quantiles use a bracketed
//! Newton iteration on whichever tail keeps the target well conditioned.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::{beta_inc, gamma_inc, ln_beta_power_terms, ln_gamma};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("invalid distribution parameter: {0}")]
    DomainError(String),
}

/// Distribution families used by the p-value and evidence code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Dist {
    StudentT { df: f64 },
    F { df1: f64, df2: f64 },
    ChiSquare { df: f64 },
    Normal,
    Beta { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Query {
    Cdf(f64),
    Quantile(f64),
}

/// Evaluate a CDF or quantile after validating the parameters.
pub fn dist(family: Dist, query: Query) -> Result<f64, DistError> {
    family.validate()?;
    match query {
        Query::Cdf(x) => Ok(family.cdf(x)),
        Query::Quantile(q) => family.quantile(q),
    }
}

fn positive(name: &str, v: f64) -> Result<(), DistError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(DistError::DomainError(format!("{name} must be a positive finite number, got {v}")))
    }
}

impl Dist {
    pub fn validate(&self) -> Result<(), DistError> {
        match *self {
            Dist::StudentT { df } | Dist::ChiSquare { df } => positive("df", df),
            Dist::F { df1, df2 } => positive("df1", df1).and(positive("df2", df2)),
            Dist::Normal => Ok(()),
            Dist::Beta { a, b } => positive("a", a).and(positive("b", b)),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.tails(x).0
    }

    /// Upper tail `1 − F(x)` computed without cancellation.
    pub fn sf(&self, x: f64) -> f64 {
        self.tails(x).1
    }

    /// `(F(x), 1 − F(x))`.
    pub fn tails(&self, x: f64) -> (f64, f64) {
        match *self {
            Dist::Normal => {
                let lower = normal_cdf(x);
                let upper = normal_cdf(-x);
                (lower, upper)
            }
            Dist::StudentT { df } => t_tails(x, df),
            Dist::ChiSquare { df } => {
                if x <= 0.0 {
                    (0.0, 1.0)
                } else {
                    gamma_inc(df / 2.0, x / 2.0)
                }
            }
            Dist::F { df1, df2 } => {
                if x <= 0.0 {
                    return (0.0, 1.0);
                }
                if x.is_infinite() {
                    return (1.0, 0.0);
                }
                let u = df1 * x;
                let xb = u / (u + df2);
                let yb = df2 / (u + df2);
                beta_inc(df1 / 2.0, df2 / 2.0, xb, yb)
            }
            Dist::Beta { a, b } => {
                if x <= 0.0 {
                    (0.0, 1.0)
                } else if x >= 1.0 {
                    (1.0, 0.0)
                } else {
                    beta_inc(a, b, x, 1.0 - x)
                }
            }
        }
    }

    pub fn quantile(&self, q: f64) -> Result<f64, DistError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(DistError::DomainError(format!("quantile level must lie in (0, 1), got {q}")));
        }
        self.validate()?;
        Ok(self.quantile_tails(q, 1.0 - q))
    }

    /// Quantile from an explicit `(lower, upper)` pair; the smaller one is
    /// used as the solver target, so `upper` may be far below machine epsilon.
    pub fn quantile_tails(&self, lower: f64, upper: f64) -> f64 {
        match *self {
            Dist::Normal => {
                if lower <= upper {
                    normal_quantile_lower(lower)
                } else {
                    -normal_quantile_lower(upper)
                }
            }
            Dist::StudentT { df } => t_quantile(lower, upper, df),
            Dist::ChiSquare { df } => 2.0 * gamma_inv(df / 2.0, lower, upper),
            Dist::F { df1, df2 } => {
                let (x, y) = beta_inv(df1 / 2.0, df2 / 2.0, lower, upper);
                if y <= 0.0 {
                    f64::INFINITY
                } else {
                    df2 * x / (df1 * y)
                }
            }
            Dist::Beta { a, b } => beta_inv(a, b, lower, upper).0,
        }
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF via `Φ(x) = ½ Q(½, x²/2)` for x < 0.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let (p, q) = gamma_inc(0.5, 0.5 * x * x);
    if x < 0.0 {
        0.5 * q
    } else {
        0.5 + 0.5 * p
    }
}

/// `Φ⁻¹(p)` for p ≤ ½, refined by Newton steps on `ln Φ`.
fn normal_quantile_lower(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 0.5 {
        return 0.0;
    }
    // Abramowitz & Stegun 26.2.23 starting point
    let t = (-2.0 * p.ln()).sqrt();
    let mut x = -(t
        - (2.515_517 + 0.802_853 * t + 0.010_328 * t * t)
            / (1.0 + 1.432_788 * t + 0.189_269 * t * t + 0.001_308 * t * t * t));
    let target = p.ln();
    for _ in 0..100 {
        let cdf = normal_cdf(x);
        let pdf = normal_pdf(x);
        if cdf <= 0.0 || pdf <= 0.0 {
            break;
        }
        let step = (cdf.ln() - target) * cdf / pdf;
        x -= step;
        if step.abs() <= 1e-15 * x.abs().max(1e-300) {
            break;
        }
    }
    x
}

fn t_tails(x: f64, df: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x.is_infinite() {
        return if x > 0.0 { (1.0, 0.0) } else { (0.0, 1.0) };
    }
    let t2 = x * x;
    // two-sided tail mass = I_{df/(df+t²)}(df/2, 1/2)
    let xb = df / (df + t2);
    let yb = t2 / (df + t2);
    let (two_sided, _) = beta_inc(df / 2.0, 0.5, xb, yb);
    let tail = 0.5 * two_sided;
    if x < 0.0 {
        (tail, 1.0 - tail)
    } else {
        (1.0 - tail, tail)
    }
}

fn t_quantile(lower: f64, upper: f64, df: f64) -> f64 {
    let (tail, sign) = if lower <= upper { (lower, -1.0) } else { (upper, 1.0) };
    if tail == 0.5 {
        return 0.0;
    }
    // I_x(df/2, 1/2) = 2·tail with x = df/(df+t²); solve on the pair (x, y)
    let two = 2.0 * tail;
    let (x, y) = beta_inv(df / 2.0, 0.5, two, 1.0 - two);
    if x <= 0.0 {
        return sign * f64::INFINITY;
    }
    sign * (df * y / x).sqrt()
}

/// Inverse regularized incomplete beta: returns `(x, 1 − x)` with
/// `I_x(a, b) = lower` (equivalently `1 − I_x = upper`).
pub fn beta_inv(a: f64, b: f64, lower: f64, upper: f64) -> (f64, f64) {
    if lower <= 0.0 {
        return (0.0, 1.0);
    }
    if upper <= 0.0 {
        return (1.0, 0.0);
    }
    if lower <= upper {
        let x = solve_unit(a, b, lower);
        (x, 1.0 - x)
    } else {
        // 1 − I_x(a, b) = I_{1−x}(b, a)
        let y = solve_unit(b, a, upper);
        (1.0 - y, y)
    }
}

/// Solve `I_x(a, b) = p` for x ∈ (0, 1), p ≤ ½, keeping x accurate near 0.
fn solve_unit(a: f64, b: f64, p: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    // start at the mean, pulled toward 0 for tiny targets
    let mut x = (a / (a + b)).min(0.5);
    if p < 1e-3 {
        // lower-tail approximation I_x ≈ x^a / (a B(a, b))
        let guess = ((p.ln() + a.ln() + crate::special::ln_beta(a, b)) / a).exp();
        if guess > 0.0 && guess < 1.0 {
            x = guess;
        }
    }
    for _ in 0..400 {
        let (f, _) = beta_inc(a, b, x, 1.0 - x);
        let diff = f - p;
        if diff == 0.0 {
            return x;
        }
        if diff > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let ln_dens = ln_beta_power_terms(a, b, x, 1.0 - x) - (x * (1.0 - x)).ln();
        let dens = ln_dens.exp();
        let mut next = if dens.is_finite() && dens > 0.0 { x - diff / dens } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs() || (hi - lo) <= 4.0 * f64::EPSILON * hi {
            return next;
        }
        x = next;
    }
    x
}

/// Inverse regularized incomplete gamma: x with `P(a, x) = lower`.
pub fn gamma_inv(a: f64, lower: f64, upper: f64) -> f64 {
    if lower <= 0.0 {
        return 0.0;
    }
    if upper <= 0.0 {
        return f64::INFINITY;
    }
    let use_lower = lower <= upper;
    let target = if use_lower { lower } else { upper };
    let mut lo = 0.0f64;
    let mut hi = a.max(1.0);
    // bracket
    loop {
        let (p, q) = gamma_inc(a, hi);
        let below = if use_lower { p < lower } else { q > upper };
        if !below {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }
    let mut x = if use_lower && lower < 1e-3 {
        // P(a, x) ≈ x^a / Γ(a + 1) near 0
        let guess = ((lower.ln() + ln_gamma(a + 1.0)) / a).exp();
        if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) }
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..400 {
        let (p, q) = gamma_inc(a, x);
        let diff = if use_lower { p - target } else { target - q };
        if diff == 0.0 {
            return x;
        }
        if diff > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let ln_dens = (a - 1.0) * x.ln() - x - ln_gamma(a);
        let dens = ln_dens.exp();
        let mut next = if dens.is_finite() && dens > 0.0 { x - diff / dens } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs() || (hi - lo) <= 4.0 * f64::EPSILON * hi {
            return next;
        }
        x = next;
    }
    x
}
