//! Bayes factors, posteriors and the three-way directional split.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::Dist;
use crate::parser::{Direction, Relation, ReportedPValue, StatFamily, TestSpec};
use crate::quadrature::log_integral;
use crate::special::ln_choose;
use crate::stat_tests::{Design, TestOutcome};

/// Bayes factors above `exp(700)` become the infinite-evidence marker.
pub const LOG_BF_CAP: f64 = 700.0;
const QUAD_TOL: f64 = 1e-9;
const CONTRACT_TOL: f64 = 1e-6;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvidenceError {
    #[error("no Bayes factor for {0}")]
    UnsupportedFamily(String),
    #[error("quadrature reached relative error {achieved:e}, wanted {tolerance:e}")]
    IntegrationFailure { tolerance: f64, achieved: f64 },
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("insufficient information: {0}")]
    Insufficient(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub r_t: f64,
    pub r_anova: f64,
}

impl Default for PriorSpec {
    #[allow(clippy::approx_constant)]
    fn default() -> Self {
        PriorSpec { r_t: 0.7071, r_anova: 0.5 }
    }
}

impl PriorSpec {
    pub fn new(r_t: f64, r_anova: f64) -> Result<Self, EvidenceError> {
        let p = PriorSpec { r_t, r_anova };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), EvidenceError> {
        for (name, v) in [("r_t", self.r_t), ("r_anova", self.r_anova)] {
            if !(0.1..=5.0).contains(&v) {
                return Err(EvidenceError::InvalidPrior(format!("{name} = {v} outside [0.1, 5]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesFactor {
    /// Natural log of BF10; meaningless when `infinite` is set.
    pub log_bf10: f64,
    pub infinite: bool,
    pub family: StatFamily,
    pub prior: PriorSpec,
}

impl BayesFactor {
    fn from_log(log_bf10: f64, family: StatFamily, prior: PriorSpec) -> Self {
        if log_bf10 > LOG_BF_CAP {
            BayesFactor { log_bf10: f64::INFINITY, infinite: true, family, prior }
        } else {
            BayesFactor { log_bf10, infinite: false, family, prior }
        }
    }

    pub fn bf10(&self) -> f64 {
        if self.infinite {
            f64::INFINITY
        } else {
            self.log_bf10.exp()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    pub pi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalPosterior {
    pub p_pos: f64,
    pub p_neg: f64,
    pub p_null: f64,
}

/// `π = BF/(1+BF)`, evaluated from the log without overflow.
pub fn posterior(bf: &BayesFactor) -> Posterior {
    if bf.infinite {
        return Posterior { pi: 1.0 };
    }
    let l = bf.log_bf10;
    let pi = if l <= 0.0 {
        let b = l.exp();
        b / (1.0 + b)
    } else {
        1.0 / (1.0 + (-l).exp())
    };
    Posterior { pi }
}

/// All H1 mass goes to the observed sign; no direction splits it evenly.
pub fn directional_posterior(p: Posterior, direction: Direction) -> DirectionalPosterior {
    let pi = p.pi;
    match direction {
        Direction::Positive => DirectionalPosterior { p_pos: pi, p_neg: 0.0, p_null: 1.0 - pi },
        Direction::Negative => DirectionalPosterior { p_pos: 0.0, p_neg: pi, p_null: 1.0 - pi },
        Direction::None => DirectionalPosterior { p_pos: pi / 2.0, p_neg: pi / 2.0, p_null: 1.0 - pi },
    }
}

/// A statistic with the design information its Bayes factor needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceInput {
    pub family: StatFamily,
    pub value: f64,
    pub dfs: Vec<f64>,
    pub design: Design,
    /// The statistic is already infinite (zero-variance data with a difference).
    pub infinite: bool,
}

pub trait EvidenceSource {
    fn evidence_input(&self) -> Result<EvidenceInput, EvidenceError>;
}

impl EvidenceSource for TestOutcome {
    fn evidence_input(&self) -> Result<EvidenceInput, EvidenceError> {
        Ok(EvidenceInput {
            family: self.family,
            value: self.value,
            dfs: self.dfs.clone(),
            design: self.design.clone(),
            infinite: self.degenerate,
        })
    }
}

impl EvidenceSource for EvidenceInput {
    fn evidence_input(&self) -> Result<EvidenceInput, EvidenceError> {
        Ok(self.clone())
    }
}

/// A human ground-truth record paired with the design its test implies.
#[derive(Debug, Clone, Copy)]
pub struct HumanEvidence<'a> {
    pub spec: &'a TestSpec,
    /// Family to assume when the record carries only a p-value.
    pub family: StatFamily,
    pub design: &'a Design,
}

impl EvidenceSource for HumanEvidence<'_> {
    fn evidence_input(&self) -> Result<EvidenceInput, EvidenceError> {
        if let Some(stat) = &self.spec.statistic {
            return Ok(EvidenceInput {
                family: stat.family,
                value: stat.value,
                dfs: stat.dfs.clone(),
                design: self.design.clone(),
                infinite: false,
            });
        }
        let p = self
            .spec
            .p
            .as_ref()
            .ok_or_else(|| EvidenceError::Insufficient("record has neither statistic nor p-value".into()))?;
        let (value, dfs) = statistic_from_p(p, self.family, self.design)?;
        Ok(EvidenceInput { family: self.family, value, dfs, design: self.design.clone(), infinite: false })
    }
}

fn two_groups(design: &Design) -> Option<(f64, f64)> {
    match design {
        Design::Independent { n1, n2 } => Some((*n1 as f64, *n2 as f64)),
        Design::Groups { sizes } if sizes.len() == 2 => Some((sizes[0] as f64, sizes[1] as f64)),
        _ => None,
    }
}

/// Error degrees of freedom and effective N for a t-type statistic.
fn t_dims(design: &Design) -> Result<(f64, f64), EvidenceError> {
    if let Some((n1, n2)) = two_groups(design) {
        return Ok((n1 + n2 - 2.0, n1 * n2 / (n1 + n2)));
    }
    match design {
        Design::Paired { n } | Design::OneSample { n } => Ok((*n as f64 - 1.0, *n as f64)),
        Design::Correlation { n } => Ok((*n as f64 - 2.0, *n as f64 - 1.0)),
        other => Err(EvidenceError::Insufficient(format!("no t design in {other:?}"))),
    }
}

/// Recover |statistic| from a reported p-value; bounds invert at the bound.
pub fn statistic_from_p(p: &ReportedPValue, family: StatFamily, design: &Design) -> Result<(f64, Vec<f64>), EvidenceError> {
    let pv = p
        .value
        .ok_or_else(|| EvidenceError::Insufficient(format!("p-value {:?} has no numeric value", p.raw_text)))?;
    if p.relation == Relation::GreaterThan && pv >= 0.5 {
        return Ok((0.0, Vec::new()));
    }
    let pv = pv.clamp(1e-300, 1.0);
    let n = design.total_n() as f64;
    let upper_two = |dist: Dist| dist.quantile_tails(1.0 - pv / 2.0, pv / 2.0);
    match family {
        StatFamily::T => {
            let (nu, _) = t_dims(design)?;
            Ok((upper_two(Dist::StudentT { df: nu }), vec![nu]))
        }
        StatFamily::F => {
            let (nu, _) = t_dims(design)?;
            let t = upper_two(Dist::StudentT { df: nu });
            Ok((t * t, vec![1.0, nu]))
        }
        StatFamily::R => {
            let nu = n - 2.0;
            let t = upper_two(Dist::StudentT { df: nu });
            Ok((t / (t * t + nu).sqrt(), vec![nu]))
        }
        StatFamily::ChiSquare => {
            let df = match design {
                Design::Table { counts } => ((counts.len() - 1) * (counts[0].len() - 1)) as f64,
                _ => 1.0,
            };
            Ok((Dist::ChiSquare { df }.quantile_tails(1.0 - pv, pv), vec![df]))
        }
        StatFamily::Z | StatFamily::U | StatFamily::BinomialProp => Ok((upper_two(Dist::Normal), Vec::new())),
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn integrate(log_f: impl Fn(f64) -> f64) -> Result<f64, EvidenceError> {
    log_integral(log_f, QUAD_TOL).map_err(|f| {
        if f.achieved <= CONTRACT_TOL {
            EvidenceError::IntegrationFailure { tolerance: QUAD_TOL, achieved: f.achieved }
        } else {
            EvidenceError::IntegrationFailure { tolerance: CONTRACT_TOL, achieved: f.achieved }
        }
    })
}

/// JZS Bayes factor as a mixture over `g` with `δ | g ~ N(0, g r²)` and
/// `g ~ InvGamma(1/2, 1/2)`. `nu = ∞` gives the normal-likelihood limit.
pub fn jzs_log_bf(t: f64, n_eff: f64, nu: f64, r: f64) -> Result<f64, EvidenceError> {
    if !(n_eff > 0.0 && nu > 0.0) {
        return Err(EvidenceError::Insufficient(format!("N = {n_eff}, df = {nu}")));
    }
    let t2 = t * t;
    let ln_nr2 = (n_eff * r * r).ln();
    let null = if nu.is_infinite() { -0.5 * t2 } else { -(nu + 1.0) / 2.0 * (t2 / nu).ln_1p() };
    let log_f = |s: f64| {
        // s = ln g; a = ln(1 + N g r²)
        let a = softplus(s + ln_nr2);
        let lik = if nu.is_infinite() {
            -0.5 * t2 * (-a).exp()
        } else {
            -(nu + 1.0) / 2.0 * (t2 / nu * (-a).exp()).ln_1p()
        };
        -0.5 * a + lik - 0.5 * LN_2PI - 0.5 * s - 0.5 * (-s).exp() - null
    };
    integrate(log_f)
}

/// Zellner–Siow g-prior Bayes factor for a one-way design with `df1 > 1`.
pub fn anova_log_bf(f: f64, df1: f64, df2: f64, r: f64) -> Result<f64, EvidenceError> {
    let n = df1 + df2 + 1.0;
    let one_minus_r2 = df2 / (f.max(0.0) * df1 + df2);
    let b = n * r * r / 2.0;
    let ln_norm = 0.5 * (b / std::f64::consts::PI).ln();
    let log_f = |s: f64| {
        df2 / 2.0 * softplus(s) - (n - 1.0) / 2.0 * softplus(s + one_minus_r2.ln()) + ln_norm - 0.5 * s - b * (-s).exp()
    };
    integrate(log_f)
}

/// Beta(1,1)-prior Bayes factor for `k` successes in `n` trials against `p0`.
pub fn binomial_log_bf(k: u64, n: u64, p0: f64) -> f64 {
    let ln_h1 = -((n + 1) as f64).ln();
    let ln_h0 = ln_choose(n, k) + k as f64 * p0.ln() + (n - k) as f64 * (-p0).ln_1p();
    ln_h1 - ln_h0
}

/// BIC-style approximation `(χ² − df·ln n)/2`.
pub fn chi_square_log_bf(chi2: f64, df: f64, n: f64) -> f64 {
    (chi2 - df * n.ln()) / 2.0
}

fn compute_log_bf(e: &EvidenceInput, priors: &PriorSpec) -> Result<f64, EvidenceError> {
    let n_total = e.design.total_n() as f64;
    match e.family {
        StatFamily::T => {
            let (nu_design, n_eff) = t_dims(&e.design)?;
            let nu = e.dfs.first().copied().filter(|d| *d > 0.0).unwrap_or(nu_design);
            jzs_log_bf(e.value, n_eff, nu, priors.r_t)
        }
        StatFamily::F => {
            let df1 = e.dfs.first().copied().unwrap_or(1.0);
            if df1 == 1.0 {
                let (nu_design, n_eff) = t_dims(&e.design)?;
                let nu = e.dfs.get(1).copied().filter(|d| *d > 0.0).unwrap_or(nu_design);
                jzs_log_bf(e.value.max(0.0).sqrt(), n_eff, nu, priors.r_anova)
            } else {
                let df2 = match e.dfs.get(1) {
                    Some(&d) => d,
                    None => n_total - df1 - 1.0,
                };
                if !(df2 > 0.0) {
                    return Err(EvidenceError::Insufficient("F without error degrees of freedom".into()));
                }
                anova_log_bf(e.value, df1, df2, priors.r_anova)
            }
        }
        StatFamily::R => {
            let n = n_total;
            if n < 3.0 {
                return Err(EvidenceError::Insufficient("correlation needs n >= 3".into()));
            }
            let r = e.value;
            if r.abs() >= 1.0 {
                return Ok(f64::INFINITY);
            }
            let nu = n - 2.0;
            jzs_log_bf(r * (nu / (1.0 - r * r)).sqrt(), n - 1.0, nu, priors.r_t)
        }
        StatFamily::Z => {
            let n_eff = two_groups(&e.design).map_or(n_total, |(a, b)| a * b / (a + b));
            jzs_log_bf(e.value, n_eff, f64::INFINITY, priors.r_t)
        }
        StatFamily::U => {
            let (n1, n2) = two_groups(&e.design)
                .ok_or_else(|| EvidenceError::Insufficient("U needs two group sizes".into()))?;
            let z = (e.value - n1 * n2 / 2.0) / (n1 * n2 * (n1 + n2 + 1.0) / 12.0).sqrt();
            jzs_log_bf(z, n1 * n2 / (n1 + n2), f64::INFINITY, priors.r_t)
        }
        StatFamily::ChiSquare => {
            let df = match (e.dfs.first(), &e.design) {
                (Some(&d), _) => d,
                (None, Design::Table { counts }) => ((counts.len() - 1) * (counts[0].len() - 1)) as f64,
                (None, _) => 1.0,
            };
            if n_total < 2.0 {
                return Err(EvidenceError::Insufficient("chi-square needs n >= 2".into()));
            }
            Ok(chi_square_log_bf(e.value, df, n_total))
        }
        StatFamily::BinomialProp => {
            let Design::Binomial { n, p0, .. } = e.design else {
                return Err(EvidenceError::Insufficient("binomial evidence needs n and p0".into()));
            };
            let k = (e.value * n as f64).round().clamp(0.0, n as f64) as u64;
            Ok(binomial_log_bf(k, n, p0))
        }
    }
}

/// Bayes factor for any evidence source. `n_override` replaces the source's
/// design (and the dfs that follow from it).
pub fn bayes_factor(
    source: &dyn EvidenceSource,
    priors: &PriorSpec,
    n_override: Option<&Design>,
) -> Result<BayesFactor, EvidenceError> {
    priors.validate()?;
    let mut e = source.evidence_input()?;
    if let Some(design) = n_override {
        e.design = design.clone();
        if matches!(e.family, StatFamily::T | StatFamily::R) || (e.family == StatFamily::F && e.dfs.first() == Some(&1.0)) {
            e.dfs.clear();
            if e.family == StatFamily::F {
                e.dfs.push(1.0);
            }
        }
    }
    if e.infinite {
        return Ok(BayesFactor::from_log(f64::INFINITY, e.family, *priors));
    }
    if !e.value.is_finite() {
        return Err(EvidenceError::Insufficient(format!("non-finite statistic {}", e.value)));
    }
    let log_bf = compute_log_bf(&e, priors)?;
    Ok(BayesFactor::from_log(log_bf, e.family, *priors))
}
