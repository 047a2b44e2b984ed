//! Cohen's d recovery from reported or recomputed statistics, with
//! large-sample standard errors.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parser::{Direction, ReportedStatistic, StatFamily};
use crate::stat_tests::{Design, TestOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EffectError {
    #[error("no conversion to d: {0}")]
    UnsupportedConversion(String),
    #[error("effect size undefined: {0}")]
    UndefinedEffect(String),
    #[error("design {0} does not fit a {1:?} statistic")]
    DesignMismatch(String, StatFamily),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectSize {
    pub d: f64,
    pub se: f64,
    pub direction: Direction,
    pub source_family: StatFamily,
    pub n_info: Design,
}

/// The parts of a statistic the conversions look at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatView<'a> {
    pub family: StatFamily,
    pub value: f64,
    pub dfs: &'a [f64],
    pub direction: Direction,
}

impl<'a> StatView<'a> {
    pub fn reported(stat: &'a ReportedStatistic, direction: Direction) -> Self {
        StatView { family: stat.family, value: stat.value, dfs: &stat.dfs, direction }
    }
}

impl<'a> From<&'a TestOutcome> for StatView<'a> {
    fn from(o: &'a TestOutcome) -> Self {
        StatView { family: o.family, value: o.value, dfs: &o.dfs, direction: o.direction }
    }
}

fn with_direction(magnitude_or_signed: f64, direction: Direction) -> f64 {
    match direction {
        Direction::None => magnitude_or_signed,
        d => d.sign() * magnitude_or_signed.abs(),
    }
}

fn d_from_r(r: f64) -> Result<f64, EffectError> {
    if !(r.abs() < 1.0) {
        return Err(EffectError::UndefinedEffect(format!("|r| = {} leaves no finite d", r.abs())));
    }
    Ok(2.0 * r / (1.0 - r * r).sqrt())
}

fn two_groups(design: &Design) -> Option<(f64, f64)> {
    match design {
        Design::Independent { n1, n2 } => Some((*n1 as f64, *n2 as f64)),
        Design::Groups { sizes } if sizes.len() == 2 => Some((sizes[0] as f64, sizes[1] as f64)),
        _ => None,
    }
}

fn d_from_t(t: f64, design: &Design, family: StatFamily) -> Result<f64, EffectError> {
    if let Some((n1, n2)) = two_groups(design) {
        return Ok(t * ((n1 + n2) / (n1 * n2)).sqrt());
    }
    match design {
        Design::Paired { n } | Design::OneSample { n } => Ok(t / (*n as f64).sqrt()),
        other => Err(EffectError::DesignMismatch(format!("{other:?}"), family)),
    }
}

fn ln_odds_ratio(counts: &[Vec<f64>]) -> Result<(f64, f64), EffectError> {
    if counts.len() != 2 || counts.iter().any(|r| r.len() != 2) {
        return Err(EffectError::UnsupportedConversion("odds ratio needs a 2×2 table".into()));
    }
    let haldane = if counts.iter().flatten().any(|&c| c == 0.0) { 0.5 } else { 0.0 };
    let [a, b, c, d] = [counts[0][0], counts[0][1], counts[1][0], counts[1][1]].map(|x| x + haldane);
    let ln_or = (a * d / (b * c)).ln();
    let var = 1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d;
    Ok((ln_or, var))
}

/// Convert a statistic to Cohen's d given the design that produced it.
pub fn cohen_d(stat: StatView<'_>, design: &Design) -> Result<EffectSize, EffectError> {
    let family = stat.family;
    let d = match family {
        StatFamily::T => d_from_t(with_direction(stat.value, stat.direction), design, family)?,
        StatFamily::F => {
            if let Some(&df1) = stat.dfs.first() {
                if df1 != 1.0 {
                    return Err(EffectError::UnsupportedConversion(format!("F with df1 = {df1}")));
                }
            }
            if let Design::Groups { sizes } = design {
                if sizes.len() > 2 {
                    return Err(EffectError::UnsupportedConversion(format!("F over {} groups", sizes.len())));
                }
            }
            d_from_t(with_direction(stat.value.max(0.0).sqrt(), stat.direction), design, family)?
        }
        StatFamily::R => d_from_r(with_direction(stat.value, stat.direction))?,
        StatFamily::Z => {
            let r = match design {
                Design::Correlation { .. } => stat.value.tanh(),
                other => stat.value / (other.total_n() as f64).sqrt(),
            };
            d_from_r(with_direction(r, stat.direction))?
        }
        StatFamily::U => {
            let (n1, n2) = two_groups(design).ok_or_else(|| EffectError::DesignMismatch(format!("{design:?}"), family))?;
            let r_rb = 1.0 - 2.0 * stat.value / (n1 * n2);
            d_from_r(with_direction(r_rb, stat.direction))?
        }
        StatFamily::ChiSquare => match design {
            Design::Table { counts } => ln_odds_ratio(counts)?.0 * 3f64.sqrt() / PI,
            other => {
                if stat.dfs.first().is_some_and(|&df| df != 1.0) {
                    return Err(EffectError::UnsupportedConversion("chi-square with df > 1 and no table".into()));
                }
                let n = other.total_n() as f64;
                let phi = (stat.value.max(0.0) / n).sqrt();
                d_from_r(with_direction(phi, stat.direction))?
            }
        },
        StatFamily::BinomialProp => {
            let Design::Binomial { p0, .. } = design else {
                return Err(EffectError::DesignMismatch(format!("{design:?}"), family));
            };
            2.0 * (stat.value - p0) / (p0 * (1.0 - p0)).sqrt()
        }
    };
    let mut effect = EffectSize { d, se: 0.0, direction: Direction::from_sign(d), source_family: family, n_info: design.clone() };
    effect.se = effect_se(&effect, design);
    Ok(effect)
}

fn r_family_se(d: f64, n: f64) -> f64 {
    let r = d / (d * d + 4.0).sqrt();
    2.0 / ((1.0 - r * r).sqrt() * (n - 1.0).max(1.0).sqrt())
}

/// Large-sample standard error of `e.d`.
///
/// Two-sample: `sqrt((n1+n2)/(n1 n2) + d²/(2(n1+n2)))`; one-sample or paired:
/// `sqrt(1/n + d²/(2n))`; correlation-based: delta method on `d = 2r/sqrt(1−r²)`
/// with `var(r) = (1−r²)²/(n−1)`; 2×2 tables: `(√3/π)·sqrt(Σ 1/cell)`;
/// proportions: `2·sqrt(p̂(1−p̂)/n)/sqrt(p0(1−p0))` with `p̂` kept off 0 and 1.
pub fn effect_se(e: &EffectSize, design: &Design) -> f64 {
    let d = e.d;
    match (e.source_family, design) {
        (StatFamily::ChiSquare, Design::Table { counts }) => match ln_odds_ratio(counts) {
            Ok((_, var)) => 3f64.sqrt() / PI * var.sqrt(),
            Err(_) => f64::INFINITY,
        },
        (StatFamily::R | StatFamily::Z | StatFamily::U | StatFamily::ChiSquare, design) => {
            r_family_se(d, design.total_n() as f64)
        }
        (StatFamily::BinomialProp, Design::Binomial { n, p0, .. }) => {
            let n = *n as f64;
            let phat = (p0 + d * (p0 * (1.0 - p0)).sqrt() / 2.0).clamp(0.5 / n, 1.0 - 0.5 / n);
            2.0 * (phat * (1.0 - phat) / n).sqrt() / (p0 * (1.0 - p0)).sqrt()
        }
        (_, design) => {
            if let Some((n1, n2)) = two_groups(design) {
                ((n1 + n2) / (n1 * n2) + d * d / (2.0 * (n1 + n2))).sqrt()
            } else {
                let n = design.total_n() as f64;
                (1.0 / n + d * d / (2.0 * n)).sqrt()
            }
        }
    }
}
