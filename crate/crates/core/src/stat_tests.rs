//! Frequentist tests recomputed on agent data.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::Dist;
use crate::parser::{Direction, StatFamily};
use crate::special::ln_choose;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatTestError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("samples must have equal length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("zero variance: {0}")]
    ZeroVariance(String),
    #[error("degenerate contingency table: {0}")]
    DegenerateTable(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleVector {
    pub values: Vec<f64>,
    pub group_label: String,
}

impl SampleVector {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        SampleVector { values, group_label: label.into() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum TMode {
    IndependentPooled,
    Paired,
    OneSample,
}

/// Sample sizes that produced a statistic; effect-size conversion needs them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "design")]
pub enum Design {
    Independent { n1: u64, n2: u64 },
    Paired { n: u64 },
    OneSample { n: u64 },
    Groups { sizes: Vec<u64> },
    Correlation { n: u64 },
    Table { counts: Vec<Vec<f64>> },
    Binomial { k: u64, n: u64, p0: f64 },
}

impl Design {
    pub fn total_n(&self) -> u64 {
        match self {
            Design::Independent { n1, n2 } => n1 + n2,
            Design::Paired { n } | Design::OneSample { n } | Design::Correlation { n } => *n,
            Design::Groups { sizes } => sizes.iter().sum(),
            Design::Table { counts } => counts.iter().flatten().sum::<f64>().round() as u64,
            Design::Binomial { n, .. } => *n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub family: StatFamily,
    pub value: f64,
    pub dfs: Vec<f64>,
    pub design: Design,
    pub p_two_sided: f64,
    pub direction: Direction,
    /// Set when the statistic is infinite (zero variance with a real difference).
    pub degenerate: bool,
}

impl TestOutcome {
    pub fn n_total(&self) -> u64 {
        self.design.total_n()
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sum_sq_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum()
}

fn require_len(s: &SampleVector, min: usize) -> Result<(), StatTestError> {
    if s.len() < min {
        return Err(StatTestError::InsufficientData(format!(
            "group {:?} has {} values, need at least {min}",
            s.group_label,
            s.len()
        )));
    }
    if s.values.iter().any(|x| !x.is_finite()) {
        return Err(StatTestError::InvalidInput(format!("group {:?} contains non-finite values", s.group_label)));
    }
    Ok(())
}

fn t_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    (2.0 * Dist::StudentT { df }.sf(t.abs())).min(1.0)
}

fn t_from_parts(diff: f64, se2: f64) -> (f64, bool) {
    if se2 > 0.0 {
        (diff / se2.sqrt(), false)
    } else if diff == 0.0 {
        (0.0, false)
    } else {
        (diff.signum() * f64::INFINITY, true)
    }
}

/// Student's t: pooled two-sample, paired, or one-sample against `mu0`.
pub fn t_test(a: &SampleVector, b: Option<&SampleVector>, mode: TMode, mu0: f64) -> Result<TestOutcome, StatTestError> {
    require_len(a, 2)?;
    let (t, df, design, degenerate) = match mode {
        TMode::IndependentPooled => {
            let b = b.ok_or_else(|| StatTestError::InvalidInput("independent t-test needs two groups".into()))?;
            require_len(b, 2)?;
            let (n1, n2) = (a.len() as f64, b.len() as f64);
            let df = n1 + n2 - 2.0;
            let pooled = (sum_sq_dev(&a.values) + sum_sq_dev(&b.values)) / df;
            let (t, deg) = t_from_parts(a.mean() - b.mean(), pooled * (1.0 / n1 + 1.0 / n2));
            (t, df, Design::Independent { n1: a.len() as u64, n2: b.len() as u64 }, deg)
        }
        TMode::Paired => {
            let b = b.ok_or_else(|| StatTestError::InvalidInput("paired t-test needs two samples".into()))?;
            if a.len() != b.len() {
                return Err(StatTestError::LengthMismatch(a.len(), b.len()));
            }
            require_len(b, 2)?;
            let diffs: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
            let n = diffs.len() as f64;
            let var = sum_sq_dev(&diffs) / (n - 1.0);
            let (t, deg) = t_from_parts(mean(&diffs), var / n);
            (t, n - 1.0, Design::Paired { n: a.len() as u64 }, deg)
        }
        TMode::OneSample => {
            let n = a.len() as f64;
            let var = sum_sq_dev(&a.values) / (n - 1.0);
            let (t, deg) = t_from_parts(a.mean() - mu0, var / n);
            (t, n - 1.0, Design::OneSample { n: a.len() as u64 }, deg)
        }
    };
    Ok(TestOutcome {
        family: StatFamily::T,
        value: t,
        dfs: vec![df],
        design,
        p_two_sided: t_p(t, df),
        direction: Direction::from_sign(t),
        degenerate,
    })
}

/// One-way ANOVA. Direction follows the first two group means.
pub fn anova_oneway(groups: &[SampleVector]) -> Result<TestOutcome, StatTestError> {
    if groups.len() < 2 {
        return Err(StatTestError::InsufficientData(format!("ANOVA needs at least 2 groups, got {}", groups.len())));
    }
    for g in groups {
        require_len(g, 2)?;
    }
    let k = groups.len() as f64;
    let n: f64 = groups.iter().map(|g| g.len() as f64).sum();
    let grand = groups.iter().flat_map(|g| g.values.iter()).sum::<f64>() / n;
    let ss_between: f64 = groups.iter().map(|g| g.len() as f64 * (g.mean() - grand).powi(2)).sum();
    let ss_within: f64 = groups.iter().map(|g| sum_sq_dev(&g.values)).sum();
    let (df1, df2) = (k - 1.0, n - k);
    // ss_between below rounding noise counts as zero
    let scale = groups.iter().flat_map(|g| g.values.iter()).map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
    let between_zero = ss_between <= scale * 1e-14;
    let (f, p, degenerate) = if ss_within > 0.0 {
        let f = if between_zero { 0.0 } else { (ss_between / df1) / (ss_within / df2) };
        (f, Dist::F { df1, df2 }.sf(f), false)
    } else if between_zero {
        (0.0, 1.0, false)
    } else {
        (f64::INFINITY, 0.0, true)
    };
    Ok(TestOutcome {
        family: StatFamily::F,
        value: f,
        dfs: vec![df1, df2],
        design: Design::Groups { sizes: groups.iter().map(|g| g.len() as u64).collect() },
        p_two_sided: p,
        direction: if f == 0.0 { Direction::None } else { Direction::from_sign(groups[0].mean() - groups[1].mean()) },
        degenerate,
    })
}

/// Pearson correlation with its t-equivalent p-value. `value` holds r.
pub fn pearson(x: &SampleVector, y: &SampleVector) -> Result<TestOutcome, StatTestError> {
    if x.len() != y.len() {
        return Err(StatTestError::LengthMismatch(x.len(), y.len()));
    }
    require_len(x, 3)?;
    require_len(y, 3)?;
    let (mx, my) = (x.mean(), y.mean());
    let mut sxy = 0.0;
    for (a, b) in x.values.iter().zip(&y.values) {
        sxy += (a - mx) * (b - my);
    }
    let (sxx, syy) = (sum_sq_dev(&x.values), sum_sq_dev(&y.values));
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatTestError::ZeroVariance("correlation with a constant vector".into()));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let n = x.len() as f64;
    let df = n - 2.0;
    let (p, degenerate) = if r.abs() >= 1.0 {
        (0.0, true)
    } else {
        (t_p(r * (df / (1.0 - r * r)).sqrt(), df), false)
    };
    Ok(TestOutcome {
        family: StatFamily::R,
        value: r,
        dfs: vec![df],
        design: Design::Correlation { n: x.len() as u64 },
        p_two_sided: p,
        direction: Direction::from_sign(r),
        degenerate,
    })
}

/// Pearson chi-square test of independence, no continuity correction.
///
/// For 2×2 tables the direction is the sign of the log odds ratio
/// (row 1 has relatively more column-1 outcomes than row 2).
pub fn chi_square(table: &[Vec<f64>]) -> Result<TestOutcome, StatTestError> {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    if rows < 2 || cols < 2 || table.iter().any(|r| r.len() != cols) {
        return Err(StatTestError::DegenerateTable("table must be rectangular and at least 2×2".into()));
    }
    if table.iter().flatten().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(StatTestError::InvalidInput("counts must be finite and non-negative".into()));
    }
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<f64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    if row_sums.iter().chain(&col_sums).any(|&s| s == 0.0) {
        return Err(StatTestError::DegenerateTable("a row or column total is zero".into()));
    }
    let total: f64 = row_sums.iter().sum();
    let mut chi2 = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let expected = row_sums[i] * col_sums[j] / total;
            chi2 += (obs - expected).powi(2) / expected;
        }
    }
    let df = ((rows - 1) * (cols - 1)) as f64;
    let direction = if rows == 2 && cols == 2 {
        Direction::from_sign(table[0][0] * table[1][1] - table[0][1] * table[1][0])
    } else {
        Direction::None
    };
    Ok(TestOutcome {
        family: StatFamily::ChiSquare,
        value: chi2,
        dfs: vec![df],
        design: Design::Table { counts: table.to_vec() },
        p_two_sided: Dist::ChiSquare { df }.sf(chi2),
        direction,
        degenerate: false,
    })
}

fn binom_ln_pmf(i: u64, n: u64, p0: f64) -> f64 {
    ln_choose(n, i) + i as f64 * p0.ln() + (n - i) as f64 * (-p0).ln_1p()
}

/// Exact two-sided binomial test summing all outcomes no more likely than `k`.
/// `value` holds the observed proportion `k/n`.
pub fn binomial_test(k: u64, n: u64, p0: f64) -> Result<TestOutcome, StatTestError> {
    if n == 0 || k > n {
        return Err(StatTestError::InvalidInput(format!("need 0 <= k <= n and n > 0, got k={k}, n={n}")));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(StatTestError::InvalidInput(format!("p0 must lie in (0, 1), got {p0}")));
    }
    let observed = binom_ln_pmf(k, n, p0);
    let cutoff = observed + 1e-7_f64.ln_1p();
    let p: f64 = (0..=n).map(|i| binom_ln_pmf(i, n, p0)).filter(|&l| l <= cutoff).map(f64::exp).sum();
    let phat = k as f64 / n as f64;
    Ok(TestOutcome {
        family: StatFamily::BinomialProp,
        value: phat,
        dfs: Vec::new(),
        design: Design::Binomial { k, n, p0 },
        p_two_sided: p.min(1.0),
        direction: Direction::from_sign(phat - p0),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[f64]) -> SampleVector {
        SampleVector::new("g", v.to_vec())
    }

    #[test]
    fn pooled_t_hand_case() {
        let out = t_test(&sv(&[1.0, 2.0, 3.0]), Some(&sv(&[4.0, 5.0, 6.0])), TMode::IndependentPooled, 0.0).unwrap();
        assert!((out.value + 3.674_234_614_174_767).abs() < 1e-12);
        assert_eq!(out.dfs, vec![4.0]);
        assert_eq!(out.direction, Direction::Negative);
    }

    #[test]
    fn zero_variance_conventions() {
        let same = t_test(&sv(&[1.0, 2.0, 3.0]), Some(&sv(&[1.0, 2.0, 3.0])), TMode::Paired, 0.0).unwrap();
        assert_eq!((same.value, same.p_two_sided, same.degenerate), (0.0, 1.0, false));
        let shifted = t_test(&sv(&[2.0, 2.0]), Some(&sv(&[1.0, 1.0])), TMode::IndependentPooled, 0.0).unwrap();
        assert_eq!(shifted.value, f64::INFINITY);
        assert!(shifted.degenerate);
        assert_eq!(shifted.p_two_sided, 0.0);
    }

    #[test]
    fn too_small() {
        assert!(matches!(
            t_test(&sv(&[1.0]), None, TMode::OneSample, 0.0),
            Err(StatTestError::InsufficientData(_))
        ));
    }

    #[test]
    fn chi_square_cases() {
        let out = chi_square(&[vec![20.0, 0.0], vec![0.0, 20.0]]).unwrap();
        assert!((out.value - 40.0).abs() < 1e-12);
        assert_eq!(out.dfs, vec![1.0]);
        assert_eq!(chi_square(&[vec![10.0, 10.0], vec![10.0, 10.0]]).unwrap().value, 0.0);
        assert!(matches!(chi_square(&[vec![1.0, 0.0], vec![0.0, 0.0]]), Err(StatTestError::DegenerateTable(_))));
    }

    #[test]
    fn binomial_cases() {
        let c = binomial_test(5, 10, 0.5).unwrap();
        assert!((c.p_two_sided - 1.0).abs() < 1e-12);
        assert_eq!(c.direction, Direction::None);
        let hi = binomial_test(10, 10, 0.5).unwrap();
        assert!((hi.p_two_sided - 2.0 * 0.5f64.powi(10)).abs() < 1e-15);
        let lo = binomial_test(0, 10, 0.5).unwrap();
        assert_eq!(lo.p_two_sided, hi.p_two_sided);
        assert_eq!(lo.direction, Direction::Negative);
    }

    #[test]
    fn pearson_cases() {
        let r = pearson(&sv(&[1.0, 2.0, 3.0, 4.0]), &sv(&[1.0, 3.0, 2.0, 4.0])).unwrap();
        assert!((r.value - 0.8).abs() < 1e-12);
        assert_eq!(pearson(&sv(&[1.0, 2.0, 3.0]), &sv(&[3.0, 2.0, 1.0])).unwrap().value, -1.0);
        assert!(matches!(pearson(&sv(&[1.0, 1.0, 1.0]), &sv(&[1.0, 2.0, 3.0])), Err(StatTestError::ZeroVariance(_))));
    }
}
