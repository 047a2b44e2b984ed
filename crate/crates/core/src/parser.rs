//! Typed parsing of reported statistics, p-values and ground-truth records.
//!
//! Reported strings come from PDF extraction, so the grammar is forgiving
//! about whitespace, chi glyphs, leading zeros and Unicode minus signs.

use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("unrecognized statistic: {0:?}")]
    UnrecognizedStatistic(String),
    #[error("unrecognized p-value: {0:?}")]
    UnrecognizedPValue(String),
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("record carries no usable statistic, p-value or group summaries")]
    MissingEvidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatFamily {
    T,
    F,
    ChiSquare,
    R,
    Z,
    U,
    BinomialProp,
}

impl StatFamily {
    /// Number of degrees of freedom a fully specified statistic carries.
    pub fn expected_dfs(self) -> usize {
        match self {
            StatFamily::T | StatFamily::ChiSquare | StatFamily::R => 1,
            StatFamily::F => 2,
            StatFamily::Z | StatFamily::U | StatFamily::BinomialProp => 0,
        }
    }

    /// Families whose value carries a sign.
    pub fn is_signed(self) -> bool {
        matches!(self, StatFamily::T | StatFamily::R | StatFamily::Z)
    }

    fn symbol(self) -> &'static str {
        match self {
            StatFamily::T => "t",
            StatFamily::F => "F",
            StatFamily::ChiSquare => "χ2",
            StatFamily::R => "r",
            StatFamily::Z => "z",
            StatFamily::U => "U",
            StatFamily::BinomialProp => "prop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equals,
    LessThan,
    GreaterThan,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Equals => "=",
            Relation::LessThan => "<",
            Relation::GreaterThan => ">",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Positive,
    Negative,
    None,
}

impl Direction {
    pub fn from_sign(x: f64) -> Direction {
        if x > 0.0 {
            Direction::Positive
        } else if x < 0.0 {
            Direction::Negative
        } else {
            Direction::None
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Direction::Positive => 1.0,
            Direction::Negative => -1.0,
            Direction::None => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportedStatistic {
    pub family: StatFamily,
    pub value: f64,
    pub relation: Relation,
    pub dfs: Vec<f64>,
    pub n_total: Option<u64>,
    pub raw_text: String,
}

impl ReportedStatistic {
    /// Canonical rendering, e.g. `t(23) = 4.66` or `χ2(1, N = 42) = 9.5`.
    pub fn render(&self) -> String {
        let mut inner: Vec<String> = self.dfs.iter().map(|d| format!("{d}")).collect();
        if let Some(n) = self.n_total {
            inner.push(format!("N = {n}"));
        }
        let head = if inner.is_empty() {
            self.family.symbol().to_string()
        } else {
            format!("{}({})", self.family.symbol(), inner.join(", "))
        };
        format!("{head} {} {}", self.relation.symbol(), self.value)
    }

    /// The statistic is a bound rather than a point estimate.
    pub fn is_bound(&self) -> bool {
        self.relation != Relation::Equals
    }
}

impl fmt::Display for ReportedStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Qualitative {
    NotSignificant,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportedPValue {
    pub relation: Relation,
    pub value: Option<f64>,
    pub qualitative: Option<Qualitative>,
    pub raw_text: String,
}

impl ReportedPValue {
    pub fn render(&self) -> String {
        match (self.value, self.qualitative) {
            (Some(v), _) => format!("p {} {v}", self.relation.symbol()),
            (None, Some(Qualitative::Marginal)) => "marginal".to_string(),
            (None, _) => "not significant".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: String,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub n: Option<u64>,
    /// Success count for proportion-style groups.
    pub count: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSpec {
    pub finding_id: String,
    pub test_name: String,
    /// Disambiguates several results with the same `test_name` in a finding.
    pub test_id: Option<String>,
    pub statistic: Option<ReportedStatistic>,
    pub p: Option<ReportedPValue>,
    pub groups: Vec<GroupSummary>,
    pub direction: Direction,
    pub weight: f64,
    /// Null proportion for binomial records (`raw_data.p0`).
    pub p0: Option<f64>,
    /// Participant count of the enclosing sub-study, used when the record
    /// itself carries no sample size.
    pub sample_n: Option<u64>,
}

impl TestSpec {
    /// Key used to bind the record to a metadata test entry.
    pub fn key(&self) -> &str {
        self.test_id.as_deref().unwrap_or(&self.test_name)
    }

    /// Best available total sample size.
    pub fn total_n(&self) -> Option<u64> {
        let from_groups: Option<u64> = if !self.groups.is_empty() && self.groups.iter().all(|g| g.n.is_some()) {
            Some(self.groups.iter().filter_map(|g| g.n).sum())
        } else {
            None
        };
        from_groups
            .or_else(|| self.statistic.as_ref().and_then(|s| s.n_total))
            .or(self.sample_n)
    }
}

fn normalize(text: &str) -> String {
    let mut s: String = text
        .chars()
        .filter(|c| !c.is_whitespace() && !matches!(c, '$' | '{' | '}'))
        .map(|c| match c {
            '−' | '–' | '—' => '-',
            '²' => '2',
            _ => c,
        })
        .collect();
    for (from, to) in [
        ("\\chi^2", "chi2"),
        ("\\chi", "chi2"),
        ("χ^2", "chi2"),
        ("χ2", "chi2"),
        ("χ", "chi2"),
        ("chi^2", "chi2"),
        ("Chi^2", "chi2"),
        ("Chi2", "chi2"),
        ("chi-squared", "chi2"),
        ("chi-square", "chi2"),
        ("X^2", "chi2"),
        ("X2", "chi2"),
        ("x2", "chi2"),
        ("≤", "<"),
        ("≥", ">"),
        ("<=", "<"),
        (">=", ">"),
    ] {
        if s.contains(from) {
            s = s.replace(from, to);
        }
    }
    s
}

fn stat_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^(?P<fam>t|F|chi2|r|z|Z|U|prop|p̂)(?:\((?P<inner>[^)]*)\))?(?P<rel>=|<|>)(?P<val>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)$",
        )
        .expect("statistic grammar")
    })
}

fn parse_number(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    v.is_finite().then_some(v)
}

/// Parse an APA-style statistic string such as `t(23) = 4.66`.
pub fn parse_statistic(text: &str) -> Result<ReportedStatistic, ParseError> {
    let err = || ParseError::UnrecognizedStatistic(text.to_string());
    let norm = normalize(text);
    if norm.is_empty() {
        return Err(err());
    }
    let caps = stat_regex().captures(&norm).ok_or_else(err)?;
    let family = match &caps["fam"] {
        "t" => StatFamily::T,
        "F" => StatFamily::F,
        "chi2" => StatFamily::ChiSquare,
        "r" => StatFamily::R,
        "z" | "Z" => StatFamily::Z,
        "U" => StatFamily::U,
        _ => StatFamily::BinomialProp,
    };
    let relation = match &caps["rel"] {
        "=" => Relation::Equals,
        "<" => Relation::LessThan,
        _ => Relation::GreaterThan,
    };
    let value = parse_number(&caps["val"]).ok_or_else(err)?;
    let mut dfs = Vec::new();
    let mut n_total = None;
    if let Some(inner) = caps.name("inner") {
        for part in inner.as_str().split(',').filter(|p| !p.is_empty()) {
            if let Some(n) = part.strip_prefix("N=").or_else(|| part.strip_prefix("n=")) {
                let n: u64 = n.parse().map_err(|_| err())?;
                if n == 0 || n_total.is_some() {
                    return Err(err());
                }
                n_total = Some(n);
            } else {
                let df = parse_number(part).ok_or_else(err)?;
                if df < 0.0 {
                    return Err(err());
                }
                dfs.push(df);
            }
        }
    }
    // empty dfs are allowed ("t < 1", "F = 56.2"); otherwise the count must match
    if !dfs.is_empty() && dfs.len() != family.expected_dfs() {
        return Err(err());
    }
    if matches!(family, StatFamily::BinomialProp) && !(0.0..=1.0).contains(&value) {
        return Err(err());
    }
    Ok(ReportedStatistic { family, value, relation, dfs, n_total, raw_text: text.to_string() })
}

fn p_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^(?:p|P)?(?P<rel>=|<|>)?(?P<val>(?:\d*\.?\d+[eE]-?\d+|0?\.\d+|1(?:\.0*)?))(?P<tail>.*)$")
            .expect("p-value grammar")
    })
}

/// Parse a p-value string such as `p < .001`, `p = .04` or `n.s.`.
pub fn parse_p_value(text: &str) -> Result<ReportedPValue, ParseError> {
    let err = || ParseError::UnrecognizedPValue(text.to_string());
    let norm = normalize(text);
    if norm.is_empty() {
        return Err(err());
    }
    let lower = norm.to_lowercase();
    let qualitative_of = |s: &str| -> Option<Qualitative> {
        let s = s.trim_matches(|c: char| c == '(' || c == ')' || c == ',' || c == ';');
        if s.contains("marginal") {
            Some(Qualitative::Marginal)
        } else if matches!(s, "ns" | "n.s." | "n.s" | "nonsignificant" | "non-significant" | "notsignificant")
            || s.contains("notsignificant")
        {
            Some(Qualitative::NotSignificant)
        } else {
            None
        }
    };
    if let Some(q) = qualitative_of(&lower) {
        if !p_regex().is_match(&lower) {
            return Ok(ReportedPValue { relation: Relation::Equals, value: None, qualitative: Some(q), raw_text: text.to_string() });
        }
    }
    let caps = p_regex().captures(&lower).ok_or_else(err)?;
    let value = parse_number(&caps["val"]).ok_or_else(err)?;
    if !(value > 0.0 && value <= 1.0) {
        return Err(err());
    }
    let relation = match caps.name("rel").map(|m| m.as_str()) {
        Some("<") => Relation::LessThan,
        Some(">") => Relation::GreaterThan,
        _ => Relation::Equals,
    };
    let tail = &caps["tail"];
    let qualitative = if tail.is_empty() {
        None
    } else {
        Some(qualitative_of(tail).ok_or_else(err)?)
    };
    Ok(ReportedPValue { relation, value: Some(value), qualitative, raw_text: text.to_string() })
}

fn violation(path: &str, message: impl Into<String>) -> ParseError {
    ParseError::SchemaViolation { path: path.to_string(), message: message.into() }
}

fn opt_str<'a>(record: &'a Value, key: &str, path: &str) -> Result<Option<&'a str>, ParseError> {
    match record.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) if s.trim().is_empty() => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.as_str())),
        Some(_) => Err(violation(&format!("{path}.{key}"), "expected a string")),
    }
}

fn opt_f64(obj: &Value, key: &str, path: &str) -> Result<Option<f64>, ParseError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .map(Some)
            .ok_or_else(|| violation(&format!("{path}.{key}"), "expected a number")),
    }
}

fn opt_count(obj: &Value, key: &str, path: &str) -> Result<Option<u64>, ParseError> {
    match opt_f64(obj, key, path)? {
        None => Ok(None),
        Some(x) if x >= 0.0 && x.fract() == 0.0 => Ok(Some(x as u64)),
        Some(_) => Err(violation(&format!("{path}.{key}"), "expected a non-negative integer")),
    }
}

/// Sort key putting `group_2` before `group_10`.
fn group_order(key: &str) -> (String, u64) {
    let digits: String = key.chars().rev().take_while(|c| c.is_ascii_digit()).collect();
    let stem = key[..key.len() - digits.len()].to_string();
    let num = digits.chars().rev().collect::<String>().parse().unwrap_or(0);
    (stem, num)
}

fn parse_groups(raw: &Value, path: &str) -> Result<(Vec<GroupSummary>, Option<f64>), ParseError> {
    let Some(map) = raw.as_object() else {
        return Err(violation(path, "raw_data must be an object"));
    };
    let mut keys: Vec<&String> = map.keys().filter(|k| map[*k].is_object()).collect();
    keys.sort_by_key(|k| group_order(k));
    let mut groups = Vec::with_capacity(keys.len());
    for key in keys {
        let gpath = format!("{path}.{key}");
        let obj = &map[key];
        let label = match obj.get("label").and_then(Value::as_str) {
            Some(l) => l.to_string(),
            None => key.clone(),
        };
        let mean = opt_f64(obj, "mean", &gpath)?;
        let sd = opt_f64(obj, "sd", &gpath)?;
        if let Some(sd) = sd {
            if sd < 0.0 {
                return Err(violation(&format!("{gpath}.sd"), "standard deviation must be non-negative"));
            }
        }
        let n = opt_count(obj, "n", &gpath)?;
        if n == Some(0) {
            return Err(violation(&format!("{gpath}.n"), "group size must be positive"));
        }
        let count = match opt_count(obj, "count", &gpath)? {
            Some(c) => Some(c),
            None => opt_count(obj, "k", &gpath)?,
        };
        if let (Some(c), Some(n)) = (count, n) {
            if c > n {
                return Err(violation(&format!("{gpath}.count"), "count exceeds group size"));
            }
        }
        groups.push(GroupSummary { label, mean, sd, n, count });
    }
    let p0 = opt_f64(raw, "p0", path)?;
    Ok((groups, p0))
}

/// Pooled two-sample t from two group summaries with mean, sd and n.
fn t_from_groups(groups: &[GroupSummary]) -> Option<ReportedStatistic> {
    let [g1, g2] = groups else { return None };
    let (m1, s1, n1) = (g1.mean?, g1.sd?, g1.n? as f64);
    let (m2, s2, n2) = (g2.mean?, g2.sd?, g2.n? as f64);
    if n1 < 2.0 || n2 < 2.0 {
        return None;
    }
    let pooled = ((n1 - 1.0) * s1 * s1 + (n2 - 1.0) * s2 * s2) / (n1 + n2 - 2.0);
    if pooled <= 0.0 {
        return None;
    }
    let t = (m1 - m2) / (pooled * (1.0 / n1 + 1.0 / n2)).sqrt();
    let df = n1 + n2 - 2.0;
    let mut stat = ReportedStatistic {
        family: StatFamily::T,
        value: t,
        relation: Relation::Equals,
        dfs: vec![df],
        n_total: None,
        raw_text: String::new(),
    };
    stat.raw_text = stat.render();
    Some(stat)
}

fn infer_direction(stat: Option<&ReportedStatistic>, groups: &[GroupSummary], p0: Option<f64>) -> Direction {
    let mean_order = match groups {
        [g1, g2, ..] => match (g1.mean, g2.mean) {
            (Some(a), Some(b)) => Some(Direction::from_sign(a - b)),
            _ => match (g1.count, g1.n, g2.count, g2.n) {
                (Some(c1), Some(n1), Some(c2), Some(n2)) => {
                    Some(Direction::from_sign(c1 as f64 / n1 as f64 - c2 as f64 / n2 as f64))
                }
                _ => None,
            },
        },
        _ => None,
    };
    match stat {
        Some(s) if s.family == StatFamily::BinomialProp => {
            Direction::from_sign(s.value - p0.unwrap_or(0.5))
        }
        Some(s) if s.family.is_signed() && s.value != 0.0 => {
            // reported magnitudes are usually unsigned; trust the group ordering when present
            match mean_order {
                Some(d) if s.value > 0.0 && d != Direction::None => d,
                _ => Direction::from_sign(s.value),
            }
        }
        Some(s) if s.family.is_signed() => Direction::None,
        _ => mean_order.unwrap_or(Direction::None),
    }
}

/// Build a [`TestSpec`] from one `statistical_results` entry.
///
/// `path` prefixes schema-violation locations.
pub fn parse_ground_truth_record(record: &Value, path: &str) -> Result<TestSpec, ParseError> {
    if !record.is_object() {
        return Err(violation(path, "statistical result must be an object"));
    }
    let finding_id = opt_str(record, "finding_id", path)?
        .ok_or_else(|| violation(&format!("{path}.finding_id"), "missing finding_id"))?
        .to_string();
    let test_name = opt_str(record, "test_name", path)?.unwrap_or("test").to_string();
    let test_id = opt_str(record, "test_id", path)?.map(str::to_string);

    let (groups, p0) = match record.get("raw_data") {
        None | Some(Value::Null) => (Vec::new(), None),
        Some(raw) => parse_groups(raw, &format!("{path}.raw_data"))?,
    };
    if let Some(p0) = p0 {
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(violation(&format!("{path}.raw_data.p0"), "p0 must lie in (0, 1)"));
        }
    }

    let statistic = match opt_str(record, "statistic", path)? {
        Some(s) => parse_statistic(s).ok(),
        None => None,
    };
    let p = match opt_str(record, "p_value", path)? {
        Some(s) => parse_p_value(s).ok(),
        None => None,
    };
    let statistic = statistic.or_else(|| t_from_groups(&groups));
    if statistic.is_none() && p.as_ref().is_none_or(|p| p.value.is_none()) {
        return Err(ParseError::MissingEvidence);
    }
    let weight = match opt_f64(record, "weight", path)? {
        None => 1.0,
        Some(w) if w > 0.0 => w,
        Some(_) => return Err(violation(&format!("{path}.weight"), "weight must be positive")),
    };
    let direction = infer_direction(statistic.as_ref(), &groups, p0);
    Ok(TestSpec { finding_id, test_name, test_id, statistic, p, groups, direction, weight, p0, sample_n: None })
}
