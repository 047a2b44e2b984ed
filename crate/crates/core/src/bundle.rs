//! Study bundles, agent transcripts, response parsing and data collection.
//!
//! A bundle is a directory with `ground_truth.json` (extracted human results)
//! and `metadata.json` (findings, weights and one declarative binding per
//! test). Bindings say which answers feed which test, so no per-study
//! evaluator code is needed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::parser::{parse_ground_truth_record, parse_statistic, ParseError, TestSpec};
use crate::stat_tests::SampleVector;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaViolation {
    pub path: String,
    pub message: String,
}

impl SchemaViolation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaViolation { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for SchemaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{} schema violation(s); first: {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    Schema(Vec<SchemaViolation>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CollectError {
    #[error("binding does not match the data: {0}")]
    BindingMismatch(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("cannot read {raw:?} as {kind}")]
pub struct CoercionFailure {
    pub raw: String,
    pub kind: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Cognition,
    Strategic,
    Social,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Cognition => "cognition",
            Domain::Strategic => "strategic",
            Domain::Social => "social",
        }
    }
}

/// Which answer a binding reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuestionSelector {
    /// Literal key such as `"Q2"` or `"Q1.3"`.
    Key(String),
    /// The i-th item of `trial_info.items`: its `q_idx` field, else `Q{i+1}`.
    ItemIndex { item_index: usize },
    /// A named field of one item (`item: Some(i)`) or of every item carrying it.
    ItemField { item_field: String, item: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Numeric,
    Count,
    Choice(Vec<String>),
}

impl ValueKind {
    fn label(&self) -> String {
        match self {
            ValueKind::Numeric => "numeric".into(),
            ValueKind::Count => "count".into(),
            ValueKind::Choice(opts) => format!("choice({})", opts.join(",")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    TIndependent,
    TPaired,
    TOneSample,
    Anova,
    Pearson,
    ChiSquare,
    Binomial,
}

impl TestKind {
    pub fn needs_groups(self) -> bool {
        matches!(self, TestKind::TIndependent | TestKind::Anova | TestKind::ChiSquare)
    }

    pub fn needs_second_question(self) -> bool {
        matches!(self, TestKind::TPaired | TestKind::Pearson)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestBinding {
    pub sub_study_id: String,
    pub question: QuestionSelector,
    pub value_kind: ValueKind,
    pub family: TestKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_by: Option<String>,
    /// Group order; the first two map to `group_1` and `group_2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_question: Option<QuestionSelector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<f64>,
    /// Choice counted as a success (binomial) or placed in the first column
    /// (chi-square).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTest {
    pub finding_id: String,
    pub test_name: String,
    pub test_id: Option<String>,
    pub weight: f64,
    pub binding: TestBinding,
    /// Parsed human record, or why it could not be used.
    pub human: Result<TestSpec, String>,
}

impl BoundTest {
    pub fn key(&self) -> &str {
        self.test_id.as_deref().unwrap_or(&self.test_name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub finding_id: String,
    pub weight: f64,
    pub tests: Vec<BoundTest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyBundle {
    pub study_id: String,
    pub domain: Domain,
    pub findings: Vec<Finding>,
    pub sub_studies: BTreeMap<String, Option<u64>>,
    /// Non-fatal remarks such as statistic strings that need manual curation.
    pub warnings: Vec<String>,
    /// The raw ground-truth document, kept for materials and pass-through.
    pub materials: Value,
}

impl StudyBundle {
    pub fn test_count(&self) -> usize {
        self.findings.iter().map(|f| f.tests.len()).sum()
    }

    pub fn bindings_for<'a>(&'a self, sub_study_id: &'a str) -> impl Iterator<Item = &'a TestBinding> + 'a {
        self.findings
            .iter()
            .flat_map(|f| f.tests.iter())
            .map(|t| &t.binding)
            .filter(move |b| b.sub_study_id == sub_study_id)
    }
}

fn read_json(path: &Path) -> Result<Value, BundleError> {
    let text = fs::read_to_string(path).map_err(|source| BundleError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        BundleError::Schema(vec![SchemaViolation::new(name, format!("invalid JSON: {e}"))])
    })
}

/// Load and validate a bundle directory. All violations are collected.
pub fn load_bundle(dir: &Path) -> Result<StudyBundle, BundleError> {
    let gt = read_json(&dir.join("ground_truth.json"))?;
    let meta = read_json(&dir.join("metadata.json"))?;
    validate_bundle(&gt, &meta).map_err(BundleError::Schema)
}

struct Ctx {
    violations: Vec<SchemaViolation>,
}

impl Ctx {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(SchemaViolation::new(path, message));
    }

    fn string<'a>(&mut self, obj: &'a Value, key: &str, path: &str) -> Option<&'a str> {
        match obj.get(key) {
            Some(Value::String(s)) if !s.trim().is_empty() => Some(s),
            Some(Value::String(_)) => {
                self.push(format!("{path}.{key}"), "must not be empty");
                None
            }
            Some(_) => {
                self.push(format!("{path}.{key}"), "expected a string");
                None
            }
            None => {
                self.push(format!("{path}.{key}"), "missing");
                None
            }
        }
    }

    fn array<'a>(&mut self, obj: &'a Value, key: &str, path: &str) -> Option<&'a Vec<Value>> {
        match obj.get(key) {
            Some(Value::Array(a)) => Some(a),
            Some(_) => {
                self.push(format!("{path}.{key}"), "expected an array");
                None
            }
            None => {
                self.push(format!("{path}.{key}"), "missing");
                None
            }
        }
    }

    fn weight(&mut self, obj: &Value, path: &str) -> Option<f64> {
        match obj.get("weight") {
            None | Some(Value::Null) => None,
            Some(v) => match v.as_f64() {
                Some(w) if w > 0.0 && w.is_finite() => Some(w),
                _ => {
                    self.push(format!("{path}.weight"), "weight must be a positive number");
                    None
                }
            },
        }
    }
}

struct Record {
    path: String,
    sub_study_id: String,
    result: Result<TestSpec, String>,
    finding_id: String,
    key: String,
}

fn collect_records(gt: &Value, ctx: &mut Ctx, warnings: &mut Vec<String>) -> (Vec<Record>, BTreeMap<String, Option<u64>>) {
    let mut records = Vec::new();
    let mut sub_studies = BTreeMap::new();
    if !gt.is_object() {
        ctx.push("ground_truth", "expected an object");
        return (records, sub_studies);
    }
    let Some(studies) = ctx.array(gt, "studies", "ground_truth") else {
        return (records, sub_studies);
    };
    for (si, study) in studies.iter().enumerate() {
        let spath = format!("ground_truth.studies[{si}]");
        let Some(subs) = ctx.array(study, "sub_studies", &spath) else { continue };
        for (ui, sub) in subs.iter().enumerate() {
            let upath = format!("{spath}.sub_studies[{ui}]");
            let Some(sub_id) = ctx.string(sub, "sub_study_id", &upath) else { continue };
            let n = match sub.get("participants").and_then(|p| p.get("n")) {
                None | Some(Value::Null) => None,
                Some(v) => match v.as_u64() {
                    Some(n) if n > 0 => Some(n),
                    _ => {
                        ctx.push(format!("{upath}.participants.n"), "expected a positive integer");
                        None
                    }
                },
            };
            if sub_studies.insert(sub_id.to_string(), n).is_some() {
                ctx.push(format!("{upath}.sub_study_id"), format!("duplicate sub_study_id {sub_id:?}"));
            }
            let Some(human) = sub.get("human_data") else { continue };
            let Some(results) = ctx.array(human, "statistical_results", &format!("{upath}.human_data")) else { continue };
            for (ri, rec) in results.iter().enumerate() {
                let rpath = format!("{upath}.human_data.statistical_results[{ri}]");
                if let Some(Value::String(s)) = rec.get("statistic") {
                    if !s.trim().is_empty() && parse_statistic(s).is_err() {
                        warnings.push(format!("{rpath}.statistic: unrecognized statistic {s:?} needs manual curation"));
                    }
                }
                let result = match parse_ground_truth_record(rec, &rpath) {
                    Ok(mut spec) => {
                        spec.sample_n = n;
                        Ok(spec)
                    }
                    Err(ParseError::SchemaViolation { path, message }) => {
                        ctx.push(path, message.clone());
                        Err(message)
                    }
                    Err(e) => Err(e.to_string()),
                };
                let finding_id = rec.get("finding_id").and_then(Value::as_str).unwrap_or_default().to_string();
                let key = rec
                    .get("test_id")
                    .and_then(Value::as_str)
                    .or_else(|| rec.get("test_name").and_then(Value::as_str))
                    .unwrap_or("test")
                    .to_string();
                records.push(Record { path: rpath, sub_study_id: sub_id.to_string(), result, finding_id, key });
            }
        }
    }
    (records, sub_studies)
}

fn parse_selector(v: &Value, path: &str, ctx: &mut Ctx) -> Option<QuestionSelector> {
    static KEY: OnceLock<Regex> = OnceLock::new();
    let key_re = KEY.get_or_init(|| Regex::new(r"^Q\d+(?:\.\d+)?$").expect("key pattern"));
    match serde_json::from_value::<QuestionSelector>(v.clone()) {
        Ok(QuestionSelector::Key(k)) if !key_re.is_match(&k) => {
            ctx.push(path, format!("question key {k:?} is not of the form Q<n> or Q<n>.<m>"));
            None
        }
        Ok(QuestionSelector::ItemField { item_field, .. }) if item_field.is_empty() => {
            ctx.push(path, "item_field must not be empty");
            None
        }
        Ok(sel) => Some(sel),
        Err(_) => {
            ctx.push(path, "expected a Q-key string, {\"item_index\": i} or {\"item_field\": name}");
            None
        }
    }
}

fn parse_binding(
    v: &Value,
    path: &str,
    sub_studies: Option<&BTreeMap<String, Option<u64>>>,
    ctx: &mut Ctx,
) -> Option<TestBinding> {
    if !v.is_object() {
        ctx.push(path, "binding must be an object");
        return None;
    }
    let before = ctx.violations.len();
    let sub = ctx.string(v, "sub_study_id", path).map(str::to_string);
    if let (Some(s), Some(known)) = (&sub, sub_studies) {
        if !known.contains_key(s) {
            ctx.push(format!("{path}.sub_study_id"), format!("unknown sub_study_id {s:?}"));
        }
    }
    let question = match v.get("question") {
        Some(q) => parse_selector(q, &format!("{path}.question"), ctx),
        None => {
            ctx.push(format!("{path}.question"), "missing");
            None
        }
    };
    let second = match v.get("second_question") {
        None | Some(Value::Null) => None,
        Some(q) => parse_selector(q, &format!("{path}.second_question"), ctx),
    };
    let value_kind = match v.get("value_kind").map(|k| serde_json::from_value::<ValueKind>(k.clone())) {
        Some(Ok(ValueKind::Choice(opts))) if opts.is_empty() => {
            ctx.push(format!("{path}.value_kind"), "choice options must not be empty");
            None
        }
        Some(Ok(k)) => Some(k),
        Some(Err(_)) => {
            ctx.push(format!("{path}.value_kind"), "expected \"numeric\", \"count\" or {\"choice\": [...]}");
            None
        }
        None => {
            ctx.push(format!("{path}.value_kind"), "missing");
            None
        }
    };
    let family = match v.get("family").map(|k| serde_json::from_value::<TestKind>(k.clone())) {
        Some(Ok(k)) => Some(k),
        Some(Err(_)) => {
            ctx.push(format!("{path}.family"), "unknown test family");
            None
        }
        None => {
            ctx.push(format!("{path}.family"), "missing");
            None
        }
    };
    let group_by = v.get("group_by").and_then(Value::as_str).map(str::to_string);
    let groups: Option<Vec<String>> = match v.get("groups") {
        None | Some(Value::Null) => None,
        Some(Value::Array(a)) if a.iter().all(Value::is_string) => {
            Some(a.iter().filter_map(Value::as_str).map(str::to_string).collect())
        }
        Some(_) => {
            ctx.push(format!("{path}.groups"), "expected an array of labels");
            None
        }
    };
    let num = |key: &str, ctx: &mut Ctx| match v.get(key) {
        None | Some(Value::Null) => None,
        Some(x) => match x.as_f64() {
            Some(f) if f.is_finite() => Some(f),
            _ => {
                ctx.push(format!("{path}.{key}"), "expected a number");
                None
            }
        },
    };
    let mu0 = num("mu0", ctx);
    let p0 = num("p0", ctx);
    if let Some(p) = p0 {
        if !(p > 0.0 && p < 1.0) {
            ctx.push(format!("{path}.p0"), "p0 must lie in (0, 1)");
        }
    }
    let success = v.get("success").and_then(Value::as_str).map(str::to_string);

    if let Some(kind) = family {
        if kind.needs_groups() && group_by.is_none() {
            ctx.push(format!("{path}.group_by"), format!("{kind:?} needs group_by"));
        }
        if let Some(g) = &groups {
            let want_two = kind == TestKind::TIndependent;
            if (want_two && g.len() != 2) || g.len() < 2 || g.iter().collect::<BTreeSet<_>>().len() != g.len() {
                ctx.push(format!("{path}.groups"), "groups must list distinct labels (exactly 2 for t_independent)");
            }
        }
        if kind.needs_second_question() && v.get("second_question").is_none() {
            ctx.push(format!("{path}.second_question"), format!("{kind:?} needs second_question"));
        }
        match (&value_kind, kind) {
            (Some(ValueKind::Choice(_)), TestKind::ChiSquare | TestKind::Binomial) => {}
            (Some(_), TestKind::ChiSquare) => ctx.push(format!("{path}.value_kind"), "chi_square needs a choice value kind"),
            (Some(ValueKind::Choice(_)), _) => {
                ctx.push(format!("{path}.value_kind"), "choice answers only feed chi_square or binomial")
            }
            _ => {}
        }
        if kind == TestKind::Binomial {
            if let Some(ValueKind::Choice(opts)) = &value_kind {
                match &success {
                    Some(s) if opts.iter().any(|o| o.eq_ignore_ascii_case(s)) => {}
                    _ => ctx.push(format!("{path}.success"), "binomial needs a success option from the choices"),
                }
            }
        }
    }
    if ctx.violations.len() > before {
        return None;
    }
    Some(TestBinding {
        sub_study_id: sub?,
        question: question?,
        value_kind: value_kind?,
        family: family?,
        group_by,
        groups,
        second_question: second,
        mu0,
        p0,
        success,
    })
}

/// Validate parsed `ground_truth.json` and `metadata.json` documents.
pub fn validate_bundle(gt: &Value, meta: &Value) -> Result<StudyBundle, Vec<SchemaViolation>> {
    let mut ctx = Ctx { violations: Vec::new() };
    let mut warnings = Vec::new();
    let (records, sub_studies) = collect_records(gt, &mut ctx, &mut warnings);
    // cross-file checks against a broken ground truth would only repeat its errors
    let gt_ok = ctx.violations.is_empty();

    let mut by_key: BTreeMap<(String, String), Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        by_key.entry((r.finding_id.clone(), r.key.clone())).or_default().push(i);
    }
    for ((fid, key), idx) in &by_key {
        if idx.len() > 1 {
            ctx.push(records[idx[1]].path.clone(), format!("duplicate result for finding {fid:?}, test {key:?}; add a test_id"));
        }
    }

    if !meta.is_object() {
        ctx.push("metadata", "expected an object");
        return Err(ctx.violations);
    }
    let study_id = ctx.string(meta, "study_id", "metadata").map(str::to_string);
    let domain = match meta.get("domain").map(|d| serde_json::from_value::<Domain>(d.clone())) {
        Some(Ok(d)) => Some(d),
        Some(Err(_)) => {
            ctx.push("metadata.domain", "expected cognition, strategic or social");
            None
        }
        None => {
            ctx.push("metadata.domain", "missing");
            None
        }
    };
    let mut findings = Vec::new();
    let mut used = vec![false; records.len()];
    if let Some(list) = ctx.array(meta, "findings", "metadata") {
        if list.is_empty() {
            ctx.push("metadata.findings", "at least one finding is required");
        }
        let default_weight = 1.0 / list.len().max(1) as f64;
        let mut seen = BTreeSet::new();
        for (fi, f) in list.iter().enumerate() {
            let fpath = format!("metadata.findings[{fi}]");
            let Some(fid) = ctx.string(f, "finding_id", &fpath).map(str::to_string) else { continue };
            if !seen.insert(fid.clone()) {
                ctx.push(format!("{fpath}.finding_id"), format!("duplicate finding_id {fid:?}"));
                continue;
            }
            let weight = ctx.weight(f, &fpath).unwrap_or(default_weight);
            let mut tests = Vec::new();
            if let Some(tlist) = ctx.array(f, "tests", &fpath) {
                if tlist.is_empty() {
                    ctx.push(format!("{fpath}.tests"), "at least one test is required");
                }
                for (ti, t) in tlist.iter().enumerate() {
                    let tpath = format!("{fpath}.tests[{ti}]");
                    let Some(name) = ctx.string(t, "test_name", &tpath).map(str::to_string) else { continue };
                    let test_id = t.get("test_id").and_then(Value::as_str).map(str::to_string);
                    let tweight = ctx.weight(t, &tpath).unwrap_or(1.0);
                    let binding = match t.get("binding") {
                        Some(b) => parse_binding(b, &format!("{tpath}.binding"), gt_ok.then_some(&sub_studies), &mut ctx),
                        None => {
                            ctx.push(format!("{tpath}.binding"), "missing");
                            None
                        }
                    };
                    let key = test_id.clone().unwrap_or_else(|| name.clone());
                    let Some(idx) = by_key.get(&(fid.clone(), key.clone())) else {
                        if gt_ok {
                            ctx.push(tpath, format!("no statistical result for finding {fid:?}, test {key:?}"));
                        }
                        continue;
                    };
                    let rec = &records[idx[0]];
                    if used[idx[0]] {
                        ctx.push(tpath, format!("test {key:?} is bound twice"));
                        continue;
                    }
                    used[idx[0]] = true;
                    let Some(binding) = binding else { continue };
                    if binding.sub_study_id != rec.sub_study_id {
                        ctx.push(
                            format!("{tpath}.binding.sub_study_id"),
                            format!("result lives in sub-study {:?}", rec.sub_study_id),
                        );
                        continue;
                    }
                    let mut human = rec.result.clone();
                    if let Ok(spec) = &mut human {
                        spec.weight = tweight;
                    }
                    tests.push(BoundTest { finding_id: fid.clone(), test_name: name, test_id, weight: tweight, binding, human });
                }
            }
            findings.push(Finding { finding_id: fid, weight, tests });
        }
    }
    for (i, r) in records.iter().enumerate() {
        if gt_ok && !used[i] {
            ctx.push(r.path.clone(), format!("result for finding {:?}, test {:?} has no binding in metadata", r.finding_id, r.key));
        }
    }
    if !ctx.violations.is_empty() {
        return Err(ctx.violations);
    }
    Ok(StudyBundle {
        study_id: study_id.expect("checked"),
        domain: domain.expect("checked"),
        findings,
        sub_studies,
        warnings,
        materials: gt.clone(),
    })
}

// ---------------------------------------------------------------------------
// Transcripts

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunMetadata {
    #[serde(default)]
    pub model: String,
    /// Agent design tag, e.g. A1–A4.
    #[serde(default)]
    pub method: String,
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    #[serde(default)]
    pub response_text: String,
    pub trial_info: Map<String, Value>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl Response {
    pub fn sub_study_id(&self) -> Option<&str> {
        self.trial_info.get("sub_study_id").and_then(Value::as_str)
    }

    pub fn items(&self) -> &[Value] {
        self.trial_info.get("items").and_then(Value::as_array).map_or(&[], Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Participant {
    pub participant_id: Value,
    #[serde(default)]
    pub responses: Vec<Response>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentTranscript {
    #[serde(default = "default_schema_version")]
    pub schema_version: String,
    #[serde(default)]
    pub metadata: RunMetadata,
    pub individual_data: Vec<Participant>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

fn default_schema_version() -> String {
    "1.0".to_string()
}

/// Parse a transcript document, checking that every response names its sub-study.
pub fn parse_transcript(v: &Value) -> Result<AgentTranscript, Vec<SchemaViolation>> {
    let t: AgentTranscript = serde_json::from_value(v.clone())
        .map_err(|e| vec![SchemaViolation::new("transcript", format!("does not match the transcript schema: {e}"))])?;
    let mut violations = Vec::new();
    for (pi, p) in t.individual_data.iter().enumerate() {
        for (ri, r) in p.responses.iter().enumerate() {
            if r.sub_study_id().is_none() {
                violations.push(SchemaViolation::new(
                    format!("transcript.individual_data[{pi}].responses[{ri}].trial_info.sub_study_id"),
                    "missing or not a string",
                ));
            }
        }
    }
    if violations.is_empty() {
        Ok(t)
    } else {
        Err(violations)
    }
}

pub fn load_transcript(path: &Path) -> Result<AgentTranscript, BundleError> {
    let v = read_json(path)?;
    parse_transcript(&v).map_err(BundleError::Schema)
}

fn response_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(Q\d+(?:\.\d+)?)\s*=\s*([^,\n\s]+)").expect("response pattern"))
}

/// Extract `Qk=value` pairs. Later duplicates overwrite earlier ones.
pub fn parse_response(text: &str) -> BTreeMap<String, String> {
    response_regex()
        .captures_iter(text)
        .map(|c| (c[1].trim().to_string(), c[2].trim().to_string()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coerced {
    Number(f64),
    Choice(String),
}

/// Turn a raw answer into a typed value according to `kind`.
pub fn coerce_value(raw: &str, kind: &ValueKind) -> Result<Coerced, CoercionFailure> {
    let fail = || CoercionFailure { raw: raw.to_string(), kind: kind.label() };
    let trimmed = raw.trim().trim_end_matches(['.', ';', ':', '!', '?', ')']).trim_start_matches('(');
    match kind {
        ValueKind::Numeric | ValueKind::Count => {
            let cleaned: String = trimmed.chars().filter(|c| !matches!(c, '$' | '€' | '£' | '%' | ',')).collect();
            let v: f64 = cleaned.parse().map_err(|_| fail())?;
            if !v.is_finite() {
                return Err(fail());
            }
            if matches!(kind, ValueKind::Count) && (v < 0.0 || v.fract() != 0.0) {
                return Err(fail());
            }
            Ok(Coerced::Number(v))
        }
        ValueKind::Choice(options) => options
            .iter()
            .find(|o| o.eq_ignore_ascii_case(trimmed))
            .map(|o| Coerced::Choice(o.clone()))
            .ok_or_else(fail),
    }
}

// ---------------------------------------------------------------------------
// Collection

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialCoverage {
    pub participant: usize,
    pub response: usize,
    pub sub_study_id: String,
    pub required: usize,
    pub parsed: usize,
    pub compliant: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub total_trials: usize,
    pub compliant_trials: usize,
    pub non_compliant_trials: usize,
    /// Non-compliant over total trials; 1 when there are no trials at all.
    pub refusal_rate: f64,
    pub trials: Vec<TrialCoverage>,
}

impl ComplianceReport {
    fn from_trials(trials: Vec<TrialCoverage>) -> Self {
        let total = trials.len();
        let ok = trials.iter().filter(|t| t.compliant).count();
        ComplianceReport {
            total_trials: total,
            compliant_trials: ok,
            non_compliant_trials: total - ok,
            refusal_rate: if total == 0 { 1.0 } else { (total - ok) as f64 / total as f64 },
            trials,
        }
    }
}

/// Data gathered for one binding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum TestData {
    Groups { groups: Vec<SampleVector> },
    Pairs { first: SampleVector, second: SampleVector },
    Single { sample: SampleVector },
    Table { rows: Vec<String>, columns: Vec<String>, counts: Vec<Vec<f64>> },
    Successes { k: u64, n: u64 },
}

fn item_value<'a>(item: &'a Value, key: &str) -> Option<&'a Value> {
    item.get("metadata").and_then(|m| m.get(key)).or_else(|| item.get(key))
}

fn label_of(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Q-keys a selector resolves to in one trial, with the item each came from.
fn resolve<'a>(sel: &QuestionSelector, items: &'a [Value]) -> Vec<(String, Option<&'a Value>)> {
    match sel {
        QuestionSelector::Key(k) => vec![(k.clone(), None)],
        QuestionSelector::ItemIndex { item_index } => match items.get(*item_index) {
            Some(item) => {
                let key = item.get("q_idx").and_then(Value::as_str).map_or_else(|| format!("Q{}", item_index + 1), str::to_string);
                vec![(key, Some(item))]
            }
            None => vec![(format!("Q{}", item_index + 1), None)],
        },
        QuestionSelector::ItemField { item_field, item: Some(i) } => items
            .get(*i)
            .and_then(|it| it.get(item_field).and_then(Value::as_str).map(|k| (k.to_string(), Some(it))))
            .into_iter()
            .collect(),
        QuestionSelector::ItemField { item_field, item: None } => items
            .iter()
            .filter_map(|it| it.get(item_field).and_then(Value::as_str).map(|k| (k.to_string(), Some(it))))
            .collect(),
    }
}

/// Required Q-keys of a trial: every `q_idx*` item field (or `Q{i+1}` per
/// item when none is present) plus every key a binding reads.
pub fn required_keys(response: &Response, bindings: &[&TestBinding]) -> BTreeSet<String> {
    let items = response.items();
    let mut keys = BTreeSet::new();
    let mut explicit = false;
    for item in items {
        if let Some(obj) = item.as_object() {
            for (k, v) in obj {
                if k.starts_with("q_idx") {
                    if let Some(s) = v.as_str() {
                        keys.insert(s.to_string());
                        explicit = true;
                    }
                }
            }
        }
    }
    if !explicit {
        keys.extend((0..items.len()).map(|i| format!("Q{}", i + 1)));
    }
    for b in bindings {
        for sel in std::iter::once(&b.question).chain(b.second_question.as_ref()) {
            keys.extend(resolve(sel, items).into_iter().map(|(k, _)| k));
        }
    }
    keys
}

/// Per-trial compliance over the whole transcript. A trial is compliant when
/// every required key is present and every key a binding reads coerces.
pub fn compliance(t: &AgentTranscript, bundle: &StudyBundle) -> ComplianceReport {
    let mut trials = Vec::new();
    for (pi, p) in t.individual_data.iter().enumerate() {
        for (ri, r) in p.responses.iter().enumerate() {
            let sub = r.sub_study_id().unwrap_or_default().to_string();
            let bindings: Vec<&TestBinding> = bundle.bindings_for(&sub).collect();
            let parsed = parse_response(&r.response_text);
            let required = required_keys(r, &bindings);
            let present = required.iter().filter(|k| parsed.contains_key(*k)).count();
            let coerces = bindings.iter().all(|b| {
                std::iter::once(&b.question).chain(b.second_question.as_ref()).all(|sel| {
                    resolve(sel, r.items())
                        .iter()
                        .all(|(k, _)| parsed.get(k).is_some_and(|raw| coerce_value(raw, &b.value_kind).is_ok()))
                })
            });
            trials.push(TrialCoverage {
                participant: pi,
                response: ri,
                sub_study_id: sub,
                required: required.len(),
                parsed: present,
                compliant: present == required.len() && coerces,
            });
        }
    }
    ComplianceReport::from_trials(trials)
}

fn number(c: Coerced) -> Option<f64> {
    match c {
        Coerced::Number(v) => Some(v),
        Coerced::Choice(_) => None,
    }
}

fn group_label(b: &TestBinding, item: Option<&Value>, trial: &Map<String, Value>) -> Option<String> {
    let key = b.group_by.as_deref()?;
    item.and_then(|it| item_value(it, key))
        .or_else(|| trial.get(key))
        .or_else(|| trial.get("metadata").and_then(|m| m.get(key)))
        .and_then(label_of)
}

/// Gather the data one binding describes from compliant trials, plus the
/// compliance of the binding's sub-study.
pub fn collect_test_data(t: &AgentTranscript, b: &TestBinding, bundle: &StudyBundle) -> Result<(TestData, ComplianceReport), CollectError> {
    if !bundle.sub_studies.contains_key(&b.sub_study_id) {
        return Err(CollectError::BindingMismatch(format!("unknown sub_study_id {:?}", b.sub_study_id)));
    }
    let full = compliance(t, bundle);
    let report = ComplianceReport::from_trials(full.trials.iter().filter(|c| c.sub_study_id == b.sub_study_id).cloned().collect());

    // (group label, first value, second value)
    let mut points: Vec<(Option<String>, Coerced, Option<Coerced>)> = Vec::new();
    let mut any_group_key = false;
    for cov in report.trials.iter().filter(|c| c.compliant) {
        let r = &t.individual_data[cov.participant].responses[cov.response];
        let parsed = parse_response(&r.response_text);
        let firsts = resolve(&b.question, r.items());
        let seconds = b.second_question.as_ref().map(|s| resolve(s, r.items()));
        for (i, (key, item)) in firsts.iter().enumerate() {
            let label = group_label(b, *item, &r.trial_info);
            any_group_key |= label.is_some();
            let Some(v) = parsed.get(key).and_then(|raw| coerce_value(raw, &b.value_kind).ok()) else { continue };
            let second = match &seconds {
                Some(s) => match s.get(i).or(s.first()).and_then(|(k, _)| parsed.get(k)) {
                    Some(raw) => coerce_value(raw, &b.value_kind).ok(),
                    None => None,
                },
                None => None,
            };
            if seconds.is_some() && second.is_none() {
                continue;
            }
            points.push((label, v, second));
        }
    }
    if b.group_by.is_some() && !any_group_key && report.compliant_trials > 0 {
        return Err(CollectError::BindingMismatch(format!(
            "group_by key {:?} absent from every trial of {:?}",
            b.group_by.as_deref().unwrap_or_default(),
            b.sub_study_id
        )));
    }

    let labels: Vec<String> = match &b.groups {
        Some(g) => g.clone(),
        None => points.iter().filter_map(|p| p.0.clone()).collect::<BTreeSet<_>>().into_iter().collect(),
    };
    let data = match b.family {
        TestKind::TIndependent | TestKind::Anova => {
            let groups = labels
                .iter()
                .map(|l| {
                    let values = points
                        .iter()
                        .filter(|p| p.0.as_deref() == Some(l))
                        .filter_map(|p| number(p.1.clone()))
                        .collect();
                    SampleVector::new(l.clone(), values)
                })
                .collect();
            TestData::Groups { groups }
        }
        TestKind::TPaired | TestKind::Pearson => {
            let (mut a, mut c) = (Vec::new(), Vec::new());
            for (_, v, s) in points {
                if let (Some(x), Some(y)) = (number(v), s.and_then(number)) {
                    a.push(x);
                    c.push(y);
                }
            }
            TestData::Pairs { first: SampleVector::new("first", a), second: SampleVector::new("second", c) }
        }
        TestKind::TOneSample => {
            TestData::Single { sample: SampleVector::new("sample", points.into_iter().filter_map(|p| number(p.1)).collect()) }
        }
        TestKind::ChiSquare => {
            let ValueKind::Choice(options) = &b.value_kind else {
                return Err(CollectError::BindingMismatch("chi_square needs choice answers".into()));
            };
            let mut columns = options.clone();
            if let Some(s) = &b.success {
                if let Some(pos) = columns.iter().position(|o| o.eq_ignore_ascii_case(s)) {
                    let first = columns.remove(pos);
                    columns.insert(0, first);
                }
            }
            let mut counts = vec![vec![0.0; columns.len()]; labels.len()];
            for (label, v, _) in &points {
                let (Some(label), Coerced::Choice(c)) = (label, v) else { continue };
                if let (Some(i), Some(j)) = (labels.iter().position(|l| l == label), columns.iter().position(|o| o == c)) {
                    counts[i][j] += 1.0;
                }
            }
            TestData::Table { rows: labels, columns, counts }
        }
        TestKind::Binomial => {
            let mut k = 0;
            let mut n = 0;
            for (_, v, _) in &points {
                n += 1;
                let hit = match v {
                    Coerced::Choice(c) => b.success.as_deref().is_some_and(|s| c.eq_ignore_ascii_case(s)),
                    Coerced::Number(x) => *x == 1.0,
                };
                k += hit as u64;
            }
            TestData::Successes { k, n }
        }
    };
    Ok((data, report))
}

// ---------------------------------------------------------------------------
// Synthesis

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerDist {
    Normal { mean: f64, sd: f64 },
    Choice { options: Vec<String>, probs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionSpec {
    pub key: String,
    pub dist: AnswerDist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSpec {
    pub label: String,
    pub n: usize,
    pub questions: Vec<QuestionSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubStudySpec {
    pub sub_study_id: String,
    #[serde(default = "default_group_key")]
    pub group_key: String,
    pub conditions: Vec<ConditionSpec>,
}

fn default_group_key() -> String {
    "condition".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub method: Option<String>,
    #[serde(default)]
    pub refusal_prob: f64,
    pub sub_studies: Vec<SubStudySpec>,
}

pub const REFUSAL_TEXT: &str = "I'd rather not answer.";

fn round4(x: f64) -> f64 {
    let r = (x * 1e4).round() / 1e4;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Deterministic synthetic transcript. Each participant sits in one condition
/// of each sub-study and answers every question of that condition in a single
/// trial; refused trials carry no `Qk=` text.
pub fn synthesize_transcript(spec: &SynthSpec, seed: u64) -> Result<AgentTranscript, String> {
    if !(0.0..=1.0).contains(&spec.refusal_prob) {
        return Err(format!("refusal_prob {} outside [0, 1]", spec.refusal_prob));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut participants = Vec::new();
    for sub in &spec.sub_studies {
        for cond in &sub.conditions {
            for _ in 0..cond.n {
                let mut parts = Vec::new();
                let mut items = Vec::new();
                for q in &cond.questions {
                    let value = match &q.dist {
                        AnswerDist::Normal { mean, sd } => {
                            let normal = Normal::new(*mean, *sd).map_err(|e| format!("question {}: {e}", q.key))?;
                            format!("{}", round4(normal.sample(&mut rng)))
                        }
                        AnswerDist::Choice { options, probs } => {
                            if options.is_empty() || options.len() != probs.len() {
                                return Err(format!("question {}: options and probs must match", q.key));
                            }
                            let u: f64 = rng.random();
                            let total: f64 = probs.iter().sum();
                            let mut acc = 0.0;
                            let mut pick = options.len() - 1;
                            for (i, p) in probs.iter().enumerate() {
                                acc += p / total;
                                if u < acc {
                                    pick = i;
                                    break;
                                }
                            }
                            options[pick].clone()
                        }
                    };
                    parts.push(format!("{}={}", q.key, value));
                    items.push(serde_json::json!({ "q_idx": q.key }));
                }
                let refused = spec.refusal_prob > 0.0 && rng.random::<f64>() < spec.refusal_prob;
                let text = if refused { REFUSAL_TEXT.to_string() } else { parts.join(", ") };
                let mut trial_info = Map::new();
                trial_info.insert("sub_study_id".into(), Value::String(sub.sub_study_id.clone()));
                trial_info.insert(sub.group_key.clone(), Value::String(cond.label.clone()));
                trial_info.insert("items".into(), Value::Array(items));
                let id = participants.len();
                participants.push(Participant {
                    participant_id: Value::from(id as u64),
                    responses: vec![Response { response_text: text, trial_info, extra: Map::new() }],
                    extra: Map::new(),
                });
            }
        }
    }
    Ok(AgentTranscript {
        schema_version: default_schema_version(),
        metadata: RunMetadata {
            model: spec.model.clone().unwrap_or_else(|| "synthetic".into()),
            method: spec.method.clone().unwrap_or_else(|| "A1".into()),
            temperature: None,
            seed: Some(seed),
            extra: Map::new(),
        },
        individual_data: participants,
        extra: Map::new(),
    })
}
