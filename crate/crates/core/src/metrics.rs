//! Perceptual discriminability of a visual notation.
//!
//! A notation is described declaratively as symbols × visual variables
//! ([`NotationSpec`]). From it we compute the pairwise visual distance `vd`
//! and redundancy `vr`, their notation-wide averages VD and RC, perceptual
//! pop-out PPO, textual differentiation TD and the mean of the four. All four
//! lie in `[0, 1]`; a notation passes at a mean of 0.5 or more.
//!
//! Also home to the study precision score: the fastest participant's time
//! over a participant's time, scaled by their success rate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};
use std::io::Read;

use serde::{Deserialize, Serialize};

pub const DISCRIMINABILITY_THRESHOLD: f64 = 0.5;

/// Number of visual variables in Bertin's set; the `vr` denominator.
pub const BERTIN_VARIABLE_COUNT: usize = 8;

const SHEX_NOTATION_JSON: &str = include_str!("../fixtures/shex-notation.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisualVariable {
    Shape,
    Texture,
    Brightness,
    Size,
    Color,
    Orientation,
    Horizontal,
    Vertical,
}

impl VisualVariable {
    pub const ALL: [VisualVariable; BERTIN_VARIABLE_COUNT] = [
        VisualVariable::Shape,
        VisualVariable::Texture,
        VisualVariable::Brightness,
        VisualVariable::Size,
        VisualVariable::Color,
        VisualVariable::Orientation,
        VisualVariable::Horizontal,
        VisualVariable::Vertical,
    ];
}

impl fmt::Display for VisualVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok();
        f.write_str(s.as_ref().and_then(|v| v.as_str()).unwrap_or("?"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeGroup {
    pub main_group: String,
    pub basic_group: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VvdOverride {
    pub a: String,
    pub b: String,
    pub variable: VisualVariable,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NotationSpec {
    pub symbols: Vec<String>,
    pub variables: Vec<VisualVariable>,
    #[serde(default)]
    pub assignments: BTreeMap<String, BTreeMap<VisualVariable, String>>,
    #[serde(default)]
    pub shape_groups: BTreeMap<String, ShapeGroup>,
    pub weights: BTreeMap<VisualVariable, f64>,
    #[serde(default)]
    pub pairwise_vvd_overrides: Vec<VvdOverride>,
    #[serde(default)]
    pub textual_overload: BTreeMap<String, bool>,
}

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("notation has no symbols")]
    NoSymbols,
    #[error("need at least {needed} symbols, notation has {found}")]
    TooFewSymbols { needed: usize, found: usize },
    #[error("duplicate symbol {0}")]
    DuplicateSymbol(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("variable {0} is not part of the notation")]
    UnknownVariable(VisualVariable),
    #[error("duplicate variable {0}")]
    DuplicateVariable(VisualVariable),
    #[error("no weight given for variable {0}")]
    MissingWeight(VisualVariable),
    #[error("weight for {0} must be positive")]
    NonPositiveWeight(VisualVariable),
    #[error("shape value {0} has no main/basic group")]
    MissingShapeGroup(String),
    #[error("override for ({a}, {b}, {variable}) must lie in [0, 1]")]
    OverrideRange { a: String, b: String, variable: VisualVariable },
    #[error("overrides for ({a}, {b}, {variable}) disagree")]
    OverrideConflict { a: String, b: String, variable: VisualVariable },
    #[error("study has no records")]
    EmptyStudy,
    #[error("participant {0}: elapsed time must be positive")]
    NonPositiveTime(String),
    #[error("participant {0}: success rate must lie in [0, 1]")]
    SuccessRateRange(String),
    #[error("duplicate participant {0}")]
    DuplicateParticipant(String),
    #[error("expected CSV header '{expected}', found '{found}'")]
    CsvHeader { expected: String, found: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

type Result<T, E = MetricsError> = std::result::Result<T, E>;

fn ordered<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl NotationSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: NotationSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// The four-symbol notation used for ShEx diagrams: box, directed arrow,
    /// diamond arrow and dashed line.
    pub fn shex_notation() -> Self {
        Self::from_json(SHEX_NOTATION_JSON).expect("bundled notation is valid")
    }

    pub fn shex_notation_json() -> &'static str {
        SHEX_NOTATION_JSON
    }

    pub fn validate(&self) -> Result<()> {
        if self.symbols.is_empty() {
            return Err(MetricsError::NoSymbols);
        }
        let mut seen = BTreeSet::new();
        for s in &self.symbols {
            if !seen.insert(s.as_str()) {
                return Err(MetricsError::DuplicateSymbol(s.clone()));
            }
        }
        let mut vars = BTreeSet::new();
        for &v in &self.variables {
            if !vars.insert(v) {
                return Err(MetricsError::DuplicateVariable(v));
            }
            match self.weights.get(&v) {
                None => return Err(MetricsError::MissingWeight(v)),
                Some(w) if !(*w > 0.0) => return Err(MetricsError::NonPositiveWeight(v)),
                _ => {}
            }
        }
        for (symbol, values) in &self.assignments {
            self.check_symbol(symbol)?;
            for (var, token) in values {
                if !vars.contains(var) {
                    return Err(MetricsError::UnknownVariable(*var));
                }
                if *var == VisualVariable::Shape && !self.shape_groups.contains_key(token) {
                    return Err(MetricsError::MissingShapeGroup(token.clone()));
                }
            }
        }
        let mut overrides: BTreeMap<(&str, &str, VisualVariable), f64> = BTreeMap::new();
        for o in &self.pairwise_vvd_overrides {
            self.check_symbol(&o.a)?;
            self.check_symbol(&o.b)?;
            if !vars.contains(&o.variable) {
                return Err(MetricsError::UnknownVariable(o.variable));
            }
            if !(0.0..=1.0).contains(&o.value) {
                return Err(MetricsError::OverrideRange {
                    a: o.a.clone(),
                    b: o.b.clone(),
                    variable: o.variable,
                });
            }
            let (a, b) = ordered(&o.a, &o.b);
            if let Some(prev) = overrides.insert((a, b, o.variable), o.value) {
                if prev != o.value {
                    return Err(MetricsError::OverrideConflict {
                        a: o.a.clone(),
                        b: o.b.clone(),
                        variable: o.variable,
                    });
                }
            }
        }
        for symbol in self.textual_overload.keys() {
            self.check_symbol(symbol)?;
        }
        Ok(())
    }

    fn check_symbol(&self, s: &str) -> Result<()> {
        if self.symbols.iter().any(|x| x == s) {
            Ok(())
        } else {
            Err(MetricsError::UnknownSymbol(s.to_string()))
        }
    }

    fn check_variable(&self, v: VisualVariable) -> Result<()> {
        if self.variables.contains(&v) {
            Ok(())
        } else {
            Err(MetricsError::UnknownVariable(v))
        }
    }

    pub fn value(&self, symbol: &str, variable: VisualVariable) -> Option<&str> {
        self.assignments
            .get(symbol)
            .and_then(|m| m.get(&variable))
            .map(String::as_str)
    }

    fn override_for(&self, g: &str, h: &str, variable: VisualVariable) -> Option<f64> {
        let key = ordered(g, h);
        self.pairwise_vvd_overrides
            .iter()
            .find(|o| o.variable == variable && ordered(&o.a, &o.b) == key)
            .map(|o| o.value)
    }

    fn is_overloaded(&self, symbol: &str) -> bool {
        self.textual_overload.get(symbol).copied().unwrap_or(false)
    }

    fn weight_norm(&self) -> f64 {
        self.variables.iter().map(|v| self.weights[v]).sum()
    }

    fn require_pairs(&self) -> Result<()> {
        if self.symbols.len() < 2 {
            return Err(MetricsError::TooFewSymbols {
                needed: 2,
                found: self.symbols.len(),
            });
        }
        Ok(())
    }
}

/// Difference between two symbols on one visual variable.
///
/// Overrides win. Otherwise equal or unassigned values give 0. For `shape`,
/// values in different main groups give 1, values sharing a basic group give
/// 0.5 and anything else 1; other variables give 1 for any difference.
pub fn vvd(spec: &NotationSpec, variable: VisualVariable, g: &str, h: &str) -> Result<f64> {
    spec.check_symbol(g)?;
    spec.check_symbol(h)?;
    spec.check_variable(variable)?;
    if let Some(v) = spec.override_for(g, h, variable) {
        return Ok(v);
    }
    if g == h {
        return Ok(0.0);
    }
    let (Some(a), Some(b)) = (spec.value(g, variable), spec.value(h, variable)) else {
        return Ok(0.0);
    };
    if a == b {
        return Ok(0.0);
    }
    if variable != VisualVariable::Shape {
        return Ok(1.0);
    }
    let group = |t: &str| {
        spec.shape_groups
            .get(t)
            .ok_or_else(|| MetricsError::MissingShapeGroup(t.to_string()))
    };
    let (ga, gb) = (group(a)?, group(b)?);
    Ok(if ga.main_group != gb.main_group {
        1.0
    } else if ga.basic_group == gb.basic_group {
        0.5
    } else {
        1.0
    })
}

/// Weighted visual distance: `Σ wᵢ·vvdᵢ / Σ wᵢ` over the notation's variables.
pub fn visual_distance(spec: &NotationSpec, g: &str, h: &str) -> Result<f64> {
    let mut sum = 0.0;
    for &v in &spec.variables {
        sum += spec.weights[&v] * vvd(spec, v, g, h)?;
    }
    Ok(sum / spec.weight_norm())
}

/// Share of Bertin's variables on which `g` and `h` carry different values.
pub fn redundancy(spec: &NotationSpec, g: &str, h: &str) -> Result<f64> {
    spec.check_symbol(g)?;
    spec.check_symbol(h)?;
    let differing = spec
        .variables
        .iter()
        .filter(|&&v| match (spec.value(g, v), spec.value(h, v)) {
            (Some(a), Some(b)) => a != b,
            _ => false,
        })
        .count();
    Ok(differing as f64 / BERTIN_VARIABLE_COUNT as f64)
}

fn symmetric_matrix(
    spec: &NotationSpec,
    f: impl Fn(&NotationSpec, &str, &str) -> Result<f64>,
) -> Result<Vec<Vec<f64>>> {
    let n = spec.symbols.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = f(spec, &spec.symbols[i], &spec.symbols[j])?;
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    Ok(m)
}

pub fn vd_matrix(spec: &NotationSpec) -> Result<Vec<Vec<f64>>> {
    symmetric_matrix(spec, visual_distance)
}

pub fn vr_matrix(spec: &NotationSpec) -> Result<Vec<Vec<f64>>> {
    symmetric_matrix(spec, redundancy)
}

/// Mean over ordered pairs of distinct symbols, taken from the upper triangle
/// of a symmetric matrix.
fn off_diagonal_mean(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let upper: f64 = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| m[i][j]).sum();
    2.0 * upper / (n * n - n) as f64
}

pub fn metric_vd(spec: &NotationSpec) -> Result<f64> {
    spec.require_pairs()?;
    Ok(off_diagonal_mean(&vd_matrix(spec)?))
}

pub fn metric_rc(spec: &NotationSpec) -> Result<f64> {
    spec.require_pairs()?;
    Ok(off_diagonal_mean(&vr_matrix(spec)?))
}

/// Fraction of symbols holding a value no other symbol shares on at least
/// one variable. A lone symbol pops out trivially.
pub fn metric_ppo(spec: &NotationSpec) -> Result<f64> {
    let n = spec.symbols.len();
    if n == 0 {
        return Err(MetricsError::NoSymbols);
    }
    if n == 1 {
        return Ok(1.0);
    }
    let popping = spec
        .symbols
        .iter()
        .filter(|s| {
            spec.variables.iter().any(|&v| match spec.value(s, v) {
                Some(token) => spec
                    .symbols
                    .iter()
                    .filter(|o| o != s)
                    .all(|o| spec.value(o, v) != Some(token)),
                None => false,
            })
        })
        .count();
    Ok(popping as f64 / n as f64)
}

/// One minus the share of symbols that carry several concepts told apart
/// only by text.
pub fn metric_td(spec: &NotationSpec) -> Result<f64> {
    let n = spec.symbols.len();
    if n == 0 {
        return Err(MetricsError::NoSymbols);
    }
    let overloaded = spec.symbols.iter().filter(|s| spec.is_overloaded(s)).count();
    Ok(1.0 - overloaded as f64 / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub symbols: Vec<String>,
    pub vd_matrix: Vec<Vec<f64>>,
    pub vr_matrix: Vec<Vec<f64>>,
    #[serde(rename = "VD")]
    pub visual_distance: f64,
    #[serde(rename = "RC")]
    pub redundant_coding: f64,
    #[serde(rename = "PPO")]
    pub perceptual_popout: f64,
    #[serde(rename = "TD")]
    pub textual_differentiation: f64,
    pub aggregate: f64,
    pub passes_threshold: bool,
}

pub fn aggregate_discriminability(spec: &NotationSpec) -> Result<MetricReport> {
    spec.validate()?;
    spec.require_pairs()?;
    let vd_m = vd_matrix(spec)?;
    let vr_m = vr_matrix(spec)?;
    let vd = off_diagonal_mean(&vd_m);
    let rc = off_diagonal_mean(&vr_m);
    let ppo = metric_ppo(spec)?;
    let td = metric_td(spec)?;
    let aggregate = (vd + rc + ppo + td) / 4.0;
    Ok(MetricReport {
        symbols: spec.symbols.clone(),
        vd_matrix: vd_m,
        vr_matrix: vr_m,
        visual_distance: vd,
        redundant_coding: rc,
        perceptual_popout: ppo,
        textual_differentiation: td,
        aggregate,
        passes_threshold: aggregate >= DISCRIMINABILITY_THRESHOLD,
    })
}

impl MetricReport {
    /// Plain-text rendering with values rounded to two decimals.
    pub fn to_text(&self) -> String {
        let width = self.symbols.iter().map(|s| s.len()).max().unwrap_or(0).max(8);
        let mut out = String::new();
        for (title, m) in [("Visual distance (vd)", &self.vd_matrix), ("Redundant coding (vr)", &self.vr_matrix)] {
            let _ = writeln!(out, "{title}");
            let _ = write!(out, "{:width$}", "");
            for s in &self.symbols {
                let _ = write!(out, "  {s:>width$}");
            }
            out.push('\n');
            for (s, row) in self.symbols.iter().zip(m) {
                let _ = write!(out, "{s:width$}");
                for v in row {
                    let _ = write!(out, "  {v:>width$.2}");
                }
                out.push('\n');
            }
            out.push('\n');
        }
        let verdict = if self.passes_threshold { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "VD         {:.2}", self.visual_distance);
        let _ = writeln!(out, "RC         {:.2}", self.redundant_coding);
        let _ = writeln!(out, "PPO        {:.2}", self.perceptual_popout);
        let _ = writeln!(out, "TD         {:.2}", self.textual_differentiation);
        let _ = writeln!(out, "aggregate  {:.2}  {verdict}", self.aggregate);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub participant: String,
    pub elapsed_seconds: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionEntry {
    pub participant: String,
    pub precision: f64,
}

pub const STUDY_CSV_HEADER: [&str; 3] = ["participant", "elapsed_seconds", "success_rate"];

/// Reads records from CSV with header `participant,elapsed_seconds,success_rate`.
pub fn read_study_csv(reader: impl Read) -> Result<Vec<StudyRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != STUDY_CSV_HEADER {
        return Err(MetricsError::CsvHeader {
            expected: STUDY_CSV_HEADER.join(","),
            found: header.join(","),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

/// `P = min(T) / T_p · S_p` for each participant, in input order.
pub fn precision(records: &[StudyRecord]) -> Result<Vec<PrecisionEntry>> {
    if records.is_empty() {
        return Err(MetricsError::EmptyStudy);
    }
    let mut seen = BTreeSet::new();
    for r in records {
        if !(r.elapsed_seconds > 0.0) || !r.elapsed_seconds.is_finite() {
            return Err(MetricsError::NonPositiveTime(r.participant.clone()));
        }
        if !(0.0..=1.0).contains(&r.success_rate) {
            return Err(MetricsError::SuccessRateRange(r.participant.clone()));
        }
        if !seen.insert(r.participant.as_str()) {
            return Err(MetricsError::DuplicateParticipant(r.participant.clone()));
        }
    }
    let fastest = records
        .iter()
        .map(|r| r.elapsed_seconds)
        .fold(f64::INFINITY, f64::min);
    Ok(records
        .iter()
        .map(|r| PrecisionEntry {
            participant: r.participant.clone(),
            precision: fastest / r.elapsed_seconds * r.success_rate,
        })
        .collect())
}
