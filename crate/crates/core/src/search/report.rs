use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::arith::{compare, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TheoremId {
    TM1,
    TM2,
    TM3,
    TM4,
    AF,
    KATONA,
    LE1,
    LE3,
    LE8,
    IU,
    /// Shift monotonicity property suite.
    LE4,
    /// Stabilization property suite (cross-t preserved, size sums, sandwich).
    LE5,
    /// Correlation inequality property suite.
    AD1,
    /// Up-set enumeration counts.
    UPSETS,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sampled => "sampled",
        })
    }
}

/// Whether a parameter set lies inside the proven range of its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Proven,
    Conjectural,
}

/// An exact extremum or bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Quantity {
    Integer(u128),
    Rational(Rational),
}

impl Quantity {
    pub fn to_rational(&self) -> Rational {
        match self {
            Quantity::Integer(v) => Rational::from_integer(*v),
            Quantity::Rational(r) => r.clone(),
        }
    }
}

impl Ord for Quantity {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Quantity::Integer(a), Quantity::Integer(b)) => a.cmp(b),
            _ => compare(&self.to_rational(), &other.to_rational()),
        }
    }
}

impl PartialOrd for Quantity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Integer(v) => write!(f, "{v}"),
            Quantity::Rational(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl From<u128> for Quantity {
    fn from(v: u128) -> Self {
        Quantity::Integer(v)
    }
}

impl From<Rational> for Quantity {
    fn from(r: Rational) -> Self {
        Quantity::Rational(r)
    }
}

/// Outcome of one verifier run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub theorem_id: TheoremId,
    pub params: BTreeMap<String, String>,
    pub mode: Mode,
    pub regime: Regime,
    pub computed_extremum: Quantity,
    pub bound: Quantity,
    pub pass: bool,
    /// Least witness of the extremum, as a JSON pair (or single family).
    pub witness: Value,
    /// The least tied witnesses, at most [`super::MAX_RETAINED_TIES`].
    pub witnesses: Vec<Value>,
    pub tie_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub search_space: String,
}

impl VerificationReport {
    pub fn new(
        theorem_id: TheoremId,
        params: &[(&str, String)],
        computed_extremum: Quantity,
        bound: Quantity,
    ) -> Self {
        let pass = computed_extremum <= bound;
        VerificationReport {
            theorem_id,
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            mode: Mode::Exhaustive,
            regime: Regime::Proven,
            computed_extremum,
            bound,
            pass,
            witness: Value::Null,
            witnesses: Vec::new(),
            tie_count: 0,
            trials: None,
            seed: None,
            search_space: String::new(),
        }
    }

    pub fn sampled(mut self, trials: u64, seed: u64) -> Self {
        self.mode = Mode::Sampled;
        self.trials = Some(trials);
        self.seed = Some(seed);
        self
    }

    pub fn with_witnesses(mut self, witnesses: Vec<Value>, tie_count: u64) -> Self {
        self.witness = witnesses.first().cloned().unwrap_or(Value::Null);
        self.witnesses = witnesses;
        self.tie_count = tie_count;
        self
    }

    pub fn in_regime(mut self, regime: Regime) -> Self {
        self.regime = regime;
        self
    }

    pub fn searching(mut self, space: impl Into<String>) -> Self {
        self.search_space = space.into();
        self
    }

    /// A failure that should stop CI: a proven-regime bound exceeded.
    pub fn is_violation(&self) -> bool {
        !self.pass && self.regime == Regime::Proven
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `k=v` pairs joined by `;`, in key order.
    pub fn params_text(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Column values matching [`VerificationReport::CSV_HEADER`].
    pub fn csv_record(&self) -> [String; 8] {
        [
            self.theorem_id.to_string(),
            self.params_text(),
            self.mode.to_string(),
            self.computed_extremum.to_string(),
            self.bound.to_string(),
            self.pass.to_string(),
            if self.witness.is_null() {
                String::new()
            } else {
                self.witness.to_string()
            },
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }

    pub const CSV_HEADER: [&'static str; 8] =
        ["theorem_id", "params", "mode", "extremum", "bound", "pass", "witness", "seed"];
}
