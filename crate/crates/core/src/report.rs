use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Inside,
    Outside,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Inside => "inside",
            Verdict::Outside => "outside",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A named numeric check and the tolerance it was judged against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

/// Outcome of a membership test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub set: String,
    pub verdict: Verdict,
    pub residuals: Vec<Residual>,
    /// Bell value or optimum reached by the test, when one exists.
    pub value: Option<f64>,
    /// Signed distance to the decision threshold.
    pub margin: Option<f64>,
    /// Separating functional, flattened in `ConditionalDistribution` order.
    pub functional: Option<Vec<f64>>,
    /// Convex weights over the local vertices.
    pub weights: Option<Vec<f64>>,
    pub notes: Vec<String>,
}

impl CertificateReport {
    pub fn new(set: impl Into<String>, verdict: Verdict) -> Self {
        Self {
            set: set.into(),
            verdict,
            residuals: Vec::new(),
            value: None,
            margin: None,
            functional: None,
            weights: None,
            notes: Vec::new(),
        }
    }

    pub fn with_residual(mut self, name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        self.residuals.push(Residual { name: name.into(), value, tolerance });
        self
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = Some(value);
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = Some(margin);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn is_inside(&self) -> bool {
        self.verdict == Verdict::Inside
    }

    pub fn is_outside(&self) -> bool {
        self.verdict == Verdict::Outside
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|r| r.name == name).map(|r| r.value)
    }

    /// Inside iff every residual is within its tolerance.
    pub fn from_residuals(set: impl Into<String>, residuals: Vec<Residual>) -> Self {
        let ok = residuals.iter().all(|r| r.value <= r.tolerance);
        let mut report = Self::new(set, if ok { Verdict::Inside } else { Verdict::Outside });
        report.residuals = residuals;
        report
    }
}
