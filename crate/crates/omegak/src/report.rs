//! Check records and the run report: one record per verification check,
//! tallied into a summary, rendered as a text table or as JSON with a
//! fixed field order.

use serde::{Deserialize, Serialize};

use crate::Result;

/// Outcome of one check. `Inferred` is a pass that relied on data solved
/// for rather than transcribed, and is tallied separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inferred,
}

impl std::fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckStatus::Pass => write!(f, "pass"),
            CheckStatus::Fail => write!(f, "fail"),
            CheckStatus::Inferred => write!(f, "inferred"),
        }
    }
}

/// One verification check, identified by the entry or table it covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// What kind of check this is: "spectral", "ses", "connecting",
    /// "homotopy", "em".
    pub kind: String,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_degree: Option<u64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub message: String,
}

impl CheckRecord {
    pub fn pass(id: impl Into<String>, kind: impl Into<String>) -> Self {
        CheckRecord {
            id: id.into(),
            kind: kind.into(),
            status: CheckStatus::Pass,
            failing_degree: None,
            message: String::new(),
        }
    }

    pub fn inferred(
        id: impl Into<String>,
        kind: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        CheckRecord {
            id: id.into(),
            kind: kind.into(),
            status: CheckStatus::Inferred,
            failing_degree: None,
            message: message.into(),
        }
    }

    pub fn fail(
        id: impl Into<String>,
        kind: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        CheckRecord {
            id: id.into(),
            kind: kind.into(),
            status: CheckStatus::Fail,
            failing_degree: None,
            message: message.into(),
        }
    }

    pub fn with_degree(mut self, degree: u64) -> Self {
        self.failing_degree = Some(degree);
        self
    }

    pub fn with_message(mut self, message: impl Into<String>) -> Self {
        self.message = message.into();
        self
    }
}

/// Tallies of the check records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub pass: u64,
    pub fail: u64,
    pub inferred: u64,
    pub total: u64,
}

/// A full verification run: engine and catalog versions, the degree bound,
/// every check, and the tally.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub engine_version: String,
    pub catalog_version: String,
    pub max_degree: u64,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(catalog_version: impl Into<String>, max_degree: u64, checks: Vec<CheckRecord>) -> Self {
        let mut summary = Summary {
            total: checks.len() as u64,
            ..Summary::default()
        };
        for c in &checks {
            match c.status {
                CheckStatus::Pass => summary.pass += 1,
                CheckStatus::Fail => summary.fail += 1,
                CheckStatus::Inferred => summary.inferred += 1,
            }
        }
        Report {
            engine_version: crate::ENGINE_VERSION.to_string(),
            catalog_version: catalog_version.into(),
            max_degree,
            checks,
            summary,
        }
    }

    /// True when nothing failed. Inferred checks count as passing.
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    /// One line per check plus a summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let id_width = self
            .checks
            .iter()
            .map(|c| c.id.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let kind_width = self
            .checks
            .iter()
            .map(|c| c.kind.len())
            .max()
            .unwrap_or(4)
            .max(4);
        for c in &self.checks {
            out.push_str(&format!(
                "{:>8}  {:kw$}  {:iw$}",
                c.status.to_string(),
                c.kind,
                c.id,
                kw = kind_width,
                iw = id_width,
            ));
            let mut tail = Vec::new();
            if let Some(d) = c.failing_degree {
                tail.push(format!("degree {d}"));
            }
            if !c.message.is_empty() {
                tail.push(c.message.clone());
            }
            if tail.is_empty() {
                out.push('\n');
            } else {
                out.push_str(&format!("  {}\n", tail.join("; ")));
            }
        }
        out.push_str(&format!(
            "{} checks: {} pass, {} fail, {} inferred (max degree {}, engine {}, catalog {})\n",
            self.summary.total,
            self.summary.pass,
            self.summary.fail,
            self.summary.inferred,
            self.max_degree,
            self.engine_version,
            self.catalog_version,
        ));
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report::new(
            "test-1",
            40,
            vec![
                CheckRecord::pass("OO01", "spectral"),
                CheckRecord::fail("RR23", "spectral", "series mismatch").with_degree(7),
                CheckRecord::inferred("tbl2", "homotopy", "one arrow solved for"),
            ],
        )
    }

    #[test]
    fn summary_tallies_records() {
        let r = sample();
        assert_eq!(r.summary.total, 3);
        assert_eq!(r.summary.pass, 1);
        assert_eq!(r.summary.fail, 1);
        assert_eq!(r.summary.inferred, 1);
        assert!(!r.passed());
    }

    #[test]
    fn inferred_checks_do_not_fail_the_run() {
        let r = Report::new("test-1", 40, vec![CheckRecord::inferred("t", "homotopy", "m")]);
        assert!(r.passed());
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        let json = r.to_json().unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json().unwrap(), json);
    }

    #[test]
    fn text_mentions_failing_degree() {
        let text = sample().to_text();
        assert!(text.contains("degree 7"));
        assert!(text.contains("3 checks: 1 pass, 1 fail, 1 inferred"));
    }

    #[test]
    fn field_order_is_stable() {
        let json = sample().to_json().unwrap();
        let engine = json.find("engine_version").unwrap();
        let catalog = json.find("catalog_version").unwrap();
        let checks = json.find("checks").unwrap();
        let summary = json.find("summary").unwrap();
        assert!(engine < catalog && catalog < checks && checks < summary);
    }
}
