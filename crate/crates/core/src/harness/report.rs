//! Verification report in JSON, CSV or Markdown.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::claims::{ClaimResult, Status, VerifyConfig};
use crate::error::FockError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Md,
}

impl FromStr for Format {
    type Err = FockError;

    fn from_str(s: &str) -> Result<Self, FockError> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Md),
            other => Err(FockError::Parse(format!(
                "unknown report format '{other}' (json, csv, md)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub draws_per_family: usize,
    pub tail_tol: f64,
    pub max_cutoff: usize,
    pub filter: Option<String>,
    pub summary: Summary,
    pub claims: Vec<ClaimResult>,
}

impl Report {
    pub fn new(config: &VerifyConfig, claims: Vec<ClaimResult>) -> Self {
        let count = |s: Status| claims.iter().filter(|c| c.status == s).count();
        let summary = Summary {
            total: claims.len(),
            passed: count(Status::Passed),
            failed: count(Status::Failed),
            errors: count(Status::Error),
            skipped: count(Status::Skipped),
        };
        Self {
            seed: config.seed,
            draws_per_family: config.draws,
            tail_tol: config.policy.tail_tol,
            max_cutoff: config.policy.max_cutoff,
            filter: config.filter.clone(),
            summary,
            claims,
        }
    }

    /// Claims that failed or errored. Skips are listed in the report but do
    /// not count as failures.
    pub fn failed_ids(&self) -> Vec<&str> {
        self.claims
            .iter()
            .filter(|c| matches!(c.status, Status::Failed | Status::Error))
            .map(|c| c.claim_id.as_str())
            .collect()
    }

    pub fn all_passed(&self) -> bool {
        self.failed_ids().is_empty()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Md => self.to_markdown(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::from(
            "claim_id,status,measured,expected,tolerance,runtime_ms,paper_anchor,detail\n",
        );
        for c in &self.claims {
            let _ = writeln!(
                out,
                "{},{},{},{},{:e},{},{},{}",
                c.claim_id,
                c.status.as_str(),
                csv_field(&join(&c.measured, ";")),
                csv_field(&join(&c.expected, ";")),
                c.tolerance,
                c.runtime_ms,
                csv_field(&c.paper_anchor),
                csv_field(c.detail.as_deref().unwrap_or("")),
            );
        }
        out
    }

    fn to_markdown(&self) -> String {
        let s = &self.summary;
        let mut out = String::from("# Verification report\n\n");
        let _ = writeln!(
            out,
            "seed {}, {} draws per family, tail_tol {:e}, max cutoff {}\n",
            self.seed, self.draws_per_family, self.tail_tol, self.max_cutoff
        );
        let _ = writeln!(
            out,
            "{} claims: {} passed, {} failed, {} errors, {} skipped\n",
            s.total, s.passed, s.failed, s.errors, s.skipped
        );
        out.push_str("| claim | status | measured | expected | tolerance | ms | note |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        for c in &self.claims {
            let _ = writeln!(
                out,
                "| `{}` | {} | {} | {} | {:e} | {} | {} |",
                c.claim_id,
                c.status.as_str(),
                join(&c.measured, ", "),
                join(&c.expected, ", "),
                c.tolerance,
                c.runtime_ms,
                c.detail.as_deref().unwrap_or("").replace('|', "\\|"),
            );
        }
        out
    }
}

fn join(values: &[f64], sep: &str) -> String {
    values
        .iter()
        .map(|v| format!("{v:e}"))
        .collect::<Vec<_>>()
        .join(sep)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::claims::run_claims;

    #[test]
    fn formats_parse() {
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
        assert_eq!("md".parse::<Format>().unwrap(), Format::Md);
        assert!("xml".parse::<Format>().is_err());
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
    }

    #[test]
    fn renders_every_format() {
        let config = VerifyConfig {
            filter: Some("coshfam.".into()),
            ..VerifyConfig::default()
        };
        let report = Report::new(&config, run_claims(&config));
        assert_eq!(report.summary.total, 3);
        assert!(report.all_passed(), "{:?}", report.failed_ids());
        let csv = report.render(Format::Csv);
        assert_eq!(csv.lines().count(), 4);
        assert!(report
            .render(Format::Md)
            .contains("`coshfam.negativity.p0`"));
        let json: serde_json::Value = serde_json::from_str(&report.render(Format::Json)).unwrap();
        assert_eq!(json["claims"].as_array().unwrap().len(), 3);
    }
}
