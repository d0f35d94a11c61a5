use serde::Serialize;

use crate::config::{RunConfig, Suite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    pub suite: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub status: Status,
    /// Largest deviation seen; absent for exact checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_dev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn exact(suite: Suite, id: impl Into<String>, n: Option<usize>, ok: bool) -> Self {
        Check {
            id: id.into(),
            suite: suite.name(),
            n,
            status: if ok { Status::Pass } else { Status::Fail },
            max_dev: None,
            tol: None,
            detail: None,
        }
    }

    pub fn within(suite: Suite, id: impl Into<String>, n: Option<usize>, dev: f64, tol: f64) -> Self {
        Check {
            id: id.into(),
            suite: suite.name(),
            n,
            status: if dev <= tol { Status::Pass } else { Status::Fail },
            max_dev: Some(dev),
            tol: Some(tol),
            detail: None,
        }
    }

    pub fn error(suite: Suite, id: impl Into<String>, n: Option<usize>, err: impl std::fmt::Display) -> Self {
        Check {
            id: id.into(),
            suite: suite.name(),
            n,
            status: Status::Error,
            max_dev: None,
            tol: None,
            detail: Some(err.to_string()),
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    pub fn new(config: RunConfig, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(Check::passed);
        Report { schema: 1, config, checks, pass }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS ",
                Status::Fail => "FAIL ",
                Status::Error => "ERROR",
            };
            out.push_str(&format!("{tag} {}", c.id));
            if let Some(n) = c.n {
                out.push_str(&format!(" n={n}"));
            }
            if let (Some(d), Some(t)) = (c.max_dev, c.tol) {
                out.push_str(&format!(" max_dev={d:.3e} tol={t:.0e}"));
            }
            if let Some(d) = &c.detail {
                out.push_str(&format!(" ({d})"));
            }
            out.push('\n');
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        out.push_str(&format!(
            "{}: {} checks, {} failed, seed {}\n",
            if self.pass { "ok" } else { "FAILED" },
            self.checks.len(),
            failed,
            self.config.seed
        ));
        out
    }
}
