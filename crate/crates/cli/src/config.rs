use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Inclusive range of `n`, written `3`, `0..4` or `0..=4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl NRange {
    pub fn iter(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }

    /// The part of the range inside `lo..=hi`.
    pub fn clamp(self, lo: usize, hi: usize) -> impl Iterator<Item = usize> {
        self.lo.max(lo)..=self.hi.min(hi)
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("not a non-negative integer: {t:?}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let n = num(s)?;
                (n, n)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(NRange { lo, hi })
    }
}

impl fmt::Display for NRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Atable,
    Rtable,
    Flows,
    Bihamiltonian,
    Pdo,
    Cinv,
    Identities,
    Frobenius,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Atable,
        Suite::Rtable,
        Suite::Flows,
        Suite::Bihamiltonian,
        Suite::Pdo,
        Suite::Cinv,
        Suite::Identities,
        Suite::Frobenius,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Atable => "atable",
            Suite::Rtable => "rtable",
            Suite::Flows => "flows",
            Suite::Bihamiltonian => "bihamiltonian",
            Suite::Pdo => "pdo",
            Suite::Cinv => "cinv",
            Suite::Identities => "identities",
            Suite::Frobenius => "frobenius",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub closed: f64,
    pub pipeline: f64,
    pub frobenius: f64,
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { closed: 1e-9, pipeline: 1e-7, frobenius: 1e-8, oracle: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: NRange,
    pub kmax: u32,
    pub eps_order: u32,
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: Tolerances,
    pub suites: Vec<Suite>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: NRange { lo: 0, hi: 4 },
            kmax: 2,
            eps_order: 4,
            depth: 8,
            samples: 25,
            seed: 7,
            tol: Tolerances::default(),
            suites: Suite::ALL.to_vec(),
            format: Format::Text,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.samples == 0 {
            return Err("samples must be positive".into());
        }
        if self.kmax == 0 || self.eps_order == 0 || self.depth == 0 {
            return Err("kmax, eps_order and depth must be positive".into());
        }
        let t = &self.tol;
        if [t.closed, t.pipeline, t.frobenius, t.oracle].iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err("tolerances must be positive and finite".into());
        }
        if self.suites.is_empty() {
            return Err("no suite selected".into());
        }
        Ok(())
    }

    pub fn runs(&self, s: Suite) -> bool {
        self.suites.contains(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!("0..4".parse::<NRange>().unwrap(), NRange { lo: 0, hi: 4 });
        assert_eq!("1..=3".parse::<NRange>().unwrap(), NRange { lo: 1, hi: 3 });
        assert_eq!("2".parse::<NRange>().unwrap(), NRange { lo: 2, hi: 2 });
        assert!("3..1".parse::<NRange>().is_err());
        assert!("x".parse::<NRange>().is_err());
    }

    #[test]
    fn config_round_trip() {
        let c = RunConfig::default();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&s).unwrap(), c);
        let partial: RunConfig = serde_json::from_str(r#"{"samples": 3}"#).unwrap();
        assert_eq!(partial.samples, 3);
        assert_eq!(partial.seed, 7);
        let tol: RunConfig = serde_json::from_str(r#"{"tol": {"closed": 1e-20}}"#).unwrap();
        assert_eq!(tol.tol.closed, 1e-20);
        assert_eq!(tol.tol.pipeline, 1e-7);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sample": 3}"#).is_err());
    }
}
