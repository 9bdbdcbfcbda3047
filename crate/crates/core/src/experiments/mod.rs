//! Numerical experiments on the approximation theorems, and their reports.

mod report;
mod runs;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moduli::DomainGrid;
use crate::operators::TestFunction;
use crate::qcore::DEFAULT_TOL;

pub use report::{format_float, write_report, ExperimentReport, ReportFormat, ReportRow, Summary};
pub use runs::{
    eval_run, korovkin_run, rate_bound_lipschitz, rate_bound_modulus, rate_bound_second_order, rate_bound_smooth,
    rate_bound_weighted, run_experiment, Experiment,
};

/// Sequence `q_n -> 1` used for the convergence experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QnScheme {
    /// `q_n = 1 - 1/(n + offset)`; `q_n^n -> e^{-1}`.
    OneMinusInv { offset: f64 },
    /// `q_n = 1 - 1/sqrt(n + 1)`; `q_n^n -> 0`.
    OneMinusInvSqrt,
    /// `q_n = q` for every `n`.
    Fixed { q: f64 },
}

impl Default for QnScheme {
    fn default() -> Self {
        QnScheme::OneMinusInv { offset: 1.0 }
    }
}

impl QnScheme {
    pub fn q_n(&self, n: u32) -> f64 {
        let n = n as f64;
        match *self {
            QnScheme::OneMinusInv { offset } => 1.0 - 1.0 / (n + offset),
            QnScheme::OneMinusInvSqrt => 1.0 - 1.0 / (n + 1.0).sqrt(),
            QnScheme::Fixed { q } => q,
        }
    }

    /// `lim q_n^n`, when `q_n -> 1`.
    pub fn limit_a(&self) -> Option<f64> {
        match *self {
            QnScheme::OneMinusInv { .. } => Some((-1.0f64).exp()),
            QnScheme::OneMinusInvSqrt => Some(0.0),
            QnScheme::Fixed { .. } => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            QnScheme::OneMinusInv { offset } if !(offset > 1.0 - 1e-12) || !offset.is_finite() => {
                Err(Error::Config(format!("one_minus_inv offset {offset} must be >= 1")))
            }
            QnScheme::Fixed { q } if !(q > 0.0 && q < 1.0) => {
                Err(Error::Config(format!("fixed q = {q} must lie in (0, 1)")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for QnScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            QnScheme::OneMinusInv { offset } => write!(f, "one_minus_inv({offset})"),
            QnScheme::OneMinusInvSqrt => write!(f, "one_minus_inv_sqrt"),
            QnScheme::Fixed { q } => write!(f, "fixed({q})"),
        }
    }
}

impl FromStr for QnScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once('(') {
            Some((name, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Config(format!("unbalanced parentheses in `{s}`")))?;
                let v = inner
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad argument in `{s}`")))?;
                (name.trim(), Some(v))
            }
            None => (s, None),
        };
        let scheme = match (name, arg) {
            ("one_minus_inv", a) => QnScheme::OneMinusInv {
                offset: a.unwrap_or(1.0),
            },
            ("one_minus_inv_sqrt", None) => QnScheme::OneMinusInvSqrt,
            ("fixed", Some(q)) => QnScheme::Fixed { q },
            _ => return Err(Error::Config(format!("unknown q_n scheme `{s}`"))),
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

/// Uniform grid `lo:hi:points` of evaluation points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        let g = Self { lo, hi, points };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo >= 0.0) || !(self.hi > self.lo) || !self.hi.is_finite() {
            return Err(Error::Config(format!("grid {self} needs 0 <= lo < hi < inf")));
        }
        if self.points < 2 {
            return Err(Error::Config(format!("grid {self} needs at least 2 points")));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        let h = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.hi
                } else {
                    self.lo + i as f64 * h
                }
            })
            .collect()
    }

    /// Grid on `[0, hi]` with `factor` times the resolution, for moduli.
    pub fn modulus_grid(&self, factor: usize) -> DomainGrid {
        let spacing = (self.hi - self.lo) / (self.points - 1) as f64;
        let points = ((self.hi / spacing).round() as usize).max(1) * factor.max(1) + 1;
        DomainGrid::new(self.hi, points).expect("validated grid")
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.points)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("grid `{s}` must have the form lo:hi:points")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{p}` in grid `{s}`")))
        };
        let points = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("bad point count in grid `{s}`")))?;
        GridSpec::new(num(parts[0])?, num(parts[1])?, points)
    }
}

/// Everything an experiment needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scheme: QnScheme,
    pub mu: f64,
    pub n_list: Vec<u32>,
    pub alpha: f64,
    pub beta: f64,
    pub f: TestFunction,
    /// Points at which the operator is evaluated.
    pub grid: GridSpec,
    /// Range for the weighted modulus.
    pub weighted_grid: GridSpec,
    pub tol: f64,
    /// Refinement of the moduli grids relative to the evaluation grid.
    pub fine_factor: usize,
    /// Only points with `x <= domain_margin / (1 - q^n)` are evaluated.
    pub domain_margin: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: QnScheme::default(),
            mu: 1.0,
            n_list: vec![10, 25, 50, 100, 200],
            alpha: 0.0,
            beta: 0.0,
            f: TestFunction::Sine,
            grid: GridSpec {
                lo: 0.0,
                hi: 4.0,
                points: 201,
            },
            weighted_grid: GridSpec {
                lo: 0.0,
                hi: 40.0,
                points: 801,
            },
            tol: DEFAULT_TOL,
            fine_factor: 10,
            domain_margin: 0.99,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.scheme.validate()?;
        self.f.validate()?;
        self.grid.validate()?;
        self.weighted_grid.validate()?;
        if !(self.mu > -0.5) {
            return Err(Error::Config(format!("mu = {} must exceed -1/2", self.mu)));
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(Error::Config(
                "n_list must be a nonempty list of positive integers".into(),
            ));
        }
        if !(self.alpha >= 0.0) || !(self.beta >= 0.0) {
            return Err(Error::Config("alpha and beta must be >= 0".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1e-3) {
            return Err(Error::Config(format!("tol = {} must lie in (0, 1e-3)", self.tol)));
        }
        if self.fine_factor == 0 {
            return Err(Error::Config("fine_factor must be >= 1".into()));
        }
        if !(self.domain_margin > 0.0 && self.domain_margin < 1.0) {
            return Err(Error::Config("domain_margin must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Key/value echo of the configuration for report headers.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("scheme".into(), self.scheme.to_string());
        m.insert(
            "scheme_limit_a".into(),
            self.scheme.limit_a().map_or("none".into(), |a| a.to_string()),
        );
        m.insert("mu".into(), self.mu.to_string());
        m.insert(
            "n_list".into(),
            self.n_list.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
        );
        m.insert("alpha".into(), self.alpha.to_string());
        m.insert("beta".into(), self.beta.to_string());
        m.insert("f".into(), self.f.to_string());
        m.insert("grid".into(), self.grid.to_string());
        m.insert("weighted_grid".into(), self.weighted_grid.to_string());
        m.insert("tol".into(), self.tol.to_string());
        m.insert("fine_factor".into(), self.fine_factor.to_string());
        m.insert("domain_margin".into(), self.domain_margin.to_string());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schemes() {
        let s = QnScheme::default();
        assert_eq!(s.q_n(9), 0.9);
        assert!((s.q_n(100_000).powi(100_000) - (-1.0f64).exp()).abs() < 1e-5);
        assert_eq!("fixed(0.9)".parse::<QnScheme>().unwrap(), QnScheme::Fixed { q: 0.9 });
        assert_eq!(
            "one_minus_inv_sqrt".parse::<QnScheme>().unwrap(),
            QnScheme::OneMinusInvSqrt
        );
        assert!("fixed(1.5)".parse::<QnScheme>().is_err());
        for n in 1..50 {
            for s in [QnScheme::default(), QnScheme::OneMinusInvSqrt] {
                let q = s.q_n(n);
                assert!(q > 0.0 && q < 1.0);
            }
        }
    }

    #[test]
    fn grid_spec() {
        let g: GridSpec = "0:4:201".parse().unwrap();
        let xs = g.xs();
        assert_eq!(xs.len(), 201);
        assert_eq!(xs[200], 4.0);
        assert!((xs[1] - 0.02).abs() < 1e-15);
        assert_eq!(g.to_string(), "0:4:201");
        assert_eq!(g.modulus_grid(10).points, 2001);
        assert!("4:0:10".parse::<GridSpec>().is_err());
        assert!("0:4".parse::<GridSpec>().is_err());
    }

    #[test]
    fn config_round_trip() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&s).unwrap(), c);
        assert_eq!(c.echo()["n_list"], "10,25,50,100,200");
    }
}
