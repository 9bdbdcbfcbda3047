use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, GridSpec, QnScheme, ReportFormat};
use crate::operators::TestFunction;

/// Run configuration as written in a JSON file or given by flags. Every
/// field is optional; [`RunConfig::resolve`] fills in the defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub q: Option<f64>,
    pub qn_scheme: Option<String>,
    pub mu: Option<f64>,
    pub n: Option<u32>,
    pub n_list: Option<Vec<u32>>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub f: Option<String>,
    pub p: Option<u32>,
    pub c: Option<f64>,
    pub x0: Option<f64>,
    pub nu: Option<f64>,
    pub grid: Option<String>,
    pub weighted_grid: Option<String>,
    pub tol: Option<f64>,
    pub fine_factor: Option<usize>,
    pub domain_margin: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub moments: Option<bool>,
    pub with_d: Option<bool>,
}

/// A configuration with every default applied and every value validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub experiment: ExperimentConfig,
    /// Values given explicitly, which narrow the verification matrix.
    pub explicit_q: Option<f64>,
    pub explicit_mu: Option<f64>,
    pub explicit_n: Option<Vec<u32>>,
    pub explicit_shift: Option<(f64, f64)>,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
    pub threads: Option<usize>,
    pub seed: u64,
    pub moments: bool,
    pub with_d: bool,
}

pub const DEFAULT_SEED: u64 = 20_160_601;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Values set in `over` replace those in `self`.
    pub fn merge(self, over: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($field:ident),*) => {
                RunConfig { $($field: over.$field.or(self.$field)),* }
            };
        }
        pick!(
            q,
            qn_scheme,
            mu,
            n,
            n_list,
            alpha,
            beta,
            f,
            p,
            c,
            x0,
            nu,
            grid,
            weighted_grid,
            tol,
            fine_factor,
            domain_margin,
            out,
            format,
            threads,
            seed,
            moments,
            with_d
        )
    }

    fn function(&self) -> Result<TestFunction> {
        let base = match &self.f {
            Some(name) => name.parse()?,
            None => TestFunction::Sine,
        };
        let f = match base {
            TestFunction::Monomial { p } => TestFunction::Monomial { p: self.p.unwrap_or(p) },
            TestFunction::ExpDecay { c } => TestFunction::ExpDecay { c: self.c.unwrap_or(c) },
            TestFunction::AbsShift { x0 } => TestFunction::AbsShift {
                x0: self.x0.unwrap_or(x0),
            },
            TestFunction::HolderCusp { nu, center } => TestFunction::HolderCusp {
                nu: self.nu.unwrap_or(nu),
                center: self.x0.unwrap_or(center),
            },
            other => other,
        };
        let unused = |name: &str, set: bool, ok: bool| {
            if set && !ok {
                Err(Error::Config(format!(
                    "parameter `{name}` does not apply to function `{f}`"
                )))
            } else {
                Ok(())
            }
        };
        unused("p", self.p.is_some(), matches!(f, TestFunction::Monomial { .. }))?;
        unused("c", self.c.is_some(), matches!(f, TestFunction::ExpDecay { .. }))?;
        unused(
            "x0",
            self.x0.is_some(),
            matches!(f, TestFunction::AbsShift { .. } | TestFunction::HolderCusp { .. }),
        )?;
        unused("nu", self.nu.is_some(), matches!(f, TestFunction::HolderCusp { .. }))?;
        f.validate()?;
        Ok(f)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let defaults = ExperimentConfig::default();
        let scheme = match (self.q, &self.qn_scheme) {
            (Some(_), Some(_)) => return Err(Error::Config("give either q or qn_scheme, not both".into())),
            (Some(q), None) => {
                if !(q > 0.0 && q < 1.0) {
                    return Err(Error::Config(format!("q = {q} must lie in (0, 1)")));
                }
                QnScheme::Fixed { q }
            }
            (None, Some(s)) => s.parse()?,
            (None, None) => defaults.scheme,
        };
        let n_list = match (self.n, &self.n_list) {
            (Some(_), Some(_)) => return Err(Error::Config("give either n or n_list, not both".into())),
            (Some(n), None) => Some(vec![n]),
            (None, Some(list)) => Some(list.clone()),
            (None, None) => None,
        };
        let parse_grid = |g: &Option<String>, default: GridSpec| -> Result<GridSpec> {
            g.as_deref().map_or(Ok(default), str::parse)
        };
        let experiment = ExperimentConfig {
            scheme,
            mu: self.mu.unwrap_or(defaults.mu),
            n_list: n_list.clone().unwrap_or(defaults.n_list),
            alpha: self.alpha.unwrap_or(defaults.alpha),
            beta: self.beta.unwrap_or(defaults.beta),
            f: self.function()?,
            grid: parse_grid(&self.grid, defaults.grid)?,
            weighted_grid: parse_grid(&self.weighted_grid, defaults.weighted_grid)?,
            tol: self.tol.unwrap_or(defaults.tol),
            fine_factor: self.fine_factor.unwrap_or(defaults.fine_factor),
            domain_margin: self.domain_margin.unwrap_or(defaults.domain_margin),
        };
        experiment.validate()?;
        let format = match &self.format {
            Some(s) => s.parse()?,
            None => ReportFormat::Csv,
        };
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be >= 1".into()));
        }
        Ok(Resolved {
            experiment,
            explicit_q: self.q,
            explicit_mu: self.mu,
            explicit_n: n_list,
            explicit_shift: (self.alpha.is_some() || self.beta.is_some())
                .then(|| (self.alpha.unwrap_or(0.0), self.beta.unwrap_or(0.0))),
            out: self.out.clone(),
            format,
            threads: self.threads,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            moments: self.moments.unwrap_or(false),
            with_d: self.with_d.unwrap_or(false),
        })
    }
}

impl Resolved {
    /// Config echo for report headers, including the CLI-only settings.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = self.experiment.echo();
        m.insert("seed".into(), self.seed.to_string());
        m.insert(
            "format".into(),
            match self.format {
                ReportFormat::Csv => "csv".into(),
                ReportFormat::Json => "json".into(),
            },
        );
        m.insert("moments".into(), self.moments.to_string());
        m.insert("with_d".into(), self.with_d.to_string());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let r = RunConfig::default().resolve().unwrap();
        assert_eq!(r.experiment, ExperimentConfig::default());
        assert_eq!(r.format, ReportFormat::Csv);
        assert_eq!(r.seed, DEFAULT_SEED);
    }

    #[test]
    fn overrides_and_conflicts() {
        let file: RunConfig = serde_json::from_str(r#"{"q": 0.9, "n": 10, "f": "monomial", "p": 2}"#).unwrap();
        let r = file.clone().resolve().unwrap();
        assert_eq!(r.experiment.scheme, QnScheme::Fixed { q: 0.9 });
        assert_eq!(r.experiment.n_list, vec![10]);
        assert_eq!(r.experiment.f, TestFunction::Monomial { p: 2 });
        let flags = RunConfig {
            n: Some(20),
            ..RunConfig::default()
        };
        assert_eq!(file.merge(flags).resolve().unwrap().experiment.n_list, vec![20]);
        let both = RunConfig {
            n: Some(1),
            n_list: Some(vec![2]),
            ..RunConfig::default()
        };
        assert!(both.resolve().is_err());
        let stray = RunConfig {
            f: Some("sine".into()),
            p: Some(2),
            ..RunConfig::default()
        };
        assert!(stray.resolve().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"q": 0.9, "qq": 1}"#).is_err());
        let bad = RunConfig {
            f: Some("cosine".into()),
            ..RunConfig::default()
        };
        assert!(matches!(bad.resolve(), Err(Error::Config(_))));
    }
}
