use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qintegral::Polynomial;

/// Something the operators can be applied to.
pub trait Integrand: Sync {
    fn value(&self, t: f64) -> f64;

    /// Exact polynomial form, if any; enables closed-form cell integrals.
    fn polynomial(&self) -> Option<Polynomial> {
        None
    }
}

impl<F: Fn(f64) -> f64 + Sync> Integrand for F {
    fn value(&self, t: f64) -> f64 {
        self(t)
    }
}

impl Integrand for Polynomial {
    fn value(&self, t: f64) -> f64 {
        self.eval(t)
    }

    fn polynomial(&self) -> Option<Polynomial> {
        Some(self.clone())
    }
}

/// The concrete functions used by the experiments and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum TestFunction {
    /// `t^p`; `p = 0` is the constant 1.
    Monomial { p: u32 },
    /// `exp(-c t)`.
    ExpDecay { c: f64 },
    /// `sin t`.
    Sine,
    /// `|t - x0|`.
    AbsShift { x0: f64 },
    /// `|t - center|^nu`, Hoelder of order `nu` with constant 1.
    HolderCusp { nu: f64, center: f64 },
}

/// Analytic facts about a test function on `[0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionMeta {
    pub is_bounded: bool,
    pub is_uniformly_continuous: bool,
    pub is_nondecreasing: bool,
    /// `(nu, M)` with `|f(a) - f(b)| <= M |a - b|^nu`.
    pub lipschitz: Option<(f64, f64)>,
    /// `(sup|g|, sup|g'|, sup|g''|)` when all three are finite.
    pub cb2_norms: Option<(f64, f64, f64)>,
    /// `M_f` with `|f(x)| <= M_f (1 + x^2)`.
    pub rho_bound: Option<f64>,
}

impl TestFunction {
    pub fn constant() -> Self {
        TestFunction::Monomial { p: 0 }
    }

    pub fn holder_cusp(nu: f64) -> Self {
        TestFunction::HolderCusp { nu, center: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TestFunction::ExpDecay { c } if !c.is_finite() => {
                Err(Error::Config(format!("exp_decay rate c = {c} must be finite")))
            }
            TestFunction::AbsShift { x0 } if !x0.is_finite() => {
                Err(Error::Config(format!("abs_shift x0 = {x0} must be finite")))
            }
            TestFunction::HolderCusp { nu, center } if !(nu > 0.0 && nu <= 1.0) || !center.is_finite() => {
                Err(Error::Config(format!("holder_cusp needs 0 < nu <= 1, got nu = {nu}")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TestFunction::Monomial { p } => t.powi(p as i32),
            TestFunction::ExpDecay { c } => (-c * t).exp(),
            TestFunction::Sine => t.sin(),
            TestFunction::AbsShift { x0 } => (t - x0).abs(),
            TestFunction::HolderCusp { nu, center } => (t - center).abs().powf(nu),
        }
    }

    pub fn meta(&self) -> FunctionMeta {
        match *self {
            TestFunction::Monomial { p } => FunctionMeta {
                is_bounded: p == 0,
                is_uniformly_continuous: p <= 1,
                is_nondecreasing: true,
                lipschitz: match p {
                    0 => Some((1.0, 0.0)),
                    1 => Some((1.0, 1.0)),
                    _ => None,
                },
                cb2_norms: (p == 0).then_some((1.0, 0.0, 0.0)),
                rho_bound: (p <= 2).then_some(1.0),
            },
            TestFunction::ExpDecay { c } => FunctionMeta {
                is_bounded: c >= 0.0,
                is_uniformly_continuous: c >= 0.0,
                is_nondecreasing: c <= 0.0,
                lipschitz: (c >= 0.0).then_some((1.0, c)),
                cb2_norms: (c >= 0.0).then_some((1.0, c, c * c)),
                rho_bound: (c >= 0.0).then_some(1.0),
            },
            TestFunction::Sine => FunctionMeta {
                is_bounded: true,
                is_uniformly_continuous: true,
                is_nondecreasing: false,
                lipschitz: Some((1.0, 1.0)),
                cb2_norms: Some((1.0, 1.0, 1.0)),
                rho_bound: Some(1.0),
            },
            TestFunction::AbsShift { x0 } => FunctionMeta {
                is_bounded: false,
                is_uniformly_continuous: true,
                is_nondecreasing: x0 <= 0.0,
                lipschitz: Some((1.0, 1.0)),
                cb2_norms: None,
                rho_bound: Some(x0.abs().max(1.0)),
            },
            TestFunction::HolderCusp { nu, center } => FunctionMeta {
                is_bounded: false,
                is_uniformly_continuous: true,
                is_nondecreasing: center <= 0.0,
                lipschitz: Some((nu, 1.0)),
                cb2_norms: None,
                // |t - c|^nu <= 1 + |t - c| <= (1 + |c|)(1 + t^2)
                rho_bound: Some(1.0 + center.abs()),
            },
        }
    }

    /// `sup|g| + sup|g'| + sup|g''|`, the norm of `C_B^2`.
    pub fn cb2_norm(&self) -> Result<f64> {
        self.meta()
            .cb2_norms
            .map(|(a, b, c)| a + b + c)
            .ok_or_else(|| self.missing("C_B^2 norm"))
    }

    pub fn lipschitz(&self) -> Result<(f64, f64)> {
        self.meta().lipschitz.ok_or_else(|| self.missing("Lipschitz"))
    }

    pub(crate) fn missing(&self, what: &'static str) -> Error {
        Error::MissingMetadata {
            function: self.to_string(),
            what,
        }
    }
}

impl Integrand for TestFunction {
    fn value(&self, t: f64) -> f64 {
        self.eval(t)
    }

    fn polynomial(&self) -> Option<Polynomial> {
        match *self {
            TestFunction::Monomial { p } => Some(Polynomial::monomial(p as usize)),
            _ => None,
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TestFunction::Monomial { p: 0 } => write!(f, "const"),
            TestFunction::Monomial { p } => write!(f, "monomial({p})"),
            TestFunction::ExpDecay { c } => write!(f, "exp_decay({c})"),
            TestFunction::Sine => write!(f, "sine"),
            TestFunction::AbsShift { x0 } => write!(f, "abs_shift({x0})"),
            TestFunction::HolderCusp { nu, center } => write!(f, "holder_cusp({nu},{center})"),
        }
    }
}

/// Parses `const`, `monomial(2)`, `exp_decay(1)`, `sine`, `abs_shift(1)`,
/// `holder_cusp(0.5)` and `holder_cusp(0.5,0.25)`; a bare family name gets
/// default parameters.
impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.split_once('(') {
            Some((name, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Config(format!("unbalanced parentheses in `{s}`")))?;
                let args = inner
                    .split(',')
                    .map(|a| {
                        a.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Config(format!("bad argument `{a}` in `{s}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (name.trim(), args)
            }
            None => (s, Vec::new()),
        };
        let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
        let max_args = |m: usize| {
            if args.len() > m {
                Err(Error::Config(format!("`{name}` takes at most {m} argument(s)")))
            } else {
                Ok(())
            }
        };
        let f = match name {
            "const" | "constant" | "one" => {
                max_args(0)?;
                TestFunction::constant()
            }
            "monomial" => {
                max_args(1)?;
                let p = arg(0, 1.0);
                if p < 0.0 || p.fract() != 0.0 || p > 64.0 {
                    return Err(Error::Config(format!(
                        "monomial degree {p} must be an integer in 0..=64"
                    )));
                }
                TestFunction::Monomial { p: p as u32 }
            }
            "exp_decay" => {
                max_args(1)?;
                TestFunction::ExpDecay { c: arg(0, 1.0) }
            }
            "sine" | "sin" => {
                max_args(0)?;
                TestFunction::Sine
            }
            "abs_shift" => {
                max_args(1)?;
                TestFunction::AbsShift { x0: arg(0, 1.0) }
            }
            "holder_cusp" => {
                max_args(2)?;
                TestFunction::HolderCusp {
                    nu: arg(0, 0.5),
                    center: arg(1, 0.5),
                }
            }
            other => return Err(Error::Config(format!("unknown function `{other}`"))),
        };
        f.validate()?;
        Ok(f)
    }
}
