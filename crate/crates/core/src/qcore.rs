//! q-calculus primitives.
//!
//! q-brackets (integer and real argument), q-factorials, q-binomials,
//! q-Pochhammer symbols and the two classical q-exponentials `e_q` and `E_q`.
//! Everything here is a pure function of its arguments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation tolerance for every series in the crate.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Hard cap on the number of terms any truncated series may use.
pub const MAX_TERMS: usize = 5_000_000;

/// Non-fatal conditions attached to a parameter bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Warning {
    /// `mu <= 1/2`: the kernel is well defined but the operators are
    /// customarily stated for `mu > 1/2`.
    MuBelowHalf,
    /// `alpha > beta`: outside the usual Stancu range `0 <= alpha <= beta`.
    AlphaExceedsBeta,
    /// The test function is not nondecreasing, so cell integrals of it need
    /// not be positive.
    NonMonotoneFunction,
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let msg = match self {
            Warning::MuBelowHalf => "mu <= 1/2: operators are stated for mu > 1/2",
            Warning::AlphaExceedsBeta => "alpha > beta: outside the customary 0 <= alpha <= beta",
            Warning::NonMonotoneFunction => "test function is not nondecreasing: cell integrals may be negative",
        };
        f.write_str(msg)
    }
}

/// The parameter pair `(q, mu)` every series in the crate is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ContextSpec", into = "ContextSpec")]
pub struct QContext {
    q: f64,
    mu: f64,
    ln_q: f64,
}

#[derive(Serialize, Deserialize)]
struct ContextSpec {
    q: f64,
    mu: f64,
}

impl TryFrom<ContextSpec> for QContext {
    type Error = Error;

    fn try_from(spec: ContextSpec) -> Result<Self> {
        QContext::new(spec.q, spec.mu)
    }
}

impl From<QContext> for ContextSpec {
    fn from(ctx: QContext) -> Self {
        ContextSpec { q: ctx.q, mu: ctx.mu }
    }
}

impl QContext {
    /// Requires `0 < q < 1` and `mu > -1/2`.
    pub fn new(q: f64, mu: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain("q", q, "must satisfy 0 < q < 1"));
        }
        if !(mu > -0.5) || !mu.is_finite() {
            return Err(Error::domain("mu", mu, "must satisfy mu > -1/2"));
        }
        Ok(Self { q, mu, ln_q: q.ln() })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn ln_q(&self) -> f64 {
        self.ln_q
    }

    pub fn warnings(&self) -> Vec<Warning> {
        if self.mu <= 0.5 {
            vec![Warning::MuBelowHalf]
        } else {
            Vec::new()
        }
    }

    /// `[x]_q = (1 - q^x)/(1 - q)` for any real `x`, including negative
    /// arguments such as `[1 - 2mu]_q`.
    ///
    /// Evaluated as `expm1(x ln q) / expm1(ln q)` so that it stays accurate
    /// as `q -> 1`.
    pub fn bracket(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let ln_q = self.ln_q();
        (x * ln_q).exp_m1() / ln_q.exp_m1()
    }

    /// `q^x`.
    pub fn pow(&self, x: f64) -> f64 {
        (x * self.ln_q()).exp()
    }
}

/// A truncated infinite sum or product together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncated {
    pub value: f64,
    /// Bound (or estimate, where documented) on the omitted tail.
    pub error_bound: f64,
    /// Number of terms or factors used.
    pub terms: usize,
}

/// q-bracket `[x]_q` for real `x >= 0`.
pub fn q_bracket(x: f64, ctx: &QContext) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain("x", x, "q-bracket needs x >= 0"));
    }
    Ok(ctx.bracket(x))
}

/// `[n]_q! = [n]_q [n-1]_q ... [1]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: u32, ctx: &QContext) -> f64 {
    (1..=n).map(|i| ctx.bracket(i as f64)).product()
}

/// Gaussian binomial coefficient.
///
/// Computed as a product over `min(k, n-k)` ratios so that the symmetry
/// `k <-> n-k` holds bit for bit.
pub fn q_binomial(n: u32, k: u32, ctx: &QContext) -> Result<f64> {
    if k > n {
        return Err(Error::domain("k", k as f64, "q-binomial needs k <= n"));
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 1..=k {
        acc *= ctx.bracket((n - k + i) as f64) / ctx.bracket(i as f64);
    }
    Ok(acc)
}

/// Order of a q-Pochhammer symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Finite(usize),
    Infinite,
}

/// `(x; base)_n = prod_{j<n} (1 - base^j x)`, finite or infinite.
///
/// The infinite product stops once `|base^j x| < tol`; the returned error
/// bound covers the omitted factors through
/// `|ln prod_{j>=J}(1 - base^j x)| <= |base^J x| / ((1 - base)(1 - |base^J x|))`.
pub fn q_pochhammer_in_base(x: f64, order: Order, base: f64, tol: f64) -> Truncated {
    match order {
        Order::Finite(n) => {
            let mut acc = 1.0;
            let mut p = 1.0;
            for _ in 0..n {
                acc *= 1.0 - p * x;
                p *= base;
            }
            Truncated {
                value: acc,
                error_bound: 0.0,
                terms: n,
            }
        }
        Order::Infinite => {
            let mut acc = 1.0;
            let mut p = 1.0;
            let mut j = 0;
            while (p * x).abs() >= tol && j < MAX_TERMS {
                acc *= 1.0 - p * x;
                p *= base;
                j += 1;
                if acc == 0.0 {
                    break;
                }
            }
            let rest = (p * x).abs();
            let log_tail = rest / ((1.0 - base) * (1.0 - rest).max(f64::MIN_POSITIVE));
            Truncated {
                value: acc,
                error_bound: acc.abs() * log_tail.exp_m1(),
                terms: j,
            }
        }
    }
}

/// `(x; q)_n` with the base taken from the context.
pub fn q_pochhammer(x: f64, order: Order, ctx: &QContext, tol: f64) -> Truncated {
    q_pochhammer_in_base(x, order, ctx.q(), tol)
}

/// Sums `sum_k t_k` where `t_{k+1} = t_k * ratio(k)` and `|ratio(j)|` is
/// bounded by `ratio_bound(k)` for every `j >= k`.
fn sum_ratio_series(
    first: f64,
    ratio: impl Fn(usize) -> f64,
    ratio_bound: impl Fn(usize) -> f64,
    tol: f64,
) -> Result<Truncated> {
    let mut sum = first;
    let mut term = first;
    let mut k = 0usize;
    loop {
        let r = ratio_bound(k);
        if r < 1.0 {
            let tail = term.abs() * r / (1.0 - r);
            if tail <= tol * sum.abs() || term == 0.0 {
                return Ok(Truncated {
                    value: sum,
                    error_bound: tail,
                    terms: k + 1,
                });
            }
        }
        term *= ratio(k);
        sum += term;
        k += 1;
        if k >= MAX_TERMS || !sum.is_finite() {
            return Err(Error::NoConvergence { terms: k });
        }
    }
}

/// Small q-exponential `e_q(z) = sum z^k / [k]_q!`, defined for
/// `|z| < 1/(1-q)`.
pub fn q_exp_small(z: f64, ctx: &QContext, tol: f64) -> Result<Truncated> {
    let radius = 1.0 / (1.0 - ctx.q());
    if !(z.abs() < radius) {
        return Err(Error::domain("z", z, "e_q(z) needs |z| < 1/(1-q)"));
    }
    sum_ratio_series(
        1.0,
        |k| z / ctx.bracket((k + 1) as f64),
        |k| z.abs() / ctx.bracket((k + 1) as f64),
        tol,
    )
}

/// Product form of the small q-exponential: `1 / ((1-q) z; q)_inf`.
pub fn q_exp_small_product(z: f64, ctx: &QContext, tol: f64) -> Result<Truncated> {
    let radius = 1.0 / (1.0 - ctx.q());
    if !(z.abs() < radius) {
        return Err(Error::domain("z", z, "e_q(z) needs |z| < 1/(1-q)"));
    }
    let p = q_pochhammer((1.0 - ctx.q()) * z, Order::Infinite, ctx, tol * 1e-4);
    Ok(Truncated {
        value: 1.0 / p.value,
        error_bound: p.error_bound / (p.value * p.value),
        terms: p.terms,
    })
}

/// Big q-exponential `E_q(z) = sum q^{k(k-1)/2} z^k / [k]_q! = (-(1-q) z; q)_inf`.
///
/// Returns the product value. For `|z| <= 10` the series is evaluated as
/// well and the two must agree to `1e-10` relative (absolute near zero).
pub fn q_exp_big(z: f64, ctx: &QContext, tol: f64) -> Result<Truncated> {
    let product = q_exp_big_product(z, ctx, tol);
    if z.abs() <= 10.0 {
        let series = q_exp_big_series(z, ctx, tol)?;
        let scale = product.value.abs().max(1.0);
        if (series.value - product.value).abs() > 1e-10 * scale {
            return Err(Error::CrossCheck {
                what: "E_q series vs product",
                first: series.value,
                second: product.value,
            });
        }
    }
    Ok(product)
}

pub fn q_exp_big_product(z: f64, ctx: &QContext, tol: f64) -> Truncated {
    // tol here bounds the factor deviation |q^j (1-q) z|
    q_pochhammer(-(1.0 - ctx.q()) * z, Order::Infinite, ctx, tol * 1e-4)
}

pub fn q_exp_big_series(z: f64, ctx: &QContext, tol: f64) -> Result<Truncated> {
    let q = ctx.q();
    sum_ratio_series(
        1.0,
        |k| q.powi(k as i32) * z / ctx.bracket((k + 1) as f64),
        |k| q.powi(k as i32) * z.abs() / ctx.bracket((k + 1) as f64),
        tol,
    )
}
