//! Moments of `D_{n,q}` and `T*_{n,q}`.
//!
//! With `M_m(x) = sum_k w_k(x) (A_k/[n]_q)^m`, `A_k = [k + 2 mu theta_k]_q`,
//! the moments of `D` are `D(t^m;x) = M_m(x)` and, expanding the shift and the
//! cell integrals,
//!
//! ```text
//! T*(t^j;x) = sum_i C(j,i) s^i o^(j-i) sum_{m<=i} C(i+1,m) q^m M_m / ([i+1]_q [n]_q^(i-m))
//! ```
//!
//! with `s = n/(n+beta)`, `o = alpha/(n+beta)`. Every coefficient is
//! nonnegative, so bounds on the `M_m` give bounds on `T*(t^j;x)`.
//!
//! Known bounds on the `M_m`, with `a = [1+2mu]_q`, `b = [1-2mu]_q` and
//! `r_s = e_{mu,q}(q^s [n]_q x) / e_{mu,q}([n]_q x)`:
//!
//! ```text
//! x^2 + q^{2mu} b r_1 x/[n]                          <= M_2 <= x^2 + a x/[n]
//! x^3 + (2q+1) b r_1 x^2/[n] + q^{4mu} b^2 r_2 x/[n]^2 <= M_3 <= x^3 + 3a x^2/[n] + a^2 x/[n]^2
//!                                                     M_4 <= x^4 + 6a x^3/[n] + 7a^2 x^2/[n]^2 + a^3 x/[n]^3
//! ```

use serde::{Deserialize, Serialize};

use super::{Kernel, KernelWeights, StancuParams};
use crate::dunkl::{e_mu_q, GammaTable};
use crate::error::{Error, Result};
use crate::qcore::DEFAULT_TOL;

/// Two-sided bound with an optional exact value; an absent side is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentBounds {
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
}

impl MomentBounds {
    fn exact(v: f64) -> Self {
        Self {
            lower: v,
            upper: v,
            exact: Some(v),
        }
    }

    /// `lower - slack <= v <= upper + slack`.
    pub fn contains(&self, v: f64, slack: f64) -> bool {
        self.lower - slack <= v && v <= self.upper + slack
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `M_m(x)` from weights.
pub fn kernel_moment(m: u32, kernel: &Kernel, w: &KernelWeights) -> f64 {
    w.iter().map(|(k, wk)| wk * kernel.node(k).powi(m as i32)).sum()
}

/// `r_s = e_{mu,q}(q^s y) / e_{mu,q}(y)` for `s = 1, 2`.
fn e_ratios(x: f64, params: &StancuParams) -> Result<(f64, f64)> {
    params.check_domain(x)?;
    let table = GammaTable::new(params.ctx, 64);
    let y = params.bracket_n * x;
    let q = params.ctx.q();
    let tol = DEFAULT_TOL * 1e-2;
    let ln_e = e_mu_q(y, &table, tol)?.ln_value;
    let r1 = (e_mu_q(q * y, &table, tol)?.ln_value - ln_e).exp();
    let r2 = (e_mu_q(q * q * y, &table, tol)?.ln_value - ln_e).exp();
    Ok((r1, r2))
}

/// Bounds on `M_0, ..., M_4`.
pub fn kernel_moment_bounds(x: f64, params: &StancuParams) -> Result<[MomentBounds; 5]> {
    let (r1, r2) = e_ratios(x, params)?;
    let ctx = &params.ctx;
    let q = ctx.q();
    let mu = ctx.mu();
    let a = ctx.bracket(1.0 + 2.0 * mu);
    let b = ctx.bracket(1.0 - 2.0 * mu);
    let u = x / params.bracket_n;
    let bn = params.bracket_n;
    let x2 = x * x;
    let x3 = x2 * x;
    Ok([
        MomentBounds::exact(1.0),
        MomentBounds::exact(x),
        MomentBounds {
            lower: x2 + ctx.pow(2.0 * mu) * b * r1 * u,
            upper: x2 + a * u,
            exact: None,
        },
        MomentBounds {
            lower: x3 + (2.0 * q + 1.0) * b * r1 * x * u + ctx.pow(4.0 * mu) * b * b * r2 * u / bn,
            upper: x3 + 3.0 * a * x * u + a * a * u / bn,
            exact: None,
        },
        MomentBounds {
            lower: f64::NEG_INFINITY,
            upper: x3 * x + 6.0 * a * x2 * u + 7.0 * a * a * x * u / bn + a.powi(3) * u / (bn * bn),
            exact: None,
        },
    ])
}

/// Bounds on `D(t^j; x)` for `j <= 4`.
pub fn d_moment_bounds(j: u32, x: f64, params: &StancuParams) -> Result<MomentBounds> {
    if j > 4 {
        return Err(Error::domain("j", j as f64, "moment bounds exist for j <= 4"));
    }
    Ok(kernel_moment_bounds(x, params)?[j as usize])
}

/// `T*(t^j; x)` as a nonnegative combination of the supplied `M_0..M_j`.
pub fn t_moment_from_kernel(j: u32, m: &[f64], params: &StancuParams) -> f64 {
    let ctx = &params.ctx;
    let q = ctx.q();
    let bn = params.bracket_n;
    let (s, o) = params.shift_coefficients();
    let j = j as usize;
    (0..=j)
        .map(|i| {
            let inner: f64 = (0..=i)
                .map(|mm| {
                    let coef = binomial(i + 1, mm) * q.powi(mm as i32)
                        / (ctx.bracket(i as f64 + 1.0) * bn.powi((i - mm) as i32));
                    if coef == 0.0 {
                        0.0
                    } else {
                        coef * m[mm]
                    }
                })
                .sum();
            binomial(j, i) * s.powi(i as i32) * o.powi((j - i) as i32) * inner
        })
        .sum()
}

/// `T*(t^j; x)` for `j <= 4` from the weights, in closed form.
#[allow(non_snake_case)]
pub fn moment_T_exact(j: u32, kernel: &Kernel, w: &KernelWeights) -> f64 {
    let m: Vec<f64> = (0..=j).map(|mm| kernel_moment(mm, kernel, w)).collect();
    t_moment_from_kernel(j, &m, kernel.params())
}

/// `T*(t; x) = 2qn/((n+beta)[2]_q) x + n/((n+beta)[2]_q[n]_q) + alpha/(n+beta)`.
#[allow(non_snake_case)]
pub fn moment_T1(x: f64, params: &StancuParams) -> f64 {
    let n = params.n as f64;
    let q = params.ctx.q();
    let d = n + params.beta;
    let b2 = params.ctx.bracket(2.0);
    2.0 * q * n / (d * b2) * x + n / (d * b2 * params.bracket_n) + params.alpha / d
}

/// Bounds on `T*(t^j; x)`: exact for `j <= 1`, two-sided for `j = 2, 3`,
/// upper only for `j = 4`.
#[allow(non_snake_case)]
pub fn moment_T_bounds(j: u32, x: f64, params: &StancuParams) -> Result<MomentBounds> {
    if j > 4 {
        return Err(Error::domain("j", j as f64, "moment bounds exist for j <= 4"));
    }
    let mb = kernel_moment_bounds(x, params)?;
    let lower: Vec<f64> = mb.iter().map(|b| b.lower).collect();
    let upper: Vec<f64> = mb.iter().map(|b| b.upper).collect();
    let hi = t_moment_from_kernel(j, &upper, params);
    Ok(match j {
        0 | 1 => MomentBounds::exact(hi),
        4 => MomentBounds {
            lower: f64::NEG_INFINITY,
            upper: hi,
            exact: None,
        },
        _ => MomentBounds {
            lower: t_moment_from_kernel(j, &lower, params),
            upper: hi,
            exact: None,
        },
    })
}

/// `T*(t - x; x) = (2qn/((n+beta)[2]_q) - 1) x + n/((n+beta)[2]_q[n]_q) + alpha/(n+beta)`.
#[allow(non_snake_case)]
pub fn central_moment_T1(x: f64, params: &StancuParams) -> f64 {
    let n = params.n as f64;
    let q = params.ctx.q();
    let d = n + params.beta;
    let b2 = params.ctx.bracket(2.0);
    (2.0 * q * n / (d * b2) - 1.0) * x + n / (d * b2 * params.bracket_n) + params.alpha / d
}

/// Upper bound for `T*((t - x)^2; x)`.
pub fn phi_n(x: f64, params: &StancuParams) -> f64 {
    let n = params.n as f64;
    let a = params.alpha;
    let d = n + params.beta;
    let bn = params.bracket_n;
    let ctx = &params.ctx;
    let b2 = ctx.bracket(2.0);
    let b3 = ctx.bracket(3.0);
    let b12mu = ctx.bracket(1.0 + 2.0 * ctx.mu());
    let c0 = n / (d * d * bn) * (n / (b3 * bn) + 2.0 * a / b2) + a * a / (d * d);
    let c1 =
        n * n / (d * d) * 3.0 / (b3 * bn) * (1.0 + b12mu) + 2.0 * n / (d * b2) * (2.0 * a - 1.0 / bn) - 2.0 * a / d;
    let c2 = n / d * (3.0 * n / (d * b3) - 4.0 * n / (d * b2)) + 1.0;
    c0 + c1 * x + c2 * x * x
}

/// Upper bound for `T*((t - x)^j; x)`, `j = 2` or `4`.
///
/// For `j = 4` the bound is assembled from the moment bounds as
/// `U(t^4) - 4x L(t^3) + 6x^2 U(t^2) - 4x^3 T*(t) + x^4`.
pub fn central_moment_bound(j: u32, x: f64, params: &StancuParams) -> Result<f64> {
    match j {
        2 => Ok(phi_n(x, params)),
        4 => {
            let t4 = moment_T_bounds(4, x, params)?.upper;
            let t3 = moment_T_bounds(3, x, params)?.lower;
            let t2 = moment_T_bounds(2, x, params)?.upper;
            let t1 = moment_T1(x, params);
            Ok(t4 - 4.0 * x * t3 + 6.0 * x * x * t2 - 4.0 * x.powi(3) * t1 + x.powi(4))
        }
        _ => Err(Error::domain("j", j as f64, "central moment bounds exist for j = 2, 4")),
    }
}

/// `T*((t - x)^j; x)` from the weights, in closed form.
#[allow(non_snake_case)]
pub fn central_moment_T_exact(j: u32, kernel: &Kernel, w: &KernelWeights) -> f64 {
    let x = w.x;
    let m: Vec<f64> = (0..=j).map(|mm| kernel_moment(mm, kernel, w)).collect();
    (0..=j)
        .map(|i| {
            binomial(j as usize, i as usize) * (-x).powi((j - i) as i32) * t_moment_from_kernel(i, &m, kernel.params())
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{CellRule, TOperator, TestFunction};
    use crate::qcore::QContext;
    use crate::qintegral::Polynomial;
    use approx::assert_relative_eq;

    fn params(q: f64, mu: f64, n: u32, alpha: f64, beta: f64) -> StancuParams {
        StancuParams::new(QContext::new(q, mu).unwrap(), n, alpha, beta).unwrap()
    }

    #[test]
    fn first_moments() {
        let p = params(0.9, 1.0, 10, 1.0, 2.0);
        let kernel = Kernel::new(p);
        let w = kernel.weights(1.0, 1e-13).unwrap();
        let f = TestFunction::Monomial { p: 1 };
        let series = TOperator::new(&kernel, &f, CellRule::Jackson, 1e-13).apply(&w);
        assert!((series - moment_T1(1.0, &p)).abs() < 1e-9);
        assert!((central_moment_T1(1.0, &p) - (moment_T1(1.0, &p) - 1.0)).abs() < 1e-14);
        assert!((kernel_moment(1, &kernel, &w) - 1.0).abs() < 1e-12);
        let p0 = params(0.9, 1.0, 10, 0.0, 0.0);
        assert_relative_eq!(
            moment_T1(0.0, &p0),
            1.0 / (p0.ctx.bracket(2.0) * p0.bracket_n),
            max_relative = 1e-14
        );
    }

    #[test]
    fn bounds_at_origin_collapse() {
        let p = params(0.9, 1.0, 10, 0.0, 2.0);
        let b = moment_T_bounds(2, 0.0, &p).unwrap();
        let n = 10.0;
        let expect = n * n / ((n + 2.0f64).powi(2) * p.ctx.bracket(3.0) * p.bracket_n.powi(2));
        assert_relative_eq!(b.lower, expect, max_relative = 1e-14);
        assert_relative_eq!(b.upper, expect, max_relative = 1e-14);
    }

    #[test]
    fn bounds_bracket_series() {
        let p = params(0.9, 1.0, 10, 1.0, 2.0);
        let kernel = Kernel::new(p);
        for x in [0.2, 1.0, 1.5] {
            let w = kernel.weights(x, 1e-13).unwrap();
            for j in 2..=4 {
                let f = Polynomial::monomial(j as usize);
                let v = TOperator::new(&kernel, &f, CellRule::Jackson, 1e-13).apply(&w);
                assert_relative_eq!(v, moment_T_exact(j, &kernel, &w), max_relative = 1e-10);
                assert!(moment_T_bounds(j, x, &p).unwrap().contains(v, 1e-9), "j={j} x={x}");
                let d = kernel_moment(j, &kernel, &w);
                assert!(d_moment_bounds(j, x, &p).unwrap().contains(d, 1e-9));
            }
            for j in [2, 4] {
                let c = central_moment_T_exact(j, &kernel, &w);
                assert!(c <= central_moment_bound(j, x, &p).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn phi_is_central_bound() {
        let p = params(0.9, 1.0, 10, 1.0, 2.0);
        assert_eq!(phi_n(1.0, &p), central_moment_bound(2, 1.0, &p).unwrap());
        let pn = |n: u32| {
            let q = 1.0 - 1.0 / (n as f64 + 1.0);
            phi_n(1.0, &params(q, 1.0, n, 0.0, 0.0))
        };
        assert!(pn(10) > pn(50) && pn(50) > pn(200));
    }
}
