//! The operators `D_{n,q}` and `T*_{n,q}` together with their moments.
//!
//! ```text
//! D(f;x)  = sum_k w_k(x) f([k + 2 mu theta_k]_q / [n]_q)
//! T*(f;x) = [n]_q sum_k w_k(x) int_{cell_k} f((n t + alpha)/(n + beta)) d_q t
//! w_k(x)  = ([n]_q x)^k / (gamma_{mu,q}(k) e_{mu,q}([n]_q x))
//! ```
//!
//! Both exist only for `0 <= x < 1/(1 - q^n)`, the disc of convergence of
//! `e_{mu,q}([n]_q x)`.

mod functions;
mod kernel;
mod moments;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{QContext, Warning};

pub use functions::{FunctionMeta, Integrand, TestFunction};
pub use kernel::{apply_d, eval_d, eval_t, eval_t_with, CellRule, Kernel, KernelWeights, TOperator};
pub use moments::{
    central_moment_T1, central_moment_T_exact, central_moment_bound, d_moment_bounds, kernel_moment,
    kernel_moment_bounds, moment_T1, moment_T_bounds, moment_T_exact, phi_n, t_moment_from_kernel, MomentBounds,
};

/// Degree and Stancu shift of the operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StancuParams {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    pub ctx: QContext,
    pub bracket_n: f64,
}

impl StancuParams {
    pub fn new(ctx: QContext, n: u32, alpha: f64, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n", 0.0, "must be a positive integer"));
        }
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::domain("alpha", alpha, "must be finite and >= 0"));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::domain("beta", beta, "must be finite and >= 0"));
        }
        Ok(Self {
            n,
            alpha,
            beta,
            ctx,
            bracket_n: ctx.bracket(n as f64),
        })
    }

    /// `sigma(t) = (n t + alpha) / (n + beta)`.
    pub fn shift(&self, t: f64) -> f64 {
        (self.n as f64 * t + self.alpha) / (self.n as f64 + self.beta)
    }

    /// Slope `n/(n+beta)` and intercept `alpha/(n+beta)` of the shift.
    pub fn shift_coefficients(&self) -> (f64, f64) {
        let d = self.n as f64 + self.beta;
        (self.n as f64 / d, self.alpha / d)
    }

    /// Supremum of admissible `x`: `1/(1 - q^n)`.
    pub fn convergence_radius(&self) -> f64 {
        1.0 / ((1.0 - self.ctx.q()) * self.bracket_n)
    }

    pub fn check_domain(&self, x: f64) -> Result<()> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::domain("x", x, "must be finite and >= 0"));
        }
        let radius = self.convergence_radius();
        if x >= radius {
            return Err(Error::Divergent { x, radius });
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<Warning> {
        let mut w = self.ctx.warnings();
        if self.alpha > self.beta {
            w.push(Warning::AlphaExceedsBeta);
        }
        w
    }
}
