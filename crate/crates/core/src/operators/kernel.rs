use rayon::prelude::*;

use super::{Integrand, StancuParams};
use crate::dunkl::{step_bracket, walk_series, GammaTable};
use crate::error::Result;
use crate::qintegral::{jackson_integral, Polynomial, QCell};

/// Weights below this are dropped from the front of the window; the mass lost
/// is at most `K * DROP`.
const DROP: f64 = 1e-20;

/// Operator data that does not depend on `x`: parameters and `gamma` cache.
#[derive(Debug, Clone)]
pub struct Kernel {
    params: StancuParams,
    table: GammaTable,
}

/// Normalized weights `w_k(x)` for `k` in `start..=truncation_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    pub x: f64,
    /// `[n]_q x`.
    pub y: f64,
    pub start: usize,
    pub values: Vec<f64>,
    pub truncation_index: usize,
    /// Bound on the omitted tail mass.
    pub tail_mass: f64,
    /// `ln e_{mu,q}([n]_q x)`.
    pub ln_normalizer: f64,
}

impl KernelWeights {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &w)| (self.start + i, w))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn k_max(&self) -> usize {
        self.start + self.values.len() - 1
    }
}

impl Kernel {
    pub fn new(params: StancuParams) -> Self {
        Self {
            table: GammaTable::new(params.ctx, 64),
            params,
        }
    }

    pub fn params(&self) -> &StancuParams {
        &self.params
    }

    pub fn table(&self) -> &GammaTable {
        &self.table
    }

    /// `w_k(x)`, truncated once the remaining mass is below `tol`.
    pub fn weights(&self, x: f64, tol: f64) -> Result<KernelWeights> {
        self.params.check_domain(x)?;
        let y = self.params.bracket_n * x;
        let mut ln_terms = Vec::new();
        let series = walk_series(y, &self.table, tol, false, |_, t| ln_terms.push(t))?;
        let ln_e = series.ln_value;
        let ln_drop = DROP.ln();
        let start = ln_terms.iter().position(|&t| t - ln_e >= ln_drop).unwrap_or(0);
        let values = ln_terms[start..].iter().map(|&t| (t - ln_e).exp()).collect();
        Ok(KernelWeights {
            x,
            y,
            start,
            values,
            truncation_index: series.truncation_index,
            tail_mass: series.relative_tail,
            ln_normalizer: ln_e,
        })
    }

    /// Node `[k + 2 mu theta_k]_q / [n]_q` of `D_{n,q}`.
    pub fn node(&self, k: usize) -> f64 {
        step_bracket(k, &self.params.ctx) / self.params.bracket_n
    }

    pub fn cell(&self, k: usize) -> QCell {
        QCell::new(k, &self.params.ctx, self.params.n)
    }
}

/// `D_{n,q}(f; x)` from precomputed weights.
pub fn apply_d(f: &(impl Integrand + ?Sized), kernel: &Kernel, w: &KernelWeights) -> f64 {
    w.iter().map(|(k, wk)| wk * f.value(kernel.node(k))).sum()
}

/// `D_{n,q}(f; x)`.
pub fn eval_d(f: &(impl Integrand + ?Sized), x: f64, params: &StancuParams, tol: f64) -> Result<f64> {
    let kernel = Kernel::new(*params);
    let w = kernel.weights(x, tol)?;
    Ok(apply_d(f, &kernel, &w))
}

/// How the cell integrals of `T*` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CellRule {
    /// Closed form for polynomial integrands, truncated Jackson sum otherwise.
    #[default]
    Auto,
    /// Always the truncated Jackson sum.
    Jackson,
}

/// `T*_{n,q}` applied to one function, caching the `x`-independent values
/// `[n]_q int_{cell_k} f(sigma(t)) d_q t`.
pub struct TOperator<'a, F: Integrand + ?Sized> {
    kernel: &'a Kernel,
    f: &'a F,
    shifted: Option<Polynomial>,
    tol: f64,
    cells: Vec<f64>,
}

impl<'a, F: Integrand + ?Sized> TOperator<'a, F> {
    pub fn new(kernel: &'a Kernel, f: &'a F, rule: CellRule, tol: f64) -> Self {
        let shifted = match rule {
            CellRule::Auto => f.polynomial().map(|p| {
                let (scale, shift) = kernel.params.shift_coefficients();
                p.compose_affine(scale, shift)
            }),
            CellRule::Jackson => None,
        };
        Self {
            kernel,
            f,
            shifted,
            tol,
            cells: Vec::new(),
        }
    }

    pub fn kernel(&self) -> &Kernel {
        self.kernel
    }

    fn cell_value(&self, k: usize) -> f64 {
        let cell = self.kernel.cell(k);
        let bn = self.kernel.params.bracket_n;
        let integral = match &self.shifted {
            Some(p) => p.jackson_cell(&cell),
            None => {
                let params = &self.kernel.params;
                let tol = (0.1 * self.tol / bn).max(1e-17);
                jackson_integral(|t| self.f.value(params.shift(t)), &cell, tol)
            }
        };
        bn * integral
    }

    /// Fill the cache for `k <= k_max`.
    pub fn prepare(&mut self, k_max: usize) {
        let from = self.cells.len();
        if k_max < from {
            return;
        }
        let this = &*self;
        let fresh: Vec<f64> = (from..=k_max).into_par_iter().map(|k| this.cell_value(k)).collect();
        self.cells.extend(fresh);
    }

    /// `T*(f; x)` from weights, computing any uncached cells on the fly.
    pub fn apply(&self, w: &KernelWeights) -> f64 {
        w.iter()
            .map(|(k, wk)| {
                let c = match self.cells.get(k) {
                    Some(&c) => c,
                    None => self.cell_value(k),
                };
                wk * c
            })
            .sum()
    }

    /// Like [`apply`](Self::apply) but caches every cell it touches.
    pub fn apply_cached(&mut self, w: &KernelWeights) -> f64 {
        self.prepare(w.k_max());
        self.apply(w)
    }
}

/// `T*_{n,q}(f; x)` with closed-form cells where available.
pub fn eval_t(f: &(impl Integrand + ?Sized), x: f64, params: &StancuParams, tol: f64) -> Result<f64> {
    eval_t_with(f, x, params, CellRule::Auto, tol)
}

pub fn eval_t_with(
    f: &(impl Integrand + ?Sized),
    x: f64,
    params: &StancuParams,
    rule: CellRule,
    tol: f64,
) -> Result<f64> {
    let kernel = Kernel::new(*params);
    let w = kernel.weights(x, tol)?;
    Ok(TOperator::new(&kernel, f, rule, tol).apply(&w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::operators::TestFunction;
    use crate::qcore::QContext;
    use approx::assert_relative_eq;

    fn params(q: f64, mu: f64, n: u32, alpha: f64, beta: f64) -> StancuParams {
        StancuParams::new(QContext::new(q, mu).unwrap(), n, alpha, beta).unwrap()
    }

    #[test]
    fn weights_examples() {
        let k = Kernel::new(params(0.5, 1.0, 5, 0.0, 0.0));
        let w0 = k.weights(0.0, 1e-12).unwrap();
        assert_eq!(w0.values, vec![1.0]);
        let w = k.weights(1.0, 1e-12).unwrap();
        assert!((w.sum() - 1.0).abs() < 1e-12);
        assert!(w.values.iter().all(|&v| v >= 0.0));
        let far = Kernel::new(params(0.9, 1.0, 50, 0.0, 0.0));
        assert!(matches!(far.weights(4.0, 1e-12), Err(Error::Divergent { .. })));
        let near = far.weights(0.99 * far.params().convergence_radius(), 1e-12).unwrap();
        assert!(*near.values.last().unwrap() < 1e-12);
        assert!((near.sum() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn d_reproduces_linear_functions() {
        let p = params(0.9, 1.0, 10, 0.0, 0.0);
        assert_relative_eq!(
            eval_d(&|_: f64| 1.0, 1.3, &p, 1e-13).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert!((eval_d(&|t: f64| t, 0.8, &p, 1e-13).unwrap() - 0.8).abs() < 1e-9);
    }

    #[test]
    fn t_of_constant_and_identity() {
        let p = params(0.9, 1.0, 10, 1.0, 2.0);
        let one = TestFunction::constant();
        assert!((eval_t(&one, 1.2, &p, 1e-13).unwrap() - 1.0).abs() < 1e-10);
        let jack = eval_t_with(&one, 1.2, &p, CellRule::Jackson, 1e-13).unwrap();
        assert!((jack - 1.0).abs() < 1e-10);
        let p0 = params(0.9, 1.0, 10, 0.0, 0.0);
        let v = eval_t(&TestFunction::Monomial { p: 1 }, 0.0, &p0, 1e-13).unwrap();
        let q = 0.9f64;
        assert_relative_eq!(v, 1.0 / ((1.0 + q) * p0.bracket_n), max_relative = 1e-12);
    }

    #[test]
    fn closed_and_numeric_cells_agree() {
        let p = params(0.9, 0.75, 20, 1.0, 2.0);
        let kernel = Kernel::new(p);
        let f = TestFunction::Monomial { p: 3 };
        let exact = TOperator::new(&kernel, &f, CellRule::Auto, 1e-13);
        let numeric = TOperator::new(&kernel, &f, CellRule::Jackson, 1e-13);
        for x in [0.0, 0.3, 0.9] {
            let w = kernel.weights(x, 1e-13).unwrap();
            assert_relative_eq!(exact.apply(&w), numeric.apply(&w), max_relative = 1e-10);
        }
    }

    #[test]
    fn cache_is_transparent() {
        let p = params(0.8, 1.0, 15, 0.5, 1.0);
        let kernel = Kernel::new(p);
        let f = TestFunction::Sine;
        let mut cached = TOperator::new(&kernel, &f, CellRule::Auto, 1e-12);
        let fresh = TOperator::new(&kernel, &f, CellRule::Auto, 1e-12);
        let w = kernel.weights(1.0, 1e-12).unwrap();
        assert_eq!(cached.apply_cached(&w), fresh.apply(&w));
    }
}
