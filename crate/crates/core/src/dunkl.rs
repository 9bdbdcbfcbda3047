//! Dunkl coefficients and Dunkl q-exponentials.
//!
//! The q-coefficients obey
//! `gamma_{mu,q}(k+1) = [k + 1 + 2 mu theta_{k+1}]_q * gamma_{mu,q}(k)`,
//! `gamma_{mu,q}(0) = 1`, which is taken as the definition. The closed
//! product formula is kept only as a cross-check.

use std::sync::Arc;

use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::qcore::{q_pochhammer_in_base, Order, QContext, MAX_TERMS};

/// Parity indicator: 0 for even `k`, 1 for odd `k`.
pub fn theta(k: usize) -> u8 {
    (k % 2) as u8
}

/// Step of the recursion, `[k + 2 mu theta_k]_q`, for `k >= 1`.
///
/// For `k = 0` this is `[0]_q = 0`, which is also the node `A_0` used by the
/// operators.
pub fn step_bracket(k: usize, ctx: &QContext) -> f64 {
    ctx.bracket(k as f64 + 2.0 * ctx.mu() * theta(k) as f64)
}

/// Cached `gamma_{mu,q}(k)` for `k = 0..=k_max`.
///
/// The table is immutable; growing it produces a new value that shares
/// nothing mutable with the old one, so clones may be read from any thread.
#[derive(Debug, Clone)]
pub struct GammaTable {
    ctx: QContext,
    ln_values: Arc<Vec<f64>>,
}

impl GammaTable {
    pub fn new(ctx: QContext, k_max: usize) -> Self {
        let mut ln_values = Vec::with_capacity(k_max + 1);
        ln_values.push(0.0);
        let mut acc = 0.0;
        for k in 1..=k_max {
            acc += step_bracket(k, &ctx).ln();
            ln_values.push(acc);
        }
        Self {
            ctx,
            ln_values: Arc::new(ln_values),
        }
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn k_max(&self) -> usize {
        self.ln_values.len() - 1
    }

    /// A table covering at least `k`, growing capacity geometrically.
    pub fn extended(&self, k: usize) -> Self {
        if k <= self.k_max() {
            return self.clone();
        }
        let target = k.max(2 * self.k_max().max(8));
        let mut ln_values = Vec::with_capacity(target + 1);
        ln_values.extend_from_slice(&self.ln_values);
        let mut acc = *ln_values.last().unwrap();
        for j in ln_values.len()..=target {
            acc += step_bracket(j, &self.ctx).ln();
            ln_values.push(acc);
        }
        Self {
            ctx: self.ctx,
            ln_values: Arc::new(ln_values),
        }
    }

    /// `ln gamma_{mu,q}(k)` if cached.
    pub fn ln_get(&self, k: usize) -> Option<f64> {
        self.ln_values.get(k).copied()
    }

    /// `gamma_{mu,q}(k)` if cached; overflow is reported as an error.
    pub fn get(&self, k: usize) -> Option<Result<f64>> {
        self.ln_get(k).map(|ln| {
            let v = ln.exp();
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Overflow { k })
            }
        })
    }

    /// `ln gamma_{mu,q}(k)` for `k = 0, 1, 2, ...` without bound: cached
    /// entries first, then the recursion continued on the fly.
    pub fn ln_values(&self) -> impl Iterator<Item = f64> + '_ {
        let cached = self.ln_values.iter().copied();
        let mut acc = *self.ln_values.last().unwrap();
        let mut k = self.k_max();
        let ctx = self.ctx;
        cached.chain(std::iter::from_fn(move || {
            k += 1;
            acc += step_bracket(k, &ctx).ln();
            Some(acc)
        }))
    }
}

/// `gamma_{mu,q}(k)`, extending the table when `k` exceeds its capacity.
pub fn gamma_q(k: usize, table: &mut GammaTable) -> Result<f64> {
    if k > table.k_max() {
        *table = table.extended(k);
    }
    table.get(k).expect("table was extended to cover k")
}

/// Closed product form
/// `(q^{2mu+1}; q^2)_{ceil(k/2)} (q^2; q^2)_{floor(k/2)} / (1-q)^k`.
pub fn gamma_q_product(k: usize, ctx: &QContext) -> f64 {
    let q = ctx.q();
    let odd = q_pochhammer_in_base(ctx.pow(2.0 * ctx.mu() + 1.0), Order::Finite(k.div_ceil(2)), q * q, 0.0);
    let even = q_pochhammer_in_base(q * q, Order::Finite(k / 2), q * q, 0.0);
    odd.value * even.value / (1.0 - q).powi(k as i32)
}

/// Classical coefficient through `gamma_mu(k+1) = (k + 1 + 2 mu theta_{k+1}) gamma_mu(k)`.
pub fn gamma_classical_recursion(k: usize, mu: f64) -> f64 {
    (1..=k).map(|j| j as f64 + 2.0 * mu * theta(j) as f64).product()
}

/// Classical coefficient through the Gamma-function formulas
/// `gamma_mu(2m) = 2^{2m} m! Gamma(m + mu + 1/2) / Gamma(mu + 1/2)` and
/// `gamma_mu(2m+1) = 2^{2m+1} m! Gamma(m + mu + 3/2) / Gamma(mu + 1/2)`.
pub fn gamma_classical_closed(k: usize, mu: f64) -> f64 {
    let m = (k / 2) as f64;
    let shift = if k.is_multiple_of(2) { 0.5 } else { 1.5 };
    let ln = k as f64 * std::f64::consts::LN_2 + ln_gamma(m + 1.0) + ln_gamma(m + mu + shift) - ln_gamma(mu + 0.5);
    if k < 30 && mu + 0.5 > 0.0 {
        // direct Gamma values avoid the log round trip for small k
        let fact = gamma(m + 1.0);
        2f64.powi(k as i32) * fact * gamma(m + mu + shift) / gamma(mu + 0.5)
    } else {
        ln.exp()
    }
}

/// Classical Dunkl coefficient `gamma_mu(k)`, evaluated by both the recursion
/// and the Gamma formulas; they must agree to `1e-12` relative.
pub fn gamma_classical(k: usize, mu: f64) -> Result<f64> {
    if !(mu > -0.5) {
        return Err(Error::domain("mu", mu, "must satisfy mu > -1/2"));
    }
    let rec = gamma_classical_recursion(k, mu);
    let closed = gamma_classical_closed(k, mu);
    if ((rec - closed) / rec).abs() > 1e-12 {
        return Err(Error::CrossCheck {
            what: "gamma_mu recursion vs Gamma formula",
            first: rec,
            second: closed,
        });
    }
    Ok(rec)
}

/// Value of a Dunkl q-exponential series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    /// Natural log of the sum; finite even when the sum itself overflows.
    pub ln_value: f64,
    /// Index of the last term included.
    pub truncation_index: usize,
    /// Bound on the omitted tail relative to the sum.
    pub relative_tail: f64,
}

impl SeriesValue {
    pub fn value(&self) -> Result<f64> {
        let v = self.ln_value.exp();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow {
                k: self.truncation_index,
            })
        }
    }
}

/// Running log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    pub(crate) fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub(crate) fn add(&mut self, ln_term: f64) {
        if ln_term <= self.max {
            self.scaled += (ln_term - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - ln_term).exp() + 1.0;
            self.max = ln_term;
        }
    }

    pub(crate) fn ln(&self) -> f64 {
        self.max + self.scaled.ln()
    }
}

/// Radius of convergence in `x` of `sum x^k / gamma_{mu,q}(k)`.
pub fn e_mu_q_radius(ctx: &QContext) -> f64 {
    1.0 / (1.0 - ctx.q())
}

/// Log-terms `ln(x^k q^{k(k-1)/2 * damped} / gamma_{mu,q}(k))` of a Dunkl
/// q-exponential, truncated by the geometric tail bound. Calls `visit` for
/// every term and returns the series summary.
pub(crate) fn walk_series(
    x: f64,
    table: &GammaTable,
    tol: f64,
    damped: bool,
    mut visit: impl FnMut(usize, f64),
) -> Result<SeriesValue> {
    let ctx = *table.ctx();
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("x", x, "Dunkl exponential needs finite x >= 0"));
    }
    if !damped && x >= e_mu_q_radius(&ctx) {
        return Err(Error::Divergent {
            x,
            radius: e_mu_q_radius(&ctx),
        });
    }
    visit(0, 0.0);
    if x == 0.0 {
        return Ok(SeriesValue {
            ln_value: 0.0,
            truncation_index: 0,
            relative_tail: 0.0,
        });
    }
    let ln_x = x.ln();
    let ln_q = ctx.ln_q();
    // every later step bracket is at least [k + 1 + min(2mu, 0)]_q
    let mu_floor = (2.0 * ctx.mu()).min(0.0);
    let mut sum = LogSum::new();
    sum.add(0.0);
    let mut ln_gammas = table.ln_values().skip(1);
    let mut k = 0usize;
    let mut ln_term = 0.0;
    loop {
        let mut ln_ratio_bound = ln_x - ctx.bracket(k as f64 + 1.0 + mu_floor).ln();
        if damped {
            ln_ratio_bound += k as f64 * ln_q;
        }
        if ln_ratio_bound < 0.0 {
            let r = ln_ratio_bound.exp();
            let ln_tail = ln_term + (r / (1.0 - r)).ln();
            let rel = (ln_tail - sum.ln()).exp();
            if rel <= tol {
                return Ok(SeriesValue {
                    ln_value: sum.ln(),
                    truncation_index: k,
                    relative_tail: rel,
                });
            }
        }
        k += 1;
        if k > MAX_TERMS {
            return Err(Error::NoConvergence { terms: k });
        }
        let ln_gamma = ln_gammas.next().expect("unbounded iterator");
        ln_term = k as f64 * ln_x - ln_gamma;
        if damped {
            ln_term += 0.5 * (k as f64) * (k as f64 - 1.0) * ln_q;
        }
        sum.add(ln_term);
        visit(k, ln_term);
    }
}

/// `e_{mu,q}(x) = sum_n x^n / gamma_{mu,q}(n)` for `0 <= x < 1/(1-q)`.
pub fn e_mu_q(x: f64, table: &GammaTable, tol: f64) -> Result<SeriesValue> {
    walk_series(x, table, tol, false, |_, _| {})
}

/// `E_{mu,q}(x) = sum_n q^{n(n-1)/2} x^n / gamma_{mu,q}(n)`, entire in `x`.
pub fn big_e_mu_q(x: f64, table: &GammaTable, tol: f64) -> Result<SeriesValue> {
    walk_series(x, table, tol, true, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table(q: f64, mu: f64) -> GammaTable {
        GammaTable::new(QContext::new(q, mu).unwrap(), 16)
    }

    #[test]
    fn theta_parity() {
        assert_eq!(theta(0), 0);
        assert_eq!(theta(7), 1);
        assert_eq!(theta(12), 0);
    }

    #[test]
    fn gamma_q_examples() {
        let mut t = table(0.5, 1.0);
        assert_eq!(gamma_q(0, &mut t).unwrap(), 1.0);
        assert_relative_eq!(gamma_q(1, &mut t).unwrap(), 1.75, max_relative = 1e-14);
        assert_relative_eq!(gamma_q(2, &mut t).unwrap(), 2.625, max_relative = 1e-14);
    }

    #[test]
    fn table_auto_extends() {
        let mut t = table(0.9, 0.75);
        let v = gamma_q(100, &mut t).unwrap();
        assert!(t.k_max() >= 100);
        assert_relative_eq!(v.ln(), t.ln_get(100).unwrap(), max_relative = 1e-15);
        let lazy: Vec<f64> = table(0.9, 0.75).ln_values().take(101).collect();
        assert_relative_eq!(lazy[100], t.ln_get(100).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn overflow_reports_index() {
        let mut t = GammaTable::new(QContext::new(0.999, 2.0).unwrap(), 0);
        match gamma_q(400, &mut t) {
            Err(Error::Overflow { k }) => assert_eq!(k, 400),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn product_formula_cross_check() {
        for &(q, mu) in &[(0.3, 0.75), (0.5, 1.0), (0.9, 2.0), (0.7, 0.2)] {
            let mut t = table(q, mu);
            let ctx = *t.ctx();
            for k in 0..40 {
                assert_relative_eq!(
                    gamma_q(k, &mut t).unwrap(),
                    gamma_q_product(k, &ctx),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn classical_examples() {
        assert_eq!(gamma_classical(0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(gamma_classical(1, 1.0).unwrap(), 3.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_classical(2, 1.0).unwrap(), 6.0, max_relative = 1e-14);
        for k in 0..40 {
            for &mu in &[-0.3, 0.0, 0.75, 1.0, 2.0, 3.3] {
                gamma_classical(k, mu).unwrap();
            }
        }
    }

    #[test]
    fn dunkl_exponentials() {
        let t = table(0.5, 1.0);
        assert_eq!(e_mu_q(0.0, &t, 1e-12).unwrap().value().unwrap(), 1.0);
        assert_eq!(big_e_mu_q(0.0, &t, 1e-12).unwrap().value().unwrap(), 1.0);
        let e1 = e_mu_q(1.0, &t, 1e-12).unwrap().value().unwrap();
        let e2 = e_mu_q(1.9, &t, 1e-12).unwrap().value().unwrap();
        assert!(e2 > e1 && e1 > 1.0);
        let big1 = big_e_mu_q(1.0, &t, 1e-12).unwrap().value().unwrap();
        assert!(big1 < e1);
        assert!(matches!(e_mu_q(2.0, &t, 1e-12), Err(Error::Divergent { .. })));
        let big = big_e_mu_q(3.0, &table(0.9, 0.75), 1e-12).unwrap().value().unwrap();
        assert!(big.is_finite() && big > 0.0);
    }

    #[test]
    fn log_sum_matches_direct() {
        let mut s = LogSum::new();
        let terms = [0.0f64, -1.0, 2.0, 0.5, -30.0];
        for t in terms {
            s.add(t);
        }
        let direct: f64 = terms.iter().map(|t| t.exp()).sum();
        assert_relative_eq!(s.ln(), direct.ln(), max_relative = 1e-15);
    }
}
