//! Jackson q-integrals, the operator cells and exact integrals of polynomials.
//!
//! `int_0^a f d_q t = (1-q) a sum_{j>=0} q^j f(a q^j)` and
//! `int_a^b = int_0^b - int_0^a`.

use crate::dunkl::step_bracket;
use crate::error::{Error, Result};
use crate::qcore::{QContext, MAX_TERMS};

/// Integration cell `[q A_k / [n]_q, [k+1+2 mu theta_k]_q / [n]_q]` with
/// `A_k = [k + 2 mu theta_k]_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QCell {
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
    pub ctx: QContext,
    pub n_index: u32,
    /// `A_k = [k + 2 mu theta_k]_q`.
    pub node_bracket: f64,
    /// `[n]_q`.
    pub bracket_n: f64,
}

impl QCell {
    pub fn new(k: usize, ctx: &QContext, n_index: u32) -> Self {
        let a = step_bracket(k, ctx);
        let bracket_n = ctx.bracket(n_index as f64);
        let q = ctx.q();
        // [k + 1 + 2 mu theta_k]_q = 1 + q [k + 2 mu theta_k]_q
        Self {
            k,
            lower: q * a / bracket_n,
            upper: (1.0 + q * a) / bracket_n,
            ctx: *ctx,
            n_index,
            node_bracket: a,
            bracket_n,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Jackson integral of `f` over `[0, a]`.
///
/// The sum stops once `a q^{j+1}` times the largest of the last three sampled
/// `|f|` drops below `tol (1 + |sum|)`; since every `f` used here is
/// continuous at 0 this bounds the tail up to the variation of `f` near 0.
pub fn jackson_integral_zero(f: impl Fn(f64) -> f64, a: f64, ctx: &QContext, tol: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = ctx.q();
    let mut sum = 0.0;
    let mut point = a;
    let mut recent = [0.0f64; 3];
    for j in 0..MAX_TERMS {
        let v = f(point);
        sum += point * v;
        recent[j % 3] = v.abs();
        point *= q;
        if j >= 2 {
            let m = recent[0].max(recent[1]).max(recent[2]);
            if point * m < tol * (1.0 + ((1.0 - q) * sum).abs()) || point == 0.0 {
                break;
            }
        }
    }
    (1.0 - q) * sum
}

/// Jackson integral of `f` over a cell, as the difference of the two
/// integrals from 0.
pub fn jackson_integral(f: impl Fn(f64) -> f64, cell: &QCell, tol: f64) -> f64 {
    jackson_integral_zero(&f, cell.upper, &cell.ctx, tol) - jackson_integral_zero(&f, cell.lower, &cell.ctx, tol)
}

/// Jackson integral over `[a, b]` summed as the single series
/// `(1-q) sum_j q^j (b f(b q^j) - a f(a q^j))`.
pub fn jackson_integral_between(f: impl Fn(f64) -> f64, a: f64, b: f64, ctx: &QContext, tol: f64) -> f64 {
    let q = ctx.q();
    let mut sum = 0.0;
    let (mut pa, mut pb) = (a, b);
    let mut recent = [0.0f64; 3];
    for j in 0..MAX_TERMS {
        let (fa, fb) = (f(pa), f(pb));
        sum += pb * fb - pa * fa;
        recent[j % 3] = fa.abs().max(fb.abs());
        pa *= q;
        pb *= q;
        if j >= 2 {
            let m = recent[0].max(recent[1]).max(recent[2]);
            if pa.abs().max(pb.abs()) * m < tol * (1.0 + ((1.0 - q) * sum).abs()) || pb == 0.0 {
                break;
            }
        }
    }
    (1.0 - q) * sum
}

/// Exact `int_cell t^p d_q t` for `p <= 4`:
/// `sum_{i<=p} C(p+1, i) q^i A^i / ([p+1]_q [n]_q^{p+1})`.
pub fn monomial_cell_integral(p: u32, cell: &QCell) -> Result<f64> {
    if p > 4 {
        return Err(Error::domain("p", p as f64, "closed form is available for p <= 4"));
    }
    Ok(monomial_cell_integral_any(p, cell))
}

fn monomial_cell_integral_any(p: u32, cell: &QCell) -> f64 {
    let qa = cell.ctx.q() * cell.node_bracket;
    // (1 + qA)^{p+1} - (qA)^{p+1}, expanded so that no cancellation occurs
    let mut binom = 1.0;
    let mut numer = 0.0;
    let mut pow = 1.0;
    for i in 0..=p {
        numer += binom * pow;
        binom = binom * (p + 1 - i) as f64 / (i + 1) as f64;
        pow *= qa;
    }
    numer / (cell.ctx.bracket(p as f64 + 1.0) * cell.bracket_n.powi(p as i32 + 1))
}

/// Real polynomial with coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(p: usize) -> Self {
        let mut coeffs = vec![0.0; p + 1];
        coeffs[p] = 1.0;
        Self { coeffs }
    }

    /// `(t - x)^p`.
    pub fn centered_power(x: f64, p: usize) -> Self {
        let base = Self::new(vec![-x, 1.0]);
        (0..p).fold(Self::constant(1.0), |acc, _| acc.mul(&base))
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == 0.0 {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| self.coeffs.get(i).unwrap_or(&0.0) + other.coeffs.get(i).unwrap_or(&0.0))
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    /// `t -> p(scale t + shift)`.
    pub fn compose_affine(&self, scale: f64, shift: f64) -> Self {
        let inner = Self::new(vec![shift, scale]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::constant(0.0), |acc, &c| acc.mul(&inner).add(&Self::constant(c)))
    }

    /// Exact Jackson integral over `[0, a]`: `sum_p c_p a^{p+1} / [p+1]_q`.
    pub fn jackson_zero(&self, a: f64, ctx: &QContext) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(p, c)| c * a.powi(p as i32 + 1) / ctx.bracket(p as f64 + 1.0))
            .sum()
    }

    /// Exact Jackson integral over a cell, term by term from the cell closed form.
    pub fn jackson_cell(&self, cell: &QCell) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(p, c)| c * monomial_cell_integral_any(p as u32, cell))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx(q: f64, mu: f64) -> QContext {
        QContext::new(q, mu).unwrap()
    }

    #[test]
    fn integral_from_zero_examples() {
        let c = ctx(0.5, 1.0);
        assert_relative_eq!(
            jackson_integral_zero(|_| 1.0, 0.7, &c, 1e-15),
            0.7,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            jackson_integral_zero(|t| t, 1.0, &c, 1e-15),
            1.0 / 1.5,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            jackson_integral_zero(|t| t * t, 1.0, &c, 1e-15),
            1.0 / 1.75,
            max_relative = 1e-14
        );
        assert_eq!(jackson_integral_zero(|t| t.exp(), 0.0, &c, 1e-15), 0.0);
    }

    #[test]
    fn cell_width_and_constant() {
        let c = ctx(0.9, 1.0);
        for k in 0..20 {
            let cell = QCell::new(k, &c, 10);
            assert!((cell.width() - 1.0 / cell.bracket_n).abs() < 1e-14);
            assert_relative_eq!(
                jackson_integral(|_| 1.0, &cell, 1e-14),
                1.0 / cell.bracket_n,
                max_relative = 1e-12
            );
        }
        let cell = QCell::new(0, &c, 10);
        assert_relative_eq!(
            jackson_integral(|t| t, &cell, 1e-15),
            1.0 / (c.bracket(2.0) * cell.bracket_n.powi(2)),
            max_relative = 1e-12
        );
    }

    #[test]
    fn closed_forms_match_numeric() {
        let c = ctx(0.5, 1.0);
        let cell = QCell::new(2, &c, 5);
        assert_relative_eq!(
            jackson_integral(|t| t.powi(3), &cell, 1e-15),
            monomial_cell_integral(3, &cell).unwrap(),
            max_relative = 1e-11
        );
        let cell = QCell::new(1, &c, 4);
        assert_relative_eq!(
            jackson_integral(|t| t.powi(4), &cell, 1e-15),
            monomial_cell_integral(4, &cell).unwrap(),
            max_relative = 1e-11
        );
        let cell0 = QCell::new(0, &c, 7);
        assert_relative_eq!(
            monomial_cell_integral(2, &cell0).unwrap(),
            1.0 / (c.bracket(3.0) * cell0.bracket_n.powi(3)),
            max_relative = 1e-14
        );
        assert!(monomial_cell_integral(5, &cell0).is_err());
    }

    #[test]
    fn polynomial_algebra() {
        let p = Polynomial::new(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        let composed = p.compose_affine(0.5, 1.0);
        for t in [0.0, 0.3, 2.0] {
            assert_relative_eq!(composed.eval(t), p.eval(0.5 * t + 1.0), max_relative = 1e-14);
        }
        let centered = Polynomial::centered_power(1.5, 4);
        assert_relative_eq!(centered.eval(2.0), 0.0625, max_relative = 1e-14);
        let c = ctx(0.7, 0.75);
        let cell = QCell::new(3, &c, 9);
        assert_relative_eq!(
            p.jackson_cell(&cell),
            jackson_integral(|t| p.eval(t), &cell, 1e-16),
            max_relative = 1e-11
        );
        assert_relative_eq!(
            p.jackson_zero(1.3, &c),
            jackson_integral_zero(|t| p.eval(t), 1.3, &c, 1e-16),
            max_relative = 1e-12
        );
    }
}
