//! Grid estimates of the moduli of continuity and of Hoelder constants.
//!
//! All suprema are taken over a uniform grid plus a few exact offset probes,
//! so every value here is a lower estimate of the continuum supremum.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::Integrand;

/// Uniform grid on `[0, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainGrid {
    pub x_max: f64,
    pub points: usize,
    /// Finest separation probed by the offset discretizations.
    pub h_min: f64,
}

/// Cap on the number of offsets tried by the second-order modulus.
const MAX_OFFSETS: usize = 400;

impl DomainGrid {
    pub fn new(x_max: f64, points: usize) -> Result<Self> {
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(Error::domain("x_max", x_max, "must be finite and > 0"));
        }
        if points < 2 {
            return Err(Error::domain("points", points as f64, "a grid needs at least 2 points"));
        }
        let spacing = x_max / (points - 1) as f64;
        Ok(Self {
            x_max,
            points,
            h_min: spacing / 10.0,
        })
    }

    pub fn spacing(&self) -> f64 {
        self.x_max / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.x_max
        } else {
            i as f64 * self.spacing()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.x(i)).collect()
    }

    /// Same interval with `factor` times as many intervals.
    pub fn refined(&self, factor: usize) -> Self {
        let points = (self.points - 1) * factor + 1;
        Self {
            x_max: self.x_max,
            points,
            h_min: self.h_min / factor as f64,
        }
    }
}

fn sample(f: &(impl Integrand + ?Sized), grid: &DomainGrid) -> Vec<f64> {
    grid.xs().into_iter().map(|x| f.value(x)).collect()
}

/// `omega(f, delta) = sup_{|y-x| <= delta} |f(y) - f(x)|` over grid pairs and
/// the exact probes `(x_i, x_i + delta)`.
pub fn modulus(f: &(impl Integrand + ?Sized), delta: f64, grid: &DomainGrid) -> f64 {
    assert!(delta > 0.0, "delta must be positive");
    let v = sample(f, grid);
    let h = grid.spacing();
    let w = ((delta / h) * (1.0 + 1e-12)).floor() as usize;
    let mut best = sliding_range(&v, w.min(v.len() - 1));
    for (i, &fx) in v.iter().enumerate() {
        best = best.max((f.value(grid.x(i) + delta) - fx).abs());
    }
    best
}

/// Largest `max - min` over all windows of `w + 1` consecutive values.
fn sliding_range(v: &[f64], w: usize) -> f64 {
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        while maxq.back().is_some_and(|&j| v[j] <= x) {
            maxq.pop_back();
        }
        maxq.push_back(i);
        while minq.back().is_some_and(|&j| v[j] >= x) {
            minq.pop_back();
        }
        minq.push_back(i);
        let lo = i.saturating_sub(w);
        while maxq.front().is_some_and(|&j| j < lo) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&j| j < lo) {
            minq.pop_front();
        }
        best = best.max(v[maxq[0]] - v[minq[0]]);
    }
    best
}

/// `omega_2(f, d) = sup_{0 < h <= d} |f(x+2h) - 2f(x+h) + f(x)|`, with `h`
/// running over an even subdivision of `(0, d]`.
pub fn modulus2(f: &(impl Integrand + ?Sized), delta_sqrt: f64, grid: &DomainGrid) -> f64 {
    assert!(delta_sqrt > 0.0, "delta must be positive");
    let steps = ((delta_sqrt / grid.h_min).ceil() as usize).clamp(1, MAX_OFFSETS);
    SecondDifferenceProfile::new(f, delta_sqrt, steps, grid).modulus(f, delta_sqrt)
}

/// `sup_x |f(x+2h) - 2f(x+h) + f(x)|` over a grid, for a ladder of `h`.
///
/// Answers `omega_2(f, d)` for many `d <= h_max` at the cost of one scan per
/// query.
#[derive(Debug, Clone)]
pub struct SecondDifferenceProfile {
    grid: DomainGrid,
    /// `(h_j, max_{i <= j} sup_x |Delta_{h_i}^2 f(x)|)`.
    prefix: Vec<(f64, f64)>,
}

fn second_difference_sup(f: &(impl Integrand + ?Sized), h: f64, xs: &[f64]) -> f64 {
    xs.iter()
        .map(|&x| (f.value(x + 2.0 * h) - 2.0 * f.value(x + h) + f.value(x)).abs())
        .fold(0.0, f64::max)
}

impl SecondDifferenceProfile {
    pub fn new(f: &(impl Integrand + ?Sized), h_max: f64, steps: usize, grid: &DomainGrid) -> Self {
        let xs = grid.xs();
        let sups: Vec<f64> = (1..=steps)
            .into_par_iter()
            .map(|j| second_difference_sup(f, h_max * j as f64 / steps as f64, &xs))
            .collect();
        let mut running = 0.0f64;
        let prefix = sups
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                running = running.max(s);
                (h_max * (j + 1) as f64 / steps as f64, running)
            })
            .collect();
        Self { grid: *grid, prefix }
    }

    /// `omega_2(f, d)`: the ladder below `d` plus the exact offset `d`.
    pub fn modulus(&self, f: &(impl Integrand + ?Sized), d: f64) -> f64 {
        let idx = self.prefix.partition_point(|&(h, _)| h <= d * (1.0 + 1e-12));
        let ladder = if idx == 0 { 0.0 } else { self.prefix[idx - 1].1 };
        ladder.max(second_difference_sup(f, d, &self.grid.xs()))
    }
}

/// `Omega(f, delta) = sup_{|h| <= delta} |f(x+h) - f(x)| / ((1+h^2)(1+x^2))`.
///
/// Offsets are the grid multiples within `delta` and `+-delta` itself;
/// probes that would leave `[0, inf)` are skipped.
pub fn weighted_modulus(f: &(impl Integrand + ?Sized), delta: f64, grid: &DomainGrid) -> f64 {
    assert!(delta > 0.0, "delta must be positive");
    let h = grid.spacing();
    let m = ((delta / h) * (1.0 + 1e-12)).floor() as usize;
    let mut offsets: Vec<f64> = (1..=m).map(|j| j as f64 * h).collect();
    offsets.push(delta);
    let xs = grid.xs();
    xs.par_iter()
        .map(|&x| {
            let fx = f.value(x);
            let rho = 1.0 + x * x;
            offsets
                .iter()
                .flat_map(|&h| [h, -h])
                .filter(|&h| x + h >= 0.0)
                .map(|h| (f.value(x + h) - fx).abs() / ((1.0 + h * h) * rho))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// `max |f(a) - f(b)| / |a - b|^nu` over all grid pairs.
pub fn lipschitz_estimate(f: &(impl Integrand + ?Sized), nu: f64, grid: &DomainGrid) -> f64 {
    assert!(nu > 0.0 && nu <= 1.0, "nu must lie in (0, 1]");
    let xs = grid.xs();
    let v = sample(f, grid);
    (0..xs.len())
        .into_par_iter()
        .map(|i| {
            ((i + 1)..xs.len())
                .map(|j| (v[j] - v[i]).abs() / (xs[j] - xs[i]).powf(nu))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::TestFunction;
    use approx::assert_relative_eq;

    fn grid(x_max: f64, points: usize) -> DomainGrid {
        DomainGrid::new(x_max, points).unwrap()
    }

    #[test]
    fn constant_has_zero_moduli() {
        let g = grid(4.0, 101);
        let one = TestFunction::constant();
        assert_eq!(modulus(&one, 0.3, &g), 0.0);
        assert_eq!(modulus2(&one, 0.3, &g), 0.0);
        assert_eq!(weighted_modulus(&one, 0.3, &g), 0.0);
        assert_eq!(lipschitz_estimate(&one, 0.5, &g), 0.0);
    }

    #[test]
    fn linear_and_quadratic() {
        let g = grid(4.0, 201);
        assert_relative_eq!(modulus(&|t: f64| t, 0.1, &g), 0.1, max_relative = 1e-12);
        assert!(modulus2(&|t: f64| 3.0 * t - 1.0, 0.4, &g) < 1e-12);
        assert_relative_eq!(modulus2(&|t: f64| t * t, 0.2, &g), 0.08, max_relative = 1e-12);
        assert_relative_eq!(lipschitz_estimate(&|t: f64| t, 1.0, &g), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn sine_against_fine_grid() {
        let g = grid(4.0, 201);
        let coarse = modulus(&TestFunction::Sine, 0.5, &g);
        let fine = modulus(&TestFunction::Sine, 0.5, &g.refined(10));
        assert!(coarse <= fine + 1e-12 && fine <= 0.5);
        assert!((coarse - fine).abs() < 1e-3);
        assert!(modulus2(&TestFunction::Sine, 0.3, &g) <= 0.09 + 1e-3);
    }

    #[test]
    fn holder_cusp_constant() {
        let g = grid(4.0, 1001);
        let est = lipschitz_estimate(&TestFunction::holder_cusp(0.5), 0.5, &g);
        assert!((est - 1.0).abs() < 0.02, "{est}");
    }

    #[test]
    fn weighted_square() {
        let g = grid(10.0, 401);
        let got = weighted_modulus(&|t: f64| t * t, 0.1, &g);
        let fine = g.refined(10);
        let oracle = fine
            .xs()
            .iter()
            .flat_map(|&x| {
                (1..=100).flat_map(move |j| {
                    let h = 0.1 * j as f64 / 100.0;
                    [h, -h]
                        .into_iter()
                        .filter(move |&h| x + h >= 0.0)
                        .map(move |h| (2.0 * x * h + h * h).abs() / ((1.0 + h * h) * (1.0 + x * x)))
                })
            })
            .fold(0.0, f64::max);
        assert!(got <= oracle + 1e-12);
        assert!((got - oracle).abs() < 1e-3, "{got} vs {oracle}");
        assert!(weighted_modulus(&|t: f64| t * t, 0.05, &g) <= got);
    }
}
