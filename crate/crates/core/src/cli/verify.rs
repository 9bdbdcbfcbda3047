//! Invariant suites behind `qdunkl verify`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::Resolved;
use crate::dunkl::{gamma_classical, gamma_q, gamma_q_product, step_bracket, GammaTable};
use crate::error::{Error, Result};
use crate::experiments::{ExperimentReport, ReportRow, Summary};
use crate::moduli::{lipschitz_estimate, modulus, weighted_modulus, DomainGrid};
use crate::operators::{
    apply_d, central_moment_T1, central_moment_T_exact, central_moment_bound, d_moment_bounds, moment_T1,
    moment_T_bounds, CellRule, Kernel, StancuParams, TOperator, TestFunction,
};
use crate::qcore::QContext;
use crate::qintegral::{
    jackson_integral, jackson_integral_between, jackson_integral_zero, monomial_cell_integral, QCell,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Moments,
    Integrals,
    Gamma,
    Moduli,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Moments => "moments",
            Suite::Integrals => "integrals",
            Suite::Gamma => "gamma",
            Suite::Moduli => "moduli",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::Moments, Suite::Integrals, Suite::Gamma, Suite::Moduli]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}` (moments|integrals|gamma|moduli)")))
    }
}

/// Accumulates rows, each `lhs <= rhs` with the standard slack.
struct Checks {
    rows: Vec<ReportRow>,
}

impl Checks {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn check(&mut self, n: u32, q: f64, quantity: String, observed: f64, allowed: f64) {
        self.rows
            .push(ReportRow::bound(n, q, None, &quantity, observed, allowed));
    }

    fn finish(self, suite: Suite, cfg: &Resolved, notes: Vec<String>) -> ExperimentReport {
        let mut config: BTreeMap<String, String> = cfg.echo();
        config.insert("command".into(), "verify".into());
        config.insert("suite".into(), suite.name().into());
        let summary = Summary {
            all_pass: self.rows.iter().all(|r| r.pass != Some(false)),
            notes,
            ..Summary::default()
        };
        ExperimentReport {
            config,
            rows: self.rows,
            summary,
        }
        .finish()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn run_suite(suite: Suite, cfg: &Resolved) -> Result<ExperimentReport> {
    match suite {
        Suite::Gamma => gamma_suite(cfg),
        Suite::Integrals => integrals_suite(cfg),
        Suite::Moments => moments_suite(cfg),
        Suite::Moduli => moduli_suite(cfg),
    }
}

fn or_default<T: Clone>(explicit: Option<T>, defaults: &[T]) -> Vec<T> {
    explicit.map_or_else(|| defaults.to_vec(), |v| vec![v])
}

/// Explicit special cases `gamma(0..4)`, the recursion ratio, the closed
/// product and the `q -> 1` limit.
fn gamma_suite(cfg: &Resolved) -> Result<ExperimentReport> {
    let mut c = Checks::new();
    let mus = or_default(cfg.explicit_mu, &[0.75, 1.0, 2.0]);
    let qs = or_default(cfg.explicit_q, &[0.3, 0.5, 0.9]);
    for &mu in &mus {
        for &q in &qs {
            let ctx = QContext::new(q, mu)?;
            let mut table = GammaTable::new(ctx, 8);
            let f = |e: f64| (1.0 - q.powf(e)) / (1.0 - q);
            let explicit = [
                1.0,
                f(2.0 * mu + 1.0),
                f(2.0 * mu + 1.0) * f(2.0),
                f(2.0 * mu + 1.0) * f(2.0) * f(2.0 * mu + 3.0),
                f(2.0 * mu + 1.0) * f(2.0) * f(2.0 * mu + 3.0) * f(4.0),
            ];
            for (k, &v) in explicit.iter().enumerate() {
                let g = gamma_q(k, &mut table)?;
                c.check(k as u32, q, format!("special_case(mu={mu},k={k})"), rel(g, v), 1e-12);
            }
            let mut worst: f64 = 0.0;
            for k in 0..=60 {
                let ratio = gamma_q(k + 1, &mut table)? / gamma_q(k, &mut table)?;
                worst = worst.max(rel(ratio, step_bracket(k + 1, &ctx)));
            }
            c.check(60, q, format!("recursion_ratio(mu={mu})"), worst, 1e-13);
            let mut worst: f64 = 0.0;
            for k in 0..=40 {
                worst = worst.max(rel(gamma_q(k, &mut table)?, gamma_q_product(k, &ctx)));
            }
            c.check(40, q, format!("product_formula(mu={mu})"), worst, 1e-12);
        }
        let q = 1.0 - 1e-7;
        let mut table = GammaTable::new(QContext::new(q, mu)?, 32);
        let mut worst: f64 = 0.0;
        for k in 0..=20 {
            worst = worst.max(rel(gamma_q(k, &mut table)?, gamma_classical(k, mu)?));
        }
        c.check(20, q, format!("q_to_1_bridge(mu={mu})"), worst, 1e-4);
    }
    Ok(c.finish(Suite::Gamma, cfg, Vec::new()))
}

/// Closed-form cell integrals against the numeric Jackson sum, cell widths,
/// additivity and positivity.
fn integrals_suite(cfg: &Resolved) -> Result<ExperimentReport> {
    let mut c = Checks::new();
    let qs = or_default(cfg.explicit_q, &[0.3, 0.5, 0.9]);
    let mus = or_default(cfg.explicit_mu, &[0.75, 1.0]);
    let ns = cfg.explicit_n.clone().unwrap_or_else(|| vec![1, 5, 20]);
    for &q in &qs {
        for &mu in &mus {
            let ctx = QContext::new(q, mu)?;
            for &n in &ns {
                for p in 0..=4u32 {
                    let mut worst: f64 = 0.0;
                    for k in 0..=30 {
                        let cell = QCell::new(k, &ctx, n);
                        let exact = monomial_cell_integral(p, &cell)?;
                        let numeric = jackson_integral(|t| t.powi(p as i32), &cell, 1e-16);
                        worst = worst.max((exact - numeric).abs() / (1.0 + exact.abs()));
                    }
                    c.check(n, q, format!("closed_vs_jackson(mu={mu},p={p})"), worst, 1e-10);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut width: f64 = 0.0;
    let mut additivity: f64 = 0.0;
    let mut positivity: f64 = 0.0;
    for _ in 0..1000 {
        let q = rng.gen_range(0.05..0.99);
        let mu = rng.gen_range(-0.45..3.0);
        let ctx = QContext::new(q, mu)?;
        let k = rng.gen_range(0..200usize);
        let n = rng.gen_range(1..200u32);
        let cell = QCell::new(k, &ctx, n);
        width = width.max((cell.width() - 1.0 / cell.bracket_n).abs());
        let a = rng.gen_range(0.0..5.0);
        let b = rng.gen_range(a..5.0);
        let f = |t: f64| (t * 1.3).sin() + t * t;
        let diff = jackson_integral_zero(f, b, &ctx, 1e-16) - jackson_integral_zero(f, a, &ctx, 1e-16);
        additivity = additivity.max((diff - jackson_integral_between(f, a, b, &ctx, 1e-16)).abs());
        let g = |t: f64| t.sqrt() + (t - 0.3).max(0.0);
        positivity = positivity.max(-jackson_integral(g, &cell, 1e-14));
    }
    c.check(0, f64::NAN, "cell_width(random=1000)".into(), width, 1e-13);
    c.check(0, f64::NAN, "additivity(random=1000)".into(), additivity, 1e-11);
    c.check(0, f64::NAN, "positivity(random=1000)".into(), positivity, 1e-15);
    let notes = vec![format!("random draws use seed {}", cfg.seed)];
    Ok(c.finish(Suite::Integrals, cfg, notes))
}

/// Moment identities, bracketing and central-moment domination for `T*`,
/// and the moments of `D`, over the parameter matrix and the grid.
fn moments_suite(cfg: &Resolved) -> Result<ExperimentReport> {
    let mut c = Checks::new();
    let qs = or_default(cfg.explicit_q, &[0.5, 0.9]);
    let mus = or_default(cfg.explicit_mu, &[0.75, 1.0]);
    let ns = cfg.explicit_n.clone().unwrap_or_else(|| vec![5, 20, 100]);
    let shifts = cfg
        .explicit_shift
        .map_or_else(|| vec![(0.0, 0.0), (0.0, 2.0), (1.0, 0.0), (1.0, 2.0)], |s| vec![s]);
    let tol = cfg.experiment.tol;
    let mut notes = Vec::new();
    let mut skipped = 0;
    for &q in &qs {
        for &mu in &mus {
            let ctx = QContext::new(q, mu)?;
            for w in ctx.warnings() {
                if !notes.contains(&w.to_string()) {
                    notes.push(w.to_string());
                }
            }
            for &n in &ns {
                for &(alpha, beta) in &shifts {
                    let params = StancuParams::new(ctx, n, alpha, beta)?;
                    let kernel = Kernel::new(params);
                    let limit = cfg.experiment.domain_margin * params.convergence_radius();
                    let all = cfg.experiment.grid.xs();
                    let xs: Vec<f64> = all.iter().copied().filter(|&x| x <= limit).collect();
                    skipped += all.len() - xs.len();
                    let monos: Vec<TestFunction> = (0..=4).map(|p| TestFunction::Monomial { p }).collect();
                    let ops: Vec<_> = monos
                        .iter()
                        .map(|f| TOperator::new(&kernel, f, CellRule::Jackson, tol))
                        .collect();
                    let mut worst = [0.0f64; 10];
                    for &x in &xs {
                        let w = kernel.weights(x, tol)?;
                        let t: Vec<f64> = ops.iter().map(|op| op.apply(&w)).collect();
                        let b2 = moment_T_bounds(2, x, &params)?;
                        let b3 = moment_T_bounds(3, x, &params)?;
                        let b4 = moment_T_bounds(4, x, &params)?;
                        let c2 = central_moment_T_exact(2, &kernel, &w);
                        let c4 = central_moment_T_exact(4, &kernel, &w);
                        let d1 = apply_d(&monos[1], &kernel, &w);
                        let d2 = apply_d(&monos[2], &kernel, &w);
                        let db2 = d_moment_bounds(2, x, &params)?;
                        let vals = [
                            (t[0] - 1.0).abs(),
                            (t[1] - moment_T1(x, &params)).abs() / (1.0 + x),
                            (b2.lower - t[2]).max(t[2] - b2.upper),
                            b3.lower - t[3],
                            t[4] - b4.upper,
                            ((t[1] - x) - central_moment_T1(x, &params)).abs(),
                            c2 - central_moment_bound(2, x, &params)?,
                            c4 - central_moment_bound(4, x, &params)?,
                            (apply_d(&monos[0], &kernel, &w) - 1.0).abs().max((d1 - x).abs()),
                            (db2.lower - d2).max(d2 - db2.upper),
                        ];
                        for (acc, v) in worst.iter_mut().zip(vals) {
                            *acc = acc.max(v);
                        }
                    }
                    let names = [
                        ("T_one", 1e-10),
                        ("T_t_vs_moment_T1", 1e-9),
                        ("T_t2_bracket", 1e-9),
                        ("T_t3_lower", 1e-9),
                        ("T_t4_upper", 1e-9),
                        ("central_T1", 1e-9),
                        ("central_t2_dominated", 1e-9),
                        ("central_t4_dominated", 1e-9),
                        ("D_one_and_t", 1e-9),
                        ("D_t2_bracket", 1e-9),
                    ];
                    for ((name, allowed), v) in names.iter().zip(worst) {
                        c.check(n, q, format!("{name}(mu={mu},alpha={alpha},beta={beta})"), v, *allowed);
                    }
                }
            }
        }
    }
    if skipped > 0 {
        notes.push(format!(
            "{skipped} grid point(s) outside the convergence domain were skipped"
        ));
    }
    Ok(c.finish(Suite::Moments, cfg, notes))
}

/// Monotonicity, subadditivity and the two pointwise inequalities of the
/// moduli, on the designated test functions.
fn moduli_suite(cfg: &Resolved) -> Result<ExperimentReport> {
    let mut c = Checks::new();
    let g = &cfg.experiment.grid;
    let grid = DomainGrid::new(g.hi, g.points)?;
    let wide = DomainGrid::new(cfg.experiment.weighted_grid.hi, cfg.experiment.weighted_grid.points)?;
    let fs = [
        TestFunction::constant(),
        TestFunction::Monomial { p: 1 },
        TestFunction::Sine,
        TestFunction::ExpDecay { c: 1.0 },
        TestFunction::AbsShift { x0: 1.0 },
        TestFunction::holder_cusp(0.5),
    ];
    let xs = grid.xs();
    for f in &fs {
        let name = f.to_string();
        let deltas = [0.05, 0.1, 0.2, 0.4];
        let omegas: Vec<f64> = deltas.iter().map(|&d| modulus(f, d, &grid)).collect();
        let mono = omegas.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
        c.check(0, f64::NAN, format!("omega_monotone({name})"), mono, 0.0);
        let sub = deltas
            .iter()
            .zip(&omegas)
            .map(|(&d, &o)| modulus(f, 2.0 * d, &grid) - 2.0 * o)
            .fold(f64::NEG_INFINITY, f64::max);
        c.check(0, f64::NAN, format!("omega_subadditive({name})"), sub, 1e-9);
        for &d in &[0.1, 0.3] {
            let om = modulus(f, d, &grid);
            let ow = weighted_modulus(f, d, &wide);
            let mut worst_s = f64::NEG_INFINITY;
            let mut worst_w = f64::NEG_INFINITY;
            for &x in &xs {
                for &y in &xs {
                    let diff = (f.eval(y) - f.eval(x)).abs();
                    let h = (y - x).abs();
                    worst_s = worst_s.max(diff - (h / d + 1.0) * om);
                    let bound = 2.0 * (1.0 + h / d) * (1.0 + d * d) * (1.0 + x * x) * (1.0 + h * h) * ow;
                    worst_w = worst_w.max(diff - bound);
                }
            }
            c.check(0, f64::NAN, format!("omega_pointwise(delta={d},{name})"), worst_s, 1e-9);
            c.check(
                0,
                f64::NAN,
                format!("weighted_pointwise(delta={d},{name})"),
                worst_w,
                1e-9,
            );
        }
    }
    let one = TestFunction::constant();
    let zero = modulus(&one, 0.3, &grid) + weighted_modulus(&one, 0.3, &wide) + lipschitz_estimate(&one, 0.5, &grid);
    c.check(0, f64::NAN, "constant_moduli_zero".into(), zero, 0.0);
    let dense = DomainGrid::new(4.0, 1001)?;
    let est = lipschitz_estimate(&TestFunction::holder_cusp(0.5), 0.5, &dense);
    c.check(0, f64::NAN, "holder_constant_error".into(), (est - 1.0).abs(), 0.02);
    Ok(c.finish(Suite::Moduli, cfg, Vec::new()))
}
