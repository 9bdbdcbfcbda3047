use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{ExperimentConfig, ExperimentReport, ReportRow, Summary};
use crate::error::{Error, Result};
use crate::moduli::{modulus, weighted_modulus, SecondDifferenceProfile};
use crate::operators::{
    apply_d, central_moment_T1, central_moment_T_exact, moment_T1, phi_n, CellRule, Integrand, Kernel, KernelWeights,
    StancuParams, TOperator, TestFunction,
};
use crate::qcore::QContext;

/// Cap on the `h` ladder of the second-order modulus.
const MAX_H_STEPS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Korovkin,
    Modulus,
    Lipschitz,
    Smooth,
    SecondOrder,
    Weighted,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Korovkin,
        Experiment::Modulus,
        Experiment::Lipschitz,
        Experiment::Smooth,
        Experiment::SecondOrder,
        Experiment::Weighted,
    ];

    /// Experiments that estimate an unknown constant instead of checking a bound.
    pub fn is_estimate(&self) -> bool {
        matches!(self, Experiment::SecondOrder | Experiment::Weighted)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Korovkin => "korovkin",
            Experiment::Modulus => "modulus",
            Experiment::Lipschitz => "lipschitz",
            Experiment::Smooth => "smooth",
            Experiment::SecondOrder => "second_order",
            Experiment::Weighted => "weighted",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Operator data for one `n`: the in-domain grid and its weights.
struct Prepared {
    n: u32,
    q_n: f64,
    params: StancuParams,
    kernel: Kernel,
    xs: Vec<f64>,
    weights: Vec<KernelWeights>,
    skipped: usize,
    tol: f64,
}

impl Prepared {
    fn new(cfg: &ExperimentConfig, n: u32) -> Result<Self> {
        let q_n = cfg.scheme.q_n(n);
        let params = StancuParams::new(QContext::new(q_n, cfg.mu)?, n, cfg.alpha, cfg.beta)?;
        let limit = cfg.domain_margin * params.convergence_radius();
        let all = cfg.grid.xs();
        let xs: Vec<f64> = all.iter().copied().filter(|&x| x <= limit).collect();
        let kernel = Kernel::new(params);
        let weights = xs
            .par_iter()
            .map(|&x| kernel.weights(x, cfg.tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            q_n,
            params,
            kernel,
            skipped: all.len() - xs.len(),
            xs,
            weights,
            tol: cfg.tol,
        })
    }

    /// `T*(f; x)` at every grid point.
    fn apply(&self, f: &(impl Integrand + ?Sized)) -> Vec<f64> {
        let mut op = TOperator::new(&self.kernel, f, CellRule::Auto, self.tol);
        let k_max = self.weights.iter().map(KernelWeights::k_max).max().unwrap_or(0);
        op.prepare(k_max);
        self.weights.par_iter().map(|w| op.apply(w)).collect()
    }

    /// `lambda_n(x) = T*((t - x)^2; x)`.
    fn lambda(&self) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| central_moment_T_exact(2, &self.kernel, w).max(0.0))
            .collect()
    }

    fn central1(&self) -> Vec<f64> {
        self.xs.iter().map(|&x| central_moment_T1(x, &self.params)).collect()
    }
}

fn prepare_all(cfg: &ExperimentConfig) -> Result<Vec<Prepared>> {
    cfg.n_list.iter().map(|&n| Prepared::new(cfg, n)).collect()
}

fn sup(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn base_summary(cfg: &ExperimentConfig, preps: &[Prepared]) -> Summary {
    let mut notes = Vec::new();
    if let Some(p) = preps.first() {
        for w in p.params.warnings() {
            notes.push(w.to_string());
        }
    }
    if !cfg.f.meta().is_nondecreasing {
        notes.push(crate::qcore::Warning::NonMonotoneFunction.to_string());
    }
    let skipped: usize = preps.iter().map(|p| p.skipped).sum();
    if skipped > 0 {
        notes.push(format!(
            "{skipped} grid point(s) beyond {} of the convergence radius were skipped",
            cfg.domain_margin
        ));
    }
    Summary {
        skipped_points: skipped,
        notes,
        ..Summary::default()
    }
}

fn report(cfg: &ExperimentConfig, which: Experiment, rows: Vec<ReportRow>, summary: Summary) -> ExperimentReport {
    let mut config = cfg.echo();
    config.insert("experiment".into(), which.name().into());
    ExperimentReport { config, rows, summary }.finish()
}

fn nonincreasing(v: &[f64], slack: f64) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack) + 1e-15)
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        1.0
    } else if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Uniform errors `sup |T*(t^j;x) - x^j|` for `j = 0, 1, 2` and weighted
/// errors `sup |T*f - f| / (1 + x^2)` for `f = t^2` and `f = sin`.
pub fn korovkin_run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let preps = prepare_all(cfg)?;
    let mut rows = Vec::new();
    let trend_keys = ["sup_err_j1", "sup_err_j2", "weighted_err_sine", "weighted_err_t2"];
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); trend_keys.len()];
    let mut exact_ok = true;
    for p in &preps {
        let (n, q) = (p.n, p.q_n);
        let mut errs = Vec::new();
        for j in 0..=2u32 {
            let tf = p.apply(&TestFunction::Monomial { p: j });
            errs.push(sup(p.xs.iter().zip(&tf).map(|(&x, &v)| (v - x.powi(j as i32)).abs())));
        }
        let c1 = sup(p.central1().into_iter().map(f64::abs));
        let j0 = ReportRow::bound(n, q, None, "sup_err_j0", errs[0], 1e-10);
        let mut j1 = ReportRow::value(n, q, None, "sup_err_j1", errs[1]);
        j1.rhs = Some(c1);
        j1.ratio = Some(errs[1] / c1.max(1e-300));
        j1.pass = Some((errs[1] - c1).abs() <= 1e-9);
        exact_ok &= j0.pass == Some(true) && j1.pass == Some(true);
        rows.push(j0);
        rows.push(j1);
        rows.push(ReportRow::value(n, q, None, "sup_err_j2", errs[2]));
        let weighted = |f: &TestFunction| {
            let tf = p.apply(f);
            sup(p
                .xs
                .iter()
                .zip(&tf)
                .map(|(&x, &v)| (v - f.eval(x)).abs() / (1.0 + x * x)))
        };
        let w_t2 = weighted(&TestFunction::Monomial { p: 2 });
        let w_sin = weighted(&TestFunction::Sine);
        rows.push(ReportRow::value(n, q, None, "weighted_err_t2", w_t2));
        rows.push(ReportRow::value(n, q, None, "weighted_err_sine", w_sin));
        for (s, v) in series.iter_mut().zip([errs[1], errs[2], w_sin, w_t2]) {
            s.push(v);
        }
    }
    let mut summary = base_summary(cfg, &preps);
    let trend_ok = series.iter().all(|s| nonincreasing(s, 0.10));
    for (k, s) in trend_keys.iter().zip(series) {
        summary.estimates.insert(k.to_string(), s);
    }
    summary.trend_ok = Some(trend_ok);
    summary.all_pass = trend_ok && exact_ok;
    summary.notes.push(format!(
        "uniform errors are taken over [{}, {}] intersected with the convergence domain",
        cfg.grid.lo, cfg.grid.hi
    ));
    Ok(report(cfg, Experiment::Korovkin, rows, summary))
}

fn bound_summary(cfg: &ExperimentConfig, preps: &[Prepared], rows: &[ReportRow]) -> Summary {
    let mut s = base_summary(cfg, preps);
    s.all_pass = rows.iter().all(|r| r.pass != Some(false));
    s
}

/// `|T*f - f| <= (1 + sqrt(phi_n(x))) omega(f, 1/sqrt([n]_q))`.
pub fn rate_bound_modulus(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let f = &cfg.f;
    if !f.meta().is_uniformly_continuous {
        return Err(f.missing("uniform continuity"));
    }
    let fine = cfg.grid.modulus_grid(cfg.fine_factor);
    let preps = prepare_all(cfg)?;
    let mut rows = Vec::new();
    for p in &preps {
        let omega = modulus(f, 1.0 / p.params.bracket_n.sqrt(), &fine);
        let tf = p.apply(f);
        for (&x, &v) in p.xs.iter().zip(&tf) {
            let rhs = (1.0 + phi_n(x, &p.params).max(0.0).sqrt()) * omega;
            rows.push(ReportRow::bound(
                p.n,
                p.q_n,
                Some(x),
                "modulus",
                (v - f.eval(x)).abs(),
                rhs,
            ));
        }
    }
    let summary = bound_summary(cfg, &preps, &rows);
    Ok(report(cfg, Experiment::Modulus, rows, summary))
}

/// `|T*f - f| <= M lambda_n(x)^{nu/2}` for `f` in `Lip_M(nu)`; also checks
/// `lambda_n <= phi_n`.
pub fn rate_bound_lipschitz(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let f = &cfg.f;
    let (nu, m) = f.lipschitz()?;
    let preps = prepare_all(cfg)?;
    let mut rows = Vec::new();
    for p in &preps {
        let tf = p.apply(f);
        for ((&x, &v), &lam) in p.xs.iter().zip(&tf).zip(&p.lambda()) {
            rows.push(ReportRow::bound(
                p.n,
                p.q_n,
                Some(x),
                "lipschitz",
                (v - f.eval(x)).abs(),
                m * lam.powf(nu / 2.0),
            ));
            rows.push(ReportRow::bound(
                p.n,
                p.q_n,
                Some(x),
                "lambda_vs_phi",
                lam,
                phi_n(x, &p.params),
            ));
        }
    }
    let summary = bound_summary(cfg, &preps, &rows);
    Ok(report(cfg, Experiment::Lipschitz, rows, summary))
}

/// `|T*g - g| <= (|T*(t - x; x)| + lambda_n(x)/2) ||g||_{C_B^2}`.
pub fn rate_bound_smooth(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let g = &cfg.f;
    let norm = g.cb2_norm()?;
    let preps = prepare_all(cfg)?;
    let mut rows = Vec::new();
    for p in &preps {
        let tg = p.apply(g);
        let c1 = p.central1();
        for (((&x, &v), &lam), &c) in p.xs.iter().zip(&tg).zip(&p.lambda()).zip(&c1) {
            let rhs = (c.abs() + lam / 2.0) * norm;
            rows.push(ReportRow::bound(
                p.n,
                p.q_n,
                Some(x),
                "smooth",
                (v - g.eval(x)).abs(),
                rhs,
            ));
        }
    }
    let summary = bound_summary(cfg, &preps, &rows);
    Ok(report(cfg, Experiment::Smooth, rows, summary))
}

fn estimate_summary(cfg: &ExperimentConfig, preps: &[Prepared], key: &str, values: Vec<f64>, slack: f64) -> Summary {
    let mut s = base_summary(cfg, preps);
    let finite = values.iter().all(|v| v.is_finite());
    let sp = spread(&values);
    s.trend_ok = Some(finite && nonincreasing(&values, slack));
    s.all_pass = finite;
    s.estimate_spread.insert(key.to_string(), sp);
    s.estimates.insert(key.to_string(), values);
    s
}

/// Empirical `M* = max_x |T*f - f| / (2 [omega_2(f, sqrt(delta)) + min(1, delta) ||f||])`
/// with `delta = (2 |T*(t - x; x)| + lambda_n(x)) / 4`.
pub fn rate_bound_second_order(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let f = &cfg.f;
    if !f.meta().is_bounded {
        return Err(f.missing("boundedness"));
    }
    let fine = cfg.grid.modulus_grid(cfg.fine_factor);
    let f_norm = sup(fine.xs().into_iter().map(|x| f.eval(x).abs()));
    let preps = prepare_all(cfg)?;
    let mut rows = Vec::new();
    let mut m_star = Vec::new();
    for p in &preps {
        let tf = p.apply(f);
        let deltas: Vec<f64> = p
            .central1()
            .iter()
            .zip(p.lambda())
            .map(|(c, lam)| (2.0 * c.abs() + lam) / 4.0)
            .collect();
        let h_max = deltas.iter().copied().fold(0.0, f64::max).sqrt();
        let mut best: f64 = 0.0;
        if h_max > 0.0 {
            let steps = ((h_max / fine.h_min).ceil() as usize).clamp(1, MAX_H_STEPS);
            let profile = SecondDifferenceProfile::new(f, h_max, steps, &fine);
            for ((&x, &v), &d) in p.xs.iter().zip(&tf).zip(&deltas) {
                let w2 = if d > 0.0 { profile.modulus(f, d.sqrt()) } else { 0.0 };
                let bracket = 2.0 * (w2 + d.min(1.0) * f_norm);
                let row = ReportRow::estimate(p.n, p.q_n, Some(x), "second_order", (v - f.eval(x)).abs(), bracket);
                if let Some(r) = row.ratio {
                    best = best.max(r);
                }
                rows.push(row);
            }
        }
        rows.push(ReportRow::value(p.n, p.q_n, None, "M_star", best));
        m_star.push(best);
    }
    let summary = estimate_summary(cfg, &preps, "M_star", m_star, 1.0);
    Ok(report(cfg, Experiment::SecondOrder, rows, summary))
}

/// Empirical `C* = sup_x (|T*f - f| / (1 + x^2)) / ((1 + 1/[n]_q) Omega(f, 1/sqrt([n]_q)))`.
pub fn rate_bound_weighted(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let f = &cfg.f;
    if f.meta().rho_bound.is_none() {
        return Err(f.missing("weighted growth"));
    }
    let wide = cfg.weighted_grid.modulus_grid(cfg.fine_factor);
    let preps = prepare_all(cfg)?;
    let mut rows = Vec::new();
    let mut c_star = Vec::new();
    for p in &preps {
        let bn = p.params.bracket_n;
        let kernel = (1.0 + 1.0 / bn) * weighted_modulus(f, 1.0 / bn.sqrt(), &wide);
        let tf = p.apply(f);
        let mut lhs_sup: f64 = 0.0;
        for (&x, &v) in p.xs.iter().zip(&tf) {
            let lhs = (v - f.eval(x)).abs() / (1.0 + x * x);
            lhs_sup = lhs_sup.max(lhs);
            rows.push(ReportRow::estimate(p.n, p.q_n, Some(x), "weighted", lhs, kernel));
        }
        let c = if kernel > 0.0 { lhs_sup / kernel } else { 0.0 };
        rows.push(ReportRow::value(p.n, p.q_n, None, "C_star", c));
        c_star.push(c);
    }
    let summary = estimate_summary(cfg, &preps, "C_star", c_star, 0.2);
    Ok(report(cfg, Experiment::Weighted, rows, summary))
}

/// `T*(f; x)` on the grid for every `n`, optionally with `D(f; x)` and the
/// rows `moment_T1`, `phi_n`, `lambda_n`.
pub fn eval_run(cfg: &ExperimentConfig, with_d: bool, moments: bool) -> Result<ExperimentReport> {
    cfg.validate()?;
    let f = &cfg.f;
    let preps = prepare_all(cfg)?;
    let mut rows = Vec::new();
    for p in &preps {
        let tf = p.apply(f);
        let lambda = if moments { p.lambda() } else { Vec::new() };
        for (i, (&x, w)) in p.xs.iter().zip(&p.weights).enumerate() {
            let at = Some(x);
            rows.push(ReportRow::value(p.n, p.q_n, at, "T_f", tf[i]));
            if with_d {
                rows.push(ReportRow::value(p.n, p.q_n, at, "D_f", apply_d(f, &p.kernel, w)));
            }
            if moments {
                rows.push(ReportRow::value(p.n, p.q_n, at, "moment_T1", moment_T1(x, &p.params)));
                rows.push(ReportRow::value(p.n, p.q_n, at, "phi_n", phi_n(x, &p.params)));
                rows.push(ReportRow::value(p.n, p.q_n, at, "lambda_n", lambda[i]));
            }
        }
    }
    let mut summary = base_summary(cfg, &preps);
    summary.all_pass = true;
    let mut config = cfg.echo();
    config.insert("command".into(), "eval".into());
    Ok(ExperimentReport { config, rows, summary }.finish())
}

pub fn run_experiment(which: Experiment, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match which {
        Experiment::Korovkin => korovkin_run(cfg),
        Experiment::Modulus => rate_bound_modulus(cfg),
        Experiment::Lipschitz => rate_bound_lipschitz(cfg),
        Experiment::Smooth => rate_bound_smooth(cfg),
        Experiment::SecondOrder => rate_bound_second_order(cfg),
        Experiment::Weighted => rate_bound_weighted(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::QnScheme;

    fn small(f: TestFunction) -> ExperimentConfig {
        ExperimentConfig {
            scheme: QnScheme::Fixed { q: 0.9 },
            n_list: vec![10, 20],
            f,
            grid: "0:2:21".parse().unwrap(),
            weighted_grid: "0:10:101".parse().unwrap(),
            fine_factor: 4,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn constant_passes_everything() {
        for e in Experiment::ALL {
            let r = run_experiment(e, &small(TestFunction::constant())).unwrap();
            assert!(r.summary.all_pass, "{e}");
            if e != Experiment::Korovkin {
                assert!(
                    r.rows
                        .iter()
                        .filter(|row| row.quantity == e.name())
                        .all(|row| row.lhs.abs() < 1e-10),
                    "{e}"
                );
            }
        }
    }

    #[test]
    fn metadata_is_enforced() {
        let cusp = small(TestFunction::holder_cusp(0.5));
        assert!(matches!(rate_bound_smooth(&cusp), Err(Error::MissingMetadata { .. })));
        assert!(matches!(
            rate_bound_second_order(&small(TestFunction::AbsShift { x0: 1.0 })),
            Err(Error::MissingMetadata { .. })
        ));
        assert!(rate_bound_lipschitz(&cusp).unwrap().summary.all_pass);
    }

    #[test]
    fn skipped_points_are_reported() {
        let r = rate_bound_modulus(&small(TestFunction::Sine)).unwrap();
        // radius 1/(1 - 0.9^10) = 1.535..., so x > 1.52 is skipped for n = 10
        assert!(r.summary.skipped_points > 0);
        assert!(r.summary.all_pass);
        assert_eq!("second_order".parse::<Experiment>().unwrap(), Experiment::SecondOrder);
    }
}
