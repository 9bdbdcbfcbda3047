//! Runs every rate experiment on the standard parameter matrix and prints one
//! summary line per configuration.

use std::time::Instant;

use qdunkl::experiments::{run_experiment, Experiment, ExperimentConfig};
use qdunkl::operators::TestFunction;

fn main() -> qdunkl::Result<()> {
    let cases = [
        (Experiment::Modulus, TestFunction::ExpDecay { c: 1.0 }),
        (Experiment::Modulus, TestFunction::Sine),
        (Experiment::Lipschitz, TestFunction::holder_cusp(0.5)),
        (Experiment::Lipschitz, TestFunction::Monomial { p: 1 }),
        (Experiment::Smooth, TestFunction::ExpDecay { c: 1.0 }),
        (Experiment::Smooth, TestFunction::Sine),
        (Experiment::SecondOrder, TestFunction::Sine),
        (Experiment::SecondOrder, TestFunction::ExpDecay { c: 1.0 }),
        (Experiment::Weighted, TestFunction::AbsShift { x0: 1.0 }),
        (Experiment::Weighted, TestFunction::Monomial { p: 2 }),
        (Experiment::Weighted, TestFunction::ExpDecay { c: 1.0 }),
    ];
    for (which, f) in cases {
        for mu in [0.75, 1.0] {
            for (alpha, beta) in [(0.0, 0.0), (1.0, 2.0)] {
                let cfg = ExperimentConfig {
                    f,
                    mu,
                    alpha,
                    beta,
                    n_list: if which.is_estimate() {
                        vec![10, 50, 200]
                    } else {
                        vec![10, 25, 50, 100, 200]
                    },
                    ..ExperimentConfig::default()
                };
                let start = Instant::now();
                let r = run_experiment(which, &cfg)?;
                let s = &r.summary;
                let estimates: Vec<String> = s
                    .estimates
                    .iter()
                    .map(|(k, v)| {
                        format!(
                            "{k}={v:.3?} spread={:.2}",
                            s.estimate_spread.get(k).unwrap_or(&f64::NAN)
                        )
                    })
                    .collect();
                println!(
                    "{which:<12} {:<18} mu={mu:<4} a={alpha} b={beta}  all_pass={} max_ratio={:.3} {} [{:.1}s]",
                    f.to_string(),
                    s.all_pass,
                    s.max_ratio.unwrap_or(f64::NAN),
                    estimates.join(" "),
                    start.elapsed().as_secs_f64()
                );
            }
        }
    }
    Ok(())
}
