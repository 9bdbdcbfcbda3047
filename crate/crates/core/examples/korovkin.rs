//! Uniform convergence of T* on the Korovkin test functions as q_n -> 1.

use qdunkl::experiments::{korovkin_run, ExperimentConfig};

fn main() -> qdunkl::Result<()> {
    let report = korovkin_run(&ExperimentConfig::default())?;
    for (name, values) in &report.summary.estimates {
        let shown: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
        println!("{name:<20} {}", shown.join("  "));
    }
    println!(
        "trend ok: {:?}, all pass: {}",
        report.summary.trend_ok, report.summary.all_pass
    );
    for note in &report.summary.notes {
        println!("note: {note}");
    }
    Ok(())
}
