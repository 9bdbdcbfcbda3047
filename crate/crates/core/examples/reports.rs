//! Writes a smooth-function rate report as CSV and JSON and reads the JSON back.

use qdunkl::experiments::{rate_bound_smooth, write_report, ExperimentConfig, ExperimentReport, ReportFormat};
use qdunkl::operators::TestFunction;

fn main() -> qdunkl::Result<()> {
    let cfg = ExperimentConfig {
        f: TestFunction::ExpDecay { c: 1.0 },
        n_list: vec![10, 100],
        ..ExperimentConfig::default()
    };
    let report = rate_bound_smooth(&cfg)?;
    let dir = std::env::temp_dir();
    let csv = dir.join("qdunkl_smooth.csv");
    let json = dir.join("qdunkl_smooth.json");
    write_report(&report, &csv, ReportFormat::Csv)?;
    write_report(&report, &json, ReportFormat::Json)?;
    let text = std::fs::read_to_string(&json).map_err(|source| qdunkl::Error::Io {
        path: json.clone(),
        source,
    })?;
    let back: ExperimentReport = serde_json::from_str(&text)?;
    println!("wrote {} and {}", csv.display(), json.display());
    println!(
        "{} rows, all_pass={}, max ratio {:.3}, round trip {}",
        back.rows.len(),
        back.summary.all_pass,
        back.summary.max_ratio.unwrap_or(f64::NAN),
        if back == report { "exact" } else { "differs" }
    );
    for line in report.to_csv().lines().filter(|l| l.starts_with('#')).take(5) {
        println!("{line}");
    }
    Ok(())
}
