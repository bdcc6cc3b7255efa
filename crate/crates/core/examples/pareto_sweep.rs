//! A small MO-ANFIS weight sweep with ANFIS and X-ANFIS reference runs,
//! written to a temporary directory, and the resulting Pareto front.

use xanfis::experiment::{cmd_pareto_sweep, ExperimentConfig, SweepSpec};

fn main() -> xanfis::Result<()> {
    let out = std::env::temp_dir().join("xanfis-example-pareto");
    let mut cfg = ExperimentConfig {
        seeds: vec![0],
        out: out.clone(),
        workers: 4,
        ..Default::default()
    };
    cfg.data.n = 600;
    cfg.train.max_epochs = 150;
    let sweep = SweepSpec {
        count: 8,
        ..Default::default()
    };
    let report = cmd_pareto_sweep(&cfg, &sweep)?;
    for r in &report.runs {
        println!(
            "{:<14} {:<9} {:<8} r2 {:.4}  mean D {:.3}",
            r.spec.run_id, r.spec.train.mode, r.spec.mf_kind, r.report.r2, r.report.mean_d
        );
    }
    let front = std::fs::read_to_string(out.join("front.csv")).expect("front.csv written");
    println!("\nfront.csv:\n{front}");
    Ok(())
}
