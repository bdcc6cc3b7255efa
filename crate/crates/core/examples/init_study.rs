//! Initial-scale sensitivity of Gaussian and Cauchy ANFIS on the Friedman
//! benchmark. Trajectories and the summary table land in a temporary
//! directory.

use xanfis::experiment::{cmd_init_study, ExperimentConfig};

fn main() -> xanfis::Result<()> {
    let out = std::env::temp_dir().join("xanfis-example-init");
    let mut cfg = ExperimentConfig {
        rules: 10,
        seeds: vec![0],
        out: out.clone(),
        workers: 4,
        ..Default::default()
    };
    cfg.data.synth = Some("friedman".into());
    cfg.data.n = 1000;
    cfg.train.max_epochs = 200;
    cmd_init_study(&cfg, &[1.0, 0.25, 0.0625, 0.03125])?;
    print!(
        "{}",
        std::fs::read_to_string(out.join("init_study.csv")).expect("summary written")
    );
    println!("trajectories in {}", out.display());
    Ok(())
}
