//! Train ANFIS and X-ANFIS from the same initialization on the 2-D sinc
//! surface; print test metrics and the learned partition of each feature.
//!
//! ```text
//! cargo run --release --example fit_sinc
//! ```

use xanfis::data::{split_scale, synth_regression};
use xanfis::experiment::{initial_rule_base, ExperimentConfig, SPLIT_FRACTIONS};
use xanfis::inference::predict;
use xanfis::metrics::EvalReport;
use xanfis::{train, Mode, TrainConfig};

fn main() -> xanfis::Result<()> {
    let (x, y) = synth_regression("sinc2d", 1000, 0.05, 7)?;
    let split = split_scale(&x, &y, SPLIT_FRACTIONS, 7)?;
    let cfg = ExperimentConfig {
        rules: 5,
        ..Default::default()
    };
    let rb0 = initial_rule_base(&split, &cfg, cfg.mf_kind, None, 7)?;

    for mode in [Mode::Anfis, Mode::XAnfis] {
        let train_cfg = TrainConfig {
            mode,
            max_epochs: 300,
            ..Default::default()
        };
        let out = train(
            &split.x_train,
            &split.y_train,
            &split.x_val,
            &split.y_val,
            &rb0,
            &train_cfg,
        )?;
        let yhat = predict(&out.model, &split.x_test)?;
        let report = EvalReport::new(&split.y_test, &yhat, &out.model)?;
        println!(
            "{mode}: best epoch {} of {} ({:?})",
            out.best_epoch,
            out.trace.len() - 1,
            out.stop
        );
        println!(
            "  test mse {:.5}  rmse {:.4}  mae {:.4}  r2 {:.4}  mean D {:.3}",
            report.mse, report.rmse, report.mae, report.r2, report.mean_d
        );
        for f in 0..out.model.n_features() {
            let mut sets: Vec<_> = (0..out.model.n_rules())
                .map(|j| out.model.params(j, f))
                .collect();
            sets.sort_by(|a, b| a.center.total_cmp(&b.center));
            let cells: Vec<String> = sets
                .iter()
                .map(|p| format!("{:.3}/{:.3}", p.center, p.scale))
                .collect();
            println!("  feature {f} (center/scale): {}", cells.join("  "));
        }
    }
    Ok(())
}
