//! End to end from a CSV file: manifest, loading, scaling, training, model
//! file round trip and partition export.

use xanfis::data::{load_csv, split_scale, DatasetManifest};
use xanfis::experiment::{
    cmd_export_partition, initial_rule_base, ExperimentConfig, SPLIT_FRACTIONS,
};
use xanfis::inference::predict;
use xanfis::{train, ConsequentOrder, ModelFile, RandomStream, TrainConfig};

fn main() -> xanfis::Result<()> {
    let dir = std::env::temp_dir().join("xanfis-example-csv");
    std::fs::create_dir_all(&dir).expect("temp dir");

    let mut rng = RandomStream::new(5);
    let mut csv = String::from("temp,pressure,humidity,output\n");
    for _ in 0..500 {
        let (t, p, h) = (
            rng.uniform(0.0, 35.0),
            rng.uniform(990.0, 1030.0),
            rng.uniform(20.0, 100.0),
        );
        let out = 480.0 - 2.0 * t + 0.05 * (p - 1010.0) - 0.1 * h + rng.normal();
        csv.push_str(&format!("{t},{p},{h},{out}\n"));
    }
    std::fs::write(dir.join("plant.csv"), csv).expect("csv written");
    std::fs::write(
        dir.join("plant.toml"),
        "csv_path = \"plant.csv\"\ntarget_column = \"output\"\n",
    )
    .expect("manifest written");

    let (x, y) = load_csv(&DatasetManifest::read(&dir.join("plant.toml"))?)?;
    let split = split_scale(&x, &y, SPLIT_FRACTIONS, 1)?;
    let cfg = ExperimentConfig {
        rules: 4,
        order: ConsequentOrder::First,
        ..Default::default()
    };
    let rb0 = initial_rule_base(&split, &cfg, cfg.mf_kind, None, 1)?;
    let out = train(
        &split.x_train,
        &split.y_train,
        &split.x_val,
        &split.y_val,
        &rb0,
        &TrainConfig {
            max_epochs: 100,
            ..Default::default()
        },
    )?;

    let model_path = dir.join("model.json");
    ModelFile::from_rule_base(&out.model, Some(split.scaler.clone())).write(&model_path)?;
    let restored = ModelFile::read(&model_path)?;
    let rb = restored.rule_base()?;
    let scaler = restored.scaler.expect("scaler stored with the model");

    // predictions back in the original units
    let yhat = scaler.inverse_y(&predict(&rb, &split.x_test)?);
    let truth = scaler.inverse_y(&split.y_test);
    let mae = yhat
        .iter()
        .zip(&truth)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / truth.len() as f64;
    println!("test MAE in original units: {mae:.3}");

    let exported = cmd_export_partition(&model_path, 101, &dir.join("partition"))?;
    for f in &exported.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
