//! Experiment drivers behind the `xanfis` binary: repeated training runs,
//! the initial-scale stability study, the MO-ANFIS weight sweep with
//! Pareto extraction, and partition export.
//!
//! Runs are independent and may execute on a worker pool; every output file
//! is written afterwards from the run list in run-id order, so outputs are
//! byte-identical across repeated invocations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{load_csv, split_scale, synth_regression, DatasetManifest, DatasetSplit, Scaler};
use crate::error::{Error, Result};
use crate::fcm::{derive_scales, fcm_fit, FcmConfig};
use crate::inference::{predict, ConsequentOrder, ModelFile, RuleBase};
use crate::membership::{clamp_center, clamp_scale, mf_eval, MfKind};
use crate::metrics::{pareto_front, EvalReport, ParetoPoint, RUN_CSV_HEADER};
use crate::numerics::{mean_ci95, Matrix};
use crate::training::{
    train, write_trace_csv, write_trajectory_csv, Mode, TrainConfig, TrainOutcome,
};

pub const SPLIT_FRACTIONS: (f64, f64, f64) = (0.7, 0.1, 0.2);

/// Where the rows come from: a manifest file or a synthetic generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DataSource {
    pub manifest: Option<PathBuf>,
    pub synth: Option<String>,
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource {
            manifest: None,
            synth: Some("sinc2d".into()),
            n: 2000,
            noise: 0.05,
            seed: 0,
        }
    }
}

impl DataSource {
    pub fn load(&self) -> Result<(Matrix, Vec<f64>)> {
        match (&self.manifest, &self.synth) {
            (Some(m), _) => load_csv(&DatasetManifest::read(m)?),
            (None, Some(name)) => synth_regression(name, self.n, self.noise, self.seed),
            (None, None) => Err(Error::Config(
                "data source needs a manifest or a synth name".into(),
            )),
        }
    }

    fn label(&self) -> String {
        match (&self.manifest, &self.synth) {
            (Some(m), _) => m.display().to_string(),
            (None, Some(s)) => s.clone(),
            _ => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub data: DataSource,
    pub train: TrainConfig,
    pub fcm: FcmConfig,
    pub rules: usize,
    pub mf_kind: MfKind,
    pub order: ConsequentOrder,
    /// Uniform initial scale; `None` derives scales from the clustering.
    pub init_scale: Option<f64>,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    pub workers: usize,
    pub trajectory: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            data: DataSource::default(),
            train: TrainConfig::default(),
            fcm: FcmConfig::default(),
            rules: 5,
            mf_kind: MfKind::Cauchy,
            order: ConsequentOrder::Zero,
            init_scale: None,
            seeds: (0..10).collect(),
            out: PathBuf::from("runs"),
            workers: 1,
            trajectory: false,
        }
    }
}

impl ExperimentConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.rules < 2 {
            return Err(Error::Config(format!(
                "need at least 2 rules, got {}",
                self.rules
            )));
        }
        if let Some(s) = self.init_scale {
            if !(s > 0.0) {
                return Err(Error::Config(format!(
                    "init_scale must be positive, got {s}"
                )));
            }
        }
        self.train.validate()
    }
}

/// Weight grid for the MO-ANFIS sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub count: usize,
    pub lo: f64,
    pub hi: f64,
    /// Membership kind of the single-objective ANFIS reference run.
    pub anfis_mf: MfKind,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            count: 20,
            lo: 0.01,
            hi: 10.0,
            anfis_mf: MfKind::Gaussian,
        }
    }
}

impl SweepSpec {
    /// Log-spaced weights from `lo` to `hi`, endpoints exact.
    pub fn weights(&self) -> Result<Vec<f64>> {
        if self.count < 1 || !(self.lo > 0.0) || !(self.hi >= self.lo) {
            return Err(Error::Config(format!(
                "weight grid needs count >= 1 and 0 < lo <= hi, got {} over [{}, {}]",
                self.count, self.lo, self.hi
            )));
        }
        if self.count == 1 {
            return Ok(vec![self.lo]);
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let last = self.count - 1;
        Ok((0..self.count)
            .map(|k| match k {
                0 => self.lo,
                k if k == last => self.hi,
                k => (a + (b - a) * k as f64 / last as f64).exp(),
            })
            .collect())
    }
}

/// One training run as the drivers describe it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub run_id: String,
    pub seed: u64,
    pub mf_kind: MfKind,
    pub init_scale: Option<f64>,
    pub train: TrainConfig,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub spec: RunSpec,
    pub rules: usize,
    pub outcome: TrainOutcome,
    pub diverged_at: Option<usize>,
    pub report: EvalReport,
    pub scaler: Scaler,
}

impl RunRecord {
    fn csv_row(&self) -> String {
        let t = &self.spec.train;
        let r = &self.report;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.spec.run_id,
            t.mode,
            self.spec.mf_kind,
            self.spec.seed,
            self.rules,
            t.lr_backward,
            t.lr_xpass,
            t.lambda,
            t.d_target,
            t.mo_weight,
            self.outcome.best_epoch,
            r.mse,
            r.rmse,
            r.mae,
            r.r2,
            r.mean_d
        )
    }
}

/// Seeded split plus FCM initialization for one run.
pub fn initial_rule_base(
    split: &DatasetSplit,
    cfg: &ExperimentConfig,
    kind: MfKind,
    init_scale: Option<f64>,
    seed: u64,
) -> Result<RuleBase> {
    let fcm_cfg = FcmConfig {
        n_clusters: cfg.rules,
        seed,
        ..cfg.fcm
    };
    let fcm = fcm_fit(&split.x_train, &fcm_cfg)?;
    let mut scales = derive_scales(&split.x_train, &fcm, init_scale)?;
    scales
        .as_mut_slice()
        .iter_mut()
        .for_each(|s| *s = clamp_scale(*s));
    let mut centers = fcm.centers;
    centers
        .as_mut_slice()
        .iter_mut()
        .for_each(|c| *c = clamp_center(*c));
    RuleBase::new(kind, centers, scales, cfg.order)
}

/// Split, initialize, train and evaluate on the test partition.
///
/// Divergence is not an error here: the record keeps the best snapshot
/// reached and the epoch it blew up at.
pub fn run_single(
    x: &Matrix,
    y: &[f64],
    cfg: &ExperimentConfig,
    spec: &RunSpec,
) -> Result<RunRecord> {
    let split = split_scale(x, y, SPLIT_FRACTIONS, spec.seed)?;
    let rb0 = initial_rule_base(&split, cfg, spec.mf_kind, spec.init_scale, spec.seed)?;
    let (outcome, diverged_at) = match train(
        &split.x_train,
        &split.y_train,
        &split.x_val,
        &split.y_val,
        &rb0,
        &spec.train,
    ) {
        Ok(o) => (o, None),
        Err(Error::Diverged { epoch, partial }) => (*partial, Some(epoch)),
        Err(e) => return Err(e),
    };
    let yhat = predict(&outcome.model, &split.x_test)?;
    let report = EvalReport::new(&split.y_test, &yhat, &outcome.model)?;
    Ok(RunRecord {
        spec: spec.clone(),
        rules: cfg.rules,
        outcome,
        diverged_at,
        report,
        scaler: split.scaler,
    })
}

fn run_all(
    x: &Matrix,
    y: &[f64],
    cfg: &ExperimentConfig,
    specs: &[RunSpec],
) -> Result<Vec<RunRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let mut records: Vec<RunRecord> = pool.install(|| {
        specs
            .par_iter()
            .map(|s| run_single(x, y, cfg, s))
            .collect::<Result<Vec<_>>>()
    })?;
    records.sort_by(|a, b| a.spec.run_id.cmp(&b.spec.run_id));
    Ok(records)
}

/// Creates `dir` and checks a file can be written there.
pub fn ensure_writable(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".xanfis-write-probe");
    std::fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    std::fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

fn write_text(path: PathBuf, text: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    files.push(path);
    Ok(())
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct CommandReport {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub runs: Vec<RunRecord>,
}

impl CommandReport {
    fn warn(&mut self, msg: String) {
        log::warn!("{msg}");
        self.warnings.push(msg);
    }
}

fn ignored_knob_warnings(train: &TrainConfig, report: &mut CommandReport) {
    if train.mode != Mode::XAnfis && train.lr_xpass != 0.0 {
        report.warn(format!(
            "lr_xpass = {} is ignored in {} mode",
            train.lr_xpass, train.mode
        ));
    }
}

fn fmt_scale(s: f64) -> String {
    format!("{s}").replace('.', "p")
}

/// Trains one model per seed and writes models, traces, per-run metrics
/// and the R² / mean D confidence intervals.
///
/// Files: `model_<run>.json`, `trace_<run>.csv`, optional
/// `trajectory_<run>.csv`, `metrics.csv`, `reports.json`, `aggregate.csv`.
pub fn cmd_train(cfg: &ExperimentConfig) -> Result<CommandReport> {
    cfg.validate()?;
    ensure_writable(&cfg.out)?;
    let mut report = CommandReport::default();
    ignored_knob_warnings(&cfg.train, &mut report);

    let (x, y) = cfg.data.load()?;
    let specs: Vec<RunSpec> = cfg
        .seeds
        .iter()
        .map(|&seed| RunSpec {
            run_id: format!("{}-{}-seed{seed:04}", cfg.train.mode, cfg.mf_kind),
            seed,
            mf_kind: cfg.mf_kind,
            init_scale: cfg.init_scale,
            train: TrainConfig {
                seed,
                record_trajectory: cfg.trajectory,
                ..cfg.train.clone()
            },
        })
        .collect();
    let records = run_all(&x, &y, cfg, &specs)?;
    if let Some(bad) = records.iter().find(|r| r.diverged_at.is_some()) {
        return Err(Error::Diverged {
            epoch: bad.diverged_at.unwrap_or_default(),
            partial: Box::new(bad.outcome.clone()),
        });
    }

    let out = &cfg.out;
    let mut metrics = format!("{RUN_CSV_HEADER}\n");
    let mut reports = Vec::new();
    for r in &records {
        let id = &r.spec.run_id;
        ModelFile::from_rule_base(&r.outcome.model, Some(r.scaler.clone()))
            .write(&out.join(format!("model_{id}.json")))?;
        report.files.push(out.join(format!("model_{id}.json")));
        let trace_path = out.join(format!("trace_{id}.csv"));
        write_trace_csv(&trace_path, &r.outcome.trace)?;
        report.files.push(trace_path);
        if cfg.trajectory {
            let p = out.join(format!("trajectory_{id}.csv"));
            write_trajectory_csv(&p, &r.outcome.trace)?;
            report.files.push(p);
        }
        metrics.push_str(&r.csv_row());
        metrics.push('\n');
        reports.push(serde_json::json!({ "run_id": id, "report": r.report }));
    }
    write_text(out.join("metrics.csv"), &metrics, &mut report.files)?;
    let reports = serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n";
    write_text(out.join("reports.json"), &reports, &mut report.files)?;

    let mut agg = String::from("mode,mf_kind,metric,n,mean,ci_lo,ci_hi\n");
    for (name, vals) in [
        (
            "r2",
            records.iter().map(|r| r.report.r2).collect::<Vec<_>>(),
        ),
        ("mean_d", records.iter().map(|r| r.report.mean_d).collect()),
    ] {
        let n = vals.len();
        match mean_ci95(&vals) {
            Ok((m, lo, hi)) => writeln!(
                agg,
                "{},{},{name},{n},{m},{lo},{hi}",
                cfg.train.mode, cfg.mf_kind
            ),
            Err(_) => writeln!(
                agg,
                "{},{},{name},{n},{},,",
                cfg.train.mode, cfg.mf_kind, vals[0]
            ),
        }
        .expect("writing to a String");
    }
    write_text(out.join("aggregate.csv"), &agg, &mut report.files)?;
    report.runs = records;
    Ok(report)
}

/// Initial-scale stability study: single-objective ANFIS for each
/// membership kind and each uniform initial scale, with full parameter
/// trajectories.
///
/// Files: `trajectory_<run>.csv`, `trace_<run>.csv`, `init_study.csv`.
/// Divergent runs are reported with the metrics of their best snapshot.
pub fn cmd_init_study(cfg: &ExperimentConfig, scales: &[f64]) -> Result<CommandReport> {
    if scales.is_empty() {
        return Err(Error::Config("init study needs at least one scale".into()));
    }
    if let Some(s) = scales.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::Config(format!(
            "initial scales must be positive, got {s}"
        )));
    }
    cfg.validate()?;
    ensure_writable(&cfg.out)?;
    let mut report = CommandReport::default();
    if cfg.train.mode != Mode::Anfis {
        report.warn(format!(
            "init study trains single-objective anfis; configured mode {} is ignored",
            cfg.train.mode
        ));
    }
    let (x, y) = cfg.data.load()?;
    let mut specs = Vec::new();
    for (ki, kind) in [MfKind::Gaussian, MfKind::Cauchy].into_iter().enumerate() {
        for (si, &scale) in scales.iter().enumerate() {
            for &seed in &cfg.seeds {
                specs.push(RunSpec {
                    run_id: format!("{ki}{si:02}-{kind}-s{}-seed{seed:04}", fmt_scale(scale)),
                    seed,
                    mf_kind: kind,
                    init_scale: Some(scale),
                    train: TrainConfig {
                        mode: Mode::Anfis,
                        seed,
                        record_trajectory: true,
                        ..cfg.train.clone()
                    },
                });
            }
        }
    }
    let records = run_all(&x, &y, cfg, &specs)?;

    let out = &cfg.out;
    let mut summary =
        String::from("mf_kind,init_scale,seed,mse,rmse,mae,r2,mean_d,best_epoch,epochs,diverged\n");
    for r in &records {
        let id = &r.spec.run_id;
        let p = out.join(format!("trajectory_{id}.csv"));
        write_trajectory_csv(&p, &r.outcome.trace)?;
        report.files.push(p);
        let p = out.join(format!("trace_{id}.csv"));
        write_trace_csv(&p, &r.outcome.trace)?;
        report.files.push(p);
        let e = &r.report;
        writeln!(
            summary,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.spec.mf_kind,
            r.spec.init_scale.unwrap_or_default(),
            r.spec.seed,
            e.mse,
            e.rmse,
            e.mae,
            e.r2,
            e.mean_d,
            r.outcome.best_epoch,
            r.outcome.trace.len() - 1,
            r.diverged_at.map_or(String::new(), |k| k.to_string())
        )
        .expect("writing to a String");
    }
    write_text(out.join("init_study.csv"), &summary, &mut report.files)?;
    report.runs = records;
    Ok(report)
}

pub const POINTS_CSV_HEADER: &str = "run_id,mode,mf_kind,weight,r2,mean_d";

/// MO-ANFIS over a log-spaced weight grid, plus one ANFIS and one X-ANFIS
/// reference run, all at the first configured seed.
///
/// Files: `points.csv` (every run), `front.csv` (non-dominated MO-ANFIS
/// points), `metrics.csv`.
pub fn cmd_pareto_sweep(cfg: &ExperimentConfig, sweep: &SweepSpec) -> Result<CommandReport> {
    cfg.validate()?;
    let weights = sweep.weights()?;
    ensure_writable(&cfg.out)?;
    let mut report = CommandReport::default();
    let (x, y) = cfg.data.load()?;
    let seed = cfg.seeds[0];
    let base = TrainConfig {
        seed,
        record_trajectory: false,
        ..cfg.train.clone()
    };

    let mut specs: Vec<RunSpec> = weights
        .iter()
        .enumerate()
        .map(|(k, &w)| RunSpec {
            run_id: format!("mo_anfis-w{k:04}"),
            seed,
            mf_kind: MfKind::Cauchy,
            init_scale: cfg.init_scale,
            train: TrainConfig {
                mode: Mode::MoAnfis,
                mo_weight: w,
                ..base.clone()
            },
        })
        .collect();
    specs.push(RunSpec {
        run_id: "ref-anfis".into(),
        seed,
        mf_kind: sweep.anfis_mf,
        init_scale: cfg.init_scale,
        train: TrainConfig {
            mode: Mode::Anfis,
            ..base.clone()
        },
    });
    specs.push(RunSpec {
        run_id: "ref-x_anfis".into(),
        seed,
        mf_kind: MfKind::Cauchy,
        init_scale: cfg.init_scale,
        train: TrainConfig {
            mode: Mode::XAnfis,
            ..base
        },
    });
    let records = run_all(&x, &y, cfg, &specs)?;
    for r in records.iter().filter(|r| r.diverged_at.is_some()) {
        report.warn(format!(
            "run {} diverged at epoch {:?}",
            r.spec.run_id, r.diverged_at
        ));
    }

    let point_row = |r: &RunRecord| {
        let weight = match r.spec.train.mode {
            Mode::MoAnfis => r.spec.train.mo_weight.to_string(),
            _ => String::new(),
        };
        format!(
            "{},{},{},{weight},{},{}\n",
            r.spec.run_id, r.spec.train.mode, r.spec.mf_kind, r.report.r2, r.report.mean_d
        )
    };
    let mut points = format!("{POINTS_CSV_HEADER}\n");
    let mut metrics = format!("{RUN_CSV_HEADER}\n");
    for r in &records {
        points.push_str(&point_row(r));
        metrics.push_str(&r.csv_row());
        metrics.push('\n');
    }
    let mo: Vec<ParetoPoint> = records
        .iter()
        .filter(|r| r.spec.train.mode == Mode::MoAnfis)
        .map(|r| ParetoPoint {
            run_id: r.spec.run_id.clone(),
            r2: r.report.r2,
            mean_d: r.report.mean_d,
            config: format!("weight={}", r.spec.train.mo_weight),
        })
        .collect();
    let mut front = format!("{POINTS_CSV_HEADER}\n");
    for p in pareto_front(&mo) {
        let r = records
            .iter()
            .find(|r| r.spec.run_id == p.run_id)
            .expect("front point comes from a run");
        front.push_str(&point_row(r));
    }
    write_text(cfg.out.join("points.csv"), &points, &mut report.files)?;
    write_text(cfg.out.join("front.csv"), &front, &mut report.files)?;
    write_text(cfg.out.join("metrics.csv"), &metrics, &mut report.files)?;
    report.runs = records;
    Ok(report)
}

/// Writes `centers.csv` (`rule,feature,center,scale`) and `curves.csv`
/// (`rule,feature,x,membership`) with each set sampled on a uniform grid
/// over `[0, 1]`.
pub fn cmd_export_partition(
    model: &Path,
    samples_per_curve: usize,
    out: &Path,
) -> Result<CommandReport> {
    if samples_per_curve < 2 {
        return Err(Error::Config(format!(
            "samples_per_curve must be at least 2, got {samples_per_curve}"
        )));
    }
    let rb = ModelFile::read(model)?.rule_base()?;
    ensure_writable(out)?;
    let mut report = CommandReport::default();
    let mut centers = String::from("rule,feature,center,scale\n");
    let mut curves = String::from("rule,feature,x,membership\n");
    for j in 0..rb.n_rules() {
        for f in 0..rb.n_features() {
            let p = rb.params(j, f);
            writeln!(centers, "{j},{f},{},{}", p.center, p.scale).expect("writing to a String");
            for k in 0..samples_per_curve {
                let xv = k as f64 / (samples_per_curve - 1) as f64;
                writeln!(curves, "{j},{f},{xv},{}", mf_eval(rb.mf_kind, xv, p))
                    .expect("writing to a String");
            }
        }
    }
    write_text(out.join("centers.csv"), &centers, &mut report.files)?;
    write_text(out.join("curves.csv"), &curves, &mut report.files)?;
    Ok(report)
}

impl std::fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} on {} | {} rules, {} | seeds {:?} -> {}",
            self.train.mode,
            self.data.label(),
            self.rules,
            self.mf_kind,
            self.seeds,
            self.out.display()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_grid() {
        let w = SweepSpec {
            count: 20,
            ..SweepSpec::default()
        }
        .weights()
        .unwrap();
        assert_eq!(w.len(), 20);
        assert_eq!((w[0], w[19]), (0.01, 10.0));
        for pair in w.windows(2) {
            let ratio = pair[1] / pair[0];
            assert!((ratio - 1000f64.powf(1.0 / 19.0)).abs() < 1e-9);
        }
        assert_eq!(
            SweepSpec {
                count: 1,
                ..SweepSpec::default()
            }
            .weights()
            .unwrap(),
            vec![0.01]
        );
        assert!(SweepSpec {
            count: 0,
            ..SweepSpec::default()
        }
        .weights()
        .is_err());
        assert!(SweepSpec {
            lo: 0.0,
            ..SweepSpec::default()
        }
        .weights()
        .is_err());
    }

    #[test]
    fn config_from_toml() {
        let cfg: ExperimentConfig = toml::from_str(
            r#"
            rules = 10
            seeds = [1, 2]
            mf_kind = "gaussian"
            [data]
            synth = "friedman"
            n = 300
            [train]
            mode = "mo_anfis"
            mo_weight = 0.5
            "#,
        )
        .unwrap();
        assert_eq!(cfg.rules, 10);
        assert_eq!(cfg.train.mode, Mode::MoAnfis);
        assert_eq!(cfg.train.lr_backward, 0.1);
        assert_eq!(cfg.data.noise, 0.05);
        assert_eq!(cfg.mf_kind, MfKind::Gaussian);
        assert!(cfg.validate().is_ok());
        assert!(ExperimentConfig {
            seeds: vec![],
            ..cfg
        }
        .validate()
        .is_err());
    }
}
