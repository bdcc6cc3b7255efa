//! Alternating training of antecedents.
//!
//! Every epoch refits the consequents by ridge regression, takes one
//! gradient step on the antecedents for the training MSE (consequents held
//! fixed), and in X-ANFIS mode follows with one gradient step that pulls
//! the distance between rank-adjacent fuzzy sets toward a target. MO-ANFIS
//! replaces the two steps with a single step on the weighted sum. Training
//! stops early on validation MSE and returns the best snapshot.

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{
    firing_strengths, fit_consequents, mse, predict, rule_outputs, RuleBase, EPS_DENOM,
};
use crate::membership::{clamp_center, clamp_scale, mf_log_grad, FuzzySetParams};
use crate::metrics::mean_distinguishability;
use crate::numerics::Matrix;

/// Adjacent pairs closer than this get no X-pass gradient (the update
/// divides by their distance).
pub const D_SINGULAR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Anfis,
    MoAnfis,
    XAnfis,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Anfis => "anfis",
            Mode::MoAnfis => "mo_anfis",
            Mode::XAnfis => "x_anfis",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "anfis" => Ok(Mode::Anfis),
            "mo_anfis" | "mo" => Ok(Mode::MoAnfis),
            "x_anfis" | "x" | "xanfis" => Ok(Mode::XAnfis),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub mode: Mode,
    pub lr_backward: f64,
    pub lr_xpass: f64,
    pub lambda: f64,
    pub d_target: f64,
    /// Weight of the distinguishability term, MO-ANFIS only.
    pub mo_weight: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub clip_lo: f64,
    pub clip_hi: f64,
    pub seed: u64,
    /// Keep per-epoch copies of centers and scales in the trace.
    pub record_trajectory: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            mode: Mode::XAnfis,
            lr_backward: 0.1,
            lr_xpass: 0.1,
            lambda: 1e-4,
            d_target: 0.5,
            mo_weight: 1.0,
            max_epochs: 500,
            patience: 20,
            clip_lo: -1.0,
            clip_hi: 1.0,
            seed: 0,
            record_trajectory: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.clip_lo < self.clip_hi) {
            return bad(format!(
                "clip_lo {} must be below clip_hi {}",
                self.clip_lo, self.clip_hi
            ));
        }
        if !(self.d_target > 0.0) {
            return bad(format!("d_target must be positive, got {}", self.d_target));
        }
        if self.patience < 1 {
            return bad("patience must be at least 1".into());
        }
        if !(self.lambda >= 0.0) {
            return bad(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if !(self.lr_backward >= 0.0) || !(self.lr_xpass >= 0.0) {
            return bad("learning rates must be >= 0".into());
        }
        if self.mode == Mode::MoAnfis && !(self.mo_weight >= 0.0) {
            return bad(format!("mo_weight must be >= 0, got {}", self.mo_weight));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochTrace {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_mse: f64,
    pub mean_d: f64,
    pub centers: Option<Matrix>,
    pub scales: Option<Matrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdjacencyPair {
    pub feature: usize,
    pub set_lo: usize,
    pub set_hi: usize,
}

/// Antecedent gradient, both R x F.
#[derive(Debug, Clone, PartialEq)]
pub struct AntecedentGrad {
    pub centers: Matrix,
    pub scales: Matrix,
}

/// Training MSE of `rb` with its current consequents.
pub fn mse_loss(rb: &RuleBase, x: &Matrix, y: &[f64]) -> Result<f64> {
    Ok(mse(y, &predict(rb, x)?))
}

/// Gradient of the training MSE with respect to every center and scale,
/// with the consequents treated as constants.
///
/// For sample `t`, `ŷ = Σ_j β̄_j g_j` with `β̄_j = w_j / S`, so
/// `∂ŷ/∂w_j = (g_j − ŷ)/S` and `∂w_j/∂θ_jf = w_j ∂ln μ_jf/∂θ_jf`.
/// When the firing sum is below [`EPS_DENOM`] the denominator is the
/// constant floor and the `−ŷ` term drops out.
pub fn mse_gradient(rb: &RuleBase, x: &Matrix, y: &[f64]) -> Result<AntecedentGrad> {
    if y.len() != x.rows() {
        return Err(Error::Dimension(format!(
            "{} targets for {} samples",
            y.len(),
            x.rows()
        )));
    }
    let fm = firing_strengths(x, rb)?;
    let g = rule_outputs(rb, x);
    let (n, r, nf) = (x.rows(), rb.n_rules(), rb.n_features());
    let mut gc = Matrix::zeros(r, nf);
    let mut gs = Matrix::zeros(r, nf);
    for t in 0..n {
        let nb = fm.normalized.row(t);
        let gt = g.row(t);
        let yhat: f64 = nb.iter().zip(gt).map(|(b, g)| b * g).sum();
        let e = 2.0 * (yhat - y[t]) / n as f64;
        if e == 0.0 {
            continue;
        }
        let floored = fm.raw.row(t).iter().sum::<f64>() < EPS_DENOM;
        let xt = x.row(t);
        for j in 0..r {
            let lever = if floored { gt[j] } else { gt[j] - yhat };
            let coef = e * nb[j] * lever;
            if coef == 0.0 {
                continue;
            }
            for f in 0..nf {
                let (dc, ds) = mf_log_grad(rb.mf_kind, xt[f], rb.params(j, f));
                gc[(j, f)] += coef * dc;
                gs[(j, f)] += coef * ds;
            }
        }
    }
    Ok(AntecedentGrad {
        centers: gc,
        scales: gs,
    })
}

/// Rank-adjacent pairs per feature: sets are sorted by center (ties by rule
/// index) and each consecutive pair is emitted, `F·(R−1)` in total.
pub fn adjacency_pairs(centers: &Matrix) -> Vec<AdjacencyPair> {
    let (r, nf) = centers.shape();
    let mut pairs = Vec::with_capacity(nf * r.saturating_sub(1));
    let mut order: Vec<usize> = (0..r).collect();
    for f in 0..nf {
        order.sort_by(|&a, &b| centers[(a, f)].total_cmp(&centers[(b, f)]).then(a.cmp(&b)));
        pairs.extend(order.windows(2).map(|w| AdjacencyPair {
            feature: f,
            set_lo: w[0],
            set_hi: w[1],
        }));
    }
    pairs
}

/// Euclidean distance between two sets in (center, scale) space.
#[inline]
pub fn distinguishability(a: FuzzySetParams, b: FuzzySetParams) -> f64 {
    (a.center - b.center).hypot(a.scale - b.scale)
}

/// `Σ_pairs ½(D − D_target)²`.
pub fn xpass_loss(rb: &RuleBase, pairs: &[AdjacencyPair], d_target: f64) -> f64 {
    pairs
        .iter()
        .map(|p| {
            let d = distinguishability(
                rb.params(p.set_lo, p.feature),
                rb.params(p.set_hi, p.feature),
            );
            0.5 * (d - d_target).powi(2)
        })
        .sum()
}

/// Center gradient of [`xpass_loss`] for a fixed pairing. Scales get no
/// X-pass gradient.
pub fn xpass_gradient(rb: &RuleBase, pairs: &[AdjacencyPair], d_target: f64) -> Matrix {
    let mut gc = Matrix::zeros(rb.n_rules(), rb.n_features());
    for p in pairs {
        let a = rb.params(p.set_lo, p.feature);
        let b = rb.params(p.set_hi, p.feature);
        let d = distinguishability(a, b);
        if d < D_SINGULAR {
            continue;
        }
        let k = (d - d_target) / d;
        gc[(p.set_lo, p.feature)] += k * (a.center - b.center);
        gc[(p.set_hi, p.feature)] += k * (b.center - a.center);
    }
    gc
}

/// `θ ← project(θ − lr · clip(grad))` for the centers and, when given, the
/// scales.
pub fn apply_update(
    rb: &RuleBase,
    grad_centers: &Matrix,
    grad_scales: Option<&Matrix>,
    lr: f64,
    clip: (f64, f64),
) -> RuleBase {
    let mut out = rb.clone();
    let (lo, hi) = clip;
    for (c, &g) in out
        .centers
        .as_mut_slice()
        .iter_mut()
        .zip(grad_centers.as_slice())
    {
        *c = clamp_center(*c - lr * g.max(lo).min(hi));
    }
    if let Some(gs) = grad_scales {
        for (s, &g) in out.scales.as_mut_slice().iter_mut().zip(gs.as_slice()) {
            *s = clamp_scale(*s - lr * g.max(lo).min(hi));
        }
    }
    out
}

pub fn backward_pass(rb: &RuleBase, x: &Matrix, y: &[f64], cfg: &TrainConfig) -> Result<RuleBase> {
    let g = mse_gradient(rb, x, y)?;
    Ok(apply_update(
        rb,
        &g.centers,
        Some(&g.scales),
        cfg.lr_backward,
        (cfg.clip_lo, cfg.clip_hi),
    ))
}

pub fn xpass_update(rb: &RuleBase, cfg: &TrainConfig) -> RuleBase {
    let pairs = adjacency_pairs(&rb.centers);
    let gc = xpass_gradient(rb, &pairs, cfg.d_target);
    apply_update(rb, &gc, None, cfg.lr_xpass, (cfg.clip_lo, cfg.clip_hi))
}

/// Gradient of `MSE + α·Σ_pairs ½(D − D_target)²`; the second term only
/// touches centers.
pub fn mo_gradient(
    rb: &RuleBase,
    x: &Matrix,
    y: &[f64],
    cfg: &TrainConfig,
) -> Result<AntecedentGrad> {
    let mut g = mse_gradient(rb, x, y)?;
    let pairs = adjacency_pairs(&rb.centers);
    let gx = xpass_gradient(rb, &pairs, cfg.d_target);
    for (c, &d) in g.centers.as_mut_slice().iter_mut().zip(gx.as_slice()) {
        *c += cfg.mo_weight * d;
    }
    Ok(g)
}

pub fn mo_gradient_pass(
    rb: &RuleBase,
    x: &Matrix,
    y: &[f64],
    cfg: &TrainConfig,
) -> Result<RuleBase> {
    let g = mo_gradient(rb, x, y, cfg)?;
    Ok(apply_update(
        rb,
        &g.centers,
        Some(&g.scales),
        cfg.lr_backward,
        (cfg.clip_lo, cfg.clip_hi),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Improved,
    Waiting,
    Stop,
}

/// Patience counter on a loss that should go down.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best: f64,
    since_best: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping {
            patience,
            best: f64::INFINITY,
            since_best: 0,
        }
    }

    pub fn best(&self) -> f64 {
        self.best
    }

    pub fn observe(&mut self, loss: f64) -> Verdict {
        if loss < self.best {
            self.best = loss;
            self.since_best = 0;
            return Verdict::Improved;
        }
        self.since_best += 1;
        if self.since_best >= self.patience {
            Verdict::Stop
        } else {
            Verdict::Waiting
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxEpochs,
    EarlyStop,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Snapshot with the lowest validation MSE, consequents fitted.
    pub model: RuleBase,
    pub best_epoch: usize,
    pub trace: Vec<EpochTrace>,
    pub stop: StopReason,
}

fn snapshot(
    epoch: usize,
    rb: &RuleBase,
    x_train: &Matrix,
    y_train: &[f64],
    x_val: &Matrix,
    y_val: &[f64],
    record: bool,
) -> Result<EpochTrace> {
    Ok(EpochTrace {
        epoch,
        train_mse: mse_loss(rb, x_train, y_train)?,
        val_mse: mse_loss(rb, x_val, y_val)?,
        mean_d: mean_distinguishability(rb).map_or(0.0, |(m, _)| m),
        centers: record.then(|| rb.centers.clone()),
        scales: record.then(|| rb.scales.clone()),
    })
}

/// Runs the epoch loop from `rb0`.
///
/// Epoch 0 in the trace is the initial antecedents with fitted
/// consequents. A non-finite training or validation loss returns
/// [`Error::Diverged`] carrying everything recorded up to that point.
pub fn train(
    x_train: &Matrix,
    y_train: &[f64],
    x_val: &Matrix,
    y_val: &[f64],
    rb0: &RuleBase,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    rb0.validate()?;
    let record = cfg.record_trajectory;

    let mut rb = fit_consequents(rb0, x_train, y_train, cfg.lambda)?;
    let first = snapshot(0, &rb, x_train, y_train, x_val, y_val, record)?;
    let mut stopper = EarlyStopping::new(cfg.patience);
    let mut outcome = TrainOutcome {
        model: rb.clone(),
        best_epoch: 0,
        trace: Vec::new(),
        stop: StopReason::MaxEpochs,
    };
    let diverged = |epoch: usize, mut partial: TrainOutcome| {
        partial.stop = StopReason::Diverged;
        Err(Error::Diverged {
            epoch,
            partial: Box::new(partial),
        })
    };
    let finite0 = first.train_mse.is_finite() && first.val_mse.is_finite();
    stopper.observe(first.val_mse);
    outcome.trace.push(first);
    if !finite0 {
        return diverged(0, outcome);
    }

    for epoch in 1..=cfg.max_epochs {
        // rb carries consequents fitted at its current antecedents
        rb = match cfg.mode {
            Mode::Anfis | Mode::XAnfis => backward_pass(&rb, x_train, y_train, cfg)?,
            Mode::MoAnfis => mo_gradient_pass(&rb, x_train, y_train, cfg)?,
        };
        if cfg.mode == Mode::XAnfis {
            rb = xpass_update(&rb, cfg);
        }
        rb = fit_consequents(&rb, x_train, y_train, cfg.lambda)?;

        let tr = snapshot(epoch, &rb, x_train, y_train, x_val, y_val, record)?;
        let finite = tr.train_mse.is_finite() && tr.val_mse.is_finite();
        let verdict = stopper.observe(tr.val_mse);
        outcome.trace.push(tr);
        if !finite {
            return diverged(epoch, outcome);
        }
        match verdict {
            Verdict::Improved => {
                outcome.model = rb.clone();
                outcome.best_epoch = epoch;
            }
            Verdict::Waiting => {}
            Verdict::Stop => {
                outcome.stop = StopReason::EarlyStop;
                break;
            }
        }
    }
    Ok(outcome)
}

/// `epoch,train_mse,val_mse,mean_d`
pub fn write_trace_csv(path: &Path, trace: &[EpochTrace]) -> Result<()> {
    let mut out = String::from("epoch,train_mse,val_mse,mean_d\n");
    for t in trace {
        out.push_str(&format!(
            "{},{},{},{}\n",
            t.epoch, t.train_mse, t.val_mse, t.mean_d
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// `epoch,rule,feature,center,scale`, one row per parameter per recorded
/// epoch. Epochs without snapshots are skipped.
pub fn write_trajectory_csv(path: &Path, trace: &[EpochTrace]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "epoch,rule,feature,center,scale")?;
        for t in trace {
            let (Some(c), Some(s)) = (&t.centers, &t.scales) else {
                continue;
            };
            for j in 0..c.rows() {
                for f in 0..c.cols() {
                    writeln!(w, "{},{},{},{},{}", t.epoch, j, f, c[(j, f)], s[(j, f)])?;
                }
            }
        }
        w.flush()
    };
    emit().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::ConsequentOrder;
    use crate::membership::MfKind;
    use crate::numerics::RandomStream;

    fn rb_from(kind: MfKind, centers: &[Vec<f64>], scales: &[Vec<f64>]) -> RuleBase {
        RuleBase::new(
            kind,
            Matrix::from_rows(centers).unwrap(),
            Matrix::from_rows(scales).unwrap(),
            ConsequentOrder::Zero,
        )
        .unwrap()
    }

    #[test]
    fn adjacency_examples() {
        let c = Matrix::from_rows(&[vec![0.7], vec![0.1], vec![0.4]]).unwrap();
        let p = adjacency_pairs(&c);
        assert_eq!(
            p,
            vec![
                AdjacencyPair {
                    feature: 0,
                    set_lo: 1,
                    set_hi: 2
                },
                AdjacencyPair {
                    feature: 0,
                    set_lo: 2,
                    set_hi: 0
                },
            ]
        );
        assert_eq!(adjacency_pairs(&Matrix::filled(2, 3, 0.5)).len(), 3);
        let tie = Matrix::from_rows(&[vec![0.5], vec![0.2], vec![0.5]]).unwrap();
        let p = adjacency_pairs(&tie);
        assert_eq!((p[1].set_lo, p[1].set_hi), (0, 2));
    }

    #[test]
    fn distinguishability_examples() {
        let a = FuzzySetParams::new(0.2, 0.1);
        assert_eq!(distinguishability(a, a), 0.0);
        assert!((distinguishability(a, FuzzySetParams::new(0.5, 0.1)) - 0.3).abs() < 1e-15);
        let d = distinguishability(FuzzySetParams::new(0.3, 0.1), FuzzySetParams::new(0.6, 0.5));
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn xpass_worked_pair() {
        let rb = rb_from(
            MfKind::Cauchy,
            &[vec![0.4], vec![0.6]],
            &[vec![0.1], vec![0.1]],
        );
        let pairs = adjacency_pairs(&rb.centers);
        let g = xpass_gradient(&rb, &pairs, 0.5);
        assert!((g[(0, 0)] - 0.3).abs() < 1e-12);
        assert!((g[(1, 0)] + 0.3).abs() < 1e-12);
        let cfg = TrainConfig {
            lr_xpass: 0.1,
            d_target: 0.5,
            ..TrainConfig::default()
        };
        let next = xpass_update(&rb, &cfg);
        assert!((next.centers[(0, 0)] - 0.37).abs() < 1e-12);
        assert!((next.centers[(1, 0)] - 0.63).abs() < 1e-12);
        assert_eq!(next.scales, rb.scales);
    }

    #[test]
    fn xpass_at_target_is_fixed_point() {
        let rb = rb_from(
            MfKind::Cauchy,
            &[vec![0.0, 0.5], vec![0.5, 1.0]],
            &[vec![0.2, 0.2], vec![0.2, 0.2]],
        );
        let next = xpass_update(&rb, &TrainConfig::default());
        assert_eq!(next, rb);
    }

    #[test]
    fn xpass_direction() {
        let mut rng = RandomStream::new(6);
        let free = TrainConfig {
            clip_lo: -1e9,
            clip_hi: 1e9,
            lr_xpass: 0.05,
            ..TrainConfig::default()
        };
        for _ in 0..100 {
            let a = rng.uniform(0.3, 0.7);
            let gap = rng.uniform(0.01, 0.25);
            let s = rng.uniform(0.05, 0.5);
            let target = rng.uniform(0.05, 0.3);
            let cfg = TrainConfig {
                d_target: target,
                ..free.clone()
            };
            let rb = rb_from(
                MfKind::Cauchy,
                &[vec![a], vec![a + gap]],
                &[vec![s], vec![s]],
            );
            let next = xpass_update(&rb, &cfg);
            let d0 = gap;
            let d1 = next.centers[(1, 0)] - next.centers[(0, 0)];
            if d0 < target {
                assert!(d1 > d0);
            } else if d0 > target {
                assert!(d1 < d0);
            }
        }
    }

    #[test]
    fn xpass_skips_coincident_sets() {
        let rb = rb_from(
            MfKind::Cauchy,
            &[vec![0.5], vec![0.5]],
            &[vec![0.1], vec![0.1]],
        );
        let g = xpass_gradient(&rb, &adjacency_pairs(&rb.centers), 0.5);
        assert!(g.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn clipping_arithmetic() {
        let rb = rb_from(MfKind::Cauchy, &[vec![0.5]], &[vec![0.5]]);
        let g = Matrix::filled(1, 1, 10.0);
        let next = apply_update(&rb, &g, Some(&g), 0.1, (-1.0, 1.0));
        assert!((next.centers[(0, 0)] - 0.4).abs() < 1e-15);
        assert!((next.scales[(0, 0)] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn perfect_fit_is_stationary() {
        // one rule reproduces a constant target exactly
        let rb = rb_from(MfKind::Cauchy, &[vec![0.3, 0.6]], &[vec![0.2, 0.2]]);
        let mut rng = RandomStream::new(1);
        let x = Matrix::from_vec(20, 2, (0..40).map(|_| rng.next_f64()).collect()).unwrap();
        let y = vec![0.25; 20];
        let rb = fit_consequents(&rb, &x, &y, 0.0).unwrap();
        let g = mse_gradient(&rb, &x, &y).unwrap();
        assert!(g
            .centers
            .as_slice()
            .iter()
            .chain(g.scales.as_slice())
            .all(|&v| v == 0.0));
        assert_eq!(
            backward_pass(&rb, &x, &y, &TrainConfig::default()).unwrap(),
            rb
        );
    }

    #[test]
    fn mo_with_zero_weight_is_backward_pass() {
        let mut rng = RandomStream::new(14);
        let x = Matrix::from_vec(30, 2, (0..60).map(|_| rng.next_f64()).collect()).unwrap();
        let y: Vec<f64> = (0..30).map(|_| rng.next_f64()).collect();
        let rb = rb_from(
            MfKind::Cauchy,
            &[vec![0.2, 0.3], vec![0.5, 0.5], vec![0.9, 0.6]],
            &[vec![0.2, 0.3], vec![0.1, 0.4], vec![0.3, 0.2]],
        );
        let rb = fit_consequents(&rb, &x, &y, 1e-4).unwrap();
        let cfg = TrainConfig {
            mode: Mode::MoAnfis,
            mo_weight: 0.0,
            ..TrainConfig::default()
        };
        assert_eq!(
            mo_gradient_pass(&rb, &x, &y, &cfg).unwrap(),
            backward_pass(&rb, &x, &y, &cfg).unwrap()
        );
    }

    #[test]
    fn mo_no_update_at_optimum() {
        // constant target, one set per feature pair sitting at the target distance
        let rb = rb_from(
            MfKind::Cauchy,
            &[vec![0.25], vec![0.75]],
            &[vec![0.3], vec![0.3]],
        );
        let x = Matrix::from_rows(&[vec![0.5], vec![0.5], vec![0.5]]).unwrap();
        let y = vec![0.4; 3];
        let rb = fit_consequents(&rb, &x, &y, 1e-4).unwrap();
        let cfg = TrainConfig {
            mode: Mode::MoAnfis,
            mo_weight: 1.0,
            d_target: 0.5,
            ..TrainConfig::default()
        };
        let next = mo_gradient_pass(&rb, &x, &y, &cfg).unwrap();
        for (a, b) in next.centers.as_slice().iter().zip(rb.centers.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in next.scales.as_slice().iter().zip(rb.scales.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn early_stopping_counts() {
        let mut s = EarlyStopping::new(3);
        assert_eq!(s.observe(1.0), Verdict::Improved);
        assert_eq!(s.observe(1.0), Verdict::Waiting);
        assert_eq!(s.observe(1.0), Verdict::Waiting);
        assert_eq!(s.observe(1.0), Verdict::Stop);

        let mut s = EarlyStopping::new(1);
        for k in 0..50 {
            assert_eq!(s.observe(1.0 / (k + 1) as f64), Verdict::Improved);
        }
    }

    #[test]
    fn config_validation() {
        let ok = TrainConfig::default();
        assert!(ok.validate().is_ok());
        assert!(TrainConfig {
            clip_lo: 1.0,
            clip_hi: 1.0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(TrainConfig {
            d_target: 0.0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(TrainConfig { patience: 0, ..ok }.validate().is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("x-anfis".parse::<Mode>().unwrap(), Mode::XAnfis);
        assert_eq!("MO_ANFIS".parse::<Mode>().unwrap(), Mode::MoAnfis);
        assert!("sgd".parse::<Mode>().is_err());
    }
}
