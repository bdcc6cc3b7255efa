//! Regression errors, partition distinguishability, overlap measures
//! between fuzzy sets, and Pareto-front extraction over (R², mean D).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::RuleBase;
use crate::membership::{mf_eval, FuzzySetParams, MfKind};
use crate::training::{adjacency_pairs, distinguishability};

/// Integration domain for overlap measures.
pub const OVERLAP_DOMAIN: (f64, f64) = (-0.5, 1.5);
pub const DEFAULT_GRID: usize = 2001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    pub r2: f64,
    pub mean_d: f64,
    pub per_feature_d: Vec<f64>,
}

impl EvalReport {
    pub fn new(y: &[f64], yhat: &[f64], rb: &RuleBase) -> Result<Self> {
        let RegressionMetrics { mse, rmse, mae, r2 } = regression_metrics(y, yhat)?;
        let (mean_d, per_feature_d) = mean_distinguishability(rb)?;
        Ok(EvalReport {
            mse,
            rmse,
            mae,
            r2,
            mean_d,
            per_feature_d,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionMetrics {
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    pub r2: f64,
}

pub fn regression_metrics(y: &[f64], yhat: &[f64]) -> Result<RegressionMetrics> {
    if y.len() != yhat.len() {
        return Err(Error::Dimension(format!(
            "{} targets vs {} predictions",
            y.len(),
            yhat.len()
        )));
    }
    if y.len() < 2 {
        return Err(Error::InsufficientData(
            "metrics need at least 2 samples".into(),
        ));
    }
    let n = y.len() as f64;
    let sse: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b).powi(2)).sum();
    let sae: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b).abs()).sum();
    let mean = y.iter().sum::<f64>() / n;
    let sst: f64 = y.iter().map(|a| (a - mean).powi(2)).sum();
    if sst == 0.0 {
        return Err(Error::ConstantTarget);
    }
    let mse = sse / n;
    Ok(RegressionMetrics {
        mse,
        rmse: mse.sqrt(),
        mae: sae / n,
        r2: 1.0 - sse / sst,
    })
}

/// Mean adjacent-pair distance over all features, plus the per-feature
/// means.
pub fn mean_distinguishability(rb: &RuleBase) -> Result<(f64, Vec<f64>)> {
    if rb.n_rules() < 2 {
        return Err(Error::NoPairs);
    }
    let nf = rb.n_features();
    let mut sums = vec![0.0; nf];
    let mut counts = vec![0usize; nf];
    for p in adjacency_pairs(&rb.centers) {
        sums[p.feature] += distinguishability(
            rb.params(p.set_lo, p.feature),
            rb.params(p.set_hi, p.feature),
        );
        counts[p.feature] += 1;
    }
    let total: f64 = sums.iter().sum();
    let per_feature = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    Ok((total / counts.iter().sum::<usize>() as f64, per_feature))
}

fn grid_points(grid: usize) -> impl Iterator<Item = f64> {
    let (lo, hi) = OVERLAP_DOMAIN;
    let step = (hi - lo) / (grid - 1) as f64;
    (0..grid).map(move |k| lo + k as f64 * step)
}

/// `|A ∩ B| / |A ∪ B|` with min/max as intersection/union, integrated by
/// the trapezoid rule over [`OVERLAP_DOMAIN`].
pub fn jaccard_numeric(a: FuzzySetParams, b: FuzzySetParams, kind: MfKind, grid: usize) -> f64 {
    let grid = grid.max(2);
    let (lo, hi) = OVERLAP_DOMAIN;
    let h = (hi - lo) / (grid - 1) as f64;
    let (mut inter, mut union) = (0.0, 0.0);
    for (k, x) in grid_points(grid).enumerate() {
        let w = if k == 0 || k == grid - 1 { 0.5 * h } else { h };
        let (ma, mb) = (mf_eval(kind, x, a), mf_eval(kind, x, b));
        inter += w * ma.min(mb);
        union += w * ma.max(mb);
    }
    if union == 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// `sup_x min(μ_A(x), μ_B(x))` over the grid.
pub fn possibility(a: FuzzySetParams, b: FuzzySetParams, kind: MfKind, grid: usize) -> f64 {
    grid_points(grid.max(2))
        .map(|x| mf_eval(kind, x, a).min(mf_eval(kind, x, b)))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub run_id: String,
    pub r2: f64,
    pub mean_d: f64,
    /// Free-form description of the run (mode, weight, ...).
    pub config: String,
}

/// `a` dominates `b` when it is at least as good in both R² and mean D and
/// strictly better in one.
pub fn dominates(a: &ParetoPoint, b: &ParetoPoint) -> bool {
    a.r2 >= b.r2 && a.mean_d >= b.mean_d && (a.r2 > b.r2 || a.mean_d > b.mean_d)
}

/// Non-dominated subset, sorted by R² descending (ties: mean D descending,
/// then run id).
///
/// Sweeps points in that order keeping the best mean D seen at strictly
/// higher R²; within a group of equal R² only the group maximum survives,
/// and exact duplicates are all kept.
pub fn pareto_front(points: &[ParetoPoint]) -> Vec<ParetoPoint> {
    let mut sorted: Vec<&ParetoPoint> = points.iter().collect();
    sorted.sort_by(|a, b| {
        b.r2.total_cmp(&a.r2)
            .then(b.mean_d.total_cmp(&a.mean_d))
            .then(a.run_id.cmp(&b.run_id))
    });
    let mut front = Vec::new();
    let mut best_above = f64::NEG_INFINITY;
    let mut i = 0;
    while i < sorted.len() {
        let r2 = sorted[i].r2;
        let group_max = sorted[i].mean_d;
        let mut k = i;
        while k < sorted.len() && sorted[k].r2 == r2 {
            if sorted[k].mean_d == group_max && group_max > best_above {
                front.push(sorted[k].clone());
            }
            k += 1;
        }
        best_above = best_above.max(group_max);
        i = k;
    }
    front
}

/// CSV header for per-run metric rows.
pub const RUN_CSV_HEADER: &str =
    "run_id,mode,mf_kind,seed,rules,lr_backward,lr_xpass,lambda,d_target,mo_weight,best_epoch,mse,rmse,mae,r2,mean_d";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::ConsequentOrder;
    use crate::numerics::{Matrix, RandomStream};

    fn pt(id: &str, r2: f64, d: f64) -> ParetoPoint {
        ParetoPoint {
            run_id: id.into(),
            r2,
            mean_d: d,
            config: String::new(),
        }
    }

    fn brute_force_front(points: &[ParetoPoint]) -> Vec<ParetoPoint> {
        points
            .iter()
            .filter(|p| !points.iter().any(|q| dominates(q, p)))
            .cloned()
            .collect()
    }

    #[test]
    fn regression_examples() {
        let y = [0.0, 1.0, 2.0];
        let m = regression_metrics(&y, &y).unwrap();
        assert_eq!((m.mse, m.rmse, m.mae, m.r2), (0.0, 0.0, 0.0, 1.0));
        let m = regression_metrics(&y, &[1.0; 3]).unwrap();
        assert!(m.r2.abs() < 1e-15);
        let m = regression_metrics(&y, &[0.0, 1.0, 3.0]).unwrap();
        assert!((m.mse - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.rmse - 0.57735).abs() < 1e-5);
        assert!((m.mae - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.r2 - 0.5).abs() < 1e-15);
        assert!(matches!(
            regression_metrics(&[1.0, 1.0], &[0.0, 1.0]),
            Err(Error::ConstantTarget)
        ));
    }

    fn rb(centers: &[Vec<f64>], scales: &[Vec<f64>]) -> RuleBase {
        RuleBase::new(
            MfKind::Cauchy,
            Matrix::from_rows(centers).unwrap(),
            Matrix::from_rows(scales).unwrap(),
            ConsequentOrder::Zero,
        )
        .unwrap()
    }

    #[test]
    fn distinguishability_examples() {
        let same = rb(&vec![vec![0.3, 0.4]; 3], &vec![vec![0.1, 0.2]; 3]);
        assert_eq!(mean_distinguishability(&same).unwrap().0, 0.0);
        let spread = rb(&[vec![0.0], vec![0.5], vec![1.0]], &vec![vec![0.1]; 3]);
        let (m, per) = mean_distinguishability(&spread).unwrap();
        assert!((m - 0.5).abs() < 1e-15);
        assert_eq!(per.len(), 1);
        let one = rb(&[vec![0.3]], &[vec![0.1]]);
        assert!(matches!(mean_distinguishability(&one), Err(Error::NoPairs)));
    }

    #[test]
    fn distinguishability_matches_enumeration() {
        let mut rng = RandomStream::new(17);
        for _ in 0..50 {
            let (r, f) = (2 + rng.next_below(6), 1 + rng.next_below(4));
            let c: Vec<Vec<f64>> = (0..r)
                .map(|_| (0..f).map(|_| rng.next_f64()).collect())
                .collect();
            let s: Vec<Vec<f64>> = (0..r)
                .map(|_| (0..f).map(|_| rng.uniform(0.01, 1.0)).collect())
                .collect();
            let model = rb(&c, &s);
            // for each set, its successor is the set with the next-larger center
            let mut total = 0.0;
            for k in 0..f {
                for i in 0..r {
                    let succ = (0..r)
                        .filter(|&j| (c[j][k], j) > (c[i][k], i))
                        .min_by(|&a, &b| c[a][k].total_cmp(&c[b][k]).then(a.cmp(&b)));
                    if let Some(j) = succ {
                        total += ((c[i][k] - c[j][k]).powi(2) + (s[i][k] - s[j][k]).powi(2)).sqrt();
                    }
                }
            }
            let expected = total / (f * (r - 1)) as f64;
            let got = mean_distinguishability(&model).unwrap().0;
            assert!((got - expected).abs() < 1e-12);

            let perm: Vec<usize> = (0..r).rev().collect();
            let permuted = mean_distinguishability(&model.permute_rules(&perm))
                .unwrap()
                .0;
            assert!((permuted - got).abs() < 1e-12);
        }
    }

    #[test]
    fn jaccard_examples() {
        let a = FuzzySetParams::new(0.3, 0.1);
        for kind in [MfKind::Gaussian, MfKind::Cauchy] {
            assert!((jaccard_numeric(a, a, kind, DEFAULT_GRID) - 1.0).abs() < 1e-9);
        }
        let far = jaccard_numeric(
            FuzzySetParams::new(0.0, 0.01),
            FuzzySetParams::new(1.0, 0.01),
            MfKind::Cauchy,
            DEFAULT_GRID,
        );
        assert!(far < 0.05, "{far}");
        let b = FuzzySetParams::new(0.6, 0.25);
        assert_eq!(
            jaccard_numeric(a, b, MfKind::Cauchy, 500),
            jaccard_numeric(b, a, MfKind::Cauchy, 500)
        );
    }

    #[test]
    fn jaccard_converges_with_grid() {
        let a = FuzzySetParams::new(0.35, 0.08);
        let b = FuzzySetParams::new(0.55, 0.12);
        let coarse = jaccard_numeric(a, b, MfKind::Cauchy, DEFAULT_GRID);
        let fine = jaccard_numeric(a, b, MfKind::Cauchy, 200_001);
        assert!((coarse - fine).abs() < 1e-4);
    }

    #[test]
    fn possibility_examples() {
        let a = FuzzySetParams::new(0.4, 0.2);
        assert_eq!(possibility(a, a, MfKind::Cauchy, DEFAULT_GRID), 1.0);
        let p = possibility(
            FuzzySetParams::new(0.0, 0.1),
            FuzzySetParams::new(1.0, 0.1),
            MfKind::Cauchy,
            DEFAULT_GRID,
        );
        assert!((p - 1.0 / 26.0).abs() < 1e-12);

        let mut rng = RandomStream::new(4);
        for _ in 0..5 {
            let a = FuzzySetParams::new(rng.next_f64(), rng.uniform(0.02, 0.5));
            let b = FuzzySetParams::new(rng.next_f64(), rng.uniform(0.02, 0.5));
            for kind in [MfKind::Gaussian, MfKind::Cauchy] {
                let coarse = possibility(a, b, kind, DEFAULT_GRID);
                let reference = possibility(a, b, kind, 1_000_000);
                // grid error is at most half a step times the steepest slope (< 0.65 / scale)
                let tol = 0.65 * 5e-4 / a.scale.min(b.scale);
                assert!((coarse - reference).abs() < tol, "{coarse} vs {reference}");
                assert_eq!(coarse, possibility(b, a, kind, DEFAULT_GRID));
                assert!((0.0..=1.0).contains(&coarse));
            }
        }
    }

    #[test]
    fn pareto_examples() {
        let pts = vec![
            pt("a", 1.0, 1.0),
            pt("b", 2.0, 0.5),
            pt("c", 0.5, 2.0),
            pt("d", 0.9, 0.9),
        ];
        let front = pareto_front(&pts);
        let ids: Vec<&str> = front.iter().map(|p| p.run_id.as_str()).collect();
        assert_eq!(ids, ["b", "a", "c"]);
        assert_eq!(pareto_front(&pts[..1]), pts[..1].to_vec());
        assert!(pareto_front(&[]).is_empty());
    }

    #[test]
    fn pareto_ties_and_duplicates() {
        let pts = vec![
            pt("a", 1.0, 1.0),
            pt("b", 1.0, 1.0),
            pt("c", 1.0, 0.5),
            pt("d", 0.5, 1.0),
            pt("e", 0.2, 3.0),
        ];
        let mut got: Vec<String> = pareto_front(&pts).into_iter().map(|p| p.run_id).collect();
        let mut want: Vec<String> = brute_force_front(&pts)
            .into_iter()
            .map(|p| p.run_id)
            .collect();
        got.sort();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(got, ["a", "b", "e"]);
    }

    #[test]
    fn pareto_matches_brute_force() {
        let mut rng = RandomStream::new(200);
        for round in 0..20 {
            let pts: Vec<ParetoPoint> = (0..200)
                .map(|i| {
                    // coarse values on some rounds to force ties
                    let (r2, d) = if round % 2 == 0 {
                        (rng.next_f64(), rng.next_f64())
                    } else {
                        (rng.next_below(10) as f64, rng.next_below(10) as f64)
                    };
                    pt(&format!("{i:03}"), r2, d)
                })
                .collect();
            let mut got = pareto_front(&pts);
            let mut want = brute_force_front(&pts);
            got.sort_by(|a, b| a.run_id.cmp(&b.run_id));
            want.sort_by(|a, b| a.run_id.cmp(&b.run_id));
            assert_eq!(got, want);
        }
    }
}
