//! Fuzzy c-means clustering used to place the initial rule antecedents.
//!
//! Rule `j` takes cluster `j`'s center in every feature, and its scale from
//! the fuzzy within-cluster dispersion of that feature (or a uniform
//! override when sweeping initial scales).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::membership::SCALE_MIN;
use crate::numerics::{Matrix, RandomStream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FcmConfig {
    pub n_clusters: usize,
    pub fuzziness: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for FcmConfig {
    fn default() -> Self {
        FcmConfig {
            n_clusters: 5,
            fuzziness: 2.0,
            tol: 1e-5,
            max_iter: 300,
            seed: 0,
        }
    }
}

impl FcmConfig {
    pub fn with_clusters(n_clusters: usize, seed: u64) -> Self {
        FcmConfig {
            n_clusters,
            seed,
            ..FcmConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_clusters < 2 {
            return Err(Error::Config(format!(
                "fcm needs at least 2 clusters, got {}",
                self.n_clusters
            )));
        }
        if !(self.fuzziness > 1.0) {
            return Err(Error::Config(format!(
                "fcm fuzziness must exceed 1, got {}",
                self.fuzziness
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!(
                "fcm tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FcmResult {
    /// R x F
    pub centers: Matrix,
    /// N x R, rows sum to one
    pub memberships: Matrix,
    pub iterations: usize,
    /// Largest absolute center coordinate change in the last iteration.
    pub final_shift: f64,
    pub fuzziness: f64,
    /// `Σ u^m d²` after each iteration.
    pub objective: Vec<f64>,
}

pub fn fcm_fit(x: &Matrix, cfg: &FcmConfig) -> Result<FcmResult> {
    cfg.validate()?;
    let (n, f) = x.shape();
    let r = cfg.n_clusters;
    if n < r {
        return Err(Error::InsufficientData(format!(
            "fcm with {r} clusters needs at least {r} rows, got {n}"
        )));
    }
    let m = cfg.fuzziness;

    let mut rng = RandomStream::new(cfg.seed);
    let mut u = Matrix::zeros(n, r);
    for t in 0..n {
        let row = u.row_mut(t);
        for v in row.iter_mut() {
            // bounded away from zero so every cluster starts with some weight
            *v = 0.05 + rng.next_f64();
        }
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= s);
    }

    let mut centers = update_centers(x, &u, m, r, f);
    let mut objective = Vec::new();
    let mut shift = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        update_memberships(x, &centers, m, &mut u);
        let next = update_centers(x, &u, m, r, f);
        shift = next
            .as_slice()
            .iter()
            .zip(centers.as_slice())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()));
        centers = next;
        objective.push(fcm_objective(x, &centers, &u, m));
        if shift < cfg.tol {
            break;
        }
    }

    Ok(FcmResult {
        centers,
        memberships: u,
        iterations,
        final_shift: shift,
        fuzziness: m,
        objective,
    })
}

fn update_centers(x: &Matrix, u: &Matrix, m: f64, r: usize, f: usize) -> Matrix {
    let mut num = Matrix::zeros(r, f);
    let mut den = vec![0.0; r];
    for (xt, ut) in x.row_iter().zip(u.row_iter()) {
        for j in 0..r {
            let w = ut[j].powf(m);
            den[j] += w;
            for (acc, &xv) in num.row_mut(j).iter_mut().zip(xt) {
                *acc += w * xv;
            }
        }
    }
    for j in 0..r {
        if den[j] > 0.0 {
            num.row_mut(j).iter_mut().for_each(|v| *v /= den[j]);
        }
    }
    num
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// `u_tj = 1 / Σ_k (d_tj / d_tk)^(2/(m−1))`, with points sitting exactly on
/// one or more centers split evenly among those centers.
fn update_memberships(x: &Matrix, centers: &Matrix, m: f64, u: &mut Matrix) {
    let r = centers.rows();
    let expo = 1.0 / (m - 1.0);
    let mut d2 = vec![0.0; r];
    for t in 0..x.rows() {
        let xt = x.row(t);
        for (j, d) in d2.iter_mut().enumerate() {
            *d = sq_dist(xt, centers.row(j));
        }
        let row = u.row_mut(t);
        let zeros = d2.iter().filter(|&&d| d == 0.0).count();
        if zeros > 0 {
            let share = 1.0 / zeros as f64;
            for (v, &d) in row.iter_mut().zip(&d2) {
                *v = if d == 0.0 { share } else { 0.0 };
            }
            continue;
        }
        for j in 0..r {
            let s: f64 = d2.iter().map(|&dk| (d2[j] / dk).powf(expo)).sum();
            row[j] = 1.0 / s;
        }
    }
}

pub fn fcm_objective(x: &Matrix, centers: &Matrix, u: &Matrix, m: f64) -> f64 {
    let mut total = 0.0;
    for (xt, ut) in x.row_iter().zip(u.row_iter()) {
        for (j, &uv) in ut.iter().enumerate() {
            total += uv.powf(m) * sq_dist(xt, centers.row(j));
        }
    }
    total
}

/// Initial antecedent scales, R x F.
///
/// With `override_scale` every entry takes that value. Otherwise
/// `scale_jf = sqrt(Σ_t u_tj^m (x_tf − c_jf)² / Σ_t u_tj^m)`, floored at
/// [`SCALE_MIN`].
pub fn derive_scales(x: &Matrix, res: &FcmResult, override_scale: Option<f64>) -> Result<Matrix> {
    let (r, f) = res.centers.shape();
    if x.cols() != f || res.memberships.shape() != (x.rows(), r) {
        return Err(Error::Dimension(format!(
            "derive_scales: data {}x{}, centers {r}x{f}, memberships {}x{}",
            x.rows(),
            x.cols(),
            res.memberships.rows(),
            res.memberships.cols()
        )));
    }
    if let Some(s) = override_scale {
        return Ok(Matrix::filled(r, f, s));
    }
    let m = res.fuzziness;
    let mut num = Matrix::zeros(r, f);
    let mut den = vec![0.0; r];
    for (xt, ut) in x.row_iter().zip(res.memberships.row_iter()) {
        for j in 0..r {
            let w = ut[j].powf(m);
            den[j] += w;
            let cj = res.centers.row(j);
            for k in 0..f {
                num[(j, k)] += w * (xt[k] - cj[k]).powi(2);
            }
        }
    }
    for j in 0..r {
        for k in 0..f {
            let var = if den[j] > 0.0 {
                num[(j, k)] / den[j]
            } else {
                0.0
            };
            num[(j, k)] = var.sqrt().max(SCALE_MIN);
        }
    }
    Ok(num)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synth_regression;

    fn two_blob() -> Matrix {
        synth_regression("two_blob", 200, 0.0, 11).unwrap().0
    }

    fn cloud_rows(x: &Matrix, near: f64) -> Vec<usize> {
        (0..x.rows())
            .filter(|&t| (x[(t, 0)] - near).abs() < 0.2)
            .collect()
    }

    fn nearest_center(res: &FcmResult, target: f64) -> usize {
        (0..res.centers.rows())
            .min_by(|&a, &b| {
                (res.centers[(a, 0)] - target)
                    .abs()
                    .total_cmp(&(res.centers[(b, 0)] - target).abs())
            })
            .unwrap()
    }

    #[test]
    fn recovers_cloud_means() {
        let x = two_blob();
        let res = fcm_fit(&x, &FcmConfig::with_clusters(2, 3)).unwrap();
        for near in [0.2, 0.8] {
            let rows = cloud_rows(&x, near);
            assert_eq!(rows.len(), 100);
            let j = nearest_center(&res, near);
            for k in 0..2 {
                let mean = rows.iter().map(|&t| x[(t, k)]).sum::<f64>() / rows.len() as f64;
                assert!((res.centers[(j, k)] - mean).abs() < 0.02);
            }
        }
    }

    #[test]
    fn scales_track_cloud_std() {
        let x = two_blob();
        let res = fcm_fit(&x, &FcmConfig::with_clusters(2, 3)).unwrap();
        let scales = derive_scales(&x, &res, None).unwrap();
        for near in [0.2, 0.8] {
            let rows = cloud_rows(&x, near);
            let j = nearest_center(&res, near);
            for k in 0..2 {
                let vals: Vec<f64> = rows.iter().map(|&t| x[(t, k)]).collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                let std = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                    / vals.len() as f64)
                    .sqrt();
                let rel = (scales[(j, k)] - std).abs() / std;
                assert!(rel < 0.2, "scale {} vs std {std}", scales[(j, k)]);
            }
        }
    }

    #[test]
    fn identical_rows_degenerate() {
        let x = Matrix::from_rows(&vec![vec![0.3, 0.7]; 10]).unwrap();
        let res = fcm_fit(&x, &FcmConfig::with_clusters(2, 1)).unwrap();
        for j in 0..2 {
            assert!((res.centers[(j, 0)] - 0.3).abs() < 1e-12);
            assert!((res.centers[(j, 1)] - 0.7).abs() < 1e-12);
        }
        for row in res.memberships.row_iter() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let s = derive_scales(&x, &res, None).unwrap();
        assert!(s.as_slice().iter().all(|&v| v == SCALE_MIN));
    }

    #[test]
    fn deterministic() {
        let x = two_blob();
        let cfg = FcmConfig::with_clusters(3, 42);
        assert_eq!(fcm_fit(&x, &cfg).unwrap(), fcm_fit(&x, &cfg).unwrap());
    }

    #[test]
    fn memberships_rows_and_objective() {
        let mut rng = RandomStream::new(8);
        let data: Vec<f64> = (0..600).map(|_| rng.next_f64()).collect();
        let x = Matrix::from_vec(300, 2, data).unwrap();
        for max_iter in 1..15 {
            let cfg = FcmConfig {
                max_iter,
                tol: 1e-300,
                ..FcmConfig::with_clusters(4, 9)
            };
            let res = fcm_fit(&x, &cfg).unwrap();
            for row in res.memberships.row_iter() {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert!(row.iter().all(|&v| (0.0..=1.0).contains(&v)));
            }
            assert_eq!(res.objective.len(), max_iter);
        }
        let res = fcm_fit(&x, &FcmConfig::with_clusters(4, 9)).unwrap();
        for w in res.objective.windows(2) {
            assert!(
                w[1] <= w[0] * (1.0 + 1e-12),
                "objective rose {} -> {}",
                w[0],
                w[1]
            );
        }
        for j in 0..4 {
            for k in 0..x.cols() {
                let col = x.column(k);
                let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert!(res.centers[(j, k)] >= lo && res.centers[(j, k)] <= hi);
            }
        }
    }

    #[test]
    fn override_scale() {
        let x = two_blob();
        let res = fcm_fit(&x, &FcmConfig::with_clusters(2, 3)).unwrap();
        let s = derive_scales(&x, &res, Some(0.03125)).unwrap();
        assert!(s.as_slice().iter().all(|&v| v == 0.03125));
    }

    #[test]
    fn single_point_cluster_floors_scale() {
        let x = Matrix::from_rows(&[vec![0.1], vec![0.9]]).unwrap();
        let res = fcm_fit(&x, &FcmConfig::with_clusters(2, 0)).unwrap();
        let s = derive_scales(&x, &res, None).unwrap();
        assert!(s.as_slice().iter().all(|&v| v == SCALE_MIN), "{s:?}");
    }

    #[test]
    fn errors() {
        let x = Matrix::zeros(3, 2);
        assert!(matches!(
            fcm_fit(&x, &FcmConfig::with_clusters(4, 0)),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            fcm_fit(&x, &FcmConfig::with_clusters(1, 0)),
            Err(Error::Config(_))
        ));
    }
}
