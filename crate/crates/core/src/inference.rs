//! Takagi-Sugeno forward pass.
//!
//! Rule `j` fires with the product of its per-feature memberships. Firing
//! strengths are normalized per sample, the normalized matrix (optionally
//! expanded with the inputs for first-order consequents) is the design for
//! the ridge fit, and predictions are the design times the consequents.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Scaler;
use crate::error::{Error, Result};
use crate::membership::{mf_eval, FuzzySetParams, MfKind};
use crate::numerics::{ridge_solve, Matrix};

/// Floor on the per-sample firing sum used as the normalization denominator.
pub const EPS_DENOM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConsequentOrder {
    #[default]
    #[serde(alias = "zero_order")]
    Zero,
    #[serde(alias = "first_order")]
    First,
}

impl ConsequentOrder {
    pub fn consequent_len(self, rules: usize, features: usize) -> usize {
        match self {
            ConsequentOrder::Zero => rules,
            ConsequentOrder::First => rules * (features + 1),
        }
    }
}

impl std::str::FromStr for ConsequentOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "zero" | "0" | "zero_order" => Ok(ConsequentOrder::Zero),
            "first" | "1" | "first_order" => Ok(ConsequentOrder::First),
            other => Err(format!("unknown consequent order '{other}'")),
        }
    }
}

/// Complete parameterization of a T-S model with `R` rules over `F` inputs.
///
/// First-order consequents are stored rule by rule as
/// `(a_j1, …, a_jF, b_j)`, matching the column blocks of [`design_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct RuleBase {
    pub mf_kind: MfKind,
    pub centers: Matrix,
    pub scales: Matrix,
    pub consequents: Vec<f64>,
    pub order: ConsequentOrder,
}

impl RuleBase {
    /// Rule base with zeroed consequents.
    pub fn new(
        mf_kind: MfKind,
        centers: Matrix,
        scales: Matrix,
        order: ConsequentOrder,
    ) -> Result<Self> {
        let len = order.consequent_len(centers.rows(), centers.cols());
        let rb = RuleBase {
            mf_kind,
            centers,
            scales,
            consequents: vec![0.0; len],
            order,
        };
        rb.validate()?;
        Ok(rb)
    }

    pub fn validate(&self) -> Result<()> {
        if self.centers.shape() != self.scales.shape() {
            return Err(Error::Dimension(format!(
                "centers {:?} vs scales {:?}",
                self.centers.shape(),
                self.scales.shape()
            )));
        }
        if self.n_rules() == 0 || self.n_features() == 0 {
            return Err(Error::Dimension(
                "rule base needs at least one rule and feature".into(),
            ));
        }
        let want = self.order.consequent_len(self.n_rules(), self.n_features());
        if self.consequents.len() != want {
            return Err(Error::Dimension(format!(
                "{} consequents for {:?} order with {} rules and {} features (expected {want})",
                self.consequents.len(),
                self.order,
                self.n_rules(),
                self.n_features()
            )));
        }
        for j in 0..self.n_rules() {
            for f in 0..self.n_features() {
                let p = self.params(j, f);
                if !p.in_bounds() {
                    return Err(Error::Config(format!(
                        "rule {j} feature {f}: center {} / scale {} out of bounds",
                        p.center, p.scale
                    )));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn n_rules(&self) -> usize {
        self.centers.rows()
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.centers.cols()
    }

    #[inline]
    pub fn params(&self, rule: usize, feature: usize) -> FuzzySetParams {
        FuzzySetParams::new(self.centers[(rule, feature)], self.scales[(rule, feature)])
    }

    pub fn in_bounds(&self) -> bool {
        (0..self.n_rules()).all(|j| (0..self.n_features()).all(|f| self.params(j, f).in_bounds()))
    }

    /// Reorders rules (antecedents and consequent blocks) so that new rule
    /// `k` is old rule `perm[k]`.
    pub fn permute_rules(&self, perm: &[usize]) -> RuleBase {
        let block = self.consequents.len() / self.n_rules();
        let consequents = perm
            .iter()
            .flat_map(|&j| self.consequents[j * block..(j + 1) * block].iter().copied())
            .collect();
        RuleBase {
            mf_kind: self.mf_kind,
            centers: self.centers.select_rows(perm),
            scales: self.scales.select_rows(perm),
            consequents,
            order: self.order,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiringMatrices {
    /// N x R product-t-norm firing strengths.
    pub raw: Matrix,
    /// N x R, each row divided by `max(row sum, EPS_DENOM)`.
    pub normalized: Matrix,
}

fn check_inputs(x: &Matrix, rb: &RuleBase) -> Result<()> {
    if x.cols() != rb.n_features() {
        return Err(Error::Dimension(format!(
            "input has {} features, rule base expects {}",
            x.cols(),
            rb.n_features()
        )));
    }
    Ok(())
}

pub fn firing_strengths(x: &Matrix, rb: &RuleBase) -> Result<FiringMatrices> {
    check_inputs(x, rb)?;
    let (n, r) = (x.rows(), rb.n_rules());
    let mut raw = Matrix::zeros(n, r);
    let mut normalized = Matrix::zeros(n, r);
    for (t, xt) in x.row_iter().enumerate() {
        let row = raw.row_mut(t);
        for (j, w) in row.iter_mut().enumerate() {
            *w = xt
                .iter()
                .enumerate()
                .map(|(f, &xv)| mf_eval(rb.mf_kind, xv, rb.params(j, f)))
                .product();
        }
        let denom = row.iter().sum::<f64>().max(EPS_DENOM);
        for (nv, &w) in normalized.row_mut(t).iter_mut().zip(raw.row(t)) {
            *nv = w / denom;
        }
    }
    Ok(FiringMatrices { raw, normalized })
}

pub fn design_matrix(fm: &FiringMatrices, x: &Matrix, order: ConsequentOrder) -> Result<Matrix> {
    let nb = &fm.normalized;
    if nb.rows() != x.rows() {
        return Err(Error::Dimension(format!(
            "firing matrix has {} rows, inputs have {}",
            nb.rows(),
            x.rows()
        )));
    }
    match order {
        ConsequentOrder::Zero => Ok(nb.clone()),
        ConsequentOrder::First => {
            let (n, r, f) = (x.rows(), nb.cols(), x.cols());
            let width = f + 1;
            let mut phi = Matrix::zeros(n, r * width);
            for t in 0..n {
                let xt = x.row(t);
                let out = phi.row_mut(t);
                for j in 0..r {
                    let b = nb[(t, j)];
                    let blk = &mut out[j * width..(j + 1) * width];
                    for (o, &xv) in blk.iter_mut().zip(xt) {
                        *o = b * xv;
                    }
                    blk[f] = b;
                }
            }
            Ok(phi)
        }
    }
}

/// Refits the consequents by ridge regression on the current antecedents.
pub fn fit_consequents(rb: &RuleBase, x: &Matrix, y: &[f64], lambda: f64) -> Result<RuleBase> {
    let fm = firing_strengths(x, rb)?;
    let phi = design_matrix(&fm, x, rb.order)?;
    let consequents = ridge_solve(&phi, y, lambda)?;
    Ok(RuleBase {
        consequents,
        ..rb.clone()
    })
}

/// Output of every rule's consequent at every sample, N x R.
pub fn rule_outputs(rb: &RuleBase, x: &Matrix) -> Matrix {
    let (n, r, f) = (x.rows(), rb.n_rules(), rb.n_features());
    let mut g = Matrix::zeros(n, r);
    match rb.order {
        ConsequentOrder::Zero => {
            for t in 0..n {
                g.row_mut(t).copy_from_slice(&rb.consequents);
            }
        }
        ConsequentOrder::First => {
            for t in 0..n {
                let xt = x.row(t);
                for j in 0..r {
                    let blk = &rb.consequents[j * (f + 1)..(j + 1) * (f + 1)];
                    g[(t, j)] = crate::numerics::dot(&blk[..f], xt) + blk[f];
                }
            }
        }
    }
    g
}

pub fn predict(rb: &RuleBase, x: &Matrix) -> Result<Vec<f64>> {
    let fm = firing_strengths(x, rb)?;
    design_matrix(&fm, x, rb.order)?.matvec(&rb.consequents)
}

pub fn mse(y: &[f64], yhat: &[f64]) -> f64 {
    y.iter()
        .zip(yhat)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / y.len() as f64
}

pub const MODEL_FORMAT: &str = "xanfis-model";
pub const MODEL_VERSION: u32 = 1;

/// On-disk JSON form of a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub mf_kind: MfKind,
    pub order: ConsequentOrder,
    pub n_rules: usize,
    pub n_features: usize,
    pub centers: Vec<Vec<f64>>,
    pub scales: Vec<Vec<f64>>,
    pub consequents: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<Scaler>,
}

impl ModelFile {
    pub fn from_rule_base(rb: &RuleBase, scaler: Option<Scaler>) -> Self {
        ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            mf_kind: rb.mf_kind,
            order: rb.order,
            n_rules: rb.n_rules(),
            n_features: rb.n_features(),
            centers: rb.centers.to_rows(),
            scales: rb.scales.to_rows(),
            consequents: rb.consequents.clone(),
            scaler,
        }
    }

    pub fn rule_base(&self) -> Result<RuleBase> {
        if self.format != MODEL_FORMAT {
            return Err(Error::Model(format!(
                "unexpected format tag '{}'",
                self.format
            )));
        }
        if self.version != MODEL_VERSION {
            return Err(Error::Model(format!(
                "unsupported version {}",
                self.version
            )));
        }
        let centers =
            Matrix::from_rows(&self.centers).map_err(|e| Error::Model(format!("centers: {e}")))?;
        let scales =
            Matrix::from_rows(&self.scales).map_err(|e| Error::Model(format!("scales: {e}")))?;
        if centers.shape() != (self.n_rules, self.n_features) {
            return Err(Error::Model(format!(
                "centers are {:?}, header says {}x{}",
                centers.shape(),
                self.n_rules,
                self.n_features
            )));
        }
        let rb = RuleBase {
            mf_kind: self.mf_kind,
            centers,
            scales,
            consequents: self.consequents.clone(),
            order: self.order,
        };
        rb.validate().map_err(|e| Error::Model(e.to_string()))?;
        Ok(rb)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Model(format!("{}: {e}", path.display())))
    }
}
