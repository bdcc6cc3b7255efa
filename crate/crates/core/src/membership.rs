//! Gaussian and Cauchy membership functions, their parameter gradients, and
//! the box projection applied after every antecedent update.

use serde::{Deserialize, Serialize};

/// Smallest admissible scale, in scaled input units.
pub const SCALE_MIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MfKind {
    Gaussian,
    Cauchy,
}

impl MfKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MfKind::Gaussian => "gaussian",
            MfKind::Cauchy => "cauchy",
        }
    }
}

impl std::fmt::Display for MfKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for MfKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "gauss" => Ok(MfKind::Gaussian),
            "cauchy" => Ok(MfKind::Cauchy),
            other => Err(format!("unknown membership function '{other}'")),
        }
    }
}

/// Center and scale of one fuzzy set. For Gaussians the scale is σ, for
/// Cauchy sets it is γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzySetParams {
    pub center: f64,
    pub scale: f64,
}

impl FuzzySetParams {
    pub fn new(center: f64, scale: f64) -> Self {
        FuzzySetParams { center, scale }
    }

    pub fn in_bounds(&self) -> bool {
        (0.0..=1.0).contains(&self.center) && (SCALE_MIN..=1.0).contains(&self.scale)
    }
}

/// Membership degree of `x`. Values outside `[0, 1]` are evaluated as-is.
#[inline]
pub fn mf_eval(kind: MfKind, x: f64, p: FuzzySetParams) -> f64 {
    let z = (x - p.center) / p.scale;
    match kind {
        MfKind::Gaussian => (-0.5 * z * z).exp(),
        MfKind::Cauchy => 1.0 / (1.0 + z * z),
    }
}

/// `(∂μ/∂center, ∂μ/∂scale)` at `x`.
///
/// Gaussian: `μ(x−c)/σ²` and `μ(x−c)²/σ³`.
/// Cauchy: `2μ²(x−c)/γ²` and `2μ²(x−c)²/γ³`.
#[inline]
pub fn mf_grad(kind: MfKind, x: f64, p: FuzzySetParams) -> (f64, f64) {
    let mu = mf_eval(kind, x, p);
    let (dc, ds) = mf_log_grad(kind, x, p);
    (mu * dc, mu * ds)
}

/// Gradient of `ln μ` with respect to `(center, scale)`.
///
/// Equal to [`mf_grad`] divided by `μ`, but stays finite when a Gaussian
/// membership underflows to zero, which is what the firing-strength chain
/// rule needs.
#[inline]
pub fn mf_log_grad(kind: MfKind, x: f64, p: FuzzySetParams) -> (f64, f64) {
    let d = x - p.center;
    let s = p.scale;
    match kind {
        MfKind::Gaussian => (d / (s * s), d * d / (s * s * s)),
        MfKind::Cauchy => {
            let mu = mf_eval(kind, x, p);
            (2.0 * mu * d / (s * s), 2.0 * mu * d * d / (s * s * s))
        }
    }
}

/// Clamps the center to `[0, 1]` and the scale to `[SCALE_MIN, 1]`.
#[inline]
pub fn project_bounds(p: FuzzySetParams) -> FuzzySetParams {
    FuzzySetParams {
        center: clamp_center(p.center),
        scale: clamp_scale(p.scale),
    }
}

// NaN maps to the lower bound so a bad step can never leave NaN behind
#[inline]
pub(crate) fn clamp_center(c: f64) -> f64 {
    if c.is_nan() {
        0.0
    } else {
        c.clamp(0.0, 1.0)
    }
}

#[inline]
pub(crate) fn clamp_scale(s: f64) -> f64 {
    if s.is_nan() {
        SCALE_MIN
    } else {
        s.clamp(SCALE_MIN, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RandomStream;

    const KINDS: [MfKind; 2] = [MfKind::Gaussian, MfKind::Cauchy];

    #[test]
    fn eval_examples() {
        let p = FuzzySetParams::new(0.5, 0.1);
        assert_eq!(mf_eval(MfKind::Cauchy, 0.5, p), 1.0);
        assert!((mf_eval(MfKind::Cauchy, 0.6, p) - 0.5).abs() < 1e-12);
        let g = mf_eval(MfKind::Gaussian, 0.6, p);
        assert!((g - (-0.5f64).exp()).abs() < 1e-12);
        assert!((g - 0.606531).abs() < 1e-6);
    }

    #[test]
    fn grad_examples() {
        for kind in KINDS {
            assert_eq!(
                mf_grad(kind, 0.3, FuzzySetParams::new(0.3, 0.2)),
                (0.0, 0.0)
            );
        }
        let (dc, ds) = mf_grad(MfKind::Cauchy, 0.6, FuzzySetParams::new(0.5, 0.1));
        assert!((dc - 5.0).abs() < 1e-9, "{dc}");
        assert!((ds - 5.0).abs() < 1e-9, "{ds}");
    }

    fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-3)
    }

    #[test]
    fn grad_matches_finite_differences() {
        let mut rng = RandomStream::new(2024);
        let h = 1e-6;
        for i in 0..1000 {
            let kind = KINDS[i % 2];
            let p = FuzzySetParams::new(rng.uniform(0.0, 1.0), rng.uniform(0.05, 1.0));
            let x = rng.uniform(-0.2, 1.2);
            let (dc, ds) = mf_grad(kind, x, p);
            let fc = central_diff(
                |c| mf_eval(kind, x, FuzzySetParams::new(c, p.scale)),
                p.center,
                h,
            );
            let fs = central_diff(
                |s| mf_eval(kind, x, FuzzySetParams::new(p.center, s)),
                p.scale,
                h,
            );
            assert!(rel_err(dc, fc) < 1e-5, "{kind} center: {dc} vs {fc}");
            assert!(rel_err(ds, fs) < 1e-5, "{kind} scale: {ds} vs {fs}");
        }
    }

    #[test]
    fn log_grad_is_grad_over_mu() {
        let mut rng = RandomStream::new(5);
        for i in 0..200 {
            let kind = KINDS[i % 2];
            let p = FuzzySetParams::new(rng.next_f64(), rng.uniform(0.05, 1.0));
            let x = rng.next_f64();
            let mu = mf_eval(kind, x, p);
            let (gc, gs) = mf_grad(kind, x, p);
            let (lc, ls) = mf_log_grad(kind, x, p);
            assert!((gc / mu - lc).abs() < 1e-9 * (1.0 + lc.abs()));
            assert!((gs / mu - ls).abs() < 1e-9 * (1.0 + ls.abs()));
        }
    }

    #[test]
    fn peak_and_monotone_decrease() {
        for kind in KINDS {
            for &s in &[0.03125, 0.1, 0.5, 1.0] {
                let p = FuzzySetParams::new(0.4, s);
                assert_eq!(mf_eval(kind, 0.4, p), 1.0);
                let mut prev = 1.0;
                for k in 1..=200 {
                    let v = mf_eval(kind, 0.4 + k as f64 * 0.005, p);
                    let w = mf_eval(kind, 0.4 - k as f64 * 0.005, p);
                    assert!(v < prev || (v == 0.0 && prev == 0.0));
                    assert!((v - w).abs() <= 1e-9 * v.max(w));
                    assert!(v > 0.0 || kind == MfKind::Gaussian);
                    prev = v;
                }
            }
        }
    }

    // positive root of 1 + z² = exp(z²/2), by bisection on u = z²
    fn tail_crossing() -> f64 {
        let (mut lo, mut hi) = (1.0f64, 4.0f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if (0.5 * mid).exp() < 1.0 + mid {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi.sqrt()
    }

    #[test]
    fn cauchy_heavier_tails() {
        for &s in &[1.0, 0.25, 0.03125, SCALE_MIN] {
            let p = FuzzySetParams::new(0.5, s);
            let knee = s * tail_crossing();
            for k in 0..=400 {
                let d = knee + k as f64 * 0.0025;
                let g = mf_eval(MfKind::Gaussian, 0.5 + d, p);
                let c = mf_eval(MfKind::Cauchy, 0.5 + d, p);
                assert!(
                    c >= g * (1.0 - 1e-12),
                    "s={s} d={d}: cauchy {c} < gaussian {g}"
                );
            }
        }
    }

    #[test]
    fn scale_gradient_bounds() {
        // max over x of |∂μ/∂scale| for a fixed scale, on a dense grid
        let peak = |kind, s: f64| {
            (0..=200_000)
                .map(|k| (-4.0 + k as f64 * 4e-5) * s)
                .map(|x| mf_grad(kind, x, FuzzySetParams::new(0.0, s)).1.abs())
                .fold(0.0, f64::max)
        };
        for &s in &[1.0, 0.03125] {
            let c = peak(MfKind::Cauchy, s);
            let g = peak(MfKind::Gaussian, s);
            assert!(c.is_finite() && g.is_finite());
            // analytic maxima: Cauchy 1/(2γ) at |x−c| = γ, Gaussian 2e⁻¹/σ at |x−c| = √2σ
            assert!((c * s - 0.5).abs() < 1e-3, "cauchy {c}");
            assert!((g * s - 2.0 * (-1.0f64).exp()).abs() < 1e-3, "gaussian {g}");
        }
        assert!(peak(MfKind::Gaussian, 0.03125) / peak(MfKind::Gaussian, 1.0) > 30.0);
    }

    #[test]
    fn projection() {
        assert_eq!(
            project_bounds(FuzzySetParams::new(1.3, 0.5)),
            FuzzySetParams::new(1.0, 0.5)
        );
        assert_eq!(
            project_bounds(FuzzySetParams::new(0.5, -0.2)),
            FuzzySetParams::new(0.5, SCALE_MIN)
        );
        let p = FuzzySetParams::new(0.25, 0.75);
        assert_eq!(project_bounds(p), p);
        assert!(project_bounds(FuzzySetParams::new(f64::NAN, f64::NAN)).in_bounds());
    }

    #[test]
    fn parse_kind() {
        assert_eq!("Cauchy".parse::<MfKind>().unwrap(), MfKind::Cauchy);
        assert_eq!("gaussian".parse::<MfKind>().unwrap(), MfKind::Gaussian);
        assert!("bell".parse::<MfKind>().is_err());
    }
}
