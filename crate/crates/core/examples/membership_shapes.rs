//! Gaussian and Cauchy membership functions side by side: values, tails and
//! the scale derivative that drives training stability.

use xanfis::membership::{mf_eval, mf_grad};
use xanfis::{FuzzySetParams, MfKind};

fn main() {
    for scale in [0.25, 0.03125] {
        let p = FuzzySetParams::new(0.5, scale);
        println!("scale {scale}");
        println!(
            "{:>8} {:>12} {:>12} {:>14} {:>14}",
            "x", "gauss", "cauchy", "d gauss/ds", "d cauchy/ds"
        );
        for k in 0..=8 {
            let x = 0.5 + k as f64 * scale / 2.0;
            println!(
                "{x:>8.4} {:>12.3e} {:>12.3e} {:>14.3e} {:>14.3e}",
                mf_eval(MfKind::Gaussian, x, p),
                mf_eval(MfKind::Cauchy, x, p),
                mf_grad(MfKind::Gaussian, x, p).1,
                mf_grad(MfKind::Cauchy, x, p).1,
            );
        }
    }
}
