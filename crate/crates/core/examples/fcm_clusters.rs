//! Fuzzy c-means on two Gaussian clouds, and the rule-base scales derived
//! from the fuzzy memberships.

use xanfis::data::synth_regression;
use xanfis::fcm::{derive_scales, fcm_fit, FcmConfig};

fn main() -> xanfis::Result<()> {
    let (x, _) = synth_regression("two_blob", 400, 0.0, 3)?;
    let res = fcm_fit(&x, &FcmConfig::with_clusters(2, 3))?;
    let scales = derive_scales(&x, &res, None)?;
    println!(
        "converged in {} iterations, final shift {:.2e}, objective {:.4}",
        res.iterations,
        res.final_shift,
        res.objective.last().copied().unwrap_or(f64::NAN)
    );
    for k in 0..res.centers.rows() {
        println!(
            "cluster {k}: center {:?}  scale {:?}",
            res.centers.row(k),
            scales.row(k)
        );
    }
    let crisp = (0..x.rows())
        .filter(|&t| res.memberships[(t, 0)] > res.memberships[(t, 1)])
        .count();
    println!("{crisp} of {} points closer to cluster 0", x.rows());
    Ok(())
}
