//! Compare the analytic antecedent gradients with central differences on a
//! small random problem.

use xanfis::training::{adjacency_pairs, mse_gradient, mse_loss, xpass_gradient, xpass_loss};
use xanfis::{ConsequentOrder, Matrix, MfKind, RandomStream, RuleBase};

fn main() -> xanfis::Result<()> {
    let mut rng = RandomStream::new(11);
    let (r, f, n) = (4, 2, 40);
    let centers = Matrix::from_vec(r, f, (0..r * f).map(|_| rng.uniform(0.1, 0.9)).collect())?;
    let scales = Matrix::from_vec(r, f, (0..r * f).map(|_| rng.uniform(0.1, 0.4)).collect())?;
    let mut rb = RuleBase::new(MfKind::Cauchy, centers, scales, ConsequentOrder::Zero)?;
    rb.consequents
        .iter_mut()
        .for_each(|w| *w = rng.uniform(-1.0, 1.0));
    let x = Matrix::from_vec(n, f, (0..n * f).map(|_| rng.next_f64()).collect())?;
    let y: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();

    let h = 1e-6;
    let g = mse_gradient(&rb, &x, &y)?;
    let pairs = adjacency_pairs(&rb.centers);
    let gx = xpass_gradient(&rb, &pairs, 0.5);
    println!(
        "{:>4} {:>3} {:>14} {:>14} {:>14} {:>14}",
        "rule", "f", "dMSE/dc", "fd", "dX/dc", "fd"
    );
    for j in 0..r {
        for k in 0..f {
            let shifted = |d: f64| {
                let mut p = rb.clone();
                p.centers.row_mut(j)[k] += d;
                p
            };
            let fd = (mse_loss(&shifted(h), &x, &y)? - mse_loss(&shifted(-h), &x, &y)?) / (2.0 * h);
            let fdx = (xpass_loss(&shifted(h), &pairs, 0.5)
                - xpass_loss(&shifted(-h), &pairs, 0.5))
                / (2.0 * h);
            println!(
                "{j:>4} {k:>3} {:>14.6e} {fd:>14.6e} {:>14.6e} {fdx:>14.6e}",
                g.centers[(j, k)],
                gx[(j, k)]
            );
        }
    }
    Ok(())
}
