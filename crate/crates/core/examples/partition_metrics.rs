//! Distinguishability, Jaccard overlap and possibility for a hand-built
//! partition, and one X-pass step on it.

use xanfis::metrics::{jaccard_numeric, mean_distinguishability, possibility, DEFAULT_GRID};
use xanfis::training::{distinguishability, xpass_update};
use xanfis::{ConsequentOrder, Matrix, MfKind, RuleBase, TrainConfig};

fn main() -> xanfis::Result<()> {
    let centers = Matrix::from_rows(&[vec![0.1], vec![0.3], vec![0.35], vec![0.9]])?;
    let rb = RuleBase::new(
        MfKind::Cauchy,
        centers,
        Matrix::filled(4, 1, 0.1),
        ConsequentOrder::Zero,
    )?;
    let report = |rb: &RuleBase| -> xanfis::Result<()> {
        let mut sets: Vec<_> = (0..rb.n_rules()).map(|j| rb.params(j, 0)).collect();
        sets.sort_by(|a, b| a.center.total_cmp(&b.center));
        for w in sets.windows(2) {
            println!(
                "  {:.3} -> {:.3}: D {:.3}  jaccard {:.3}  possibility {:.3}",
                w[0].center,
                w[1].center,
                distinguishability(w[0], w[1]),
                jaccard_numeric(w[0], w[1], rb.mf_kind, DEFAULT_GRID),
                possibility(w[0], w[1], rb.mf_kind, DEFAULT_GRID),
            );
        }
        println!("  mean D {:.3}", mean_distinguishability(rb)?.0);
        Ok(())
    };
    println!("initial partition");
    report(&rb)?;
    let mut moved = rb;
    for _ in 0..10 {
        moved = xpass_update(&moved, &TrainConfig::default());
    }
    println!("after 10 X-pass steps toward D = 0.5");
    report(&moved)
}
