//! Halmos decomposition of a random pair with prescribed invariants.
//!
//! cargo run --example halmos_decomposition

use projpair::canonical::pair_index;
use projpair::operators::ProjectionPair;
use projpair::sample::{self, HalmosInvariants};

fn main() -> projpair::Result<()> {
    let inv = HalmosInvariants {
        n11: 1,
        n10: 2,
        n01: 1,
        n00: 1,
        svals: vec![0.8, 0.3],
    };
    let mut rng = sample::rng(1);
    let u = sample::random_unitary(&mut rng, inv.dim());
    let (p, q) = inv.realize(&u);
    let p = projpair::operators::DenseProjection::new(p)?;
    let q = projpair::operators::DenseProjection::new(q)?;
    let pair = ProjectionPair::dense(&p, &q)?;

    let h = pair.halmos()?;
    println!("planted  {inv:?}");
    println!(
        "found    n11={} n10={} n01={} n00={} s={:?}",
        h.cp.n11, h.cp.n10, h.cp.n01, h.cp.n00, h.svals
    );
    println!("[p:q] = {}", pair_index(&h.cp)?);
    println!("|basis* (p, q) basis - model| = {:.2e}", h.reconstruction_error(&pair));
    Ok(())
}
