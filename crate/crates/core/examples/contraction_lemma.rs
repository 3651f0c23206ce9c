//! Corner conditions for a positive contraction commuting with `q`, over the
//! chain of Schatten ideals.
//!
//! cargo run --example contraction_lemma

use projpair::bj::{contraction_corner_check, DiagonalModel};
use projpair::canonical::{ideal_pow, Decay, IdealClass};
use projpair::operators::Cycle;

fn main() -> projpair::Result<()> {
    let q = Cycle::new(vec![true, false])?;
    println!("(L^2)^(1/2) = {:?}", ideal_pow(IdealClass::Schatten(2.0), 0.5)?);
    for (alpha, beta) in [(1.0, 1.0), (0.4, 1.0), (1.0, 0.3)] {
        let dm = DiagonalModel::new(&q, Decay::PowerDecay(alpha), Decay::PowerDecay(beta))?;
        let r = contraction_corner_check(&dm, IdealClass::Schatten(2.0))?;
        println!(
            "1-x ~ k^-{alpha} on q, x ~ k^-{beta} on q⊥: corners in L^2 {}/{}, x - q in L^4 {}, verdict {:?}",
            r.q_corner_in_ideal, r.q_perp_corner_in_ideal, r.difference_in_half_ideal, r.verdict
        );
    }
    Ok(())
}
