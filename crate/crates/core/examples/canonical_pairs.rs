//! Symbolic pairs given only by their invariants: membership of `p - q` in
//! an ideal, existence of conjugators, and the index shift that appears
//! once `p - q` leaves the Hilbert-Schmidt class.
//!
//! cargo run --example canonical_pairs

use projpair::canonical::{
    conjugator_exists, corner_trace, diff_in_ideal, index_shift_witness, Cardinal, CanonicalPair,
    Decay, IdealClass, SSpectrum,
};

fn main() -> projpair::Result<()> {
    let inf = Cardinal::Infinite;
    let s = SSpectrum::new(vec![0.5], Decay::PowerDecay(0.4))?;
    let cp = CanonicalPair::new(inf, Cardinal::Finite(0), Cardinal::Finite(0), inf, s);
    for ideal in [IdealClass::Schatten(2.0), IdealClass::Schatten(3.0), IdealClass::Compact] {
        println!(
            "{ideal:?}: p - q in ideal {}, conjugator in 1 + ideal {}",
            diff_in_ideal(&cp, ideal),
            conjugator_exists(&cp, ideal)
        );
    }
    println!("corner trace: {:?}", corner_trace(&cp));
    let w = index_shift_witness(&cp)?;
    println!("index {} -> {} with {:?}", w.index_before, w.index_after, w.diagonal_equality);
    Ok(())
}
