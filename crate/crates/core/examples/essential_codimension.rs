//! Three ways to compute `[p:q]` on tailed pairs, and a pair that is not
//! Fredholm at all.
//!
//! cargo run --example essential_codimension

use projpair::canonical::pair_index;
use projpair::operators::{Cycle, ProjectionPair, TailedProjection};
use projpair::sample;

fn routes(pair: &ProjectionPair) -> projpair::Result<(i64, f64, i64)> {
    Ok((
        pair.essential_codimension()?,
        pair.corner_trace()?,
        pair_index(&pair.halmos()?.cp)?,
    ))
}

fn main() -> projpair::Result<()> {
    // p = projection onto span{e_1, e_2, ...}, q = 1: q|pH misses e_0.
    let p = TailedProjection::diagonal(&[false], Cycle::constant(true));
    let q = TailedProjection::identity();
    let (f, t, h) = routes(&ProjectionPair::tailed(&p, &q))?;
    println!("shifted identity: kernel route {f}, corner trace {t:.3}, Halmos {h}");

    let mut rng = sample::rng(42);
    for _ in 0..5 {
        let s = sample::random_tailed_pair(&mut rng, 24);
        let pair = ProjectionPair::tailed(&s.p, &s.q);
        let (f, t, h) = routes(&pair)?;
        println!(
            "window {:>2}: kernel route {f:>2}, corner trace {t:>8.5}, Halmos {h:>2} (planted {})",
            pair.window(),
            s.index
        );
    }

    let even = TailedProjection::diagonal(&[], Cycle::new(vec![true, false])?);
    let odd = even.complement();
    match ProjectionPair::tailed(&even, &odd).essential_codimension() {
        Ok(i) => println!("even/odd: {i}"),
        Err(e) => println!("even/odd: {e}"),
    }
    Ok(())
}
