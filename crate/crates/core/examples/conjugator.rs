//! A unitary `u` with `u q u* = p` and `u - 1` confined to the window, and
//! the obstruction when the index is not zero.
//!
//! cargo run --example conjugator

use projpair::operators::ProjectionPair;
use projpair::sample;

fn main() -> projpair::Result<()> {
    let mut rng = sample::rng(5);
    let s = sample::random_index_zero_pair(&mut rng, 12);
    let pair = ProjectionPair::tailed(&s.p, &s.q);
    let u = pair.conjugator()?;
    let unitary = u.adjoint().compose(&u).identity_defect();
    let moved = u
        .compose(&s.q.as_operator())
        .compose(&u.adjoint())
        .distance(&s.p.as_operator());
    println!("window {}, |u*u - 1| = {unitary:.2e}, |uqu* - p| = {moved:.2e}", pair.window());

    loop {
        let t = sample::random_tailed_pair(&mut rng, 12);
        if t.index != 0 {
            let err = ProjectionPair::tailed(&t.p, &t.q).conjugator().unwrap_err();
            println!("index {}: {err}", t.index);
            break;
        }
    }
    Ok(())
}
