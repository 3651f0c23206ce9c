//! Completing a contraction into `qH` to an isometry, and reading the index
//! of the contraction off the range projection of the isometry.
//!
//! cargo run --example isometry_completion

use projpair::operators::{complete_to_isometry, ProjectionPair};
use projpair::sample;

fn main() -> projpair::Result<()> {
    let mut rng = sample::rng(3);
    for _ in 0..4 {
        let s = sample::random_contraction(&mut rng, 8);
        let c = complete_to_isometry(&s.x, &s.q)?;
        let ww = c.w.compose(&c.w.adjoint()).as_projection()?;
        let idx = ProjectionPair::tailed(&ww, &s.q).essential_codimension()?;
        println!(
            "defect rank {}, |w*w - 1| = {:.1e}, |qw - x| = {:.1e}, [ww*:q] = {idx}, idx(x) = {}",
            c.defect_rank,
            c.w.adjoint().compose(&c.w).identity_defect(),
            s.q.as_operator().compose(&c.w).distance(&s.x),
            s.index
        );
    }
    Ok(())
}
