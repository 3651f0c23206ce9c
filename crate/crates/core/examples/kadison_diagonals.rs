//! Which sequences are diagonals of projections, a projection realizing an
//! admissible one, and `a - b` as an essential codimension.
//!
//! cargo run --example kadison_diagonals

use projpair::kadison::{
    check_diagonal, construct_projection, diagonal_of, ess_codim_from_diagonal, frame_index,
    DiagonalSequence, DiagonalTail,
};
use projpair::Tolerances;

fn main() -> projpair::Result<()> {
    let tol = Tolerances::default();
    let rejected = DiagonalSequence::new(vec![0.75], DiagonalTail::Zeros)?;
    println!("(3/4, 0, 0, ...): {:?}", check_diagonal(&rejected));

    let d = DiagonalSequence::new(vec![0.9, 0.6, 0.3, 0.2, 0.5, 0.75, 0.25, 0.5], DiagonalTail::Ones)?;
    let r = check_diagonal(&d);
    println!("a = {:.3}, b = {:.3}, {:?}", r.a, r.b, r.verdict);
    let p = construct_projection(&d)?;
    let got: Vec<String> = diagonal_of(&p).prefix().iter().map(|x| format!("{x:.3}")).collect();
    println!("diagonal of the constructed projection: [{}, 1, 1, ...]", got.join(", "));
    let di = ess_codim_from_diagonal(&p, &tol)?;
    println!("a - b = {:?}, [p:q] = {}, frame index {}", r.integer, di.index, frame_index(&p, &tol)?);

    let half = DiagonalSequence::new(vec![], DiagonalTail::Half)?;
    let r = check_diagonal(&half);
    println!("constant 1/2: a = {}, b = {}, {:?}", r.a, r.b, r.verdict);
    Ok(())
}
