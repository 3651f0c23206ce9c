//! The integer `a - b - Σ a_j tr p_j` of a self-adjoint operator with finite
//! spectrum, compared with `[p_top : q]`.
//!
//! cargo run --example finite_spectrum

use projpair::bj::bj_analyze;
use projpair::io::spectrum_from_json;
use projpair::sample;
use projpair::Tolerances;

fn main() -> projpair::Result<()> {
    let tol = Tolerances::default();
    let z = spectrum_from_json(include_str!("data/bj_three_quarters.json"))?;
    let r = bj_analyze(&z, &tol)?;
    println!("diag(3/4) + 0: integer {:?}, [p:q] {:?}, {:?}", r.integer, r.esscodim, r.verdict);

    let mut rng = sample::rng(8);
    for _ in 0..5 {
        let z = sample::random_bj_instance(&mut rng, 12);
        let r = bj_analyze(&z, &tol)?;
        println!(
            "spectrum {:?}: a - b - trace = {:.6}, [p:q] = {:?}",
            z.eigenvalues().iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>(),
            r.raw,
            r.esscodim
        );
    }
    Ok(())
}
