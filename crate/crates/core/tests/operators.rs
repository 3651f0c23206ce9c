use num_complex::Complex64;

use projpair::canonical::{pair_index, Cardinal};
use projpair::operators::{restricted_index, Cycle, DenseProjection, ProjectionPair, TailedOperator, TailedProjection};
use projpair::spectral::CMatrix;
use projpair::Error;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn unilateral_shift_indices() {
    for k in -3i64..=3 {
        let s = TailedOperator::shift(k);
        let id = TailedProjection::identity();
        let fd = restricted_index(&s, &id, &id, 1e-8).unwrap();
        assert_eq!(fd.index, -k, "shift by {k}");
        assert_eq!(fd.kernel + fd.cokernel, k.unsigned_abs() as usize);
    }
}

#[test]
fn shift_composition_adds_offsets() {
    let a = TailedOperator::shift(2);
    let b = TailedOperator::shift(-3);
    assert_eq!(a.compose(&b).shift_offset(), -1);
    let id = TailedProjection::identity();
    let fd = restricted_index(&a.compose(&b), &id, &id, 1e-8).unwrap();
    assert_eq!(fd.index, 1);
}

#[test]
fn line_pair_at_angle() {
    // p = line at angle θ, q = e_1 line in C^2.
    let theta: f64 = 0.3;
    let (co, si) = (theta.cos(), theta.sin());
    let p = CMatrix::from_row_slice(2, 2, &[c(co * co), c(co * si), c(co * si), c(si * si)]);
    let q = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let pair = ProjectionPair::dense(&DenseProjection::new(p).unwrap(), &DenseProjection::new(q).unwrap()).unwrap();
    let h = pair.halmos().unwrap();
    assert_eq!(h.counts, [0, 0, 0, 0, 1]);
    assert!((h.svals[0] - si).abs() < 1e-12);
    assert!(h.reconstruction_error(&pair) < 1e-12);
    let eigs = pair.difference_eigs().unwrap();
    assert!((eigs[0] + si).abs() < 1e-12 && (eigs[1] - si).abs() < 1e-12);
}

#[test]
fn alternating_tails_are_not_fredholm() {
    let even = TailedProjection::diagonal(&[], Cycle::new(vec![true, false]).unwrap());
    let pair = ProjectionPair::tailed(&even, &even.complement());
    assert!(matches!(pair.essential_codimension(), Err(Error::NotFredholm(_))));
    assert!(matches!(pair.corner_trace(), Err(Error::NotTraceClass(_))));
    let dims = pair.intersection_dims().unwrap();
    assert_eq!((dims.n10, dims.n01), (Cardinal::Infinite, Cardinal::Infinite));
}

#[test]
fn finite_perturbation_of_identity() {
    // p drops two coordinates of the identity, q drops one.
    let p = TailedProjection::diagonal(&[false, false, true], Cycle::constant(true));
    let q = TailedProjection::diagonal(&[true, false, true], Cycle::constant(true));
    let pair = ProjectionPair::tailed(&p, &q);
    assert_eq!(pair.essential_codimension().unwrap(), -1);
    assert!((pair.corner_trace().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(pair_index(&pair.halmos().unwrap().cp).unwrap(), -1);
    assert_eq!(pair.halmos().unwrap().cp.n11, Cardinal::Infinite);
}

#[test]
fn projection_validation_rejects_non_idempotents() {
    let m = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(1.0)]);
    assert!(TailedProjection::new(m.clone(), Cycle::constant(false)).is_err());
    assert!(DenseProjection::new(m).is_err());
}
