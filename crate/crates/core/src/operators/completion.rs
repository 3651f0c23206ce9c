use num_complex::Complex64;

use super::tailed::{TailedOperator, TailedProjection};
use crate::error::{Error, Result};
use crate::spectral::{hermitian_eigen, operator_norm, projection_range, HermitianMatrix};

/// Eigenvalues of `x*x` closer than this to 1 carry no defect.
const DEFECT_TOL: f64 = 1e-12;

/// Contraction norm slack.
const NORM_SLACK: f64 = 1e-10;

/// Range condition slack for `qx = x`.
const RANGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Completion {
    /// The isometry `w = x + v(1 - x*x)^{1/2}`.
    pub w: TailedOperator,
    /// Rank of the defect `1 - x*x`.
    pub defect_rank: usize,
}

/// Extend a contraction `x` with range in `qH` to an isometry `w` with
/// `qw = x`, placing the defect under `q⊥`.
pub fn complete_to_isometry(x: &TailedOperator, q: &TailedProjection) -> Result<Completion> {
    if !q.tail().is_infinite_coinfinite() {
        return Err(Error::UnsupportedTail(
            "q needs infinitely many 0s and 1s in its tail".into(),
        ));
    }
    if !x.src().is_full() {
        return Err(Error::UnsupportedTail(
            "x must act isometrically on its whole tail".into(),
        ));
    }
    let norm = operator_norm(x.block());
    if norm > 1.0 + NORM_SLACK {
        return Err(Error::NotContraction { norm });
    }
    let qx = q.as_operator().compose(x);
    let gap = qx.distance(x);
    if gap > RANGE_TOL {
        return Err(Error::PreconditionFailed(format!(
            "x does not map into qH (|qx - x| = {gap:.3e})"
        )));
    }

    let w0 = x.codomain_window().max(q.window());
    let mut x = x.extend_codomain(w0);
    let mut q = q.extend(x.codomain_window());
    loop {
        let b = x.block();
        let gram = HermitianMatrix::from_computed(b.adjoint() * b)?;
        let es = hermitian_eigen(&gram);
        let defect: Vec<(usize, f64)> = es
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| 1.0 - v > DEFECT_TOL)
            .map(|(k, &v)| (k, (1.0 - v).sqrt()))
            .collect();
        let room = projection_range(q.complement().block())?;
        if room.ncols() >= defect.len() {
            let mut block = b.clone();
            for (i, &(k, delta)) in defect.iter().enumerate() {
                let h = room.column(i);
                let u = es.vectors.column(k);
                block += h * u.adjoint() * Complex64::new(delta, 0.0);
            }
            let w = TailedOperator::new(block, x.src().clone(), x.dst().clone())?;
            return Ok(Completion {
                w,
                defect_rank: defect.len(),
            });
        }
        let missing = defect.len() - room.ncols();
        let r = x.codomain_window() + q.tail().complement().prefix_holding(missing);
        x = x.extend_codomain(r);
        q = q.extend(x.codomain_window());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{restricted_index, Cycle, ProjectionPair};
    use crate::spectral::CMatrix;

    fn alternating() -> TailedProjection {
        TailedProjection::diagonal(&[], Cycle::new(vec![true, false]).unwrap())
    }

    /// `H -> qH`, the k-th basis vector to the k-th basis vector of `qH`.
    fn enumeration(q: &TailedProjection) -> TailedOperator {
        TailedOperator::new(CMatrix::zeros(q.window(), 0), Cycle::constant(true), q.tail().clone())
            .unwrap()
    }

    #[test]
    fn enumeration_isometry_needs_no_defect() {
        let q = alternating();
        let x = enumeration(&q);
        let c = complete_to_isometry(&x, &q).unwrap();
        assert_eq!(c.defect_rank, 0);
        let ww = c.w.compose(&c.w.adjoint()).as_projection().unwrap();
        assert!(ww.as_operator().distance(&q.as_operator()) < 1e-12);
        assert_eq!(ProjectionPair::tailed(&ww, &q).essential_codimension().unwrap(), 0);
    }

    #[test]
    fn half_contraction_is_completed_under_q_perp() {
        let q = alternating();
        let x = enumeration(&q).extend_domain(3).scale_block(Complex64::new(0.5, 0.0));
        let c = complete_to_isometry(&x, &q).unwrap();
        assert_eq!(c.defect_rank, 3);
        assert!(c.w.adjoint().compose(&c.w).identity_defect() < 1e-10);
        assert!(q.as_operator().compose(&c.w).distance(&x) < 1e-12);
        let ww = c.w.compose(&c.w.adjoint()).as_projection().unwrap();
        let id = TailedProjection::identity();
        let idx = restricted_index(&x, &id, &q, 1e-8).unwrap().index;
        assert_eq!(ProjectionPair::tailed(&ww, &q).essential_codimension().unwrap(), idx);
    }

    #[test]
    fn rejects_bad_inputs() {
        let q = TailedProjection::identity();
        let x = TailedOperator::identity(0);
        assert!(matches!(complete_to_isometry(&x, &q), Err(Error::UnsupportedTail(_))));
        let q = alternating();
        let x = enumeration(&q).extend_domain(1).scale_block(Complex64::new(2.0, 0.0));
        assert!(matches!(complete_to_isometry(&x, &q), Err(Error::NotContraction { .. })));
        let x = TailedOperator::identity(0);
        assert!(matches!(complete_to_isometry(&x, &q), Err(Error::PreconditionFailed(_))));
    }
}
