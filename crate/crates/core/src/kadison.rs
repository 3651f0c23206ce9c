//! Diagonals of projections: admissibility of a candidate diagonal, a
//! projection realizing it, and the identification of `a - b` with an
//! essential codimension.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::majorized_by;
use crate::error::{Error, Result};
use crate::operators::{
    restricted_index, Cycle, ProjectionPair, TailedOperator, TailedProjection,
};
use crate::spectral::{projection_range, CMatrix};
use crate::tolerance::{snap, Tolerances};

/// What the sequence does beyond its prefix.
#[derive(Debug, Clone, PartialEq)]
pub enum DiagonalTail {
    Zeros,
    Ones,
    /// Constantly `1/2`.
    Half,
    /// Only the finiteness of the tail's contributions to `a` and `b` is known.
    Declared { a_finite: bool, b_finite: bool },
    /// Periodic 0/1 values.
    Pattern(Cycle),
}

/// Candidate diagonal `{d_n}`: a finite prefix then a tail.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSequence {
    prefix: Vec<f64>,
    tail: DiagonalTail,
}

impl DiagonalSequence {
    pub fn new(prefix: Vec<f64>, tail: DiagonalTail) -> Result<Self> {
        if let Some((i, v)) = prefix
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::Validation(format!(
                "diagonal entry {i} is {v}, outside [0, 1]"
            )));
        }
        Ok(DiagonalSequence { prefix, tail })
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn tail(&self) -> &DiagonalTail {
        &self.tail
    }
}

/// `a = Σ_{d_n ≤ 1/2} d_n` and `b = Σ_{d_n > 1/2} (1 - d_n)`, possibly infinite.
/// An entry within rounding of 1/2 counts as 1/2.
pub fn ab_sums(d: &DiagonalSequence) -> (f64, f64) {
    let (mut a, mut b) = d.prefix.iter().fold((0.0, 0.0), |(a, b), &x| {
        if snap_entry(x) <= 0.5 {
            (a + x, b)
        } else {
            (a, b + (1.0 - x))
        }
    });
    match d.tail {
        DiagonalTail::Half => a = f64::INFINITY,
        DiagonalTail::Declared { a_finite, b_finite } => {
            if !a_finite {
                a = f64::INFINITY;
            }
            if !b_finite {
                b = f64::INFINITY;
            }
        }
        DiagonalTail::Zeros | DiagonalTail::Ones | DiagonalTail::Pattern(_) => {}
    }
    (a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Admissible,
    Rejected { defect: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KadisonReport {
    #[serde(with = "crate::io::ext_real")]
    pub a: f64,
    #[serde(with = "crate::io::ext_real")]
    pub b: f64,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// `a - b` when both sums are finite and it is an integer.
    pub integer: Option<i64>,
}

impl KadisonReport {
    pub fn is_admissible(&self) -> bool {
        self.verdict == Verdict::Admissible
    }
}

pub fn check_diagonal(d: &DiagonalSequence) -> KadisonReport {
    check_diagonal_with(d, &Tolerances::default())
}

pub fn check_diagonal_with(d: &DiagonalSequence, tol: &Tolerances) -> KadisonReport {
    let (a, b) = ab_sums(d);
    if !(a + b).is_finite() {
        return KadisonReport {
            a,
            b,
            verdict: Verdict::Admissible,
            integer: None,
        };
    }
    let x = a - b;
    match snap(x, tol.int_snap) {
        Some(n) => KadisonReport {
            a,
            b,
            verdict: Verdict::Admissible,
            integer: Some(n),
        },
        None => KadisonReport {
            a,
            b,
            verdict: Verdict::Rejected {
                defect: (x - x.round()).abs(),
            },
            integer: None,
        },
    }
}

/// Projection whose diagonal is `d`.
pub fn construct_projection(d: &DiagonalSequence) -> Result<TailedProjection> {
    construct_projection_with(d, &Tolerances::default())
}

pub fn construct_projection_with(d: &DiagonalSequence, tol: &Tolerances) -> Result<TailedProjection> {
    let tail = match &d.tail {
        DiagonalTail::Zeros => Cycle::constant(false),
        DiagonalTail::Ones => Cycle::constant(true),
        DiagonalTail::Pattern(c) => c.clone(),
        DiagonalTail::Half | DiagonalTail::Declared { .. } => {
            return Err(Error::UnsupportedTail(
                "only eventually 0/1 diagonals are realized".into(),
            ))
        }
    };
    let report = check_diagonal_with(d, tol);
    if let Verdict::Rejected { defect } = report.verdict {
        return Err(Error::DiagonalObstruction { defect });
    }
    let sum: f64 = d.prefix.iter().sum();
    let k = sum.round() as usize;
    let n = d.prefix.len();
    let spectrum: Vec<f64> = (0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect();
    let block = schur_horn(&d.prefix, &spectrum)?;
    let block = block.map(|x| Complex64::new(x, 0.0));
    let block = crate::spectral::hermitian_part(&block);
    TailedProjection::new(block, tail)
}

/// Real symmetric matrix with diagonal `diag` and eigenvalues `spectrum`,
/// built from plane rotations of `diag(spectrum)`. Requires `diag ≺ spectrum`
/// with equal sums.
pub fn schur_horn(diag: &[f64], spectrum: &[f64]) -> Result<DMatrix<f64>> {
    let n = diag.len();
    if spectrum.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} diagonal entries but {} eigenvalues",
            spectrum.len()
        )));
    }
    let total: f64 = diag.iter().sum::<f64>() - spectrum.iter().sum::<f64>();
    let scale = spectrum.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if total.abs() > 1e-9 * scale * n.max(1) as f64 || !majorized_by(diag, spectrum)? {
        return Err(Error::PreconditionFailed(
            "diagonal is not majorized by the spectrum".into(),
        ));
    }
    let mut lambda = spectrum.to_vec();
    lambda.sort_by(|x, y| y.total_cmp(x));
    let mut a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambda));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let mut active: Vec<usize> = (0..n).collect();
    let mut slot = vec![0usize; n];
    for (step, &target) in order.iter().enumerate() {
        let t = diag[target];
        if step + 1 == n {
            slot[target] = active[0];
            break;
        }
        active.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
        let j = (0..active.len() - 1)
            .find(|&j| a[(active[j + 1], active[j + 1])] <= t)
            .unwrap_or(active.len() - 2);
        let (cj, ck) = (active[j], active[j + 1]);
        let (x, y) = (a[(cj, cj)], a[(ck, ck)]);
        let fixed = if x - y <= f64::EPSILON * scale {
            ck
        } else {
            let s2 = ((t - y) / (x - y)).clamp(0.0, 1.0);
            rotate(&mut a, cj, ck, (1.0 - s2).sqrt(), s2.sqrt());
            ck
        };
        slot[target] = fixed;
        active.retain(|&v| v != fixed);
    }
    Ok(DMatrix::from_fn(n, n, |i, j| a[(slot[i], slot[j])]))
}

/// `A <- R A Rᵀ` with `R e_i = c e_i + s e_j`, `R e_j = -s e_i + c e_j`.
fn rotate(a: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    let n = a.nrows();
    for k in 0..n {
        let (ai, aj) = (a[(i, k)], a[(j, k)]);
        a[(i, k)] = c * ai - s * aj;
        a[(j, k)] = s * ai + c * aj;
    }
    for k in 0..n {
        let (ai, aj) = (a[(k, i)], a[(k, j)]);
        a[(k, i)] = c * ai - s * aj;
        a[(k, j)] = s * ai + c * aj;
    }
}

/// Entries this close to 0, 1/2 or 1 are read as exactly that value.
const DIAGONAL_SNAP: f64 = 1e-12;

fn snap_entry(x: f64) -> f64 {
    for v in [0.0, 0.5, 1.0] {
        if (x - v).abs() <= DIAGONAL_SNAP {
            return v;
        }
    }
    x.clamp(0.0, 1.0)
}

/// The diagonal of a tailed projection as a sequence. Rounding must not push
/// an entry of exactly 1/2 across the threshold, so entries are snapped.
pub fn diagonal_of(p: &TailedProjection) -> DiagonalSequence {
    let prefix = p.diagonal_entries().into_iter().map(snap_entry).collect();
    DiagonalSequence {
        prefix,
        tail: DiagonalTail::Pattern(p.tail().clone()),
    }
}

/// Projection onto `span{e_j : d_j > 1/2}` for the diagonal of `p`.
pub fn upper_projection(p: &TailedProjection) -> TailedProjection {
    let bits: Vec<bool> = p.diagonal_entries().iter().map(|&x| snap_entry(x) > 0.5).collect();
    TailedProjection::diagonal(&bits, p.tail().clone())
}

#[derive(Debug, Clone)]
pub struct DiagonalIndex {
    pub index: i64,
    pub report: KadisonReport,
    pub q: TailedProjection,
}

/// `[p:q]` for `q` the projection onto the coordinates where the diagonal of
/// `p` exceeds `1/2`, checked against `a - b`.
pub fn ess_codim_from_diagonal(p: &TailedProjection, tol: &Tolerances) -> Result<DiagonalIndex> {
    let report = check_diagonal_with(&diagonal_of(p), tol);
    if !(report.a + report.b).is_finite() {
        return Err(Error::NotApplicable("a + b is infinite".into()));
    }
    let q = upper_projection(p);
    let index = ProjectionPair::tailed(p, &q)
        .with_tolerances(*tol)
        .essential_codimension()?;
    let gap = (report.a - report.b - index as f64).abs();
    if gap > tol.route {
        return Err(Error::RouteDisagreement(format!(
            "a - b = {} but [p:q] = {index}",
            report.a - report.b
        )));
    }
    Ok(DiagonalIndex { index, report, q })
}

/// Isometry onto `pH` and the index read off `w*` on `qH`.
#[derive(Debug, Clone)]
pub struct FrameData {
    pub w: TailedOperator,
    /// Window coordinates with `d_j > 1/2`.
    pub lambda: Vec<usize>,
    pub index: i64,
}

/// `-idx(w*|qH)` for an isometry `w` with `ww* = p`.
pub fn frame_data(p: &TailedProjection, tol: &Tolerances) -> Result<FrameData> {
    let q = upper_projection(p);
    let v = projection_range(p.block())?;
    let r = v.ncols();
    let src = Cycle::constant(!p.is_finite_rank());
    let w = TailedOperator::new(v, src.clone(), p.tail().clone())?;
    let domain = TailedProjection::new(CMatrix::identity(r, r), src)?;
    let fd = restricted_index(&w.adjoint(), &q, &domain, tol.rank).map_err(|e| match e {
        Error::NotFredholm(m) => Error::NotApplicable(format!("w* is not Fredholm on qH: {m}")),
        other => other,
    })?;
    let lambda = p
        .diagonal_entries()
        .iter()
        .enumerate()
        .filter(|(_, &x)| snap_entry(x) > 0.5)
        .map(|(i, _)| i)
        .collect();
    Ok(FrameData {
        w,
        lambda,
        index: -fd.index,
    })
}

pub fn frame_index(p: &TailedProjection, tol: &Tolerances) -> Result<i64> {
    Ok(frame_data(p, tol)?.index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::max_abs;

    fn seq(prefix: &[f64], tail: DiagonalTail) -> DiagonalSequence {
        DiagonalSequence::new(prefix.to_vec(), tail).unwrap()
    }

    #[test]
    fn sums() {
        let (a, b) = ab_sums(&seq(&[0.6, 0.4], DiagonalTail::Zeros));
        assert!((a - 0.4).abs() < 1e-15 && (b - 0.4).abs() < 1e-15);
        let (a, b) = ab_sums(&seq(&[0.75], DiagonalTail::Zeros));
        assert_eq!((a, b), (0.0, 0.25));
        let (a, _) = ab_sums(&seq(&[], DiagonalTail::Half));
        assert!(a.is_infinite());
        assert!(DiagonalSequence::new(vec![1.5], DiagonalTail::Zeros).is_err());
    }

    #[test]
    fn verdicts() {
        let r = check_diagonal(&seq(&[0.6, 0.4], DiagonalTail::Zeros));
        assert_eq!((r.verdict, r.integer), (Verdict::Admissible, Some(0)));
        let r = check_diagonal(&seq(&[0.75], DiagonalTail::Zeros));
        assert_eq!(r.verdict, Verdict::Rejected { defect: 0.25 });
        let r = check_diagonal(&seq(&[0.3], DiagonalTail::Half));
        assert_eq!((r.verdict, r.integer), (Verdict::Admissible, None));
    }

    #[test]
    fn two_by_two_construction() {
        let p = construct_projection(&seq(&[0.6, 0.4], DiagonalTail::Zeros)).unwrap();
        let r = 0.24_f64.sqrt();
        let want = CMatrix::from_row_slice(
            2,
            2,
            &[0.6, r, r, 0.4].map(|x| Complex64::new(x, 0.0)),
        );
        assert!(max_abs(&(p.block() - want)) < 1e-12);
        let p = construct_projection(&seq(&[1.0, 0.0], DiagonalTail::Zeros)).unwrap();
        assert!(max_abs(&(p.block() - CMatrix::from_diagonal(&nalgebra::dvector![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0)
        ])))
            < 1e-15);
        match construct_projection(&seq(&[0.75], DiagonalTail::Zeros)) {
            Err(Error::DiagonalObstruction { defect }) => assert_eq!(defect, 0.25),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            construct_projection(&seq(&[], DiagonalTail::Half)),
            Err(Error::UnsupportedTail(_))
        ));
    }

    #[test]
    fn general_schur_horn() {
        let d = [0.5, 0.3, 0.9, 0.7, 0.6];
        let lambda = [1.0, 1.0, 0.5, 0.5, 0.0];
        let a = schur_horn(&d, &lambda).unwrap();
        for i in 0..5 {
            assert!((a[(i, i)] - d[i]).abs() < 1e-12);
        }
        let mut ev: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (x, y) in ev.iter().zip([0.0, 0.5, 0.5, 1.0, 1.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(schur_horn(&[0.9, 0.9], &[1.0, 0.8]).is_ok());
        assert!(schur_horn(&[1.0, 0.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn diagonal_index_examples() {
        let tol = Tolerances::default();
        let p = TailedProjection::diagonal(&[true, false], Cycle::constant(false));
        let r = ess_codim_from_diagonal(&p, &tol).unwrap();
        assert_eq!(r.index, 0);
        assert_eq!(r.q.diagonal_entries(), vec![1.0, 0.0]);

        let half = CMatrix::from_element(2, 2, Complex64::new(0.5, 0.0));
        let p = TailedProjection::new(half.clone(), Cycle::constant(false)).unwrap();
        let r = ess_codim_from_diagonal(&p, &tol).unwrap();
        assert_eq!((r.report.a, r.report.b, r.index), (1.0, 0.0, 1));
        assert_eq!(frame_index(&p, &tol).unwrap(), 1);

        let p = TailedProjection::new(half, Cycle::constant(true)).unwrap();
        let r = ess_codim_from_diagonal(&p, &tol).unwrap();
        assert_eq!(frame_index(&p, &tol).unwrap(), r.index);

        let p = construct_projection(&seq(&[0.6, 0.4], DiagonalTail::Zeros)).unwrap();
        assert_eq!(ess_codim_from_diagonal(&p, &tol).unwrap().index, 0);
        assert_eq!(frame_index(&p, &tol).unwrap(), 0);
    }

    #[test]
    fn frame_index_on_patterns() {
        let tol = Tolerances::default();
        let alt = Cycle::new(vec![true, false]).unwrap();
        let q = TailedProjection::diagonal(&[true], alt.clone());
        assert_eq!(frame_index(&q, &tol).unwrap(), 0);
        let p = TailedProjection::diagonal(&[false], alt);
        assert_eq!(frame_index(&p, &tol).unwrap(), 0);
    }
}
