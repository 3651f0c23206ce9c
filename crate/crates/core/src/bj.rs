//! Self-adjoint operators with finite spectrum: the integer
//! `a - b - Σ_{j≠n+1} a_j tr(p_j)` and its identification with `[p_{n+1}:q]`,
//! plus the positive-contraction corner lemma on commuting models.

use serde::{Deserialize, Serialize};

use crate::canonical::{ideal_pow, Cardinal, Decay, IdealClass};
use crate::error::{Error, Result};
use crate::operators::{Cycle, ProjectionPair, TailedProjection, PROJECTION_TOL};
use crate::spectral::{hermitian_eigen, max_abs, real_diag, trace, CMatrix, HermitianMatrix};
use crate::tolerance::{snap, Tolerances};

/// `z = Σ a_j p_j` with mutually orthogonal eigenprojections summing to 1.
/// Beyond the window the tail is diagonal: offset `i` carries eigenvalue
/// `a_{tail[i mod period]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpectrumOp {
    eigenvalues: Vec<f64>,
    blocks: Vec<CMatrix>,
    tail: Vec<usize>,
}

impl FiniteSpectrumOp {
    /// `eigenvalues` strictly increasing and containing 0 and 1; eigenvalues
    /// outside `[0, 1]` must have finite multiplicity.
    pub fn new(eigenvalues: Vec<f64>, blocks: Vec<CMatrix>, tail: Vec<usize>) -> Result<Self> {
        if eigenvalues.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Validation("eigenvalues must be strictly increasing".into()));
        }
        if !eigenvalues.contains(&0.0) || !eigenvalues.contains(&1.0) {
            return Err(Error::Validation("eigenvalues must include 0 and 1".into()));
        }
        if blocks.len() != eigenvalues.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} eigenvalues but {} projections",
                eigenvalues.len(),
                blocks.len()
            )));
        }
        if tail.is_empty() {
            return Err(Error::Validation("tail assignment needs at least one entry".into()));
        }
        if let Some(&j) = tail.iter().find(|&&j| j >= eigenvalues.len()) {
            return Err(Error::IndexOutOfRange {
                index: j,
                dim: eigenvalues.len(),
            });
        }
        if let Some(&j) = tail.iter().find(|&&j| !(0.0..=1.0).contains(&eigenvalues[j])) {
            return Err(Error::Validation(format!(
                "eigenvalue {} lies outside [0, 1] and cannot fill the tail",
                eigenvalues[j]
            )));
        }
        let m = blocks[0].nrows();
        let mut sum = CMatrix::zeros(m, m);
        for (j, b) in blocks.iter().enumerate() {
            if b.nrows() != m || b.ncols() != m {
                return Err(Error::DimensionMismatch(format!(
                    "projection {j} is {}x{}, expected {m}x{m}",
                    b.nrows(),
                    b.ncols()
                )));
            }
            TailedProjection::new(b.clone(), Cycle::constant(false))?;
            sum += b;
        }
        let resolution = max_abs(&(sum - CMatrix::identity(m, m)));
        if resolution > PROJECTION_TOL {
            return Err(Error::Validation(format!(
                "projections do not sum to the identity (defect {resolution:.3e})"
            )));
        }
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                let overlap = max_abs(&(&blocks[i] * &blocks[j]));
                if overlap > PROJECTION_TOL {
                    return Err(Error::Validation(format!(
                        "projections {i} and {j} overlap (|p_i p_j| = {overlap:.3e})"
                    )));
                }
            }
        }
        Ok(FiniteSpectrumOp {
            eigenvalues,
            blocks,
            tail,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn tail_assignment(&self) -> &[usize] {
        &self.tail
    }

    pub fn window(&self) -> usize {
        self.blocks[0].nrows()
    }

    fn index_of(&self, value: f64) -> usize {
        self.eigenvalues
            .iter()
            .position(|&a| a == value)
            .expect("validated eigenvalue")
    }

    pub fn tail_cycle(&self, j: usize) -> Cycle {
        Cycle::new(self.tail.iter().map(|&t| t == j).collect()).expect("nonempty tail")
    }

    pub fn projection(&self, j: usize) -> TailedProjection {
        TailedProjection::new(self.blocks[j].clone(), self.tail_cycle(j)).expect("validated block")
    }

    /// `Σ a_j p_j` on the window.
    pub fn z_block(&self) -> CMatrix {
        let m = self.window();
        self.eigenvalues
            .iter()
            .zip(&self.blocks)
            .fold(CMatrix::zeros(m, m), |acc, (&a, b)| acc + b * num_complex::Complex64::new(a, 0.0))
    }

    /// Multiplicity of `a_j`.
    pub fn multiplicity(&self, j: usize) -> Cardinal {
        if self.tail.contains(&j) {
            Cardinal::Infinite
        } else {
            Cardinal::from(trace(&self.blocks[j]).re.round() as usize)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BJVerdict {
    Consistent,
    Inconsistent,
    NotApplicable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BJReport {
    #[serde(with = "crate::io::ext_real")]
    pub a: f64,
    #[serde(with = "crate::io::ext_real")]
    pub b: f64,
    /// Multiplicities of the eigenvalues strictly between 0 and 1.
    pub middle_mults: Vec<Cardinal>,
    /// `Σ_{j≠n+1} a_j tr(p_j)` with `0·∞ = 0`.
    pub weighted_trace: f64,
    /// `tr(q y q) + tr(q⊥ y q⊥)` for `y = z - p_{n+1}`.
    pub corner_trace: f64,
    /// `a - b - weighted_trace` before snapping.
    pub raw: f64,
    pub integer: Option<i64>,
    pub esscodim: Option<i64>,
    pub consistent: bool,
    pub verdict: BJVerdict,
}

pub fn bj_analyze(z: &FiniteSpectrumOp, tol: &Tolerances) -> Result<BJReport> {
    let top = z.index_of(1.0);
    let middle: Vec<usize> = (0..z.eigenvalues.len())
        .filter(|&j| z.eigenvalues[j] > 0.0 && z.eigenvalues[j] < 1.0)
        .collect();
    let middle_mults: Vec<Cardinal> = middle.iter().map(|&j| z.multiplicity(j)).collect();

    let zb = z.z_block();
    let d = real_diag(&zb);
    let (mut a, mut b) = d.iter().fold((0.0, 0.0), |(a, b), &x| {
        if x <= 0.5 {
            (a + x, b)
        } else {
            (a, b + 1.0 - x)
        }
    });
    if let Some(&j) = z.tail.iter().find(|&&j| middle.contains(&j)) {
        let v = z.eigenvalues[j];
        if v <= 0.5 {
            a = f64::INFINITY;
        } else {
            b = f64::INFINITY;
        }
        return Ok(BJReport {
            a,
            b,
            middle_mults,
            weighted_trace: f64::NAN,
            corner_trace: f64::NAN,
            raw: f64::NAN,
            integer: None,
            esscodim: None,
            consistent: false,
            verdict: BJVerdict::NotApplicable {
                reason: format!("eigenvalue {v} fills the tail, so a + b is infinite"),
            },
        });
    }

    let weighted: f64 = (0..z.eigenvalues.len())
        .filter(|&j| j != top && z.eigenvalues[j] != 0.0)
        .map(|j| {
            let k = z.multiplicity(j).finite().expect("finite off the tail");
            z.eigenvalues[j] * k as f64
        })
        .sum();

    let bits: Vec<bool> = d.iter().map(|&x| x > 0.5).collect();
    let q = TailedProjection::diagonal(&bits, z.tail_cycle(top));
    let m = z.window();
    let y = &zb - &z.blocks[top];
    let qb = q.block();
    let qp = CMatrix::identity(m, m) - qb;
    let corner_trace = trace(&(qb * &y * qb + &qp * &y * &qp)).re;

    let raw = a - b - weighted;
    let integer = snap(raw, tol.route);
    let esscodim = ProjectionPair::tailed(&z.projection(top), &q)
        .with_tolerances(*tol)
        .essential_codimension()?;
    let finite = middle_mults.iter().all(|c| c.is_finite());
    let consistent = finite && integer == Some(esscodim);
    Ok(BJReport {
        a,
        b,
        middle_mults,
        weighted_trace: weighted,
        corner_trace,
        raw,
        integer,
        esscodim: Some(esscodim),
        consistent,
        verdict: if consistent {
            BJVerdict::Consistent
        } else {
            BJVerdict::Inconsistent
        },
    })
}

/// `x χ_[0,ε](x)` for a positive contraction `x`.
pub fn spectral_cutoff(x: &HermitianMatrix, eps: f64) -> Result<HermitianMatrix> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Validation(format!("cutoff level {eps} is not in (0, 1)")));
    }
    let es = hermitian_eigen(x);
    let slack = 1e-10 * es.norm().max(1.0);
    if es.values.iter().any(|&v| v < -slack || v > 1.0 + slack) {
        return Err(Error::Validation("x is not a positive contraction".into()));
    }
    HermitianMatrix::from_computed(es.apply(|v| if v <= eps { v.max(0.0) } else { 0.0 }))
}

/// Commuting pair `(x, q)` diagonal in one basis: `q` is the periodic
/// pattern, `1 - x` decays along the `q` coordinates and `x` decays along
/// the `q⊥` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalModel {
    pub q_pattern: Vec<u8>,
    pub one_minus_x_on_q: Decay,
    pub x_on_q_perp: Decay,
}

impl DiagonalModel {
    pub fn new(q: &Cycle, one_minus_x_on_q: Decay, x_on_q_perp: Decay) -> Result<Self> {
        Ok(DiagonalModel {
            q_pattern: q.bits().iter().map(|&b| b as u8).collect(),
            one_minus_x_on_q: one_minus_x_on_q.validate()?,
            x_on_q_perp: x_on_q_perp.validate()?,
        })
    }

    /// Finite commuting pair; every corner has finite rank.
    pub fn from_matrices(x: &HermitianMatrix, q: &CMatrix) -> Result<Self> {
        let xm = x.matrix();
        let comm = max_abs(&(xm * q - q * xm));
        if comm > 1e-10 {
            return Err(Error::NonCommuting(format!("|xq - qx| = {comm:.3e}")));
        }
        DiagonalModel::new(&Cycle::constant(false), Decay::None, Decay::None)
    }

    /// `x` is itself a projection.
    pub fn x_is_projection(&self) -> bool {
        self.one_minus_x_on_q == Decay::None && self.x_on_q_perp == Decay::None
    }

    /// Value of `x` at the `k`-th coordinate of `q` or of `q⊥`.
    pub fn x_value(&self, on_q: bool, k: usize) -> f64 {
        if on_q {
            1.0 - self.one_minus_x_on_q.term(k)
        } else {
            self.x_on_q_perp.term(k)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerVerdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerReport {
    /// `q - qxq ∈ J`.
    pub q_corner_in_ideal: bool,
    /// `q⊥ x q⊥ ∈ J`.
    pub q_perp_corner_in_ideal: bool,
    pub half_ideal: IdealClass,
    /// `x - q ∈ J^{1/2}`.
    pub difference_in_half_ideal: bool,
    /// `x χ_[0,1/2](x) ∈ J`.
    pub cutoff_in_ideal: bool,
    /// Hypotheses imply conclusions.
    pub forward_holds: bool,
    /// Conclusions imply hypotheses; `None` when neither `x` is a projection
    /// nor `J` is idempotent.
    pub converse_holds: Option<bool>,
    pub verdict: CornerVerdict,
}

/// Corner memberships for the contraction lemma on a commuting model.
pub fn contraction_corner_check(dm: &DiagonalModel, ideal: IdealClass) -> Result<CornerReport> {
    let ideal = ideal.validate()?;
    let q = Cycle::new(dm.q_pattern.iter().map(|&b| b == 1).collect())?;
    let half = ideal_pow(ideal, 0.5)?;
    // Infinitely many q-coordinates carry `1 - x`, infinitely many q⊥ carry x.
    let on_q = |d: Decay, j: IdealClass| q.is_empty_set() || d.in_ideal(j);
    let on_perp = |d: Decay, j: IdealClass| q.is_full() || d.in_ideal(j);

    let h1 = on_q(dm.one_minus_x_on_q, ideal);
    let h2 = on_perp(dm.x_on_q_perp, ideal);
    let c1 = on_q(dm.one_minus_x_on_q, half) && on_perp(dm.x_on_q_perp, half);
    // Only finitely many q-coordinates have x ≤ 1/2, while all but finitely
    // many q⊥-coordinates do.
    let c2 = on_perp(dm.x_on_q_perp, ideal);

    let hypotheses = h1 && h2;
    let conclusions = c1 && c2;
    let forward = !hypotheses || conclusions;
    let converse = (dm.x_is_projection() || ideal.is_idempotent()).then_some(!conclusions || hypotheses);
    let verdict = if !hypotheses {
        CornerVerdict::NotApplicable
    } else if forward && converse != Some(false) {
        CornerVerdict::Pass
    } else {
        CornerVerdict::Fail
    };
    Ok(CornerReport {
        q_corner_in_ideal: h1,
        q_perp_corner_in_ideal: h2,
        half_ideal: half,
        difference_in_half_ideal: c1,
        cutoff_in_ideal: c2,
        forward_holds: forward,
        converse_holds: converse,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::givens_rotation;
    use num_complex::Complex64;

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| Complex64::new(v, 0.0)),
        ))
    }

    #[test]
    fn three_quarter_fixture() {
        let z = FiniteSpectrumOp::new(
            vec![0.0, 0.75, 1.0],
            vec![diag(&[0.0]), diag(&[1.0]), diag(&[0.0])],
            vec![0],
        )
        .unwrap();
        let r = bj_analyze(&z, &Tolerances::default()).unwrap();
        assert_eq!((r.a, r.b), (0.0, 0.25));
        assert_eq!(r.weighted_trace, 0.75);
        assert_eq!(r.integer, Some(-1));
        assert_eq!(r.esscodim, Some(-1));
        assert!(r.consistent);
        assert_eq!(r.middle_mults, vec![Cardinal::Finite(1)]);
    }

    #[test]
    fn half_fixture() {
        let z = FiniteSpectrumOp::new(
            vec![0.0, 0.5, 1.0],
            vec![diag(&[0.0]), diag(&[1.0]), diag(&[0.0])],
            vec![0],
        )
        .unwrap();
        let r = bj_analyze(&z, &Tolerances::default()).unwrap();
        assert_eq!((r.a, r.b, r.weighted_trace), (0.5, 0.0, 0.5));
        assert_eq!((r.integer, r.esscodim), (Some(0), Some(0)));
    }

    #[test]
    fn middle_tail_is_not_applicable() {
        let z = FiniteSpectrumOp::new(
            vec![0.0, 0.5, 1.0],
            vec![diag(&[1.0]), diag(&[0.0]), diag(&[0.0])],
            vec![1, 2],
        )
        .unwrap();
        let r = bj_analyze(&z, &Tolerances::default()).unwrap();
        assert!(matches!(r.verdict, BJVerdict::NotApplicable { .. }));
        assert!(r.a.is_infinite());
    }

    #[test]
    fn rejects_bad_resolution() {
        assert!(FiniteSpectrumOp::new(
            vec![0.0, 1.0],
            vec![diag(&[1.0]), diag(&[1.0])],
            vec![0]
        )
        .is_err());
        assert!(FiniteSpectrumOp::new(
            vec![0.0, 1.0, 2.0],
            vec![diag(&[1.0]), diag(&[0.0]), diag(&[0.0])],
            vec![2]
        )
        .is_err());
    }

    #[test]
    fn cutoff_cases() {
        let zero = HermitianMatrix::diagonal(&[0.0, 0.0]);
        assert_eq!(spectral_cutoff(&zero, 0.5).unwrap().matrix(), zero.matrix());
        let x = HermitianMatrix::diagonal(&[0.2, 0.9]);
        let c = spectral_cutoff(&x, 0.5).unwrap();
        assert!(max_abs(&(c.matrix() - diag(&[0.2, 0.0]))) < 1e-14);

        let g = givens_rotation(0, 1, std::f64::consts::FRAC_PI_4, 2).unwrap();
        let rotated = HermitianMatrix::from_computed(&g * x.matrix() * g.adjoint()).unwrap();
        let c = spectral_cutoff(&rotated, 0.5).unwrap();
        let es = hermitian_eigen(&c);
        assert!(es.values[0].abs() < 1e-14 && (es.values[1] - 0.2).abs() < 1e-14);
        let again = spectral_cutoff(&c, 0.5).unwrap();
        assert!(max_abs(&(again.matrix() - c.matrix())) < 1e-10);

        assert!(spectral_cutoff(&HermitianMatrix::diagonal(&[1.5]), 0.5).is_err());
    }

    #[test]
    fn corner_lemma_cases() {
        let alt = Cycle::new(vec![true, false]).unwrap();
        let exact = DiagonalModel::new(&alt, Decay::None, Decay::None).unwrap();
        let r = contraction_corner_check(&exact, IdealClass::Schatten(1.0)).unwrap();
        assert_eq!(r.verdict, CornerVerdict::Pass);

        let m = DiagonalModel::new(&alt, Decay::PowerDecay(1.0), Decay::None).unwrap();
        let r = contraction_corner_check(&m, IdealClass::Schatten(2.0)).unwrap();
        assert!(r.q_corner_in_ideal && r.difference_in_half_ideal);
        assert_eq!(r.half_ideal, IdealClass::Schatten(4.0));
        assert_eq!(r.verdict, CornerVerdict::Pass);

        let m = DiagonalModel::new(&alt, Decay::None, Decay::PowerDecay(0.5)).unwrap();
        let r = contraction_corner_check(&m, IdealClass::Schatten(1.0)).unwrap();
        assert!(!r.q_perp_corner_in_ideal);
        assert_eq!(r.verdict, CornerVerdict::NotApplicable);
    }

    #[test]
    fn non_idempotent_counterexample_has_no_converse() {
        // x = 1 - k with k in J^{1/2} but not in J, q = 1.
        let m = DiagonalModel::new(&Cycle::constant(true), Decay::PowerDecay(0.75), Decay::None)
            .unwrap();
        let r = contraction_corner_check(&m, IdealClass::Schatten(1.0)).unwrap();
        assert!(r.difference_in_half_ideal && r.cutoff_in_ideal);
        assert!(!r.q_corner_in_ideal);
        assert_eq!(r.converse_holds, None);
    }

    #[test]
    fn non_commuting_is_rejected() {
        let x = HermitianMatrix::from_computed(CMatrix::from_element(2, 2, Complex64::new(0.5, 0.0)))
            .unwrap();
        assert!(matches!(
            DiagonalModel::from_matrices(&x, &diag(&[1.0, 0.0])),
            Err(Error::NonCommuting(_))
        ));
    }
}
