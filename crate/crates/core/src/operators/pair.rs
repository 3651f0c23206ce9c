use num_complex::Complex64;

use super::tail::{lcm, Cycle};
use super::tailed::{
    restricted_index, DenseProjection, FredholmData, TailedOperator, TailedProjection,
};
use crate::canonical::{Cardinal, CanonicalPair, SSpectrum};
use crate::error::{Error, Result};
use crate::spectral::{
    hermitian_eigen, max_abs, operator_norm, trace, CMatrix, EigenSystem, HermitianMatrix, ONE,
};
use crate::tolerance::Tolerances;

/// Two projections on a common window. Dense pairs live on a
/// finite-dimensional space; tailed pairs also carry their diagonal tails,
/// anchored at the end of the window.
#[derive(Debug, Clone)]
pub struct ProjectionPair {
    p: CMatrix,
    q: CMatrix,
    tails: Option<(Cycle, Cycle)>,
    tol: Tolerances,
}

/// Dimensions of `p∧q`, `p∧q⊥`, `p⊥∧q`, `p⊥∧q⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntersectionDims {
    pub n11: Cardinal,
    pub n10: Cardinal,
    pub n01: Cardinal,
    pub n00: Cardinal,
}

/// Intersection subspaces inside the window, as orthonormal columns.
struct Corners {
    m11: CMatrix,
    m10: CMatrix,
    m01: CMatrix,
    m00: CMatrix,
}

impl ProjectionPair {
    pub fn dense(p: &DenseProjection, q: &DenseProjection) -> Result<Self> {
        if p.dim() != q.dim() {
            return Err(Error::DimensionMismatch(format!(
                "projections act on spaces of dimension {} and {}",
                p.dim(),
                q.dim()
            )));
        }
        Ok(ProjectionPair {
            p: p.matrix().clone(),
            q: q.matrix().clone(),
            tails: None,
            tol: Tolerances::default(),
        })
    }

    pub fn tailed(p: &TailedProjection, q: &TailedProjection) -> Self {
        let w = p.window().max(q.window());
        let (p, q) = (p.extend(w), q.extend(w));
        ProjectionPair {
            p: p.block().clone(),
            q: q.block().clone(),
            tails: Some((p.tail().clone(), q.tail().clone())),
            tol: Tolerances::default(),
        }
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn window(&self) -> usize {
        self.p.nrows()
    }

    pub fn p_block(&self) -> &CMatrix {
        &self.p
    }

    pub fn q_block(&self) -> &CMatrix {
        &self.q
    }

    pub fn is_dense(&self) -> bool {
        self.tails.is_none()
    }

    fn tails_or_empty(&self) -> (Cycle, Cycle) {
        self.tails
            .clone()
            .unwrap_or_else(|| (Cycle::constant(false), Cycle::constant(false)))
    }

    pub fn p_tailed(&self) -> TailedProjection {
        TailedProjection::new(self.p.clone(), self.tails_or_empty().0).expect("validated block")
    }

    pub fn q_tailed(&self) -> TailedProjection {
        TailedProjection::new(self.q.clone(), self.tails_or_empty().1).expect("validated block")
    }

    /// Same pair with `p` and `q` exchanged.
    pub fn swapped(&self) -> ProjectionPair {
        ProjectionPair {
            p: self.q.clone(),
            q: self.p.clone(),
            tails: self.tails.clone().map(|(a, b)| (b, a)),
            tol: self.tol,
        }
    }

    /// Both tails coincide, so `p - q` has finite rank.
    pub fn tails_agree(&self) -> bool {
        self.tails.as_ref().is_none_or(|(a, b)| a == b)
    }

    fn eigen_of(&self, m: CMatrix) -> Result<EigenSystem> {
        Ok(hermitian_eigen(&HermitianMatrix::from_computed(m)?))
    }

    fn corners(&self) -> Result<Corners> {
        let n = self.window();
        let q_perp = CMatrix::identity(n, n) - &self.q;
        let sum = self.eigen_of(&self.p + &self.q)?;
        let cross = self.eigen_of(&self.p + &q_perp)?;
        let t = self.tol.rank * 2.0;
        Ok(Corners {
            m11: sum.vectors_where(|v| v >= 2.0 - t),
            m00: sum.vectors_where(|v| v <= t),
            m10: cross.vectors_where(|v| v >= 2.0 - t),
            m01: cross.vectors_where(|v| v <= t),
        })
    }

    /// Which bit combinations `(p, q)` recur in the tails.
    fn tail_combos(&self) -> [[bool; 2]; 2] {
        let mut seen = [[false; 2]; 2];
        if let Some((a, b)) = &self.tails {
            for i in 0..lcm(a.period(), b.period()) {
                seen[a.contains(i) as usize][b.contains(i) as usize] = true;
            }
        }
        seen
    }

    pub fn intersection_dims(&self) -> Result<IntersectionDims> {
        let c = self.corners()?;
        Ok(self.cardinals(&c))
    }

    fn cardinals(&self, c: &Corners) -> IntersectionDims {
        let seen = self.tail_combos();
        let card = |k: usize, inf: bool| {
            if inf {
                Cardinal::Infinite
            } else {
                Cardinal::from(k)
            }
        };
        IntersectionDims {
            n11: card(c.m11.ncols(), seen[1][1]),
            n10: card(c.m10.ncols(), seen[1][0]),
            n01: card(c.m01.ncols(), seen[0][1]),
            n00: card(c.m00.ncols(), seen[0][0]),
        }
    }

    pub fn halmos(&self) -> Result<HalmosForm> {
        let n = self.window();
        let c = self.corners()?;
        let dims = self.cardinals(&c);
        let fixed = c.m11.ncols() + c.m10.ncols() + c.m01.ncols() + c.m00.ncols();
        if fixed > n || !(n - fixed).is_multiple_of(2) {
            return Err(Error::RouteDisagreement(format!(
                "intersections span {fixed} of {n} dimensions, leaving no even generic part"
            )));
        }
        let g = (n - fixed) / 2;

        let q0 = &self.q - &c.m11 * c.m11.adjoint() - &c.m01 * c.m01.adjoint();
        let p_perp = CMatrix::identity(n, n) - &self.p;
        let q_perp = CMatrix::identity(n, n) - &self.q;
        let es = self.eigen_of(&q0 * &p_perp * &q0)?;
        let mut f = CMatrix::zeros(n, g);
        let mut gvec = CMatrix::zeros(n, g);
        let mut svals = Vec::with_capacity(g);
        for k in 0..g {
            let idx = n - 1 - k;
            let s = es.values[idx].clamp(0.0, 1.0).sqrt();
            let fk = es.vectors.column(idx).into_owned();
            let image = &q_perp * (&self.p * &fk);
            let norm = image.norm();
            if norm <= self.tol.rank {
                return Err(Error::RouteDisagreement(
                    "generic vector has no partner under q⊥".into(),
                ));
            }
            f.set_column(k, &fk);
            gvec.set_column(k, &(image / Complex64::new(norm, 0.0)));
            svals.push(s);
        }

        let mut basis = CMatrix::zeros(n, n);
        let mut col = 0;
        for part in [&c.m11, &c.m10, &c.m01, &c.m00, &f, &gvec] {
            basis.view_mut((0, col), (n, part.ncols())).copy_from(part);
            col += part.ncols();
        }
        let gram = basis.adjoint() * &basis;
        let unitarity = max_abs(&(&gram - CMatrix::identity(n, n)));
        if unitarity > 1e-6 {
            return Err(Error::RouteDisagreement(format!(
                "decomposition basis is not unitary (defect {unitarity:.3e})"
            )));
        }
        // The pieces come from separate eigenproblems and are orthogonal
        // only to rounding; two Gram-Schmidt passes restore orthonormality.
        for _ in 0..2 {
            for j in 0..n {
                for i in 0..j {
                    let r = basis.column(i).dotc(&basis.column(j));
                    let ci = basis.column(i).into_owned();
                    basis.column_mut(j).axpy(-r, &ci, ONE);
                }
                let norm = basis.column(j).norm();
                basis.column_mut(j).unscale_mut(norm);
            }
        }

        let head: Vec<f64> = svals.clone();
        let s = SSpectrum::new(head, crate::canonical::Decay::None).map_err(|e| {
            Error::RouteDisagreement(format!("generic s-values leave (0, 1): {e}"))
        })?;
        let cp = CanonicalPair::new(dims.n11, dims.n10, dims.n01, dims.n00, s);
        Ok(HalmosForm {
            cp,
            basis: TailedOperator::shifted(basis, true),
            svals,
            counts: [c.m11.ncols(), c.m10.ncols(), c.m01.ncols(), c.m00.ncols(), g],
        })
    }

    /// Kernel and cokernel of `q` restricted to `pH`.
    pub fn fredholm_data(&self) -> Result<FredholmData> {
        restricted_index(
            &TailedOperator::identity(0),
            &self.p_tailed(),
            &self.q_tailed(),
            self.tol.rank,
        )
    }

    /// `[p:q]`, the index of `q|pH : pH -> qH`.
    pub fn essential_codimension(&self) -> Result<i64> {
        Ok(self.fredholm_data()?.index)
    }

    fn require_trace_class(&self) -> Result<()> {
        if self.tails_agree() {
            Ok(())
        } else {
            Err(Error::NotTraceClass(
                "tails differ, so p - q has infinite rank".into(),
            ))
        }
    }

    /// `tr(q(p-q)q + q⊥(p-q)q⊥)`.
    pub fn corner_trace(&self) -> Result<f64> {
        self.require_trace_class()?;
        let n = self.window();
        let d = &self.p - &self.q;
        let q_perp = CMatrix::identity(n, n) - &self.q;
        let corners = &self.q * &d * &self.q + &q_perp * &d * &q_perp;
        Ok(trace(&corners).re)
    }

    /// Eigenvalues of `p - q` on the window, ascending.
    pub fn difference_eigs(&self) -> Result<Vec<f64>> {
        self.require_trace_class()?;
        Ok(self.eigen_of(&self.p - &self.q)?.values)
    }

    /// `tr((p-q)^(2m+1))`.
    pub fn odd_power_trace(&self, m: u32) -> Result<f64> {
        self.require_trace_class()?;
        let d = &self.p - &self.q;
        let d2 = &d * &d;
        let mut acc = d.clone();
        for _ in 0..m {
            acc = &acc * &d2;
        }
        Ok(trace(&acc).re)
    }

    /// Unitary `u` with `u q u* = p` and `u - 1` supported on the window.
    pub fn conjugator(&self) -> Result<TailedOperator> {
        if !self.tails_agree() {
            return Err(Error::NotFredholm("tails differ".into()));
        }
        let h = self.halmos()?;
        let [k11, k10, k01, k00, g] = h.counts;
        if k10 != k01 {
            return Err(Error::IndexObstruction {
                index: k10 as i64 - k01 as i64,
            });
        }
        let n = self.window();
        let mut model = CMatrix::zeros(n, n);
        for i in 0..k11 {
            model[(i, i)] = ONE;
        }
        let (o10, o01) = (k11, k11 + k10);
        for i in 0..k10 {
            model[(o10 + i, o01 + i)] = ONE;
            model[(o01 + i, o10 + i)] = ONE;
        }
        let o00 = o01 + k01;
        for i in 0..k00 {
            model[(o00 + i, o00 + i)] = ONE;
        }
        let (of, og) = (o00 + k00, o00 + k00 + g);
        for (k, &s) in h.svals.iter().enumerate() {
            let c = (1.0 - s * s).max(0.0).sqrt();
            model[(of + k, of + k)] = Complex64::new(c, 0.0);
            model[(og + k, of + k)] = Complex64::new(s, 0.0);
            model[(of + k, og + k)] = Complex64::new(-s, 0.0);
            model[(og + k, og + k)] = Complex64::new(c, 0.0);
        }
        let u = h.basis.block() * model * h.basis.block().adjoint();
        Ok(TailedOperator::shifted(u, true))
    }

    /// Facts about the generic part used to decide invertibility of `p|qH`.
    pub fn generic_invertibility(&self) -> Result<InvertibilityReport> {
        let h = self.halmos()?;
        let n = self.window();
        let [k11, k10, k01, k00, g] = h.counts;
        let of = k11 + k10 + k01 + k00;
        let basis = h.basis.block();
        let generic = basis.view((0, of), (n, 2 * g)).into_owned();
        let f = basis.view((0, of), (n, g)).into_owned();
        let diff = generic.adjoint() * (&self.p - &self.q) * &generic;
        let restriction = &self.p * &f;
        let min_restriction = if g == 0 {
            f64::INFINITY
        } else {
            let gram = restriction.adjoint() * &restriction;
            let es = self.eigen_of(gram)?;
            es.values[0].max(0.0).sqrt()
        };
        let min_c = h
            .svals
            .iter()
            .map(|s| (1.0 - s * s).max(0.0).sqrt())
            .fold(f64::INFINITY, f64::min);
        Ok(InvertibilityReport {
            generic_dim: 2 * g,
            diff_norm: operator_norm(&diff),
            max_s: h.svals.iter().copied().fold(0.0, f64::max),
            min_c,
            min_restriction_sval: min_restriction,
        })
    }
}

/// Invertibility data on the generic part of a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertibilityReport {
    pub generic_dim: usize,
    /// `‖p₀ - q₀‖` on the generic part.
    pub diff_norm: f64,
    pub max_s: f64,
    pub min_c: f64,
    /// Smallest singular value of `p` restricted to the generic part of `qH`.
    pub min_restriction_sval: f64,
}

impl InvertibilityReport {
    pub fn restriction_invertible(&self, tol: f64) -> bool {
        self.min_restriction_sval > tol
    }
}

/// Halmos decomposition: the canonical invariants and a unitary whose
/// columns list bases of `p∧q`, `p∧q⊥`, `p⊥∧q`, `p⊥∧q⊥`, then `f_k` and
/// `g_k` of the generic part with `q f = f`, `q g = 0`.
#[derive(Debug, Clone)]
pub struct HalmosForm {
    pub cp: CanonicalPair,
    pub basis: TailedOperator,
    /// Generic s-values, non-increasing.
    pub svals: Vec<f64>,
    /// Window dimensions of the four intersections and the generic multiplicity.
    pub counts: [usize; 5],
}

impl HalmosForm {
    fn model(&self, is_p: bool) -> CMatrix {
        let [k11, k10, k01, k00, g] = self.counts;
        let n = k11 + k10 + k01 + k00 + 2 * g;
        let mut m = CMatrix::zeros(n, n);
        let bits: Vec<bool> = if is_p {
            [(k11, true), (k10, true), (k01, false), (k00, false)]
        } else {
            [(k11, true), (k10, false), (k01, true), (k00, false)]
        }
        .iter()
        .flat_map(|&(k, b)| std::iter::repeat_n(b, k))
        .collect();
        for (i, &b) in bits.iter().enumerate() {
            if b {
                m[(i, i)] = ONE;
            }
        }
        let (of, og) = (bits.len(), bits.len() + g);
        for (k, &s) in self.svals.iter().enumerate() {
            let c2 = 1.0 - s * s;
            if is_p {
                let cs = Complex64::new(c2.max(0.0).sqrt() * s, 0.0);
                m[(of + k, of + k)] = Complex64::new(c2, 0.0);
                m[(of + k, og + k)] = cs;
                m[(og + k, of + k)] = cs;
                m[(og + k, og + k)] = Complex64::new(s * s, 0.0);
            } else {
                m[(of + k, of + k)] = ONE;
            }
        }
        m
    }

    /// `p` in the decomposition basis.
    pub fn p_model(&self) -> CMatrix {
        self.model(true)
    }

    /// `q` in the decomposition basis.
    pub fn q_model(&self) -> CMatrix {
        self.model(false)
    }

    /// Largest entrywise error when rebuilding `(p, q)` from the form.
    pub fn reconstruction_error(&self, pair: &ProjectionPair) -> f64 {
        let u = self.basis.block();
        let p = u * self.p_model() * u.adjoint();
        let q = u * self.q_model() * u.adjoint();
        max_abs(&(p - pair.p_block())).max(max_abs(&(q - pair.q_block())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::pair_index;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn dense(entries: &[f64]) -> DenseProjection {
        let n = (entries.len() as f64).sqrt() as usize;
        DenseProjection::new(CMatrix::from_row_slice(
            n,
            n,
            &entries.iter().map(|&x| c(x)).collect::<Vec<_>>(),
        ))
        .unwrap()
    }

    fn half_pair() -> ProjectionPair {
        ProjectionPair::dense(&dense(&[0.5, 0.5, 0.5, 0.5]), &dense(&[1.0, 0.0, 0.0, 0.0])).unwrap()
    }

    #[test]
    fn intersection_examples() {
        let p = dense(&[1.0, 0.0, 0.0, 0.0]);
        let d = ProjectionPair::dense(&p, &p).unwrap().intersection_dims().unwrap();
        assert_eq!(
            (d.n11, d.n10, d.n01, d.n00),
            (1.into(), 0.into(), 0.into(), 1.into())
        );
        let d = half_pair().intersection_dims().unwrap();
        assert_eq!(
            (d.n11, d.n10, d.n01, d.n00),
            (0.into(), 0.into(), 0.into(), 0.into())
        );
    }

    #[test]
    fn tailed_rank_one_defect() {
        let q = TailedProjection::identity();
        let p = TailedProjection::diagonal(&[false], Cycle::constant(true));
        let pair = ProjectionPair::tailed(&p, &q);
        let d = pair.intersection_dims().unwrap();
        assert_eq!(d.n01, Cardinal::Finite(1));
        assert_eq!(d.n11, Cardinal::Infinite);
        assert_eq!(pair.essential_codimension().unwrap(), -1);
        assert!((pair.corner_trace().unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pair_index(&pair.halmos().unwrap().cp).unwrap(), -1);
    }

    #[test]
    fn finite_ranks_give_trace_difference() {
        let p = TailedProjection::diagonal(&[true, true, false], Cycle::constant(false));
        let q = TailedProjection::diagonal(&[false, false, true], Cycle::constant(false));
        assert_eq!(ProjectionPair::tailed(&p, &q).essential_codimension().unwrap(), 1);
    }

    #[test]
    fn different_tails_are_not_fredholm() {
        let p = TailedProjection::identity();
        let q = TailedProjection::zero();
        let pair = ProjectionPair::tailed(&p, &q);
        assert!(matches!(pair.essential_codimension(), Err(Error::NotFredholm(_))));
        assert!(matches!(pair.corner_trace(), Err(Error::NotTraceClass(_))));
        assert_eq!(pair.intersection_dims().unwrap().n10, Cardinal::Infinite);
    }

    #[test]
    fn halmos_generic_pair() {
        let pair = half_pair();
        let h = pair.halmos().unwrap();
        assert_eq!(h.svals.len(), 1);
        assert!((h.svals[0] - 0.5_f64.sqrt()).abs() < 1e-12);
        assert!(h.reconstruction_error(&pair) < 1e-8);
        let eigs = pair.difference_eigs().unwrap();
        assert!((eigs[0] + 0.5_f64.sqrt()).abs() < 1e-12);
        assert!((eigs[1] - 0.5_f64.sqrt()).abs() < 1e-12);
        assert!(pair.corner_trace().unwrap().abs() < 1e-12);
    }

    #[test]
    fn halmos_orthogonal_ranges() {
        let pair =
            ProjectionPair::dense(&dense(&[0.0, 0.0, 0.0, 1.0]), &dense(&[1.0, 0.0, 0.0, 0.0]))
                .unwrap();
        let h = pair.halmos().unwrap();
        assert_eq!(h.counts, [0, 1, 1, 0, 0]);
        assert!(h.svals.is_empty());
        assert_eq!(pair.difference_eigs().unwrap(), vec![-1.0, 1.0]);
    }

    #[test]
    fn conjugator_examples() {
        let p = dense(&[1.0, 0.0, 0.0, 0.0]);
        let u = ProjectionPair::dense(&p, &p).unwrap().conjugator().unwrap();
        assert!(max_abs(&(u.block() - CMatrix::identity(2, 2))) < 1e-12);

        let pair = half_pair();
        let u = pair.conjugator().unwrap();
        let r = 0.5_f64.sqrt();
        let want = CMatrix::from_row_slice(2, 2, &[c(r), c(-r), c(r), c(r)]);
        assert!(max_abs(&(u.block() - want)) < 1e-12);

        let pair =
            ProjectionPair::dense(&dense(&[0.0, 0.0, 0.0, 1.0]), &dense(&[1.0, 0.0, 0.0, 0.0]))
                .unwrap();
        let u = pair.conjugator().unwrap();
        let swap = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        assert!(max_abs(&(u.block() - swap)) < 1e-12);
    }

    #[test]
    fn conjugator_obstruction() {
        let q = TailedProjection::identity();
        let p = TailedProjection::diagonal(&[false], Cycle::constant(true));
        match ProjectionPair::tailed(&p, &q).conjugator() {
            Err(Error::IndexObstruction { index }) => assert_eq!(index, -1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invertibility_on_generic_pair() {
        let r = half_pair().generic_invertibility().unwrap();
        assert_eq!(r.generic_dim, 2);
        assert!((r.diff_norm - r.max_s).abs() < 1e-12);
        assert!((r.min_c - r.min_restriction_sval).abs() < 1e-12);
        assert!(r.restriction_invertible(1e-8));
    }
}
