use num_complex::Complex64;

use super::tail::{lcm, Cycle, TailPattern};
use crate::error::{Error, Result};
use crate::spectral::{
    hermitian_defect, hermitian_eigen, max_abs, projection_range, CMatrix, HermitianMatrix,
    ONE, ZERO,
};

/// Projection defects above this fail validation.
pub const PROJECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    /// `max |p* - p|` entrywise.
    pub hermitian_defect: f64,
    /// `max |p² - p|` entrywise.
    pub idempotent_defect: f64,
    pub pass: bool,
}

pub fn validate_projection(p: &CMatrix) -> ValidationReport {
    if !p.is_square() {
        return ValidationReport {
            hermitian_defect: f64::INFINITY,
            idempotent_defect: f64::INFINITY,
            pass: false,
        };
    }
    let h = hermitian_defect(p);
    let i = max_abs(&(p * p - p));
    ValidationReport {
        hermitian_defect: h,
        idempotent_defect: i,
        pass: h <= PROJECTION_TOL && i <= PROJECTION_TOL,
    }
}

/// Orthogonal projection on a finite-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseProjection(CMatrix);

impl DenseProjection {
    pub fn new(p: CMatrix) -> Result<Self> {
        let report = validate_projection(&p);
        if !report.pass {
            return Err(Error::Validation(format!(
                "not a projection: hermitian defect {:.3e}, idempotent defect {:.3e}",
                report.hermitian_defect, report.idempotent_defect
            )));
        }
        Ok(DenseProjection(p))
    }

    /// Projection onto the span of the given orthonormal columns.
    pub fn onto(columns: &CMatrix) -> Result<Self> {
        DenseProjection::new(columns * columns.adjoint())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn rank(&self) -> usize {
        crate::spectral::trace(&self.0).re.round() as usize
    }
}

/// Projection on `l²(N)` acting as `block` on the first `m` coordinates and
/// as a periodic 0/1 diagonal from coordinate `m` on.
#[derive(Debug, Clone, PartialEq)]
pub struct TailedProjection {
    block: CMatrix,
    tail: Cycle,
}

impl TailedProjection {
    pub fn new(block: CMatrix, tail: Cycle) -> Result<Self> {
        let report = validate_projection(&block);
        if !report.pass {
            return Err(Error::Validation(format!(
                "block is not a projection: hermitian defect {:.3e}, idempotent defect {:.3e}",
                report.hermitian_defect, report.idempotent_defect
            )));
        }
        Ok(TailedProjection { block, tail })
    }

    /// Block and tail pattern; exceptions are folded into the block.
    pub fn from_pattern(block: CMatrix, pattern: &TailPattern) -> Result<Self> {
        if block.nrows() != pattern.start || block.ncols() != pattern.start {
            return Err(Error::DimensionMismatch(format!(
                "block is {}x{} but the tail starts at {}",
                block.nrows(),
                block.ncols(),
                pattern.start
            )));
        }
        let m = pattern.start;
        let end = pattern.regular_from();
        let mut full = CMatrix::zeros(end, end);
        full.view_mut((0, 0), (m, m)).copy_from(&block);
        for i in m..end {
            if pattern.bit(i) {
                full[(i, i)] = ONE;
            }
        }
        TailedProjection::new(full, pattern.cycle.rotate(end - m))
    }

    pub fn diagonal(bits: &[bool], tail: Cycle) -> Self {
        let n = bits.len();
        let block = CMatrix::from_fn(n, n, |i, j| if i == j && bits[i] { ONE } else { ZERO });
        TailedProjection { block, tail }
    }

    pub fn zero() -> Self {
        TailedProjection::diagonal(&[], Cycle::constant(false))
    }

    pub fn identity() -> Self {
        TailedProjection::diagonal(&[], Cycle::constant(true))
    }

    pub fn block(&self) -> &CMatrix {
        &self.block
    }

    pub fn tail(&self) -> &Cycle {
        &self.tail
    }

    pub fn window(&self) -> usize {
        self.block.nrows()
    }

    /// Rank of the block (its trace, rounded).
    pub fn block_rank(&self) -> usize {
        crate::spectral::trace(&self.block).re.round() as usize
    }

    pub fn is_finite_rank(&self) -> bool {
        self.tail.is_empty_set()
    }

    /// The same projection with the window grown to `m`.
    pub fn extend(&self, m: usize) -> TailedProjection {
        let old = self.window();
        if m <= old {
            return self.clone();
        }
        let mut block = CMatrix::zeros(m, m);
        block.view_mut((0, 0), (old, old)).copy_from(&self.block);
        for i in old..m {
            if self.tail.contains(i - old) {
                block[(i, i)] = ONE;
            }
        }
        TailedProjection {
            block,
            tail: self.tail.rotate(m - old),
        }
    }

    pub fn complement(&self) -> TailedProjection {
        let m = self.window();
        TailedProjection {
            block: CMatrix::identity(m, m) - &self.block,
            tail: self.tail.complement(),
        }
    }

    pub fn as_operator(&self) -> TailedOperator {
        TailedOperator {
            block: self.block.clone(),
            src: self.tail.clone(),
            dst: self.tail.clone(),
        }
    }

    /// Diagonal entries over the window.
    pub fn diagonal_entries(&self) -> Vec<f64> {
        crate::spectral::real_diag(&self.block)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_projection(&self.block)
    }

    /// Matrix of the compression to the first `n` coordinates.
    pub fn truncation(&self, n: usize) -> CMatrix {
        self.as_operator().truncation(n, n)
    }
}

/// Operator on `l²(N)` with a finite `R x M` block on the first `M` domain
/// coordinates and a tail that sends the `k`-th member of `src` (offsets
/// from `M`) to the `k`-th member of `dst` (offsets from `R`). Domain tail
/// coordinates outside `src` are sent to zero.
///
/// With both tails full this is a block followed by the shift `n -> n + R - M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailedOperator {
    block: CMatrix,
    src: Cycle,
    dst: Cycle,
}

impl TailedOperator {
    pub fn new(block: CMatrix, src: Cycle, dst: Cycle) -> Result<Self> {
        if src.is_empty_set() != dst.is_empty_set() {
            return Err(Error::Validation(
                "domain and codomain tails must both be empty or both infinite".into(),
            ));
        }
        Ok(TailedOperator { block, src, dst })
    }

    /// Block followed by `e_n -> e_{n+k}` for `n >= ncols`, scaled by `amp`,
    /// where `k = nrows - ncols`.
    pub fn shifted(block: CMatrix, amp: bool) -> Self {
        TailedOperator {
            block,
            src: Cycle::constant(amp),
            dst: Cycle::constant(amp),
        }
    }

    pub fn identity(m: usize) -> Self {
        TailedOperator::shifted(CMatrix::identity(m, m), true)
    }

    /// Unilateral shift by `k`: `e_n -> e_{n+k}`, with `e_n -> 0` for `n < -k`.
    pub fn shift(k: i64) -> Self {
        let block = if k >= 0 {
            CMatrix::zeros(k as usize, 0)
        } else {
            CMatrix::zeros(0, (-k) as usize)
        };
        TailedOperator::shifted(block, true)
    }

    pub fn block(&self) -> &CMatrix {
        &self.block
    }

    pub fn src(&self) -> &Cycle {
        &self.src
    }

    pub fn dst(&self) -> &Cycle {
        &self.dst
    }

    pub fn domain_window(&self) -> usize {
        self.block.ncols()
    }

    pub fn codomain_window(&self) -> usize {
        self.block.nrows()
    }

    /// `R - M`, the eventual displacement when both tails are full.
    pub fn shift_offset(&self) -> i64 {
        self.codomain_window() as i64 - self.domain_window() as i64
    }

    pub fn has_full_tails(&self) -> bool {
        self.src.is_full() && self.dst.is_full()
    }

    pub fn scale_block(&self, factor: Complex64) -> TailedOperator {
        TailedOperator {
            block: &self.block * factor,
            src: self.src.clone(),
            dst: self.dst.clone(),
        }
    }

    pub fn adjoint(&self) -> TailedOperator {
        TailedOperator {
            block: self.block.adjoint(),
            src: self.dst.clone(),
            dst: self.src.clone(),
        }
    }

    /// Grow the domain window to `m`; the codomain window grows to keep the
    /// tail correspondence.
    pub fn extend_domain(&self, m: usize) -> TailedOperator {
        let (old_m, old_r) = (self.domain_window(), self.codomain_window());
        if m <= old_m {
            return self.clone();
        }
        let n = self.src.count_below(m - old_m);
        let r = old_r + if n == 0 { 0 } else { self.dst.prefix_holding(n) };
        self.regrow(m, r, n)
    }

    /// Grow the codomain window to `r`; the domain window grows to keep the
    /// tail correspondence.
    pub fn extend_codomain(&self, r: usize) -> TailedOperator {
        let (old_m, old_r) = (self.domain_window(), self.codomain_window());
        if r <= old_r {
            return self.clone();
        }
        let n = self.dst.count_below(r - old_r);
        let m = old_m + if n == 0 { 0 } else { self.src.prefix_holding(n) };
        self.regrow(m, r, n)
    }

    /// New windows `(m, r)` absorbing the first `n` tail pairs.
    fn regrow(&self, m: usize, r: usize, n: usize) -> TailedOperator {
        let (old_m, old_r) = (self.domain_window(), self.codomain_window());
        let mut block = CMatrix::zeros(r, m);
        block.view_mut((0, 0), (old_r, old_m)).copy_from(&self.block);
        for k in 0..n {
            block[(old_r + self.dst.nth(k), old_m + self.src.nth(k))] = ONE;
        }
        TailedOperator {
            block,
            src: self.src.rotate(m - old_m),
            dst: self.dst.rotate(r - old_r),
        }
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &TailedOperator) -> TailedOperator {
        let w = rhs.codomain_window().max(self.domain_window());
        let s = rhs.extend_codomain(w);
        let t = self.extend_domain(w);
        let block = t.block() * s.block();
        let (m, r) = (block.ncols(), block.nrows());

        let Some(tail) = compose_tails(&s, &t) else {
            return TailedOperator {
                block,
                src: Cycle::constant(false),
                dst: Cycle::constant(false),
            };
        };
        let mut grown = CMatrix::zeros(r + tail.dst_lead, m + tail.src_lead);
        grown.view_mut((0, 0), (r, m)).copy_from(&block);
        TailedOperator {
            block: grown,
            src: tail.src,
            dst: tail.dst,
        }
    }

    /// Matrix of `P_rows T P_cols` restricted to the first `rows` and `cols`
    /// coordinates.
    pub fn truncation(&self, rows: usize, cols: usize) -> CMatrix {
        let (m, r) = (self.domain_window(), self.codomain_window());
        let mut out = CMatrix::zeros(rows, cols);
        for j in 0..cols.min(m) {
            for i in 0..rows.min(r) {
                out[(i, j)] = self.block[(i, j)];
            }
        }
        if !self.src.is_empty_set() && cols > m {
            let n = self.src.count_below(cols - m);
            for k in 0..n {
                let row = r + self.dst.nth(k);
                if row < rows {
                    out[(row, m + self.src.nth(k))] = ONE;
                }
            }
        }
        out
    }

    /// Both operators grown to common windows, if their tails line up.
    pub fn align_with(&self, other: &TailedOperator) -> Option<(TailedOperator, TailedOperator)> {
        let (mut a, mut b) = (self.clone(), other.clone());
        for _ in 0..64 {
            let m = a.domain_window().max(b.domain_window());
            a = a.extend_domain(m);
            b = b.extend_domain(m);
            let r = a.codomain_window().max(b.codomain_window());
            a = a.extend_codomain(r);
            b = b.extend_codomain(r);
            if a.domain_window() == b.domain_window() && a.codomain_window() == b.codomain_window()
            {
                return Some((a, b));
            }
        }
        None
    }

    /// Largest entrywise difference, or infinity when the tails differ.
    pub fn distance(&self, other: &TailedOperator) -> f64 {
        match self.align_with(other) {
            Some((a, b)) if a.src == b.src && a.dst == b.dst => max_abs(&(a.block - b.block)),
            _ => f64::INFINITY,
        }
    }

    /// Distance to the identity operator.
    pub fn identity_defect(&self) -> f64 {
        self.distance(&TailedOperator::identity(0))
    }

    /// Square up both windows and read the operator as a projection.
    pub fn as_projection(&self) -> Result<TailedProjection> {
        let w = self.domain_window().max(self.codomain_window());
        let op = self.extend_domain(w);
        let op = op.extend_codomain(w);
        if op.domain_window() != op.codomain_window() || op.src != op.dst {
            return Err(Error::Validation(
                "tail is not a diagonal 0/1 pattern, so the operator is not a projection".into(),
            ));
        }
        TailedProjection::new(op.block, op.src)
    }
}

struct ComposedTail {
    src: Cycle,
    dst: Cycle,
    src_lead: usize,
    dst_lead: usize,
}

/// Tail of `t ∘ s` when `s` lands exactly where `t`'s tail starts.
fn compose_tails(s: &TailedOperator, t: &TailedOperator) -> Option<ComposedTail> {
    let (c0, p0) = (s.src.density(), s.src.period());
    let (c1, p1) = (s.dst.density(), s.dst.period());
    let (c2, p2) = (t.src.density(), t.src.period());
    let (c3, p3) = (t.dst.density(), t.dst.period());
    if c0 == 0 || c2 == 0 {
        return None;
    }
    // Smallest multiple of lcm(c0, c1) after which every pattern has wrapped
    // a whole number of periods.
    let base = lcm(c0, c1);
    let mut big_k = base;
    loop {
        let delta = big_k / c1 * p1;
        if delta.is_multiple_of(p2) && (delta / p2 * c2).is_multiple_of(c3) {
            break;
        }
        big_k += base;
    }
    let delta = big_k / c1 * p1;
    let src_period = big_k / c0 * p0;
    let dst_period = delta / p2 * c2 / c3 * p3;

    let kept: Vec<(usize, usize)> = (0..big_k)
        .filter_map(|k| {
            let y = s.dst.nth(k);
            t.src
                .contains(y)
                .then(|| (s.src.nth(k), t.dst.nth(t.src.count_below(y))))
        })
        .collect();
    let &(g0, f0) = kept.first()?;
    let mut src_bits = vec![false; src_period];
    let mut dst_bits = vec![false; dst_period];
    for &(g, f) in &kept {
        src_bits[g - g0] = true;
        dst_bits[f - f0] = true;
    }
    Some(ComposedTail {
        src: Cycle::new(src_bits).expect("nonempty period"),
        dst: Cycle::new(dst_bits).expect("nonempty period"),
        src_lead: g0,
        dst_lead: f0,
    })
}

/// Kernel and cokernel of a Fredholm restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FredholmData {
    pub kernel: usize,
    pub cokernel: usize,
    pub index: i64,
}

/// Index of `cod · op` restricted to `dom H` as a map into `cod H`.
pub fn restricted_index(
    op: &TailedOperator,
    dom: &TailedProjection,
    cod: &TailedProjection,
    rank_tol: f64,
) -> Result<FredholmData> {
    let mut a = cod.as_operator().compose(&op.compose(&dom.as_operator()));
    if a.domain_window() < dom.window() {
        a = a.extend_domain(dom.window());
    }
    if a.codomain_window() < cod.window() {
        a = a.extend_codomain(cod.window());
    }
    let dom = dom.extend(a.domain_window());
    let cod = cod.extend(a.codomain_window());
    debug_assert_eq!(dom.window(), a.domain_window());
    debug_assert_eq!(cod.window(), a.codomain_window());

    if a.src != *dom.tail() {
        return Err(Error::NotFredholm(
            "infinitely many tail vectors of the domain are annihilated".into(),
        ));
    }
    if a.dst != *cod.tail() {
        return Err(Error::NotFredholm(
            "infinitely many tail vectors of the target are missed".into(),
        ));
    }
    let e = projection_range(dom.block())?;
    let f = projection_range(cod.block())?;
    let g = f.adjoint() * a.block() * &e;
    let rank = numerical_rank(&g, rank_tol);
    let (re, rf) = (e.ncols(), f.ncols());
    Ok(FredholmData {
        kernel: re - rank,
        cokernel: rf - rank,
        index: re as i64 - rf as i64,
    })
}

/// Count of singular values `σ` with `σ² > tol · max(1, ‖G‖²)`.
pub(crate) fn numerical_rank(g: &CMatrix, tol: f64) -> usize {
    if g.nrows() == 0 || g.ncols() == 0 {
        return 0;
    }
    let gram = if g.nrows() < g.ncols() {
        g * g.adjoint()
    } else {
        g.adjoint() * g
    };
    let es = hermitian_eigen(&HermitianMatrix::from_computed(gram).expect("gram is hermitian"));
    let cut = tol * es.norm().max(1.0);
    es.count_where(|v| v > cut)
}
