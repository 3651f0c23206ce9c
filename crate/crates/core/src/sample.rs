//! Seeded generators for projection pairs, diagonals, contractions and
//! finite-spectrum operators. All randomness flows from a SplitMix64 stream
//! so runs are reproducible across platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;

use crate::bj::FiniteSpectrumOp;
use crate::kadison::{DiagonalSequence, DiagonalTail};
use crate::operators::{Cycle, DenseProjection, TailedOperator, TailedProjection};
use crate::spectral::{givens_rotation, CMatrix, ONE};

pub type SampleRng = SplitMix64;

pub fn rng(seed: u64) -> SampleRng {
    SplitMix64::seed_from_u64(seed)
}

/// Haar-distributed unitary from the QR factorization of a complex Gaussian
/// matrix, with the phases of `R`'s diagonal divided out.
pub fn random_unitary(rng: &mut SampleRng, n: usize) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let z = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Product of `count` random real plane rotations.
pub fn givens_chain(rng: &mut SampleRng, n: usize, count: usize) -> CMatrix {
    let mut u = CMatrix::identity(n, n);
    if n < 2 {
        return u;
    }
    for _ in 0..count {
        let i = rng.random_range(0..n - 1);
        let j = rng.random_range(i + 1..n);
        let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        u = givens_rotation(i, j, theta, n).expect("valid plane") * u;
    }
    u
}

/// Periodic 0/1 pattern of period at most `max_period`.
pub fn random_cycle(rng: &mut SampleRng, max_period: usize) -> Cycle {
    let p = rng.random_range(1..=max_period.max(1));
    Cycle::new((0..p).map(|_| rng.random_bool(0.5)).collect()).expect("nonempty")
}

/// Pattern containing both 0s and 1s.
pub fn random_mixed_cycle(rng: &mut SampleRng, max_period: usize) -> Cycle {
    loop {
        let p = rng.random_range(2..=max_period.max(2));
        let c = Cycle::new((0..p).map(|_| rng.random_bool(0.5)).collect()).expect("nonempty");
        if c.is_infinite_coinfinite() {
            return c;
        }
    }
}

/// Halmos invariants for a pair on a finite window.
#[derive(Debug, Clone, PartialEq)]
pub struct HalmosInvariants {
    pub n11: usize,
    pub n10: usize,
    pub n01: usize,
    pub n00: usize,
    /// Generic s-values in (0, 1).
    pub svals: Vec<f64>,
}

impl HalmosInvariants {
    pub fn dim(&self) -> usize {
        self.n11 + self.n10 + self.n01 + self.n00 + 2 * self.svals.len()
    }

    pub fn index(&self) -> i64 {
        self.n10 as i64 - self.n01 as i64
    }

    /// `(p, q)` in the model basis.
    pub fn model(&self) -> (CMatrix, CMatrix) {
        let n = self.dim();
        let g = self.svals.len();
        let mut p = CMatrix::zeros(n, n);
        let mut q = CMatrix::zeros(n, n);
        let mut i = 0;
        for (count, pb, qb) in [
            (self.n11, true, true),
            (self.n10, true, false),
            (self.n01, false, true),
            (self.n00, false, false),
        ] {
            for _ in 0..count {
                if pb {
                    p[(i, i)] = ONE;
                }
                if qb {
                    q[(i, i)] = ONE;
                }
                i += 1;
            }
        }
        for (k, &s) in self.svals.iter().enumerate() {
            let (f, h) = (i + k, i + g + k);
            let c = (1.0 - s * s).sqrt();
            q[(f, f)] = ONE;
            p[(f, f)] = Complex64::new(c * c, 0.0);
            p[(f, h)] = Complex64::new(c * s, 0.0);
            p[(h, f)] = Complex64::new(c * s, 0.0);
            p[(h, h)] = Complex64::new(s * s, 0.0);
        }
        (p, q)
    }

    /// `(u p u*, u q u*)`.
    pub fn realize(&self, u: &CMatrix) -> (CMatrix, CMatrix) {
        let (p, q) = self.model();
        let ua = u.adjoint();
        let sym = |m: CMatrix| crate::spectral::hermitian_part(&m);
        (sym(u * p * &ua), sym(u * q * &ua))
    }
}

/// Random invariants filling exactly `n` dimensions.
pub fn random_invariants(rng: &mut SampleRng, n: usize) -> HalmosInvariants {
    let g = rng.random_range(0..=n / 2);
    let mut counts = [0usize; 4];
    for _ in 0..n - 2 * g {
        counts[rng.random_range(0..4)] += 1;
    }
    let svals = (0..g).map(|_| rng.random_range(0.05..0.95)).collect();
    HalmosInvariants {
        n11: counts[0],
        n10: counts[1],
        n01: counts[2],
        n00: counts[3],
        svals,
    }
}

/// Dense pair on `C^n`, `1 <= n <= max_n`, with known invariants.
pub fn random_dense_pair(
    rng: &mut SampleRng,
    max_n: usize,
) -> (DenseProjection, DenseProjection, HalmosInvariants) {
    let n = rng.random_range(1..=max_n.max(1));
    let inv = random_invariants(rng, n);
    let u = random_unitary(rng, n);
    let (p, q) = inv.realize(&u);
    (
        DenseProjection::new(p).expect("unitary conjugate of a projection"),
        DenseProjection::new(q).expect("unitary conjugate of a projection"),
        inv,
    )
}

/// Tailed Fredholm pair with its exact index.
#[derive(Debug, Clone)]
pub struct SampledPair {
    pub p: TailedProjection,
    pub q: TailedProjection,
    pub inv: HalmosInvariants,
    /// Diagonal coordinates appended after the rotated part, as `(p, q)` bits.
    pub extras: Vec<(bool, bool)>,
    pub index: i64,
}

/// Pair on a window of at most `max_window` coordinates: a rotated Halmos
/// model, then a few diagonal coordinates, then a shared periodic tail.
pub fn random_tailed_pair(rng: &mut SampleRng, max_window: usize) -> SampledPair {
    let window = rng.random_range(1..=max_window.max(1));
    let extra = rng.random_range(0..=window.min(4));
    let core = window - extra;
    let inv = random_invariants(rng, core);
    let extras: Vec<(bool, bool)> = (0..extra)
        .map(|_| (rng.random_bool(0.5), rng.random_bool(0.5)))
        .collect();
    let tail = random_cycle(rng, 4);
    build_tailed_pair(rng, inv, extras, tail)
}

/// Same as [`random_tailed_pair`] but with `[p:q] = 0`.
pub fn random_index_zero_pair(rng: &mut SampleRng, max_window: usize) -> SampledPair {
    let window = rng.random_range(1..=max_window.max(1));
    let mut inv = random_invariants(rng, window);
    let pairs = (inv.n10 + inv.n01) / 2;
    let odd = (inv.n10 + inv.n01) % 2;
    inv.n10 = pairs;
    inv.n01 = pairs;
    inv.n00 += odd;
    let tail = random_cycle(rng, 4);
    build_tailed_pair(rng, inv, Vec::new(), tail)
}

fn build_tailed_pair(
    rng: &mut SampleRng,
    inv: HalmosInvariants,
    extras: Vec<(bool, bool)>,
    tail: Cycle,
) -> SampledPair {
    let core = inv.dim();
    let u = random_unitary(rng, core);
    let (pc, qc) = inv.realize(&u);
    let n = core + extras.len();
    let mut p = CMatrix::zeros(n, n);
    let mut q = CMatrix::zeros(n, n);
    p.view_mut((0, 0), (core, core)).copy_from(&pc);
    q.view_mut((0, 0), (core, core)).copy_from(&qc);
    let mut index = inv.index();
    for (k, &(pb, qb)) in extras.iter().enumerate() {
        if pb {
            p[(core + k, core + k)] = ONE;
        }
        if qb {
            q[(core + k, core + k)] = ONE;
        }
        index += pb as i64 - qb as i64;
    }
    SampledPair {
        p: TailedProjection::new(p, tail.clone()).expect("projection"),
        q: TailedProjection::new(q, tail).expect("projection"),
        inv,
        extras,
        index,
    }
}

/// Prefix for a finite-deviation diagonal. With `admissible` the prefix sum
/// is pushed onto an integer; otherwise it is left generic.
pub fn random_sequence(rng: &mut SampleRng, max_len: usize, admissible: bool) -> DiagonalSequence {
    let n = rng.random_range(1..=max_len.max(1));
    let mut d: Vec<f64> = (0..n)
        .map(|_| match rng.random_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            2 => 0.5,
            _ => rng.random::<f64>(),
        })
        .collect();
    if admissible {
        let sum: f64 = d.iter().sum();
        let mut delta = sum.round() - sum;
        for x in d.iter_mut() {
            if delta == 0.0 {
                break;
            }
            let room = if delta > 0.0 { 1.0 - *x } else { -*x };
            let step = if delta > 0.0 { delta.min(room) } else { delta.max(room) };
            *x += step;
            delta -= step;
        }
    }
    let tail = match rng.random_range(0..3) {
        0 => DiagonalTail::Zeros,
        1 => DiagonalTail::Ones,
        _ => DiagonalTail::Pattern(random_cycle(rng, 4)),
    };
    DiagonalSequence::new(d.into_iter().map(|x| x.clamp(0.0, 1.0)).collect(), tail)
        .expect("entries in [0, 1]")
}

/// Contraction `x : H -> qH` with `qx = x`, isometric on its tail, and its
/// exact index.
#[derive(Debug, Clone)]
pub struct SampledContraction {
    pub x: TailedOperator,
    pub q: TailedProjection,
    pub index: i64,
}

pub fn random_contraction(rng: &mut SampleRng, max_window: usize) -> SampledContraction {
    let m = rng.random_range(1..=max_window.max(1));
    let rank_q = rng.random_range(0..=m);
    let bits: Vec<bool> = (0..m).map(|i| i < rank_q).collect();
    let u = random_unitary(rng, m);
    let diag = TailedProjection::diagonal(&bits, Cycle::constant(false));
    let qb = crate::spectral::hermitian_part(&(&u * diag.block() * u.adjoint()));
    let tail = random_mixed_cycle(rng, 4);
    let q = TailedProjection::new(qb, tail.clone()).expect("projection");

    let cols = rng.random_range(0..=max_window.clamp(1, 12));
    let range = u.columns(0, rank_q).into_owned();
    let k = random_contraction_matrix(rng, rank_q, cols);
    let block = range * k;
    let x = TailedOperator::new(block, Cycle::constant(true), tail).expect("infinite tails");
    SampledContraction {
        x,
        q,
        index: cols as i64 - rank_q as i64,
    }
}

/// `rows x cols` matrix with singular values in `[0, 1]`, some exactly 1 and
/// some exactly 0.
pub fn random_contraction_matrix(rng: &mut SampleRng, rows: usize, cols: usize) -> CMatrix {
    let k = rows.min(cols);
    let left = random_unitary(rng, rows);
    let right = random_unitary(rng, cols);
    let mut sigma = CMatrix::zeros(rows, cols);
    for i in 0..k {
        let s = match rng.random_range(0..4) {
            0 => 1.0,
            1 => 0.0,
            _ => rng.random_range(0.05..1.0),
        };
        sigma[(i, i)] = Complex64::new(s, 0.0);
    }
    left * sigma * right.adjoint()
}

/// Finite-spectrum self-adjoint operator whose tail only carries the
/// eigenvalues 0 and 1, rotated by a Givens chain inside the window.
pub fn random_bj_instance(rng: &mut SampleRng, max_window: usize) -> FiniteSpectrumOp {
    let m = rng.random_range(1..=max_window.max(1));
    let mut values = vec![0.0, 1.0];
    for _ in 0..rng.random_range(0..=4) {
        let v: f64 = rng.random_range(0.01..0.99);
        if !values.contains(&v) {
            values.push(v);
        }
    }
    if rng.random_bool(0.25) {
        values.push(rng.random_range(-1.0..-0.01));
    }
    if rng.random_bool(0.25) {
        values.push(rng.random_range(1.01..2.0));
    }
    values.sort_by(f64::total_cmp);
    let zero = values.iter().position(|&v| v == 0.0).expect("0 present");
    let one = values.iter().position(|&v| v == 1.0).expect("1 present");

    let labels: Vec<usize> = (0..m).map(|_| rng.random_range(0..values.len())).collect();
    let u = givens_chain(rng, m, 3 * m);
    let blocks: Vec<CMatrix> = (0..values.len())
        .map(|j| {
            let bits: Vec<bool> = labels.iter().map(|&l| l == j).collect();
            let d = TailedProjection::diagonal(&bits, Cycle::constant(false));
            crate::spectral::hermitian_part(&(&u * d.block() * u.adjoint()))
        })
        .collect();
    let period = rng.random_range(1..=4);
    let tail: Vec<usize> = (0..period)
        .map(|_| if rng.random_bool(0.5) { zero } else { one })
        .collect();
    FiniteSpectrumOp::new(values, blocks, tail).expect("valid instance")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::max_abs;

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(3);
        for n in [1, 2, 7, 20] {
            let u = random_unitary(&mut r, n);
            assert!(max_abs(&(u.adjoint() * &u - CMatrix::identity(n, n))) < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = random_tailed_pair(&mut rng(11), 16);
        let b = random_tailed_pair(&mut rng(11), 16);
        assert_eq!(a.p, b.p);
        assert_eq!(a.index, b.index);
    }

    #[test]
    fn admissible_sequences_have_integer_sums() {
        let mut r = rng(5);
        for _ in 0..50 {
            let d = random_sequence(&mut r, 10, true);
            let s: f64 = d.prefix().iter().sum();
            assert!((s - s.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn contraction_sample_maps_into_q() {
        let mut r = rng(9);
        for _ in 0..20 {
            let s = random_contraction(&mut r, 10);
            let qx = s.q.as_operator().compose(&s.x);
            assert!(qx.distance(&s.x) < 1e-10);
            assert!(crate::spectral::operator_norm(s.x.block()) <= 1.0 + 1e-10);
        }
    }
}
