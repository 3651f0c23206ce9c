//! Symbolic invariants of a projection pair.
//!
//! A pair `(p, q)` is determined up to unitary equivalence by four
//! intersection dimensions and the spectrum of the angle operator `s` on the
//! generic part. Here `s` is stored as a finite head plus a decay class for the
//! tail, which is enough to decide Fredholmness, ideal membership of `p - q`,
//! corner traces and the index exactly.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default number of terms used when comparing symbolic sequences.
pub const MAJORIZATION_HORIZON: usize = 10_000;

/// Dimension of a closed subspace: a natural number or countably infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cardinal {
    Finite(u64),
    Infinite,
}

impl Cardinal {
    pub const ZERO: Cardinal = Cardinal::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Cardinal::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Cardinal::Finite(n) => Some(n),
            Cardinal::Infinite => None,
        }
    }

    /// `self - other` as a signed integer; both operands must be finite.
    pub fn signed_diff(self, other: Cardinal) -> Result<i64> {
        match (self, other) {
            (Cardinal::Finite(a), Cardinal::Finite(b)) => Ok(a as i64 - b as i64),
            _ => Err(Error::InfiniteArithmetic(format!(
                "{self} - {other} is undefined"
            ))),
        }
    }
}

impl Add for Cardinal {
    type Output = Cardinal;

    fn add(self, rhs: Cardinal) -> Cardinal {
        match (self, rhs) {
            (Cardinal::Finite(a), Cardinal::Finite(b)) => Cardinal::Finite(a + b),
            _ => Cardinal::Infinite,
        }
    }
}

impl From<usize> for Cardinal {
    fn from(n: usize) -> Self {
        Cardinal::Finite(n as u64)
    }
}

impl fmt::Display for Cardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinal::Finite(n) => write!(f, "{n}"),
            Cardinal::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Cardinal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cardinal::Finite(n) => s.serialize_u64(*n),
            Cardinal::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Cardinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Cardinal::Finite(n)),
            Raw::Str(s) if s == "inf" => Ok(Cardinal::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a nonnegative integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Member of the chain FiniteRank ⊂ Schatten(p) ⊂ Schatten(p') ⊂ Compact
/// (p < p').
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p", rename_all = "snake_case")]
pub enum IdealClass {
    FiniteRank,
    Schatten(f64),
    Compact,
}

impl IdealClass {
    pub fn validate(self) -> Result<Self> {
        match self {
            IdealClass::Schatten(p) if !(p > 0.0 && p.is_finite()) => Err(Error::Validation(
                format!("Schatten exponent must be positive and finite, got {p}"),
            )),
            other => Ok(other),
        }
    }

    /// `self ⊆ other` in the lattice order.
    pub fn is_subset_of(self, other: IdealClass) -> bool {
        use IdealClass::*;
        match (self, other) {
            (FiniteRank, _) | (_, Compact) => true,
            (Schatten(a), Schatten(b)) => a <= b,
            _ => false,
        }
    }

    /// `J = J²`; only the two ends of the chain qualify.
    pub fn is_idempotent(self) -> bool {
        !matches!(self, IdealClass::Schatten(_))
    }
}

/// Power of an ideal: `x ∈ J` implies `|x|^e ∈ J^e`.
pub fn ideal_pow(ideal: IdealClass, exponent: f64) -> Result<IdealClass> {
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::Validation(format!(
            "ideal exponent must be positive, got {exponent}"
        )));
    }
    Ok(match ideal.validate()? {
        IdealClass::Schatten(p) => IdealClass::Schatten(p / exponent),
        fixed => fixed,
    })
}

/// Asymptotic class of a sequence tending to zero. Power decay is
/// `k^{-α}` for `k = 2, 3, ...`, geometric decay is `r^k` for `k = 1, 2, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "snake_case")]
pub enum Decay {
    /// Finitely supported.
    None,
    PowerDecay(f64),
    Geometric(f64),
}

impl Decay {
    pub fn validate(self) -> Result<Self> {
        match self {
            Decay::PowerDecay(a) if !(a > 0.0 && a.is_finite()) => Err(Error::Validation(
                format!("power decay exponent must be positive, got {a}"),
            )),
            Decay::Geometric(r) if !(r > 0.0 && r < 1.0) => Err(Error::Validation(format!(
                "geometric ratio must lie in (0, 1), got {r}"
            ))),
            other => Ok(other),
        }
    }

    /// Whether a diagonal operator with this singular-value tail lies in `ideal`.
    pub fn in_ideal(self, ideal: IdealClass) -> bool {
        match (self, ideal) {
            (Decay::None, _) => true,
            (_, IdealClass::FiniteRank) => false,
            (_, IdealClass::Compact) => true,
            (Decay::Geometric(_), IdealClass::Schatten(_)) => true,
            (Decay::PowerDecay(alpha), IdealClass::Schatten(p)) => alpha * p > 1.0,
        }
    }

    /// The `k`-th tail term, `k >= 0`.
    pub fn term(self, k: usize) -> f64 {
        match self {
            Decay::None => 0.0,
            Decay::PowerDecay(alpha) => ((k + 2) as f64).powf(-alpha),
            Decay::Geometric(r) => r.powi(k as i32 + 1),
        }
    }
}

/// Spectrum of the angle operator `s`: a non-increasing head in (0, 1) and a
/// decaying tail. Repeated head values encode multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SSpectrum {
    pub head: Vec<f64>,
    pub tail: Decay,
}

impl SSpectrum {
    pub fn empty() -> Self {
        SSpectrum {
            head: Vec::new(),
            tail: Decay::None,
        }
    }

    pub fn new(mut head: Vec<f64>, tail: Decay) -> Result<Self> {
        if let Some(bad) = head.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
            return Err(Error::Validation(format!(
                "s-value {bad} outside the open interval (0, 1)"
            )));
        }
        head.sort_by(|a, b| b.total_cmp(a));
        Ok(SSpectrum {
            head,
            tail: tail.validate()?,
        })
    }

    pub fn in_ideal(&self, ideal: IdealClass) -> bool {
        self.tail.in_ideal(ideal)
    }

    /// First `horizon` terms: head followed by tail terms.
    pub fn terms(&self, horizon: usize) -> Vec<f64> {
        let mut out: Vec<f64> = self.head.iter().copied().take(horizon).collect();
        let mut k = 0;
        while out.len() < horizon {
            out.push(self.tail.term(k));
            k += 1;
        }
        out
    }

    pub fn norm(&self) -> f64 {
        let tail_max = match self.tail {
            Decay::None => 0.0,
            t => t.term(0),
        };
        self.head.first().copied().unwrap_or(0.0).max(tail_max)
    }
}

/// Halmos invariants of a pair `(p, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalPair {
    /// dim(p ∧ q)
    pub n11: Cardinal,
    /// dim(p ∧ q⊥)
    pub n10: Cardinal,
    /// dim(p⊥ ∧ q)
    pub n01: Cardinal,
    /// dim(p⊥ ∧ q⊥)
    pub n00: Cardinal,
    pub s: SSpectrum,
}

impl CanonicalPair {
    pub fn new(n11: Cardinal, n10: Cardinal, n01: Cardinal, n00: Cardinal, s: SSpectrum) -> Self {
        CanonicalPair {
            n11,
            n10,
            n01,
            n00,
            s,
        }
    }

    /// Invariants of `(q, p)`.
    pub fn swap(&self) -> Self {
        CanonicalPair {
            n10: self.n01,
            n01: self.n10,
            ..self.clone()
        }
    }
}

/// Fredholm pair test. Stored s-spectra always decay to zero, so the generic
/// part never obstructs and only the cross intersections matter.
pub fn pair_is_fredholm(cp: &CanonicalPair) -> bool {
    cp.n10.is_finite() && cp.n01.is_finite()
}

/// `[p:q] = dim(p ∧ q⊥) − dim(p⊥ ∧ q)`.
pub fn pair_index(cp: &CanonicalPair) -> Result<i64> {
    if !pair_is_fredholm(cp) {
        return Err(Error::NotFredholm(format!(
            "dim(p∧q⊥) = {}, dim(p⊥∧q) = {}",
            cp.n10, cp.n01
        )));
    }
    cp.n10.signed_diff(cp.n01)
}

/// `p − q ∈ J` iff both cross intersections are finite and `s ∈ J`.
pub fn diff_in_ideal(cp: &CanonicalPair, ideal: IdealClass) -> bool {
    pair_is_fredholm(cp) && cp.s.in_ideal(ideal)
}

/// Outcome of the corner-trace formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum CornerTrace {
    Defined(i64),
    Undefined(String),
}

/// `tr(q(p−q)q + q⊥(p−q)q⊥)` when `p − q` is Hilbert–Schmidt. The `±s²`
/// contributions of the generic part cancel, leaving `n10 − n01`.
pub fn corner_trace(cp: &CanonicalPair) -> CornerTrace {
    if !pair_is_fredholm(cp) {
        return CornerTrace::Undefined(format!(
            "cross intersections are not finite (n10 = {}, n01 = {})",
            cp.n10, cp.n01
        ));
    }
    if !cp.s.in_ideal(IdealClass::Schatten(2.0)) {
        return CornerTrace::Undefined(format!(
            "s is not Hilbert-Schmidt (tail {:?})",
            cp.s.tail
        ));
    }
    match pair_index(cp) {
        Ok(i) => CornerTrace::Defined(i),
        Err(e) => CornerTrace::Undefined(e.to_string()),
    }
}

/// Existence of a unitary `u ∈ 1 + J` with `u q u* = p`.
pub fn conjugator_exists(cp: &CanonicalPair, ideal: IdealClass) -> bool {
    diff_in_ideal(cp, ideal) && pair_index(cp) == Ok(0)
}

/// Whether `xi` is majorized by `eta`: every partial sum of the decreasing
/// rearrangement of `xi` is at most the matching partial sum for `eta`.
pub fn majorized_by(xi: &[f64], eta: &[f64]) -> Result<bool> {
    if xi.len() != eta.len() {
        return Err(Error::DimensionMismatch(format!(
            "sequences have lengths {} and {}",
            xi.len(),
            eta.len()
        )));
    }
    if let Some(v) = xi.iter().chain(eta).find(|v| !(**v >= 0.0)) {
        return Err(Error::Validation(format!("entry {v} is negative")));
    }
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    let (xs, es) = (sorted(xi), sorted(eta));
    let (mut sx, mut se) = (0.0, 0.0);
    for (x, e) in xs.iter().zip(&es) {
        sx += x;
        se += e;
        if sx > se + 1e-12 * se.abs().max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Majorization of two symbolic sequences checked on their first `horizon`
/// terms. A `true` answer is evidence on the horizon, not a proof.
pub fn majorized_on_horizon(xi: &SSpectrum, eta: &SSpectrum, horizon: usize) -> Result<bool> {
    majorized_by(&xi.terms(horizon), &eta.terms(horizon))
}

/// Status of the diagonal-equality half of [`IndexShiftWitness`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum DiagonalCertificate {
    /// Relies on an existence theorem with no construction available here.
    Unverified(String),
}

/// A pair `(p', q)` whose index differs from that of `(p, q)` although the
/// two projections share a diagonal in some basis diagonalizing `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexShiftWitness {
    pub pair: CanonicalPair,
    pub index_before: i64,
    pub index_after: i64,
    pub diagonal_equality: DiagonalCertificate,
}

/// For `p − q` compact but not Hilbert–Schmidt, adjoin a rank-one piece of
/// `q⊥` to `p`: the generic part keeps index zero and the new line sits in
/// `p' ∧ q⊥`, so the index goes up by exactly one.
pub fn index_shift_witness(cp: &CanonicalPair) -> Result<IndexShiftWitness> {
    if !diff_in_ideal(cp, IdealClass::Compact) {
        return Err(Error::PreconditionFailed(
            "p - q is not compact: a cross intersection is infinite".into(),
        ));
    }
    if diff_in_ideal(cp, IdealClass::Schatten(2.0)) {
        return Err(Error::PreconditionFailed(
            "p - q is Hilbert-Schmidt, so the diagonal determines the index".into(),
        ));
    }
    let index_before = pair_index(cp)?;
    let pair = CanonicalPair {
        n10: cp.n10 + Cardinal::Finite(1),
        ..cp.clone()
    };
    let index_after = pair_index(&pair)?;
    Ok(IndexShiftWitness {
        pair,
        index_before,
        index_after,
        diagonal_equality: DiagonalCertificate::Unverified(
            "a unitary on q⊥H matching the diagonal exists by the compact Schur-Horn theorem; \
             it is not constructed"
                .into(),
        ),
    })
}
