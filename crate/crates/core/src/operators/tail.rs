use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A periodic subset of `{0, 1, 2, ...}` given by one period of membership
/// bits, always stored at its minimal period. Offsets are relative to an
/// anchor chosen by the owner (usually the end of an active window).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cycle {
    bits: Vec<bool>,
}

impl Cycle {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Validation("periodic pattern needs at least one bit".into()));
        }
        Ok(Cycle { bits: minimal_period(bits) })
    }

    pub fn constant(bit: bool) -> Self {
        Cycle { bits: vec![bit] }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn period(&self) -> usize {
        self.bits.len()
    }

    /// Members per period.
    pub fn density(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty_set(&self) -> bool {
        self.density() == 0
    }

    pub fn is_full(&self) -> bool {
        self.density() == self.period()
    }

    /// Both the set and its complement are infinite.
    pub fn is_infinite_coinfinite(&self) -> bool {
        !self.is_empty_set() && !self.is_full()
    }

    pub fn contains(&self, offset: usize) -> bool {
        self.bits[offset % self.bits.len()]
    }

    /// The same set seen from an anchor `shift` positions later.
    pub fn rotate(&self, shift: usize) -> Cycle {
        let p = self.period();
        Cycle {
            bits: (0..p).map(|i| self.bits[(i + shift) % p]).collect(),
        }
    }

    pub fn complement(&self) -> Cycle {
        Cycle {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// Bits over `len` positions, `len` a multiple of the period.
    pub fn expand(&self, len: usize) -> Vec<bool> {
        (0..len).map(|i| self.contains(i)).collect()
    }

    /// Members in `[0, len)`.
    pub fn count_below(&self, len: usize) -> usize {
        let p = self.period();
        let full = (len / p) * self.density();
        full + self.bits[..len % p].iter().filter(|&&b| b).count()
    }

    /// Offset of the `k`-th member (0-based). The set must be nonempty.
    pub fn nth(&self, k: usize) -> usize {
        let d = self.density();
        assert!(d > 0, "nth member of an empty pattern");
        let within = self
            .bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .nth(k % d)
            .map(|(i, _)| i)
            .unwrap();
        (k / d) * self.period() + within
    }

    /// Smallest `len` such that `[0, len)` holds exactly `count` members.
    pub fn prefix_holding(&self, count: usize) -> usize {
        if count == 0 {
            0
        } else {
            self.nth(count - 1) + 1
        }
    }
}

fn minimal_period(bits: Vec<bool>) -> Vec<bool> {
    let n = bits.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (0..n).all(|i| bits[i] == bits[i % d]) {
            return bits[..d].to_vec();
        }
    }
    bits
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Eventually periodic 0/1 diagonal beyond index `start`: finitely many
/// exceptions, then a repeating cycle anchored at `start`. An eventually
/// constant pattern has a one-bit cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailPattern {
    pub start: usize,
    pub exceptions: BTreeMap<usize, bool>,
    pub cycle: Cycle,
}

impl TailPattern {
    pub fn constant(start: usize, bit: bool) -> Self {
        TailPattern {
            start,
            exceptions: BTreeMap::new(),
            cycle: Cycle::constant(bit),
        }
    }

    pub fn periodic(start: usize, cycle: Cycle) -> Self {
        TailPattern {
            start,
            exceptions: BTreeMap::new(),
            cycle,
        }
    }

    pub fn with_exception(mut self, index: usize, bit: bool) -> Result<Self> {
        if index < self.start {
            return Err(Error::Validation(format!(
                "exception index {index} precedes tail start {}",
                self.start
            )));
        }
        self.exceptions.insert(index, bit);
        Ok(self)
    }

    pub fn bit(&self, index: usize) -> bool {
        debug_assert!(index >= self.start);
        self.exceptions
            .get(&index)
            .copied()
            .unwrap_or_else(|| self.cycle.contains(index - self.start))
    }

    /// One past the last exception, or `start` if there are none.
    pub fn regular_from(&self) -> usize {
        self.exceptions
            .keys()
            .next_back()
            .map_or(self.start, |&k| (k + 1).max(self.start))
    }
}

/// JSON form of a tail: exceptions keyed by index plus either a constant
/// bit or a period of bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct TailDoc {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exceptions: BTreeMap<String, u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<Vec<u8>>,
}

pub(crate) fn bit_from(field: &str, v: u8) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(Error::schema(field, format!("expected 0 or 1, got {other}"))),
    }
}

impl TailDoc {
    pub fn from_cycle(cycle: &Cycle) -> Self {
        let bits: Vec<u8> = cycle.bits().iter().map(|&b| b as u8).collect();
        if bits.len() == 1 {
            TailDoc {
                exceptions: BTreeMap::new(),
                constant: Some(bits[0]),
                period: None,
            }
        } else {
            TailDoc {
                exceptions: BTreeMap::new(),
                constant: None,
                period: Some(bits),
            }
        }
    }

    pub fn to_pattern(&self, start: usize, field: &str) -> Result<TailPattern> {
        let cycle = match (&self.constant, &self.period) {
            (Some(c), None) => Cycle::constant(bit_from(&format!("{field}.constant"), *c)?),
            (None, Some(p)) => {
                let bits = p
                    .iter()
                    .map(|&b| bit_from(&format!("{field}.period"), b))
                    .collect::<Result<Vec<_>>>()?;
                Cycle::new(bits).map_err(|e| Error::schema(format!("{field}.period"), e.to_string()))?
            }
            (None, None) => Cycle::constant(false),
            (Some(_), Some(_)) => {
                return Err(Error::schema(field, "give either `constant` or `period`, not both"))
            }
        };
        let mut pattern = TailPattern::periodic(start, cycle);
        for (k, &v) in &self.exceptions {
            let idx: usize = k.parse().map_err(|_| {
                Error::schema(format!("{field}.exceptions"), format!("key {k:?} is not an index"))
            })?;
            let bit = bit_from(&format!("{field}.exceptions.{k}"), v)?;
            pattern = pattern
                .with_exception(idx, bit)
                .map_err(|e| Error::schema(format!("{field}.exceptions.{k}"), e.to_string()))?;
        }
        Ok(pattern)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_period_reduction() {
        let c = Cycle::new(vec![true, false, true, false]).unwrap();
        assert_eq!(c.bits(), &[true, false]);
        let c = Cycle::new(vec![true; 6]).unwrap();
        assert_eq!(c.period(), 1);
        assert!(Cycle::new(vec![]).is_err());
    }

    #[test]
    fn counting_and_enumeration() {
        let c = Cycle::new(vec![false, true, true]).unwrap();
        assert_eq!(c.count_below(0), 0);
        assert_eq!(c.count_below(2), 1);
        assert_eq!(c.count_below(7), 4);
        assert_eq!((0..5).map(|k| c.nth(k)).collect::<Vec<_>>(), vec![1, 2, 4, 5, 7]);
        assert_eq!(c.prefix_holding(3), 5);
        for k in 0..20 {
            assert_eq!(c.count_below(c.nth(k)), k);
        }
    }

    #[test]
    fn rotation_preserves_membership() {
        let c = Cycle::new(vec![true, false, false, true, false]).unwrap();
        for shift in 0..7 {
            let r = c.rotate(shift);
            for i in 0..15 {
                assert_eq!(r.contains(i), c.contains(i + shift));
            }
        }
    }

    #[test]
    fn pattern_bits_with_exceptions() {
        let p = TailPattern::constant(3, true).with_exception(5, false).unwrap();
        assert!(p.bit(3));
        assert!(!p.bit(5));
        assert!(p.bit(6));
        assert_eq!(p.regular_from(), 6);
        assert!(TailPattern::constant(3, true).with_exception(1, false).is_err());
    }

    #[test]
    fn tail_doc_rejects_bad_bits() {
        let doc = TailDoc {
            exceptions: BTreeMap::new(),
            constant: Some(2),
            period: None,
        };
        match doc.to_pattern(0, "tail") {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "tail.constant"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
