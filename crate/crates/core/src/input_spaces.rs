//! Admissible measurement inputs (odd parity) and translations (even parity)
//! for even `n`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVector, MAX_LEN};

/// Largest `n` for which full spaces are enumerated.
pub const MAX_ENUMERATION_N: usize = 16;

/// Smallest `n` at which the admissibility conditions are asserted for the
/// full input space in the reference derivation. Smaller even `n` still
/// works algebraically; reports flag it.
pub const REFERENCE_REGIME_MIN_N: usize = 6;

pub fn below_reference_regime(n: usize) -> bool {
    n < REFERENCE_REGIME_MIN_N
}

/// An odd-parity vector of even length.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct InputPoint(BitVector);

impl InputPoint {
    pub fn new(v: BitVector) -> Result<Self> {
        if v.len() % 2 != 0 {
            return Err(Error::OddDimension(v.len()));
        }
        if v.parity() != 1 {
            return Err(Error::OddParityRequired(v.to_string()));
        }
        Ok(Self(v))
    }

    pub fn vector(&self) -> BitVector {
        self.0
    }

    /// Opposite measurement direction; odd parity survives for even `n`.
    pub fn reverse(&self) -> Self {
        Self(self.0.reverse())
    }
}

impl Deref for InputPoint {
    type Target = BitVector;

    fn deref(&self) -> &BitVector {
        &self.0
    }
}

impl std::str::FromStr for InputPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

impl<'de> Deserialize<'de> for InputPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = BitVector::deserialize(d)?;
        Self::new(v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for InputPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for InputPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InputPoint({})", self.0)
    }
}

/// An even-parity vector of even length.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct TranslationPoint(BitVector);

impl TranslationPoint {
    pub fn new(v: BitVector) -> Result<Self> {
        if v.len() % 2 != 0 {
            return Err(Error::OddDimension(v.len()));
        }
        if v.parity() != 0 {
            return Err(Error::EvenParityRequired(v.to_string()));
        }
        Ok(Self(v))
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(BitVector::zeros(n)?)
    }

    pub fn vector(&self) -> BitVector {
        self.0
    }
}

impl Deref for TranslationPoint {
    type Target = BitVector;

    fn deref(&self) -> &BitVector {
        &self.0
    }
}

impl std::str::FromStr for TranslationPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

impl fmt::Display for TranslationPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for TranslationPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TranslationPoint({})", self.0)
    }
}

/// A canonically ordered set of input points of common length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputSpace {
    n: usize,
    points: Vec<InputPoint>,
}

impl InputSpace {
    /// Builds a space from arbitrary points; sorts and de-duplicates.
    pub fn from_points(n: usize, points: impl IntoIterator<Item = InputPoint>) -> Result<Self> {
        let set: BTreeSet<InputPoint> = points.into_iter().collect();
        if let Some(bad) = set.iter().find(|p| p.len() != n) {
            return Err(Error::LengthMismatch {
                left: n,
                right: bad.len(),
            });
        }
        Ok(Self {
            n,
            points: set.into_iter().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[InputPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.points.binary_search_by(|p| p.vector().cmp(v)).is_ok()
    }

    /// Lexicographically least point.
    pub fn least(&self) -> Option<InputPoint> {
        self.points.first().copied()
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n % 2 != 0 {
        return Err(Error::OddDimension(n));
    }
    if !(2..=MAX_ENUMERATION_N).contains(&n) {
        return Err(Error::Infeasible {
            n,
            min: 2,
            max: MAX_ENUMERATION_N,
        });
    }
    Ok(())
}

fn vectors_with_parity(n: usize, parity: u32) -> impl Iterator<Item = BitVector> {
    (0..1u64 << n)
        .filter(move |b| b.count_ones() & 1 == parity)
        .map(move |b| BitVector::from_bits_unchecked(n, b))
}

/// All `2^(n-1)` odd-parity vectors of length `n`, lexicographic order.
pub fn enumerate_inputs(n: usize) -> Result<InputSpace> {
    check_dimension(n)?;
    Ok(InputSpace {
        n,
        points: vectors_with_parity(n, 1).map(InputPoint).collect(),
    })
}

/// All `2^(n-1)` even-parity vectors of length `n`, lexicographic order.
pub fn enumerate_translations(n: usize) -> Result<Vec<TranslationPoint>> {
    check_dimension(n)?;
    Ok(vectors_with_parity(n, 0).map(TranslationPoint).collect())
}

/// The four flip-covariance relations between `x`, `y` and their reversals:
/// `x·(y⊕ȳ) = 1`, `(x⊕x̄)·y = 1`, `x̄·y = x·ȳ`, `x·y = x̄·ȳ`.
pub fn check_admissibility(x: &BitVector, y: &BitVector) -> Result<bool> {
    let xr = x.reverse();
    let yr = y.reverse();
    let r1 = x.dot(&y.xor(&yr)?)? == 1;
    let r2 = x.xor(&xr)?.dot(y)? == 1;
    let r3 = xr.dot(y)? == x.dot(&yr)?;
    let r4 = x.dot(y)? == xr.dot(&yr)?;
    Ok(r1 && r2 && r3 && r4)
}

/// Checks that XORs of odd-size tuples stay inside `space`.
///
/// Closure under triples implies closure under every odd arity, so small
/// spaces (at most 64 points, which covers all of `n <= 6`) are checked on
/// every triple. Larger spaces are checked on `trials` random triples and
/// 5-tuples drawn from a fixed-seed generator.
pub fn odd_sum_closure_check(space: &InputSpace, trials: usize) -> bool {
    let pts = space.points();
    if pts.is_empty() {
        return true;
    }
    let inside = |bits: u64| space.contains(&BitVector::from_bits_unchecked(space.n(), bits));
    if pts.len() <= 64 {
        for a in pts {
            for b in pts {
                for c in pts {
                    if !inside(a.bits() ^ b.bits() ^ c.bits()) {
                        return false;
                    }
                }
            }
        }
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dd5_0c10);
    (0..trials).all(|t| {
        let arity = if t % 2 == 0 { 3 } else { 5 };
        let sum = (0..arity).fold(0u64, |acc, _| {
            acc ^ pts[rng.random_range(0..pts.len())].bits()
        });
        inside(sum)
    })
}

/// One bitstring per line, `#` comments allowed.
pub fn render_space<'a>(header: &str, points: impl IntoIterator<Item = &'a BitVector>) -> String {
    let mut out = String::new();
    for line in header.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    for p in points {
        out.push_str(&p.to_string());
        out.push('\n');
    }
    out
}

/// Inverse of [`render_space`]: skips blank and `#` lines.
pub fn parse_space(text: &str) -> Result<Vec<BitVector>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v = line.parse::<BitVector>().map_err(|e| Error::FixtureParse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(v);
    }
    if let Some(first) = out.first() {
        if let Some(bad) = out.iter().find(|v| v.len() != first.len()) {
            return Err(Error::LengthMismatch {
                left: first.len(),
                right: bad.len(),
            });
        }
    }
    Ok(out)
}

/// Checked constructor for tests and callers that need a quick point.
pub fn input_point(s: &str) -> Result<InputPoint> {
    s.parse()
}

const _: () = assert!(MAX_ENUMERATION_N <= MAX_LEN);
