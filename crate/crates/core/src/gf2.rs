//! Exact GF(2) vectors and square matrices packed into machine words.
//!
//! Position 1 of a vector is the leftmost character of its textual form
//! (`"100000"` has its single one at position 1). Internally position `i`
//! lives at bit `n - i` of a `u64`, so comparing the packed words of two
//! equal-length vectors is the same as comparing their bitstrings
//! lexicographically.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_LEN: usize = 64;

/// A single element of GF(2).
pub type Bit = u8;

#[inline]
fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// An `n`-bit word over GF(2), `1 <= n <= 64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    // Field order matters: derived `Ord` compares length first, then bits.
    len: u8,
    bits: u64,
}

impl BitVector {
    /// Builds a vector from its packed form; bits above `n` must be clear.
    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > MAX_LEN {
            return Err(Error::UnsupportedLength(n));
        }
        if bits & !mask(n) != 0 {
            return Err(Error::InvalidBitstring(format!(
                "{bits:#x} does not fit in {n} bits"
            )));
        }
        Ok(Self { len: n as u8, bits })
    }

    pub(crate) fn from_bits_unchecked(n: usize, bits: u64) -> Self {
        debug_assert!((1..=MAX_LEN).contains(&n) && bits & !mask(n) == 0);
        Self { len: n as u8, bits }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_bits(n, 0)
    }

    /// The all-ones string `1…1`.
    pub fn ones(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_LEN {
            return Err(Error::UnsupportedLength(n));
        }
        Ok(Self::from_bits_unchecked(n, mask(n)))
    }

    /// Unit vector with a one at `position` (1-based, leftmost = 1).
    pub fn unit(n: usize, position: usize) -> Result<Self> {
        if position == 0 || position > n {
            return Err(Error::ComponentIndex { index: position, n });
        }
        Self::from_bits(n, 1u64 << (n - position))
    }

    pub fn from_slice(bits: &[Bit]) -> Result<Self> {
        let n = bits.len();
        if n == 0 || n > MAX_LEN {
            return Err(Error::UnsupportedLength(n));
        }
        let mut packed = 0u64;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidBitstring(format!("{bits:?}")));
            }
            packed = (packed << 1) | b as u64;
        }
        Ok(Self::from_bits_unchecked(n, packed))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Packed representation; position `i` is bit `n - i`.
    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Bit at 1-based `position`.
    pub fn get(&self, position: usize) -> Bit {
        assert!(
            position >= 1 && position <= self.len(),
            "position out of range"
        );
        ((self.bits >> (self.len() - position)) & 1) as Bit
    }

    pub fn to_vec(&self) -> Vec<Bit> {
        (1..=self.len()).map(|i| self.get(i)).collect()
    }

    #[inline]
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    #[inline]
    pub fn parity(&self) -> Bit {
        (self.bits.count_ones() & 1) as Bit
    }

    /// Componentwise complement `1 ⊕ x`.
    #[inline]
    pub fn reverse(&self) -> Self {
        Self::from_bits_unchecked(self.len(), !self.bits & mask(self.len()))
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn is_ones(&self) -> bool {
        self.bits == mask(self.len())
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self::from_bits_unchecked(
            self.len(),
            self.bits ^ other.bits,
        ))
    }

    pub fn dot(&self, other: &Self) -> Result<Bit> {
        self.check_len(other)?;
        Ok(dot_bits(self.bits, other.bits))
    }
}

/// Inner product of two packed words, mod 2.
#[inline]
pub fn dot_bits(a: u64, b: u64) -> Bit {
    ((a & b).count_ones() & 1) as Bit
}

/// `⊕ᵢ xᵢyᵢ (mod 2)`.
pub fn inner_product(x: &BitVector, y: &BitVector) -> Result<Bit> {
    x.dot(y)
}

/// Componentwise XOR of a non-empty list of equal-length vectors.
pub fn xor_sum(vs: &[BitVector]) -> Result<BitVector> {
    let (first, rest) = vs.split_first().ok_or(Error::EmptyArguments)?;
    rest.iter().try_fold(*first, |acc, v| acc.xor(v))
}

pub fn parity(v: &BitVector) -> Bit {
    v.parity()
}

pub fn reverse(x: &BitVector) -> BitVector {
    x.reverse()
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.len() {
            f.write_str(if self.get(i) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.len() > MAX_LEN || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::InvalidBitstring(s.to_string()));
        }
        let bits = s
            .bytes()
            .fold(0u64, |acc, b| (acc << 1) | (b - b'0') as u64);
        Ok(Self::from_bits_unchecked(s.len(), bits))
    }
}

impl Serialize for BitVector {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Square `n × n` matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn identity(n: usize) -> Result<Self> {
        let rows = (1..=n)
            .map(|i| BitVector::unit(n, i).map(|v| v.bits()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, rows })
    }

    pub fn from_rows(rows: &[BitVector]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyArguments);
        }
        for r in rows {
            if r.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: r.len(),
                });
            }
        }
        Ok(Self {
            n,
            rows: rows.iter().map(BitVector::bits).collect(),
        })
    }

    pub(crate) fn from_packed_rows(n: usize, rows: Vec<u64>) -> Self {
        debug_assert_eq!(rows.len(), n);
        Self { n, rows }
    }

    /// Permutation matrix sending position `i` to position `perm[i - 1]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut rows = vec![0u64; n];
        let mut seen = vec![false; n];
        for (i, &target) in perm.iter().enumerate() {
            if target == 0 || target > n || seen[target - 1] {
                return Err(Error::Settings(format!("{perm:?} is not a permutation")));
            }
            seen[target - 1] = true;
            rows[target - 1] |= 1u64 << (n - 1 - i);
        }
        Ok(Self { n, rows })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector::from_bits_unchecked(self.n, self.rows[i])
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = BitVector> + '_ {
        self.rows
            .iter()
            .map(|&r| BitVector::from_bits_unchecked(self.n, r))
    }

    pub(crate) fn packed_rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> BitVector {
        let shift = self.n - 1 - j;
        let bits = self
            .rows
            .iter()
            .fold(0u64, |acc, &r| (acc << 1) | ((r >> shift) & 1));
        BitVector::from_bits_unchecked(self.n, bits)
    }

    pub fn transpose(&self) -> Self {
        Self {
            n: self.n,
            rows: (0..self.n).map(|j| self.column(j).bits()).collect(),
        }
    }

    /// `Mx`: component `i` is `rowᵢ · x`.
    pub fn apply(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: x.len(),
            });
        }
        Ok(BitVector::from_bits_unchecked(
            self.n,
            self.apply_bits(x.bits()),
        ))
    }

    #[inline]
    pub(crate) fn apply_bits(&self, x: u64) -> u64 {
        self.rows
            .iter()
            .fold(0u64, |acc, &r| (acc << 1) | dot_bits(r, x) as u64)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        // Row i of AB is the XOR of the rows of B selected by row i of A.
        let rows = self
            .rows
            .iter()
            .map(|&a| {
                (0..self.n)
                    .filter(|&k| (a >> (self.n - 1 - k)) & 1 == 1)
                    .fold(0u64, |acc, k| acc ^ other.rows[k])
            })
            .collect();
        Ok(Self { n: self.n, rows })
    }

    pub fn is_identity(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, &r)| r == 1u64 << (self.n - 1 - i))
    }

    /// `RᵗR = I`, i.e. the rows are pairwise orthogonal with odd self-parity.
    pub fn is_orthogonal(&self) -> bool {
        // RᵗR = I  <=>  R⁻¹ = Rᵗ  <=>  RRᵗ = I, which is the row condition.
        self.rows.iter().enumerate().all(|(i, &ri)| {
            self.rows
                .iter()
                .enumerate()
                .all(|(j, &rj)| dot_bits(ri, rj) == u8::from(i == j))
        })
    }

    pub fn render(&self) -> String {
        self.rows()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows().map(|r| r.to_string()).collect();
        write!(f, "BitMatrix[{}]", rows.join(" "))
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    /// Parses `n` bitstring lines (or whitespace-separated rows).
    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<BitVector>>>()?;
        Self::from_rows(&rows)
    }
}

pub fn mat_apply(m: &BitMatrix, x: &BitVector) -> Result<BitVector> {
    m.apply(x)
}

pub fn mat_mul(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    a.mul(b)
}

pub fn mat_transpose(m: &BitMatrix) -> BitMatrix {
    m.transpose()
}

pub fn is_orthogonal(r: &BitMatrix) -> bool {
    r.is_orthogonal()
}
