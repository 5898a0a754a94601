//! Algebraic normal form via the binary Möbius transform.

use crate::error::{Error, Result};
use crate::gf2::Bit;
use crate::input_spaces::MAX_ENUMERATION_N;

use super::SymmetryElement;

/// ANF coefficients of a Boolean function on `n` variables.
///
/// Monomials are indexed by a packed mask in the same layout as
/// [`crate::BitVector`]: variable `xᵢ` (position `i`) is bit `n - i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anf {
    n: usize,
    coeffs: Vec<Bit>,
}

impl Anf {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[Bit] {
        &self.coeffs
    }

    /// `C⁰`.
    pub fn constant(&self) -> Bit {
        self.coeffs[0]
    }

    /// `C¹ᵢ` for 1-based variable position `i`.
    pub fn linear(&self, position: usize) -> Bit {
        self.coeffs[1usize << (self.n - position)]
    }

    /// Coefficient of `∏_{i ∈ positions} xᵢ`.
    pub fn coefficient(&self, positions: &[usize]) -> Bit {
        let m = positions
            .iter()
            .fold(0usize, |acc, &p| acc | 1usize << (self.n - p));
        self.coeffs[m]
    }

    /// Highest monomial degree with a nonzero coefficient; 0 for constants.
    pub fn degree(&self) -> u32 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 1)
            .map(|(m, _)| m.count_ones())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Möbius transform of a truth table indexed by packed input.
pub fn anf_of_truth_table(n: usize, table: &[Bit]) -> Result<Anf> {
    if n > MAX_ENUMERATION_N {
        return Err(Error::Infeasible {
            n,
            min: 1,
            max: MAX_ENUMERATION_N,
        });
    }
    if table.len() != 1usize << n {
        return Err(Error::LengthMismatch {
            left: 1usize << n,
            right: table.len(),
        });
    }
    let mut a = table.to_vec();
    for i in 0..n {
        let bit = 1usize << i;
        for m in 0..a.len() {
            if m & bit != 0 {
                a[m] ^= a[m ^ bit];
            }
        }
    }
    Ok(Anf { n, coeffs: a })
}

/// ANF of output component `component` (1-based) of `x ↦ Rx ⊕ T`.
pub fn component_anf(f: &SymmetryElement, component: usize) -> Result<Anf> {
    let n = f.n();
    if component == 0 || component > n {
        return Err(Error::ComponentIndex {
            index: component,
            n,
        });
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::Infeasible {
            n,
            min: 1,
            max: MAX_ENUMERATION_N,
        });
    }
    let row = f.matrix().packed_rows()[component - 1];
    let t = f.shift().get(component);
    let table: Vec<Bit> = (0..1u64 << n)
        .map(|x| crate::gf2::dot_bits(row, x) ^ t)
        .collect();
    anf_of_truth_table(n, &table)
}
