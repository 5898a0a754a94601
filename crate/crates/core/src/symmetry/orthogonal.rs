//! Enumeration of `n × n` matrices with `RᵗR = I` over GF(2).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{dot_bits, BitMatrix};
use crate::input_spaces::MAX_ENUMERATION_N;

/// Matrices in lexicographic row order, possibly cut short at the limit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrthogonalEnumeration {
    pub n: usize,
    #[serde(skip)]
    pub matrices: Vec<BitMatrix>,
    pub count: usize,
    pub truncated: bool,
}

/// Row-by-row backtracking. Every row is odd and orthogonal to the rows above
/// it, which makes the rows orthonormal and hence the matrix orthogonal.
pub fn enumerate_orthogonal(n: usize, limit: usize) -> Result<OrthogonalEnumeration> {
    enumerate_orthogonal_with(n, limit, &|_| true)
}

/// Like [`enumerate_orthogonal`], but `accept` sees every partial row stack
/// and prunes the branch when it returns false.
pub(crate) fn enumerate_orthogonal_with(
    n: usize,
    limit: usize,
    accept: &dyn Fn(&[u64]) -> bool,
) -> Result<OrthogonalEnumeration> {
    if n == 0 || n > MAX_ENUMERATION_N {
        return Err(Error::Infeasible {
            n,
            min: 1,
            max: MAX_ENUMERATION_N,
        });
    }
    let odd: Vec<u64> = (0..1u64 << n).filter(|v| v.count_ones() % 2 == 1).collect();
    let mut out = Vec::new();
    let mut rows = Vec::with_capacity(n);
    let truncated = !search(n, &odd, &mut rows, &mut out, limit, accept);
    Ok(OrthogonalEnumeration {
        n,
        count: out.len(),
        matrices: out,
        truncated,
    })
}

// Returns false once the limit stops the search early.
fn search(
    n: usize,
    candidates: &[u64],
    rows: &mut Vec<u64>,
    out: &mut Vec<BitMatrix>,
    limit: usize,
    accept: &dyn Fn(&[u64]) -> bool,
) -> bool {
    if rows.len() == n {
        if out.len() == limit {
            return false;
        }
        out.push(BitMatrix::from_packed_rows(n, rows.clone()));
        return true;
    }
    let remaining = n - rows.len();
    if candidates.len() < remaining {
        return true;
    }
    for (i, &c) in candidates.iter().enumerate() {
        // candidates stay orthogonal to every chosen row, so only the new
        // row needs filtering against
        let next: Vec<u64> = candidates
            .iter()
            .enumerate()
            .filter(|&(j, &v)| j != i && dot_bits(v, c) == 0)
            .map(|(_, &v)| v)
            .collect();
        if next.len() + 1 < remaining {
            continue;
        }
        rows.push(c);
        let keep_going = !accept(rows) || search(n, &next, rows, out, limit, accept);
        rows.pop();
        if !keep_going {
            return false;
        }
    }
    true
}
