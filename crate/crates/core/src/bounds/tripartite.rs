//! Tripartite Bell parameters `I` and `J` on the three-party box.

use serde::Serialize;

use crate::boxes::{sign, tripartite_parity, TripartiteConfig};
use crate::error::{Error, Result};
use crate::gf2::{dot_bits, BitVector};
use crate::input_spaces::{InputPoint, MAX_ENUMERATION_N};
use crate::Rational;

use super::variance::{mean_square_of, MeanSquare};

/// Two settings per party plus the box constant `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TripartiteSettings {
    pub x: [InputPoint; 2],
    pub y: [InputPoint; 2],
    pub z: [InputPoint; 2],
    pub c: InputPoint,
}

impl TripartiteSettings {
    pub fn new(
        x: [InputPoint; 2],
        y: [InputPoint; 2],
        z: [InputPoint; 2],
        c: InputPoint,
    ) -> Result<Self> {
        let n = c.len();
        for v in x.iter().chain(&y).chain(&z) {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: v.len(),
                });
            }
        }
        Ok(Self { x, y, z, c })
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    /// Correlation `E(xᵢ, yⱼ, z_k)` at zero translation.
    pub fn correlation(&self, i: usize, j: usize, k: usize) -> i64 {
        let cfg = TripartiteConfig::new(self.c);
        sign(
            tripartite_parity(&self.x[i], &self.y[j], &self.z[k], &cfg)
                .expect("validated settings"),
        )
    }

    /// Phase vector `xᵢ ⊕ yⱼ ⊕ z_k ⊕ c` picked up under a translation.
    fn phase(&self, i: usize, j: usize, k: usize) -> u64 {
        self.x[i].bits() ^ self.y[j].bits() ^ self.z[k].bits() ^ self.c.bits()
    }

    /// `y₀ ⊕ z₀ ⊕ y₁ ⊕ z₁ ≠ 0`; otherwise the paired phases in `I` coincide.
    pub fn is_symmetry_reduced(&self) -> bool {
        self.y[0].bits() ^ self.z[0].bits() ^ self.y[1].bits() ^ self.z[1].bits() != 0
    }

    pub fn labeled(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (name, pair) in [("x", &self.x), ("y", &self.y), ("z", &self.z)] {
            for (i, v) in pair.iter().enumerate() {
                out.push((format!("{name}{i}"), v.to_string()));
            }
        }
        out.push(("c".into(), self.c.to_string()));
        out
    }
}

fn unit(n: usize, pos: usize) -> InputPoint {
    InputPoint::new(BitVector::unit(n, pos).expect("position in range")).expect("weight one is odd")
}

/// The `n = 8` instance reaching `I = 4`: `x₀ = e₁`, `x₁ = 10011000`,
/// `y = (e₂, e₅)`, `z = (e₃, e₆)`, `c = e₇`.
pub fn reference_tripartite_settings() -> TripartiteSettings {
    let n = 8;
    TripartiteSettings::new(
        [unit(n, 1), "10011000".parse().expect("odd literal")],
        [unit(n, 2), unit(n, 5)],
        [unit(n, 3), unit(n, 6)],
        unit(n, 7),
    )
    .expect("equal lengths")
}

/// `I = E₀₀₀ + E₀₁₁ + E₁₀₀ − E₁₁₁` at zero translation.
pub fn tripartite_bell_i(s: &TripartiteSettings) -> i64 {
    s.correlation(0, 0, 0) + s.correlation(0, 1, 1) + s.correlation(1, 0, 0)
        - s.correlation(1, 1, 1)
}

/// `⟨I²⟩` with `I(T′) = |E′₀₀₀ + E′₀₁₁| + |E′₁₀₀ − E′₁₁₁|`, each `E′` carrying
/// `(−1)^{(x⊕y⊕z⊕c)·T′}`. `degenerate` marks settings that are not
/// symmetry-reduced.
pub fn mean_square_tripartite_i(s: &TripartiteSettings) -> Result<MeanSquare> {
    let term = |i, j, k| (s.correlation(i, j, k), s.phase(i, j, k));
    let terms = [term(0, 0, 0), term(0, 1, 1), term(1, 0, 0), term(1, 1, 1)];
    let e = |(v, ph): (i64, u64), t: u64| v * sign(dot_bits(ph, t));
    mean_square_of(
        s.n(),
        |t| (e(terms[0], t) + e(terms[1], t)).abs() + (e(terms[2], t) - e(terms[3], t)).abs(),
        !s.is_symmetry_reduced(),
    )
}

/// Signs `s_ijk` of the eight-term parameter, indexed `[i][j][k]`.
pub const J_SIGNS: [[[i64; 2]; 2]; 2] = [[[1, 1], [1, -1]], [[1, -1], [-1, -1]]];

/// `J = Σ s_ijk E_ijk` at zero translation.
pub fn j_signed(s: &TripartiteSettings) -> i64 {
    (0..8)
        .map(|idx| {
            let (i, j, k) = (idx >> 2, (idx >> 1) & 1, idx & 1);
            J_SIGNS[i][j][k] * s.correlation(i, j, k)
        })
        .sum()
}

// (sign · correlation, phase) for each of the eight terms, in [i][j][k] order.
fn j_terms(s: &TripartiteSettings) -> [(i64, u64); 8] {
    std::array::from_fn(|idx| {
        let (i, j, k) = (idx >> 2, (idx >> 1) & 1, idx & 1);
        (J_SIGNS[i][j][k] * s.correlation(i, j, k), s.phase(i, j, k))
    })
}

fn j_pairs(terms: &[(i64, u64); 8], t: u64) -> i64 {
    terms
        .chunks(2)
        .map(|p| (p[0].0 * sign(dot_bits(p[0].1, t)) + p[1].0 * sign(dot_bits(p[1].1, t))).abs())
        .sum()
}

/// `⟨J²⟩` with `J(T′) = Σ_{i,j} |s_ij0 E′_ij0 + s_ij1 E′_ij1|`.
pub fn mean_square_j(s: &TripartiteSettings) -> Result<MeanSquare> {
    let terms = j_terms(s);
    mean_square_of(s.n(), |t| j_pairs(&terms, t), false)
}

/// Largest `|J|` over deterministic local outcomes `a_i, b_j, c_k = ±1`.
pub fn j_local_max() -> i64 {
    let mut best = 0;
    for m in 0..64u32 {
        let v = |bit: u32| 1 - 2 * ((m >> bit) & 1) as i64;
        let j: i64 = (0..8u32)
            .map(|idx| {
                let (i, jj, k) = (idx >> 2, (idx >> 1) & 1, idx & 1);
                J_SIGNS[i as usize][jj as usize][k as usize] * v(i) * v(2 + jj) * v(4 + k)
            })
            .sum();
        best = best.max(j.abs());
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JBound {
    pub n: usize,
    #[serde(serialize_with = "crate::report::ser_ratio")]
    pub mean_square: Rational,
    pub bound: f64,
    pub bound_symbolic: String,
    pub witness: TripartiteSettings,
    pub evaluated: usize,
    pub truncated: bool,
}

/// Enough to scan the full weight-1/weight-3 space at `n = 8` (64³ settings).
pub const J_SEARCH_BUDGET: usize = 1 << 18;

/// Free settings `x₁, y₁, z₁` range over odd vectors of weight 1, then 3.
fn j_candidates(n: usize) -> Vec<InputPoint> {
    let mut v: Vec<InputPoint> = (0..1u64 << n)
        .filter(|b| matches!(b.count_ones(), 1 | 3))
        .map(|b| InputPoint::new(BitVector::from_bits(n, b).expect("n checked")).expect("odd"))
        .collect();
    v.sort_by_key(|p| (p.weight(), std::cmp::Reverse(p.bits())));
    v
}

fn j_search(
    n: usize,
    budget: usize,
    score: impl Fn(&TripartiteSettings) -> Result<i64>,
) -> Result<(i64, TripartiteSettings, usize, bool)> {
    if n < 8 || n % 2 != 0 || n > MAX_ENUMERATION_N {
        return Err(Error::Infeasible {
            n,
            min: 8,
            max: MAX_ENUMERATION_N,
        });
    }
    let cands = j_candidates(n);
    let (x0, y0, z0, c) = (unit(n, 1), unit(n, 2), unit(n, 3), unit(n, 7));
    let mut best: Option<(i64, TripartiteSettings)> = None;
    let mut evaluated = 0;
    for &x1 in &cands {
        for &y1 in &cands {
            for &z1 in &cands {
                if evaluated == budget {
                    let (v, w) = best.ok_or(Error::Settings("search budget is zero".into()))?;
                    return Ok((v, w, evaluated, true));
                }
                let s = TripartiteSettings::new([x0, x1], [y0, y1], [z0, z1], c)?;
                let v = score(&s)?;
                evaluated += 1;
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, s));
                }
            }
        }
    }
    let (v, w) = best.expect("candidate set is nonempty");
    Ok((v, w, evaluated, false))
}

/// Largest signed `J` at zero translation over the search space, with the
/// settings that reach it.
pub fn j_nonlocal_max(n: usize) -> Result<(i64, TripartiteSettings)> {
    let (v, w, _, _) = j_search(n, usize::MAX, |s| Ok(j_signed(s)))?;
    Ok((v, w))
}

/// Largest `√⟨J²⟩` over `x₀ = e₁, y₀ = e₂, z₀ = e₃, c = e₇` and free
/// `x₁, y₁, z₁` of weight 1 or 3, scanning at most `budget` settings.
pub fn tripartite_bell_j_bound(n: usize, budget: usize) -> Result<JBound> {
    // ⟨J²⟩ is a multiple of 1/2^(n−1); scoring on the integer numerator keeps
    // comparisons exact
    let count = 1i64 << (n.saturating_sub(1));
    let (numer, witness, evaluated, truncated) = j_search(n, budget, |s| {
        let ms = mean_square_j(s)?;
        Ok((ms.mean_square * count).to_integer())
    })?;
    let ms = mean_square_j(&witness)?;
    debug_assert_eq!(ms.mean_square, Rational::new(numer, count));
    Ok(JBound {
        n,
        mean_square: ms.mean_square,
        bound: ms.bound,
        bound_symbolic: ms.bound_symbolic,
        witness,
        evaluated,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn reference_settings_reach_four() {
        let s = reference_tripartite_settings();
        let e = [
            s.correlation(0, 0, 0),
            s.correlation(0, 1, 1),
            s.correlation(1, 0, 0),
            s.correlation(1, 1, 1),
        ];
        assert_eq!(e, [1, 1, 1, -1]);
        assert_eq!(tripartite_bell_i(&s), 4);
        let ms = mean_square_tripartite_i(&s).unwrap();
        assert_eq!(ms.mean_square, Rational::from_integer(8));
        assert_eq!(ms.bound_symbolic, "2√2");
        assert!(!ms.degenerate);
    }

    #[test]
    fn unreduced_settings_give_sixteen() {
        let r = reference_tripartite_settings();
        // y₁ ⊕ z₁ = y₀ ⊕ z₀ = e₂ ⊕ e₃
        let s = TripartiteSettings::new(r.x, [r.y[0], r.z[0]], [r.z[0], r.y[0]], r.c).unwrap();
        assert!(!s.is_symmetry_reduced());
        let ms = mean_square_tripartite_i(&s).unwrap();
        assert!(ms.degenerate);
        if tripartite_bell_i(&s).abs() == 4 {
            assert_eq!(ms.mean_square, Rational::from_integer(16));
        }
        // the phase factor is constant across each pair whatever the signs
        let pair = |a: u64, b: u64| a == b;
        assert!(pair(s.phase(0, 0, 0), s.phase(0, 1, 1)));
        assert!(pair(s.phase(1, 0, 0), s.phase(1, 1, 1)));
    }

    #[test]
    fn reduced_settings_with_full_pattern_give_eight() {
        // every reduced setting at n = 8 whose I reaches 4 averages to 8
        let r = reference_tripartite_settings();
        let pts: Vec<InputPoint> = (1..=8).map(|i| unit(8, i)).collect();
        let mut hits = 0;
        for &y1 in &pts {
            for &z1 in &pts {
                let s = TripartiteSettings::new(r.x, [r.y[0], y1], [r.z[0], z1], r.c).unwrap();
                if tripartite_bell_i(&s) == 4 && s.is_symmetry_reduced() {
                    hits += 1;
                    let ms = mean_square_tripartite_i(&s).unwrap();
                    assert_eq!(ms.mean_square, Rational::from_integer(8));
                    assert_eq!(ms.histogram, BTreeMap::from([(0, 64), (16, 64)]));
                }
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn j_limits() {
        assert_eq!(j_local_max(), 4);
        let (nl, w) = j_nonlocal_max(8).unwrap();
        assert_eq!(nl, 8);
        assert_eq!(j_signed(&w), 8);
    }

    #[test]
    fn j_witness_reaches_four_root_two() {
        let n = 8;
        let s = TripartiteSettings::new(
            [unit(n, 1), unit(n, 2)],
            [unit(n, 2), unit(n, 1)],
            [unit(n, 3), unit(n, 1)],
            unit(n, 7),
        )
        .unwrap();
        let ms = mean_square_j(&s).unwrap();
        assert_eq!(ms.mean_square, Rational::from_integer(32));
        assert_eq!(ms.bound_symbolic, "4√2");
    }

    #[test]
    fn j_search_errors() {
        assert!(tripartite_bell_j_bound(6, 10).is_err());
        assert!(tripartite_bell_j_bound(8, 0).is_err());
        let partial = tripartite_bell_j_bound(8, 10).unwrap();
        assert!(partial.truncated);
        assert_eq!(partial.evaluated, 10);
    }
}
