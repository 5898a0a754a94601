//! Partition of translations into maximal self-orthogonal subspaces.
//!
//! Even-weight words modulo the all-ones word form an `(n−2)`-dimensional
//! space on which the dot product is a nondegenerate alternating form. A
//! partition of the nonzero points into maximal isotropic subspaces is a
//! symplectic spread; lifting each member back by `⊕ 1` gives the `T_m`.
//! Quotient points are represented by even words whose first bit is 0, a set
//! closed under XOR.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{dot_bits, BitMatrix, BitVector};
use crate::input_spaces::{InputPoint, TranslationPoint};

use super::orthogonal::{enumerate_orthogonal_with, OrthogonalEnumeration};
use super::symmetry_parameter_w;

/// Extension steps the backtracking search may take before the algebraic
/// construction is used instead.
pub const SEARCH_BUDGET: u64 = 500_000;

pub const MIN_PARTITION_N: usize = 6;
pub const MAX_PARTITION_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Construction {
    /// Backtracking succeeded after this many extension steps.
    Search { steps: u64 },
    /// Desarguesian spread from `GF(2^((n−2)/2))`.
    Algebraic,
}

/// One block `(T_m, X_m, Y_m)`. Inputs and outputs share the coset
/// `x_ref ⊕ T_m` with `x_ref` the least input point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetrySubset {
    index: usize,
    translations: Vec<TranslationPoint>,
    inputs: Vec<InputPoint>,
}

impl SymmetrySubset {
    /// Builds block `index` from a translation set; the coset base is the
    /// least input point `0…01`.
    pub fn from_translations(
        index: usize,
        mut translations: Vec<TranslationPoint>,
    ) -> Result<Self> {
        translations.sort();
        translations.dedup();
        let n = translations
            .first()
            .map(|t| t.len())
            .ok_or(Error::EmptyArguments)?;
        let x_ref = BitVector::unit(n, n)?;
        let mut inputs = translations
            .iter()
            .map(|t| InputPoint::new(x_ref.xor(t)?))
            .collect::<Result<Vec<_>>>()?;
        inputs.sort();
        Ok(Self {
            index,
            translations,
            inputs,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn n(&self) -> usize {
        self.translations[0].len()
    }

    /// `T_m`, sorted.
    pub fn translations(&self) -> &[TranslationPoint] {
        &self.translations
    }

    /// `X_m`, sorted.
    pub fn inputs(&self) -> &[InputPoint] {
        &self.inputs
    }

    /// `Y_m`; equal to `X_m`.
    pub fn outputs(&self) -> &[InputPoint] {
        &self.inputs
    }

    pub fn contains_translation(&self, t: &BitVector) -> bool {
        self.translations
            .binary_search_by(|p| p.vector().cmp(t))
            .is_ok()
    }

    pub fn is_stabilized_by(&self, r: &BitMatrix) -> bool {
        r.n() == self.n()
            && self.translations.iter().all(|t| {
                r.apply(t)
                    .map(|v| self.contains_translation(&v))
                    .unwrap_or(false)
            })
    }

    /// Orthogonal matrices mapping `T_m` onto itself, in lexicographic order.
    pub fn stabilizers(&self, limit: usize) -> Result<OrthogonalEnumeration> {
        let n = self.n();
        let ts: Vec<u64> = self.translations.iter().map(|t| t.bits()).collect();
        // the first k rows fix the first k bits of every image R·t; each
        // such prefix must occur among the members' prefixes
        let accept = |rows: &[u64]| {
            let k = rows.len();
            let shift = n - k;
            let prefixes: BTreeSet<u64> = ts.iter().map(|t| t >> shift).collect();
            ts.iter().all(|&t| {
                let image = rows
                    .iter()
                    .fold(0u64, |acc, &row| (acc << 1) | dot_bits(row, t) as u64);
                prefixes.contains(&image)
            })
        };
        enumerate_orthogonal_with(n, limit, &accept)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub n: usize,
    pub subsets: Vec<SymmetrySubset>,
    pub construction: Construction,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn expected_subsets(n: usize) -> usize {
        (1usize << ((n - 2) / 2)) + 1
    }

    pub fn expected_size(n: usize) -> usize {
        1usize << (n / 2)
    }
}

fn check_partition_n(n: usize) -> Result<()> {
    if n % 2 != 0 {
        return Err(Error::OddDimension(n));
    }
    if !(MIN_PARTITION_N..=MAX_PARTITION_N).contains(&n) {
        return Err(Error::Infeasible {
            n,
            min: MIN_PARTITION_N,
            max: MAX_PARTITION_N,
        });
    }
    Ok(())
}

/// Partition for even `6 ≤ n ≤ 12`: backtracking first, the field
/// construction if the search budget runs out.
pub fn partition_by_symmetry(n: usize) -> Result<Partition> {
    check_partition_n(n)?;
    let (sets, construction) = match spread_by_search(n, SEARCH_BUDGET)? {
        Some((sets, steps)) => (sets, Construction::Search { steps }),
        None => (algebraic_spread(n)?, Construction::Algebraic),
    };
    build_partition(n, sets, construction)
}

fn build_partition(
    n: usize,
    mut sets: Vec<Vec<TranslationPoint>>,
    construction: Construction,
) -> Result<Partition> {
    for s in &mut sets {
        s.sort();
    }
    // order blocks by their smallest nonzero member
    sets.sort_by_key(|s| s.iter().find(|t| !t.is_zero()).copied());
    let subsets = sets
        .into_iter()
        .enumerate()
        .map(|(i, s)| SymmetrySubset::from_translations(i + 1, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition {
        n,
        subsets,
        construction,
    })
}

fn lift(n: usize, quotient: &[u64]) -> Result<Vec<TranslationPoint>> {
    let ones = BitVector::ones(n)?.bits();
    let mut out = Vec::with_capacity(quotient.len() * 2);
    for &q in quotient {
        out.push(TranslationPoint::new(BitVector::from_bits(n, q)?)?);
        out.push(TranslationPoint::new(BitVector::from_bits(n, q ^ ones)?)?);
    }
    out.sort();
    Ok(out)
}

struct SpreadSearch {
    reps: Vec<u64>,
    covered: Vec<bool>,
    k: usize,
    steps: u64,
    budget: u64,
}

impl SpreadSearch {
    fn solve(&mut self, chosen: &mut Vec<Vec<u64>>) -> Option<bool> {
        let Some(&p) = self.reps.iter().find(|&&r| !self.covered[r as usize]) else {
            return Some(true);
        };
        let mut found = Vec::new();
        let mut seen = BTreeSet::new();
        self.extend(&mut vec![p], vec![0, p], &mut found, &mut seen)?;
        for space in found {
            for &v in &space {
                self.covered[v as usize] = true;
            }
            chosen.push(space);
            if self.solve(chosen)? {
                return Some(true);
            }
            let space = chosen.pop().expect("pushed above");
            for &v in &space {
                if v != 0 {
                    self.covered[v as usize] = false;
                }
            }
        }
        Some(false)
    }

    // Collects maximal isotropic subspaces through `gens[0]` made of
    // uncovered points. `None` signals an exhausted budget.
    fn extend(
        &mut self,
        gens: &mut Vec<u64>,
        span: Vec<u64>,
        found: &mut Vec<Vec<u64>>,
        seen: &mut BTreeSet<Vec<u64>>,
    ) -> Option<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return None;
        }
        if gens.len() == self.k {
            let mut s = span;
            s.sort_unstable();
            if seen.insert(s.clone()) {
                found.push(s);
            }
            return Some(());
        }
        let last = *gens.last().expect("nonempty");
        for qi in 0..self.reps.len() {
            let q = self.reps[qi];
            if q <= last || self.covered[q as usize] || span.contains(&q) {
                continue;
            }
            if gens.iter().any(|&g| dot_bits(g, q) != 0) {
                continue;
            }
            let shifted: Vec<u64> = span.iter().map(|&s| s ^ q).collect();
            if shifted.iter().any(|&v| self.covered[v as usize]) {
                continue;
            }
            let mut next = span.clone();
            next.extend(shifted);
            gens.push(q);
            let r = self.extend(gens, next, found, seen);
            gens.pop();
            r?;
        }
        Some(())
    }
}

/// Backtracking search for the translation blocks. Returns `None` when the
/// step budget runs out, otherwise the blocks and the steps used.
pub fn spread_by_search(
    n: usize,
    budget: u64,
) -> Result<Option<(Vec<Vec<TranslationPoint>>, u64)>> {
    check_partition_n(n)?;
    let top = 1u64 << (n - 1);
    let reps: Vec<u64> = (1..top).filter(|v| v.count_ones() % 2 == 0).collect();
    let mut covered = vec![false; top as usize];
    covered[0] = true;
    let mut search = SpreadSearch {
        reps,
        covered,
        k: (n - 2) / 2,
        steps: 0,
        budget,
    };
    let mut chosen = Vec::new();
    match search.solve(&mut chosen) {
        Some(true) => {
            let sets = chosen
                .iter()
                .map(|q| lift(n, q))
                .collect::<Result<Vec<_>>>()?;
            Ok(Some((sets, search.steps)))
        }
        Some(false) => Err(Error::Structure(format!("no spread exists for n = {n}"))),
        None => Ok(None),
    }
}

// GF(2^m) with a fixed irreducible modulus.
struct Field {
    m: usize,
    modulus: u32,
}

impl Field {
    fn new(m: usize) -> Result<Self> {
        let modulus = match m {
            1 => 0b11,
            2 => 0b111,
            3 => 0b1011,
            4 => 0b1_0011,
            5 => 0b10_0101,
            6 => 0b100_0011,
            7 => 0b1000_0011,
            _ => {
                return Err(Error::Infeasible {
                    n: 2 * m + 2,
                    min: 4,
                    max: 16,
                })
            }
        };
        Ok(Self { m, modulus })
    }

    fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let mut acc = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.m & 1 == 1 {
                a ^= self.modulus;
            }
        }
        acc
    }

    fn trace(&self, a: u32) -> u32 {
        let mut t = 0;
        let mut p = a;
        for _ in 0..self.m {
            t ^= p;
            p = self.mul(p, p);
        }
        debug_assert!(t <= 1);
        t
    }

    // f_j with Tr(e_i f_j) = δ_ij where e_i = α^i.
    fn dual_basis(&self) -> Vec<u32> {
        let m = self.m;
        let gram: Vec<u32> = (0..m)
            .map(|i| (0..m).fold(0, |row, j| row | self.trace(self.mul(1 << i, 1 << j)) << j))
            .collect();
        let inv = invert_gf2(&gram, m).expect("trace form is nondegenerate");
        (0..m)
            .map(|j| {
                (0..m).fold(0, |f, k| {
                    if inv[j] >> k & 1 == 1 {
                        f ^ (1 << k)
                    } else {
                        f
                    }
                })
            })
            .collect()
    }
}

// Inverse of an m×m matrix whose row i is bitmask `rows[i]` (bit j = column j).
fn invert_gf2(rows: &[u32], m: usize) -> Option<Vec<u32>> {
    let mut a = rows.to_vec();
    let mut inv: Vec<u32> = (0..m).map(|i| 1 << i).collect();
    for col in 0..m {
        let pivot = (col..m).find(|&r| a[r] >> col & 1 == 1)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        for r in 0..m {
            if r != col && a[r] >> col & 1 == 1 {
                a[r] ^= a[col];
                inv[r] ^= inv[col];
            }
        }
    }
    Some(inv)
}

// Symplectic basis (p_i, q_i) of the quotient: p_i·q_j = δ_ij, all others 0.
fn symplectic_basis(n: usize) -> (Vec<u64>, Vec<u64>) {
    let bit = |pos: usize| 1u64 << (n - pos);
    let mut pool: Vec<u64> = (2..n).map(|i| bit(i) | bit(i + 1)).collect();
    let (mut ps, mut qs) = (Vec::new(), Vec::new());
    while let Some(a) = pool.first().copied() {
        let bi = pool
            .iter()
            .position(|&v| dot_bits(a, v) == 1)
            .expect("form is nondegenerate");
        let b = pool[bi];
        pool.retain(|&v| v != a && v != b);
        for v in &mut pool {
            *v ^=
                if dot_bits(*v, b) == 1 { a } else { 0 } ^ if dot_bits(*v, a) == 1 { b } else { 0 };
        }
        ps.push(a);
        qs.push(b);
    }
    (ps, qs)
}

/// Desarguesian spread `{(0, b)} ∪ {(a, λa) : λ ∈ GF(2^m)}` with the form
/// `Tr(ad) + Tr(bc)`, carried onto the quotient through a symplectic basis.
pub fn algebraic_spread(n: usize) -> Result<Vec<Vec<TranslationPoint>>> {
    check_partition_n(n)?;
    let m = (n - 2) / 2;
    let field = Field::new(m)?;
    let dual = field.dual_basis();
    let (ps, qs) = symplectic_basis(n);
    let size = 1u32 << m;
    let embed = |a: u32, b: u32| -> u64 {
        let mut v = 0u64;
        for i in 0..m {
            if a >> i & 1 == 1 {
                v ^= ps[i];
            }
            if field.trace(field.mul(b, 1 << i)) == 1 {
                v ^= qs[i];
            }
        }
        v
    };
    debug_assert!(
        (0..m).all(|i| (0..m).all(|j| field.trace(field.mul(1 << i, dual[j])) == (i == j) as u32))
    );
    let mut members: Vec<Vec<u64>> = vec![(0..size).map(|b| embed(0, b)).collect()];
    for lambda in 0..size {
        members.push((0..size).map(|a| embed(a, field.mul(lambda, a))).collect());
    }
    members.iter().map(|q| lift(n, q)).collect()
}

pub fn is_xor_closed(vs: &[BitVector]) -> bool {
    let set: BTreeSet<&BitVector> = vs.iter().collect();
    vs.iter().all(|a| {
        vs.iter()
            .all(|b| a.xor(b).map(|c| set.contains(&c)).unwrap_or(false))
    })
}

pub fn is_self_orthogonal(vs: &[BitVector]) -> bool {
    vs.iter()
        .all(|a| vs.iter().all(|b| a.dot(b).map(|d| d == 0).unwrap_or(false)))
}

/// True when `xs = x ⊕ ts` for some `x` (taken as the least element of `xs`).
pub fn is_coset_of(xs: &[BitVector], ts: &[BitVector]) -> bool {
    let Some(base) = xs.iter().min() else {
        return ts.is_empty();
    };
    let want: BTreeSet<BitVector> = xs.iter().copied().collect();
    let got: Option<BTreeSet<BitVector>> = ts.iter().map(|t| base.xor(t).ok()).collect();
    xs.len() == ts.len() && got.as_ref() == Some(&want)
}

/// Smallest XOR-closed set containing `vs` and zero, sorted.
pub fn xor_completion(vs: &[BitVector]) -> Result<Vec<BitVector>> {
    let n = vs.first().map(|v| v.len()).ok_or(Error::EmptyArguments)?;
    let mut span = BTreeSet::from([BitVector::zeros(n)?]);
    for v in vs {
        if span.contains(v) {
            continue;
        }
        let shifted = span.iter().map(|s| s.xor(v)).collect::<Result<Vec<_>>>()?;
        span.extend(shifted);
    }
    Ok(span.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> PartitionCheck {
    PartitionCheck {
        name,
        passed,
        detail: detail.into(),
    }
}

/// Structural checks on a partition; each carries a short explanation.
pub fn verify_partition(p: &Partition) -> Vec<PartitionCheck> {
    let n = p.n;
    let mut out = Vec::new();
    let want = Partition::expected_subsets(n);
    out.push(check(
        "subset count",
        p.subsets.len() == want,
        format!("{} subsets, expected {want}", p.subsets.len()),
    ));
    let size = Partition::expected_size(n);
    let bad_size: Vec<usize> = p
        .subsets
        .iter()
        .filter(|s| s.translations.len() != size)
        .map(|s| s.index)
        .collect();
    out.push(check(
        "subset size",
        bad_size.is_empty(),
        format!("expected {size} translations each; off in {bad_size:?}"),
    ));
    let vecs: Vec<Vec<BitVector>> = p
        .subsets
        .iter()
        .map(|s| s.translations.iter().map(|t| t.vector()).collect())
        .collect();
    let zero = BitVector::zeros(n).expect("valid n");
    let ones = BitVector::ones(n).expect("valid n");
    out.push(check(
        "contains 0 and 1",
        vecs.iter().all(|v| v.contains(&zero) && v.contains(&ones)),
        "",
    ));
    out.push(check(
        "xor closed",
        vecs.iter().all(|v| is_xor_closed(v)),
        "",
    ));
    out.push(check(
        "self orthogonal",
        vecs.iter().all(|v| is_self_orthogonal(v)),
        "",
    ));
    let mut overlap_ok = true;
    for (i, a) in vecs.iter().enumerate() {
        for b in &vecs[i + 1..] {
            let inter: Vec<_> = a.iter().filter(|v| b.contains(v)).collect();
            overlap_ok &= inter == [&zero, &ones];
        }
    }
    out.push(check("pairwise intersection {0,1}", overlap_ok, ""));
    let union: BTreeSet<BitVector> = vecs.iter().flatten().copied().collect();
    out.push(check(
        "covers translations",
        union.len() == 1usize << (n - 1),
        format!("{} of {} even words", union.len(), 1usize << (n - 1)),
    ));
    out.push(check(
        "input cosets",
        p.subsets.iter().zip(&vecs).all(|(s, t)| {
            let xs: Vec<BitVector> = s.inputs.iter().map(|x| x.vector()).collect();
            is_coset_of(&xs, t)
        }),
        "X_m = x_ref ⊕ T_m",
    ));
    let w_ok = p.subsets.iter().all(|s| {
        s.inputs.iter().all(|x1| {
            s.inputs.iter().all(|x2| {
                s.outputs().iter().all(|y2| {
                    let y1 = s.outputs()[0];
                    symmetry_parameter_w(x1, x2, &y1, y2) == Ok(0)
                })
            })
        })
    });
    out.push(check("W vanishes within subsets", w_ok, ""));
    out
}

/// Text dump: `[subset m]` blocks with `T:`, `X:` and `R:` sections. `R:`
/// lists up to `r_limit` stabilizer matrices, one per line.
pub fn render_partition(p: &Partition, r_limit: usize) -> Result<String> {
    let mut s = String::new();
    let _ = writeln!(s, "# n = {}, {} subsets", p.n, p.subsets.len());
    for sub in &p.subsets {
        let _ = writeln!(s, "\n[subset {}]", sub.index);
        let _ = writeln!(s, "T:");
        for t in &sub.translations {
            let _ = writeln!(s, "{t}");
        }
        let _ = writeln!(s, "X:");
        for x in &sub.inputs {
            let _ = writeln!(s, "{x}");
        }
        let _ = writeln!(s, "R:");
        if r_limit > 0 {
            for r in sub.stabilizers(r_limit)?.matrices {
                let _ = writeln!(s, "{}", r.render());
            }
        }
    }
    Ok(s)
}
