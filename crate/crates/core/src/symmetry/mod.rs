//! The affine symmetry group `F(x) = Rx ⊕ T` and the partition of inputs and
//! translations it induces.

mod anf;
mod orthogonal;
mod partition;

pub use anf::{anf_of_truth_table, component_anf, Anf};
pub use orthogonal::{enumerate_orthogonal, OrthogonalEnumeration};
pub use partition::{
    algebraic_spread, is_coset_of, is_self_orthogonal, is_xor_closed, partition_by_symmetry,
    render_partition, spread_by_search, verify_partition, xor_completion, Construction, Partition,
    PartitionCheck, SymmetrySubset,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{Bit, BitMatrix, BitVector};
use crate::input_spaces::TranslationPoint;

/// One group element: an orthogonal matrix and an even-parity translation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymmetryElement {
    r: BitMatrix,
    t: TranslationPoint,
}

impl SymmetryElement {
    pub fn new(r: BitMatrix, t: TranslationPoint) -> Result<Self> {
        if r.n() != t.len() {
            return Err(Error::LengthMismatch {
                left: r.n(),
                right: t.len(),
            });
        }
        if !r.is_orthogonal() {
            return Err(Error::NotOrthogonal);
        }
        // RᵗR = I already forces odd rows and columns; kept as a cheap assert.
        debug_assert!(r.rows().all(|row| row.parity() == 1));
        Ok(Self { r, t })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(BitMatrix::identity(n)?, TranslationPoint::zero(n)?)
    }

    pub fn translation(t: TranslationPoint) -> Result<Self> {
        Self::new(BitMatrix::identity(t.len())?, t)
    }

    pub fn rotation(r: BitMatrix) -> Result<Self> {
        let n = r.n();
        Self::new(r, TranslationPoint::zero(n)?)
    }

    pub fn n(&self) -> usize {
        self.r.n()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.r
    }

    pub fn shift(&self) -> TranslationPoint {
        self.t
    }

    /// `Rx ⊕ T`.
    pub fn apply(&self, x: &BitVector) -> Result<BitVector> {
        self.r.apply(x)?.xor(&self.t)
    }

    /// `self ∘ inner = (R R', R T' ⊕ T)`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let r = self.r.mul(&inner.r)?;
        let t = self.r.apply(&inner.t)?.xor(&self.t)?;
        Self::new(r, TranslationPoint::new(t)?)
    }

    /// `(Rᵗ, RᵗT)`.
    pub fn invert(&self) -> Self {
        let rt = self.r.transpose();
        let t = rt.apply(&self.t).expect("dimensions agree");
        Self {
            r: rt,
            t: TranslationPoint::new(t).expect("orthogonal maps preserve parity"),
        }
    }

    /// `RᵗT`, the translation seen from the input side.
    pub fn pulled_back_shift(&self) -> BitVector {
        self.r.transpose().apply(&self.t).expect("dimensions agree")
    }
}

impl fmt::Debug for SymmetryElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymmetryElement {{ R: {:?}, T: {} }}", self.r, self.t)
    }
}

pub fn identity_element(n: usize) -> Result<SymmetryElement> {
    SymmetryElement::identity(n)
}

pub fn apply_symmetry(f: &SymmetryElement, x: &BitVector) -> Result<BitVector> {
    f.apply(x)
}

/// `outer ∘ inner`.
pub fn compose(outer: &SymmetryElement, inner: &SymmetryElement) -> Result<SymmetryElement> {
    outer.compose(inner)
}

pub fn invert(f: &SymmetryElement) -> SymmetryElement {
    f.invert()
}

/// `T·[R(x⊕y) ⊕ T]`; zero iff `F(x)·F(y) = x·y`.
pub fn symmetry_defect(f: &SymmetryElement, x: &BitVector, y: &BitVector) -> Result<Bit> {
    let moved = f.r.apply(&x.xor(y)?)?.xor(&f.t)?;
    f.t.dot(&moved)
}

fn require_odd_same_length(vs: &[&BitVector]) -> Result<()> {
    let n = vs[0].len();
    for v in vs {
        if v.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: v.len(),
            });
        }
        if v.parity() != 1 {
            return Err(Error::OddParityRequired(v.to_string()));
        }
    }
    Ok(())
}

/// `W = ¼[1−(−1)^{x₁·(y₁⊕y₂)}][1+(−1)^{x₂·(y₁⊕y₂)}]`, which is 1 exactly when
/// `x₁·(y₁⊕y₂) = 1` and `x₂·(y₁⊕y₂) = 0`.
pub fn symmetry_parameter_w(
    x1: &BitVector,
    x2: &BitVector,
    y1: &BitVector,
    y2: &BitVector,
) -> Result<Bit> {
    require_odd_same_length(&[x1, x2, y1, y2])?;
    let dy = y1.xor(y2)?;
    let s1 = 1 - 2 * x1.dot(&dy)? as i64;
    let s2 = 1 - 2 * x2.dot(&dy)? as i64;
    let w = (1 - s1) * (1 + s2) / 4;
    Ok(w as Bit)
}

/// `R·T ∈ T_m` for every `T ∈ T_m`.
pub fn subset_stabilizer_check(r: &BitMatrix, subset: &SymmetrySubset) -> bool {
    subset.is_stabilized_by(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input_spaces::{enumerate_inputs, enumerate_translations};
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn tp(s: &str) -> TranslationPoint {
        s.parse().unwrap()
    }

    pub(crate) fn listed_rotations() -> Vec<BitMatrix> {
        [
            "100000 010000 000111 001011 001101 001110",
            "010011 100011 001000 000100 110001 110010",
            "011100 101100 110100 111000 000010 000001",
            "001101 001110 000111 001011 100000 010000",
            "100000 010110 001000 010101 010011 000111",
            "101100 010000 101001 100101 000010 001101",
            "100000 011010 011001 000100 010011 001011",
            "110100 110001 001000 100101 000010 010101",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
    }

    #[test]
    fn apply_examples() {
        let id = identity_element(6).unwrap();
        assert_eq!(id.apply(&bv("101100")).unwrap(), bv("101100"));
        let shift = SymmetryElement::translation(tp("110000")).unwrap();
        assert_eq!(shift.apply(&bv("100000")).unwrap(), bv("010000"));
        assert!(SymmetryElement::new(BitMatrix::identity(6).unwrap(), tp("1100")).is_err());
        let not_orth: BitMatrix = "110000 010000 001000 000100 000010 000001".parse().unwrap();
        assert_eq!(
            SymmetryElement::rotation(not_orth).unwrap_err(),
            Error::NotOrthogonal
        );
    }

    #[test]
    fn opposite_direction_covariance_and_parity() {
        let xs = enumerate_inputs(6).unwrap();
        let ts = enumerate_translations(6).unwrap();
        for r in listed_rotations() {
            for t in ts.iter().step_by(5) {
                let f = SymmetryElement::new(r.clone(), *t).unwrap();
                for x in xs.points() {
                    let fx = f.apply(x).unwrap();
                    assert_eq!(fx.parity(), 1);
                    assert_eq!(f.apply(&x.reverse()).unwrap(), fx.reverse());
                }
            }
        }
    }

    #[test]
    fn group_axioms_on_listed_elements() {
        let ts = enumerate_translations(6).unwrap();
        let elems: Vec<SymmetryElement> = listed_rotations()
            .into_iter()
            .zip(ts.iter().step_by(3))
            .map(|(r, t)| SymmetryElement::new(r, *t).unwrap())
            .collect();
        let id = identity_element(6).unwrap();
        for f in &elems {
            assert_eq!(compose(f, &id).unwrap(), *f);
            assert_eq!(compose(&id, f).unwrap(), *f);
            assert_eq!(compose(f, &invert(f)).unwrap(), id);
            assert_eq!(compose(&invert(f), f).unwrap(), id);
            for g in &elems {
                let fg = compose(f, g).unwrap();
                for h in &elems {
                    assert_eq!(
                        compose(&fg, h).unwrap(),
                        compose(f, &compose(g, h).unwrap()).unwrap()
                    );
                }
                // composition acts as function composition
                let x = bv("101100");
                assert_eq!(
                    fg.apply(&x).unwrap(),
                    f.apply(&g.apply(&x).unwrap()).unwrap()
                );
            }
        }
    }

    #[test]
    fn defect_examples() {
        let zero_shift = SymmetryElement::rotation(listed_rotations()[0].clone()).unwrap();
        let xs = enumerate_inputs(6).unwrap();
        for x in xs.points() {
            for y in xs.points() {
                assert_eq!(symmetry_defect(&zero_shift, x, y).unwrap(), 0);
            }
        }
        let shift = SymmetryElement::translation(tp("110000")).unwrap();
        assert_eq!(
            symmetry_defect(&shift, &bv("100000"), &bv("010000")).unwrap(),
            0
        );
        assert_eq!(
            symmetry_defect(&shift, &bv("100000"), &bv("001000")).unwrap(),
            1
        );
    }

    #[test]
    fn defect_free_elements_preserve_correlations() {
        let xs = enumerate_inputs(6).unwrap();
        let ts = enumerate_translations(6).unwrap();
        for r in listed_rotations() {
            for t in &ts {
                let f = SymmetryElement::new(r.clone(), *t).unwrap();
                let pulled = f.pulled_back_shift();
                for x in xs.points() {
                    for y in xs.points() {
                        let d = symmetry_defect(&f, x, y).unwrap();
                        assert_eq!(d, pulled.dot(&x.xor(y).unwrap()).unwrap());
                        let fx = f.apply(x).unwrap();
                        let fy = f.apply(y).unwrap();
                        assert_eq!(fx.dot(&fy).unwrap(), x.dot(y).unwrap() ^ d);
                    }
                }
            }
        }
    }

    #[test]
    fn w_parameter() {
        let w = symmetry_parameter_w(&bv("010000"), &bv("100000"), &bv("011100"), &bv("000100"));
        assert_eq!(w.unwrap(), 1);
        let listed =
            symmetry_parameter_w(&bv("100000"), &bv("010000"), &bv("011100"), &bv("000100"));
        assert_eq!(listed.unwrap(), 0);
        let xs = enumerate_inputs(4).unwrap();
        for x in xs.points() {
            for y1 in xs.points() {
                for y2 in xs.points() {
                    assert_eq!(symmetry_parameter_w(x, x, y1, y2).unwrap(), 0);
                }
            }
        }
        assert!(
            symmetry_parameter_w(&bv("110000"), &bv("100000"), &bv("100000"), &bv("100000"))
                .is_err()
        );
        assert!(
            symmetry_parameter_w(&bv("1000"), &bv("100000"), &bv("100000"), &bv("100000")).is_err()
        );
    }

    fn arb_element() -> impl Strategy<Value = SymmetryElement> {
        let rots = listed_rotations();
        let ts = enumerate_translations(6).unwrap();
        (0..rots.len(), 0..ts.len())
            .prop_map(move |(i, j)| SymmetryElement::new(rots[i].clone(), ts[j]).unwrap())
    }

    proptest! {
        #[test]
        fn random_products_satisfy_axioms(a in arb_element(), b in arb_element(), c in arb_element()) {
            let ab = compose(&a, &b).unwrap();
            prop_assert!(ab.matrix().is_orthogonal());
            prop_assert_eq!(ab.shift().parity(), 0);
            prop_assert_eq!(compose(&ab, &c).unwrap(), compose(&a, &compose(&b, &c).unwrap()).unwrap());
            prop_assert_eq!(compose(&ab, &invert(&ab)).unwrap(), identity_element(6).unwrap());
        }
    }
}
