use std::collections::BTreeMap;

use serde::Serialize;

use crate::boxes::sign as signed;
use crate::error::{Error, Result};
use crate::gf2::{dot_bits, BitVector};
use crate::input_spaces::{InputPoint, MAX_ENUMERATION_N};
use crate::Rational;

use super::chsh::SettingsQuad;
use super::{rational_sqrt_f64, sqrt_symbol, BoundReport};

/// Exact `⟨X²⟩` over all translations together with the value histogram.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanSquare {
    pub n: usize,
    #[serde(serialize_with = "crate::report::ser_ratio")]
    pub mean_square: Rational,
    /// squared value → number of translations producing it
    pub histogram: BTreeMap<i64, usize>,
    pub bound: f64,
    pub bound_symbolic: String,
    pub degenerate: bool,
}

impl MeanSquare {
    pub fn report(&self, parameter: &str, settings: Vec<(String, String)>) -> BoundReport {
        BoundReport {
            parameter: parameter.into(),
            n: self.n,
            settings,
            mean_square: crate::report::ratio_string(&self.mean_square),
            bound: self.bound,
            bound_symbolic: self.bound_symbolic.clone(),
            exact: true,
        }
    }
}

pub(crate) fn translations_bits(n: usize) -> Result<impl Iterator<Item = u64>> {
    if n > MAX_ENUMERATION_N {
        return Err(Error::Infeasible {
            n,
            min: 2,
            max: MAX_ENUMERATION_N,
        });
    }
    Ok((0..1u64 << n).filter(|v| v.count_ones() % 2 == 0))
}

pub(crate) fn mean_square_of(
    n: usize,
    values: impl Fn(u64) -> i64,
    degenerate: bool,
) -> Result<MeanSquare> {
    let mut histogram = BTreeMap::new();
    let mut total = 0i64;
    let mut count = 0i64;
    for t in translations_bits(n)? {
        let v = values(t);
        *histogram.entry(v * v).or_insert(0) += 1;
        total += v * v;
        count += 1;
    }
    let mean_square = Rational::new(total, count);
    Ok(MeanSquare {
        n,
        mean_square,
        histogram,
        bound: rational_sqrt_f64(mean_square),
        bound_symbolic: sqrt_symbol(mean_square),
        degenerate,
    })
}

/// `(−1)^{x·y ⊕ (x⊕y)·T′}`.
fn phased(x: u64, y: u64, t: u64) -> i64 {
    signed(dot_bits(x, y) ^ dot_bits(x ^ y, t))
}

/// `⟨S²⟩` with every correlation carrying the translation phase, averaged
/// uniformly over all `2^(n−1)` even `T′`.
pub fn mean_square_chsh(q: &SettingsQuad) -> Result<MeanSquare> {
    let [x1, x2, y1, y2] = [q.x1, q.x2, q.y1, q.y2].map(|v| v.bits());
    mean_square_of(
        q.n(),
        |t| {
            (phased(x1, y1, t) - phased(x1, y2, t)).abs()
                + (phased(x2, y1, t) + phased(x2, y2, t)).abs()
        },
        q.is_degenerate(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FineGrained {
    #[serde(serialize_with = "crate::report::ser_ratio")]
    pub mean_square_g: Rational,
    pub zeta: f64,
    pub histogram: BTreeMap<i64, usize>,
}

/// `ζ = 1/2 + √⟨G²⟩/4` with `G(T′)` the sum of the two phased correlations
/// `(x, y₁)` and `(x, y₂)`. Requires `x·y₁ = x·y₂`.
pub fn fine_grained_zeta(x: &InputPoint, y1: &InputPoint, y2: &InputPoint) -> Result<FineGrained> {
    let n = x.len();
    for v in [y1, y2] {
        if v.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: v.len(),
            });
        }
    }
    if x.dot(y1)? != x.dot(y2)? {
        return Err(Error::Settings(format!(
            "fine-grained bound needs x·y₁ = x·y₂ (x = {x}, y₁ = {y1}, y₂ = {y2})"
        )));
    }
    let [xb, y1b, y2b] = [x, y1, y2].map(|v| BitVector::bits(v));
    let ms = mean_square_of(n, |t| phased(xb, y1b, t) + phased(xb, y2b, t), y1 == y2)?;
    Ok(FineGrained {
        mean_square_g: ms.mean_square,
        zeta: 0.5 + ms.bound / 4.0,
        histogram: ms.histogram,
    })
}
