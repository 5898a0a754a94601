//! Exact outcome distributions for perfect, imperfect and tripartite boxes.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{Bit, BitVector};
use crate::input_spaces::{check_admissibility, InputPoint};
use crate::Rational;

/// Identifier of the generator behind every sampler, recorded in reports.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Joint distribution of an outcome pair `(α, β) ∈ {0,1}²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxDistribution {
    probs: [Rational; 4],
}

impl BoxDistribution {
    /// `probs` is indexed by `2α + β`.
    pub fn new(probs: [Rational; 4]) -> Result<Self> {
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::OutOfRange {
                what: "probability",
                value: format!("{probs:?}"),
                min: "0".into(),
                max: "1".into(),
            });
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::OutOfRange {
                what: "total probability",
                value: total.to_string(),
                min: "1".into(),
                max: "1".into(),
            });
        }
        Ok(Self { probs })
    }

    pub fn prob(&self, alpha: Bit, beta: Bit) -> Rational {
        self.probs[(2 * alpha + beta) as usize]
    }

    pub fn probs(&self) -> &[Rational; 4] {
        &self.probs
    }

    /// `P(α)` summed over `β`.
    pub fn alice_marginal(&self, alpha: Bit) -> Rational {
        self.prob(alpha, 0) + self.prob(alpha, 1)
    }

    pub fn bob_marginal(&self, beta: Bit) -> Rational {
        self.prob(0, beta) + self.prob(1, beta)
    }
}

/// Noise level `p ∈ [0, 1]`: probability that a box answers correctly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoiseParameter(Rational);

impl NoiseParameter {
    pub fn new(p: Rational) -> Result<Self> {
        if p.is_negative() || p > Rational::one() {
            return Err(Error::OutOfRange {
                what: "p",
                value: p.to_string(),
                min: "0".into(),
                max: "1".into(),
            });
        }
        Ok(Self(p))
    }

    pub fn perfect() -> Self {
        Self(Rational::one())
    }

    pub fn p(&self) -> Rational {
        self.0
    }

    /// `E = 2p − 1`.
    pub fn correlation(&self) -> Rational {
        Rational::from_integer(2) * self.0 - Rational::one()
    }
}

fn require_admissible(x: &BitVector, y: &BitVector) -> Result<()> {
    if !check_admissibility(x, y)? {
        return Err(Error::Inadmissible {
            x: x.to_string(),
            y: y.to_string(),
        });
    }
    Ok(())
}

/// `P(α,β) = 1/2` on `α⊕β = x·y`, else 0.
pub fn perfect_box(x: &BitVector, y: &BitVector) -> Result<BoxDistribution> {
    imperfect_box(x, y, NoiseParameter::perfect())
}

/// `p/2` on the two pairs with `α⊕β = x·y`, `(1−p)/2` on the other two.
pub fn imperfect_box(
    x: &BitVector,
    y: &BitVector,
    noise: NoiseParameter,
) -> Result<BoxDistribution> {
    require_admissible(x, y)?;
    let target = x.dot(y)?;
    let half = Rational::new(1, 2);
    let right = noise.p() * half;
    let wrong = (Rational::one() - noise.p()) * half;
    let mut probs = [Rational::zero(); 4];
    for alpha in 0..2u8 {
        for beta in 0..2u8 {
            probs[(2 * alpha + beta) as usize] = if alpha ^ beta == target { right } else { wrong };
        }
    }
    BoxDistribution::new(probs)
}

/// `E = P(α=β) − P(α≠β)`.
pub fn correlation_of(dist: &BoxDistribution) -> Rational {
    let same = dist.prob(0, 0) + dist.prob(1, 1);
    let diff = dist.prob(0, 1) + dist.prob(1, 0);
    same - diff
}

/// Both one-party marginals are exactly `(1/2, 1/2)`.
pub fn no_signaling_check(dist: &BoxDistribution) -> bool {
    let half = Rational::new(1, 2);
    (0..2u8).all(|v| dist.alice_marginal(v) == half && dist.bob_marginal(v) == half)
}

/// Draws `trials` outcome pairs: `α` uniform, `β = α ⊕ x·y` with
/// probability `p`, flipped otherwise. Same seed, same sequence.
pub fn sample_outcomes(
    x: &BitVector,
    y: &BitVector,
    noise: NoiseParameter,
    seed: u64,
    trials: usize,
) -> Result<Vec<(Bit, Bit)>> {
    require_admissible(x, y)?;
    let target = x.dot(y)?;
    let mut rng = rng_from_seed(seed);
    let mut correct = bernoulli(noise.p());
    Ok((0..trials)
        .map(|_| {
            let alpha = rng.random::<bool>() as Bit;
            let ok = correct(&mut rng);
            let beta = alpha ^ target ^ u8::from(!ok);
            (alpha, beta)
        })
        .collect())
}

/// Exact rational Bernoulli draw when the fraction fits in `u32`.
pub(crate) fn bernoulli(p: Rational) -> impl FnMut(&mut ChaCha8Rng) -> bool {
    let exact = match (p.numer().to_u32(), p.denom().to_u32()) {
        (Some(n), Some(d)) if d > 0 => Some((n, d)),
        _ => None,
    };
    let approx = p.to_f64().unwrap_or(0.0);
    move |rng: &mut ChaCha8Rng| match exact {
        Some((n, d)) => rng.random_ratio(n, d),
        None => rng.random_bool(approx),
    }
}

/// Empirical correlation `(#same − #different) / trials`.
pub fn empirical_correlation(samples: &[(Bit, Bit)]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let same = samples.iter().filter(|(a, b)| a == b).count() as f64;
    (2.0 * same - samples.len() as f64) / samples.len() as f64
}

/// JSON report for a sampler run.
#[derive(Clone, Debug, Serialize)]
#[allow(non_snake_case)]
pub struct SamplerReport {
    pub n: usize,
    pub x: BitVector,
    pub y: BitVector,
    pub p: f64,
    pub p_exact: String,
    pub trials: usize,
    pub seed: u64,
    pub empirical_E: f64,
    pub exact_E: f64,
    pub rng: &'static str,
}

pub fn sampler_report(
    x: &BitVector,
    y: &BitVector,
    noise: NoiseParameter,
    seed: u64,
    trials: usize,
) -> Result<SamplerReport> {
    let samples = sample_outcomes(x, y, noise, seed, trials)?;
    let exact = correlation_of(&imperfect_box(x, y, noise)?);
    Ok(SamplerReport {
        n: x.len(),
        x: *x,
        y: *y,
        p: noise.p().to_f64().unwrap_or(f64::NAN),
        p_exact: noise.p().to_string(),
        trials,
        seed,
        empirical_E: empirical_correlation(&samples),
        exact_E: exact.to_f64().unwrap_or(f64::NAN),
        rng: RNG_ALGORITHM,
    })
}

/// The constant odd-parity vector `c` of the tripartite box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TripartiteConfig {
    pub c: InputPoint,
}

impl TripartiteConfig {
    pub fn new(c: InputPoint) -> Self {
        Self { c }
    }
}

/// `x·y ⊕ x·z ⊕ y·z ⊕ x·c ⊕ y·c ⊕ z·c`.
pub fn tripartite_parity(
    x: &BitVector,
    y: &BitVector,
    z: &BitVector,
    cfg: &TripartiteConfig,
) -> Result<Bit> {
    let c = cfg.c.vector();
    for v in [x, y, z] {
        if v.len() != c.len() {
            return Err(Error::LengthMismatch {
                left: c.len(),
                right: v.len(),
            });
        }
        if v.parity() != 1 {
            return Err(Error::OddParityRequired(v.to_string()));
        }
    }
    Ok(x.dot(y)? ^ x.dot(z)? ^ y.dot(z)? ^ x.dot(&c)? ^ y.dot(&c)? ^ z.dot(&c)?)
}

/// `(−1)^parity`.
pub fn tripartite_correlation(
    x: &BitVector,
    y: &BitVector,
    z: &BitVector,
    cfg: &TripartiteConfig,
) -> Result<i64> {
    Ok(sign(tripartite_parity(x, y, z, cfg)?))
}

#[inline]
pub(crate) fn sign(bit: Bit) -> i64 {
    1 - 2 * bit as i64
}

/// Uniform over the four output triples with `α⊕β⊕γ` equal to the parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripartiteDistribution {
    probs: [Rational; 8],
}

impl TripartiteDistribution {
    /// Indexed by `4α + 2β + γ`.
    pub fn prob(&self, alpha: Bit, beta: Bit, gamma: Bit) -> Rational {
        self.probs[(4 * alpha + 2 * beta + gamma) as usize]
    }

    /// Marginal of one party (`0` = first, `1` = second, `2` = third).
    pub fn marginal(&self, party: usize, value: Bit) -> Rational {
        (0..8usize)
            .filter(|idx| ((idx >> (2 - party)) & 1) as Bit == value)
            .map(|idx| self.probs[idx])
            .sum()
    }
}

pub fn tripartite_box(
    x: &BitVector,
    y: &BitVector,
    z: &BitVector,
    cfg: &TripartiteConfig,
) -> Result<TripartiteDistribution> {
    let parity = tripartite_parity(x, y, z, cfg)?;
    let mut probs = [Rational::zero(); 8];
    for (idx, p) in probs.iter_mut().enumerate() {
        if (idx.count_ones() & 1) as Bit == parity {
            *p = Rational::new(1, 4);
        }
    }
    Ok(TripartiteDistribution { probs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input_spaces::enumerate_inputs;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn perfect_box_support() {
        let d = perfect_box(&bv("100000"), &bv("010000")).unwrap();
        assert_eq!(d.prob(0, 0), r(1, 2));
        assert_eq!(d.prob(1, 1), r(1, 2));
        assert_eq!(d.prob(0, 1), r(0, 1));
        assert_eq!(correlation_of(&d), r(1, 1));

        let x = bv("110100");
        let opposite = perfect_box(&x, &x.reverse()).unwrap();
        assert_eq!(opposite.prob(0, 1) + opposite.prob(1, 0), r(0, 1));

        assert!(matches!(
            perfect_box(&bv("100000"), &bv("110000")),
            Err(Error::Inadmissible { .. })
        ));
    }

    #[test]
    fn imperfect_box_examples() {
        let x = bv("100000");
        let y = bv("010000");
        assert_eq!(
            imperfect_box(&x, &y, NoiseParameter::perfect()).unwrap(),
            perfect_box(&x, &y).unwrap()
        );
        let uniform = imperfect_box(&x, &y, NoiseParameter::new(r(1, 2)).unwrap()).unwrap();
        assert!(uniform.probs().iter().all(|p| *p == r(1, 4)));
        assert_eq!(correlation_of(&uniform), r(0, 1));

        // x·y = 1
        let y1 = bv("100110");
        assert_eq!(x.dot(&y1).unwrap(), 1);
        let d = imperfect_box(&x, &y1, NoiseParameter::new(r(3, 4)).unwrap()).unwrap();
        assert_eq!(d.prob(0, 1), r(3, 8));
        assert_eq!(d.prob(1, 0), r(3, 8));
        assert_eq!(d.prob(0, 0), r(1, 8));
        assert_eq!(correlation_of(&d), r(-1, 2));

        assert!(NoiseParameter::new(r(5, 4)).is_err());
        assert!(NoiseParameter::new(r(-1, 4)).is_err());
    }

    #[test]
    fn no_signaling() {
        let x = bv("100000");
        let y = bv("010000");
        assert!(no_signaling_check(&perfect_box(&x, &y).unwrap()));
        let lopsided = BoxDistribution::new([r(1, 1), r(0, 1), r(0, 1), r(0, 1)]).unwrap();
        assert!(!no_signaling_check(&lopsided));
        assert!(BoxDistribution::new([r(1, 2), r(0, 1), r(0, 1), r(0, 1)]).is_err());
        assert!(BoxDistribution::new([r(3, 2), r(-1, 2), r(0, 1), r(0, 1)]).is_err());
    }

    #[test]
    fn correlation_closed_form_and_flip_covariance() {
        let xs = enumerate_inputs(6).unwrap();
        let grid: Vec<NoiseParameter> = (0..=8)
            .map(|k| NoiseParameter::new(r(k, 8)).unwrap())
            .collect();
        for x in xs.points() {
            for y in xs.points() {
                let s = sign(x.dot(y).unwrap());
                for noise in &grid {
                    let d = imperfect_box(x, y, *noise).unwrap();
                    assert_eq!(
                        correlation_of(&d),
                        noise.correlation() * Rational::from_integer(s)
                    );
                    assert!(no_signaling_check(&d));
                }
                let flipped = perfect_box(&x.reverse(), y).unwrap();
                let target = x.dot(y).unwrap() ^ 1;
                for a in 0..2u8 {
                    for b in 0..2u8 {
                        assert_eq!(flipped.prob(a, b).is_zero(), a ^ b != target);
                    }
                }
            }
        }
    }

    #[test]
    fn sampler_behaviour() {
        let x = bv("100000");
        let y = bv("100110");
        let perfect = sample_outcomes(&x, &y, NoiseParameter::perfect(), 7, 500).unwrap();
        assert!(perfect.iter().all(|(a, b)| a ^ b == 1));

        let trials = 100_000;
        let mixed =
            sample_outcomes(&x, &y, NoiseParameter::new(r(1, 2)).unwrap(), 11, trials).unwrap();
        let sigma = 1.0 / (trials as f64).sqrt();
        assert!(empirical_correlation(&mixed).abs() <= 3.0 * sigma);

        let again =
            sample_outcomes(&x, &y, NoiseParameter::new(r(1, 2)).unwrap(), 11, trials).unwrap();
        assert_eq!(mixed, again);
    }

    #[test]
    fn sampler_report_fields() {
        let rep = sampler_report(
            &bv("100000"),
            &bv("010000"),
            NoiseParameter::new(r(3, 4)).unwrap(),
            5,
            1000,
        )
        .unwrap();
        let json = serde_json::to_value(&rep).unwrap();
        for key in [
            "n",
            "x",
            "y",
            "p",
            "trials",
            "seed",
            "empirical_E",
            "exact_E",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["x"], "100000");
        assert_eq!(rep.exact_E, 0.5);
    }

    fn e8(i: usize) -> BitVector {
        BitVector::unit(8, i).unwrap()
    }

    #[test]
    fn tripartite_examples() {
        let cfg = TripartiteConfig::new(InputPoint::new(e8(7)).unwrap());
        assert_eq!(tripartite_parity(&e8(1), &e8(2), &e8(3), &cfg).unwrap(), 0);
        let x1 = bv("10011000");
        assert_eq!(tripartite_parity(&x1, &e8(5), &e8(6), &cfg).unwrap(), 1);
        assert_eq!(
            tripartite_correlation(&x1, &e8(5), &e8(6), &cfg).unwrap(),
            -1
        );

        assert!(matches!(
            tripartite_parity(&bv("11000000"), &e8(2), &e8(3), &cfg),
            Err(Error::OddParityRequired(_))
        ));
        assert!(matches!(
            tripartite_parity(&bv("100000"), &e8(2), &e8(3), &cfg),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn tripartite_flip_and_marginals() {
        let cfg = TripartiteConfig::new(InputPoint::new(e8(7)).unwrap());
        let xs = enumerate_inputs(8).unwrap();
        let pts: Vec<_> = xs.points().iter().step_by(9).collect();
        for x in &pts {
            for y in &pts {
                for z in &pts {
                    let base = tripartite_parity(x, y, z, &cfg).unwrap();
                    assert_eq!(
                        tripartite_parity(&x.reverse(), y, z, &cfg).unwrap(),
                        base ^ 1
                    );
                    assert_eq!(
                        tripartite_parity(x, &y.reverse(), z, &cfg).unwrap(),
                        base ^ 1
                    );
                    assert_eq!(
                        tripartite_parity(x, y, &z.reverse(), &cfg).unwrap(),
                        base ^ 1
                    );
                    let d = tripartite_box(x, y, z, &cfg).unwrap();
                    for party in 0..3 {
                        assert_eq!(d.marginal(party, 0), r(1, 2));
                        assert_eq!(d.marginal(party, 1), r(1, 2));
                    }
                }
            }
        }
    }
}
