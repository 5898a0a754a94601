use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::boxes::{bernoulli, rng_from_seed, NoiseParameter, RNG_ALGORITHM};
use crate::error::{Error, Result};
use crate::report::{csv_line, format_sig};
use crate::Rational;

pub const TRADEOFF_HEADER: &str = "E,Q_W0,P_W1,sum";

fn check_e(e: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&e) {
        return Err(Error::OutOfRange {
            what: "E",
            value: e.to_string(),
            min: "-1".into(),
            max: "1".into(),
        });
    }
    Ok(())
}

/// `Q(W=0) = (1 + 3E⁴)/4`.
pub fn q_w0(e: f64) -> Result<f64> {
    check_e(e)?;
    Ok((1.0 + 3.0 * e.powi(4)) / 4.0)
}

/// `P(W=1) = (1 + E²)²/4`.
pub fn p_w1(e: f64) -> Result<f64> {
    check_e(e)?;
    Ok((1.0 + e * e).powi(2) / 4.0)
}

fn check_e2(e2: Rational) -> Result<()> {
    if e2 < Rational::zero() || e2 > Rational::one() {
        return Err(Error::OutOfRange {
            what: "E²",
            value: e2.to_string(),
            min: "0".into(),
            max: "1".into(),
        });
    }
    Ok(())
}

/// `Q(W=0)` as a function of `E²`, exact.
pub fn q_w0_of_e2(e2: Rational) -> Result<Rational> {
    check_e2(e2)?;
    Ok((Rational::one() + Rational::from_integer(3) * e2 * e2) / 4)
}

/// `P(W=1)` as a function of `E²`, exact.
pub fn p_w1_of_e2(e2: Rational) -> Result<Rational> {
    check_e2(e2)?;
    let s = Rational::one() + e2;
    Ok(s * s / 4)
}

/// `[p²+(1−p)²]³ + [1−p²−(1−p)²]³`: all three pair relations respected or
/// all three violated.
pub fn q_w0_from_p(p: NoiseParameter) -> Rational {
    let p = p.p();
    let q = Rational::one() - p;
    let agree = p * p + q * q;
    let disagree = Rational::one() - agree;
    agree * agree * agree + disagree * disagree * disagree
}

/// `p⁴ + (1−p)⁴ + 2p²(1−p)²`.
pub fn p_w1_from_p(p: NoiseParameter) -> Rational {
    let p = p.p();
    let q = Rational::one() - p;
    let (p2, q2) = (p * p, q * q);
    p2 * p2 + q2 * q2 + Rational::from_integer(2) * p2 * q2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyThreshold {
    /// `E²` at the boundary, exact.
    #[serde(serialize_with = "crate::report::ser_ratio")]
    pub e_squared: Rational,
    pub e: f64,
    #[serde(serialize_with = "crate::report::ser_ratio")]
    pub q_w0: Rational,
    #[serde(serialize_with = "crate::report::ser_ratio")]
    pub p_w1: Rational,
    #[serde(serialize_with = "crate::report::ser_ratio")]
    pub sum: Rational,
}

// Square root of a nonnegative rational when numerator and denominator are
// both perfect squares.
fn exact_sqrt(r: Rational) -> Option<Rational> {
    let isqrt = |v: i64| -> Option<i64> {
        if v < 0 {
            return None;
        }
        let mut s = (v as f64).sqrt() as i64;
        while s * s > v {
            s -= 1;
        }
        while (s + 1) * (s + 1) <= v {
            s += 1;
        }
        (s * s == v).then_some(s)
    };
    Some(Rational::new(isqrt(*r.numer())?, isqrt(*r.denom())?))
}

/// Largest `E` with `Q(W=0) + P(W=1) ≤ 1`.
///
/// With `u = E²` the condition reads `2u² + u − 1 ≤ 0`; the positive root is
/// extracted exactly and only the final square root is taken in floating
/// point.
pub fn consistency_threshold() -> ConsistencyThreshold {
    let (a, b, c) = (Rational::from_integer(2), Rational::one(), -Rational::one());
    let disc = b * b - Rational::from_integer(4) * a * c;
    let root = exact_sqrt(disc).expect("discriminant is a perfect square");
    let u = (-b + root) / (Rational::from_integer(2) * a);
    let q = q_w0_of_e2(u).expect("u in [0, 1]");
    let p = p_w1_of_e2(u).expect("u in [0, 1]");
    ConsistencyThreshold {
        e_squared: u,
        e: u.to_f64().expect("small rational").sqrt(),
        q_w0: q,
        p_w1: p,
        sum: q + p,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TradeoffPoint {
    pub e: f64,
    pub q_w0: f64,
    pub p_w1: f64,
    pub sum: f64,
}

/// `steps` uniformly spaced values of `E` from −1 to 1.
pub fn tradeoff_curve(steps: usize) -> Result<Vec<TradeoffPoint>> {
    if steps < 2 {
        return Err(Error::OutOfRange {
            what: "steps",
            value: steps.to_string(),
            min: "2".into(),
            max: "inf".into(),
        });
    }
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            // symmetric construction keeps the grid exactly even in E
            let e = ((2 * i) as f64 - last) / last;
            let q = q_w0(e)?;
            let p = p_w1(e)?;
            Ok(TradeoffPoint {
                e,
                q_w0: q,
                p_w1: p,
                sum: q + p,
            })
        })
        .collect()
}

pub fn render_tradeoff_csv(points: &[TradeoffPoint]) -> String {
    let mut out = String::from(TRADEOFF_HEADER);
    out.push('\n');
    for pt in points {
        out.push_str(&csv_line(
            [pt.e, pt.q_w0, pt.p_w1, pt.sum].map(|v| format_sig(v, 12)),
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloTradeoff {
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub q_hat: f64,
    pub p_hat: f64,
    pub q_exact: f64,
    pub p_exact: f64,
    pub q_within_3sigma: bool,
    pub p_within_3sigma: bool,
    pub rng: &'static str,
}

/// `|hat − exact| ≤ 3σ` with `σ = √(exact(1−exact)/trials)`; a degenerate
/// exact value demands equality.
pub fn within_three_sigma(hat: f64, exact: f64, trials: usize) -> bool {
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    (hat - exact).abs() <= 3.0 * sigma + 1e-12
}

/// Simulates the event tables behind `Q(W=0)` and `P(W=1)`.
///
/// `q_hat`: three pairs of correctness indicators; a pair is respected when
/// its two indicators agree, and the event is all three respected or all
/// three violated. `p_hat`: four indicators, event when the pattern is
/// `1111`, `0000`, `0011` or `1100`.
pub fn monte_carlo_tradeoff(
    noise: NoiseParameter,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloTradeoff> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            what: "trials",
            value: "0".into(),
            min: "1".into(),
            max: "inf".into(),
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut draw = bernoulli(noise.p());
    let (mut q_hits, mut p_hits) = (0usize, 0usize);
    for _ in 0..trials {
        let mut respected = 0;
        for _ in 0..3 {
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            respected += usize::from(a == b);
        }
        q_hits += usize::from(respected == 0 || respected == 3);
        let bits: [bool; 4] = std::array::from_fn(|_| draw(&mut rng));
        p_hits += usize::from(bits[0] == bits[1] && bits[2] == bits[3]);
    }
    let q_hat = q_hits as f64 / trials as f64;
    let p_hat = p_hits as f64 / trials as f64;
    let q_exact = q_w0_from_p(noise).to_f64().unwrap_or(f64::NAN);
    let p_exact = p_w1_from_p(noise).to_f64().unwrap_or(f64::NAN);
    Ok(MonteCarloTradeoff {
        p: noise.p().to_f64().unwrap_or(f64::NAN),
        trials,
        seed,
        q_hat,
        p_hat,
        q_exact,
        p_exact,
        q_within_3sigma: within_three_sigma(q_hat, q_exact, trials),
        p_within_3sigma: within_three_sigma(p_hat, p_exact, trials),
        rng: RNG_ALGORITHM,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn formula_examples() {
        assert_eq!(q_w0(1.0).unwrap(), 1.0);
        assert_eq!(q_w0(0.0).unwrap(), 0.25);
        assert_eq!(p_w1(1.0).unwrap(), 1.0);
        assert_eq!(p_w1(0.0).unwrap(), 0.25);
        assert_eq!(q_w0_of_e2(r(1, 2)).unwrap(), r(7, 16));
        assert_eq!(p_w1_of_e2(r(1, 2)).unwrap(), r(9, 16));
        let h = 0.5f64.sqrt();
        assert!((q_w0(h).unwrap() - 7.0 / 16.0).abs() < 1e-15);
        assert!((p_w1(h).unwrap() - 9.0 / 16.0).abs() < 1e-15);
        assert!(q_w0(1.5).is_err());
        assert!(p_w1(-1.01).is_err());
        assert!(q_w0_of_e2(r(3, 2)).is_err());
    }

    #[test]
    fn threshold() {
        let t = consistency_threshold();
        assert_eq!(t.e_squared, r(1, 2));
        assert!((t.e - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-15);
        assert_eq!(t.sum, Rational::one());
        assert_eq!(t.q_w0, r(7, 16));
        assert_eq!(t.p_w1, r(9, 16));
        let at_one = q_w0_of_e2(Rational::one()).unwrap() + p_w1_of_e2(Rational::one()).unwrap();
        assert_eq!(at_one, Rational::from_integer(2));
    }

    #[test]
    fn p_polynomials_match_e_forms_on_grid() {
        for k in 0..=64 {
            let p = r(k, 64);
            let noise = NoiseParameter::new(p).unwrap();
            let e = Rational::from_integer(2) * p - Rational::one();
            assert_eq!(q_w0_from_p(noise), q_w0_of_e2(e * e).unwrap());
            assert_eq!(p_w1_from_p(noise), p_w1_of_e2(e * e).unwrap());
            let sum = q_w0_of_e2(e * e).unwrap() + p_w1_of_e2(e * e).unwrap();
            // (2E²−1)(E²+1) ≤ 0 ⟺ sum ≤ 1
            let sign =
                (Rational::from_integer(2) * e * e - Rational::one()) * (e * e + Rational::one());
            assert_eq!(sum <= Rational::one(), sign <= Rational::zero());
            assert_eq!(sum <= Rational::one(), e * e <= r(1, 2));
        }
    }

    #[test]
    fn curve_shape() {
        let c = tradeoff_curve(5).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(
            (c[0].e, c[0].q_w0, c[0].p_w1, c[0].sum),
            (-1.0, 1.0, 1.0, 2.0)
        );
        assert_eq!(
            (c[4].e, c[4].q_w0, c[4].p_w1, c[4].sum),
            (1.0, 1.0, 1.0, 2.0)
        );
        assert_eq!(
            (c[2].e, c[2].q_w0, c[2].p_w1, c[2].sum),
            (0.0, 0.25, 0.25, 0.5)
        );
        let c = tradeoff_curve(201).unwrap();
        for (a, b) in c.iter().zip(c.iter().rev()) {
            assert_eq!(a.e, -b.e);
            assert_eq!(a.q_w0, b.q_w0);
            assert_eq!(a.p_w1, b.p_w1);
        }
        assert!(c
            .iter()
            .all(|p| (0.25..=1.0).contains(&p.q_w0) && (0.25..=1.0).contains(&p.p_w1)));
        assert!(tradeoff_curve(1).is_err());
    }

    #[test]
    fn csv_format() {
        let csv = render_tradeoff_csv(&tradeoff_curve(3).unwrap());
        assert_eq!(csv, "E,Q_W0,P_W1,sum\n-1,1,1,2\n0,0.25,0.25,0.5\n1,1,1,2\n");
        let csv = render_tradeoff_csv(&tradeoff_curve(4).unwrap());
        assert!(csv.lines().nth(2).unwrap().starts_with("-0.333333333333,"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn monte_carlo_degenerate_and_half() {
        let mc = monte_carlo_tradeoff(NoiseParameter::perfect(), 1000, 1).unwrap();
        assert_eq!((mc.q_hat, mc.p_hat), (1.0, 1.0));
        let half = NoiseParameter::new(r(1, 2)).unwrap();
        let mc = monte_carlo_tradeoff(half, 100_000, 7).unwrap();
        assert!(within_three_sigma(mc.q_hat, 0.25, 100_000), "{mc:?}");
        assert!(within_three_sigma(mc.p_hat, 0.25, 100_000), "{mc:?}");
        assert_eq!(mc, monte_carlo_tradeoff(half, 100_000, 7).unwrap());
        assert!(monte_carlo_tradeoff(half, 0, 7).is_err());
    }

    #[test]
    fn monte_carlo_at_threshold() {
        // convergent of (1 + √2/2)/2, within 5e-7; small enough that p⁶
        // terms stay inside i64
        let p = NoiseParameter::new(r(985, 1154)).unwrap();
        let mc = monte_carlo_tradeoff(p, 200_000, 11).unwrap();
        assert!(mc.q_within_3sigma && mc.p_within_3sigma, "{mc:?}");
        // sum of two independent estimates; variances add
        let var = mc.q_exact * (1.0 - mc.q_exact) / 2e5 + mc.p_exact * (1.0 - mc.p_exact) / 2e5;
        assert!((mc.q_hat + mc.p_hat - 1.0).abs() <= 3.0 * var.sqrt() + 1e-6);
    }

    proptest! {
        #[test]
        fn even_in_e(e in -1.0f64..=1.0) {
            prop_assert_eq!(q_w0(e).unwrap(), q_w0(-e).unwrap());
            prop_assert_eq!(p_w1(e).unwrap(), p_w1(-e).unwrap());
        }
    }
}
