use std::fmt::Write as _;

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::boxes::{correlation_of, imperfect_box, NoiseParameter};
use crate::error::{Error, Result};
use crate::gf2::Bit;
use crate::input_spaces::InputPoint;
use crate::symmetry::symmetry_parameter_w;
use crate::Rational;

fn check_range(e: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&e) {
        return Err(Error::OutOfRange {
            what: "correlation",
            value: e.to_string(),
            min: "-1".into(),
            max: "1".into(),
        });
    }
    Ok(())
}

/// `S = |E₁₁ − E₁₂| + |E₂₁ + E₂₂|`.
pub fn chsh_value(e11: f64, e12: f64, e21: f64, e22: f64) -> Result<f64> {
    for e in [e11, e12, e21, e22] {
        check_range(e)?;
    }
    Ok((e11 - e12).abs() + (e21 + e22).abs())
}

/// Exact counterpart of [`chsh_value`].
pub fn chsh_exact(e: [Rational; 4]) -> Result<Rational> {
    for v in e {
        check_range(v.to_f64().unwrap_or(f64::NAN))?;
    }
    Ok((e[0] - e[1]).abs() + (e[2] + e[3]).abs())
}

/// Four measurement settings `x₁, x₂` (Alice) and `y₁, y₂` (Bob).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SettingsQuad {
    pub x1: InputPoint,
    pub x2: InputPoint,
    pub y1: InputPoint,
    pub y2: InputPoint,
}

impl SettingsQuad {
    pub fn new(x1: InputPoint, x2: InputPoint, y1: InputPoint, y2: InputPoint) -> Result<Self> {
        let n = x1.len();
        for v in [&x2, &y1, &y2] {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: v.len(),
                });
            }
        }
        Ok(Self { x1, x2, y1, y2 })
    }

    pub fn parse(x1: &str, x2: &str, y1: &str, y2: &str) -> Result<Self> {
        Self::new(x1.parse()?, x2.parse()?, y1.parse()?, y2.parse()?)
    }

    pub fn n(&self) -> usize {
        self.x1.len()
    }

    /// Same quad with the roles of Alice and Bob exchanged.
    pub fn swapped_parties(&self) -> Self {
        Self {
            x1: self.y1,
            x2: self.y2,
            y1: self.x1,
            y2: self.x2,
        }
    }

    /// Repeated settings on either side.
    pub fn is_degenerate(&self) -> bool {
        self.x1 == self.x2 || self.y1 == self.y2
    }

    /// `(x₁,y₁), (x₁,y₂), (x₂,y₁), (x₂,y₂)`.
    pub fn pairs(&self) -> [(InputPoint, InputPoint); 4] {
        [
            (self.x1, self.y1),
            (self.x1, self.y2),
            (self.x2, self.y1),
            (self.x2, self.y2),
        ]
    }

    pub fn w(&self) -> Result<Bit> {
        symmetry_parameter_w(&self.x1, &self.x2, &self.y1, &self.y2)
    }

    pub fn labeled(&self) -> Vec<(String, String)> {
        vec![
            ("x1".into(), self.x1.to_string()),
            ("x2".into(), self.x2.to_string()),
            ("y1".into(), self.y1.to_string()),
            ("y2".into(), self.y2.to_string()),
        ]
    }
}

/// Inner products `xᵢ·yⱼ` in [`SettingsQuad::pairs`] order.
pub fn quad_correlations(q: &SettingsQuad) -> Result<[Bit; 4]> {
    let mut out = [0; 4];
    for (slot, (x, y)) in out.iter_mut().zip(q.pairs()) {
        *slot = x.dot(&y)?;
    }
    Ok(out)
}

/// S from the four imperfect-box correlations `(2p−1)(−1)^{xᵢ·yⱼ}`.
pub fn chsh_of_settings(q: &SettingsQuad, noise: NoiseParameter) -> Result<Rational> {
    let mut e = [Rational::default(); 4];
    for (slot, (x, y)) in e.iter_mut().zip(q.pairs()) {
        *slot = correlation_of(&imperfect_box(&x, &y, noise)?);
    }
    chsh_exact(e)
}

/// Settings file: `key = bitstring` lines for `x1 x2 y1 y2`, `#` comments.
pub fn parse_settings_quad(text: &str) -> Result<SettingsQuad> {
    let mut slots: [Option<InputPoint>; 4] = [None; 4];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::FixtureParse {
            line: i + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
        let slot = match key.trim() {
            "x1" => 0,
            "x2" => 1,
            "y1" => 2,
            "y2" => 3,
            other => return Err(parse_err(format!("unknown key `{other}`"))),
        };
        let point: InputPoint = value
            .trim()
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        slots[slot] = Some(point);
    }
    match slots {
        [Some(x1), Some(x2), Some(y1), Some(y2)] => SettingsQuad::new(x1, x2, y1, y2),
        _ => Err(Error::Settings("settings need x1, x2, y1 and y2".into())),
    }
}

pub fn render_settings_quad(q: &SettingsQuad) -> String {
    let mut s = String::new();
    for (k, v) in q.labeled() {
        let _ = writeln!(s, "{k} = {v}");
    }
    s
}

/// One labeling of the maximal-violation quadruple, evaluated at `p = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationEvaluation {
    pub quad: SettingsQuad,
    pub correlations: [Bit; 4],
    pub s: i64,
    pub w: Bit,
    pub matches_stated: bool,
}

/// The quadruple as listed and with `x₁ ↔ x₂`, against the stated values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationExample {
    pub stated_correlations: [Bit; 4],
    pub stated_s: i64,
    pub stated_w: Bit,
    pub listed: ViolationEvaluation,
    pub relabeled: ViolationEvaluation,
}

impl ViolationExample {
    /// True when the two labelings disagree with the stated numbers in a way
    /// the user should see.
    pub fn discrepancy(&self) -> bool {
        !self.listed.matches_stated || !self.relabeled.matches_stated
    }
}

fn evaluate(q: SettingsQuad, stated: [Bit; 4]) -> Result<ViolationEvaluation> {
    let correlations = quad_correlations(&q)?;
    let s = chsh_of_settings(&q, NoiseParameter::perfect())?.to_integer();
    Ok(ViolationEvaluation {
        quad: q,
        correlations,
        s,
        w: q.w()?,
        matches_stated: correlations == stated,
    })
}

pub fn violation_example() -> ViolationExample {
    let listed =
        SettingsQuad::parse("100000", "010000", "011100", "000100").expect("valid fixture");
    let relabeled = SettingsQuad {
        x1: listed.x2,
        x2: listed.x1,
        ..listed
    };
    let stated = [0, 1, 0, 0];
    ViolationExample {
        stated_correlations: stated,
        stated_s: 4,
        stated_w: 1,
        listed: evaluate(listed, stated).expect("admissible fixture"),
        relabeled: evaluate(relabeled, stated).expect("admissible fixture"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input_spaces::check_admissibility;
    use crate::symmetry::partition_by_symmetry;
    use num_traits::One;

    #[test]
    fn chsh_value_examples() {
        assert_eq!(chsh_value(1.0, -1.0, 1.0, 1.0).unwrap(), 4.0);
        assert_eq!(chsh_value(1.0, 1.0, 1.0, 1.0).unwrap(), 2.0);
        let h = 0.5f64.sqrt();
        assert!((chsh_value(h, -h, h, h).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(chsh_value(1.1, 0.0, 0.0, 0.0).is_err());
        assert!(chsh_value(f64::NAN, 0.0, 0.0, 0.0).is_err());
        let one = Rational::one();
        assert_eq!(
            chsh_exact([one, -one, one, one]).unwrap(),
            Rational::from_integer(4)
        );
    }

    #[test]
    fn violation_example_labelings() {
        let ex = violation_example();
        assert_eq!(ex.listed.s, 0);
        assert_eq!(ex.listed.w, 0);
        assert_eq!(ex.listed.correlations, [0, 0, 1, 0]);
        assert_eq!(ex.relabeled.s, 4);
        assert_eq!(ex.relabeled.w, 1);
        assert_eq!(ex.relabeled.correlations, [1, 0, 0, 0]);
        assert!(ex.discrepancy());
    }

    #[test]
    fn noise_scales_s() {
        let q = violation_example().relabeled.quad;
        let p = NoiseParameter::new(Rational::new(3, 4)).unwrap();
        assert_eq!(chsh_of_settings(&q, p).unwrap(), Rational::from_integer(2));
    }

    #[test]
    fn within_subset_quads_stay_local() {
        let part = partition_by_symmetry(6).unwrap();
        for sub in &part.subsets {
            let pts = sub.inputs();
            for &x1 in pts {
                for &x2 in pts {
                    for &y1 in pts {
                        for &y2 in pts {
                            let q = SettingsQuad::new(x1, x2, y1, y2).unwrap();
                            let admissible = q
                                .pairs()
                                .iter()
                                .all(|(x, y)| check_admissibility(x, y).unwrap());
                            if !admissible {
                                continue;
                            }
                            let s = chsh_of_settings(&q, NoiseParameter::perfect()).unwrap();
                            assert!(s <= Rational::from_integer(2));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn settings_file_round_trip() {
        let q = violation_example().relabeled.quad;
        let text = format!("# relabeled\n{}", render_settings_quad(&q));
        assert_eq!(parse_settings_quad(&text).unwrap(), q);
        assert!(parse_settings_quad("x1 = 100000\n").is_err());
        let err = parse_settings_quad("x1 = 110000\n").unwrap_err();
        assert!(matches!(err, Error::FixtureParse { line: 1, .. }));
        assert!(parse_settings_quad("z = 100000").is_err());
    }
}
