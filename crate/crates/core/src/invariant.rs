//! Angle-weighted box mixtures and the rotation-invariant correlation
//! `E = −cos(θx − θy)`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::input_spaces::{check_admissibility, enumerate_inputs, InputPoint};
use crate::report::{csv_line, format_sig};
use crate::symmetry::{symmetry_defect, SymmetryElement};

pub const ANGLE_SCAN_HEADER: &str = "theta_x1,theta_x2,theta_y1,theta_y2,S";

// Differences within this distance of a multiple of π/2 are snapped so the
// endpoint values ±1 and 0 come out exact.
const SNAP: f64 = 1e-12;

fn exact_cos(d: f64) -> f64 {
    let q = d / FRAC_PI_2;
    let k = q.round();
    if (d - k * FRAC_PI_2).abs() <= SNAP {
        return match (k as i64).rem_euclid(4) {
            0 => 1.0,
            1 | 3 => 0.0,
            _ => -1.0,
        };
    }
    d.cos()
}

/// `−cos(θx − θy)`.
pub fn invariant_e(theta_x: f64, theta_y: f64) -> f64 {
    -exact_cos(theta_x - theta_y)
}

/// Weights `(sin²(Θ/2), cos²(Θ/2))` of the two perfect boxes in the mixture.
pub fn mixture_weights(big_theta: f64) -> (f64, f64) {
    let s = (big_theta / 2.0).sin();
    let c = (big_theta / 2.0).cos();
    (s * s, c * c)
}

/// `sin²(Θ/2)(−1)^{x·y} + cos²(Θ/2)(−1)^{x·ȳ}`.
pub fn coefficient_form_e(x: &InputPoint, y: &InputPoint, big_theta: f64) -> Result<f64> {
    if !check_admissibility(x, y)? {
        return Err(Error::Inadmissible {
            x: x.to_string(),
            y: y.to_string(),
        });
    }
    let (w_same, w_rev) = mixture_weights(big_theta);
    let s = |b: u8| if b == 0 { 1.0 } else { -1.0 };
    Ok(w_same * s(x.dot(y)?) + w_rev * s(x.dot(&y.reverse())?))
}

/// Phase rule `Θ = (x·y)π + θx − θy`.
pub fn phase_angle(x: &InputPoint, y: &InputPoint, theta_x: f64, theta_y: f64) -> Result<f64> {
    Ok(f64::from(x.dot(y)?) * PI + theta_x - theta_y)
}

fn wrap(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if TAU - t <= SNAP {
        0.0
    } else {
        t
    }
}

/// Angles for every input point of length `n`, with `θ(x̄) = θ(x) + π`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleAssignment {
    n: usize,
    angles: BTreeMap<BitVector, f64>,
}

impl AngleAssignment {
    /// `free` picks the angle of the smaller point of each pair `{x, x̄}`;
    /// the least input point is pinned to 0.
    pub fn from_fn(n: usize, mut free: impl FnMut(&InputPoint) -> f64) -> Result<Self> {
        let space = enumerate_inputs(n)?;
        let least = space.least().expect("nonempty space");
        let mut angles = BTreeMap::new();
        for x in space.points() {
            let xr = x.reverse();
            if xr.vector() < x.vector() {
                continue;
            }
            let theta = if *x == least { 0.0 } else { wrap(free(x)) };
            angles.insert(x.vector(), theta);
            angles.insert(xr.vector(), wrap(theta + PI));
        }
        Ok(Self { n, angles })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: &BitVector) -> Option<f64> {
        self.angles.get(x).copied()
    }

    /// `θ(x̄) − θ(x) ≡ π` for every point.
    pub fn is_consistent(&self) -> bool {
        self.angles.iter().all(|(x, &t)| {
            let r = self.angles[&x.reverse()];
            let d = wrap(r - t - PI);
            d <= SNAP || TAU - d <= SNAP
        })
    }
}

/// Average of the mixture correlation at `(F x, F y)` over the defect-free
/// elements of `elements`, with angles moved by the constant offset
/// `θ_{Fx} = θx + δ_F`. `offset` supplies `δ_F` for the element's index.
pub fn symmetrized_average(
    x: &InputPoint,
    y: &InputPoint,
    angles: &AngleAssignment,
    elements: &[SymmetryElement],
    offset: impl Fn(usize) -> f64,
) -> Result<Option<f64>> {
    let tx = angles
        .get(x)
        .ok_or_else(|| Error::Settings(format!("no angle for {x}")))?;
    let ty = angles
        .get(y)
        .ok_or_else(|| Error::Settings(format!("no angle for {y}")))?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, f) in elements.iter().enumerate() {
        if symmetry_defect(f, x, y)? != 0 {
            continue;
        }
        let fx = InputPoint::new(f.apply(x)?)?;
        let fy = InputPoint::new(f.apply(y)?)?;
        let d = offset(i);
        let big_theta = phase_angle(&fx, &fy, tx + d, ty + d)?;
        sum += coefficient_form_e(&fx, &fy, big_theta)?;
        count += 1;
    }
    Ok((count > 0).then(|| sum / count as f64))
}

/// Grid of `grid` equally spaced angles in `[0, 2π)` merged with the eight
/// multiples of `π/4`.
pub fn angle_grid(grid: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..grid)
        .map(|k| TAU * k as f64 / grid as f64)
        .chain((0..8).map(|k| FRAC_PI_4 * k as f64))
        .collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= SNAP);
    v
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleScan {
    pub grid: usize,
    pub angles: usize,
    pub max: f64,
    /// `(θx₁, θx₂, θy₁, θy₂)`, lexicographically smallest maximizer.
    pub argmax: [f64; 4],
}

/// `S = |E₁₁ − E₁₂| + |E₂₁ + E₂₂|` with `E = −cos(θx − θy)`.
pub fn chsh_of_angles(t: [f64; 4]) -> f64 {
    let e = |a: f64, b: f64| invariant_e(a, b);
    (e(t[0], t[2]) - e(t[0], t[3])).abs() + (e(t[1], t[2]) + e(t[1], t[3])).abs()
}

/// Maximum of S over all quadruples of grid angles.
pub fn chsh_max_over_angles(grid: usize) -> Result<AngleScan> {
    if grid < 8 {
        return Err(Error::OutOfRange {
            what: "grid",
            value: grid.to_string(),
            min: "8".into(),
            max: "inf".into(),
        });
    }
    let angles = angle_grid(grid);
    let m = angles.len();
    let table: Vec<f64> = (0..m * m)
        .map(|k| invariant_e(angles[k / m], angles[k % m]))
        .collect();
    let e = |a: usize, b: usize| table[a * m + b];
    let mut best = f64::NEG_INFINITY;
    let mut arg = [0usize; 4];
    for a1 in 0..m {
        for a2 in 0..m {
            for b1 in 0..m {
                for b2 in 0..m {
                    let s = (e(a1, b1) - e(a1, b2)).abs() + (e(a2, b1) + e(a2, b2)).abs();
                    if s > best + SNAP {
                        best = s;
                        arg = [a1, a2, b1, b2];
                    }
                }
            }
        }
    }
    Ok(AngleScan {
        grid,
        angles: m,
        max: best,
        argmax: arg.map(|i| angles[i]),
    })
}

/// CSV slice of the scan with Alice's angles fixed, Bob's over the grid.
pub fn angle_scan_csv(grid: usize, theta_x1: f64, theta_x2: f64) -> String {
    let angles = angle_grid(grid);
    let mut out = String::from(ANGLE_SCAN_HEADER);
    out.push('\n');
    for &y1 in &angles {
        for &y2 in &angles {
            let t = [theta_x1, theta_x2, y1, y2];
            let s = chsh_of_angles(t);
            out.push_str(&csv_line(t.iter().chain([&s]).map(|v| format_sig(*v, 12))));
        }
    }
    out
}
