//! Period-3 witnesses for the chaotic regime.
//!
//! Everything here works in the conjugate coordinate `y`, where the map is
//! defined on the whole line and the invariant interval `[F(c₊), F(c₋)]` is
//! bounded.

use serde::{Deserialize, Serialize};

use crate::dynamics::{critical_points_x, from_conjugate, step_y, to_conjugate};
use crate::equilibrium::solve_fixed_point;
use crate::stability::regime_interval;
use crate::{Error, Params, Result};

/// `ln((1 + √5)/2)`, the entropy forced by a period-3 orbit.
pub const GOLDEN_ENTROPY: f64 = 0.481_211_825_059_603_4;

const SCAN_POINTS: usize = 100_000;
const CYCLE_TOL: f64 = 1e-9;
const FIXED_POINT_EXCLUSION: f64 = 1e-6;

/// Point `x₀` on the middle lap with `F(x₀) = c₋` and its third image.
/// For `b > 1/2` the mirrored statement is used: `F(x₀) = c₊`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosWitness {
    pub x0: f64,
    pub f_x0: f64,
    pub f3_x0: f64,
    pub c_minus: f64,
    pub c_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosCertificate {
    /// `(b, σ)` lies in the chaotic region.
    pub hypothesis_met: bool,
    /// Critical points `(c₋, c₊)` of the conjugate map.
    pub critical_points: (f64, f64),
    /// Fixed point `ȳ` of the conjugate map.
    pub fixed_point: f64,
    pub witness: Option<ChaosWitness>,
    /// `F³(x₀) > c₊` (or `< c₋` in the mirrored case).
    pub witness_passes: bool,
    pub period3_found: bool,
    /// Period-3 orbit in the conjugate coordinate.
    pub period3_orbit: Option<[f64; 3]>,
    /// The same orbit in the population coordinate.
    pub period3_orbit_x: Option<[f64; 3]>,
    pub entropy_lower_bound: Option<f64>,
}

fn iterate_y(p: &Params, y: f64, n: usize) -> f64 {
    (0..n).fold(y, |y, _| step_y(p, y))
}

/// Root of a continuous `g` on `[lo, hi]` where `g(lo)` and `g(hi)` differ in sign.
fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let sign_lo = g(lo) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) > 0.0) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn chaos_witness(p: &Params, c_minus: f64, c_plus: f64) -> (Option<ChaosWitness>, bool) {
    let mirrored = p.b() > 0.5;
    let target = if mirrored { c_plus } else { c_minus };
    let g = |y: f64| step_y(p, y) - target;
    // F decreases on [c₋, c₊]; a solution exists iff the target lies between the images.
    if !(g(c_minus) >= 0.0 && g(c_plus) <= 0.0) {
        return (None, false);
    }
    let x0 = bisect(g, c_minus, c_plus);
    let f3 = iterate_y(p, x0, 3);
    let passes = if mirrored { f3 < c_minus } else { f3 > c_plus };
    (
        Some(ChaosWitness {
            x0,
            f_x0: step_y(p, x0),
            f3_x0: f3,
            c_minus,
            c_plus,
        }),
        passes,
    )
}

fn verify_three_cycle(p: &Params, y0: f64, fixed: f64) -> Option<[f64; 3]> {
    let y1 = step_y(p, y0);
    let y2 = step_y(p, y1);
    let orbit = [y0, y1, y2];
    let closes = orbit.iter().all(|&y| {
        (iterate_y(p, y, 3) - y).abs() < CYCLE_TOL && (step_y(p, y) - y).abs() > CYCLE_TOL
    });
    let distinct =
        (y0 - y1).abs() > CYCLE_TOL && (y1 - y2).abs() > CYCLE_TOL && (y0 - y2).abs() > CYCLE_TOL;
    let off_fixed = orbit
        .iter()
        .all(|&y| (y - fixed).abs() > FIXED_POINT_EXCLUSION);
    (closes && distinct && off_fixed).then_some(orbit)
}

/// Sign-change scan of `F³(y) - y` over `[F(c₊) - 1, F(c₋) + 1]`.
fn find_three_cycle(p: &Params, c_minus: f64, c_plus: f64, fixed: f64) -> Option<[f64; 3]> {
    let lo = step_y(p, c_plus) - 1.0;
    let hi = step_y(p, c_minus) + 1.0;
    let h = |y: f64| iterate_y(p, y, 3) - y;
    let width = (hi - lo) / SCAN_POINTS as f64;
    let mut prev_y = lo;
    let mut prev_h = h(lo);
    for i in 1..=SCAN_POINTS {
        let y = lo + i as f64 * width;
        let hy = h(y);
        if (prev_h > 0.0) != (hy > 0.0) {
            let root = bisect(h, prev_y, y);
            if (root - fixed).abs() > FIXED_POINT_EXCLUSION {
                if let Some(orbit) = verify_three_cycle(p, root, fixed) {
                    return Some(orbit);
                }
            }
        }
        prev_y = y;
        prev_h = hy;
    }
    None
}

/// Check the chaos hypothesis, build the middle-lap witness and search for a
/// period-3 orbit of the conjugate map.
pub fn certify_chaos(p: &Params) -> Result<ChaosCertificate> {
    let (b, sigma) = (p.b(), p.sigma());
    let (c_left, c_right) = critical_points_x(p).ok_or_else(|| {
        Error::Hypothesis(format!(
            "critical points need a > 4(1 - sigma) and sigma < 1 (a = {}, sigma = {sigma})",
            p.a()
        ))
    })?;
    // The left x-critical point maps to the right y-critical point.
    let c_minus = to_conjugate(p, c_right)?;
    let c_plus = to_conjugate(p, c_left)?;

    let (lo, hi) = regime_interval(sigma);
    let hypothesis_met = (b <= 0.5 && b < lo) || (b >= 0.5 && b > hi);

    let fixed_point = to_conjugate(p, solve_fixed_point(p).xbar)?;
    let (witness, witness_passes) = chaos_witness(p, c_minus, c_plus);
    let period3_orbit = find_three_cycle(p, c_minus, c_plus, fixed_point);
    let period3_found = period3_orbit.is_some();

    Ok(ChaosCertificate {
        hypothesis_met,
        critical_points: (c_minus, c_plus),
        fixed_point,
        witness,
        witness_passes,
        period3_found,
        period3_orbit,
        period3_orbit_x: period3_orbit.map(|o| o.map(|y| from_conjugate(p, y))),
        entropy_lower_bound: period3_found.then_some(GOLDEN_ENTROPY),
    })
}
