//! Local stability of the interior equilibrium and the analytic boundaries of
//! the stable region in the `(a, b)` plane.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::log_ratio;
use crate::equilibrium::solve_fixed_point;
use crate::{Error, Params, Result};

/// Half-width of the band around `|multiplier| = 1` reported as neutral.
pub const NEUTRAL_BAND: f64 = 1e-9;
/// Tolerance separating the period-2 and chaotic regimes from their boundary.
pub const REGIME_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityClass {
    Attracting,
    Repelling,
    Neutral,
}

impl StabilityClass {
    pub fn from_multiplier(m: f64) -> Self {
        if m.abs() < 1.0 - NEUTRAL_BAND {
            StabilityClass::Attracting
        } else if m.abs() > 1.0 + NEUTRAL_BAND {
            StabilityClass::Repelling
        } else {
            StabilityClass::Neutral
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub xbar: f64,
    /// `f'(x̄) = 1 - σ - a x̄ (1 - x̄)`.
    pub multiplier: f64,
    pub class: StabilityClass,
}

pub fn fixed_point_multiplier(p: &Params, xbar: f64) -> f64 {
    1.0 - p.sigma() - p.a() * xbar * (1.0 - xbar)
}

pub fn classify(p: &Params) -> StabilityReport {
    let xbar = solve_fixed_point(p).xbar;
    let multiplier = fixed_point_multiplier(p, xbar);
    StabilityReport {
        xbar,
        multiplier,
        class: StabilityClass::from_multiplier(multiplier),
    }
}

/// The intensity `a₀` at which the equilibrium multiplier crosses -1.
///
/// The multiplier is strictly decreasing in `a`, so bisection on
/// `multiplier(a) + 1` is unconditionally convergent.
pub fn threshold_a0(b: f64, sigma: f64) -> Result<f64> {
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::invalid("b", b, "must lie in (0, 1)"));
    }
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::invalid("sigma", sigma, "must lie in [0, 1]"));
    }
    let excess = |a: f64| -> Result<f64> {
        let p = Params::new(a, b, sigma)?;
        Ok(classify(&p).multiplier + 1.0)
    };
    let mut lo = 1e-6;
    let mut hi = (10.0 * (2.0 - sigma) / (b * (1.0 - b))).max(100.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One point on the flip-bifurcation boundary for a given intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub a: f64,
    /// Roots of `f'(x̄) = -1` in `x̄`; `x1 + x2 = 1`.
    pub x1: f64,
    pub x2: f64,
    /// Lower branch `b₁(a, σ)`. Negative once `a` exceeds the universal threshold.
    pub b1: f64,
    /// Upper branch `b₂(a, σ) = 1 - b₁(a, σ)`.
    pub b2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationBoundary {
    pub sigma: f64,
    pub points: Vec<BoundaryPoint>,
}

/// Lowest intensity at which a flip boundary exists, `4(2-σ)`.
pub fn flip_onset(sigma: f64) -> f64 {
    4.0 * (2.0 - sigma)
}

pub fn boundary_point(sigma: f64, a: f64) -> Result<BoundaryPoint> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::invalid("sigma", sigma, "must lie in [0, 1]"));
    }
    if !(a >= flip_onset(sigma)) {
        return Err(Error::Domain(format!(
            "flip boundary needs a >= 4(2 - sigma) = {}, got a = {a}",
            flip_onset(sigma)
        )));
    }
    let r = flip_onset(sigma) / a;
    let s = (1.0 - r).max(0.0).sqrt();
    let x1 = 0.5 * r / (1.0 + s);
    let x2 = 1.0 - x1;
    let b1 = x1 - sigma / a * log_ratio(x1);
    let b2 = x2 - sigma / a * log_ratio(x2);
    Ok(BoundaryPoint { a, x1, x2, b1, b2 })
}

pub fn boundary_curves(sigma: f64, a_grid: &[f64]) -> Result<BifurcationBoundary> {
    let points = a_grid
        .iter()
        .map(|&a| boundary_point(sigma, a))
        .collect::<Result<_>>()?;
    Ok(BifurcationBoundary { sigma, points })
}

/// `g(x) = (1-x) log((1-x)/x)`, decreasing from +∞ to 0 on (0, 1/2].
pub fn universal_g(x: f64) -> f64 {
    (1.0 - x) * log_ratio(x)
}

/// Intensity `a*` beyond which the equilibrium is repelling for every `b`.
///
/// `None` for `σ = 0`, where no finite threshold exists. For very small
/// positive `σ` the threshold exceeds the double range and `+∞` is returned.
pub fn universal_threshold_astar(sigma: f64) -> Result<Option<f64>> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::invalid("sigma", sigma, "must lie in [0, 1]"));
    }
    if sigma == 0.0 {
        return Ok(None);
    }
    let target = (2.0 - sigma) / sigma;
    // Bisect in t = ln x so that roots far below the normal range stay reachable.
    let g = |t: f64| {
        let x = t.exp();
        ((-x).ln_1p() - t) * (1.0 - x)
    };
    let (mut lo, mut hi) = (-745.0_f64, 0.5_f64.ln());
    if g(lo) < target {
        return Ok(Some(f64::INFINITY));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = (0.5 * (lo + hi)).exp();
    Ok(Some((2.0 - sigma) / (x * (1.0 - x))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeLabel {
    Period2,
    Chaos,
    Boundary,
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeLabel::Period2 => "period2",
            RegimeLabel::Chaos => "chaos",
            RegimeLabel::Boundary => "boundary",
        })
    }
}

/// Edges `((1-σ)/(2-σ), 1/(2-σ))` of the period-2 band for large `a`.
pub fn regime_interval(sigma: f64) -> (f64, f64) {
    ((1.0 - sigma) / (2.0 - sigma), 1.0 / (2.0 - sigma))
}

/// Large-intensity behaviour: attracting 2-cycle inside the band, chaos outside.
pub fn regime(b: f64, sigma: f64) -> Result<RegimeLabel> {
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::invalid("b", b, "must lie in (0, 1)"));
    }
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::invalid("sigma", sigma, "must lie in [0, 1]"));
    }
    let (lo, hi) = regime_interval(sigma);
    Ok(if b > lo + REGIME_TOL && b < hi - REGIME_TOL {
        RegimeLabel::Period2
    } else if b < lo - REGIME_TOL || b > hi + REGIME_TOL {
        RegimeLabel::Chaos
    } else {
        RegimeLabel::Boundary
    })
}
