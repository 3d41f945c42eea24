//! The interior (perturbed) equilibrium of the map.

use serde::{Deserialize, Serialize};

use crate::dynamics::{log_ratio, step_x};
use crate::{Error, Params, Result};

/// Bracket padding around `[min(b, 1/2), max(b, 1/2)]`.
const BRACKET_PAD: f64 = 1e-9;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub xbar: f64,
    /// `|f(x̄) - x̄|`.
    pub residual: f64,
    /// Width of the final bisection bracket.
    pub bracket: f64,
}

/// `x - b - (σ/a) log((1-x)/x)`, strictly increasing on (0, 1); its root is x̄.
pub fn fixed_point_residual(p: &Params, x: f64) -> f64 {
    x - p.b() - p.sigma() / p.a() * log_ratio(x)
}

/// Locate the unique interior fixed point by bisection.
pub fn solve_fixed_point(p: &Params) -> EquilibriumResult {
    let (b, sigma) = (p.b(), p.sigma());
    if sigma == 0.0 || b == 0.5 {
        // Exact root of the residual.
        return EquilibriumResult {
            xbar: b,
            residual: (step_x(p, b) - b).abs(),
            bracket: 0.0,
        };
    }
    let mut lo = (b.min(0.5) - BRACKET_PAD).max(f64::MIN_POSITIVE);
    let mut hi = (b.max(0.5) + BRACKET_PAD).min(1.0 - f64::EPSILON);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if fixed_point_residual(p, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xbar = if fixed_point_residual(p, lo).abs() <= fixed_point_residual(p, hi).abs() {
        lo
    } else {
        hi
    };
    EquilibriumResult {
        xbar,
        residual: (step_x(p, xbar) - xbar).abs(),
        bracket: hi - lo,
    }
}

/// x̄ along an ascending grid of intensities at fixed `(b, σ)`.
pub fn equilibrium_limits(b: f64, sigma: f64, a_grid: &[f64]) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::invalid("sigma", sigma, "must lie in (0, 1]"));
    }
    if a_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("a_grid must be strictly ascending".into()));
    }
    a_grid
        .iter()
        .map(|&a| Ok(solve_fixed_point(&Params::new(a, b, sigma)?).xbar))
        .collect()
}
