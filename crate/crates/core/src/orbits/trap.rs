//! Trapping intervals `I₋`, `I₊` exchanged by the conjugate map, which
//! certify an attracting 2-cycle for large intensity.

use serde::{Deserialize, Serialize};

use crate::dynamics::step_y;
use crate::stability::regime_interval;
use crate::{Error, Params, Result};

const DERIVATIVE_SAMPLES: usize = 1000;

/// Upper linear envelope `F₋(y) = (1-σ) y + 1 - b`.
pub fn upper_line(p: &Params, y: f64) -> f64 {
    (1.0 - p.sigma()) * y + 1.0 - p.b()
}

/// Lower linear envelope `F₊(y) = (1-σ) y - b`.
pub fn lower_line(p: &Params, y: f64) -> f64 {
    (1.0 - p.sigma()) * y - p.b()
}

/// `ln(1 / (1 + e^{-z}))`, finite for every finite `z`.
fn ln_logistic(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

/// `ln(1 - σ - F'(y)) = ln(a e^{ay} / (1 + e^{ay})^2)`.
fn ln_derivative_deficit(p: &Params, y: f64) -> f64 {
    let z = p.a() * y;
    p.a().ln() + ln_logistic(z) + ln_logistic(-z)
}

fn phi(b: f64, sigma: f64) -> f64 {
    2.0 * b - sigma * b - 1.0 + sigma
}

/// Centres `(x₋, x₊)` of the trap intervals, defined for any `b` and `σ ∈ (0, 1)`.
/// They satisfy `F₋(x₋) = x₊` and `F₊(x₊) = x₋`.
pub fn trap_centers(b: f64, sigma: f64) -> (f64, f64) {
    let scale = sigma * (2.0 - sigma);
    (-phi(b, sigma) / scale, phi(1.0 - b, sigma) / scale)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapVerification {
    /// `φ(b) = 2b - σb - 1 + σ`.
    pub phi_b: f64,
    pub phi_1mb: f64,
    pub x_minus: f64,
    pub x_plus: f64,
    /// Half-width `K = φ(b₀) / (2σ(2-σ))` with `b₀ = min(b, 1-b)`.
    pub half_width: f64,
    pub i_minus: (f64, f64),
    pub i_plus: (f64, f64),
    /// `F` applied to the endpoints of `I₋` and `I₊`.
    pub image_minus: (f64, f64),
    pub image_plus: (f64, f64),
    /// `|F₋(x₋) - x₊|` and `|F₊(x₊) - x₋|`.
    pub identity_residuals: (f64, f64),
    /// `0 <= F' < 1-σ` at the endpoints and on a 1000-point grid of both intervals.
    pub derivative_bound_holds: bool,
    /// `F(I₋) ⊆ I₊` and `F(I₊) ⊆ I₋`, with `F` increasing on both.
    pub inclusions_hold: bool,
    /// `F₊ < F < F₋` at the interval endpoints.
    pub linear_bounds_hold: bool,
    /// `F₋(y) + 1/(ay) < F(y)` for `y < 0`, `F(y) < F₊(y) + 1/(ay)` for `y > 0`.
    pub refined_bounds_hold: bool,
    /// Explicit intensity `max{(2-σ)/(Kφ(b)), (2-σ)/(Kφ(1-b))}` above which the
    /// refined bounds alone force both inclusions.
    pub sufficient_intensity: f64,
}

pub fn verify_period2_trap(p: &Params) -> Result<TrapVerification> {
    let (a, b, sigma) = (p.a(), p.b(), p.sigma());
    if sigma == 0.0 {
        return Err(Error::Domain(
            "trap half-width K is undefined for sigma = 0".into(),
        ));
    }
    if sigma >= 1.0 {
        return Err(Error::Hypothesis("sigma must lie in (0, 1)".into()));
    }
    let b0 = b.min(1.0 - b);
    let (edge, _) = regime_interval(sigma);
    if !(b0 > edge) {
        return Err(Error::Hypothesis(format!(
            "b0 = min(b, 1-b) = {b0} must exceed (1-sigma)/(2-sigma) = {edge}"
        )));
    }

    let (phi_b, phi_1mb) = (phi(b, sigma), phi(1.0 - b, sigma));
    let (x_minus, x_plus) = trap_centers(b, sigma);
    let k = phi(b0, sigma) / (2.0 * sigma * (2.0 - sigma));
    let i_minus = (x_minus - k, x_minus + k);
    let i_plus = (x_plus - k, x_plus + k);

    let f = |y: f64| step_y(p, y);
    let image_minus = (f(i_minus.0), f(i_minus.1));
    let image_plus = (f(i_plus.0), f(i_plus.1));

    let ln_keep = (1.0 - sigma).ln();
    let derivative_ok = |y: f64| {
        let d = ln_derivative_deficit(p, y);
        d.is_finite() && d <= ln_keep
    };
    let derivative_bound_holds = [i_minus, i_plus].iter().all(|&(lo, hi)| {
        (0..=DERIVATIVE_SAMPLES).all(|i| {
            let t = i as f64 / DERIVATIVE_SAMPLES as f64;
            derivative_ok(lo + t * (hi - lo))
        })
    });
    let inclusions_hold = derivative_bound_holds
        && image_minus.0 >= i_plus.0
        && image_minus.1 <= i_plus.1
        && image_plus.0 >= i_minus.0
        && image_plus.1 <= i_minus.1;

    let endpoints = [i_minus.0, i_minus.1, i_plus.0, i_plus.1];
    // F₋ - F = logistic(ay) and F - F₊ = logistic(-ay), compared in log form.
    let linear_bounds_hold = endpoints
        .iter()
        .all(|&y| ln_logistic(a * y).is_finite() && ln_logistic(-a * y).is_finite());
    let refined_bounds_hold = endpoints.iter().all(|&y| {
        if y < 0.0 {
            ln_logistic(a * y) < -(-a * y).ln()
        } else if y > 0.0 {
            ln_logistic(-a * y) < -(a * y).ln()
        } else {
            false
        }
    });

    Ok(TrapVerification {
        phi_b,
        phi_1mb,
        x_minus,
        x_plus,
        half_width: k,
        i_minus,
        i_plus,
        image_minus,
        image_plus,
        identity_residuals: (
            (upper_line(p, x_minus) - x_plus).abs(),
            (lower_line(p, x_plus) - x_minus).abs(),
        ),
        derivative_bound_holds,
        inclusions_hold,
        linear_bounds_hold,
        refined_bounds_hold,
        sufficient_intensity: ((2.0 - sigma) / (k * phi_b)).max((2.0 - sigma) / (k * phi_1mb)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64, s: f64) -> Params {
        Params::new(a, b, s).unwrap()
    }

    #[test]
    fn trap_holds_at_large_intensity() {
        let t = verify_period2_trap(&p(200.0, 0.45, 0.5)).unwrap();
        assert!(t.derivative_bound_holds);
        assert!(t.inclusions_hold);
        assert!(t.linear_bounds_hold && t.refined_bounds_hold);
        assert!((t.phi_b - 0.175).abs() < 1e-15);
        assert!((t.phi_1mb - 0.325).abs() < 1e-15);
        assert!(t.i_minus.1 < 0.0 && t.i_plus.0 > 0.0);
    }

    #[test]
    fn envelope_identities_exact() {
        let t = verify_period2_trap(&p(200.0, 0.45, 0.5)).unwrap();
        assert!(t.identity_residuals.0 < 1e-12 && t.identity_residuals.1 < 1e-12);
    }

    #[test]
    fn small_intensity_reports_failure_without_error() {
        let t = verify_period2_trap(&p(10.0, 0.45, 0.5)).unwrap();
        assert!(!t.inclusions_hold);
    }

    #[test]
    fn sufficient_intensity_is_sufficient() {
        let q = p(1.0, 0.45, 0.5);
        let bound = verify_period2_trap(&q).unwrap().sufficient_intensity;
        let t = verify_period2_trap(&q.with_a(bound * 1.5).unwrap()).unwrap();
        assert!(t.inclusions_hold, "{t:?}");
    }

    #[test]
    fn hypothesis_errors() {
        assert!(matches!(
            verify_period2_trap(&p(200.0, 0.45, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            verify_period2_trap(&p(200.0, 0.2, 0.5)),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            verify_period2_trap(&p(200.0, 0.45, 1.0)),
            Err(Error::Hypothesis(_))
        ));
    }
}
