//! Evaluation of the EWA map, its conjugate form and the underlying
//! weight-based learning rule.
//!
//! All evaluations go through the log-odds of the next state so that no
//! intermediate exponential overflows, whatever the intensity of choice.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Lower clamp applied to iterates before the log-ratio is taken.
pub const X_MIN: f64 = 1e-300;
/// Upper clamp applied to iterates before the log-ratio is taken.
pub const X_MAX: f64 = 1.0 - 1e-16;

/// One instance of the dynamical system: intensity of choice `a`, equilibrium
/// split `b` and discount factor `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    a: f64,
    b: f64,
    sigma: f64,
}

impl Params {
    pub fn new(a: f64, b: f64, sigma: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::invalid("a", a, "must be finite and > 0"));
        }
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::invalid("b", b, "must lie in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&sigma) {
            return Err(Error::invalid("sigma", sigma, "must lie in [0, 1]"));
        }
        Ok(Params { a, b, sigma })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Same game with the roles of the two resources exchanged (`b -> 1-b`).
    pub fn mirrored(&self) -> Self {
        Params {
            b: 1.0 - self.b,
            ..*self
        }
    }

    pub fn with_a(&self, a: f64) -> Result<Self> {
        Params::new(a, self.b, self.sigma)
    }
}

/// `1 / (1 + e^{-z})` without overflow for either sign of `z`.
pub(crate) fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log((1-x)/x)` for `x` in (0, 1).
pub(crate) fn log_ratio(x: f64) -> f64 {
    (-x).ln_1p() - x.ln()
}

/// Log-odds `v` of the next state, such that `f(x) = 1 / (1 + e^v)`.
/// Only meaningful for interior `x` (or any `x` when `sigma == 1`).
fn next_log_odds(p: &Params, x: f64) -> f64 {
    let drift = p.a * (x - p.b);
    if p.sigma == 1.0 {
        drift
    } else {
        (1.0 - p.sigma) * log_ratio(x) + drift
    }
}

/// Clamp an iterate into `[X_MIN, X_MAX]`, reporting whether it moved.
pub fn clamp_state(x: f64) -> (f64, bool) {
    let c = x.clamp(X_MIN, X_MAX);
    (c, c != x)
}

/// One step of the population map `f_{abσ}`.
///
/// For `sigma < 1` the pure states 0 and 1 are fixed and are returned as-is.
/// The result can underflow to exactly 0 or 1 for extreme inputs; callers
/// iterating orbits should pass it through [`clamp_state`].
pub fn step_x(p: &Params, x: f64) -> f64 {
    if p.sigma < 1.0 && (x <= 0.0 || x >= 1.0) {
        return x.clamp(0.0, 1.0);
    }
    logistic(-next_log_odds(p, x))
}

/// Derivative of the population map, in the product form
/// `f (1 - f) ((1 - σ) / (x (1 - x)) - a)`.
pub fn deriv_x(p: &Params, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} lies outside [0, 1]")));
    }
    let slope = if p.sigma == 1.0 {
        -p.a
    } else if x == 0.0 || x == 1.0 {
        return Err(Error::Domain(format!(
            "derivative is infinite at the repelling boundary fixed point x = {x}"
        )));
    } else {
        (1.0 - p.sigma) / (x * (1.0 - x)) - p.a
    };
    let v = next_log_odds(p, x);
    Ok(logistic(-v) * logistic(v) * slope)
}

/// Turning points `(c_l, c_r)` of the map, present only when `a > 4(1-σ)`.
pub fn critical_points_x(p: &Params) -> Option<(f64, f64)> {
    let r = 4.0 * (1.0 - p.sigma) / p.a;
    if r >= 1.0 || p.sigma == 1.0 {
        return None;
    }
    let s = (1.0 - r).sqrt();
    // (1 - s)/2 rewritten to avoid cancellation when r is small.
    let left = 0.5 * r / (1.0 + s);
    Some((left, 1.0 - left))
}

/// Conjugate coordinate `y = (1/a) log((1-x)/x)`.
pub fn to_conjugate(p: &Params, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!(
            "conjugate coordinate undefined at x = {x}"
        )));
    }
    Ok(log_ratio(x) / p.a)
}

/// Inverse of [`to_conjugate`]: `x = 1 / (1 + e^{a y})`.
pub fn from_conjugate(p: &Params, y: f64) -> f64 {
    logistic(-p.a * y)
}

/// Conjugate map `F(y) = (1-σ) y + 1/(e^{a y} + 1) - b`.
pub fn step_y(p: &Params, y: f64) -> f64 {
    (1.0 - p.sigma) * y + logistic(-p.a * y) - p.b
}

/// `s = e^{ay}/(1+e^{ay})` and the density term `q = s(1-s)`, with `1-s`
/// evaluated as its own logistic so `q` keeps full relative accuracy in the tails.
fn bump(p: &Params, y: f64) -> (f64, f64) {
    let z = p.a * y;
    let s = logistic(z);
    (s, s * logistic(-z))
}

/// `(F', F'', F''')` of the conjugate map.
pub fn derivs_y(p: &Params, y: f64) -> (f64, f64, f64) {
    let a = p.a;
    let (s, q) = bump(p, y);
    let d1 = 1.0 - p.sigma - a * q;
    let d2 = a * a * q * (2.0 * s - 1.0);
    let d3 = a * a * a * q * (6.0 * q - 1.0);
    (d1, d2, d3)
}

/// Schwarzian derivative `F'''/F' - 3/2 (F''/F')^2` of the conjugate map.
///
/// Evaluated through `2F'F''' - 3F''^2 = a^3 q (2(1-σ)(6q-1) - a q)` with
/// `q = e^{ay}/(1+e^{ay})^2`. Beyond `|ay| ~ 745` `q` underflows and the
/// value degrades to 0.
pub fn schwarzian_y(p: &Params, y: f64) -> f64 {
    let a = p.a;
    if p.sigma == 1.0 {
        return -0.5 * a * a;
    }
    let (_, q) = bump(p, y);
    let d1 = 1.0 - p.sigma - a * q;
    let numerator = a * a * a * q * (2.0 * (1.0 - p.sigma) * (6.0 * q - 1.0) - a * q);
    numerator / (2.0 * d1 * d1)
}

/// Game potential `Φ(x) = (a^2/2) ((1-b) x^2 + b (1-x)^2)`.
pub fn potential(p: &Params, x: f64) -> f64 {
    0.5 * p.a * p.a * ((1.0 - p.b) * x * x + p.b * (1.0 - x) * (1.0 - x))
}

/// `Φ'(x) = a^2 (x - b)`.
pub fn potential_slope(p: &Params, x: f64) -> f64 {
    p.a * p.a * (x - p.b)
}

/// Multiplicative-weights configuration with linear costs
/// `c1(x) = α N x`, `c2(1-x) = β N (1-x)`, normalised so that `α + β = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MwuConfig {
    pub total_mass: f64,
    pub learning_rate: f64,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
}

impl MwuConfig {
    pub fn new(
        total_mass: f64,
        learning_rate: f64,
        alpha: f64,
        beta: f64,
        sigma: f64,
    ) -> Result<Self> {
        if !(total_mass.is_finite() && total_mass > 0.0) {
            return Err(Error::invalid("N", total_mass, "must be finite and > 0"));
        }
        if !(learning_rate > 0.0 && learning_rate < 1.0) {
            return Err(Error::invalid("eps", learning_rate, "must lie in (0, 1)"));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::invalid("beta", beta, "must lie in (0, 1)"));
        }
        if alpha < 0.0 || (alpha + beta - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "alpha",
                alpha,
                "must satisfy alpha + beta = 1",
            ));
        }
        if !(0.0..=1.0).contains(&sigma) {
            return Err(Error::invalid("sigma", sigma, "must lie in [0, 1]"));
        }
        Ok(MwuConfig {
            total_mass,
            learning_rate,
            alpha,
            beta,
            sigma,
        })
    }

    /// `log(1/(1-ε))`, the per-agent intensity of choice.
    pub fn lambda(&self) -> f64 {
        -(-self.learning_rate).ln_1p()
    }

    /// The map parameters this configuration induces: `a = N log(1/(1-ε))`, `b = β`.
    pub fn params(&self) -> Result<Params> {
        Params::new(self.total_mass * self.lambda(), self.beta, self.sigma)
    }

    pub fn cost1(&self, x: f64) -> f64 {
        self.alpha * self.total_mass * x
    }

    pub fn cost2(&self, x: f64) -> f64 {
        self.beta * self.total_mass * (1.0 - x)
    }
}

/// Strategy weights, stored as logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightPair {
    pub log_w1: f64,
    pub log_w2: f64,
}

impl WeightPair {
    /// `w1 = w2 = 1`.
    pub fn uniform() -> Self {
        WeightPair {
            log_w1: 0.0,
            log_w2: 0.0,
        }
    }

    pub fn from_weights(w1: f64, w2: f64) -> Self {
        WeightPair {
            log_w1: w1.ln(),
            log_w2: w2.ln(),
        }
    }

    /// Weights whose induced mixture is `x`.
    pub fn from_mixture(x: f64) -> Self {
        WeightPair {
            log_w1: x.ln(),
            log_w2: (-x).ln_1p(),
        }
    }

    /// Fraction `w1 / (w1 + w2)` of the population on resource 1.
    pub fn mixture(&self) -> f64 {
        logistic(self.log_w1 - self.log_w2)
    }
}

/// One discounted multiplicative-weights round:
/// `w_i <- w_i^{1-σ} (1-ε)^{c_i}` with the costs evaluated at the realised
/// split `x`, then renormalised so the larger log-weight is 0.
///
/// `x` is the split the population actually played, normally `w.mixture()`.
pub fn mwu_step(cfg: &MwuConfig, w: &WeightPair, x: f64) -> (WeightPair, f64) {
    let keep = 1.0 - cfg.sigma;
    let log_decay = (-cfg.learning_rate).ln_1p();
    let l1 = keep * w.log_w1 + log_decay * cfg.cost1(x);
    let l2 = keep * w.log_w2 + log_decay * cfg.cost2(x);
    let top = l1.max(l2);
    let next = WeightPair {
        log_w1: l1 - top,
        log_w2: l2 - top,
    };
    (next, next.mixture())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(a: f64, b: f64, s: f64) -> Params {
        Params::new(a, b, s).unwrap()
    }

    /// The power-form map evaluated literally, for moderate `a` only.
    fn step_direct(p: &Params, x: f64) -> f64 {
        let num = x.powf(1.0 - p.sigma());
        num / (num + (1.0 - x).powf(1.0 - p.sigma()) * (p.a() * (x - p.b())).exp())
    }

    #[test]
    fn rejects_bad_params() {
        assert!(Params::new(0.0, 0.5, 0.0).is_err());
        assert!(Params::new(1.0, 0.0, 0.0).is_err());
        assert!(Params::new(1.0, 1.0, 0.0).is_err());
        assert!(Params::new(1.0, 0.5, 1.5).is_err());
        assert!(Params::new(f64::NAN, 0.5, 0.5).is_err());
    }

    #[test]
    fn symmetric_midpoint_is_fixed() {
        for a in [0.1, 4.0, 35.0, 1e4] {
            assert_eq!(step_x(&p(a, 0.5, 0.0), 0.5), 0.5);
        }
    }

    #[test]
    fn matches_direct_formula_for_moderate_a() {
        let q = p(10.0, 0.4, 0.25);
        for i in 1..100 {
            let x = i as f64 / 100.0;
            assert_relative_eq!(step_x(&q, x), step_direct(&q, x), max_relative = 1e-13);
        }
    }

    #[test]
    fn boundary_is_fixed_below_full_discount() {
        let q = p(35.0, 0.4, 0.5);
        assert_eq!(step_x(&q, 0.0), 0.0);
        assert_eq!(step_x(&q, 1.0), 1.0);
        let logit = p(35.0, 0.4, 1.0);
        assert!(step_x(&logit, 0.0) > 0.0 && step_x(&logit, 1.0) < 1.0);
    }

    #[test]
    fn no_overflow_at_huge_intensity() {
        let q = p(1e6, 0.3, 0.1);
        for x in [1e-12, 0.1, 0.29, 0.31, 0.9, 1.0 - 1e-12] {
            let y = step_x(&q, x);
            assert!((0.0..=1.0).contains(&y), "x={x} -> {y}");
        }
    }

    #[test]
    fn derivative_closed_cases() {
        assert_eq!(deriv_x(&p(4.0, 0.5, 0.0), 0.5).unwrap(), 0.0);
        assert_eq!(deriv_x(&p(8.0, 0.5, 1.0), 0.5).unwrap(), -2.0);
    }

    #[test]
    fn derivative_undefined_at_repelling_boundary() {
        let q = p(10.0, 0.4, 0.25);
        assert!(matches!(deriv_x(&q, 0.0), Err(Error::Domain(_))));
        assert!(matches!(deriv_x(&q, 1.0), Err(Error::Domain(_))));
        assert!(deriv_x(&p(10.0, 0.4, 1.0), 0.0).is_ok());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let q = p(10.0, 0.4, 0.25);
        let h = 1e-6;
        let fd = (step_x(&q, 0.3 + h) - step_x(&q, 0.3 - h)) / (2.0 * h);
        assert_relative_eq!(deriv_x(&q, 0.3).unwrap(), fd, max_relative = 1e-5);
    }

    #[test]
    fn critical_points() {
        assert!(critical_points_x(&p(4.0, 0.3, 0.0)).is_none());
        let (l, r) = critical_points_x(&p(8.0, 0.3, 0.0)).unwrap();
        assert_relative_eq!(l, (1.0 - 0.5f64.sqrt()) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(r, (1.0 + 0.5f64.sqrt()) / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn critical_points_by_sign_scan() {
        let q = p(16.0, 0.3, 0.5);
        let (l, r) = critical_points_x(&q).unwrap();
        // Independent locate: scan deriv_x for sign changes, then bisect.
        let mut roots = Vec::new();
        let n = 10_000;
        let d = |x: f64| deriv_x(&q, x).unwrap();
        for i in 1..n - 1 {
            let (x0, x1) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
            if d(x0).signum() != d(x1).signum() {
                let (mut lo, mut hi) = (x0, x1);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if d(mid).signum() == d(lo).signum() {
                        lo = mid
                    } else {
                        hi = mid
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - l).abs() < 1e-12 && (roots[1] - r).abs() < 1e-12);
        assert!(d(l).abs() < 1e-9 && d(r).abs() < 1e-9);
    }

    #[test]
    fn conjugate_basics() {
        let q = p(10.0, 0.4, 0.3);
        assert_eq!(to_conjugate(&q, 0.5).unwrap(), 0.0);
        assert_eq!(from_conjugate(&q, 0.0), 0.5);
        assert!(to_conjugate(&q, 0.0).is_err());
        assert!(to_conjugate(&q, 1.0).is_err());
        assert_eq!(step_y(&p(3.0, 0.5, 1.0), 0.0), 0.0);
    }

    #[test]
    fn conjugacy_identity_at_anchor_point() {
        let q = p(35.0, 0.4, 0.5);
        let lhs = to_conjugate(&q, step_x(&q, 0.2)).unwrap();
        let rhs = step_y(&q, to_conjugate(&q, 0.2).unwrap());
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn conjugate_round_trip() {
        let q = p(35.0, 0.4, 0.5);
        for x in [1e-12, 1e-6, 0.2, 0.5, 0.7, 1.0 - 1e-6, 1.0 - 1e-12] {
            let back = from_conjugate(&q, to_conjugate(&q, x).unwrap());
            assert_relative_eq!(back, x, max_relative = 1e-12);
        }
    }

    #[test]
    fn conjugate_derivatives_match_finite_differences() {
        let q = p(20.0, 0.4, 0.25);
        let y = 0.3;
        let h = 1e-5;
        let f = |y: f64| step_y(&q, y);
        let d1 = |y: f64| derivs_y(&q, y).0;
        let d2 = |y: f64| derivs_y(&q, y).1;
        let (g1, g2, g3) = derivs_y(&q, y);
        assert_relative_eq!(g1, (f(y + h) - f(y - h)) / (2.0 * h), max_relative = 1e-6);
        assert_relative_eq!(g2, (d1(y + h) - d1(y - h)) / (2.0 * h), max_relative = 1e-6);
        assert_relative_eq!(g3, (d2(y + h) - d2(y - h)) / (2.0 * h), max_relative = 1e-6);
        let fd2 = (f(y + h) - 2.0 * f(y) + f(y - h)) / (h * h);
        assert_relative_eq!(g2, fd2, max_relative = 1e-3);
    }

    #[test]
    fn schwarzian_negative_on_sample_points() {
        let q = p(20.0, 0.4, 0.25);
        for y in [-1.0, -0.1, 0.0, 0.1, 1.0] {
            assert!(schwarzian_y(&q, y) < 0.0, "y={y}");
        }
    }

    #[test]
    fn schwarzian_matches_definition() {
        let q = p(20.0, 0.4, 0.25);
        for y in [-0.2, -0.05, 0.07, 0.15] {
            let (d1, d2, d3) = derivs_y(&q, y);
            let direct = d3 / d1 - 1.5 * (d2 / d1).powi(2);
            assert_relative_eq!(schwarzian_y(&q, y), direct, max_relative = 1e-9);
        }
        assert_eq!(schwarzian_y(&p(6.0, 0.3, 1.0), 0.2), -18.0);
    }

    #[test]
    fn potential_shape() {
        let sym = p(35.0, 0.5, 0.0);
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert_relative_eq!(
                potential(&sym, x),
                potential(&sym, 1.0 - x),
                max_relative = 1e-14
            );
        }
        let q = p(35.0, 0.4, 0.0);
        let n = 1_000_000;
        let argmin = (0..=n)
            .map(|i| i as f64 / n as f64)
            .min_by(|u, v| potential(&q, *u).total_cmp(&potential(&q, *v)))
            .unwrap();
        assert!((argmin - 0.4).abs() <= 1e-6);
        // The slope changes sign exactly once, at b.
        let h = 1e-7;
        let slope = |x: f64| (potential(&q, x + h) - potential(&q, x - h)) / (2.0 * h);
        let changes: Vec<f64> = (1..1000)
            .map(|i| i as f64 / 1000.0)
            .collect::<Vec<_>>()
            .windows(2)
            .filter(|w| slope(w[0]).signum() != slope(w[1]).signum())
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect();
        assert_eq!(changes.len(), 1);
        assert!((changes[0] - 0.4).abs() <= 1e-3, "{changes:?}");
    }

    #[test]
    fn mwu_config_validation_and_derivation() {
        assert!(MwuConfig::new(35.0, 0.5, 0.7, 0.4, 0.0).is_err());
        assert!(MwuConfig::new(35.0, 1.0, 0.6, 0.4, 0.0).is_err());
        let cfg = MwuConfig::new(35.0, 1.0 - (-1.0f64).exp(), 0.6, 0.4, 0.0).unwrap();
        let q = cfg.params().unwrap();
        assert_relative_eq!(q.a(), 35.0, max_relative = 1e-14);
        assert_eq!(q.b(), 0.4);
        assert!(cfg.cost1(0.3) >= 0.0 && cfg.cost2(0.3) >= 0.0);
    }

    #[test]
    fn mwu_single_step_from_uniform_weights() {
        let cfg = MwuConfig::new(7.0, 0.3, 0.55, 0.45, 0.3).unwrap();
        let q = cfg.params().unwrap();
        let w = WeightPair::uniform();
        let (_, x1) = mwu_step(&cfg, &w, w.mixture());
        assert_relative_eq!(x1, step_x(&q, 0.5), max_relative = 1e-12);
    }

    #[test]
    fn mwu_logit_limit_forgets_history() {
        // σ = 1: next split depends only on the last costs.
        let cfg = MwuConfig::new(10.0, 0.2, 0.3, 0.7, 1.0).unwrap();
        let q = cfg.params().unwrap();
        for w in [WeightPair::uniform(), WeightPair::from_weights(1e-30, 5.0)] {
            let (_, x1) = mwu_step(&cfg, &w, 0.35);
            assert_relative_eq!(x1, step_x(&q, 0.35), max_relative = 1e-12);
        }
    }

    #[test]
    fn mwu_tracks_map_twenty_steps() {
        let cfg = MwuConfig::new(10.0 / 0.5f64.ln().abs(), 0.5, 0.6, 0.4, 0.25).unwrap();
        let q = cfg.params().unwrap();
        assert_relative_eq!(q.a(), 10.0, max_relative = 1e-14);
        let (mut x, mut w) = (0.3, WeightPair::from_mixture(0.3));
        let mut xw = 0.3;
        for _ in 0..20 {
            x = step_x(&q, x);
            let (nw, nx) = mwu_step(&cfg, &w, xw);
            w = nw;
            xw = nx;
        }
        assert_relative_eq!(x, xw, max_relative = 1e-12);
    }
}
