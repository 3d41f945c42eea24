use serde::{Deserialize, Serialize};

use super::{check_seed, Orbit};
use crate::dynamics::{deriv_x, derivs_y, from_conjugate, step_x, step_y, to_conjugate};
use crate::{Error, Params, Result};

/// Residual `|f^T(x) - x|` a refined cycle must reach.
const CYCLE_RESIDUAL: f64 = 1e-12;
/// Closeness under which a proper divisor of `T` is taken as the true period.
const DIVISOR_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitClass {
    Attracting,
    Repelling,
    Neutral,
    Undetected,
}

impl OrbitClass {
    pub fn from_multiplier(m: f64) -> Self {
        if m.abs() < 1.0 {
            OrbitClass::Attracting
        } else if m.abs() > 1.0 {
            OrbitClass::Repelling
        } else {
            OrbitClass::Neutral
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub period: Option<usize>,
    /// The cycle, starting from the point the search settled on.
    pub orbit: Vec<f64>,
    /// Product of `f'` along the cycle.
    pub multiplier: Option<f64>,
    pub class: OrbitClass,
}

impl PeriodReport {
    fn undetected() -> Self {
        PeriodReport {
            period: None,
            orbit: Vec::new(),
            multiplier: None,
            class: OrbitClass::Undetected,
        }
    }

    fn from_cycle(p: &Params, orbit: Vec<f64>) -> Result<Self> {
        let multiplier = cycle_multiplier(p, &orbit)?;
        Ok(PeriodReport {
            period: Some(orbit.len()),
            orbit,
            multiplier: Some(multiplier),
            class: OrbitClass::from_multiplier(multiplier),
        })
    }
}

/// Settings for the diagram-style period search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodOptions {
    /// Initial conditions tried in order; the first that resolves a period wins.
    pub seeds: Vec<f64>,
    pub transient: usize,
    pub max_period: usize,
    pub tol: f64,
}

impl Default for PeriodOptions {
    fn default() -> Self {
        PeriodOptions {
            seeds: vec![0.2],
            transient: 20_000,
            max_period: 8,
            tol: 1e-13,
        }
    }
}

impl PeriodOptions {
    /// Tolerance `1e-16`; only succeeds on machine-identical cycles.
    pub fn strict(mut self) -> Self {
        self.tol = 1e-16;
        self
    }

    /// Also try seeds off the symmetric axis, in case `0.2` lands on a
    /// preimage of the repelling equilibrium.
    pub fn multi_seed(mut self) -> Self {
        self.seeds = vec![0.2, 0.5 - 1e-3, 0.8];
        self
    }
}

pub fn cycle_multiplier(p: &Params, orbit: &[f64]) -> Result<f64> {
    orbit
        .iter()
        .try_fold(1.0, |acc, &x| Ok(acc * deriv_x(p, x)?))
}

/// Discard a transient, then report the smallest `n <= max_period` with
/// `|f^n(x) - x| < tol`, refining the cycle by Newton's method.
pub fn detect_period(p: &Params, opts: &PeriodOptions) -> Result<PeriodReport> {
    if opts.max_period == 0 {
        return Err(Error::invalid("max_period", 0.0, "must be >= 1"));
    }
    for &seed in &opts.seeds {
        check_seed(seed)?;
        let mut orbit = Orbit::new(*p, seed);
        let start = orbit.advance(opts.transient);
        let mut points = vec![start];
        let mut found = None;
        for n in 1..=opts.max_period {
            let x = orbit.next().unwrap_or(start);
            if (x - start).abs() < opts.tol {
                found = Some(n);
                break;
            }
            points.push(x);
        }
        let Some(n) = found else { continue };
        points.truncate(n);
        if let Ok(refined) = find_periodic_orbit(p, n, start) {
            if refined.period == Some(n) && (refined.orbit[0] - start).abs() < 1e-9 {
                return Ok(refined);
            }
        }
        return PeriodReport::from_cycle(p, points);
    }
    Ok(PeriodReport::undetected())
}

/// `F^T(y)` together with the chain-rule derivative `∏ F'(y_k)`.
fn compose_y(p: &Params, y: f64, period: usize) -> (f64, f64) {
    let mut y = y;
    let mut slope = 1.0;
    for _ in 0..period {
        slope *= derivs_y(p, y).0;
        y = step_y(p, y);
    }
    (y, slope)
}

fn residual_x(p: &Params, x: f64, period: usize) -> f64 {
    let mut z = x;
    for _ in 0..period {
        z = step_x(p, z);
    }
    (z - x).abs()
}

/// Newton's method on `f^T(x) - x`, run in the conjugate coordinate where the
/// map has no boundary singularities.
pub fn find_periodic_orbit(p: &Params, period: usize, seed: f64) -> Result<PeriodReport> {
    if period == 0 {
        return Err(Error::invalid("period", 0.0, "must be >= 1"));
    }
    check_seed(seed)?;
    let mut y = to_conjugate(p, seed)?;
    let mut x = seed;
    let mut residual = residual_x(p, x, period);
    let mut iterations = 0;
    while residual >= CYCLE_RESIDUAL {
        if iterations == NEWTON_MAX_ITER {
            return Err(Error::NonConvergence {
                iterations,
                residual,
            });
        }
        iterations += 1;
        let (fy, slope) = compose_y(p, y, period);
        let g = fy - y;
        let dg = slope - 1.0;
        if dg == 0.0 || !dg.is_finite() {
            return Err(Error::NonConvergence {
                iterations,
                residual,
            });
        }
        let full = g / dg;
        // Backtrack until the conjugate residual shrinks.
        let mut step = full;
        let mut next = y - step;
        for _ in 0..40 {
            if (compose_y(p, next, period).0 - next).abs() < g.abs() {
                break;
            }
            step *= 0.5;
            next = y - step;
        }
        if next == y {
            return Err(Error::NonConvergence {
                iterations,
                residual,
            });
        }
        y = next;
        x = from_conjugate(p, y);
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::NonConvergence {
                iterations,
                residual,
            });
        }
        residual = residual_x(p, x, period);
    }

    let true_period = (1..=period)
        .find(|d| period.is_multiple_of(*d) && residual_x(p, x, *d) < DIVISOR_TOL)
        .unwrap_or(period);
    let mut orbit = Vec::with_capacity(true_period);
    let mut z = x;
    for _ in 0..true_period {
        orbit.push(z);
        z = step_x(p, z);
    }
    PeriodReport::from_cycle(p, orbit)
}
