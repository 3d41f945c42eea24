//! Orbit iteration, period detection, cycle refinement, the period-2 trap
//! check, period-3 chaos certificates and Lyapunov estimates.

mod chaos;
mod period;
mod trap;

pub use chaos::{certify_chaos, ChaosCertificate, ChaosWitness, GOLDEN_ENTROPY};
pub use period::{detect_period, find_periodic_orbit, OrbitClass, PeriodOptions, PeriodReport};
pub use trap::{lower_line, trap_centers, upper_line, verify_period2_trap, TrapVerification};

use serde::{Deserialize, Serialize};

use crate::dynamics::{clamp_state, critical_points_x, deriv_x, step_x};
use crate::{Error, Params, Result};

/// Clamped orbit of the population map, yielding `x_1, x_2, ...`.
#[derive(Debug, Clone)]
pub struct Orbit {
    params: Params,
    x: f64,
    clamp_events: usize,
}

impl Orbit {
    pub fn new(params: Params, x0: f64) -> Self {
        Orbit {
            params,
            x: x0,
            clamp_events: 0,
        }
    }

    pub fn state(&self) -> f64 {
        self.x
    }

    pub fn clamp_events(&self) -> usize {
        self.clamp_events
    }

    /// Advance `n` steps without collecting.
    pub fn advance(&mut self, n: usize) -> f64 {
        for _ in 0..n {
            self.next();
        }
        self.x
    }
}

impl Iterator for Orbit {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let (x, clamped) = clamp_state(step_x(&self.params, self.x));
        self.clamp_events += clamped as usize;
        self.x = x;
        Some(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub params: Params,
    pub x0: f64,
    /// Number of discarded iterations; `samples[0]` is `x_transient`.
    pub transient: usize,
    pub samples: Vec<f64>,
    pub clamp_events: usize,
}

pub(crate) fn check_seed(x0: f64) -> Result<()> {
    if x0 > 0.0 && x0 < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("x0", x0, "must lie in (0, 1)"))
    }
}

pub fn iterate(p: &Params, x0: f64, transient: usize, samples: usize) -> Result<OrbitTrace> {
    check_seed(x0)?;
    let mut orbit = Orbit::new(*p, x0);
    let mut out = Vec::with_capacity(samples);
    if samples > 0 {
        out.push(orbit.advance(transient));
        out.extend(orbit.by_ref().take(samples - 1));
    } else {
        orbit.advance(transient);
    }
    Ok(OrbitTrace {
        params: *p,
        x0,
        transient,
        samples: out,
        clamp_events: orbit.clamp_events(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub exponent: f64,
    /// Terms floored at `ln(1e-14)` because the orbit sat on a critical point.
    pub floored_terms: usize,
}

const LYAPUNOV_FLOOR: f64 = 1e-14;

/// Mean of `ln|f'(x_k)|` over `n` post-transient steps.
pub fn lyapunov_estimate(
    p: &Params,
    x0: f64,
    transient: usize,
    n: usize,
) -> Result<LyapunovEstimate> {
    check_seed(x0)?;
    if n == 0 {
        return Err(Error::invalid("n", 0.0, "must be >= 1"));
    }
    let crit = critical_points_x(p);
    let mut orbit = Orbit::new(*p, x0);
    let mut x = orbit.advance(transient);
    let mut sum = 0.0;
    let mut floored_terms = 0;
    for _ in 0..n {
        let d = deriv_x(p, x)?.abs();
        let near_critical = crit
            .is_some_and(|(l, r)| (x - l).abs() < LYAPUNOV_FLOOR || (x - r).abs() < LYAPUNOV_FLOOR);
        if near_critical || d < LYAPUNOV_FLOOR {
            floored_terms += 1;
            sum += LYAPUNOV_FLOOR.ln();
        } else {
            sum += d.ln();
        }
        x = orbit.next().unwrap_or(x);
    }
    Ok(LyapunovEstimate {
        exponent: sum / n as f64,
        floored_terms,
    })
}

/// Smallest intensity on an ascending grid at which `passes` holds; grid
/// points where the check errors out count as failures.
///
/// The trap and chaos statements only assert that *some* threshold exists,
/// so this is what a numeric run can report in its place.
pub fn smallest_passing_a(
    b: f64,
    sigma: f64,
    a_grid: &[f64],
    passes: impl Fn(&Params) -> Result<bool>,
) -> Result<Option<f64>> {
    if a_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("a_grid must be strictly ascending".into()));
    }
    for &a in a_grid {
        let p = Params::new(a, b, sigma)?;
        if passes(&p).unwrap_or(false) {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

pub fn trap_passes(p: &Params) -> Result<bool> {
    let t = verify_period2_trap(p)?;
    Ok(t.inclusions_hold && t.derivative_bound_holds)
}

pub fn chaos_passes(p: &Params) -> Result<bool> {
    let c = certify_chaos(p)?;
    Ok(c.hypothesis_met && c.witness_passes && c.period3_found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64, s: f64) -> Params {
        Params::new(a, b, s).unwrap()
    }

    #[test]
    fn trace_layout() {
        let q = p(1.0, 0.5, 0.0);
        let t = iterate(&q, 0.3, 0, 50).unwrap();
        assert_eq!(t.samples.len(), 50);
        assert_eq!(t.samples[0], 0.3);
        // Monotone approach to the attracting midpoint.
        assert!(t.samples.windows(2).all(|w| w[1] > w[0] && w[1] <= 0.5));
        assert!((t.samples[49] - 0.5).abs() < 1e-6);
        let t2 = iterate(&q, 0.3, 10, 3).unwrap();
        assert_eq!(t2.samples[0], t.samples[10]);
        assert!(iterate(&q, 0.0, 0, 1).is_err());
        assert!(iterate(&q, 0.3, 5, 0).unwrap().samples.is_empty());
    }

    #[test]
    fn clamps_instead_of_freezing() {
        let q = p(2000.0, 0.9, 0.0);
        let t = iterate(&q, 0.999, 0, 200).unwrap();
        assert!(t.clamp_events > 0);
        assert!(t
            .samples
            .iter()
            .all(|&x| (1e-300..=1.0 - 1e-16).contains(&x)));
    }

    #[test]
    fn period_two_alternation() {
        let t = iterate(&p(35.0, 0.4, 0.5), 0.2, 20_000, 6).unwrap();
        let s = &t.samples;
        assert!((s[0] - s[2]).abs() < 1e-12 && (s[1] - s[3]).abs() < 1e-12);
        assert!((s[0] - s[1]).abs() > 1e-3);
    }

    #[test]
    fn lyapunov_signs() {
        let stable = lyapunov_estimate(&p(1.0, 0.5, 0.0), 0.3, 1000, 1000).unwrap();
        assert!(stable.exponent < 0.0);
        let cyc = p(35.0, 0.4, 0.5);
        let est = lyapunov_estimate(&cyc, 0.2, 20_000, 100_000).unwrap();
        let rep = find_periodic_orbit(&cyc, 2, iterate(&cyc, 0.2, 20_000, 1).unwrap().samples[0])
            .unwrap();
        let expected = rep.multiplier.unwrap().abs().ln() / 2.0;
        assert!(est.exponent < 0.0);
        assert!(
            (est.exponent - expected).abs() < 1e-8,
            "{} vs {expected}",
            est.exponent
        );
        assert_eq!(est.floored_terms, 0);
    }

    #[test]
    fn grid_thresholds() {
        let grid: Vec<f64> = (1..=40).map(|k| 10.0 * k as f64).collect();
        let trap = smallest_passing_a(0.45, 0.5, &grid, trap_passes)
            .unwrap()
            .unwrap();
        assert!(trap > 10.0 && trap <= 200.0);
        assert!(!trap_passes(&p(trap - 10.0, 0.45, 0.5)).unwrap());
        let chaos = smallest_passing_a(0.2, 0.5, &grid, chaos_passes).unwrap();
        assert!(chaos.is_some_and(|a| a <= 200.0));
        assert_eq!(
            smallest_passing_a(0.4, 0.5, &grid, chaos_passes).unwrap(),
            None
        );
        assert!(smallest_passing_a(0.4, 0.5, &[2.0, 1.0], trap_passes).is_err());
    }

    #[test]
    fn lyapunov_floor_on_critical_point() {
        // At a = 4 the symmetric fixed point 1/2 is also the (double) critical point.
        let crit = p(4.0, 0.5, 0.0);
        let est = lyapunov_estimate(&crit, 0.5, 0, 10).unwrap();
        assert_eq!(est.floored_terms, 10);
        assert!((est.exponent - 1e-14f64.ln()).abs() < 1e-12);
        assert!(lyapunov_estimate(&crit, 0.5, 0, 0).is_err());
    }
}
