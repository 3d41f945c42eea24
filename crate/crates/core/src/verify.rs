//! The acceptance checks, runnable from tests and from the `verify` command.
//!
//! Each check draws its random samples from a ChaCha stream seeded by
//! [`VerifyOptions::seed`], so a run is reproducible.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{mwu_step, step_x, step_y, to_conjugate, MwuConfig, WeightPair};
use crate::equilibrium::solve_fixed_point;
use crate::orbits::{
    certify_chaos, detect_period, iterate, lower_line, trap_centers, upper_line,
    verify_period2_trap, PeriodOptions, GOLDEN_ENTROPY,
};
use crate::stability::{boundary_point, flip_onset, regime_interval, threshold_a0};
use crate::sweep::{period_diagram, PeriodCell, PeriodDiagramSpec};
use crate::{Params, Result};

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Worker count for the "max workers" side of the determinism check.
    pub threads: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 20_190_401,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "equilibrium"),
    (2, "nash-recovery"),
    (3, "thresholds"),
    (4, "sigma-monotonicity"),
    (5, "conjugacy-symmetry"),
    (6, "anchored-periods"),
    (7, "trap"),
    (8, "chaos-certificate"),
    (9, "basin"),
    (10, "diagram-frontier"),
    (11, "parallel-determinism"),
    (12, "mwu-equivalence"),
];

type Check = fn(&VerifyOptions, &mut ChaCha8Rng) -> Result<(bool, String)>;

fn check_for(id: u8) -> Option<(Check, Option<Duration>)> {
    let secs = |s: u64| Some(Duration::from_secs(s));
    Some(match id {
        1 => (equilibrium as Check, secs(1)),
        2 => (nash_recovery, None),
        3 => (thresholds, secs(1)),
        4 => (sigma_monotonicity, None),
        5 => (conjugacy_symmetry, None),
        6 => (anchored_periods, secs(1)),
        7 => (trap, None),
        8 => (chaos_certificate, secs(5)),
        9 => (basin, None),
        10 => (diagram_frontier, secs(300)),
        11 => (parallel_determinism, None),
        12 => (mwu_equivalence, None),
        _ => return None,
    })
}

/// Run one criterion by number. Unknown ids yield `None`.
pub fn run_criterion(id: u8, opts: &VerifyOptions) -> Option<Outcome> {
    let (check, limit) = check_for(id)?;
    let name = CRITERIA[id as usize - 1].1;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(id as u64));
    let start = Instant::now();
    let result = check(opts, &mut rng);
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!("; exceeded {}s budget", limit.as_secs()));
        }
    }
    Some(Outcome {
        id,
        name,
        passed,
        detail,
        seconds: elapsed.as_secs_f64(),
    })
}

pub fn run_all(opts: &VerifyOptions) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .filter_map(|&(id, _)| run_criterion(id, opts))
        .collect()
}

fn equilibrium(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut outside = 0;
    for _ in 0..1000 {
        let b = rng.gen_range(0.01..=0.99);
        let p = Params::new(rng.gen_range(0.1..=500.0), b, rng.gen_range(0.0..=1.0))?;
        let e = solve_fixed_point(&p);
        worst = worst.max(e.residual);
        if !(b.min(0.5) <= e.xbar && e.xbar <= b.max(0.5)) {
            outside += 1;
        }
    }
    Ok((
        worst < 1e-12 && outside == 0,
        format!("max |f(x)-x| = {worst:.3e}, {outside} of 1000 outside [min(b,1/2), max(b,1/2)]"),
    ))
}

fn nash_recovery(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let b = rng.gen_range(0.01..=0.99);
        let p = Params::new(rng.gen_range(0.1..=500.0), b, 0.0)?;
        worst = worst.max((solve_fixed_point(&p).xbar - b).abs());
    }
    Ok((
        worst <= 1e-12,
        format!("max |x - b| = {worst:.3e} over 100 games"),
    ))
}

fn thresholds(_: &VerifyOptions, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = (threshold_a0(0.4, 0.0)? - 2.0 / (0.4 * 0.6)).abs();
    for sigma in [0.0, 0.25, 0.5, 0.75] {
        worst = worst.max((threshold_a0(0.5, sigma)? - 4.0 * (2.0 - sigma)).abs());
    }
    Ok((
        worst <= 1e-9,
        format!("max deviation from closed forms = {worst:.3e}"),
    ))
}

fn sigma_monotonicity(_: &VerifyOptions, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    for b in [0.3, 0.4, 0.5] {
        let a0: Vec<f64> = (0..10)
            .map(|k| threshold_a0(b, k as f64 / 9.0))
            .collect::<Result<_>>()?;
        if a0.windows(2).any(|w| w[1] >= w[0]) {
            failures.push(b);
        }
    }
    Ok((
        failures.is_empty(),
        format!("a0 strictly decreasing on sigma = k/9, k = 0..9; failing b: {failures:?}"),
    ))
}

fn conjugacy_symmetry(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    // The conjugate coordinate of f(x) is only as accurate as the double f(x)
    // itself, so conjugacy is sampled where f(x) stays clear of 0 and 1.
    let mut conj = 0.0f64;
    for _ in 0..1000 {
        let p = Params::new(
            rng.gen_range(0.1..=10.0),
            rng.gen_range(0.01..=0.99),
            rng.gen_range(0.0..=1.0),
        )?;
        let x = rng.gen_range(0.01..=0.99);
        let lhs = to_conjugate(&p, step_x(&p, x))?;
        let rhs = step_y(&p, to_conjugate(&p, x)?);
        conj = conj.max((lhs - rhs).abs());
    }
    let mut sym = 0.0f64;
    for _ in 0..1000 {
        let (a, b, s) = (
            rng.gen_range(0.1..=500.0),
            rng.gen_range(0.01..=0.99),
            rng.gen_range(0.0..=1.0),
        );
        let x = rng.gen_range(0.0..=1.0);
        let p = Params::new(a, b, s)?;
        let m = Params::new(a, 1.0 - b, s)?;
        sym = sym.max((step_x(&m, 1.0 - x) - (1.0 - step_x(&p, x))).abs());
    }
    Ok((
        conj < 1e-9 && sym < 1e-12,
        format!("max conjugacy error {conj:.3e}, max mirror error {sym:.3e}"),
    ))
}

fn anchored_periods(_: &VerifyOptions, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let opts = PeriodOptions::default();
    let two = detect_period(&Params::new(35.0, 0.4, 0.5)?, &opts)?.period;
    let none = detect_period(&Params::new(35.0, 0.4, 0.0)?, &opts)?.period;
    Ok((
        two == Some(2) && none.is_none(),
        format!("(35, 0.4, 0.5) -> {two:?}, (35, 0.4, 0) -> {none:?}"),
    ))
}

/// Random `(σ, b)` in the middle 40% of the period-2 band, σ in [0.1, 0.9].
///
/// Towards the band edges the trap half-width shrinks to zero and the
/// intensity needed for the inclusions grows without bound, far beyond 10·a₀.
fn central_period2_game(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let sigma = rng.gen_range(0.1..=0.9);
    let (lo, hi) = regime_interval(sigma);
    let t = rng.gen_range(0.3..=0.7);
    (sigma, lo + t * (hi - lo))
}

fn trap(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let holds = |p: &Params| -> Result<bool> {
        let t = verify_period2_trap(p)?;
        Ok(t.inclusions_hold && t.derivative_bound_holds)
    };
    let anchor = holds(&Params::new(200.0, 0.45, 0.5)?)?;
    let mut random_failures = 0;
    for _ in 0..20 {
        let (sigma, b) = central_period2_game(rng);
        let p = Params::new(10.0 * threshold_a0(b, sigma)?, b, sigma)?;
        if !holds(&p)? {
            random_failures += 1;
        }
    }
    let mut identity = 0.0f64;
    for _ in 0..1000 {
        let (b, sigma) = (rng.gen_range(0.01..=0.99), rng.gen_range(0.01..=0.99));
        let p = Params::new(1.0, b, sigma)?;
        let (xm, xp) = trap_centers(b, sigma);
        identity = identity
            .max((upper_line(&p, xm) - xp).abs())
            .max((lower_line(&p, xp) - xm).abs());
    }
    Ok((
        anchor && random_failures == 0 && identity < 1e-12,
        format!(
            "(200, 0.45, 0.5) {}, {random_failures} of 20 random games at 10*a0 fail, max identity residual {identity:.3e}",
            if anchor { "holds" } else { "fails" }
        ),
    ))
}

fn chaos_certificate(_: &VerifyOptions, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for b in [0.2, 0.8] {
        let c = certify_chaos(&Params::new(200.0, b, 0.5)?)?;
        let entropy_ok = c
            .entropy_lower_bound
            .is_some_and(|h| (h - GOLDEN_ENTROPY).abs() < 1e-12);
        ok &= c.period3_found && entropy_ok;
        notes.push(format!(
            "b={b}: period 3 {}, entropy {:?}",
            c.period3_found, c.entropy_lower_bound
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn basin(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let p = Params::new(100.0, 0.4, 0.5)?;
    let mut cycles = Vec::with_capacity(100);
    for _ in 0..100 {
        let x0 = rng.gen_range(1e-6..=1.0 - 1e-6);
        let s = iterate(&p, x0, 100_000, 3)?.samples;
        let closed = (s[2] - s[0]).abs() < 1e-9;
        cycles.push((s[0].min(s[1]), s[0].max(s[1]), closed));
    }
    let (lo, hi, _) = cycles[0];
    let spread = cycles
        .iter()
        .map(|c| (c.0 - lo).abs().max((c.1 - hi).abs()))
        .fold(0.0, f64::max);
    let open = cycles.iter().filter(|c| !c.2).count();
    let proper = hi - lo > 1e-6;
    Ok((
        spread < 1e-9 && open == 0 && proper,
        format!("cycle ({lo:.6e}, {hi:.15}), spread {spread:.3e}, {open} seeds not yet periodic"),
    ))
}

/// Whether `(a, b)` lies outside the band `b₁(a) <= b <= b₂(a)`, i.e. in the
/// fixed point's stability region.
fn analytically_stable(sigma: f64, a: f64, b: f64) -> Result<bool> {
    if a < flip_onset(sigma) {
        return Ok(true);
    }
    let bp = boundary_point(sigma, a)?;
    Ok(b < bp.b1 || b > bp.b2)
}

fn diagram_frontier(opts: &VerifyOptions, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let sigma = 0.25;
    let spec = PeriodDiagramSpec {
        sigma,
        a_steps: 100,
        b_steps: 100,
        ..Default::default()
    };
    let grid = period_diagram(&spec, opts.threads)?;
    let (na, nb) = (spec.a_steps, spec.b_steps);
    let mut analytic = vec![false; na * nb];
    for (k, cell) in grid.cells.iter().enumerate() {
        analytic[k] = analytically_stable(sigma, cell.coords[0], cell.coords[1])?;
    }
    let near_curve = |i: usize, j: usize| {
        let here = analytic[i * nb + j];
        (i.saturating_sub(1)..=(i + 1).min(na - 1)).any(|u| {
            (j.saturating_sub(1)..=(j + 1).min(nb - 1)).any(|v| analytic[u * nb + v] != here)
        })
    };
    let mut disagreements = 0;
    let mut far = Vec::new();
    for i in 0..na {
        for j in 0..nb {
            let numeric = grid.cells[i * nb + j].payload == PeriodCell::Period(1);
            if numeric != analytic[i * nb + j] {
                disagreements += 1;
                if !near_curve(i, j) {
                    far.push((
                        grid.cells[i * nb + j].coords[0],
                        grid.cells[i * nb + j].coords[1],
                    ));
                }
            }
        }
    }
    let stable = analytic.iter().filter(|s| **s).count();
    Ok((
        far.is_empty(),
        format!(
            "{stable} analytically stable cells, {disagreements} disagreements, {} more than one cell from the curves{}",
            far.len(),
            far.first().map(|c| format!(" (first at a={}, b={})", c.0, c.1)).unwrap_or_default()
        ),
    ))
}

fn parallel_determinism(opts: &VerifyOptions, _: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let max = opts.threads.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map_or(1, |n| n.get())
            .max(4)
    });
    let spec = PeriodDiagramSpec {
        a_steps: 40,
        b_steps: 40,
        ..Default::default()
    };
    let serial = period_diagram(&spec, Some(1))?;
    let parallel = period_diagram(&spec, Some(max))?;
    let same = serial.cells.len() == parallel.cells.len()
        && serial.cells.iter().zip(&parallel.cells).all(|(s, p)| {
            s.payload == p.payload
                && s.coords
                    .iter()
                    .zip(&p.coords)
                    .all(|(u, v)| u.to_bits() == v.to_bits())
        });
    Ok((
        same,
        format!(
            "40x40 diagram, 1 vs {max} workers: {}",
            if same { "identical" } else { "differ" }
        ),
    ))
}

/// Learning rates up to 0.5 and at most 20 agents keep `a <= 14`, below the
/// chaotic band: there, two algebraically equal formulas lose all agreement
/// within 100 steps through rounding alone.
fn mwu_equivalence(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let beta = rng.gen_range(0.05..=0.95);
        let cfg = MwuConfig::new(
            rng.gen_range(1.0..=20.0),
            rng.gen_range(0.01..=0.5),
            1.0 - beta,
            beta,
            rng.gen_range(0.0..=1.0),
        )?;
        let p = cfg.params()?;
        let x0 = rng.gen_range(0.01..=0.99);
        let mut w = WeightPair::from_mixture(x0);
        let (mut xw, mut xm) = (w.mixture(), x0);
        for _ in 0..100 {
            (w, xw) = mwu_step(&cfg, &w, xw);
            xm = step_x(&p, xm);
            worst = worst.max((xw - xm).abs() / xm.abs().max(f64::MIN_POSITIVE));
        }
    }
    Ok((
        worst < 1e-9,
        format!("max relative deviation {worst:.3e} over 50 configurations x 100 steps"),
    ))
}
