//! Data-parallel parameter sweeps behind the diagram outputs.
//!
//! Every cell is an independent task. Results are collected in cell-index
//! order, so a sweep produces the same grid whatever the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{potential, step_x};
use crate::orbits::{check_seed, detect_period, iterate, PeriodOptions};
use crate::stability::{regime, RegimeLabel};
use crate::{Error, Params, Result};

/// How the `steps` sample points are placed on `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// Both endpoints included, evenly spaced.
    Endpoints,
    /// Midpoints of `steps` equal cells, as for image pixels.
    Centers,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub sampling: Sampling,
}

impl Axis {
    pub fn new(name: &str, min: f64, max: f64, steps: usize, sampling: Sampling) -> Result<Self> {
        if steps == 0 {
            return Err(Error::invalid("steps", 0.0, "axis needs at least one step"));
        }
        if !(min.is_finite() && max.is_finite() && min <= max) {
            return Err(Error::invalid(
                "min",
                min,
                "axis range must be finite with min <= max",
            ));
        }
        Ok(Axis {
            name: name.to_string(),
            min,
            max,
            steps,
            sampling,
        })
    }

    pub fn value(&self, i: usize) -> f64 {
        let span = self.max - self.min;
        match self.sampling {
            Sampling::Endpoints if self.steps == 1 => self.min,
            Sampling::Endpoints => self.min + span * i as f64 / (self.steps - 1) as f64,
            Sampling::Centers => self.min + span * (i as f64 + 0.5) / self.steps as f64,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

/// Settings shared by every cell of a sweep, echoed into output headers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub sigma: Option<f64>,
    pub b: Option<f64>,
    pub x0: Option<f64>,
    pub transient: Option<usize>,
    pub tol: Option<f64>,
    pub max_period: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell<T> {
    /// One value per axis, in axis order.
    pub coords: Vec<f64>,
    pub payload: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramGrid<T> {
    pub axes: Vec<Axis>,
    pub meta: SweepMeta,
    /// Row-major: the first axis varies slowest.
    pub cells: Vec<Cell<T>>,
}

impl<T> DiagramGrid<T> {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

fn coords_of(axes: &[Axis], mut index: usize) -> Vec<f64> {
    let mut coords = vec![0.0; axes.len()];
    for (k, axis) in axes.iter().enumerate().rev() {
        coords[k] = axis.value(index % axis.steps);
        index /= axis.steps;
    }
    coords
}

/// Evaluate `cell` over every grid point on a pool of `threads` workers
/// (`None` for the machine default).
fn run_grid<T, F>(
    axes: Vec<Axis>,
    meta: SweepMeta,
    threads: Option<usize>,
    cell: F,
) -> Result<DiagramGrid<T>>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync,
{
    let total: usize = axes.iter().map(|a| a.steps).product();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    let cells = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|i| {
                let coords = coords_of(&axes, i);
                let payload = cell(&coords);
                Cell { coords, payload }
            })
            .collect()
    });
    Ok(DiagramGrid { axes, meta, cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationSpec {
    pub b: f64,
    pub sigma: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub a_steps: usize,
    pub samples_per_a: usize,
    pub x0: f64,
    pub transient: usize,
}

impl Default for BifurcationSpec {
    fn default() -> Self {
        BifurcationSpec {
            b: 0.4,
            sigma: 0.0,
            a_min: 1.0,
            a_max: 60.0,
            a_steps: 500,
            samples_per_a: 100,
            x0: 0.2,
            transient: 20_000,
        }
    }
}

/// Post-transient states for each intensity on an evenly spaced `a` axis.
pub fn bifurcation_diagram(
    spec: &BifurcationSpec,
    threads: Option<usize>,
) -> Result<DiagramGrid<Vec<f64>>> {
    if !(spec.a_min > 0.0 && spec.a_min < spec.a_max) {
        return Err(Error::invalid(
            "a_min",
            spec.a_min,
            "need 0 < a_min < a_max",
        ));
    }
    Params::new(spec.a_min, spec.b, spec.sigma)?;
    check_seed(spec.x0)?;
    let axis = Axis::new(
        "a",
        spec.a_min,
        spec.a_max,
        spec.a_steps,
        Sampling::Endpoints,
    )?;
    let meta = SweepMeta {
        sigma: Some(spec.sigma),
        b: Some(spec.b),
        x0: Some(spec.x0),
        transient: Some(spec.transient),
        ..Default::default()
    };
    run_grid(vec![axis], meta, threads, |c| {
        // Parameters were validated above and every a on the axis is positive.
        let p = Params::new(c[0], spec.b, spec.sigma).expect("validated parameters");
        iterate(&p, spec.x0, spec.transient, spec.samples_per_a)
            .map(|t| t.samples)
            .unwrap_or_default()
    })
}

/// Outcome of one period-diagram cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodCell {
    Period(usize),
    /// No period up to the maximum was found.
    Undetected,
    /// Cell parameters outside the admissible range (`b` not in (0, 1)).
    Invalid,
}

impl PeriodCell {
    /// Integer legend used in files: `1..=max_period`, `0` for none, `-1` for invalid.
    pub fn code(&self) -> i64 {
        match self {
            PeriodCell::Period(n) => *n as i64,
            PeriodCell::Undetected => 0,
            PeriodCell::Invalid => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodDiagramSpec {
    pub sigma: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub a_steps: usize,
    pub b_steps: usize,
    pub options: PeriodOptions,
}

impl Default for PeriodDiagramSpec {
    fn default() -> Self {
        PeriodDiagramSpec {
            sigma: 0.25,
            a_min: 4.0,
            a_max: 54.0,
            b_min: 0.0,
            b_max: 1.0,
            a_steps: 200,
            b_steps: 200,
            options: PeriodOptions::default(),
        }
    }
}

/// Attracting-period classification over a cell-centred `(a, b)` grid.
pub fn period_diagram(
    spec: &PeriodDiagramSpec,
    threads: Option<usize>,
) -> Result<DiagramGrid<PeriodCell>> {
    if spec.a_steps < 2 || spec.b_steps < 2 {
        return Err(Error::invalid(
            "steps",
            spec.a_steps.min(spec.b_steps) as f64,
            "period diagrams need at least 2x2 cells",
        ));
    }
    if !(spec.a_min > 0.0) {
        return Err(Error::invalid("a_min", spec.a_min, "must be > 0"));
    }
    if !(0.0..=1.0).contains(&spec.sigma) {
        return Err(Error::invalid("sigma", spec.sigma, "must lie in [0, 1]"));
    }
    for &s in &spec.options.seeds {
        check_seed(s)?;
    }
    let axes = vec![
        Axis::new("a", spec.a_min, spec.a_max, spec.a_steps, Sampling::Centers)?,
        Axis::new("b", spec.b_min, spec.b_max, spec.b_steps, Sampling::Centers)?,
    ];
    let meta = SweepMeta {
        sigma: Some(spec.sigma),
        x0: spec.options.seeds.first().copied(),
        transient: Some(spec.options.transient),
        tol: Some(spec.options.tol),
        max_period: Some(spec.options.max_period),
        ..Default::default()
    };
    run_grid(axes, meta, threads, |c| {
        let Ok(p) = Params::new(c[0], c[1], spec.sigma) else {
            return PeriodCell::Invalid;
        };
        match detect_period(&p, &spec.options) {
            Ok(r) => r.period.map_or(PeriodCell::Undetected, PeriodCell::Period),
            Err(_) => PeriodCell::Invalid,
        }
    })
}

/// Analytic large-intensity regime over `σ ∈ [0, 1]` (endpoints included)
/// and cell-centred `b ∈ (0, 1)`.
pub fn regime_map(
    sigma_steps: usize,
    b_steps: usize,
    threads: Option<usize>,
) -> Result<DiagramGrid<RegimeLabel>> {
    if sigma_steps < 2 || b_steps < 2 {
        return Err(Error::invalid(
            "steps",
            sigma_steps.min(b_steps) as f64,
            "regime maps need at least 2x2 cells",
        ));
    }
    let axes = vec![
        Axis::new("sigma", 0.0, 1.0, sigma_steps, Sampling::Endpoints)?,
        Axis::new("b", 0.0, 1.0, b_steps, Sampling::Centers)?,
    ];
    run_grid(axes, SweepMeta::default(), threads, |c| {
        regime(c[1], c[0]).expect("grid stays inside the admissible range")
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub from: (f64, f64),
    pub to: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CobwebTrace {
    /// Alternating vertical `(x_n, x_n) -> (x_n, x_{n+1})` and horizontal
    /// `(x_n, x_{n+1}) -> (x_{n+1}, x_{n+1})` segments.
    pub segments: Vec<Segment>,
    /// `(x, Φ(x))` on an even 1000-point grid of `[0, 1]`.
    pub potential: Vec<(f64, f64)>,
}

pub const POTENTIAL_SAMPLES: usize = 1000;

pub fn potential_curve(p: &Params, samples: usize) -> Vec<(f64, f64)> {
    let axis = Axis {
        name: "x".into(),
        min: 0.0,
        max: 1.0,
        steps: samples.max(1),
        sampling: Sampling::Endpoints,
    };
    axis.values()
        .into_iter()
        .map(|x| (x, potential(p, x)))
        .collect()
}

pub fn cobweb_trace(p: &Params, x0: f64, steps: usize) -> Result<CobwebTrace> {
    check_seed(x0)?;
    let mut segments = Vec::with_capacity(2 * steps);
    let mut x = x0;
    for _ in 0..steps {
        let next = crate::dynamics::clamp_state(step_x(p, x)).0;
        segments.push(Segment {
            from: (x, x),
            to: (x, next),
        });
        segments.push(Segment {
            from: (x, next),
            to: (next, next),
        });
        x = next;
    }
    Ok(CobwebTrace {
        segments,
        potential: potential_curve(p, POTENTIAL_SAMPLES),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_sampling() {
        let e = Axis::new("a", 1.0, 3.0, 3, Sampling::Endpoints).unwrap();
        assert_eq!(e.values(), vec![1.0, 2.0, 3.0]);
        let c = Axis::new("b", 0.0, 1.0, 4, Sampling::Centers).unwrap();
        assert_eq!(c.values(), vec![0.125, 0.375, 0.625, 0.875]);
        assert!(Axis::new("b", 1.0, 0.0, 4, Sampling::Centers).is_err());
        assert!(Axis::new("b", 0.0, 1.0, 0, Sampling::Centers).is_err());
    }

    #[test]
    fn row_major_order() {
        let axes = vec![
            Axis::new("a", 0.0, 1.0, 2, Sampling::Endpoints).unwrap(),
            Axis::new("b", 0.0, 2.0, 3, Sampling::Endpoints).unwrap(),
        ];
        let g = run_grid(axes, SweepMeta::default(), Some(2), |c| c[0] * 10.0 + c[1]).unwrap();
        let payloads: Vec<f64> = g.cells.iter().map(|c| c.payload).collect();
        assert_eq!(payloads, vec![0.0, 1.0, 2.0, 10.0, 11.0, 12.0]);
    }

    #[test]
    fn bifurcation_low_a_collapses_to_nash() {
        let spec = BifurcationSpec {
            b: 0.4,
            sigma: 0.0,
            a_min: 1.0,
            a_max: 8.0,
            a_steps: 8,
            samples_per_a: 20,
            transient: 5_000,
            ..Default::default()
        };
        let g = bifurcation_diagram(&spec, Some(1)).unwrap();
        assert_eq!(g.len(), 8);
        for cell in &g.cells {
            assert!(
                cell.payload.iter().all(|x| (x - 0.4).abs() < 1e-6),
                "a={}",
                cell.coords[0]
            );
        }
    }

    #[test]
    fn period_diagram_edge_cells_invalid() {
        let spec = PeriodDiagramSpec {
            b_min: -0.5,
            b_max: 1.5,
            a_steps: 2,
            b_steps: 4,
            options: PeriodOptions {
                transient: 100,
                ..Default::default()
            },
            ..Default::default()
        };
        let g = period_diagram(&spec, Some(1)).unwrap();
        assert_eq!(g.cells[0].payload, PeriodCell::Invalid);
        assert_eq!(g.cells[3].payload, PeriodCell::Invalid);
        assert_eq!(PeriodCell::Invalid.code(), -1);
        assert_eq!(PeriodCell::Undetected.code(), 0);
    }

    #[test]
    fn regime_map_rows() {
        let g = regime_map(5, 11, Some(1)).unwrap();
        assert_eq!(g.len(), 55);
        let row0: Vec<_> = g.cells[..11].iter().map(|c| c.payload).collect();
        assert_eq!(row0[5], RegimeLabel::Boundary);
        assert!(row0
            .iter()
            .enumerate()
            .all(|(i, l)| i == 5 || *l == RegimeLabel::Chaos));
        assert!(g.cells[44..]
            .iter()
            .all(|c| c.payload == RegimeLabel::Period2));
        for s in 0..5 {
            for j in 0..11 {
                assert_eq!(
                    g.cells[s * 11 + j].payload,
                    g.cells[s * 11 + 10 - j].payload
                );
            }
        }
    }

    #[test]
    fn cobweb_contracts_to_fixed_point() {
        let p = Params::new(1.0, 0.5, 0.0).unwrap();
        let t = cobweb_trace(&p, 0.3, 80).unwrap();
        assert_eq!(t.segments.len(), 160);
        let last = t.segments.last().unwrap().to;
        assert!((last.0 - 0.5).abs() < 1e-6 && (last.1 - 0.5).abs() < 1e-6);
        for w in t.segments.windows(2) {
            assert_eq!(w[0].to, w[1].from);
        }
        assert_eq!(t.potential.len(), POTENTIAL_SAMPLES);
    }
}
