use rayon::prelude::*;

use crate::dynamics::{DynamicalSystem, Point};
use crate::error::{Error, Result};
use crate::measures::{trace_checkpoints, Measure};
use crate::potentials::{growth_report, SubadditivePotential};

use super::attractor::AttractorSpec;
use super::classify::{classify_trace, milnor_fractions, BasinParams};
use super::grid::Grid;

/// Which basin a scan measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasinMode {
    /// `S_ε(μ)`: every limit point near `μ`.
    Strong,
    /// `A_ε(μ)`: some limit point near `μ`.
    Weak,
    /// `B(K)` at scale `ε`.
    Milnor,
}

impl BasinMode {
    pub fn name(self) -> &'static str {
        match self {
            BasinMode::Strong => "strong",
            BasinMode::Weak => "weak",
            BasinMode::Milnor => "milnor",
        }
    }
}

#[derive(Clone, Debug)]
pub enum BasinTarget {
    Measure(Measure),
    Attractor(AttractorSpec),
}

/// Target, mode, scale and classifier parameters for a basin scan.
#[derive(Clone, Debug)]
pub struct BasinQuery {
    pub target: BasinTarget,
    pub mode: BasinMode,
    pub epsilon: f64,
    pub params: BasinParams,
}

impl BasinQuery {
    fn validate(&self, system: &DynamicalSystem) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        let space = match (&self.target, self.mode) {
            (BasinTarget::Attractor(k), BasinMode::Milnor) => k.space(),
            (BasinTarget::Measure(mu), BasinMode::Strong | BasinMode::Weak) => mu.space(),
            (BasinTarget::Measure(_), BasinMode::Milnor) => {
                return Err(Error::InvalidArgument(
                    "milnor mode needs an attractor target".into(),
                ))
            }
            (BasinTarget::Attractor(_), _) => {
                return Err(Error::InvalidArgument(format!(
                    "{} mode needs a measure target",
                    self.mode.name()
                )))
            }
        };
        if space != system.space() {
            return Err(Error::SpaceMismatch {
                left: space.to_string(),
                right: system.space().to_string(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Indeterminate,
    Error,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Indeterminate => "indeterminate",
            Verdict::Error => "error",
        }
    }

    fn from_flag(flag: bool) -> Self {
        if flag {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

/// Per-cell numbers recorded next to the verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum CellData {
    /// Min/max dist* from the cluster representatives to the target.
    Distances { min: f64, max: f64, spread: f64 },
    /// Liminf proxy of the visit frequency.
    VisitFrequency(f64),
    /// Tail-window growth-rate estimates.
    Growth { largest: f64, smallest: f64 },
    /// Diagnostic of a failed cell.
    Failed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub center: Point,
    pub verdict: Verdict,
    pub data: CellData,
}

impl CellResult {
    fn failed(center: Point, e: Error) -> Self {
        CellResult {
            center,
            verdict: Verdict::Error,
            data: CellData::Failed(e.to_string()),
        }
    }
}

/// What the per-cell verdicts of a scan decide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanKind {
    /// Weak or strong basin membership of a measure.
    Basin,
    /// Visit frequency of a neighbourhood of a compact set.
    Milnor,
    /// Optimality from growth-rate estimates.
    Growth,
}

/// Verdicts over a grid and the resulting Lebesgue-fraction estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct BasinScanResult {
    pub kind: ScanKind,
    pub grid: String,
    pub resolution: usize,
    pub cells: Vec<CellResult>,
    /// Parameter echo, in a fixed order.
    pub params: Vec<(String, String)>,
}

impl BasinScanResult {
    pub fn count(&self, v: Verdict) -> usize {
        self.cells.iter().filter(|c| c.verdict == v).count()
    }

    pub fn errors(&self) -> usize {
        self.count(Verdict::Error)
    }

    pub fn indeterminate(&self) -> usize {
        self.count(Verdict::Indeterminate)
    }

    /// `true` cells over all non-error cells (indeterminate cells stay in
    /// the denominator).
    pub fn fraction(&self) -> f64 {
        let denom = self.cells.len() - self.errors();
        if denom == 0 {
            return 0.0;
        }
        self.count(Verdict::True) as f64 / denom as f64
    }

    /// Fraction of non-error cells whose smallest-rate estimate is negative.
    pub fn fraction_smallest_negative(&self) -> f64 {
        let denom = self.cells.len() - self.errors();
        if denom == 0 {
            return 0.0;
        }
        let hits = self
            .cells
            .iter()
            .filter(|c| matches!(c.data, CellData::Growth { smallest, .. } if smallest < 0.0))
            .count();
        hits as f64 / denom as f64
    }

    /// Mean of the largest-rate estimates over non-error cells.
    pub fn mean_largest_rate(&self) -> Option<f64> {
        let rates: Vec<f64> = self
            .cells
            .iter()
            .filter_map(|c| match c.data {
                CellData::Growth { largest, .. } => Some(largest),
                _ => None,
            })
            .collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }
}

/// Evaluates `kernel` on every cell with `workers` threads; results keep
/// grid order, so the output does not depend on the worker count.
pub fn map_cells<T, F>(grid: &Grid, workers: usize, kernel: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Point) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| grid.cells().par_iter().map(&kernel).collect()))
}

fn base_params(system: &DynamicalSystem, grid: &Grid, horizon: usize) -> Vec<(String, String)> {
    vec![
        ("system".into(), system.label().to_string()),
        ("grid".into(), grid.describe()),
        ("horizon".into(), horizon.to_string()),
    ]
}

/// Classifies every cell center of `grid` according to `query`.
pub fn grid_scan(
    system: &DynamicalSystem,
    query: &BasinQuery,
    grid: &Grid,
    workers: usize,
) -> Result<BasinScanResult> {
    query.validate(system)?;
    if grid.space() != system.space() {
        return Err(Error::SpaceMismatch {
            left: grid.space().to_string(),
            right: system.space().to_string(),
        });
    }
    let p = &query.params;
    let eps = query.epsilon;
    let mut params = base_params(system, grid, p.horizon());
    params.push(("mode".into(), query.mode.name().into()));
    params.push(("epsilon".into(), eps.to_string()));
    let (kind, cells) = match &query.target {
        BasinTarget::Measure(mu) => {
            let target = p.metric.signature(mu)?;
            let tol = p.cluster_tol_for(eps);
            params.push(("cluster_tol".into(), tol.to_string()));
            let strong = query.mode == BasinMode::Strong;
            let cells = map_cells(grid, workers, |x| {
                let c = trace_checkpoints(system, *x, &p.schedule, &p.metric)
                    .and_then(|t| classify_trace(&t, &target, eps, tol, &p.metric));
                match c {
                    Ok(c) => CellResult {
                        center: *x,
                        verdict: if c.indeterminate {
                            Verdict::Indeterminate
                        } else {
                            Verdict::from_flag(if strong { c.in_strong } else { c.in_weak })
                        },
                        data: CellData::Distances {
                            min: c.min_distance,
                            max: c.max_distance,
                            spread: c.spread,
                        },
                    },
                    Err(e) => CellResult::failed(*x, e),
                }
            })?;
            (ScanKind::Basin, cells)
        }
        BasinTarget::Attractor(k) => {
            params.push(("attractor".into(), k.to_string()));
            params.push(("milnor_threshold".into(), p.milnor_threshold.to_string()));
            let cells = map_cells(grid, workers, |x| {
                match milnor_fractions(system, *x, k, &[eps], &p.schedule) {
                    Ok(v) => CellResult {
                        center: *x,
                        verdict: Verdict::from_flag(v[0] >= p.milnor_threshold),
                        data: CellData::VisitFrequency(v[0]),
                    },
                    Err(e) => CellResult::failed(*x, e),
                }
            })?;
            (ScanKind::Milnor, cells)
        }
    };
    Ok(BasinScanResult {
        kind,
        grid: grid.describe(),
        resolution: grid.resolution(),
        cells,
        params,
    })
}

/// Growth-rate estimates at every cell; the verdict is the optimal flag
/// (largest-rate estimate < 0).
pub fn optimal_point_scan(
    system: &DynamicalSystem,
    phi: &SubadditivePotential,
    grid: &Grid,
    schedule: &[usize],
    workers: usize,
) -> Result<BasinScanResult> {
    let horizon = *schedule
        .last()
        .ok_or_else(|| Error::InvalidArgument("empty schedule".into()))?;
    if grid.space() != system.space() {
        return Err(Error::SpaceMismatch {
            left: grid.space().to_string(),
            right: system.space().to_string(),
        });
    }
    let mut params = base_params(system, grid, horizon);
    params.push(("potential".into(), phi.label().to_string()));
    let cells = map_cells(grid, workers, |x| {
        match growth_report(phi, system, *x, horizon, schedule) {
            Ok(r) => CellResult {
                center: *x,
                verdict: Verdict::from_flag(r.optimal),
                data: CellData::Growth {
                    largest: r.largest_rate,
                    smallest: r.smallest_rate,
                },
            },
            Err(e) => CellResult::failed(*x, e),
        }
    })?;
    Ok(BasinScanResult {
        kind: ScanKind::Growth,
        grid: grid.describe(),
        resolution: grid.resolution(),
        cells,
        params,
    })
}

/// Weak and strong basin fractions at one scale.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservabilityRow {
    pub epsilon: f64,
    pub weak_fraction: f64,
    pub strong_fraction: f64,
    /// Cells flagged indeterminate at this scale.
    pub indeterminate: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservabilityReport {
    pub rows: Vec<ObservabilityRow>,
    pub cells: usize,
    pub errors: usize,
    pub cluster_tol: f64,
    /// Positive weak fraction at every tested scale.
    pub observable: bool,
    /// Positive strong fraction at every tested scale.
    pub strongly_observable: bool,
}

/// Basin fractions of `μ` at every scale of the descending list
/// `epsilons`. Checkpoint data is computed once per cell and one clustering
/// tolerance (`min ε / 4` unless set in `params`) is shared by all scales,
/// so the fractions are comparable across scales.
pub fn observability_check(
    system: &DynamicalSystem,
    mu: &Measure,
    epsilons: &[f64],
    grid: &Grid,
    params: &BasinParams,
    workers: usize,
) -> Result<ObservabilityReport> {
    if epsilons.is_empty() {
        return Err(Error::InvalidArgument(
            "epsilon list must not be empty".into(),
        ));
    }
    if epsilons.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidArgument(
            "epsilon list must be strictly descending".into(),
        ));
    }
    if !(epsilons[epsilons.len() - 1] > 0.0) {
        return Err(Error::InvalidArgument("epsilons must be positive".into()));
    }
    if mu.space() != system.space() || grid.space() != system.space() {
        return Err(Error::SpaceMismatch {
            left: mu.space().to_string(),
            right: system.space().to_string(),
        });
    }
    let tol = params
        .cluster_tol
        .unwrap_or(epsilons[epsilons.len() - 1] / 4.0);
    let target = params.metric.signature(mu)?;
    let per_cell = map_cells(grid, workers, |x| {
        let trace = trace_checkpoints(system, *x, &params.schedule, &params.metric)?;
        epsilons
            .iter()
            .map(|&e| classify_trace(&trace, &target, e, tol, &params.metric))
            .collect::<Result<Vec<_>>>()
    })?;
    let ok: Vec<&Vec<_>> = per_cell.iter().filter_map(|r| r.as_ref().ok()).collect();
    let denom = ok.len();
    let rows: Vec<ObservabilityRow> = epsilons
        .iter()
        .enumerate()
        .map(|(i, &epsilon)| {
            let count = |pred: &dyn Fn(&super::Classification) -> bool| {
                ok.iter().filter(|c| pred(&c[i])).count()
            };
            let frac = |n: usize| {
                if denom == 0 {
                    0.0
                } else {
                    n as f64 / denom as f64
                }
            };
            let weak = count(&|c| c.in_weak && !c.indeterminate);
            let strong = count(&|c| c.in_strong && !c.indeterminate);
            let ind = count(&|c| c.indeterminate);
            ObservabilityRow {
                epsilon,
                weak_fraction: frac(weak),
                strong_fraction: frac(strong),
                indeterminate: ind,
            }
        })
        .collect();
    Ok(ObservabilityReport {
        observable: rows.iter().all(|r| r.weak_fraction > 0.0),
        strongly_observable: rows.iter().all(|r| r.strong_fraction > 0.0),
        rows,
        cells: per_cell.len(),
        errors: per_cell.len() - denom,
        cluster_tol: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{MatrixFamily, Observable};
    use crate::schedule::default_schedule;

    fn weak_query(mu: Measure, epsilon: f64, horizon: usize) -> BasinQuery {
        let space = mu.space();
        BasinQuery {
            target: BasinTarget::Measure(mu),
            mode: BasinMode::Weak,
            epsilon,
            params: BasinParams::new(space, horizon),
        }
    }

    #[test]
    fn epsilon_one_is_always_true() {
        let f = DynamicalSystem::doubling();
        let grid = Grid::uniform(f.space(), 50).unwrap();
        let q = weak_query(
            Measure::dirac(f.space(), Point::scalar(0.5)).unwrap(),
            1.0,
            500,
        );
        let r = grid_scan(&f, &q, &grid, 2).unwrap();
        assert_eq!(r.fraction(), 1.0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let f = DynamicalSystem::doubling();
        let grid = Grid::uniform(f.space(), 64).unwrap();
        let q = weak_query(Measure::lebesgue(f.space()), 0.05, 2000);
        let a = grid_scan(&f, &q, &grid, 1).unwrap();
        let b = grid_scan(&f, &q, &grid, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mode_target_compatibility() {
        let f = DynamicalSystem::doubling();
        let grid = Grid::uniform(f.space(), 4).unwrap();
        let mut q = weak_query(Measure::lebesgue(f.space()), 0.1, 500);
        q.mode = BasinMode::Milnor;
        assert!(grid_scan(&f, &q, &grid, 1).is_err());
        q.mode = BasinMode::Weak;
        q.epsilon = -1.0;
        assert!(grid_scan(&f, &q, &grid, 1).is_err());
    }

    #[test]
    fn errors_leave_the_denominator() {
        // a map that leaves the interval from x > 0.5 on the first step
        let f = DynamicalSystem::custom(crate::dynamics::StateSpace::Interval, "escape", |p| {
            Point::scalar(if p.x() > 0.5 { 2.0 } else { 0.0 })
        });
        let grid = Grid::uniform(f.space(), 10).unwrap();
        let delta0 = Measure::dirac(f.space(), Point::scalar(0.0)).unwrap();
        let r = grid_scan(&f, &weak_query(delta0, 0.01, 300), &grid, 1).unwrap();
        assert_eq!(r.errors(), 5);
        assert_eq!(r.fraction(), 1.0);
    }

    #[test]
    fn trivial_optimal_scans() {
        let f = DynamicalSystem::doubling();
        let grid = Grid::uniform(f.space(), 40).unwrap();
        let s = default_schedule(1000);
        let stable = SubadditivePotential::cocycle(MatrixFamily::diag_half());
        let r = optimal_point_scan(&f, &stable, &grid, &s, 2).unwrap();
        assert_eq!((r.fraction(), r.fraction_smallest_negative()), (1.0, 1.0));
        let growing = SubadditivePotential::birkhoff(Observable::constant(1.0));
        let r = optimal_point_scan(&f, &growing, &grid, &s, 2).unwrap();
        assert_eq!((r.fraction(), r.fraction_smallest_negative()), (0.0, 0.0));
    }

    #[test]
    fn optimal_fraction_below_smallest_negative_fraction() {
        let f = DynamicalSystem::doubling();
        let grid = Grid::uniform(f.space(), 200).unwrap();
        let phi = SubadditivePotential::birkhoff(Observable::new("shifted-cos", |p| {
            (std::f64::consts::TAU * p.x()).cos() - 0.05
        }));
        let r = optimal_point_scan(&f, &phi, &grid, &default_schedule(2000), 1).unwrap();
        assert!(r.fraction() <= r.fraction_smallest_negative());
        for c in &r.cells {
            if let CellData::Growth { largest, smallest } = c.data {
                assert!(smallest <= largest);
            }
        }
    }

    #[test]
    fn observability_rows_are_monotone() {
        let f = DynamicalSystem::doubling();
        let grid = Grid::uniform(f.space(), 200).unwrap();
        let params = BasinParams::new(f.space(), 5000);
        let eps = [0.2, 0.1, 0.05, 0.02];
        let r = observability_check(&f, &Measure::lebesgue(f.space()), &eps, &grid, &params, 2)
            .unwrap();
        assert_eq!(r.cluster_tol, 0.005);
        for w in r.rows.windows(2) {
            assert!(w[1].weak_fraction <= w[0].weak_fraction);
            assert!(w[1].strong_fraction <= w[0].strong_fraction);
        }
        assert!(r
            .rows
            .iter()
            .all(|row| row.strong_fraction <= row.weak_fraction));
        assert!(observability_check(
            &f,
            &Measure::lebesgue(f.space()),
            &[0.1, 0.2],
            &grid,
            &params,
            1
        )
        .is_err());
    }
}
