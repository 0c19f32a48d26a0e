use crate::dynamics::{DynamicalSystem, Point, StateSpace};
use crate::error::{Error, Result};
use crate::measures::{trace_checkpoints, CheckpointTrace, Measure, Signature, WeakStarMetric};
use crate::potentials::MIN_GROWTH_HORIZON;
use crate::schedule::{self, default_schedule};

use super::attractor::AttractorSpec;

/// Default visit-frequency threshold above which a finite orbit counts as
/// being in the Milnor basin.
pub const DEFAULT_MILNOR_THRESHOLD: f64 = 0.95;

/// Horizon, checkpoint schedule, metric and clustering tolerance shared by
/// the classifiers.
#[derive(Clone, Debug)]
pub struct BasinParams {
    pub metric: WeakStarMetric,
    /// Checkpoint horizons; the last entry is the horizon `N`.
    pub schedule: Vec<usize>,
    /// Clustering tolerance; `None` means `ε/4`.
    pub cluster_tol: Option<f64>,
    pub milnor_threshold: f64,
}

impl BasinParams {
    /// Default metric and geometric schedule up to `horizon`.
    pub fn new(space: StateSpace, horizon: usize) -> Self {
        BasinParams {
            metric: WeakStarMetric::default_for(space),
            schedule: default_schedule(horizon),
            cluster_tol: None,
            milnor_threshold: DEFAULT_MILNOR_THRESHOLD,
        }
    }

    pub fn with_cluster_tol(mut self, tol: f64) -> Self {
        self.cluster_tol = Some(tol);
        self
    }

    pub fn horizon(&self) -> usize {
        *self.schedule.last().expect("non-empty schedule")
    }

    pub fn cluster_tol_for(&self, epsilon: f64) -> f64 {
        self.cluster_tol.unwrap_or(epsilon / 4.0)
    }
}

/// Verdicts of [`classify_point`] with the distances that witness them.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    /// Every cluster representative lies within `ε` of `μ`.
    pub in_strong: bool,
    /// Some cluster representative lies within `ε` of `μ`.
    pub in_weak: bool,
    /// Spread exceeds `ε/2` and the checkpoint verdict flips between the
    /// last two tail checkpoints.
    pub indeterminate: bool,
    /// Min and max dist* from the cluster representatives to `μ`.
    pub min_distance: f64,
    pub max_distance: f64,
    pub spread: f64,
    pub clusters: usize,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )))
    }
}

/// Classifies `x` from precomputed checkpoint data against a target with
/// signature `target`.
pub fn classify_trace(
    trace: &CheckpointTrace,
    target: &Signature,
    epsilon: f64,
    cluster_tol: f64,
    metric: &WeakStarMetric,
) -> Result<Classification> {
    check_epsilon(epsilon)?;
    if trace.signatures.len() < 3 {
        return Err(Error::InvalidArgument(
            "classification needs at least three checkpoints".into(),
        ));
    }
    let estimate = trace.estimate(metric, cluster_tol)?;
    let distances: Vec<f64> = estimate
        .representatives()
        .map(|s| metric.signature_distance(s, target))
        .collect();
    let min_distance = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let max_distance = distances.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tail = trace.tail();
    let flips = tail.len() >= 2 && {
        let near = |s: &Signature| metric.signature_distance(s, target) <= epsilon;
        near(&tail[tail.len() - 2]) != near(&tail[tail.len() - 1])
    };
    Ok(Classification {
        in_strong: max_distance <= epsilon,
        in_weak: min_distance <= epsilon,
        indeterminate: estimate.spread > epsilon / 2.0 && flips,
        min_distance,
        max_distance,
        spread: estimate.spread,
        clusters: estimate.clusters.len(),
    })
}

/// Membership of `x` in the strong basin `S_ε(μ)` and the basin `A_ε(μ)`,
/// judged from the tail checkpoint measures.
pub fn classify_point(
    system: &DynamicalSystem,
    x: Point,
    mu: &Measure,
    epsilon: f64,
    params: &BasinParams,
) -> Result<Classification> {
    check_epsilon(epsilon)?;
    let target = params.metric.signature(mu)?;
    let trace = trace_checkpoints(system, x, &params.schedule, &params.metric)?;
    classify_trace(
        &trace,
        &target,
        epsilon,
        params.cluster_tol_for(epsilon),
        &params.metric,
    )
}

/// `(1/n)♯{j < n : d(fʲx, K) < ε}` at every horizon of `schedule`, for each
/// `ε` in `epsilons`, from one orbit pass.
pub fn visit_frequencies(
    system: &DynamicalSystem,
    x: Point,
    k: &AttractorSpec,
    epsilons: &[f64],
    schedule: &[usize],
) -> Result<Vec<Vec<f64>>> {
    for &e in epsilons {
        check_epsilon(e)?;
    }
    schedule::validate(schedule, 1)?;
    if k.space() != system.space() {
        return Err(Error::SpaceMismatch {
            left: k.space().to_string(),
            right: system.space().to_string(),
        });
    }
    let horizon = *schedule.last().unwrap();
    let mut counts = vec![0usize; epsilons.len()];
    let mut out = vec![Vec::with_capacity(schedule.len()); epsilons.len()];
    let mut next = 0;
    for (j, p) in system.trajectory(x).take(horizon).enumerate() {
        let d = k.distance(&p?);
        for (c, &e) in counts.iter_mut().zip(epsilons) {
            if d < e {
                *c += 1;
            }
        }
        if j + 1 == schedule[next] {
            for (series, &c) in out.iter_mut().zip(&counts) {
                series.push(c as f64 / (j + 1) as f64);
            }
            next += 1;
        }
    }
    Ok(out)
}

/// Liminf proxy for the visit frequency of `N_ε(K)`: the min over tail
/// checkpoints, for every `ε` in `epsilons`.
pub fn milnor_fractions(
    system: &DynamicalSystem,
    x: Point,
    k: &AttractorSpec,
    epsilons: &[f64],
    schedule: &[usize],
) -> Result<Vec<f64>> {
    let horizon = schedule.last().copied().unwrap_or(0);
    if horizon < MIN_GROWTH_HORIZON {
        return Err(Error::InvalidArgument(format!(
            "milnor horizon must be at least {MIN_GROWTH_HORIZON}, got {horizon}"
        )));
    }
    let series = visit_frequencies(system, x, k, epsilons, schedule)?;
    let start = schedule::tail_start(schedule);
    Ok(series
        .into_iter()
        .map(|s| s[start..].iter().copied().fold(f64::INFINITY, f64::min))
        .collect())
}

/// [`milnor_fractions`] for a single `ε` on the default schedule up to `horizon`.
pub fn milnor_fraction(
    system: &DynamicalSystem,
    x: Point,
    k: &AttractorSpec,
    epsilon: f64,
    horizon: usize,
) -> Result<f64> {
    Ok(milnor_fractions(system, x, k, &[epsilon], &default_schedule(horizon))?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Fraction;
    use crate::measures::weak_star_distance;

    const GOLDEN: f64 = 0.618_033_988_749_894_9;

    #[test]
    fn fixed_point_is_in_its_strong_basin() {
        let f = DynamicalSystem::doubling();
        let params = BasinParams::new(f.space(), 2000);
        let delta0 = Measure::dirac(f.space(), Point::scalar(0.0)).unwrap();
        for eps in [1e-6, 0.05, 0.2] {
            let c = classify_point(&f, Point::scalar(0.0), &delta0, eps, &params).unwrap();
            assert!(c.in_strong && c.in_weak && !c.indeterminate);
            assert_eq!(c.max_distance, 0.0);
        }
    }

    #[test]
    fn fixed_point_is_far_from_the_period_two_orbit() {
        let f = DynamicalSystem::doubling();
        let params = BasinParams::new(f.space(), 2000);
        let third = Point::exact(Fraction::new(1, 3).unwrap());
        let mu = Measure::periodic_orbit(&f, third, 2).unwrap();
        let delta0 = Measure::dirac(f.space(), Point::scalar(0.0)).unwrap();
        let oracle = weak_star_distance(&params.metric, &delta0, &mu).unwrap();
        assert!(oracle > 0.01);
        let c = classify_point(&f, Point::scalar(0.0), &mu, 0.01, &params).unwrap();
        assert!(!c.in_weak && !c.in_strong);
        assert!((c.min_distance - oracle).abs() < 1e-12);
    }

    #[test]
    fn rotation_is_in_the_lebesgue_strong_basin() {
        let f = DynamicalSystem::rotation(GOLDEN);
        let params = BasinParams::new(f.space(), 100_000);
        let leb = Measure::lebesgue(f.space());
        let c = classify_point(&f, Point::scalar(0.4242), &leb, 0.05, &params).unwrap();
        assert!(c.in_strong && c.in_weak);
    }

    #[test]
    fn verdicts_are_monotone_in_epsilon() {
        let f = DynamicalSystem::doubling();
        let params = BasinParams::new(f.space(), 5000).with_cluster_tol(0.005);
        let leb = Measure::lebesgue(f.space());
        let target = params.metric.signature(&leb).unwrap();
        for x in f.space().low_discrepancy(20) {
            let trace = trace_checkpoints(&f, x, &params.schedule, &params.metric).unwrap();
            let mut prev: Option<Classification> = None;
            for eps in [0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.5] {
                let c = classify_trace(&trace, &target, eps, 0.005, &params.metric).unwrap();
                assert!(!c.in_strong || c.in_weak);
                if let Some(p) = &prev {
                    assert!(!p.in_weak || c.in_weak);
                    assert!(!p.in_strong || c.in_strong);
                }
                prev = Some(c);
            }
        }
    }

    #[test]
    fn halving_map_stays_near_zero() {
        let f = DynamicalSystem::interval_halving();
        let k = AttractorSpec::points("zero", f.space(), vec![Point::scalar(0.0)]).unwrap();
        for x in [1.0, 0.7, 0.05] {
            assert!(milnor_fraction(&f, Point::scalar(x), &k, 0.1, 1000).unwrap() >= 0.99);
        }
    }

    #[test]
    fn whole_space_sample_is_always_visited() {
        let f = DynamicalSystem::doubling();
        let k = AttractorSpec::points("all", f.space(), f.space().quadrature()).unwrap();
        for x in f.space().low_discrepancy(5) {
            assert_eq!(milnor_fraction(&f, x, &k, 0.01, 1000).unwrap(), 1.0);
        }
    }

    #[test]
    fn milnor_fraction_monotone_in_epsilon() {
        let f = DynamicalSystem::doubling();
        let k = AttractorSpec::points("zero", f.space(), vec![Point::scalar(0.0)]).unwrap();
        let eps = [0.01, 0.05, 0.1, 0.3];
        let v =
            milnor_fractions(&f, Point::scalar(0.3183), &k, &eps, &default_schedule(3000)).unwrap();
        assert!(v.windows(2).all(|w| w[0] <= w[1]), "{v:?}");
        assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn rejects_bad_epsilon() {
        let f = DynamicalSystem::doubling();
        let leb = Measure::lebesgue(f.space());
        let params = BasinParams::new(f.space(), 1000);
        assert!(classify_point(&f, Point::scalar(0.1), &leb, 0.0, &params).is_err());
    }
}
