//! Finite-horizon estimates of the set `V_f(x)` of weak* limit points of the
//! empirical measures.

use crate::dynamics::{DynamicalSystem, Point};
use crate::error::{Error, Result};
use crate::schedule;

use super::metric::{Signature, WeakStarMetric};

/// Signatures of `δ_{x,n}` at every checkpoint horizon, computed in one
/// orbit pass.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointTrace {
    pub base: Point,
    pub horizons: Vec<usize>,
    pub signatures: Vec<Signature>,
}

impl CheckpointTrace {
    /// Index of the first checkpoint in the tail window `[⌈N/2⌉, N]`.
    pub fn tail_start(&self) -> usize {
        schedule::tail_start(&self.horizons)
    }

    pub fn tail(&self) -> &[Signature] {
        &self.signatures[self.tail_start()..]
    }

    /// Max pairwise distance among tail checkpoints.
    pub fn spread(&self, metric: &WeakStarMetric) -> f64 {
        let tail = self.tail();
        let mut spread = 0.0f64;
        for (i, a) in tail.iter().enumerate() {
            for b in &tail[i + 1..] {
                spread = spread.max(metric.signature_distance(a, b));
            }
        }
        spread
    }

    /// Single-linkage agglomeration of the tail checkpoints at `tol`, visiting
    /// them in ascending horizon order.
    pub fn estimate(&self, metric: &WeakStarMetric, tol: f64) -> Result<LimitSetEstimate> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cluster tolerance must be positive, got {tol}"
            )));
        }
        let start = self.tail_start();
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for i in start..self.signatures.len() {
            let linked: Vec<usize> = clusters
                .iter()
                .enumerate()
                .filter(|(_, members)| {
                    members.iter().any(|&m| {
                        metric.signature_distance(&self.signatures[m], &self.signatures[i]) <= tol
                    })
                })
                .map(|(c, _)| c)
                .collect();
            match linked.split_first() {
                None => clusters.push(vec![i]),
                Some((&keep, rest)) => {
                    for &c in rest.iter().rev() {
                        let moved = clusters.remove(c);
                        clusters[keep].extend(moved);
                    }
                    clusters[keep].push(i);
                    clusters[keep].sort_unstable();
                }
            }
        }
        let clusters = clusters
            .into_iter()
            .map(|members| Cluster {
                representative: *members.last().expect("clusters are non-empty"),
                members,
            })
            .collect();
        Ok(LimitSetEstimate {
            base: self.base,
            horizons: self.horizons.clone(),
            signatures: self.signatures.clone(),
            tail_start: start,
            clusters,
            spread: self.spread(metric),
        })
    }
}

/// Tail checkpoints grouped into clusters; each cluster's representative
/// is its latest checkpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub members: Vec<usize>,
    pub representative: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitSetEstimate {
    pub base: Point,
    pub horizons: Vec<usize>,
    pub signatures: Vec<Signature>,
    pub tail_start: usize,
    pub clusters: Vec<Cluster>,
    /// Max pairwise dist* among tail checkpoints.
    pub spread: f64,
}

impl LimitSetEstimate {
    pub fn representatives(&self) -> impl Iterator<Item = &Signature> + '_ {
        self.clusters
            .iter()
            .map(|c| &self.signatures[c.representative])
    }

    pub fn converged(&self) -> bool {
        self.clusters.len() == 1
    }
}

/// Signatures of `δ_{x,n}` at every horizon of `schedule`.
pub fn trace_checkpoints(
    system: &DynamicalSystem,
    x: Point,
    schedule: &[usize],
    metric: &WeakStarMetric,
) -> Result<CheckpointTrace> {
    schedule::validate(schedule, 1)?;
    if metric.space() != system.space() {
        return Err(Error::SpaceMismatch {
            left: metric.space().to_string(),
            right: system.space().to_string(),
        });
    }
    let k = metric.family().len();
    let horizon = *schedule.last().unwrap();
    let mut sums = vec![0.0; k];
    let mut buf = vec![0.0; k];
    let mut signatures = Vec::with_capacity(schedule.len());
    let mut next = 0;
    for (j, p) in system.trajectory(x).take(horizon).enumerate() {
        metric.eval_all(&p?, &mut buf);
        for (s, v) in sums.iter_mut().zip(&buf) {
            *s += v;
        }
        if j + 1 == schedule[next] {
            let n = (j + 1) as f64;
            signatures.push(Signature(sums.iter().map(|s| s / n).collect()));
            next += 1;
        }
    }
    Ok(CheckpointTrace {
        base: x,
        horizons: schedule.to_vec(),
        signatures,
    })
}

/// Checkpoint measures along `schedule` (at least three horizons), grouped
/// at `cluster_tol`. One cluster with small spread indicates convergence of
/// `δ_{x,n}`; several clusters indicate oscillation.
pub fn limit_set_estimate(
    system: &DynamicalSystem,
    x: Point,
    schedule: &[usize],
    metric: &WeakStarMetric,
    cluster_tol: f64,
) -> Result<LimitSetEstimate> {
    schedule::validate(schedule, 3)?;
    trace_checkpoints(system, x, schedule, metric)?.estimate(metric, cluster_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{empirical_measure, Measure};
    use crate::schedule::default_schedule;

    #[test]
    fn fixed_point_has_one_cluster() {
        let f = DynamicalSystem::doubling();
        let metric = WeakStarMetric::default_for(f.space());
        let est = limit_set_estimate(
            &f,
            Point::scalar(0.0),
            &default_schedule(2000),
            &metric,
            0.01,
        )
        .unwrap();
        assert_eq!(est.clusters.len(), 1);
        assert_eq!(est.spread, 0.0);
        let delta0 = metric
            .signature(&Measure::dirac(f.space(), Point::scalar(0.0)).unwrap())
            .unwrap();
        assert!(metric.signature_distance(est.representatives().next().unwrap(), &delta0) < 1e-15);
    }

    #[test]
    fn trace_matches_empirical_measures() {
        let f = DynamicalSystem::rotation(0.3819660112501051);
        let metric = WeakStarMetric::default_for(f.space());
        let schedule = [5, 17, 40];
        let trace = trace_checkpoints(&f, Point::scalar(0.2), &schedule, &metric).unwrap();
        for (n, sig) in schedule.iter().zip(&trace.signatures) {
            let direct = metric
                .signature(
                    &empirical_measure(&f, Point::scalar(0.2), *n)
                        .unwrap()
                        .to_measure(),
                )
                .unwrap();
            assert!(metric.signature_distance(sig, &direct) < 1e-13);
        }
    }

    #[test]
    fn clustering_is_single_linkage() {
        // three checkpoints at mutual distance 0.5 * 2^-1 along one coordinate chain
        let metric = WeakStarMetric::default_for(crate::dynamics::StateSpace::Circle);
        let sig = |v: f64| {
            let mut s = vec![0.0; 16];
            s[0] = v;
            Signature(s)
        };
        let trace = CheckpointTrace {
            base: Point::scalar(0.0),
            horizons: vec![10, 20, 30, 40],
            signatures: vec![sig(0.0), sig(0.0), sig(0.02), sig(0.04)],
        };
        // tail = horizons >= 20 -> indices 1..4; consecutive distances 0.01
        let est = trace.estimate(&metric, 0.011).unwrap();
        assert_eq!(est.clusters.len(), 1);
        assert_eq!(est.clusters[0].representative, 3);
        assert!((est.spread - 0.02).abs() < 1e-15);
        let est = trace.estimate(&metric, 0.005).unwrap();
        assert_eq!(est.clusters.len(), 3);
        assert!(trace.estimate(&metric, 0.0).is_err());
    }

    #[test]
    fn rejects_short_schedule() {
        let f = DynamicalSystem::doubling();
        let metric = WeakStarMetric::default_for(f.space());
        assert!(limit_set_estimate(&f, Point::scalar(0.1), &[10, 20], &metric, 0.1).is_err());
    }
}
