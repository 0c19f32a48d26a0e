use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{DynamicalSystem, Point, StateSpace};
use crate::error::Result;

use super::measure::{EmpiricalMeasure, Measure};
use super::metric::{Signature, WeakStarMetric};

/// Tolerance for the triangle inequality and the recursion identity.
pub const KERNEL_TOL: f64 = 1e-12;

/// A random probability measure: one to four weighted atoms, half of the
/// time mixed with Lebesgue measure.
pub fn random_measure<R: Rng + ?Sized>(space: StateSpace, rng: &mut R) -> Result<Measure> {
    let k = rng.gen_range(1..=4);
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let atoms = raw.iter().map(|w| (space.sample(rng), w / total)).collect();
    let atomic = Measure::from_atoms(space, atoms)?;
    if rng.gen_bool(0.5) {
        let c = rng.gen_range(0.0..1.0);
        Measure::mixture(vec![(Measure::lebesgue(space), c), (atomic, 1.0 - c)])
    } else {
        Ok(atomic)
    }
}

#[derive(Clone, Debug)]
pub struct MetricAxiomsReport {
    pub triples: usize,
    /// Max of `d(μ,ρ) − d(μ,ν) − d(ν,ρ)`.
    pub max_triangle_violation: f64,
    pub max_asymmetry: f64,
    pub max_self_distance: f64,
    pub max_distance: f64,
    pub passed: bool,
}

/// Identity, symmetry, triangle inequality and the bound `dist* ≤ 1` on
/// `triples` seeded random measure triples.
pub fn check_metric_axioms(
    metric: &WeakStarMetric,
    triples: usize,
    seed: u64,
) -> Result<MetricAxiomsReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = metric.space();
    let mut triangle = f64::NEG_INFINITY;
    let (mut asym, mut selfd, mut maxd) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..triples {
        let sigs: Vec<Signature> = (0..3)
            .map(|_| metric.signature(&random_measure(space, &mut rng)?))
            .collect::<Result<_>>()?;
        let d = |i: usize, j: usize| metric.signature_distance(&sigs[i], &sigs[j]);
        triangle = triangle.max(d(0, 2) - d(0, 1) - d(1, 2));
        asym = asym.max((d(0, 1) - d(1, 0)).abs());
        selfd = selfd.max(d(0, 0)).max(d(1, 1)).max(d(2, 2));
        maxd = maxd.max(d(0, 1)).max(d(1, 2)).max(d(0, 2));
    }
    Ok(MetricAxiomsReport {
        triples,
        max_triangle_violation: triangle,
        max_asymmetry: asym,
        max_self_distance: selfd,
        max_distance: maxd,
        passed: triangle <= KERNEL_TOL && asym == 0.0 && selfd == 0.0 && maxd <= 1.0,
    })
}

#[derive(Clone, Debug)]
pub struct RecursionReport {
    pub n_max: usize,
    /// Max over `n` of `dist*(δ_{x,n+1}, (n δ_{x,n} + δ_{fⁿx})/(n+1))`.
    pub max_defect: f64,
    pub passed: bool,
}

/// Checks `δ_{x,n+1} = (n δ_{x,n} + δ_{fⁿx})/(n+1)` for `1 ≤ n < n_max`,
/// comparing independently computed signatures.
pub fn check_empirical_recursion(
    system: &DynamicalSystem,
    metric: &WeakStarMetric,
    x: Point,
    n_max: usize,
) -> Result<RecursionReport> {
    let space = system.space();
    let mut emp = EmpiricalMeasure::new(system, x, 1)?;
    let mut prev = metric.signature(&emp.to_measure())?;
    let mut worst = 0.0f64;
    for n in 1..n_max {
        let newest = system.step(emp.points().last().expect("non-empty"))?;
        emp.extend(system)?;
        let direct = metric.signature(&emp.to_measure())?;
        let dirac = metric.signature(&Measure::dirac(space, newest)?)?;
        let nf = n as f64;
        let recursive = Signature::combine(&[(nf / (nf + 1.0), &prev), (1.0 / (nf + 1.0), &dirac)]);
        worst = worst.max(metric.signature_distance(&direct, &recursive));
        prev = direct;
    }
    Ok(RecursionReport {
        n_max,
        max_defect: worst,
        passed: worst <= KERNEL_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axioms_hold_on_every_space() {
        for space in [
            StateSpace::Circle,
            StateSpace::Interval,
            StateSpace::Torus2,
            StateSpace::Simplex3,
            StateSpace::PlanarBall { radius: 1.0 },
        ] {
            let r = check_metric_axioms(&WeakStarMetric::default_for(space), 200, 9).unwrap();
            assert!(r.passed, "{space}: {r:?}");
            assert!(r.max_distance > 0.0);
        }
    }

    #[test]
    fn recursion_holds() {
        let f = DynamicalSystem::doubling();
        let metric = WeakStarMetric::default_for(f.space());
        let r = check_empirical_recursion(&f, &metric, Point::scalar(0.1234), 300).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
