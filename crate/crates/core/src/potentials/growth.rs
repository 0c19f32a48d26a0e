use crate::dynamics::{DynamicalSystem, Point};
use crate::error::{Error, Result};
use crate::schedule;

use super::potential::SubadditivePotential;

/// Smallest horizon accepted by [`growth_report`].
pub const MIN_GROWTH_HORIZON: usize = 200;

/// Finite-horizon estimates of the largest and smallest growth rates of a
/// potential at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRateReport {
    pub base: Point,
    pub horizon: usize,
    /// `(n, φ_n(x)/n)` at every checkpoint.
    pub series: Vec<(usize, f64)>,
    /// Tail window `[⌈N/2⌉, N]`.
    pub tail_window: (usize, usize),
    /// Max of the series over the tail window.
    pub largest_rate: f64,
    /// Min of the series over the tail window.
    pub smallest_rate: f64,
    /// `largest_rate < 0`.
    pub optimal: bool,
}

impl GrowthRateReport {
    pub fn tail(&self) -> impl Iterator<Item = &(usize, f64)> + '_ {
        let lo = self.tail_window.0;
        self.series.iter().filter(move |(n, _)| *n >= lo)
    }
}

/// Evaluates `φ_n(x)/n` at every horizon of `schedule` in one orbit pass.
/// The schedule must end at `horizon`.
pub fn growth_report(
    phi: &SubadditivePotential,
    system: &DynamicalSystem,
    x: Point,
    horizon: usize,
    schedule: &[usize],
) -> Result<GrowthRateReport> {
    if horizon < MIN_GROWTH_HORIZON {
        return Err(Error::InvalidArgument(format!(
            "growth horizon must be at least {MIN_GROWTH_HORIZON}, got {horizon}"
        )));
    }
    schedule::validate(schedule, 1)?;
    if schedule.last() != Some(&horizon) {
        return Err(Error::InvalidArgument(format!(
            "schedule must end at the horizon {horizon}"
        )));
    }
    let mut acc = phi.accumulator();
    let mut series = Vec::with_capacity(schedule.len());
    let mut next = 0;
    for (j, p) in system.trajectory(x).take(horizon).enumerate() {
        acc.push(&p?)?;
        if j + 1 == schedule[next] {
            let rate = acc.value()? / (j + 1) as f64;
            if !rate.is_finite() {
                return Err(Error::NonFiniteState {
                    point: x.to_string(),
                });
            }
            series.push((j + 1, rate));
            next += 1;
        }
    }
    let tail_lo = horizon.div_ceil(2);
    let tail = &series[schedule::tail_start(schedule)..];
    let largest_rate = tail.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let smallest_rate = tail.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    Ok(GrowthRateReport {
        base: x,
        horizon,
        series,
        tail_window: (tail_lo, horizon),
        largest_rate,
        smallest_rate,
        optimal: largest_rate < 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{evaluate, MatrixFamily, Observable};
    use crate::schedule::default_schedule;

    #[test]
    fn cocycle_constant_rate() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::cocycle(MatrixFamily::diag_half());
        let r =
            growth_report(&phi, &f, Point::scalar(0.41), 1000, &default_schedule(1000)).unwrap();
        assert!((r.largest_rate - 0.5f64.ln()).abs() < 1e-9);
        assert!((r.smallest_rate - 0.5f64.ln()).abs() < 1e-9);
        assert!(r.optimal);
        assert_eq!(r.tail_window, (500, 1000));
    }

    #[test]
    fn positive_constant_is_not_optimal() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::birkhoff(Observable::constant(1.0));
        let r = growth_report(&phi, &f, Point::scalar(0.41), 500, &default_schedule(500)).unwrap();
        assert_eq!(
            (r.largest_rate, r.smallest_rate, r.optimal),
            (1.0, 1.0, false)
        );
    }

    #[test]
    fn series_matches_direct_evaluation() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::cocycle(MatrixFamily::diag_cos());
        let x = Point::scalar(0.137);
        let r = growth_report(&phi, &f, x, 400, &default_schedule(400)).unwrap();
        for &(n, rate) in &r.series {
            let direct = evaluate(&phi, &f, x, n).unwrap() / n as f64;
            assert!((rate - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn negation_duality_is_exact() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::birkhoff(Observable::cos_2pi());
        let neg = phi.negated().unwrap();
        let x = Point::scalar(0.318);
        let s = default_schedule(5000);
        let a = growth_report(&phi, &f, x, 5000, &s).unwrap();
        let b = growth_report(&neg, &f, x, 5000, &s).unwrap();
        assert_eq!(b.largest_rate, -a.smallest_rate);
        assert_eq!(b.smallest_rate, -a.largest_rate);
    }

    #[test]
    fn rejects_short_horizon() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::birkhoff(Observable::constant(1.0));
        assert!(growth_report(&phi, &f, Point::scalar(0.1), 199, &default_schedule(199)).is_err());
    }
}
