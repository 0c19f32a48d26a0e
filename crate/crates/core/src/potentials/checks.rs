use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{DynamicalSystem, Point};
use crate::error::{Error, Result};

use super::potential::SubadditivePotential;

/// Tolerance for the subadditivity inequality.
pub const SUBADDITIVITY_TOL: f64 = 1e-9;
/// Tolerance for the block-averaging bound.
pub const LEMMA_SUB_TOL: f64 = 1e-6;
/// Size of the low-discrepancy grid used to estimate `‖φ_j‖∞`.
pub const SUP_GRID_POINTS: usize = 1000;

/// Outcome of [`check_subadditivity`].
#[derive(Clone, Debug)]
pub struct SubadditivityReport {
    pub samples: usize,
    pub n_max: usize,
    /// Max of `φ_{n+m}(x) − φ_n(x) − φ_m(fⁿx)` over the sampled triples.
    pub max_violation: f64,
    /// Min of the same quantity (zero up to rounding for additive potentials).
    pub min_violation: f64,
    /// Triple attaining `max_violation`.
    pub worst: (Point, usize, usize),
    pub passed: bool,
}

/// Evaluates `φ_{n+m}(x) − φ_n(x) − φ_m(fⁿx)` along a single orbit pass.
fn defect(
    phi: &SubadditivePotential,
    system: &DynamicalSystem,
    x: Point,
    n: usize,
    m: usize,
) -> Result<f64> {
    let mut whole = phi.accumulator();
    let mut head = 0.0;
    let mut tail = phi.accumulator();
    for (i, p) in system.trajectory(x).take(n + m).enumerate() {
        let p = p?;
        whole.push(&p)?;
        if i + 1 == n {
            head = whole.value()?;
        }
        if i >= n {
            tail.push(&p)?;
        }
    }
    Ok(whole.value()? - head - tail.value()?)
}

/// Draws `sample_count` triples `(x, n, m)` with `n, m ≥ 1`, `n + m ≤ n_max`
/// from a generator seeded with `seed`, and measures the subadditivity defect.
pub fn check_subadditivity(
    phi: &SubadditivePotential,
    system: &DynamicalSystem,
    sample_count: usize,
    n_max: usize,
    seed: u64,
) -> Result<SubadditivityReport> {
    if sample_count == 0 || n_max < 2 {
        return Err(Error::InvalidArgument(
            "subadditivity check needs sample_count >= 1 and n_max >= 2".into(),
        ));
    }
    let n_max = phi.max_horizon().map_or(n_max, |h| n_max.min(h));
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "potential {} is only defined up to n = {n_max}",
            phi.label()
        )));
    }
    let space = system.space();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_violation = f64::NEG_INFINITY;
    let mut min_violation = f64::INFINITY;
    let mut worst = (Point::scalar(0.0), 1, 1);
    for _ in 0..sample_count {
        let x = space.sample(&mut rng);
        let n = rng.gen_range(1..n_max);
        let m = rng.gen_range(1..=n_max - n);
        let d = defect(phi, system, x, n, m)?;
        if d > max_violation {
            max_violation = d;
            worst = (x, n, m);
        }
        min_violation = min_violation.min(d);
    }
    Ok(SubadditivityReport {
        samples: sample_count,
        n_max,
        max_violation,
        min_violation,
        worst,
        passed: max_violation <= SUBADDITIVITY_TOL,
    })
}

/// Outcome of [`lemma_sub_check`].
#[derive(Clone, Debug)]
pub struct LemmaSubReport {
    pub l: usize,
    /// Estimate of `max_{1≤j≤2l} ‖φ_j‖∞` from a finite grid; a lower bound
    /// of the true supremum.
    pub c1: f64,
    /// `4·C₁`.
    pub c: f64,
    pub pairs: usize,
    /// Max over checked `(x, n)` of `φ_n(x) − C − Σ_{i<n} (1/l) φ_l(fⁱx)`.
    pub max_violation: f64,
    /// Pair attaining `max_violation`.
    pub worst: (Point, usize),
    pub passed: bool,
}

/// Verifies `φ_n(x) ≤ C + Σ_{i<n} (1/l) φ_l(fⁱx)` with `C = 4·C₁` for every
/// `x` in `points` and `n` in `n_list`.
pub fn lemma_sub_check(
    phi: &SubadditivePotential,
    system: &DynamicalSystem,
    l: usize,
    points: &[Point],
    n_list: &[usize],
) -> Result<LemmaSubReport> {
    if l == 0 {
        return Err(Error::InvalidArgument(
            "block length l must be at least 1".into(),
        ));
    }
    if points.is_empty() || n_list.is_empty() {
        return Err(Error::InvalidArgument(
            "lemma check needs sample points and horizons".into(),
        ));
    }
    let mut c1 = 0.0f64;
    let grid = system.space().low_discrepancy(SUP_GRID_POINTS);
    for x in grid.iter().chain(points) {
        let mut acc = phi.accumulator();
        for p in system.trajectory(*x).take(2 * l) {
            acc.push(&p?)?;
            c1 = c1.max(acc.value()?.abs());
        }
    }
    let c = 4.0 * c1;

    let n_top = n_list.iter().copied().max().unwrap_or(0);
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst = (points[0], 0);
    for &x in points {
        let orbit = system.orbit(x, n_top + l)?;
        let pts = orbit.points();
        // φ_n(x) for n = 0..=n_top, and block values φ_l(fⁱx).
        let mut phi_n = Vec::with_capacity(n_top + 1);
        let mut acc = phi.accumulator();
        phi_n.push(0.0);
        for p in &pts[..n_top] {
            acc.push(p)?;
            phi_n.push(acc.value()?);
        }
        let mut block_prefix = Vec::with_capacity(n_top + 1);
        block_prefix.push(0.0);
        let mut running = 0.0;
        for i in 0..n_top {
            let mut acc = phi.accumulator();
            for p in &pts[i..i + l] {
                acc.push(p)?;
            }
            running += acc.value()? / l as f64;
            block_prefix.push(running);
        }
        for &n in n_list {
            let v = phi_n[n] - c - block_prefix[n];
            if v > max_violation {
                max_violation = v;
                worst = (x, n);
            }
        }
    }
    Ok(LemmaSubReport {
        l,
        c1,
        c,
        pairs: points.len() * n_list.len(),
        max_violation,
        worst,
        passed: max_violation <= LEMMA_SUB_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{evaluate, MatrixFamily, Observable};

    fn doubling_samples(k: usize) -> Vec<Point> {
        DynamicalSystem::doubling().space().low_discrepancy(k)
    }

    #[test]
    fn defect_matches_direct_evaluation() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::cocycle(MatrixFamily::diag_cos());
        let x = Point::scalar(0.2718);
        let (n, m) = (13, 29);
        let fnx = f.orbit(x, n + 1).unwrap().points()[n];
        let direct = evaluate(&phi, &f, x, n + m).unwrap()
            - evaluate(&phi, &f, x, n).unwrap()
            - evaluate(&phi, &f, fnx, m).unwrap();
        assert!((defect(&phi, &f, x, n, m).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn additive_is_exact() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::birkhoff(Observable::cos_2pi());
        let r = check_subadditivity(&phi, &f, 200, 60, 7).unwrap();
        assert!(r.passed);
        assert!(r.max_violation <= 1e-9 && r.min_violation >= -1e-9, "{r:?}");
    }

    #[test]
    fn cocycles_pass() {
        let f = DynamicalSystem::doubling();
        for fam in [
            MatrixFamily::diag_half(),
            MatrixFamily::scaled_rotation(),
            MatrixFamily::diag_cos(),
        ] {
            let phi = SubadditivePotential::cocycle(fam);
            assert!(check_subadditivity(&phi, &f, 200, 80, 1).unwrap().passed);
            assert!(
                check_subadditivity(&phi.truncated(), &f, 200, 80, 2)
                    .unwrap()
                    .passed
            );
        }
    }

    #[test]
    fn squares_fail() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::tabulated("square", (1..=50).map(|n| n as f64).collect());
        let r = check_subadditivity(&phi, &f, 20, 50, 3).unwrap();
        assert!(!r.passed);
        let (_, n, m) = r.worst;
        assert_eq!(r.max_violation, 2.0 * (n * m) as f64);
    }

    #[test]
    fn same_seed_same_report() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::cocycle(MatrixFamily::diag_cos());
        let a = check_subadditivity(&phi, &f, 50, 40, 11).unwrap();
        let b = check_subadditivity(&phi, &f, 50, 40, 11).unwrap();
        assert_eq!(a.max_violation.to_bits(), b.max_violation.to_bits());
        assert_eq!(a.worst, b.worst);
    }

    #[test]
    fn additive_l1_slack_is_c() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::birkhoff(Observable::cos_2pi());
        let r = lemma_sub_check(&phi, &f, 1, &doubling_samples(20), &[1, 10, 100]).unwrap();
        assert!(r.passed);
        assert!((r.max_violation + r.c).abs() < 1e-9);
    }

    #[test]
    fn constant_rate_slack() {
        let f = DynamicalSystem::doubling();
        let c = -0.7;
        let phi = SubadditivePotential::birkhoff(Observable::constant(c));
        for l in [1, 3, 8] {
            let r = lemma_sub_check(&phi, &f, l, &doubling_samples(5), &[1, 7, 50]).unwrap();
            assert!((r.c1 - 2.0 * l as f64 * c.abs()).abs() < 1e-12);
            assert!((r.max_violation + r.c).abs() < 1e-9);
            assert!(r.passed);
        }
    }

    #[test]
    fn cocycle_lemma_sub() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::cocycle(MatrixFamily::diag_half());
        let r = lemma_sub_check(&phi, &f, 5, &doubling_samples(100), &[1, 10, 100, 1000]).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
