use std::cmp::Ordering;

use crate::dynamics::{DynamicalSystem, Point, StateSpace};
use crate::error::{Error, Result};

/// Point masses closer than this (in every coordinate) are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// Tolerance for the orbit-closing check of periodic-orbit measures.
pub const PERIOD_TOL: f64 = 1e-9;

const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Atoms(Vec<(Point, f64)>),
    Lebesgue,
    Mixture(Vec<(Measure, f64)>),
}

/// A Borel probability measure on a [`StateSpace`]: finitely many point
/// masses, normalized Lebesgue measure (integrated by quadrature), or a
/// convex combination of measures.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    space: StateSpace,
    repr: Repr,
}

impl Measure {
    pub fn dirac(space: StateSpace, p: Point) -> Result<Self> {
        space.check(&p)?;
        Ok(Measure {
            space,
            repr: Repr::Atoms(vec![(p, 1.0)]),
        })
    }

    /// Point masses; duplicates within [`MERGE_TOL`] are merged and atoms
    /// are stored in lexicographic coordinate order.
    pub fn from_atoms(space: StateSpace, atoms: Vec<(Point, f64)>) -> Result<Self> {
        for (p, _) in &atoms {
            space.check(p)?;
        }
        check_weights(atoms.iter().map(|(_, w)| *w), atoms.len())?;
        Ok(Measure {
            space,
            repr: Repr::Atoms(merge_atoms(atoms)),
        })
    }

    pub fn lebesgue(space: StateSpace) -> Self {
        Measure {
            space,
            repr: Repr::Lebesgue,
        }
    }

    /// Convex combination. Purely atomic mixtures are flattened into a single
    /// atomic measure.
    pub fn mixture(parts: Vec<(Measure, f64)>) -> Result<Self> {
        let Some((first, _)) = parts.first() else {
            return Err(Error::InvalidArgument(
                "mixture needs at least one part".into(),
            ));
        };
        let space = first.space;
        if let Some((other, _)) = parts.iter().find(|(m, _)| m.space != space) {
            return Err(Error::SpaceMismatch {
                left: space.to_string(),
                right: other.space.to_string(),
            });
        }
        check_weights(parts.iter().map(|(_, c)| *c), parts.len())?;
        if parts.iter().all(|(m, _)| matches!(m.repr, Repr::Atoms(_))) {
            let atoms = parts
                .iter()
                .flat_map(|(m, c)| m.atoms().unwrap().iter().map(move |(p, w)| (*p, c * w)))
                .collect();
            return Ok(Measure {
                space,
                repr: Repr::Atoms(merge_atoms(atoms)),
            });
        }
        Ok(Measure {
            space,
            repr: Repr::Mixture(parts),
        })
    }

    /// Equidistributed measure on the periodic orbit of `x` with the given
    /// period. Fails with [`Error::NonPeriodic`] if `f^period(x)` is farther
    /// than [`PERIOD_TOL`] from `x`.
    pub fn periodic_orbit(system: &DynamicalSystem, x: Point, period: usize) -> Result<Self> {
        let points = periodic_points(system, x, period)?;
        let w = 1.0 / period as f64;
        Self::from_atoms(system.space(), points.into_iter().map(|p| (p, w)).collect())
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn atoms(&self) -> Option<&[(Point, f64)]> {
        match &self.repr {
            Repr::Atoms(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_lebesgue(&self) -> bool {
        matches!(self.repr, Repr::Lebesgue)
    }

    /// `∫ g dμ`: exact weighted sum for atoms, quadrature for Lebesgue,
    /// linear in mixtures.
    pub fn integrate(&self, g: impl Fn(&Point) -> f64) -> f64 {
        let mut total = 0.0;
        self.for_each_weighted(&mut |p, w| total += w * g(p));
        total
    }

    /// Visits every (node, weight) pair of the measure's representation.
    pub(crate) fn for_each_weighted(&self, visit: &mut dyn FnMut(&Point, f64)) {
        match &self.repr {
            Repr::Atoms(atoms) => {
                for (p, w) in atoms {
                    visit(p, *w);
                }
            }
            Repr::Lebesgue => {
                let nodes = self.space.quadrature();
                let w = 1.0 / nodes.len() as f64;
                for p in &nodes {
                    visit(p, w);
                }
            }
            Repr::Mixture(parts) => {
                for (m, c) in parts {
                    m.for_each_weighted(&mut |p, w| visit(p, c * w));
                }
            }
        }
    }
}

/// Points of the periodic orbit through `x`, after checking it closes.
pub fn periodic_points(system: &DynamicalSystem, x: Point, period: usize) -> Result<Vec<Point>> {
    if period == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    let orbit = system.orbit(x, period + 1)?;
    let points = orbit.points();
    let gap = system.space().distance(&points[0], &points[period]);
    if gap > PERIOD_TOL {
        return Err(Error::NonPeriodic {
            point: x.to_string(),
            period,
            gap,
        });
    }
    Ok(points[..period].to_vec())
}

fn check_weights(weights: impl Iterator<Item = f64>, count: usize) -> Result<()> {
    // Neumaier summation so the check is not dominated by accumulation error
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for w in weights {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "weights must be finite and non-negative, got {w}"
            )));
        }
        let t = sum + w;
        comp += if sum.abs() >= w.abs() {
            (sum - t) + w
        } else {
            (w - t) + sum
        };
        sum = t;
    }
    let total = sum + comp;
    let tol = WEIGHT_SUM_TOL + count as f64 * f64::EPSILON;
    if (total - 1.0).abs() > tol {
        return Err(Error::InvalidArgument(format!(
            "weights must sum to 1, got {total}"
        )));
    }
    Ok(())
}

fn lexicographic(a: &Point, b: &Point) -> Ordering {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

pub(crate) fn merge_atoms(mut atoms: Vec<(Point, f64)>) -> Vec<(Point, f64)> {
    atoms.sort_by(|a, b| lexicographic(&a.0, &b.0));
    let mut out: Vec<(Point, f64)> = Vec::with_capacity(atoms.len());
    for (p, w) in atoms {
        match out.last_mut() {
            Some((q, acc))
                if q.coords()
                    .iter()
                    .zip(p.coords())
                    .all(|(a, b)| (a - b).abs() <= MERGE_TOL) =>
            {
                *acc += w
            }
            _ => out.push((p, w)),
        }
    }
    out
}

/// `δ_{x,n} = (1/n) Σ_{j<n} δ_{f^j x}`, stored as the orbit itself so that
/// `δ_{x,n+1} = (n δ_{x,n} + δ_{f^n x}) / (n+1)` holds by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    space: StateSpace,
    points: Vec<Point>,
}

impl EmpiricalMeasure {
    pub fn new(system: &DynamicalSystem, x: Point, n: usize) -> Result<Self> {
        let orbit = system.orbit(x, n)?;
        Ok(EmpiricalMeasure {
            space: system.space(),
            points: orbit.points().to_vec(),
        })
    }

    /// Advances `δ_{x,n}` to `δ_{x,n+1}` by appending `f^n x`.
    pub fn extend(&mut self, system: &DynamicalSystem) -> Result<()> {
        let last = *self
            .points
            .last()
            .expect("empirical measures are non-empty");
        let next = system.step(&last)?;
        self.points.push(next);
        Ok(())
    }

    pub fn base(&self) -> Point {
        self.points[0]
    }

    pub fn horizon(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn integrate(&self, g: impl Fn(&Point) -> f64) -> f64 {
        self.points.iter().map(g).sum::<f64>() / self.points.len() as f64
    }

    /// Canonical atomic measure with merged duplicates.
    pub fn to_measure(&self) -> Measure {
        let w = 1.0 / self.points.len() as f64;
        Measure {
            space: self.space,
            repr: Repr::Atoms(merge_atoms(self.points.iter().map(|p| (*p, w)).collect())),
        }
    }
}

/// `δ_{x,n}` for `system`.
pub fn empirical_measure(system: &DynamicalSystem, x: Point, n: usize) -> Result<EmpiricalMeasure> {
    EmpiricalMeasure::new(system, x, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Fraction;
    use std::f64::consts::TAU;

    fn cos2pi(p: &Point) -> f64 {
        (TAU * p.x()).cos()
    }

    #[test]
    fn lebesgue_integral_of_cosine_vanishes() {
        assert!(
            Measure::lebesgue(StateSpace::Circle)
                .integrate(cos2pi)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn dirac_integral() {
        let d = Measure::dirac(StateSpace::Circle, Point::scalar(0.25)).unwrap();
        assert!(d.integrate(cos2pi).abs() < 1e-15);
    }

    #[test]
    fn mixture_is_linear() {
        let a = Measure::dirac(StateSpace::Circle, Point::scalar(0.1)).unwrap();
        let b = Measure::dirac(StateSpace::Circle, Point::scalar(0.7)).unwrap();
        let m = Measure::mixture(vec![(a, 0.5), (b, 0.5)]).unwrap();
        let g = |p: &Point| p.x() * p.x();
        assert!((m.integrate(g) - (0.01 + 0.49) / 2.0).abs() < 1e-15);
        assert_eq!(m.atoms().unwrap().len(), 2);
    }

    #[test]
    fn mixed_with_lebesgue_keeps_structure() {
        let d = Measure::dirac(StateSpace::Circle, Point::scalar(0.0)).unwrap();
        let m = Measure::mixture(vec![
            (d, 0.25),
            (Measure::lebesgue(StateSpace::Circle), 0.75),
        ])
        .unwrap();
        assert!(m.atoms().is_none());
        assert!((m.integrate(cos2pi) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn invalid_weights() {
        let p = Point::scalar(0.1);
        assert!(Measure::from_atoms(StateSpace::Circle, vec![(p, 0.6)]).is_err());
        assert!(Measure::from_atoms(
            StateSpace::Circle,
            vec![(p, 1.5), (Point::scalar(0.2), -0.5)]
        )
        .is_err());
        assert!(Measure::from_atoms(StateSpace::Circle, vec![(Point::scalar(2.0), 1.0)]).is_err());
        let d = Measure::dirac(StateSpace::Circle, p).unwrap();
        let s = Measure::dirac(StateSpace::Simplex3, Point::triple(1.0, 0.0, 0.0)).unwrap();
        assert!(matches!(
            Measure::mixture(vec![(d, 0.5), (s, 0.5)]),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn empirical_examples() {
        let f = DynamicalSystem::doubling();
        let e = empirical_measure(&f, Point::scalar(0.4), 1)
            .unwrap()
            .to_measure();
        assert_eq!(e.atoms().unwrap(), &[(Point::scalar(0.4), 1.0)][..]);

        let third = Point::exact(Fraction::new(1, 3).unwrap());
        let e = empirical_measure(&f, third, 4).unwrap().to_measure();
        let atoms = e.atoms().unwrap();
        assert_eq!(atoms.len(), 2);
        assert_eq!((atoms[0].0.x(), atoms[0].1), (1.0 / 3.0, 0.5));
        assert_eq!((atoms[1].0.x(), atoms[1].1), (2.0 / 3.0, 0.5));

        let e = empirical_measure(&f, Point::scalar(0.0), 100)
            .unwrap()
            .to_measure();
        assert_eq!(e.atoms().unwrap().len(), 1);
        assert!((e.atoms().unwrap()[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_update_identity() {
        let f = DynamicalSystem::rotation(0.1234567);
        let mut e = empirical_measure(&f, Point::scalar(0.3), 1).unwrap();
        for n in 1..200 {
            let direct = empirical_measure(&f, Point::scalar(0.3), n + 1).unwrap();
            let prefix = e.points().to_vec();
            let next = f.step(prefix.last().unwrap()).unwrap();
            e.extend(&f).unwrap();
            assert_eq!(e, direct);
            assert_eq!(&e.points()[..n], &prefix[..]);
            assert_eq!(e.points()[n], next);
        }
    }

    #[test]
    fn periodic_orbit_measure() {
        let f = DynamicalSystem::doubling();
        let m = Measure::periodic_orbit(&f, Point::scalar(1.0 / 3.0), 2).unwrap();
        assert_eq!(m.atoms().unwrap().len(), 2);
        assert!(matches!(
            Measure::periodic_orbit(&f, Point::scalar(0.1), 3),
            Err(Error::NonPeriodic { .. })
        ));
    }
}
