use std::fmt;

use rand::Rng;

use super::point::Point;
use crate::error::{Error, Result};

/// Tolerance on the coordinate sum of simplex points.
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;

/// Golden-ratio conjugate, used for the 1-D low-discrepancy sequence.
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// The compact state spaces supported by the toolkit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateSpace {
    /// `[0,1)` with wraparound.
    Circle,
    /// `[0,1]`.
    Interval,
    /// `[0,1)^2` with wraparound in both coordinates.
    Torus2,
    /// `{x in R^3 : x_i >= 0, sum x_i = 1}`.
    Simplex3,
    /// Closed Euclidean disk of the given radius centred at the origin.
    PlanarBall { radius: f64 },
}

impl StateSpace {
    pub fn dim(&self) -> usize {
        match self {
            StateSpace::Circle | StateSpace::Interval => 1,
            StateSpace::Torus2 | StateSpace::PlanarBall { .. } => 2,
            StateSpace::Simplex3 => 3,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        if p.dim() != self.dim() || !p.is_finite() {
            return false;
        }
        let c = p.coords();
        match *self {
            StateSpace::Circle => (0.0..1.0).contains(&c[0]),
            StateSpace::Interval => (0.0..=1.0).contains(&c[0]),
            StateSpace::Torus2 => c.iter().all(|v| (0.0..1.0).contains(v)),
            StateSpace::Simplex3 => {
                c.iter().all(|&v| v >= 0.0)
                    && (c.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_SUM_TOL
            }
            StateSpace::PlanarBall { radius } => c[0].hypot(c[1]) <= radius,
        }
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::DomainViolation {
                space: self.to_string(),
                point: p.to_string(),
            })
        }
    }

    /// The intrinsic metric.
    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        match self {
            StateSpace::Circle => circle_gap(a.x(), b.x()),
            StateSpace::Torus2 => {
                let dx = circle_gap(a.coords()[0], b.coords()[0]);
                let dy = circle_gap(a.coords()[1], b.coords()[1]);
                dx.hypot(dy)
            }
            StateSpace::Interval | StateSpace::Simplex3 | StateSpace::PlanarBall { .. } => {
                a.euclidean_distance(b)
            }
        }
    }

    /// A point drawn from the normalized Lebesgue (uniform) measure.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match *self {
            StateSpace::Circle | StateSpace::Interval => Point::scalar(rng.gen::<f64>()),
            StateSpace::Torus2 => Point::pair(rng.gen(), rng.gen()),
            StateSpace::Simplex3 => {
                let e: [f64; 3] = std::array::from_fn(|_| -(1.0 - rng.gen::<f64>()).ln());
                let s: f64 = e.iter().sum();
                Point::triple(e[0] / s, e[1] / s, e[2] / s)
            }
            StateSpace::PlanarBall { radius } => loop {
                let x = (2.0 * rng.gen::<f64>() - 1.0) * radius;
                let y = (2.0 * rng.gen::<f64>() - 1.0) * radius;
                if x.hypot(y) <= radius {
                    break Point::pair(x, y);
                }
            },
        }
    }

    /// `count` deterministic, well-spread points (golden-ratio / R2 sequences).
    pub fn low_discrepancy(&self, count: usize) -> Vec<Point> {
        // R2 sequence constants (plastic number)
        const A1: f64 = 0.754_877_666_246_692_7;
        const A2: f64 = 0.569_840_290_998_053_3;
        (0..count)
            .map(|i| {
                let i = i as f64;
                let u = (0.5 + A1 * i).fract();
                let v = (0.5 + A2 * i).fract();
                match *self {
                    StateSpace::Circle | StateSpace::Interval => {
                        Point::scalar((0.5 + GOLDEN * i).fract())
                    }
                    StateSpace::Torus2 => Point::pair(u, v),
                    StateSpace::Simplex3 => {
                        let (u, v) = if u + v > 1.0 {
                            (1.0 - u, 1.0 - v)
                        } else {
                            (u, v)
                        };
                        simplex_point(u, v)
                    }
                    StateSpace::PlanarBall { radius } => {
                        // area-preserving polar map of the unit square
                        let r = radius * u.sqrt();
                        let t = std::f64::consts::TAU * v;
                        Point::pair(r * t.cos(), r * t.sin())
                    }
                }
            })
            .collect()
    }

    /// Equal-weight quadrature nodes for normalized Lebesgue measure:
    /// 2048-point midpoint rule on circle/interval, 64x64 on the torus,
    /// centroids of the 32^2 sub-triangles on the simplex, and the 64x64
    /// midpoint grid clipped to the disk.
    pub fn quadrature(&self) -> Vec<Point> {
        match *self {
            StateSpace::Circle | StateSpace::Interval => (0..2048)
                .map(|i| Point::scalar((i as f64 + 0.5) / 2048.0))
                .collect(),
            StateSpace::Torus2 => square_midpoints(64, 0.0, 1.0),
            StateSpace::Simplex3 => simplex_centroids(32),
            StateSpace::PlanarBall { radius } => square_midpoints(64, -radius, radius)
                .into_iter()
                .filter(|p| self.contains(p))
                .collect(),
        }
    }

    /// Coordinate names used for CSV headers.
    pub fn coordinate_names(&self) -> Vec<String> {
        (1..=self.dim()).map(|i| format!("x{i}")).collect()
    }
}

impl fmt::Display for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpace::Circle => f.write_str("circle"),
            StateSpace::Interval => f.write_str("interval"),
            StateSpace::Torus2 => f.write_str("torus2"),
            StateSpace::Simplex3 => f.write_str("simplex3"),
            StateSpace::PlanarBall { radius } => write!(f, "planar-ball({radius})"),
        }
    }
}

/// Representative of `x` in `[0,1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let w = x - x.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

fn circle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

fn simplex_point(u: f64, v: f64) -> Point {
    Point::triple(u, v, (1.0 - u - v).max(0.0))
}

pub(crate) fn square_midpoints(per_axis: usize, lo: f64, hi: f64) -> Vec<Point> {
    let h = (hi - lo) / per_axis as f64;
    let mut out = Vec::with_capacity(per_axis * per_axis);
    for i in 0..per_axis {
        for j in 0..per_axis {
            out.push(Point::pair(
                lo + (i as f64 + 0.5) * h,
                lo + (j as f64 + 0.5) * h,
            ));
        }
    }
    out
}

/// Centroids of the `r^2` congruent triangles obtained by cutting the
/// simplex with lines parallel to its sides at spacing `1/r`.
pub(crate) fn simplex_centroids(r: usize) -> Vec<Point> {
    let rf = r as f64;
    let mut out = Vec::with_capacity(r * r);
    for i in 0..r {
        for j in 0..r - i {
            let k = r - 1 - i - j;
            out.push(Point::triple(
                (i as f64 + 1.0 / 3.0) / rf,
                (j as f64 + 1.0 / 3.0) / rf,
                (k as f64 + 1.0 / 3.0) / rf,
            ));
            if i + j + 2 <= r {
                let k = r - 2 - i - j;
                out.push(Point::triple(
                    (i as f64 + 2.0 / 3.0) / rf,
                    (j as f64 + 2.0 / 3.0) / rf,
                    (k as f64 + 2.0 / 3.0) / rf,
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn circle_metric_wraps() {
        let s = StateSpace::Circle;
        assert!((s.distance(&Point::scalar(0.05), &Point::scalar(0.95)) - 0.1).abs() < 1e-15);
        assert_eq!(s.distance(&Point::scalar(0.3), &Point::scalar(0.3)), 0.0);
    }

    #[test]
    fn membership() {
        assert!(StateSpace::Circle.contains(&Point::scalar(0.0)));
        assert!(!StateSpace::Circle.contains(&Point::scalar(1.0)));
        assert!(StateSpace::Interval.contains(&Point::scalar(1.0)));
        assert!(StateSpace::Simplex3.contains(&Point::triple(0.5, 0.3, 0.2)));
        assert!(!StateSpace::Simplex3.contains(&Point::triple(0.5, 0.3, 0.3)));
        assert!(!StateSpace::Simplex3.contains(&Point::triple(1.1, -0.1, 0.0)));
        assert!(!StateSpace::PlanarBall { radius: 1.0 }.contains(&Point::pair(0.8, 0.8)));
        assert!(!StateSpace::Circle.contains(&Point::pair(0.1, 0.1)));
    }

    #[test]
    fn metric_axioms_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for space in [
            StateSpace::Circle,
            StateSpace::Interval,
            StateSpace::Torus2,
            StateSpace::Simplex3,
            StateSpace::PlanarBall { radius: 2.0 },
        ] {
            for _ in 0..500 {
                let (a, b, c) = (
                    space.sample(&mut rng),
                    space.sample(&mut rng),
                    space.sample(&mut rng),
                );
                assert!(space.contains(&a), "{space} {a}");
                assert_eq!(space.distance(&a, &a), 0.0);
                assert_eq!(space.distance(&a, &b), space.distance(&b, &a));
                assert!(
                    space.distance(&a, &c)
                        <= space.distance(&a, &b) + space.distance(&b, &c) + 1e-12
                );
            }
        }
    }

    #[test]
    fn simplex_cells_partition() {
        let cells = simplex_centroids(20);
        assert_eq!(cells.len(), 400);
        assert!(cells.iter().all(|p| StateSpace::Simplex3.contains(p)));
        let bary = Point::triple(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
        assert!(cells.iter().any(|p| p.euclidean_distance(&bary) < 1e-12));
    }

    #[test]
    fn quadrature_points_are_members() {
        for space in [
            StateSpace::Circle,
            StateSpace::Torus2,
            StateSpace::Simplex3,
            StateSpace::PlanarBall { radius: 1.0 },
        ] {
            let q = space.quadrature();
            assert!(!q.is_empty());
            assert!(q.iter().all(|p| space.contains(p)));
            assert!(space.low_discrepancy(100).iter().all(|p| space.contains(p)));
        }
    }
}
