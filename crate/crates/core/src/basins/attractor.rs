use std::fmt;

use crate::dynamics::{Point, StateSpace};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Points(Vec<Point>),
    /// Piecewise-linear curve through the vertices, measured in the
    /// ambient Euclidean coordinates.
    Polyline {
        vertices: Vec<Point>,
        closed: bool,
    },
}

/// A compact set `K` given as a finite point set or a polygonal curve;
/// `N_ε(K) = {x : d(x, K) < ε}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AttractorSpec {
    label: String,
    space: StateSpace,
    shape: Shape,
}

impl AttractorSpec {
    pub fn points(label: impl Into<String>, space: StateSpace, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument(
                "attractor needs at least one point".into(),
            ));
        }
        for p in &points {
            space.check(p)?;
        }
        Ok(AttractorSpec {
            label: label.into(),
            space,
            shape: Shape::Points(points),
        })
    }

    /// Polygonal curve through `vertices`; only for spaces without
    /// wraparound, where the space metric is Euclidean.
    pub fn polyline(
        label: impl Into<String>,
        space: StateSpace,
        vertices: Vec<Point>,
        closed: bool,
    ) -> Result<Self> {
        if matches!(space, StateSpace::Circle | StateSpace::Torus2) {
            return Err(Error::InvalidArgument(format!(
                "polyline attractors are not supported on {space}"
            )));
        }
        if vertices.len() < 2 {
            return Err(Error::InvalidArgument(
                "polyline needs at least two vertices".into(),
            ));
        }
        for p in &vertices {
            space.check(p)?;
        }
        Ok(AttractorSpec {
            label: label.into(),
            space,
            shape: Shape::Polyline { vertices, closed },
        })
    }

    /// The boundary triangle `e1 – e2 – e3 – e1` of the simplex.
    pub fn simplex_boundary() -> Self {
        let e = simplex_vertices();
        AttractorSpec::polyline("simplex-boundary", StateSpace::Simplex3, e.to_vec(), true)
            .expect("vertices lie in the simplex")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    /// `d(x, K)`.
    pub fn distance(&self, x: &Point) -> f64 {
        match &self.shape {
            Shape::Points(points) => points
                .iter()
                .map(|k| self.space.distance(x, k))
                .fold(f64::INFINITY, f64::min),
            Shape::Polyline { vertices, closed } => {
                let n = vertices.len();
                let segments = if *closed { n } else { n - 1 };
                (0..segments)
                    .map(|i| segment_distance(x, &vertices[i], &vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// `x ∈ N_ε(K)`.
    pub fn within(&self, x: &Point, epsilon: f64) -> bool {
        self.distance(x) < epsilon
    }

    /// `count` points of `K`: the points themselves, or equally spaced
    /// points by arc length along the curve.
    pub fn sample(&self, count: usize) -> Vec<Point> {
        match &self.shape {
            Shape::Points(points) => points.clone(),
            Shape::Polyline { vertices, closed } => {
                let n = vertices.len();
                let segs: Vec<(Point, Point)> = (0..if *closed { n } else { n - 1 })
                    .map(|i| (vertices[i], vertices[(i + 1) % n]))
                    .collect();
                let lengths: Vec<f64> = segs.iter().map(|(a, b)| a.euclidean_distance(b)).collect();
                let total: f64 = lengths.iter().sum();
                let steps = if *closed {
                    count
                } else {
                    count.saturating_sub(1).max(1)
                };
                (0..count)
                    .map(|j| {
                        let mut s = total * j as f64 / steps as f64;
                        let mut i = 0;
                        while i + 1 < segs.len() && s > lengths[i] {
                            s -= lengths[i];
                            i += 1;
                        }
                        let t = if lengths[i] > 0.0 {
                            (s / lengths[i]).min(1.0)
                        } else {
                            0.0
                        };
                        lerp(&segs[i].0, &segs[i].1, t)
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for AttractorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Points(p) => write!(f, "{} ({} points on {})", self.label, p.len(), self.space),
            Shape::Polyline { vertices, closed } => write!(
                f,
                "{} ({} polyline with {} vertices on {})",
                self.label,
                if *closed { "closed" } else { "open" },
                vertices.len(),
                self.space
            ),
        }
    }
}

/// `e1, e2, e3`.
pub fn simplex_vertices() -> [Point; 3] {
    [
        Point::triple(1.0, 0.0, 0.0),
        Point::triple(0.0, 1.0, 0.0),
        Point::triple(0.0, 0.0, 1.0),
    ]
}

fn lerp(a: &Point, b: &Point, t: f64) -> Point {
    let (a, b) = (a.coords(), b.coords());
    let c: Vec<f64> = a.iter().zip(b).map(|(u, v)| u + t * (v - u)).collect();
    Point::new(&c)
}

fn segment_distance(x: &Point, a: &Point, b: &Point) -> f64 {
    let (x, a, b) = (x.coords(), a.coords(), b.coords());
    let mut ab2 = 0.0;
    let mut dot = 0.0;
    for i in 0..x.len() {
        let ab = b[i] - a[i];
        ab2 += ab * ab;
        dot += (x[i] - a[i]) * ab;
    }
    let t = if ab2 > 0.0 {
        (dot / ab2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (0..x.len())
        .map(|i| {
            let d = x[i] - (a[i] + t * (b[i] - a[i]));
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_set_distance_uses_space_metric() {
        let k =
            AttractorSpec::points("zero", StateSpace::Circle, vec![Point::scalar(0.0)]).unwrap();
        assert!((k.distance(&Point::scalar(0.95)) - 0.05).abs() < 1e-12);
        assert!(k.within(&Point::scalar(0.96), 0.05));
        assert!(!k.within(&Point::scalar(0.1), 0.1));
    }

    #[test]
    fn boundary_distance() {
        let k = AttractorSpec::simplex_boundary();
        for e in simplex_vertices() {
            assert_eq!(k.distance(&e), 0.0);
        }
        let mid = Point::triple(0.5, 0.5, 0.0);
        assert!(k.distance(&mid) < 1e-15);
        // sampled-curve oracle and the closed form sqrt(1/6)
        let b = Point::triple(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
        let sampled = k
            .sample(30_000)
            .iter()
            .map(|p| p.euclidean_distance(&b))
            .fold(f64::INFINITY, f64::min);
        assert!((k.distance(&b) - sampled).abs() < 1e-6);
        assert!((k.distance(&b) - (1.0f64 / 6.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn samples_lie_on_the_curve() {
        let k = AttractorSpec::simplex_boundary();
        let pts = k.sample(300);
        assert_eq!(pts.len(), 300);
        assert!(pts
            .iter()
            .all(|p| StateSpace::Simplex3.contains(p) && k.distance(p) < 1e-12));
    }

    #[test]
    fn rejects_points_outside() {
        assert!(
            AttractorSpec::points("bad", StateSpace::Interval, vec![Point::scalar(2.0)]).is_err()
        );
        assert!(AttractorSpec::polyline(
            "c",
            StateSpace::Circle,
            vec![Point::scalar(0.1), Point::scalar(0.2)],
            false
        )
        .is_err());
    }
}
