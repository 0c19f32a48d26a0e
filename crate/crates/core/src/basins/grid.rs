use crate::dynamics::{simplex_centroids, square_midpoints, Fraction, Point, StateSpace};
use crate::error::{Error, Result};

/// Uniform midpoint grid over a state space: `R` cells on circle and
/// interval, `R×R` on the torus and (clipped) disk, and the `R²`
/// congruent sub-triangles of the simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    space: StateSpace,
    resolution: usize,
    cells: Vec<Point>,
    excluded: usize,
    jittered: usize,
}

impl Grid {
    /// Default resolution: 10⁴ cells in one dimension, 100×100 in two,
    /// 20 subdivisions (400 cells) on the simplex.
    pub fn default_resolution(space: StateSpace) -> usize {
        match space {
            StateSpace::Circle | StateSpace::Interval => 10_000,
            StateSpace::Torus2 | StateSpace::PlanarBall { .. } => 100,
            StateSpace::Simplex3 => 20,
        }
    }

    pub fn uniform(space: StateSpace, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid resolution must be at least 2, got {resolution}"
            )));
        }
        let r = resolution;
        let cells = match space {
            StateSpace::Circle => {
                if r as u64 > Fraction::MAX_DEN / 2 {
                    return Err(Error::ResourceLimit {
                        what: "circle grid resolution",
                        requested: r,
                        limit: (Fraction::MAX_DEN / 2) as usize,
                    });
                }
                // exact centers (2i+1)/(2R)
                (0..r as u64)
                    .map(|i| {
                        Point::exact(
                            Fraction::new(2 * i + 1, 2 * r as u64).expect("valid fraction"),
                        )
                    })
                    .collect()
            }
            StateSpace::Interval => (0..r)
                .map(|i| Point::scalar((i as f64 + 0.5) / r as f64))
                .collect(),
            StateSpace::Torus2 => square_midpoints(r, 0.0, 1.0),
            StateSpace::Simplex3 => simplex_centroids(r),
            StateSpace::PlanarBall { radius } => square_midpoints(r, -radius, radius)
                .into_iter()
                .filter(|p| space.contains(p))
                .collect(),
        };
        Ok(Grid {
            space,
            resolution,
            cells,
            excluded: 0,
            jittered: 0,
        })
    }

    /// Drops the cells whose center lies within `radius` of `center`.
    pub fn excluding_ball(mut self, center: &Point, radius: f64) -> Result<Self> {
        self.space.check(center)?;
        let before = self.cells.len();
        let space = self.space;
        self.cells.retain(|c| space.distance(c, center) > radius);
        self.excluded += before - self.cells.len();
        Ok(self)
    }

    /// Shifts cells whose center coincides with one of `points` by half a
    /// cell, so that measure-zero special points do not dominate small grids.
    pub fn avoiding(mut self, points: &[Point]) -> Self {
        let h = 0.5 * self.cell_width();
        let space = self.space;
        let mut jittered = 0;
        for c in &mut self.cells {
            if !points.iter().any(|p| space.distance(c, p) < 1e-15) {
                continue;
            }
            let candidates = shifted(space, c, h);
            if let Some(moved) = candidates.into_iter().find(|q| space.contains(q)) {
                *c = moved;
                jittered += 1;
            }
        }
        self.jittered += jittered;
        self
    }

    /// Linear size of a cell.
    pub fn cell_width(&self) -> f64 {
        let r = self.resolution as f64;
        match self.space {
            StateSpace::PlanarBall { radius } => 2.0 * radius / r,
            _ => 1.0 / r,
        }
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn cells(&self) -> &[Point] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn excluded(&self) -> usize {
        self.excluded
    }

    pub fn jittered(&self) -> usize {
        self.jittered
    }

    /// One-line description for report headers.
    pub fn describe(&self) -> String {
        let layout = match self.space {
            StateSpace::Circle | StateSpace::Interval => format!("{} cells", self.resolution),
            StateSpace::Torus2 | StateSpace::PlanarBall { .. } => {
                format!("{0}x{0} cells", self.resolution)
            }
            StateSpace::Simplex3 => format!("{}^2 barycentric cells", self.resolution),
        };
        format!(
            "{} midpoint grid on {}, {} used, {} excluded, {} jittered",
            layout,
            self.space,
            self.cells.len(),
            self.excluded,
            self.jittered
        )
    }
}

fn shifted(space: StateSpace, c: &Point, h: f64) -> Vec<Point> {
    let x = c.coords();
    match space {
        StateSpace::Circle => {
            let v = x[0] + h;
            vec![Point::scalar(if v >= 1.0 { v - 1.0 } else { v })]
        }
        StateSpace::Interval => vec![Point::scalar(x[0] + h), Point::scalar(x[0] - h)],
        StateSpace::Torus2 => vec![Point::pair((x[0] + h).fract(), x[1])],
        StateSpace::PlanarBall { .. } => {
            vec![Point::pair(x[0] + h, x[1]), Point::pair(x[0] - h, x[1])]
        }
        StateSpace::Simplex3 => vec![
            Point::triple(x[0] + h, x[1] - h / 2.0, x[2] - h / 2.0),
            Point::triple(x[0] - h, x[1] + h / 2.0, x[2] + h / 2.0),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_counts() {
        assert_eq!(
            Grid::uniform(StateSpace::Circle, 10_000).unwrap().len(),
            10_000
        );
        assert_eq!(
            Grid::uniform(StateSpace::Torus2, 100).unwrap().len(),
            10_000
        );
        assert_eq!(Grid::uniform(StateSpace::Simplex3, 20).unwrap().len(), 400);
        assert!(Grid::uniform(StateSpace::Interval, 1).is_err());
        let disk = Grid::uniform(StateSpace::PlanarBall { radius: 1.0 }, 100).unwrap();
        let ratio = disk.len() as f64 / 10_000.0;
        assert!((ratio - std::f64::consts::FRAC_PI_4).abs() < 0.01);
    }

    #[test]
    fn circle_centers_are_exact() {
        let g = Grid::uniform(StateSpace::Circle, 4).unwrap();
        let got: Vec<String> = g.cells().iter().map(|p| p.to_string()).collect();
        assert_eq!(got, ["1/8", "3/8", "5/8", "7/8"]);
    }

    #[test]
    fn barycenter_exclusion() {
        let b = Point::triple(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
        let g = Grid::uniform(StateSpace::Simplex3, 20)
            .unwrap()
            .excluding_ball(&b, 0.05)
            .unwrap();
        assert!(g.excluded() >= 1);
        assert!(g.cells().iter().all(|c| c.euclidean_distance(&b) > 0.05));
        assert!(g.cells().iter().all(|c| StateSpace::Simplex3.contains(c)));
    }

    #[test]
    fn jitter_moves_only_coincident_cells() {
        let b = Point::triple(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
        let base = Grid::uniform(StateSpace::Simplex3, 20).unwrap();
        let g = base.clone().avoiding(&[b]);
        assert_eq!(g.jittered(), 1);
        let moved: Vec<_> = base
            .cells()
            .iter()
            .zip(g.cells())
            .filter(|(a, b)| a != b)
            .collect();
        assert_eq!(moved.len(), 1);
        assert!(StateSpace::Simplex3.contains(moved[0].1));
        let g = Grid::uniform(StateSpace::Interval, 2)
            .unwrap()
            .avoiding(&[Point::scalar(0.25)]);
        assert_eq!(g.cells()[0], Point::scalar(0.5));
    }
}
