use crate::basins::{simplex_vertices, AttractorSpec};
use crate::dynamics::{DynamicalSystem, Point};
use crate::error::{Error, Result};
use crate::measures::periodic_points;
use crate::potentials::{Observable, SubadditivePotential};

/// Cubic smoothstep `3t² − 2t³` on `[0, 1]`.
#[inline]
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// A periodic orbit given by a point and its period.
#[derive(Clone, Copy, Debug)]
pub struct OrbitSeed {
    pub point: Point,
    pub period: usize,
}

/// `g` with value `−1` on one periodic orbit and `+1` on another, the
/// additive potential it generates, and that potential's negation.
#[derive(Clone, Debug)]
pub struct Prop43 {
    pub g: Observable,
    pub phi: SubadditivePotential,
    pub neg_phi: SubadditivePotential,
    pub o1: Vec<Point>,
    pub o2: Vec<Point>,
}

/// Builds `g = baseline` away from the orbits, `−1` on `O1`, `+1` on `O2`,
/// joined by smoothstep bumps of radius `bump_radius` in the space metric.
pub fn prop43_potential(
    system: &DynamicalSystem,
    o1: OrbitSeed,
    o2: OrbitSeed,
    bump_radius: f64,
    baseline: f64,
) -> Result<Prop43> {
    if !(bump_radius > 0.0) || !baseline.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bump radius must be positive and baseline finite, got {bump_radius}, {baseline}"
        )));
    }
    let p1 = periodic_points(system, o1.point, o1.period)?;
    let p2 = periodic_points(system, o2.point, o2.period)?;
    let space = system.space();
    let all: Vec<(Point, f64)> = p1
        .iter()
        .map(|p| (*p, -1.0))
        .chain(p2.iter().map(|p| (*p, 1.0)))
        .collect();
    for (i, (a, _)) in all.iter().enumerate() {
        for (b, _) in &all[i + 1..] {
            if space.distance(a, b) < 2.0 * bump_radius {
                return Err(Error::Overlap {
                    radius: bump_radius,
                });
            }
        }
    }
    let g = Observable::new("prop43", move |x| {
        for (c, value) in &all {
            let d = space.distance(x, c);
            if d < bump_radius {
                let s = smoothstep(1.0 - d / bump_radius);
                // exact at s = 1
                return value * s + baseline * (1.0 - s);
            }
        }
        baseline
    });
    let phi = SubadditivePotential::birkhoff(g.clone());
    let neg_phi = phi.negated()?;
    Ok(Prop43 {
        g,
        phi,
        neg_phi,
        o1: p1,
        o2: p2,
    })
}

/// `−1` within `0.1` of a vertex of the simplex, smoothstep-blended to `0`
/// at distance `0.2`.
pub fn vertex_well() -> Observable {
    let vertices = simplex_vertices();
    Observable::new("vertices", move |x| {
        let d = vertices
            .iter()
            .map(|v| x.euclidean_distance(v))
            .fold(f64::INFINITY, f64::min);
        -smoothstep((0.2 - d) / 0.1)
    })
}

/// The May–Leonard time-τ map with its vertex equilibria and the boundary
/// cycle as attractor.
pub fn may_leonard_system(
    alpha: f64,
    beta: f64,
    tau: f64,
) -> Result<(DynamicalSystem, [Point; 3], AttractorSpec)> {
    let system = DynamicalSystem::may_leonard(alpha, beta, tau)?;
    Ok((
        system,
        simplex_vertices(),
        AttractorSpec::simplex_boundary(),
    ))
}
