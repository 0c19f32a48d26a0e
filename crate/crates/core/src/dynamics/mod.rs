//! State spaces, self-maps and orbits.

mod flow;
mod point;
mod space;
mod system;

pub use flow::{
    LinearField, MayLeonardField, TimeTauMap, VectorField, ZeroField, DEFAULT_SUBSTEPS,
    DEFAULT_TAU, MAY_LEONARD_SUBSTEPS,
};
pub use point::{Fraction, Point};
pub(crate) use space::{simplex_centroids, square_midpoints};
pub use space::{wrap_unit, StateSpace, SIMPLEX_SUM_TOL};
pub use system::{DynamicalSystem, Orbit, Trajectory, DEFAULT_ORBIT_CAP, SYSTEM_NAMES};
