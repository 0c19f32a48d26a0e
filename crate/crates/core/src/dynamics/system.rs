use std::fmt;
use std::sync::Arc;

use super::flow::{MayLeonardField, TimeTauMap, VectorField, MAY_LEONARD_SUBSTEPS};
use super::point::{Fraction, Point};
use super::space::{wrap_unit, StateSpace};
use crate::error::{Error, Result};
use crate::parse::parse_real;

/// Default cap on stored orbit length.
pub const DEFAULT_ORBIT_CAP: usize = 10_000_000;

/// Names accepted by [`DynamicalSystem::from_name`].
pub const SYSTEM_NAMES: [&str; 4] = [
    "doubling",
    "rotation:<alpha>",
    "interval-halving",
    "may-leonard:<alpha>,<beta>,<tau>",
];

type CustomMap = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

#[derive(Clone)]
enum SelfMap {
    /// `x ↦ 2x mod 1`, evaluated on exact fractions.
    Doubling,
    Rotation {
        alpha: f64,
    },
    IntervalHalving,
    Flow(Arc<TimeTauMap>),
    Custom(CustomMap),
}

/// A continuous self-map of a compact state space.
///
/// Systems are immutable and cheap to clone; `step` is pure.
#[derive(Clone)]
pub struct DynamicalSystem {
    space: StateSpace,
    map: SelfMap,
    label: String,
    orbit_cap: usize,
}

impl fmt::Debug for DynamicalSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicalSystem")
            .field("label", &self.label)
            .field("space", &self.space)
            .finish()
    }
}

impl DynamicalSystem {
    pub fn doubling() -> Self {
        Self::with_map(StateSpace::Circle, SelfMap::Doubling, "doubling".into())
    }

    pub fn rotation(alpha: f64) -> Self {
        let alpha = wrap_unit(alpha);
        Self::with_map(
            StateSpace::Circle,
            SelfMap::Rotation { alpha },
            format!("rotation:{alpha}"),
        )
    }

    pub fn interval_halving() -> Self {
        Self::with_map(
            StateSpace::Interval,
            SelfMap::IntervalHalving,
            "interval-halving".into(),
        )
    }

    /// Time-τ map of `field` with fixed-step RK4 and projection onto `space`.
    pub fn flow_time_tau_map(
        field: Arc<dyn VectorField>,
        space: StateSpace,
        tau: f64,
        substeps: usize,
    ) -> Result<Self> {
        let label = format!("flow:{}:tau={tau}:substeps={substeps}", field.describe());
        let map = TimeTauMap::new(field, space, tau, substeps)?;
        Ok(Self::with_map(space, SelfMap::Flow(Arc::new(map)), label))
    }

    /// The May–Leonard time-τ map on the simplex in the attracting
    /// heteroclinic-cycle regime `alpha < 1 < beta`, `alpha + beta > 2`.
    pub fn may_leonard(alpha: f64, beta: f64, tau: f64) -> Result<Self> {
        if !(alpha + beta > 2.0 && alpha < 1.0 && 1.0 < beta) {
            return Err(Error::ParameterRegime(format!(
                "may-leonard needs alpha + beta > 2 and alpha < 1 < beta, got alpha={alpha}, beta={beta}"
            )));
        }
        let mut system = Self::flow_time_tau_map(
            Arc::new(MayLeonardField { alpha, beta }),
            StateSpace::Simplex3,
            tau,
            MAY_LEONARD_SUBSTEPS,
        )?;
        system.label = format!("may-leonard:{alpha},{beta},{tau}");
        Ok(system)
    }

    /// Wraps an arbitrary map. The closure must send the space into itself;
    /// `step` verifies this on every call.
    pub fn custom(
        space: StateSpace,
        label: impl Into<String>,
        map: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        Self::with_map(space, SelfMap::Custom(Arc::new(map)), label.into())
    }

    /// Resolves one of [`SYSTEM_NAMES`].
    pub fn from_name(name: &str) -> Result<Self> {
        let (head, args) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        match (head, args) {
            ("doubling", None) => Ok(Self::doubling()),
            ("interval-halving", None) => Ok(Self::interval_halving()),
            ("rotation", Some(a)) => {
                let alpha = if a == "golden" {
                    (5f64.sqrt() - 1.0) / 2.0
                } else {
                    parse_real(a).ok_or_else(|| {
                        Error::parse(name, head.len() + 1, "expected a real rotation angle")
                    })?
                };
                Ok(Self::rotation(alpha))
            }
            ("may-leonard", Some(a)) => {
                let parts: Vec<&str> = a.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::parse(
                        name,
                        head.len() + 1,
                        "expected <alpha>,<beta>,<tau>",
                    ));
                }
                let mut vals = [0.0; 3];
                let mut offset = head.len() + 1;
                for (v, part) in vals.iter_mut().zip(&parts) {
                    *v = parse_real(part)
                        .ok_or_else(|| Error::parse(name, offset, "expected a real number"))?;
                    offset += part.len() + 1;
                }
                Self::may_leonard(vals[0], vals[1], vals[2])
            }
            _ => Err(Error::unknown("system", name, SYSTEM_NAMES)),
        }
    }

    fn with_map(space: StateSpace, map: SelfMap, label: String) -> Self {
        DynamicalSystem {
            space,
            map,
            label,
            orbit_cap: DEFAULT_ORBIT_CAP,
        }
    }

    pub fn with_orbit_cap(mut self, cap: usize) -> Self {
        self.orbit_cap = cap;
        self
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn time_tau_map(&self) -> Option<&TimeTauMap> {
        match &self.map {
            SelfMap::Flow(m) => Some(m),
            _ => None,
        }
    }

    /// One application of the map.
    pub fn step(&self, x: &Point) -> Result<Point> {
        self.space.check(x)?;
        let next = match &self.map {
            SelfMap::Doubling => {
                let f = x.fraction().unwrap_or_else(|| Fraction::approximate(x.x()));
                Point::exact(f.double_mod1())
            }
            SelfMap::Rotation { alpha } => Point::scalar(wrap_unit(x.x() + alpha)),
            SelfMap::IntervalHalving => Point::scalar(x.x() / 2.0),
            SelfMap::Flow(m) => m.apply(x)?,
            SelfMap::Custom(f) => f(x),
        };
        if !next.is_finite() {
            return Err(Error::NonFiniteState {
                point: next.to_string(),
            });
        }
        self.space.check(&next)?;
        Ok(next)
    }

    /// The lazily evaluated forward orbit `x0, f(x0), f²(x0), …`.
    pub fn trajectory(&self, x0: Point) -> Trajectory<'_> {
        Trajectory {
            system: self,
            current: Some(x0),
            started: false,
        }
    }

    /// The first `n` points of the orbit of `x0`.
    pub fn orbit(&self, x0: Point, n: usize) -> Result<Orbit> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "orbit length must be at least 1".into(),
            ));
        }
        if n > self.orbit_cap {
            return Err(Error::ResourceLimit {
                what: "orbit length",
                requested: n,
                limit: self.orbit_cap,
            });
        }
        let points = self.trajectory(x0).take(n).collect::<Result<Vec<_>>>()?;
        Ok(Orbit { points })
    }
}

/// Iterator over an orbit; yields an error once and then stops.
pub struct Trajectory<'a> {
    system: &'a DynamicalSystem,
    current: Option<Point>,
    started: bool,
}

impl Iterator for Trajectory<'_> {
    type Item = Result<Point>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.current.take()?;
        let item = if self.started {
            self.system.step(&current)
        } else {
            self.started = true;
            self.system.space.check(&current).map(|_| current)
        };
        if let Ok(p) = &item {
            self.current = Some(*p);
        }
        Some(item)
    }
}

/// `(x0, f x0, …, f^{n-1} x0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    points: Vec<Point>,
}

impl Orbit {
    pub fn x0(&self) -> Point {
        self.points[0]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
