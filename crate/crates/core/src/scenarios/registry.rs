use std::fmt::Write as _;

use crate::basins::{simplex_vertices, AttractorSpec, Grid};
use crate::dynamics::{DynamicalSystem, Fraction, Point};
use crate::error::{Error, Result};
use crate::measures::{measure_from_spec, Measure};
use crate::parse::parse_real;
use crate::potentials::{check_subadditivity, MatrixFamily, Observable, SubadditivePotential};

use super::bumps::{prop43_potential, vertex_well, OrbitSeed};

pub const SCENARIO_NAMES: [&str; 5] = [
    "doubling-basic",
    "doubling-prop43",
    "rotation-unique-ergodic",
    "cocycle-stability",
    "heteroclinic-bowen",
];

pub const MATRIX_FAMILY_NAMES: [&str; 3] = ["diag-half", "scaled-rotation", "diag-cos"];

/// Samples and maximal horizon of the subadditivity check run on every
/// potential at construction.
pub const CONSTRUCTION_CHECK_SAMPLES: usize = 100;
pub const CONSTRUCTION_CHECK_HORIZON: usize = 60;
const CONSTRUCTION_CHECK_SEED: u64 = 0x5eed;

/// Radius of the ball around the barycenter left out of heteroclinic scans.
pub const HETEROCLINIC_EXCLUSION_RADIUS: f64 = 0.05;

/// A system together with named potentials, reference measures and
/// attractors.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub system: DynamicalSystem,
    /// Resolved parameter values, in declaration order.
    pub params: Vec<(String, f64)>,
    pub observables: Vec<Observable>,
    pub potentials: Vec<SubadditivePotential>,
    pub measures: Vec<(String, Measure)>,
    pub attractors: Vec<AttractorSpec>,
    /// Ball removed from default scan grids (e.g. around an interior
    /// equilibrium whose orbit never leaves it).
    pub scan_exclusion: Option<(Point, f64)>,
    pub doc: String,
}

impl Scenario {
    /// Resolves `birkhoff:<g>`, `cocycle:<family>`, `neg:<spec>`,
    /// `trunc:<spec>` and `table:<r1>,<r2>,…` (rates `φ_n/n`, constant in
    /// x, for counterexamples). The g-names are `one`, `cos`, `const:<c>` and the
    /// scenario's own observables.
    pub fn potential(&self, spec: &str) -> Result<SubadditivePotential> {
        self.parse_potential(spec, spec, 0)
    }

    fn parse_potential(
        &self,
        text: &str,
        input: &str,
        offset: usize,
    ) -> Result<SubadditivePotential> {
        let (head, body) = text.split_once(':').ok_or_else(|| {
            Error::parse(
                input,
                offset,
                "expected birkhoff:, cocycle:, neg:, trunc: or table:",
            )
        })?;
        let body_offset = offset + head.len() + 1;
        match head {
            "neg" => self.parse_potential(body, input, body_offset)?.negated(),
            "trunc" => Ok(self.parse_potential(body, input, body_offset)?.truncated()),
            "birkhoff" => Ok(SubadditivePotential::birkhoff(self.observable(
                body,
                input,
                body_offset,
            )?)),
            "table" => {
                let rates = body
                    .split(',')
                    .map(|r| parse_real(r).filter(|v| v.is_finite()))
                    .collect::<Option<Vec<f64>>>()
                    .ok_or_else(|| {
                        Error::parse(input, body_offset, "expected comma-separated rates")
                    })?;
                Ok(SubadditivePotential::tabulated(text, rates))
            }
            "cocycle" => {
                let family = match body {
                    "diag-half" => MatrixFamily::diag_half(),
                    "scaled-rotation" => MatrixFamily::scaled_rotation(),
                    "diag-cos" => MatrixFamily::diag_cos(),
                    _ => return Err(Error::unknown("matrix family", body, MATRIX_FAMILY_NAMES)),
                };
                Ok(SubadditivePotential::cocycle(family))
            }
            _ => Err(Error::parse(
                input,
                offset,
                format!(
                    "unknown potential kind {head:?}; expected birkhoff, cocycle, neg, trunc or table"
                ),
            )),
        }
    }

    fn observable(&self, name: &str, input: &str, offset: usize) -> Result<Observable> {
        if let Some(g) = self.observables.iter().find(|g| g.label() == name) {
            return Ok(g.clone());
        }
        match name {
            "one" => Ok(Observable::new("one", |_| 1.0)),
            "cos" => Ok(Observable::cos_2pi()),
            _ => match name.strip_prefix("const:") {
                Some(c) => parse_real(c)
                    .filter(|c| c.is_finite())
                    .map(Observable::constant)
                    .ok_or_else(|| {
                        Error::parse(input, offset + 6, format!("invalid constant {c:?}"))
                    }),
                None => {
                    let mut available = vec!["one", "cos", "const:<c>"];
                    available.extend(self.observables.iter().map(|g| g.label()));
                    Err(Error::unknown("observable", name, available))
                }
            },
        }
    }

    /// A named reference measure, or a measure spec.
    pub fn measure(&self, spec: &str) -> Result<Measure> {
        match self.measures.iter().find(|(n, _)| n == spec) {
            Some((_, m)) => Ok(m.clone()),
            None => measure_from_spec(spec, &self.system),
        }
    }

    pub fn attractor(&self, name: &str) -> Result<AttractorSpec> {
        self.attractors
            .iter()
            .find(|k| k.label() == name)
            .cloned()
            .ok_or_else(|| {
                Error::unknown("attractor", name, self.attractors.iter().map(|k| k.label()))
            })
    }

    /// Uniform grid at `resolution` minus the scenario's exclusion ball.
    pub fn scan_grid(&self, resolution: usize) -> Result<Grid> {
        let grid = Grid::uniform(self.system.space(), resolution)?;
        match &self.scan_exclusion {
            Some((center, radius)) => grid.excluding_ball(center, *radius),
            None => Ok(grid),
        }
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Human-readable listing of every named component.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario = {}", self.name);
        let _ = writeln!(out, "system = {}", self.system.label());
        let _ = writeln!(out, "space = {}", self.system.space());
        for (k, v) in &self.params {
            let _ = writeln!(out, "param.{k} = {v}");
        }
        for g in &self.observables {
            let _ = writeln!(out, "observable = {}", g.label());
        }
        for p in &self.potentials {
            let _ = writeln!(out, "potential = {}", p.label());
        }
        for (name, _) in &self.measures {
            let _ = writeln!(out, "measure = {name}");
        }
        for k in &self.attractors {
            let _ = writeln!(out, "attractor = {k}");
        }
        if let Some((c, r)) = &self.scan_exclusion {
            let _ = writeln!(out, "scan_exclusion = ball({c}, {r})");
        }
        let _ = writeln!(out, "doc = {}", self.doc);
        out
    }
}

/// Resolved scenario parameters with their defaults; unknown keys are errors.
fn resolve_params(
    scenario: &str,
    defaults: &[(&str, f64)],
    given: &[(String, f64)],
) -> Result<Vec<(String, f64)>> {
    let mut out: Vec<(String, f64)> = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in given {
        match out.iter_mut().find(|(d, _)| d == k) {
            Some(slot) => slot.1 = *v,
            None => {
                return Err(Error::UnknownName {
                    kind: "scenario parameter",
                    name: format!("{scenario}.{k}"),
                    available: if defaults.is_empty() {
                        "(none)".into()
                    } else {
                        defaults
                            .iter()
                            .map(|(k, _)| *k)
                            .collect::<Vec<_>>()
                            .join(", ")
                    },
                })
            }
        }
    }
    Ok(out)
}

fn get(params: &[(String, f64)], key: &str) -> f64 {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .expect("declared parameter")
}

/// Builds a registered scenario. Every potential passes a seeded
/// subadditivity check before the scenario is returned.
pub fn build_scenario(name: &str, params: &[(String, f64)]) -> Result<Scenario> {
    let third = Point::exact(Fraction::new(1, 3).expect("1/3"));
    let mut scenario = match name {
        "doubling-basic" => {
            let params = resolve_params(name, &[], params)?;
            let system = DynamicalSystem::doubling();
            let space = system.space();
            Scenario {
                name: name.into(),
                params,
                observables: vec![],
                potentials: vec![],
                measures: vec![
                    ("dirac0".into(), Measure::dirac(space, Point::scalar(0.0))?),
                    (
                        "orbit-third".into(),
                        Measure::periodic_orbit(&system, third, 2)?,
                    ),
                    ("lebesgue".into(), Measure::lebesgue(space)),
                ],
                attractors: vec![AttractorSpec::points(
                    "fixed-point",
                    space,
                    vec![Point::scalar(0.0)],
                )?],
                scan_exclusion: None,
                doc:
                    "doubling map x -> 2x mod 1 on the circle, with Birkhoff and cocycle potentials"
                        .into(),
                system,
            }
            .with_potentials(&[
                "birkhoff:cos",
                "cocycle:diag-cos",
                "trunc:cocycle:diag-cos",
            ])?
        }
        "doubling-prop43" => {
            let params =
                resolve_params(name, &[("baseline", -0.2), ("bump_radius", 0.05)], params)?;
            let system = DynamicalSystem::doubling();
            let space = system.space();
            let p = prop43_potential(
                &system,
                OrbitSeed {
                    point: Point::scalar(0.0),
                    period: 1,
                },
                OrbitSeed {
                    point: third,
                    period: 2,
                },
                get(&params, "bump_radius"),
                get(&params, "baseline"),
            )?;
            Scenario {
                name: name.into(),
                observables: vec![p.g.clone()],
                potentials: vec![],
                measures: vec![
                    ("dirac0".into(), Measure::dirac(space, Point::scalar(0.0))?),
                    ("orbit-third".into(), Measure::periodic_orbit(&system, third, 2)?),
                    ("lebesgue".into(), Measure::lebesgue(space)),
                ],
                attractors: vec![
                    AttractorSpec::points("O1", space, p.o1.clone())?,
                    AttractorSpec::points("O2", space, p.o2.clone())?,
                ],
                scan_exclusion: None,
                doc: "doubling map with g = -1 on the fixed point 0, +1 on the period-two orbit {1/3, 2/3}, \
                      smoothstep bumps and a constant baseline elsewhere"
                    .into(),
                params,
                system,
            }
            .with_potentials(&["birkhoff:prop43", "neg:birkhoff:prop43", "trunc:birkhoff:prop43"])?
        }
        "rotation-unique-ergodic" => {
            let params = resolve_params(name, &[("alpha", (5f64.sqrt() - 1.0) / 2.0)], params)?;
            let system = DynamicalSystem::rotation(get(&params, "alpha"));
            let space = system.space();
            Scenario {
                name: name.into(),
                params,
                observables: vec![],
                potentials: vec![],
                measures: vec![("lebesgue".into(), Measure::lebesgue(space))],
                attractors: vec![],
                scan_exclusion: None,
                doc: "rotation x -> x + alpha mod 1; uniquely ergodic for irrational alpha".into(),
                system,
            }
            .with_potentials(&["birkhoff:cos", "cocycle:scaled-rotation"])?
        }
        "cocycle-stability" => {
            let params = resolve_params(name, &[], params)?;
            let system = DynamicalSystem::doubling();
            let space = system.space();
            Scenario {
                name: name.into(),
                params,
                observables: vec![],
                potentials: vec![],
                measures: vec![("lebesgue".into(), Measure::lebesgue(space))],
                attractors: vec![],
                scan_exclusion: None,
                doc: "log-norm growth of 2x2 matrix cocycles over the doubling map".into(),
                system,
            }
            .with_potentials(&[
                "cocycle:diag-half",
                "cocycle:scaled-rotation",
                "cocycle:diag-cos",
                "trunc:cocycle:diag-half",
                "trunc:cocycle:scaled-rotation",
                "trunc:cocycle:diag-cos",
            ])?
        }
        "heteroclinic-bowen" => {
            let params =
                resolve_params(name, &[("alpha", 0.8), ("beta", 1.9), ("tau", 0.1)], params)?;
            let system = DynamicalSystem::may_leonard(
                get(&params, "alpha"),
                get(&params, "beta"),
                get(&params, "tau"),
            )?;
            let space = system.space();
            let [e1, e2, e3] = simplex_vertices();
            let third = 1.0 / 3.0;
            Scenario {
                name: name.into(),
                params,
                observables: vec![vertex_well()],
                potentials: vec![],
                measures: vec![
                    ("dirac-e1".into(), Measure::dirac(space, e1)?),
                    ("dirac-e2".into(), Measure::dirac(space, e2)?),
                    ("dirac-e3".into(), Measure::dirac(space, e3)?),
                    (
                        "vertex-mixture".into(),
                        Measure::from_atoms(space, vec![(e1, third), (e2, third), (e3, third)])?,
                    ),
                    ("lebesgue".into(), Measure::lebesgue(space)),
                ],
                attractors: vec![
                    AttractorSpec::simplex_boundary(),
                    AttractorSpec::points("vertices", space, vec![e1, e2, e3])?,
                ],
                scan_exclusion: Some((Point::triple(third, third, third), HETEROCLINIC_EXCLUSION_RADIUS)),
                doc: "May-Leonard flow on the 2-simplex, time-tau map; the boundary heteroclinic cycle \
                      e1 -> e3 -> e2 -> e1 attracts the interior and time averages oscillate between \
                      the vertex Dirac measures"
                    .into(),
                system,
            }
            .with_potentials(&["birkhoff:vertices", "trunc:birkhoff:vertices"])?
        }
        _ => return Err(Error::unknown("scenario", name, SCENARIO_NAMES)),
    };
    for phi in &scenario.potentials {
        let report = check_subadditivity(
            phi,
            &scenario.system,
            CONSTRUCTION_CHECK_SAMPLES,
            CONSTRUCTION_CHECK_HORIZON,
            CONSTRUCTION_CHECK_SEED,
        )?;
        if !report.passed {
            return Err(Error::NotSubadditive {
                label: phi.label().to_string(),
                violation: report.max_violation,
            });
        }
    }
    scenario.potentials.shrink_to_fit();
    Ok(scenario)
}

impl Scenario {
    fn with_potentials(mut self, specs: &[&str]) -> Result<Self> {
        for spec in specs {
            let phi = self.potential(spec)?;
            self.potentials.push(phi);
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::PotentialKind;

    #[test]
    fn all_scenarios_build() {
        for name in SCENARIO_NAMES {
            let s = build_scenario(name, &[]).unwrap();
            assert!(!s.potentials.is_empty(), "{name}");
            assert!(s.describe().contains(name));
        }
    }

    #[test]
    fn doubling_basic_contents() {
        let s = build_scenario("doubling-basic", &[]).unwrap();
        assert_eq!(s.system.label(), "doubling");
        let labels: Vec<&str> = s.potentials.iter().map(|p| p.label()).collect();
        assert!(labels.contains(&"birkhoff:cos") && labels.contains(&"cocycle:diag-cos"));
    }

    #[test]
    fn rotation_angle_is_golden() {
        let s = build_scenario("rotation-unique-ergodic", &[]).unwrap();
        assert_eq!(s.param("alpha"), Some((5f64.sqrt() - 1.0) / 2.0));
    }

    #[test]
    fn heteroclinic_parameters() {
        let given = [
            ("alpha".to_string(), 0.8),
            ("beta".to_string(), 1.9),
            ("tau".to_string(), 0.1),
        ];
        let s = build_scenario("heteroclinic-bowen", &given).unwrap();
        assert_eq!(s.system.label(), "may-leonard:0.8,1.9,0.1");
        assert_eq!(s.measures.len(), 5);
        let bad = [("beta".to_string(), 0.9)];
        assert!(matches!(
            build_scenario("heteroclinic-bowen", &bad),
            Err(Error::ParameterRegime(_))
        ));
        let typo = [("aplha".to_string(), 0.8)];
        assert!(matches!(
            build_scenario("heteroclinic-bowen", &typo),
            Err(Error::UnknownName { .. })
        ));
    }

    #[test]
    fn potential_grammar() {
        let s = build_scenario("doubling-prop43", &[]).unwrap();
        let p = s.potential("neg:birkhoff:prop43").unwrap();
        assert_eq!(p.label(), "neg:birkhoff:prop43");
        assert_eq!(
            s.potential("trunc:cocycle:diag-half").unwrap().kind(),
            PotentialKind::Truncated
        );
        assert_eq!(
            s.potential("birkhoff:const:-0.5").unwrap().label(),
            "birkhoff:const:-0.5"
        );
        assert!(matches!(
            s.potential("birkhoff:nope"),
            Err(Error::UnknownName { .. })
        ));
        assert!(matches!(
            s.potential("cocycle:nope"),
            Err(Error::UnknownName { .. })
        ));
        assert!(matches!(
            s.potential("neg:cocycle:diag-half"),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(s.potential("nope"), Err(Error::Parse { .. })));
        assert!(matches!(
            s.potential("birkhoff:const:x"),
            Err(Error::Parse { position: 15, .. })
        ));
    }

    #[test]
    fn unknown_scenario_lists_names() {
        match build_scenario("nope", &[]) {
            Err(Error::UnknownName { available, .. }) => {
                assert!(available.contains("heteroclinic-bowen"))
            }
            other => panic!("{other:?}"),
        }
    }
}
