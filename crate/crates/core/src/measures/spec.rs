//! The measure-spec grammar:
//! `dirac:<point>` | `orbit:<point>,<period>` | `lebesgue` |
//! `mix:<c1>*<spec1>+<c2>*<spec2>+…` (mixtures do not nest).

use crate::dynamics::DynamicalSystem;
use crate::error::{Error, Result};
use crate::parse::{parse_point, parse_real};

use super::measure::Measure;

/// Parses `spec` into a measure on `system`'s space. `orbit:` terms are
/// checked for periodicity under `system`.
pub fn measure_from_spec(spec: &str, system: &DynamicalSystem) -> Result<Measure> {
    parse_term(spec, spec, 0, system, true)
}

fn parse_term(
    text: &str,
    input: &str,
    offset: usize,
    system: &DynamicalSystem,
    allow_mix: bool,
) -> Result<Measure> {
    let space = system.space();
    let text_trim = text.trim();
    if text_trim == "lebesgue" {
        return Ok(Measure::lebesgue(space));
    }
    let Some((head, body)) = text.split_once(':') else {
        return Err(Error::parse(
            input,
            offset,
            format!("unknown measure spec {text:?}; expected dirac:, orbit:, lebesgue or mix:"),
        ));
    };
    let body_offset = offset + head.len() + 1;
    match head.trim() {
        "dirac" => Measure::dirac(space, parse_point(body, space, input, body_offset)?),
        "orbit" => {
            let Some((point, period)) = body.rsplit_once(',') else {
                return Err(Error::parse(
                    input,
                    body_offset,
                    "expected orbit:<point>,<period>",
                ));
            };
            let period_offset = body_offset + point.len() + 1;
            let period: usize = period.trim().parse().map_err(|_| {
                Error::parse(input, period_offset, format!("invalid period {period:?}"))
            })?;
            let x = parse_point(point, space, input, body_offset)?;
            Measure::periodic_orbit(system, x, period)
        }
        "mix" if allow_mix => {
            let mut parts = Vec::new();
            let mut pos = body_offset;
            for term in body.split('+') {
                let Some((coef, sub)) = term.split_once('*') else {
                    return Err(Error::parse(input, pos, "expected <coefficient>*<spec>"));
                };
                let c = parse_real(coef).ok_or_else(|| {
                    Error::parse(input, pos, format!("invalid coefficient {coef:?}"))
                })?;
                let sub_offset = pos + coef.len() + 1;
                parts.push((parse_term(sub, input, sub_offset, system, false)?, c));
                pos += term.len() + 1;
            }
            Measure::mixture(parts)
        }
        "mix" => Err(Error::parse(input, offset, "mixtures cannot be nested")),
        other => Err(Error::parse(
            input,
            offset,
            format!("unknown measure kind {other:?}"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Point, StateSpace};

    #[test]
    fn grammar_examples() {
        let f = DynamicalSystem::doubling();
        let d = measure_from_spec("dirac:0.25", &f).unwrap();
        assert_eq!(
            d,
            Measure::dirac(StateSpace::Circle, Point::scalar(0.25)).unwrap()
        );

        let o = measure_from_spec("orbit:1/3,2", &f).unwrap();
        let atoms = o.atoms().unwrap();
        assert_eq!(
            atoms.iter().map(|a| a.1).collect::<Vec<_>>(),
            vec![0.5, 0.5]
        );
        assert_eq!(atoms[0].0.x(), 1.0 / 3.0);
        assert_eq!(atoms[1].0.x(), 2.0 / 3.0);

        let m = measure_from_spec("mix:0.5*dirac:0+0.5*orbit:1/3,2", &f).unwrap();
        let weights: Vec<f64> = m.atoms().unwrap().iter().map(|a| a.1).collect();
        assert_eq!(weights, vec![0.5, 0.25, 0.25]);

        assert!(measure_from_spec("lebesgue", &f).unwrap().is_lebesgue());
    }

    #[test]
    fn simplex_points() {
        let f = DynamicalSystem::may_leonard(0.8, 1.9, 0.1).unwrap();
        let m =
            measure_from_spec("mix:1/3*dirac:1,0,0+1/3*dirac:0,1,0+1/3*dirac:0,0,1", &f).unwrap();
        assert_eq!(m.atoms().unwrap().len(), 3);
        assert!(measure_from_spec("orbit:1,0,0,1", &f).is_ok());
    }

    #[test]
    fn errors_carry_positions() {
        let f = DynamicalSystem::doubling();
        match measure_from_spec("dirac:abc", &f) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 6),
            other => panic!("{other:?}"),
        }
        match measure_from_spec("mix:0.5*dirac:0+0.5*dirac:x", &f) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 26),
            other => panic!("{other:?}"),
        }
        match measure_from_spec("orbit:1/3,two", &f) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 10),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            measure_from_spec("gauss:0", &f),
            Err(Error::Parse { position: 0, .. })
        ));
        assert!(matches!(
            measure_from_spec("orbit:0.1,3", &f),
            Err(Error::NonPeriodic { .. })
        ));
        assert!(measure_from_spec("mix:0.5*dirac:0+0.6*dirac:0.5", &f).is_err());
        assert!(measure_from_spec("mix:1*mix:1*dirac:0", &f).is_err());
    }
}
