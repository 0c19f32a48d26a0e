//! Small parsing helpers shared by the name and spec grammars.

use crate::dynamics::{Fraction, Point, StateSpace};
use crate::error::{Error, Result};

/// Parses a decimal real or a fraction `a/b`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().ok()?;
        let b: f64 = b.trim().parse().ok()?;
        (b != 0.0).then(|| a / b)
    } else {
        s.parse().ok().filter(|v: &f64| v.is_finite())
    }
}

/// Parses comma-separated coordinates for `space`. A single coordinate
/// written as `p/q` on the circle becomes an exact point. `offset` is the
/// position of `text` inside `input`, for error reporting.
pub fn parse_point(text: &str, space: StateSpace, input: &str, offset: usize) -> Result<Point> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != space.dim() {
        return Err(Error::parse(
            input,
            offset,
            format!(
                "expected {} coordinate(s) for {space}, got {}",
                space.dim(),
                parts.len()
            ),
        ));
    }
    if space == StateSpace::Circle {
        if let Some(f) = parse_exact_fraction(parts[0]) {
            return Ok(Point::exact(f));
        }
    }
    let mut coords = Vec::with_capacity(parts.len());
    let mut pos = offset;
    for part in &parts {
        let v = parse_real(part)
            .ok_or_else(|| Error::parse(input, pos, format!("invalid number {part:?}")))?;
        coords.push(v);
        pos += part.len() + 1;
    }
    Ok(Point::new(&coords))
}

fn parse_exact_fraction(s: &str) -> Option<Fraction> {
    let (a, b) = s.trim().split_once('/')?;
    let a: u64 = a.trim().parse().ok()?;
    let b: u64 = b.trim().parse().ok()?;
    if a >= b {
        return None;
    }
    Fraction::new(a, b)
}
