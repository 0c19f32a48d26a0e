use std::fmt;

/// Exact fraction `num/den` in lowest terms with `num < den`, used as the
/// carrier of circle points for maps that would otherwise destroy floating
/// point state (the doubling map shifts out one mantissa bit per step).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    /// Largest denominator produced by [`Fraction::approximate`].
    pub const MAX_DEN: u64 = 1 << 32;

    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };

    /// Builds `num/den` reduced modulo 1. Returns `None` when `den == 0` or
    /// the denominator exceeds [`Fraction::MAX_DEN`].
    pub fn new(num: u64, den: u64) -> Option<Self> {
        if den == 0 || den > Self::MAX_DEN {
            return None;
        }
        let num = num % den;
        let g = gcd(num, den);
        Some(Fraction {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Best rational approximation of `x mod 1` with denominator at most
    /// [`Fraction::MAX_DEN`], by continued fractions. Stops as soon as a
    /// convergent reproduces `x` exactly in floating point, so decimal and
    /// simple fractional inputs (0.3, 1/3 rounded) come back as 3/10, 1/3.
    pub fn approximate(x: f64) -> Self {
        let x = x - x.floor();
        if !x.is_finite() || x == 0.0 {
            return Self::ZERO;
        }
        let limit = Self::MAX_DEN as u128;
        // (h_{k-2}, h_{k-1}) and (k_{k-2}, k_{k-1})
        let (mut h0, mut h1) = (0u128, 1u128);
        let (mut k0, mut k1) = (1u128, 0u128);
        let mut y = x;
        loop {
            let a = y.floor();
            if a > 1e18 {
                break;
            }
            let a = a as u128;
            let h2 = a * h1 + h0;
            let k2 = a * k1 + k0;
            if k2 > limit {
                // Best semiconvergent below the limit versus the last convergent.
                let t = (limit - k0) / k1;
                let (hs, ks) = (t * h1 + h0, t * k1 + k0);
                let err_s = (x - hs as f64 / ks as f64).abs();
                let err_c = (x - h1 as f64 / k1 as f64).abs();
                if t > 0 && err_s < err_c {
                    h1 = hs;
                    k1 = ks;
                }
                break;
            }
            h0 = h1;
            h1 = h2;
            k0 = k1;
            k1 = k2;
            if h1 as f64 / k1 as f64 == x {
                break;
            }
            let frac = y - y.floor();
            if frac == 0.0 {
                break;
            }
            y = 1.0 / frac;
        }
        Fraction::new(h1 as u64, k1 as u64).unwrap_or(Self::ZERO)
    }

    /// `2x mod 1`, exact.
    pub fn double_mod1(self) -> Self {
        if self.den % 2 == 0 {
            // gcd(2p mod q, q) = 2 when q is even and gcd(p, q) = 1
            let half = self.den / 2;
            Fraction {
                num: self.num % half,
                den: half,
            }
        } else {
            let mut num = self.num * 2;
            if num >= self.den {
                num -= self.den;
            }
            Fraction { num, den: self.den }
        }
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A state point with up to three coordinates.
///
/// One-dimensional points may additionally carry an exact [`Fraction`]; the
/// floating coordinate is then always the correctly rounded value of it.
/// Simplex points produced by log-coordinate flows carry their log weights,
/// which keep resolving coordinates far below the floating-point range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    coords: [f64; 3],
    dim: u8,
    exact: Option<Fraction>,
    log_weights: Option<[f64; 3]>,
}

/// Log weights more than this far below the maximum give a zero coordinate
/// (instead of a subnormal one).
const LOG_WEIGHT_FLOOR: f64 = -700.0;

impl Point {
    pub const MAX_DIM: usize = 3;

    /// # Panics
    /// If `coords` is empty or longer than [`Point::MAX_DIM`].
    pub fn new(coords: &[f64]) -> Self {
        assert!(
            !coords.is_empty() && coords.len() <= Self::MAX_DIM,
            "points have 1 to 3 coordinates, got {}",
            coords.len()
        );
        let mut c = [0.0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Point {
            coords: c,
            dim: coords.len() as u8,
            exact: None,
            log_weights: None,
        }
    }

    pub fn scalar(x: f64) -> Self {
        Point::new(&[x])
    }

    pub fn pair(x: f64, y: f64) -> Self {
        Point::new(&[x, y])
    }

    pub fn triple(a: f64, b: f64, c: f64) -> Self {
        Point::new(&[a, b, c])
    }

    pub fn exact(value: Fraction) -> Self {
        Point {
            coords: [value.to_f64(), 0.0, 0.0],
            dim: 1,
            exact: Some(value),
            log_weights: None,
        }
    }

    /// The simplex point proportional to `(e^{u1}, e^{u2}, e^{u3})`. Entries
    /// may be `-inf` (zero coordinates) but the maximum must be finite.
    pub fn from_log_weights(u: [f64; 3]) -> Self {
        let m = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let u = u.map(|v| v - m);
        let w = u.map(|v| if v < LOG_WEIGHT_FLOOR { 0.0 } else { v.exp() });
        let s = w[0] + w[1] + w[2];
        Point {
            coords: w.map(|v| v / s),
            dim: 3,
            exact: None,
            log_weights: Some(u),
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    pub(crate) fn array(&self) -> [f64; 3] {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// First coordinate.
    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    pub fn fraction(&self) -> Option<Fraction> {
        self.exact
    }

    /// Log weights normalized to maximum zero, if the point carries them.
    pub fn log_weights(&self) -> Option<[f64; 3]> {
        self.log_weights
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }

    pub fn euclidean_distance(&self, other: &Point) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(exact) = self.exact {
            return write!(f, "{exact}");
        }
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
