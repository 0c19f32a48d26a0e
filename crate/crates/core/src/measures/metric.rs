use std::f64::consts::{PI, TAU};

use crate::dynamics::{Point, StateSpace};
use crate::error::{Error, Result};

use super::measure::Measure;

/// One factor of a torus test function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Harmonic {
    One,
    Cos(u32),
    Sin(u32),
}

/// A bounded Lipschitz test function with values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// `(1 + sin 2πkx) / 2`
    Sine { freq: u32 },
    /// `(1 + cos 2πkx) / 2`
    Cosine { freq: u32 },
    /// `(1 + cos πkx) / 2`, for the interval
    HalfCosine { freq: u32 },
    /// `(1 + u(x) v(y)) / 2` with `u, v` harmonics in each torus coordinate
    TorusProduct { x: Harmonic, y: Harmonic },
    /// `max(0, 1 - L |p - center|)`
    Bump { center: Point, lipschitz: f64 },
}

impl TestFunction {
    pub fn eval(&self, p: &Point) -> f64 {
        match *self {
            TestFunction::Sine { freq } => 0.5 * (1.0 + (TAU * freq as f64 * p.x()).sin()),
            TestFunction::Cosine { freq } => 0.5 * (1.0 + (TAU * freq as f64 * p.x()).cos()),
            TestFunction::HalfCosine { freq } => 0.5 * (1.0 + (PI * freq as f64 * p.x()).cos()),
            TestFunction::TorusProduct { x, y } => {
                0.5 * (1.0 + harmonic(x, p.coords()[0]) * harmonic(y, p.coords()[1]))
            }
            TestFunction::Bump { center, lipschitz } => {
                (1.0 - lipschitz * p.euclidean_distance(&center)).max(0.0)
            }
        }
    }

    fn max_freq(&self) -> u32 {
        match *self {
            TestFunction::Sine { freq }
            | TestFunction::Cosine { freq }
            | TestFunction::HalfCosine { freq } => freq,
            TestFunction::TorusProduct { x, y } => harmonic_freq(x).max(harmonic_freq(y)),
            TestFunction::Bump { .. } => 0,
        }
    }
}

fn harmonic(h: Harmonic, t: f64) -> f64 {
    match h {
        Harmonic::One => 1.0,
        Harmonic::Cos(k) => (TAU * k as f64 * t).cos(),
        Harmonic::Sin(k) => (TAU * k as f64 * t).sin(),
    }
}

fn harmonic_freq(h: Harmonic) -> u32 {
    match h {
        Harmonic::One => 0,
        Harmonic::Cos(k) | Harmonic::Sin(k) => k,
    }
}

/// Integrals of every family member against one measure, in family order.
#[derive(Clone, Debug, PartialEq)]
pub struct Signature(pub Vec<f64>);

impl Signature {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `Σ c_i s_i` for signatures of the same metric.
    pub fn combine(parts: &[(f64, &Signature)]) -> Signature {
        let len = parts.first().map_or(0, |(_, s)| s.0.len());
        let mut out = vec![0.0; len];
        for (c, s) in parts {
            for (o, v) in out.iter_mut().zip(&s.0) {
                *o += c * v;
            }
        }
        Signature(out)
    }
}

/// `dist*(μ, ν) = Σ_k 2^{-k} |∫f_k dμ − ∫f_k dν|` over a fixed family of
/// test functions with values in `[0,1]`, so `0 ≤ dist* < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakStarMetric {
    space: StateSpace,
    family: Vec<TestFunction>,
    weights: Vec<f64>,
    max_freq: usize,
}

impl WeakStarMetric {
    pub fn new(space: StateSpace, family: Vec<TestFunction>) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::InvalidArgument(
                "test family must be non-empty".into(),
            ));
        }
        let weights = (1..=family.len()).map(|k| 0.5f64.powi(k as i32)).collect();
        let max_freq = family.iter().map(TestFunction::max_freq).max().unwrap_or(0) as usize;
        Ok(WeakStarMetric {
            space,
            family,
            weights,
            max_freq,
        })
    }

    /// Default family: interleaved sine/cosine up to frequency 8 on the
    /// circle; half-cosines up to 16 on the interval; harmonic tensor
    /// products of total degree 1..=4 on the torus; Lipschitz-4 radial bumps
    /// on a 16-point lattice on the simplex and the disk.
    pub fn default_for(space: StateSpace) -> Self {
        let family = match space {
            StateSpace::Circle => (1..=8)
                .flat_map(|k| {
                    [
                        TestFunction::Sine { freq: k },
                        TestFunction::Cosine { freq: k },
                    ]
                })
                .collect(),
            StateSpace::Interval => (1..=16)
                .map(|k| TestFunction::HalfCosine { freq: k })
                .collect(),
            StateSpace::Torus2 => torus_family(4),
            StateSpace::Simplex3 => simplex_lattice()
                .into_iter()
                .map(|center| TestFunction::Bump {
                    center,
                    lipschitz: 4.0,
                })
                .collect(),
            StateSpace::PlanarBall { radius } => {
                let lipschitz = 4.0 / radius.max(1.0);
                let ticks = [-0.75, -0.25, 0.25, 0.75];
                ticks
                    .iter()
                    .flat_map(|&a| {
                        ticks
                            .iter()
                            .map(move |&b| Point::pair(a * radius, b * radius))
                    })
                    .map(|center| TestFunction::Bump { center, lipschitz })
                    .collect()
            }
        };
        Self::new(space, family).expect("default family is non-empty")
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn family(&self) -> &[TestFunction] {
        &self.family
    }

    /// `2^{-k}` for `k = 1..=K`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Evaluates every family member at `p` into `out`.
    pub fn eval_all(&self, p: &Point, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.family.len());
        match self.space {
            StateSpace::Circle | StateSpace::Interval | StateSpace::Torus2 if self.max_freq > 0 => {
                self.eval_harmonics(p, out)
            }
            _ => {
                for (o, f) in out.iter_mut().zip(&self.family) {
                    *o = f.eval(p);
                }
            }
        }
    }

    // Uses the angle-addition recurrence instead of one sin/cos per member.
    fn eval_harmonics(&self, p: &Point, out: &mut [f64]) {
        let base = if self.space == StateSpace::Interval {
            PI
        } else {
            TAU
        };
        let axes = p.dim().min(2);
        let mut sin = [[0.0f64; 33]; 2];
        let mut cos = [[1.0f64; 33]; 2];
        let kmax = self.max_freq.min(32);
        for a in 0..axes {
            let (s1, c1) = (base * p.coords()[a]).sin_cos();
            for k in 1..=kmax {
                let (s, c) = (sin[a][k - 1], cos[a][k - 1]);
                sin[a][k] = s * c1 + c * s1;
                cos[a][k] = c * c1 - s * s1;
            }
        }
        let h = |axis: usize, hm: Harmonic| match hm {
            Harmonic::One => 1.0,
            Harmonic::Cos(k) => cos[axis][k as usize],
            Harmonic::Sin(k) => sin[axis][k as usize],
        };
        for (o, f) in out.iter_mut().zip(&self.family) {
            *o = match *f {
                TestFunction::Sine { freq } if (freq as usize) <= kmax => {
                    0.5 * (1.0 + sin[0][freq as usize])
                }
                TestFunction::Cosine { freq } | TestFunction::HalfCosine { freq }
                    if (freq as usize) <= kmax =>
                {
                    0.5 * (1.0 + cos[0][freq as usize])
                }
                TestFunction::TorusProduct { x, y }
                    if axes == 2 && harmonic_freq(x).max(harmonic_freq(y)) as usize <= kmax =>
                {
                    0.5 * (1.0 + h(0, x) * h(1, y))
                }
                ref other => other.eval(p),
            };
        }
    }

    pub fn signature(&self, mu: &Measure) -> Result<Signature> {
        self.same_space(mu.space())?;
        let mut out = vec![0.0; self.family.len()];
        let mut buf = vec![0.0; self.family.len()];
        mu.for_each_weighted(&mut |p, w| {
            self.eval_all(p, &mut buf);
            for (o, v) in out.iter_mut().zip(&buf) {
                *o += w * v;
            }
        });
        Ok(Signature(out))
    }

    /// Distance between two signatures of this metric.
    pub fn signature_distance(&self, a: &Signature, b: &Signature) -> f64 {
        self.weights
            .iter()
            .zip(a.0.iter().zip(&b.0))
            .map(|(w, (x, y))| w * (x - y).abs())
            .sum()
    }

    pub fn distance(&self, mu: &Measure, nu: &Measure) -> Result<f64> {
        let a = self.signature(mu)?;
        let b = self.signature(nu)?;
        Ok(self.signature_distance(&a, &b))
    }

    fn same_space(&self, other: StateSpace) -> Result<()> {
        if other == self.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.space.to_string(),
                right: other.to_string(),
            })
        }
    }
}

/// `dist*(μ, ν)` under `metric`.
pub fn weak_star_distance(metric: &WeakStarMetric, mu: &Measure, nu: &Measure) -> Result<f64> {
    if mu.space() != nu.space() {
        return Err(Error::SpaceMismatch {
            left: mu.space().to_string(),
            right: nu.space().to_string(),
        });
    }
    metric.distance(mu, nu)
}

fn torus_family(max_degree: u32) -> Vec<TestFunction> {
    let options = |k: u32| -> Vec<Harmonic> {
        if k == 0 {
            vec![Harmonic::One]
        } else {
            vec![Harmonic::Cos(k), Harmonic::Sin(k)]
        }
    };
    let mut out = Vec::new();
    for degree in 1..=max_degree {
        for kx in (0..=degree).rev() {
            let ky = degree - kx;
            for x in options(kx) {
                for y in options(ky) {
                    out.push(TestFunction::TorusProduct { x, y });
                }
            }
        }
    }
    out
}

/// Vertices, barycenter, interior and edge points of the step-1/4
/// barycentric lattice.
fn simplex_lattice() -> Vec<Point> {
    let mut vertices = Vec::new();
    let mut interior = Vec::new();
    let mut edges = Vec::new();
    for i in (0..=4u32).rev() {
        for j in (0..=4 - i).rev() {
            let k = 4 - i - j;
            let p = Point::triple(i as f64 / 4.0, j as f64 / 4.0, k as f64 / 4.0);
            match [i, j, k].iter().filter(|&&c| c == 0).count() {
                2 => vertices.push(p),
                0 => interior.push(p),
                _ => edges.push(p),
            }
        }
    }
    let mut out = vertices;
    out.push(Point::triple(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0));
    out.extend(interior);
    out.extend(edges);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_family_sizes() {
        assert_eq!(
            WeakStarMetric::default_for(StateSpace::Circle)
                .family()
                .len(),
            16
        );
        assert_eq!(
            WeakStarMetric::default_for(StateSpace::Interval)
                .family()
                .len(),
            16
        );
        assert_eq!(
            WeakStarMetric::default_for(StateSpace::Torus2)
                .family()
                .len(),
            40
        );
        let simplex = WeakStarMetric::default_for(StateSpace::Simplex3);
        assert_eq!(simplex.family().len(), 16);
        assert_eq!(
            simplex.family()[0],
            TestFunction::Bump {
                center: Point::triple(1.0, 0.0, 0.0),
                lipschitz: 4.0
            }
        );
        assert_eq!(
            WeakStarMetric::default_for(StateSpace::PlanarBall { radius: 1.0 })
                .family()
                .len(),
            16
        );
    }

    #[test]
    fn fast_path_matches_direct_evaluation() {
        for space in [StateSpace::Circle, StateSpace::Interval, StateSpace::Torus2] {
            let m = WeakStarMetric::default_for(space);
            let mut buf = vec![0.0; m.family().len()];
            for p in space.low_discrepancy(50) {
                m.eval_all(&p, &mut buf);
                for (v, f) in buf.iter().zip(m.family()) {
                    assert!((v - f.eval(&p)).abs() < 1e-13, "{space} {p} {f:?}");
                    assert!((0.0..=1.0).contains(&f.eval(&p)));
                }
            }
        }
    }

    #[test]
    fn bumps_are_bounded_and_lipschitz() {
        let m = WeakStarMetric::default_for(StateSpace::Simplex3);
        let pts = StateSpace::Simplex3.low_discrepancy(200);
        for f in m.family() {
            for w in pts.windows(2) {
                let (a, b) = (f.eval(&w[0]), f.eval(&w[1]));
                assert!((0.0..=1.0).contains(&a));
                assert!((a - b).abs() <= 4.0 * w[0].euclidean_distance(&w[1]) + 1e-12);
            }
        }
    }
}
