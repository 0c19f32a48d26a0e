use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::dynamics::{DynamicalSystem, Point};
use crate::error::{Error, Result};

use super::matrix::{matmul_into, operator_norm};

/// Default number of factors multiplied between renormalizations of a
/// cocycle product.
pub const DEFAULT_RENORM_EVERY: usize = 1;

/// A named real function on the state space.
#[derive(Clone)]
pub struct Observable {
    label: String,
    f: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
}

impl Observable {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Observable {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Observable::new(format!("const:{c}"), move |_| c)
    }

    /// `cos 2πx` of the first coordinate.
    pub fn cos_2pi() -> Self {
        Observable::new("cos", |p| (TAU * p.x()).cos())
    }

    #[inline]
    pub fn eval(&self, p: &Point) -> f64 {
        (self.f)(p)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Observable({})", self.label)
    }
}

/// A point-dependent `d × d` matrix `A(x)`, filled row-major.
#[derive(Clone)]
pub struct MatrixFamily {
    label: String,
    dim: usize,
    fill: Arc<dyn Fn(&Point, &mut [f64]) + Send + Sync>,
}

impl MatrixFamily {
    pub fn new(
        label: impl Into<String>,
        dim: usize,
        fill: impl Fn(&Point, &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        MatrixFamily {
            label: label.into(),
            dim,
            fill: Arc::new(fill),
        }
    }

    pub fn constant(label: impl Into<String>, dim: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        MatrixFamily::new(label, dim, move |_, out| out.copy_from_slice(&entries))
    }

    /// `diag(0.5, 0.25)`.
    pub fn diag_half() -> Self {
        MatrixFamily::constant("diag-half", 2, vec![0.5, 0.0, 0.0, 0.25])
    }

    /// `e^{-1}` times the rotation by angle `2πx`.
    pub fn scaled_rotation() -> Self {
        let scale = (-1.0f64).exp();
        MatrixFamily::new("scaled-rotation", 2, move |p, out| {
            let (s, c) = (TAU * p.x()).sin_cos();
            out.copy_from_slice(&[scale * c, -scale * s, scale * s, scale * c]);
        })
    }

    /// `diag(e^{-1 + 0.5 cos 2πx}, e^{-2})`.
    pub fn diag_cos() -> Self {
        let low = (-2.0f64).exp();
        MatrixFamily::new("diag-cos", 2, move |p, out| {
            out.copy_from_slice(&[(-1.0 + 0.5 * (TAU * p.x()).cos()).exp(), 0.0, 0.0, low]);
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn fill(&self, p: &Point, out: &mut [f64]) {
        (self.fill)(p, out)
    }

    pub fn eval(&self, p: &Point) -> Vec<f64> {
        let mut out = vec![0.0; self.dim * self.dim];
        self.fill(p, &mut out);
        out
    }
}

impl fmt::Debug for MatrixFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixFamily({}, {}x{})", self.label, self.dim, self.dim)
    }
}

/// Declared kind of a potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    AdditiveBirkhoff,
    MatrixCocycle,
    Truncated,
    Tabulated,
}

#[derive(Clone, Debug)]
enum Kind {
    Birkhoff {
        g: Observable,
        sign: f64,
    },
    Cocycle {
        family: MatrixFamily,
        renorm_every: usize,
    },
    Truncated(Box<SubadditivePotential>),
    Tabulated {
        rates: Arc<[f64]>,
    },
}

/// A sequence `Φ = {φ_n}` of functions with `φ_0 ≡ 0`, evaluated along orbits.
#[derive(Clone, Debug)]
pub struct SubadditivePotential {
    label: String,
    kind: Kind,
}

impl SubadditivePotential {
    /// `φ_n(x) = Σ_{i<n} g(f^i x)`.
    pub fn birkhoff(g: Observable) -> Self {
        SubadditivePotential {
            label: format!("birkhoff:{}", g.label()),
            kind: Kind::Birkhoff { g, sign: 1.0 },
        }
    }

    /// `φ_n(x) = log ‖A(f^{n-1}x) ⋯ A(x)‖₂`.
    pub fn cocycle(family: MatrixFamily) -> Self {
        SubadditivePotential {
            label: format!("cocycle:{}", family.label()),
            kind: Kind::Cocycle {
                family,
                renorm_every: DEFAULT_RENORM_EVERY,
            },
        }
    }

    /// `φ_n(x) = n · rates[n-1]`, constant in `x`, defined for
    /// `n ≤ rates.len()`. Not necessarily subadditive; used to inject
    /// counterexamples.
    pub fn tabulated(label: impl Into<String>, rates: Vec<f64>) -> Self {
        SubadditivePotential {
            label: label.into(),
            kind: Kind::Tabulated {
                rates: rates.into(),
            },
        }
    }

    /// `ψ_n(x) = max{-n, φ_n(x)}`; subadditive whenever `Φ` is, and
    /// `(1/n) ψ_n ≥ -1`.
    pub fn truncated(self) -> Self {
        SubadditivePotential {
            label: format!("trunc:{}", self.label),
            kind: Kind::Truncated(Box::new(self)),
        }
    }

    /// `{-φ_n}` for an additive potential (again additive, hence subadditive).
    pub fn negated(&self) -> Result<Self> {
        match &self.kind {
            Kind::Birkhoff { g, sign } => Ok(SubadditivePotential {
                label: match self.label.strip_prefix("neg:") {
                    Some(inner) => inner.to_string(),
                    None => format!("neg:{}", self.label),
                },
                kind: Kind::Birkhoff {
                    g: g.clone(),
                    sign: -sign,
                },
            }),
            _ => Err(Error::InvalidArgument(format!(
                "only additive potentials can be negated, {} is not additive",
                self.label
            ))),
        }
    }

    /// Renormalize the running cocycle product every `every` factors.
    pub fn with_renormalization(mut self, every: usize) -> Self {
        if let Kind::Cocycle { renorm_every, .. } = &mut self.kind {
            *renorm_every = every.max(1);
        }
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> PotentialKind {
        match self.kind {
            Kind::Birkhoff { .. } => PotentialKind::AdditiveBirkhoff,
            Kind::Cocycle { .. } => PotentialKind::MatrixCocycle,
            Kind::Truncated(_) => PotentialKind::Truncated,
            Kind::Tabulated { .. } => PotentialKind::Tabulated,
        }
    }

    pub fn is_additive(&self) -> bool {
        self.kind() == PotentialKind::AdditiveBirkhoff
    }

    /// Largest `n` for which `φ_n` is defined.
    pub fn max_horizon(&self) -> Option<usize> {
        match &self.kind {
            Kind::Tabulated { rates } => Some(rates.len()),
            Kind::Truncated(inner) => inner.max_horizon(),
            _ => None,
        }
    }

    /// Fresh accumulator at `n = 0`; feed it `x, f x, f² x, …`.
    pub fn accumulator(&self) -> Accumulator<'_> {
        let state = match &self.kind {
            Kind::Birkhoff { g, sign } => State::Sum {
                g,
                sign: *sign,
                total: 0.0,
            },
            Kind::Cocycle {
                family,
                renorm_every,
            } => {
                let d = family.dim();
                let mut product = vec![0.0; d * d];
                for i in 0..d {
                    product[i * d + i] = 1.0;
                }
                State::Product {
                    family,
                    every: *renorm_every,
                    product,
                    factor: vec![0.0; d * d],
                    scratch: vec![0.0; d * d],
                    log_scale: 0.0,
                    since: 0,
                }
            }
            Kind::Truncated(inner) => State::Truncated(Box::new(inner.accumulator())),
            Kind::Tabulated { rates } => State::Table(rates),
        };
        Accumulator { n: 0, state }
    }
}

enum State<'a> {
    Sum {
        g: &'a Observable,
        sign: f64,
        total: f64,
    },
    Product {
        family: &'a MatrixFamily,
        every: usize,
        product: Vec<f64>,
        factor: Vec<f64>,
        scratch: Vec<f64>,
        log_scale: f64,
        since: usize,
    },
    Truncated(Box<Accumulator<'a>>),
    Table(&'a [f64]),
}

/// Incremental evaluator of `φ_n` along one orbit: after `n` calls to
/// [`Accumulator::push`] with `x, …, f^{n-1} x`, [`Accumulator::value`]
/// returns `φ_n(x)`.
pub struct Accumulator<'a> {
    n: usize,
    state: State<'a>,
}

impl Accumulator<'_> {
    pub fn steps(&self) -> usize {
        self.n
    }

    pub fn push(&mut self, p: &Point) -> Result<()> {
        self.n += 1;
        let n = self.n;
        match &mut self.state {
            State::Sum { g, total, .. } => *total += g.eval(p),
            State::Product {
                family,
                every,
                product,
                factor,
                scratch,
                log_scale,
                since,
            } => {
                let d = family.dim();
                family.fill(p, factor);
                matmul_into(factor, product, d, scratch);
                std::mem::swap(product, scratch);
                *since += 1;
                if *since >= *every {
                    *since = 0;
                    let s = product.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    if s == 0.0 {
                        return Err(Error::SingularCollapse { step: n });
                    }
                    if !s.is_finite() {
                        return Err(Error::NonFiniteState {
                            point: p.to_string(),
                        });
                    }
                    for v in product.iter_mut() {
                        *v /= s;
                    }
                    *log_scale += s.ln();
                }
            }
            State::Truncated(inner) => inner.push(p)?,
            State::Table(_) => {}
        }
        Ok(())
    }

    /// `φ_n` for the points pushed so far (`φ_0 = 0`).
    pub fn value(&self) -> Result<f64> {
        let n = self.n;
        if n == 0 {
            return Ok(0.0);
        }
        let v = match &self.state {
            State::Sum { sign, total, .. } => sign * total,
            State::Product {
                family,
                product,
                log_scale,
                ..
            } => {
                let norm = operator_norm(product, family.dim());
                if norm == 0.0 {
                    return Err(Error::SingularCollapse { step: n });
                }
                log_scale + norm.ln()
            }
            State::Truncated(inner) => inner.value()?.max(-(n as f64)),
            State::Table(rates) => {
                let rate = rates.get(n - 1).ok_or(Error::ResourceLimit {
                    what: "tabulated potential horizon",
                    requested: n,
                    limit: rates.len(),
                })?;
                n as f64 * rate
            }
        };
        Ok(v)
    }
}

/// `φ_n(x)`.
pub fn evaluate(
    phi: &SubadditivePotential,
    system: &DynamicalSystem,
    x: Point,
    n: usize,
) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let mut acc = phi.accumulator();
    for p in system.trajectory(x).take(n) {
        acc.push(&p?)?;
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Fraction;

    #[test]
    fn phi_zero_is_zero() {
        let f = DynamicalSystem::doubling();
        for phi in [
            SubadditivePotential::birkhoff(Observable::constant(3.0)),
            SubadditivePotential::cocycle(MatrixFamily::diag_half()),
            SubadditivePotential::cocycle(MatrixFamily::diag_half()).truncated(),
        ] {
            assert_eq!(evaluate(&phi, &f, Point::scalar(0.2), 0).unwrap(), 0.0);
        }
    }

    #[test]
    fn birkhoff_examples() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::birkhoff(Observable::constant(1.0));
        assert_eq!(evaluate(&phi, &f, Point::scalar(0.3), 7).unwrap(), 7.0);
        let phi = SubadditivePotential::birkhoff(Observable::constant(-0.3));
        for x in [0.1, 0.5, 0.77] {
            assert!((evaluate(&phi, &f, Point::scalar(x), 10).unwrap() + 3.0).abs() < 1e-12);
        }
        let phi = SubadditivePotential::birkhoff(Observable::cos_2pi());
        assert_eq!(evaluate(&phi, &f, Point::scalar(0.0), 3).unwrap(), 3.0);
    }

    #[test]
    fn negation_is_exact() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::birkhoff(Observable::cos_2pi());
        let neg = phi.negated().unwrap();
        assert_eq!(neg.label(), "neg:birkhoff:cos");
        assert_eq!(neg.negated().unwrap().label(), "birkhoff:cos");
        let x = Point::scalar(0.123);
        assert_eq!(
            evaluate(&neg, &f, x, 57).unwrap(),
            -evaluate(&phi, &f, x, 57).unwrap()
        );
        assert!(SubadditivePotential::cocycle(MatrixFamily::diag_half())
            .negated()
            .is_err());
    }

    #[test]
    fn cocycle_examples() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::cocycle(MatrixFamily::diag_half());
        let v = evaluate(&phi, &f, Point::scalar(0.4), 10).unwrap();
        assert!((v - 10.0 * 0.5f64.ln()).abs() < 1e-12);
        let phi = SubadditivePotential::cocycle(MatrixFamily::scaled_rotation());
        let v = evaluate(&phi, &f, Point::scalar(0.4), 25).unwrap();
        assert!((v + 25.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn renormalization_frequency_does_not_matter() {
        let f = DynamicalSystem::doubling();
        let x = Point::exact(Fraction::new(12345, 65537).unwrap());
        for family in [
            MatrixFamily::diag_cos(),
            MatrixFamily::scaled_rotation(),
            MatrixFamily::diag_half(),
        ] {
            let a = SubadditivePotential::cocycle(family.clone()).with_renormalization(1);
            let b = SubadditivePotential::cocycle(family).with_renormalization(50);
            for n in [1, 49, 50, 51, 333] {
                let va = evaluate(&a, &f, x, n).unwrap();
                let vb = evaluate(&b, &f, x, n).unwrap();
                assert!((va - vb).abs() < 1e-9, "n={n}: {va} vs {vb}");
            }
        }
    }

    #[test]
    fn three_dimensional_cocycle() {
        let f = DynamicalSystem::rotation(0.1);
        let fam =
            MatrixFamily::constant("d3", 3, vec![0.5, 0.0, 0.0, 0.0, 0.2, 0.0, 0.0, 0.0, 0.1]);
        let v = evaluate(
            &SubadditivePotential::cocycle(fam),
            &f,
            Point::scalar(0.0),
            20,
        )
        .unwrap();
        assert!((v - 20.0 * 0.5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn singular_collapse() {
        let f = DynamicalSystem::doubling();
        let fam = MatrixFamily::constant("zero", 2, vec![0.0; 4]);
        assert!(matches!(
            evaluate(
                &SubadditivePotential::cocycle(fam),
                &f,
                Point::scalar(0.1),
                3
            ),
            Err(Error::SingularCollapse { step: 1 })
        ));
    }

    #[test]
    fn truncation_examples() {
        let f = DynamicalSystem::doubling();
        let x = Point::scalar(0.3);
        let steep = SubadditivePotential::birkhoff(Observable::constant(-2.0)).truncated();
        let mild = SubadditivePotential::birkhoff(Observable::constant(-0.5)).truncated();
        for n in 1..20 {
            assert_eq!(evaluate(&steep, &f, x, n).unwrap(), -(n as f64));
            assert_eq!(evaluate(&mild, &f, x, n).unwrap(), -0.5 * n as f64);
        }
        assert_eq!(steep.kind(), PotentialKind::Truncated);
    }

    #[test]
    fn tabulated_horizon_limit() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::tabulated("square", (1..=10).map(|n| n as f64).collect());
        assert_eq!(evaluate(&phi, &f, Point::scalar(0.3), 4).unwrap(), 16.0);
        assert!(matches!(
            evaluate(&phi, &f, Point::scalar(0.3), 11),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
