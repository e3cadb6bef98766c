use std::fmt;
use std::sync::Arc;

use crate::linalg::{Matrix, Vector};

type Eval = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;
type Grad = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;

/// Default step for first-derivative central differences.
pub const FD_STEP: f64 = 1e-6;
/// Default outer step for nested (second-order) differences.
pub const NESTED_FD_STEP: f64 = 1e-4;

/// Smooth function on the ambient space, optionally with its ambient gradient.
#[derive(Clone)]
pub struct ScalarField {
    eval: Eval,
    grad: Option<Grad>,
    fd_step: f64,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField").field("analytic_gradient", &self.grad.is_some()).field("fd_step", &self.fd_step).finish()
    }
}

impl ScalarField {
    pub fn new(f: impl Fn(&Vector) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField { eval: Arc::new(f), grad: None, fd_step: FD_STEP }
    }

    pub fn with_gradient(mut self, g: impl Fn(&Vector) -> Vector + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c).with_gradient(|x| Vector::zeros(x.len()))
    }

    /// `x -> a . x`.
    pub fn linear(a: Vector) -> Self {
        let g = a.clone();
        Self::new(move |x| a.dot(x)).with_gradient(move |_| g.clone())
    }

    /// Ambient coordinate `x_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut a = Vector::zeros(dim);
        a[i] = 1.0;
        Self::linear(a)
    }

    /// `x -> x^T A x / 2 + b . x`, with `A` symmetrised.
    pub fn quadratic(a: Matrix, b: Vector) -> Self {
        let a = (&a + a.transpose()) * 0.5;
        let (a2, b2) = (a.clone(), b.clone());
        Self::new(move |x| 0.5 * x.dot(&(&a * x)) + b.dot(x)).with_gradient(move |x| &a2 * x + &b2)
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        (self.eval)(x)
    }

    pub fn gradient(&self, x: &Vector) -> Option<Vector> {
        self.grad.as_ref().map(|g| g(x))
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    /// Pointwise product, with the Leibniz gradient when both factors have one.
    pub fn product(&self, other: &ScalarField) -> ScalarField {
        let (f, g) = (self.clone(), other.clone());
        let mut out = ScalarField::new(move |x| f.eval(x) * g.eval(x)).with_fd_step(self.fd_step.max(other.fd_step));
        if self.has_gradient() && other.has_gradient() {
            let (f, g) = (self.clone(), other.clone());
            out = out.with_gradient(move |x| f.gradient(x).unwrap() * g.eval(x) + g.gradient(x).unwrap() * f.eval(x));
        }
        out
    }

    /// Pointwise sum.
    pub fn sum(&self, other: &ScalarField) -> ScalarField {
        let (f, g) = (self.clone(), other.clone());
        let mut out = ScalarField::new(move |x| f.eval(x) + g.eval(x)).with_fd_step(self.fd_step.max(other.fd_step));
        if self.has_gradient() && other.has_gradient() {
            let (f, g) = (self.clone(), other.clone());
            out = out.with_gradient(move |x| f.gradient(x).unwrap() + g.gradient(x).unwrap());
        }
        out
    }

    pub fn scaled(&self, s: f64) -> ScalarField {
        let f = self.clone();
        let mut out = ScalarField::new(move |x| s * f.eval(x)).with_fd_step(self.fd_step);
        if self.has_gradient() {
            let f = self.clone();
            out = out.with_gradient(move |x| f.gradient(x).unwrap() * s);
        }
        out
    }
}
