//! Model phase spaces embedded in Euclidean space, Hamiltonian vector
//! fields, Poisson brackets and RK4 flows with re-projection.
//!
//! Conventions: `X_f = Pi(df, .)`, `{f, g} = Pi(df, dg) = dg(X_f)`, and on
//! symplectic spaces `i_{X_f} omega = df`, so `{f, g} = -omega(X_f, X_g)`.
//! On `R^2n` with `omega = dq ^ dp` this gives `X_H = (H_p, -H_q)` and
//! `{q, p} = -1`.

mod field;
mod space;

use serde_json::json;

pub use field::{ScalarField, FD_STEP, NESTED_FD_STEP};
pub use space::{PhaseSpace, SpaceKind, POINT_TOL, TANGENT_TOL};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Largest constraint correction tolerated after an integration step.
pub const MAX_DRIFT: f64 = 1e-4;

/// Intrinsic differential of `f` at `p` (directional derivatives along the
/// tangent frame).
pub fn differential(space: &PhaseSpace, f: &ScalarField, p: &Vector) -> Vector {
    if let Some(g) = f.gradient(p) {
        return space.tangent_basis(p).transpose() * g;
    }
    differential_fd(space, f, p, f.fd_step())
}

/// Central-difference intrinsic differential with an explicit step.
pub fn differential_fd(space: &PhaseSpace, f: &ScalarField, p: &Vector, h: f64) -> Vector {
    let d = space.dim();
    Vector::from_fn(d, |k, _| {
        let mut e = Vector::zeros(d);
        e[k] = 1.0;
        (f.eval(&space.retract(p, &e, h)) - f.eval(&space.retract(p, &e, -h))) / (2.0 * h)
    })
}

/// `X_H(p) = Pi(dH, .)` as an ambient vector.
pub fn hamiltonian_vf(space: &PhaseSpace, h: &ScalarField, p: &Vector) -> Result<Vector> {
    space.check_point(p)?;
    Ok(hamiltonian_vf_unchecked(space, h, p))
}

pub(crate) fn hamiltonian_vf_unchecked(space: &PhaseSpace, h: &ScalarField, p: &Vector) -> Vector {
    space.sharp(p, &differential(space, h, p))
}

/// Intrinsic coordinates of `X_H(p)`.
pub fn hamiltonian_vf_intrinsic(space: &PhaseSpace, h: &ScalarField, p: &Vector) -> Vector {
    space.intrinsic_bivector(p).transpose() * differential(space, h, p)
}

/// `{f, g}(p) = Pi(df, dg)`.
pub fn poisson_bracket(space: &PhaseSpace, f: &ScalarField, g: &ScalarField, p: &Vector) -> Result<f64> {
    space.check_point(p)?;
    Ok(bracket_unchecked(space, f, g, p))
}

fn bracket_unchecked(space: &PhaseSpace, f: &ScalarField, g: &ScalarField, p: &Vector) -> f64 {
    let df = differential(space, f, p);
    let dg = differential(space, g, p);
    df.dot(&(space.intrinsic_bivector(p) * dg))
}

/// The bracket `{f, g}` as a field, differentiated numerically with step `h`.
pub fn bracket_field(space: &PhaseSpace, f: &ScalarField, g: &ScalarField, h: f64) -> ScalarField {
    let (s, f, g) = (space.clone(), f.clone(), g.clone());
    ScalarField::new(move |p| bracket_unchecked(&s, &f, &g, p)).with_fd_step(h)
}

/// Pieces of the cotangent-bundle bracket at `(g, alpha)`:
/// `H_g(R_{g*} F_alpha) - F_g(R_{g*} H_alpha)` and `alpha([F_alpha, H_alpha])`.
pub fn cotangent_bracket_terms(space: &PhaseSpace, f: &ScalarField, h: &ScalarField, p: &Vector) -> Result<(f64, f64)> {
    let SpaceKind::Cotangent { algebra } = space.kind() else {
        return Err(Error::Unsupported(format!("{} is not a cotangent bundle", space.name())));
    };
    space.check_point(p)?;
    let d = algebra.dim();
    let df = differential(space, f, p);
    let dh = differential(space, h, p);
    let (f_g, f_a) = (df.rows(0, d), df.rows(d, d).into_owned());
    let (h_g, h_a) = (dh.rows(0, d), dh.rows(d, d).into_owned());
    let translation = h_g.dot(&f_a) - f_g.dot(&h_a);
    let (_, alpha) = space.split_cotangent(p)?;
    let rotation = alpha.0.dot(&algebra.bracket_vec(&f_a, &h_a));
    Ok((translation, rotation))
}

/// Bracket on `T*G` from the trivialised partial differentials,
/// `H_g(R_{g*} F_alpha) - F_g(R_{g*} H_alpha) - alpha([F_alpha, H_alpha])`.
///
/// The sign of the last term is the one that agrees with
/// `{F, H} = -omega(X_F, X_H)`.
pub fn cotangent_group_bracket(space: &PhaseSpace, f: &ScalarField, h: &ScalarField, p: &Vector) -> Result<f64> {
    let (t, r) = cotangent_bracket_terms(space, f, h, p)?;
    Ok(t - r)
}

/// Cyclic sum `{f,{g,h}} + {g,{h,f}} + {h,{f,g}}` at `p`, with inner
/// brackets differentiated by central differences of step `outer`.
pub fn check_jacobi(space: &PhaseSpace, f: &ScalarField, g: &ScalarField, h: &ScalarField, p: &Vector, outer: f64) -> Result<f64> {
    space.check_point(p)?;
    let gh = bracket_field(space, g, h, outer);
    let hf = bracket_field(space, h, f, outer);
    let fg = bracket_field(space, f, g, outer);
    let s = bracket_unchecked(space, f, &gh, p) + bracket_unchecked(space, g, &hf, p) + bracket_unchecked(space, h, &fg, p);
    Ok(s.abs())
}

/// Sampled integral curve.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vector>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
    pub fn last(&self) -> Option<&Vector> {
        self.states.last()
    }

    /// Values of a field along the curve.
    pub fn evaluate(&self, f: &ScalarField) -> Vec<f64> {
        self.states.iter().map(|x| f.eval(x)).collect()
    }

    /// Largest `|f(x_t) - f(x_0)|`.
    pub fn drift(&self, f: &ScalarField) -> f64 {
        let v = self.evaluate(f);
        v.iter().map(|x| (x - v[0]).abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "times": self.times,
            "states": self.states.iter().map(|s| s.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>(),
        })
    }
}

/// One classical Runge-Kutta step of `x' = f(x)`.
pub fn rk4_step(f: &dyn Fn(&Vector) -> Result<Vector>, x: &Vector, dt: f64) -> Result<Vector> {
    let k1 = f(x)?;
    let k2 = f(&(x + &k1 * (dt / 2.0)))?;
    let k3 = f(&(x + &k2 * (dt / 2.0)))?;
    let k4 = f(&(x + &k3 * dt))?;
    Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

/// Signature of a one-step method usable by [`integrate`].
pub type Stepper = fn(&dyn Fn(&Vector) -> Result<Vector>, &Vector, f64) -> Result<Vector>;

/// Integrate an ambient vector field on `space` from `p0` over `[0, t_end]`,
/// re-projecting after every step.
pub fn integrate(
    space: &PhaseSpace,
    field: &dyn Fn(&Vector) -> Result<Vector>,
    p0: &Vector,
    t_end: f64,
    dt: f64,
    stepper: Stepper,
) -> Result<Trajectory> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::Precondition(format!("step must be positive and finite, got {dt}")));
    }
    if t_end.is_nan() || t_end < 0.0 {
        return Err(Error::Precondition(format!("duration must be nonnegative, got {t_end}")));
    }
    space.check_point(p0)?;
    let n = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(0.0);
    states.push(p0.clone());
    let on_space = |x: &Vector| -> Result<Vector> { field(&space.project(x)?) };
    let mut x = p0.clone();
    for k in 0..n {
        let t0 = k as f64 * dt;
        let h = (t_end - t0).min(dt);
        let raw = stepper(&on_space, &x, h)?;
        let t = t0 + h;
        let fail = |drift: f64| Error::IntegrationFailure { time: t, drift };
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(fail(f64::INFINITY));
        }
        let next = space.project(&raw).map_err(|_| fail(f64::INFINITY))?;
        let correction = (&next - &raw).norm();
        let residual = space.constraint_residual(&next);
        if correction > MAX_DRIFT || residual > MAX_DRIFT {
            return Err(fail(correction.max(residual)));
        }
        x = next;
        times.push(if k + 1 == n { t_end } else { t });
        states.push(x.clone());
    }
    Ok(Trajectory { times, states })
}

/// Integral curve of `X_H` by RK4 with re-projection.
pub fn flow(space: &PhaseSpace, h: &ScalarField, p0: &Vector, t_end: f64, dt: f64) -> Result<Trajectory> {
    let field = |x: &Vector| Ok(hamiltonian_vf_unchecked(space, h, x));
    integrate(space, &field, p0, t_end, dt, rk4_step)
}

/// Largest `|Pi(a, b) + Pi(b, a)|` over the given covector pairs.
pub fn antisymmetry_residual(pi: &Matrix) -> f64 {
    (pi + pi.transpose()).amax()
}
