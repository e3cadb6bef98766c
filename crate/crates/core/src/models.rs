//! Concrete mechanical systems used by the scenarios and tests.

use std::sync::Arc;

use crate::action::{self, MomentMap};
use crate::error::Result;
use crate::lie::{AlgebraElement, DualElement, GroupElement, LieAlgebra};
use crate::linalg::Vector;
use crate::phase_space::{self, PhaseSpace, ScalarField, Trajectory};

/// Rigid-body energy `h(m) = sum m_i^2 / (2 I_i)` on `so(3)*`.
pub fn rigid_body(inertia: [f64; 3]) -> ScalarField {
    ScalarField::new(move |m| 0.5 * (0..3).map(|i| m[i] * m[i] / inertia[i]).sum::<f64>())
        .with_gradient(move |m| Vector::from_fn(3, |i, _| m[i] / inertia[i]))
}

/// `pi(g, alpha) = -g^T alpha` from right-trivialised `T*SO(3)` to `so(3)*`;
/// the left-invariant rigid body on `T*SO(3)` is `h o pi`.
pub fn body_momentum(space: &PhaseSpace) -> impl Fn(&Vector) -> Vector + Send + Sync + Clone + 'static {
    let space = space.clone();
    move |x: &Vector| {
        let (g, a) = space.split_cotangent(x).expect("point of T*SO(3)");
        -(g.real_matrix().expect("rotation").transpose() * a.0)
    }
}

/// Left-invariant rigid body on `T*SO(3)` with its left-translation moment map.
pub struct LiftedRigidBody {
    pub moment_map: MomentMap,
    pub hamiltonian: ScalarField,
    pub reduced: ScalarField,
    pub inertia: [f64; 3],
}

impl LiftedRigidBody {
    pub fn new(inertia: [f64; 3]) -> Result<Self> {
        let mm = action::left_translation(Arc::new(LieAlgebra::so3()))?;
        let pi = body_momentum(mm.space());
        let h = rigid_body(inertia);
        let h2 = h.clone();
        let hamiltonian = ScalarField::new(move |x| h2.eval(&pi(x)));
        Ok(LiftedRigidBody { moment_map: mm, hamiltonian, reduced: h, inertia })
    }

    pub fn space(&self) -> &PhaseSpace {
        self.moment_map.space()
    }

    /// Exact motion from `(g0, alpha0)`.
    pub fn motion(&self, g0: &GroupElement, alpha0: &DualElement, t_end: f64, dt: f64) -> Result<Trajectory> {
        let p0 = self.space().cotangent_point(g0, alpha0)?;
        phase_space::flow(self.space(), &self.hamiltonian, &p0, t_end, dt)
    }

    /// A curve in `mu^{-1}(alpha0)` projecting to a reduced motion: the exact
    /// motion from `(e, alpha0)` moved by `exp(-phi(t) alpha0) ∈ G_alpha0`.
    /// Its reconstruction from `g0 = e` is `g(t) = exp(phi(t) alpha0)` with
    /// `xi(t) = phi'(t) alpha0`.
    pub fn twisted_lift(&self, alpha0: &DualElement, phi: &dyn Fn(f64) -> f64, t_end: f64, dt: f64) -> Result<Trajectory> {
        let alg = self.moment_map.algebra();
        let motion = self.motion(&alg.identity(), alpha0, t_end, dt)?;
        let states = motion
            .times
            .iter()
            .zip(&motion.states)
            .map(|(&t, x)| self.moment_map.action().act(&alg.exp(&AlgebraElement(&alpha0.0 * -phi(t)))?, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { times: motion.times, states })
    }
}

/// Default twist used by the reconstruction scenario.
pub fn default_twist(t: f64) -> f64 {
    0.3 * t.sin() + 0.2 * t
}

/// Central-force Hamiltonian `|p|^2 / 2 + V(|q|)` on `R^6` with
/// `V(r) = -1 / sqrt(r^2 + 0.1) + r^2 / 20`.
pub fn central_force() -> ScalarField {
    let v = |q2: f64| -1.0 / (q2 + 0.1).sqrt() + q2 / 20.0;
    // d/dq V(|q|^2) = q * (2 V'(|q|^2)).
    let dv = |q2: f64| (q2 + 0.1).powf(-1.5) + 0.1;
    ScalarField::new(move |x| {
        let q2 = x.rows(0, 3).norm_squared();
        0.5 * x.rows(3, 3).norm_squared() + v(q2)
    })
    .with_gradient(move |x| {
        let q2 = x.rows(0, 3).norm_squared();
        let mut g = Vector::zeros(6);
        g.rows_mut(0, 3).copy_from(&(x.rows(0, 3) * dv(q2)));
        g.rows_mut(3, 3).copy_from(&x.rows(3, 3));
        g
    })
}

/// `H = |x|^2 / 2` on any `R^2n`.
pub fn harmonic() -> ScalarField {
    ScalarField::new(|x| 0.5 * x.norm_squared()).with_gradient(|x| x.clone())
}
