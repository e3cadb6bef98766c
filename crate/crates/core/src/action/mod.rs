//! Group actions, infinitesimal generators, moment maps and the checks of
//! the moment-map axioms.

mod catalogue;

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix3;

pub use catalogue::{
    angular_momentum, builtin_moment_map, coadjoint, diagonal_spheres, harmonic_oscillator, left_translation, linear_momentum,
    sphere_rotation, BUILTIN_MOMENT_MAPS,
};

use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, DualElement, GroupElement, LieAlgebra};
use crate::linalg::{column_space, null_space, Matrix, Vector};
use crate::phase_space::{self, PhaseSpace, ScalarField, FD_STEP};

type ActFn = Arc<dyn Fn(&GroupElement, &Vector) -> Result<Vector> + Send + Sync>;
type GenFn = Arc<dyn Fn(&AlgebraElement, &Vector) -> Vector + Send + Sync>;
type MuFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;

/// Tolerance on invariance of potentials and Hamiltonians.
pub const INVARIANCE_TOL: f64 = 1e-8;

/// Left action of a group on a phase space.
#[derive(Clone)]
pub struct GroupAction {
    name: String,
    algebra: Arc<LieAlgebra>,
    space: PhaseSpace,
    act: ActFn,
    generator: Option<GenFn>,
}

impl fmt::Debug for GroupAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupAction")
            .field("name", &self.name)
            .field("algebra", &self.algebra.name())
            .field("space", &self.space.name())
            .finish()
    }
}

pub(crate) fn rotation(g: &GroupElement) -> Result<Matrix3<f64>> {
    let m = g.real_matrix().ok_or_else(|| Error::Unsupported("expected a rotation matrix".into()))?;
    if m.shape() != (3, 3) {
        return Err(Error::Dimension { expected: 3, got: m.nrows() });
    }
    Ok(Matrix3::from_fn(|i, j| m[(i, j)]))
}

impl GroupAction {
    pub fn new(
        name: &str,
        algebra: Arc<LieAlgebra>,
        space: PhaseSpace,
        act: impl Fn(&GroupElement, &Vector) -> Result<Vector> + Send + Sync + 'static,
    ) -> Self {
        GroupAction { name: name.into(), algebra, space, act: Arc::new(act), generator: None }
    }

    /// Attach an analytic generator `(xi, p) -> xi_M(p)` (ambient vector).
    pub fn with_generator(mut self, g: impl Fn(&AlgebraElement, &Vector) -> Vector + Send + Sync + 'static) -> Self {
        self.generator = Some(Arc::new(g));
        self
    }

    /// Action fixing every point.
    pub fn trivial(algebra: Arc<LieAlgebra>, space: PhaseSpace) -> Self {
        Self::new("trivial", algebra, space, |_, p| Ok(p.clone())).with_generator(|_, p| Vector::zeros(p.len()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }
    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }
    pub fn has_analytic_generator(&self) -> bool {
        self.generator.is_some()
    }

    pub fn act(&self, g: &GroupElement, p: &Vector) -> Result<Vector> {
        (self.act)(g, p)
    }

    /// `xi_M(p)`: analytic when available, otherwise a central difference
    /// of `t -> exp(t xi) . p`.
    pub fn infinitesimal_generator(&self, xi: &AlgebraElement, p: &Vector) -> Result<Vector> {
        self.space.check_point(p)?;
        crate::error::check_dim(self.algebra.dim(), xi.0.len())?;
        match &self.generator {
            Some(g) => Ok(g(xi, p)),
            None => self.generator_fd(xi, p, FD_STEP),
        }
    }

    /// Central-difference generator with step `h`.
    pub fn generator_fd(&self, xi: &AlgebraElement, p: &Vector, h: f64) -> Result<Vector> {
        let plus = self.act(&self.algebra.exp(&xi.scaled(h))?, p)?;
        let minus = self.act(&self.algebra.exp(&xi.scaled(-h))?, p)?;
        Ok((plus - minus) / (2.0 * h))
    }

    /// Ambient matrix whose column `i` is `(e_i)_M(p)`.
    pub fn generator_matrix(&self, p: &Vector) -> Result<Matrix> {
        let d = self.algebra.dim();
        let mut m = Matrix::zeros(self.space.ambient_dim(), d);
        for i in 0..d {
            m.set_column(i, &self.infinitesimal_generator(&self.algebra.basis_element(i), p)?);
        }
        Ok(m)
    }

    /// Generators in the intrinsic frame of the space.
    pub fn intrinsic_generator_matrix(&self, p: &Vector) -> Result<Matrix> {
        let m = self.generator_matrix(p)?;
        let t = self.space.tangent_basis(p);
        Ok(crate::linalg::pinv(&t) * m)
    }

    /// Basis (columns, algebra coordinates) of `g_p = {xi : xi_M(p) = 0}`.
    pub fn isotropy_algebra_basis(&self, p: &Vector) -> Result<Matrix> {
        Ok(null_space(&self.generator_matrix(p)?))
    }

    /// Orthonormal ambient basis of `T_p(G . p)`.
    pub fn orbit_tangent_basis(&self, p: &Vector) -> Result<Matrix> {
        Ok(column_space(&self.generator_matrix(p)?))
    }
}

/// Moment map `mu: M -> g*` of an action.
#[derive(Clone)]
pub struct MomentMap {
    name: String,
    action: GroupAction,
    mu: MuFn,
}

impl fmt::Debug for MomentMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentMap").field("name", &self.name).field("action", &self.action).finish()
    }
}

impl MomentMap {
    pub fn new(name: &str, action: GroupAction, mu: impl Fn(&Vector) -> Vector + Send + Sync + 'static) -> Self {
        MomentMap { name: name.into(), action, mu: Arc::new(mu) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn action(&self) -> &GroupAction {
        &self.action
    }
    pub fn space(&self) -> &PhaseSpace {
        &self.action.space
    }
    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.action.algebra
    }

    pub fn value(&self, p: &Vector) -> DualElement {
        DualElement((self.mu)(p))
    }

    /// Comoment `mu^(xi) = <mu(.), xi>` as a field.
    pub fn comoment(&self, xi: &AlgebraElement) -> ScalarField {
        let (mu, xi) = (self.mu.clone(), xi.0.clone());
        ScalarField::new(move |p| mu(p).dot(&xi))
    }

    /// Intrinsic differential of `mu`: row `i` is `d mu^(e_i)`.
    pub fn jacobian(&self, p: &Vector) -> Matrix {
        let space = self.space();
        let d = self.algebra().dim();
        let mut j = Matrix::zeros(d, space.dim());
        let h = FD_STEP;
        for k in 0..space.dim() {
            let mut e = Vector::zeros(space.dim());
            e[k] = 1.0;
            let col = ((self.mu)(&space.retract(p, &e, h)) - (self.mu)(&space.retract(p, &e, -h))) / (2.0 * h);
            j.set_column(k, &col);
        }
        j
    }
}

/// Moment map `mu^(xi) = i_{xi_M} theta` of an invariant one-form.
///
/// `theta(p)` returns the ambient covector of the form at `p`. Invariance
/// `Phi_g^* theta = theta` is checked at the supplied samples.
pub fn moment_from_potential(
    name: &str,
    action: &GroupAction,
    theta: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    samples: &[(GroupElement, Vector)],
) -> Result<MomentMap> {
    let space = action.space().clone();
    let mut worst: f64 = 0.0;
    for (g, p) in samples {
        space.check_point(p)?;
        let q = action.act(g, p)?;
        let t = space.tangent_basis(p);
        for k in 0..space.dim() {
            let mut e = Vector::zeros(space.dim());
            e[k] = 1.0;
            let h = FD_STEP;
            let push = (action.act(g, &space.retract(p, &e, h))? - action.act(g, &space.retract(p, &e, -h))?) / (2.0 * h);
            let lhs = theta(&q).dot(&push);
            let rhs = theta(p).dot(&t.column(k));
            worst = worst.max((lhs - rhs).abs());
        }
    }
    if worst > INVARIANCE_TOL {
        return Err(Error::InvarianceViolation { residual: worst });
    }
    let act = action.clone();
    let d = action.algebra().dim();
    Ok(MomentMap::new(name, action.clone(), move |p| {
        let th = theta(p);
        Vector::from_fn(d, |i, _| th.dot(&act.infinitesimal_generator(&act.algebra().basis_element(i), p).unwrap()))
    }))
}

/// Linear action of a matrix group on a configuration space `R^n`.
/// Map from group elements to the real matrices they act by.
pub type MatrixFn = Arc<dyn Fn(&GroupElement) -> Result<Matrix> + Send + Sync>;

#[derive(Clone)]
pub struct ConfigurationAction {
    pub algebra: Arc<LieAlgebra>,
    pub n: usize,
    /// Real matrix by which a group element acts.
    pub matrix: MatrixFn,
}

/// Cotangent lift of a linear configuration action to `T*R^n = R^2n`,
/// `g . (q, p) = (A q, A^{-T} p)`, with moment map `mu(q, p)(xi) = p(xi_Q(q))`.
pub fn cotangent_lift_moment(name: &str, base: &ConfigurationAction) -> MomentMap {
    let n = base.n;
    let space = PhaseSpace::standard(n);
    let m1 = base.matrix.clone();
    let act = move |g: &GroupElement, x: &Vector| -> Result<Vector> {
        let a = m1(g)?;
        let inv_t = a.clone().try_inverse().ok_or_else(|| Error::Precondition("action matrix is singular".into()))?.transpose();
        let mut out = Vector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&(&a * x.rows(0, n)));
        out.rows_mut(n, n).copy_from(&(inv_t * x.rows(n, n)));
        Ok(out)
    };
    let alg = base.algebra.clone();
    let gens: Vec<Matrix> = (0..alg.dim())
        .map(|i| {
            let h = 1e-6;
            let e = alg.basis_element(i);
            let plus = (base.matrix)(&alg.exp(&e.scaled(h)).unwrap()).unwrap();
            let minus = (base.matrix)(&alg.exp(&e.scaled(-h)).unwrap()).unwrap();
            (plus - minus) / (2.0 * h)
        })
        .collect();
    let gens_gen = gens.clone();
    let action = GroupAction::new(name, alg.clone(), space, act).with_generator(move |xi, x| {
        let mut a = Matrix::zeros(n, n);
        for (c, g) in xi.0.iter().zip(&gens_gen) {
            a += g * *c;
        }
        let mut out = Vector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&(&a * x.rows(0, n)));
        out.rows_mut(n, n).copy_from(&(-a.transpose() * x.rows(n, n)));
        out
    });
    MomentMap::new(name, action, move |x| {
        let (q, p) = (x.rows(0, n), x.rows(n, n));
        Vector::from_fn(gens.len(), |i, _| p.dot(&(&gens[i] * q)))
    })
}

/// `max |Pi(d mu^(xi)) - xi_M|` over the basis and the points.
pub fn check_moment_condition(mm: &MomentMap, points: &[Vector]) -> Result<f64> {
    let space = mm.space();
    let mut worst: f64 = 0.0;
    for p in points {
        space.check_point(p)?;
        for i in 0..mm.algebra().dim() {
            let xi = mm.algebra().basis_element(i);
            let x = phase_space::hamiltonian_vf(space, &mm.comoment(&xi), p)?;
            let g = mm.action().infinitesimal_generator(&xi, p)?;
            worst = worst.max((x - g).amax());
        }
    }
    Ok(worst)
}

/// `max |mu(g . p) - Ad*(g) mu(p)|`.
pub fn check_equivariance(mm: &MomentMap, groups: &[GroupElement], points: &[Vector]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for g in groups {
        for p in points {
            mm.space().check_point(p)?;
            let lhs = mm.value(&mm.action().act(g, p)?);
            let rhs = mm.algebra().coadjoint(g, &mm.value(p))?;
            worst = worst.max((lhs.0 - rhs.0).amax());
        }
    }
    Ok(worst)
}

/// Largest `|H(g . p) - H(p)|` over the samples.
pub fn invariance_residual(action: &GroupAction, h: &ScalarField, groups: &[GroupElement], points: &[Vector]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for g in groups {
        for p in points {
            worst = worst.max((h.eval(&action.act(g, p)?) - h.eval(p)).abs());
        }
    }
    Ok(worst)
}

/// Largest drift of `mu` along the flow of an invariant `H` from `p0`.
///
/// Invariance of `H` is checked first at `p0` and its group translates.
pub fn check_noether(mm: &MomentMap, h: &ScalarField, groups: &[GroupElement], p0: &Vector, t_end: f64, dt: f64) -> Result<f64> {
    let r = invariance_residual(mm.action(), h, groups, std::slice::from_ref(p0))?;
    if r > INVARIANCE_TOL {
        return Err(Error::SymmetryViolation { residual: r });
    }
    let tr = phase_space::flow(mm.space(), h, p0, t_end, dt)?;
    let mu0 = mm.value(p0).0;
    Ok(tr.states.iter().map(|x| (mm.value(x).0 - &mu0).amax()).fold(0.0, f64::max))
}

/// `max |{mu^(e_i), mu^(e_j)} + mu^([e_i, e_j])|`.
pub fn check_comoment_antihom(mm: &MomentMap, points: &[Vector]) -> Result<f64> {
    let alg = mm.algebra();
    let d = alg.dim();
    let mut worst: f64 = 0.0;
    for p in points {
        let mu = mm.value(p);
        for i in 0..d {
            for j in (i + 1)..d {
                let (ei, ej) = (alg.basis_element(i), alg.basis_element(j));
                let br = phase_space::poisson_bracket(mm.space(), &mm.comoment(&ei), &mm.comoment(&ej), p)?;
                let rhs = mu.pair(&alg.bracket(&ei, &ej)?);
                worst = worst.max((br + rhs).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_action_generators_vanish() {
        let alg = Arc::new(LieAlgebra::so3());
        let a = GroupAction::trivial(alg, PhaseSpace::standard(1));
        let p = Vector::from_vec(vec![1.0, 2.0]);
        assert_eq!(a.isotropy_algebra_basis(&p).unwrap().ncols(), 3);
        assert_eq!(a.orbit_tangent_basis(&p).unwrap().ncols(), 0);
    }
}
