//! Marsden-Weinstein and Marsden-Ratiu conditions, Kirillov-Kostant-Souriau
//! forms, reduced dynamics and reconstruction of lifted motions.

use crate::action::{GroupAction, MomentMap};
use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, DualElement, GroupElement, LieAlgebra};
use crate::linalg::{column_space, hstack, lstsq, null_space, rank, Matrix, Vector};
use crate::phase_space::{self, PhaseSpace, ScalarField, Trajectory};
use crate::transversal::Submanifold;

/// Tolerance for numerically verified identities in this module.
pub const REDUCTION_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct CleanLevelReport {
    pub dim: usize,
    pub kernel_dim: usize,
    pub orbit_dim: usize,
    pub image_dim: usize,
    pub isotropy_dim: usize,
    /// `max |omega(k, o)|` for `k` in `ker mu_*`, `o` in `g_M(p)`.
    pub omega_residual: f64,
    /// `max |xi(mu_* v)|` for `xi` in `g_p`.
    pub annihilator_residual: f64,
    pub pass: bool,
}

/// Checks `ker mu_*(p) = g_M(p)^omega` and `im mu_*(p) = g_p°` at `p`.
pub fn check_clean_level_kernel(mm: &MomentMap, p: &Vector) -> Result<CleanLevelReport> {
    let space = mm.space();
    space.check_point(p)?;
    let w = space
        .symplectic_matrix(p)
        .ok_or_else(|| Error::Unsupported(format!("{} is not symplectic", space.name())))?;
    let jac = mm.jacobian(p);
    let kernel = null_space(&jac);
    let gens = mm.action().intrinsic_generator_matrix(p)?;
    let orbit = column_space(&gens);
    let iso = null_space(&gens);
    let omega_residual = if kernel.ncols() * orbit.ncols() == 0 { 0.0 } else { (kernel.transpose() * &w * &orbit).amax() };
    let annihilator_residual = if iso.ncols() == 0 { 0.0 } else { (iso.transpose() * &jac).amax() };
    let image_dim = rank(&jac);
    let d = space.dim();
    let g = mm.algebra().dim();
    let pass = kernel.ncols() + orbit.ncols() == d
        && image_dim + iso.ncols() == g
        && omega_residual < REDUCTION_TOL
        && annihilator_residual < REDUCTION_TOL;
    Ok(CleanLevelReport {
        dim: d,
        kernel_dim: kernel.ncols(),
        orbit_dim: orbit.ncols(),
        image_dim,
        isotropy_dim: iso.ncols(),
        omega_residual,
        annihilator_residual,
        pass,
    })
}

/// Basis (columns) of the coadjoint isotropy algebra `g_alpha`.
pub fn coadjoint_isotropy(algebra: &LieAlgebra, alpha: &DualElement) -> Result<Matrix> {
    Ok(null_space(&algebra.coadjoint_generator_matrix(alpha)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedFormReport {
    pub level_dim: usize,
    /// Dimension of `T_p(G_alpha . p)`.
    pub orbit_dim: usize,
    /// Nullity of the restriction of `omega` to `T_p mu^{-1}(alpha)`.
    pub degenerate_dim: usize,
    pub reduced_rank: usize,
    /// `max |omega(u, v)|`, `u` in the `G_alpha`-orbit, `v` in the level set.
    pub residual: f64,
    pub pass: bool,
}

/// Checks that the null directions of `i^* omega` on `mu^{-1}(alpha)` at `p`
/// are exactly the `G_alpha`-orbit directions.
pub fn check_reduced_form_descends(mm: &MomentMap, alpha: &DualElement, p: &Vector) -> Result<ReducedFormReport> {
    let space = mm.space();
    space.check_point(p)?;
    let w = space
        .symplectic_matrix(p)
        .ok_or_else(|| Error::Unsupported(format!("{} is not symplectic", space.name())))?;
    let off = (mm.value(p).0 - &alpha.0).amax();
    if off > REDUCTION_TOL {
        return Err(Error::LevelSet { step: 0, residual: off });
    }
    let level = null_space(&mm.jacobian(p));
    let g_alpha = coadjoint_isotropy(mm.algebra(), alpha)?;
    let gens = mm.action().intrinsic_generator_matrix(p)?;
    let orbit = if g_alpha.ncols() == 0 { Matrix::zeros(space.dim(), 0) } else { column_space(&(gens * &g_alpha)) };
    let residual = if orbit.ncols() * level.ncols() == 0 { 0.0 } else { (orbit.transpose() * &w * &level).amax() };
    let restricted = level.transpose() * &w * &level;
    let reduced_rank = crate::linalg::rank_with_scale(&restricted, w.norm());
    let degenerate_dim = level.ncols() - reduced_rank;
    Ok(ReducedFormReport {
        level_dim: level.ncols(),
        orbit_dim: orbit.ncols(),
        degenerate_dim,
        reduced_rank,
        residual,
        pass: degenerate_dim == orbit.ncols() && residual < REDUCTION_TOL,
    })
}

/// Kirillov-Kostant-Souriau form `omega_beta(xi_{g*}, eta_{g*}) = -beta([xi, eta])`.
pub fn kks_form(algebra: &LieAlgebra, beta: &DualElement, xi: &AlgebraElement, eta: &AlgebraElement) -> Result<f64> {
    Ok(-beta.pair(&algebra.bracket(xi, eta)?))
}

/// Integral curve of the Lie-Poisson field `X_H(alpha) = -alpha o ad(dH_alpha)`.
pub fn lie_poisson_flow(algebra: &LieAlgebra, h: &ScalarField, alpha0: &DualElement, t_end: f64, dt: f64) -> Result<Trajectory> {
    let space = PhaseSpace::lie_poisson(std::sync::Arc::new(algebra.clone()));
    phase_space::flow(&space, h, &alpha0.0, t_end, dt)
}

/// `max |pi_* X_H(p) - X_h(pi(p))|` over the points, with `pi_*` by central
/// differences along `X_H`.
pub fn check_pi_relatedness(
    full: &PhaseSpace,
    h_full: &ScalarField,
    projection: &dyn Fn(&Vector) -> Vector,
    reduced: &PhaseSpace,
    h_reduced: &ScalarField,
    points: &[Vector],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let step = 1e-5;
    for p in points {
        full.check_point(p)?;
        let q = projection(p);
        let descent = (h_full.eval(p) - h_reduced.eval(&q)).abs();
        if descent > 1e-9 {
            return Err(Error::Precondition(format!("H does not descend: |H - h o pi| = {descent:.3e}")));
        }
        let c = phase_space::hamiltonian_vf_intrinsic(full, h_full, p);
        let push = (projection(&full.retract(p, &c, step)) - projection(&full.retract(p, &c, -step))) / (2.0 * step);
        let x = phase_space::hamiltonian_vf(reduced, h_reduced, &q)?;
        worst = worst.max((push - x).amax());
    }
    Ok(worst)
}

/// Output of [`reconstruct`].
#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub xi_curve: Vec<AlgebraElement>,
    pub g_curve: Vec<GroupElement>,
    pub gamma: Trajectory,
    /// `max |Gamma' - X_H(Gamma)|` over interior samples.
    pub residual: f64,
    /// Largest residual of the per-step algebraic solve.
    pub solve_residual: f64,
    /// Largest `|mu(beta) - alpha|`.
    pub level_residual: f64,
}

/// Fourth-order differences of a uniformly sampled curve.
fn derivative_4th(states: &[Vector], dt: f64) -> Vec<Vector> {
    let n = states.len();
    let s = |i: usize| &states[i];
    (0..n)
        .map(|k| {
            let d = if k >= 2 && k + 2 < n {
                s(k - 2) - s(k - 1) * 8.0 + s(k + 1) * 8.0 - s(k + 2)
            } else if k < 2 {
                let b = 0;
                if k == 0 {
                    s(b) * -25.0 + s(b + 1) * 48.0 - s(b + 2) * 36.0 + s(b + 3) * 16.0 - s(b + 4) * 3.0
                } else {
                    s(b) * -3.0 - s(b + 1) * 10.0 + s(b + 2) * 18.0 - s(b + 3) * 6.0 + s(b + 4)
                }
            } else {
                let e = n - 1;
                if k == e {
                    s(e) * 25.0 - s(e - 1) * 48.0 + s(e - 2) * 36.0 - s(e - 3) * 16.0 + s(e - 4) * 3.0
                } else {
                    s(e) * 3.0 + s(e - 1) * 10.0 - s(e - 2) * 18.0 + s(e - 3) * 6.0 - s(e - 4)
                }
            };
            d / (12.0 * dt)
        })
        .collect()
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 5 {
        return Err(Error::Precondition(format!("need at least 5 samples, got {}", times.len())));
    }
    let dt = times[1] - times[0];
    let uniform = times.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1.0));
    if dt.is_nan() || dt <= 0.0 || !uniform {
        return Err(Error::Precondition("reconstruction needs a uniform increasing time grid".into()));
    }
    Ok(dt)
}

/// Reconstruct a motion `Gamma(t) = g(t) . beta(t)` of `H` from a curve
/// `beta` in `mu^{-1}(alpha)` projecting to a reduced motion.
///
/// Per step, `xi_M(beta) = X_H(beta) - beta'` is solved by least squares over
/// generators of `g_alpha` (`beta'` by fourth-order differences), then
/// `g' = g xi` is advanced by exponential steps with the averaged `xi`.
pub fn reconstruct(mm: &MomentMap, h: &ScalarField, beta: &Trajectory, alpha: &DualElement, g0: Option<&GroupElement>) -> Result<ReconstructionResult> {
    let action: &GroupAction = mm.action();
    let space = mm.space();
    let alg = mm.algebra();
    let dt = uniform_step(&beta.times)?;
    let mut level_residual: f64 = 0.0;
    for (k, b) in beta.states.iter().enumerate() {
        space.check_point(b)?;
        let r = (mm.value(b).0 - &alpha.0).amax();
        level_residual = level_residual.max(r);
        if r > REDUCTION_TOL {
            return Err(Error::LevelSet { step: k, residual: r });
        }
    }
    let basis = coadjoint_isotropy(alg, alpha)?;
    let beta_dot = derivative_4th(&beta.states, dt);
    let mut xi_curve = Vec::with_capacity(beta.len());
    let mut solve_residual: f64 = 0.0;
    for (k, (b, bd)) in beta.states.iter().zip(&beta_dot).enumerate() {
        let gens = action.generator_matrix(b)? * &basis;
        if rank(&gens) < basis.ncols() {
            return Err(Error::Precondition(format!("G_alpha does not act freely at step {k}")));
        }
        let rhs = phase_space::hamiltonian_vf(space, h, b)? - bd;
        let (c, r) = lstsq(&gens, &rhs);
        solve_residual = solve_residual.max(r);
        if r > REDUCTION_TOL {
            return Err(Error::NotALift { step: k, residual: r });
        }
        xi_curve.push(AlgebraElement(&basis * c));
    }
    let mut g = g0.cloned().unwrap_or_else(|| alg.identity());
    let kind = alg.group_kind();
    let mut g_curve = Vec::with_capacity(beta.len());
    g_curve.push(g.clone());
    for k in 0..beta.len() - 1 {
        let mid = AlgebraElement((&xi_curve[k].0 + &xi_curve[k + 1].0) * (0.5 * dt));
        g = g.mul(&alg.exp(&mid)?)?;
        if g.invariant_residual(kind) > 1e-8 {
            g = alg.reproject(&g);
        }
        g_curve.push(g.clone());
    }
    let states = g_curve.iter().zip(&beta.states).map(|(g, b)| action.act(g, b)).collect::<Result<Vec<_>>>()?;
    let gamma = Trajectory { times: beta.times.clone(), states };
    let mut residual: f64 = 0.0;
    for k in 1..gamma.len() - 1 {
        let d = (&gamma.states[k + 1] - &gamma.states[k - 1]) / (2.0 * dt);
        let x = phase_space::hamiltonian_vf(space, h, &gamma.states[k])?;
        residual = residual.max((d - x).amax());
    }
    Ok(ReconstructionResult { xi_curve, g_curve, gamma, residual, solve_residual, level_residual })
}

/// Per-point outcome of the Marsden-Ratiu test.
#[derive(Clone, Debug, PartialEq)]
pub struct MarsdenRatiuReport {
    pub tn_dim: usize,
    pub e_dim: usize,
    pub sum_dim: usize,
    pub with_image_dim: usize,
    pub pass: bool,
}

/// Checks `Pi(E°) ⊆ TN + E` at each sample; `distribution(p)` returns
/// ambient vectors spanning `E_p`.
pub fn check_marsden_ratiu(n: &Submanifold, distribution: &dyn Fn(&Vector) -> Matrix, points: &[Vector]) -> Result<Vec<MarsdenRatiuReport>> {
    let space = n.space();
    points
        .iter()
        .map(|p| {
            let (tn, _) = n.tangent_and_annihilator(p)?;
            let e_amb = distribution(p);
            let e = if e_amb.ncols() == 0 {
                Matrix::zeros(space.dim(), 0)
            } else {
                crate::linalg::pinv(&space.tangent_basis(p)) * e_amb
            };
            let e_ann = crate::linalg::annihilator(&column_space(&e));
            let image = space.intrinsic_bivector(p).transpose() * &e_ann;
            let base = hstack(&[&tn, &e]);
            let with = hstack(&[&tn, &e, &image]);
            let sum_dim = rank(&base);
            let with_image_dim = rank(&with);
            Ok(MarsdenRatiuReport { tn_dim: tn.ncols(), e_dim: rank(&e), sum_dim, with_image_dim, pass: sum_dim == with_image_dim })
        })
        .collect()
}

/// Points of `mu^{-1}(value)`.
#[derive(Clone, Debug)]
pub struct LevelSetSample {
    pub value: DualElement,
    pub points: Vec<Vector>,
}

impl LevelSetSample {
    /// Validates membership to `1e-9` and pairwise distinctness.
    pub fn new(mm: &MomentMap, value: DualElement, points: Vec<Vector>) -> Result<Self> {
        for (k, p) in points.iter().enumerate() {
            mm.space().check_point(p)?;
            let r = (mm.value(p).0 - &value.0).amax();
            if r > 1e-9 {
                return Err(Error::LevelSet { step: k, residual: r });
            }
        }
        for i in 0..points.len() {
            for j in 0..i {
                if (&points[i] - &points[j]).amax() == 0.0 {
                    return Err(Error::Precondition(format!("level-set points {j} and {i} coincide")));
                }
            }
        }
        Ok(LevelSetSample { value, points })
    }
}

/// Points `Ad*(g) seed` of a coadjoint orbit.
#[derive(Clone, Debug)]
pub struct CoadjointOrbitSample {
    pub seed: DualElement,
    pub points: Vec<DualElement>,
}

impl CoadjointOrbitSample {
    pub fn generate<R: rand::Rng + ?Sized>(algebra: &LieAlgebra, seed: &DualElement, count: usize, rng: &mut R) -> Result<Self> {
        let points = (0..count)
            .map(|_| algebra.coadjoint(&algebra.random_group_element(rng, 2.0)?, seed))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoadjointOrbitSample { seed: seed.clone(), points })
    }
}

/// `max |Phi_{g*} X_H(p) - X_H(Phi_g(p))|`, with the pushforward by central
/// differences along `X_H`.
pub fn hamiltonian_equivariance_residual(action: &GroupAction, h: &ScalarField, groups: &[GroupElement], points: &[Vector]) -> Result<f64> {
    let space = action.space();
    let step = 1e-5;
    let mut worst: f64 = 0.0;
    for p in points {
        let c = phase_space::hamiltonian_vf_intrinsic(space, h, &{
            space.check_point(p)?;
            p.clone()
        });
        for g in groups {
            let push = (action.act(g, &space.retract(p, &c, step))? - action.act(g, &space.retract(p, &c, -step))?) / (2.0 * step);
            let x = phase_space::hamiltonian_vf(space, h, &action.act(g, p)?)?;
            worst = worst.max((push - x).amax());
        }
    }
    Ok(worst)
}

/// Class of `x = (q, p)` in `CP^{n-1}` as the projector `z z* / |z|^2`,
/// `z = q + i p`, flattened to real and imaginary parts.
pub fn hopf_projection(x: &Vector) -> Vector {
    let n = x.len() / 2;
    let z = nalgebra::DVector::<num_complex::Complex64>::from_fn(n, |i, _| num_complex::Complex64::new(x[i], x[n + i]));
    let proj = (&z * z.adjoint()).unscale(z.norm_squared());
    Vector::from_vec(crate::linalg::flatten_complex(&proj, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_stencils_are_exact_on_quartics() {
        let f = |t: f64| Vector::from_vec(vec![t.powi(4) - 2.0 * t.powi(3) + t, 3.0 * t * t]);
        let df = |t: f64| Vector::from_vec(vec![4.0 * t.powi(3) - 6.0 * t * t + 1.0, 6.0 * t]);
        let dt = 0.1;
        let states: Vec<Vector> = (0..9).map(|k| f(k as f64 * dt)).collect();
        for (k, d) in derivative_4th(&states, dt).iter().enumerate() {
            assert!((d - df(k as f64 * dt)).amax() < 1e-10, "{k}");
        }
    }

    #[test]
    fn non_uniform_grids_are_rejected() {
        assert!(uniform_step(&[0.0, 0.1, 0.2, 0.3, 0.5]).is_err());
        assert!(uniform_step(&[0.0, 0.1, 0.2]).is_err());
        assert!((uniform_step(&[0.0, 0.1, 0.2, 0.3, 0.4]).unwrap() - 0.1).abs() < 1e-15);
    }
}
