use std::sync::Arc;

use momenta::action::*;
use momenta::lie::{AlgebraElement, DualElement, LieAlgebra};
use momenta::linalg::{Matrix, Vector};
use momenta::models::{self, LiftedRigidBody};
use momenta::phase_space::{self, PhaseSpace, ScalarField, Trajectory};
use momenta::reduction::*;
use momenta::transversal::Submanifold;
use momenta::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn v(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}

fn so3() -> Arc<LieAlgebra> {
    Arc::new(LieAlgebra::so3())
}

fn unit_sphere_point(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_fn(2 * n, |_, _| rng.sample::<f64, _>(StandardNormal)).normalize()
}

#[test]
fn clean_level_kernel_examples() {
    let am = angular_momentum();
    let r = check_clean_level_kernel(&am, &v(&[1.0, 0.2, -0.3, 0.1, 0.8, 0.5])).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!((r.kernel_dim, r.orbit_dim, r.image_dim), (3, 3, 3));

    let trivial = MomentMap::new("trivial", GroupAction::trivial(so3(), PhaseSpace::standard(2)), |_| Vector::zeros(3));
    let r = check_clean_level_kernel(&trivial, &v(&[0.1, 0.2, 0.3, 0.4])).unwrap();
    assert!(r.pass);
    assert_eq!((r.kernel_dim, r.orbit_dim, r.isotropy_dim), (4, 0, 3));

    let x = v(&[0.6, 0.0, 0.8]);
    let p = v(&[0.6, 0.0, 0.8, -0.6, 0.0, -0.8]);
    let r = check_clean_level_kernel(&diagonal_spheres(), &p).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!((r.image_dim, r.isotropy_dim), (2, 1));
    let jac = diagonal_spheres().jacobian(&p);
    assert!((x.transpose() * jac).amax() < 1e-8);
}

#[test]
fn clean_level_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for mm in [angular_momentum(), linear_momentum(3), diagonal_spheres(), harmonic_oscillator(2), left_translation(so3()).unwrap()] {
        for _ in 0..10 {
            let p = mm.space().random_point(&mut rng, 1.0);
            let r = check_clean_level_kernel(&mm, &p).unwrap();
            assert!(r.pass, "{}: {r:?}", mm.name());
        }
    }
    assert!(matches!(check_clean_level_kernel(&coadjoint(so3()), &v(&[1.0, 0.0, 0.0])), Err(Error::Unsupported(_))));
}

#[test]
fn reduced_form_of_harmonic_oscillator() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [1, 2, 3] {
        let mm = harmonic_oscillator(n);
        for _ in 0..5 {
            let p = unit_sphere_point(&mut rng, n);
            let r = check_reduced_form_descends(&mm, &DualElement::new(vec![0.5]), &p).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!((r.degenerate_dim, r.orbit_dim, r.reduced_rank), (1, 1, 2 * (n - 1)));
        }
    }
}

#[test]
fn reduced_form_on_cotangent_bundle() {
    let mm = left_translation(so3()).unwrap();
    let space = mm.space().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let g = so3().random_group_element(&mut rng, 2.0).unwrap();
        let alpha = so3().random_dual(&mut rng, 1.0);
        let p = space.cotangent_point(&g, &alpha).unwrap();
        let r = check_reduced_form_descends(&mm, &alpha, &p).unwrap();
        assert!(r.pass && r.degenerate_dim == 1 && r.reduced_rank == 2, "{r:?}");
    }
    // alpha = 0: G_alpha = G, the level set is isotropic.
    let p = space.cotangent_point(&so3().identity(), &DualElement::zeros(3)).unwrap();
    let r = check_reduced_form_descends(&mm, &DualElement::zeros(3), &p).unwrap();
    assert!(r.pass && r.degenerate_dim == 3 && r.reduced_rank == 0);
    assert!(matches!(
        check_reduced_form_descends(&mm, &DualElement::new(vec![1.0, 0.0, 0.0]), &p),
        Err(Error::LevelSet { .. })
    ));
}

#[test]
fn kks_examples() {
    let alg = LieAlgebra::so3();
    let (e1, e2) = (alg.basis_element(0), alg.basis_element(1));
    for r in [0.5, 1.0, 2.0] {
        assert_eq!(kks_form(&alg, &DualElement::new(vec![0.0, 0.0, r]), &e1, &e2).unwrap(), -r);
    }
    let t = LieAlgebra::torus(3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (x, y) = (t.random_element(&mut rng, 1.0), t.random_element(&mut rng, 1.0));
    assert_eq!(kks_form(&t, &t.random_dual(&mut rng, 1.0), &x, &y).unwrap(), 0.0);
}

#[test]
fn kks_is_antisymmetric_representative_independent_and_matches_the_bivector() {
    let alg = LieAlgebra::so3();
    let space = PhaseSpace::lie_poisson(Arc::new(alg.clone()));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let orbit = CoadjointOrbitSample::generate(&alg, &DualElement::new(vec![0.3, -0.4, 1.2]), 50, &mut rng).unwrap();
    for beta in &orbit.points {
        assert!((beta.0.norm() - orbit.seed.0.norm()).abs() < 1e-9);
        let (xi, eta) = (alg.random_element(&mut rng, 1.0), alg.random_element(&mut rng, 1.0));
        let w = kks_form(&alg, beta, &xi, &eta).unwrap();
        assert!((w + kks_form(&alg, beta, &eta, &xi).unwrap()).abs() < 1e-15);
        // zeta in g_beta: zeta_{g*}(beta) = 0.
        let zeta = AlgebraElement(&beta.0 * rng.sample::<f64, _>(StandardNormal));
        assert!(alg.coadjoint_generator(&zeta, beta).unwrap().0.amax() < 1e-14);
        let shifted = AlgebraElement(&xi.0 + &zeta.0);
        assert!((kks_form(&alg, beta, &shifted, &eta).unwrap() - w).abs() < 1e-12);
        // Same number as the Lie-Poisson bivector paired with xi, eta.
        let pi = space.intrinsic_bivector(&beta.0);
        assert!((xi.0.dot(&(&pi * &eta.0)) - w).abs() < 1e-9);
    }
}

#[test]
fn kks_is_minus_the_leaf_form_inverting_pi() {
    // On orbit tangents u = xi_{g*}, v = eta_{g*}, the form sigma with
    // i_{X_f} sigma = df satisfies sigma(u, v) = -kks(xi, eta).
    let alg = LieAlgebra::so3();
    let space = PhaseSpace::lie_poisson(Arc::new(alg.clone()));
    let beta = DualElement::new(vec![0.2, 0.5, -0.7]);
    let pi = space.intrinsic_bivector(&beta.0);
    let (xi, eta) = (AlgebraElement::new(vec![0.3, -1.0, 0.4]), AlgebraElement::new(vec![1.1, 0.2, 0.9]));
    // X_f with df = xi is Pi^T xi = xi_{g*}(beta), so sigma(u, v) = <xi, v>.
    let u = alg.coadjoint_generator(&xi, &beta).unwrap();
    assert!((pi.transpose() * &xi.0 - &u.0).amax() < 1e-14);
    let v = alg.coadjoint_generator(&eta, &beta).unwrap();
    let sigma = xi.0.dot(&v.0);
    assert!((sigma + kks_form(&alg, &beta, &xi, &eta).unwrap()).abs() < 1e-14);
}

#[test]
fn lie_poisson_flow_examples() {
    let alg = LieAlgebra::so3();
    let h = models::rigid_body([1.0, 2.0, 3.0]);
    let fixed = lie_poisson_flow(&alg, &h, &DualElement::zeros(3), 1.0, 1e-2).unwrap();
    assert!(fixed.states.iter().all(|s| s.amax() == 0.0));

    let u2 = LieAlgebra::u2();
    let central = ScalarField::linear(v(&[0.0, 0.0, 0.0, 1.0]));
    let a0 = DualElement::new(vec![0.3, -0.2, 0.5, 1.0]);
    assert!(u2.bracket(&AlgebraElement::new(vec![0.0, 0.0, 0.0, 1.0]), &u2.basis_element(0)).unwrap().0.amax() < 1e-15);
    let tr = lie_poisson_flow(&u2, &central, &a0, 1.0, 1e-2).unwrap();
    assert!(tr.states.iter().all(|s| (s - &a0.0).amax() < 1e-14));
}

#[test]
fn rigid_body_conservation() {
    let alg = LieAlgebra::so3();
    let h = models::rigid_body([1.0, 2.0, 3.0]);
    let tr = lie_poisson_flow(&alg, &h, &DualElement::new(vec![1.0, 0.01, 0.0]), 10.0, 1e-3).unwrap();
    assert!(tr.drift(&h) < 1e-6);
    assert!(tr.drift(&ScalarField::new(|a| a.norm_squared())) < 1e-8);
}

#[test]
fn intermediate_axis_is_unstable_and_others_are_not() {
    let alg = LieAlgebra::so3();
    let h = models::rigid_body([1.0, 2.0, 3.0]);
    let excursion = |a0: [f64; 3], axis: usize| {
        let tr = lie_poisson_flow(&alg, &h, &DualElement::new(a0.to_vec()), 10.0, 1e-3).unwrap();
        let r = Vector::from_column_slice(&a0).norm();
        let mut eq = Vector::zeros(3);
        eq[axis] = r;
        tr.states.iter().map(|s| (s - &eq).norm()).fold(0.0, f64::max)
    };
    assert!(excursion([0.01, 1.0, 0.01], 1) > 0.1);
    assert!(excursion([1.0, 0.01, 0.0], 0) < 0.1);
    assert!(excursion([0.0, 0.01, 1.0], 2) < 0.1);
}

fn tso3_states(n: usize, seed: u64) -> Vec<Vector> {
    let space = PhaseSpace::cotangent(so3()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| space.random_point(&mut rng, 1.0)).collect()
}

#[test]
fn rigid_body_is_pi_related_to_its_reduction() {
    let body = LiftedRigidBody::new([1.0, 2.0, 3.0]).unwrap();
    let lp = PhaseSpace::lie_poisson(so3());
    let pi = models::body_momentum(body.space());
    let states = tso3_states(50, 6);
    let r = check_pi_relatedness(body.space(), &body.hamiltonian, &pi, &lp, &body.reduced, &states).unwrap();
    assert!(r < 1e-4, "{r}");
    // Constant h: both sides vanish.
    let c = ScalarField::constant(2.0);
    assert!(check_pi_relatedness(body.space(), &c, &pi, &lp, &c, &states).unwrap() < 1e-12);
    // A Hamiltonian that does not descend.
    let bad = ScalarField::new(|x| x[0]);
    assert!(matches!(check_pi_relatedness(body.space(), &bad, &pi, &lp, &body.reduced, &states), Err(Error::Precondition(_))));
}

#[test]
fn reduced_motion_is_the_projected_motion() {
    let body = LiftedRigidBody::new([1.0, 2.0, 3.0]).unwrap();
    let pi = models::body_momentum(body.space());
    let g0 = so3().exp(&AlgebraElement::new(vec![0.4, -0.2, 0.9])).unwrap();
    let a0 = DualElement::new(vec![0.3, 0.8, -0.5]);
    let full = body.motion(&g0, &a0, 2.0, 1e-3).unwrap();
    let reduced = lie_poisson_flow(&LieAlgebra::so3(), &body.reduced, &DualElement(pi(&full.states[0])), 2.0, 1e-3).unwrap();
    for (x, m) in full.states.iter().zip(&reduced.states) {
        assert!((pi(x) - m).amax() < 1e-9);
    }
}

#[test]
fn harmonic_oscillator_descends_to_zero_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [2, 3] {
        let points: Vec<Vector> = (0..20).map(|_| unit_sphere_point(&mut rng, n)).collect();
        let image_dim = 2 * n * n;
        let reduced = PhaseSpace::constant_poisson(Matrix::zeros(image_dim, image_dim)).unwrap();
        let r = check_pi_relatedness(
            &PhaseSpace::standard(n),
            &models::harmonic(),
            &hopf_projection,
            &reduced,
            &ScalarField::constant(0.5),
            &points,
        )
        .unwrap();
        assert!(r < 1e-6, "{r}");
    }
}

#[test]
fn harmonic_flow_stays_on_the_sphere_and_fixes_projective_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [2, 3] {
        let p0 = unit_sphere_point(&mut rng, n);
        let tr = phase_space::flow(&PhaseSpace::standard(n), &models::harmonic(), &p0, 10.0, 1e-3).unwrap();
        let c0 = hopf_projection(&p0);
        for s in &tr.states {
            assert!((s.norm_squared() - 1.0).abs() < 1e-8);
            assert!((hopf_projection(s) - &c0).amax() < 1e-9);
        }
    }
}

#[test]
fn hamiltonian_fields_are_equivariant() {
    let body = LiftedRigidBody::new([1.0, 2.0, 3.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let groups: Vec<_> = (0..5).map(|_| so3().random_group_element(&mut rng, 2.0).unwrap()).collect();
    let r = hamiltonian_equivariance_residual(body.moment_map.action(), &body.hamiltonian, &groups, &tso3_states(10, 10)).unwrap();
    assert!(r < 1e-4, "{r}");
    let am = angular_momentum();
    let pts: Vec<Vector> = (0..10).map(|_| am.space().random_point(&mut rng, 1.0)).collect();
    assert!(hamiltonian_equivariance_residual(am.action(), &models::central_force(), &groups, &pts).unwrap() < 1e-4);
}

#[test]
fn level_set_samples_validate_membership() {
    let mm = harmonic_oscillator(2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pts: Vec<Vector> = (0..4).map(|_| unit_sphere_point(&mut rng, 2)).collect();
    assert_eq!(LevelSetSample::new(&mm, DualElement::new(vec![0.5]), pts.clone()).unwrap().points.len(), 4);
    assert!(matches!(LevelSetSample::new(&mm, DualElement::new(vec![0.4]), pts.clone()), Err(Error::LevelSet { .. })));
    let dup = vec![pts[0].clone(), pts[0].clone()];
    assert!(LevelSetSample::new(&mm, DualElement::new(vec![0.5]), dup).is_err());
}

const ALPHA0: [f64; 3] = [0.6, -0.3, 0.9];

fn reconstruction(dt: f64, t_end: f64, scale: f64) -> (ReconstructionResult, DualElement) {
    let inertia = [1.0 / scale, 2.0 / scale, 3.0 / scale];
    let body = LiftedRigidBody::new(inertia).unwrap();
    let alpha = DualElement::new(ALPHA0.to_vec());
    let twist = move |t: f64| models::default_twist(scale * t);
    let beta = body.twisted_lift(&alpha, &twist, t_end, dt).unwrap();
    (reconstruct(&body.moment_map, &body.hamiltonian, &beta, &alpha, None).unwrap(), alpha)
}

#[test]
fn reconstruction_recovers_the_motion() {
    let (r, alpha) = reconstruction(1e-3, 5.0, 1.0);
    assert!(r.residual < 1e-4, "{}", r.residual);
    assert!(r.solve_residual < 1e-6 && r.level_residual < 1e-9);
    for (k, xi) in r.xi_curve.iter().enumerate() {
        let t = k as f64 * 1e-3;
        let expected = &alpha.0 * (0.3 * t.cos() + 0.2);
        assert!((&xi.0 - expected).amax() < 1e-6, "{k}");
    }
    let alg = LieAlgebra::so3();
    for g in &r.g_curve {
        assert!(alg.group_residual(g) < 1e-8);
    }
}

#[test]
fn reconstruction_is_second_order() {
    let (coarse, _) = reconstruction(2e-3, 2.0, 1.0);
    let (fine, _) = reconstruction(1e-3, 2.0, 1.0);
    assert!(coarse.residual / fine.residual >= 3.0, "{} {}", coarse.residual, fine.residual);
}

#[test]
fn reconstruction_of_time_rescaled_lift() {
    let c = 1.7;
    let (r, alpha) = reconstruction(1e-3, 3.0, c);
    assert!(r.residual < 1e-4);
    for (k, xi) in r.xi_curve.iter().enumerate().step_by(97) {
        let t = k as f64 * 1e-3;
        let expected = &alpha.0 * (c * (0.3 * (c * t).cos() + 0.2));
        assert!((&xi.0 - expected).amax() < 1e-6);
    }
}

#[test]
fn reconstruction_of_an_exact_motion_is_trivial() {
    let body = LiftedRigidBody::new([1.0, 2.0, 3.0]).unwrap();
    let alpha = DualElement::new(ALPHA0.to_vec());
    let beta = body.motion(&so3().identity(), &alpha, 1.0, 1e-3).unwrap();
    let g0 = so3().exp(&AlgebraElement::new(vec![0.1, 0.2, 0.3])).unwrap();
    let r = reconstruct(&body.moment_map, &body.hamiltonian, &beta, &alpha, Some(&g0)).unwrap();
    assert!(r.xi_curve.iter().all(|xi| xi.0.amax() < 1e-8));
    for g in &r.g_curve {
        assert!((g.real_matrix().unwrap() - g0.real_matrix().unwrap()).amax() < 1e-8);
    }
    assert!(r.residual < 1e-6);
}

#[test]
fn reconstruction_rejects_bad_inputs() {
    let body = LiftedRigidBody::new([1.0, 2.0, 3.0]).unwrap();
    let alpha = DualElement::new(ALPHA0.to_vec());
    let beta = body.motion(&so3().identity(), &alpha, 0.2, 1e-3).unwrap();
    let other = DualElement::new(vec![0.6, -0.3, 1.0]);
    assert!(matches!(reconstruct(&body.moment_map, &body.hamiltonian, &beta, &other, None), Err(Error::LevelSet { .. })));

    // Not a lift: a curve in the level set moving transversally to G_alpha.
    let alg = so3();
    let states = beta
        .times
        .iter()
        .map(|&t| {
            let g = alg.exp(&AlgebraElement::new(vec![t, 0.0, 0.0])).unwrap();
            body.space().cotangent_point(&g, &alg.coadjoint(&g, &alpha).unwrap()).unwrap()
        })
        .collect::<Vec<_>>();
    let drifting = Trajectory { times: beta.times.clone(), states };
    assert!(reconstruct(&body.moment_map, &body.hamiltonian, &drifting, &alpha, None).is_err());
    let fixed_alpha: Vec<Vector> = beta
        .times
        .iter()
        .map(|&t| {
            let g = alg.exp(&AlgebraElement::new(vec![t, 0.0, 0.0])).unwrap();
            body.space().cotangent_point(&g, &alpha).unwrap()
        })
        .collect();
    let not_lift = Trajectory { times: beta.times.clone(), states: fixed_alpha };
    assert!(matches!(reconstruct(&body.moment_map, &body.hamiltonian, &not_lift, &alpha, None), Err(Error::NotALift { .. })));
}

fn r5() -> PhaseSpace {
    let mut q = Matrix::zeros(5, 5);
    q[(0, 1)] = 1.0;
    q[(1, 0)] = -1.0;
    q[(2, 3)] = 1.0;
    q[(3, 2)] = -1.0;
    PhaseSpace::constant_poisson(q).unwrap()
}

#[test]
fn marsden_ratiu_examples() {
    let am = angular_momentum();
    let whole = Submanifold::whole(am.space().clone());
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let pts: Vec<Vector> = (0..10).map(|_| am.space().random_point(&mut rng, 1.0)).collect();
    let action = am.action().clone();
    let orbit = move |p: &Vector| action.generator_matrix(p).unwrap();
    assert!(check_marsden_ratiu(&whole, &orbit, &pts).unwrap().iter().all(|r| r.pass));

    let none = |p: &Vector| Matrix::zeros(p.len(), 0);
    let line = Submanifold::coordinate_level(PhaseSpace::standard(1), &[(1, 0.0)]);
    let r = check_marsden_ratiu(&line, &none, &[v(&[0.4, 0.0])]).unwrap();
    assert!(!r[0].pass);

    let hyper = Submanifold::coordinate_level(r5(), &[(4, 2.0)]);
    let p = v(&[0.1, 0.2, 0.3, 0.4, 2.0]);
    assert!(check_marsden_ratiu(&hyper, &none, std::slice::from_ref(&p)).unwrap()[0].pass);
    let line5 = Submanifold::coordinate_level(r5(), &[(0, 0.1), (1, 0.2), (2, 0.3), (3, 0.4)]);
    assert!(!check_marsden_ratiu(&line5, &none, std::slice::from_ref(&p)).unwrap()[0].pass);
    // Along the line, E spanned by Pi(TN°) makes the condition hold.
    let fill = |_: &Vector| Matrix::from_fn(5, 4, |i, j| if i == j { 1.0 } else { 0.0 });
    assert!(check_marsden_ratiu(&line5, &fill, std::slice::from_ref(&p)).unwrap()[0].pass);
    assert!(matches!(check_marsden_ratiu(&hyper, &none, &[Vector::zeros(5)]), Err(Error::ConstraintViolation { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn kks_pairs_with_the_bivector_on_any_orbit(b in prop::array::uniform3(-2.0f64..2.0), x in prop::array::uniform3(-2.0f64..2.0), y in prop::array::uniform3(-2.0f64..2.0)) {
        let alg = LieAlgebra::so3();
        let beta = DualElement::new(b.to_vec());
        let pi = PhaseSpace::lie_poisson(Arc::new(alg.clone())).intrinsic_bivector(&beta.0);
        let (xi, eta) = (AlgebraElement::new(x.to_vec()), AlgebraElement::new(y.to_vec()));
        let w = kks_form(&alg, &beta, &xi, &eta).unwrap();
        prop_assert!((xi.0.dot(&(&pi * &eta.0)) - w).abs() < 1e-12);
    }

    #[test]
    fn hopf_projection_is_circle_invariant(t in -6.0f64..6.0, x in prop::array::uniform6(-1.0f64..1.0)) {
        let p = Vector::from_column_slice(&x);
        prop_assume!(p.norm() > 0.1);
        let mm = harmonic_oscillator(3);
        let q = mm.action().act(&momenta::lie::GroupElement::Translation(Vector::from_element(1, t)), &p).unwrap();
        prop_assert!((hopf_projection(&q) - hopf_projection(&p)).amax() < 1e-12);
    }
}
