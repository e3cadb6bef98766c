use std::sync::Arc;

use momenta::action::{angular_momentum, harmonic_oscillator};
use momenta::lie::{AlgebraElement, DualElement, LieAlgebra};
use momenta::linalg::{Matrix, Vector};
use momenta::models::{self, LiftedRigidBody};
use momenta::phase_space::{self, PhaseSpace, ScalarField};
use momenta::reduction::*;
use momenta::transversal::{is_poisson_submanifold, transversal_report, Submanifold};
use momenta::Result;
use rand::Rng;
use rand_distr::StandardNormal;

use super::fixtures::{r5_named_submanifolds, r5_point};
use super::{random_points, Battery};

const INERTIA: [f64; 3] = [1.0, 2.0, 3.0];
/// Momentum level of the reconstruction scenario.
const ALPHA0: [f64; 3] = [0.6, -0.3, 0.9];

fn reconstruction(dt: f64, t_end: f64) -> Result<ReconstructionResult> {
    let body = LiftedRigidBody::new(INERTIA)?;
    let alpha = DualElement::new(ALPHA0.to_vec());
    let beta = body.twisted_lift(&alpha, &models::default_twist, t_end, dt)?;
    reconstruct(&body.moment_map, &body.hamiltonian, &beta, &alpha, None)
}

/// Largest distance from `axis * |a0|` along the rigid-body motion from `a0`.
fn excursion(h: &ScalarField, a0: [f64; 3], axis: usize, t_end: f64, dt: f64) -> Result<f64> {
    let tr = lie_poisson_flow(&LieAlgebra::so3(), h, &DualElement::new(a0.to_vec()), t_end, dt)?;
    let mut eq = Vector::zeros(3);
    eq[axis] = Vector::from_column_slice(&a0).norm();
    Ok(tr.states.iter().map(|s| (s - &eq).norm()).fold(0.0, f64::max))
}

pub fn rigid_body(b: &mut Battery) -> Result<()> {
    let so3 = LieAlgebra::so3();
    let h = models::rigid_body(INERTIA);

    let (t_lp, dt_lp) = (b.ctx.t_end(10.0), b.ctx.dt(1e-3));
    let lp = lie_poisson_flow(&so3, &h, &DualElement::new(vec![1.0, 0.01, 0.0]), t_lp, dt_lp);
    let lp = lp.as_ref().map_err(Clone::clone);
    b.record("energy-drift", "energy is conserved by the Lie-Poisson flow", 1e-6, |_| Ok(lp.clone()?.drift(&h)));
    b.record("casimir-drift", "|alpha|^2 is a Casimir of so(3)*", 1e-6, |_| Ok(lp.clone()?.drift(&ScalarField::new(|a| a.norm_squared()))));
    b.record("instability-witness", "motion near the intermediate axis leaves a 0.1-ball (0.1 / excursion)", 1.0, |_| {
        Ok(0.1 / excursion(&h, [0.01, 1.0, 0.01], 1, t_lp, dt_lp)?)
    });
    b.record("stable-axes", "motions near the long and short axes stay within 0.1", 0.1, |_| {
        Ok(excursion(&h, [1.0, 0.01, 0.0], 0, t_lp, dt_lp)?.max(excursion(&h, [0.0, 0.01, 1.0], 2, t_lp, dt_lp)?))
    });

    let body = LiftedRigidBody::new(INERTIA)?;
    let lp_space = PhaseSpace::lie_poisson(Arc::new(so3.clone()));
    let pi = models::body_momentum(body.space());
    let states = random_points(b.ctx, body.space(), b.ctx.samples(50), 1);
    b.record("pi-relatedness", "left-invariant H on T*SO(3) and h on so(3)* have related fields", 1e-4, |c| {
        c.max_over(&states, |chunk| check_pi_relatedness(body.space(), &body.hamiltonian, &pi, &lp_space, &body.reduced, chunk))
    });
    b.record("projected-motion", "projection of the full motion is the reduced motion", 1e-9, |_| {
        let g0 = so3.exp(&AlgebraElement::new(vec![0.4, -0.2, 0.9]))?;
        let full = body.motion(&g0, &DualElement::new(vec![0.3, 0.8, -0.5]), 2.0, 1e-3)?;
        let reduced = lie_poisson_flow(&so3, &body.reduced, &DualElement(pi(&full.states[0])), 2.0, 1e-3)?;
        Ok(full.states.iter().zip(&reduced.states).map(|(x, m)| (pi(x) - m).amax()).fold(0.0, f64::max))
    });

    let (t_rec, dt_rec) = (b.ctx.t_end(5.0), b.ctx.dt(1e-3));
    let coarse = reconstruction(dt_rec, t_rec);
    let coarse = coarse.as_ref().map_err(Clone::clone);
    b.record("reconstruction-residual", "reconstructed curve solves Hamilton's equations", 1e-4, |_| Ok(coarse.clone()?.residual));
    b.record("reconstruction-order", "residual ratio when dt halves (3 / ratio)", 1.0, |_| {
        let fine = reconstruction(dt_rec / 2.0, t_rec)?;
        Ok(3.0 * fine.residual / coarse.clone()?.residual)
    });
    b.record("reconstruction-generator", "recovered xi(t) equals the known twist phi'(t) alpha0", 1e-6, |_| {
        let r = coarse.clone()?;
        let alpha = Vector::from_column_slice(&ALPHA0);
        Ok(r.xi_curve
            .iter()
            .enumerate()
            .map(|(k, xi)| {
                let t = (k as f64 * dt_rec).min(t_rec);
                (&xi.0 - &alpha * (0.3 * t.cos() + 0.2)).amax()
            })
            .fold(0.0, f64::max))
    });
    b.record("reconstruction-group-residual", "g(t) stays in SO(3)", 1e-8, |_| {
        Ok(coarse.clone()?.g_curve.iter().map(|g| so3.group_residual(g)).fold(0.0, f64::max))
    });
    Ok(())
}

pub fn harmonic(b: &mut Battery) -> Result<()> {
    let (t_end, dt) = (b.ctx.t_end(10.0), b.ctx.dt(1e-3));
    let mut rng = b.ctx.rng(1);
    for n in [2, 3] {
        let sphere_point = |rng: &mut rand_chacha::ChaCha8Rng| Vector::from_fn(2 * n, |_, _| rng.sample::<f64, _>(StandardNormal)).normalize();
        let p0 = sphere_point(&mut rng);
        let levels: Vec<Vector> = (0..b.ctx.samples(20)).map(|_| sphere_point(&mut rng)).collect();
        let tr = phase_space::flow(&PhaseSpace::standard(n), &models::harmonic(), &p0, t_end, dt);
        let tr = tr.as_ref().map_err(Clone::clone);
        b.record(&format!("sphere-preservation-n{n}"), "flow of |x|^2 / 2 preserves the unit sphere", 1e-8, |_| {
            Ok(tr.clone()?.states.iter().map(|s| (s.norm_squared() - 1.0).abs()).fold(0.0, f64::max))
        });
        b.record(&format!("projective-class-n{n}"), "flow acts as the identity on projective classes", 1e-9, |_| {
            let c0 = hopf_projection(&p0);
            Ok(tr.clone()?.states.iter().map(|s| (hopf_projection(s) - &c0).amax()).fold(0.0, f64::max))
        });
        let mm = harmonic_oscillator(n);
        let half = DualElement::new(vec![0.5]);
        let reports = levels.iter().take(5).map(|p| check_reduced_form_descends(&mm, &half, p)).collect::<Result<Vec<_>>>();
        let reports = reports.as_ref().map_err(Clone::clone);
        b.record(&format!("degenerate-directions-n{n}"), "restricted form on the level set has exactly one null direction", 0.0, |_| {
            Ok(reports.clone()?.iter().map(|r| r.degenerate_dim.abs_diff(1) as f64).fold(0.0, f64::max))
        });
        b.record(&format!("reduced-rank-n{n}"), "reduced form is nondegenerate of rank 2(n - 1)", 0.0, |_| {
            Ok(reports.clone()?.iter().map(|r| r.reduced_rank.abs_diff(2 * (n - 1)) as f64).fold(0.0, f64::max))
        });
        b.record_count(&format!("reduced-form-descends-n{n}"), "null directions are the circle orbit", |_| {
            Ok(reports.clone()?.iter().filter(|r| !r.pass).count())
        });
        b.record(&format!("hopf-pi-related-n{n}"), "Hopf projection carries the flow to the zero field", 1e-6, |c| {
            let image_dim = 2 * n * n;
            let reduced = PhaseSpace::constant_poisson(Matrix::zeros(image_dim, image_dim))?;
            let standard = PhaseSpace::standard(n);
            let (h, h_red) = (models::harmonic(), ScalarField::constant(0.5));
            c.max_over(&levels, |chunk| check_pi_relatedness(&standard, &h, &hopf_projection, &reduced, &h_red, chunk))
        });
    }
    Ok(())
}

pub fn kks(b: &mut Battery) -> Result<()> {
    let alg = LieAlgebra::so3();
    let space = PhaseSpace::lie_poisson(Arc::new(alg.clone()));
    let mut rng = b.ctx.rng(1);
    let orbit = CoadjointOrbitSample::generate(&alg, &DualElement::new(vec![0.3, -0.4, 1.2]), b.ctx.samples(50), &mut rng)?;
    let mut cases = Vec::new();
    for beta in &orbit.points {
        let (xi, eta) = (alg.random_element(&mut rng, 1.0), alg.random_element(&mut rng, 1.0));
        let zeta = AlgebraElement(&beta.0 * rng.sample::<f64, _>(StandardNormal));
        cases.push((beta.clone(), xi, eta, zeta));
    }
    b.record("orbit-membership", "sampled points lie on one coadjoint orbit", 1e-9, |_| {
        Ok(orbit.points.iter().map(|p| (p.0.norm() - orbit.seed.0.norm()).abs()).fold(0.0, f64::max))
    });
    b.record("kks-antisymmetry", "orbit form is antisymmetric", 1e-12, |c| {
        c.max_each(&cases, |(beta, xi, eta, _)| Ok((kks_form(&alg, beta, xi, eta)? + kks_form(&alg, beta, eta, xi)?).abs()))
    });
    b.record("kks-representative-independence", "orbit form ignores isotropy shifts of the representative", 1e-12, |c| {
        c.max_each(&cases, |(beta, xi, eta, zeta)| {
            let shifted = AlgebraElement(&xi.0 + &zeta.0);
            Ok((kks_form(&alg, beta, &shifted, eta)? - kks_form(&alg, beta, xi, eta)?).abs())
        })
    });
    b.record("kks-matches-bivector", "orbit form equals the Lie-Poisson pairing on orbit directions", 1e-9, |c| {
        c.max_each(&cases, |(beta, xi, eta, _)| {
            let pi = space.intrinsic_bivector(&beta.0);
            Ok((xi.0.dot(&(&pi * &eta.0)) - kks_form(&alg, beta, xi, eta)?).abs())
        })
    });
    b.record("kks-leaf-form-sign", "minus the orbit form inverts the bivector on the leaf", 1e-12, |c| {
        c.max_each(&cases, |(beta, xi, eta, _)| {
            let v = alg.coadjoint_generator(eta, beta)?;
            Ok((xi.0.dot(&v.0) + kks_form(&alg, beta, xi, eta)?).abs())
        })
    });
    Ok(())
}

pub fn marsden_ratiu(b: &mut Battery) -> Result<()> {
    let am = angular_momentum();
    let points = random_points(b.ctx, am.space(), b.ctx.samples(10), 1);
    let action = am.action().clone();
    b.record_count("whole-space-orbit-distribution", "N = M with E the orbit distribution satisfies the reducibility condition", |_| {
        let whole = Submanifold::whole(am.space().clone());
        let orbit = move |p: &Vector| action.generator_matrix(p).expect("generator matrix at a checked point");
        Ok(check_marsden_ratiu(&whole, &orbit, &points)?.iter().filter(|r| !r.pass).count())
    });

    let base = r5_point();
    for (name, n, (sub, tr)) in r5_named_submanifolds() {
        b.record_count(&format!("r5-{name}"), "classification of coordinate submanifolds of R^5", |_| {
            let mut pts = vec![base.clone()];
            if n.codim() > 0 {
                pts.extend(n.sample_near(&base, 10, 0.5, 7)?);
            }
            let subs = is_poisson_submanifold(&n, &pts)?;
            let mut wrong = 0;
            for (p, s) in pts.iter().zip(subs) {
                let r = transversal_report(&n, p)?;
                wrong += usize::from(s != sub) + usize::from(r.is_transversal != tr);
            }
            Ok(wrong)
        });
    }
    let none = |p: &Vector| Matrix::zeros(p.len(), 0);
    let named = r5_named_submanifolds();
    let get = |k: &str| named.iter().find(|(name, _, _)| *name == k).map(|(_, n, _)| n.clone()).expect("named submanifold");
    b.record_count("r5-reducibility", "reducibility holds for the hyperplane, fails for the line, and holds along the line once E fills the image", |_| {
        let hyper = check_marsden_ratiu(&get("hyperplane-x5"), &none, std::slice::from_ref(&base))?[0].pass;
        let line = get("line-x5-axis");
        let bare = check_marsden_ratiu(&line, &none, std::slice::from_ref(&base))?[0].pass;
        let fill = |_: &Vector| Matrix::from_fn(5, 4, |i, j| if i == j { 1.0 } else { 0.0 });
        let filled = check_marsden_ratiu(&line, &fill, std::slice::from_ref(&base))?[0].pass;
        Ok(usize::from(!hyper) + usize::from(bare) + usize::from(!filled))
    });
    Ok(())
}
