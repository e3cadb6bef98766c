use std::sync::Arc;

use momenta::action::coadjoint;
use momenta::lie::{DualElement, LieAlgebra};
use momenta::linalg::{Matrix, Vector};
use momenta::phase_space::{check_jacobi, PhaseSpace, ScalarField, NESTED_FD_STEP};
use momenta::roots::{commutator_subalgebra, RootSystem};
use momenta::transversal::*;
use momenta::Result;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::fixtures::{r5, r5_named_submanifolds, r5_point, radial_slice, s2xs2_base};
use super::{random_points, Battery};

/// `(algebra, roots, simple roots)`; a chamber with `s` walls has `2^s` faces.
const ROOT_TABLE: [(&str, usize, usize); 6] = [("su2", 2, 1), ("so3", 2, 1), ("su3", 6, 2), ("u2", 2, 1), ("su2xsu2", 4, 2), ("t2", 0, 0)];

pub fn root_systems(b: &mut Battery) -> Result<()> {
    for (name, n_roots, n_simple) in ROOT_TABLE {
        let sys = RootSystem::new(Arc::new(LieAlgebra::builtin(name)?));
        let sys = sys.as_ref().map_err(Clone::clone);
        b.record(&format!("{name}-root-count"), "number of roots in the root decomposition", 0.0, |_| {
            Ok(sys.clone()?.roots().len().abs_diff(n_roots) as f64)
        });
        b.record(&format!("{name}-simple-root-count"), "number of simple roots equals the semisimple rank", 0.0, |_| {
            Ok(sys.clone()?.simple_indices().len().abs_diff(n_simple) as f64)
        });
        b.record(&format!("{name}-face-count"), "faces of the fundamental chamber", 0.0, |_| {
            Ok(sys.clone()?.faces().len().abs_diff(1 << n_simple) as f64)
        });
        b.record(&format!("{name}-eigen-residual"), "root vectors are eigenvectors of the Cartan action", 1e-9, |_| Ok(sys.clone()?.eigen_residual()));
        b.record_count(&format!("{name}-isotropy-cross-validation"), "isotropy dimension from roots equals the numerical null space", |_| {
            let sys = sys.clone()?;
            let mut wrong = 0;
            for f in sys.faces() {
                let iso = sys.isotropy_algebra_of_face(&f)?;
                wrong += iso.numerical_dims.iter().filter(|&&d| d != iso.dim).count();
                wrong += usize::from(iso.dim != sys.rank() + iso.root_indices.len());
            }
            Ok(wrong)
        });
        b.record(&format!("{name}-interior-isotropy-is-cartan"), "isotropy of the open chamber is the Cartan subalgebra", 1e-9, |_| {
            let sys = sys.clone()?;
            let iso = sys.isotropy_algebra_of_face(&sys.interior_face())?;
            let t = sys.cartan();
            let outside = (t - &iso.basis * (iso.basis.transpose() * t)).amax();
            Ok(outside + iso.dim.abs_diff(sys.rank()) as f64)
        });
    }
    b.record_count("su3-commutator-dims", "commutator subalgebras of the face isotropy algebras of su(3)", |_| {
        let sys = RootSystem::new(Arc::new(LieAlgebra::su3()))?;
        let mut dims = sys
            .faces()
            .iter()
            .map(|f| Ok(commutator_subalgebra(sys.algebra(), &sys.isotropy_algebra_of_face(f)?.basis)?.ncols()))
            .collect::<Result<Vec<_>>>()?;
        dims.sort_unstable();
        Ok(usize::from(dims != [0, 3, 3, 8]))
    });
    Ok(())
}

fn random_pairs(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<(Vector, Vector)> {
    let mut gauss = || Vector::from_fn(dim, |_, _| rng.sample(StandardNormal));
    (0..count).map(|_| (gauss(), gauss())).collect()
}

fn quadratic(rng: &mut ChaCha8Rng, dim: usize) -> ScalarField {
    ScalarField::quadratic(Matrix::from_fn(dim, dim, |_, _| rng.sample(StandardNormal)), Vector::from_fn(dim, |_, _| rng.sample(StandardNormal)))
}

/// A curved two-dimensional transversal in `R^4` and a point on it.
fn curved_transversal() -> Result<(Submanifold, Vector)> {
    let space = PhaseSpace::standard(2);
    let n = Submanifold::new(
        space,
        vec![ScalarField::new(|x| x[1] - 0.3 * x[0] * x[0] - 0.1 * x[2]), ScalarField::new(|x| x[3] - 0.2 * x[0] * x[2])],
    );
    let p = n.project(&Vector::from_column_slice(&[0.4, 0.0, 0.2, 0.0]))?;
    Ok((n, p))
}

/// Named submanifolds and the points at which they are classified.
fn named_cases() -> Result<Vec<(String, Submanifold, Vec<Vector>)>> {
    let mut out = Vec::new();
    let base = r5_point();
    for (name, n, _) in r5_named_submanifolds() {
        let mut pts = vec![base.clone()];
        if n.codim() > 0 {
            pts.extend(n.sample_near(&base, 10, 0.5, 11)?);
        }
        out.push((format!("r5-{name}"), n, pts));
    }
    let (mm, _, p) = s2xs2_base();
    let n = preimage_submanifold(&mm, &radial_slice(&LieAlgebra::so3()));
    let mut pts = vec![p.clone()];
    pts.extend(n.sample_near(&p, SAMPLE_COUNT, SAMPLE_RADIUS, 42)?);
    out.push(("s2xs2-preimage".into(), n, pts));
    let so3 = Arc::new(LieAlgebra::so3());
    let n = preimage_submanifold(&coadjoint(so3.clone()), &radial_slice(&so3));
    let lambda = Vector::from_column_slice(&[0.0, 0.0, 0.8]);
    let mut pts = vec![lambda.clone()];
    pts.extend(n.sample_near(&lambda, SAMPLE_COUNT, SAMPLE_RADIUS, 42)?);
    out.push(("so3dual-preimage".into(), n, pts));
    let (n, p) = curved_transversal()?;
    out.push(("r4-curved".into(), n, vec![p]));
    Ok(out)
}

pub fn transversals(b: &mut Battery) -> Result<()> {
    let count = b.ctx.samples(100);
    b.record_count("characterizations-random", "four characterizations of a transversal agree on random subspaces", |c| {
        let mut rng = c.rng(1);
        Ok((0..count).filter(|k| !characterize_random(&mut rng, 4 + k % 3, false)).count())
    });
    b.record_count("characterizations-named", "four characterizations agree at every point of the named submanifolds", |_| {
        let mut wrong = 0;
        for (_, n, pts) in named_cases()? {
            for p in &pts {
                match transversal_report(&n, p) {
                    Ok(r) => wrong += usize::from(!r.characterizations.is_some_and(|c| c.agree())),
                    Err(momenta::Error::Internal(_)) => wrong += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(wrong)
    });
    b.record_count("symplectic-direct-agreement", "in a symplectic space transversality is the symplectic subspace test", |c| {
        let mut rng = c.rng(2);
        let mut wrong = 0;
        for k in 0..count {
            let (q, tn) = random_subspace_scenario(&mut rng, if k % 2 == 0 { 4 } else { 6 }, true);
            let omega = q.clone().try_inverse().ok_or_else(|| momenta::Error::Internal("nondegenerate bivector".into()))?;
            let ch = characterize(&q, &tn);
            wrong += usize::from(!ch.agree() || ch.0[0] != is_symplectic_subspace(&omega, &tn));
        }
        Ok(wrong)
    });
    b.record("splitting-reassembly", "the bivector along N splits into the induced bivector and a complement", 1e-9, |c| {
        let mut rng = c.rng(3);
        let pairs = random_pairs(&mut rng, 5, 20);
        let mut worst: f64 = 0.0;
        for (_, n, (_, tr)) in r5_named_submanifolds() {
            if tr {
                worst = worst.max(splitting_residual(&n, &r5_point(), &pairs)?);
            }
        }
        let (n, p) = curved_transversal()?;
        Ok(worst.max(splitting_residual(&n, &p, &random_pairs(&mut rng, 4, 20))?))
    });
    b.record("induced-bivector-r5-plane", "the transversal {x1, x2 fixed} inherits d3 ^ d4", 1e-12, |_| {
        let n = Submanifold::coordinate_level(r5(), &[(0, 0.3), (1, -1.2)]);
        let ib = induced_bivector(&n, &r5_point())?;
        let mut expected = Matrix::zeros(5, 5);
        expected[(2, 3)] = 1.0;
        expected[(3, 2)] = -1.0;
        Ok((&ib.tangent * &ib.matrix * ib.tangent.transpose() - expected).amax())
    });
    b.record("induced-jacobi", "the induced bracket satisfies the Jacobi identity", 1e-4, |c| {
        let mut rng = c.rng(4);
        let plane = Submanifold::coordinate_level(r5(), &[(0, 0.3), (1, -1.2)]);
        let (curved, p) = curved_transversal()?;
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let (f, g, h) = (quadratic(&mut rng, 3), quadratic(&mut rng, 3), quadratic(&mut rng, 3));
            worst = worst.max(check_induced_jacobi(&plane, &r5_point(), &f, &g, &h)?);
            let (f, g, h) = (quadratic(&mut rng, 2), quadratic(&mut rng, 2), quadratic(&mut rng, 2));
            worst = worst.max(check_induced_jacobi(&curved, &p, &f, &g, &h)?);
        }
        Ok(worst)
    });
    Ok(())
}

fn characterize_random(rng: &mut ChaCha8Rng, dim: usize, symplectic: bool) -> bool {
    let (q, tn) = random_subspace_scenario(rng, dim, symplectic);
    characterize(&q, &tn).agree()
}

pub fn cross_sections(b: &mut Battery) -> Result<()> {
    let (mm, lambda, p) = s2xs2_base();
    let z = radial_slice(&LieAlgebra::so3());
    let expected = SAMPLE_COUNT + 1;
    let failures = |r: &CrossSectionReport| r.verdicts.iter().filter(|v| !**v).count() + r.points.len().abs_diff(expected);
    b.record_count("s2xs2-symplectic-cross-section", "preimage of a slice is symplectic near the fiber (S^2 x S^2)", |_| {
        Ok(failures(&check_symplectic_cross_section(&mm, &z, &lambda, &p)?))
    });
    b.record_count("s2xs2-poisson-cross-section", "preimage of a slice is a Poisson transversal near the fiber (S^2 x S^2)", |_| {
        Ok(failures(&check_poisson_cross_section(&mm, &z, &lambda, &p)?))
    });
    let so3 = Arc::new(LieAlgebra::so3());
    let co = coadjoint(so3.clone());
    let lambda3 = DualElement::new(vec![0.0, 0.0, 0.8]);
    b.record_count("so3dual-poisson-cross-section", "slice through so(3)* is a Poisson transversal near lambda", |_| {
        Ok(failures(&check_poisson_cross_section(&co, &radial_slice(&so3), &lambda3, &lambda3.0)?))
    });
    b.record("kernel-lemma", "d mu(Pi(lambda)) equals minus lambda on the generators", 1e-5, |c| {
        let mut rng = c.rng(1);
        let covectors: Vec<Vector> = (0..5).map(|_| Vector::from_fn(4, |_, _| rng.sample(StandardNormal))).collect();
        let cov3: Vec<Vector> = covectors.iter().map(|c| c.rows(0, 3).into_owned()).collect();
        Ok(kernel_lemma_residual(&mm, &p, &covectors)?.max(kernel_lemma_residual(&co, &Vector::from_column_slice(&[0.2, -0.4, 0.9]), &cov3)?))
    });
    Ok(())
}

/// Every built-in Poisson space with a short label.
pub fn builtin_spaces() -> Result<Vec<(&'static str, PhaseSpace)>> {
    let alg = |n: &str| LieAlgebra::builtin(n).map(Arc::new);
    Ok(vec![
        ("r6", PhaseSpace::standard(3)),
        ("sphere", PhaseSpace::sphere(1.0)?),
        ("sphere-r2.5", PhaseSpace::sphere(2.5)?),
        ("s2xs2", PhaseSpace::product(vec![PhaseSpace::sphere(1.0)?, PhaseSpace::sphere(1.0)?])),
        ("so3-dual", PhaseSpace::lie_poisson(alg("so3")?)),
        ("su3-dual", PhaseSpace::lie_poisson(alg("su3")?)),
        ("u2-dual", PhaseSpace::lie_poisson(alg("u2")?)),
        ("tso3", PhaseSpace::cotangent(alg("so3")?)?),
        ("tsu2", PhaseSpace::cotangent(alg("su2")?)?),
        ("r5-constant", r5()),
    ])
}

pub fn jacobi_builtins(b: &mut Battery) -> Result<()> {
    for (k, (label, space)) in builtin_spaces()?.into_iter().enumerate() {
        let points = random_points(b.ctx, &space, b.ctx.samples(100), 2 * k as u64);
        let mut rng = b.ctx.rng(2 * k as u64 + 1);
        let d = space.ambient_dim();
        let (f, g, h) = (quadratic(&mut rng, d), quadratic(&mut rng, d), quadratic(&mut rng, d));
        b.record(&format!("jacobi-{label}"), "cyclic Jacobi sum of the bivector vanishes", 1e-4, |c| {
            c.max_each(&points, |p| check_jacobi(&space, &f, &g, &h, p, NESTED_FD_STEP))
        });
    }
    Ok(())
}
