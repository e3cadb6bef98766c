use std::sync::Arc;

use momenta::action::{coadjoint, MomentMap};
use momenta::lie::{DualElement, LieAlgebra};
use momenta::linalg::{Matrix, Vector};
use momenta::roots::*;
use momenta::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn system(name: &str) -> RootSystem {
    RootSystem::new(Arc::new(LieAlgebra::builtin(name).unwrap())).unwrap()
}

fn check_invariants(rs: &RootSystem) {
    assert_eq!(rs.completeness_residual(), 0, "{}", rs.algebra().name());
    assert!(rs.eigen_residual() < 1e-9, "{}: {}", rs.algebra().name(), rs.eigen_residual());
    assert!(rs.orthogonality_residual() < 1e-9);
    assert!(rs.center_residual() < 1e-9);
    for a in rs.roots() {
        assert!(a.functional.amax() > 1e-6, "zero root");
        assert!(rs.roots().iter().any(|b| (&a.functional + &b.functional).amax() < 1e-9), "missing negative root");
    }
    for i in 0..rs.roots().len() {
        let c = rs.expansion(i);
        assert!(c.iter().all(|&x| x >= -1e-8) || c.iter().all(|&x| x <= 1e-8));
    }
}

#[test]
fn root_counts() {
    for (name, roots, simple, rank, center) in [
        ("su2", 2, 1, 1, 0),
        ("so3", 2, 1, 1, 0),
        ("su3", 6, 2, 2, 0),
        ("u2", 2, 1, 2, 1),
        ("su2xsu2", 4, 2, 2, 0),
        ("t2", 0, 0, 2, 2),
    ] {
        let rs = system(name);
        check_invariants(&rs);
        assert_eq!(rs.roots().len(), roots, "{name}");
        assert_eq!(rs.simple_indices().len(), simple, "{name}");
        assert_eq!(rs.rank(), rank, "{name}");
        assert_eq!(rs.center().ncols(), center, "{name}");
        assert_eq!(rs.faces().len(), 1 << simple, "{name}");
        assert_eq!(rs.positive_roots().len(), roots / 2);
    }
}

#[test]
fn su3_third_positive_root_is_the_sum_of_the_simple_ones() {
    let rs = system("su3");
    let s = rs.simple_roots();
    let sum = &s[0].functional + &s[1].functional;
    let pos = rs.positive_roots();
    assert_eq!(pos.len(), 3);
    assert!(pos.iter().any(|&i| (&rs.roots()[i].functional - &sum).amax() < 1e-9));
}

#[test]
fn product_simple_roots_are_orthogonal() {
    let rs = system("su2xsu2");
    let s = rs.simple_roots();
    assert!(rs.pairing(&s[0].functional, &s[1].functional).abs() < 1e-12);
    assert!(rs.pairing(&s[0].functional, &s[0].functional) > 0.0);
}

#[test]
fn chamber_examples() {
    let rs = system("su3");
    let s: Vec<Vector> = rs.simple_roots().iter().map(|a| a.functional.clone()).collect();
    let (inside, margin) = rs.chamber_membership(&Vector::zeros(2));
    assert!(inside && margin.abs() < 1e-15);
    let rho = &s[0] + &s[1];
    let (inside, margin) = rs.chamber_membership(&rho);
    assert!(inside && margin > 0.0);
    let (inside, _) = rs.chamber_membership(&(-&s[0]));
    assert!(!inside);
    assert!(matches!(rs.face_of(&(-&s[0])), Err(Error::OutsideChamber { .. })));
}

#[test]
fn faces_and_their_order() {
    let rs = system("su3");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    assert_eq!(rs.face_of(&Vector::zeros(2)).unwrap().zero_set, vec![0, 1]);
    let interior = rs.interior_face();
    for face in rs.faces() {
        let lambda = rs.sample_face_point(&face, &mut rng).unwrap();
        assert_eq!(rs.face_of(&lambda).unwrap(), face);
        assert!(face_leq(&face, &interior).unwrap());
        assert!(face_leq(&face, &face).unwrap());
        let vertex = Face { system: "su3".into(), zero_set: vec![0, 1] };
        assert!(face_leq(&vertex, &face).unwrap());
    }
    let walls: Vec<Face> = rs.faces().into_iter().filter(|f| f.zero_set.len() == 1).collect();
    assert_eq!(walls.len(), 2);
    assert!(!face_leq(&walls[0], &walls[1]).unwrap());
    assert!(!face_leq(&walls[1], &walls[0]).unwrap());
    let other = Face { system: "su2".into(), zero_set: vec![] };
    assert!(face_leq(&interior, &other).is_err());
}

#[test]
fn face_order_is_a_partial_order() {
    let rs = system("su3");
    let faces = rs.faces();
    for a in &faces {
        for b in &faces {
            if face_leq(a, b).unwrap() && face_leq(b, a).unwrap() {
                assert_eq!(a, b);
            }
            for c in &faces {
                if face_leq(a, b).unwrap() && face_leq(b, c).unwrap() {
                    assert!(face_leq(a, c).unwrap());
                }
            }
        }
    }
}

#[test]
fn isotropy_dimensions_per_face() {
    let rs = system("su3");
    for face in rs.faces() {
        let iso = rs.isotropy_algebra_of_face(&face).unwrap();
        let expected = match face.zero_set.len() {
            0 => 2,
            1 => 4,
            _ => 8,
        };
        assert_eq!(iso.dim, expected, "{:?}", face.zero_set);
        assert!(iso.numerical_dims.iter().all(|&n| n == expected));
    }
    // Interior isotropy is exactly t.
    let iso = rs.isotropy_algebra_of_face(&rs.interior_face()).unwrap();
    let t = rs.cartan();
    let proj = &iso.basis * (iso.basis.transpose() * t);
    assert!((proj - t).amax() < 1e-10);

    let u2 = system("u2");
    assert_eq!(u2.isotropy_algebra_of_face(&u2.interior_face()).unwrap().dim, 2);
    let vertex = Face { system: "u2".into(), zero_set: vec![0] };
    assert_eq!(u2.isotropy_algebra_of_face(&vertex).unwrap().dim, 4);
}

#[test]
fn commutator_subalgebras() {
    let rs = system("su3");
    let alg = rs.algebra().clone();
    let dims: Vec<usize> = rs
        .faces()
        .iter()
        .map(|f| commutator_subalgebra(&alg, &rs.isotropy_algebra_of_face(f).unwrap().basis).unwrap().ncols())
        .collect();
    // Interior: t is abelian; walls: one su(2); vertex: all of su(3).
    assert_eq!(dims, vec![0, 3, 3, 8]);

    let u2 = LieAlgebra::u2();
    assert_eq!(commutator_subalgebra(&u2, &Matrix::identity(4, 4)).unwrap().ncols(), 3);
    let not_closed = Matrix::from_column_slice(8, 2, &[1., 0., 0., 0., 0., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 0.]);
    assert!(matches!(commutator_subalgebra(&alg, &not_closed), Err(Error::NotSubalgebra { .. })));
}

#[test]
fn classification_of_coadjoint_samples() {
    let rs = system("su3");
    let alg = rs.algebra().clone();
    let mm: MomentMap = coadjoint(alg.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let faces = rs.faces();
    let mut points = Vec::new();
    let mut expected = Vec::new();
    for (k, face) in faces.iter().enumerate() {
        for _ in 0..(k + 1) {
            let lambda = rs.sample_face_point(face, &mut rng).unwrap();
            points.push(rs.extend_to_dual(&lambda).unwrap().0);
            expected.push(face.zero_set.clone());
        }
    }
    let c = rs.classify_moment_samples(&mm, &points).unwrap();
    assert_eq!(c.faces.iter().map(|b| b.points.len()).sum::<usize>(), points.len());
    for bucket in &c.faces {
        for &i in &bucket.points {
            assert_eq!(expected[i], bucket.face.zero_set);
        }
    }
    let bad = rs.extend_to_dual(&(-&rs.simple_roots()[0].functional)).unwrap();
    points.push(bad.0);
    assert!(matches!(rs.classify_moment_samples(&mm, &points), Err(Error::Classification(v)) if v == vec![points.len() - 1]));
}

#[test]
fn natural_slice_membership() {
    let rs = system("su3");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let wall = Face { system: "su3".into(), zero_set: vec![0] };
    let interior_point = rs.sample_face_point(&rs.interior_face(), &mut rng).unwrap();
    let wall_point = rs.sample_face_point(&wall, &mut rng).unwrap();
    let other_wall = rs.sample_face_point(&Face { system: "su3".into(), zero_set: vec![1] }, &mut rng).unwrap();
    assert!(rs.in_natural_slice(&wall, &interior_point).unwrap());
    assert!(rs.in_natural_slice(&wall, &wall_point).unwrap());
    assert!(!rs.in_natural_slice(&wall, &other_wall).unwrap());
    assert!(!rs.in_natural_slice(&wall, &Vector::zeros(2)).unwrap());
}

#[test]
fn invalid_cartan_bases_are_rejected() {
    let so3 = LieAlgebra::so3();
    let bad = LieAlgebra::from_structure_constants(
        "so3-bad",
        so3.labels().to_vec(),
        (0..27).map(|n| so3.structure_constant(n / 9, n / 3 % 3, n % 3)).collect(),
        vec![Vector::from_vec(vec![1.0, 0.0, 0.0]), Vector::from_vec(vec![0.0, 1.0, 0.0])],
    )
    .unwrap();
    assert!(matches!(RootSystem::new(Arc::new(bad)), Err(Error::InvalidCartan(_))));
}

#[test]
fn json_summary() {
    let v = system("su3").to_json().unwrap();
    assert_eq!(v["roots"].as_array().unwrap().len(), 6);
    assert_eq!(v["faces"].as_array().unwrap().len(), 4);
    let t = system("t2").to_json().unwrap();
    assert_eq!(t["roots"].as_array().unwrap().len(), 0);
    let _ = DualElement::zeros(1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn isotropy_of_generic_points_is_the_torus(a in 0.1f64..3.0, b in 0.1f64..3.0) {
        let rs = system("su3");
        let s = rs.simple_roots();
        // lambda with pairings (a, b) against the simple roots.
        let m = Matrix::from_fn(2, 2, |i, j| s[i].functional[j]);
        let nu = m.try_inverse().unwrap() * Vector::from_vec(vec![a, b]);
        let lambda = rs.form() * nu;
        prop_assert!(rs.face_of(&lambda).unwrap().zero_set.is_empty());
        let alpha = rs.extend_to_dual(&lambda).unwrap();
        let n = momenta::linalg::null_space(&rs.algebra().coadjoint_generator_matrix(&alpha).unwrap()).ncols();
        prop_assert_eq!(n, 2);
    }
}
