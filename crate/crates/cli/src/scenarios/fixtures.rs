use std::sync::Arc;

use momenta::action::{diagonal_spheres, MomentMap};
use momenta::lie::{DualElement, LieAlgebra};
use momenta::linalg::{Matrix, Vector};
use momenta::phase_space::PhaseSpace;
use momenta::transversal::Submanifold;

/// `R^5` with the constant bivector `d1 ^ d2 + d3 ^ d4`.
pub fn r5() -> PhaseSpace {
    let mut q = Matrix::zeros(5, 5);
    q[(0, 1)] = 1.0;
    q[(1, 0)] = -1.0;
    q[(2, 3)] = 1.0;
    q[(3, 2)] = -1.0;
    PhaseSpace::constant_poisson(q).expect("antisymmetric constant bivector")
}

pub fn r5_point() -> Vector {
    Vector::from_column_slice(&[0.3, -1.2, 0.7, 2.0, 1.5])
}

/// Named submanifolds through [`r5_point`] with their expected
/// `(poisson submanifold, poisson transversal)` verdicts.
pub fn r5_named_submanifolds() -> Vec<(&'static str, Submanifold, (bool, bool))> {
    let p = r5_point();
    let level = |idx: &[usize]| Submanifold::coordinate_level(r5(), &idx.iter().map(|&i| (i, p[i])).collect::<Vec<_>>());
    vec![
        ("hyperplane-x5", level(&[4]), (true, false)),
        ("line-x5-axis", level(&[0, 1, 2, 3]), (false, true)),
        ("plane-x3x4x5", level(&[0, 1]), (false, true)),
        ("plane-x1x2x5", level(&[2, 3]), (false, true)),
        ("plane-x2x4x5", level(&[0, 2]), (false, false)),
        ("whole-space", Submanifold::whole(r5()), (true, true)),
    ]
}

/// The slice `{x1 = x2 = 0}` of `g*` for a three-dimensional `g`.
pub fn radial_slice(alg: &LieAlgebra) -> Submanifold {
    Submanifold::coordinate_level(PhaseSpace::lie_poisson(Arc::new(alg.clone())), &[(0, 0.0), (1, 0.0)])
}

/// Diagonal moment map on `S^2 x S^2`, the value `lambda` and a point over it.
pub fn s2xs2_base() -> (MomentMap, DualElement, Vector) {
    let c = 0.65;
    let a = (1.0f64 - c * c).sqrt();
    (diagonal_spheres(), DualElement::new(vec![0.0, 0.0, 2.0 * c]), Vector::from_column_slice(&[a, 0.0, c, -a, 0.0, c]))
}
