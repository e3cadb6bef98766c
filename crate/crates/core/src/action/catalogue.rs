//! Closed-form actions and moment maps used by the scenarios.

use std::sync::Arc;

use nalgebra::Vector3;

use super::{rotation, GroupAction, MomentMap};
use crate::error::{Error, Result};
use crate::lie::{so3, GroupElement, LieAlgebra};
use crate::linalg::Vector;
use crate::phase_space::PhaseSpace;

/// Ids accepted by [`builtin_moment_map`].
pub const BUILTIN_MOMENT_MAPS: [&str; 6] = [
    "linear-momentum",
    "angular-momentum",
    "sphere-so3",
    "s2xs2-diagonal",
    "cotangent-left-translation",
    "hamiltonian-r-action",
];

pub fn builtin_moment_map(id: &str) -> Result<MomentMap> {
    match id {
        "linear-momentum" => Ok(linear_momentum(3)),
        "angular-momentum" => Ok(angular_momentum()),
        "sphere-so3" => sphere_rotation(1.0),
        "s2xs2-diagonal" => Ok(diagonal_spheres()),
        "cotangent-left-translation" => left_translation(Arc::new(LieAlgebra::so3())),
        "hamiltonian-r-action" => Ok(harmonic_oscillator(1)),
        _ => Err(Error::Unsupported(format!("unknown moment map '{id}'"))),
    }
}

fn v3(x: &Vector, off: usize) -> Vector3<f64> {
    Vector3::new(x[off], x[off + 1], x[off + 2])
}

fn put3(out: &mut Vector, off: usize, v: &Vector3<f64>) {
    out.rows_mut(off, 3).copy_from_slice(v.as_slice());
}

/// `R^n` translating positions in `R^2n`, `mu(q, p) = p`.
pub fn linear_momentum(n: usize) -> MomentMap {
    let alg = Arc::new(LieAlgebra::translations(n));
    let act = move |g: &GroupElement, x: &Vector| -> Result<Vector> {
        let GroupElement::Translation(a) = g else {
            return Err(Error::Unsupported("expected a translation".into()));
        };
        crate::error::check_dim(n, a.len())?;
        let mut out = x.clone();
        out.rows_mut(0, n).zip_apply(a, |y, s| *y += s);
        Ok(out)
    };
    let action = GroupAction::new("translations", alg, PhaseSpace::standard(n), act).with_generator(move |a, x| {
        let mut out = Vector::zeros(x.len());
        out.rows_mut(0, n).copy_from(&a.0);
        out
    });
    MomentMap::new("linear-momentum", action, move |x| x.rows(n, n).into_owned())
}

/// SO(3) rotating `(q, p)` in `R^6`, `mu(q, p) = q x p`.
pub fn angular_momentum() -> MomentMap {
    let alg = Arc::new(LieAlgebra::so3());
    let act = |g: &GroupElement, x: &Vector| -> Result<Vector> {
        let r = rotation(g)?;
        let mut out = Vector::zeros(6);
        put3(&mut out, 0, &(r * v3(x, 0)));
        put3(&mut out, 3, &(r * v3(x, 3)));
        Ok(out)
    };
    let action = GroupAction::new("rotations", alg, PhaseSpace::standard(3), act).with_generator(|xi, x| {
        let w = v3(&xi.0, 0);
        let mut out = Vector::zeros(6);
        put3(&mut out, 0, &w.cross(&v3(x, 0)));
        put3(&mut out, 3, &w.cross(&v3(x, 3)));
        out
    });
    MomentMap::new("angular-momentum", action, |x| {
        let l = v3(x, 0).cross(&v3(x, 3));
        Vector::from_column_slice(l.as_slice())
    })
}

/// SO(3) on the sphere of radius `r`; the moment map is the inclusion.
pub fn sphere_rotation(radius: f64) -> Result<MomentMap> {
    let alg = Arc::new(LieAlgebra::so3());
    let act = |g: &GroupElement, x: &Vector| -> Result<Vector> {
        Ok(Vector::from_column_slice((rotation(g)? * v3(x, 0)).as_slice()))
    };
    let action = GroupAction::new("sphere-rotations", alg, PhaseSpace::sphere(radius)?, act)
        .with_generator(|xi, x| Vector::from_column_slice((so3::hat(&v3(&xi.0, 0)) * v3(x, 0)).as_slice()));
    Ok(MomentMap::new("sphere-so3", action, |x| x.clone()))
}

/// Diagonal SO(3) on `S^2 x S^2`, `mu(x, y) = x + y`.
pub fn diagonal_spheres() -> MomentMap {
    let alg = Arc::new(LieAlgebra::so3());
    let s2 = PhaseSpace::sphere(1.0).unwrap();
    let space = PhaseSpace::product(vec![s2.clone(), s2]);
    let act = |g: &GroupElement, x: &Vector| -> Result<Vector> {
        let r = rotation(g)?;
        let mut out = Vector::zeros(6);
        put3(&mut out, 0, &(r * v3(x, 0)));
        put3(&mut out, 3, &(r * v3(x, 3)));
        Ok(out)
    };
    let action = GroupAction::new("diagonal-rotations", alg, space, act).with_generator(|xi, x| {
        let w = v3(&xi.0, 0);
        let mut out = Vector::zeros(6);
        put3(&mut out, 0, &w.cross(&v3(x, 0)));
        put3(&mut out, 3, &w.cross(&v3(x, 3)));
        out
    });
    MomentMap::new("s2xs2-diagonal", action, |x| Vector::from_column_slice((v3(x, 0) + v3(x, 3)).as_slice()))
}

/// `G` on `T*G` by left translation, `h . (g, alpha) = (h g, Ad*(h) alpha)`
/// in the right trivialisation. This is the cotangent lift of `G` acting on
/// itself, and `mu(g, alpha) = alpha`.
pub fn left_translation(algebra: Arc<LieAlgebra>) -> Result<MomentMap> {
    let space = PhaseSpace::cotangent(algebra.clone())?;
    let d = algebra.dim();
    let (s1, a1) = (space.clone(), algebra.clone());
    let act = move |h: &GroupElement, x: &Vector| -> Result<Vector> {
        let (g, alpha) = s1.split_cotangent(x)?;
        s1.cotangent_point(&h.mul(&g)?, &a1.coadjoint(h, &alpha)?)
    };
    let (s2, a2) = (space.clone(), algebra.clone());
    let action = GroupAction::new("left-translation", algebra, space, act).with_generator(move |xi, x| {
        let (_, alpha) = s2.split_cotangent(x).unwrap();
        let beta = a2.coadjoint_generator(xi, &alpha).unwrap();
        s2.cotangent_tangent(x, xi, &beta).unwrap()
    });
    let n = action.space().ambient_dim();
    Ok(MomentMap::new("cotangent-left-translation", action, move |x| x.rows(n - d, d).into_owned()))
}

/// Coadjoint action on `g*` with the identity as moment map.
pub fn coadjoint(algebra: Arc<LieAlgebra>) -> MomentMap {
    let space = PhaseSpace::lie_poisson(algebra.clone());
    let (a1, a2) = (algebra.clone(), algebra.clone());
    let act = move |g: &GroupElement, x: &Vector| -> Result<Vector> {
        Ok(a1.coadjoint(g, &crate::lie::DualElement(x.clone()))?.0)
    };
    let action = GroupAction::new("coadjoint", algebra, space, act)
        .with_generator(move |xi, x| a2.coadjoint_generator(xi, &crate::lie::DualElement(x.clone())).unwrap().0);
    MomentMap::new("coadjoint", action, |x| x.clone())
}

/// Flow of `H = |x|^2 / 2` on `R^2n` as an `R`-action; `H` is its moment map.
/// The flow `q' = p, p' = -q` is `2 pi`-periodic, so this is also the
/// circle action used for reduction.
pub fn harmonic_oscillator(n: usize) -> MomentMap {
    let alg = Arc::new(LieAlgebra::translations(1));
    let act = move |g: &GroupElement, x: &Vector| -> Result<Vector> {
        let GroupElement::Translation(t) = g else {
            return Err(Error::Unsupported("expected a time translation".into()));
        };
        crate::error::check_dim(1, t.len())?;
        let (c, s) = (t[0].cos(), t[0].sin());
        let mut out = Vector::zeros(2 * n);
        for i in 0..n {
            out[i] = c * x[i] + s * x[n + i];
            out[n + i] = -s * x[i] + c * x[n + i];
        }
        Ok(out)
    };
    let action = GroupAction::new("hamiltonian-flow", alg, PhaseSpace::standard(n), act).with_generator(move |a, x| {
        let mut out = Vector::zeros(2 * n);
        for i in 0..n {
            out[i] = a.0[0] * x[n + i];
            out[n + i] = -a.0[0] * x[i];
        }
        out
    });
    MomentMap::new("hamiltonian-r-action", action, |x| Vector::from_element(1, 0.5 * x.norm_squared()))
}
