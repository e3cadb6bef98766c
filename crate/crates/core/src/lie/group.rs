use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{cdet, nearest_unitary, CMatrix, Vector};

/// Element of one of the built-in groups.
///
/// Products of matrix groups are realised as block-diagonal matrices and use
/// the `Matrix` variant.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement {
    Matrix(CMatrix),
    /// Angles in `[0, 2pi)`.
    Torus(Vector),
    /// Additive group `R^n`.
    Translation(Vector),
}

/// Which closed subgroup of `U(n)` a matrix representation integrates to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixGroupKind {
    SpecialOrthogonal,
    SpecialUnitary,
    Unitary,
}

pub(crate) fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl GroupElement {
    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        match (self, other) {
            (GroupElement::Matrix(a), GroupElement::Matrix(b)) => {
                if a.shape() != b.shape() {
                    return Err(Error::Dimension { expected: a.nrows(), got: b.nrows() });
                }
                Ok(GroupElement::Matrix(a * b))
            }
            (GroupElement::Torus(a), GroupElement::Torus(b)) => {
                crate::error::check_dim(a.len(), b.len())?;
                Ok(GroupElement::Torus((a + b).map(wrap_angle)))
            }
            (GroupElement::Translation(a), GroupElement::Translation(b)) => {
                crate::error::check_dim(a.len(), b.len())?;
                Ok(GroupElement::Translation(a + b))
            }
            _ => Err(Error::Unsupported("product of elements of different groups".into())),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Matrix(a) => GroupElement::Matrix(a.adjoint()),
            GroupElement::Torus(a) => GroupElement::Torus(a.map(|x| wrap_angle(-x))),
            GroupElement::Translation(a) => GroupElement::Translation(-a),
        }
    }

    pub fn matrix(&self) -> Option<&CMatrix> {
        match self {
            GroupElement::Matrix(m) => Some(m),
            _ => None,
        }
    }

    /// Real part of a matrix element, for groups represented over the reals.
    pub fn real_matrix(&self) -> Option<nalgebra::DMatrix<f64>> {
        self.matrix().map(|m| m.map(|z| z.re))
    }

    /// Deviation from the group: `|G^* G - I|` plus the determinant defect
    /// for special groups (and the imaginary part for orthogonal ones).
    pub fn invariant_residual(&self, kind: Option<MatrixGroupKind>) -> f64 {
        let GroupElement::Matrix(g) = self else { return 0.0 };
        let n = g.nrows();
        let unit = (g.adjoint() * g - CMatrix::identity(n, n)).norm();
        let det = cdet(g);
        match kind {
            Some(MatrixGroupKind::SpecialOrthogonal) => {
                unit + (det.re - 1.0).abs() + det.im.abs() + g.iter().map(|z| z.im.abs()).sum::<f64>()
            }
            Some(MatrixGroupKind::SpecialUnitary) => unit + (det - 1.0).norm(),
            _ => unit,
        }
    }

    /// Project back onto the group (unitary polar factor, determinant fixed
    /// for special groups).
    pub fn reproject(&self, kind: Option<MatrixGroupKind>) -> GroupElement {
        match self {
            GroupElement::Matrix(g) => {
                let mut u = nearest_unitary(g);
                match kind {
                    Some(MatrixGroupKind::SpecialOrthogonal) => {
                        u = u.map(|z| num_complex::Complex64::new(z.re, 0.0));
                        u = nearest_unitary(&u);
                    }
                    Some(MatrixGroupKind::SpecialUnitary) => {
                        let n = u.nrows() as f64;
                        let det = cdet(&u);
                        let phase = num_complex::Complex64::from_polar(1.0, -det.arg() / n);
                        u = u.map(|z| z * phase);
                    }
                    _ => {}
                }
                GroupElement::Matrix(u)
            }
            other => other.clone(),
        }
    }
}
