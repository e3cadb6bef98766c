//! The so(3) <-> R^3 identification and the closed-form rotation exponential.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Skew matrix `X` with `X q = xi x q`.
pub fn hat(xi: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -xi.z, xi.y, xi.z, 0.0, -xi.x, -xi.y, xi.x, 0.0)
}

/// Inverse of [`hat`]; reads the skew part of `m`.
pub fn unhat(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// [`hat`] on an untyped slice, checking the length.
pub fn hat_slice(xi: &[f64]) -> Result<Matrix3<f64>> {
    if xi.len() != 3 {
        return Err(Error::Dimension { expected: 3, got: xi.len() });
    }
    Ok(hat(&Vector3::new(xi[0], xi[1], xi[2])))
}

/// Rodrigues formula `exp(hat(w))`.
pub fn rodrigues(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta2 = w.norm_squared();
    let k = hat(w);
    let (a, b) = if theta2 < 1e-8 {
        // Taylor expansions of sin(t)/t and (1-cos t)/t^2.
        (1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0, 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0)
    } else {
        let theta = theta2.sqrt();
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Matrix3::identity() + k * a + k * k * b
}
