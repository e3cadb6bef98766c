//! Dense linear-algebra kernel shared by every geometric test.
//!
//! All subspace arithmetic (sums, intersections, annihilators, preimages) is
//! reduced to rank statements about SVDs with a single relative cutoff,
//! [`RANK_CUTOFF`]. Subspaces are passed around as matrices whose columns
//! span them; the helpers here always return orthonormal column bases.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;
pub type CMatrix = DMatrix<Complex64>;

/// Relative singular-value cutoff used for every rank decision.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Below this largest singular value a matrix is treated as zero.
const ZERO_SCALE: f64 = 1e-13;

pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

fn threshold(sigma_max: f64, scale: f64) -> f64 {
    let s = sigma_max.max(scale);
    if s < ZERO_SCALE {
        f64::INFINITY
    } else {
        RANK_CUTOFF * s
    }
}

/// Numerical rank with the cutoff relative to the largest singular value.
pub fn rank(m: &Matrix) -> usize {
    rank_with_scale(m, 0.0)
}

/// Numerical rank with the cutoff relative to `max(sigma_max, scale)`.
///
/// Use a nonzero `scale` when the matrix is the image of a known operator, so
/// that round-off images of a vanishing map are not promoted to full rank.
pub fn rank_with_scale(m: &Matrix, scale: f64) -> usize {
    let s = singular_values(m);
    let Some(&max) = s.first() else { return 0 };
    let tol = threshold(max, scale);
    s.iter().filter(|&&x| x > tol).count()
}

/// Orthonormal basis (columns) of the column space.
pub fn column_space(m: &Matrix) -> Matrix {
    column_space_with_scale(m, 0.0)
}

pub fn column_space_with_scale(m: &Matrix, scale: f64) -> Matrix {
    let n = m.nrows();
    if n == 0 || m.ncols() == 0 {
        return Matrix::zeros(n, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let s = &svd.singular_values;
    let max = s.iter().cloned().fold(0.0, f64::max);
    let tol = threshold(max, scale);
    let cols: Vec<Vector> = (0..s.len())
        .filter(|&i| s[i] > tol)
        .map(|i| u.column(i).into_owned())
        .collect();
    from_columns(n, &cols)
}

/// Orthonormal basis (columns) of the null space of `m`.
pub fn null_space(m: &Matrix) -> Matrix {
    null_space_with_scale(m, 0.0)
}

pub fn null_space_with_scale(m: &Matrix, scale: f64) -> Matrix {
    let n = m.ncols();
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return Matrix::identity(n, n);
    }
    // Pad to at least n rows so the SVD returns a full right factor.
    let rows = m.nrows().max(n);
    let mut padded = Matrix::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let s = &svd.singular_values;
    let max = s.iter().cloned().fold(0.0, f64::max);
    let tol = threshold(max, scale);
    let cols: Vec<Vector> = (0..n)
        .filter(|&i| s[i] <= tol)
        .map(|i| vt.row(i).transpose().into_owned())
        .collect();
    from_columns(n, &cols)
}

/// Annihilator of the span of `basis` (columns) inside the dual of `R^n`,
/// returned as covector columns.
pub fn annihilator(basis: &Matrix) -> Matrix {
    let n = basis.nrows();
    if basis.ncols() == 0 {
        return Matrix::identity(n, n);
    }
    null_space(&basis.transpose())
}

/// Horizontal concatenation of column blocks with a common row count.
pub fn hstack(blocks: &[&Matrix]) -> Matrix {
    let rows = blocks.first().map(|b| b.nrows()).unwrap_or(0);
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, c), (rows, b.ncols())).copy_from(*b);
        c += b.ncols();
    }
    out
}

pub fn from_columns(rows: usize, cols: &[Vector]) -> Matrix {
    let mut m = Matrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Dimension of the sum of two subspaces given by spanning columns.
pub fn sum_dim(a: &Matrix, b: &Matrix) -> usize {
    if a.ncols() + b.ncols() == 0 {
        return 0;
    }
    rank(&hstack(&[a, b]))
}

/// Dimension of the intersection of two subspaces given by spanning columns.
pub fn intersection_dim(a: &Matrix, b: &Matrix) -> usize {
    let ra = rank(a);
    let rb = rank(b);
    (ra + rb).saturating_sub(sum_dim(a, b))
}

/// Least-squares solution of `a x = b` and the residual norm `|a x - b|`.
pub fn lstsq(a: &Matrix, b: &Vector) -> (Vector, f64) {
    if a.ncols() == 0 {
        return (Vector::zeros(0), b.norm());
    }
    let svd = a.clone().svd(true, true);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = if max < ZERO_SCALE { 1.0 } else { RANK_CUTOFF * max };
    let x = svd.solve(b, eps).expect("svd solve with both factors");
    let r = (a * &x - b).norm();
    (x, r)
}

/// Moore-Penrose pseudo-inverse with the shared cutoff.
pub fn pinv(a: &Matrix) -> Matrix {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Matrix::zeros(a.ncols(), a.nrows());
    }
    let svd = a.clone().svd(true, true);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = if max < ZERO_SCALE { 1.0 } else { RANK_CUTOFF * max };
    svd.pseudo_inverse(eps).expect("pseudo-inverse")
}

/// Largest absolute entry.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

// --- complex matrix helpers -------------------------------------------------

pub fn to_complex(m: &Matrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn cnorm_inf(m: &CMatrix) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a diagonal [6/6] Pade
/// approximant.
pub fn expm(a: &CMatrix) -> CMatrix {
    const COEFFS: [f64; 7] = [
        1.0,
        0.5,
        5.0 / 44.0,
        1.0 / 66.0,
        1.0 / 792.0,
        1.0 / 15840.0,
        1.0 / 665280.0,
    ];
    let n = a.nrows();
    let norm = cnorm_inf(a);
    let mut squarings = 0u32;
    if norm > 0.25 {
        squarings = ((norm / 0.25).log2().ceil()) as u32;
    }
    let scale = 0.5f64.powi(squarings as i32);
    let a = a.map(|z| z * scale);
    let id = CMatrix::identity(n, n);
    let mut num = id.clone();
    let mut den = id.clone();
    let mut power = id;
    for (k, &c) in COEFFS.iter().enumerate().skip(1) {
        power = &power * &a;
        let term = power.map(|z| z * c);
        num += &term;
        if k % 2 == 0 {
            den += &term;
        } else {
            den -= &term;
        }
    }
    let mut result = den.lu().solve(&num).expect("Pade denominator is invertible");
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Nearest unitary matrix in Frobenius norm (unitary polar factor).
pub fn nearest_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u");
    let vt = svd.v_t.expect("v_t");
    u * vt
}

pub fn cdet(m: &CMatrix) -> Complex64 {
    m.clone().determinant()
}

/// Split a complex matrix into row-major real coordinates: all real parts,
/// followed by all imaginary parts when `with_imag` is set.
pub fn flatten_complex(m: &CMatrix, with_imag: bool) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(if with_imag { 2 * r * c } else { r * c });
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)].re);
        }
    }
    if with_imag {
        for i in 0..r {
            for j in 0..c {
                out.push(m[(i, j)].im);
            }
        }
    }
    out
}

pub fn unflatten_complex(data: &[f64], n: usize, with_imag: bool) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        let re = data[i * n + j];
        let im = if with_imag { data[n * n + i * n + j] } else { 0.0 };
        Complex64::new(re, im)
    })
}
