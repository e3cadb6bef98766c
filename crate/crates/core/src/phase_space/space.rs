use std::sync::Arc;

use nalgebra::Vector3;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Error, Result};
use crate::lie::{AlgebraElement, DualElement, GroupElement, LieAlgebra};
use crate::linalg::{flatten_complex, lstsq, unflatten_complex, Matrix, Vector};

/// Points must satisfy the constraints to this tolerance.
pub const POINT_TOL: f64 = 1e-9;
/// Relative tolerance for tangency of input vectors.
pub const TANGENT_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub enum SpaceKind {
    /// `R^2n` with coordinates `(q, p)` and `omega = dq ^ dp`.
    Standard { n: usize },
    /// Sphere of the given radius in `R^3`, `omega_x(u, v) = <x, u x v> / r^2`.
    Sphere { radius: f64 },
    /// Dual of a Lie algebra with the linear Poisson structure.
    LiePoisson { algebra: Arc<LieAlgebra> },
    /// `T*G = G x g*`, trivialised by right translations.
    Cotangent { algebra: Arc<LieAlgebra> },
    /// `R^m` with a constant (possibly degenerate) bivector.
    ConstantPoisson { matrix: Matrix },
    Product(Vec<PhaseSpace>),
}

/// Embedded phase space.
///
/// Points live in an ambient Euclidean space. Everything intrinsic is
/// expressed in the frame returned by [`PhaseSpace::tangent_basis`]: a
/// differential is a row of directional derivatives along that frame, and
/// the bivector `Q` and symplectic matrix `W` are written in it.
#[derive(Clone, Debug)]
pub struct PhaseSpace {
    kind: SpaceKind,
    ambient: usize,
    dim: usize,
}

fn block_diag(blocks: &[Matrix]) -> Matrix {
    let r: usize = blocks.iter().map(|b| b.nrows()).sum();
    let c: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut m = Matrix::zeros(r, c);
    let (mut i, mut j) = (0, 0);
    for b in blocks {
        m.view_mut((i, j), (b.nrows(), b.ncols())).copy_from(b);
        i += b.nrows();
        j += b.ncols();
    }
    m
}

impl PhaseSpace {
    pub fn standard(n: usize) -> Self {
        PhaseSpace { kind: SpaceKind::Standard { n }, ambient: 2 * n, dim: 2 * n }
    }

    pub fn sphere(radius: f64) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::Precondition(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(PhaseSpace { kind: SpaceKind::Sphere { radius }, ambient: 3, dim: 2 })
    }

    pub fn lie_poisson(algebra: Arc<LieAlgebra>) -> Self {
        let d = algebra.dim();
        PhaseSpace { kind: SpaceKind::LiePoisson { algebra }, ambient: d, dim: d }
    }

    pub fn cotangent(algebra: Arc<LieAlgebra>) -> Result<Self> {
        let rep = algebra
            .matrix_rep()
            .ok_or_else(|| Error::Unsupported(format!("cotangent bundle needs a matrix group, {} has none", algebra.name())))?;
        let n = rep.size();
        let group = if rep.is_real() { n * n } else { 2 * n * n };
        let d = algebra.dim();
        Ok(PhaseSpace { kind: SpaceKind::Cotangent { algebra }, ambient: group + d, dim: 2 * d })
    }

    pub fn constant_poisson(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension { expected: matrix.nrows(), got: matrix.ncols() });
        }
        if (&matrix + matrix.transpose()).amax() > 1e-14 {
            return Err(Error::Precondition("bivector matrix is not antisymmetric".into()));
        }
        let m = matrix.nrows();
        Ok(PhaseSpace { kind: SpaceKind::ConstantPoisson { matrix }, ambient: m, dim: m })
    }

    pub fn product(factors: Vec<PhaseSpace>) -> Self {
        let ambient = factors.iter().map(|f| f.ambient).sum();
        let dim = factors.iter().map(|f| f.dim).sum();
        PhaseSpace { kind: SpaceKind::Product(factors), ambient, dim }
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
    /// Manifold dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_symplectic(&self) -> bool {
        match &self.kind {
            SpaceKind::Standard { .. } | SpaceKind::Sphere { .. } | SpaceKind::Cotangent { .. } => true,
            SpaceKind::LiePoisson { .. } | SpaceKind::ConstantPoisson { .. } => false,
            SpaceKind::Product(fs) => fs.iter().all(|f| f.is_symplectic()),
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            SpaceKind::Standard { n } => format!("R^{}", 2 * n),
            SpaceKind::Sphere { radius } => format!("S2(r={radius})"),
            SpaceKind::LiePoisson { algebra } => format!("{}*", algebra.name()),
            SpaceKind::Cotangent { algebra } => format!("T*G({})", algebra.name()),
            SpaceKind::ConstantPoisson { matrix } => format!("R^{} (constant bivector)", matrix.nrows()),
            SpaceKind::Product(fs) => fs.iter().map(|f| f.name()).collect::<Vec<_>>().join(" x "),
        }
    }

    fn cotangent_layout(algebra: &LieAlgebra) -> (usize, bool) {
        let rep = algebra.matrix_rep().expect("checked at construction");
        (rep.size(), !rep.is_real())
    }

    fn group_len(n: usize, imag: bool) -> usize {
        if imag {
            2 * n * n
        } else {
            n * n
        }
    }

    /// Ambient coordinates of `(g, alpha)` on a cotangent bundle.
    pub fn cotangent_point(&self, g: &GroupElement, alpha: &DualElement) -> Result<Vector> {
        let SpaceKind::Cotangent { algebra } = &self.kind else {
            return Err(Error::Unsupported(format!("{} is not a cotangent bundle", self.name())));
        };
        let (n, imag) = Self::cotangent_layout(algebra);
        let m = g.matrix().ok_or_else(|| Error::Unsupported("cotangent bundles need matrix group elements".into()))?;
        check_dim(n, m.nrows())?;
        check_dim(algebra.dim(), alpha.0.len())?;
        let mut data = flatten_complex(m, imag);
        data.extend(alpha.0.iter());
        Ok(Vector::from_vec(data))
    }

    /// Inverse of [`PhaseSpace::cotangent_point`].
    pub fn split_cotangent(&self, p: &Vector) -> Result<(GroupElement, DualElement)> {
        let SpaceKind::Cotangent { algebra } = &self.kind else {
            return Err(Error::Unsupported(format!("{} is not a cotangent bundle", self.name())));
        };
        check_dim(self.ambient, p.len())?;
        let (n, imag) = Self::cotangent_layout(algebra);
        let gl = Self::group_len(n, imag);
        let g = unflatten_complex(&p.as_slice()[..gl], n, imag);
        Ok((GroupElement::Matrix(g), DualElement(p.rows(gl, algebra.dim()).into_owned())))
    }

    /// Ambient tangent vector `(R_{g*} xi, beta)` at a cotangent point.
    pub fn cotangent_tangent(&self, p: &Vector, xi: &AlgebraElement, beta: &DualElement) -> Result<Vector> {
        let SpaceKind::Cotangent { algebra } = &self.kind else {
            return Err(Error::Unsupported(format!("{} is not a cotangent bundle", self.name())));
        };
        let (g, _) = self.split_cotangent(p)?;
        let (_, imag) = Self::cotangent_layout(algebra);
        let x = algebra.matrix_of(xi)?;
        check_dim(algebra.dim(), beta.0.len())?;
        let mut data = flatten_complex(&(x * g.matrix().unwrap()), imag);
        data.extend(beta.0.iter());
        Ok(Vector::from_vec(data))
    }

    /// Largest constraint violation at an ambient point.
    pub fn constraint_residual(&self, p: &Vector) -> f64 {
        if p.len() != self.ambient {
            return f64::INFINITY;
        }
        if p.iter().any(|x| !x.is_finite()) {
            return f64::INFINITY;
        }
        match &self.kind {
            SpaceKind::Sphere { radius } => (p.norm() - radius).abs(),
            SpaceKind::Cotangent { algebra } => {
                let (g, _) = self.split_cotangent(p).unwrap();
                algebra.group_residual(&g)
            }
            SpaceKind::Product(fs) => {
                let mut off = 0;
                let mut r: f64 = 0.0;
                for f in fs {
                    r = r.max(f.constraint_residual(&p.rows(off, f.ambient).into_owned()));
                    off += f.ambient;
                }
                r
            }
            _ => 0.0,
        }
    }

    /// Errors unless `p` lies on the space.
    pub fn check_point(&self, p: &Vector) -> Result<()> {
        check_dim(self.ambient, p.len())?;
        let r = self.constraint_residual(p);
        if r > POINT_TOL {
            return Err(Error::ConstraintViolation { residual: r });
        }
        Ok(())
    }

    /// Nearest point of the space (polar factor on the group part).
    pub fn project(&self, p: &Vector) -> Result<Vector> {
        check_dim(self.ambient, p.len())?;
        match &self.kind {
            SpaceKind::Sphere { radius } => {
                let n = p.norm();
                if n < 1e-300 || !n.is_finite() {
                    return Err(Error::ConstraintViolation { residual: *radius });
                }
                Ok(p * (radius / n))
            }
            SpaceKind::Cotangent { algebra } => {
                let (g, a) = self.split_cotangent(p)?;
                self.cotangent_point(&algebra.reproject(&g), &a)
            }
            SpaceKind::Product(fs) => {
                let mut out = Vector::zeros(self.ambient);
                let mut off = 0;
                for f in fs {
                    out.rows_mut(off, f.ambient).copy_from(&f.project(&p.rows(off, f.ambient).into_owned())?);
                    off += f.ambient;
                }
                Ok(out)
            }
            _ => Ok(p.clone()),
        }
    }

    /// Ambient frame of `T_pM`, one column per intrinsic coordinate.
    pub fn tangent_basis(&self, p: &Vector) -> Matrix {
        match &self.kind {
            SpaceKind::Sphere { .. } => {
                let x = Vector3::new(p[0], p[1], p[2]).normalize();
                let axis = (0..3).min_by(|&a, &b| x[a].abs().partial_cmp(&x[b].abs()).unwrap()).unwrap();
                let e = Vector3::ith(axis, 1.0);
                let u = (e - x * x.dot(&e)).normalize();
                let v = x.cross(&u);
                Matrix::from_columns(&[
                    Vector::from_column_slice(u.as_slice()),
                    Vector::from_column_slice(v.as_slice()),
                ])
            }
            SpaceKind::Cotangent { algebra } => {
                let d = algebra.dim();
                let mut t = Matrix::zeros(self.ambient, self.dim);
                let zero = DualElement::zeros(d);
                let gl = self.ambient - d;
                for i in 0..d {
                    let v = self.cotangent_tangent(p, &algebra.basis_element(i), &zero).unwrap();
                    t.set_column(i, &v);
                    t[(gl + i, d + i)] = 1.0;
                }
                t
            }
            SpaceKind::Product(fs) => {
                let mut blocks = Vec::new();
                let mut off = 0;
                for f in fs {
                    blocks.push(f.tangent_basis(&p.rows(off, f.ambient).into_owned()));
                    off += f.ambient;
                }
                block_diag(&blocks)
            }
            _ => Matrix::identity(self.ambient, self.ambient),
        }
    }

    /// Curve through `p` with initial velocity `T c` (intrinsic `c`), at time `t`.
    pub fn retract(&self, p: &Vector, c: &Vector, t: f64) -> Vector {
        match &self.kind {
            SpaceKind::Sphere { radius } => {
                let tb = self.tangent_basis(p);
                let q = p + tb * c * t;
                let n = q.norm();
                q * (radius / n)
            }
            SpaceKind::Cotangent { algebra } => {
                let d = algebra.dim();
                let (g, a) = self.split_cotangent(p).unwrap();
                let step = algebra.exp(&AlgebraElement(c.rows(0, d) * t)).unwrap();
                let g2 = step.mul(&g).unwrap();
                let a2 = DualElement(&a.0 + c.rows(d, d) * t);
                self.cotangent_point(&g2, &a2).unwrap()
            }
            SpaceKind::Product(fs) => {
                let mut out = Vector::zeros(self.ambient);
                let (mut off, mut ioff) = (0, 0);
                for f in fs {
                    let q = f.retract(&p.rows(off, f.ambient).into_owned(), &c.rows(ioff, f.dim).into_owned(), t);
                    out.rows_mut(off, f.ambient).copy_from(&q);
                    off += f.ambient;
                    ioff += f.dim;
                }
                out
            }
            _ => p + c * t,
        }
    }

    /// Intrinsic coordinates of an ambient vector, with the relative
    /// tangency residual.
    pub fn intrinsic_coords(&self, p: &Vector, v: &Vector) -> Result<(Vector, f64)> {
        check_dim(self.ambient, v.len())?;
        let t = self.tangent_basis(p);
        let (c, r) = lstsq(&t, v);
        Ok((c, r / v.norm().max(1.0)))
    }

    fn tangent_coords(&self, p: &Vector, v: &Vector) -> Result<Vector> {
        let (c, r) = self.intrinsic_coords(p, v)?;
        if r > TANGENT_TOL {
            return Err(Error::NotTangent { residual: r });
        }
        Ok(c)
    }

    /// Symplectic matrix `W_kl = omega(T_k, T_l)`, or `None` for Poisson kinds.
    pub fn symplectic_matrix(&self, p: &Vector) -> Option<Matrix> {
        match &self.kind {
            SpaceKind::Standard { n } => {
                let mut w = Matrix::zeros(2 * n, 2 * n);
                for i in 0..*n {
                    w[(i, n + i)] = 1.0;
                    w[(n + i, i)] = -1.0;
                }
                Some(w)
            }
            SpaceKind::Sphere { radius } => {
                let s = p.norm() / (radius * radius);
                Some(Matrix::from_row_slice(2, 2, &[0.0, s, -s, 0.0]))
            }
            SpaceKind::Cotangent { algebra } => {
                let d = algebra.dim();
                let (_, a) = self.split_cotangent(p).ok()?;
                let mut w = Matrix::zeros(2 * d, 2 * d);
                for i in 0..d {
                    for j in 0..d {
                        let aij: f64 = (0..d).map(|k| algebra.structure_constant(i, j, k) * a.0[k]).sum();
                        w[(i, j)] = -aij;
                    }
                    w[(i, d + i)] = 1.0;
                    w[(d + i, i)] = -1.0;
                }
                Some(w)
            }
            SpaceKind::Product(fs) => {
                let mut blocks = Vec::new();
                let mut off = 0;
                for f in fs {
                    blocks.push(f.symplectic_matrix(&p.rows(off, f.ambient).into_owned())?);
                    off += f.ambient;
                }
                Some(block_diag(&blocks))
            }
            SpaceKind::LiePoisson { .. } | SpaceKind::ConstantPoisson { .. } => None,
        }
    }

    /// Bivector `Q` in the intrinsic frame: `Pi(a, b) = a^T Q b` for
    /// intrinsic covectors.
    pub fn intrinsic_bivector(&self, p: &Vector) -> Matrix {
        match &self.kind {
            SpaceKind::Standard { n } => {
                let mut q = Matrix::zeros(2 * n, 2 * n);
                for i in 0..*n {
                    q[(i, n + i)] = -1.0;
                    q[(n + i, i)] = 1.0;
                }
                q
            }
            SpaceKind::Sphere { radius } => {
                let s = radius * radius / p.norm();
                Matrix::from_row_slice(2, 2, &[0.0, -s, s, 0.0])
            }
            SpaceKind::LiePoisson { algebra } => {
                let d = algebra.dim();
                Matrix::from_fn(d, d, |i, j| -(0..d).map(|k| algebra.structure_constant(i, j, k) * p[k]).sum::<f64>())
            }
            SpaceKind::Cotangent { algebra } => {
                // Inverse of [[-A, I], [-I, 0]] is [[0, -I], [I, -A]].
                let d = algebra.dim();
                let a = &p.as_slice()[self.ambient - d..];
                let mut q = Matrix::zeros(2 * d, 2 * d);
                for i in 0..d {
                    for j in 0..d {
                        q[(d + i, d + j)] = -(0..d).map(|k| algebra.structure_constant(i, j, k) * a[k]).sum::<f64>();
                    }
                    q[(i, d + i)] = -1.0;
                    q[(d + i, i)] = 1.0;
                }
                q
            }
            SpaceKind::ConstantPoisson { matrix } => matrix.clone(),
            SpaceKind::Product(fs) => {
                let mut blocks = Vec::new();
                let mut off = 0;
                for f in fs {
                    blocks.push(f.intrinsic_bivector(&p.rows(off, f.ambient).into_owned()));
                    off += f.ambient;
                }
                block_diag(&blocks)
            }
        }
    }

    /// Ambient bivector `T Q T^T`.
    pub fn bivector_at(&self, p: &Vector) -> Result<Matrix> {
        self.check_point(p)?;
        let t = self.tangent_basis(p);
        Ok(&t * self.intrinsic_bivector(p) * t.transpose())
    }

    /// `omega_p(u, v)` for ambient tangent vectors.
    pub fn symplectic_form_at(&self, p: &Vector, u: &Vector, v: &Vector) -> Result<f64> {
        self.check_point(p)?;
        let w = self
            .symplectic_matrix(p)
            .ok_or_else(|| Error::Unsupported(format!("{} carries no symplectic form", self.name())))?;
        let cu = self.tangent_coords(p, u)?;
        let cv = self.tangent_coords(p, v)?;
        Ok(cu.dot(&(w * cv)))
    }

    /// Map an intrinsic covector to the ambient vector `Pi(lambda, .)`.
    pub fn sharp(&self, p: &Vector, lambda: &Vector) -> Vector {
        self.tangent_basis(p) * (self.intrinsic_bivector(p).transpose() * lambda)
    }

    /// Random point; scale controls the spread of linear coordinates.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Vector {
        let gauss = |rng: &mut R, n: usize| Vector::from_fn(n, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
        match &self.kind {
            SpaceKind::Sphere { radius } => {
                let mut v = gauss(rng, 3);
                while v.norm() < 1e-6 {
                    v = gauss(rng, 3);
                }
                let n = v.norm();
                v * (radius / n)
            }
            SpaceKind::Cotangent { algebra } => {
                let g = algebra.random_group_element(rng, 1.0).unwrap();
                let a = DualElement(gauss(rng, algebra.dim()));
                self.cotangent_point(&g, &a).unwrap()
            }
            SpaceKind::Product(fs) => {
                let mut out = Vector::zeros(self.ambient);
                let mut off = 0;
                for f in fs {
                    out.rows_mut(off, f.ambient).copy_from(&f.random_point(rng, scale));
                    off += f.ambient;
                }
                out
            }
            _ => gauss(rng, self.ambient),
        }
    }
}
