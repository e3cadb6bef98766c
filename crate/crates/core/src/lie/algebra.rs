use std::fmt;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::group::{wrap_angle, GroupElement, MatrixGroupKind};
use super::so3;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{expm, flatten_complex, pinv, CMatrix, Matrix, Vector};

/// Element of a Lie algebra in the algebra's basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement(pub Vector);

/// Element of the dual algebra in the dual basis; `alpha(xi) = sum alpha_i xi^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualElement(pub Vector);

impl AlgebraElement {
    pub fn new(coeffs: Vec<f64>) -> Self {
        AlgebraElement(Vector::from_vec(coeffs))
    }
    pub fn zeros(dim: usize) -> Self {
        AlgebraElement(Vector::zeros(dim))
    }
    pub fn coeffs(&self) -> &Vector {
        &self.0
    }
    pub fn scaled(&self, s: f64) -> Self {
        AlgebraElement(&self.0 * s)
    }
}

impl DualElement {
    pub fn new(coeffs: Vec<f64>) -> Self {
        DualElement(Vector::from_vec(coeffs))
    }
    pub fn zeros(dim: usize) -> Self {
        DualElement(Vector::zeros(dim))
    }
    pub fn coeffs(&self) -> &Vector {
        &self.0
    }
    pub fn pair(&self, xi: &AlgebraElement) -> f64 {
        self.0.dot(&xi.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ExpRule {
    Rodrigues,
    Su2,
    Pade,
}

/// Faithful matrix representation: one square matrix per basis element.
#[derive(Clone, Debug)]
pub struct MatrixRep {
    basis: Vec<CMatrix>,
    size: usize,
    real: bool,
    group: MatrixGroupKind,
    exp_rule: ExpRule,
    coords: Coords,
}

#[derive(Clone, Debug)]
enum Coords {
    /// Basis orthogonal for `Re tr(A^* B)`; stores the squared norms.
    Orthogonal(Vec<f64>),
    Pinv(Matrix),
}

fn trace_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

impl MatrixRep {
    fn new(basis: Vec<CMatrix>, group: MatrixGroupKind, exp_rule: ExpRule) -> Self {
        let size = basis[0].nrows();
        let real = basis.iter().all(|m| m.iter().all(|z| z.im == 0.0));
        let orthogonal = (0..basis.len()).all(|i| (0..i).all(|j| trace_inner(&basis[i], &basis[j]).abs() < 1e-14));
        if orthogonal {
            let norms = basis.iter().map(|b| trace_inner(b, b)).collect();
            return MatrixRep { basis, size, real, group, exp_rule, coords: Coords::Orthogonal(norms) };
        }
        let mut flat = Matrix::zeros(2 * size * size, basis.len());
        for (j, b) in basis.iter().enumerate() {
            flat.set_column(j, &Vector::from_vec(flatten_complex(b, true)));
        }
        let coords = Coords::Pinv(pinv(&flat));
        MatrixRep { basis, size, real, group, exp_rule, coords }
    }

    pub fn size(&self) -> usize {
        self.size
    }
    pub fn is_real(&self) -> bool {
        self.real
    }
    pub fn group_kind(&self) -> MatrixGroupKind {
        self.group
    }
    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Coordinates of a matrix in the span of the basis (least squares).
    pub fn coords_of(&self, m: &CMatrix) -> Vector {
        match &self.coords {
            Coords::Orthogonal(norms) => Vector::from_fn(self.basis.len(), |i, _| trace_inner(&self.basis[i], m) / norms[i]),
            Coords::Pinv(p) => p * Vector::from_vec(flatten_complex(m, true)),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Representation {
    Matrix(MatrixRep),
    /// Abelian algebra integrating to a torus of angles.
    Torus,
    /// Abelian algebra integrating to the additive group `R^n`.
    Translations,
    None,
}

/// Finite-dimensional real Lie algebra given by structure constants
/// `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Clone)]
pub struct LieAlgebra {
    name: String,
    labels: Vec<String>,
    dim: usize,
    structure: Vec<f64>,
    rep: Representation,
    cartan: Vec<Vector>,
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieAlgebra").field("name", &self.name).field("dim", &self.dim).finish()
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cmat(n: usize, entries: &[(usize, usize, Complex64)]) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for &(i, j, z) in entries {
        m[(i, j)] = z;
    }
    m
}

fn unit(dim: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[i] = 1.0;
    v
}

impl LieAlgebra {
    /// Algebra defined by raw structure constants (flattened `c[i][j][k]`),
    /// without a representation.
    pub fn from_structure_constants(name: &str, labels: Vec<String>, structure: Vec<f64>, cartan: Vec<Vector>) -> Result<Self> {
        let dim = labels.len();
        check_dim(dim * dim * dim, structure.len())?;
        Ok(LieAlgebra { name: name.into(), labels, dim, structure, rep: Representation::None, cartan })
    }

    fn from_matrices(name: &str, labels: &[&str], basis: Vec<CMatrix>, group: MatrixGroupKind, rule: ExpRule, cartan: Vec<usize>) -> Self {
        let dim = basis.len();
        let rep = MatrixRep::new(basis, group, rule);
        let mut structure = vec![0.0; dim * dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let comm = &rep.basis[i] * &rep.basis[j] - &rep.basis[j] * &rep.basis[i];
                let k = rep.coords_of(&comm);
                for (l, v) in k.iter().enumerate() {
                    // Clean round-off so exact zeros stay exact.
                    structure[(i * dim + j) * dim + l] = if v.abs() < 1e-14 { 0.0 } else { *v };
                }
            }
        }
        LieAlgebra {
            name: name.into(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            dim,
            structure,
            rep: Representation::Matrix(rep),
            cartan: cartan.into_iter().map(|i| unit(dim, i)).collect(),
        }
    }

    /// so(3) with basis `hat(e_i)`, so that `[e1, e2] = e3`.
    pub fn so3() -> Self {
        let basis = (0..3).map(|i| crate::linalg::to_complex(&nalgebra::DMatrix::from_iterator(3, 3, so3::hat(&Vector3::ith(i, 1.0)).iter().cloned()))).collect();
        Self::from_matrices("so3", &["e1", "e2", "e3"], basis, MatrixGroupKind::SpecialOrthogonal, ExpRule::Rodrigues, vec![2])
    }

    fn pauli_basis() -> Vec<CMatrix> {
        let h = -0.5;
        vec![
            cmat(2, &[(0, 1, c(0.0, h)), (1, 0, c(0.0, h))]),
            cmat(2, &[(0, 1, c(h, 0.0)), (1, 0, c(-h, 0.0))]),
            cmat(2, &[(0, 0, c(0.0, h)), (1, 1, c(0.0, -h))]),
        ]
    }

    /// su(2) with basis `-(i/2) sigma_k`, so that `[e1, e2] = e3`; the Cartan
    /// subalgebra is spanned by the diagonal element `e3`.
    pub fn su2() -> Self {
        Self::from_matrices("su2", &["e1", "e2", "e3"], Self::pauli_basis(), MatrixGroupKind::SpecialUnitary, ExpRule::Su2, vec![2])
    }

    /// u(2) = su(2) + u(1), with the central element `-(i/2) I`.
    pub fn u2() -> Self {
        let mut basis = Self::pauli_basis();
        basis.push(cmat(2, &[(0, 0, c(0.0, -0.5)), (1, 1, c(0.0, -0.5))]));
        Self::from_matrices("u2", &["e1", "e2", "e3", "z"], basis, MatrixGroupKind::Unitary, ExpRule::Pade, vec![2, 3])
    }

    /// su(3) with basis `-(i/2) lambda_a` (Gell-Mann matrices); Cartan
    /// subalgebra spanned by the diagonal `e3`, `e8`.
    pub fn su3() -> Self {
        let h = -0.5;
        let s3 = 1.0 / 3f64.sqrt();
        let basis = vec![
            cmat(3, &[(0, 1, c(0.0, h)), (1, 0, c(0.0, h))]),
            cmat(3, &[(0, 1, c(h, 0.0)), (1, 0, c(-h, 0.0))]),
            cmat(3, &[(0, 0, c(0.0, h)), (1, 1, c(0.0, -h))]),
            cmat(3, &[(0, 2, c(0.0, h)), (2, 0, c(0.0, h))]),
            cmat(3, &[(0, 2, c(h, 0.0)), (2, 0, c(-h, 0.0))]),
            cmat(3, &[(1, 2, c(0.0, h)), (2, 1, c(0.0, h))]),
            cmat(3, &[(1, 2, c(h, 0.0)), (2, 1, c(-h, 0.0))]),
            cmat(3, &[(0, 0, c(0.0, h * s3)), (1, 1, c(0.0, h * s3)), (2, 2, c(0.0, -2.0 * h * s3))]),
        ];
        Self::from_matrices(
            "su3",
            &["e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8"],
            basis,
            MatrixGroupKind::SpecialUnitary,
            ExpRule::Pade,
            vec![2, 7],
        )
    }

    fn abelian(name: &str, n: usize, rep: Representation) -> Self {
        LieAlgebra {
            name: name.into(),
            labels: (1..=n).map(|i| format!("t{i}")).collect(),
            dim: n,
            structure: vec![0.0; n * n * n],
            rep,
            cartan: (0..n).map(|i| unit(n, i)).collect(),
        }
    }

    /// Abelian algebra `t^n` of the torus `T^n`.
    pub fn torus(n: usize) -> Self {
        Self::abelian(&format!("t{n}"), n, Representation::Torus)
    }

    /// Abelian algebra `R^n` of the translation group.
    pub fn translations(n: usize) -> Self {
        Self::abelian(&format!("r{n}"), n, Representation::Translations)
    }

    /// Direct product, realised by block-diagonal matrices. Torus factors are
    /// represented as diagonal `u(1)` blocks.
    pub fn product(factors: &[LieAlgebra]) -> Result<Self> {
        let mut blocks: Vec<Vec<CMatrix>> = Vec::new();
        let mut all_special = true;
        let mut all_real = true;
        for f in factors {
            match &f.rep {
                Representation::Matrix(r) => {
                    all_special &= r.group != MatrixGroupKind::Unitary;
                    all_real &= r.group == MatrixGroupKind::SpecialOrthogonal;
                    blocks.push(r.basis.clone());
                }
                Representation::Torus => {
                    all_special = false;
                    all_real = false;
                    blocks.push((0..f.dim).map(|i| cmat(f.dim, &[(i, i, c(0.0, 1.0))])).collect());
                }
                _ => return Err(Error::Unsupported(format!("product factor {} has no matrix representation", f.name))),
            }
        }
        let size: usize = blocks.iter().map(|b| b[0].nrows()).sum();
        let mut basis = Vec::new();
        let mut labels = Vec::new();
        let mut cartan = Vec::new();
        let total: usize = factors.iter().map(|f| f.dim).sum();
        let (mut off_m, mut off_b) = (0, 0);
        for (f, b) in factors.iter().zip(&blocks) {
            let n = b[0].nrows();
            for (i, m) in b.iter().enumerate() {
                let mut big = CMatrix::zeros(size, size);
                big.view_mut((off_m, off_m), (n, n)).copy_from(m);
                basis.push(big);
                labels.push(format!("{}.{}", f.name, f.labels[i]));
            }
            for h in &f.cartan {
                let mut v = Vector::zeros(total);
                v.rows_mut(off_b, f.dim).copy_from(h);
                cartan.push(v);
            }
            off_m += n;
            off_b += f.dim;
        }
        let group = if all_real {
            MatrixGroupKind::SpecialOrthogonal
        } else if all_special {
            MatrixGroupKind::SpecialUnitary
        } else {
            MatrixGroupKind::Unitary
        };
        let name = factors.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("x");
        let label_refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        let mut alg = Self::from_matrices(&name, &label_refs, basis, group, ExpRule::Pade, vec![]);
        alg.cartan = cartan;
        Ok(alg)
    }

    /// Built-in algebra by name: `so3`, `su2`, `su3`, `u2`, `t<n>`, `r<n>`,
    /// or a product joined by `x` (e.g. `su2xsu2`).
    pub fn builtin(name: &str) -> Result<Self> {
        if name.contains('x') {
            let parts: Vec<LieAlgebra> = name.split('x').map(Self::builtin).collect::<Result<_>>()?;
            return Self::product(&parts);
        }
        match name {
            "so3" => Ok(Self::so3()),
            "su2" => Ok(Self::su2()),
            "su3" => Ok(Self::su3()),
            "u2" => Ok(Self::u2()),
            _ => {
                let parse = |prefix: &str| name.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok()).filter(|&n| n > 0);
                if let Some(n) = parse("t") {
                    Ok(Self::torus(n))
                } else if let Some(n) = parse("r") {
                    Ok(Self::translations(n))
                } else {
                    Err(Error::Unsupported(format!("unknown algebra '{name}'")))
                }
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn representation(&self) -> &Representation {
        &self.rep
    }
    pub fn matrix_rep(&self) -> Option<&MatrixRep> {
        match &self.rep {
            Representation::Matrix(r) => Some(r),
            _ => None,
        }
    }
    pub fn group_kind(&self) -> Option<MatrixGroupKind> {
        self.matrix_rep().map(|r| r.group)
    }
    /// Designated basis of a maximal abelian subalgebra.
    pub fn cartan_basis(&self) -> &[Vector] {
        &self.cartan
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    pub fn basis_element(&self, i: usize) -> AlgebraElement {
        AlgebraElement(unit(self.dim, i))
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().all(|&x| x == 0.0)
    }

    /// Largest violation of `c[i][j][k] = -c[j][i][k]`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut r: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    r = r.max((self.structure_constant(i, j, k) + self.structure_constant(j, i, k)).abs());
                }
            }
        }
        r
    }

    /// Largest cyclic Jacobi sum over basis quadruples.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim;
        let c = |a, b, e| self.structure_constant(a, b, e);
        let mut r: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let s: f64 = (0..d).map(|m| c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l)).sum();
                        r = r.max(s.abs());
                    }
                }
            }
        }
        r
    }

    /// Largest mismatch between matrix commutators and the structure constants.
    pub fn representation_residual(&self) -> f64 {
        let Some(rep) = self.matrix_rep() else { return 0.0 };
        let mut r: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let comm = &rep.basis[i] * &rep.basis[j] - &rep.basis[j] * &rep.basis[i];
                let mut expected = CMatrix::zeros(rep.size, rep.size);
                for k in 0..self.dim {
                    expected += &rep.basis[k] * Complex64::new(self.structure_constant(i, j, k), 0.0);
                }
                r = r.max((comm - expected).norm());
            }
        }
        r
    }

    fn check(&self, v: &Vector) -> Result<()> {
        check_dim(self.dim, v.len())
    }

    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(&x.0)?;
        self.check(&y.0)?;
        Ok(AlgebraElement(self.bracket_vec(&x.0, &y.0)))
    }

    pub(crate) fn bracket_vec(&self, x: &Vector, y: &Vector) -> Vector {
        let d = self.dim;
        let mut out = Vector::zeros(d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..d {
                    out[k] += w * self.structure[(i * d + j) * d + k];
                }
            }
        }
        out
    }

    /// Matrix of `ad x`; column `j` is `[x, e_j]`.
    pub fn ad_matrix(&self, x: &AlgebraElement) -> Result<Matrix> {
        self.check(&x.0)?;
        let d = self.dim;
        let mut m = Matrix::zeros(d, d);
        for j in 0..d {
            m.set_column(j, &self.bracket_vec(&x.0, &unit(d, j)));
        }
        Ok(m)
    }

    /// Killing form `B(x, y) = tr(ad x ad y)`.
    pub fn killing_form(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
        Ok((self.ad_matrix(x)? * self.ad_matrix(y)?).trace())
    }

    /// Gram matrix of the Killing form in the basis.
    pub fn killing_matrix(&self) -> Matrix {
        let ads: Vec<Matrix> = (0..self.dim).map(|i| self.ad_matrix(&self.basis_element(i)).unwrap()).collect();
        Matrix::from_fn(self.dim, self.dim, |i, j| (&ads[i] * &ads[j]).trace())
    }

    pub fn matrix_of(&self, x: &AlgebraElement) -> Result<CMatrix> {
        self.check(&x.0)?;
        let rep = self.matrix_rep().ok_or_else(|| Error::Unsupported(format!("{} has no matrix representation", self.name)))?;
        let mut m = CMatrix::zeros(rep.size, rep.size);
        for (i, b) in rep.basis.iter().enumerate() {
            if x.0[i] != 0.0 {
                m += b * Complex64::new(x.0[i], 0.0);
            }
        }
        Ok(m)
    }

    pub fn identity(&self) -> GroupElement {
        match &self.rep {
            Representation::Matrix(r) => GroupElement::Matrix(CMatrix::identity(r.size, r.size)),
            Representation::Torus => GroupElement::Torus(Vector::zeros(self.dim)),
            _ => GroupElement::Translation(Vector::zeros(self.dim)),
        }
    }

    /// Group exponential.
    pub fn exp(&self, x: &AlgebraElement) -> Result<GroupElement> {
        self.check(&x.0)?;
        match &self.rep {
            Representation::Matrix(rep) => {
                let g = match rep.exp_rule {
                    ExpRule::Rodrigues => {
                        let r = so3::rodrigues(&Vector3::new(x.0[0], x.0[1], x.0[2]));
                        CMatrix::from_fn(3, 3, |i, j| Complex64::new(r[(i, j)], 0.0))
                    }
                    ExpRule::Su2 => {
                        let m = self.matrix_of(x)?;
                        let theta = 0.5 * x.0.norm();
                        let sinc = if theta < 1e-8 { 1.0 - theta * theta / 6.0 } else { theta.sin() / theta };
                        CMatrix::identity(2, 2) * Complex64::new(theta.cos(), 0.0) + m * Complex64::new(sinc, 0.0)
                    }
                    ExpRule::Pade => expm(&self.matrix_of(x)?),
                };
                Ok(GroupElement::Matrix(g))
            }
            Representation::Torus => Ok(GroupElement::Torus(x.0.map(wrap_angle))),
            Representation::Translations => Ok(GroupElement::Translation(x.0.clone())),
            Representation::None => Err(Error::Unsupported(format!("{} has no representation for exp", self.name))),
        }
    }

    fn check_group(&self, g: &GroupElement) -> Result<()> {
        match (&self.rep, g) {
            (Representation::Matrix(r), GroupElement::Matrix(m)) => check_dim(r.size, m.nrows()),
            (Representation::Torus, GroupElement::Torus(a)) | (Representation::Translations, GroupElement::Translation(a)) => check_dim(self.dim, a.len()),
            _ => Err(Error::Unsupported("group element does not belong to this algebra's group".into())),
        }
    }

    /// Matrix of `Ad(g)` in the basis.
    pub fn adjoint_matrix(&self, g: &GroupElement) -> Result<Matrix> {
        self.check_group(g)?;
        match (&self.rep, g) {
            (Representation::Matrix(rep), GroupElement::Matrix(m)) => {
                let inv = m.adjoint();
                let mut out = Matrix::zeros(self.dim, self.dim);
                for (j, b) in rep.basis.iter().enumerate() {
                    out.set_column(j, &rep.coords_of(&(m * b * &inv)));
                }
                Ok(out)
            }
            _ => Ok(Matrix::identity(self.dim, self.dim)),
        }
    }

    /// `Ad(g) x = g X g^{-1}` in the basis.
    pub fn adjoint(&self, g: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(&x.0)?;
        Ok(AlgebraElement(self.adjoint_matrix(g)? * &x.0))
    }

    /// `Ad*(g) alpha = alpha o Ad(g^{-1})`.
    pub fn coadjoint(&self, g: &GroupElement, alpha: &DualElement) -> Result<DualElement> {
        self.check(&alpha.0)?;
        let m = self.adjoint_matrix(&g.inverse())?;
        Ok(DualElement(m.transpose() * &alpha.0))
    }

    /// Infinitesimal coadjoint generator `eta -> -alpha([xi, eta])`.
    pub fn coadjoint_generator(&self, xi: &AlgebraElement, alpha: &DualElement) -> Result<DualElement> {
        self.check(&alpha.0)?;
        let ad = self.ad_matrix(xi)?;
        Ok(DualElement(-(ad.transpose() * &alpha.0)))
    }

    /// Linear map `xi -> xi_{g*}(alpha)` as a `dim x dim` matrix.
    pub fn coadjoint_generator_matrix(&self, alpha: &DualElement) -> Result<Matrix> {
        self.check(&alpha.0)?;
        let mut m = Matrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            m.set_column(i, &self.coadjoint_generator(&self.basis_element(i), alpha)?.0);
        }
        Ok(m)
    }

    /// Algebra element from a matrix in the span of the representation.
    pub fn from_matrix(&self, m: &CMatrix) -> Result<AlgebraElement> {
        let rep = self.matrix_rep().ok_or_else(|| Error::Unsupported(format!("{} has no matrix representation", self.name)))?;
        check_dim(rep.size, m.nrows())?;
        Ok(AlgebraElement(rep.coords_of(m)))
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> AlgebraElement {
        AlgebraElement(Vector::from_fn(self.dim, |_, _| scale * rng.sample::<f64, _>(StandardNormal)))
    }

    pub fn random_dual<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> DualElement {
        DualElement(Vector::from_fn(self.dim, |_, _| scale * rng.sample::<f64, _>(StandardNormal)))
    }

    /// `exp` of a random algebra element; requires a representation.
    pub fn random_group_element<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Result<GroupElement> {
        self.exp(&self.random_element(rng, scale))
    }

    /// Residual of the group invariants of `g`.
    pub fn group_residual(&self, g: &GroupElement) -> f64 {
        g.invariant_residual(self.group_kind())
    }

    pub fn reproject(&self, g: &GroupElement) -> GroupElement {
        g.reproject(self.group_kind())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn e(alg: &LieAlgebra, i: usize) -> AlgebraElement {
        alg.basis_element(i)
    }

    #[test]
    fn builtins_satisfy_antisymmetry_and_jacobi() {
        for name in ["so3", "su2", "su3", "u2", "t3", "r2", "su2xsu2", "so3xt1"] {
            let alg = LieAlgebra::builtin(name).unwrap();
            assert!(alg.antisymmetry_residual() < 1e-12, "{name}");
            assert!(alg.jacobi_residual() < 1e-12, "{name}");
            assert!(alg.representation_residual() < 1e-12, "{name}");
        }
    }

    #[test]
    fn so3_bracket_matches_hat_commutator() {
        let so3 = LieAlgebra::so3();
        let b = so3.bracket(&e(&so3, 0), &e(&so3, 1)).unwrap();
        assert_relative_eq!(b.0, e(&so3, 2).0, epsilon = 1e-15);
        let x = so3.matrix_of(&e(&so3, 0)).unwrap();
        let y = so3.matrix_of(&e(&so3, 1)).unwrap();
        let comm = so3.from_matrix(&(&x * &y - &y * &x)).unwrap();
        assert_relative_eq!(comm.0, b.0, epsilon = 1e-14);
    }

    #[test]
    fn bracket_is_alternating_and_abelian_vanishes() {
        let su3 = LieAlgebra::su3();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = su3.random_element(&mut rng, 1.0);
        assert!(su3.bracket(&x, &x).unwrap().0.norm() < 1e-14);
        let t = LieAlgebra::torus(3);
        let a = t.random_element(&mut rng, 1.0);
        let b = t.random_element(&mut rng, 1.0);
        assert_eq!(t.bracket(&a, &b).unwrap().0.norm(), 0.0);
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let so3 = LieAlgebra::so3();
        let bad = AlgebraElement::zeros(8);
        assert!(matches!(so3.bracket(&e(&so3, 0), &bad), Err(Error::Dimension { .. })));
    }

    #[test]
    fn exp_examples() {
        let so3 = LieAlgebra::so3();
        let id = so3.exp(&AlgebraElement::zeros(3)).unwrap();
        assert_eq!(id, so3.identity());
        let half = so3.exp(&e(&so3, 2).scaled(PI)).unwrap().real_matrix().unwrap();
        let expected = Matrix::from_diagonal(&Vector::from_vec(vec![-1.0, -1.0, 1.0]));
        assert_relative_eq!(half, expected, epsilon = 1e-15);
        let t = LieAlgebra::torus(2);
        let GroupElement::Torus(a) = t.exp(&AlgebraElement::new(vec![7.0, -1.0])).unwrap() else { panic!() };
        assert_relative_eq!(a[0], 7.0 - 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(a[1], 2.0 * PI - 1.0, epsilon = 1e-14);
        let abstract_alg = LieAlgebra::from_structure_constants("a", vec!["x".into()], vec![0.0], vec![]).unwrap();
        assert!(matches!(abstract_alg.exp(&AlgebraElement::zeros(1)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn closed_forms_agree_with_pade() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for alg in [LieAlgebra::so3(), LieAlgebra::su2()] {
            for _ in 0..20 {
                let x = alg.random_element(&mut rng, 2.0);
                let closed = alg.exp(&x).unwrap();
                let pade = expm(&alg.matrix_of(&x).unwrap());
                assert!((closed.matrix().unwrap() - pade).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn exp_inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for alg in [LieAlgebra::so3(), LieAlgebra::su2(), LieAlgebra::su3(), LieAlgebra::u2()] {
            for _ in 0..100 {
                let mut x = alg.random_element(&mut rng, 4.0);
                if x.0.norm() > 10.0 {
                    x = x.scaled(10.0 / x.0.norm());
                }
                let g = alg.exp(&x).unwrap();
                let h = alg.exp(&x.scaled(-1.0)).unwrap();
                let prod = g.mul(&h).unwrap();
                assert!((prod.matrix().unwrap() - alg.identity().matrix().unwrap()).norm() < 1e-10);
                assert!(alg.group_residual(&g) < 1e-10);
            }
        }
    }

    #[test]
    fn adjoint_examples() {
        let so3 = LieAlgebra::so3();
        let x = e(&so3, 0);
        assert_relative_eq!(so3.adjoint(&so3.identity(), &x).unwrap().0, x.0, epsilon = 1e-15);
        let r = so3.exp(&e(&so3, 2).scaled(PI / 2.0)).unwrap();
        assert_relative_eq!(so3.adjoint(&r, &x).unwrap().0, e(&so3, 1).0, epsilon = 1e-14);
        let t = LieAlgebra::torus(2);
        let g = t.exp(&AlgebraElement::new(vec![1.0, 2.0])).unwrap();
        let y = AlgebraElement::new(vec![0.3, 0.4]);
        assert_eq!(t.adjoint(&g, &y).unwrap(), y);
    }

    #[test]
    fn coadjoint_on_so3_rotates_coefficients() {
        let so3 = LieAlgebra::so3();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let alpha = so3.random_dual(&mut rng, 1.0);
        assert_relative_eq!(so3.coadjoint(&so3.identity(), &alpha).unwrap().0, alpha.0, epsilon = 1e-15);
        let g = so3.random_group_element(&mut rng, 1.0).unwrap();
        let rot = g.real_matrix().unwrap();
        assert_relative_eq!(so3.coadjoint(&g, &alpha).unwrap().0, &rot * &alpha.0, epsilon = 1e-13);
    }

    #[test]
    fn coadjoint_is_a_left_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for alg in [LieAlgebra::so3(), LieAlgebra::su3()] {
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                let g = alg.random_group_element(&mut rng, 1.5).unwrap();
                let h = alg.random_group_element(&mut rng, 1.5).unwrap();
                let a = alg.random_dual(&mut rng, 1.0);
                let lhs = alg.coadjoint(&g.mul(&h).unwrap(), &a).unwrap();
                let rhs = alg.coadjoint(&g, &alg.coadjoint(&h, &a).unwrap()).unwrap();
                worst = worst.max((lhs.0 - rhs.0).norm());
            }
            assert!(worst < 1e-10, "{}: {worst}", alg.name());
        }
    }

    #[test]
    fn coadjoint_generator_examples() {
        let so3 = LieAlgebra::so3();
        let gen = so3.coadjoint_generator(&e(&so3, 0), &DualElement::new(vec![0.0, 1.0, 0.0])).unwrap();
        assert_relative_eq!(gen.pair(&e(&so3, 2)), 1.0, epsilon = 1e-15);
        let t = LieAlgebra::torus(2);
        let z = t.coadjoint_generator(&AlgebraElement::new(vec![1.0, 1.0]), &DualElement::new(vec![2.0, 3.0])).unwrap();
        assert_eq!(z.0.norm(), 0.0);
    }

    #[test]
    fn coadjoint_generator_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for alg in [LieAlgebra::so3(), LieAlgebra::su3()] {
            let xi = alg.random_element(&mut rng, 1.0);
            let a = alg.random_dual(&mut rng, 1.0);
            let exact = alg.coadjoint_generator(&xi, &a).unwrap().0;
            let mut errs = Vec::new();
            for h in [1e-4, 1e-5] {
                let plus = alg.coadjoint(&alg.exp(&xi.scaled(h)).unwrap(), &a).unwrap().0;
                let minus = alg.coadjoint(&alg.exp(&xi.scaled(-h)).unwrap(), &a).unwrap().0;
                errs.push(((plus - minus) / (2.0 * h) - &exact).norm());
            }
            assert!(errs.iter().all(|&r| r < 1e-6), "{errs:?}");
        }
    }

    #[test]
    fn killing_form_examples() {
        let so3 = LieAlgebra::so3();
        let k = so3.killing_matrix();
        assert_relative_eq!(k, Matrix::identity(3, 3) * -2.0, epsilon = 1e-14);
        let t = LieAlgebra::torus(3);
        assert_eq!(t.killing_matrix().norm(), 0.0);
        let su3 = LieAlgebra::su3();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x = su3.random_element(&mut rng, 1.0);
            let y = su3.random_element(&mut rng, 1.0);
            let b1 = su3.killing_form(&x, &y).unwrap();
            let b2 = su3.killing_form(&y, &x).unwrap();
            assert!((b1 - b2).abs() < 1e-12);
        }
    }

    #[test]
    fn killing_form_is_ad_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for alg in [LieAlgebra::so3(), LieAlgebra::su3(), LieAlgebra::u2()] {
            for _ in 0..20 {
                let g = alg.random_group_element(&mut rng, 2.0).unwrap();
                let x = alg.random_element(&mut rng, 1.0);
                let y = alg.random_element(&mut rng, 1.0);
                let lhs = alg.killing_form(&alg.adjoint(&g, &x).unwrap(), &alg.adjoint(&g, &y).unwrap()).unwrap();
                assert!((lhs - alg.killing_form(&x, &y).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn adjoint_derivative_is_ad() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let alg = LieAlgebra::su3();
        let h = 1e-3;
        for _ in 0..10 {
            let xi = alg.random_element(&mut rng, 1.0);
            let eta = alg.random_element(&mut rng, 1.0);
            let plus = alg.adjoint(&alg.exp(&xi.scaled(h)).unwrap(), &eta).unwrap().0;
            let minus = alg.adjoint(&alg.exp(&xi.scaled(-h)).unwrap(), &eta).unwrap().0;
            let fd = (plus - minus) / (2.0 * h);
            let exact = alg.bracket(&xi, &eta).unwrap().0;
            assert!((fd - exact).norm() <= 10.0 * h * h);
        }
    }

    #[test]
    fn reprojection_removes_drift() {
        let so3 = LieAlgebra::so3();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = so3.random_group_element(&mut rng, 1.0).unwrap();
        let GroupElement::Matrix(m) = &g else { panic!() };
        let drifted = GroupElement::Matrix(m * Complex64::new(1.0 + 1e-6, 0.0));
        assert!(so3.group_residual(&drifted) > 1e-8);
        let fixed = so3.reproject(&drifted);
        assert!(so3.group_residual(&fixed) < 1e-12);
        assert!((fixed.matrix().unwrap() - m).norm() < 1e-10);
    }
}
