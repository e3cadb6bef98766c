//! Root decomposition of compact Lie algebras, simple roots, the fundamental
//! Weyl chamber and its faces, isotropy algebras of faces and face
//! classification of moment values.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::action::MomentMap;
use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, DualElement, LieAlgebra};
use crate::linalg::{column_space, from_columns, hstack, lstsq, null_space, rank, Matrix, Vector};

/// Eigenvalue clustering tolerance (relative to the spectral scale).
pub const CLUSTER_TOL: f64 = 1e-8;
/// Chamber membership slack.
pub const CHAMBER_TOL: f64 = 1e-10;
/// Tolerance for a pairing to count as zero when locating faces.
pub const FACE_TOL: f64 = 1e-8;
const SEED: u64 = 42;
const MAX_RESEEDS: usize = 10;

/// Root `alpha`, stored as the real functional `alpha / i` on `t` in the
/// dual of the Cartan basis, with a root vector `re + i im` in algebra
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub functional: Vector,
    pub vector_re: Vector,
    pub vector_im: Vector,
}

/// Roots, simple roots and the pairing on `t*` of a compact algebra.
#[derive(Clone, Debug)]
pub struct RootSystem {
    algebra: Arc<LieAlgebra>,
    /// Cartan basis as columns in algebra coordinates.
    cartan: Matrix,
    /// Basis of `z` as columns in Cartan coordinates, orthonormal.
    center: Matrix,
    roots: Vec<Root>,
    simple: Vec<usize>,
    /// Simple-root coefficients of each root (rows follow `roots`).
    expansion: Matrix,
    /// Positive definite form `-B + E_z` on `t` in Cartan coordinates.
    /// `E_z` is Euclidean in center coordinates and vanishes on `t'`.
    form: Matrix,
    form_inv: Matrix,
}

/// Inner product on `g` for which every `ad x` is antisymmetric.
fn invariant_inner_product(algebra: &LieAlgebra) -> Result<Matrix> {
    let d = algebra.dim();
    if algebra.is_abelian() {
        return Ok(Matrix::identity(d, d));
    }
    if algebra.matrix_rep().is_some() {
        let mats = (0..d).map(|i| algebra.matrix_of(&algebra.basis_element(i))).collect::<Result<Vec<_>>>()?;
        return Ok(Matrix::from_fn(d, d, |i, j| (mats[i].adjoint() * &mats[j]).trace().re));
    }
    let b = -algebra.killing_matrix();
    if rank(&b) == d {
        return Ok(b);
    }
    Err(Error::Unsupported(format!("no invariant inner product known for {}", algebra.name())))
}

impl RootSystem {
    /// Root decomposition with respect to the algebra's Cartan basis.
    pub fn new(algebra: Arc<LieAlgebra>) -> Result<Self> {
        let d = algebra.dim();
        let cartan_vecs = algebra.cartan_basis().to_vec();
        let r = cartan_vecs.len();
        let cartan = from_columns(d, &cartan_vecs);
        if rank(&cartan) != r {
            return Err(Error::InvalidCartan("Cartan basis is linearly dependent".into()));
        }
        let mut commutator: f64 = 0.0;
        for i in 0..r {
            for j in 0..i {
                let b = algebra.bracket(&AlgebraElement(cartan_vecs[i].clone()), &AlgebraElement(cartan_vecs[j].clone()))?;
                commutator = commutator.max(b.0.amax());
            }
        }
        if commutator > 1e-10 {
            return Err(Error::InvalidCartan(format!("Cartan basis does not commute (residual {commutator:.3e})")));
        }
        let ads = cartan_vecs.iter().map(|h| algebra.ad_matrix(&AlgebraElement(h.clone()))).collect::<Result<Vec<_>>>()?;
        if r > 0 {
            let stacked = Matrix::from_fn(r * d, d, |i, j| ads[i / d][(i % d, j)]);
            let centralizer = null_space(&stacked).ncols();
            if centralizer != r {
                return Err(Error::InvalidCartan(format!("centralizer of t has dimension {centralizer}, expected {r}")));
            }
        }

        // Coordinates y = L^T x make every ad antisymmetric.
        let g = invariant_inner_product(&algebra)?;
        let l = g.clone().cholesky().ok_or_else(|| Error::Decomposition("invariant form is not positive definite".into()))?.l();
        let lt = l.transpose();
        let lt_inv = lt.clone().try_inverse().ok_or_else(|| Error::Decomposition("singular invariant form".into()))?;
        let ads_y: Vec<Matrix> = ads.iter().map(|a| &lt * a * &lt_inv).collect();

        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut roots = None;
        for _ in 0..MAX_RESEEDS {
            let c: Vec<f64> = (0..r).map(|_| rng.sample(StandardNormal)).collect();
            let mut a = Matrix::zeros(d, d);
            for (ck, ak) in c.iter().zip(&ads_y) {
                a += ak * *ck;
            }
            if let Some(found) = Self::root_planes(&a, &ads_y, r)? {
                roots = Some(found);
                break;
            }
        }
        let planes = roots.ok_or_else(|| Error::Tolerance("eigenvalue clusters stayed ambiguous after reseeding".into()))?;
        let mut roots: Vec<Root> = Vec::new();
        for (f, u, v) in planes {
            // w = u - i v has eigenvalue i f; its conjugate gives -f.
            let (re, im) = (&lt_inv * u, &lt_inv * v);
            roots.push(Root { functional: f.clone(), vector_re: re.clone(), vector_im: -im.clone() });
            roots.push(Root { functional: -f, vector_re: re, vector_im: im });
        }
        roots.sort_by(|a, b| {
            a.functional.iter().zip(b.functional.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        });

        let root_matrix = Matrix::from_fn(roots.len(), r, |i, j| roots[i].functional[j]);
        let center = if roots.is_empty() { Matrix::identity(r, r) } else { null_space(&root_matrix) };
        let killing = algebra.killing_matrix();
        // Euclidean form in center coordinates, extended by zero on
        // t' = t ∩ [g, g] (the g-orthogonal complement of z in t).
        let g_t = cartan.transpose() * &g * &cartan;
        let to_center = if center.ncols() == 0 {
            Matrix::zeros(0, r)
        } else {
            let m = center.transpose() * &g_t * &center;
            m.try_inverse().ok_or_else(|| Error::Decomposition("singular center Gram matrix".into()))? * center.transpose() * &g_t
        };
        let form = -(cartan.transpose() * killing * &cartan) + to_center.transpose() * &to_center;
        let form_inv = form.clone().try_inverse().ok_or_else(|| Error::Decomposition("pairing on t is degenerate".into()))?;

        let mut sys = RootSystem { algebra, cartan, center, roots, simple: Vec::new(), expansion: Matrix::zeros(0, 0), form, form_inv };
        sys.choose_simple_roots()?;
        Ok(sys)
    }

    /// Root planes of the generic element `a`, or `None` when clusters are
    /// ambiguous.
    fn root_planes(a: &Matrix, ads: &[Matrix], r: usize) -> Result<Option<Vec<(Vector, Vector, Vector)>>> {
        let d = a.nrows();
        let eig = SymmetricEigen::new(a.transpose() * a);
        let scale = eig.eigenvalues.amax().max(1.0);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for &i in &order {
            match clusters.last_mut() {
                Some(c) if (eig.eigenvalues[i] - eig.eigenvalues[c[0]]).abs() <= CLUSTER_TOL * scale => c.push(i),
                _ => clusters.push(vec![i]),
            }
        }
        let mut out = Vec::new();
        for (k, c) in clusters.iter().enumerate() {
            let zero = eig.eigenvalues[c[0]].abs() <= CLUSTER_TOL * scale;
            if zero {
                if k != 0 || c.len() != r {
                    return Ok(None);
                }
                continue;
            }
            if c.len() != 2 {
                return Ok(None);
            }
            let u = eig.eigenvectors.column(c[0]).into_owned();
            let au = a * &u;
            let v = au.normalize();
            let f = Vector::from_fn(ads.len(), |j, _| v.dot(&(&ads[j] * &u)));
            out.push((f, u, v));
        }
        if clusters.first().is_none_or(|c| eig.eigenvalues[c[0]].abs() > CLUSTER_TOL * scale) && r > 0 {
            return Ok(None);
        }
        Ok(Some(out))
    }

    fn choose_simple_roots(&mut self) -> Result<()> {
        let r = self.rank();
        let n = self.roots.len();
        if n == 0 {
            self.expansion = Matrix::zeros(0, 0);
            return Ok(());
        }
        let scale = self.roots.iter().map(|a| a.functional.amax()).fold(0.0, f64::max);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..MAX_RESEEDS {
            let h = Vector::from_fn(r, |_, _| rng.sample::<f64, _>(StandardNormal));
            let vals: Vec<f64> = self.roots.iter().map(|a| a.functional.dot(&h)).collect();
            if vals.iter().any(|v| v.abs() <= 1e-8 * scale * h.norm()) {
                continue;
            }
            let positive: Vec<usize> = (0..n).filter(|&i| vals[i] > 0.0).collect();
            let simple: Vec<usize> = positive
                .iter()
                .copied()
                .filter(|&i| {
                    !positive.iter().any(|&j| {
                        positive.iter().any(|&k| j <= k && (&self.roots[j].functional + &self.roots[k].functional - &self.roots[i].functional).amax() <= 1e-8 * scale)
                    })
                })
                .collect();
            let basis = Matrix::from_fn(r, simple.len(), |a, b| self.roots[simple[b]].functional[a]);
            let mut expansion = Matrix::zeros(n, simple.len());
            for (i, root) in self.roots.iter().enumerate() {
                let (c, res) = lstsq(&basis, &root.functional);
                let nonneg = c.iter().all(|&x| x >= -1e-8);
                let nonpos = c.iter().all(|&x| x <= 1e-8);
                if res > 1e-8 * scale || !(nonneg || nonpos) {
                    return Err(Error::Decomposition(format!("root {i} does not expand over the simple roots with uniform sign")));
                }
                expansion.set_row(i, &c.transpose());
            }
            self.simple = simple;
            self.expansion = expansion;
            return Ok(());
        }
        Err(Error::DegenerateFunctional(MAX_RESEEDS))
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }
    /// `dim t`.
    pub fn rank(&self) -> usize {
        self.cartan.ncols()
    }
    pub fn cartan(&self) -> &Matrix {
        &self.cartan
    }
    /// Orthonormal basis of `z` in Cartan coordinates.
    pub fn center(&self) -> &Matrix {
        &self.center
    }
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }
    /// Indices into [`Self::roots`] of the simple roots.
    pub fn simple_indices(&self) -> &[usize] {
        &self.simple
    }
    pub fn simple_roots(&self) -> Vec<&Root> {
        self.simple.iter().map(|&i| &self.roots[i]).collect()
    }
    pub fn positive_roots(&self) -> Vec<usize> {
        (0..self.roots.len()).filter(|&i| self.expansion.row(i).iter().all(|&c| c >= -1e-8)).collect()
    }
    /// Simple-root coefficients of root `i`.
    pub fn expansion(&self, i: usize) -> Vector {
        self.expansion.row(i).transpose()
    }
    /// Positive definite form on `t` used for pairings.
    pub fn form(&self) -> &Matrix {
        &self.form
    }

    /// `<lambda, theta>` for covectors on `t`.
    pub fn pairing(&self, lambda: &Vector, theta: &Vector) -> f64 {
        lambda.dot(&(&self.form_inv * theta))
    }

    /// `dim t + |Delta| = dim g`.
    pub fn completeness_residual(&self) -> usize {
        (self.rank() + self.roots.len()).abs_diff(self.algebra.dim())
    }

    /// `max |[h, w] - i alpha(h) w|` over Cartan basis elements and roots.
    pub fn eigen_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for root in &self.roots {
            for k in 0..self.rank() {
                let h = AlgebraElement(self.cartan.column(k).into_owned());
                let ad = self.algebra.ad_matrix(&h).unwrap();
                let a = root.functional[k];
                // ad h (re + i im) = i a (re + i im) = -a im + i a re.
                worst = worst.max((&ad * &root.vector_re + &root.vector_im * a).amax());
                worst = worst.max((&ad * &root.vector_im - &root.vector_re * a).amax());
            }
        }
        worst
    }

    /// `max |B(h, w)|` for `h` in `t` and root vectors `w`.
    pub fn orthogonality_residual(&self) -> f64 {
        let b = self.cartan.transpose() * self.algebra.killing_matrix();
        self.roots.iter().map(|a| (&b * &a.vector_re).amax().max((&b * &a.vector_im).amax())).fold(0.0, f64::max)
    }

    /// `max |alpha(z)|` over roots and center elements.
    pub fn center_residual(&self) -> f64 {
        self.roots.iter().map(|a| (self.center.transpose() * &a.functional).amax()).fold(0.0, f64::max)
    }

    /// Chamber membership and margin `min <lambda, alpha>` over simple roots.
    pub fn chamber_membership(&self, lambda: &Vector) -> (bool, f64) {
        let margin = self.simple.iter().map(|&i| self.pairing(lambda, &self.roots[i].functional)).fold(f64::INFINITY, f64::min);
        (margin >= -CHAMBER_TOL, margin)
    }

    pub fn face_of(&self, lambda: &Vector) -> Result<Face> {
        let (inside, margin) = self.chamber_membership(lambda);
        if !inside {
            return Err(Error::OutsideChamber { margin });
        }
        let zero_set = (0..self.simple.len()).filter(|&k| self.pairing(lambda, &self.roots[self.simple[k]].functional).abs() < FACE_TOL).collect();
        Ok(Face { system: self.algebra.name().to_string(), zero_set })
    }

    /// All `2^|Sigma|` faces, ordered by zero set.
    pub fn faces(&self) -> Vec<Face> {
        let s = self.simple.len();
        let mut faces: Vec<Face> = (0..1usize << s)
            .map(|mask| Face { system: self.algebra.name().to_string(), zero_set: (0..s).filter(|k| mask >> k & 1 == 1).collect() })
            .collect();
        faces.sort_by(|a, b| a.zero_set.len().cmp(&b.zero_set.len()).then(a.zero_set.cmp(&b.zero_set)));
        faces
    }

    pub fn interior_face(&self) -> Face {
        Face { system: self.algebra.name().to_string(), zero_set: Vec::new() }
    }

    fn check_face(&self, face: &Face) -> Result<()> {
        if face.system != self.algebra.name() || face.zero_set.iter().any(|&k| k >= self.simple.len()) {
            return Err(Error::Precondition(format!("face belongs to {}, not {}", face.system, self.algebra.name())));
        }
        Ok(())
    }

    /// Roots whose simple-root expansion is supported on the face's zero set.
    pub fn face_roots(&self, face: &Face) -> Result<Vec<usize>> {
        self.check_face(face)?;
        Ok((0..self.roots.len())
            .filter(|&i| (0..self.simple.len()).all(|k| face.zero_set.contains(&k) || self.expansion[(i, k)].abs() <= 1e-8))
            .collect())
    }

    /// A point of the face: prescribed pairings with the simple roots
    /// (zero on the zero set) plus a center component.
    pub fn sample_face_point<R: Rng + ?Sized>(&self, face: &Face, rng: &mut R) -> Result<Vector> {
        self.check_face(face)?;
        let r = self.rank();
        let s = self.simple.len();
        let targets = Vector::from_fn(s, |k, _| if face.zero_set.contains(&k) { 0.0 } else { 0.5 + rng.random::<f64>() });
        // With lambda = form * nu, <lambda, alpha> = nu . alpha.
        let nu = if s == 0 {
            Vector::zeros(r)
        } else {
            let a = Matrix::from_fn(s, r, |k, j| self.roots[self.simple[k]].functional[j]);
            crate::linalg::pinv(&a) * targets
        };
        let z = &self.center * Vector::from_fn(self.center.ncols(), |_, _| rng.sample::<f64, _>(StandardNormal));
        Ok(&self.form * (nu + z))
    }

    /// Extend a covector on `t` to `g*` by zero on the root spaces.
    pub fn extend_to_dual(&self, lambda: &Vector) -> Result<DualElement> {
        let g = invariant_inner_product(&self.algebra)?;
        let gram = self.cartan.transpose() * &g * &self.cartan;
        let y = gram.try_inverse().ok_or_else(|| Error::Decomposition("singular Cartan Gram matrix".into()))? * lambda;
        Ok(DualElement(g * &self.cartan * y))
    }

    /// Restriction of a dual element to `t`.
    pub fn restrict_to_cartan(&self, alpha: &DualElement) -> Vector {
        self.cartan.transpose() * &alpha.0
    }

    /// Isotropy algebra of the face, cross-validated against the numerical
    /// null space of `xi -> xi_{g*}(lambda)` at five sampled `lambda`.
    pub fn isotropy_algebra_of_face(&self, face: &Face) -> Result<Isotropy> {
        let idx = self.face_roots(face)?;
        let mut cols: Vec<Vector> = (0..self.rank()).map(|k| self.cartan.column(k).into_owned()).collect();
        for &i in &idx {
            cols.push(self.roots[i].vector_re.clone());
            cols.push(self.roots[i].vector_im.clone());
        }
        let basis = column_space(&from_columns(self.algebra.dim(), &cols));
        let dim = self.rank() + idx.len();
        if basis.ncols() != dim {
            return Err(Error::Decomposition(format!("isotropy basis has rank {}, expected {dim}", basis.ncols())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut numerical = Vec::new();
        for _ in 0..5 {
            let lambda = self.sample_face_point(face, &mut rng)?;
            let alpha = self.extend_to_dual(&lambda)?;
            let n = null_space(&self.algebra.coadjoint_generator_matrix(&alpha)?).ncols();
            if n != dim {
                return Err(Error::Decomposition(format!("isotropy dimension {dim} from roots, {n} numerically")));
            }
            numerical.push(n);
        }
        Ok(Isotropy { dim, basis, root_indices: idx, numerical_dims: numerical })
    }

    /// Faces `tau` with `sigma <= tau` contain `lambda`.
    pub fn in_natural_slice(&self, sigma: &Face, lambda: &Vector) -> Result<bool> {
        self.check_face(sigma)?;
        match self.face_of(lambda) {
            Ok(tau) => face_leq(sigma, &tau),
            Err(Error::OutsideChamber { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Partition of the points by the face of `mu(p)` restricted to `t`.
    pub fn classify_moment_samples(&self, mm: &MomentMap, points: &[Vector]) -> Result<Classification> {
        let mut buckets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        let mut outside = Vec::new();
        for (i, p) in points.iter().enumerate() {
            let lambda = self.restrict_to_cartan(&mm.value(p));
            match self.face_of(&lambda) {
                Ok(f) => buckets.entry(f.zero_set).or_default().push(i),
                Err(Error::OutsideChamber { .. }) => outside.push(i),
                Err(e) => return Err(e),
            }
        }
        if !outside.is_empty() {
            return Err(Error::Classification(outside));
        }
        let faces = buckets
            .into_iter()
            .map(|(zero_set, members)| {
                let face = Face { system: self.algebra.name().to_string(), zero_set };
                let iso = self.isotropy_algebra_of_face(&face)?;
                let comm = commutator_subalgebra(&self.algebra, &iso.basis)?;
                Ok(FaceBucket { face, points: members, commutator_dim: comm.ncols() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Classification { faces })
    }

    pub fn to_json(&self) -> Result<Value> {
        let vec = |v: &Vector| v.iter().copied().collect::<Vec<f64>>();
        let faces = self
            .faces()
            .iter()
            .map(|f| {
                let iso = self.isotropy_algebra_of_face(f)?;
                let comm = commutator_subalgebra(&self.algebra, &iso.basis)?;
                Ok(json!({"zero_set": f.zero_set, "isotropy_dim": iso.dim, "commutator_dim": comm.ncols()}))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(json!({
            "algebra": self.algebra.name(),
            "rank": self.rank(),
            "center_dim": self.center.ncols(),
            "roots": self.roots.iter().map(|a| vec(&a.functional)).collect::<Vec<_>>(),
            "positive_roots": self.positive_roots(),
            "simple_roots": self.simple,
            "faces": faces,
        }))
    }
}

/// Face `sigma` of the fundamental chamber, given by the indices (into the
/// simple roots) that vanish on it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub system: String,
    pub zero_set: Vec<usize>,
}

/// `sigma <= tau` iff `sigma` lies in the closure of `tau`.
pub fn face_leq(sigma: &Face, tau: &Face) -> Result<bool> {
    if sigma.system != tau.system {
        return Err(Error::Precondition(format!("faces of {} and {} are not comparable", sigma.system, tau.system)));
    }
    Ok(tau.zero_set.iter().all(|k| sigma.zero_set.contains(k)))
}

#[derive(Clone, Debug)]
pub struct Isotropy {
    pub dim: usize,
    /// Orthonormal basis (columns, algebra coordinates).
    pub basis: Matrix,
    pub root_indices: Vec<usize>,
    pub numerical_dims: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct FaceBucket {
    pub face: Face,
    pub points: Vec<usize>,
    pub commutator_dim: usize,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub faces: Vec<FaceBucket>,
}

/// Basis of `[h, h]` for a subalgebra `h` spanned by the columns of `basis`.
pub fn commutator_subalgebra(algebra: &LieAlgebra, basis: &Matrix) -> Result<Matrix> {
    let d = algebra.dim();
    let span = column_space(basis);
    let project_out = |v: &Vector| v - &span * (span.transpose() * v);
    let cols: Vec<Vector> = (0..span.ncols()).map(|i| span.column(i).into_owned()).collect();
    let mut brackets = Vec::new();
    let mut residual: f64 = 0.0;
    for i in 0..cols.len() {
        for j in 0..i {
            let b = algebra.bracket(&AlgebraElement(cols[i].clone()), &AlgebraElement(cols[j].clone()))?.0;
            residual = residual.max(project_out(&b).amax());
            brackets.push(b);
        }
    }
    if residual > 1e-10 {
        return Err(Error::NotSubalgebra { residual });
    }
    let mut current = if brackets.is_empty() { Matrix::zeros(d, 0) } else { column_space(&from_columns(d, &brackets)) };
    loop {
        let mut more = Vec::new();
        for i in 0..current.ncols() {
            for j in 0..i {
                more.push(algebra.bracket(&AlgebraElement(current.column(i).into_owned()), &AlgebraElement(current.column(j).into_owned()))?.0);
            }
        }
        if more.is_empty() {
            return Ok(current);
        }
        let next = column_space(&hstack(&[&current, &from_columns(d, &more)]));
        if next.ncols() == current.ncols() {
            return Ok(current);
        }
        current = next;
    }
}
