//! Poisson submanifolds, Poisson transversals, the induced bivector and the
//! cross-section checks. Every test is a rank statement in the intrinsic
//! frame of the ambient space.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::action::MomentMap;
use crate::error::{Error, Result};
use crate::lie::DualElement;
use crate::linalg::{annihilator, column_space, column_space_with_scale, hstack, intersection_dim, null_space, null_space_with_scale, pinv, rank, rank_with_scale, sum_dim, Matrix, Vector};
use crate::phase_space::{self, PhaseSpace, ScalarField};

/// Tolerance for a sample to count as lying on `N`.
pub const ON_N_TOL: f64 = 1e-9;
/// Tolerance for `Pi(TN°) = 0`.
pub const TANGENCY_TOL: f64 = 1e-8;
/// Radius of the ball sampled around a base point.
pub const SAMPLE_RADIUS: f64 = 0.05;
/// Number of points sampled around a base point.
pub const SAMPLE_COUNT: usize = 20;
const NEWTON_MAX_ITER: usize = 50;

/// Submanifold `N` cut out of a phase space by constraint functions.
#[derive(Clone)]
pub struct Submanifold {
    space: PhaseSpace,
    constraints: Vec<ScalarField>,
}

impl std::fmt::Debug for Submanifold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Submanifold").field("space", &self.space.name()).field("codim", &self.codim()).finish()
    }
}

impl Submanifold {
    pub fn new(space: PhaseSpace, constraints: Vec<ScalarField>) -> Self {
        Submanifold { space, constraints }
    }

    /// `N = M`.
    pub fn whole(space: PhaseSpace) -> Self {
        Self::new(space, Vec::new())
    }

    /// Level set `{x_i = k_i}` of ambient coordinates.
    pub fn coordinate_level(space: PhaseSpace, fixed: &[(usize, f64)]) -> Self {
        let n = space.ambient_dim();
        let constraints = fixed
            .iter()
            .map(|&(i, k)| {
                let mut a = Vector::zeros(n);
                a[i] = 1.0;
                ScalarField::linear(a).sum(&ScalarField::constant(-k))
            })
            .collect();
        Self::new(space, constraints)
    }

    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }
    pub fn constraints(&self) -> &[ScalarField] {
        &self.constraints
    }
    pub fn codim(&self) -> usize {
        self.constraints.len()
    }
    pub fn dim(&self) -> usize {
        self.space.dim() - self.codim()
    }

    /// Largest constraint value at `p`, including the ambient constraints.
    pub fn residual(&self, p: &Vector) -> f64 {
        self.constraints.iter().map(|c| c.eval(p).abs()).fold(self.space.constraint_residual(p), f64::max)
    }

    pub fn check_point(&self, p: &Vector) -> Result<()> {
        let r = self.residual(p);
        if r > ON_N_TOL {
            return Err(Error::ConstraintViolation { residual: r });
        }
        Ok(())
    }

    /// Intrinsic differentials of the constraints, one per row.
    pub fn constraint_jacobian(&self, p: &Vector) -> Matrix {
        let d = self.space.dim();
        let mut j = Matrix::zeros(self.codim(), d);
        for (i, c) in self.constraints.iter().enumerate() {
            j.set_row(i, &phase_space::differential(&self.space, c, p).transpose());
        }
        j
    }

    /// Orthonormal bases of `T_pN` (vectors) and `T_pN°` (covectors).
    pub fn tangent_and_annihilator(&self, p: &Vector) -> Result<(Matrix, Matrix)> {
        self.check_point(p)?;
        let d = self.space.dim();
        if self.codim() == 0 {
            return Ok((Matrix::identity(d, d), Matrix::zeros(d, 0)));
        }
        let j = self.constraint_jacobian(p);
        let r = rank(&j);
        if r != self.codim() {
            return Err(Error::InvalidSubmanifold(format!("constraint jacobian has rank {r}, expected {}", self.codim())));
        }
        Ok((null_space(&j), column_space(&j.transpose())))
    }

    /// Damped Newton projection onto `N` with minimum-norm intrinsic steps.
    pub fn project(&self, p: &Vector) -> Result<Vector> {
        let mut x = self.space.project(p)?;
        let values = |x: &Vector| Vector::from_iterator(self.codim(), self.constraints.iter().map(|c| c.eval(x)));
        let mut r = values(&x);
        for _ in 0..NEWTON_MAX_ITER {
            if r.amax() <= 1e-13 || self.codim() == 0 {
                return Ok(x);
            }
            let step = -pinv(&self.constraint_jacobian(&x)) * &r;
            let mut t = 1.0;
            loop {
                let y = self.space.retract(&x, &step, t);
                let ry = values(&y);
                if ry.norm() < r.norm() || t < 1e-4 {
                    x = y;
                    r = ry;
                    break;
                }
                t *= 0.5;
            }
        }
        if r.amax() <= ON_N_TOL {
            Ok(x)
        } else {
            Err(Error::Chart(format!("projection onto N stalled at residual {:.3e}", r.amax())))
        }
    }

    /// Up to `count` points of `N` within `radius` of `p`, reproducible from `seed`.
    pub fn sample_near(&self, p: &Vector, count: usize, radius: f64, seed: u64) -> Result<Vec<Vector>> {
        let (tn, _) = self.tangent_and_annihilator(p)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            if attempts > 20 * count {
                return Err(Error::Chart("could not sample points of N near the base point".into()));
            }
            if tn.ncols() == 0 {
                out.push(p.clone());
                continue;
            }
            let dir = Vector::from_fn(tn.ncols(), |_, _| rng.sample::<f64, _>(StandardNormal));
            let len = radius * rng.random::<f64>();
            let c = &tn * (dir.normalize() * len);
            let q = self.project(&self.space.retract(p, &c, 1.0))?;
            if (&q - p).norm() <= radius {
                out.push(q);
            }
        }
        Ok(out)
    }
}

/// The four characterizations of a Poisson transversal, in order:
/// `TM = TN + Pi(TN°)`, `TM = TN ⊕ Pi(TN°)`, `TN° ∩ Pi^{-1}(TN) = 0`,
/// `T*M = TN° ⊕ Pi^{-1}(TN)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Characterizations(pub [bool; 4]);

impl Characterizations {
    pub fn agree(&self) -> bool {
        self.0.iter().all(|&b| b == self.0[0])
    }
}

/// `Pi^{-1}(TN)` as covector columns: `lambda` with `Q^T lambda ∈ TN`.
fn preimage_of_tangent(q: &Matrix, ann: &Matrix) -> Matrix {
    let d = q.nrows();
    if ann.ncols() == 0 {
        return Matrix::identity(d, d);
    }
    null_space_with_scale(&(ann.transpose() * q.transpose()), q.norm())
}

/// Evaluate all four characterizations for bivector `q` and subspace `tn`.
pub fn characterize(q: &Matrix, tn: &Matrix) -> Characterizations {
    let d = q.nrows();
    let ann = annihilator(tn);
    let image = column_space_with_scale(&(q.transpose() * &ann), q.norm());
    let pre = preimage_of_tangent(q, &ann);
    let tn_dim = rank(tn);
    let image_dim = image.ncols();
    let sum = sum_dim(tn, &image);
    let c1 = sum == d;
    let c2 = c1 && tn_dim + image_dim == d && intersection_dim(tn, &image) == 0;
    let c3 = intersection_dim(&ann, &pre) == 0;
    let c4 = sum_dim(&ann, &pre) == d && rank(&ann) + rank(&pre) == d;
    Characterizations([c1, c2, c3, c4])
}

/// Direct symplectic-subspace test `W ∩ W^omega = 0`.
pub fn is_symplectic_subspace(omega: &Matrix, w: &Matrix) -> bool {
    let k = rank(w);
    k == 0 || rank_with_scale(&(w.transpose() * omega * w), omega.norm() * w.norm_squared()) == k
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransversalRanks {
    pub tangent: usize,
    pub image: usize,
    pub sum: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransversalReport {
    pub point: Vector,
    pub is_submanifold_ok: bool,
    pub is_poisson_sub: bool,
    pub is_transversal: bool,
    pub characterizations: Option<Characterizations>,
    pub ranks: Option<TransversalRanks>,
    pub induced_bivector: Option<Matrix>,
}

fn matrix_json(m: &Matrix) -> Value {
    json!((0..m.nrows()).map(|i| m.row(i).iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>())
}

impl TransversalReport {
    pub fn to_json(&self) -> Value {
        json!({
            "point": self.point.as_slice(),
            "is_submanifold_ok": self.is_submanifold_ok,
            "is_poisson_sub": self.is_poisson_sub,
            "is_transversal": self.is_transversal,
            "characterizations": self.characterizations.map(|c| c.0.to_vec()),
            "ranks": self.ranks.map(|r| json!({"tangent": r.tangent, "image": r.image, "sum": r.sum})),
            "induced_bivector": self.induced_bivector.as_ref().map(matrix_json),
        })
    }
}

/// `Pi_p ∈ Λ² T_pN`, equivalently `Pi(TN°) = 0`.
pub fn is_poisson_submanifold_at(n: &Submanifold, p: &Vector) -> Result<bool> {
    let (_, ann) = n.tangent_and_annihilator(p)?;
    if ann.ncols() == 0 {
        return Ok(true);
    }
    let q = n.space().intrinsic_bivector(p);
    Ok((q.transpose() * &ann).amax() <= TANGENCY_TOL * q.amax().max(1.0))
}

pub fn is_poisson_submanifold(n: &Submanifold, samples: &[Vector]) -> Result<Vec<bool>> {
    samples.iter().map(|p| is_poisson_submanifold_at(n, p)).collect()
}

/// Transversality report at `p`; fails with [`Error::Internal`] if the four
/// characterizations disagree.
pub fn transversal_report(n: &Submanifold, p: &Vector) -> Result<TransversalReport> {
    n.check_point(p)?;
    let (tn, ann) = match n.tangent_and_annihilator(p) {
        Ok(v) => v,
        Err(Error::InvalidSubmanifold(_)) => {
            return Ok(TransversalReport {
                point: p.clone(),
                is_submanifold_ok: false,
                is_poisson_sub: false,
                is_transversal: false,
                characterizations: None,
                ranks: None,
                induced_bivector: None,
            })
        }
        Err(e) => return Err(e),
    };
    let q = n.space().intrinsic_bivector(p);
    let chars = characterize(&q, &tn);
    if !chars.agree() {
        return Err(Error::Internal(format!("transversal characterizations disagree: {:?}", chars.0)));
    }
    let image = column_space_with_scale(&(q.transpose() * &ann), q.norm());
    let ranks = TransversalRanks { tangent: tn.ncols(), image: image.ncols(), sum: sum_dim(&tn, &image) };
    let is_transversal = chars.0[0];
    let induced = if is_transversal { Some(induced_bivector_in_basis(&q, &tn)?) } else { None };
    Ok(TransversalReport {
        point: p.clone(),
        is_submanifold_ok: true,
        is_poisson_sub: is_poisson_submanifold_at(n, p)?,
        is_transversal,
        characterizations: Some(chars),
        ranks: Some(ranks),
        induced_bivector: induced,
    })
}

pub fn is_poisson_transversal(n: &Submanifold, samples: &[Vector]) -> Result<Vec<TransversalReport>> {
    samples.iter().map(|p| transversal_report(n, p)).collect()
}

/// Covectors in `Pi^{-1}(TN)` dual to the columns of `basis` (a basis of
/// `TN`), one per column.
fn dual_lift(q: &Matrix, basis: &Matrix) -> Result<Matrix> {
    let pre = preimage_of_tangent(q, &annihilator(basis));
    if pre.ncols() != basis.ncols() {
        return Err(Error::Precondition(format!(
            "not a Poisson transversal: dim Pi^-1(TN) = {}, dim TN = {}",
            pre.ncols(),
            basis.ncols()
        )));
    }
    let pairing = basis.transpose() * &pre;
    let inv = pairing
        .clone()
        .try_inverse()
        .filter(|_| rank(&pairing) == basis.ncols())
        .ok_or_else(|| Error::Precondition("TN° and Pi^-1(TN) are not complementary".into()))?;
    Ok(pre * inv.transpose())
}

/// Induced bivector `Pi_N` in coordinates of the given basis of `TN`.
pub fn induced_bivector_in_basis(q: &Matrix, basis: &Matrix) -> Result<Matrix> {
    let lam = dual_lift(q, basis)?;
    Ok(lam.transpose() * q * lam)
}

/// Induced bivector together with the orthonormal basis of `T_pN` it is
/// expressed in.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedBivector {
    pub tangent: Matrix,
    pub matrix: Matrix,
}

pub fn induced_bivector(n: &Submanifold, p: &Vector) -> Result<InducedBivector> {
    let (tn, _) = n.tangent_and_annihilator(p)?;
    let q = n.space().intrinsic_bivector(p);
    if !characterize(&q, &tn).0[0] {
        return Err(Error::Precondition("point is not on a Poisson transversal".into()));
    }
    Ok(InducedBivector { matrix: induced_bivector_in_basis(&q, &tn)?, tangent: tn })
}

/// `max |Pi(lambda, alpha) - Pi_N(lambda_1, alpha_1) - V(lambda_2, alpha_2)|`
/// over the covector pairs, splitting along `Pi^{-1}(TN) ⊕ TN°`.
pub fn splitting_residual(n: &Submanifold, p: &Vector, pairs: &[(Vector, Vector)]) -> Result<f64> {
    let InducedBivector { tangent, matrix } = induced_bivector(n, p)?;
    let (_, ann) = n.tangent_and_annihilator(p)?;
    let q = n.space().intrinsic_bivector(p);
    let lift = dual_lift(&q, &tangent)?;
    let split = hstack(&[&lift, &ann]);
    let inv = split.clone().try_inverse().ok_or_else(|| Error::Internal("splitting is singular".into()))?;
    let k = lift.ncols();
    let mut worst: f64 = 0.0;
    for (l, a) in pairs {
        let (cl, ca) = (&inv * l, &inv * a);
        let (l1, a1) = (cl.rows(0, k), ca.rows(0, k));
        let (l2, a2) = (&ann * cl.rows(k, ann.ncols()), &ann * ca.rows(k, ann.ncols()));
        let pi_n = l1.dot(&(&matrix * a1));
        let v = l2.dot(&(&q * a2));
        worst = worst.max((l.dot(&(&q * a)) - pi_n - v).abs());
    }
    Ok(worst)
}

/// Graph-like chart of `N` around `p`: `y -> project(retract(p, TN_p y))`.
struct Chart<'a> {
    n: &'a Submanifold,
    base: Vector,
    tn: Matrix,
}

impl Chart<'_> {
    fn point(&self, y: &Vector) -> Result<Vector> {
        self.n.project(&self.n.space().retract(&self.base, &(&self.tn * y), 1.0))
    }

    /// Induced bivector in chart coordinates at `y`.
    fn bivector(&self, y: &Vector) -> Result<Matrix> {
        let h = phase_space::FD_STEP;
        let x = self.point(y)?;
        let k = y.len();
        let space = self.n.space();
        let mut frame = Matrix::zeros(space.dim(), k);
        for i in 0..k {
            let mut e = Vector::zeros(k);
            e[i] = h;
            let dv = (self.point(&(y + &e))? - self.point(&(y - &e))?) / (2.0 * h);
            frame.set_column(i, &space.intrinsic_coords(&x, &dv)?.0);
        }
        induced_bivector_in_basis(&space.intrinsic_bivector(&x), &frame)
    }

    fn bracket(&self, f: &ScalarField, g: &ScalarField, y: &Vector) -> Result<f64> {
        let euclid = PhaseSpace::constant_poisson(Matrix::zeros(y.len(), y.len()))?;
        let df = phase_space::differential(&euclid, f, y);
        let dg = phase_space::differential(&euclid, g, y);
        Ok(df.dot(&(self.bivector(y)? * dg)))
    }
}

/// Cyclic Jacobi sum of the induced bracket at `p` for `f, g, h` given in
/// chart coordinates on `T_pN` (orthonormal basis from
/// [`Submanifold::tangent_and_annihilator`]).
pub fn check_induced_jacobi(n: &Submanifold, p: &Vector, f: &ScalarField, g: &ScalarField, h: &ScalarField) -> Result<f64> {
    let (tn, _) = n.tangent_and_annihilator(p)?;
    let chart = Arc::new(Chart { n, base: p.clone(), tn });
    let k = chart.tn.ncols();
    let y0 = Vector::zeros(k);
    let outer = phase_space::NESTED_FD_STEP;
    // d/dy of {a, b} by central differences.
    let nested = |a: &ScalarField, b: &ScalarField, c: &ScalarField| -> Result<f64> {
        let mut grad = Vector::zeros(k);
        for i in 0..k {
            let mut e = Vector::zeros(k);
            e[i] = outer;
            grad[i] = (chart.bracket(b, c, &(&y0 + &e))? - chart.bracket(b, c, &(&y0 - &e))?) / (2.0 * outer);
        }
        let euclid = PhaseSpace::constant_poisson(Matrix::zeros(k, k))?;
        let da = phase_space::differential(&euclid, a, &y0);
        Ok(da.dot(&(chart.bivector(&y0)? * grad)))
    };
    let s = nested(f, g, h)? + nested(g, h, f)? + nested(h, f, g)?;
    Ok(s.abs())
}

/// Slice `Z ⊆ g*` through `lambda` for the cross-section theorems.
#[derive(Clone, Debug)]
pub struct CrossSectionReport {
    pub points: Vec<Vector>,
    pub verdicts: Vec<bool>,
    pub pass: bool,
}

/// `mu^{-1}(Z)` as a constraint submanifold of the space of `mm`.
pub fn preimage_submanifold(mm: &MomentMap, z: &Submanifold) -> Submanifold {
    let constraints = z
        .constraints()
        .iter()
        .map(|c| {
            let (c, mm) = (c.clone(), mm.clone());
            ScalarField::new(move |x| c.eval(&mm.value(x).0))
        })
        .collect();
    Submanifold::new(mm.space().clone(), constraints)
}

/// Checks `mu(p) = lambda` and `T_lambda Z ⊕ T_lambda(G . lambda) = g*`.
fn check_cross_section_setup(mm: &MomentMap, z: &Submanifold, lambda: &DualElement, p: &Vector) -> Result<()> {
    let off = (mm.value(p).0 - &lambda.0).amax();
    if off > ON_N_TOL {
        return Err(Error::Setup(format!("mu(p) differs from lambda by {off:.3e}")));
    }
    let (tz, _) = z.tangent_and_annihilator(&lambda.0).map_err(|e| Error::Setup(format!("Z at lambda: {e}")))?;
    let orbit = column_space(&mm.algebra().coadjoint_generator_matrix(lambda)?);
    let g = mm.algebra().dim();
    if !(tz.ncols() + orbit.ncols() == g && sum_dim(&tz, &orbit) == g) {
        return Err(Error::Setup(format!(
            "Z is not perfectly transverse to the orbit: dim TZ = {}, dim orbit = {}, dim sum = {}",
            tz.ncols(),
            orbit.ncols(),
            sum_dim(&tz, &orbit)
        )));
    }
    Ok(())
}

/// `mu^{-1}(Z)` is a symplectic submanifold near `p`: `W_q = mu_*^{-1}(T Z)`
/// is a symplectic subspace at `p` and at sampled nearby points.
pub fn check_symplectic_cross_section(mm: &MomentMap, z: &Submanifold, lambda: &DualElement, p: &Vector) -> Result<CrossSectionReport> {
    check_cross_section_setup(mm, z, lambda, p)?;
    let space = mm.space();
    if !space.is_symplectic() {
        return Err(Error::Unsupported(format!("{} is not symplectic", space.name())));
    }
    let n = preimage_submanifold(mm, z);
    let mut points = vec![p.clone()];
    points.extend(n.sample_near(p, SAMPLE_COUNT, SAMPLE_RADIUS, 42)?);
    let verdicts = points
        .iter()
        .map(|q| {
            let (_, z_ann) = z.tangent_and_annihilator(&mm.value(q).0)?;
            let jac = mm.jacobian(q);
            let w = if z_ann.ncols() == 0 { Matrix::identity(space.dim(), space.dim()) } else { null_space(&(z_ann.transpose() * jac)) };
            let omega = space.symplectic_matrix(q).expect("symplectic space");
            Ok(is_symplectic_subspace(&omega, &w))
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = verdicts.iter().all(|&b| b);
    Ok(CrossSectionReport { points, verdicts, pass })
}

/// `mu^{-1}(Z)` is a Poisson transversal near `p`.
pub fn check_poisson_cross_section(mm: &MomentMap, z: &Submanifold, lambda: &DualElement, p: &Vector) -> Result<CrossSectionReport> {
    check_cross_section_setup(mm, z, lambda, p)?;
    let n = preimage_submanifold(mm, z);
    let mut points = vec![p.clone()];
    points.extend(n.sample_near(p, SAMPLE_COUNT, SAMPLE_RADIUS, 42)?);
    let verdicts = points.iter().map(|q| Ok(transversal_report(&n, q)?.is_transversal)).collect::<Result<Vec<_>>>()?;
    let pass = verdicts.iter().all(|&b| b);
    Ok(CrossSectionReport { points, verdicts, pass })
}

/// `max |d mu^(xi)(Pi(lambda)) + lambda(xi_M(p))|` over basis `xi` and the
/// given intrinsic covectors.
pub fn kernel_lemma_residual(mm: &MomentMap, p: &Vector, covectors: &[Vector]) -> Result<f64> {
    let space = mm.space();
    space.check_point(p)?;
    let jac = mm.jacobian(p);
    let gens = mm.action().intrinsic_generator_matrix(p)?;
    let q = space.intrinsic_bivector(p);
    let mut worst: f64 = 0.0;
    for l in covectors {
        let lhs = &jac * (q.transpose() * l);
        let rhs = -(gens.transpose() * l);
        worst = worst.max((lhs - rhs).amax());
    }
    Ok(worst)
}

/// Random Poisson bivector and subspace in dimension `dim` for the
/// characterization equivalence tests. With `symplectic` the bivector is
/// nondegenerate (`dim` must be even).
pub fn random_subspace_scenario<R: Rng + ?Sized>(rng: &mut R, dim: usize, symplectic: bool) -> (Matrix, Matrix) {
    let half = dim / 2;
    let r = if symplectic { half } else { rng.random_range(0..=half) };
    let mut j = Matrix::zeros(2 * r, 2 * r);
    for i in 0..r {
        j[(i, r + i)] = -1.0;
        j[(r + i, i)] = 1.0;
    }
    let gauss = |rng: &mut R, a: usize, b: usize| Matrix::from_fn(a, b, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut b = gauss(rng, dim, 2 * r);
    while symplectic && rank(&b) < dim {
        b = gauss(rng, dim, 2 * r);
    }
    let q = &b * j * b.transpose();
    // Odd-dimensional subspaces and degenerate bivectors supply the
    // non-transversal cases.
    let k = rng.random_range(1..dim);
    (q, gauss(rng, dim, k))
}
