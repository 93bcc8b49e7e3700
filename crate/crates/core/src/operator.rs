//! Hermitian operators on `C^d` with the normalized trace state.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Default relative clustering gap for eigenvalues.
pub const DEFAULT_TOL_CLUSTER: f64 = 1e-9;

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// `tr(ab) / d` without forming the product.
pub(crate) fn normalized_trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let d = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc / d as f64
}

pub(crate) fn normalized_trace_of(m: &CMatrix) -> C64 {
    m.trace() / m.nrows() as f64
}

/// `ab`, in `O(d^2)` when either factor is diagonal.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    match (is_diagonal_matrix(a), is_diagonal_matrix(b)) {
        (true, true) => CMatrix::from_diagonal(&a.diagonal().component_mul(&b.diagonal())),
        (true, false) => {
            let mut out = b.clone();
            for (i, mut row) in out.row_iter_mut().enumerate() {
                row *= a[(i, i)];
            }
            out
        }
        (false, true) => {
            let mut out = a.clone();
            for (j, mut col) in out.column_iter_mut().enumerate() {
                col *= b[(j, j)];
            }
            out
        }
        (false, false) => a * b,
    }
}

pub(crate) fn is_diagonal_matrix(m: &CMatrix) -> bool {
    m.is_square() && is_offdiagonal_zero(m)
}

fn is_offdiagonal_zero(m: &CMatrix) -> bool {
    let d = m.nrows();
    (0..d).all(|i| (0..d).all(|j| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimMismatch { expected: a, found: b })
    }
}

/// A self-adjoint element of `M_d(C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    /// Validates `entries` and replaces it by its exact Hermitian part.
    pub fn new(entries: CMatrix, tol_herm: f64) -> Result<Self> {
        check_square(&entries)?;
        let deviation = max_abs(&(&entries - entries.adjoint()));
        if !(deviation < tol_herm) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { mat: hermitian_part(&entries) })
    }

    pub fn from_rows(rows: &[Vec<C64>], tol_herm: f64) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::EmptyMatrix);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::NotSquare { rows: d, cols: bad.len() });
        }
        Self::new(CMatrix::from_fn(d, d, |i, j| rows[i][j]), tol_herm)
    }

    /// Real diagonal operator. Panics on an empty slice.
    pub fn diagonal(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "diagonal operator needs at least one entry");
        let d = values.len();
        Self { mat: CMatrix::from_fn(d, d, |i, j| if i == j { C64::new(values[i], 0.0) } else { C64::new(0.0, 0.0) }) }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn zero(dim: usize) -> Self {
        Self::scalar(dim, 0.0)
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        assert!(dim > 0, "operators need dim >= 1");
        Self { mat: CMatrix::identity(dim, dim).map(|z| z * c) }
    }

    /// Wraps a matrix already known to be Hermitian up to rounding.
    pub(crate) fn from_matrix_unchecked(mat: CMatrix) -> Self {
        Self { mat: hermitian_part(&mat) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// `tau(x) = tr(x) / d`.
    pub fn trace(&self) -> f64 {
        normalized_trace_of(&self.mat).re
    }

    /// `tau(xy)`, real for Hermitian `x`, `y`.
    pub fn product_trace(&self, other: &Self) -> f64 {
        normalized_trace_of_product(&self.mat, &other.mat).re
    }

    /// `x - c 1`.
    pub fn shift(&self, c: f64) -> Self {
        let mut mat = self.mat.clone();
        for i in 0..self.dim() {
            mat[(i, i)] -= C64::new(c, 0.0);
        }
        Self { mat }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { mat: self.mat.map(|z| z * c) }
    }

    /// Max entry of `xy - yx`.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        check_same_dim(self.dim(), other.dim())?;
        let xy = matmul(&self.mat, &other.mat);
        let yx = matmul(&other.mat, &self.mat);
        Ok(max_abs(&(xy - yx)))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self { mat: &self.mat + &other.mat })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self { mat: &self.mat - &other.mat })
    }

    /// `true` when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        is_offdiagonal_zero(&self.mat)
    }

    pub fn resolution(&self) -> Result<SpectralResolution> {
        SpectralResolution::new(self, DEFAULT_TOL_CLUSTER)
    }

    /// `x` at slot `position` of `C^{d_1} (x) ... (x) C^{d_n}`.
    pub fn embed(&self, factor_dims: &[usize], position: usize) -> Result<Self> {
        Ok(Self { mat: embed_matrix(&self.mat, factor_dims, position)? })
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;

    fn add(self, rhs: Self) -> HermitianOperator {
        HermitianOperator { mat: &self.mat + &rhs.mat }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;

    fn sub(self, rhs: Self) -> HermitianOperator {
        HermitianOperator { mat: &self.mat - &rhs.mat }
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;

    fn neg(self) -> HermitianOperator {
        HermitianOperator { mat: -&self.mat }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;

    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scale(rhs)
    }
}

fn embed_matrix(m: &CMatrix, factor_dims: &[usize], position: usize) -> Result<CMatrix> {
    if factor_dims.is_empty() || factor_dims.contains(&0) {
        return Err(Error::EmptyMatrix);
    }
    let Some(&slot) = factor_dims.get(position) else {
        return Err(Error::DimMismatch { expected: factor_dims.len(), found: position });
    };
    check_same_dim(slot, m.nrows())?;
    let left: usize = factor_dims[..position].iter().product();
    let right: usize = factor_dims[position + 1..].iter().product();
    let id_left = CMatrix::identity(left, left);
    let id_right = CMatrix::identity(right, right);
    Ok(id_left.kronecker(m).kronecker(&id_right))
}

/// A real interval with independently open or closed endpoints.
///
/// Infinite endpoints are always open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BorelInterval {
    #[serde(with = "crate::serde_ext::ext_real")]
    pub lo: f64,
    #[serde(with = "crate::serde_ext::ext_real")]
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl BorelInterval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::BadInterval("NaN endpoint".into()));
        }
        if lo > hi {
            return Err(Error::BadInterval(format!("lo {lo} > hi {hi}")));
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::BadInterval("interval lies outside the real line".into()));
        }
        Ok(Self {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        })
    }

    pub fn real_line() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY, lo_closed: false, hi_closed: false }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: false }
    }

    /// `(-inf, t]`
    pub fn at_most(t: f64) -> Self {
        Self { lo: f64::NEG_INFINITY, hi: t, lo_closed: false, hi_closed: true }
    }

    /// `(-inf, t)`
    pub fn below(t: f64) -> Self {
        Self { lo: f64::NEG_INFINITY, hi: t, lo_closed: false, hi_closed: false }
    }

    /// `(t, inf)`
    pub fn above(t: f64) -> Self {
        Self { lo: t, hi: f64::INFINITY, lo_closed: false, hi_closed: false }
    }

    /// `[t, inf)`
    pub fn at_least(t: f64) -> Self {
        Self { lo: t, hi: f64::INFINITY, lo_closed: true, hi_closed: false }
    }

    /// Membership after snapping `v` onto any finite endpoint within `eps`.
    pub fn contains(&self, v: f64, eps: f64) -> bool {
        let above_lo = if self.lo.is_finite() && (v - self.lo).abs() <= eps {
            self.lo_closed
        } else {
            v > self.lo
        };
        let below_hi = if self.hi.is_finite() && (v - self.hi).abs() <= eps {
            self.hi_closed
        } else {
            v < self.hi
        };
        above_lo && below_hi
    }
}

/// A Hermitian idempotent.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    mat: CMatrix,
}

impl Projection {
    pub fn new(mat: CMatrix, tol_proj: f64) -> Result<Self> {
        check_square(&mat)?;
        let deviation = max_abs(&(&mat - mat.adjoint()));
        if !(deviation < tol_proj) {
            return Err(Error::NotHermitian { deviation });
        }
        let p = Self::from_matrix_unchecked(mat);
        let defect = p.idempotency_defect();
        if !(defect < tol_proj) {
            return Err(Error::NotProjection { defect });
        }
        Ok(p)
    }

    pub(crate) fn from_matrix_unchecked(mat: CMatrix) -> Self {
        Self { mat: hermitian_part(&mat) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { mat: CMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: CMatrix::identity(dim, dim) }
    }

    /// Diagonal projection with ones where `mask` is set.
    pub fn coordinate(mask: &[bool]) -> Self {
        let d = mask.len();
        Self {
            mat: CMatrix::from_fn(d, d, |i, j| {
                if i == j && mask[i] {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// Rank-one projection onto the line spanned by `v`. Panics on a zero vector.
    pub fn onto_vector(v: &[C64]) -> Self {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!(norm2 > 0.0, "cannot project onto the zero vector");
        let d = v.len();
        Self { mat: CMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj() / norm2) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// `tau(p)`.
    pub fn trace(&self) -> f64 {
        normalized_trace_of(&self.mat).re
    }

    pub fn rank(&self) -> usize {
        self.mat.trace().re.round().max(0.0) as usize
    }

    /// `p^perp = 1 - p`.
    pub fn complement(&self) -> Self {
        let d = self.dim();
        Self { mat: CMatrix::identity(d, d) - &self.mat }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        max_abs(&self.mat) < tol
    }

    /// Max entry of `p^2 - p`.
    pub fn idempotency_defect(&self) -> f64 {
        max_abs(&(matmul(&self.mat, &self.mat) - &self.mat))
    }

    /// `tau(pq)` for two projections, or `tau(p y)` style mixed traces.
    pub fn product_trace(&self, other: &CMatrix) -> f64 {
        normalized_trace_of_product(&self.mat, other).re
    }

    pub fn embed(&self, factor_dims: &[usize], position: usize) -> Result<Self> {
        Ok(Self { mat: embed_matrix(&self.mat, factor_dims, position)? })
    }

    /// `p (x) q`.
    pub fn kron(&self, other: &Self) -> Self {
        Self { mat: self.mat.kronecker(&other.mat) }
    }
}

/// Spectral measure of a Hermitian operator: distinct (clustered) eigenvalues
/// in ascending order with their eigenprojections.
#[derive(Debug, Clone)]
pub struct SpectralResolution {
    dim: usize,
    eigenvalues: Vec<f64>,
    multiplicities: Vec<usize>,
    projectors: Vec<Projection>,
}

impl SpectralResolution {
    /// Diagonalizes `x` and merges eigenvalues closer than
    /// `tol_cluster * max(1, ||x||)`.
    pub fn new(x: &HermitianOperator, tol_cluster: f64) -> Result<Self> {
        let d = x.dim();
        let (values, vectors) = if x.is_diagonal() {
            let values: Vec<f64> = (0..d).map(|i| x.mat[(i, i)].re).collect();
            (values, None)
        } else {
            let eig = SymmetricEigen::try_new(x.mat.clone(), f64::EPSILON, 1000 * d.max(8))
                .ok_or(Error::EigenFailure { dim: d })?;
            if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
                return Err(Error::EigenFailure { dim: d });
            }
            (eig.eigenvalues.iter().copied().collect(), Some(eig.eigenvectors))
        };

        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let clusters = cluster_sorted(&order, &values, tol_cluster * scale);

        let mut eigenvalues = Vec::with_capacity(clusters.len());
        let mut multiplicities = Vec::with_capacity(clusters.len());
        let mut projectors = Vec::with_capacity(clusters.len());
        for members in clusters {
            eigenvalues.push(cluster_value(members.iter().map(|&i| values[i])));
            multiplicities.push(members.len());
            let mat = match &vectors {
                None => {
                    let mut mat = CMatrix::zeros(d, d);
                    for &i in &members {
                        mat[(i, i)] = C64::new(1.0, 0.0);
                    }
                    mat
                }
                Some(v) => {
                    let block = v.select_columns(members.iter());
                    &block * block.adjoint()
                }
            };
            projectors.push(Projection::from_matrix_unchecked(mat));
        }
        Ok(Self { dim: d, eigenvalues, multiplicities, projectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Distinct eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn projectors(&self) -> &[Projection] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `tau` of the `i`-th eigenprojection.
    pub fn weight(&self, i: usize) -> f64 {
        self.multiplicities[i] as f64 / self.dim as f64
    }

    /// Operator norm `max |lambda|`.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Which eigenvalue clusters fall in `interval`.
    pub fn classify(&self, interval: &BorelInterval, eps_bnd: f64) -> Vec<bool> {
        self.eigenvalues.iter().map(|&v| interval.contains(v, eps_bnd)).collect()
    }

    /// Total multiplicity of the eigenvalues in `interval`.
    pub fn count_in(&self, interval: &BorelInterval, eps_bnd: f64) -> usize {
        self.classify(interval, eps_bnd)
            .iter()
            .zip(&self.multiplicities)
            .filter(|(inside, _)| **inside)
            .map(|(_, m)| m)
            .sum()
    }

    /// `tau(e_B(x))`, computed from multiplicities.
    pub fn trace_in(&self, interval: &BorelInterval, eps_bnd: f64) -> f64 {
        self.count_in(interval, eps_bnd) as f64 / self.dim as f64
    }

    /// `e_B(x)`.
    pub fn projection(&self, interval: &BorelInterval, eps_bnd: f64) -> Projection {
        let mask = self.classify(interval, eps_bnd);
        self.sum_where(|i| mask[i])
    }

    /// `e_B(x)` and `e_{R \ B}(x)` from one classification pass.
    pub fn projection_pair(&self, interval: &BorelInterval, eps_bnd: f64) -> (Projection, Projection) {
        let mask = self.classify(interval, eps_bnd);
        (self.sum_where(|i| mask[i]), self.sum_where(|i| !mask[i]))
    }

    fn sum_where(&self, keep: impl Fn(usize) -> bool) -> Projection {
        let mut mat = CMatrix::zeros(self.dim, self.dim);
        for (i, p) in self.projectors.iter().enumerate() {
            if keep(i) {
                mat += p.matrix();
            }
        }
        Projection::from_matrix_unchecked(mat)
    }

    /// `f(x) = sum f(lambda_i) P_i`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let mut mat = CMatrix::zeros(self.dim, self.dim);
        for (v, p) in self.eigenvalues.iter().zip(&self.projectors) {
            mat += p.matrix().map(|z| z * f(*v));
        }
        HermitianOperator::from_matrix_unchecked(mat)
    }

    /// Resolution of `f(x)` without a second diagonalization. Eigenvalues of
    /// `f(x)` closer than `tol_cluster * max(1, ||f(x)||)` are merged.
    pub fn map(&self, f: impl Fn(f64) -> f64, tol_cluster: f64) -> Self {
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&v| f(v)).collect();
        let mut order: Vec<usize> = (0..mapped.len()).collect();
        order.sort_by(|&a, &b| mapped[a].total_cmp(&mapped[b]));
        let scale = mapped.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let clusters = cluster_sorted(&order, &mapped, tol_cluster * scale);

        let mut eigenvalues = Vec::with_capacity(clusters.len());
        let mut multiplicities = Vec::with_capacity(clusters.len());
        let mut projectors = Vec::with_capacity(clusters.len());
        for members in clusters {
            eigenvalues.push(cluster_value(members.iter().map(|&i| mapped[i])));
            multiplicities.push(members.iter().map(|&i| self.multiplicities[i]).sum());
            let mut mat = CMatrix::zeros(self.dim, self.dim);
            for &i in &members {
                mat += self.projectors[i].matrix();
            }
            projectors.push(Projection::from_matrix_unchecked(mat));
        }
        Self { dim: self.dim, eigenvalues, multiplicities, projectors }
    }

    /// Resolution of `x - c 1`.
    pub fn shifted(&self, c: f64) -> Self {
        self.map(|v| v - c, DEFAULT_TOL_CLUSTER)
    }

    /// Resolution of `|x|`.
    pub fn absolute(&self) -> Self {
        self.map(f64::abs, DEFAULT_TOL_CLUSTER)
    }

    /// Resolution of `-x`.
    pub fn negated(&self) -> Self {
        self.map(|v| -v, DEFAULT_TOL_CLUSTER)
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|v| v).into_matrix()
    }

    /// Max entry of `sum P_i - 1`.
    pub fn completeness_defect(&self) -> f64 {
        let mut total = CMatrix::zeros(self.dim, self.dim);
        for p in &self.projectors {
            total += p.matrix();
        }
        max_abs(&(total - CMatrix::identity(self.dim, self.dim)))
    }

    /// Max entry of `P_i P_j` over `i != j`.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.projectors.len() {
            for j in i + 1..self.projectors.len() {
                worst = worst.max(max_abs(&matmul(self.projectors[i].matrix(), self.projectors[j].matrix())));
            }
        }
        worst
    }

    /// Max entry of `x - sum lambda_i P_i`.
    pub fn reconstruction_defect(&self, x: &HermitianOperator) -> f64 {
        max_abs(&(self.reconstruct() - x.matrix()))
    }
}

/// Splits indices (already sorted by value) wherever consecutive values differ
/// by more than `gap`.
fn cluster_sorted(order: &[usize], values: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &i in order {
        let v = values[i];
        match clusters.last_mut() {
            Some(c) if v - last <= gap => c.push(i),
            _ => clusters.push(vec![i]),
        }
        last = v;
    }
    clusters
}

/// Mean of a cluster, exact when all members coincide.
fn cluster_value(mut members: impl Iterator<Item = f64>) -> f64 {
    let first = members.next().expect("clusters are nonempty");
    let (sum, n) = members.fold((0.0, 1.0), |(s, n), v| (s + (v - first), n + 1.0));
    first + sum / n
}

/// Validates `entries` as a Hermitian operator.
pub fn make_hermitian(entries: CMatrix, tol_herm: f64) -> Result<HermitianOperator> {
    HermitianOperator::new(entries, tol_herm)
}

/// `tau(x) = tr(x) / d`.
pub fn normalized_trace(x: &HermitianOperator) -> f64 {
    x.trace()
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::BadExponent(p))
    }
}

/// `||x||_p^p = tau(|x|^p)` from a resolution.
pub(crate) fn lp_power_of(res: &SpectralResolution, p: f64) -> f64 {
    res.eigenvalues()
        .iter()
        .enumerate()
        .map(|(i, v)| res.weight(i) * v.abs().powf(p))
        .sum()
}

/// `||x||_p = tau(|x|^p)^{1/p}`.
pub fn lp_norm(x: &HermitianOperator, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_power_of(&x.resolution()?, p).powf(1.0 / p))
}

pub fn spectral_resolution(x: &HermitianOperator) -> Result<SpectralResolution> {
    x.resolution()
}

/// `e_B(x)`.
pub fn spectral_projection(x: &HermitianOperator, interval: &BorelInterval, eps_bnd: f64) -> Result<Projection> {
    Ok(x.resolution()?.projection(interval, eps_bnd))
}

/// `f(x)` by the spectral theorem.
pub fn functional_calculus(x: &HermitianOperator, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
    Ok(x.resolution()?.apply(f))
}

/// `1 (x) ... (x) x (x) ... (x) 1` with `x` at `position`.
pub fn tensor_embed(x: &HermitianOperator, factor_dims: &[usize], position: usize) -> Result<HermitianOperator> {
    x.embed(factor_dims, position)
}
