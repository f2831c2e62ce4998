//! Points, maps, charts and cross-ratios in real projective space.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{right_singular, span_basis};
use crate::tolerance::{COLLINEAR_RATIO, RANK_RATIO, TAU_ALG, TAU_CONV};

/// Errors raised by projective linear algebra.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectiveError {
    /// A homogeneous vector was zero (or numerically zero).
    #[error("zero vector does not define a projective point")]
    ZeroVector,
    /// A coordinate or matrix entry was NaN or infinite.
    #[error("non-finite coordinate")]
    NonFinite,
    /// Vector and matrix sizes do not agree.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    /// A matrix was not square.
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    /// A matrix expected to be invertible is singular within tolerance.
    #[error("matrix is singular (normalized |det| = {det:e})")]
    Singular { det: f64 },
    /// The four points of a cross-ratio do not lie on a common line.
    #[error("points are not collinear (sigma ratio {ratio:e})")]
    NotCollinear { ratio: f64 },
    /// The cross-ratio would divide by zero (x = a or y = b).
    #[error("degenerate cross-ratio configuration")]
    DegenerateConfiguration,
    /// A matrix sequence did not settle.
    #[error("map sequence did not converge (last step {last_step:e})")]
    NotConverged { last_step: f64 },
    /// The map sequence was empty.
    #[error("empty map sequence")]
    EmptySequence,
    /// The point lies in the kernel of the limit endomorphism.
    #[error("point lies in the kernel of the endomorphism")]
    KernelPoint,
}

/// Canonical representative: unit norm, first significant entry positive.
///
/// Returns `None` for zero or non-finite input. Applying the function to its
/// own output is a bitwise no-op.
pub fn canonicalize(v: &DVector<f64>) -> Option<DVector<f64>> {
    if v.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let n = v.norm();
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    let mut out = if (n - 1.0).abs() <= 8.0 * f64::EPSILON {
        v.clone()
    } else {
        v / n
    };
    let max = out.amax();
    let pivot = out.iter().find(|x| x.abs() > TAU_ALG * max).copied()?;
    if pivot < 0.0 {
        out.neg_mut();
    }
    Some(out)
}

/// A point of P(R^d), stored through its canonical representative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HomogeneousPoint {
    coords: DVector<f64>,
}

impl HomogeneousPoint {
    pub fn new(coords: DVector<f64>) -> Result<Self, ProjectiveError> {
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(ProjectiveError::NonFinite);
        }
        canonicalize(&coords)
            .map(|coords| Self { coords })
            .ok_or(ProjectiveError::ZeroVector)
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self, ProjectiveError> {
        Self::new(DVector::from_column_slice(coords))
    }

    /// Point of the standard chart `x_0 = 1` with the given affine coordinates.
    pub fn from_chart(affine: &[f64]) -> Result<Self, ProjectiveError> {
        let mut v = Vec::with_capacity(affine.len() + 1);
        v.push(1.0);
        v.extend_from_slice(affine);
        Self::from_slice(&v)
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Equality of projective points up to `tol` on canonical representatives.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && self.sign_distance(other) <= tol
    }

    /// `min(|u - v|, |u + v|)` for unit representatives `u`, `v`.
    pub fn sign_distance(&self, other: &Self) -> f64 {
        let a = (&self.coords - &other.coords).norm();
        let b = (&self.coords + &other.coords).norm();
        a.min(b)
    }

    /// Angle between the two lines, in `[0, pi/2]`.
    pub fn angular_distance(&self, other: &Self) -> f64 {
        let c = self.coords.dot(&other.coords).abs().min(1.0);
        let s = self.sign_distance(other);
        // acos loses accuracy near 0; use the chord instead.
        if c > 0.9 {
            2.0 * (0.5 * s).asin()
        } else {
            c.acos()
        }
    }
}

impl TryFrom<Vec<f64>> for HomogeneousPoint {
    type Error = ProjectiveError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(DVector::from_vec(v))
    }
}

impl From<HomogeneousPoint> for Vec<f64> {
    fn from(p: HomogeneousPoint) -> Self {
        p.coords.iter().copied().collect()
    }
}

fn canonical_matrix(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if m.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let n = m.norm();
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    let mut out = m / n;
    let max = out.amax();
    // row-major scan for the first significant entry
    let (r, c) = out.shape();
    let mut pivot = 0.0;
    'scan: for i in 0..r {
        for j in 0..c {
            if out[(i, j)].abs() > TAU_ALG * max {
                pivot = out[(i, j)];
                break 'scan;
            }
        }
    }
    if pivot < 0.0 {
        out.neg_mut();
    }
    Some(out)
}

fn matrix_sign_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm().min((a + b).norm())
}

/// An element of PGL_d(R), stored canonically together with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveMap {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl ProjectiveMap {
    /// Validates and canonicalizes a user-supplied matrix.
    pub fn new(m: DMatrix<f64>) -> Result<Self, ProjectiveError> {
        let (rows, cols) = m.shape();
        if rows != cols || rows == 0 {
            return Err(ProjectiveError::NotSquare { rows, cols });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(ProjectiveError::NonFinite);
        }
        let matrix = canonical_matrix(&m).ok_or(ProjectiveError::Singular { det: 0.0 })?;
        // determinant of the row-normalized matrix (Hadamard ratio)
        let mut rows = matrix.clone();
        for mut r in rows.row_iter_mut() {
            let n = r.norm();
            if n == 0.0 {
                return Err(ProjectiveError::Singular { det: 0.0 });
            }
            r /= n;
        }
        let det = rows.determinant();
        if det.abs() <= TAU_ALG {
            return Err(ProjectiveError::Singular { det });
        }
        let inv = matrix
            .clone()
            .try_inverse()
            .ok_or(ProjectiveError::Singular { det })?;
        let inverse = canonical_matrix(&inv).ok_or(ProjectiveError::Singular { det })?;
        Ok(Self { matrix, inverse })
    }

    pub fn from_rows(d: usize, entries: &[f64]) -> Result<Self, ProjectiveError> {
        if entries.len() != d * d {
            return Err(ProjectiveError::DimensionMismatch {
                expected: d * d,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(d, d, entries))
    }

    pub fn identity(d: usize) -> Self {
        let m = canonical_matrix(&DMatrix::identity(d, d)).expect("identity is nonzero");
        Self {
            matrix: m.clone(),
            inverse: m,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The inverse map (carried along, never recomputed).
    pub fn inverse(&self) -> Self {
        Self {
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
        }
    }

    /// `self ∘ other`, renormalized. Products of invertible maps are trusted to
    /// stay invertible even when their normalized determinant underflows.
    pub fn compose(&self, other: &Self) -> Self {
        let m = &self.matrix * &other.matrix;
        let inv = &other.inverse * &self.inverse;
        Self {
            matrix: canonical_matrix(&m).unwrap_or(m),
            inverse: canonical_matrix(&inv).unwrap_or(inv),
        }
    }

    pub fn apply(&self, p: &HomogeneousPoint) -> Result<HomogeneousPoint, ProjectiveError> {
        if p.dim() != self.dim() {
            return Err(ProjectiveError::DimensionMismatch {
                expected: self.dim(),
                found: p.dim(),
            });
        }
        HomogeneousPoint::new(&self.matrix * p.coords())
    }

    /// Image of a raw vector (no canonicalization).
    pub fn apply_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    /// Distance between canonical matrices, insensitive to sign.
    pub fn distance(&self, other: &Self) -> f64 {
        matrix_sign_distance(&self.matrix, &other.matrix)
    }

    /// Whether the map is the identity within `tol` (Frobenius, normalized).
    pub fn is_identity(&self, tol: f64) -> bool {
        self.distance(&Self::identity(self.dim())) <= tol
    }
}

/// A nonzero, possibly singular endomorphism up to scale.
#[derive(Clone, Debug, PartialEq)]
pub struct EndomorphismClass {
    matrix: DMatrix<f64>,
    kernel_basis: Vec<DVector<f64>>,
    image_basis: Vec<DVector<f64>>,
}

impl EndomorphismClass {
    /// Canonicalizes `m` and truncates singular values below `RANK_RATIO`.
    pub fn new(m: &DMatrix<f64>) -> Result<Self, ProjectiveError> {
        let (rows, cols) = m.shape();
        if rows != cols || rows == 0 {
            return Err(ProjectiveError::NotSquare { rows, cols });
        }
        let m = canonical_matrix(m).ok_or(ProjectiveError::ZeroVector)?;
        let svd = m.clone().svd(true, true);
        let u = svd.u.as_ref().expect("u requested");
        let vt = svd.v_t.as_ref().expect("v requested");
        let top = svd.singular_values.max();
        let mut truncated = DMatrix::zeros(rows, cols);
        let mut image_basis = Vec::new();
        for (i, s) in svd.singular_values.iter().enumerate() {
            if *s > RANK_RATIO * top {
                truncated += u.column(i) * vt.row(i) * *s;
                image_basis.push(u.column(i).into_owned());
            }
        }
        let (_, right) = right_singular(&m);
        let rank = image_basis.len();
        let kernel_basis = right[rank..].to_vec();
        let matrix = canonical_matrix(&truncated).ok_or(ProjectiveError::ZeroVector)?;
        Ok(Self {
            matrix,
            kernel_basis,
            image_basis,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn kernel_basis(&self) -> &[DVector<f64>] {
        &self.kernel_basis
    }

    pub fn image_basis(&self) -> &[DVector<f64>] {
        &self.image_basis
    }

    pub fn rank(&self) -> usize {
        self.image_basis.len()
    }

    /// Euclidean distance from the unit vector `v` to the kernel.
    pub fn kernel_distance(&self, v: &DVector<f64>) -> f64 {
        let u = v / v.norm();
        let mut proj = DVector::zeros(u.len());
        for k in &self.kernel_basis {
            proj += k * k.dot(&u);
        }
        (u - proj).norm()
    }
}

/// Limit of a sequence of maps in the compactification of PGL_d(R).
pub fn limit_of_maps(sequence: &[ProjectiveMap]) -> Result<EndomorphismClass, ProjectiveError> {
    let last = sequence.last().ok_or(ProjectiveError::EmptySequence)?;
    if sequence.len() >= 2 {
        let prev = &sequence[sequence.len() - 2];
        let step = matrix_sign_distance(last.matrix(), prev.matrix());
        if step >= TAU_CONV {
            return Err(ProjectiveError::NotConverged { last_step: step });
        }
    }
    EndomorphismClass::new(last.matrix())
}

/// `[T p]`, defined off the kernel of `T`.
pub fn apply_endo(
    t: &EndomorphismClass,
    p: &HomogeneousPoint,
) -> Result<HomogeneousPoint, ProjectiveError> {
    if p.dim() != t.matrix.nrows() {
        return Err(ProjectiveError::DimensionMismatch {
            expected: t.matrix.nrows(),
            found: p.dim(),
        });
    }
    let v = &t.matrix * p.coords();
    if v.norm() <= TAU_ALG {
        return Err(ProjectiveError::KernelPoint);
    }
    HomogeneousPoint::new(v)
}

/// An affine chart `{x : covector · x = 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineChart {
    covector: DVector<f64>,
}

impl AffineChart {
    pub fn new(covector: DVector<f64>) -> Result<Self, ProjectiveError> {
        let n = covector.norm();
        if !n.is_finite() {
            return Err(ProjectiveError::NonFinite);
        }
        if n == 0.0 {
            return Err(ProjectiveError::ZeroVector);
        }
        Ok(Self {
            covector: covector / n,
        })
    }

    /// Unit covector defining the chart.
    pub fn covector(&self) -> &DVector<f64> {
        &self.covector
    }

    /// Value of the covector on a vector.
    pub fn eval(&self, v: &DVector<f64>) -> f64 {
        crate::linalg::dot2(self.covector.as_slice(), v.as_slice())
    }

    /// Representative with `covector · x = 1`, or `None` at infinity.
    pub fn normalize(&self, v: &DVector<f64>) -> Option<DVector<f64>> {
        let s = self.eval(v);
        if s.abs() <= f64::EPSILON * v.norm() {
            None
        } else {
            Some(v / s)
        }
    }
}

/// Cross-ratio `[a, x, y, b]` of four collinear points.
pub fn cross_ratio(
    a: &HomogeneousPoint,
    x: &HomogeneousPoint,
    y: &HomogeneousPoint,
    b: &HomogeneousPoint,
) -> Result<f64, ProjectiveError> {
    let d = a.dim();
    for p in [x, y, b] {
        if p.dim() != d {
            return Err(ProjectiveError::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
    }
    let pts = [a.coords(), x.coords(), y.coords(), b.coords()];
    let m = DMatrix::from_fn(4, d, |i, j| pts[i][j]);
    let (s, v) = right_singular(&m);
    if d >= 3 && s.len() >= 3 {
        let ratio = s[2] / s[0];
        if ratio >= COLLINEAR_RATIO {
            return Err(ProjectiveError::NotCollinear { ratio });
        }
    }
    let plane = if d >= 2 {
        vec![v[0].clone(), v[1].clone()]
    } else {
        span_basis(&[a.coords().clone()], 0.0)
    };
    if plane.len() < 2 {
        return Err(ProjectiveError::DegenerateConfiguration);
    }
    let c = |p: &DVector<f64>| (p.dot(&plane[0]), p.dot(&plane[1]));
    let det = |p: (f64, f64), q: (f64, f64)| (p.0 * q.1 - p.1 * q.0).abs();
    let (ca, cx, cy, cb) = (c(pts[0]), c(pts[1]), c(pts[2]), c(pts[3]));
    let xa = det(cx, ca);
    let yb = det(cy, cb);
    if xa <= TAU_ALG || yb <= TAU_ALG {
        return Err(ProjectiveError::DegenerateConfiguration);
    }
    Ok(det(cx, cb) * det(cy, ca) / (xa * yb))
}
