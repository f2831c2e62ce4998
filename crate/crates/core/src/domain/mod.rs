//! Properly convex domains: ellipsoids (projectivized cones of a Lorentzian
//! form) and polytopes, with membership, chords and chart coordinates.

mod face;
mod simplex;
mod subset;

pub use face::{face_distance, face_of, same_face, Face, FaceSignature};
pub use simplex::{detect_properly_embedded_simplex, segment_in_boundary, Simplex};
pub use subset::{ideal_boundary_sample, is_properly_embedded, ConvexSubset, SubsetShape};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{form_value, null_vector, rank, span_basis};
use crate::projective::{AffineChart, HomogeneousPoint, ProjectiveError};
use crate::tolerance::{CHART_MARGIN, MAX_DIM, STRICT_INTERIOR, TAU_ALG, TAU_GEO};

/// Errors raised while building or querying domains and subsets.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    /// Underlying projective failure.
    #[error(transparent)]
    Projective(#[from] ProjectiveError),
    /// The quadratic form is not Lorentzian (one positive, d-1 negative eigenvalues).
    #[error("form must have signature (1, d-1); found {positive} positive, {negative} negative, {zero} null")]
    BadSignature {
        positive: usize,
        negative: usize,
        zero: usize,
    },
    /// The form matrix is not symmetric.
    #[error("form matrix is not symmetric")]
    NotSymmetric,
    /// The vertex data does not describe a valid polytope.
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
    /// The domain does not fit inside a single affine chart.
    #[error("domain is not properly convex: {0}")]
    NotProperlyConvex(String),
    /// Ambient dimension is outside the supported range.
    #[error("dimension {0} outside supported range 2..={MAX_DIM}")]
    UnsupportedDimension(usize),
    /// A point of the wrong dimension was supplied.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    /// The open segment does not meet the domain.
    #[error("segment does not meet the domain interior")]
    SegmentOutside,
    /// The two points defining a line coincide.
    #[error("coincident points do not define a line")]
    CoincidentPoints,
    /// A point outside the closed domain was supplied.
    #[error("point lies outside the closed domain")]
    OutsidePoint,
    /// A point expected in the open domain is not (numerically) interior.
    #[error("point is not in the open domain")]
    NotInterior,
    /// The subset contains no ideal points.
    #[error("subset is bounded (no ideal points)")]
    BoundedSubset,
    /// A subset is not contained in the other.
    #[error("subset is not contained in the ambient subset")]
    NotASubset,
    /// The hull does not meet the open domain.
    #[error("subset does not meet the open domain")]
    EmptySubset,
    /// Simplex vertices are projectively dependent.
    #[error("simplex vertices are projectively dependent")]
    DependentVertices,
    /// The point is not in the relative interior of the simplex.
    #[error("point is not in the relative interior of the simplex")]
    NotInRelativeInterior,
    /// Points lie in different open faces.
    #[error("points lie in different faces")]
    FaceMismatch,
}

/// Result of a membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

/// Which representation backs a domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DomainKind {
    Ellipsoid,
    Polytope,
    Simplex,
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Ellipsoid {
        form: DMatrix<f64>,
    },
    Polytope {
        vertices: Vec<DVector<f64>>,
        facets: Vec<DVector<f64>>,
        simplex: bool,
    },
}

/// A properly convex open subset of P(R^d).
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexDomain {
    shape: Shape,
    chart: AffineChart,
    chart_basis: Vec<DVector<f64>>,
    center: HomogeneousPoint,
    center_hat: DVector<f64>,
}

/// Line through two points of the closed domain, in the affine parameter
/// `x(l) = p_hat + l * w` with `w = q_hat - p_hat` (both chart-normalized).
/// The chord meets the boundary at `l = lam_a <= 0` and `l = 1 + mu_b >= 1`.
#[derive(Clone, Debug)]
pub struct Chord {
    pub p_hat: DVector<f64>,
    pub w: DVector<f64>,
    pub lam_a: f64,
    pub mu_b: f64,
}

impl Chord {
    pub fn lam_b(&self) -> f64 {
        1.0 + self.mu_b
    }

    pub fn vector_at(&self, lam: f64) -> DVector<f64> {
        &self.p_hat + &self.w * lam
    }

    pub fn point_at(&self, lam: f64) -> Result<HomogeneousPoint, ProjectiveError> {
        HomogeneousPoint::new(self.vector_at(lam))
    }

    /// Boundary point on the far side of `p`.
    pub fn a(&self) -> Result<HomogeneousPoint, ProjectiveError> {
        self.point_at(self.lam_a)
    }

    /// Boundary point on the far side of `q`.
    pub fn b(&self) -> Result<HomogeneousPoint, ProjectiveError> {
        self.point_at(self.lam_b())
    }

    /// Hilbert distance between `p` (l = 0) and `q` (l = 1).
    pub fn endpoint_distance(&self) -> Option<f64> {
        if !(self.lam_a < 0.0 && self.mu_b > 0.0) {
            return None;
        }
        let na = -self.lam_a;
        Some(0.5 * (self.mu_b.ln_1p() + na.ln_1p() - na.ln() - self.mu_b.ln()))
    }

    /// Hilbert arclength coordinate of parameter `lam`, with `u(0)` not
    /// normalized to zero. Increasing toward `b`.
    pub fn arclength(&self, lam: f64) -> f64 {
        0.5 * ((lam - self.lam_a) / (self.lam_b() - lam)).ln()
    }

    /// Inverse of [`Chord::arclength`].
    pub fn param_at_arclength(&self, u: f64) -> f64 {
        let e = (2.0 * u).exp();
        if !e.is_finite() {
            return self.lam_b();
        }
        (self.lam_a + e * self.lam_b()) / (1.0 + e)
    }

    /// Parameter of the point at signed Hilbert distance `s` from `p` toward `q`.
    pub fn param_at_distance(&self, s: f64) -> f64 {
        let r = (2.0 * s).exp() * (-self.lam_a) / self.lam_b();
        if !r.is_finite() {
            return self.lam_b();
        }
        (self.lam_a + r * self.lam_b()) / (1.0 + r)
    }
}

fn check_dim(d: usize) -> Result<(), DomainError> {
    if (2..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        Err(DomainError::UnsupportedDimension(d))
    }
}

fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn orthonormal_complement(phi: &DVector<f64>) -> Vec<DVector<f64>> {
    let d = phi.len();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(d - 1);
    for i in 0..d {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        v -= phi * phi.dot(&v);
        for b in &basis {
            v -= b * b.dot(&v);
        }
        let n = v.norm();
        if n > 1e-6 && basis.len() < d - 1 {
            basis.push(v / n);
        }
    }
    basis
}

impl ConvexDomain {
    /// Projectivized positive cone of a symmetric form of signature (1, d-1).
    /// A form of signature (d-1, 1) is accepted and negated.
    pub fn ellipsoid(form: DMatrix<f64>) -> Result<Self, DomainError> {
        let (r, c) = form.shape();
        if r != c {
            return Err(ProjectiveError::NotSquare { rows: r, cols: c }.into());
        }
        check_dim(r)?;
        if form.iter().any(|x| !x.is_finite()) {
            return Err(ProjectiveError::NonFinite.into());
        }
        let scale = form.amax();
        if scale == 0.0 {
            return Err(DomainError::BadSignature {
                positive: 0,
                negative: 0,
                zero: r,
            });
        }
        if (&form - form.transpose()).amax() > TAU_ALG * scale {
            return Err(DomainError::NotSymmetric);
        }
        let sym = (&form + form.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym.clone());
        let top = eig.eigenvalues.amax();
        let zero_tol = TAU_ALG * top;
        let pos = eig.eigenvalues.iter().filter(|l| **l > zero_tol).count();
        let neg = eig.eigenvalues.iter().filter(|l| **l < -zero_tol).count();
        let zero = r - pos - neg;
        let flip = if pos == 1 && neg == r - 1 {
            1.0
        } else if neg == 1 && pos == r - 1 {
            -1.0
        } else {
            return Err(DomainError::BadSignature {
                positive: pos,
                negative: neg,
                zero,
            });
        };
        let form = sym * (flip / top);
        let evals: Vec<f64> = eig.eigenvalues.iter().map(|l| flip * l / top).collect();
        let (ipos, lpos) = evals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, l)| (i, *l))
            .expect("non-empty");
        let lneg = evals
            .iter()
            .filter(|l| **l < 0.0)
            .map(|l| -l)
            .fold(f64::INFINITY, f64::min);
        let margin = (lneg / (lpos + lneg)).sqrt();
        if margin <= CHART_MARGIN {
            return Err(DomainError::NotProperlyConvex(format!(
                "cone too wide (chart margin {margin:e})"
            )));
        }
        let phi = eig.eigenvectors.column(ipos).into_owned();
        let center = HomogeneousPoint::new(phi.clone())?;
        Self::assemble(Shape::Ellipsoid { form }, phi, center)
    }

    /// The unit ball of R^n in the standard chart: form diag(1, -1, ..., -1).
    pub fn ball(n: usize) -> Result<Self, DomainError> {
        let mut diag = vec![-1.0; n + 1];
        diag[0] = 1.0;
        Self::ellipsoid(DMatrix::from_diagonal(&DVector::from_vec(diag)))
    }

    /// Cone over the given vertex representatives. The vectors are used as
    /// given: they must lie in a common open half-space.
    pub fn polytope(vertices: &[DVector<f64>]) -> Result<Self, DomainError> {
        Self::build_polytope(vertices, false)
    }

    /// A projective simplex: `d` independent vertex representatives.
    pub fn simplex(vertices: &[DVector<f64>]) -> Result<Self, DomainError> {
        let d = vertices.first().map(|v| v.len()).unwrap_or(0);
        if vertices.len() != d {
            return Err(DomainError::InvalidPolytope(format!(
                "a simplex in dimension {d} needs {d} vertices, found {}",
                vertices.len()
            )));
        }
        Self::build_polytope(vertices, true)
    }

    /// The standard simplex spanned by the coordinate vectors of R^d.
    pub fn standard_simplex(d: usize) -> Result<Self, DomainError> {
        let vs: Vec<_> = (0..d)
            .map(|i| {
                let mut v = DVector::zeros(d);
                v[i] = 1.0;
                v
            })
            .collect();
        Self::simplex(&vs)
    }

    fn build_polytope(raw: &[DVector<f64>], simplex: bool) -> Result<Self, DomainError> {
        let d = raw
            .first()
            .map(|v| v.len())
            .ok_or_else(|| DomainError::InvalidPolytope("no vertices".into()))?;
        check_dim(d)?;
        if raw.len() > 64 {
            return Err(DomainError::InvalidPolytope(format!(
                "too many vertices ({})",
                raw.len()
            )));
        }
        for v in raw {
            if v.len() != d {
                return Err(DomainError::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(ProjectiveError::NonFinite.into());
            }
            if v.norm() == 0.0 {
                return Err(ProjectiveError::ZeroVector.into());
            }
        }
        let units: Vec<DVector<f64>> = raw.iter().map(|v| v / v.norm()).collect();
        if rank(&units, 1e-9) < d {
            return Err(DomainError::InvalidPolytope(
                "vertices do not span the ambient space".into(),
            ));
        }
        let mut phi = units.iter().fold(DVector::zeros(d), |acc, v| acc + v);
        let n = phi.norm();
        if n <= CHART_MARGIN {
            return Err(DomainError::NotProperlyConvex(
                "vertices are not in a common half-space".into(),
            ));
        }
        phi /= n;
        for (i, u) in units.iter().enumerate() {
            if phi.dot(u) <= CHART_MARGIN {
                return Err(DomainError::NotProperlyConvex(format!(
                    "vertex {i} leaves the chart"
                )));
            }
        }
        if binomial(units.len(), d - 1) > 200_000 {
            return Err(DomainError::InvalidPolytope(
                "vertex set too large for facet enumeration".into(),
            ));
        }
        let hats: Vec<DVector<f64>> = units.iter().map(|u| u / phi.dot(u)).collect();
        let scale = hats.iter().map(|h| h.norm()).fold(0.0, f64::max);
        let tol = 1e-9 * scale;
        let mut facets: Vec<DVector<f64>> = Vec::new();
        combinations(hats.len(), d - 1, |idx| {
            let m = DMatrix::from_fn(d - 1, d, |i, j| hats[idx[i]][j]);
            let (f, s) = null_vector(&m);
            if d >= 2 && s.len() >= 2 && s[d - 2] <= 1e-9 * s[0] {
                return;
            }
            let vals: Vec<f64> = hats.iter().map(|h| f.dot(h)).collect();
            let maxv = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let minv = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let f = if maxv > tol && minv >= -tol {
                f
            } else if minv < -tol && maxv <= tol {
                -f
            } else {
                return;
            };
            if !facets.iter().any(|g| (g - &f).amax() < 1e-9) {
                facets.push(f);
            }
        });
        // each vertex must be extreme: its active facets span a hyperplane's worth
        for (i, h) in hats.iter().enumerate() {
            let active: Vec<DVector<f64>> = facets
                .iter()
                .filter(|f| f.dot(h).abs() <= tol)
                .cloned()
                .collect();
            if rank(&active, 1e-9) < d - 1 {
                return Err(DomainError::InvalidPolytope(format!(
                    "vertex {i} is not extreme"
                )));
            }
        }
        if simplex && facets.len() != d {
            return Err(DomainError::InvalidPolytope(
                "simplex vertices are not independent".into(),
            ));
        }
        let centroid = hats.iter().fold(DVector::zeros(d), |acc, h| acc + h) / hats.len() as f64;
        let center = HomogeneousPoint::new(centroid)?;
        Self::assemble(
            Shape::Polytope {
                vertices: hats,
                facets,
                simplex,
            },
            phi,
            center,
        )
    }

    fn assemble(
        shape: Shape,
        phi: DVector<f64>,
        center: HomogeneousPoint,
    ) -> Result<Self, DomainError> {
        let phi = if phi.dot(center.coords()) < 0.0 {
            -phi
        } else {
            phi
        };
        let chart = AffineChart::new(phi)?;
        let chart_basis = orthonormal_complement(chart.covector());
        let center_hat = chart
            .normalize(center.coords())
            .ok_or(ProjectiveError::ZeroVector)?;
        Ok(Self {
            shape,
            chart,
            chart_basis,
            center,
            center_hat,
        })
    }

    pub fn kind(&self) -> DomainKind {
        match &self.shape {
            Shape::Ellipsoid { .. } => DomainKind::Ellipsoid,
            Shape::Polytope { simplex: true, .. } => DomainKind::Simplex,
            Shape::Polytope { .. } => DomainKind::Polytope,
        }
    }

    /// Ambient vector dimension `d` (the domain lives in P(R^d)).
    pub fn dim(&self) -> usize {
        self.chart.covector().len()
    }

    pub fn chart(&self) -> &AffineChart {
        &self.chart
    }

    /// Default basepoint: the form's time axis or the vertex centroid.
    pub fn center(&self) -> &HomogeneousPoint {
        &self.center
    }

    /// Normalized form (ellipsoids only).
    pub fn form(&self) -> Option<&DMatrix<f64>> {
        match &self.shape {
            Shape::Ellipsoid { form } => Some(form),
            _ => None,
        }
    }

    /// Chart-normalized vertices (polytopes only).
    pub fn vertices(&self) -> &[DVector<f64>] {
        match &self.shape {
            Shape::Polytope { vertices, .. } => vertices,
            _ => &[],
        }
    }

    /// Unit facet covectors, nonnegative on the domain (polytopes only).
    pub fn facets(&self) -> &[DVector<f64>] {
        match &self.shape {
            Shape::Polytope { facets, .. } => facets,
            _ => &[],
        }
    }

    fn check_point(&self, p: &HomogeneousPoint) -> Result<(), DomainError> {
        if p.dim() != self.dim() {
            return Err(DomainError::DimensionMismatch {
                expected: self.dim(),
                found: p.dim(),
            });
        }
        Ok(())
    }

    /// Unit representative on the positive side of the chart, if not at infinity.
    fn oriented(&self, v: &DVector<f64>) -> Option<DVector<f64>> {
        let u = v / v.norm();
        let s = self.chart.eval(&u);
        if s.abs() <= 0.5 * CHART_MARGIN {
            None
        } else if s < 0.0 {
            Some(-u)
        } else {
            Some(u)
        }
    }

    /// Signed normalized membership value: positive inside, zero on the
    /// boundary. `None` for points at infinity of the chart (always outside).
    pub fn margin_vec(&self, v: &DVector<f64>) -> Option<f64> {
        let u = self.oriented(v)?;
        Some(match &self.shape {
            Shape::Ellipsoid { form } => form_value(form, &u, &u),
            Shape::Polytope { facets, .. } => facets
                .iter()
                .map(|f| crate::linalg::dot2(f.as_slice(), u.as_slice()))
                .fold(f64::INFINITY, f64::min),
        })
    }

    pub fn margin(&self, p: &HomogeneousPoint) -> Option<f64> {
        self.margin_vec(p.coords())
    }

    pub fn classify_vec(&self, v: &DVector<f64>) -> Membership {
        match self.margin_vec(v) {
            None => Membership::Outside,
            Some(m) if m > TAU_GEO => Membership::Interior,
            Some(m) if m >= -TAU_GEO => Membership::Boundary,
            Some(_) => Membership::Outside,
        }
    }

    /// Interior / boundary / outside classification at tolerance `TAU_GEO`.
    pub fn contains(&self, p: &HomogeneousPoint) -> Membership {
        if p.dim() != self.dim() {
            return Membership::Outside;
        }
        self.classify_vec(p.coords())
    }

    /// In the closed domain (interior or boundary).
    pub fn in_closure(&self, p: &HomogeneousPoint) -> bool {
        self.contains(p) != Membership::Outside
    }

    /// Numerically strictly inside: distances from this point are finite in
    /// double precision, even if the point classifies as `Boundary`.
    pub fn strictly_inside(&self, p: &HomogeneousPoint) -> bool {
        p.dim() == self.dim() && self.margin(p).is_some_and(|m| m > STRICT_INTERIOR)
    }

    /// Chart-normalized representative (`phi . x = 1`).
    pub fn hat(&self, p: &HomogeneousPoint) -> Option<DVector<f64>> {
        let s = self.chart.eval(p.coords());
        if s.abs() <= 0.5 * CHART_MARGIN {
            None
        } else {
            Some(p.coords() / s)
        }
    }

    /// Affine coordinates of a point in the domain's chart, centered at the
    /// default basepoint.
    pub fn affine_coords(&self, p: &HomogeneousPoint) -> Option<DVector<f64>> {
        let h = self.hat(p)?;
        let diff = h - &self.center_hat;
        Some(DVector::from_iterator(
            self.chart_basis.len(),
            self.chart_basis.iter().map(|b| b.dot(&diff)),
        ))
    }

    /// Inverse of [`ConvexDomain::affine_coords`].
    pub fn from_affine(&self, coords: &[f64]) -> Result<HomogeneousPoint, ProjectiveError> {
        let mut v = self.center_hat.clone();
        for (b, c) in self.chart_basis.iter().zip(coords) {
            v += b * *c;
        }
        HomogeneousPoint::new(v)
    }

    /// Orthonormal basis of the chart's tangent directions.
    pub fn chart_basis(&self) -> &[DVector<f64>] {
        &self.chart_basis
    }

    /// The chord through `p` and `q` (both in the closed domain).
    pub fn chord(&self, p: &HomogeneousPoint, q: &HomogeneousPoint) -> Result<Chord, DomainError> {
        self.check_point(p)?;
        self.check_point(q)?;
        let mp = self.margin(p).ok_or(DomainError::SegmentOutside)?;
        let mq = self.margin(q).ok_or(DomainError::SegmentOutside)?;
        if mp < -TAU_GEO || mq < -TAU_GEO {
            return Err(DomainError::SegmentOutside);
        }
        let ph = self.hat(p).ok_or(DomainError::SegmentOutside)?;
        let qh = self.hat(q).ok_or(DomainError::SegmentOutside)?;
        let w = &qh - &ph;
        if w.amax() <= 4.0 * f64::EPSILON * ph.amax().max(qh.amax()) {
            return Err(DomainError::CoincidentPoints);
        }
        let (lam_a, mu_b) = match &self.shape {
            Shape::Ellipsoid { form } => {
                let a = form_value(form, &w, &w);
                if a >= 0.0 {
                    return Err(DomainError::SegmentOutside);
                }
                let hp = form_value(form, &ph, &w);
                let cp = form_value(form, &ph, &ph).max(0.0);
                let hq = form_value(form, &qh, &w);
                let cq = form_value(form, &qh, &qh).max(0.0);
                let (la, _) =
                    crate::linalg::quadratic_roots(a, hp, cp).ok_or(DomainError::SegmentOutside)?;
                let (_, mb) =
                    crate::linalg::quadratic_roots(a, hq, cq).ok_or(DomainError::SegmentOutside)?;
                // the open segment must pass through the interior
                let mid = (&ph + &qh) * 0.5;
                if form_value(form, &mid, &mid) <= 0.0 {
                    return Err(DomainError::SegmentOutside);
                }
                (la, mb)
            }
            Shape::Polytope { facets, .. } => {
                let mut la = f64::NEG_INFINITY;
                let mut mb = f64::INFINITY;
                let mut mid_ok = true;
                for f in facets {
                    let sw = crate::linalg::dot2(f.as_slice(), w.as_slice());
                    let sp = crate::linalg::dot2(f.as_slice(), ph.as_slice()).max(0.0);
                    let sq = crate::linalg::dot2(f.as_slice(), qh.as_slice()).max(0.0);
                    if sw > 0.0 {
                        la = la.max(-sp / sw);
                    } else if sw < 0.0 {
                        mb = mb.min(sq / -sw);
                    }
                    if sp + sq <= 0.0 {
                        mid_ok = false;
                    }
                }
                if !mid_ok || !la.is_finite() || !mb.is_finite() {
                    return Err(DomainError::SegmentOutside);
                }
                (la, mb)
            }
        };
        let slack = 1e-9;
        if lam_a > slack || mu_b < -slack {
            return Err(DomainError::SegmentOutside);
        }
        Ok(Chord {
            p_hat: ph,
            w,
            lam_a: lam_a.min(0.0),
            mu_b: mu_b.max(0.0),
        })
    }

    /// Hilbert distance between two points of the open domain.
    pub fn distance(&self, x: &HomogeneousPoint, y: &HomogeneousPoint) -> Result<f64, DomainError> {
        self.check_point(x)?;
        self.check_point(y)?;
        if !self.strictly_inside(x) || !self.strictly_inside(y) {
            return Err(DomainError::NotInterior);
        }
        if x.coords() == y.coords() {
            return Ok(0.0);
        }
        match self.chord(x, y) {
            Err(DomainError::CoincidentPoints) => Ok(0.0),
            Err(e) => Err(e),
            Ok(c) => c.endpoint_distance().ok_or(DomainError::NotInterior),
        }
    }

    /// Boundary endpoints `(a, b)` of the chord through `p` and `q`,
    /// ordered `a, p, q, b`.
    pub fn line_boundary_intersection(
        &self,
        p: &HomogeneousPoint,
        q: &HomogeneousPoint,
    ) -> Result<(HomogeneousPoint, HomogeneousPoint), DomainError> {
        let c = self.chord(p, q)?;
        Ok((c.a()?, c.b()?))
    }

    /// Boundary point hit by the ray from the default basepoint through `p`.
    pub fn radial_boundary_point(
        &self,
        p: &HomogeneousPoint,
    ) -> Result<HomogeneousPoint, DomainError> {
        let c = self.chord(&self.center, p)?;
        Ok(c.b()?)
    }

    /// Endpoint of the ray from the basepoint in the chart direction `dir`.
    pub fn ray_endpoint(&self, dir: &[f64]) -> Result<HomogeneousPoint, DomainError> {
        let q = self.ray_point(dir, 1e-3)?;
        self.radial_boundary_point(&q)
    }

    /// Point at a small chart offset from the basepoint along `dir`.
    fn ray_point(&self, dir: &[f64], step: f64) -> Result<HomogeneousPoint, DomainError> {
        let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(ProjectiveError::ZeroVector.into());
        }
        let scaled: Vec<f64> = dir.iter().map(|x| x / n * step).collect();
        Ok(self.from_affine(&scaled)?)
    }

    /// Point at Hilbert distance `depth` from the basepoint along chart direction `dir`.
    pub fn point_at_depth(&self, dir: &[f64], depth: f64) -> Result<HomogeneousPoint, DomainError> {
        let q = self.ray_point(dir, 1e-3)?;
        let c = self.chord(&self.center, &q)?;
        Ok(c.point_at(c.param_at_distance(depth))?)
    }

    /// Deterministic spread of unit chart directions.
    pub fn directions(&self, n: usize) -> Vec<Vec<f64>> {
        let k = self.chart_basis.len();
        if k == 1 {
            return (0..n)
                .map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }])
                .collect();
        }
        if k == 2 {
            return (0..n)
                .map(|i| {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect();
        }
        // golden-ratio spiral directions on the sphere, padded with axis pairs
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = vec![0.0; k];
            if i < 2 * k {
                v[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
            } else {
                let mut x = (i as f64 + 0.5) * 0.618_033_988_749_895;
                for c in v.iter_mut() {
                    x = (x * 1.618_033_988_749_895 + 0.316_227_766).fract();
                    *c = 2.0 * x - 1.0;
                }
            }
            out.push(v);
        }
        out
    }

    /// Sample points: interior points at depth 1 and boundary points along
    /// a deterministic direction set.
    pub fn validation_samples(
        &self,
        n: usize,
    ) -> Result<(Vec<HomogeneousPoint>, Vec<HomogeneousPoint>), DomainError> {
        let mut interior = vec![self.center.clone()];
        let mut boundary = Vec::new();
        for dir in self.directions(n) {
            interior.push(self.point_at_depth(&dir, 1.0)?);
            boundary.push(self.ray_endpoint(&dir)?);
        }
        if let Shape::Polytope { vertices, .. } = &self.shape {
            for v in vertices {
                boundary.push(HomogeneousPoint::new(v.clone())?);
            }
        }
        Ok((interior, boundary))
    }

    /// Restriction of this polytope to the projective span of `basis`
    /// (orthonormal vectors). Used to build faces as domains.
    pub(crate) fn restrict_polytope(
        points: &[DVector<f64>],
        basis: &[DVector<f64>],
    ) -> Result<Self, DomainError> {
        let proj: Vec<DVector<f64>> = points
            .iter()
            .map(|p| DVector::from_iterator(basis.len(), basis.iter().map(|b| b.dot(p))))
            .collect();
        Self::polytope(&proj)
    }

    /// Orthonormal basis of the span of a point list.
    pub(crate) fn span_of(points: &[DVector<f64>]) -> Vec<DVector<f64>> {
        span_basis(points, 1e-9)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn square() -> ConvexDomain {
        let vs: Vec<DVector<f64>> = [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0],
            [1.0, -1.0, -1.0],
            [1.0, 1.0, -1.0],
        ]
        .iter()
        .map(|v| DVector::from_row_slice(v))
        .collect();
        ConvexDomain::polytope(&vs).unwrap()
    }

    pub fn pt(c: &[f64]) -> HomogeneousPoint {
        HomogeneousPoint::from_chart(c).unwrap()
    }

    #[test]
    fn ball_membership() {
        let b = ConvexDomain::ball(2).unwrap();
        assert_eq!(b.contains(&pt(&[0.0, 0.0])), Membership::Interior);
        assert_eq!(b.contains(&pt(&[1.0, 0.0])), Membership::Boundary);
        assert_eq!(b.contains(&pt(&[1.5, 0.0])), Membership::Outside);
    }

    #[test]
    fn square_membership() {
        let s = square();
        assert_eq!(s.facets().len(), 4);
        assert_eq!(s.contains(&pt(&[2.0, 0.0])), Membership::Outside);
        assert_eq!(s.contains(&pt(&[1.0, 0.3])), Membership::Boundary);
        assert_eq!(s.contains(&pt(&[0.2, 0.3])), Membership::Interior);
    }

    #[test]
    fn ball_chord_is_diameter() {
        let b = ConvexDomain::ball(2).unwrap();
        let (a, e) = b
            .line_boundary_intersection(&pt(&[0.0, 0.0]), &pt(&[0.5, 0.0]))
            .unwrap();
        assert!(a.approx_eq(&pt(&[-1.0, 0.0]), 1e-12));
        assert!(e.approx_eq(&pt(&[1.0, 0.0]), 1e-12));
    }

    #[test]
    fn square_chord_clips_to_edges() {
        let s = square();
        let (a, e) = s
            .line_boundary_intersection(&pt(&[0.0, 0.0]), &pt(&[0.5, 0.0]))
            .unwrap();
        assert!(a.approx_eq(&pt(&[-1.0, 0.0]), 1e-12));
        assert!(e.approx_eq(&pt(&[1.0, 0.0]), 1e-12));
    }

    #[test]
    fn simplex_chord_toward_vertex() {
        let s = ConvexDomain::standard_simplex(3).unwrap();
        let bary = HomogeneousPoint::from_slice(&[1.0, 1.0, 1.0]).unwrap();
        let toward = HomogeneousPoint::from_slice(&[2.0, 1.0, 1.0]).unwrap();
        let (a, b) = s.line_boundary_intersection(&bary, &toward).unwrap();
        assert!(b.approx_eq(
            &HomogeneousPoint::from_slice(&[1.0, 0.0, 0.0]).unwrap(),
            1e-12
        ));
        assert!(a.approx_eq(
            &HomogeneousPoint::from_slice(&[0.0, 1.0, 1.0]).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn segment_on_boundary_edge_is_outside() {
        let s = square();
        let e = s.chord(&pt(&[1.0, 0.2]), &pt(&[1.0, -0.5]));
        assert_eq!(e.unwrap_err(), DomainError::SegmentOutside);
    }

    #[test]
    fn coincident_points_rejected() {
        let b = ConvexDomain::ball(2).unwrap();
        let e = b.chord(&pt(&[0.1, 0.0]), &pt(&[0.1, 0.0]));
        assert_eq!(e.unwrap_err(), DomainError::CoincidentPoints);
    }

    #[test]
    fn spherical_form_rejected() {
        let e = ConvexDomain::ellipsoid(DMatrix::identity(3, 3));
        assert!(matches!(e, Err(DomainError::BadSignature { .. })));
    }

    #[test]
    fn negated_lorentz_form_accepted() {
        let f = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0, 1.0]));
        let b = ConvexDomain::ellipsoid(f).unwrap();
        assert_eq!(b.contains(&pt(&[0.0, 0.0])), Membership::Interior);
    }

    #[test]
    fn non_extreme_vertex_rejected() {
        let mut vs: Vec<DVector<f64>> = square().vertices().to_vec();
        vs.push(DVector::from_row_slice(&[1.0, 0.0, 0.0]));
        assert!(matches!(
            ConvexDomain::polytope(&vs),
            Err(DomainError::InvalidPolytope(_))
        ));
    }

    #[test]
    fn antipodal_vertices_not_properly_convex() {
        let vs = vec![
            DVector::from_row_slice(&[1.0, 0.0, 0.0]),
            DVector::from_row_slice(&[-1.0, 0.0, 0.0]),
            DVector::from_row_slice(&[0.0, 1.0, 0.0]),
            DVector::from_row_slice(&[0.0, 0.0, 1.0]),
        ];
        assert!(ConvexDomain::polytope(&vs).is_err());
    }

    #[test]
    fn affine_coords_round_trip() {
        let b = ConvexDomain::ball(2).unwrap();
        let p = pt(&[0.3, -0.4]);
        let c = b.affine_coords(&p).unwrap();
        assert!((c[0] - 0.3).abs() < 1e-14 && (c[1] + 0.4).abs() < 1e-14);
        assert!(b.from_affine(c.as_slice()).unwrap().approx_eq(&p, 1e-14));
    }

    #[test]
    fn point_at_depth_has_requested_distance() {
        let b = ConvexDomain::ball(2).unwrap();
        let p = b.point_at_depth(&[1.0, 0.0], 2.0).unwrap();
        let c = b.affine_coords(&p).unwrap();
        assert!((c[0] - 2.0_f64.tanh()).abs() < 1e-12);
    }
}
