//! Projective simplices in the closed domain and boundary-segment tests.

use nalgebra::DVector;

use super::{ConvexDomain, DomainError, DomainKind, Membership};
use crate::linalg::{least_squares, rank};
use crate::projective::HomogeneousPoint;
use crate::tolerance::{BOUNDARY_REFINE_DEPTH, FACE_POINT_RESOLUTION};

/// A projective simplex spanned by independent vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    vertices: Vec<HomogeneousPoint>,
    hats: Vec<DVector<f64>>,
}

impl Simplex {
    /// A simplex from vertex representatives lying in a common half-space
    /// (used as given).
    pub fn from_representatives(reps: &[DVector<f64>]) -> Result<Self, DomainError> {
        if reps.len() < 2 {
            return Err(DomainError::DependentVertices);
        }
        if rank(reps, 1e-9) < reps.len() {
            return Err(DomainError::DependentVertices);
        }
        let vertices = reps
            .iter()
            .map(|v| HomogeneousPoint::new(v.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            vertices,
            hats: reps.to_vec(),
        })
    }

    pub fn vertices(&self) -> &[HomogeneousPoint] {
        &self.vertices
    }

    /// Vertex representatives whose positive combinations fill the simplex.
    pub fn representatives(&self) -> &[DVector<f64>] {
        &self.hats
    }

    /// Dimension `k` of the simplex (`k + 1` vertices).
    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Coordinates of `p` with respect to the vertex representatives,
    /// normalized to sum to one; `None` if `p` is off the span.
    pub fn vertex_coordinates(&self, p: &HomogeneousPoint) -> Option<Vec<f64>> {
        let (c, res) = least_squares(&self.hats, p.coords());
        if res > 1e-9 {
            return None;
        }
        let s: f64 = c.iter().sum();
        if s == 0.0 {
            return None;
        }
        Some(c.iter().map(|x| x / s).collect())
    }

    /// The point with the given (positive) vertex coordinates.
    pub fn point(&self, coords: &[f64]) -> Result<HomogeneousPoint, DomainError> {
        let mut v = DVector::zeros(self.hats[0].len());
        for (h, c) in self.hats.iter().zip(coords) {
            v += h * *c;
        }
        Ok(HomogeneousPoint::new(v)?)
    }

    /// The simplex as a domain in its own span.
    pub fn as_domain(&self) -> Result<ConvexDomain, DomainError> {
        let basis = ConvexDomain::span_of(&self.hats);
        let proj: Vec<DVector<f64>> = self
            .hats
            .iter()
            .map(|p| DVector::from_iterator(basis.len(), basis.iter().map(|b| b.dot(p))))
            .collect();
        ConvexDomain::simplex(&proj)
    }
}

/// Whether the closed segment `[a, b]` lies in the boundary, by dyadic
/// midpoint refinement. Ellipsoids are strictly convex, so only degenerate
/// segments inside one singleton face qualify.
pub fn segment_in_boundary(
    omega: &ConvexDomain,
    a: &HomogeneousPoint,
    b: &HomogeneousPoint,
) -> bool {
    if omega.kind() == DomainKind::Ellipsoid {
        return omega.contains(a) == Membership::Boundary
            && omega.contains(b) == Membership::Boundary
            && a.approx_eq(b, FACE_POINT_RESOLUTION);
    }
    let (Some(ha), Some(hb)) = (omega.hat(a), omega.hat(b)) else {
        return false;
    };
    let n = 1usize << BOUNDARY_REFINE_DEPTH;
    // coarse-to-fine order so that interior excursions are found early
    let mut order: Vec<usize> = Vec::with_capacity(n + 1);
    order.push(0);
    order.push(n);
    let mut step = n;
    while step > 1 {
        let half = step / 2;
        let mut k = half;
        while k < n {
            order.push(k);
            k += step;
        }
        step = half;
    }
    order.into_iter().all(|k| {
        let t = k as f64 / n as f64;
        let v = &ha * (1.0 - t) + &hb * t;
        omega.classify_vec(&v) == Membership::Boundary
    })
}

/// The simplex with the given vertices if it is properly embedded: every
/// edge lies in the boundary and the open simplex lies in the domain.
pub fn detect_properly_embedded_simplex(
    omega: &ConvexDomain,
    vertices: &[HomogeneousPoint],
) -> Result<Option<Simplex>, DomainError> {
    for v in vertices {
        if v.dim() != omega.dim() {
            return Err(DomainError::DimensionMismatch {
                expected: omega.dim(),
                found: v.dim(),
            });
        }
    }
    if vertices.len() < 2 {
        return Err(DomainError::DependentVertices);
    }
    if vertices
        .iter()
        .any(|v| omega.contains(v) != Membership::Boundary)
    {
        return Ok(None);
    }
    let hats: Vec<DVector<f64>> = vertices
        .iter()
        .map(|v| omega.hat(v))
        .collect::<Option<_>>()
        .ok_or(DomainError::OutsidePoint)?;
    if rank(&hats, 1e-9) < hats.len() {
        return Err(DomainError::DependentVertices);
    }
    let n = vertices.len();
    for i in 0..n {
        for j in i + 1..n {
            if !segment_in_boundary(omega, &vertices[i], &vertices[j]) {
                return Ok(None);
            }
        }
    }
    let centroid = hats
        .iter()
        .fold(DVector::zeros(omega.dim()), |acc, h| acc + h)
        / n as f64;
    if omega.classify_vec(&centroid) != Membership::Interior {
        return Ok(None);
    }
    if n >= 4 {
        for skip in 0..n {
            let c = hats
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .fold(DVector::zeros(omega.dim()), |acc, (_, h)| acc + h);
            if omega.classify_vec(&c) != Membership::Boundary {
                return Ok(None);
            }
        }
    }
    Ok(Some(Simplex::from_representatives(&hats)?))
}
