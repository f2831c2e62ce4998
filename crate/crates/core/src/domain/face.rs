//! Open faces of the closed domain and their intrinsic Hilbert geometry.

use nalgebra::DVector;

use super::{ConvexDomain, DomainError, Membership, Shape};
use crate::projective::HomogeneousPoint;
use crate::tolerance::{FACE_POINT_RESOLUTION, TAU_GEO};

/// Identifies an open face.
#[derive(Clone, Debug)]
pub enum FaceSignature {
    /// The open domain itself.
    Whole,
    /// Sorted indices of the facets active on the face (polytopes).
    Facets(Vec<usize>),
    /// A singleton boundary face (ellipsoids).
    Point(HomogeneousPoint),
}

impl PartialEq for FaceSignature {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Whole, Self::Whole) => true,
            (Self::Facets(a), Self::Facets(b)) => a == b,
            (Self::Point(a), Self::Point(b)) => a.approx_eq(b, FACE_POINT_RESOLUTION),
            _ => false,
        }
    }
}

/// The open face `F(x)` of a point of the closed domain.
#[derive(Clone, Debug)]
pub struct Face {
    pub signature: FaceSignature,
    /// Orthonormal basis of the linear span of the face.
    pub span_basis: Vec<DVector<f64>>,
    pub dimension: usize,
    /// Chart-normalized vertices of a polytope face.
    pub vertices: Vec<DVector<f64>>,
}

impl PartialEq for Face {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature
    }
}

impl Face {
    /// Orthogonal distance of `v` (unit-normalized) from the face's span.
    pub fn span_residual(&self, v: &DVector<f64>) -> f64 {
        let u = v / v.norm();
        let mut proj = DVector::zeros(u.len());
        for b in &self.span_basis {
            proj += b * b.dot(&u);
        }
        (u - proj).norm()
    }
}

/// The open face containing `x`.
pub fn face_of(omega: &ConvexDomain, x: &HomogeneousPoint) -> Result<Face, DomainError> {
    let d = omega.dim();
    match omega.contains(x) {
        Membership::Outside => Err(DomainError::OutsidePoint),
        Membership::Interior => Ok(Face {
            signature: FaceSignature::Whole,
            span_basis: (0..d)
                .map(|i| {
                    let mut v = DVector::zeros(d);
                    v[i] = 1.0;
                    v
                })
                .collect(),
            dimension: d - 1,
            vertices: omega.vertices().to_vec(),
        }),
        Membership::Boundary => match &omega.shape {
            Shape::Ellipsoid { .. } => Ok(Face {
                signature: FaceSignature::Point(x.clone()),
                span_basis: vec![x.coords().clone()],
                dimension: 0,
                vertices: Vec::new(),
            }),
            Shape::Polytope {
                vertices, facets, ..
            } => {
                let u = omega
                    .oriented(x.coords())
                    .ok_or(DomainError::OutsidePoint)?;
                let active: Vec<usize> = facets
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| f.dot(&u).abs() <= TAU_GEO)
                    .map(|(i, _)| i)
                    .collect();
                let fv: Vec<DVector<f64>> = vertices
                    .iter()
                    .filter(|v| {
                        active
                            .iter()
                            .all(|&i| (facets[i].dot(v) / v.norm()).abs() <= 1e-9)
                    })
                    .cloned()
                    .collect();
                let span_basis = ConvexDomain::span_of(&fv);
                let dimension = span_basis.len().saturating_sub(1);
                Ok(Face {
                    signature: FaceSignature::Facets(active),
                    span_basis,
                    dimension,
                    vertices: fv,
                })
            }
        },
    }
}

/// Whether `x` and `y` lie in the same open face.
pub fn same_face(
    omega: &ConvexDomain,
    x: &HomogeneousPoint,
    y: &HomogeneousPoint,
) -> Result<bool, DomainError> {
    Ok(face_of(omega, x)? == face_of(omega, y)?)
}

/// Hilbert distance between two points of a common open face, measured in
/// the face's own Hilbert geometry.
pub fn face_distance(
    omega: &ConvexDomain,
    x: &HomogeneousPoint,
    y: &HomogeneousPoint,
) -> Result<f64, DomainError> {
    let fx = face_of(omega, x)?;
    let fy = face_of(omega, y)?;
    if fx != fy {
        return Err(DomainError::FaceMismatch);
    }
    match &fx.signature {
        FaceSignature::Whole => omega.distance(x, y),
        FaceSignature::Point(_) => Ok(0.0),
        FaceSignature::Facets(_) => {
            if fx.dimension == 0 || x.approx_eq(y, 0.0) {
                return Ok(0.0);
            }
            let sub = ConvexDomain::restrict_polytope(&fx.vertices, &fx.span_basis)?;
            let proj = |p: &HomogeneousPoint| -> Result<HomogeneousPoint, DomainError> {
                let v = DVector::from_iterator(
                    fx.span_basis.len(),
                    fx.span_basis.iter().map(|b| b.dot(p.coords())),
                );
                Ok(HomogeneousPoint::new(v)?)
            };
            sub.distance(&proj(x)?, &proj(y)?)
        }
    }
}
