//! Search for properly embedded simplices near a pair of points in a common face.

use nalgebra::DVector;

use super::PeripheralError;
use crate::domain::{
    detect_properly_embedded_simplex, face_of, same_face, ConvexDomain, ConvexSubset, DomainError,
    Membership, Simplex,
};
use crate::metric::distance_to_subset;
use crate::projective::HomogeneousPoint;
use crate::tolerance::RunConfig;

/// Depths along the ray beyond `q` that contribute candidate vertices.
const RAY_DEPTHS: usize = 8;

fn push_unique(pool: &mut Vec<HomogeneousPoint>, p: HomogeneousPoint) {
    if !pool.iter().any(|q| q.approx_eq(&p, 1e-9)) {
        pool.push(p);
    }
}

/// Semi-decision search for a properly embedded simplex `S` whose
/// `ε`-neighbourhood contains the sampled slice of `P(Span{a, b, q})` within
/// Hilbert distance `r` of `q`. `None` means none was found in the pool.
#[allow(clippy::too_many_arguments)]
pub fn find_nearby_simplex(
    omega: &ConvexDomain,
    c: &ConvexSubset,
    a: &HomogeneousPoint,
    b: &HomogeneousPoint,
    q: &HomogeneousPoint,
    r: f64,
    eps: f64,
    cfg: &RunConfig,
) -> Result<Option<Simplex>, PeripheralError> {
    if omega.contains(a) != Membership::Boundary || omega.contains(b) != Membership::Boundary {
        return Err(DomainError::NotInterior.into());
    }
    if !same_face(omega, a, b)? {
        return Err(DomainError::FaceMismatch.into());
    }
    if !omega.strictly_inside(q) {
        return Err(DomainError::NotInterior.into());
    }
    let ha = omega.hat(a).ok_or(DomainError::OutsidePoint)?;
    let hb = omega.hat(b).ok_or(DomainError::OutsidePoint)?;
    let hq = omega.hat(q).ok_or(DomainError::OutsidePoint)?;

    let mut pool = vec![a.clone(), b.clone()];
    for v in face_of(omega, a)?.vertices {
        push_unique(&mut pool, HomogeneousPoint::new(v)?);
    }
    // the ray from the midpoint m of [a, b] through q, and its far endpoint
    let m: DVector<f64> = (&ha + &hb) * 0.5;
    let inner = HomogeneousPoint::new((&m + &hq) * 0.5)?;
    if omega.strictly_inside(&inner) {
        let chord = omega.chord(&inner, q)?;
        let far = chord.b()?;
        for v in face_of(omega, &far)?.vertices {
            push_unique(&mut pool, HomogeneousPoint::new(v)?);
        }
        push_unique(&mut pool, far.clone());
        for k in 1..=RAY_DEPTHS {
            let p = chord.point_at(
                chord.param_at_distance(chord.endpoint_distance().unwrap_or(0.0) + k as f64),
            )?;
            if let Ok(e) = omega.radial_boundary_point(&p) {
                push_unique(&mut pool, e);
            }
        }
    }
    for g in c.boundary_generators() {
        push_unique(&mut pool, g);
    }
    pool.retain(|p| omega.contains(p) == Membership::Boundary);

    // the slice: points of the plane within distance r of q
    let targets = [
        ha.clone(),
        hb.clone(),
        &ha * 0.75 + &hb * 0.25,
        &ha * 0.25 + &hb * 0.75,
        &ha + &hb - &hq * 0.5,
    ];
    let mut slice = vec![q.clone()];
    for t in &targets {
        let Ok(mid) = HomogeneousPoint::new((t + &hq) * 0.5) else {
            continue;
        };
        if !omega.strictly_inside(&mid) || mid.approx_eq(q, 1e-12) {
            continue;
        }
        let chord = omega.chord(q, &mid)?;
        for s in [0.5 * r, r] {
            slice.push(chord.point_at(chord.param_at_distance(s))?);
        }
    }

    let n = pool.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let verts = [pool[i].clone(), pool[j].clone(), pool[k].clone()];
                let Ok(Some(s)) = detect_properly_embedded_simplex(omega, &verts) else {
                    continue;
                };
                let hull = ConvexSubset::hull(omega, verts.to_vec())?;
                let covered = slice.iter().all(|p| {
                    hull.closure_contains(omega, p)
                        || distance_to_subset(omega, p, &hull, cfg).is_ok_and(|d| d <= eps)
                });
                if covered {
                    return Ok(Some(s));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::super::tests::pt;
    use super::*;
    use crate::domain::Membership;

    fn square() -> ConvexDomain {
        ConvexDomain::polytope(&[
            DVector::from_row_slice(&[1.0, 1.0, 1.0]),
            DVector::from_row_slice(&[1.0, -1.0, 1.0]),
            DVector::from_row_slice(&[1.0, -1.0, -1.0]),
            DVector::from_row_slice(&[1.0, 1.0, -1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn triangle_finds_itself() {
        let tri = ConvexDomain::standard_simplex(3).unwrap();
        let a = HomogeneousPoint::from_slice(&[0.999, 0.001, 0.0]).unwrap();
        let b = HomogeneousPoint::from_slice(&[0.001, 0.999, 0.0]).unwrap();
        let q = HomogeneousPoint::from_slice(&[1.0, 1.0, 1.0]).unwrap();
        let whole = ConvexSubset::whole(&tri);
        let s = find_nearby_simplex(&tri, &whole, &a, &b, &q, 1.0, 1e-6, &RunConfig::default())
            .unwrap()
            .unwrap();
        assert_eq!(s.dimension(), 2);
        assert!(s
            .vertices()
            .iter()
            .all(|v| tri.contains(v) == Membership::Boundary));
    }

    #[test]
    fn square_has_no_properly_embedded_triangle() {
        let sq = square();
        let whole = ConvexSubset::whole(&sq);
        let r = find_nearby_simplex(
            &sq,
            &whole,
            &pt(&[1.0, -0.9]),
            &pt(&[1.0, 0.9]),
            &pt(&[0.0, 0.0]),
            1.0,
            0.1,
            &RunConfig::default(),
        )
        .unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn different_faces_rejected() {
        let sq = square();
        let whole = ConvexSubset::whole(&sq);
        let e = find_nearby_simplex(
            &sq,
            &whole,
            &pt(&[1.0, 0.0]),
            &pt(&[0.0, 1.0]),
            &pt(&[0.0, 0.0]),
            1.0,
            0.1,
            &RunConfig::default(),
        );
        assert_eq!(
            e.unwrap_err(),
            PeripheralError::Domain(DomainError::FaceMismatch)
        );
    }
}
