//! Translation lengths, proximal fixed points, axes and limits of sequences.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::GroupError;
use crate::domain::{face_of, ConvexDomain, ConvexSubset, DomainError, FaceSignature, Membership};
use crate::linalg::null_vector;
use crate::metric::distance_to_subset;
use crate::projective::{apply_endo, limit_of_maps, HomogeneousPoint, ProjectiveMap};
use crate::tolerance::{RunConfig, TAU_PROX};

/// Chart distance within which face samples count as covered by images.
const ONTO_RESOLUTION: f64 = 0.05;
/// Orbit points within this distance of the ray count as tracking it.
const TRACKING_BOUND: f64 = 5.0;
/// Tolerance for image vectors lying in the span of a face.
const SPAN_TOL: f64 = 1e-8;

/// `d_Ω(p, g·p)`.
pub fn translation_distance(
    omega: &ConvexDomain,
    g: &ProjectiveMap,
    p: &HomogeneousPoint,
) -> Result<f64, GroupError> {
    if !omega.strictly_inside(p) {
        return Err(DomainError::NotInterior.into());
    }
    Ok(omega.distance(p, &g.apply(p)?)?)
}

/// Top eigenvector of a proximal map and the gap `|λ1 / λ2|`.
pub fn attracting_fixed_point(g: &ProjectiveMap) -> Result<(HomogeneousPoint, f64), GroupError> {
    let m = g.matrix() / g.matrix().norm();
    let mut eig: Vec<(f64, f64)> = m
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect();
    eig.sort_by(|a, b| b.0.hypot(b.1).total_cmp(&a.0.hypot(a.1)));
    let (re, im) = eig[0];
    let top = re.hypot(im);
    if top == 0.0 || im.abs() > 1e-12 * top {
        return Err(GroupError::NotProximal);
    }
    let second = eig.get(1).map(|(r, i)| r.hypot(*i)).unwrap_or(0.0);
    let gap = if second > 0.0 {
        top / second
    } else {
        f64::INFINITY
    };
    if gap <= 1.0 + TAU_PROX {
        return Err(GroupError::NotProximal);
    }
    let d = m.nrows();
    let shifted = &m - DMatrix::identity(d, d) * re;
    let (v, _) = null_vector(&shifted);
    // one power step cleans up the eigenvector
    let v = &m * v;
    Ok((HomogeneousPoint::new(v)?, gap))
}

/// The segment between the repelling and attracting fixed points of `g`.
pub fn axis_of(omega: &ConvexDomain, g: &ProjectiveMap) -> Result<ConvexSubset, GroupError> {
    let (plus, _) = attracting_fixed_point(g)?;
    let (minus, _) = attracting_fixed_point(&g.inverse())?;
    if !omega.in_closure(&plus) || !omega.in_closure(&minus) {
        return Err(GroupError::AxisMissesDomain);
    }
    match ConvexSubset::segment(omega, minus, plus) {
        Ok(s) => Ok(s),
        Err(DomainError::EmptySubset | DomainError::OutsidePoint) => {
            Err(GroupError::AxisMissesDomain)
        }
        Err(e) => Err(e.into()),
    }
}

/// Outcome of the convergence-dynamics checks for a sequence `g_n`.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    /// Limit of `g_n(p0)`.
    pub x: HomogeneousPoint,
    /// Limit of `g_n^{-1}(p0)`.
    pub y: HomogeneousPoint,
    pub rank: usize,
    /// `image(T) ⊂ Span F(x)`.
    pub image_in_face_span: bool,
    /// Sampled `P(ker T)` misses the open domain.
    pub kernel_misses_domain: bool,
    /// `y ∈ P(ker T)`.
    pub y_in_kernel: bool,
    /// `sup_n d(g_n p0, [p0, x))` over the terms still resolvable in the domain.
    pub tracking_distance: f64,
    /// `T(Ω) ⊂ F(x)`, checked only when the orbit tracks the ray.
    pub maps_into_face: Option<bool>,
    /// Every sampled point of `F(x)` is near some `T(p)`.
    pub onto_face: Option<bool>,
    pub ok: bool,
}

fn sample_interior(
    omega: &ConvexDomain,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<HomogeneousPoint>, DomainError> {
    let k = omega.chart_basis().len();
    (0..n)
        .map(|_| {
            let dir: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let depth = rng.random::<f64>() * 6.0;
            if dir.iter().all(|c| *c == 0.0) {
                return Ok(omega.center().clone());
            }
            omega.point_at_depth(&dir, depth)
        })
        .collect()
}

fn dirichlet(vectors: &[DVector<f64>], rng: &mut ChaCha8Rng) -> DVector<f64> {
    let mut v = DVector::zeros(vectors[0].len());
    for b in vectors {
        v += b * -(1.0 - rng.random::<f64>()).ln();
    }
    v
}

/// Checks the structure of the limit `T` of a divergent sequence of automorphisms.
pub fn check_convergence_dynamics(
    omega: &ConvexDomain,
    seq: &[ProjectiveMap],
    p0: &HomogeneousPoint,
    cfg: &RunConfig,
) -> Result<ConvergenceReport, GroupError> {
    if !omega.strictly_inside(p0) {
        return Err(DomainError::NotInterior.into());
    }
    let not_converged = |e: &dyn std::fmt::Display| GroupError::NotConverged(e.to_string());
    let t = limit_of_maps(seq).map_err(|e| not_converged(&e))?;
    let inverses: Vec<ProjectiveMap> = seq.iter().map(|g| g.inverse()).collect();
    let t_inv = limit_of_maps(&inverses).map_err(|e| not_converged(&e))?;
    let x = apply_endo(&t, p0).map_err(|e| not_converged(&e))?;
    let y = apply_endo(&t_inv, p0).map_err(|e| not_converged(&e))?;
    if omega.contains(&x) != Membership::Boundary || omega.contains(&y) != Membership::Boundary {
        return Err(GroupError::NotConverged(
            "orbit limit is not a boundary point".into(),
        ));
    }
    let face = face_of(omega, &x)?;
    let image_in_face_span = t
        .image_basis()
        .iter()
        .all(|v| face.span_residual(v) <= SPAN_TOL);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let kernel = t.kernel_basis();
    let kernel_misses_domain = kernel.is_empty()
        || (0..256).all(|_| {
            let mut v = DVector::zeros(omega.dim());
            for b in kernel {
                v += b * (rng.random::<f64>() * 2.0 - 1.0);
            }
            v.norm() == 0.0 || omega.classify_vec(&v) != Membership::Interior
        });
    let y_in_kernel = t.kernel_distance(y.coords()) <= 1e-6;

    let ray = ConvexSubset::segment(omega, p0.clone(), x.clone())?;
    let mut tracking_distance: f64 = 0.0;
    for g in seq {
        let q = g.apply(p0)?;
        if omega.strictly_inside(&q) {
            if let Ok(d) = distance_to_subset(omega, &q, &ray, cfg) {
                tracking_distance = tracking_distance.max(d);
            }
        }
    }
    let (maps_into_face, onto_face) = if tracking_distance <= TRACKING_BOUND {
        let samples = sample_interior(omega, 512, &mut rng)?;
        let images: Vec<HomogeneousPoint> = samples
            .iter()
            .filter_map(|p| apply_endo(&t, p).ok())
            .collect();
        let into = images.len() == samples.len()
            && images
                .iter()
                .all(|q| face_of(omega, q).map(|f| f == face).unwrap_or(false));
        let onto = match &face.signature {
            FaceSignature::Point(_) | FaceSignature::Whole => into,
            FaceSignature::Facets(_) if face.dimension == 0 => into,
            FaceSignature::Facets(_) => {
                let img: Vec<DVector<f64>> = images
                    .iter()
                    .filter_map(|q| omega.affine_coords(q))
                    .collect();
                (0..64).all(|_| {
                    let f = dirichlet(&face.vertices, &mut rng);
                    let Ok(fp) = HomogeneousPoint::new(f) else {
                        return false;
                    };
                    let Some(fc) = omega.affine_coords(&fp) else {
                        return false;
                    };
                    img.iter().any(|c| (c - &fc).norm() <= ONTO_RESOLUTION)
                })
            }
        };
        (Some(into), Some(onto))
    } else {
        (None, None)
    };
    let ok = image_in_face_span
        && kernel_misses_domain
        && y_in_kernel
        && maps_into_face.unwrap_or(true)
        && onto_face.unwrap_or(true);
    Ok(ConvergenceReport {
        x,
        y,
        rank: t.rank(),
        image_in_face_span,
        kernel_misses_domain,
        y_in_kernel,
        tracking_distance,
        maps_into_face,
        onto_face,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{boost, rotation};

    fn diag(d: &[f64]) -> ProjectiveMap {
        ProjectiveMap::new(DMatrix::from_diagonal(&DVector::from_row_slice(d))).unwrap()
    }

    #[test]
    fn boost_translates_by_t() {
        let ball = ConvexDomain::ball(2).unwrap();
        let t = 1.3;
        let d = translation_distance(&ball, &boost(t), ball.center()).unwrap();
        assert!((d - t).abs() < 1e-12);
        assert_eq!(
            translation_distance(&ball, &ProjectiveMap::identity(3), ball.center()).unwrap(),
            0.0
        );
    }

    #[test]
    fn diagonal_and_boost_fixed_points() {
        let e = std::f64::consts::E;
        let (p, gap) = attracting_fixed_point(&diag(&[e, 1.0, 1.0 / e])).unwrap();
        assert!(p.approx_eq(
            &HomogeneousPoint::from_slice(&[1.0, 0.0, 0.0]).unwrap(),
            1e-12
        ));
        assert!((gap - e).abs() < 1e-9);

        let (p, gap) = attracting_fixed_point(&boost(2.0)).unwrap();
        assert!(p.approx_eq(
            &HomogeneousPoint::from_slice(&[1.0, 1.0, 0.0]).unwrap(),
            1e-12
        ));
        assert!((gap - 2f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn rotation_is_not_proximal() {
        let r = rotation(std::f64::consts::FRAC_PI_3);
        assert_eq!(
            attracting_fixed_point(&r).unwrap_err(),
            GroupError::NotProximal
        );
    }

    #[test]
    fn boost_axis_is_the_diameter() {
        let ball = ConvexDomain::ball(2).unwrap();
        let ax = axis_of(&ball, &boost(1.0)).unwrap();
        let ends: Vec<DVector<f64>> = ax
            .generators()
            .iter()
            .map(|p| ball.affine_coords(p).unwrap())
            .collect();
        assert!(ends
            .iter()
            .any(|c| (c[0] - 1.0).abs() < 1e-12 && c[1].abs() < 1e-12));
        assert!(ends
            .iter()
            .any(|c| (c[0] + 1.0).abs() < 1e-12 && c[1].abs() < 1e-12));
    }

    #[test]
    fn axis_on_a_boundary_edge_misses_the_domain() {
        let s = ConvexDomain::standard_simplex(3).unwrap();
        let e = std::f64::consts::E;
        assert_eq!(
            axis_of(&s, &diag(&[e * e, e, 1.0])).unwrap_err(),
            GroupError::AxisMissesDomain
        );
    }

    #[test]
    fn light_cone_sequence_passes() {
        let form = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.5, 0.0, -1.0, 0.0, 0.5, 0.0, 0.0]);
        let omega = ConvexDomain::ellipsoid(form).unwrap();
        let p0 = HomogeneousPoint::from_slice(&[1.0, 0.0, 1.0]).unwrap();
        let seq: Vec<_> = (1..=40)
            .map(|n| diag(&[(n as f64).exp(), 1.0, (-(n as f64)).exp()]))
            .collect();
        let r = check_convergence_dynamics(&omega, &seq, &p0, &RunConfig::default()).unwrap();
        assert_eq!(r.rank, 1);
        assert!(r.ok, "{r:?}");
        assert_eq!(r.maps_into_face, Some(true));
    }

    #[test]
    fn simplex_sequence_has_edge_image() {
        let s = ConvexDomain::standard_simplex(3).unwrap();
        let p0 = HomogeneousPoint::from_slice(&[1.0, 1.0, 1.0]).unwrap();
        let seq: Vec<_> = (1..=40)
            .map(|n| diag(&[(n as f64).exp(), (n as f64).exp(), 1.0]))
            .collect();
        let r = check_convergence_dynamics(&s, &seq, &p0, &RunConfig::default()).unwrap();
        assert_eq!(r.rank, 2);
        assert!(r.ok, "{r:?}");
        assert_eq!(r.onto_face, Some(true));
    }

    #[test]
    fn constant_sequence_does_not_converge() {
        let ball = ConvexDomain::ball(2).unwrap();
        let seq = vec![boost(1.0); 5];
        assert!(matches!(
            check_convergence_dynamics(&ball, &seq, ball.center(), &RunConfig::default()),
            Err(GroupError::NotConverged(_))
        ));
    }
}
