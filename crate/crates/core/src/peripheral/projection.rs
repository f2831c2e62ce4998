//! Closest-point projection onto a convex subset.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::PeripheralError;
use crate::domain::{ConvexDomain, ConvexSubset, DomainError, Membership};
use crate::metric::{geodesic_point, nearest_in_subset, MetricError};
use crate::projective::{HomogeneousPoint, ProjectiveMap};
use crate::tolerance::RunConfig;

/// Ray depths used to approach an ideal point.
const RAY_DEPTHS: usize = 8;
/// Step between the last two ray projections above which they escape.
const ESCAPE_STEP: f64 = 0.5;
/// Random subset points used for the suboptimality certificate.
const CERTIFICATE_SAMPLES: usize = 64;

/// A closest point of `X` to `p`.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectionResult {
    pub minimizer: HomogeneousPoint,
    /// `d(p, minimizer)`; for ideal `p`, the value at the deepest ray sample.
    pub value: f64,
    /// `min` over sampled subset points `s` of `d(p, s) - value` (nonnegative up to `tau_opt`).
    pub certificate: f64,
    pub ideal: bool,
}

fn project_interior(
    omega: &ConvexDomain,
    x: &ConvexSubset,
    p: &HomogeneousPoint,
    cfg: &RunConfig,
) -> Result<ProjectionResult, PeripheralError> {
    if x.closure_contains(omega, p) {
        return Ok(ProjectionResult {
            minimizer: p.clone(),
            value: 0.0,
            certificate: 0.0,
            ideal: false,
        });
    }
    let near = nearest_in_subset(omega, p, x, cfg).map_err(|e| match e {
        MetricError::Domain(DomainError::EmptySubset) => {
            PeripheralError::Domain(DomainError::EmptySubset)
        }
        e => e.into(),
    })?;
    let mut certificate = f64::INFINITY;
    if !x.hats().is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..CERTIFICATE_SAMPLES {
            let w = x.random_weights(&mut rng);
            if let Ok(s) = HomogeneousPoint::new(x.combination(&w)) {
                if let Ok(d) = omega.distance(p, &s) {
                    certificate = certificate.min(d - near.value);
                }
            }
        }
    }
    Ok(ProjectionResult {
        minimizer: near.point,
        value: near.value,
        certificate,
        ideal: false,
    })
}

/// `π_X(p)` for `p` in the closed domain. Ideal points are approached along
/// the ray from the basepoint; if the projections of the ray samples do not
/// settle, `p` lies in the face saturation of `∂ᵢX`.
pub fn closest_point_projection(
    omega: &ConvexDomain,
    x: &ConvexSubset,
    p: &HomogeneousPoint,
    cfg: &RunConfig,
) -> Result<ProjectionResult, PeripheralError> {
    match omega.contains(p) {
        Membership::Outside => Err(DomainError::OutsidePoint.into()),
        Membership::Interior if omega.strictly_inside(p) => project_interior(omega, x, p, cfg),
        _ => {
            let center = omega.center();
            let dir = omega.affine_coords(p).ok_or(DomainError::OutsidePoint)?
                - omega
                    .affine_coords(center)
                    .ok_or(DomainError::OutsidePoint)?;
            let dir: Vec<f64> = dir.iter().copied().collect();
            let mut last: Option<ProjectionResult> = None;
            let mut step = 0.0;
            for k in 1..=RAY_DEPTHS {
                let q = omega.point_at_depth(&dir, k as f64)?;
                let r = project_interior(omega, x, &q, cfg)?;
                if let Some(prev) = &last {
                    step = omega
                        .distance(&prev.minimizer, &r.minimizer)
                        .unwrap_or(f64::INFINITY);
                }
                last = Some(r);
            }
            if step > ESCAPE_STEP {
                return Err(PeripheralError::ProjectionEscapes { step });
            }
            let mut r = last.expect("at least one ray depth");
            r.ideal = true;
            Ok(r)
        }
    }
}

/// Checks of the projection observation at one point.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectionObservation {
    pub value: f64,
    /// `max |d(q, X) - d(q, x)|` over points `q` of `[x, p]`.
    pub sub_segment_defect: f64,
    pub sub_segment_ok: bool,
    /// `max d(g·π(p), π_{gX}(g·p))` over the generators.
    pub equivariance_defect: f64,
    pub equivariance_ok: bool,
    pub ok: bool,
}

/// Verifies that `π` restricted to `[π(p), p]` is constant and that `π`
/// commutes with the given automorphisms.
pub fn check_projection_observation(
    omega: &ConvexDomain,
    x: &ConvexSubset,
    p: &HomogeneousPoint,
    generators: &[ProjectiveMap],
    cfg: &RunConfig,
) -> Result<ProjectionObservation, PeripheralError> {
    if !omega.strictly_inside(p) {
        return Err(DomainError::NotInterior.into());
    }
    let proj = project_interior(omega, x, p, cfg)?;
    let mut sub_segment_defect: f64 = 0.0;
    if proj.value > 0.0 {
        for k in 1..=5 {
            let q = geodesic_point(omega, &proj.minimizer, p, k as f64 / 6.0)?;
            let dq = project_interior(omega, x, &q, cfg)?.value;
            let dx = omega.distance(&q, &proj.minimizer)?;
            sub_segment_defect = sub_segment_defect.max((dq - dx).abs());
        }
    }
    let mut equivariance_defect: f64 = 0.0;
    for g in generators {
        let gx = x.image(omega, g)?;
        let gp = g.apply(p)?;
        let moved = g.apply(&proj.minimizer)?;
        let other = project_interior(omega, &gx, &gp, cfg)?;
        let d = omega
            .distance(&moved, &other.minimizer)
            .unwrap_or(f64::INFINITY);
        equivariance_defect = equivariance_defect.max(d);
    }
    let sub_segment_ok = sub_segment_defect <= cfg.tau_opt;
    let equivariance_ok = equivariance_defect <= 10.0 * cfg.tau_opt;
    Ok(ProjectionObservation {
        value: proj.value,
        sub_segment_defect,
        sub_segment_ok,
        equivariance_defect,
        equivariance_ok,
        ok: sub_segment_ok && equivariance_ok,
    })
}
