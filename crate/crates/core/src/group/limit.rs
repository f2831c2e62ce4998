//! Finite approximations of limit sets and convex cores.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::{attracting_fixed_point, enumerate_orbit, GeneratorSet, GroupError};
use crate::domain::{ConvexDomain, ConvexSubset, DomainError, Membership};
use crate::linalg::GridIndex;
use crate::projective::HomogeneousPoint;
use crate::tolerance::{RunConfig, EPS_ACC, LIMIT_DEDUP, TAU_PROX};

/// How a limit point was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    AttractingEigenvector,
    OrbitAccumulation,
}

/// Boundary points approximating the limit set.
#[derive(Clone, Debug, Serialize)]
pub struct LimitSetApprox {
    pub points: Vec<HomogeneousPoint>,
    pub provenance: Vec<Provenance>,
    /// Spectral gap of the source element (eigenvector points only).
    pub gaps: Vec<Option<f64>>,
    /// Number of enumerated elements that were proximal.
    pub proximal_elements: usize,
}

fn chart_key(omega: &ConvexDomain, p: &HomogeneousPoint) -> Option<DVector<f64>> {
    omega.affine_coords(p)
}

/// Attracting fixed points of proximal orbit elements, plus orbit points
/// accumulating on the boundary, deduplicated.
pub fn limit_set_approx(
    gens: &GeneratorSet,
    basepoint: &HomogeneousPoint,
    max_word_len: usize,
    cfg: &RunConfig,
) -> Result<LimitSetApprox, GroupError> {
    let omega = gens.domain();
    let orbit = enumerate_orbit(gens, basepoint, max_word_len, cfg)?;
    let fixed: Vec<Option<(HomogeneousPoint, f64)>> = orbit
        .elements
        .par_iter()
        .map(|e| {
            if e.word.is_empty() {
                return None;
            }
            attracting_fixed_point(&e.map)
                .ok()
                .filter(|(_, gap)| *gap > 1.0 + TAU_PROX)
        })
        .collect();
    let accumulated: Vec<Option<HomogeneousPoint>> = orbit
        .orbit_points
        .par_iter()
        .map(|p| {
            let b = omega.radial_boundary_point(p).ok()?;
            let (cp, cb) = (chart_key(omega, p)?, chart_key(omega, &b)?);
            ((cp - cb).norm() < EPS_ACC).then_some(b)
        })
        .collect();

    let mut set = GridIndex::new(LIMIT_DEDUP);
    let mut fresh = |c: DVector<f64>| -> bool {
        if set.near(&c).is_empty() {
            set.insert(c);
            true
        } else {
            false
        }
    };
    let mut out = LimitSetApprox {
        points: Vec::new(),
        provenance: Vec::new(),
        gaps: Vec::new(),
        proximal_elements: 0,
    };
    for (f, a) in fixed.into_iter().zip(accumulated) {
        if let Some((p, gap)) = f {
            out.proximal_elements += 1;
            if omega.contains(&p) == Membership::Boundary {
                if let Some(c) = chart_key(omega, &p) {
                    if fresh(c) {
                        out.points.push(p);
                        out.provenance.push(Provenance::AttractingEigenvector);
                        out.gaps.push(Some(gap));
                    }
                }
            }
        }
        if let Some(b) = a {
            if omega.contains(&b) == Membership::Boundary {
                if let Some(c) = chart_key(omega, &b) {
                    if fresh(c) {
                        out.points.push(b);
                        out.provenance.push(Provenance::OrbitAccumulation);
                        out.gaps.push(None);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Convex hull of the limit-set approximation.
pub fn convex_core_approx(
    gens: &GeneratorSet,
    max_word_len: usize,
    cfg: &RunConfig,
) -> Result<ConvexSubset, GroupError> {
    let omega = gens.domain();
    let limit = limit_set_approx(gens, omega.center(), max_word_len, cfg)?;
    if limit.points.len() < 2 {
        return Err(GroupError::EmptyLimitSet);
    }
    match ConvexSubset::hull(omega, limit.points) {
        Err(DomainError::EmptySubset) => Err(GroupError::EmptyLimitSet),
        r => Ok(r?),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::group::{boost, schottky_pso21};

    #[test]
    fn boost_limit_set_is_two_points() {
        let ball = Arc::new(ConvexDomain::ball(2).unwrap());
        let g = GeneratorSet::new(Arc::clone(&ball), vec![boost(1.0)]).unwrap();
        let l = limit_set_approx(&g, ball.center(), 4, &RunConfig::default()).unwrap();
        assert_eq!(l.points.len(), 2);
        let core = convex_core_approx(&g, 4, &RunConfig::default()).unwrap();
        assert_eq!(core.generators().len(), 2);
    }

    #[test]
    fn trivial_group_has_empty_limit_set() {
        let ball = Arc::new(ConvexDomain::ball(2).unwrap());
        let g = GeneratorSet::trivial(Arc::clone(&ball));
        assert!(
            limit_set_approx(&g, ball.center(), 3, &RunConfig::default())
                .unwrap()
                .points
                .is_empty()
        );
        assert_eq!(
            convex_core_approx(&g, 3, &RunConfig::default()).unwrap_err(),
            GroupError::EmptyLimitSet
        );
    }

    #[test]
    fn schottky_limit_points_on_circle() {
        let g = schottky_pso21(4.0, std::f64::consts::FRAC_PI_2).unwrap();
        let l = limit_set_approx(&g, g.domain().center(), 5, &RunConfig::default()).unwrap();
        assert!(l.points.len() > 100);
        for p in &l.points {
            let c = g.domain().affine_coords(p).unwrap();
            assert!((c.norm() - 1.0).abs() < 1e-6);
        }
    }
}
