//! Sampled face structure of a family: disjointness of face saturations,
//! the constants L and R, and co-compactness radii of stabilizers.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{window_samples, PeripheralError, PeripheralFamily};
use crate::domain::{
    face_distance, face_of, ideal_boundary_sample, ConvexDomain, ConvexSubset, DomainError,
    FaceSignature,
};
use crate::group::enumerate_orbit;
use crate::projective::HomogeneousPoint;
use crate::tolerance::RunConfig;

/// Points per face kept for pairwise face diameters.
const FACE_GROUP_CAP: usize = 64;

/// Empirical structure constants of a family.
#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    /// No two distinct translates share a sampled face.
    pub face_disjoint: bool,
    /// Pairs of translates sharing a sampled face.
    pub conflicts: Vec<(usize, usize)>,
    /// Largest face diameter of `F(x) ∩ ∂ᵢC` over sampled `x` outside every `F(∂ᵢX)`.
    #[serde(rename = "L_hat")]
    pub l_hat: f64,
    /// Largest directed face-Hausdorff gap from `F(x) ∩ ∂ᵢC` to `F(x) ∩ ∂ᵢX`.
    #[serde(rename = "R_hat")]
    pub r_hat: f64,
    /// Per representative: least `ρ` with sampled `X ⊂ Stab(X)·B(p0, ρ)`.
    pub cocompact_radius: Vec<Option<f64>>,
    pub boundary_samples: usize,
    pub note: &'static str,
}

fn face_diameter(omega: &ConvexDomain, pts: &[&HomogeneousPoint]) -> f64 {
    let stride = pts.len().div_ceil(FACE_GROUP_CAP).max(1);
    let sub: Vec<&HomogeneousPoint> = pts.iter().step_by(stride).copied().collect();
    let mut best: f64 = 0.0;
    for (i, a) in sub.iter().enumerate() {
        for b in &sub[i + 1..] {
            if let Ok(d) = face_distance(omega, a, b) {
                best = best.max(d);
            }
        }
    }
    best
}

/// Face structure report for `C` and a family.
pub fn structure_constants_report(
    omega: &ConvexDomain,
    c: &ConvexSubset,
    family: &PeripheralFamily,
    cfg: &RunConfig,
) -> Result<StructureReport, PeripheralError> {
    let conflicts = family.faces().conflicts();
    let samples = match ideal_boundary_sample(omega, c, cfg.boundary_samples) {
        Ok(s) if !s.is_empty() => s,
        Ok(_) | Err(DomainError::BoundedSubset) => return Err(PeripheralError::TooFewSamples),
        Err(e) => return Err(e.into()),
    };
    let faces: Vec<FaceSignature> = samples
        .iter()
        .map(|x| face_of(omega, x).map(|f| f.signature))
        .collect::<Result<_, _>>()?;
    // group sampled points of ∂ᵢC by polytope face; singleton faces have diameter 0
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, f) in faces.iter().enumerate() {
        if let FaceSignature::Facets(k) = f {
            groups.entry(k.clone()).or_default().push(i);
        }
    }
    let mut l_hat: f64 = 0.0;
    for idx in groups.values() {
        let outside = idx.iter().any(|&i| {
            family
                .membership(&samples[i])
                .map(|m| m.is_empty())
                .unwrap_or(false)
        });
        if outside && idx.len() > 1 {
            let pts: Vec<&HomogeneousPoint> = idx.iter().map(|&i| &samples[i]).collect();
            l_hat = l_hat.max(face_diameter(omega, &pts));
        }
    }

    let r_hat = family
        .translates()
        .par_iter()
        .map(|t| {
            let mut gap: f64 = 0.0;
            for x in &t.ideal {
                let Ok(fx) = face_of(omega, x) else { continue };
                let FaceSignature::Facets(k) = &fx.signature else {
                    continue;
                };
                let Some(idx) = groups.get(k) else { continue };
                let own: Vec<&HomogeneousPoint> = t
                    .ideal
                    .iter()
                    .filter(|y| face_of(omega, y).is_ok_and(|f| f == fx))
                    .collect();
                for &i in idx {
                    let d = own
                        .iter()
                        .filter_map(|b| face_distance(omega, &samples[i], b).ok())
                        .fold(f64::INFINITY, f64::min);
                    if d.is_finite() {
                        gap = gap.max(d);
                    }
                }
            }
            gap
        })
        .reduce(|| 0.0, f64::max);

    let orbit = enumerate_orbit(family.gens(), omega.center(), family.word_len(), cfg)?;
    let cocompact_radius = family
        .representatives()
        .iter()
        .map(|rep| {
            let stab: Vec<HomogeneousPoint> = orbit
                .elements
                .iter()
                .zip(&orbit.orbit_points)
                .filter(|(e, _)| {
                    rep.image(omega, &e.map)
                        .is_ok_and(|img| img.same_generators(rep, 1e-9))
                })
                .map(|(_, p)| p.clone())
                .collect();
            let pts = window_samples(omega, rep, cfg);
            if pts.is_empty() {
                return None;
            }
            let rho = pts
                .par_iter()
                .map(|s| {
                    stab.iter()
                        .filter_map(|g| omega.distance(s, g).ok())
                        .fold(f64::INFINITY, f64::min)
                })
                .reduce(|| 0.0, f64::max);
            rho.is_finite().then_some(rho)
        })
        .collect();

    Ok(StructureReport {
        face_disjoint: conflicts.is_empty(),
        conflicts,
        l_hat,
        r_hat,
        cocompact_radius,
        boundary_samples: samples.len(),
        note:
            "co-compactness on the hull of F(∂ᵢX) ∩ ∂ᵢC is tested only through sampled surrogates",
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use nalgebra::DVector;

    use super::super::tests::{commutator_family, pt};
    use super::*;
    use crate::group::{boost, GeneratorSet};

    #[test]
    fn single_axis_in_ball() {
        let ball = Arc::new(ConvexDomain::ball(2).unwrap());
        let g = GeneratorSet::new(Arc::clone(&ball), vec![boost(1.0)]).unwrap();
        let axis = ConvexSubset::segment(&ball, pt(&[-1.0, 0.0]), pt(&[1.0, 0.0])).unwrap();
        let f = PeripheralFamily::new(g, vec![axis.clone()], 6, &RunConfig::default()).unwrap();
        assert_eq!(f.translates().len(), 1);
        let r = structure_constants_report(&ball, &axis, &f, &RunConfig::default()).unwrap();
        assert!(r.face_disjoint);
        assert_eq!(r.r_hat, 0.0);
        // stabilizer translates by 1, so every window point is within 1/2 of an orbit point
        assert!(r.cocompact_radius[0].unwrap() <= 0.5 + 1e-6);
    }

    #[test]
    fn schottky_commutator_family_face_disjoint() {
        let f = commutator_family(6);
        let core = ConvexSubset::whole(f.domain());
        let r = structure_constants_report(f.domain(), &core, &f, &RunConfig::default()).unwrap();
        assert!(
            r.face_disjoint,
            "{:?}",
            &r.conflicts[..r.conflicts.len().min(4)]
        );
    }

    #[test]
    fn square_edge_segment_has_positive_r() {
        let sq = Arc::new(
            ConvexDomain::polytope(&[
                DVector::from_row_slice(&[1.0, 1.0, 1.0]),
                DVector::from_row_slice(&[1.0, -1.0, 1.0]),
                DVector::from_row_slice(&[1.0, -1.0, -1.0]),
                DVector::from_row_slice(&[1.0, 1.0, -1.0]),
            ])
            .unwrap(),
        );
        let x = ConvexSubset::segment(&sq, pt(&[-1.0, 0.0]), pt(&[1.0, 0.0])).unwrap();
        let f = PeripheralFamily::fixed(Arc::clone(&sq), vec![x], &RunConfig::default()).unwrap();
        let r =
            structure_constants_report(&sq, &ConvexSubset::whole(&sq), &f, &RunConfig::default())
                .unwrap();
        assert!(r.r_hat > 0.0);
    }
}
