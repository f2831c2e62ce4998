//! Strong isolation and coarse containment of simplices, estimated inside a window.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{PeripheralError, PeripheralFamily};
use crate::domain::{
    detect_properly_embedded_simplex, ConvexDomain, ConvexSubset, Simplex, SubsetShape,
};
use crate::metric::{distance_to_subset, spread_weights};
use crate::projective::HomogeneousPoint;
use crate::tolerance::RunConfig;

/// Largest point count used for pairwise diameters.
const DIAMETER_CAP: usize = 400;

/// Points of `X ∩ Ω` within Hilbert distance `cfg.window` of the domain's basepoint.
pub fn window_samples(
    omega: &ConvexDomain,
    x: &ConvexSubset,
    cfg: &RunConfig,
) -> Vec<HomogeneousPoint> {
    let center = omega.center();
    let in_window = |p: &HomogeneousPoint| {
        omega.strictly_inside(p) && omega.distance(center, p).is_ok_and(|d| d <= cfg.window)
    };
    if x.shape() == SubsetShape::Whole {
        let mut out = vec![center.clone()];
        for dir in omega.directions(cfg.boundary_samples) {
            for k in 1..=cfg.window.floor() as usize {
                if let Ok(p) = omega.point_at_depth(&dir, k as f64) {
                    out.push(p);
                }
            }
        }
        return out;
    }
    let k = x.hats().len();
    if k == 1 {
        return x
            .generators()
            .iter()
            .filter(|p| in_window(p))
            .cloned()
            .collect();
    }
    let weights: Vec<Vec<f64>> = if k == 2 {
        // logistic parameter: evenly spaced in arclength near ideal endpoints
        let n = 2 * cfg.segment_samples;
        (0..n)
            .map(|i| {
                let u = -40.0 + 80.0 * (i as f64 + 0.5) / n as f64;
                let s = 1.0 / (1.0 + (-u).exp());
                vec![1.0 - s, s]
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..cfg.hull_samples)
            .map(|_| spread_weights(&mut rng, k))
            .collect()
    };
    weights
        .par_iter()
        .filter_map(|w| HomogeneousPoint::new(x.combination(w)).ok())
        .filter(|p| in_window(p))
        .collect()
}

fn diameter(omega: &ConvexDomain, pts: &[HomogeneousPoint], collinear: bool) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    if collinear {
        // points were generated in order along a line
        return omega.distance(&pts[0], &pts[pts.len() - 1]).unwrap_or(0.0);
    }
    let stride = pts.len().div_ceil(DIAMETER_CAP);
    let sub: Vec<&HomogeneousPoint> = pts.iter().step_by(stride).collect();
    sub.par_iter()
        .enumerate()
        .map(|(i, a)| {
            sub[i + 1..]
                .iter()
                .map(|b| omega.distance(a, b).unwrap_or(0.0))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Diameter of the sampled set `{p ∈ X1 ∩ window : d(p, X2) < 2r}`, with its size.
pub fn overlap_diameter(
    omega: &ConvexDomain,
    x1: &ConvexSubset,
    x2: &ConvexSubset,
    r: f64,
    cfg: &RunConfig,
) -> (f64, usize) {
    let samples = window_samples(omega, x1, cfg);
    let kept: Vec<HomogeneousPoint> = samples
        .into_par_iter()
        .filter(|p| distance_to_subset(omega, p, x2, cfg).is_ok_and(|d| d < 2.0 * r))
        .collect();
    let collinear = x1.shape() == SubsetShape::Hull && x1.hats().len() == 2;
    (diameter(omega, &kept, collinear), kept.len())
}

/// Overlap diameter of one pair of translates.
#[derive(Clone, Debug, Serialize)]
pub struct PairDiameter {
    pub first: usize,
    pub second: usize,
    pub diameter: f64,
    pub kept: usize,
}

/// Window-relative estimates of the isolation constants of a family.
#[derive(Clone, Debug, Serialize)]
pub struct IsolationReport {
    pub r: f64,
    pub window: f64,
    /// Indices of the translates meeting the window.
    pub translates_in_window: Vec<usize>,
    pub pair_diameters: Vec<PairDiameter>,
    #[serde(rename = "D1_hat")]
    pub d1_hat: f64,
    #[serde(rename = "D2_hat")]
    pub d2_hat: Option<f64>,
    #[serde(rename = "L_hat")]
    pub l_hat: Option<f64>,
    #[serde(rename = "R_hat")]
    pub r_hat: Option<f64>,
    pub note: &'static str,
}

/// Sampled diameters of `N(X1, r) ∩ N(X2, r)` over pairs of translates in the window.
pub fn strong_isolation_report(
    omega: &ConvexDomain,
    family: &PeripheralFamily,
    r: f64,
    cfg: &RunConfig,
) -> Result<IsolationReport, PeripheralError> {
    let center = omega.center();
    let in_window: Vec<usize> = family
        .translates()
        .par_iter()
        .enumerate()
        .filter(|(_, t)| {
            distance_to_subset(omega, center, &t.subset, cfg).is_ok_and(|d| d <= cfg.window)
        })
        .map(|(i, _)| i)
        .collect();
    if in_window.len() < 2 {
        return Err(PeripheralError::TooFewTranslates(in_window.len()));
    }
    let mut pairs = Vec::new();
    for (a, &i) in in_window.iter().enumerate() {
        for &j in &in_window[a + 1..] {
            pairs.push((i, j));
        }
    }
    let ts = family.translates();
    let pair_diameters: Vec<PairDiameter> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (d1, k1) = overlap_diameter(omega, &ts[i].subset, &ts[j].subset, r, cfg);
            let (d2, k2) = overlap_diameter(omega, &ts[j].subset, &ts[i].subset, r, cfg);
            PairDiameter {
                first: i,
                second: j,
                diameter: d1.max(d2),
                kept: k1 + k2,
            }
        })
        .collect();
    let d1_hat = pair_diameters
        .iter()
        .map(|p| p.diameter)
        .fold(0.0, f64::max);
    Ok(IsolationReport {
        r,
        window: cfg.window,
        translates_in_window: in_window,
        pair_diameters,
        d1_hat,
        d2_hat: None,
        l_hat: None,
        r_hat: None,
        note: "window-relative estimates; pairs are filtered by d(., X2) < 2r",
    })
}

/// For each simplex, the least family member distance bound over sampled
/// simplex points in the window; returns per-simplex radii and their maximum.
pub fn simplex_coarse_containment(
    omega: &ConvexDomain,
    family: &PeripheralFamily,
    simplices: &[Simplex],
    cfg: &RunConfig,
) -> Result<(Vec<f64>, f64), PeripheralError> {
    let mut radii = Vec::with_capacity(simplices.len());
    for (i, s) in simplices.iter().enumerate() {
        if detect_properly_embedded_simplex(omega, s.vertices())?.is_none() {
            return Err(PeripheralError::NotProperlyEmbedded(i));
        }
        let hull = ConvexSubset::hull(omega, s.vertices().to_vec())?;
        let samples = window_samples(omega, &hull, cfg);
        let radius = family
            .translates()
            .par_iter()
            .map(|t| {
                samples
                    .iter()
                    .map(|p| distance_to_subset(omega, p, &t.subset, cfg).unwrap_or(f64::INFINITY))
                    .fold(0.0, f64::max)
            })
            .reduce(|| f64::INFINITY, f64::min);
        radii.push(radius);
    }
    let d2 = radii.iter().copied().fold(0.0, f64::max);
    Ok((radii, d2))
}
