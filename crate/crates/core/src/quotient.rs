//! The boundary quotient `[∂ᵢC]_𝒳` on finite samples, its two conditions,
//! and the conical/peripheral labelling of sampled points.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domain::{
    face_of, ideal_boundary_sample, segment_in_boundary, ConvexDomain, ConvexSubset, DomainError,
    FaceSignature, Membership,
};
use crate::group::{enumerate_orbit, GeneratorSet, GroupError};
use crate::linalg::GridIndex;
use crate::metric::distance_to_subset;
use crate::peripheral::{overlap_diameter, PeripheralError, PeripheralFamily};
use crate::projective::HomogeneousPoint;
use crate::tolerance::RunConfig;

/// Chart distance under which two sample points count as the same point.
const SAMPLE_DEDUP: f64 = 1e-12;

/// Errors raised by quotient computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuotientError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Peripheral(#[from] PeripheralError),
    #[error("point is not an ideal boundary point")]
    NotIdealPoint,
    #[error("boundary sample is empty")]
    EmptySample,
    #[error("too few boundary samples")]
    TooFewSamples,
}

/// Sampled ideal points with their faces and family membership.
#[derive(Clone, Debug, Serialize)]
pub struct BoundarySample {
    pub points: Vec<HomogeneousPoint>,
    #[serde(skip)]
    pub faces: Vec<FaceSignature>,
    /// First translate whose face saturation contains the point.
    pub family_membership: Vec<Option<usize>>,
    /// Points claimed by more than one translate.
    pub ambiguous: usize,
}

impl BoundarySample {
    /// Validates and annotates a list of ideal points.
    pub fn new(
        omega: &ConvexDomain,
        family: &PeripheralFamily,
        points: Vec<HomogeneousPoint>,
    ) -> Result<Self, QuotientError> {
        let mut faces = Vec::with_capacity(points.len());
        let mut family_membership = Vec::with_capacity(points.len());
        let mut ambiguous = 0;
        for p in &points {
            if omega.contains(p) != Membership::Boundary {
                return Err(QuotientError::NotIdealPoint);
            }
            faces.push(face_of(omega, p)?.signature);
            let owners = family.membership(p)?;
            if owners.len() > 1 {
                ambiguous += 1;
            }
            family_membership.push(owners.first().copied());
        }
        Ok(Self {
            points,
            faces,
            family_membership,
            ambiguous,
        })
    }

    /// Ideal samples of `C` together with the sampled ideal points of every translate.
    pub fn of_core(
        omega: &ConvexDomain,
        c: &ConvexSubset,
        family: &PeripheralFamily,
        cfg: &RunConfig,
    ) -> Result<Self, QuotientError> {
        let mut pts = match ideal_boundary_sample(omega, c, cfg.boundary_samples) {
            Ok(s) => s,
            Err(DomainError::BoundedSubset) => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        pts.extend(
            family
                .translates()
                .iter()
                .flat_map(|t| t.ideal.iter().cloned()),
        );
        let mut seen = GridIndex::new(SAMPLE_DEDUP);
        let mut out = Vec::with_capacity(pts.len());
        for p in pts {
            let Some(key) = omega.affine_coords(&p) else {
                continue;
            };
            if seen.near(&key).is_empty() {
                seen.insert(key);
                out.push(p);
            }
        }
        Self::new(omega, family, out)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn equivalent(&self, i: usize, j: usize) -> bool {
        i == j
            || self.faces[i] == self.faces[j]
            || matches!((self.family_membership[i], self.family_membership[j]), (Some(a), Some(b)) if a == b)
    }
}

/// Whether two ideal points are identified: same open face, or both in the
/// face saturation of one translate.
pub fn equivalence_decide(
    omega: &ConvexDomain,
    family: &PeripheralFamily,
    x: &HomogeneousPoint,
    y: &HomogeneousPoint,
) -> Result<bool, QuotientError> {
    if omega.contains(x) != Membership::Boundary || omega.contains(y) != Membership::Boundary {
        return Err(QuotientError::NotIdealPoint);
    }
    if face_of(omega, x)? == face_of(omega, y)? {
        return Ok(true);
    }
    let mx = family.membership(x)?;
    let my = family.membership(y)?;
    Ok(mx.iter().any(|a| my.contains(a)))
}

/// Dynamical label of a sampled point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointLabel {
    Conical,
    Peripheral,
    Unknown,
}

/// Orbit data shared by repeated classifications.
struct Recurrence {
    p0: HomogeneousPoint,
    orbit: Vec<HomogeneousPoint>,
    r_rec: f64,
}

impl Recurrence {
    fn new(
        gens: &GeneratorSet,
        p0: &HomogeneousPoint,
        cfg: &RunConfig,
    ) -> Result<Self, QuotientError> {
        let omega = gens.domain();
        if !omega.strictly_inside(p0) {
            return Err(DomainError::NotInterior.into());
        }
        let orbit = enumerate_orbit(gens, p0, cfg.word_len, cfg)?;
        // twice the half-displacement bound of the generators
        let mut r_rec: f64 = 0.0;
        for g in gens.generators() {
            r_rec = r_rec.max(omega.distance(p0, &g.apply(p0).map_err(DomainError::from)?)?);
        }
        Ok(Self {
            p0: p0.clone(),
            orbit: orbit.orbit_points,
            r_rec,
        })
    }

    fn conical(
        &self,
        omega: &ConvexDomain,
        x: &HomogeneousPoint,
        cfg: &RunConfig,
    ) -> Result<bool, QuotientError> {
        if self.orbit.len() < 2 || cfg.ray_grid == 0 {
            return Ok(false);
        }
        let chord = omega.chord(&self.p0, x)?;
        let n = cfg.ray_grid;
        let ok = (1..=n).into_par_iter().all(|k| {
            let s = cfg.ray_depth * k as f64 / n as f64;
            let Ok(p) = chord.point_at(chord.param_at_distance(s)) else {
                return false;
            };
            if !omega.strictly_inside(&p) {
                return false;
            }
            self.orbit
                .iter()
                .any(|q| omega.distance(q, &p).is_ok_and(|d| d <= self.r_rec))
        });
        Ok(ok)
    }
}

/// `Peripheral` if `x` lies in the face saturation of a translate, `Conical`
/// if the ray grid `[p0, x)` stays within `R_rec` of enumerated orbit points,
/// otherwise `Unknown`.
pub fn classify_point(
    omega: &ConvexDomain,
    gens: &GeneratorSet,
    family: &PeripheralFamily,
    x: &HomogeneousPoint,
    p0: &HomogeneousPoint,
    cfg: &RunConfig,
) -> Result<PointLabel, QuotientError> {
    if omega.contains(x) != Membership::Boundary {
        return Err(QuotientError::NotIdealPoint);
    }
    if !family.membership(x)?.is_empty() {
        return Ok(PointLabel::Peripheral);
    }
    let rec = Recurrence::new(gens, p0, cfg)?;
    Ok(if rec.conical(omega, x, cfg)? {
        PointLabel::Conical
    } else {
        PointLabel::Unknown
    })
}

/// Classes of the sampled quotient.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientComplex {
    /// Class index of every sample point.
    pub class_of: Vec<usize>,
    /// Sample indices of every class, in increasing order.
    pub classes: Vec<Vec<usize>>,
    pub class_labels: Vec<PointLabel>,
    /// Pairs of classes with chart-close samples.
    pub adjacency: Vec<(usize, usize)>,
    /// Recurrence radius used for the conical labels.
    pub r_rec: f64,
}

impl QuotientComplex {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        // the smaller index stays the root
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Union-find closure of the equivalence on the sample, with labels from
/// the family's group at the domain's basepoint.
pub fn build_quotient(
    omega: &ConvexDomain,
    sample: &BoundarySample,
    family: &PeripheralFamily,
    cfg: &RunConfig,
) -> Result<QuotientComplex, QuotientError> {
    let n = sample.len();
    if n == 0 {
        return Err(QuotientError::EmptySample);
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n)
                .filter(move |&j| sample.equivalent(i, j))
                .map(move |j| (i, j))
        })
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    for (i, j) in edges {
        union(&mut parent, i, j);
    }
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_class = vec![usize::MAX; n];
    for (i, slot) in class_of.iter_mut().enumerate() {
        let r = find(&mut parent, i);
        if root_class[r] == usize::MAX {
            root_class[r] = classes.len();
            classes.push(Vec::new());
        }
        *slot = root_class[r];
        classes[root_class[r]].push(i);
    }

    let rec = Recurrence::new(family.gens(), omega.center(), cfg)?;
    let class_labels = classes
        .iter()
        .map(|members| {
            if members
                .iter()
                .any(|&i| sample.family_membership[i].is_some())
            {
                return Ok(PointLabel::Peripheral);
            }
            let conical = rec.conical(omega, &sample.points[members[0]], cfg)?;
            Ok(if conical {
                PointLabel::Conical
            } else {
                PointLabel::Unknown
            })
        })
        .collect::<Result<Vec<_>, QuotientError>>()?;

    let mut grid = GridIndex::new(cfg.delta_adj);
    let mut owner: Vec<usize> = Vec::new();
    let mut adjacency = Vec::new();
    for (i, p) in sample.points.iter().enumerate() {
        let Some(c) = omega.affine_coords(p) else {
            continue;
        };
        for j in grid.near(&c) {
            let (a, b) = (class_of[owner[j]], class_of[i]);
            if a != b && (grid.point(j) - &c).norm() < cfg.delta_adj {
                adjacency.push((a.min(b), a.max(b)));
            }
        }
        grid.insert(c);
        owner.push(i);
    }
    adjacency.sort_unstable();
    adjacency.dedup();
    Ok(QuotientComplex {
        class_of,
        classes,
        class_labels,
        adjacency,
        r_rec: rec.r_rec,
    })
}

/// One violation of a condition.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionWitness {
    pub condition: u8,
    /// Sample indices for condition 1, class indices for condition 2.
    pub first: usize,
    pub second: usize,
    /// Overlap diameter for condition 2.
    pub value: Option<f64>,
}

/// Outcome of the two sampled conditions.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub cond1_ok: bool,
    pub cond2_ok: bool,
    /// Boundary segments found among sampled pairs.
    pub boundary_segments: usize,
    /// Class pairs whose hulls were compared.
    pub class_pairs: usize,
    pub max_overlap_diameter: f64,
    pub witnesses: Vec<ConditionWitness>,
    pub classes: usize,
}

/// The convex set `C_x` of a class: the owning translate, or the hull of its samples.
fn class_hull(
    omega: &ConvexDomain,
    sample: &BoundarySample,
    family: &PeripheralFamily,
    members: &[usize],
) -> Option<ConvexSubset> {
    if let Some(t) = members.iter().find_map(|&i| sample.family_membership[i]) {
        return Some(family.translates()[t].subset.clone());
    }
    if members.len() < 2 {
        return None;
    }
    ConvexSubset::hull(
        omega,
        members.iter().map(|&i| sample.points[i].clone()).collect(),
    )
    .ok()
}

/// Condition (1): sampled pairs spanning a boundary segment are equivalent.
/// Condition (2): for inequivalent classes meeting the window, the sampled
/// diameter of `N(C_x, r) ∩ N(C_y, r)` is below `d_bound`.
pub fn check_conditions(
    omega: &ConvexDomain,
    c: &ConvexSubset,
    family: &PeripheralFamily,
    r: f64,
    d_bound: f64,
    cfg: &RunConfig,
) -> Result<ConditionReport, QuotientError> {
    let sample = BoundarySample::of_core(omega, c, family, cfg)?;
    let n = sample.len();
    if n < 2 {
        return Err(QuotientError::TooFewSamples);
    }
    let segments: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let sample = &sample;
            (i + 1..n)
                .filter(move |&j| segment_in_boundary(omega, &sample.points[i], &sample.points[j]))
                .map(move |j| (i, j))
        })
        .collect();
    let mut witnesses: Vec<ConditionWitness> = segments
        .iter()
        .filter(|&&(i, j)| !sample.equivalent(i, j))
        .map(|&(i, j)| ConditionWitness {
            condition: 1,
            first: i,
            second: j,
            value: None,
        })
        .collect();
    let cond1_ok = witnesses.is_empty();

    let q = build_quotient(omega, &sample, family, cfg)?;
    let center = omega.center();
    let hulls: Vec<(usize, ConvexSubset)> = q
        .classes
        .iter()
        .enumerate()
        .filter_map(|(k, m)| class_hull(omega, &sample, family, m).map(|h| (k, h)))
        .filter(|(_, h)| distance_to_subset(omega, center, h, cfg).is_ok_and(|d| d <= cfg.window))
        .collect();
    let mut pairs = Vec::new();
    for (a, (ka, _)) in hulls.iter().enumerate() {
        for (b, (kb, _)) in hulls.iter().enumerate().skip(a + 1) {
            if ka != kb {
                pairs.push((a, b));
            }
        }
    }
    let diameters: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (d1, _) = overlap_diameter(omega, &hulls[a].1, &hulls[b].1, r, cfg);
            let (d2, _) = overlap_diameter(omega, &hulls[b].1, &hulls[a].1, r, cfg);
            d1.max(d2)
        })
        .collect();
    let mut max_overlap_diameter: f64 = 0.0;
    let mut cond2_ok = true;
    for (&(a, b), &d) in pairs.iter().zip(&diameters) {
        max_overlap_diameter = max_overlap_diameter.max(d);
        if d >= d_bound {
            cond2_ok = false;
            witnesses.push(ConditionWitness {
                condition: 2,
                first: hulls[a].0,
                second: hulls[b].0,
                value: Some(d),
            });
        }
    }
    Ok(ConditionReport {
        cond1_ok,
        cond2_ok,
        boundary_segments: segments.len(),
        class_pairs: pairs.len(),
        max_overlap_diameter,
        witnesses,
        classes: q.len(),
    })
}
