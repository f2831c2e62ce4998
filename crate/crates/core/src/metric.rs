//! Hilbert distances, geodesics, distances to convex subsets, Hausdorff
//! distances and the two Hausdorff bounds for segments and hulls.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domain::{
    face_distance, face_of, same_face, Chord, ConvexDomain, ConvexSubset, DomainError,
    FaceSignature, Membership, Simplex, SubsetShape,
};
use crate::linalg::min_norm_point;
use crate::projective::HomogeneousPoint;
use crate::tolerance::{RunConfig, MAX_ARCLENGTH};

/// Errors raised by metric computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    /// Underlying domain failure (`NotInterior`, `FaceMismatch`, ...).
    #[error(transparent)]
    Domain(#[from] DomainError),
    /// A finite point set was empty.
    #[error("empty point set")]
    EmptySet,
    /// A point sequence does not approach the boundary.
    #[error("sequence does not converge to a boundary point")]
    NotConverging,
    /// `s` outside [0, 1].
    #[error("geodesic parameter {0} outside [0, 1]")]
    BadParameter(f64),
}

impl From<crate::projective::ProjectiveError> for MetricError {
    fn from(e: crate::projective::ProjectiveError) -> Self {
        Self::Domain(e.into())
    }
}

/// `d_Ω(x, y) = ½ log [a, x, y, b]`.
pub fn hilbert_distance(
    omega: &ConvexDomain,
    x: &HomogeneousPoint,
    y: &HomogeneousPoint,
) -> Result<f64, MetricError> {
    Ok(omega.distance(x, y)?)
}

/// The point `z` on `[x, y]` with `d(x, z) = s d(x, y)`.
pub fn geodesic_point(
    omega: &ConvexDomain,
    x: &HomogeneousPoint,
    y: &HomogeneousPoint,
    s: f64,
) -> Result<HomogeneousPoint, MetricError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(MetricError::BadParameter(s));
    }
    let total = omega.distance(x, y)?;
    if s == 0.0 || total == 0.0 {
        return Ok(x.clone());
    }
    if s == 1.0 {
        return Ok(y.clone());
    }
    let c = omega.chord(x, y)?;
    Ok(c.point_at(c.param_at_distance(s * total))?)
}

/// Golden-section minimization of `f` over `[lo, hi]`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if hi - lo <= tol {
        let m = 0.5 * (lo + hi);
        return (m, f(m));
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let (flo, fhi) = (f(lo), f(hi));
    [(x1, f1), (x2, f2), (lo, flo), (hi, fhi)]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty")
}

fn dist_or_inf(omega: &ConvexDomain, p: &HomogeneousPoint, v: &DVector<f64>) -> f64 {
    match HomogeneousPoint::new(v.clone()) {
        Ok(z) => omega.distance(p, &z).unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

/// Arclength window of the parameter interval `[lo, hi]` on a chord,
/// clipped to the numerically representable part around `center`.
fn arclength_window(chord: &Chord, lo: f64, hi: f64, center: f64) -> (f64, f64) {
    let ua = if lo <= chord.lam_a {
        f64::NEG_INFINITY
    } else {
        chord.arclength(lo)
    };
    let ub = if hi >= chord.lam_b() {
        f64::INFINITY
    } else {
        chord.arclength(hi)
    };
    let uc = chord.arclength(center.clamp(chord.lam_a, chord.lam_b()));
    let uc = if uc.is_finite() { uc } else { 0.0 };
    (ua.max(uc - MAX_ARCLENGTH), ub.min(uc + MAX_ARCLENGTH))
}

/// Minimizes `d(p, ·)` over the points `z + t (q - z)` with `t ∈ [lo, hi]`,
/// where `z` and `q` are chart-normalized and in the closed domain.
/// Returns `(t, value)`.
fn line_minimize(
    omega: &ConvexDomain,
    p: &HomogeneousPoint,
    z: &DVector<f64>,
    q: &DVector<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Option<(f64, f64)> {
    let zp = HomogeneousPoint::new(z.clone()).ok()?;
    let qp = HomogeneousPoint::new(q.clone()).ok()?;
    let chord = omega.chord(&zp, &qp).ok()?;
    // chord parameters use hats; z and q are already hats so t matches lambda
    let (ua, ub) = arclength_window(
        &chord,
        lo,
        hi,
        0.5 * (lo.max(chord.lam_a) + hi.min(chord.lam_b())),
    );
    if ua.partial_cmp(&ub) != Some(std::cmp::Ordering::Less) {
        return None;
    }
    let f = |u: f64| dist_or_inf(omega, p, &chord.vector_at(chord.param_at_arclength(u)));
    let (u, v) = golden_min(f, ua, ub, tol);
    Some((chord.param_at_arclength(u), v))
}

/// Closest point of a subset, with the minimizing convex weights.
#[derive(Clone, Debug)]
pub struct SubsetDistance {
    pub value: f64,
    pub point: HomogeneousPoint,
    pub weights: Vec<f64>,
}

fn descend(
    omega: &ConvexDomain,
    p: &HomogeneousPoint,
    x: &ConvexSubset,
    mut w: Vec<f64>,
    tol: f64,
    max_sweeps: usize,
) -> Option<(f64, Vec<f64>)> {
    let hats = x.hats();
    let k = hats.len();
    let mut value = dist_or_inf(omega, p, &x.combination(&w));
    if !value.is_finite() {
        return None;
    }
    for _ in 0..max_sweeps {
        let before = value;
        for j in 0..k {
            let z = x.combination(&w);
            // move toward / away from generator j
            let cj = w[j];
            let lo = if cj < 1.0 { -cj / (1.0 - cj) } else { 0.0 };
            if let Some((t, v)) = line_minimize(omega, p, &z, &hats[j], lo, 1.0, tol) {
                if v < value {
                    value = v;
                    for (i, wi) in w.iter_mut().enumerate() {
                        *wi = (1.0 - t) * *wi + if i == j { t } else { 0.0 };
                    }
                }
            }
        }
        if k <= 8 {
            for i in 0..k {
                for j in i + 1..k {
                    // transfer weight between generators i and j
                    let z = x.combination(&w);
                    let (wi, wj) = (w[i], w[j]);
                    if wi + wj <= 0.0 {
                        continue;
                    }
                    let mut wq = w.clone();
                    wq[i] = wi + wj;
                    wq[j] = 0.0;
                    let q = x.combination(&wq);
                    let lo = if wj > 0.0 { -wi / wj } else { 0.0 };
                    if let Some((t, v)) = line_minimize(omega, p, &z, &q, lo.max(-1e6), 1.0, tol) {
                        if v < value {
                            value = v;
                            w[i] = wi + t * wj;
                            w[j] = wj - t * wj;
                        }
                    }
                }
            }
        }
        let s: f64 = w.iter().map(|c| c.max(0.0)).sum();
        w.iter_mut().for_each(|c| *c = c.max(0.0) / s);
        if before - value <= 1e-11 {
            break;
        }
    }
    Some((value, w))
}

/// Minimizes `d(p, ·)` over `X ∩ Ω` by multi-start coordinate descent.
pub fn nearest_in_subset(
    omega: &ConvexDomain,
    p: &HomogeneousPoint,
    x: &ConvexSubset,
    cfg: &RunConfig,
) -> Result<SubsetDistance, MetricError> {
    if !omega.strictly_inside(p) {
        return Err(DomainError::NotInterior.into());
    }
    if x.shape() == SubsetShape::Whole {
        return Ok(SubsetDistance {
            value: 0.0,
            point: p.clone(),
            weights: Vec::new(),
        });
    }
    let k = x.hats().len();
    let tol = 1e-9;
    if k == 1 {
        let v = omega
            .distance(p, &x.generators()[0])
            .map_err(|_| DomainError::EmptySubset)?;
        return Ok(SubsetDistance {
            value: v,
            point: x.generators()[0].clone(),
            weights: vec![1.0],
        });
    }
    if k == 2 {
        let (t, v) = line_minimize(omega, p, &x.hats()[0], &x.hats()[1], 0.0, 1.0, tol)
            .ok_or(DomainError::EmptySubset)?;
        let t = t.clamp(0.0, 1.0);
        let w = vec![1.0 - t, t];
        return Ok(SubsetDistance {
            value: v,
            point: HomogeneousPoint::new(x.combination(&w))?,
            weights: w,
        });
    }
    if x.closure_contains(omega, p) {
        let h = omega.hat(p).ok_or(DomainError::OutsidePoint)?;
        let shifted: Vec<DVector<f64>> = x.hats().iter().map(|g| g - &h).collect();
        let (_, w) = min_norm_point(&shifted);
        return Ok(SubsetDistance {
            value: 0.0,
            point: p.clone(),
            weights: w,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts = vec![vec![1.0 / k as f64; k]];
    for _ in 0..cfg.multi_starts {
        starts.push(x.random_weights(&mut rng));
    }
    let best = starts
        .into_iter()
        .filter_map(|w| descend(omega, p, x, w, tol, 60))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or(DomainError::EmptySubset)?;
    Ok(SubsetDistance {
        value: best.0,
        point: HomogeneousPoint::new(x.combination(&best.1))?,
        weights: best.1,
    })
}

/// `min over X ∩ Ω of d_Ω(p, ·)`.
pub fn distance_to_subset(
    omega: &ConvexDomain,
    p: &HomogeneousPoint,
    x: &ConvexSubset,
    cfg: &RunConfig,
) -> Result<f64, MetricError> {
    Ok(nearest_in_subset(omega, p, x, cfg)?.value)
}

/// Single descent from given weights; used where a good start is known.
pub(crate) fn distance_to_subset_from(
    omega: &ConvexDomain,
    p: &HomogeneousPoint,
    x: &ConvexSubset,
    start: Vec<f64>,
) -> Option<f64> {
    let k = x.hats().len();
    if k <= 2 || x.shape() == SubsetShape::Whole {
        return nearest_in_subset(
            omega,
            p,
            x,
            &RunConfig {
                multi_starts: 0,
                ..RunConfig::default()
            },
        )
        .ok()
        .map(|r| r.value);
    }
    let a = descend(omega, p, x, start, 1e-7, 30).map(|r| r.0);
    let b = descend(omega, p, x, vec![1.0 / k as f64; k], 1e-7, 30).map(|r| r.0);
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff_distance(
    omega: &ConvexDomain,
    a: &[HomogeneousPoint],
    b: &[HomogeneousPoint],
) -> Result<f64, MetricError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::EmptySet);
    }
    let directed = |u: &[HomogeneousPoint], v: &[HomogeneousPoint]| -> Result<f64, MetricError> {
        let per: Vec<Result<f64, MetricError>> = u
            .par_iter()
            .map(|x| {
                let mut best = f64::INFINITY;
                for y in v {
                    best = best.min(omega.distance(x, y)?);
                }
                Ok(best)
            })
            .collect();
        per.into_iter().try_fold(0.0_f64, |m, r| Ok(m.max(r?)))
    };
    Ok(directed(a, b)?.max(directed(b, a)?))
}

/// Closed-form Hilbert distance in a simplex:
/// `½ max_{i,j} log((x_i y_j) / (x_j y_i))` in vertex coordinates.
pub fn simplex_distance_closed_form(
    s: &Simplex,
    x: &HomogeneousPoint,
    y: &HomogeneousPoint,
) -> Result<f64, MetricError> {
    let cx = s
        .vertex_coordinates(x)
        .ok_or(DomainError::NotInRelativeInterior)?;
    let cy = s
        .vertex_coordinates(y)
        .ok_or(DomainError::NotInRelativeInterior)?;
    if cx.iter().chain(&cy).any(|c| *c <= 0.0) {
        return Err(DomainError::NotInRelativeInterior.into());
    }
    let logs: Vec<f64> = cx.iter().zip(&cy).map(|(a, b)| (a / b).ln()).collect();
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(0.5 * (hi - lo))
}

/// Outcome of a sampled Hausdorff inequality.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Sample points of the open segment between two points of the closed
/// domain, spaced evenly in Hilbert arclength over `[-8, 8]` around the midpoint.
fn segment_samples(
    omega: &ConvexDomain,
    a: &HomogeneousPoint,
    b: &HomogeneousPoint,
    n: usize,
) -> Result<Vec<HomogeneousPoint>, MetricError> {
    let chord = omega.chord(a, b)?;
    let (ua, ub) = arclength_window(&chord, 0.0, 1.0, 0.5);
    let span = 8.0;
    let um = chord.arclength(0.5);
    let lo = ua.max(um - span);
    let hi = ub.min(um + span);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let u = lo + (hi - lo) * (k as f64 + 0.5) / n as f64;
        let p = chord.point_at(chord.param_at_arclength(u))?;
        if omega.strictly_inside(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

fn directed_to_segment(
    omega: &ConvexDomain,
    samples: &[HomogeneousPoint],
    target: &ConvexSubset,
    cfg: &RunConfig,
) -> f64 {
    samples
        .par_iter()
        .map(|x| {
            nearest_in_subset(omega, x, target, cfg)
                .map(|r| r.value)
                .unwrap_or(f64::INFINITY)
        })
        .reduce(|| 0.0, f64::max)
}

/// Sampled Hausdorff distance between the open segments `(p1, p2)` and
/// `(q1, q2)`, against the maximum of the endpoint face distances.
pub fn check_segment_hausdorff_bound(
    omega: &ConvexDomain,
    p1: &HomogeneousPoint,
    p2: &HomogeneousPoint,
    q1: &HomogeneousPoint,
    q2: &HomogeneousPoint,
    cfg: &RunConfig,
) -> Result<BoundCheck, MetricError> {
    if !same_face(omega, p1, q1)? || !same_face(omega, p2, q2)? {
        return Err(DomainError::FaceMismatch.into());
    }
    let rhs = face_distance(omega, p1, q1)?.max(face_distance(omega, p2, q2)?);
    let sp = segment_samples(omega, p1, p2, cfg.segment_samples)?;
    let sq = segment_samples(omega, q1, q2, cfg.segment_samples)?;
    let xp = ConvexSubset::segment(omega, p1.clone(), p2.clone())?;
    let xq = ConvexSubset::segment(omega, q1.clone(), q2.clone())?;
    let lhs =
        directed_to_segment(omega, &sp, &xq, cfg).max(directed_to_segment(omega, &sq, &xp, cfg));
    Ok(BoundCheck {
        lhs,
        rhs,
        ok: lhs <= rhs + cfg.tau_samp,
    })
}

/// Weights concentrated toward random vertices so that samples reach deep
/// into ideal corners of the hull.
pub(crate) fn spread_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let scale = rng.random_range(0.0..12.0);
    let mut w: Vec<f64> = (0..k)
        .map(|_| (scale * (rng.random::<f64>() - 0.5)).exp())
        .collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|c| *c /= s);
    w
}

/// Sampled Hausdorff distance between `ConvHull(q) ∩ F(z)` and
/// `ConvHull(p) ∩ F(z)`, against the maximum face distance `d_F(p_j, q_j)`.
pub fn check_hull_hausdorff_bound(
    omega: &ConvexDomain,
    qs: &[HomogeneousPoint],
    ps: &[HomogeneousPoint],
    z: &HomogeneousPoint,
    cfg: &RunConfig,
) -> Result<BoundCheck, MetricError> {
    if qs.len() != ps.len() || qs.is_empty() {
        return Err(MetricError::EmptySet);
    }
    for (p, q) in ps.iter().zip(qs) {
        if !same_face(omega, p, q)? {
            return Err(DomainError::FaceMismatch.into());
        }
    }
    let face = face_of(omega, z)?;
    match &face.signature {
        FaceSignature::Whole => {}
        FaceSignature::Point(_) => {
            return Ok(BoundCheck {
                lhs: 0.0,
                rhs: 0.0,
                ok: true,
            })
        }
        FaceSignature::Facets(_) => {
            if face.dimension == 0 {
                return Ok(BoundCheck {
                    lhs: 0.0,
                    rhs: 0.0,
                    ok: true,
                });
            }
            let sub = ConvexDomain::polytope(&project(&face.vertices, &face.span_basis))?;
            let pr = |v: &[HomogeneousPoint]| -> Result<Vec<HomogeneousPoint>, MetricError> {
                v.iter()
                    .map(|p| {
                        Ok(HomogeneousPoint::new(
                            project(&[p.coords().clone()], &face.span_basis).remove(0),
                        )?)
                    })
                    .collect()
            };
            let zz =
                HomogeneousPoint::new(project(&[z.coords().clone()], &face.span_basis).remove(0))?;
            return check_hull_hausdorff_bound(&sub, &pr(qs)?, &pr(ps)?, &zz, cfg);
        }
    }
    let mut rhs = 0.0_f64;
    for (p, q) in ps.iter().zip(qs) {
        rhs = rhs.max(face_distance(omega, p, q)?);
    }
    let hq = ConvexSubset::hull(omega, qs.to_vec())?;
    let hp = ConvexSubset::hull(omega, ps.to_vec())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let weights: Vec<Vec<f64>> = (0..cfg.hull_samples)
        .map(|_| spread_weights(&mut rng, qs.len()))
        .collect();
    let directed = |from: &ConvexSubset, to: &ConvexSubset| -> f64 {
        // The same-weight point of `to` bounds each sample's distance from
        // above, so samples whose bound is below the running max are skipped.
        let mut bounded: Vec<(f64, usize, HomogeneousPoint)> = weights
            .par_iter()
            .enumerate()
            .filter_map(|(i, w)| {
                let x = HomogeneousPoint::new(from.combination(w)).ok()?;
                if !omega.strictly_inside(&x) || omega.contains(&x) != Membership::Interior {
                    return None;
                }
                Some((dist_or_inf(omega, &x, &to.combination(w)), i, x))
            })
            .collect();
        bounded.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut best = 0.0_f64;
        for (ub, i, x) in bounded {
            if ub <= best {
                break;
            }
            let d = distance_to_subset_from(omega, &x, to, weights[i].clone()).unwrap_or(0.0);
            best = best.max(d.min(ub));
        }
        best
    };
    let lhs = directed(&hq, &hp).max(directed(&hp, &hq));
    Ok(BoundCheck {
        lhs,
        rhs,
        ok: lhs <= rhs + cfg.tau_samp,
    })
}

fn project(points: &[DVector<f64>], basis: &[DVector<f64>]) -> Vec<DVector<f64>> {
    points
        .iter()
        .map(|p| DVector::from_iterator(basis.len(), basis.iter().map(|b| b.dot(p))))
        .collect()
}

/// Report on two sequences converging to boundary points.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct AsymptoticReport {
    pub liminf_dist: f64,
    pub face_equal: bool,
    pub face_dist: Option<f64>,
    /// The face equality holds and the face distance does not exceed the liminf.
    pub ok: bool,
}

fn sequence_limit(
    omega: &ConvexDomain,
    seq: &[HomogeneousPoint],
) -> Result<HomogeneousPoint, MetricError> {
    let n = seq.len();
    if n < 3 {
        return Err(MetricError::NotConverging);
    }
    let c: Vec<DVector<f64>> = seq[n - 3..]
        .iter()
        .map(|p| omega.affine_coords(p).ok_or(MetricError::NotConverging))
        .collect::<Result<_, _>>()?;
    let s1 = (&c[1] - &c[0]).norm();
    let s2 = (&c[2] - &c[1]).norm();
    if s2 > s1 && s2 > 1e-12 {
        return Err(MetricError::NotConverging);
    }
    let last = &seq[n - 1];
    if omega.contains(last) == Membership::Boundary {
        return Ok(last.clone());
    }
    let limit = match omega.chord(&seq[n - 2], last) {
        Ok(ch) => ch.b()?,
        Err(_) => omega.radial_boundary_point(last)?,
    };
    let gap = (omega
        .affine_coords(&limit)
        .ok_or(MetricError::NotConverging)?
        - &c[2])
        .norm();
    if gap > 0.05 {
        return Err(MetricError::NotConverging);
    }
    Ok(limit)
}

/// Checks that asymptotic sequences at bounded distance converge into a
/// common face, with face distance bounded by the liminf of distances.
pub fn check_asymptotic_faces(
    omega: &ConvexDomain,
    ps: &[HomogeneousPoint],
    qs: &[HomogeneousPoint],
    cfg: &RunConfig,
) -> Result<AsymptoticReport, MetricError> {
    if ps.len() != qs.len() {
        return Err(MetricError::NotConverging);
    }
    let p = sequence_limit(omega, ps)?;
    let q = sequence_limit(omega, qs)?;
    // the liminf is estimated on the final tenth of the sequence
    let tail = ps.len() - ps.len().div_ceil(10);
    let mut liminf = f64::INFINITY;
    for (a, b) in ps[tail..].iter().zip(&qs[tail..]) {
        liminf = liminf.min(omega.distance(a, b)?);
    }
    let face_equal = same_face(omega, &p, &q)?;
    let face_dist = if face_equal {
        Some(face_distance(omega, &p, &q)?)
    } else {
        None
    };
    let ok = face_equal && face_dist.is_some_and(|f| f <= liminf + cfg.tau_samp);
    Ok(AsymptoticReport {
        liminf_dist: liminf,
        face_equal,
        face_dist,
        ok,
    })
}
