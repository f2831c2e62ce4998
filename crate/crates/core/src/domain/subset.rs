//! Closed convex subsets generated by finitely many points of the closed domain.

use nalgebra::DVector;
use rand::Rng;

use super::{segment_in_boundary, ConvexDomain, DomainError, Membership};
use crate::linalg::min_norm_point;
use crate::projective::{HomogeneousPoint, ProjectiveMap};
use crate::tolerance::TAU_GEO;

/// How a subset is represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetShape {
    /// Convex hull of the generators, intersected with the domain.
    Hull,
    /// The whole domain.
    Whole,
}

/// `ConvHull(generators) ∩ Ω`, or the whole domain.
#[derive(Clone, Debug)]
pub struct ConvexSubset {
    shape: SubsetShape,
    generators: Vec<HomogeneousPoint>,
    hats: Vec<DVector<f64>>,
    ideal: Vec<bool>,
    basepoint: HomogeneousPoint,
}

impl ConvexSubset {
    /// Hull of points of the closed domain; the hull must meet the open domain.
    pub fn hull(
        omega: &ConvexDomain,
        generators: Vec<HomogeneousPoint>,
    ) -> Result<Self, DomainError> {
        if generators.is_empty() {
            return Err(DomainError::EmptySubset);
        }
        let mut hats = Vec::with_capacity(generators.len());
        let mut ideal = Vec::with_capacity(generators.len());
        for g in &generators {
            if g.dim() != omega.dim() {
                return Err(DomainError::DimensionMismatch {
                    expected: omega.dim(),
                    found: g.dim(),
                });
            }
            match omega.contains(g) {
                Membership::Outside => return Err(DomainError::OutsidePoint),
                m => ideal.push(m == Membership::Boundary),
            }
            hats.push(omega.hat(g).ok_or(DomainError::OutsidePoint)?);
        }
        let centroid = hats
            .iter()
            .fold(DVector::zeros(omega.dim()), |acc, h| acc + h)
            / hats.len() as f64;
        let basepoint = HomogeneousPoint::new(centroid)?;
        if !omega.strictly_inside(&basepoint) || omega.contains(&basepoint) != Membership::Interior
        {
            return Err(DomainError::EmptySubset);
        }
        Ok(Self {
            shape: SubsetShape::Hull,
            generators,
            hats,
            ideal,
            basepoint,
        })
    }

    /// The segment `[a, b]`.
    pub fn segment(
        omega: &ConvexDomain,
        a: HomogeneousPoint,
        b: HomogeneousPoint,
    ) -> Result<Self, DomainError> {
        Self::hull(omega, vec![a, b])
    }

    /// The whole domain as a subset of itself.
    pub fn whole(omega: &ConvexDomain) -> Self {
        Self {
            shape: SubsetShape::Whole,
            generators: Vec::new(),
            hats: Vec::new(),
            ideal: Vec::new(),
            basepoint: omega.center().clone(),
        }
    }

    pub fn shape(&self) -> SubsetShape {
        self.shape
    }

    pub fn generators(&self) -> &[HomogeneousPoint] {
        &self.generators
    }

    /// Chart-normalized generator representatives.
    pub fn hats(&self) -> &[DVector<f64>] {
        &self.hats
    }

    /// A point of the subset in the open domain (the generator centroid).
    pub fn basepoint(&self) -> &HomogeneousPoint {
        &self.basepoint
    }

    /// Generators lying on the boundary of the domain.
    pub fn boundary_generators(&self) -> Vec<HomogeneousPoint> {
        self.generators
            .iter()
            .zip(&self.ideal)
            .filter(|(_, i)| **i)
            .map(|(g, _)| g.clone())
            .collect()
    }

    /// Whether the subset has ideal points (is unbounded in the Hilbert metric).
    pub fn is_unbounded(&self) -> bool {
        match self.shape {
            SubsetShape::Whole => true,
            SubsetShape::Hull => self.ideal.iter().any(|i| *i),
        }
    }

    /// Whether `p` lies in the closure of the subset (within `TAU_GEO`).
    pub fn closure_contains(&self, omega: &ConvexDomain, p: &HomogeneousPoint) -> bool {
        match self.shape {
            SubsetShape::Whole => omega.in_closure(p),
            SubsetShape::Hull => {
                let Some(h) = omega.hat(p) else { return false };
                let shifted: Vec<DVector<f64>> = self.hats.iter().map(|g| g - &h).collect();
                let (x, _) = min_norm_point(&shifted);
                x.norm() <= TAU_GEO * h.norm().max(1.0)
            }
        }
    }

    /// Image of the subset under a map preserving the domain.
    pub fn image(&self, omega: &ConvexDomain, g: &ProjectiveMap) -> Result<Self, DomainError> {
        match self.shape {
            SubsetShape::Whole => Ok(self.clone()),
            SubsetShape::Hull => {
                let gens = self
                    .generators
                    .iter()
                    .map(|p| g.apply(p))
                    .collect::<Result<Vec<_>, _>>()?;
                Self::hull(omega, gens)
            }
        }
    }

    /// Same generator set up to order, at tolerance `tol`.
    pub fn same_generators(&self, other: &Self, tol: f64) -> bool {
        self.shape == other.shape
            && self.generators.len() == other.generators.len()
            && self
                .generators
                .iter()
                .all(|g| other.generators.iter().any(|h| g.approx_eq(h, tol)))
    }

    /// Vector for the convex combination with the given weights.
    pub fn combination(&self, weights: &[f64]) -> DVector<f64> {
        let mut v = DVector::zeros(self.hats[0].len());
        for (h, w) in self.hats.iter().zip(weights) {
            v += h * *w;
        }
        v
    }

    /// Random convex weights (flat Dirichlet).
    pub fn random_weights<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut w: Vec<f64> = (0..self.hats.len())
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        w
    }
}

/// Sample of the ideal boundary `C̄ ∩ ∂Ω`.
pub fn ideal_boundary_sample(
    omega: &ConvexDomain,
    c: &ConvexSubset,
    n: usize,
) -> Result<Vec<HomogeneousPoint>, DomainError> {
    if c.shape == SubsetShape::Whole {
        return omega
            .directions(n)
            .iter()
            .map(|d| omega.ray_endpoint(d))
            .collect();
    }
    let ideal = c.boundary_generators();
    if ideal.is_empty() {
        return Err(DomainError::BoundedSubset);
    }
    let mut out = ideal.clone();
    if out.len() >= n {
        return Ok(out);
    }
    // boundary segments between ideal generators carry further ideal points
    let m = ideal.len().min(200);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let (Some(a), Some(b)) = (omega.hat(&ideal[i]), omega.hat(&ideal[j])) else {
                continue;
            };
            let mid = (a + b) * 0.5;
            if omega.classify_vec(&mid) == Membership::Boundary
                && segment_in_boundary(omega, &ideal[i], &ideal[j])
            {
                edges.push((i, j));
            }
        }
    }
    if edges.is_empty() {
        return Ok(out);
    }
    let per_edge = (n - out.len()).div_ceil(edges.len());
    for (i, j) in edges {
        let a = omega.hat(&ideal[i]).ok_or(DomainError::OutsidePoint)?;
        let b = omega.hat(&ideal[j]).ok_or(DomainError::OutsidePoint)?;
        for k in 1..=per_edge {
            let t = k as f64 / (per_edge + 1) as f64;
            out.push(HomogeneousPoint::new(&a * (1.0 - t) + &b * t)?);
        }
    }
    Ok(out)
}

/// Whether `B` is properly embedded in `C`: the ideal points of `B` are ideal points of `C`.
pub fn is_properly_embedded(
    omega: &ConvexDomain,
    c: &ConvexSubset,
    b: &ConvexSubset,
) -> Result<bool, DomainError> {
    for g in b.generators() {
        if !c.closure_contains(omega, g) {
            return Err(DomainError::NotASubset);
        }
    }
    let sample = match ideal_boundary_sample(omega, b, 64) {
        Ok(s) => s,
        Err(DomainError::BoundedSubset) => return Ok(true),
        Err(e) => return Err(e),
    };
    Ok(sample
        .iter()
        .all(|p| omega.contains(p) == Membership::Boundary && c.closure_contains(omega, p)))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{pt, square};
    use super::*;

    #[test]
    fn diameter_ideal_points() {
        let b = ConvexDomain::ball(2).unwrap();
        let c = ConvexSubset::segment(&b, pt(&[-1.0, 0.0]), pt(&[1.0, 0.0])).unwrap();
        let s = ideal_boundary_sample(&b, &c, 10).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn whole_ball_ideal_points_on_circle() {
        let b = ConvexDomain::ball(2).unwrap();
        let s = ideal_boundary_sample(&b, &ConvexSubset::whole(&b), 8).unwrap();
        assert_eq!(s.len(), 8);
        for p in s {
            let c = b.affine_coords(&p).unwrap();
            assert!((c.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn bounded_hull_has_no_ideal_points() {
        let b = ConvexDomain::ball(2).unwrap();
        let c = ConvexSubset::segment(&b, pt(&[-0.5, 0.0]), pt(&[0.5, 0.0])).unwrap();
        assert_eq!(
            ideal_boundary_sample(&b, &c, 4).unwrap_err(),
            DomainError::BoundedSubset
        );
        assert!(is_properly_embedded(&b, &ConvexSubset::whole(&b), &c).unwrap());
    }

    #[test]
    fn square_triangle_hull_only_has_its_corners() {
        let s = square();
        let c = ConvexSubset::hull(
            &s,
            vec![pt(&[1.0, 0.2]), pt(&[-0.3, 1.0]), pt(&[-1.0, -0.5])],
        )
        .unwrap();
        let samples = ideal_boundary_sample(&s, &c, 20).unwrap();
        assert_eq!(samples.len(), 3);
    }

    #[test]
    fn edge_hull_samples_along_edge() {
        let s = square();
        let c = ConvexSubset::hull(
            &s,
            vec![pt(&[1.0, -1.0]), pt(&[1.0, 1.0]), pt(&[-1.0, 0.0])],
        )
        .unwrap();
        let samples = ideal_boundary_sample(&s, &c, 10).unwrap();
        assert!(samples.len() >= 10);
        assert!(samples
            .iter()
            .all(|p| s.contains(p) == Membership::Boundary));
    }

    #[test]
    fn proper_embedding_examples() {
        let b = ConvexDomain::ball(2).unwrap();
        let d = ConvexSubset::segment(&b, pt(&[-1.0, 0.0]), pt(&[1.0, 0.0])).unwrap();
        assert!(is_properly_embedded(&b, &ConvexSubset::whole(&b), &d).unwrap());

        let s = square();
        let big = ConvexSubset::segment(&s, pt(&[1.0, 0.0]), pt(&[-1.0, 0.0])).unwrap();
        let small = ConvexSubset::segment(&s, pt(&[0.0, 0.0]), pt(&[1.0, 0.0])).unwrap();
        assert!(is_properly_embedded(&s, &big, &small).unwrap());

        let off = ConvexSubset::segment(&s, pt(&[0.0, 0.5]), pt(&[1.0, 0.0])).unwrap();
        assert_eq!(
            is_properly_embedded(&s, &big, &off).unwrap_err(),
            DomainError::NotASubset
        );
    }

    #[test]
    fn hull_membership() {
        let s = square();
        let c = ConvexSubset::hull(&s, vec![pt(&[1.0, 0.0]), pt(&[-1.0, 0.0]), pt(&[0.0, 1.0])])
            .unwrap();
        assert!(c.closure_contains(&s, &pt(&[0.0, 0.5])));
        assert!(!c.closure_contains(&s, &pt(&[0.0, -0.1])));
    }
}
