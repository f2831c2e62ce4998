//! Candidate peripheral families: translates of convex subsets under a group,
//! their isolation, simplex containment, projections and face structure.

mod isolation;
mod projection;
mod simplex_search;
mod structure;

pub use isolation::{
    overlap_diameter, simplex_coarse_containment, strong_isolation_report, window_samples,
    IsolationReport, PairDiameter,
};
pub use projection::{
    check_projection_observation, closest_point_projection, ProjectionObservation, ProjectionResult,
};
pub use simplex_search::find_nearby_simplex;
pub use structure::{structure_constants_report, StructureReport};

use std::collections::HashMap;

use nalgebra::DVector;
use thiserror::Error;

use crate::domain::{
    face_of, ideal_boundary_sample, ConvexDomain, ConvexSubset, DomainError, FaceSignature,
};
use crate::group::{enumerate_orbit, GeneratorSet, GroupError, Word};
use crate::linalg::GridIndex;
use crate::metric::MetricError;
use crate::projective::{HomogeneousPoint, ProjectiveError};
use crate::tolerance::{RunConfig, FACE_POINT_RESOLUTION};

/// Errors raised by peripheral-family computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeripheralError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Group(#[from] GroupError),
    /// Fewer than two translates meet the sampling window.
    #[error("only {0} translate(s) meet the sampling window")]
    TooFewTranslates(usize),
    /// A family representative has no ideal points.
    #[error("representative {0} is bounded")]
    BoundedRepresentative(usize),
    /// A simplex handed to the containment check is not properly embedded.
    #[error("simplex {0} is not properly embedded")]
    NotProperlyEmbedded(usize),
    /// Projections along the ray toward an ideal point do not settle.
    #[error("projections escape along the ray (step {step})")]
    ProjectionEscapes { step: f64 },
    /// Not enough ideal boundary samples.
    #[error("too few boundary samples")]
    TooFewSamples,
}

impl From<ProjectiveError> for PeripheralError {
    fn from(e: ProjectiveError) -> Self {
        Self::Domain(e.into())
    }
}

/// A translate `g · X_j` of a representative.
#[derive(Clone, Debug)]
pub struct Translate {
    pub subset: ConvexSubset,
    pub word: Word,
    pub representative: usize,
    /// Sampled ideal boundary of the translate.
    pub ideal: Vec<HomogeneousPoint>,
}

/// Which translates own which open faces, on sampled ideal points.
#[derive(Clone, Debug, Default)]
pub struct FaceRegistry {
    points: Option<GridIndex>,
    point_owner: Vec<usize>,
    facets: HashMap<Vec<usize>, Vec<usize>>,
}

impl FaceRegistry {
    fn grid(&mut self) -> &mut GridIndex {
        self.points
            .get_or_insert_with(|| GridIndex::new(FACE_POINT_RESOLUTION))
    }

    /// Records that `owner` has an ideal point `x` with the given face.
    pub fn register(
        &mut self,
        omega: &ConvexDomain,
        x: &HomogeneousPoint,
        owner: usize,
    ) -> Result<(), DomainError> {
        match face_of(omega, x)?.signature {
            FaceSignature::Facets(f) => {
                let v = self.facets.entry(f).or_default();
                if !v.contains(&owner) {
                    v.push(owner);
                }
            }
            FaceSignature::Point(_) => {
                let c = omega.affine_coords(x).ok_or(DomainError::OutsidePoint)?;
                self.grid().insert(c);
                self.point_owner.push(owner);
            }
            FaceSignature::Whole => return Err(DomainError::NotInterior),
        }
        Ok(())
    }

    /// Owners of the open face of `x`, sorted.
    pub fn owners(
        &self,
        omega: &ConvexDomain,
        x: &HomogeneousPoint,
    ) -> Result<Vec<usize>, DomainError> {
        let mut out = match face_of(omega, x)?.signature {
            FaceSignature::Facets(f) => self.facets.get(&f).cloned().unwrap_or_default(),
            FaceSignature::Point(_) => {
                let c = omega.affine_coords(x).ok_or(DomainError::OutsidePoint)?;
                match &self.points {
                    Some(g) => g
                        .near(&c)
                        .into_iter()
                        .map(|i| self.point_owner[i])
                        .collect(),
                    None => Vec::new(),
                }
            }
            FaceSignature::Whole => Vec::new(),
        };
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Pairs of distinct owners sharing a sampled face.
    pub fn conflicts(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for owners in self.facets.values() {
            push_pairs(owners, &mut out);
        }
        if let Some(g) = &self.points {
            for i in 0..g.len() {
                let c = g.point(i);
                let owners: Vec<usize> =
                    g.near(c).into_iter().map(|j| self.point_owner[j]).collect();
                push_pairs(&owners, &mut out);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn push_pairs(owners: &[usize], out: &mut Vec<(usize, usize)>) {
    for (k, a) in owners.iter().enumerate() {
        for b in &owners[k + 1..] {
            if a != b {
                out.push(((*a).min(*b), (*a).max(*b)));
            }
        }
    }
}

/// Representatives `X_1..X_m` and their translates by words up to a given length.
#[derive(Clone, Debug)]
pub struct PeripheralFamily {
    representatives: Vec<ConvexSubset>,
    gens: GeneratorSet,
    word_len: usize,
    translates: Vec<Translate>,
    /// Images too close to the boundary to resolve numerically.
    unresolved: usize,
    faces: FaceRegistry,
}

/// Ideal points sampled per translate.
const IDEAL_PER_TRANSLATE: usize = 16;

impl PeripheralFamily {
    /// Translates every representative by the group elements of length at
    /// most `word_len`, merging coincident translates.
    pub fn new(
        gens: GeneratorSet,
        representatives: Vec<ConvexSubset>,
        word_len: usize,
        cfg: &RunConfig,
    ) -> Result<Self, PeripheralError> {
        let omega = gens.domain_arc();
        for (i, x) in representatives.iter().enumerate() {
            if !x.is_unbounded() {
                return Err(PeripheralError::BoundedRepresentative(i));
            }
        }
        let orbit = enumerate_orbit(&gens, omega.center(), word_len, cfg)?;
        let mut translates: Vec<Translate> = Vec::new();
        let mut index = GridIndex::new(1e-9);
        let mut unresolved = 0;
        for e in &orbit.elements {
            for (j, x) in representatives.iter().enumerate() {
                let Ok(img) = x.image(&omega, &e.map) else {
                    unresolved += 1;
                    continue;
                };
                let key = generator_key(&omega, &img);
                let dup = index
                    .near(&key)
                    .into_iter()
                    .any(|i| translates[i].subset.same_generators(&img, 1e-9));
                if dup {
                    continue;
                }
                let ideal = match ideal_boundary_sample(&omega, &img, IDEAL_PER_TRANSLATE) {
                    Ok(s) => s,
                    Err(DomainError::BoundedSubset) => Vec::new(),
                    Err(err) => return Err(err.into()),
                };
                index.insert(key);
                translates.push(Translate {
                    subset: img,
                    word: e.word.clone(),
                    representative: j,
                    ideal,
                });
            }
        }
        let mut faces = FaceRegistry::default();
        for (i, t) in translates.iter().enumerate() {
            for x in &t.ideal {
                faces.register(&omega, x, i)?;
            }
        }
        Ok(Self {
            representatives,
            gens,
            word_len,
            translates,
            unresolved,
            faces,
        })
    }

    /// A family of fixed subsets with no group action.
    pub fn fixed(
        omega: std::sync::Arc<ConvexDomain>,
        members: Vec<ConvexSubset>,
        cfg: &RunConfig,
    ) -> Result<Self, PeripheralError> {
        Self::new(GeneratorSet::trivial(omega), members, 0, cfg)
    }

    pub fn representatives(&self) -> &[ConvexSubset] {
        &self.representatives
    }

    pub fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn domain(&self) -> &ConvexDomain {
        self.gens.domain()
    }

    pub fn word_len(&self) -> usize {
        self.word_len
    }

    pub fn translates(&self) -> &[Translate] {
        &self.translates
    }

    pub fn unresolved(&self) -> usize {
        self.unresolved
    }

    pub fn faces(&self) -> &FaceRegistry {
        &self.faces
    }

    /// Translates whose face saturation `F(∂ᵢX)` contains `x`.
    pub fn membership(&self, x: &HomogeneousPoint) -> Result<Vec<usize>, DomainError> {
        self.faces.owners(self.domain(), x)
    }
}

/// Order-independent key of a generator set: the sum of chart coordinates.
fn generator_key(omega: &ConvexDomain, x: &ConvexSubset) -> DVector<f64> {
    let k = omega.chart_basis().len();
    x.generators()
        .iter()
        .filter_map(|g| omega.affine_coords(g))
        .fold(DVector::zeros(k), |acc, c| acc + c)
}
