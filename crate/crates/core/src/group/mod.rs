//! Discrete groups of projective automorphisms of a domain.

mod builders;
mod dynamics;
mod limit;
mod orbit;

pub use builders::{
    boost, boost_along, coxeter_generators, coxeter_gram, rotation, schottky_pso21, schottky_t_min,
};
pub use dynamics::{
    attracting_fixed_point, axis_of, check_convergence_dynamics, translation_distance,
    ConvergenceReport,
};
pub use limit::{convex_core_approx, limit_set_approx, LimitSetApprox, Provenance};
pub use orbit::{enumerate_orbit, GroupElement, OrbitResult};

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::domain::{ConvexDomain, DomainError, Membership};
use crate::metric::MetricError;
use crate::projective::{ProjectiveError, ProjectiveMap};

/// Errors raised by group computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error(transparent)]
    Projective(#[from] ProjectiveError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    /// A generator (or its inverse) does not preserve the domain.
    #[error("generator {generator} does not preserve the domain")]
    DomainNotPreserved { generator: usize },
    /// A generator has the wrong size for the domain.
    #[error("generator {generator} has dimension {found}, domain has {expected}")]
    DimensionMismatch {
        generator: usize,
        expected: usize,
        found: usize,
    },
    /// More generators than available letters.
    #[error("at most 26 generators are supported")]
    TooManyGenerators,
    /// A word string could not be parsed.
    #[error("invalid word {0:?}")]
    BadWord(String),
    /// A word uses a letter beyond the generator count.
    #[error("word letter {letter} refers to a missing generator")]
    UnknownLetter { letter: char },
    /// Requested word length exceeds the configured cap.
    #[error("word length {requested} exceeds cap {cap}")]
    WordTooLong { requested: usize, cap: usize },
    /// Orbit enumeration exceeded the element limit.
    #[error("orbit enumeration exceeded {0} elements")]
    MemoryGuard(usize),
    /// The element has no simple dominant real eigenvalue.
    #[error("element is not proximal")]
    NotProximal,
    /// The line through the fixed points misses the open domain.
    #[error("axis misses the domain")]
    AxisMissesDomain,
    /// No limit points were found.
    #[error("limit set approximation is empty")]
    EmptyLimitSet,
    /// Orbit points or matrices did not converge.
    #[error("sequence did not converge: {0}")]
    NotConverged(String),
    /// A Coxeter relation failed.
    #[error("relation (s{i} s{j})^{m} violated by {defect:e}")]
    RelationViolated {
        i: usize,
        j: usize,
        m: u32,
        defect: f64,
    },
    /// The Schottky parameters do not satisfy the ping-pong condition.
    #[error("ping-pong fails: t = {t} below t_min = {t_min}")]
    PingPongFails { t: f64, t_min: f64 },
    /// A short reduced word is numerically trivial.
    #[error("reduced word {0} is trivial; group not free")]
    NotFree(String),
}

/// A generator or inverse generator: index `2 i` is generator `i`, `2 i + 1` its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u8);

impl Letter {
    pub fn generator(self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.0 / 2) as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }
}

/// A word in the generators, read left to right as a matrix product.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses a word such as `"abAB"`; lowercase letters are generators,
/// uppercase their inverses, `"1"` or `""` the identity.
pub fn parse_word(text: &str) -> Result<Word, GroupError> {
    let t = text.trim();
    if t.is_empty() || t == "1" {
        return Ok(Word::default());
    }
    if t.len() > 4096 {
        return Err(GroupError::BadWord(t.chars().take(16).collect()));
    }
    t.chars()
        .map(|c| {
            if c.is_ascii_lowercase() {
                Ok(Letter((c as u8 - b'a') * 2))
            } else if c.is_ascii_uppercase() {
                Ok(Letter((c as u8 - b'A') * 2 + 1))
            } else {
                Err(GroupError::BadWord(t.to_string()))
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Word)
}

/// Generators of a group preserving a domain.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    domain: Arc<ConvexDomain>,
    generators: Vec<ProjectiveMap>,
    involution: Vec<bool>,
}

impl GeneratorSet {
    /// Validates that every generator and its inverse preserve the domain on
    /// sampled interior and boundary points.
    pub fn new(
        domain: Arc<ConvexDomain>,
        generators: Vec<ProjectiveMap>,
    ) -> Result<Self, GroupError> {
        if generators.len() > 26 {
            return Err(GroupError::TooManyGenerators);
        }
        let (interior, boundary) = domain.validation_samples(16)?;
        let mut involution = Vec::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if g.dim() != domain.dim() {
                return Err(GroupError::DimensionMismatch {
                    generator: i,
                    expected: domain.dim(),
                    found: g.dim(),
                });
            }
            for h in [g.clone(), g.inverse()] {
                for p in &interior {
                    let q = h.apply(p)?;
                    if domain.contains(&q) == Membership::Outside || !domain.strictly_inside(&q) {
                        return Err(GroupError::DomainNotPreserved { generator: i });
                    }
                }
                for p in &boundary {
                    if domain.contains(&h.apply(p)?) != Membership::Boundary {
                        return Err(GroupError::DomainNotPreserved { generator: i });
                    }
                }
            }
            involution.push(g.compose(g).is_identity(1e-10));
        }
        Ok(Self {
            domain,
            generators,
            involution,
        })
    }

    /// The trivial group.
    pub fn trivial(domain: Arc<ConvexDomain>) -> Self {
        Self {
            domain,
            generators: Vec::new(),
            involution: Vec::new(),
        }
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn domain_arc(&self) -> Arc<ConvexDomain> {
        Arc::clone(&self.domain)
    }

    pub fn generators(&self) -> &[ProjectiveMap] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Whether generator `i` has order two.
    pub fn is_involution(&self, i: usize) -> bool {
        self.involution[i]
    }

    /// Letters in enumeration order; involutions contribute one letter.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for i in 0..self.generators.len() {
            out.push(Letter((2 * i) as u8));
            if !self.involution[i] {
                out.push(Letter((2 * i + 1) as u8));
            }
        }
        out
    }

    /// Whether appending `next` after `last` keeps a word reduced.
    pub fn reduces(&self, last: Letter, next: Letter) -> bool {
        if self.involution[last.generator()] {
            last.generator() == next.generator()
        } else {
            next == last.inverse()
        }
    }

    pub fn letter_map(&self, l: Letter) -> ProjectiveMap {
        let g = &self.generators[l.generator()];
        if l.is_inverse() {
            g.inverse()
        } else {
            g.clone()
        }
    }

    /// The group element represented by a word.
    pub fn evaluate(&self, word: &Word) -> Result<ProjectiveMap, GroupError> {
        let mut m = ProjectiveMap::identity(self.domain.dim());
        for l in word.letters() {
            if l.generator() >= self.generators.len() {
                return Err(GroupError::UnknownLetter {
                    letter: l.to_char(),
                });
            }
            m = m.compose(&self.letter_map(*l));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_words() {
        let w = parse_word("abAB").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.to_string(), "abAB");
        assert_eq!(w.inverse().to_string(), "baBA");
        assert!(parse_word("1").unwrap().is_empty());
        assert!(parse_word("ab1").is_err());
    }

    #[test]
    fn non_preserving_generator_rejected() {
        let ball = Arc::new(ConvexDomain::ball(2).unwrap());
        let g =
            ProjectiveMap::from_rows(3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            GeneratorSet::new(ball, vec![g]),
            Err(GroupError::DomainNotPreserved { generator: 0 })
        ));
    }
}
