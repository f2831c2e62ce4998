//! Breadth-first orbit enumeration over reduced words.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::{GeneratorSet, GroupError, Word};
use crate::domain::DomainError;
use crate::projective::{HomogeneousPoint, ProjectiveMap};
use crate::tolerance::{RunConfig, DEDUP_GRID, MAX_ORBIT_ELEMENTS};

/// A group element with the word that produced it.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub word: Word,
    pub map: ProjectiveMap,
}

/// Distinct group elements up to a word length, with basepoint images.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitResult {
    #[serde(skip)]
    pub elements: Vec<GroupElement>,
    pub words: Vec<Word>,
    pub orbit_points: Vec<HomogeneousPoint>,
    /// Number of new elements per word length.
    pub word_length_histogram: Vec<usize>,
}

/// Hash keys from two fixed projections of the sign-normalized matrix.
struct DedupTable {
    probes: [DMatrix<f64>; 2],
    buckets: HashMap<(i64, i64), Vec<usize>>,
    mats: Vec<DMatrix<f64>>,
}

impl DedupTable {
    fn new(d: usize) -> Self {
        let probe = |s: f64| DMatrix::from_fn(d, d, |i, j| ((i * d + j) as f64 * s + 0.25).sin());
        Self {
            probes: [probe(1.618_033_988_7), probe(std::f64::consts::E)],
            buckets: HashMap::new(),
            mats: Vec::new(),
        }
    }

    /// Unit Frobenius representative with a sign fixed by the first probe.
    fn normalize(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let n = m / m.norm();
        if n.dot(&self.probes[0]) < 0.0 {
            -n
        } else {
            n
        }
    }

    fn key(&self, n: &DMatrix<f64>) -> (i64, i64) {
        let q = |p: &DMatrix<f64>| (n.dot(p) / DEDUP_GRID).floor() as i64;
        (q(&self.probes[0]), q(&self.probes[1]))
    }

    fn find(&self, n: &DMatrix<f64>) -> Option<usize> {
        let (a, b) = self.key(n);
        for da in -1..=1 {
            for db in -1..=1 {
                if let Some(ids) = self.buckets.get(&(a + da, b + db)) {
                    for &i in ids {
                        let m = &self.mats[i];
                        if (m - n).amax() <= DEDUP_GRID || (m + n).amax() <= DEDUP_GRID {
                            return Some(i);
                        }
                    }
                }
            }
        }
        None
    }

    /// Inserts unless already present; returns whether it was new.
    fn insert(&mut self, m: &DMatrix<f64>) -> bool {
        let n = self.normalize(m);
        if self.find(&n).is_some() {
            return false;
        }
        let k = self.key(&n);
        self.buckets.entry(k).or_default().push(self.mats.len());
        self.mats.push(n);
        true
    }
}

/// Enumerates distinct elements of reduced words of length at most
/// `max_word_len`, ordered by length then lexicographically.
pub fn enumerate_orbit(
    gens: &GeneratorSet,
    basepoint: &HomogeneousPoint,
    max_word_len: usize,
    cfg: &RunConfig,
) -> Result<OrbitResult, GroupError> {
    if max_word_len > cfg.word_cap {
        return Err(GroupError::WordTooLong {
            requested: max_word_len,
            cap: cfg.word_cap,
        });
    }
    let omega = gens.domain();
    if basepoint.dim() != omega.dim() {
        return Err(DomainError::DimensionMismatch {
            expected: omega.dim(),
            found: basepoint.dim(),
        }
        .into());
    }
    if !omega.strictly_inside(basepoint) {
        return Err(DomainError::NotInterior.into());
    }
    let letters = gens.letters();
    let mut table = DedupTable::new(omega.dim());
    let identity = GroupElement {
        word: Word::default(),
        map: ProjectiveMap::identity(omega.dim()),
    };
    table.insert(identity.map.matrix());
    let mut elements = vec![identity];
    let mut histogram = vec![1];
    let mut frontier: Vec<usize> = vec![0];
    let letter_maps: Vec<ProjectiveMap> = letters.iter().map(|l| gens.letter_map(*l)).collect();
    for _ in 0..max_word_len {
        // products are computed in parallel; insertion is sequential in word order
        let candidates: Vec<GroupElement> = frontier
            .par_iter()
            .flat_map_iter(|&i| {
                let e = &elements[i];
                let last = e.word.letters().last().copied();
                letters
                    .iter()
                    .zip(&letter_maps)
                    .filter(move |(l, _)| last.is_none_or(|p| !gens.reduces(p, **l)))
                    .map(move |(l, m)| {
                        let mut w = e.word.clone();
                        w.0.push(*l);
                        GroupElement {
                            word: w,
                            map: e.map.compose(m),
                        }
                    })
            })
            .collect();
        let mut next = Vec::new();
        let mut added = 0;
        for c in candidates {
            if table.insert(c.map.matrix()) {
                if elements.len() >= MAX_ORBIT_ELEMENTS {
                    return Err(GroupError::MemoryGuard(MAX_ORBIT_ELEMENTS));
                }
                next.push(elements.len());
                elements.push(c);
                added += 1;
            }
        }
        histogram.push(added);
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let orbit_points = elements
        .par_iter()
        .map(|e| e.map.apply(basepoint))
        .collect::<Result<Vec<_>, _>>()?;
    let words = elements.iter().map(|e| e.word.clone()).collect();
    Ok(OrbitResult {
        elements,
        words,
        orbit_points,
        word_length_histogram: histogram,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::domain::ConvexDomain;
    use crate::group::{boost, schottky_pso21};

    #[test]
    fn trivial_group_orbit() {
        let ball = Arc::new(ConvexDomain::ball(2).unwrap());
        let g = GeneratorSet::trivial(Arc::clone(&ball));
        let o = enumerate_orbit(&g, ball.center(), 4, &RunConfig::default()).unwrap();
        assert_eq!(o.elements.len(), 1);
    }

    #[test]
    fn boost_orbit_on_axis() {
        let ball = Arc::new(ConvexDomain::ball(2).unwrap());
        let t = 0.7;
        let g = GeneratorSet::new(Arc::clone(&ball), vec![boost(t)]).unwrap();
        let o = enumerate_orbit(&g, ball.center(), 5, &RunConfig::default()).unwrap();
        assert_eq!(o.elements.len(), 11);
        let mut ds: Vec<f64> = o
            .orbit_points
            .iter()
            .map(|p| ball.distance(ball.center(), p).unwrap())
            .collect();
        ds.sort_by(f64::total_cmp);
        for n in 0..=5 {
            let hits = ds
                .iter()
                .filter(|d| (*d - n as f64 * t).abs() < 1e-8)
                .count();
            assert_eq!(hits, if n == 0 { 1 } else { 2 });
        }
    }

    #[test]
    fn schottky_reduced_word_count() {
        let g = schottky_pso21(4.0, std::f64::consts::FRAC_PI_2).unwrap();
        let o = enumerate_orbit(&g, g.domain().center(), 3, &RunConfig::default()).unwrap();
        assert_eq!(o.elements.len(), 53);
        assert_eq!(o.word_length_histogram, vec![1, 4, 12, 36]);
        assert_eq!(o.words[1].to_string(), "a");
        assert_eq!(o.words[2].to_string(), "A");
    }

    #[test]
    fn word_cap_enforced() {
        let g = schottky_pso21(4.0, 1.0).unwrap();
        let cfg = RunConfig::default();
        assert!(matches!(
            enumerate_orbit(&g, g.domain().center(), 11, &cfg),
            Err(GroupError::WordTooLong { .. })
        ));
    }
}
