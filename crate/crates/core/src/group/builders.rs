//! Built-in generator families: hyperbolic boosts, Schottky pairs and Coxeter reflections.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{GeneratorSet, GroupError, Letter, Word};
use crate::domain::{ConvexDomain, DomainError};
use crate::projective::ProjectiveMap;

fn map3(rows: [[f64; 3]; 3]) -> ProjectiveMap {
    let m = DMatrix::from_fn(3, 3, |i, j| rows[i][j]);
    ProjectiveMap::new(m).expect("boosts and rotations are invertible")
}

/// Translation by `t` along the first chart axis of the Klein disk.
pub fn boost(t: f64) -> ProjectiveMap {
    let (c, s) = (t.cosh(), t.sinh());
    map3([[c, s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
}

/// Rotation of the Klein disk about its center.
pub fn rotation(theta: f64) -> ProjectiveMap {
    let (c, s) = (theta.cos(), theta.sin());
    map3([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
}

/// Translation by `t` along the diameter at angle `angle`.
pub fn boost_along(t: f64, angle: f64) -> ProjectiveMap {
    rotation(angle)
        .compose(&boost(t))
        .compose(&rotation(-angle))
}

/// Least translation length for which the ping-pong half-disks of two
/// boosts whose axes meet at `angle` are disjoint.
pub fn schottky_t_min(angle: f64) -> f64 {
    let theta = angle.rem_euclid(PI);
    let c = (theta / 2.0).cos().max((theta / 2.0).sin());
    if c >= 1.0 {
        f64::INFINITY
    } else {
        2.0 * c.atanh()
    }
}

/// Two boosts of length `t` in the Klein disk with axes meeting at `angle`;
/// checked free on reduced words up to length 6.
pub fn schottky_pso21(t: f64, angle: f64) -> Result<GeneratorSet, GroupError> {
    let t_min = schottky_t_min(angle);
    if !t.is_finite() || !angle.is_finite() || t <= t_min {
        return Err(GroupError::PingPongFails { t, t_min });
    }
    let ball = Arc::new(ConvexDomain::ball(2)?);
    let gens = GeneratorSet::new(ball, vec![boost(t), boost_along(t, angle)])?;
    if let Some(w) = trivial_reduced_word(&gens, 6) {
        return Err(GroupError::NotFree(w.to_string()));
    }
    Ok(gens)
}

fn trivial_reduced_word(gens: &GeneratorSet, max_len: usize) -> Option<Word> {
    fn walk(
        gens: &GeneratorSet,
        letters: &[Letter],
        word: &mut Vec<Letter>,
        m: &ProjectiveMap,
        left: usize,
    ) -> Option<Word> {
        if !word.is_empty() && m.is_identity(1e-6) {
            return Some(Word(word.clone()));
        }
        if left == 0 {
            return None;
        }
        for l in letters {
            if word.last().is_some_and(|p| gens.reduces(*p, *l)) {
                continue;
            }
            word.push(*l);
            let found = walk(
                gens,
                letters,
                word,
                &m.compose(&gens.letter_map(*l)),
                left - 1,
            );
            word.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
    let letters = gens.letters();
    walk(
        gens,
        &letters,
        &mut Vec::new(),
        &ProjectiveMap::identity(gens.domain().dim()),
        max_len,
    )
}

/// Gram matrix `-cos(π / m_ij)` of a Coxeter matrix; entries `0` or
/// infinite mean no relation.
pub fn coxeter_gram(m: &[Vec<f64>]) -> DMatrix<f64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            let mij = m[i][j];
            if mij == 0.0 || mij.is_infinite() {
                -1.0
            } else {
                -(PI / mij).cos()
            }
        }
    })
}

/// Reflections `σ_i = Id - 2 e_i G_i / G_ii` preserving the cone of the
/// Gram form, with their relations verified.
pub fn coxeter_generators(
    gram: &DMatrix<f64>,
) -> Result<(GeneratorSet, Arc<ConvexDomain>), GroupError> {
    let n = gram.nrows();
    if gram.ncols() != n || n < 2 {
        return Err(DomainError::NotSymmetric.into());
    }
    if (gram - gram.transpose()).amax() > 1e-12 * gram.amax().max(1.0) {
        return Err(DomainError::NotSymmetric.into());
    }
    let domain = Arc::new(ConvexDomain::ellipsoid(gram.clone())?);
    let mut refl = Vec::with_capacity(n);
    for i in 0..n {
        let gii = gram[(i, i)];
        if gii.abs() < 1e-12 {
            return Err(DomainError::NotSymmetric.into());
        }
        let mut s = DMatrix::identity(n, n);
        for j in 0..n {
            s[(i, j)] -= 2.0 * gram[(i, j)] / gii;
        }
        let s = ProjectiveMap::new(s)?;
        let defect = s.compose(&s).distance(&ProjectiveMap::identity(n));
        if defect > 1e-10 {
            return Err(GroupError::RelationViolated {
                i,
                j: i,
                m: 2,
                defect,
            });
        }
        refl.push(s);
    }
    for i in 0..n {
        for j in i + 1..n {
            let c = -gram[(i, j)] / (gram[(i, i)] * gram[(j, j)]).sqrt();
            if c.abs() >= 1.0 {
                continue;
            }
            let m = PI / c.acos();
            let mr = m.round();
            if (m - mr).abs() > 1e-6 || mr > 1000.0 {
                continue;
            }
            let prod = refl[i].compose(&refl[j]);
            let mut p = ProjectiveMap::identity(n);
            for _ in 0..mr as u32 {
                p = p.compose(&prod);
            }
            let defect = p.distance(&ProjectiveMap::identity(n));
            if defect > 1e-8 {
                return Err(GroupError::RelationViolated {
                    i,
                    j,
                    m: mr as u32,
                    defect,
                });
            }
        }
    }
    let gens = GeneratorSet::new(Arc::clone(&domain), refl)?;
    Ok((gens, domain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{axis_of, enumerate_orbit, parse_word};
    use crate::tolerance::RunConfig;

    #[test]
    fn ping_pong_threshold() {
        let t_min = schottky_t_min(PI / 2.0);
        assert!((t_min - 2.0 * (0.5f64.sqrt()).atanh()).abs() < 1e-12);
        assert!(schottky_pso21(4.0, PI / 2.0).is_ok());
        assert!(matches!(
            schottky_pso21(0.1, PI / 2.0),
            Err(GroupError::PingPongFails { .. })
        ));
    }

    #[test]
    fn commutator_is_proximal_with_axis() {
        let g = schottky_pso21(4.0, PI / 2.0).unwrap();
        let c = g.evaluate(&parse_word("abAB").unwrap()).unwrap();
        assert!(axis_of(g.domain(), &c).is_ok());
    }

    #[test]
    fn triangle_group_relations() {
        let gram = coxeter_gram(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 1.0, 7.0],
            vec![3.0, 7.0, 1.0],
        ]);
        let (g, _) = coxeter_generators(&gram).unwrap();
        assert_eq!(g.len(), 3);
        assert!((0..3).all(|i| g.is_involution(i)));
    }

    #[test]
    fn spherical_gram_rejected() {
        let gram = coxeter_gram(&[vec![1.0, 3.0], vec![3.0, 1.0]]);
        assert!(matches!(
            coxeter_generators(&gram),
            Err(GroupError::Domain(DomainError::BadSignature { .. }))
        ));
    }

    #[test]
    fn single_reflection_has_order_two() {
        let gram = coxeter_gram(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 1.0, 7.0],
            vec![3.0, 7.0, 1.0],
        ]);
        let (g, dom) = coxeter_generators(&gram).unwrap();
        let one = GeneratorSet::new(Arc::clone(&dom), vec![g.generators()[0].clone()]).unwrap();
        let o = enumerate_orbit(&one, dom.center(), 6, &RunConfig::default()).unwrap();
        assert_eq!(o.elements.len(), 2);
    }
}
