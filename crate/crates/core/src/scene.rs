//! Scene files: a versioned JSON description of a domain, a group, named
//! points and subsets, a candidate family, checks and run parameters.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{ConvexDomain, ConvexSubset};
use crate::group::{
    axis_of, boost_along, coxeter_generators, coxeter_gram, parse_word, rotation, schottky_pso21,
    GeneratorSet,
};
use crate::projective::{HomogeneousPoint, ProjectiveMap};
use crate::tolerance::RunConfig;

/// Scene schema version understood by this build.
pub const SCENE_VERSION: u32 = 1;

/// Errors raised while reading a scene.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    /// Malformed JSON or a schema mismatch at `path`.
    #[error("parse error at {path}: {message}")]
    ParseError { path: String, message: String },
    /// Well-formed but geometrically invalid.
    #[error("validation error at {path}: {message}")]
    ValidationError { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl ToString) -> SceneError {
    SceneError::ValidationError {
        path: path.into(),
        message: message.to_string(),
    }
}

/// Raw domain entry.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    /// Unit ball of the standard chart in dimension `dim`.
    Ball {
        dim: usize,
    },
    Ellipsoid {
        form: Vec<Vec<f64>>,
    },
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
    Simplex {
        vertices: Vec<Vec<f64>>,
    },
    /// Cone of the Gram form of a Coxeter matrix.
    Coxeter {
        orders: Vec<Vec<f64>>,
    },
}

/// Raw generator entry.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Matrix(Vec<Vec<f64>>),
    Boost {
        t: f64,
        #[serde(default)]
        angle: f64,
    },
    Rotation {
        theta: f64,
    },
    SchottkyPso21 {
        t: f64,
        angle: f64,
    },
    /// The reflections of a `coxeter` domain.
    Coxeter,
}

/// Raw subset entry; points are names from the scene's point table or inline vectors.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SubsetSpec {
    Whole,
    Segment([PointRef; 2]),
    Hull(Vec<PointRef>),
    /// Axis of the group element spelled by a word such as `"abAB"`.
    Axis(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRef {
    Name(String),
    Coords(Vec<f64>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    /// Names of subsets taken as representatives.
    pub members: Vec<String>,
    /// Translate the members by the group (default) or use them as given.
    #[serde(default = "yes")]
    pub translate: bool,
}

fn yes() -> bool {
    true
}

/// Raw check entry for the `checks` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    SegmentHausdorff {
        p1: PointRef,
        p2: PointRef,
        q1: PointRef,
        q2: PointRef,
    },
    HullHausdorff {
        q: Vec<PointRef>,
        p: Vec<PointRef>,
        z: PointRef,
    },
    Projection {
        subset: String,
        point: PointRef,
    },
    Simplex {
        vertices: Vec<PointRef>,
        expect: bool,
    },
    /// Powers `M^1..M^count` of a matrix, tested from `basepoint`.
    Convergence {
        matrix: Vec<Vec<f64>>,
        count: usize,
        #[serde(default)]
        basepoint: Option<PointRef>,
    },
}

/// The scene file as written.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: u32,
    pub domain: DomainSpec,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub points: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub basepoint: Option<PointRef>,
    #[serde(default)]
    pub subsets: BTreeMap<String, SubsetSpec>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    /// Subset name used as `C`; the convex core approximation when absent.
    #[serde(default)]
    pub core: Option<String>,
    /// Vertex lists of simplices for coarse containment.
    #[serde(default)]
    pub simplices: Vec<Vec<PointRef>>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub config: RunConfig,
}

/// A resolved check.
#[derive(Clone, Debug)]
pub enum Check {
    SegmentHausdorff([HomogeneousPoint; 4]),
    HullHausdorff {
        q: Vec<HomogeneousPoint>,
        p: Vec<HomogeneousPoint>,
        z: HomogeneousPoint,
    },
    Projection {
        subset: String,
        point: HomogeneousPoint,
    },
    Simplex {
        vertices: Vec<HomogeneousPoint>,
        expect: bool,
    },
    Convergence {
        matrix: ProjectiveMap,
        count: usize,
        basepoint: HomogeneousPoint,
    },
}

/// A validated scene.
#[derive(Clone, Debug)]
pub struct Scene {
    pub domain: Arc<ConvexDomain>,
    pub gens: GeneratorSet,
    pub points: BTreeMap<String, HomogeneousPoint>,
    pub basepoint: HomogeneousPoint,
    pub subsets: BTreeMap<String, ConvexSubset>,
    pub family: Option<(Vec<String>, bool)>,
    pub core: Option<String>,
    pub simplices: Vec<Vec<HomogeneousPoint>>,
    pub checks: Vec<Check>,
    pub config: RunConfig,
}

impl Scene {
    /// Chart dimension of the domain.
    pub fn chart_dim(&self) -> usize {
        self.domain.chart_basis().len()
    }
}

fn matrix(rows: &[Vec<f64>], path: &str) -> Result<DMatrix<f64>, SceneError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(invalid(path, "rows must be nonempty and of equal length"));
    }
    Ok(DMatrix::from_fn(n, rows[0].len(), |i, j| rows[i][j]))
}

fn vectors(rows: &[Vec<f64>]) -> Vec<nalgebra::DVector<f64>> {
    rows.iter()
        .map(|r| nalgebra::DVector::from_column_slice(r))
        .collect()
}

fn build_domain(
    spec: &DomainSpec,
) -> Result<(Arc<ConvexDomain>, Option<GeneratorSet>), SceneError> {
    let err = |e: &dyn std::fmt::Display| invalid("domain", e);
    let domain = match spec {
        DomainSpec::Ball { dim } => ConvexDomain::ball(*dim).map_err(|e| err(&e))?,
        DomainSpec::Ellipsoid { form } => {
            ConvexDomain::ellipsoid(matrix(form, "domain.ellipsoid.form")?).map_err(|e| err(&e))?
        }
        DomainSpec::Polytope { vertices } => {
            ConvexDomain::polytope(&vectors(vertices)).map_err(|e| err(&e))?
        }
        DomainSpec::Simplex { vertices } => {
            ConvexDomain::simplex(&vectors(vertices)).map_err(|e| err(&e))?
        }
        DomainSpec::Coxeter { orders } => {
            let gram = coxeter_gram(orders);
            let (gens, domain) = coxeter_generators(&gram).map_err(|e| err(&e))?;
            return Ok((domain, Some(gens)));
        }
    };
    Ok((Arc::new(domain), None))
}

fn point(
    r: &PointRef,
    table: &BTreeMap<String, HomogeneousPoint>,
    omega: &ConvexDomain,
    path: &str,
) -> Result<HomogeneousPoint, SceneError> {
    let p = match r {
        PointRef::Name(n) => table
            .get(n)
            .cloned()
            .ok_or_else(|| invalid(path, format!("unknown point `{n}`")))?,
        PointRef::Coords(c) => HomogeneousPoint::from_slice(c).map_err(|e| invalid(path, e))?,
    };
    if p.dim() != omega.dim() {
        return Err(invalid(
            path,
            format!(
                "point has {} coordinates, expected {}",
                p.dim(),
                omega.dim()
            ),
        ));
    }
    Ok(p)
}

fn points(
    rs: &[PointRef],
    table: &BTreeMap<String, HomogeneousPoint>,
    omega: &ConvexDomain,
    path: &str,
) -> Result<Vec<HomogeneousPoint>, SceneError> {
    rs.iter()
        .enumerate()
        .map(|(i, r)| point(r, table, omega, &format!("{path}[{i}]")))
        .collect()
}

impl SceneFile {
    /// Builds and validates the geometric objects of the scene.
    pub fn validate(&self) -> Result<Scene, SceneError> {
        if self.version != SCENE_VERSION {
            return Err(invalid(
                "version",
                format!(
                    "unsupported version {} (expected {SCENE_VERSION})",
                    self.version
                ),
            ));
        }
        let (domain, coxeter) = build_domain(&self.domain)?;
        let d = domain.dim();
        let mut maps = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let path = format!("generators[{i}]");
            match g {
                GeneratorSpec::Matrix(rows) => {
                    let m = matrix(rows, &path)?;
                    if m.nrows() != d || m.ncols() != d {
                        return Err(invalid(path, format!("expected a {d}x{d} matrix")));
                    }
                    maps.push(ProjectiveMap::new(m).map_err(|e| invalid(&path, e))?);
                }
                GeneratorSpec::Boost { t, angle } => {
                    if d != 3 {
                        return Err(invalid(path, "boost needs a 2-dimensional chart"));
                    }
                    maps.push(boost_along(*t, *angle));
                }
                GeneratorSpec::Rotation { theta } => {
                    if d != 3 {
                        return Err(invalid(path, "rotation needs a 2-dimensional chart"));
                    }
                    maps.push(rotation(*theta));
                }
                GeneratorSpec::SchottkyPso21 { t, angle } => {
                    let s = schottky_pso21(*t, *angle).map_err(|e| invalid(&path, e))?;
                    if d != 3 {
                        return Err(invalid(path, "schottky_pso21 needs a 2-dimensional chart"));
                    }
                    maps.extend(s.generators().iter().cloned());
                }
                GeneratorSpec::Coxeter => {
                    let Some(c) = &coxeter else {
                        return Err(invalid(path, "coxeter generators need a coxeter domain"));
                    };
                    maps.extend(c.generators().iter().cloned());
                }
            }
        }
        let gens =
            GeneratorSet::new(Arc::clone(&domain), maps).map_err(|e| invalid("generators", e))?;

        let mut table = BTreeMap::new();
        for (name, c) in &self.points {
            let path = format!("points.{name}");
            let p = HomogeneousPoint::from_slice(c).map_err(|e| invalid(&path, e))?;
            if p.dim() != d {
                return Err(invalid(
                    path,
                    format!("point has {} coordinates, expected {d}", p.dim()),
                ));
            }
            if !domain.in_closure(&p) {
                return Err(invalid(path, "point lies outside the closed domain"));
            }
            table.insert(name.clone(), p);
        }
        let basepoint = match &self.basepoint {
            Some(r) => point(r, &table, &domain, "basepoint")?,
            None => domain.center().clone(),
        };
        if !domain.strictly_inside(&basepoint) {
            return Err(invalid(
                "basepoint",
                "basepoint must lie in the open domain",
            ));
        }

        let mut subsets = BTreeMap::new();
        for (name, s) in &self.subsets {
            let path = format!("subsets.{name}");
            let sub = match s {
                SubsetSpec::Whole => ConvexSubset::whole(&domain),
                SubsetSpec::Segment([a, b]) => {
                    let a = point(a, &table, &domain, &format!("{path}.segment[0]"))?;
                    let b = point(b, &table, &domain, &format!("{path}.segment[1]"))?;
                    ConvexSubset::segment(&domain, a, b).map_err(|e| invalid(&path, e))?
                }
                SubsetSpec::Hull(rs) => {
                    let pts = points(rs, &table, &domain, &format!("{path}.hull"))?;
                    ConvexSubset::hull(&domain, pts).map_err(|e| invalid(&path, e))?
                }
                SubsetSpec::Axis(word) => {
                    let g = parse_word(word)
                        .and_then(|w| gens.evaluate(&w))
                        .map_err(|e| invalid(&path, e))?;
                    axis_of(&domain, &g).map_err(|e| invalid(&path, e))?
                }
            };
            subsets.insert(name.clone(), sub);
        }
        let family = match &self.family {
            Some(f) => {
                for (i, m) in f.members.iter().enumerate() {
                    if !subsets.contains_key(m) {
                        return Err(invalid(
                            format!("family.members[{i}]"),
                            format!("unknown subset `{m}`"),
                        ));
                    }
                }
                Some((f.members.clone(), f.translate))
            }
            None => None,
        };
        if let Some(c) = &self.core {
            if !subsets.contains_key(c) {
                return Err(invalid("core", format!("unknown subset `{c}`")));
            }
        }
        let simplices = self
            .simplices
            .iter()
            .enumerate()
            .map(|(i, s)| points(s, &table, &domain, &format!("simplices[{i}]")))
            .collect::<Result<_, _>>()?;

        let mut checks = Vec::with_capacity(self.checks.len());
        for (i, c) in self.checks.iter().enumerate() {
            let path = format!("checks[{i}]");
            let pt =
                |r: &PointRef, field: &str| point(r, &table, &domain, &format!("{path}.{field}"));
            checks.push(match c {
                CheckSpec::SegmentHausdorff { p1, p2, q1, q2 } => Check::SegmentHausdorff([
                    pt(p1, "p1")?,
                    pt(p2, "p2")?,
                    pt(q1, "q1")?,
                    pt(q2, "q2")?,
                ]),
                CheckSpec::HullHausdorff { q, p, z } => Check::HullHausdorff {
                    q: points(q, &table, &domain, &format!("{path}.q"))?,
                    p: points(p, &table, &domain, &format!("{path}.p"))?,
                    z: pt(z, "z")?,
                },
                CheckSpec::Projection { subset, point } => {
                    if !subsets.contains_key(subset) {
                        return Err(invalid(
                            format!("{path}.subset"),
                            format!("unknown subset `{subset}`"),
                        ));
                    }
                    Check::Projection {
                        subset: subset.clone(),
                        point: pt(point, "point")?,
                    }
                }
                CheckSpec::Simplex { vertices, expect } => Check::Simplex {
                    vertices: points(vertices, &table, &domain, &format!("{path}.vertices"))?,
                    expect: *expect,
                },
                CheckSpec::Convergence {
                    matrix: rows,
                    count,
                    basepoint: b,
                } => {
                    let m = matrix(rows, &format!("{path}.matrix"))?;
                    let matrix =
                        ProjectiveMap::new(m).map_err(|e| invalid(format!("{path}.matrix"), e))?;
                    if matrix.dim() != d {
                        return Err(invalid(
                            format!("{path}.matrix"),
                            format!("expected a {d}x{d} matrix"),
                        ));
                    }
                    let basepoint = match b {
                        Some(r) => pt(r, "basepoint")?,
                        None => basepoint.clone(),
                    };
                    Check::Convergence {
                        matrix,
                        count: *count,
                        basepoint,
                    }
                }
            });
        }
        if self.config.word_len > self.config.word_cap {
            return Err(invalid("config.word_len", "word_len exceeds word_cap"));
        }
        Ok(Scene {
            domain,
            gens,
            points: table,
            basepoint,
            subsets,
            family,
            core: self.core.clone(),
            simplices,
            checks,
            config: self.config.clone(),
        })
    }
}

/// Parses the JSON text of a scene without geometric validation.
pub fn parse_scene_file(text: &str) -> Result<SceneFile, SceneError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        SceneError::ParseError {
            path,
            message: inner.to_string(),
        }
    })
}

/// Parses and validates a scene.
pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    parse_scene_file(text)?.validate()
}
