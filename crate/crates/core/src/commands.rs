//! Command dispatch: each command runs one module on a scene and fills a report.

use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::domain::{detect_properly_embedded_simplex, ConvexSubset, DomainError, Simplex};
use crate::group::{
    check_convergence_dynamics, convex_core_approx, enumerate_orbit, limit_set_approx, GroupError,
};
use crate::metric::{check_hull_hausdorff_bound, check_segment_hausdorff_bound, MetricError};
use crate::peripheral::{
    check_projection_observation, closest_point_projection, simplex_coarse_containment,
    strong_isolation_report, structure_constants_report, PeripheralError, PeripheralFamily,
};
use crate::projective::ProjectiveMap;
use crate::quotient::{build_quotient, check_conditions, BoundarySample, QuotientError};
use crate::report::Report;
use crate::scene::{Check, Scene, SceneError};
use crate::svg::{emit_svg, Overlays, PlotError};

/// Errors that abort a command (exit code 1).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Peripheral(#[from] PeripheralError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error("scene has no `family` entry")]
    MissingFamily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Distance,
    Orbit,
    Limitset,
    Core,
    Isolation,
    Quotient,
    Checks,
    Plot,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Distance,
        Command::Orbit,
        Command::Limitset,
        Command::Core,
        Command::Isolation,
        Command::Quotient,
        Command::Checks,
        Command::Plot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Distance => "distance",
            Command::Orbit => "orbit",
            Command::Limitset => "limitset",
            Command::Core => "core",
            Command::Isolation => "isolation",
            Command::Quotient => "quotient",
            Command::Checks => "checks",
            Command::Plot => "plot",
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::UnknownCommand(s.to_owned()))
    }
}

/// A report with the optional SVG rendering.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub svg: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.report.exit_code()
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize to JSON")
}

/// The family described by the scene, or an empty fixed family.
pub fn scene_family(scene: &Scene, required: bool) -> Result<PeripheralFamily, CliError> {
    let cfg = &scene.config;
    match &scene.family {
        Some((members, translate)) => {
            let reps: Vec<ConvexSubset> =
                members.iter().map(|m| scene.subsets[m].clone()).collect();
            Ok(if *translate {
                PeripheralFamily::new(scene.gens.clone(), reps, cfg.word_len, cfg)?
            } else {
                PeripheralFamily::fixed(scene.domain.clone(), reps, cfg)?
            })
        }
        None if required => Err(CliError::MissingFamily),
        None => Ok(PeripheralFamily::new(
            scene.gens.clone(),
            Vec::new(),
            cfg.word_len,
            cfg,
        )?),
    }
}

/// The subset `C`: the named core, else the convex core approximation, else the whole domain.
pub fn scene_core(scene: &Scene) -> Result<ConvexSubset, CliError> {
    if let Some(name) = &scene.core {
        return Ok(scene.subsets[name].clone());
    }
    if scene.gens.is_empty() {
        return Ok(ConvexSubset::whole(&scene.domain));
    }
    Ok(convex_core_approx(
        &scene.gens,
        scene.config.word_len,
        &scene.config,
    )?)
}

fn distance(scene: &Scene) -> Value {
    let names: Vec<&String> = scene.points.keys().collect();
    let mut pairs = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            let d = scene.domain.distance(&scene.points[*a], &scene.points[*b]);
            pairs.push(match d {
                Ok(d) => json!({"from": a, "to": b, "distance": d}),
                Err(e) => json!({"from": a, "to": b, "distance": null, "error": e.to_string()}),
            });
        }
    }
    json!({"pairs": pairs})
}

fn run_check(scene: &Scene, check: &Check) -> (&'static str, bool, Value) {
    let omega = &*scene.domain;
    let cfg = &scene.config;
    let fail = |e: &dyn std::fmt::Display| (false, json!({"error": e.to_string()}));
    let (kind, (ok, detail)) = match check {
        Check::SegmentHausdorff([p1, p2, q1, q2]) => (
            "segment_hausdorff",
            match check_segment_hausdorff_bound(omega, p1, p2, q1, q2, cfg) {
                Ok(r) => (r.ok, to_value(&r)),
                Err(e) => fail(&e),
            },
        ),
        Check::HullHausdorff { q, p, z } => (
            "hull_hausdorff",
            match check_hull_hausdorff_bound(omega, q, p, z, cfg) {
                Ok(r) => (r.ok, to_value(&r)),
                Err(e) => fail(&e),
            },
        ),
        Check::Projection { subset, point } => {
            let x = &scene.subsets[subset];
            let r = closest_point_projection(omega, x, point, cfg).and_then(|proj| {
                check_projection_observation(omega, x, point, scene.gens.generators(), cfg)
                    .map(|obs| (proj, obs))
            });
            (
                "projection",
                match r {
                    Ok((proj, obs)) => (obs.ok, json!({"projection": proj, "observation": obs})),
                    Err(e) => fail(&e),
                },
            )
        }
        Check::Simplex { vertices, expect } => (
            "simplex",
            match detect_properly_embedded_simplex(omega, vertices) {
                Ok(s) => (
                    s.is_some() == *expect,
                    json!({"properly_embedded": s.is_some(), "expect": expect}),
                ),
                Err(e) => fail(&e),
            },
        ),
        Check::Convergence {
            matrix,
            count,
            basepoint,
        } => {
            let mut seq: Vec<ProjectiveMap> = Vec::with_capacity(*count);
            let mut m = matrix.clone();
            for _ in 0..*count {
                seq.push(m.clone());
                m = m.compose(matrix);
            }
            (
                "convergence",
                match check_convergence_dynamics(omega, &seq, basepoint, cfg) {
                    Ok(r) => (r.ok, to_value(&r)),
                    Err(e) => fail(&e),
                },
            )
        }
    };
    (kind, ok, detail)
}

fn checks(scene: &Scene) -> (bool, Value) {
    let rows: Vec<Value> = scene
        .checks
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (kind, ok, detail) = run_check(scene, c);
            json!({"index": i, "kind": kind, "ok": ok, "detail": detail})
        })
        .collect();
    let passed = rows.iter().all(|r| r["ok"] == json!(true));
    (passed, json!({"checks": rows}))
}

/// Runs `command` on the scene. The SVG is rendered for `plot`, or for any
/// command when `want_svg` is set.
pub fn run_command(scene: &Scene, command: Command, want_svg: bool) -> Result<Outcome, CliError> {
    let cfg = &scene.config;
    let omega = &*scene.domain;
    if (want_svg || command == Command::Plot) && scene.chart_dim() != 2 {
        return Err(PlotError::UnsupportedPlotDimension(scene.chart_dim()).into());
    }
    let mut overlays = Overlays::default();
    let (passed, results) = match command {
        Command::Distance => (None, distance(scene)),
        Command::Orbit => {
            let o = enumerate_orbit(&scene.gens, &scene.basepoint, cfg.word_len, cfg)?;
            overlays.orbit = o.orbit_points.clone();
            (None, json!({"elements": o.words.len(), "orbit": o}))
        }
        Command::Limitset => {
            let l = limit_set_approx(&scene.gens, &scene.basepoint, cfg.word_len, cfg)?;
            overlays.limit = l.points.clone();
            (None, json!({"count": l.points.len(), "limit_set": l}))
        }
        Command::Core => {
            let c = convex_core_approx(&scene.gens, cfg.word_len, cfg)?;
            overlays.translates = vec![c.clone()];
            (
                None,
                json!({"generators": c.generators().len(), "points": c.generators()}),
            )
        }
        Command::Isolation => {
            let family = scene_family(scene, true)?;
            let mut iso = strong_isolation_report(omega, &family, cfg.r, cfg)?;
            let core = scene_core(scene)?;
            let structure = structure_constants_report(omega, &core, &family, cfg)?;
            iso.l_hat = Some(structure.l_hat);
            iso.r_hat = Some(structure.r_hat);
            let mut radii = Vec::new();
            if !scene.simplices.is_empty() {
                let simplices: Vec<Simplex> = scene
                    .simplices
                    .iter()
                    .map(|v| {
                        detect_properly_embedded_simplex(omega, v)
                            .map(|s| s.ok_or(DomainError::NotASubset))
                    })
                    .collect::<Result<Result<_, _>, _>>()??;
                let (r, d2) = simplex_coarse_containment(omega, &family, &simplices, cfg)?;
                iso.d2_hat = Some(d2);
                radii = r;
            }
            overlays.translates = family
                .translates()
                .iter()
                .map(|t| t.subset.clone())
                .collect();
            (
                None,
                json!({
                    "translates": family.translates().len(),
                    "unresolved": family.unresolved(),
                    "isolation": iso,
                    "structure": structure,
                    "simplex_radii": radii,
                }),
            )
        }
        Command::Quotient => {
            let family = scene_family(scene, false)?;
            let core = scene_core(scene)?;
            let sample = BoundarySample::of_core(omega, &core, &family, cfg)?;
            let q = build_quotient(omega, &sample, &family, cfg)?;
            let cond = check_conditions(omega, &core, &family, cfg.r, cfg.cond2_bound, cfg)?;
            overlays.translates = family
                .translates()
                .iter()
                .map(|t| t.subset.clone())
                .collect();
            overlays.classes = sample
                .points
                .iter()
                .cloned()
                .zip(q.class_of.iter().copied())
                .collect();
            (
                Some(cond.cond1_ok && cond.cond2_ok),
                json!({
                    "samples": sample.len(),
                    "classes": q.len(),
                    "sample": sample,
                    "quotient": q,
                    "conditions": cond,
                }),
            )
        }
        Command::Checks => {
            let (ok, v) = checks(scene);
            (Some(ok), v)
        }
        Command::Plot => {
            if !scene.gens.is_empty() {
                overlays.orbit =
                    enumerate_orbit(&scene.gens, &scene.basepoint, cfg.word_len, cfg)?.orbit_points;
                overlays.limit =
                    limit_set_approx(&scene.gens, &scene.basepoint, cfg.word_len, cfg)?.points;
            }
            if scene.family.is_some() {
                overlays.translates = scene_family(scene, true)?
                    .translates()
                    .iter()
                    .map(|t| t.subset.clone())
                    .collect();
            }
            (
                None,
                json!({
                    "orbit_points": overlays.orbit.len(),
                    "limit_points": overlays.limit.len(),
                    "translates": overlays.translates.len(),
                }),
            )
        }
    };
    let svg = if want_svg || command == Command::Plot {
        Some(emit_svg(omega, &overlays)?)
    } else {
        None
    };
    Ok(Outcome {
        report: Report::new(command.name(), cfg, passed, results),
        svg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse_scene;

    const BALL: &str = r#"{"version": 1, "domain": {"ball": {"dim": 2}},
        "generators": [{"boost": {"t": 1.0}}],
        "points": {"o": [1, 0, 0], "x": [1, 0.5, 0]}}"#;

    #[test]
    fn distance_on_ball() {
        let s = parse_scene(BALL).unwrap();
        let out = run_command(&s, Command::Distance, false).unwrap();
        let d = out.report.results["pairs"][0]["distance"].as_f64().unwrap();
        assert!((d - 0.549_306_144_334_054_8).abs() < 1e-9);
        assert_eq!(out.exit_code(), 0);
    }

    #[test]
    fn unknown_command() {
        assert_eq!(
            "frobnicate".parse::<Command>().unwrap_err(),
            CliError::UnknownCommand("frobnicate".into())
        );
        assert_eq!("limitset".parse::<Command>().unwrap(), Command::Limitset);
    }

    #[test]
    fn plot_needs_two_dimensions() {
        let s = parse_scene(r#"{"version": 1, "domain": {"ball": {"dim": 3}}}"#).unwrap();
        assert_eq!(
            run_command(&s, Command::Plot, false).unwrap_err(),
            CliError::Plot(PlotError::UnsupportedPlotDimension(3))
        );
    }

    #[test]
    fn orbit_report_is_reproducible() {
        let s = parse_scene(BALL).unwrap();
        let a = run_command(&s, Command::Orbit, true).unwrap();
        let b = run_command(&s, Command::Orbit, true).unwrap();
        assert_eq!(a.report.to_json(), b.report.to_json());
        assert_eq!(a.svg, b.svg);
        assert_eq!(a.report.results["elements"], json!(13));
    }

    #[test]
    fn failing_check_exits_two() {
        let s = parse_scene(
            r#"{"version": 1, "domain": {"ball": {"dim": 2}},
                "checks": [{"simplex": {"vertices": [[1, 1, 0], [1, 0, 1], [1, -1, 0]], "expect": true}}]}"#,
        )
        .unwrap();
        let out = run_command(&s, Command::Checks, false).unwrap();
        assert_eq!(out.report.passed, Some(false));
        assert_eq!(out.exit_code(), 2);
    }
}
