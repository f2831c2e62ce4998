//! Numerical tolerances and tunable run configuration.
//!
//! The algebraic and geometric thresholds are fixed constants. Everything a
//! scene file may override lives in [`RunConfig`], which is echoed verbatim
//! into every report.

use serde::{Deserialize, Serialize};

/// Relative tolerance for algebraic identity checks.
pub const TAU_ALG: f64 = 1e-9;
/// Cauchy threshold for successive normalized matrices.
pub const TAU_CONV: f64 = 1e-10;
/// Collinearity threshold on the singular value ratio sigma_3 / sigma_1.
pub const COLLINEAR_RATIO: f64 = 1e-8;
/// Relative singular value cutoff used to split kernel and image of a limit map.
pub const RANK_RATIO: f64 = 1e-8;
/// Membership classification tolerance (interior / boundary / outside).
pub const TAU_GEO: f64 = 1e-7;
/// Constructed domains must sit strictly inside their chart by this margin.
pub const CHART_MARGIN: f64 = 1e-6;
/// Depth of dyadic midpoint refinement used for boundary segment tests.
pub const BOUNDARY_REFINE_DEPTH: u32 = 6;
/// Below this normalized margin a point is treated as numerically on the boundary.
pub const STRICT_INTERIOR: f64 = 64.0 * f64::EPSILON;
/// Spectral gap threshold for proximality: |l1 / l2| > 1 + TAU_PROX.
pub const TAU_PROX: f64 = 1e-6;
/// Chart-Euclidean distance below which an orbit point counts as accumulating on the boundary.
pub const EPS_ACC: f64 = 1e-4;
/// Quantization step for deduplicating canonical matrices.
pub const DEDUP_GRID: f64 = 1e-8;
/// Resolution at which limit points are deduplicated.
pub const LIMIT_DEDUP: f64 = 1e-6;
/// Resolution at which singleton faces (boundary points of strictly convex domains) are compared.
pub const FACE_POINT_RESOLUTION: f64 = 1e-6;
/// Hard cap on the number of orbit elements held in memory.
pub const MAX_ORBIT_ELEMENTS: usize = 1_000_000;
/// Largest projective dimension accepted (matrices are at most this size).
pub const MAX_DIM: usize = 8;
/// Affine parameters beyond this Hilbert arclength are numerically on the boundary.
pub const MAX_ARCLENGTH: f64 = 17.0;

/// Tunable parameters of the sampling and search procedures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Slack allowed in sampled Hausdorff inequalities.
    pub tau_samp: f64,
    /// Optimality tolerance of distance minimization.
    pub tau_opt: f64,
    /// Samples per segment in Hausdorff checks.
    pub segment_samples: usize,
    /// Samples per hull in Hausdorff checks.
    pub hull_samples: usize,
    /// Random starts of the hull distance minimizer.
    pub multi_starts: usize,
    /// Hilbert radius of the sampling window around the basepoint.
    pub window: f64,
    /// Word length cap for orbit enumeration.
    pub word_cap: usize,
    /// Word length used for translates, orbits and limit sets.
    pub word_len: usize,
    /// Neighborhood radius for isolation and Condition (2) checks.
    pub r: f64,
    /// Diameter bound for Condition (2).
    pub cond2_bound: f64,
    /// Chart distance under which quotient classes are joined by an adjacency edge.
    pub delta_adj: f64,
    /// Number of points on the ray grid used for conical witnesses.
    pub ray_grid: usize,
    /// Hilbert depth reached by the ray grid.
    pub ray_depth: f64,
    /// Number of ideal boundary samples.
    pub boundary_samples: usize,
    /// Seed for every random sampler.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tau_samp: 5e-3,
            tau_opt: 1e-6,
            segment_samples: 200,
            hull_samples: 2000,
            multi_starts: 8,
            window: 6.0,
            word_cap: 10,
            word_len: 6,
            r: 0.5,
            cond2_bound: 4.0,
            delta_adj: 1e-2,
            ray_grid: 32,
            ray_depth: 8.0,
            boundary_samples: 64,
            seed: 0x5eed,
        }
    }
}

/// The fixed constants, serialized into report configuration blocks.
#[derive(Clone, Debug, Serialize)]
pub struct FixedTolerances {
    pub tau_alg: f64,
    pub tau_conv: f64,
    pub collinear_ratio: f64,
    pub rank_ratio: f64,
    pub tau_geo: f64,
    pub chart_margin: f64,
    pub boundary_refine_depth: u32,
    pub strict_interior: f64,
    pub tau_prox: f64,
    pub eps_acc: f64,
    pub dedup_grid: f64,
    pub limit_dedup: f64,
    pub face_point_resolution: f64,
    pub max_orbit_elements: usize,
    pub max_dim: usize,
}

impl FixedTolerances {
    pub fn current() -> Self {
        Self {
            tau_alg: TAU_ALG,
            tau_conv: TAU_CONV,
            collinear_ratio: COLLINEAR_RATIO,
            rank_ratio: RANK_RATIO,
            tau_geo: TAU_GEO,
            chart_margin: CHART_MARGIN,
            boundary_refine_depth: BOUNDARY_REFINE_DEPTH,
            strict_interior: STRICT_INTERIOR,
            tau_prox: TAU_PROX,
            eps_acc: EPS_ACC,
            dedup_grid: DEDUP_GRID,
            limit_dedup: LIMIT_DEDUP,
            face_point_resolution: FACE_POINT_RESOLUTION,
            max_orbit_elements: MAX_ORBIT_ELEMENTS,
            max_dim: MAX_DIM,
        }
    }
}
