//! Computational convex projective geometry: properly convex domains, the
//! Hilbert metric, discrete projective group actions, peripheral families and
//! finite boundary quotients.

pub mod commands;
pub mod domain;
pub mod group;
pub mod linalg;
pub mod metric;
pub mod peripheral;
pub mod projective;
pub mod quotient;
pub mod report;
pub mod scene;
pub mod svg;
pub mod tolerance;
