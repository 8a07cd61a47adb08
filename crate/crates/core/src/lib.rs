//! The finite Gauss transformation.
//!
//! A regular `n`-gon circumscribed about the unit circle induces a circle map:
//! a point is sent along the line through the nearest polygon vertex to the
//! second intersection with the circle. In stereographic coordinates the map
//! becomes a piecewise Moebius map on `[-t*, t*]` with `n - 1` full branches,
//! `t* = tan(pi / 2n)`, which preserves the infinite measure with density
//! `2 t* / (t*^2 - t^2)`.
//!
//! Modules:
//!
//! * [`geometry`]: polygon constants, the stereographic chart, and the direct
//!   chord-projection circle map.
//! * [`moebius`]: 2x2 fractional-linear maps over `f64`, double-double, and
//!   exact rationals.
//! * [`interval_map`]: the branch map, its inverse branches, symbolic coding,
//!   the oriented chart (the `n = 4` square map), and the triangle family.
//! * [`measure`]: closed-form densities and the analytic verification battery.
//! * [`periodic`]: fixed points, periodic words, and quadratic certificates.
//! * [`sphere3d`]: the tetrahedron analogue and its Monte-Carlo histogram.

pub mod error;
pub mod geometry;
pub mod interval_map;
pub mod measure;
pub mod moebius;
pub mod periodic;
pub mod sphere3d;

pub use error::{Error, Result};
pub use geometry::{angle_from_t, circle_map, t_from_angle, AnglePoint, PolygonConfig};
pub use interval_map::{
    branch_index, cylinder_interval, encode_orbit, inverse_branch, oriented_map, q_map, step_f,
    triangle_map, OrbitRecord, SymbolSequence, TriangleParam,
};
pub use measure::{DensityValue, MeasureValue};
pub use moebius::{IntQuadratic, Moebius, Projective, Scalar};
pub use periodic::{PeriodicPointReport, PeriodicTable};
pub use sphere3d::{SimulationParams, SphereHistogram, SpherePoint, TetraConfig};
