//! Exact geometry and probabilities for the symmetric broken stick problem.
//!
//! A unit stick broken at two points gives three lengths `(l1, l2, l3)`
//! summing to one: a point of the 2-simplex. Forgetting the order of the
//! pieces identifies points related by the symmetric group on three
//! letters. Cutting the simplex level by level into a kept half-corner and
//! a shrinking central residual produces a fractal fundamental domain for
//! that quotient.
//!
//! - [`geometry`]: exact barycentric points, triangles, areas and clipping.
//! - [`symmetry`]: permutations, orbits and canonical representatives.
//! - [`policy`] and [`fractal`]: deletion policies and the level-n construction.
//! - [`probability`]: closed forms in printed (`paper`) and construction (`measured`) modes.
//! - [`montecarlo`]: seeded samplers and estimates.
//! - [`render`]: SVG output.

pub mod error;
pub mod fractal;
pub mod geometry;
pub mod montecarlo;
pub mod policy;
pub mod probability;
pub mod rat;
pub mod render;
pub mod symmetry;

pub use error::{Error, Result};
pub use fractal::{AuditReport, FractalApprox, LimitTotals, Piece, Region};
pub use geometry::{Apex, BaryPoint, CartPoint, Containment, Locator, Side, Tri};
pub use montecarlo::{Estimate, Predicate, Rng, Sampler, SamplerRegistry};
pub use policy::{DeletionPolicy, Policy, PolicyRegistry};
pub use probability::{Mode, ProbabilityReport};
pub use rat::Rat;
pub use render::{render_svg, RenderStyle};
pub use symmetry::Perm;
