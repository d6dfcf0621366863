//! Exact counting of t-box distributions of r-subsets that contain a
//! monochromatic P_i-subset, and the Ramsey number search built on it.
//!
//! Three independent engines compute the same count N(W):
//!
//! * [`engines::brute_force_nw`] enumerates every coloring,
//! * [`engines::direct_ie_nw`] runs inclusion-exclusion over compatible
//!   event tuples,
//! * [`engines::spectrum_nw`] groups the same sum by tuple type and Venn
//!   spectrum, weighting each spectrum by its multinomial frequency.
//!
//! All counts are exact [`num_bigint::BigUint`] values.

pub mod engines;
pub mod error;
pub mod model;
pub mod search;
pub mod venn;

pub use engines::{EngineConfig, EngineId, EngineReport};
pub use error::{Error, Result};
pub use model::{Event, EventTuple, ProblemSpec, VertexSet};
pub use venn::{IntersectionSpectrum, TupleType, VennSpectrum};
