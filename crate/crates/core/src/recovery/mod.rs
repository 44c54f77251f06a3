//! Recovery of piecewise constant fields: sector values at a vertex from
//! limit data, and layer stripping along a strictly convex foliation.

mod foliation;
mod frontier;
mod layer;
mod local;
mod operator;
mod oracle;
mod plan;

pub use foliation::{FoliationFamily, FoliationFunction, CERTIFICATION_GRID};
pub use frontier::{contact_level, order_frontier, Batch, LEVEL_TIE_TOL};
pub use layer::{reconstruct, ReconstructionReport};
pub use local::{
    frozen_weight, recover_fan_values, LocalRecovery, CONDITION_LIMIT, INJECTIVITY_TOL,
};
pub use operator::{assemble_operator, singular_spectrum, spectral_ratio};
pub use oracle::{DataOracle, Noise, DESCRIPTOR_TOL};
pub use plan::{fan_beam_plan, layered_plan, random_plan, trace_plan, ChordDescriptor, LayerPlan};
