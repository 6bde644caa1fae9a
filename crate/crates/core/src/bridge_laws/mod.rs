//! Brownian-bridge laws: joint densities, joint tails by closed form, contour
//! integral and Monte Carlo, the step and flat conditional limit laws, and an
//! exact sampler of the limit field with its vertex process.

mod contour;
mod density;
mod limit;
mod mc;
mod sample;
mod types;

pub use contour::{
    bridge_tail_contour, bridge_tail_contour_with, LineLayout, MAX_BRIDGE_INTERVALS,
};
pub use density::{bridge_joint_density, bridge_tail_closed};
pub use limit::{
    limit_tail, limit_tail_flat, limit_tail_flat_with, limit_tail_step, limit_tail_step_with, ZRule,
};
pub use mc::{bridge_tail_mc, limit_tail_mc, MC_SHARDS};
pub use sample::{sample_limit_field, sample_limit_fields, FieldSample};
pub use types::{Condition, LimitQuery, TimePartition};

#[cfg(test)]
mod tests;
