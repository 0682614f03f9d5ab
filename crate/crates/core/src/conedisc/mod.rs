//! Discs proper in the cone {ρ_c > 0}: the staged exhaustion for c < 1,
//! crossing the critical level by the gradient flow, and the mean-value
//! obstruction for c ≥ 1.

mod falsify;
mod flow;
mod stages;

pub use falsify::{falsify_c_ge_1, rho_one, CircleReport, FalsifyReport};
pub use flow::{
    apply_schedule, bump_profile, cross_critical_level, dbar_defect, flow, CrossOptions, FlowParams,
};
pub use stages::{
    build_proper_cone_disc, build_proper_cone_disc_with, stage_level, stage_tolerance, BuildError, BuildOptions,
    Stage, StageSequence,
};
