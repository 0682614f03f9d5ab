//! Lifting primitives: polynomial approximation of a family of centered
//! discs, boundary pushing with such a family, and the Levi-disc and cone
//! lifts for ρ_c.

mod approx;
mod cert;
mod family;
mod levi;
mod push;

pub use approx::{approx_disc_family, approx_disc_family_with, ApproxOptions};
pub use cert::{Condition, LiftCertificate, Relation};
pub use family::{CachedFamily, DiscFamily, DiscFamilySamples, CENTER_TOL};
pub use levi::{
    boundary_min, levi_disc, lift_step_cone, lift_step_cone_with, lift_step_levi, lift_step_levi_with, ConeOptions,
    LeviFamily, LeviOptions,
};
pub use push::{push_boundary, push_boundary_levels, BaseMap, LevelFn, PushOptions, RhoFn};
