//! Geometry of ρ_c(z) = |x|² − c|y|²: Levi polynomial and quadric charts,
//! sublevel components, the critical-point oracle, and the calibrated
//! lifting radius a(c).

mod chart;
mod cone;
mod critical;
mod radius;

pub use chart::{levi_chart, sublevel_component, sublevel_component_with, ChartKind, LeviChart, SublevelOptions, CHART_CLIP};
pub use cone::{rho_cone, ConeFunction};
pub use critical::{
    critical_system_solve, critical_system_solve_in, CriticalSolution, CriticalSolutionSet, RESIDUAL_GATE, SEARCH_FACTOR,
};
pub use radius::{calibration_point, lifting_radius, lifting_radius_with, LiftingRadius, RadiusCheck, RadiusOptions};
