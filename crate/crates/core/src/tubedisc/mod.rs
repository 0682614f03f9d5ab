//! Proper discs in the tube over the L-shaped base {max(x₁, x₂) < 0}:
//! the model disc Γ_ε, chord-triangle discs through a point, the lift for
//! ρ_max, and the stage construction of a proper disc avoiding the axes.

mod axis;
mod chord;
mod exp;
mod model;

pub use axis::{
    axis_level, build_axis_avoiding_disc, build_axis_avoiding_disc_with, factor_zeros, log_map, AxisAvoidingDisc,
    AxisBuildError, AxisOptions, AxisSequence, Factored,
};
pub use chord::{
    disc_through_point, disc_through_point_with, lift_step_tube, lift_step_tube_with, ChordOptions,
    ChordTriangle, TubeOptions,
};
pub use exp::{exponentiate, ExpDisc};
pub use model::{
    a_eps, dist_to_k, graph_eps, h_eps, largest_admissible_eps, model_disc, model_disc_with, model_f,
    model_g, model_g_dx2, model_point, model_residual, model_y2, rho_max, sigma_eps, xi_eps, ModelDisc,
    ModelOptions,
};
