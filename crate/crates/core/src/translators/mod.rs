//! Rotationally symmetric translators and the glued sausage.

mod dopri;
mod glued;
mod profile;

pub use glued::{
    glued_sausage, glued_sausage_evolution_check, glued_sausage_from, translator_point_at_slope, GluedEvolution,
    GluedSausage, GLUED_TRANSLATOR_GRID,
};
pub use profile::{
    fd_weights, flat_side_exponent, flat_side_exponent_fit, flat_side_mass, ode_residual, r_alpha, r_alpha_sq,
    solve_translator, translator_rhs, ExponentFit, FlatSideMass, TranslatorProfile, BLOWUP_SLOPE, DIVERGENCE_MARGIN,
};
