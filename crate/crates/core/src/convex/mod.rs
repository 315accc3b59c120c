//! Convex bodies of revolution represented by sampled support functions.

mod curvature;
pub mod io;
mod meridian;
mod profile;

pub(crate) use curvature::volume_from;
pub use curvature::{curvatures_from_support, equator_radius_sq_integral, volume, CurvatureField, GridTrig};
pub(crate) use meridian::meridian_from;
pub use meridian::{
    reconstruct_meridian, touching_circle_check, GraphView, MeridianProfile, PlanarCurve, TouchingCircleResult,
    DEFAULT_SLOPE_CAP,
};
pub(crate) use profile::check_same_grid;
pub use profile::{
    cell_angle, cell_width, displacements, enclosure_check, enclosure_margin, equator_band, extrapolate_to_edge,
    facet_radius, Axis, Displacements, EquatorBand, SupportProfile, MIN_CELLS,
};
