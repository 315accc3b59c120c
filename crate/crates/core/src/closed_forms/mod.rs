//! Exact solutions and barriers.

mod frying_pan;
mod paperclip;
mod sphere;

pub use frying_pan::{frying_pan_residual, frying_pan_support, FryingPan, FryingPanResidual};
pub use paperclip::{
    paperclip_curve, paperclip_ratio_check, paperclip_support, paperclip_time_for_volume, Paperclip, PaperclipCurve,
    RatioIdentityCheck,
};
pub use sphere::{sphere_profile, sphere_radius_at, SphereSolution};
