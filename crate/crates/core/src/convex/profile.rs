use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{GcfError, Result};

/// Smallest grid accepted by the curvature routines.
pub const MIN_CELLS: usize = 16;

/// Which coordinate axis the body is rotated about.
///
/// The stored angle is always measured from the rotation axis, so `S(0)` is the
/// extent along the axis and `S(pi/2)` is the equatorial radius. The tag only
/// decides which of the two is called `h` and which `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    /// Pancakes: rotation about `e1`, `h` along the axis, `l` the radius.
    E1,
    /// Sausages: rotation about `e3`, `l` along the axis, `h` the radius.
    E3,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::E1 => "E1",
            Axis::E3 => "E3",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = GcfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "E1" | "e1" => Ok(Axis::E1),
            "E3" | "e3" => Ok(Axis::E3),
            other => Err(GcfError::Parse(format!("unknown axis {other:?}"))),
        }
    }
}

/// Angular spacing of an `n`-cell quadrant grid.
#[inline]
pub fn cell_width(n: usize) -> f64 {
    FRAC_PI_2 / n as f64
}

/// Cell-centred angle `(k + 1/2) * dpsi`; never 0 or pi/2.
#[inline]
pub fn cell_angle(k: usize, n: usize) -> f64 {
    (k as f64 + 0.5) * cell_width(n)
}

/// Support function of a body of revolution sampled on one quadrant of the
/// normal polar angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportProfile {
    axis: Axis,
    values: Vec<f64>,
}

impl SupportProfile {
    /// Wraps sampled support values. Values must be positive and finite.
    pub fn new(axis: Axis, values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(GcfError::TooFewCells { min: 3, got: values.len() });
        }
        if let Some((cell, &value)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(GcfError::NonPositiveSupport { cell, value });
        }
        Ok(SupportProfile { axis, values })
    }

    /// Samples `f(psi)` at the cell centres.
    pub fn from_fn(axis: Axis, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..n).map(|k| f(cell_angle(k, n))).collect();
        Self::new(axis, values)
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Callers must keep every value positive and finite.
    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn dpsi(&self) -> f64 {
        cell_width(self.len())
    }

    pub fn angle(&self, k: usize) -> f64 {
        cell_angle(k, self.len())
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.angle(k))
    }

    /// Same shape with a different axis tag.
    pub fn with_axis(mut self, axis: Axis) -> Self {
        self.axis = axis;
        self
    }

    /// Support value extrapolated to the rotation axis (`psi -> 0`).
    pub fn pole_value(&self) -> f64 {
        extrapolate_to_edge(self.values[0], self.values[1], self.values[2])
    }

    /// Support value extrapolated to the equator (`psi -> pi/2`).
    pub fn equator_value(&self) -> f64 {
        let n = self.len();
        extrapolate_to_edge(self.values[n - 1], self.values[n - 2], self.values[n - 3])
    }

    /// Smallest support value, which is the inradius of a centrally symmetric body.
    pub fn inradius(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// One-sided quadratic extrapolation from the three cells nearest a grid edge
/// (`f0` is the closest, half a cell from the edge).
#[inline]
pub fn extrapolate_to_edge(f0: f64, f1: f64, f2: f64) -> f64 {
    (15.0 * f0 - 10.0 * f1 + 3.0 * f2) / 8.0
}

/// Horizontal and vertical extents of a symmetric body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Displacements {
    pub h: f64,
    pub l: f64,
}

/// Extents along the distinguished axes.
///
/// Both are read from the support function itself: the axial extent is `S(0)`
/// and the equatorial radius is `S(pi/2)`, each by one-sided quadratic
/// extrapolation. This stays second-order accurate on bodies whose support
/// function has a corner at the pole or the equator (flat sides and bands).
pub fn displacements(profile: &SupportProfile) -> Displacements {
    let axial = profile.pole_value();
    let radial = profile.equator_value();
    match profile.axis() {
        Axis::E1 => Displacements { h: axial, l: radial },
        Axis::E3 => Displacements { h: radial, l: axial },
    }
}

/// `true` iff the body of `inner` lies inside the body of `outer`.
///
/// Both bodies share the centre, so containment is pointwise comparison of
/// support functions.
pub fn enclosure_check(inner: &SupportProfile, outer: &SupportProfile) -> Result<bool> {
    Ok(enclosure_margin(inner, outer)? >= 0.0)
}

/// `min_k (S_outer - S_inner)`; non-negative iff `inner` is enclosed.
pub fn enclosure_margin(inner: &SupportProfile, outer: &SupportProfile) -> Result<f64> {
    check_same_grid(inner, outer)?;
    Ok(inner.values().iter().zip(outer.values()).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min))
}

pub(crate) fn check_same_grid(a: &SupportProfile, b: &SupportProfile) -> Result<()> {
    if a.len() != b.len() {
        return Err(GcfError::GridMismatch(format!("{} vs {} cells", a.len(), b.len())));
    }
    if a.axis() != b.axis() {
        return Err(GcfError::GridMismatch(format!("axis {} vs {}", a.axis().as_str(), b.axis().as_str())));
    }
    Ok(())
}

/// Contact-point radius `B sin(psi) = S sin(psi) + S' cos(psi)` on the four
/// cells nearest the pole, using differences that never reach the ghost cell.
fn pole_contact_radii(profile: &SupportProfile) -> [(f64, f64); 4] {
    let s = profile.values();
    let d = profile.dpsi();
    let mut out = [(0.0, 0.0); 4];
    for (k, slot) in out.iter_mut().enumerate() {
        let ds = if k == 0 { (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * d) } else { (s[k + 1] - s[k - 1]) / (2.0 * d) };
        let psi = profile.angle(k);
        *slot = (psi, s[k] * psi.sin() + ds * psi.cos());
    }
    out
}

fn linear_fit_at_zero(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Radius of the flat side whose normal is the rotation axis.
///
/// Near a facet edge the contact radius `B sin(psi)` tends to the facet radius
/// linearly in `psi`; a smooth body gives (nearly) zero.
pub fn facet_radius(profile: &SupportProfile) -> f64 {
    let pts = pole_contact_radii(profile);
    linear_fit_at_zero(&pts).0
}

/// Cylindrical contact band at the equator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquatorBand {
    /// Distance from the rotation axis of the band.
    pub radius: f64,
    /// Half of the band's extent along the rotation axis.
    pub half_height: f64,
}

/// Reads the band of normals `psi = pi/2` off the four equator-nearest cells.
///
/// The contact point `(d, r) = (S cos - S' sin, S sin + S' cos)` is extrapolated
/// linearly to the equator from one side, so the corner of `S` at `pi/2`
/// produced by a band of positive height is never differenced across.
pub fn equator_band(profile: &SupportProfile) -> EquatorBand {
    let s = profile.values();
    let n = s.len();
    let d = profile.dpsi();
    let mut radial = [(0.0, 0.0); 4];
    let mut axial = [(0.0, 0.0); 4];
    for j in 0..4 {
        let k = n - 1 - j;
        let ds = if j == 0 {
            (3.0 * s[k] - 4.0 * s[k - 1] + s[k - 2]) / (2.0 * d)
        } else {
            (s[k + 1] - s[k - 1]) / (2.0 * d)
        };
        let psi = profile.angle(k);
        let dist = FRAC_PI_2 - psi;
        radial[j] = (dist, s[k] * psi.sin() + ds * psi.cos());
        axial[j] = (dist, s[k] * psi.cos() - ds * psi.sin());
    }
    EquatorBand { radius: linear_fit_at_zero(&radial).0, half_height: linear_fit_at_zero(&axial).0.max(0.0) }
}
