use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Angular sector in `1..=d_max` of the direction `(dx, dy)`.
///
/// Angles run from +x toward +y (clockwise on screen, since y points down),
/// and sector `i` covers `[(i-1) * 360/d_max, i * 360/d_max)` degrees.
pub fn sector_of(dx: f64, dy: f64, d_max: usize) -> Result<usize> {
    if d_max == 0 {
        return Err(Error::Config("D_max must be positive".into()));
    }
    if dx == 0.0 && dy == 0.0 {
        return Err(Error::Domain("zero vector has no sector".into()));
    }
    if !(dx.is_finite() && dy.is_finite()) {
        return Err(Error::Domain(format!("non-finite direction ({dx}, {dy})")));
    }
    Ok(sector_index(angle(dx, dy), d_max) + 1)
}

/// Direction angle in `[0, 2π)`.
pub(crate) fn angle(dx: f64, dy: f64) -> f64 {
    let mut theta = dy.atan2(dx);
    if theta < 0.0 {
        theta += TAU;
    }
    if theta >= TAU {
        theta = 0.0;
    }
    theta
}

/// Zero-based sector of an angle in `[0, 2π)`.
pub(crate) fn sector_index(theta: f64, d_max: usize) -> usize {
    let i = ((theta / TAU) * d_max as f64).floor() as usize;
    i.min(d_max - 1)
}
