//! Single-element radiation pattern of TR 38.901 (table 7.3-1).

use crate::scenario::{Position, SectorGeometry};

pub const MAX_GAIN_DBI: f64 = 8.0;
pub const HALF_POWER_BEAMWIDTH_DEG: f64 = 65.0;
pub const SIDE_LOBE_FLOOR_DB: f64 = 30.0;

/// Element gain in dBi for a direction given in panel-local angles (degrees):
/// azimuth from boresight and zenith with 90 on the boresight plane.
pub fn element_gain_dbi(azimuth_deg: f64, zenith_deg: f64) -> f64 {
    let vertical = (12.0 * ((zenith_deg - 90.0) / HALF_POWER_BEAMWIDTH_DEG).powi(2)).min(SIDE_LOBE_FLOOR_DB);
    let horizontal = (12.0 * (azimuth_deg / HALF_POWER_BEAMWIDTH_DEG).powi(2)).min(SIDE_LOBE_FLOOR_DB);
    MAX_GAIN_DBI - (vertical + horizontal).min(SIDE_LOBE_FLOOR_DB)
}

/// Linear element gain of `sector`'s panel towards `ue_pos`.
pub fn element_gain(sector: &SectorGeometry, ue_pos: &Position) -> f64 {
    let (az, zen) = sector.local_angles(ue_pos);
    10f64.powf(element_gain_dbi(az.to_degrees(), zen.to_degrees()) / 10.0)
}
