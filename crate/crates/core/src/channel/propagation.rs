//! 3GPP urban-macro large-scale models: TR 38.901 UMa for ground UEs and the
//! TR 36.777 UMa-AV extension for aerial UEs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// Effective environment height of TR 38.901 UMa, metres.
const ENV_HEIGHT_M: f64 = 1.0;

/// Lowest aerial height the UMa-AV formulas apply to; below it the
/// terrestrial model is used.
pub const AERIAL_MIN_HEIGHT_M: f64 = 22.5;
pub const AERIAL_MAX_HEIGHT_M: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UeKind {
    Gue,
    Ccuav,
}

impl UeKind {
    /// Whether the aerial formulas govern a UE of this kind at `height`.
    fn uses_aerial_model(self, height: f64) -> bool {
        self == UeKind::Ccuav && height > AERIAL_MIN_HEIGHT_M
    }
}

fn clamp_aerial_height(height: f64) -> f64 {
    if height > AERIAL_MAX_HEIGHT_M {
        log::warn!("UE height {height} m above the UMa-AV validity range, clamped");
        AERIAL_MAX_HEIGHT_M
    } else {
        height
    }
}

fn terrestrial_los_probability(d_2d: f64, ue_height: f64) -> f64 {
    if d_2d <= 18.0 {
        return 1.0;
    }
    let h = ue_height.min(AERIAL_MIN_HEIGHT_M);
    let c = if h <= 13.0 { 0.0 } else { ((h - 13.0) / 10.0).powf(1.5) };
    let base = 18.0 / d_2d + (-d_2d / 63.0).exp() * (1.0 - 18.0 / d_2d);
    base * (1.0 + c * 1.25 * (d_2d / 100.0).powi(3) * (-d_2d / 150.0).exp())
}

/// Line-of-sight probability.
pub fn los_probability(kind: UeKind, d_2d: f64, ue_height: f64) -> f64 {
    let d_2d = d_2d.max(0.0);
    if !kind.uses_aerial_model(ue_height) {
        if ue_height > AERIAL_MIN_HEIGHT_M {
            log::warn!("ground UE height {ue_height} m above the UMa validity range, clamped");
        }
        return terrestrial_los_probability(d_2d, ue_height);
    }
    let h = clamp_aerial_height(ue_height);
    if h >= 100.0 {
        return 1.0;
    }
    let d1 = (460.0 * h.log10() - 700.0).max(18.0);
    let p1 = 4300.0 * h.log10() - 3800.0;
    if d_2d <= d1 {
        1.0
    } else {
        d1 / d_2d + (-d_2d / p1).exp() * (1.0 - d1 / d_2d)
    }
}

/// Geometry of a single link as seen by the path-loss formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub d_2d: f64,
    pub d_3d: f64,
    pub bs_height: f64,
    pub ue_height: f64,
}

fn terrestrial_los_pl(g: &LinkGeometry, f_ghz: f64, carrier_hz: f64) -> f64 {
    let h_bs = g.bs_height - ENV_HEIGHT_M;
    let h_ut = (g.ue_height - ENV_HEIGHT_M).max(0.0);
    let d_bp = 4.0 * h_bs * h_ut * carrier_hz / SPEED_OF_LIGHT;
    if g.d_2d <= d_bp {
        28.0 + 22.0 * g.d_3d.log10() + 20.0 * f_ghz.log10()
    } else {
        28.0 + 40.0 * g.d_3d.log10() + 20.0 * f_ghz.log10()
            - 9.0 * (d_bp * d_bp + (g.bs_height - g.ue_height).powi(2)).log10()
    }
}

/// Path loss in dB.
pub fn path_loss_db(kind: UeKind, los: bool, geometry: &LinkGeometry, carrier_hz: f64) -> Result<f64> {
    if !(geometry.d_3d > 0.0) {
        return Err(Error::domain(format!("3D distance must be positive, got {}", geometry.d_3d)));
    }
    let f_ghz = carrier_hz / 1e9;
    let pl = if kind.uses_aerial_model(geometry.ue_height) {
        let h = clamp_aerial_height(geometry.ue_height);
        let los_pl = 28.0 + 22.0 * geometry.d_3d.log10() + 20.0 * f_ghz.log10();
        if los {
            los_pl
        } else {
            let nlos = -17.5
                + (46.0 - 7.0 * h.log10()) * geometry.d_3d.log10()
                + 20.0 * (40.0 * std::f64::consts::PI * f_ghz / 3.0).log10();
            nlos.max(los_pl)
        }
    } else {
        let los_pl = terrestrial_los_pl(geometry, f_ghz, carrier_hz);
        if los {
            los_pl
        } else {
            let nlos = 13.54 + 39.08 * geometry.d_3d.log10() + 20.0 * f_ghz.log10() - 0.6 * (geometry.ue_height - 1.5);
            nlos.max(los_pl)
        }
    };
    Ok(pl)
}

/// Linear path gain `10^(-PL/10)`.
pub fn path_gain(kind: UeKind, los: bool, geometry: &LinkGeometry, carrier_hz: f64) -> Result<f64> {
    path_loss_db(kind, los, geometry, carrier_hz).map(|pl| 10f64.powf(-pl / 10.0))
}

/// Shadow-fading standard deviation (dB) and decorrelation distance (m).
pub fn shadowing_parameters(kind: UeKind, los: bool, ue_height: f64) -> (f64, f64) {
    let decorrelation = if los { 37.0 } else { 50.0 };
    let sigma = if kind.uses_aerial_model(ue_height) && los {
        4.64 * (-0.0066 * clamp_aerial_height(ue_height)).exp()
    } else if los {
        4.0
    } else {
        6.0
    };
    (sigma, decorrelation)
}
