//! Propagation and channel generation for every UE-sector link.

pub mod antenna;
pub mod fading;
pub mod propagation;
pub mod shadow;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

pub use antenna::element_gain;
pub use fading::{rician_draw, steering_vector};
pub use propagation::{los_probability, path_gain, path_loss_db, shadowing_parameters, LinkGeometry, UeKind};
pub use shadow::ShadowField;

use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::scenario::{Position, SectorGeometry};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Large-scale gains of one link on one PRB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeScale {
    pub los: bool,
    /// Path gain, linear.
    pub path_gain: f64,
    /// Shadowing gain, linear.
    pub shadow_gain: f64,
    /// Antenna element gain, linear.
    pub element_gain: f64,
    /// Rician K-factor, linear.
    pub rician_k: f64,
    /// `P_tx * G * rho * tau`, mW.
    pub beta: f64,
}

impl LargeScale {
    pub fn new(
        los: bool,
        path_gain: f64,
        shadow_gain: f64,
        element_gain: f64,
        rician_k: f64,
        tx_power_mw: f64,
    ) -> Self {
        Self {
            los,
            path_gain,
            shadow_gain,
            element_gain,
            rician_k,
            beta: tx_power_mw * element_gain * path_gain * shadow_gain,
        }
    }

    pub fn path_loss_db(&self) -> f64 {
        -linear_to_db(self.path_gain)
    }

    pub fn shadow_db(&self) -> f64 {
        linear_to_db(self.shadow_gain)
    }

    pub fn rician_k_db(&self) -> f64 {
        linear_to_db(self.rician_k)
    }
}

/// Small-scale channel of one link together with its large-scale gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    pub coeffs: DVector<Complex64>,
    pub large_scale: LargeScale,
}

pub fn draw_channel<R: Rng + ?Sized>(
    large_scale: LargeScale,
    steering: &DVector<Complex64>,
    rng: &mut R,
) -> ChannelVector {
    ChannelVector { coeffs: rician_draw(steering, large_scale.rician_k, rng), large_scale }
}

/// Reference-signal received power in dBm: large-scale per-PRB power,
/// without fast fading or precoding gain.
pub fn rsrp_dbm(large_scale: &LargeScale) -> f64 {
    linear_to_db(large_scale.beta)
}

/// Constants shared by every link of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkModel {
    pub carrier_hz: f64,
    pub wavelength: f64,
    pub tx_power_mw: f64,
    /// K-factor applied to line-of-sight links; NLoS links are Rayleigh.
    pub los_k: f64,
}

impl LinkModel {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        Self {
            carrier_hz: config.carrier_hz,
            wavelength: config.carrier_wavelength_m(),
            tx_power_mw: db_to_linear(config.tx_power_per_prb_dbm()),
            los_k: config.rician_k_linear(),
        }
    }

    pub fn geometry(sector: &SectorGeometry, ue_pos: &Position) -> LinkGeometry {
        let d = ue_pos - sector.position;
        LinkGeometry { d_2d: d.xy().norm(), d_3d: d.norm(), bs_height: sector.position.z, ue_height: ue_pos.z }
    }

    pub fn large_scale(
        &self,
        kind: UeKind,
        sector: &SectorGeometry,
        ue_pos: &Position,
        los: bool,
        shadow_db: f64,
    ) -> Result<LargeScale> {
        let geometry = Self::geometry(sector, ue_pos);
        let rho = path_gain(kind, los, &geometry, self.carrier_hz)?;
        let g = element_gain(sector, ue_pos);
        let k = if los { self.los_k } else { 0.0 };
        Ok(LargeScale::new(los, rho, db_to_linear(shadow_db), g, k, self.tx_power_mw))
    }
}
