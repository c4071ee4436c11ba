//! Scenario configuration.
//!
//! The on-disk format is TOML with keys named exactly like the fields of
//! [`ScenarioConfig`]; any absent key takes its default. A JSON document is
//! also accepted, either a bare config object or a run manifest carrying the
//! resolved config under `"config"`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eigenscore::SpectrumNormalization;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub area_km2: f64,
    pub n_sectors: usize,
    pub sector_height_m: f64,
    /// Radius of the ring the sectors sit on; also bounds the gUE drop disk.
    pub sector_ring_radius_m: f64,
    pub panel_rows: usize,
    pub panel_cols: usize,
    pub panel_downtilt_deg: f64,
    /// Per-sector override of `panel_downtilt_deg`.
    pub sector_downtilts_deg: Option<Vec<f64>>,
    pub design_wavelength_m: f64,
    pub carrier_hz: f64,
    pub n_routes: usize,
    pub route_length_m: f64,
    pub waypoint_spacing_m: f64,
    pub route_rotation_step_deg: f64,
    pub aerial_altitude_m: f64,
    pub gue_height_m: f64,
    pub n_gue_per_sector: usize,
    pub n_ccuav: usize,
    pub ccuav_spacing_m: f64,
    pub total_tx_power_dbm: f64,
    pub n_prb: usize,
    pub prb_bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub rician_k_db: f64,
    pub n_sinusoids: usize,
    pub eigen_threshold: f64,
    pub spectrum_normalization: SpectrumNormalization,
    /// Number of Rician draws averaged into the planning spectrum; 0 keeps
    /// the deterministic line-of-sight planning channel.
    pub planning_draws: usize,
    pub alpha: f64,
    /// Fixed `[min, max]` RSRP normalisation bounds for M1, in dBm. When
    /// absent the extrema of each measurement vector are used.
    pub rsrp_bounds_dbm: Option<[f64; 2]>,
    pub n_drops: usize,
    pub master_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            area_km2: 0.22,
            n_sectors: 3,
            sector_height_m: 25.0,
            sector_ring_radius_m: 250.0,
            panel_rows: 8,
            panel_cols: 8,
            panel_downtilt_deg: 0.0,
            sector_downtilts_deg: None,
            design_wavelength_m: 0.0857,
            carrier_hz: 3.5e9,
            n_routes: 18,
            route_length_m: 400.0,
            waypoint_spacing_m: 1.0,
            route_rotation_step_deg: 10.0,
            aerial_altitude_m: 100.0,
            gue_height_m: 1.5,
            n_gue_per_sector: 4,
            n_ccuav: 5,
            ccuav_spacing_m: 50.0,
            total_tx_power_dbm: 46.0,
            n_prb: 100,
            prb_bandwidth_hz: 180e3,
            noise_figure_db: 9.0,
            rician_k_db: 14.22,
            n_sinusoids: 100,
            eigen_threshold: 0.10,
            spectrum_normalization: SpectrumNormalization::SumOfEigenvalues,
            planning_draws: 0,
            alpha: 0.50,
            rsrp_bounds_dbm: None,
            n_drops: 1000,
            master_seed: 20240601,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        let value = match value {
            serde_json::Value::Object(mut map) if map.contains_key("config") => {
                map.remove("config").unwrap_or_default()
            }
            other => other,
        };
        let cfg: Self = serde_json::from_value(value).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a TOML config, or a JSON config / run manifest when the file
    /// extension is `.json`.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// Number of antennas per panel, `M = M_v * M_h`.
    pub fn antennas(&self) -> usize {
        self.panel_rows * self.panel_cols
    }

    pub fn waypoints_per_route(&self) -> usize {
        (self.route_length_m / self.waypoint_spacing_m).round() as usize
    }

    /// Waypoint index step between consecutive CCUAVs.
    pub fn ccuav_index_step(&self) -> Result<usize> {
        let ratio = self.ccuav_spacing_m / self.waypoint_spacing_m;
        let step = ratio.round();
        if (ratio - step).abs() > 1e-9 || step < 1.0 {
            return Err(Error::config(format!(
                "ccuav_spacing_m ({}) must be a positive integer multiple of waypoint_spacing_m ({})",
                self.ccuav_spacing_m, self.waypoint_spacing_m
            )));
        }
        Ok(step as usize)
    }

    /// Largest admissible swarm start waypoint index.
    pub fn max_swarm_start(&self) -> Result<usize> {
        let step = self.ccuav_index_step()?;
        let n_w = self.waypoints_per_route();
        let span = self.n_ccuav.saturating_sub(1) * step;
        if (self.n_ccuav.saturating_sub(1)) as f64 * self.ccuav_spacing_m > self.route_length_m || span + 1 > n_w {
            return Err(Error::config(format!(
                "{} CCUAVs spaced {} m do not fit on a route of {} waypoints",
                self.n_ccuav, self.ccuav_spacing_m, n_w
            )));
        }
        Ok(n_w - 1 - span)
    }

    /// Per-PRB transmit power in dBm.
    pub fn tx_power_per_prb_dbm(&self) -> f64 {
        self.total_tx_power_dbm - 10.0 * (self.n_prb as f64).log10()
    }

    pub fn carrier_wavelength_m(&self) -> f64 {
        crate::SPEED_OF_LIGHT / self.carrier_hz
    }

    pub fn rician_k_linear(&self) -> f64 {
        10f64.powf(self.rician_k_db / 10.0)
    }

    pub fn downtilt_deg(&self, sector: usize) -> f64 {
        self.sector_downtilts_deg.as_ref().and_then(|v| v.get(sector).copied()).unwrap_or(self.panel_downtilt_deg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("area_km2", self.area_km2),
            ("sector_ring_radius_m", self.sector_ring_radius_m),
            ("design_wavelength_m", self.design_wavelength_m),
            ("carrier_hz", self.carrier_hz),
            ("route_length_m", self.route_length_m),
            ("waypoint_spacing_m", self.waypoint_spacing_m),
            ("ccuav_spacing_m", self.ccuav_spacing_m),
            ("prb_bandwidth_hz", self.prb_bandwidth_hz),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::config(format!("{name} must be positive, got {value}")));
            }
        }
        let counts = [
            ("n_sectors", self.n_sectors),
            ("panel_rows", self.panel_rows),
            ("panel_cols", self.panel_cols),
            ("n_routes", self.n_routes),
            ("n_prb", self.n_prb),
            ("n_drops", self.n_drops),
        ];
        for (name, value) in counts {
            if value == 0 {
                return Err(Error::config(format!("{name} must be at least 1")));
            }
        }
        if !(0.0..=1.0).contains(&self.eigen_threshold) {
            return Err(Error::config(format!("eigen_threshold must lie in [0, 1], got {}", self.eigen_threshold)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::config(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if self.waypoints_per_route() < 1 {
            return Err(Error::config("route must hold at least one waypoint"));
        }
        if let Some(tilts) = &self.sector_downtilts_deg {
            if tilts.len() != self.n_sectors {
                return Err(Error::config(format!(
                    "sector_downtilts_deg has {} entries for {} sectors",
                    tilts.len(),
                    self.n_sectors
                )));
            }
        }
        if let Some([lo, hi]) = self.rsrp_bounds_dbm {
            if !(lo < hi) {
                return Err(Error::config("rsrp_bounds_dbm must be [min, max] with min < max"));
            }
        }
        if self.n_ccuav > 0 {
            self.max_swarm_start()?;
        }
        let area_radius = (self.area_km2 * 1e6 / std::f64::consts::PI).sqrt();
        if self.sector_ring_radius_m > area_radius {
            log::warn!(
                "sector ring radius {} m exceeds the radius of the covered area ({area_radius:.1} m)",
                self.sector_ring_radius_m
            );
        }
        if self.route_rotation_step_deg * self.n_routes as f64 > 180.0 + 1e-9 {
            log::warn!("routes beyond 180 degrees duplicate earlier routes by symmetry");
        }
        Ok(())
    }
}
