//! Deterministic geometry of the study area and per-drop UE placement.
//!
//! Coordinates are metres in a local frame centred on the scenario centre:
//! `x` east, `y` north, `z` up. Horizontal angles are counter-clockwise from
//! east; compass bearings (clockwise from north) appear only when laying out
//! the sectors.

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};

pub type Position = Vector3<f64>;

/// Compass bearings (degrees) of the three-sector reference layout.
pub const DEFAULT_BEARINGS_DEG: [f64; 3] = [180.0, 270.0, 45.0];

#[derive(Debug, Clone, PartialEq)]
pub struct SectorGeometry {
    pub id: usize,
    pub name: String,
    pub position: Position,
    /// Boresight azimuth, radians counter-clockwise from east.
    pub boresight_azimuth: f64,
    /// Mechanical downtilt, radians below the horizon.
    pub downtilt: f64,
    pub rows: usize,
    pub cols: usize,
    pub element_spacing: f64,
    /// Element positions, row-major from the bottom-left element as seen
    /// from the front of the panel.
    pub elements: Vec<Position>,
}

impl SectorGeometry {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: usize,
        name: impl Into<String>,
        position: Position,
        boresight_azimuth: f64,
        downtilt: f64,
        rows: usize,
        cols: usize,
        element_spacing: f64,
    ) -> Self {
        let mut sector = Self {
            id,
            name: name.into(),
            position,
            boresight_azimuth,
            downtilt,
            rows,
            cols,
            element_spacing,
            elements: Vec::with_capacity(rows * cols),
        };
        let h = sector.horizontal_axis();
        let v = sector.vertical_axis();
        let row_mid = (rows as f64 - 1.0) / 2.0;
        let col_mid = (cols as f64 - 1.0) / 2.0;
        for r in 0..rows {
            for c in 0..cols {
                let offset =
                    h * ((c as f64 - col_mid) * element_spacing) + v * ((r as f64 - row_mid) * element_spacing);
                sector.elements.push(position + offset);
            }
        }
        sector
    }

    pub fn antennas(&self) -> usize {
        self.elements.len()
    }

    /// Unit vector normal to the panel face.
    pub fn boresight(&self) -> Position {
        let (sa, ca) = self.boresight_azimuth.sin_cos();
        let (st, ct) = self.downtilt.sin_cos();
        Position::new(ct * ca, ct * sa, -st)
    }

    /// Unit vector along the panel rows (the horizontal axis of the face).
    pub fn horizontal_axis(&self) -> Position {
        let (sa, ca) = self.boresight_azimuth.sin_cos();
        Position::new(-sa, ca, 0.0)
    }

    /// Unit vector along the panel columns, tilted with the panel.
    pub fn vertical_axis(&self) -> Position {
        let (sa, ca) = self.boresight_azimuth.sin_cos();
        let (st, ct) = self.downtilt.sin_cos();
        Position::new(st * ca, st * sa, ct)
    }

    /// Direction of `pos` in the panel's local frame: (azimuth, zenith) in
    /// radians, azimuth in `[-pi, pi]` from boresight and zenith in `[0, pi]`
    /// with `pi/2` on the boresight plane.
    pub fn local_angles(&self, pos: &Position) -> (f64, f64) {
        let d = pos - self.position;
        let x = d.dot(&self.boresight());
        let y = d.dot(&self.horizontal_axis());
        let z = d.dot(&self.vertical_axis());
        let azimuth = y.atan2(x);
        let zenith = (x.hypot(y)).atan2(z);
        (azimuth, zenith)
    }

    /// Copy of this sector rotated by `angle` radians about the vertical axis
    /// through `center`.
    pub fn rotated(&self, center: &Position, angle: f64) -> Self {
        let position = rotate_about(&self.position, center, angle);
        Self::new(
            self.id,
            self.name.clone(),
            position,
            self.boresight_azimuth + angle,
            self.downtilt,
            self.rows,
            self.cols,
            self.element_spacing,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub index: usize,
    pub rotation_deg: f64,
    pub altitude: f64,
    pub waypoints: Vec<Position>,
}

impl Route {
    /// Straight route of `n_waypoints` points spaced `spacing` apart, centred
    /// on `center` (horizontally) at `altitude`.
    pub fn new(
        index: usize,
        center: &Position,
        rotation_deg: f64,
        n_waypoints: usize,
        spacing: f64,
        altitude: f64,
    ) -> Self {
        let (s, c) = rotation_deg.to_radians().sin_cos();
        let dir = Position::new(c, s, 0.0);
        let mid = (n_waypoints as f64 - 1.0) / 2.0;
        let waypoints = (0..n_waypoints)
            .map(|i| {
                let p = center + dir * ((i as f64 - mid) * spacing);
                Position::new(p.x, p.y, altitude)
            })
            .collect();
        Self { index, rotation_deg, altitude, waypoints }
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn midpoint(&self) -> Position {
        let first = self.waypoints.first().expect("route has waypoints");
        let last = self.waypoints.last().expect("route has waypoints");
        (first + last) / 2.0
    }

    pub fn rotated(&self, center: &Position, angle: f64) -> Self {
        Self {
            index: self.index,
            rotation_deg: self.rotation_deg + angle.to_degrees(),
            altitude: self.altitude,
            waypoints: self.waypoints.iter().map(|p| rotate_about(p, center, angle)).collect(),
        }
    }
}

/// UE positions of a single drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropPlacement {
    pub gue_positions: Vec<[f64; 3]>,
    pub ccuav_positions: Vec<[f64; 3]>,
    /// Waypoints occupied by the swarm, one per CCUAV.
    pub ccuav_waypoints: Vec<usize>,
    pub ccuav_start_index: usize,
}

impl DropPlacement {
    pub fn gue(&self, i: usize) -> Position {
        Position::from(self.gue_positions[i])
    }

    pub fn ccuav(&self, i: usize) -> Position {
        Position::from(self.ccuav_positions[i])
    }
}

fn rotate_about(p: &Position, center: &Position, angle: f64) -> Position {
    let (s, c) = angle.sin_cos();
    let d = p - center;
    Position::new(center.x + c * d.x - s * d.y, center.y + s * d.x + c * d.y, p.z)
}

fn compass_name(bearing_deg: f64) -> Option<&'static str> {
    let b = bearing_deg.rem_euclid(360.0);
    let names = ["NO", "NE", "EA", "SE", "SO", "SW", "WE", "NW"];
    let k = b / 45.0;
    if (k - k.round()).abs() > 1e-9 {
        return None;
    }
    Some(names[(k.round() as usize) % 8])
}

/// Compass bearings of the sector sites: the reference south / west /
/// north-east layout for three sectors, otherwise evenly spaced starting
/// from south.
pub fn sector_bearings(n: usize) -> Vec<f64> {
    if n == DEFAULT_BEARINGS_DEG.len() {
        DEFAULT_BEARINGS_DEG.to_vec()
    } else {
        (0..n).map(|k| (180.0 + 360.0 * k as f64 / n as f64).rem_euclid(360.0)).collect()
    }
}

/// Places the sectors on a ring around the scenario centre with every panel
/// facing the centre.
pub fn build_sectors(config: &ScenarioConfig) -> Result<Vec<SectorGeometry>> {
    if !(config.area_km2 > 0.0) {
        return Err(Error::config("area_km2 must be positive"));
    }
    if config.panel_rows == 0 || config.panel_cols == 0 {
        return Err(Error::config("panel dimensions must be positive"));
    }
    if !(config.sector_ring_radius_m > 0.0) {
        return Err(Error::config("sector_ring_radius_m must be positive"));
    }
    let bearings = sector_bearings(config.n_sectors);
    let names: Vec<String> = {
        let compass: Option<Vec<_>> = bearings.iter().map(|&b| compass_name(b)).collect();
        match compass {
            Some(c) if c.iter().collect::<std::collections::HashSet<_>>().len() == c.len() => {
                c.iter().map(|n| format!("MS_{n}")).collect()
            }
            _ => (0..bearings.len()).map(|k| format!("MS_{k}")).collect(),
        }
    };
    let spacing = config.design_wavelength_m / 2.0;
    Ok(bearings
        .iter()
        .zip(names)
        .enumerate()
        .map(|(id, (&bearing, name))| {
            let angle = (90.0 - bearing).to_radians();
            let r = config.sector_ring_radius_m;
            let position = Position::new(r * angle.cos(), r * angle.sin(), config.sector_height_m);
            let boresight_azimuth = (-position.y).atan2(-position.x);
            SectorGeometry::new(
                id,
                name,
                position,
                boresight_azimuth,
                config.downtilt_deg(id).to_radians(),
                config.panel_rows,
                config.panel_cols,
                spacing,
            )
        })
        .collect())
}

pub fn build_routes(config: &ScenarioConfig) -> Result<Vec<Route>> {
    if config.n_routes == 0 {
        return Err(Error::config("n_routes must be at least 1"));
    }
    if !(config.waypoint_spacing_m > 0.0) {
        return Err(Error::config("waypoint_spacing_m must be positive"));
    }
    if config.route_rotation_step_deg * config.n_routes as f64 > 180.0 + 1e-9 {
        log::warn!("routes beyond 180 degrees duplicate earlier routes by symmetry");
    }
    let center = Position::zeros();
    let n_w = config.waypoints_per_route();
    Ok((0..config.n_routes)
        .map(|k| {
            Route::new(
                k,
                &center,
                k as f64 * config.route_rotation_step_deg,
                n_w,
                config.waypoint_spacing_m,
                config.aerial_altitude_m,
            )
        })
        .collect())
}

/// Draws one drop: gUEs uniform over the disk enclosed by the sector ring,
/// and the CCUAV swarm on consecutive `d_ccuav`-spaced waypoints starting at
/// a uniformly drawn index.
pub fn place_drop<R: Rng + ?Sized>(config: &ScenarioConfig, route: &Route, rng: &mut R) -> Result<DropPlacement> {
    let step = config.ccuav_index_step()?;
    let n_gue = config.n_sectors * config.n_gue_per_sector;
    let radius = config.sector_ring_radius_m;
    let gue_positions = (0..n_gue)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            [r * theta.cos(), r * theta.sin(), config.gue_height_m]
        })
        .collect();

    let (start, ccuav_waypoints) = if config.n_ccuav == 0 {
        (0, Vec::new())
    } else {
        let span = (config.n_ccuav - 1) * step;
        if span >= route.len() {
            return Err(Error::config(format!(
                "{} CCUAVs spaced {} waypoints do not fit on a route of {} waypoints",
                config.n_ccuav,
                step,
                route.len()
            )));
        }
        let start = rng.random_range(0..=route.len() - 1 - span);
        (start, (0..config.n_ccuav).map(|i| start + i * step).collect::<Vec<_>>())
    };
    let ccuav_positions = ccuav_waypoints.iter().map(|&w| route.waypoints[w].into()).collect();
    Ok(DropPlacement { gue_positions, ccuav_positions, ccuav_waypoints, ccuav_start_index: start })
}
