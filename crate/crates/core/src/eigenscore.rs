//! Route eigenscore: how many spatial degrees of freedom a sector's panel
//! resolves along an aerial route.
//!
//! The planning channel of a (route, sector) pair stacks one channel vector
//! per waypoint into an `N_w x M` matrix. Its squared singular values,
//! normalised to a distribution, form the spectrum; the eigenscore counts the
//! spectrum entries at or above a threshold.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::fading::rician_draw;
use crate::channel::steering_vector;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};
use crate::scenario::{Route, SectorGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumNormalization {
    /// `lambda_i / sum_j lambda_j`: entries in [0, 1] summing to one.
    #[default]
    SumOfEigenvalues,
    /// `lambda_i / sum_j lambda_j^2`, kept for comparison; not confined to [0, 1].
    SumOfSquares,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteChannelMatrix {
    pub route: usize,
    pub sector: usize,
    /// Row `w` is the planning channel at waypoint `w`.
    pub matrix: DMatrix<Complex64>,
}

/// Line-of-sight planning matrix: one steering vector per waypoint.
pub fn route_channel_matrix(route: &Route, sector: &SectorGeometry, wavelength: f64) -> RouteChannelMatrix {
    let m = sector.antennas();
    let mut matrix = DMatrix::zeros(route.len(), m);
    for (w, p) in route.waypoints.iter().enumerate() {
        let a = steering_vector(sector, p, wavelength);
        matrix.row_mut(w).copy_from(&a.transpose());
    }
    RouteChannelMatrix { route: route.index, sector: sector.id, matrix }
}

/// Squared singular values of `h`, descending.
pub fn squared_singular_values(h: &DMatrix<Complex64>) -> Vec<f64> {
    let mut values: Vec<f64> = h.singular_values().iter().map(|s| s * s).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Normalises a descending eigenvalue list.
pub fn normalize(eigenvalues: &[f64], normalization: SpectrumNormalization) -> Result<Vec<f64>> {
    let denom: f64 = match normalization {
        SpectrumNormalization::SumOfEigenvalues => eigenvalues.iter().sum(),
        SpectrumNormalization::SumOfSquares => eigenvalues.iter().map(|l| l * l).sum(),
    };
    if !(denom > 0.0) {
        return Err(Error::domain("spectrum of an all-zero channel matrix"));
    }
    Ok(eigenvalues.iter().map(|l| l / denom).collect())
}

/// Normalised eigenvalue spectrum of `h`, descending.
pub fn normalized_spectrum(h: &DMatrix<Complex64>, normalization: SpectrumNormalization) -> Result<Vec<f64>> {
    if h.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(Error::domain("spectrum of an all-zero channel matrix"));
    }
    normalize(&squared_singular_values(h), normalization)
}

/// Number of spectrum entries at or above `threshold`.
pub fn eigenscore(spectrum: &[f64], threshold: f64) -> usize {
    spectrum.iter().filter(|&&l| l >= threshold).count()
}

/// How the planning channel is formed.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanningOptions {
    pub wavelength: f64,
    pub threshold: f64,
    pub normalization: SpectrumNormalization,
    /// 0: deterministic LoS rows. Otherwise the number of Rician draws
    /// whose spectra are averaged.
    pub draws: usize,
    pub rician_k: f64,
    pub seed: u64,
}

impl PlanningOptions {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        Self {
            wavelength: config.carrier_wavelength_m(),
            threshold: config.eigen_threshold,
            normalization: config.spectrum_normalization,
            draws: config.planning_draws,
            rician_k: config.rician_k_linear(),
            seed: config.master_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenscoreEntry {
    pub route: usize,
    pub rotation_deg: f64,
    pub sector: usize,
    pub sector_name: String,
    pub spectrum: Vec<f64>,
    pub eigenscore: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenscoreTable {
    pub threshold: f64,
    pub normalization: SpectrumNormalization,
    pub n_sectors: usize,
    /// Route-major: entry `route * n_sectors + sector`.
    pub entries: Vec<EigenscoreEntry>,
}

impl EigenscoreTable {
    pub fn get(&self, route: usize, sector: usize) -> Option<&EigenscoreEntry> {
        self.entries.get(route * self.n_sectors + sector)
    }

    pub fn n_routes(&self) -> usize {
        self.entries.len() / self.n_sectors.max(1)
    }

    /// Eigenscores of every sector for one route, in sector order.
    pub fn route_scores(&self, route: usize) -> Vec<usize> {
        (0..self.n_sectors).map(|b| self.get(route, b).map_or(0, |e| e.eigenscore)).collect()
    }

    /// Eigenscore of each sector as a function of route rotation.
    pub fn by_rotation(&self, sector: usize) -> Vec<(f64, usize)> {
        self.entries.iter().filter(|e| e.sector == sector).map(|e| (e.rotation_deg, e.eigenscore)).collect()
    }
}

/// Spectrum of one (route, sector) pair under `options`.
pub fn route_spectrum(route: &Route, sector: &SectorGeometry, options: &PlanningOptions) -> Result<Vec<f64>> {
    let los = route_channel_matrix(route, sector, options.wavelength);
    if options.draws == 0 {
        return normalized_spectrum(&los.matrix, options.normalization);
    }
    let mut acc: Vec<f64> = Vec::new();
    for draw in 0..options.draws {
        let mut rng = stream(options.seed, draw as u64, Purpose::Planning, &[route.index as u64, sector.id as u64]);
        let mut h = los.matrix.clone();
        for mut row in h.row_iter_mut() {
            let a = row.transpose();
            let drawn = rician_draw(&a, options.rician_k, &mut rng);
            row.copy_from(&drawn.transpose());
        }
        let s = normalized_spectrum(&h, options.normalization)?;
        if acc.is_empty() {
            acc = s;
        } else {
            acc.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
        }
    }
    let n = options.draws as f64;
    Ok(acc.into_iter().map(|v| v / n).collect())
}

/// Eigenscore table over every (route, sector) pair.
pub fn eigenscore_sweep(
    routes: &[Route],
    sectors: &[SectorGeometry],
    options: &PlanningOptions,
) -> Result<EigenscoreTable> {
    let pairs: Vec<(&Route, &SectorGeometry)> =
        routes.iter().flat_map(|r| sectors.iter().map(move |s| (r, s))).collect();
    let entries = pairs
        .par_iter()
        .map(|(route, sector)| {
            let spectrum = route_spectrum(route, sector, options)?;
            Ok(EigenscoreEntry {
                route: route.index,
                rotation_deg: route.rotation_deg,
                sector: sector.id,
                sector_name: sector.name.clone(),
                eigenscore: eigenscore(&spectrum, options.threshold),
                spectrum,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenscoreTable {
        threshold: options.threshold,
        normalization: options.normalization,
        n_sectors: sectors.len(),
        entries,
    })
}
