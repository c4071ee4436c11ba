//! Zero-forcing precoding per sector and the per-UE link budget.
//!
//! A sector's channel matrix stacks the conjugated channel vectors of its
//! served UEs as rows (`H[u, :] = h_u^H`), so that `H W` holds the effective
//! gains `h_u^H w_p`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest condition number of `H H^H` accepted before inversion.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

#[derive(Debug, Clone, PartialEq)]
pub enum ZfError {
    /// More served UEs than antennas.
    Capacity {
        served: usize,
        antennas: usize,
    },
    Singular {
        condition: f64,
    },
}

impl ZfError {
    pub fn into_error(self, sector: &str) -> Error {
        match self {
            ZfError::Capacity { served, antennas } => Error::Capacity { sector: sector.to_owned(), served, antennas },
            ZfError::Singular { condition } => Error::Singular { sector: sector.to_owned(), condition },
        }
    }
}

/// Stacks channel vectors as the rows `h_u^H`.
pub fn stack_channels<'a>(channels: impl IntoIterator<Item = &'a DVector<Complex64>>) -> DMatrix<Complex64> {
    let rows: Vec<_> = channels.into_iter().map(|h| h.adjoint()).collect();
    if rows.is_empty() {
        return DMatrix::zeros(0, 0);
    }
    DMatrix::from_rows(&rows)
}

/// Zero-forcing precoder `W = H^H (H H^H)^-1 D^-1/2` with every column scaled
/// to power `1/N`, so the sector spends unit power split equally among its
/// `N` served UEs.
pub fn zf_precoder(h: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>, ZfError> {
    let (n, m) = h.shape();
    if n > m {
        return Err(ZfError::Capacity { served: n, antennas: m });
    }
    if n == 0 {
        return Ok(DMatrix::zeros(m, 0));
    }
    let h_adj = h.adjoint();
    let gram = h * &h_adj;
    let sv = gram.singular_values();
    let (max, min) = sv.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(ZfError::Singular { condition });
    }
    let inv = gram.try_inverse().ok_or(ZfError::Singular { condition })?;
    let mut w = h_adj * inv;
    let share = (1.0 / n as f64).sqrt();
    for mut col in w.column_iter_mut() {
        let norm = col.norm();
        col *= Complex64::from(share / norm);
    }
    Ok(w)
}

/// `h^H w`.
pub fn effective_gain(h: &DVector<Complex64>, w: &[Complex64]) -> Complex64 {
    h.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// Received useful power `beta |h^H w|^2`.
pub fn useful_power(beta: f64, h: &DVector<Complex64>, w: &[Complex64]) -> f64 {
    beta * effective_gain(h, w).norm_sqr()
}

/// Thermal noise in mW over `bandwidth_hz` for a receiver noise figure.
pub fn thermal_noise_mw(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    10f64.powf((THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db) / 10.0)
}

/// One sector with its served UEs and their precoder.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorLoad {
    pub sector: usize,
    /// Global UE indices, in row order of `channel`.
    pub served: Vec<usize>,
    pub channel: DMatrix<Complex64>,
    pub precoder: DMatrix<Complex64>,
}

impl SectorLoad {
    pub fn new(sector: usize, name: &str, served: Vec<usize>, channel: DMatrix<Complex64>) -> Result<Self> {
        let precoder = zf_precoder(&channel).map_err(|e| e.into_error(name))?;
        Ok(Self { sector, served, channel, precoder })
    }

    pub fn n_served(&self) -> usize {
        self.served.len()
    }

    /// `sum_i |h^H w_i|^2` over this sector's beams, skipping column `skip`.
    fn leaked(&self, h: &DVector<Complex64>, skip: Option<usize>) -> f64 {
        self.precoder
            .column_iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .map(|(_, w)| effective_gain(h, w.as_slice()).norm_sqr())
            .sum()
    }
}

/// Powers (mW) entering the SINR of one UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub useful: f64,
    pub intra: f64,
    pub inter: f64,
    pub noise: f64,
}

impl LinkBudget {
    pub fn sinr(&self) -> f64 {
        sinr(self.useful, self.intra, self.inter, self.noise)
    }

    pub fn sinr_db(&self) -> f64 {
        10.0 * self.sinr().log10()
    }
}

pub fn sinr(useful: f64, intra: f64, inter: f64, noise: f64) -> f64 {
    useful / (intra + inter + noise)
}

/// Intra- and inter-cell interference at a UE served by `loads[serving]` in
/// row `row`. `channels[b]` and `betas[b]` describe the UE's link to sector
/// `b`.
pub fn interference(
    channels: &[DVector<Complex64>],
    betas: &[f64],
    serving: usize,
    row: usize,
    loads: &[SectorLoad],
) -> (f64, f64) {
    let own = &loads[serving];
    let intra = betas[own.sector] * own.leaked(&channels[own.sector], Some(row));
    let inter = loads
        .iter()
        .enumerate()
        .filter(|(b, _)| *b != serving)
        .map(|(_, load)| betas[load.sector] * load.leaked(&channels[load.sector], None))
        .sum();
    (intra, inter)
}

/// Full link budget of the UE in row `row` of `loads[serving]`.
pub fn link_budget(
    channels: &[DVector<Complex64>],
    betas: &[f64],
    serving: usize,
    row: usize,
    loads: &[SectorLoad],
    noise: f64,
) -> LinkBudget {
    let own = &loads[serving];
    let useful = useful_power(betas[own.sector], &channels[own.sector], own.precoder.column(row).as_slice());
    let (intra, inter) = interference(channels, betas, serving, row, loads);
    LinkBudget { useful, intra, inter, noise }
}
