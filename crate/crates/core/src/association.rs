//! Serving-sector selection metrics for CCUAVs.
//!
//! Each metric maps a CCUAV's view of the candidate sectors to a score
//! vector; the CCUAV attaches to the arg-max, ties going to the lowest sector
//! index. Ground UEs always use [`Metric::Rsrp`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Rsrp,
    /// Weighted sum of normalised eigenscore and normalised RSRP.
    M1,
    /// Capacity-style `ES * log2(1 + SNR)`.
    M2,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Rsrp, Metric::M1, Metric::M2];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Rsrp => "rsrp",
            Metric::M1 => "m1",
            Metric::M2 => "m2",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rsrp" => Ok(Metric::Rsrp),
            "m1" => Ok(Metric::M1),
            "m2" => Ok(Metric::M2),
            other => Err(Error::config(format!("unknown metric '{other}' (expected rsrp, m1 or m2)"))),
        }
    }
}

/// Source of the RSRP normalisation extrema used by M1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum RsrpBounds {
    /// Extrema of each CCUAV's own measurement vector.
    #[default]
    PerMeasurement,
    Fixed {
        min_dbm: f64,
        max_dbm: f64,
    },
}

impl RsrpBounds {
    pub fn from_option(bounds: Option<[f64; 2]>) -> Self {
        match bounds {
            Some([min_dbm, max_dbm]) => RsrpBounds::Fixed { min_dbm, max_dbm },
            None => RsrpBounds::PerMeasurement,
        }
    }
}

/// `(x - max) / (max - min)`, or all zeros when `max == min`.
fn normalize_to_max(values: &[f64], min: f64, max: f64) -> Vec<f64> {
    let range = max - min;
    if range == 0.0 {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - max) / range).collect()
}

fn extrema(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

pub fn metric_rsrp(rsrp_dbm: &[f64]) -> Vec<f64> {
    rsrp_dbm.to_vec()
}

pub fn metric_m1(eigenscores: &[usize], rsrp_dbm: &[f64], alpha: f64, bounds: RsrpBounds) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::config(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if eigenscores.len() != rsrp_dbm.len() {
        return Err(Error::config("eigenscore and RSRP vectors differ in length"));
    }
    let es: Vec<f64> = eigenscores.iter().map(|&e| e as f64).collect();
    let (es_min, es_max) = extrema(&es);
    let (r_min, r_max) = match bounds {
        RsrpBounds::PerMeasurement => extrema(rsrp_dbm),
        RsrpBounds::Fixed { min_dbm, max_dbm } => (min_dbm, max_dbm),
    };
    let es_term = normalize_to_max(&es, es_min, es_max);
    let rsrp_term = normalize_to_max(rsrp_dbm, r_min, r_max);
    Ok(es_term.iter().zip(&rsrp_term).map(|(e, r)| alpha * e + (1.0 - alpha) * r).collect())
}

/// `ES * log2(1 + SNR)` with the per-PRB SNR `RSRP / noise` in linear units.
pub fn metric_m2(eigenscores: &[usize], rsrp_dbm: &[f64], noise_mw: f64) -> Result<Vec<f64>> {
    if !(noise_mw > 0.0) {
        return Err(Error::domain(format!("noise power must be positive, got {noise_mw}")));
    }
    if eigenscores.len() != rsrp_dbm.len() {
        return Err(Error::config("eigenscore and RSRP vectors differ in length"));
    }
    Ok(eigenscores
        .iter()
        .zip(rsrp_dbm)
        .map(|(&es, &r)| {
            let snr = 10f64.powf(r / 10.0) / noise_mw;
            es as f64 * (1.0 + snr).log2()
        })
        .collect())
}

/// Index of the largest score, lowest index on ties.
pub fn argmax(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        match best {
            Some(b) if s <= scores[b] => {}
            _ if s.is_nan() => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Everything the CCUAVs of one drop see when choosing a sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionInput {
    /// Per CCUAV, RSRP towards each sector (dBm).
    pub rsrp_dbm: Vec<Vec<f64>>,
    /// Eigenscore each sector broadcasts for the route.
    pub eigenscores: Vec<usize>,
    pub alpha: f64,
    pub noise_mw: f64,
    pub rsrp_bounds: RsrpBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionOutcome {
    pub metric: Metric,
    pub chosen: Vec<usize>,
    pub scores: Vec<Vec<f64>>,
}

/// Scores of a single CCUAV under `metric`.
pub fn metric_scores(metric: Metric, rsrp_dbm: &[f64], input: &SelectionInput) -> Result<Vec<f64>> {
    match metric {
        Metric::Rsrp => Ok(metric_rsrp(rsrp_dbm)),
        Metric::M1 => metric_m1(&input.eigenscores, rsrp_dbm, input.alpha, input.rsrp_bounds),
        Metric::M2 => metric_m2(&input.eigenscores, rsrp_dbm, input.noise_mw),
    }
}

pub fn select_cell(metric: Metric, input: &SelectionInput) -> Result<SelectionOutcome> {
    let mut chosen = Vec::with_capacity(input.rsrp_dbm.len());
    let mut scores = Vec::with_capacity(input.rsrp_dbm.len());
    for rsrp in &input.rsrp_dbm {
        let z = metric_scores(metric, rsrp, input)?;
        let best = argmax(&z).ok_or_else(|| Error::domain("no candidate sector with a finite score"))?;
        chosen.push(best);
        scores.push(z);
    }
    Ok(SelectionOutcome { metric, chosen, scores })
}
