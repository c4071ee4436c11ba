//! Drop engine and campaign statistics.
//!
//! A drop places the UEs, draws shadowing, link states and fading for every
//! UE-sector link, associates the UEs, precodes every sector with ZF and
//! evaluates each UE's SINR. All randomness comes from streams keyed by
//! `(master_seed, drop_index, purpose, link)`, and none of it depends on the
//! selection metric: metrics compared on the same seed see the same
//! placements and channels.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::association::{argmax, select_cell, Metric, RsrpBounds, SelectionInput};
use crate::channel::{
    draw_channel, los_probability, rsrp_dbm, shadowing_parameters, steering_vector, ChannelVector, LinkModel,
    ShadowField, UeKind,
};
use crate::config::ScenarioConfig;
use crate::eigenscore::{eigenscore_sweep, EigenscoreTable, PlanningOptions};
use crate::error::{Error, Result};
use crate::mimo::{link_budget, stack_channels, thermal_noise_mw, SectorLoad};
use crate::rng::{stream, Purpose};
use crate::scenario::{build_routes, build_sectors, place_drop, DropPlacement, Position, Route, SectorGeometry};

pub const SCHEMA_VERSION: u32 = 1;

/// Outcome for one UE in one drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeOutcome {
    pub serving: usize,
    pub sinr_db: f64,
    pub rsrp_dbm: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropResult {
    pub drop_index: u64,
    pub placement: DropPlacement,
    pub placement_digest: String,
    pub channel_digest: String,
    pub ccuavs: Vec<UeOutcome>,
    pub gues: Vec<UeOutcome>,
    /// `N_b^in` for every sector.
    pub served_counts: Vec<usize>,
    /// Largest intra-cell interference to useful power ratio over all UEs.
    pub max_intra_ratio: f64,
}

/// Per-link record of a drop, used for channel dumps.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRecord {
    pub kind: UeKind,
    pub ue_index: usize,
    pub sector: usize,
    pub position: Position,
    pub channel: ChannelVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanDomain {
    /// Arithmetic mean of dB values.
    #[default]
    Db,
    /// Mean of linear SINRs, reported in dB.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignStats {
    pub schema_version: u32,
    pub metric: Metric,
    pub route_index: usize,
    pub route_rotation_deg: f64,
    pub n_ccuav: usize,
    pub n_drops: usize,
    pub master_seed: u64,
    pub mean_domain: MeanDomain,
    pub sector_names: Vec<String>,
    /// Eigenscore each sector broadcasts for the route.
    pub eigenscores: Vec<usize>,
    pub aerial_mean_db: f64,
    /// 5th percentile of the CCUAV SINR pooled over drops and CCUAVs.
    pub aerial_p5_db: f64,
    pub per_ccuav_mean_db: Vec<f64>,
    pub per_ccuav_p5_db: Vec<f64>,
    /// `selection_rates[d][b]`: fraction of drops in which CCUAV `d` is served by sector `b`.
    pub selection_rates: Vec<Vec<f64>>,
    pub gue_mean_db: f64,
    /// Digest over every drop's placement, identical across metrics for a seed.
    pub placement_hash: String,
}

/// Linearly interpolated percentile (`p` in [0, 100]) of an ascending sample.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = (n - 1) as f64 * (p / 100.0).clamp(0.0, 1.0);
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

pub fn mean_db(values_db: &[f64], domain: MeanDomain) -> f64 {
    if values_db.is_empty() {
        return f64::NAN;
    }
    let n = values_db.len() as f64;
    match domain {
        MeanDomain::Db => values_db.iter().sum::<f64>() / n,
        MeanDomain::Linear => 10.0 * (values_db.iter().map(|v| 10f64.powf(v / 10.0)).sum::<f64>() / n).log10(),
    }
}

fn p5(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    percentile(&sorted, 5.0)
}

/// Built scenario plus everything that stays fixed across drops.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub config: ScenarioConfig,
    pub sectors: Vec<SectorGeometry>,
    pub routes: Vec<Route>,
    pub link_model: LinkModel,
    pub noise_mw: f64,
    pub eigenscores: EigenscoreTable,
}

struct Ue {
    kind: UeKind,
    index: usize,
    position: Position,
}

/// Everything drawn for one drop, before association.
struct DropDraw {
    placement: DropPlacement,
    ues: Vec<Ue>,
    /// `links[u][b]`
    links: Vec<Vec<ChannelVector>>,
}

fn kind_tag(kind: UeKind) -> u64 {
    match kind {
        UeKind::Gue => 0,
        UeKind::Ccuav => 1,
    }
}

fn placement_digest(p: &DropPlacement) -> String {
    let mut hasher = Sha256::new();
    for pos in p.gue_positions.iter().chain(&p.ccuav_positions) {
        for c in pos {
            hasher.update(c.to_le_bytes());
        }
    }
    hex::encode(hasher.finalize())
}

fn channel_digest(links: &[Vec<ChannelVector>]) -> String {
    let mut hasher = Sha256::new();
    for link in links.iter().flatten() {
        hasher.update(link.large_scale.beta.to_le_bytes());
        for z in link.coeffs.iter() {
            hasher.update(z.re.to_le_bytes());
            hasher.update(z.im.to_le_bytes());
        }
    }
    hex::encode(hasher.finalize())
}

impl Simulator {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let sectors = build_sectors(&config)?;
        let routes = build_routes(&config)?;
        let eigenscores = eigenscore_sweep(&routes, &sectors, &PlanningOptions::from_config(&config))?;
        Ok(Self::assemble(config, sectors, routes, eigenscores))
    }

    fn assemble(
        config: ScenarioConfig,
        sectors: Vec<SectorGeometry>,
        routes: Vec<Route>,
        eigenscores: EigenscoreTable,
    ) -> Self {
        let noise_mw = thermal_noise_mw(config.prb_bandwidth_hz, config.noise_figure_db);
        let link_model = LinkModel::from_config(&config);
        Self { config, sectors, routes, link_model, noise_mw, eigenscores }
    }

    /// Same scenario with a different swarm size; geometry and eigenscores are reused.
    pub fn with_n_ccuav(&self, n_ccuav: usize) -> Result<Self> {
        let config = ScenarioConfig { n_ccuav, ..self.config.clone() };
        config.validate()?;
        Ok(Self::assemble(config, self.sectors.clone(), self.routes.clone(), self.eigenscores.clone()))
    }

    pub fn with_n_drops(&self, n_drops: usize) -> Result<Self> {
        let config = ScenarioConfig { n_drops, ..self.config.clone() };
        config.validate()?;
        Ok(Self::assemble(config, self.sectors.clone(), self.routes.clone(), self.eigenscores.clone()))
    }

    /// Index of the route rotated by `rotation_deg`.
    pub fn route_index(&self, rotation_deg: f64) -> Result<usize> {
        self.routes.iter().position(|r| (r.rotation_deg - rotation_deg).abs() < 1e-6).ok_or_else(|| {
            let available: Vec<String> = self.routes.iter().map(|r| format!("{}", r.rotation_deg)).collect();
            Error::config(format!("no route at {rotation_deg} deg (available: {})", available.join(", ")))
        })
    }

    fn route(&self, route: usize) -> Result<&Route> {
        self.routes.get(route).ok_or_else(|| Error::config(format!("route index {route} out of range")))
    }

    fn draw(&self, route: &Route, drop_index: u64) -> Result<DropDraw> {
        let cfg = &self.config;
        let seed = cfg.master_seed;
        let placement = place_drop(cfg, route, &mut stream(seed, drop_index, Purpose::Placement, &[]))?;

        let mut ues: Vec<Ue> = placement
            .gue_positions
            .iter()
            .enumerate()
            .map(|(i, p)| Ue { kind: UeKind::Gue, index: i, position: Position::from(*p) })
            .collect();
        ues.extend(placement.ccuav_positions.iter().enumerate().map(|(i, p)| Ue {
            kind: UeKind::Ccuav,
            index: i,
            position: Position::from(*p),
        }));

        // One field per (sector, UE population, LoS state).
        let field = |sector: usize, kind: UeKind, los: bool| {
            let height = match kind {
                UeKind::Gue => cfg.gue_height_m,
                UeKind::Ccuav => cfg.aerial_altitude_m,
            };
            let (sigma, d_corr) = shadowing_parameters(kind, los, height);
            let mut rng = stream(seed, drop_index, Purpose::Shadowing, &[sector as u64, kind_tag(kind), los as u64]);
            ShadowField::new(sigma, d_corr, cfg.n_sinusoids, &mut rng)
        };
        let fields: Vec<[[ShadowField; 2]; 2]> = (0..self.sectors.len())
            .map(|b| {
                [
                    [field(b, UeKind::Gue, false), field(b, UeKind::Gue, true)],
                    [field(b, UeKind::Ccuav, false), field(b, UeKind::Ccuav, true)],
                ]
            })
            .collect();

        let links = ues
            .iter()
            .map(|ue| {
                self.sectors
                    .iter()
                    .map(|sector| {
                        let key = [kind_tag(ue.kind), ue.index as u64, sector.id as u64];
                        let geometry = LinkModel::geometry(sector, &ue.position);
                        let p_los = los_probability(ue.kind, geometry.d_2d, ue.position.z);
                        let los = stream(seed, drop_index, Purpose::LinkState, &key).random::<f64>() < p_los;
                        let shadow_db = fields[sector.id][kind_tag(ue.kind) as usize][los as usize]
                            .sample(ue.position.x, ue.position.y);
                        let ls = self.link_model.large_scale(ue.kind, sector, &ue.position, los, shadow_db)?;
                        let a = steering_vector(sector, &ue.position, self.link_model.wavelength);
                        let mut rng = stream(seed, drop_index, Purpose::Fading, &key);
                        Ok(draw_channel(ls, &a, &mut rng))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DropDraw { placement, ues, links })
    }

    /// Per-link records of a drop (placement and channels are metric independent).
    pub fn drop_links(&self, route: usize, drop_index: u64) -> Result<Vec<LinkRecord>> {
        let draw = self.draw(self.route(route)?, drop_index)?;
        Ok(draw
            .ues
            .iter()
            .zip(draw.links)
            .flat_map(|(ue, links)| {
                links.into_iter().enumerate().map(move |(b, channel)| LinkRecord {
                    kind: ue.kind,
                    ue_index: ue.index,
                    sector: b,
                    position: ue.position,
                    channel,
                })
            })
            .collect())
    }

    pub fn run_drop(&self, route: usize, metric: Metric, drop_index: u64) -> Result<DropResult> {
        let draw = self.draw(self.route(route)?, drop_index)?;
        let n_sectors = self.sectors.len();
        let rsrp: Vec<Vec<f64>> =
            draw.links.iter().map(|links| links.iter().map(|l| rsrp_dbm(&l.large_scale)).collect()).collect();

        let mut serving = vec![0usize; draw.ues.len()];
        let mut ccuav_rows = Vec::new();
        for (u, ue) in draw.ues.iter().enumerate() {
            match ue.kind {
                UeKind::Gue => {
                    serving[u] = argmax(&rsrp[u]).ok_or_else(|| Error::domain("gUE without candidate sector"))?
                }
                UeKind::Ccuav => ccuav_rows.push(u),
            }
        }
        let input = SelectionInput {
            rsrp_dbm: ccuav_rows.iter().map(|&u| rsrp[u].clone()).collect(),
            eigenscores: self.eigenscores.route_scores(route),
            alpha: self.config.alpha,
            noise_mw: self.noise_mw,
            rsrp_bounds: RsrpBounds::from_option(self.config.rsrp_bounds_dbm),
        };
        let outcome = select_cell(metric, &input)?;
        for (&u, &b) in ccuav_rows.iter().zip(&outcome.chosen) {
            serving[u] = b;
        }

        let mut row_of = vec![0usize; draw.ues.len()];
        let loads = (0..n_sectors)
            .map(|b| {
                let served: Vec<usize> = (0..draw.ues.len()).filter(|&u| serving[u] == b).collect();
                for (row, &u) in served.iter().enumerate() {
                    row_of[u] = row;
                }
                let h = stack_channels(served.iter().map(|&u| &draw.links[u][b].coeffs));
                let h = if served.is_empty() { nalgebra::DMatrix::zeros(0, self.sectors[b].antennas()) } else { h };
                SectorLoad::new(b, &self.sectors[b].name, served, h)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut max_intra_ratio: f64 = 0.0;
        let mut outcomes = Vec::with_capacity(draw.ues.len());
        for (u, links) in draw.links.iter().enumerate() {
            let channels: Vec<DVector<Complex64>> = links.iter().map(|l| l.coeffs.clone()).collect();
            let betas: Vec<f64> = links.iter().map(|l| l.large_scale.beta).collect();
            let budget = link_budget(&channels, &betas, serving[u], row_of[u], &loads, self.noise_mw);
            max_intra_ratio = max_intra_ratio.max(budget.intra / budget.useful);
            outcomes.push(UeOutcome { serving: serving[u], sinr_db: budget.sinr_db(), rsrp_dbm: rsrp[u].clone() });
        }
        let mut gues = Vec::new();
        let mut ccuavs = Vec::new();
        for (ue, outcome) in draw.ues.iter().zip(outcomes) {
            match ue.kind {
                UeKind::Gue => gues.push(outcome),
                UeKind::Ccuav => ccuavs.push(outcome),
            }
        }
        Ok(DropResult {
            drop_index,
            placement_digest: placement_digest(&draw.placement),
            channel_digest: channel_digest(&draw.links),
            placement: draw.placement,
            ccuavs,
            gues,
            served_counts: loads.iter().map(SectorLoad::n_served).collect(),
            max_intra_ratio,
        })
    }

    /// All `n_drops` drops, in drop order, on the current rayon pool.
    pub fn run_drops(&self, route: usize, metric: Metric) -> Result<Vec<DropResult>> {
        self.route(route)?;
        (0..self.config.n_drops as u64).into_par_iter().map(|d| self.run_drop(route, metric, d)).collect()
    }

    pub fn aggregate(&self, route: usize, metric: Metric, drops: &[DropResult], domain: MeanDomain) -> CampaignStats {
        let n_ccuav = self.config.n_ccuav;
        let n_sectors = self.sectors.len();
        let pooled: Vec<f64> = drops.iter().flat_map(|d| d.ccuavs.iter().map(|c| c.sinr_db)).collect();
        let per_ccuav: Vec<Vec<f64>> =
            (0..n_ccuav).map(|i| drops.iter().map(|d| d.ccuavs[i].sinr_db).collect()).collect();
        let gue: Vec<f64> = drops.iter().flat_map(|d| d.gues.iter().map(|g| g.sinr_db)).collect();

        let mut counts = vec![vec![0usize; n_sectors]; n_ccuav];
        for d in drops {
            for (i, c) in d.ccuavs.iter().enumerate() {
                counts[i][c.serving] += 1;
            }
        }
        let n = drops.len().max(1) as f64;
        let selection_rates = counts.iter().map(|row| row.iter().map(|&c| c as f64 / n).collect()).collect();

        let mut hasher = Sha256::new();
        for d in drops {
            hasher.update(d.placement_digest.as_bytes());
        }

        let route_ref = &self.routes[route];
        CampaignStats {
            schema_version: SCHEMA_VERSION,
            metric,
            route_index: route,
            route_rotation_deg: route_ref.rotation_deg,
            n_ccuav,
            n_drops: drops.len(),
            master_seed: self.config.master_seed,
            mean_domain: domain,
            sector_names: self.sectors.iter().map(|s| s.name.clone()).collect(),
            eigenscores: self.eigenscores.route_scores(route),
            aerial_mean_db: mean_db(&pooled, domain),
            aerial_p5_db: p5(&pooled),
            per_ccuav_mean_db: per_ccuav.iter().map(|v| mean_db(v, domain)).collect(),
            per_ccuav_p5_db: per_ccuav.iter().map(|v| p5(v)).collect(),
            selection_rates,
            gue_mean_db: mean_db(&gue, domain),
            placement_hash: hex::encode(hasher.finalize()),
        }
    }

    pub fn run_campaign(&self, route: usize, metric: Metric, domain: MeanDomain) -> Result<CampaignStats> {
        let drops = self.run_drops(route, metric)?;
        Ok(self.aggregate(route, metric, &drops, domain))
    }

    /// One campaign per (metric, swarm size), sorted by metric name then size.
    pub fn sweep_ccuavs(
        &self,
        route: usize,
        metrics: &[Metric],
        n_range: std::ops::RangeInclusive<usize>,
        domain: MeanDomain,
    ) -> Result<Vec<CampaignStats>> {
        let mut metrics = metrics.to_vec();
        metrics.sort_by_key(|m| m.name());
        metrics.dedup();
        let sims = n_range.map(|n| self.with_n_ccuav(n)).collect::<Result<Vec<_>>>()?;
        let mut out = Vec::new();
        for metric in metrics {
            for sim in &sims {
                out.push(sim.run_campaign(route, metric, domain)?);
            }
        }
        Ok(out)
    }
}
