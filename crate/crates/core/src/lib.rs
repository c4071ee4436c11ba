//! System-level simulator for serving-sector association of cellular-connected
//! UAVs (CCUAVs) flying on aerial routes through a massive-MIMO macro network.
//!
//! The crate is organised bottom-up:
//!
//! - [`scenario`]: sector, panel and route geometry plus per-drop UE placement.
//! - [`channel`]: 3GPP large-scale propagation, correlated shadowing and Rician
//!   small-scale fading.
//! - [`mimo`]: zero-forcing precoding and per-UE SINR.
//! - [`eigenscore`]: route channel spectra and the integer eigenscore of every
//!   (route, sector) pair.
//! - [`association`]: the RSRP, M1 and M2 selection metrics.
//! - [`montecarlo`]: the drop engine and campaign statistics.
//!
//! Every random quantity is drawn from a stream derived from
//! `(master_seed, drop_index, purpose)` (see [`rng`]), so results never depend
//! on thread count or metric under test.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod association;
pub mod channel;
pub mod config;
pub mod eigenscore;
pub mod error;
pub mod io;
pub mod mimo;
pub mod montecarlo;
pub mod rng;
pub mod scenario;

pub use association::{Metric, RsrpBounds, SelectionInput, SelectionOutcome};
pub use config::ScenarioConfig;
pub use eigenscore::{EigenscoreTable, SpectrumNormalization};
pub use error::{Error, Result};
pub use montecarlo::{CampaignStats, DropResult, Simulator};
pub use scenario::{DropPlacement, Route, SectorGeometry};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
