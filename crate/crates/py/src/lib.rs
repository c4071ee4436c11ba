//! Python bindings: scenario configuration, eigenscore tables, campaigns and the numerical kernels.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use skylane::association::{self, RsrpBounds};
use skylane::eigenscore::{self as es, SpectrumNormalization};
use skylane::mimo;
use skylane::montecarlo::MeanDomain;
use skylane::{Error, Metric, ScenarioConfig};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        e if e.is_numerical() => PyArithmeticError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn metric(name: &str) -> PyResult<Metric> {
    name.parse().map_err(to_py)
}

fn matrix(rows: Vec<Vec<Complex64>>) -> PyResult<DMatrix<Complex64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("ragged matrix"));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn rows(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Scenario configuration. Keyword arguments override the defaults by field name.
#[pyclass(name = "Config", module = "skylane", from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: ScenarioConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (**overrides))]
    fn new(py: Python<'_>, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let Some(overrides) = overrides else {
            return Ok(Self { inner: ScenarioConfig::default() });
        };
        let json = py.import("json")?;
        let text: String = json.call_method1("dumps", (overrides,))?.extract()?;
        let inner = ScenarioConfig::from_json_str(&text).map_err(to_py)?;
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let inner = ScenarioConfig::from_toml_str(text).map_err(to_py)?;
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        let inner = ScenarioConfig::from_path(&path).map_err(to_py)?;
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml_string()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn n_drops(&self) -> usize {
        self.inner.n_drops
    }

    #[getter]
    fn n_ccuav(&self) -> usize {
        self.inner.n_ccuav
    }

    #[getter]
    fn master_seed(&self) -> u64 {
        self.inner.master_seed
    }

    #[getter]
    fn antennas(&self) -> usize {
        self.inner.antennas()
    }

    fn __repr__(&self) -> String {
        format!(
            "Config(n_drops={}, n_ccuav={}, panel={}x{}, master_seed={})",
            self.inner.n_drops,
            self.inner.n_ccuav,
            self.inner.panel_rows,
            self.inner.panel_cols,
            self.inner.master_seed
        )
    }
}

/// Aggregated statistics of one campaign.
#[pyclass(name = "CampaignStats", module = "skylane", frozen, get_all)]
struct PyCampaignStats {
    metric: String,
    route_rotation_deg: f64,
    n_ccuav: usize,
    n_drops: usize,
    master_seed: u64,
    sector_names: Vec<String>,
    eigenscores: Vec<usize>,
    aerial_mean_db: f64,
    aerial_p5_db: f64,
    per_ccuav_mean_db: Vec<f64>,
    per_ccuav_p5_db: Vec<f64>,
    selection_rates: Vec<Vec<f64>>,
    gue_mean_db: f64,
    placement_hash: String,
    json: String,
}

impl From<skylane::CampaignStats> for PyCampaignStats {
    fn from(s: skylane::CampaignStats) -> Self {
        let json = serde_json::to_string_pretty(&s).expect("stats serialize");
        Self {
            metric: s.metric.to_string(),
            route_rotation_deg: s.route_rotation_deg,
            n_ccuav: s.n_ccuav,
            n_drops: s.n_drops,
            master_seed: s.master_seed,
            sector_names: s.sector_names,
            eigenscores: s.eigenscores,
            aerial_mean_db: s.aerial_mean_db,
            aerial_p5_db: s.aerial_p5_db,
            per_ccuav_mean_db: s.per_ccuav_mean_db,
            per_ccuav_p5_db: s.per_ccuav_p5_db,
            selection_rates: s.selection_rates,
            gue_mean_db: s.gue_mean_db,
            placement_hash: s.placement_hash,
            json,
        }
    }
}

#[pymethods]
impl PyCampaignStats {
    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "CampaignStats(metric='{}', n_ccuav={}, aerial_mean_db={:.3}, aerial_p5_db={:.3})",
            self.metric, self.n_ccuav, self.aerial_mean_db, self.aerial_p5_db
        )
    }
}

/// Built scenario with its eigenscore table; runs Monte-Carlo campaigns.
#[pyclass(name = "Simulator", module = "skylane", frozen)]
struct PySimulator {
    inner: skylane::Simulator,
}

fn domain(linear_mean: bool) -> MeanDomain {
    if linear_mean {
        MeanDomain::Linear
    } else {
        MeanDomain::Db
    }
}

#[pymethods]
impl PySimulator {
    #[new]
    #[pyo3(signature = (config=None))]
    fn new(py: Python<'_>, config: Option<PyConfig>) -> PyResult<Self> {
        let config = config.map(|c| c.inner).unwrap_or_default();
        let inner = py.detach(|| skylane::Simulator::new(config)).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn sector_names(&self) -> Vec<String> {
        self.inner.sectors.iter().map(|s| s.name.clone()).collect()
    }

    #[getter]
    fn route_rotations_deg(&self) -> Vec<f64> {
        self.inner.routes.iter().map(|r| r.rotation_deg).collect()
    }

    #[getter]
    fn noise_mw(&self) -> f64 {
        self.inner.noise_mw
    }

    /// Eigenscore of every sector for the route at `route_deg`.
    fn eigenscores(&self, route_deg: f64) -> PyResult<Vec<usize>> {
        let route = self.inner.route_index(route_deg).map_err(to_py)?;
        Ok(self.inner.eigenscores.route_scores(route))
    }

    /// Rows of `(route_rotation_deg, sector_name, eigenscore, spectrum)`.
    fn eigenscore_table(&self) -> Vec<(f64, String, usize, Vec<f64>)> {
        self.inner
            .eigenscores
            .entries
            .iter()
            .map(|e| (e.rotation_deg, e.sector_name.clone(), e.eigenscore, e.spectrum.clone()))
            .collect()
    }

    #[pyo3(signature = (route_deg, metric, n_ccuav=None, n_drops=None, linear_mean=false))]
    fn run_campaign(
        &self,
        py: Python<'_>,
        route_deg: f64,
        metric: &str,
        n_ccuav: Option<usize>,
        n_drops: Option<usize>,
        linear_mean: bool,
    ) -> PyResult<PyCampaignStats> {
        let metric = self::metric(metric)?;
        let route = self.inner.route_index(route_deg).map_err(to_py)?;
        let stats = py
            .detach(|| {
                let mut sim = match n_ccuav {
                    Some(n) => self.inner.with_n_ccuav(n)?,
                    None => self.inner.clone(),
                };
                if let Some(d) = n_drops {
                    sim = sim.with_n_drops(d)?;
                }
                sim.run_campaign(route, metric, domain(linear_mean))
            })
            .map_err(to_py)?;
        Ok(stats.into())
    }

    #[pyo3(signature = (route_deg, metrics, n_min, n_max, linear_mean=false))]
    fn sweep(
        &self,
        py: Python<'_>,
        route_deg: f64,
        metrics: Vec<String>,
        n_min: usize,
        n_max: usize,
        linear_mean: bool,
    ) -> PyResult<Vec<PyCampaignStats>> {
        let metrics = metrics.iter().map(|m| metric(m)).collect::<PyResult<Vec<_>>>()?;
        if n_min == 0 || n_min > n_max {
            return Err(PyValueError::new_err("need 1 <= n_min <= n_max"));
        }
        let route = self.inner.route_index(route_deg).map_err(to_py)?;
        let stats = py
            .detach(|| {
                let sim = self.inner.with_n_ccuav(n_max)?;
                sim.sweep_ccuavs(route, &metrics, n_min..=n_max, domain(linear_mean))
            })
            .map_err(to_py)?;
        Ok(stats.into_iter().map(Into::into).collect())
    }
}

/// ZF precoder for the channel matrix whose rows are `h_u^H`; columns have power `1/N`.
#[pyfunction]
fn zf_precoder(h: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
    let h = matrix(h)?;
    let w = mimo::zf_precoder(&h).map_err(|e| to_py(e.into_error("input")))?;
    Ok(rows(&w))
}

#[pyfunction]
#[pyo3(signature = (h, normalization="sum_of_eigenvalues"))]
fn normalized_spectrum(h: Vec<Vec<Complex64>>, normalization: &str) -> PyResult<Vec<f64>> {
    let normalization = match normalization {
        "sum_of_eigenvalues" => SpectrumNormalization::SumOfEigenvalues,
        "sum_of_squares" => SpectrumNormalization::SumOfSquares,
        other => return Err(PyValueError::new_err(format!("unknown normalization '{other}'"))),
    };
    es::normalized_spectrum(&matrix(h)?, normalization).map_err(to_py)
}

#[pyfunction]
fn eigenscore(spectrum: Vec<f64>, threshold: f64) -> usize {
    es::eigenscore(&spectrum, threshold)
}

#[pyfunction]
fn metric_rsrp(rsrp_dbm: Vec<f64>) -> Vec<f64> {
    association::metric_rsrp(&rsrp_dbm)
}

/// `bounds=(min_dbm, max_dbm)` fixes the RSRP normalization; default uses the vector's own extrema.
#[pyfunction]
#[pyo3(signature = (eigenscores, rsrp_dbm, alpha=0.5, bounds=None))]
fn metric_m1(
    eigenscores: Vec<usize>,
    rsrp_dbm: Vec<f64>,
    alpha: f64,
    bounds: Option<(f64, f64)>,
) -> PyResult<Vec<f64>> {
    let bounds = RsrpBounds::from_option(bounds.map(|(lo, hi)| [lo, hi]));
    association::metric_m1(&eigenscores, &rsrp_dbm, alpha, bounds).map_err(to_py)
}

#[pyfunction]
fn metric_m2(eigenscores: Vec<usize>, rsrp_dbm: Vec<f64>, noise_mw: f64) -> PyResult<Vec<f64>> {
    association::metric_m2(&eigenscores, &rsrp_dbm, noise_mw).map_err(to_py)
}

/// Index of the largest score, lowest index on ties.
#[pyfunction]
fn argmax(scores: Vec<f64>) -> Option<usize> {
    association::argmax(&scores)
}

#[pyfunction]
#[pyo3(signature = (bandwidth_hz=180e3, noise_figure_db=9.0))]
fn thermal_noise_mw(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    mimo::thermal_noise_mw(bandwidth_hz, noise_figure_db)
}

#[pymodule]
#[pyo3(name = "skylane")]
fn skylane_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PySimulator>()?;
    m.add_class::<PyCampaignStats>()?;
    m.add_function(wrap_pyfunction!(zf_precoder, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(eigenscore, m)?)?;
    m.add_function(wrap_pyfunction!(metric_rsrp, m)?)?;
    m.add_function(wrap_pyfunction!(metric_m1, m)?)?;
    m.add_function(wrap_pyfunction!(metric_m2, m)?)?;
    m.add_function(wrap_pyfunction!(argmax, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_noise_mw, m)?)?;
    Ok(())
}
