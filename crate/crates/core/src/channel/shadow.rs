//! Spatially correlated log-normal shadowing from a sum of sinusoids.
//!
//! A field is `sigma * sqrt(2/N) * sum_n cos(2 pi <f_n, p> + phi_n)` with
//! uniform phases and 2D spatial frequencies drawn from the spectrum of the
//! exponential autocorrelation `exp(-d / d_corr)`. Its radial density is
//! `k (1 + (2 pi d_corr k)^2)^(-3/2)`, inverted in closed form below.

use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct ShadowField {
    pub sigma_db: f64,
    pub decorrelation_m: f64,
    frequencies: Vec<[f64; 2]>,
    phases: Vec<f64>,
    amplitude: f64,
}

impl ShadowField {
    pub fn new<R: Rng + ?Sized>(sigma_db: f64, decorrelation_m: f64, n_sinusoids: usize, rng: &mut R) -> Self {
        let n = n_sinusoids.max(1);
        let a = std::f64::consts::TAU * decorrelation_m;
        let mut frequencies = Vec::with_capacity(n);
        let mut phases = Vec::with_capacity(n);
        for _ in 0..n {
            // u in [0, 1): inverse CDF 1 - (1 + a^2 k^2)^(-1/2)
            let u: f64 = rng.random();
            let k = ((1.0 - u).powi(-2) - 1.0).sqrt() / a;
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            frequencies.push([k * theta.cos(), k * theta.sin()]);
            phases.push(rng.random::<f64>() * std::f64::consts::TAU);
        }
        Self { sigma_db, decorrelation_m, frequencies, phases, amplitude: (2.0 / n as f64).sqrt() }
    }

    pub fn n_sinusoids(&self) -> usize {
        self.phases.len()
    }

    /// Shadowing in dB at horizontal position `(x, y)`.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let sum: f64 = self
            .frequencies
            .iter()
            .zip(&self.phases)
            .map(|(f, phi)| (std::f64::consts::TAU * (f[0] * x + f[1] * y) + phi).cos())
            .sum();
        self.sigma_db * self.amplitude * sum
    }
}
