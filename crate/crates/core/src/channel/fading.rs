//! Line-of-sight steering vectors and Rician small-scale fading.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::scenario::{Position, SectorGeometry};

/// Per-element carrier phases `exp(j 2 pi d_m / lambda)` of a point source at
/// `pos`, with `d_m` the exact distance to element `m`.
pub fn steering_vector(sector: &SectorGeometry, pos: &Position, wavelength: f64) -> DVector<Complex64> {
    DVector::from_iterator(
        sector.antennas(),
        sector.elements.iter().map(|e| {
            // phase taken modulo one wavelength
            let d = (pos - e).norm();
            let cycles = (d / wavelength).fract();
            Complex64::from_polar(1.0, std::f64::consts::TAU * cycles)
        }),
    )
}

/// Standard circularly-symmetric complex Gaussian vector, CN(0, I).
pub fn complex_gaussian<R: Rng + ?Sized>(len: usize, rng: &mut R) -> DVector<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    DVector::from_iterator(
        len,
        (0..len).map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * scale, im * scale)
        }),
    )
}

/// Rician weights `(sqrt(K/(1+K)), sqrt(1/(1+K)))` for a linear K-factor;
/// `K = inf` is pure line of sight.
pub fn rician_weights(k_linear: f64) -> (f64, f64) {
    if k_linear.is_infinite() {
        (1.0, 0.0)
    } else {
        ((k_linear / (1.0 + k_linear)).sqrt(), (1.0 / (1.0 + k_linear)).sqrt())
    }
}

/// `sqrt(K/(1+K)) a + sqrt(1/(1+K)) g` with `g ~ CN(0, I)`.
pub fn rician_draw<R: Rng + ?Sized>(steering: &DVector<Complex64>, k_linear: f64, rng: &mut R) -> DVector<Complex64> {
    let (w_los, w_nlos) = rician_weights(k_linear);
    let scatter = complex_gaussian(steering.len(), rng);
    if w_nlos == 0.0 {
        return steering.clone();
    }
    steering * Complex64::from(w_los) + scatter * Complex64::from(w_nlos)
}
