use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use super::DepthImage;

/// Depth image noise: `y = alpha * y_hat + epsilon` with one Gamma-distributed
/// multiplier per image and an additive Gaussian-process field.
///
/// The GP field is white noise convolved with a Gaussian kernel chosen so the
/// field's autocorrelation matches the GP kernel `exp(-d^2 / (2 l^2))` with
/// bandwidth `l` (the convolution kernel gets width `l / sqrt(2)`), then
/// rescaled to the marginal std `sigma` in meters of depth.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub gamma_shape: f64,
    pub gamma_scale: f64,
    /// Marginal std of the GP field, meters.
    pub gp_sigma: f64,
    /// GP kernel bandwidth, pixels.
    pub gp_bandwidth_px: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            gamma_shape: 1000.0,
            gamma_scale: 0.001,
            gp_sigma: 0.005,
            gp_bandwidth_px: std::f64::consts::SQRT_2,
        }
    }
}

impl NoiseModel {
    pub fn disabled() -> Self {
        Self {
            gamma_shape: 0.0,
            gamma_scale: 0.0,
            gp_sigma: 0.0,
            gp_bandwidth_px: std::f64::consts::SQRT_2,
        }
    }

    pub fn sample_alpha(&self, rng: &mut impl Rng) -> f64 {
        if self.gamma_shape <= 0.0 || self.gamma_scale <= 0.0 {
            return 1.0;
        }
        Gamma::new(self.gamma_shape, self.gamma_scale)
            .expect("valid gamma")
            .sample(rng)
    }
}

/// Applies the noise model to every returned pixel (no-return zeros stay
/// zero). Negative results clamp to zero; the clamp count is returned.
pub fn corrupt_depth(img: &DepthImage, model: &NoiseModel, rng: &mut impl Rng) -> (DepthImage, usize) {
    let alpha = model.sample_alpha(rng);
    let field = if model.gp_sigma > 0.0 {
        gp_field(img.width, img.height, model.gp_sigma, model.gp_bandwidth_px, rng)
    } else {
        vec![0.0; img.data.len()]
    };
    let mut out = img.clone();
    let mut clamped = 0usize;
    for (i, d) in out.data.iter_mut().enumerate() {
        if *d == 0.0 {
            continue;
        }
        let noisy = alpha * (*d as f64) + field[i];
        if noisy < 0.0 {
            clamped += 1;
            *d = 0.0;
        } else {
            *d = noisy as f32;
        }
    }
    (out, clamped)
}

/// Smoothed white-noise field with marginal std `sigma` and Gaussian-kernel
/// autocorrelation of bandwidth `l` pixels.
pub fn gp_field(
    width: usize,
    height: usize,
    sigma: f64,
    bandwidth_px: f64,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let white: Vec<f64> = (0..width * height).map(|_| normal.sample(rng)).collect();

    // Separable convolution kernel of std l / sqrt(2): smoothing with std s
    // yields field autocorrelation exp(-d^2 / (4 s^2)).
    let s = bandwidth_px / std::f64::consts::SQRT_2;
    let half = (3.0 * s).ceil() as i64;
    let kernel: Vec<f64> = (-half..=half)
        .map(|i| (-((i as f64).powi(2)) / (2.0 * s * s)).exp())
        .collect();
    let ksum: f64 = kernel.iter().sum();
    let kernel: Vec<f64> = kernel.into_iter().map(|k| k / ksum).collect();
    // Marginal variance of separably smoothed unit white noise is ||k||_2^4.
    let k2: f64 = kernel.iter().map(|k| k * k).sum();
    let gain = sigma / k2;

    let mut tmp = vec![0.0; width * height];
    for v in 0..height {
        for u in 0..width {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                let x = (u as i64 + ki as i64 - half).clamp(0, width as i64 - 1) as usize;
                acc += k * white[v * width + x];
            }
            tmp[v * width + u] = acc;
        }
    }
    let mut out = vec![0.0; width * height];
    for v in 0..height {
        for u in 0..width {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                let y = (v as i64 + ki as i64 - half).clamp(0, height as i64 - 1) as usize;
                acc += k * tmp[y * width + u];
            }
            out[v * width + u] = acc * gain;
        }
    }
    out
}
