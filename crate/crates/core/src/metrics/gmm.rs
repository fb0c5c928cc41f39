//! Minimal full-covariance Gaussian mixture: k-means++-style seeding, a few
//! EM sweeps, and Cholesky sampling. Enough for CEM elite refitting; not a
//! general clustering tool.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Diagonal floor added whenever a component covariance degenerates.
pub const COV_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Gmm {
    pub weights: Vec<f64>,
    pub means: Vec<DVector<f64>>,
    pub covariances: Vec<DMatrix<f64>>,
    factors: Vec<DMatrix<f64>>,
}

impl Gmm {
    /// Fits `k` components to `data` with `iters` EM sweeps.
    pub fn fit(data: &[DVector<f64>], k: usize, iters: usize, rng: &mut impl Rng) -> Self {
        assert!(data.len() >= k && k >= 1);
        let dim = data[0].len();

        // Greedy farthest-point seeding from a random start.
        let mut means: Vec<DVector<f64>> = Vec::with_capacity(k);
        means.push(data[rng.random_range(0..data.len())].clone());
        while means.len() < k {
            let far = data
                .iter()
                .max_by(|a, b| {
                    let da = means.iter().map(|m| (*a - m).norm_squared()).fold(f64::INFINITY, f64::min);
                    let db = means.iter().map(|m| (*b - m).norm_squared()).fold(f64::INFINITY, f64::min);
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            means.push(far.clone());
        }

        let mut weights = vec![1.0 / k as f64; k];
        let mut covariances = vec![scatter(data) / data.len() as f64 + floor(dim); k];
        let mut resp = DMatrix::zeros(data.len(), k);

        for _ in 0..iters {
            let factors: Vec<Cholesky<f64, nalgebra::Dyn>> = covariances
                .iter()
                .map(|c| Cholesky::new(c.clone()).unwrap_or_else(|| {
                    Cholesky::new(c.clone() + floor(dim) * 10.0).expect("floored covariance")
                }))
                .collect();
            // E step.
            for (i, x) in data.iter().enumerate() {
                let mut row = Vec::with_capacity(k);
                for c in 0..k {
                    row.push(weights[c].ln() + log_gauss(x, &means[c], &factors[c]));
                }
                let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mut z = 0.0;
                for v in row.iter_mut() {
                    *v = (*v - mx).exp();
                    z += *v;
                }
                for c in 0..k {
                    resp[(i, c)] = row[c] / z;
                }
            }
            // M step.
            for c in 0..k {
                let nc: f64 = (0..data.len()).map(|i| resp[(i, c)]).sum();
                if nc < 1e-12 {
                    continue;
                }
                weights[c] = nc / data.len() as f64;
                let mut mu = DVector::zeros(dim);
                for (i, x) in data.iter().enumerate() {
                    mu += x * resp[(i, c)];
                }
                mu /= nc;
                let mut cov = DMatrix::zeros(dim, dim);
                for (i, x) in data.iter().enumerate() {
                    let d = x - &mu;
                    cov += (&d * d.transpose()) * resp[(i, c)];
                }
                cov /= nc;
                means[c] = mu;
                covariances[c] = cov + floor(dim);
            }
        }

        let factors = covariances
            .iter()
            .map(|c| {
                Cholesky::new(c.clone())
                    .unwrap_or_else(|| {
                        Cholesky::new(c.clone() + floor(dim) * 10.0).expect("floored covariance")
                    })
                    .l()
            })
            .collect();
        Self {
            weights,
            means,
            covariances,
            factors,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> DVector<f64> {
        let mut pick = rng.random::<f64>();
        let mut c = 0;
        for (i, w) in self.weights.iter().enumerate() {
            if pick < *w || i == self.weights.len() - 1 {
                c = i;
                break;
            }
            pick -= w;
        }
        let dim = self.means[c].len();
        let normal = Normal::new(0.0, 1.0).unwrap();
        let z = DVector::from_iterator(dim, (0..dim).map(|_| normal.sample(rng)));
        &self.means[c] + &self.factors[c] * z
    }
}

fn floor(dim: usize) -> DMatrix<f64> {
    DMatrix::identity(dim, dim) * COV_FLOOR
}

fn scatter(data: &[DVector<f64>]) -> DMatrix<f64> {
    let dim = data[0].len();
    let mean = data.iter().fold(DVector::zeros(dim), |a, x| a + x) / data.len() as f64;
    let mut s = DMatrix::zeros(dim, dim);
    for x in data {
        let d = x - &mean;
        s += &d * d.transpose();
    }
    s
}

fn log_gauss(x: &DVector<f64>, mean: &DVector<f64>, chol: &Cholesky<f64, nalgebra::Dyn>) -> f64 {
    let d = x - mean;
    let sol = chol.solve(&d);
    let maha = d.dot(&sol);
    let logdet: f64 = chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
    -0.5 * (maha + logdet + x.len() as f64 * (2.0 * std::f64::consts::PI).ln())
}
