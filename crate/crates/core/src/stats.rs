//! Small statistics helpers: moments, one-sample Kolmogorov-Smirnov test,
//! Spearman rank correlation, and precision-recall summaries.

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

/// One-sample KS statistic against a uniform distribution on `[lo, hi]`.
pub fn ks_statistic_uniform(samples: &mut [f64], lo: f64, hi: f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let cdf = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
        let lo_emp = i as f64 / n;
        let hi_emp = (i + 1) as f64 / n;
        d = d.max((cdf - lo_emp).abs()).max((hi_emp - cdf).abs());
    }
    d
}

/// Asymptotic p-value for the KS statistic (Kolmogorov distribution with the
/// Stephens small-sample correction).
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        p += sign * (-2.0 * (k as f64 * lambda).powi(2)).exp();
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// Spearman rank correlation; averaged ranks on ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ra = ranks(a);
    let rb = ranks(b);
    pearson(&ra, &rb)
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&i, &j| xs[i].partial_cmp(&xs[j]).unwrap().then(i.cmp(&j)));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let ma = mean(a);
    let mb = mean(b);
    let mut num = 0.0;
    let mut da = 0.0;
    let mut db = 0.0;
    for (x, y) in a.iter().zip(b) {
        num += (x - ma) * (y - mb);
        da += (x - ma).powi(2);
        db += (y - mb).powi(2);
    }
    num / (da * db).sqrt()
}

/// One threshold sweep row over labeled scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    /// Fraction of all items with score >= threshold.
    pub attempt_rate: f64,
    /// Fraction of attempted items that are labeled positive (== precision).
    pub success_rate: f64,
}

/// Threshold sweep over the unique score values, descending. Items are
/// `(score, label)`.
pub fn pr_series(items: &[(f64, bool)]) -> Vec<PrPoint> {
    assert!(!items.is_empty());
    let mut sorted: Vec<(f64, bool)> = items.to_vec();
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let positives = sorted.iter().filter(|(_, l)| *l).count().max(1) as f64;
    let n = sorted.len() as f64;
    let mut out = Vec::new();
    let mut tp = 0usize;
    let mut taken = 0usize;
    let mut i = 0;
    while i < sorted.len() {
        let tau = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == tau {
            taken += 1;
            if sorted[i].1 {
                tp += 1;
            }
            i += 1;
        }
        let precision = tp as f64 / taken as f64;
        out.push(PrPoint {
            threshold: tau,
            precision,
            recall: tp as f64 / positives,
            attempt_rate: taken as f64 / n,
            success_rate: precision,
        });
    }
    out
}

/// Area under the precision-recall curve by trapezoidal integration over
/// recall, anchored at recall 0 with the first precision value.
pub fn average_precision(items: &[(f64, bool)]) -> f64 {
    let series = pr_series(items);
    let mut ap = 0.0;
    let mut prev_r = 0.0;
    let mut prev_p = series.first().map_or(1.0, |p| p.precision);
    for pt in &series {
        ap += (pt.recall - prev_r) * 0.5 * (pt.precision + prev_p);
        prev_r = pt.recall;
        prev_p = pt.precision;
    }
    ap
}
