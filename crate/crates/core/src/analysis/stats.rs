//! Goodness-of-fit tests and sample statistics.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};
use crate::state::ProbabilityMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form converges fast for small arguments.
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in 1..=20 {
            let m = (2 * k - 1) as f64;
            cdf += (-m * m * c).exp();
        }
        cdf *= (2.0 * std::f64::consts::PI).sqrt() / lambda;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += if k % 2 == 1 { term } else { -term };
            if term < 1e-300 {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// One-sample KS test of `samples` against a continuous `cdf`, with the
/// asymptotic p-value `Q(sqrt(n) D)`.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut u: Vec<f64> = samples.iter().map(|&x| cdf(x)).collect();
    if u.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite { row: 0, col: 0 });
    }
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let statistic = u
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_survival(n.sqrt() * statistic),
    })
}

pub fn ks_uniformity_test(samples: &[f64]) -> Result<KsResult> {
    ks_test(samples, |x| x.clamp(0.0, 1.0))
}

/// KS test against Beta(a, b). A Dirichlet(1, ..., 1) vector of length `m`
/// has Beta(1, m - 1) marginals.
pub fn beta_marginal_test(samples: &[f64], a: f64, b: f64) -> Result<KsResult> {
    let beta = Beta::new(a, b)
        .map_err(|_| Error::out_of_range("beta shape", if a > 0.0 { b } else { a }, "(0, inf)"))?;
    if a == 1.0 && b == 1.0 {
        return ks_uniformity_test(samples);
    }
    ks_test(samples, |x| beta.cdf(x.clamp(0.0, 1.0)))
}

fn flatten_off_diagonal(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1));
    for (i, row) in m.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if i != j {
                out.push(x);
            }
        }
    }
    out
}

/// Eigenvalues, in decreasing order, of the empirical covariance of the
/// flattened off-diagonal entries of `samples`.
pub fn covariance_eigenvalues(samples: &[Vec<Vec<f64>>]) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            found: samples.len(),
        });
    }
    let rows: Vec<Vec<f64>> = samples.iter().map(|m| flatten_off_diagonal(m)).collect();
    let dim = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    let count = rows.len();
    let data = DMatrix::from_fn(count, dim, |r, c| rows[r][c]);
    let mean = data.row_mean();
    let centered = DMatrix::from_fn(count, dim, |r, c| data[(r, c)] - mean[c]);
    let cov = centered.transpose() * &centered / (count - 1) as f64;
    let mut eig: Vec<f64> = SymmetricEigen::new(cov)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(eig)
}

/// Number of covariance eigenvalues above `rel_tol` times the largest.
pub fn covariance_rank(samples: &[Vec<Vec<f64>>], rel_tol: f64) -> Result<usize> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::out_of_range("rel_tol", rel_tol, "(0, 1)"));
    }
    let eig = covariance_eigenvalues(samples)?;
    let top = eig.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Ok(0);
    }
    Ok(eig.iter().filter(|&&x| x > rel_tol * top).count())
}

/// `scale * (p - uniform)` as a dense matrix.
pub fn scaled_deviation(p: &ProbabilityMatrix, scale: f64) -> Vec<Vec<f64>> {
    let n = p.n();
    let u = 1.0 / (n - 1) as f64;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        scale * (p.get(i, j) - u)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            found: x.len(),
        });
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

pub fn median(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Ok(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}
