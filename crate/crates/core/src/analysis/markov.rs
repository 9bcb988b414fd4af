//! Exact computations for the Ehrenfest two-urn chain.
//!
//! States are indexed by the number of balls in the first urn, from `N`
//! down to 0, so index 0 is `(N, 0)` and index `N` is `(0, N)`.

use statrs::distribution::{Binomial, Discrete};

use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<f64>>;

/// Transition matrix of the Ehrenfest chain with `balls` balls.
pub fn ehrenfest_transition_matrix(balls: usize) -> Result<Matrix> {
    if balls == 0 {
        return Err(Error::EmptyUrn);
    }
    let n = balls as f64;
    let size = balls + 1;
    let mut p = vec![vec![0.0; size]; size];
    for (idx, row) in p.iter_mut().enumerate() {
        let first = balls - idx;
        // a ball leaves the first urn: index increases
        if first > 0 {
            row[idx + 1] = first as f64 / n;
        }
        if first < balls {
            row[idx - 1] = (balls - first) as f64 / n;
        }
    }
    Ok(p)
}

fn check_stochastic(p: &Matrix) -> Result<usize> {
    let size = p.len();
    if size == 0 {
        return Err(Error::EmptySample);
    }
    for (i, row) in p.iter().enumerate() {
        if row.len() != size {
            return Err(Error::NotSquare {
                row: i,
                expected: size,
                found: row.len(),
            });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::RowSum { row: i, sum });
        }
    }
    Ok(size)
}

/// Law after one step: `law * P`.
pub fn step_law(law: &[f64], p: &Matrix) -> Vec<f64> {
    let mut out = vec![0.0; law.len()];
    for (i, &mass) in law.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        for (j, &x) in p[i].iter().enumerate() {
            out[j] += mass * x;
        }
    }
    out
}

/// Stationary vector by power iteration on the lazy chain `(I + P) / 2`,
/// which shares the stationary vector of `P` and is aperiodic. Stops when
/// successive iterates differ by less than `tol` in L1.
pub fn stationary_distribution(p: &Matrix, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let size = check_stochastic(p)?;
    let mut law = vec![1.0 / size as f64; size];
    for _ in 0..max_iter {
        let moved = step_law(&law, p);
        let next: Vec<f64> = law.iter().zip(&moved).map(|(a, b)| 0.5 * (a + b)).collect();
        let change: f64 = next.iter().zip(&law).map(|(a, b)| (a - b).abs()).sum();
        law = next;
        if change < tol {
            let total: f64 = law.iter().sum();
            return Ok(law.into_iter().map(|x| x / total).collect());
        }
    }
    Err(Error::out_of_range(
        "power iteration",
        max_iter as f64,
        "did not converge within the iteration limit",
    ))
}

/// Binomial(`balls`, 1/2) law of the first-urn count, in chain index order.
pub fn binomial_law(balls: usize) -> Vec<f64> {
    let b = Binomial::new(0.5, balls as u64).expect("valid binomial");
    (0..=balls).map(|idx| b.pmf((balls - idx) as u64)).collect()
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Exact law after `steps` moves from the all-in-first-urn state.
pub fn law_from_full_urn(balls: usize, steps: usize) -> Result<Vec<f64>> {
    let p = ehrenfest_transition_matrix(balls)?;
    let mut law = vec![0.0; balls + 1];
    law[0] = 1.0;
    for _ in 0..steps {
        law = step_law(&law, &p);
    }
    Ok(law)
}

/// The `N log N / 2` step scale after which the chain is close to its
/// binomial equilibrium.
pub fn mixing_scale(balls: usize) -> usize {
    let n = balls as f64;
    (0.5 * n * n.ln()).ceil() as usize
}

/// Total variation to the binomial law after `steps` moves from a full
/// urn, averaging steps `t` and `t + 1` to remove the chain's parity.
pub fn parity_averaged_distance(balls: usize, steps: usize) -> Result<f64> {
    let p = ehrenfest_transition_matrix(balls)?;
    let now = law_from_full_urn(balls, steps)?;
    let next = step_law(&now, &p);
    let avg: Vec<f64> = now.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
    Ok(total_variation(&avg, &binomial_law(balls)))
}
