//! Probability rules and weight-update rules.
//!
//! All functions here are pure: they take a state and return a new one.

use rand::Rng;

use crate::error::{Error, Result};
use crate::state::{ProbabilityMatrix, Rule, WeightMatrix};

/// One realised visit and the payoffs it produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisitOutcome {
    pub visitor: usize,
    pub host: usize,
    pub visitor_payoff: f64,
    pub host_payoff: f64,
}

impl VisitOutcome {
    pub fn new(visitor: usize, host: usize, visitor_payoff: f64, host_payoff: f64) -> Self {
        Self {
            visitor,
            host,
            visitor_payoff,
            host_payoff,
        }
    }
}

/// `p[i][j] = w[i][j] / sum_k w[i][k]`.
pub fn linear_probabilities(w: &WeightMatrix) -> Result<ProbabilityMatrix> {
    let n = w.n();
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        let row = w.row(i);
        let mut sum = 0.0;
        for (j, &x) in row.iter().enumerate() {
            if j == i {
                continue;
            }
            if x < 0.0 {
                return Err(Error::NegativeWeight {
                    row: i,
                    col: j,
                    value: x,
                });
            }
            sum += x;
        }
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(Error::DegenerateRow(i));
        }
        for (j, &x) in row.iter().enumerate() {
            if j != i {
                p[i * n + j] = x / sum;
            }
        }
    }
    Ok(ProbabilityMatrix::from_raw(n, p))
}

/// Visit probabilities proportional to reciprocal resistances, with the
/// diagonal reciprocal taken as zero.
pub fn resistance_probabilities(w: &WeightMatrix) -> Result<ProbabilityMatrix> {
    let n = w.n();
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        let mut sum = 0.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            let x = w.get(i, j);
            if x < 0.0 {
                return Err(Error::NegativeWeight {
                    row: i,
                    col: j,
                    value: x,
                });
            }
            if x == 0.0 {
                return Err(Error::ZeroResistance { row: i, col: j });
            }
            let r = 1.0 / x;
            p[i * n + j] = r;
            sum += r;
        }
        for j in 0..n {
            p[i * n + j] /= sum;
        }
    }
    Ok(ProbabilityMatrix::from_raw(n, p))
}

/// Softmax of each row over the off-diagonal entries. Weights may be
/// negative here.
pub fn loglik_probabilities(w: &WeightMatrix) -> Result<ProbabilityMatrix> {
    let n = w.n();
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        let mut max = f64::NEG_INFINITY;
        for j in 0..n {
            let x = w.get(i, j);
            if !x.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            if j != i {
                max = max.max(x);
            }
        }
        let mut sum = 0.0;
        for j in 0..n {
            if j != i {
                let e = (w.get(i, j) - max).exp();
                p[i * n + j] = e;
                sum += e;
            }
        }
        for j in 0..n {
            p[i * n + j] /= sum;
        }
    }
    Ok(ProbabilityMatrix::from_raw(n, p))
}

/// `eps/(n-1) + (1-eps) p[i][j]` off the diagonal.
pub fn noisy_mix(p: &ProbabilityMatrix, eps: f64) -> Result<ProbabilityMatrix> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::out_of_range("noise", eps, "[0, 1]"));
    }
    let n = p.n();
    if eps == 0.0 {
        return Ok(p.clone());
    }
    let base = eps / (n - 1) as f64;
    let mut out = p.as_slice().to_vec();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out[i * n + j] = base + (1.0 - eps) * out[i * n + j];
            }
        }
    }
    Ok(ProbabilityMatrix::from_raw(n, out))
}

/// Visit probabilities for `rule`, with noise mixed in afterwards.
pub fn probabilities(w: &WeightMatrix, rule: Rule, noise: f64) -> Result<ProbabilityMatrix> {
    let p = match rule {
        Rule::Linear | Rule::Transfer => linear_probabilities(w)?,
        Rule::Resistance => resistance_probabilities(w)?,
        Rule::LogLikelihood => loglik_probabilities(w)?,
    };
    noisy_mix(&p, noise)
}

fn check_outcomes(n: usize, outcomes: &[VisitOutcome]) -> Result<()> {
    for o in outcomes {
        for index in [o.visitor, o.host] {
            if index >= n {
                return Err(Error::AgentIndex { index, n });
            }
        }
        if o.visitor == o.host {
            return Err(Error::SelfVisit(o.visitor));
        }
    }
    Ok(())
}

/// Per-entry increments for a batch of visits. Each entry receives at most
/// one visitor payoff and one host payoff, summed in a fixed order so the
/// result does not depend on the order of `outcomes`.
fn payoff_increments(
    n: usize,
    outcomes: &[VisitOutcome],
    symmetric: bool,
    magnitude: bool,
) -> Vec<f64> {
    let f = |x: f64| if magnitude { x.abs() } else { x };
    let mut visitor = vec![0.0; n * n];
    let mut host = vec![0.0; n * n];
    for o in outcomes {
        visitor[o.visitor * n + o.host] += f(o.visitor_payoff);
        if symmetric {
            host[o.host * n + o.visitor] += f(o.host_payoff);
        }
    }
    visitor.iter().zip(&host).map(|(a, b)| a + b).collect()
}

fn additive_update(
    w: &WeightMatrix,
    outcomes: &[VisitOutcome],
    symmetric: bool,
    d: f64,
    allow_negative: bool,
) -> Result<WeightMatrix> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::out_of_range("discount", d, "(0, 1]"));
    }
    let n = w.n();
    check_outcomes(n, outcomes)?;
    let inc = payoff_increments(n, outcomes, symmetric, false);
    let mut out = w.as_slice().to_vec();
    for (x, delta) in out.iter_mut().zip(&inc) {
        if d != 1.0 {
            *x *= d;
        }
        *x += delta;
    }
    let out = WeightMatrix::from_raw(n, out);
    if !allow_negative {
        out.check_nonnegative()?;
    }
    Ok(out)
}

/// Discount every weight by `d`, then add each visit's visitor payoff to
/// `w[visitor][host]` and, when `symmetric`, the host payoff to
/// `w[host][visitor]`. A negative result is an error.
pub fn linear_update(
    w: &WeightMatrix,
    outcomes: &[VisitOutcome],
    symmetric: bool,
    d: f64,
) -> Result<WeightMatrix> {
    additive_update(w, outcomes, symmetric, d, false)
}

/// The same additive update for the log-likelihood rule, where weights may
/// go negative.
pub fn loglik_update(
    w: &WeightMatrix,
    outcomes: &[VisitOutcome],
    symmetric: bool,
    d: f64,
) -> Result<WeightMatrix> {
    additive_update(w, outcomes, symmetric, d, true)
}

/// Adds payoff magnitudes to resistances. Payoffs must be non-positive.
pub fn resistance_update(
    w: &WeightMatrix,
    outcomes: &[VisitOutcome],
    symmetric: bool,
) -> Result<WeightMatrix> {
    let n = w.n();
    check_outcomes(n, outcomes)?;
    for o in outcomes {
        if o.visitor_payoff > 0.0 {
            return Err(Error::PositivePayoff(o.visitor_payoff));
        }
        if symmetric && o.host_payoff > 0.0 {
            return Err(Error::PositivePayoff(o.host_payoff));
        }
    }
    let inc = payoff_increments(n, outcomes, symmetric, true);
    let out = w.as_slice().iter().zip(&inc).map(|(x, d)| x + d).collect();
    Ok(WeightMatrix::from_raw(n, out))
}

/// Transfer rule for three agents: when `i` visits `j`, one unit moves from
/// `w[i][j]` to `w[i][k]`, `k` the remaining agent. Each agent's pair of
/// weights is an Ehrenfest urn.
pub fn transfer_update(w: &WeightMatrix, outcomes: &[VisitOutcome]) -> Result<WeightMatrix> {
    let n = w.n();
    if n != 3 {
        return Err(Error::TransferPopulation(n));
    }
    check_outcomes(n, outcomes)?;
    let mut out = w.as_slice().to_vec();
    for o in outcomes {
        let (i, j) = (o.visitor, o.host);
        let k = 3 - i - j;
        if out[i * n + j] < 1.0 {
            return Err(Error::EmptyUrn);
        }
        out[i * n + j] -= 1.0;
        out[i * n + k] += 1.0;
    }
    Ok(WeightMatrix::from_raw(n, out))
}

/// One Ehrenfest move: a ball chosen uniformly among all of them changes urn.
pub fn transfer_step<R: Rng + ?Sized>(urn: (u64, u64), rng: &mut R) -> Result<(u64, u64)> {
    let total = urn.0 + urn.1;
    if total == 0 {
        return Err(Error::EmptyUrn);
    }
    if rng.random_range(0..total) < urn.0 {
        Ok((urn.0 - 1, urn.1 + 1))
    } else {
        Ok((urn.0 + 1, urn.1 - 1))
    }
}
