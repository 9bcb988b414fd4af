//! Limit-state classification and distances between probability matrices.

use serde::{Deserialize, Serialize};

use super::graph::extract_graph;
use crate::error::{Error, Result};
use crate::state::ProbabilityMatrix;

pub const DEFAULT_FIXATION_TOL: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub center: usize,
    pub leaves: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateClass {
    /// Every agent is in a mutual pair and visits only its partner.
    Pairing {
        pairs: Vec<(usize, usize)>,
    },
    /// Every agent visits a single target, `targets[i]`.
    Fixation {
        targets: Vec<usize>,
    },
    /// A partition into pairs and stars of size at least 3, where each leaf
    /// visits only its center.
    PairsPlusStars {
        pairs: Vec<(usize, usize)>,
        stars: Vec<Star>,
    },
    Uniform,
    Unsettled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateLabel {
    Pairing,
    PairsPlusStars,
    Fixation,
    Uniform,
    Unsettled,
}

impl StateLabel {
    pub const ALL: [StateLabel; 5] = [
        StateLabel::Pairing,
        StateLabel::PairsPlusStars,
        StateLabel::Fixation,
        StateLabel::Uniform,
        StateLabel::Unsettled,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StateLabel::Pairing => "pairing",
            StateLabel::PairsPlusStars => "pairs_plus_stars",
            StateLabel::Fixation => "fixation",
            StateLabel::Uniform => "uniform",
            StateLabel::Unsettled => "unsettled",
        }
    }
}

impl StateClass {
    pub fn label(&self) -> StateLabel {
        match self {
            StateClass::Pairing { .. } => StateLabel::Pairing,
            StateClass::PairsPlusStars { .. } => StateLabel::PairsPlusStars,
            StateClass::Fixation { .. } => StateLabel::Fixation,
            StateClass::Uniform => StateLabel::Uniform,
            StateClass::Unsettled => StateLabel::Unsettled,
        }
    }
}

type Partition = (Vec<(usize, usize)>, Vec<Star>);

fn pairs_and_stars(p: &ProbabilityMatrix, eps_g: f64, tol: f64) -> Result<Option<Partition>> {
    let g = extract_graph(p, eps_g)?;
    let mut pairs = Vec::new();
    let mut stars = Vec::new();
    for comp in g.components() {
        match comp.len() {
            1 => return Ok(None),
            2 => {
                let (a, b) = (comp[0], comp[1]);
                if p.get(a, b) < 1.0 - tol || p.get(b, a) < 1.0 - tol {
                    return Ok(None);
                }
                pairs.push((a, b));
            }
            size => {
                let centers: Vec<_> = comp
                    .iter()
                    .copied()
                    .filter(|&v| g.degree(v) == size - 1)
                    .collect();
                let [center] = centers[..] else {
                    return Ok(None);
                };
                let leaves: Vec<_> = comp.iter().copied().filter(|&v| v != center).collect();
                if leaves
                    .iter()
                    .any(|&v| g.degree(v) != 1 || p.get(v, center) < 1.0 - tol)
                {
                    return Ok(None);
                }
                stars.push(Star { center, leaves });
            }
        }
    }
    Ok(Some((pairs, stars)))
}

/// Classifies a probability matrix, checking in order: a perfect pairing,
/// fixation of every row, a pairs-and-stars partition, uniformity.
pub fn classify_state(p: &ProbabilityMatrix, eps_g: f64, fixation_tol: f64) -> Result<StateClass> {
    let n = p.n();
    let partition = pairs_and_stars(p, eps_g, fixation_tol)?;
    if let Some((pairs, stars)) = &partition {
        if stars.is_empty() {
            return Ok(StateClass::Pairing {
                pairs: pairs.clone(),
            });
        }
    }
    let targets: Option<Vec<usize>> = (0..n)
        .map(|i| (0..n).find(|&j| j != i && p.get(i, j) >= 1.0 - fixation_tol))
        .collect();
    if let Some(targets) = targets {
        return Ok(StateClass::Fixation { targets });
    }
    if let Some((pairs, stars)) = partition {
        return Ok(StateClass::PairsPlusStars { pairs, stars });
    }
    if distance_to_uniform(p) <= fixation_tol {
        return Ok(StateClass::Uniform);
    }
    Ok(StateClass::Unsettled)
}

/// Largest off-diagonal deviation from `1/(n-1)`.
pub fn distance_to_uniform(p: &ProbabilityMatrix) -> f64 {
    let n = p.n();
    let u = 1.0 / (n - 1) as f64;
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d = d.max((p.get(i, j) - u).abs());
            }
        }
    }
    d
}

/// Largest `|p[i][j] - p[j][i]|`.
pub fn symmetry_defect(p: &ProbabilityMatrix) -> f64 {
    let n = p.n();
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            d = d.max((p.get(i, j) - p.get(j, i)).abs());
        }
    }
    d
}

pub fn max_entry_distance(a: &ProbabilityMatrix, b: &ProbabilityMatrix) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Distance from `p` to the nearest trap, in the max-entry norm.
pub fn trap_proximity(p: &ProbabilityMatrix, traps: &[ProbabilityMatrix]) -> Result<f64> {
    if traps.is_empty() {
        return Err(Error::EmptySample);
    }
    traps
        .iter()
        .map(|t| max_entry_distance(p, t))
        .try_fold(f64::INFINITY, |acc, d| d.map(|d| acc.min(d)))
}

/// The three unstable rest points of symmetrised reinforcement with three
/// agents: one agent is ignored by the other two, who visit only each
/// other, and splits its own visits evenly.
pub fn friends2_traps() -> [ProbabilityMatrix; 3] {
    let m = |rows: [[f64; 3]; 3]| {
        ProbabilityMatrix::from_rows(&rows.map(|r| r.to_vec()))
            .expect("trap matrices are stochastic")
    };
    [
        m([[0.0, 0.5, 0.5], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]),
        m([[0.0, 0.0, 1.0], [0.5, 0.0, 0.5], [1.0, 0.0, 0.0]]),
        m([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.5, 0.5, 0.0]]),
    ]
}
