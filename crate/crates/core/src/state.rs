//! Shared state types: weight and probability matrices, agent types and
//! strategy profiles, game identities and the dynamics configuration.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Tolerance on row sums of a [`ProbabilityMatrix`].
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Square `n x n` matrix of directed weights (or resistances) with a zero
/// diagonal. Entry `(i, j)` is agent `i`'s weight for visiting `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    w: Vec<f64>,
}

/// Builds the symmetric starting state: `w0` everywhere off the diagonal.
pub fn new_uniform_state(n: usize, w0: f64) -> Result<WeightMatrix> {
    WeightMatrix::uniform(n, w0)
}

impl WeightMatrix {
    pub fn uniform(n: usize, w0: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPopulation(n));
        }
        if !(w0.is_finite() && w0 > 0.0) {
            return Err(Error::InvalidInitialWeight(w0));
        }
        let mut w = vec![w0; n * n];
        for i in 0..n {
            w[i * n + i] = 0.0;
        }
        Ok(Self { n, w })
    }

    /// Validated constructor for nonnegative weights or resistances.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = Self::from_signed_rows(rows)?;
        m.check_nonnegative()?;
        Ok(m)
    }

    /// Constructor that admits negative entries, as used by the
    /// log-likelihood rule. Diagonal must still be zero and entries finite.
    pub fn from_signed_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::InvalidPopulation(n));
        }
        let mut w = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: i,
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if i == j && x != 0.0 {
                    return Err(Error::NonzeroDiagonal(i));
                }
            }
            w.extend_from_slice(row);
        }
        Ok(Self { n, w })
    }

    pub(crate) fn from_raw(n: usize, w: Vec<f64>) -> Self {
        debug_assert_eq!(w.len(), n * n);
        Self { n, w }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.w[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.w.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                let x = self.get(i, j);
                if x < 0.0 {
                    return Err(Error::NegativeWeight {
                        row: i,
                        col: j,
                        value: x,
                    });
                }
            }
        }
        Ok(())
    }

    /// Checks the invariants a matrix must satisfy to drive `rule`.
    pub fn validate_for(&self, rule: Rule) -> Result<()> {
        for i in 0..self.n {
            if self.get(i, i) != 0.0 {
                return Err(Error::NonzeroDiagonal(i));
            }
            for j in 0..self.n {
                if !self.get(i, j).is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        if rule == Rule::LogLikelihood {
            return Ok(());
        }
        self.check_nonnegative()?;
        for i in 0..self.n {
            if self.row_sum(i) <= 0.0 {
                return Err(Error::DegenerateRow(i));
            }
        }
        if rule == Rule::Resistance {
            for i in 0..self.n {
                for j in 0..self.n {
                    if i != j && self.get(i, j) == 0.0 {
                        return Err(Error::ZeroResistance { row: i, col: j });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Row-stochastic visit probabilities with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    n: usize,
    p: Vec<f64>,
}

impl ProbabilityMatrix {
    /// Every agent visits each of the others with probability `1/(n-1)`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPopulation(n));
        }
        let v = 1.0 / (n - 1) as f64;
        let mut p = vec![v; n * n];
        for i in 0..n {
            p[i * n + i] = 0.0;
        }
        Ok(Self { n, p })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::InvalidPopulation(n));
        }
        let mut p = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: i,
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::InvalidProbability {
                        row: i,
                        col: j,
                        value: x,
                    });
                }
            }
            if row[i] != 0.0 {
                return Err(Error::NonzeroDiagonal(i));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowSum { row: i, sum });
            }
            p.extend_from_slice(row);
        }
        Ok(Self { n, p })
    }

    pub(crate) fn from_raw(n: usize, p: Vec<f64>) -> Self {
        debug_assert_eq!(p.len(), n * n);
        Self { n, p }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.p[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.p.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Off-diagonal entries in row-major order, `n(n-1)` values.
    pub fn off_diagonal(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * (n - 1));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out.push(self.get(i, j));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(j, i)).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AgentType {
    /// The single strategy of the uniform-reinforcement games.
    Trivial,
    Stag,
    Rabbit,
}

impl fmt::Display for AgentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AgentType::Trivial => "trivial",
            AgentType::Stag => "stag",
            AgentType::Rabbit => "rabbit",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyProfile {
    types: Vec<AgentType>,
}

impl StrategyProfile {
    pub fn new(types: Vec<AgentType>) -> Self {
        Self { types }
    }

    pub fn trivial(n: usize) -> Self {
        Self::new(vec![AgentType::Trivial; n])
    }

    /// First `stags` agents hunt stag, the rest hunt rabbit.
    pub fn stag_rabbit_split(n: usize, stags: usize) -> Self {
        let stags = stags.min(n);
        let mut types = vec![AgentType::Stag; stags];
        types.resize(n, AgentType::Rabbit);
        Self::new(types)
    }

    /// The default starting profile for a game: all-trivial for the
    /// uniform games, an even stag/rabbit split for the Stag Hunt.
    pub fn initial_for(game: GameName, n: usize) -> Self {
        match game {
            GameName::StagHunt => Self::stag_rabbit_split(n, n / 2),
            _ => Self::trivial(n),
        }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn types(&self) -> &[AgentType] {
        &self.types
    }

    #[inline]
    pub fn get(&self, i: usize) -> AgentType {
        self.types[i]
    }

    pub fn count(&self, t: AgentType) -> usize {
        self.types.iter().filter(|&&x| x == t).count()
    }

    /// `Some(t)` when every agent has type `t`.
    pub fn coordinated(&self) -> Option<AgentType> {
        let first = *self.types.first()?;
        self.types.iter().all(|&t| t == first).then_some(first)
    }

    pub fn validate_for(&self, game: GameName) -> Result<()> {
        for &t in &self.types {
            if !game.admits(t) {
                return Err(Error::TypeMismatch {
                    game,
                    agent_type: t,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameName {
    FriendsI,
    FriendsII,
    EnemiesI,
    EnemiesII,
    StagHunt,
}

impl GameName {
    pub fn admits(self, t: AgentType) -> bool {
        match self {
            GameName::StagHunt => matches!(t, AgentType::Stag | AgentType::Rabbit),
            _ => t == AgentType::Trivial,
        }
    }

    /// Whether the host's payoff feeds back into the host's weight for the
    /// visitor.
    pub fn reinforces_host(self) -> bool {
        !matches!(self, GameName::FriendsI | GameName::EnemiesI)
    }

    /// The update rule the game is normally paired with.
    pub fn default_rule(self) -> Rule {
        match self {
            GameName::EnemiesI | GameName::EnemiesII => Rule::Resistance,
            _ => Rule::Linear,
        }
    }
}

/// A game together with its payoff rule; see [`crate::games::payoff`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameSpec {
    pub name: GameName,
}

impl GameSpec {
    pub const fn new(name: GameName) -> Self {
        Self { name }
    }
}

impl From<GameName> for GameSpec {
    fn from(name: GameName) -> Self {
        Self { name }
    }
}

/// How weights turn into visit probabilities and how payoffs update them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Probabilities proportional to weights; payoffs added to weights.
    Linear,
    /// Probabilities proportional to reciprocal resistances; payoff
    /// magnitudes added to resistances.
    Resistance,
    /// Probabilities are a softmax of weights; payoffs added to weights.
    LogLikelihood,
    /// Three-agent ball transfer: a visit moves one unit of weight from the
    /// visited agent to the other one.
    Transfer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub rule: Rule,
    /// Discount factor `d` in `(0, 1]`; 1 disables discounting.
    pub discount: f64,
    /// Noise level in `[0, 1)`; 0 disables noise.
    pub noise: f64,
    /// Per-round strategy revision probability; 0 freezes strategies.
    pub revision_prob: f64,
    /// Graph threshold; `None` means `1/(4n)`.
    pub graph_eps: Option<f64>,
    pub initial_weight: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            rule: Rule::Linear,
            discount: 1.0,
            noise: 0.0,
            revision_prob: 0.0,
            graph_eps: None,
            initial_weight: 1.0,
        }
    }
}

impl DynamicsConfig {
    pub fn for_game(game: GameName) -> Self {
        Self {
            rule: game.default_rule(),
            ..Self::default()
        }
    }

    pub fn graph_eps(&self, n: usize) -> f64 {
        self.graph_eps.unwrap_or(1.0 / (4.0 * n as f64))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::InvalidPopulation(n));
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return Err(Error::out_of_range("discount", self.discount, "(0, 1]"));
        }
        if !(0.0..1.0).contains(&self.noise) {
            return Err(Error::out_of_range("noise", self.noise, "[0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.revision_prob) {
            return Err(Error::out_of_range(
                "revision_prob",
                self.revision_prob,
                "[0, 1]",
            ));
        }
        let eps = self.graph_eps(n);
        if !(eps > 0.0 && eps < 1.0 / (2.0 * n as f64)) {
            return Err(Error::out_of_range("graph_eps", eps, "(0, 1/(2n))"));
        }
        if !(self.initial_weight.is_finite() && self.initial_weight > 0.0) {
            return Err(Error::InvalidInitialWeight(self.initial_weight));
        }
        if matches!(self.rule, Rule::Resistance | Rule::Transfer) && self.discount != 1.0 {
            return Err(Error::out_of_range(
                "discount",
                self.discount,
                "exactly 1 under the resistance and transfer rules",
            ));
        }
        if self.rule == Rule::Transfer {
            if n != 3 {
                return Err(Error::TransferPopulation(n));
            }
            if self.initial_weight.fract() != 0.0 {
                return Err(Error::FractionalBalls(self.initial_weight));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_state_examples() {
        let w = new_uniform_state(3, 1.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(w.get(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
        let w = new_uniform_state(2, 5.0).unwrap();
        assert_eq!(w.to_rows(), vec![vec![0.0, 5.0], vec![5.0, 0.0]]);
        let w = new_uniform_state(10, 1000.0).unwrap();
        assert!((0..10).all(|i| (0..10).all(|j| i == j || w.get(i, j) == 1000.0)));
    }

    #[test]
    fn uniform_state_rejects_bad_inputs() {
        assert_eq!(new_uniform_state(1, 1.0), Err(Error::InvalidPopulation(1)));
        assert_eq!(new_uniform_state(0, 1.0), Err(Error::InvalidPopulation(0)));
        assert!(matches!(
            new_uniform_state(3, 0.0),
            Err(Error::InvalidInitialWeight(_))
        ));
        assert!(new_uniform_state(3, -2.0).is_err());
        assert!(new_uniform_state(3, f64::NAN).is_err());
    }

    #[test]
    fn weight_validation() {
        assert_eq!(
            WeightMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]]),
            Err(Error::NonzeroDiagonal(0))
        );
        assert!(matches!(
            WeightMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]),
            Err(Error::NegativeWeight { row: 0, col: 1, .. })
        ));
        assert!(WeightMatrix::from_signed_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).is_ok());
        assert!(matches!(
            WeightMatrix::from_rows(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.0]]),
            Err(Error::NotSquare { .. })
        ));
        let w = WeightMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(w.validate_for(Rule::Linear), Err(Error::DegenerateRow(0)));
        let w = WeightMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(w.validate_for(Rule::Linear).is_ok());
        assert_eq!(
            w.validate_for(Rule::Resistance),
            Err(Error::ZeroResistance { row: 0, col: 2 })
        );
    }

    #[test]
    fn probability_validation() {
        assert!(ProbabilityMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
        assert!(matches!(
            ProbabilityMatrix::from_rows(&[vec![0.0, 0.9], vec![1.0, 0.0]]),
            Err(Error::RowSum { row: 0, .. })
        ));
        assert!(matches!(
            ProbabilityMatrix::from_rows(&[vec![0.5, 0.5], vec![1.0, 0.0]]),
            Err(Error::NonzeroDiagonal(0))
        ));
    }

    #[test]
    fn config_ranges() {
        let ok = DynamicsConfig::default();
        assert!(ok.validate(10).is_ok());
        assert_eq!(ok.graph_eps(10), 0.025);
        let bad = DynamicsConfig {
            discount: 1.5,
            ..ok
        };
        assert!(matches!(
            bad.validate(10),
            Err(Error::OutOfRange {
                name: "discount",
                ..
            })
        ));
        let bad = DynamicsConfig { noise: 1.0, ..ok };
        assert!(bad.validate(10).is_err());
        let bad = DynamicsConfig {
            graph_eps: Some(0.05),
            ..ok
        };
        assert!(bad.validate(10).is_err());
        let transfer = DynamicsConfig {
            rule: Rule::Transfer,
            ..ok
        };
        assert_eq!(transfer.validate(4), Err(Error::TransferPopulation(4)));
        assert!(transfer.validate(3).is_ok());
    }

    #[test]
    fn profiles() {
        let p = StrategyProfile::initial_for(GameName::StagHunt, 10);
        assert_eq!(p.count(AgentType::Stag), 5);
        assert_eq!(p.count(AgentType::Rabbit), 5);
        assert_eq!(p.coordinated(), None);
        assert!(p.validate_for(GameName::FriendsI).is_err());
        let t = StrategyProfile::trivial(4);
        assert_eq!(t.coordinated(), Some(AgentType::Trivial));
        assert!(t.validate_for(GameName::StagHunt).is_err());
    }
}
