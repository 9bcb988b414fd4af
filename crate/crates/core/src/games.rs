//! Payoff tables and the imitate-the-best strategy revision.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::state::{AgentType, GameName, GameSpec, StrategyProfile};

/// Stag Hunt payoff for hunting rabbit, whoever the partner is.
pub const RABBIT_PAYOFF: f64 = 0.75;

/// `(visitor payoff, host payoff)` for a visit.
pub fn payoff(spec: GameSpec, visitor: AgentType, host: AgentType) -> Result<(f64, f64)> {
    for t in [visitor, host] {
        if !spec.name.admits(t) {
            return Err(Error::TypeMismatch {
                game: spec.name,
                agent_type: t,
            });
        }
    }
    Ok(match spec.name {
        GameName::FriendsI => (1.0, 0.0),
        GameName::FriendsII => (1.0, 1.0),
        GameName::EnemiesI => (-1.0, 0.0),
        GameName::EnemiesII => (-1.0, -1.0),
        GameName::StagHunt => (stag_hunt(visitor, host), stag_hunt(host, visitor)),
    })
}

fn stag_hunt(me: AgentType, other: AgentType) -> f64 {
    match (me, other) {
        (AgentType::Stag, AgentType::Stag) => 1.0,
        (AgentType::Stag, _) => 0.0,
        _ => RABBIT_PAYOFF,
    }
}

/// Payoffs earned by each agent during one round, as visitor and as host.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundPayoffLedger {
    per_agent: Vec<f64>,
    type_means: BTreeMap<AgentType, f64>,
}

impl RoundPayoffLedger {
    pub fn new(per_agent: Vec<f64>, profile: &StrategyProfile) -> Result<Self> {
        if per_agent.len() != profile.len() {
            return Err(Error::DimensionMismatch {
                expected: profile.len(),
                found: per_agent.len(),
            });
        }
        let mut totals: BTreeMap<AgentType, (f64, usize)> = BTreeMap::new();
        for (&x, &t) in per_agent.iter().zip(profile.types()) {
            let e = totals.entry(t).or_default();
            e.0 += x;
            e.1 += 1;
        }
        let type_means = totals
            .into_iter()
            .map(|(t, (sum, count))| (t, sum / count as f64))
            .collect();
        Ok(Self {
            per_agent,
            type_means,
        })
    }

    pub fn per_agent(&self) -> &[f64] {
        &self.per_agent
    }

    /// Mean payoff of agents of type `t`; `None` when no agent has that type.
    pub fn type_mean(&self, t: AgentType) -> Option<f64> {
        self.type_means.get(&t).copied()
    }

    pub fn type_means(&self) -> &BTreeMap<AgentType, f64> {
        &self.type_means
    }

    /// The unique type with the highest mean payoff, or `None` on a tie.
    pub fn best_type(&self) -> Option<AgentType> {
        let mut best: Option<(AgentType, f64)> = None;
        let mut tied = false;
        for (&t, &m) in &self.type_means {
            match best {
                None => best = Some((t, m)),
                Some((_, bm)) if m > bm => {
                    best = Some((t, m));
                    tied = false;
                }
                Some((_, bm)) if m == bm => tied = true,
                _ => {}
            }
        }
        if tied {
            None
        } else {
            best.map(|(t, _)| t)
        }
    }
}

/// Each agent independently, with probability `q`, switches to the type with
/// the highest mean payoff in `ledger`. Types absent from the ledger cannot
/// be adopted, and on a tie every agent keeps its type.
pub fn strategy_revision<R: Rng + ?Sized>(
    profile: &StrategyProfile,
    ledger: &RoundPayoffLedger,
    q: f64,
    rng: &mut R,
) -> StrategyProfile {
    if q <= 0.0 {
        return profile.clone();
    }
    let Some(best) = ledger.best_type() else {
        return profile.clone();
    };
    let types = profile
        .types()
        .iter()
        .map(|&t| if rng.random_bool(q.min(1.0)) { best } else { t })
        .collect();
    StrategyProfile::new(types)
}
