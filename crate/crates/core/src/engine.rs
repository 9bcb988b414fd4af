//! Round and episode execution.
//!
//! A round is simultaneous: every agent samples its host from the
//! start-of-round probability matrix, then all visits are applied in one
//! batch. Strategy revision, when enabled, runs after the weight update.

use rand::Rng;
use rayon::prelude::*;

use crate::dynamics::{self, VisitOutcome};
use crate::error::{Error, Result};
use crate::games::{self, RoundPayoffLedger};
use crate::rng::RandomSource;
use crate::state::{
    new_uniform_state, DynamicsConfig, GameSpec, ProbabilityMatrix, Rule, StrategyProfile,
    WeightMatrix,
};

pub const DEFAULT_SNAPSHOT_STRIDE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub weights: WeightMatrix,
    pub profile: StrategyProfile,
    pub ledger: RoundPayoffLedger,
    pub visits: Vec<VisitOutcome>,
}

/// Samples one host per agent from the rows of `p`.
pub fn sample_visits<R: Rng + ?Sized>(p: &ProbabilityMatrix, rng: &mut R) -> Vec<usize> {
    let n = p.n();
    (0..n)
        .map(|i| {
            let row = p.row(i);
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut last = usize::MAX;
            for (j, &x) in row.iter().enumerate() {
                if j == i || x <= 0.0 {
                    continue;
                }
                acc += x;
                last = j;
                if u < acc {
                    return j;
                }
            }
            // u landed in the rounding gap above the cumulative sum
            last
        })
        .collect()
}

fn step(
    w: &WeightMatrix,
    p: &ProbabilityMatrix,
    profile: &StrategyProfile,
    spec: GameSpec,
    cfg: &DynamicsConfig,
    rng: &mut RandomSource,
) -> Result<RoundOutcome> {
    let n = w.n();
    let hosts = sample_visits(p, rng);
    let mut visits = Vec::with_capacity(n);
    let mut earned = vec![0.0; n];
    for (visitor, &host) in hosts.iter().enumerate() {
        let (a, b) = games::payoff(spec, profile.get(visitor), profile.get(host))?;
        earned[visitor] += a;
        earned[host] += b;
        visits.push(VisitOutcome::new(visitor, host, a, b));
    }
    let symmetric = spec.name.reinforces_host();
    let weights = match cfg.rule {
        Rule::Linear => dynamics::linear_update(w, &visits, symmetric, cfg.discount)?,
        Rule::LogLikelihood => dynamics::loglik_update(w, &visits, symmetric, cfg.discount)?,
        Rule::Resistance => dynamics::resistance_update(w, &visits, symmetric)?,
        Rule::Transfer => dynamics::transfer_update(w, &visits)?,
    };
    let ledger = RoundPayoffLedger::new(earned, profile)?;
    let profile = games::strategy_revision(profile, &ledger, cfg.revision_prob, rng);
    Ok(RoundOutcome {
        weights,
        profile,
        ledger,
        visits,
    })
}

/// Plays one round from `w`: probabilities under the configured rule and
/// noise, one visit per agent, a batched weight update with discounting,
/// then strategy revision.
pub fn run_round(
    w: &WeightMatrix,
    profile: &StrategyProfile,
    spec: GameSpec,
    cfg: &DynamicsConfig,
    rng: &mut RandomSource,
) -> Result<RoundOutcome> {
    let p = dynamics::probabilities(w, cfg.rule, cfg.noise)?;
    step(w, &p, profile, spec, cfg, rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub round: usize,
    pub probabilities: ProbabilityMatrix,
    pub profile: StrategyProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// Snapshots at every multiple of `stride`, starting at round 0.
    pub snapshots: Vec<Snapshot>,
    pub stride: usize,
    pub final_round: usize,
    pub final_weights: WeightMatrix,
    pub final_profile: StrategyProfile,
    /// Visit probabilities of the final state, noise included.
    pub final_probabilities: ProbabilityMatrix,
}

/// What an episode observer sees at each time `t`, before round `t + 1`.
#[derive(Debug, Clone, Copy)]
pub struct RoundView<'a> {
    pub round: usize,
    pub weights: &'a WeightMatrix,
    pub probabilities: &'a ProbabilityMatrix,
    pub profile: &'a StrategyProfile,
}

/// The standard starting point: uniform weights `cfg.initial_weight` and the
/// game's default profile.
pub fn initial_state(
    n: usize,
    spec: GameSpec,
    cfg: &DynamicsConfig,
) -> Result<(WeightMatrix, StrategyProfile)> {
    Ok((
        new_uniform_state(n, cfg.initial_weight)?,
        StrategyProfile::initial_for(spec.name, n),
    ))
}

/// Runs `rounds` rounds from an explicit state. `observer` is called for
/// every time `0..=rounds`.
#[allow(clippy::too_many_arguments)]
pub fn run_episode_from<F>(
    weights: WeightMatrix,
    profile: StrategyProfile,
    spec: GameSpec,
    cfg: &DynamicsConfig,
    rounds: usize,
    rng: &mut RandomSource,
    stride: usize,
    mut observer: F,
) -> Result<TrajectoryRecord>
where
    F: FnMut(RoundView<'_>),
{
    let n = weights.n();
    cfg.validate(n)?;
    if stride == 0 {
        return Err(Error::out_of_range("snapshot stride", 0.0, ">= 1"));
    }
    if profile.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: profile.len(),
        });
    }
    profile.validate_for(spec.name)?;
    weights.validate_for(cfg.rule)?;

    let mut w = weights;
    let mut profile = profile;
    let mut snapshots = Vec::with_capacity(rounds / stride + 1);
    let wrap = |round: usize| {
        move |e: Error| Error::Round {
            round,
            source: Box::new(e),
        }
    };
    let mut p = dynamics::probabilities(&w, cfg.rule, cfg.noise).map_err(wrap(0))?;
    for t in 0..=rounds {
        observer(RoundView {
            round: t,
            weights: &w,
            probabilities: &p,
            profile: &profile,
        });
        if t % stride == 0 {
            snapshots.push(Snapshot {
                round: t,
                probabilities: p.clone(),
                profile: profile.clone(),
            });
        }
        if t == rounds {
            break;
        }
        let out = step(&w, &p, &profile, spec, cfg, rng).map_err(wrap(t + 1))?;
        w = out.weights;
        profile = out.profile;
        p = dynamics::probabilities(&w, cfg.rule, cfg.noise).map_err(wrap(t + 1))?;
    }
    Ok(TrajectoryRecord {
        snapshots,
        stride,
        final_round: rounds,
        final_weights: w,
        final_profile: profile,
        final_probabilities: p,
    })
}

/// One seeded episode from the uniform starting state.
pub fn run_episode(
    n: usize,
    spec: GameSpec,
    cfg: &DynamicsConfig,
    rounds: usize,
    seed: u64,
    stride: usize,
) -> Result<TrajectoryRecord> {
    let (w, profile) = initial_state(n, spec, cfg)?;
    let mut rng = RandomSource::new(seed);
    run_episode_from(w, profile, spec, cfg, rounds, &mut rng, stride, |_| ())
}

/// Runs `f(k, stream_k)` for every replica `k < runs`, where `stream_k` is
/// child `k` of `seed`. Results come back ordered by `k`.
pub fn map_replicas<T, F>(runs: usize, seed: u64, parallel: bool, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, RandomSource) -> Result<T> + Sync,
{
    let root = RandomSource::new(seed);
    if parallel {
        (0..runs)
            .into_par_iter()
            .map(|k| f(k, root.child(k as u64)))
            .collect()
    } else {
        (0..runs).map(|k| f(k, root.child(k as u64))).collect()
    }
}

/// `runs` independent episodes; replica `k` uses child stream `k` of `seed`.
pub fn run_ensemble(
    n: usize,
    spec: GameSpec,
    cfg: &DynamicsConfig,
    rounds: usize,
    runs: usize,
    seed: u64,
    stride: usize,
) -> Result<Vec<TrajectoryRecord>> {
    if runs == 0 {
        return Err(Error::out_of_range("runs", 0.0, ">= 1"));
    }
    cfg.validate(n)?;
    map_replicas(runs, seed, true, |_, mut rng| {
        let (w, profile) = initial_state(n, spec, cfg)?;
        run_episode_from(w, profile, spec, cfg, rounds, &mut rng, stride, |_| ())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::GameName;

    fn cfg(rule: Rule) -> DynamicsConfig {
        DynamicsConfig {
            rule,
            ..DynamicsConfig::default()
        }
    }

    #[test]
    fn two_agent_rounds() {
        let mut rng = RandomSource::new(0);
        let w = new_uniform_state(2, 1.0).unwrap();
        let trivial = StrategyProfile::trivial(2);

        let out = run_round(
            &w,
            &trivial,
            GameName::FriendsI.into(),
            &cfg(Rule::Linear),
            &mut rng,
        )
        .unwrap();
        assert_eq!(out.weights.to_rows(), vec![vec![0.0, 2.0], vec![2.0, 0.0]]);
        let p = dynamics::linear_probabilities(&out.weights).unwrap();
        assert_eq!(p.to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);

        let out = run_round(
            &w,
            &trivial,
            GameName::FriendsII.into(),
            &cfg(Rule::Linear),
            &mut rng,
        )
        .unwrap();
        assert_eq!(out.weights.to_rows(), vec![vec![0.0, 3.0], vec![3.0, 0.0]]);
        assert_eq!(out.ledger.per_agent(), &[2.0, 2.0]);

        let out = run_round(
            &w,
            &trivial,
            GameName::EnemiesI.into(),
            &cfg(Rule::Resistance),
            &mut rng,
        )
        .unwrap();
        assert_eq!(out.weights.to_rows(), vec![vec![0.0, 2.0], vec![2.0, 0.0]]);
        let p = dynamics::resistance_probabilities(&out.weights).unwrap();
        assert_eq!(p.to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn enemies_under_linear_rule_is_a_round_error() {
        let w = new_uniform_state(2, 1.0).unwrap();
        let err = run_episode_from(
            w,
            StrategyProfile::trivial(2),
            GameName::EnemiesI.into(),
            &cfg(Rule::Linear),
            5,
            &mut RandomSource::new(1),
            1,
            |_| (),
        )
        .unwrap_err();
        match err {
            Error::Round { round, source } => {
                assert_eq!(round, 1);
                assert_eq!(*source, Error::DegenerateRow(0));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_episode() {
        let r = run_episode(4, GameName::FriendsI.into(), &cfg(Rule::Linear), 0, 9, 10).unwrap();
        assert_eq!(r.snapshots.len(), 1);
        assert_eq!(r.snapshots[0].round, 0);
        assert_eq!(
            r.snapshots[0].probabilities,
            ProbabilityMatrix::uniform(4).unwrap()
        );
        assert_eq!(r.final_round, 0);
        assert_eq!(r.final_weights, new_uniform_state(4, 1.0).unwrap());
    }

    #[test]
    fn two_agent_long_episode() {
        let r = run_episode(
            2,
            GameName::FriendsI.into(),
            &cfg(Rule::Linear),
            1000,
            5,
            100,
        )
        .unwrap();
        assert_eq!(
            r.final_probabilities.to_rows(),
            vec![vec![0.0, 1.0], vec![1.0, 0.0]]
        );
        assert_eq!(r.final_weights.get(0, 1), 1001.0);
        let rounds: Vec<_> = r.snapshots.iter().map(|s| s.round).collect();
        assert_eq!(rounds, (0..=1000).step_by(100).collect::<Vec<_>>());
    }

    #[test]
    fn episodes_are_deterministic() {
        let spec = GameName::FriendsII.into();
        let c = DynamicsConfig {
            discount: 0.95,
            noise: 0.05,
            ..cfg(Rule::Linear)
        };
        let a = run_episode(6, spec, &c, 300, 11, 7).unwrap();
        let b = run_episode(6, spec, &c, 300, 11, 7).unwrap();
        assert_eq!(a, b);
        let other = run_episode(6, spec, &c, 300, 12, 7).unwrap();
        assert_ne!(a.final_weights, other.final_weights);
    }

    #[test]
    fn ensemble_replica_zero_matches_episode() {
        let spec = GameName::StagHunt.into();
        let c = DynamicsConfig {
            revision_prob: 0.1,
            ..cfg(Rule::Linear)
        };
        let single = run_ensemble(6, spec, &c, 50, 1, 77, 10).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0], run_episode(6, spec, &c, 50, 77, 10).unwrap());
        let twice = run_ensemble(6, spec, &c, 50, 2, 77, 10).unwrap();
        assert_eq!(twice, run_ensemble(6, spec, &c, 50, 2, 77, 10).unwrap());
        assert!(run_ensemble(6, spec, &c, 50, 0, 77, 10).is_err());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let spec = GameSpec::new(GameName::FriendsII);
        let c = cfg(Rule::Linear);
        let run = |parallel| {
            map_replicas(16, 3, parallel, |_, mut rng| {
                let (w, p) = initial_state(5, spec, &c)?;
                run_episode_from(w, p, spec, &c, 100, &mut rng, 50, |_| ())
            })
            .unwrap()
        };
        assert_eq!(run(true), run(false));
    }

    #[test]
    fn transfer_episode_keeps_ball_counts() {
        let c = DynamicsConfig {
            initial_weight: 3.0,
            ..cfg(Rule::Transfer)
        };
        let r = run_episode(3, GameName::EnemiesI.into(), &c, 200, 2, 50).unwrap();
        for i in 0..3 {
            assert_eq!(r.final_weights.row_sum(i), 6.0);
            assert!(r
                .final_weights
                .row(i)
                .iter()
                .all(|x| x.fract() == 0.0 && *x >= 0.0));
        }
    }

    #[test]
    fn observer_sees_every_round() {
        let spec = GameName::FriendsI.into();
        let mut seen = Vec::new();
        let (w, p) = initial_state(3, spec, &cfg(Rule::Linear)).unwrap();
        let r = run_episode_from(
            w,
            p,
            spec,
            &cfg(Rule::Linear),
            25,
            &mut RandomSource::new(4),
            5,
            |v| seen.push((v.round, v.weights.row_sum(0))),
        )
        .unwrap();
        assert_eq!(seen.len(), 26);
        // Friends I rows grow by exactly one per round
        for (t, s) in seen {
            assert_eq!(s, 2.0 + t as f64);
        }
        assert_eq!(r.snapshots.len(), 6);
    }

    #[test]
    fn sampling_skips_zero_entries() {
        let p = ProbabilityMatrix::from_rows(&[
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        let mut rng = RandomSource::new(8);
        for _ in 0..100 {
            assert_eq!(sample_visits(&p, &mut rng), vec![2, 0, 1]);
        }
    }
}
