//! Named experiments. Each preset fixes the settings of one published
//! simulation or limit claim; any field can still be overridden.

use crate::config::{ExperimentConfig, Model, RuleName};

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub about: &'static str,
    pub model: Model,
    pub rule: Option<RuleName>,
    pub agents: usize,
    pub rounds: usize,
    pub runs: usize,
    pub discount: f64,
    pub noise: f64,
    pub revision_prob: f64,
    pub init_weight: f64,
    pub stride: Option<usize>,
}

const BASE: Preset = Preset {
    name: "",
    about: "",
    model: Model::Friends1,
    rule: None,
    agents: 3,
    rounds: 1000,
    runs: 100,
    discount: 1.0,
    noise: 0.0,
    revision_prob: 0.0,
    init_weight: 1.0,
    stride: None,
};

// Balls held by each agent; split evenly between its two urns.
const MIXING_BALLS: usize = 100;

pub static PRESETS: &[Preset] = &[
    Preset {
        name: "friends1-n3",
        about: "Friends I, three agents: rows tend to Dirichlet(1,1) limits",
        rounds: 10_000,
        runs: 2000,
        ..BASE
    },
    Preset {
        name: "friends1-n10",
        about: "Friends I, ten agents: random Dirichlet limit per row",
        agents: 10,
        runs: 500,
        ..BASE
    },
    Preset {
        name: "friends2-n3",
        about: "Friends II, three agents: every entry tends to 1/2",
        model: Model::Friends2,
        rounds: 100_000,
        runs: 500,
        ..BASE
    },
    Preset {
        name: "friends2-n10",
        about: "Friends II, ten agents: random symmetric limit",
        model: Model::Friends2,
        agents: 10,
        runs: 500,
        ..BASE
    },
    Preset {
        name: "enemies1-resistance",
        about: "Enemies I under the resistance rule: uniform limit",
        model: Model::Enemies1,
        rule: Some(RuleName::Resistance),
        agents: 5,
        rounds: 10_000,
        runs: 500,
        ..BASE
    },
    Preset {
        name: "enemies2-resistance",
        about: "Enemies II under the resistance rule: uniform limit",
        model: Model::Enemies2,
        rule: Some(RuleName::Resistance),
        agents: 5,
        rounds: 10_000,
        runs: 500,
        ..BASE
    },
    Preset {
        name: "ehrenfest-2ball",
        about: "Ball transfer with two balls per agent: stationary law (1/4, 1/2, 1/4)",
        model: Model::Enemies1,
        rule: Some(RuleName::Transfer),
        runs: 500,
        stride: Some(7),
        ..BASE
    },
    Preset {
        name: "ehrenfest-mixing",
        about: "Ball transfer with 100 balls per agent, run for N log N / 2 rounds",
        model: Model::Enemies1,
        rule: Some(RuleName::Transfer),
        init_weight: (MIXING_BALLS / 2) as f64,
        rounds: 231,
        runs: 500,
        stride: Some(1),
        ..BASE
    },
    Preset {
        name: "discounted-friends1",
        about: "Friends I with discount 0.9: every agent fixates on one partner",
        agents: 10,
        rounds: 2000,
        runs: 500,
        discount: 0.9,
        ..BASE
    },
    Preset {
        name: "discounted-friends2",
        about: "Friends II with discount 0.9: pairs and stars",
        model: Model::Friends2,
        agents: 10,
        rounds: 2000,
        runs: 500,
        discount: 0.9,
        ..BASE
    },
    Preset {
        name: "noisy-friends2",
        about: "Friends II with noise 0.05: the uniform point is the only stable state",
        model: Model::Friends2,
        rounds: 10_000,
        runs: 200,
        noise: 0.05,
        ..BASE
    },
    Preset {
        name: "noisy-discounted-friends2",
        about: "Friends II, four agents, discount 0.9 and noise 0.01: pairings dominate",
        model: Model::Friends2,
        agents: 4,
        rounds: 100_000,
        runs: 10,
        discount: 0.9,
        noise: 0.01,
        stride: Some(10),
        ..BASE
    },
    Preset {
        name: "staghunt-frozen",
        about: "Stag Hunt, five stag and five rabbit hunters, no revision: types segregate",
        model: Model::Staghunt,
        agents: 10,
        rounds: 100_000,
        runs: 50,
        ..BASE
    },
    Preset {
        name: "staghunt-discounted",
        about: "Stag Hunt with discount 0.9 and no revision",
        model: Model::Staghunt,
        agents: 10,
        rounds: 2000,
        runs: 200,
        discount: 0.9,
        ..BASE
    },
    Preset {
        name: "staghunt-coevolve-q1",
        about: "Stag Hunt with revision probability 0.1: mostly all rabbit",
        model: Model::Staghunt,
        agents: 10,
        runs: 500,
        revision_prob: 0.1,
        ..BASE
    },
    Preset {
        name: "staghunt-coevolve-q01",
        about: "Stag Hunt with revision probability 0.01: mostly all stag",
        model: Model::Staghunt,
        agents: 10,
        runs: 500,
        revision_prob: 0.01,
        ..BASE
    },
    Preset {
        name: "staghunt-heavy-weights",
        about: "Stag Hunt, revision 0.1, initial weights 1000: almost never all stag",
        model: Model::Staghunt,
        agents: 10,
        runs: 500,
        revision_prob: 0.1,
        init_weight: 1000.0,
        ..BASE
    },
];

const ALIASES: &[(&str, &str)] = &[("friends1", "friends1-n3"), ("friends2", "friends2-n3")];

pub fn find(name: &str) -> Option<&'static Preset> {
    let name = ALIASES
        .iter()
        .find(|(alias, _)| *alias == name)
        .map_or(name, |(_, target)| target);
    PRESETS.iter().find(|p| p.name == name)
}

impl Preset {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            model: self.model,
            rule: self.rule,
            agents: self.agents,
            rounds: self.rounds,
            runs: self.runs,
            discount: self.discount,
            noise: self.noise,
            revision_prob: self.revision_prob,
            init_weight: self.init_weight,
            stride: self.stride,
            out: format!("netform-out/{}", self.name).into(),
            ..ExperimentConfig::default()
        }
    }
}
