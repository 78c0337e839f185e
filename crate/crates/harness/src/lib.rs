//! Seeded batch evaluation of blue teams: score statistics, action
//! histograms and the CW substitution sweep.

mod error;
mod report;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use dronesim::blueteam::{ActionKind, BlueAction, ScriptedAgent, ScriptedKind};
use dronesim::env::{format_team, AgentAction, EpisodeConfig, SlotKind};
use dronesim::rng::{stand_in_stream, substream, Stream};
use dronesim::traffic::RewardEventKind;
use dronesim::world::DRONE_COUNT;

pub use error::{HarnessError, Result};
pub use report::{emit_histogram, emit_report, emit_sweep, OutputFormat};

/// Lowest possible episode total: every drone failing every step.
pub const SCORE_FLOOR: f64 = -((DRONE_COUNT * 500) as f64);

/// Policy driving the external slots of a team during batch evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum StandIn {
    #[default]
    Random,
    Scripted(ScriptedKind),
}

impl fmt::Display for StandIn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StandIn::Random => f.write_str("random"),
            StandIn::Scripted(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for StandIn {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "random" => Ok(StandIn::Random),
            other => other.parse().map(StandIn::Scripted),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PolicySet {
    pub external: StandIn,
}

enum Driver {
    Random(ChaCha8Rng),
    Scripted(ScriptedAgent),
}

impl Driver {
    fn new(stand_in: StandIn, seed: u64, slot: usize, host: usize) -> Self {
        let rng = stand_in_stream(seed, slot);
        match stand_in {
            StandIn::Random => Driver::Random(rng),
            StandIn::Scripted(k) => Driver::Scripted(ScriptedAgent::new(k, host, rng)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub seed: u64,
    pub score: f64,
    pub steps: u32,
    pub compromised: bool,
}

/// Outcome of one episode plus the sampled agent's action counts.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRun {
    pub record: EpisodeRecord,
    pub sampled_slot: usize,
    pub histogram: BTreeMap<ActionKind, u64>,
    /// Every step's team reward, in order.
    pub step_rewards: Vec<f64>,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub label: String,
    pub episodes: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub records: Vec<EpisodeRecord>,
    pub histogram: BTreeMap<ActionKind, u64>,
    pub fingerprint: String,
    pub violations: Vec<String>,
}

impl EvaluationReport {
    pub fn scores(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.score).collect()
    }

    pub fn sampled_actions(&self) -> u64 {
        self.histogram.values().sum()
    }
}

/// Sample mean and standard deviation (n - 1 denominator).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Hex SHA-256 over the JSON config and the crate version.
pub fn fingerprint(config: &EpisodeConfig) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(config).expect("config serializes"));
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn episode_seed(base: u64, episode: usize) -> u64 {
    base.wrapping_add(episode as u64)
}

/// Plays one episode with seed `base.seed + episode`.
pub fn run_episode(base: &EpisodeConfig, episode: usize, policies: PolicySet) -> Result<EpisodeRun> {
    let seed = episode_seed(base.seed, episode);
    let config = EpisodeConfig { seed, ..base.clone() };
    let horizon = config.horizon;
    let mut env = dronesim::env::Env::reset(config)?;
    let sampled_slot = substream(seed, Stream::Sampling).random_range(0..DRONE_COUNT);
    let hosting = env.hosting();
    let mut drivers: Vec<Option<Driver>> = (0..DRONE_COUNT).map(|_| None).collect();
    for slot in env.external_slots() {
        drivers[slot] = Some(Driver::new(policies.external, seed, slot, hosting[slot]));
    }

    let mut histogram = BTreeMap::new();
    let mut step_rewards = Vec::with_capacity(horizon as usize);
    let mut violations = Vec::new();
    let mut compromised = false;
    let mut inputs = vec![None; DRONE_COUNT];
    while !env.is_done() {
        for (slot, driver) in drivers.iter_mut().enumerate() {
            inputs[slot] = match driver {
                Some(_) if !env.is_active(slot) => None,
                Some(Driver::Random(rng)) => Some(AgentAction {
                    index: rng.random_range(0..BlueAction::COUNT),
                    frame: None,
                }),
                Some(Driver::Scripted(agent)) => {
                    Some(AgentAction::new(agent.act(env.local_observation(slot))))
                }
                None => None,
            };
        }
        let r = env.step(&inputs)?;
        if let Some(a) = r.actions[sampled_slot] {
            *histogram.entry(a.kind()).or_insert(0) += 1;
        }
        let penalty = r.events.iter().any(|e| e.kind == RewardEventKind::CompromisePenalty);
        compromised |= penalty;
        if !penalty && !(-(DRONE_COUNT as f64)..=0.0).contains(&r.team_reward) {
            violations.push(format!(
                "episode {episode} step {}: reward {} outside [-{DRONE_COUNT}, 0]",
                env.state().step,
                r.team_reward
            ));
        }
        step_rewards.push(r.team_reward);
    }
    let score = env.total_reward();
    if !(SCORE_FLOOR..=0.0).contains(&score) {
        violations.push(format!("episode {episode}: total {score} outside [{SCORE_FLOOR}, 0]"));
    }
    Ok(EpisodeRun {
        record: EpisodeRecord { episode, seed, score, steps: env.state().step, compromised },
        sampled_slot,
        histogram,
        step_rewards,
        violations,
    })
}

/// Runs `episodes` seeded episodes in parallel; the result does not depend
/// on worker scheduling.
pub fn evaluate(config: &EpisodeConfig, episodes: usize, policies: PolicySet) -> Result<EvaluationReport> {
    if episodes == 0 {
        return Err(HarnessError::NoEpisodes);
    }
    config.validate()?;
    let runs: Vec<EpisodeRun> = (0..episodes)
        .into_par_iter()
        .map(|i| run_episode(config, i, policies))
        .collect::<Result<_>>()?;

    let mut histogram: BTreeMap<ActionKind, u64> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut records = Vec::with_capacity(episodes);
    for run in runs {
        for (k, n) in run.histogram {
            *histogram.entry(k).or_insert(0) += n;
        }
        violations.extend(run.violations);
        records.push(run.record);
    }
    let scores: Vec<f64> = records.iter().map(|r| r.score).collect();
    let (mean, std_dev) = mean_std(&scores);
    Ok(EvaluationReport {
        label: format_team(&config.team_slots),
        episodes,
        mean,
        std_dev,
        records,
        histogram,
        fingerprint: fingerprint(config),
        violations,
    })
}

/// Team with `k` substitute slots followed by `18 - k` CW slots.
pub fn substituted_team(substitute: SlotKind, k: usize) -> Vec<SlotKind> {
    let k = k.min(DRONE_COUNT);
    let mut team = vec![substitute; k];
    team.extend(std::iter::repeat_n(SlotKind::Cw, DRONE_COUNT - k));
    team
}

/// One report per `k`, each with `k` CW slots replaced by `substitute` and
/// slots hosted by a seeded random permutation.
pub fn substitution_sweep(
    base: &EpisodeConfig,
    substitute: SlotKind,
    ks: &[usize],
    episodes: usize,
    policies: PolicySet,
) -> Result<Vec<(usize, EvaluationReport)>> {
    ks.iter()
        .map(|&k| {
            let config = EpisodeConfig {
                team_slots: substituted_team(substitute, k),
                randomize_hosting: true,
                ..base.clone()
            };
            Ok((k, evaluate(&config, episodes, policies)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_uses_sample_variance() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(mean_std(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn fingerprint_tracks_config() {
        let a = EpisodeConfig::default();
        let b = EpisodeConfig { seed: 1, ..a.clone() };
        assert_eq!(fingerprint(&a), fingerprint(&a.clone()));
        assert_ne!(fingerprint(&a), fingerprint(&b));
        assert_eq!(fingerprint(&a).len(), 64);
    }

    #[test]
    fn substituted_team_layout() {
        let t = substituted_team(SlotKind::External, 7);
        assert_eq!(format_team(&t), "external:7,cw:11");
        assert_eq!(substituted_team(SlotKind::External, 0), vec![SlotKind::Cw; 18]);
    }

    #[test]
    fn zero_episodes_is_an_error() {
        assert!(matches!(
            evaluate(&EpisodeConfig::default(), 0, PolicySet::default()),
            Err(HarnessError::NoEpisodes)
        ));
    }

    #[test]
    fn stand_in_names_parse() {
        assert_eq!("random".parse::<StandIn>().unwrap(), StandIn::Random);
        assert_eq!("sleep".parse::<StandIn>().unwrap(), StandIn::Scripted(ScriptedKind::Sleep));
    }
}
