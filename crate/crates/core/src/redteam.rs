//! Firmware malware: activation, privilege escalation, strategy switching
//! and the six attack strategies.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::world::{SwarmState, Uid, UidSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Privilege {
    Low,
    High,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    ExploitRandom,
    ExploitFarthest,
    FloodRandom,
    FloodFarthest,
    BlockRandom,
    Intercept,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::ExploitRandom,
        Strategy::ExploitFarthest,
        Strategy::FloodRandom,
        Strategy::FloodFarthest,
        Strategy::BlockRandom,
        Strategy::Intercept,
    ];

    pub fn random<R: Rng>(rng: &mut R) -> Self {
        Self::ALL[rng.random_range(0..Self::ALL.len())]
    }
}

/// A red session on a drone. Low sessions carry no strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RedAgent {
    pub privilege: Privilege,
    pub strategy: Option<Strategy>,
    pub created_step: u32,
}

impl RedAgent {
    pub fn low(step: u32) -> Self {
        Self { privilege: Privilege::Low, strategy: None, created_step: step }
    }

    pub fn high(strategy: Strategy, step: u32) -> Self {
        Self { privilege: Privilege::High, strategy: Some(strategy), created_step: step }
    }
}

/// Where the activation draw applies each step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivationScope {
    /// Every drone not under red control draws independently.
    PerDrone,
    /// One draw per step; on success a uniformly chosen drone not under red
    /// control activates.
    #[default]
    Swarm,
}

/// Malware rates and costs. Setting `activation_probability` to zero
/// disables the malware entirely.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RedConfig {
    pub activation_probability: f64,
    pub activation_scope: ActivationScope,
    pub exploit_success_probability: f64,
    pub exploit_flag_probability: f64,
    pub switch_probability: f64,
    /// Bandwidth charged to each drone on an exploit's route.
    pub exploit_units: u32,
    /// Bandwidth charged to each drone on a flood's route, before the
    /// target is saturated.
    pub flood_relay_units: u32,
}

impl Default for RedConfig {
    fn default() -> Self {
        Self {
            activation_probability: 0.05,
            activation_scope: ActivationScope::default(),
            exploit_success_probability: 0.5,
            exploit_flag_probability: 0.5,
            switch_probability: 0.10,
            exploit_units: 1,
            flood_relay_units: 1,
        }
    }
}

impl RedConfig {
    pub fn disabled() -> Self {
        Self { activation_probability: 0.0, ..Self::default() }
    }
}

/// Each drone not already under red control independently activates its
/// malware. Returns the newly activated UIDs.
pub fn activation_phase(state: &mut SwarmState, config: &RedConfig) -> Vec<Uid> {
    let step = state.step;
    let rng = &mut state.rng.red;
    let mut activated = Vec::new();
    match config.activation_scope {
        ActivationScope::PerDrone => {
            for d in state.drones.iter_mut().filter(|d| !d.is_red_high()) {
                if rng.random::<f64>() < config.activation_probability {
                    d.red = Some(RedAgent::high(Strategy::random(rng), step));
                    activated.push(d.uid);
                }
            }
        }
        ActivationScope::Swarm => {
            if rng.random::<f64>() < config.activation_probability {
                let dormant: Vec<Uid> =
                    state.drones.iter().filter(|d| !d.is_red_high()).map(|d| d.uid).collect();
                if !dormant.is_empty() {
                    let uid = dormant[rng.random_range(0..dormant.len())];
                    state.drones[uid].red = Some(RedAgent::high(Strategy::random(rng), step));
                    activated.push(uid);
                }
            }
        }
    }
    activated
}

/// With probability `switch_probability`, a strategy redrawn uniformly from
/// all six (possibly the current one).
pub fn switch_draw<R: Rng>(config: &RedConfig, rng: &mut R) -> Option<Strategy> {
    (rng.random::<f64>() < config.switch_probability).then(|| Strategy::random(rng))
}

pub fn strategy_switch<R: Rng>(agent: RedAgent, config: &RedConfig, rng: &mut R) -> RedAgent {
    assert_eq!(agent.privilege, Privilege::High, "only high-privilege agents carry a strategy");
    match switch_draw(config, rng) {
        Some(s) => RedAgent { strategy: Some(s), ..agent },
        None => agent,
    }
}

/// Low sessions that survived a full step become high-privilege agents.
pub fn escalate(state: &mut SwarmState) -> Vec<Uid> {
    let step = state.step;
    let rng = &mut state.rng.red;
    let mut escalated = Vec::new();
    for d in &mut state.drones {
        if let Some(agent) = d.red {
            if agent.privilege == Privilege::Low && agent.created_step < step {
                d.red = Some(RedAgent::high(Strategy::random(rng), step));
                escalated.push(d.uid);
            }
        }
    }
    escalated
}

/// Escalation, strategy switching, then one strategy action per
/// high-privilege agent in ascending host order.
pub fn red_phase(state: &mut SwarmState, config: &RedConfig) {
    escalate(state);
    for uid in 0..state.len() {
        if let Some(agent) = state.drones[uid].red {
            if agent.privilege == Privilege::High {
                state.drones[uid].red = Some(strategy_switch(agent, config, &mut state.rng.red));
            }
        }
    }
    for uid in 0..state.len() {
        let strategy = match state.drones[uid].red {
            Some(RedAgent { privilege: Privilege::High, strategy: Some(s), .. }) => s,
            _ => continue,
        };
        execute(state, config, uid, strategy);
    }
}

/// Activation followed by the red phase: one full red turn.
pub fn red_turn(state: &mut SwarmState, config: &RedConfig) {
    activation_phase(state, config);
    red_phase(state, config);
}

pub fn execute(state: &mut SwarmState, config: &RedConfig, host: Uid, strategy: Strategy) {
    match strategy {
        Strategy::ExploitRandom => {
            let eligible = exploit_candidates(state, host);
            if let Some(t) = pick_random(eligible, &mut state.rng.red) {
                exploit(state, config, host, t);
            }
        }
        Strategy::ExploitFarthest => {
            let eligible = exploit_candidates(state, host);
            if let Some(t) = pick_farthest(state, host, eligible) {
                exploit(state, config, host, t);
            }
        }
        Strategy::FloodRandom => {
            let reachable = flood_candidates(state, host);
            if let Some(t) = pick_random(reachable, &mut state.rng.red) {
                flood(state, config, host, t);
            }
        }
        Strategy::FloodFarthest => {
            let reachable = flood_candidates(state, host);
            if let Some(t) = pick_farthest(state, host, reachable) {
                flood(state, config, host, t);
            }
        }
        Strategy::BlockRandom => {
            let neighbours = state.graph.neighbours(host);
            if let Some(t) = pick_random(neighbours, &mut state.rng.red) {
                state.drones[host].block_list.insert(t);
            }
        }
        Strategy::Intercept => {}
    }
}

/// Radio neighbours not hosting any red session.
fn exploit_candidates(state: &SwarmState, host: Uid) -> UidSet {
    state
        .graph
        .neighbours(host)
        .iter()
        .filter(|&n| state.drones[n].red.is_none())
        .collect()
}

/// Drones routable from `host` without crossing a block on `host`.
fn flood_candidates(state: &SwarmState, host: Uid) -> UidSet {
    (0..state.len())
        .filter(|&t| t != host)
        .filter(|&t| {
            state
                .shortest_route(host, t)
                .is_some_and(|r| !state.route_blocks(&r, host))
        })
        .collect()
}

fn pick_random(set: UidSet, rng: &mut ChaCha8Rng) -> Option<Uid> {
    if set.is_empty() {
        return None;
    }
    set.nth(rng.random_range(0..set.len()))
}

fn pick_farthest(state: &SwarmState, host: Uid, set: UidSet) -> Option<Uid> {
    let origin = state.drones[host].position;
    let mut best: Option<(Uid, f64)> = None;
    for t in set.iter() {
        let d = origin.distance(&state.drones[t].position);
        if best.is_none_or(|(_, bd)| d > bd) {
            best = Some((t, d));
        }
    }
    best.map(|(t, _)| t)
}

fn exploit(state: &mut SwarmState, config: &RedConfig, host: Uid, target: Uid) {
    let Some(route) = state.shortest_route(host, target) else {
        return;
    };
    if state.route_blocks(&route, host) {
        return;
    }
    if config.exploit_units > 0
        && state.consume_bandwidth(&route, config.exploit_units)
            == crate::world::BandwidthResult::Dropped
    {
        return;
    }
    for &h in &route.hops {
        if state.rng.red.random::<f64>() < config.exploit_flag_probability {
            state.drones[h].flag_event(host);
        }
    }
    if state.rng.red.random::<f64>() < config.exploit_success_probability {
        state.drones[target].red = Some(RedAgent::low(state.step));
    }
}

fn flood(state: &mut SwarmState, config: &RedConfig, host: Uid, target: Uid) {
    let route = state
        .shortest_route(host, target)
        .expect("flood target is reachable");
    if config.flood_relay_units > 0 {
        // The flood lands regardless of whether the relays could carry it.
        let _ = state.consume_bandwidth(&route, config.flood_relay_units);
    }
    state.drones[target].bandwidth_used = state.config.max_bandwidth;
    for &h in &route.hops {
        state.drones[h].flag_event(host);
    }
}
