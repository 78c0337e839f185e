//! Episode orchestration: reset, the parallel step, observations and rewards.
//!
//! One step runs the phases in a fixed order:
//!
//! 1. blue actions, decided simultaneously and applied in ascending drone UID,
//! 2. malware activation, escalation, strategy switching and red actions,
//! 3. green traffic,
//! 4. termination check (horizon or total compromise),
//! 5. swarm motion,
//! 6. delivery of this step's broadcast frames into the next observations.

mod config;
mod observation;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

pub use config::{format_team, parse_team, EpisodeConfig, RewardMode, SlotKind, MAX_HORIZON};
pub use observation::{
    message_slot, ImprovedExtras, NeighbourInfo, Observation, ObservationMode, StandardObservation,
    IMPROVED_LEN, MESSAGE_LEN, STANDARD_LEN,
};

use crate::blueteam::{apply_blue_action, BlueAction, CwAgent, CwMemory, ScriptedAgent};
use crate::error::{Result, SimError};
use crate::redteam::red_turn;
use crate::rng::{policy_stream, substream, Stream};
use crate::traffic::{green_phase, RewardEvent, RewardEventKind};
use crate::world::{SwarmState, Uid, DRONE_COUNT};

/// Last-action-type codes used by the improved observation.
const LAST_RETAKE: u8 = 0;
const LAST_BLOCK: u8 = 1;
const LAST_ALLOW: u8 = 2;

/// An externally chosen action: a raw index into the 56-way space plus an
/// optional broadcast frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentAction {
    pub index: usize,
    pub frame: Option<u16>,
}

impl AgentAction {
    pub fn new(action: BlueAction) -> Self {
        Self { index: action.index(), frame: None }
    }

    pub fn with_frame(action: BlueAction, frame: u16) -> Self {
        Self { index: action.index(), frame: Some(frame) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedAction {
    pub slot: usize,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    /// Per slot; `None` while the slot's host is under full red control.
    pub observations: Vec<Option<Observation>>,
    /// Shared team reward, repeated per slot.
    pub rewards: Vec<f64>,
    pub team_reward: f64,
    pub done: bool,
    pub events: Vec<RewardEvent>,
    /// Action each slot took this step, if its host was blue.
    pub actions: Vec<Option<BlueAction>>,
    /// Out-of-range action indices, executed as Sleep.
    pub rejected: Vec<RejectedAction>,
}

enum Policy {
    Cw(Box<CwAgent>),
    Scripted(Box<ScriptedAgent>),
    External,
}

struct Agent {
    kind: SlotKind,
    host: Uid,
    policy: Policy,
    /// Background canary tracking for agents that are not CW policies.
    tracker: CwMemory,
    last_action_index: usize,
    last_action_on: Vec<u8>,
}

impl Agent {
    fn needs_fixing(&self) -> crate::world::UidSet {
        let memory = match &self.policy {
            Policy::Cw(cw) => &cw.memory,
            _ => &self.tracker,
        };
        memory.to_fix.keys().copied().collect()
    }
}

pub struct Env {
    config: EpisodeConfig,
    state: SwarmState,
    agents: Vec<Agent>,
    /// Frames heard by each drone during the previous step, by sender.
    inbox: Vec<Vec<(Uid, u16)>>,
    local: Vec<StandardObservation>,
    done: bool,
    total_reward: f64,
}

impl Env {
    /// Starts a new episode: all drones blue, positions seeded, slots hosted
    /// in order or by a seeded permutation.
    pub fn reset(config: EpisodeConfig) -> Result<Self> {
        config.validate()?;
        let state = SwarmState::new(config.world, config.seed);
        let mut hosting: Vec<Uid> = (0..DRONE_COUNT).collect();
        if config.randomize_hosting {
            hosting.shuffle(&mut substream(config.seed, Stream::Hosting));
        }
        let agents = config
            .team_slots
            .iter()
            .zip(&hosting)
            .map(|(&kind, &host)| {
                let position = state.drones[host].position.rounded();
                let rng = policy_stream(config.seed, host);
                let policy = match kind {
                    SlotKind::Cw => Policy::Cw(Box::new(CwAgent::new(host, position, config.cw, rng))),
                    SlotKind::Scripted(k) => Policy::Scripted(Box::new(ScriptedAgent::new(k, host, rng))),
                    SlotKind::External => Policy::External,
                };
                Agent {
                    kind,
                    host,
                    policy,
                    tracker: CwMemory { relay_whistles: config.cw.relay_whistles, ..CwMemory::new(host, position) },
                    last_action_index: BlueAction::Sleep.index(),
                    last_action_on: vec![LAST_ALLOW; DRONE_COUNT],
                }
            })
            .collect();
        let mut env = Self {
            config,
            state,
            agents,
            inbox: vec![Vec::new(); DRONE_COUNT],
            local: Vec::new(),
            done: false,
            total_reward: 0.0,
        };
        env.refresh_local();
        Ok(env)
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    pub fn state(&self) -> &SwarmState {
        &self.state
    }

    /// Mutable world access for scenario construction in tests and tools.
    pub fn state_mut(&mut self) -> &mut SwarmState {
        &mut self.state
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn total_reward(&self) -> f64 {
        self.total_reward
    }

    pub fn slot_kinds(&self) -> Vec<SlotKind> {
        self.agents.iter().map(|a| a.kind).collect()
    }

    /// Drone hosting each slot.
    pub fn hosting(&self) -> Vec<Uid> {
        self.agents.iter().map(|a| a.host).collect()
    }

    pub fn external_slots(&self) -> Vec<usize> {
        self.agents
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == SlotKind::External)
            .map(|(i, _)| i)
            .collect()
    }

    /// Slots whose host currently has a blue agent.
    pub fn active_slots(&self) -> Vec<usize> {
        (0..self.agents.len()).filter(|&s| self.is_active(s)).collect()
    }

    pub fn is_active(&self, slot: usize) -> bool {
        self.state.drones[self.agents[slot].host].has_blue_agent()
    }

    /// Typed local view of the drone hosting `slot`.
    pub fn local_observation(&self, slot: usize) -> &StandardObservation {
        &self.local[self.agents[slot].host]
    }

    /// Per-slot observations in the configured layout.
    pub fn observations(&self) -> Vec<Option<Observation>> {
        (0..self.agents.len()).map(|s| self.observation(s)).collect()
    }

    pub fn observation(&self, slot: usize) -> Option<Observation> {
        if !self.is_active(slot) {
            return None;
        }
        Some(self.build_observation(slot, self.config.observation_mode, self.config.include_messages))
    }

    pub fn build_observation(&self, slot: usize, mode: ObservationMode, include_messages: bool) -> Observation {
        let agent = &self.agents[slot];
        let local = &self.local[agent.host];
        match mode {
            ObservationMode::Standard => Observation::standard(local, include_messages),
            ObservationMode::Improved => {
                let extras = ImprovedExtras {
                    last_action_index: agent.last_action_index,
                    last_action_on: agent.last_action_on.clone(),
                    needs_fixing: agent.needs_fixing(),
                };
                Observation::improved(local, &extras, include_messages)
            }
        }
    }

    /// Advances one step. `external[slot]` must hold an action for every
    /// external slot whose host is active; other entries are ignored.
    pub fn step(&mut self, external: &[Option<AgentAction>]) -> Result<StepResult> {
        if self.done {
            return Err(SimError::EpisodeDone);
        }
        let acting_step = self.state.step;
        let mut rejected = Vec::new();
        let mut decisions: Vec<Option<(BlueAction, Option<u16>)>> = Vec::with_capacity(self.agents.len());

        for slot in 0..self.agents.len() {
            if !self.is_active(slot) {
                decisions.push(None);
                continue;
            }
            let host = self.agents[slot].host;
            let local = &self.local[host];
            let agent = &mut self.agents[slot];
            let decision = match &mut agent.policy {
                Policy::Cw(cw) => {
                    let (a, f) = cw.act(local, acting_step);
                    (a, Some(f))
                }
                Policy::Scripted(s) => (s.act(local), None),
                Policy::External => {
                    let input = external
                        .get(slot)
                        .copied()
                        .flatten()
                        .ok_or(SimError::MissingAction { slot })?;
                    let action = BlueAction::from_index(input.index).unwrap_or_else(|| {
                        rejected.push(RejectedAction { slot, index: input.index });
                        BlueAction::Sleep
                    });
                    (action, input.frame)
                }
            };
            if !matches!(agent.policy, Policy::Cw(_)) {
                agent.tracker.observe(local.position, &local.frames(), acting_step);
                agent.tracker.record_action(decision.0);
            }
            let frame = match (decision.1, &agent.policy) {
                (Some(f), _) => Some(f),
                (None, Policy::External) if self.config.observation_mode == ObservationMode::Improved => {
                    Some(agent.tracker.frame())
                }
                _ => None,
            };
            decisions.push(Some((decision.0, frame)));
        }

        self.state.step += 1;
        self.state.begin_step();

        // Blue phase, ascending host UID.
        let mut order: Vec<usize> = (0..self.agents.len()).collect();
        order.sort_by_key(|&s| self.agents[s].host);
        let mut outgoing = Vec::new();
        for &slot in &order {
            let Some((action, frame)) = decisions[slot] else { continue };
            let host = self.agents[slot].host;
            apply_blue_action(&mut self.state, host, action, &self.config.blue);
            let agent = &mut self.agents[slot];
            agent.last_action_index = action.index();
            match action {
                BlueAction::RetakeControl(t) => agent.last_action_on[t] = LAST_RETAKE,
                BlueAction::BlockTraffic(t) => agent.last_action_on[t] = LAST_BLOCK,
                BlueAction::AllowTraffic(t) => agent.last_action_on[t] = LAST_ALLOW,
                _ => {}
            }
            if let Some(f) = frame {
                outgoing.push((host, f));
            }
        }
        // Broadcasts reach whoever is in range at sending time.
        let mut inbox = vec![Vec::new(); DRONE_COUNT];
        for &(sender, frame) in &outgoing {
            for r in self.state.graph.neighbours(sender).iter() {
                inbox[r].push((sender, frame));
            }
        }
        for frames in &mut inbox {
            frames.sort_by_key(|&(s, _)| s);
        }

        red_turn(&mut self.state, &self.config.red);
        let mut events = green_phase(&mut self.state);

        if self.state.fully_compromised() {
            events.push(RewardEvent::compromise(
                self.state.step,
                self.config.horizon,
                self.state.len(),
            ));
            self.done = true;
        }
        if self.state.step >= self.config.horizon {
            self.done = true;
        }

        self.state.step_motion();
        self.inbox = inbox;
        self.refresh_local();

        let team_reward = self.score(&events);
        self.total_reward += team_reward;
        Ok(StepResult {
            observations: self.observations(),
            rewards: vec![team_reward; self.agents.len()],
            team_reward,
            done: self.done,
            events,
            actions: decisions.iter().map(|d| d.map(|(a, _)| a)).collect(),
            rejected,
        })
    }

    /// Team reward for a set of events under the configured reward mode.
    pub fn score(&self, events: &[RewardEvent]) -> f64 {
        events
            .iter()
            .filter(|e| {
                self.config.reward_mode == RewardMode::Noisy || e.kind != RewardEventKind::Unroutable
            })
            .map(|e| e.magnitude)
            .sum()
    }

    fn refresh_local(&mut self) {
        let state = &self.state;
        self.local = state
            .drones
            .iter()
            .map(|d| StandardObservation {
                host: d.uid,
                last_outcome: d.last_action_outcome,
                block_list: d.block_list,
                malicious_process: d.malicious_process(),
                network_events: d.network_events.clone(),
                position: d.position.rounded(),
                neighbours: state
                    .graph
                    .neighbours(d.uid)
                    .iter()
                    .map(|n| {
                        let nd = &state.drones[n];
                        let (x, y) = nd.position.rounded();
                        NeighbourInfo { uid: n, x, y, sessions: nd.session_count() }
                    })
                    .collect(),
                inbox: self.inbox[d.uid].clone(),
            })
            .collect();
    }
}

/// Runs an episode with no external slots to completion, returning the total
/// team reward.
pub fn run_internal(config: EpisodeConfig) -> Result<f64> {
    let mut env = Env::reset(config)?;
    if !env.external_slots().is_empty() {
        return Err(SimError::MissingAction { slot: env.external_slots()[0] });
    }
    while !env.is_done() {
        env.step(&[])?;
    }
    Ok(env.total_reward())
}
