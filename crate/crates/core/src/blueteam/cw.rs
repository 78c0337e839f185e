//! Canaries-and-whistles defender.
//!
//! Every healthy agent broadcasts its own UID (the canary) each step and
//! remembers the step at which it last heard each neighbour's canary. A
//! neighbour that was heard last step but not this step is presumed
//! compromised: the agent queues it for repair and blows the whistle by
//! setting the overheard bit and whistle UID in its outgoing frame. Agents
//! that hear a whistle queue the named drone too. Queued drones move through
//! block, retake and allow before leaving the queue.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::frame::{pad, unpad};
use super::BlueAction;
use crate::env::StandardObservation;
use crate::world::{Uid, DRONE_COUNT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RepairState {
    Block,
    Retake,
    Allow,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CwConfig {
    /// Chance that a freshly queued drone is retaken immediately instead of
    /// being blocked first.
    pub direct_retake_probability: f64,
    /// Forward a newly heard whistle in the next outgoing frame.
    pub relay_whistles: bool,
}

impl Default for CwConfig {
    fn default() -> Self {
        Self { direct_retake_probability: 0.225, relay_whistles: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CwMemory {
    pub uid: Uid,
    /// Step at which each canary was last heard.
    pub last_seen: BTreeMap<Uid, u32>,
    pub to_fix: BTreeMap<Uid, RepairState>,
    pub cached_position: (i32, i32),
    pub whistle: u8,
    pub overheard: u8,
    pub relay_whistles: bool,
}

impl CwMemory {
    pub fn new(uid: Uid, position: (i32, i32)) -> Self {
        Self {
            uid,
            last_seen: BTreeMap::new(),
            to_fix: BTreeMap::new(),
            cached_position: position,
            whistle: 0,
            overheard: 0,
            relay_whistles: true,
        }
    }

    /// Outgoing frame for the current whistle state.
    pub fn frame(&self) -> u16 {
        pad(self.uid as u8, self.overheard, self.whistle)
    }

    /// Frame announcing that this host is infected. It carries no canary of
    /// its own, so neighbours notice the silence.
    pub fn self_whistle(&self) -> u16 {
        pad(0, 0, self.uid as u8)
    }

    /// Canary bookkeeping for one step: position check, frame parsing and
    /// missing-canary detection. Leaves `overheard`/`whistle` set for the
    /// outgoing frame.
    pub fn observe(&mut self, position: (i32, i32), frames: &[u16], step: u32) {
        let mut relay = None;
        if step > 1 && position != self.cached_position {
            self.cached_position = position;
            self.last_seen.clear();
        } else {
            for &m in frames {
                let (canary, overheard, whistle) = unpad(m);
                let (canary, whistle) = (canary as Uid, whistle as Uid);
                if canary >= DRONE_COUNT || canary == self.uid {
                    continue;
                }
                self.last_seen.insert(canary, step);
                if overheard == 1 && whistle < DRONE_COUNT {
                    if let std::collections::btree_map::Entry::Vacant(e) = self.to_fix.entry(whistle) {
                        e.insert(RepairState::Block);
                        relay.get_or_insert(whistle);
                    }
                }
            }
        }

        self.overheard = 0;
        if step > 0 {
            let missing: Vec<Uid> = self
                .last_seen
                .iter()
                .filter(|&(_, &seen)| seen == step - 1)
                .map(|(&id, _)| id)
                .collect();
            for id in missing {
                self.to_fix.insert(id, RepairState::Block);
                self.whistle = id as u8;
                self.overheard = 1;
            }
        }
        // Forward a newly heard whistle when we have none of our own.
        if self.overheard == 0 && self.relay_whistles {
            if let Some(w) = relay {
                self.whistle = w as u8;
                self.overheard = 1;
            }
        }
    }

    /// Advances the repair of one uniformly chosen queued drone.
    pub fn repair<R: Rng>(&mut self, rng: &mut R, config: &CwConfig) -> Option<BlueAction> {
        if self.to_fix.is_empty() {
            return None;
        }
        let k = rng.random_range(0..self.to_fix.len());
        let (&target, &state) = self.to_fix.iter().nth(k).expect("index within queue");
        let action = match state {
            RepairState::Block => {
                if rng.random::<f64>() <= config.direct_retake_probability {
                    self.to_fix.insert(target, RepairState::Allow);
                    BlueAction::RetakeControl(target)
                } else {
                    self.to_fix.insert(target, RepairState::Retake);
                    BlueAction::BlockTraffic(target)
                }
            }
            RepairState::Retake => {
                self.to_fix.insert(target, RepairState::Allow);
                BlueAction::RetakeControl(target)
            }
            RepairState::Allow => {
                self.to_fix.remove(&target);
                BlueAction::AllowTraffic(target)
            }
        };
        Some(action)
    }

    /// Moves the repair queue along in response to an action chosen by
    /// someone else (used when the agent is not a CW policy but its
    /// observation reports repair needs).
    pub fn record_action(&mut self, action: BlueAction) {
        match action {
            BlueAction::BlockTraffic(t) => {
                if let Some(s) = self.to_fix.get_mut(&t) {
                    *s = RepairState::Retake;
                }
            }
            BlueAction::RetakeControl(t) => {
                if let Some(s) = self.to_fix.get_mut(&t) {
                    *s = RepairState::Allow;
                }
            }
            BlueAction::AllowTraffic(t) => {
                self.to_fix.remove(&t);
            }
            _ => {}
        }
    }

    /// One full decision: returns the action and outgoing frame.
    pub fn decide<R: Rng>(
        &mut self,
        obs: &StandardObservation,
        frames: &[u16],
        step: u32,
        rng: &mut R,
        config: &CwConfig,
    ) -> (BlueAction, u16) {
        if obs.malicious_process {
            return (BlueAction::RemoveOtherSessions, self.self_whistle());
        }
        self.observe(obs.position, frames, step);
        let action = self
            .repair(rng, config)
            .unwrap_or(BlueAction::RemoveOtherSessions);
        (action, self.frame())
    }
}

/// A CW policy bound to its host drone and private random stream.
pub struct CwAgent {
    pub memory: CwMemory,
    pub config: CwConfig,
    rng: ChaCha8Rng,
}

impl CwAgent {
    pub fn new(uid: Uid, position: (i32, i32), config: CwConfig, rng: ChaCha8Rng) -> Self {
        let memory = CwMemory { relay_whistles: config.relay_whistles, ..CwMemory::new(uid, position) };
        Self { memory, config, rng }
    }

    pub fn act(&mut self, obs: &StandardObservation, step: u32) -> (BlueAction, u16) {
        let frames = obs.frames();
        self.memory.decide(obs, &frames, step, &mut self.rng, &self.config)
    }
}
