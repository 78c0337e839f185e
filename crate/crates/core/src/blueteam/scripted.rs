//! The five scripted baseline defenders.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::BlueAction;
use crate::env::StandardObservation;
use crate::world::{Uid, DRONE_COUNT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScriptedKind {
    Sleep,
    /// Always RemoveOtherSessions.
    RemoveBlueDrone,
    /// RetakeControl on a random other drone.
    RetakeBlueDrone,
    /// RetakeControl on a drone with observed malicious events, else
    /// RemoveOtherSessions.
    AdvancedRetakeBlueDrone,
    /// As AdvancedRetakeBlueDrone, with BlockTraffic instead of RetakeControl.
    AdvancedBlockBlueDrone,
}

impl ScriptedKind {
    pub const ALL: [ScriptedKind; 5] = [
        ScriptedKind::Sleep,
        ScriptedKind::RemoveBlueDrone,
        ScriptedKind::RetakeBlueDrone,
        ScriptedKind::AdvancedRetakeBlueDrone,
        ScriptedKind::AdvancedBlockBlueDrone,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ScriptedKind::Sleep => "sleep",
            ScriptedKind::RemoveBlueDrone => "remove",
            ScriptedKind::RetakeBlueDrone => "retake",
            ScriptedKind::AdvancedRetakeBlueDrone => "advanced-retake",
            ScriptedKind::AdvancedBlockBlueDrone => "advanced-block",
        }
    }
}

impl fmt::Display for ScriptedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ScriptedKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Ok(match norm.as_str() {
            "sleep" => ScriptedKind::Sleep,
            "remove" | "removebluedrone" => ScriptedKind::RemoveBlueDrone,
            "retake" | "retakebluedrone" => ScriptedKind::RetakeBlueDrone,
            "advanced-retake" | "advancedretakebluedrone" => ScriptedKind::AdvancedRetakeBlueDrone,
            "advanced-block" | "advancedblockbluedrone" => ScriptedKind::AdvancedBlockBlueDrone,
            _ => return Err(format!("unknown scripted agent `{s}`")),
        })
    }
}

pub struct ScriptedAgent {
    pub kind: ScriptedKind,
    pub uid: Uid,
    rng: ChaCha8Rng,
}

impl ScriptedAgent {
    pub fn new(kind: ScriptedKind, uid: Uid, rng: ChaCha8Rng) -> Self {
        Self { kind, uid, rng }
    }

    pub fn act(&mut self, obs: &StandardObservation) -> BlueAction {
        match self.kind {
            ScriptedKind::Sleep => BlueAction::Sleep,
            ScriptedKind::RemoveBlueDrone => BlueAction::RemoveOtherSessions,
            ScriptedKind::RetakeBlueDrone => {
                let mut t = self.rng.random_range(0..DRONE_COUNT - 1);
                if t >= self.uid {
                    t += 1;
                }
                BlueAction::RetakeControl(t)
            }
            ScriptedKind::AdvancedRetakeBlueDrone => self
                .suspect(obs)
                .map_or(BlueAction::RemoveOtherSessions, BlueAction::RetakeControl),
            ScriptedKind::AdvancedBlockBlueDrone => self
                .suspect(obs)
                .map_or(BlueAction::RemoveOtherSessions, BlueAction::BlockTraffic),
        }
    }

    /// A uniformly chosen drone with malicious network events, if any.
    fn suspect(&mut self, obs: &StandardObservation) -> Option<Uid> {
        let flagged: Vec<Uid> = obs
            .network_events
            .iter()
            .enumerate()
            .filter(|&(uid, &c)| c > 0 && uid != self.uid)
            .map(|(uid, _)| uid)
            .collect();
        if flagged.is_empty() {
            return None;
        }
        Some(flagged[self.rng.random_range(0..flagged.len())])
    }
}
