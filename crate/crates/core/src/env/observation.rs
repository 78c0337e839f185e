//! Observation construction.
//!
//! Two flat integer layouts are supported. The standard layout (109 entries,
//! 381 with messages):
//!
//! | index      | content                                                  |
//! |------------|----------------------------------------------------------|
//! | 0          | last action: 0 true, 1 unknown, 2 false                  |
//! | 1..=18     | block list bit for drone `i - 1`                         |
//! | 19         | malicious process on host                                |
//! | 20..=37    | malicious network events from drone `i - 20`, 0..=2      |
//! | 38         | reserved, always 0                                       |
//! | 39, 40     | host x, y                                                |
//! | 41..=108   | 17 neighbour tuples (uid, x, y, sessions), ascending uid |
//! | 109..381   | 17 x 16 message bits                                     |
//!
//! The improved layout (58 entries, 330 with messages):
//!
//! | index      | content                                                  |
//! |------------|----------------------------------------------------------|
//! | 0          | host uid                                                 |
//! | 1          | last action: 0 false/unknown, 1 true                     |
//! | 2          | last action index 0..=55                                 |
//! | 3..=20     | last action type on drone `i - 3`: 0 retake, 1 block, 2 allow |
//! | 21         | malicious process on host                                |
//! | 22..=39    | block list bit for drone `i - 22`                        |
//! | 40..=57    | needs-fixing bit for drone `i - 40`                      |
//! | 58..330    | 17 x 16 message bits                                     |
//!
//! Message slots belong to the other 17 drones in ascending uid order; each
//! slot holds that sender's frame from the previous step, most significant
//! bit first, or zeros if nothing was heard from it.

use serde::{Deserialize, Serialize};

use crate::world::{ActionOutcome, Uid, UidSet, DRONE_COUNT};

const OTHER_DRONES: usize = DRONE_COUNT - 1;
const FRAME_BITS: usize = 16;
pub const MESSAGE_LEN: usize = OTHER_DRONES * FRAME_BITS;
pub const STANDARD_LEN: usize = 109;
pub const IMPROVED_LEN: usize = 58;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObservationMode {
    Standard,
    Improved,
}

impl ObservationMode {
    pub fn len(self, include_messages: bool) -> usize {
        let base = match self {
            ObservationMode::Standard => STANDARD_LEN,
            ObservationMode::Improved => IMPROVED_LEN,
        };
        if include_messages {
            base + MESSAGE_LEN
        } else {
            base
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NeighbourInfo {
    pub uid: Uid,
    pub x: i32,
    pub y: i32,
    pub sessions: u8,
}

/// Typed form of the standard observation; this is what built-in policies
/// consume.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardObservation {
    pub host: Uid,
    pub last_outcome: ActionOutcome,
    pub block_list: UidSet,
    pub malicious_process: bool,
    pub network_events: Vec<u8>,
    pub position: (i32, i32),
    /// Radio neighbours in ascending uid order.
    pub neighbours: Vec<NeighbourInfo>,
    /// Frames heard last step, keyed by sender, ascending.
    pub inbox: Vec<(Uid, u16)>,
}

impl StandardObservation {
    pub fn frames(&self) -> Vec<u16> {
        self.inbox.iter().map(|&(_, f)| f).collect()
    }
}

/// Extra per-agent state needed for the improved layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImprovedExtras {
    pub last_action_index: usize,
    /// Per target uid: 0 retake, 1 block, 2 allow.
    pub last_action_on: Vec<u8>,
    pub needs_fixing: UidSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub mode: ObservationMode,
    pub include_messages: bool,
    pub values: Vec<i32>,
}

impl Observation {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn standard(obs: &StandardObservation, include_messages: bool) -> Self {
        let mut v = Vec::with_capacity(ObservationMode::Standard.len(include_messages));
        v.push(match obs.last_outcome {
            ActionOutcome::True => 0,
            ActionOutcome::Unknown => 1,
            ActionOutcome::False => 2,
        });
        v.extend((0..DRONE_COUNT).map(|i| obs.block_list.contains(i) as i32));
        v.push(obs.malicious_process as i32);
        v.extend((0..DRONE_COUNT).map(|i| obs.network_events.get(i).copied().unwrap_or(0) as i32));
        v.push(0);
        v.push(obs.position.0);
        v.push(obs.position.1);
        for slot in 0..OTHER_DRONES {
            match obs.neighbours.get(slot) {
                Some(n) => v.extend([n.uid as i32, n.x, n.y, n.sessions as i32]),
                None => v.extend([0; 4]),
            }
        }
        debug_assert_eq!(v.len(), STANDARD_LEN);
        if include_messages {
            push_messages(&mut v, obs.host, &obs.inbox);
        }
        Self { mode: ObservationMode::Standard, include_messages, values: v }
    }

    pub fn improved(obs: &StandardObservation, extras: &ImprovedExtras, include_messages: bool) -> Self {
        let mut v = Vec::with_capacity(ObservationMode::Improved.len(include_messages));
        v.push(obs.host as i32);
        v.push((obs.last_outcome == ActionOutcome::True) as i32);
        v.push(extras.last_action_index as i32);
        v.extend((0..DRONE_COUNT).map(|i| extras.last_action_on[i] as i32));
        v.push(obs.malicious_process as i32);
        v.extend((0..DRONE_COUNT).map(|i| obs.block_list.contains(i) as i32));
        v.extend((0..DRONE_COUNT).map(|i| extras.needs_fixing.contains(i) as i32));
        debug_assert_eq!(v.len(), IMPROVED_LEN);
        if include_messages {
            push_messages(&mut v, obs.host, &obs.inbox);
        }
        Self { mode: ObservationMode::Improved, include_messages, values: v }
    }

    /// Inclusive value range of entry `index` in the given layout.
    pub fn entry_range(mode: ObservationMode, index: usize) -> (i32, i32) {
        match mode {
            ObservationMode::Standard => match index {
                0 => (0, 2),
                1..=19 => (0, 1),
                20..=37 => (0, 2),
                38 => (0, 0),
                39 | 40 => (0, 100),
                41..=108 => match (index - 41) % 4 {
                    0 => (0, DRONE_COUNT as i32 - 1),
                    1 | 2 => (0, 100),
                    _ => (0, 2),
                },
                _ => (0, 1),
            },
            ObservationMode::Improved => match index {
                0 => (0, DRONE_COUNT as i32 - 1),
                1 => (0, 1),
                2 => (0, crate::blueteam::BlueAction::COUNT as i32 - 1),
                3..=20 => (0, 2),
                _ => (0, 1),
            },
        }
    }

    pub fn in_range(&self) -> bool {
        self.values.iter().enumerate().all(|(i, &x)| {
            let (lo, hi) = Self::entry_range(self.mode, i);
            (lo..=hi).contains(&x)
        })
    }
}

/// Message slot for `sender` as seen by `host`.
pub fn message_slot(host: Uid, sender: Uid) -> usize {
    debug_assert_ne!(host, sender);
    if sender < host {
        sender
    } else {
        sender - 1
    }
}

fn push_messages(v: &mut Vec<i32>, host: Uid, inbox: &[(Uid, u16)]) {
    let start = v.len();
    v.resize(start + MESSAGE_LEN, 0);
    for &(sender, frame) in inbox {
        let base = start + message_slot(host, sender) * FRAME_BITS;
        for bit in 0..FRAME_BITS {
            v[base + bit] = ((frame >> (FRAME_BITS - 1 - bit)) & 1) as i32;
        }
    }
}
