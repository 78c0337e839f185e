//! Blue-team action space, action effects and defender policies.

mod cw;
mod frame;
mod scripted;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::world::{ActionOutcome, BandwidthResult, SwarmState, Uid, DRONE_COUNT};

pub use cw::{CwAgent, CwConfig, CwMemory, RepairState};
pub use frame::{pad, unpad, CwFrame, UNUSED_MASK};
pub use scripted::{ScriptedAgent, ScriptedKind};

/// A decoded blue action. Indices: 0 RemoveOtherSessions, 1..=18
/// RetakeControl, 19..=36 BlockTraffic, 37..=54 AllowTraffic, 55 Sleep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlueAction {
    RemoveOtherSessions,
    RetakeControl(Uid),
    BlockTraffic(Uid),
    AllowTraffic(Uid),
    Sleep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionKind {
    RemoveOtherSessions,
    RetakeControl,
    BlockTraffic,
    AllowTraffic,
    Sleep,
}

impl ActionKind {
    pub const ALL: [ActionKind; 5] = [
        ActionKind::RemoveOtherSessions,
        ActionKind::RetakeControl,
        ActionKind::BlockTraffic,
        ActionKind::AllowTraffic,
        ActionKind::Sleep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActionKind::RemoveOtherSessions => "RemoveOtherSessions",
            ActionKind::RetakeControl => "RetakeControl",
            ActionKind::BlockTraffic => "BlockTraffic",
            ActionKind::AllowTraffic => "AllowTraffic",
            ActionKind::Sleep => "Sleep",
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl BlueAction {
    /// Size of the discrete action space: 1 + 18 + 18 + 18 + 1.
    pub const COUNT: usize = 3 * DRONE_COUNT + 2;

    const RETAKE_BASE: usize = 1;
    const BLOCK_BASE: usize = Self::RETAKE_BASE + DRONE_COUNT;
    const ALLOW_BASE: usize = Self::BLOCK_BASE + DRONE_COUNT;
    const SLEEP: usize = Self::ALLOW_BASE + DRONE_COUNT;

    pub fn index(self) -> usize {
        match self {
            BlueAction::RemoveOtherSessions => 0,
            BlueAction::RetakeControl(t) => Self::RETAKE_BASE + t,
            BlueAction::BlockTraffic(t) => Self::BLOCK_BASE + t,
            BlueAction::AllowTraffic(t) => Self::ALLOW_BASE + t,
            BlueAction::Sleep => Self::SLEEP,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Some(match index {
            0 => BlueAction::RemoveOtherSessions,
            i if i < Self::BLOCK_BASE => BlueAction::RetakeControl(i - Self::RETAKE_BASE),
            i if i < Self::ALLOW_BASE => BlueAction::BlockTraffic(i - Self::BLOCK_BASE),
            i if i < Self::SLEEP => BlueAction::AllowTraffic(i - Self::ALLOW_BASE),
            Self::SLEEP => BlueAction::Sleep,
            _ => return None,
        })
    }

    pub fn kind(self) -> ActionKind {
        match self {
            BlueAction::RemoveOtherSessions => ActionKind::RemoveOtherSessions,
            BlueAction::RetakeControl(_) => ActionKind::RetakeControl,
            BlueAction::BlockTraffic(_) => ActionKind::BlockTraffic,
            BlueAction::AllowTraffic(_) => ActionKind::AllowTraffic,
            BlueAction::Sleep => ActionKind::Sleep,
        }
    }

    pub fn target(self) -> Option<Uid> {
        match self {
            BlueAction::RetakeControl(t) | BlueAction::BlockTraffic(t) | BlueAction::AllowTraffic(t) => {
                Some(t)
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlueConfig {
    pub remove_success_probability: f64,
    pub retake_success_probability: f64,
    pub retake_false_flag_probability: f64,
    /// Bandwidth charged to each drone on a RetakeControl route.
    pub retake_units: u32,
}

impl Default for BlueConfig {
    fn default() -> Self {
        Self {
            remove_success_probability: 0.9,
            retake_success_probability: 0.75,
            retake_false_flag_probability: 0.15,
            retake_units: 10,
        }
    }
}

/// Applies `action` on behalf of the blue agent on `actor` and records the
/// outcome on the actor for its next observation. Drones under full red
/// control ignore blue actions.
pub fn apply_blue_action(
    state: &mut SwarmState,
    actor: Uid,
    action: BlueAction,
    config: &BlueConfig,
) -> ActionOutcome {
    if state.drones[actor].is_red_high() {
        return ActionOutcome::Unknown;
    }
    let outcome = match action {
        BlueAction::Sleep => ActionOutcome::True,
        BlueAction::RemoveOtherSessions => {
            let drone = &mut state.drones[actor];
            if drone.malicious_process() {
                let ok = state.rng.blue_outcome.random::<f64>() < config.remove_success_probability;
                if ok {
                    drone.red = None;
                }
                ok.into()
            } else {
                ActionOutcome::True
            }
        }
        BlueAction::RetakeControl(t)
        | BlueAction::BlockTraffic(t)
        | BlueAction::AllowTraffic(t)
            if t == actor || t >= state.len() =>
        {
            ActionOutcome::False
        }
        BlueAction::RetakeControl(t) => retake(state, actor, t, config),
        BlueAction::BlockTraffic(t) => {
            state.drones[actor].block_list.insert(t);
            ActionOutcome::True
        }
        BlueAction::AllowTraffic(t) => {
            state.drones[actor].block_list.remove(t);
            ActionOutcome::True
        }
    };
    state.drones[actor].last_action_outcome = outcome;
    outcome
}

fn retake(state: &mut SwarmState, actor: Uid, target: Uid, config: &BlueConfig) -> ActionOutcome {
    let Some(route) = state.shortest_route(actor, target) else {
        return ActionOutcome::False;
    };
    if state.route_blocks(&route, actor) {
        return ActionOutcome::False;
    }
    if state.consume_bandwidth(&route, config.retake_units) == BandwidthResult::Dropped {
        return ActionOutcome::False;
    }
    let rng = &mut state.rng.blue_outcome;
    let ok = rng.random::<f64>() < config.retake_success_probability;
    let false_flag = rng.random::<f64>() < config.retake_false_flag_probability;
    if ok {
        state.drones[target].red = None;
    }
    if false_flag {
        for &h in &route.hops {
            state.drones[h].flag_event(actor);
        }
    }
    ok.into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::redteam::{RedAgent, Strategy};
    use crate::world::{Controller, Position, WorldConfig};

    fn pair() -> SwarmState {
        let pos = [Position::new(10.0, 10.0), Position::new(30.0, 10.0)];
        SwarmState::with_positions(WorldConfig::default(), 2, &pos)
    }

    #[test]
    fn action_space_has_56_entries() {
        assert_eq!(BlueAction::COUNT, 56);
        assert_eq!(BlueAction::from_index(0), Some(BlueAction::RemoveOtherSessions));
        assert_eq!(BlueAction::from_index(1), Some(BlueAction::RetakeControl(0)));
        assert_eq!(BlueAction::from_index(18), Some(BlueAction::RetakeControl(17)));
        assert_eq!(BlueAction::from_index(19), Some(BlueAction::BlockTraffic(0)));
        assert_eq!(BlueAction::from_index(54), Some(BlueAction::AllowTraffic(17)));
        assert_eq!(BlueAction::from_index(55), Some(BlueAction::Sleep));
        assert_eq!(BlueAction::from_index(56), None);
    }

    #[test]
    fn encoding_is_a_bijection() {
        for i in 0..BlueAction::COUNT {
            let a = BlueAction::from_index(i).unwrap();
            assert_eq!(a.index(), i);
        }
    }

    #[test]
    fn sleep_changes_nothing_but_outcome() {
        let mut s = pair();
        let mut before = s.clone();
        apply_blue_action(&mut s, 0, BlueAction::Sleep, &BlueConfig::default());
        before.drones[0].last_action_outcome = ActionOutcome::True;
        assert_eq!(s, before);
    }

    #[test]
    fn forced_retake_restores_blue_and_charges_route() {
        let mut s = pair();
        s.drones[1].red = Some(RedAgent::high(Strategy::FloodRandom, 0));
        let cfg = BlueConfig { retake_success_probability: 1.0, ..BlueConfig::default() };
        let out = apply_blue_action(&mut s, 0, BlueAction::RetakeControl(1), &cfg);
        assert_eq!(out, ActionOutcome::True);
        assert_eq!(s.drones[1].controller(), Controller::Blue);
        assert_eq!(s.drones[0].bandwidth_used, 10);
        assert_eq!(s.drones[1].bandwidth_used, 10);
    }

    #[test]
    fn unaffordable_retake_is_dropped() {
        let mut s = pair();
        s.drones[1].bandwidth_used = 95;
        s.drones[1].red = Some(RedAgent::high(Strategy::Intercept, 0));
        let cfg = BlueConfig { retake_success_probability: 1.0, ..BlueConfig::default() };
        let out = apply_blue_action(&mut s, 0, BlueAction::RetakeControl(1), &cfg);
        assert_eq!(out, ActionOutcome::False);
        assert!(s.drones[1].is_red_high());
        assert_eq!(s.drones[0].bandwidth_used, 0);
    }

    #[test]
    fn remove_with_nothing_to_remove_succeeds() {
        let mut s = pair();
        let before = s.clone();
        let out = apply_blue_action(&mut s, 0, BlueAction::RemoveOtherSessions, &BlueConfig::default());
        assert_eq!(out, ActionOutcome::True);
        assert_eq!(s.drones[0].red, before.drones[0].red);
        assert_eq!(s.rng, before.rng);
    }

    #[test]
    fn forced_remove_clears_low_session() {
        let mut s = pair();
        s.drones[0].red = Some(RedAgent::low(0));
        let cfg = BlueConfig { remove_success_probability: 1.0, ..BlueConfig::default() };
        apply_blue_action(&mut s, 0, BlueAction::RemoveOtherSessions, &cfg);
        assert_eq!(s.drones[0].controller(), Controller::Blue);
    }

    #[test]
    fn block_and_allow_edit_own_list() {
        let mut s = pair();
        let cfg = BlueConfig::default();
        apply_blue_action(&mut s, 0, BlueAction::BlockTraffic(1), &cfg);
        assert!(s.drones[0].block_list.contains(1));
        apply_blue_action(&mut s, 0, BlueAction::AllowTraffic(1), &cfg);
        assert!(s.drones[0].block_list.is_empty());
    }

    #[test]
    fn self_targeted_remote_action_fails() {
        let mut s = pair();
        let out = apply_blue_action(&mut s, 0, BlueAction::RetakeControl(0), &BlueConfig::default());
        assert_eq!(out, ActionOutcome::False);
        assert_eq!(s.total_bandwidth_used(), 0);
    }

    #[test]
    fn red_high_actor_is_ignored() {
        let mut s = pair();
        s.drones[0].red = Some(RedAgent::high(Strategy::Intercept, 0));
        let before = s.clone();
        apply_blue_action(&mut s, 0, BlueAction::BlockTraffic(1), &BlueConfig::default());
        assert_eq!(s, before);
    }
}
