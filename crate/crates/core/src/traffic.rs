//! Green-team demand and message delivery resolution.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::world::{BandwidthResult, SwarmState, Uid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MessageKind {
    Green,
    BlueRemote,
    RedRemote,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Message {
    pub src: Uid,
    pub dst: Uid,
    pub kind: MessageKind,
    pub units: u32,
}

impl Message {
    pub fn green(src: Uid, dst: Uid) -> Self {
        assert_ne!(src, dst);
        Self { src, dst, kind: MessageKind::Green, units: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RewardEventKind {
    Blocked,
    Intercepted,
    DroppedBandwidth,
    Unroutable,
    CompromisePenalty,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardEvent {
    pub kind: RewardEventKind,
    pub step: u32,
    pub magnitude: f64,
}

impl RewardEvent {
    /// One of the four single-message failures, each worth -1.
    pub fn message_failure(kind: RewardEventKind, step: u32) -> Self {
        assert_ne!(kind, RewardEventKind::CompromisePenalty);
        Self { kind, step, magnitude: -1.0 }
    }

    /// Bulk penalty for total compromise: every remaining step is scored as
    /// if all 18 messages failed.
    pub fn compromise(step: u32, horizon: u32, drone_count: usize) -> Self {
        let remaining = horizon.saturating_sub(step) as f64;
        Self {
            kind: RewardEventKind::CompromisePenalty,
            step,
            magnitude: -(drone_count as f64) * remaining,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Delivery {
    Delivered,
    Failed(RewardEvent),
}

/// Resolves one message in the fixed order: unroutable, blocked,
/// bandwidth, intercepted, delivered.
pub fn deliver_message(state: &mut SwarmState, msg: &Message) -> Delivery {
    let step = state.step;
    let fail = |kind| Delivery::Failed(RewardEvent::message_failure(kind, step));
    let Some(route) = state.shortest_route(msg.src, msg.dst) else {
        return fail(RewardEventKind::Unroutable);
    };
    if state.route_blocks(&route, msg.src) {
        return fail(RewardEventKind::Blocked);
    }
    if state.consume_bandwidth(&route, msg.units) == BandwidthResult::Dropped {
        return fail(RewardEventKind::DroppedBandwidth);
    }
    if route.hops.iter().any(|&h| state.drones[h].is_intercepting()) {
        return fail(RewardEventKind::Intercepted);
    }
    Delivery::Delivered
}

/// Every drone sends one unit message to a uniformly chosen other drone.
/// Returns the failures.
pub fn green_phase(state: &mut SwarmState) -> Vec<RewardEvent> {
    let n = state.len();
    let mut events = Vec::new();
    for src in 0..n {
        let mut dst = state.rng.green.random_range(0..n - 1);
        if dst >= src {
            dst += 1;
        }
        if let Delivery::Failed(e) = deliver_message(state, &Message::green(src, dst)) {
            events.push(e);
        }
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::redteam::{RedAgent, Strategy};
    use crate::world::{Position, WorldConfig};

    fn swarm(pos: &[(f64, f64)]) -> SwarmState {
        let pos: Vec<_> = pos.iter().map(|&(x, y)| Position::new(x, y)).collect();
        SwarmState::with_positions(WorldConfig::default(), 1, &pos)
    }

    fn clustered() -> SwarmState {
        swarm(&[(50.0, 50.0); 18])
    }

    #[test]
    fn connected_swarm_delivers_everything() {
        let mut s = clustered();
        assert!(green_phase(&mut s).is_empty());
        assert_eq!(s.drones.iter().map(|d| d.bandwidth_used).sum::<u32>(), 36);
    }

    #[test]
    fn partitioned_swarm_is_all_unroutable() {
        let pos: Vec<_> = (0..18).map(|i| Position::new(i as f64 * 5.0, 0.0)).collect();
        let config = WorldConfig { radio_radius: 1.0, ..WorldConfig::default() };
        let mut s = SwarmState::with_positions(config, 1, &pos);
        let events = green_phase(&mut s);
        assert_eq!(events.len(), 18);
        assert!(events.iter().all(|e| e.kind == RewardEventKind::Unroutable));
        assert_eq!(events.iter().map(|e| e.magnitude).sum::<f64>(), -18.0);
    }

    #[test]
    fn relay_block_beats_bandwidth() {
        let mut s = swarm(&[(0.0, 0.0), (25.0, 0.0), (50.0, 0.0)]);
        s.drones[1].block_list.insert(0);
        s.drones[1].bandwidth_used = 100;
        let out = deliver_message(&mut s, &Message::green(0, 2));
        assert!(matches!(out, Delivery::Failed(e) if e.kind == RewardEventKind::Blocked));
    }

    #[test]
    fn saturated_relay_drops_without_charging() {
        let mut s = swarm(&[(0.0, 0.0), (25.0, 0.0), (50.0, 0.0)]);
        let r = s.shortest_route(1, 2).unwrap();
        while s.consume_bandwidth(&r, 1) == BandwidthResult::Ok {}
        let snapshot = s.clone();
        let out = deliver_message(&mut s, &Message::green(0, 2));
        assert!(matches!(out, Delivery::Failed(e) if e.kind == RewardEventKind::DroppedBandwidth));
        assert_eq!(s, snapshot);
    }

    #[test]
    fn intercepting_relay_taints_each_passing_message() {
        // line 0-1-2-3, drone 1 intercepts
        let mut s = swarm(&[(0.0, 0.0), (25.0, 0.0), (50.0, 0.0), (75.0, 0.0)]);
        s.drones[1].red = Some(RedAgent::high(Strategy::Intercept, 0));
        let sends = [(0, 2), (0, 3), (2, 0), (3, 2), (2, 3), (3, 0)];
        let expected = sends
            .iter()
            .filter(|&&(a, b)| s.shortest_route(a, b).unwrap().hops.contains(&1))
            .count();
        let got = sends
            .iter()
            .filter(|&&(a, b)| {
                matches!(deliver_message(&mut s, &Message::green(a, b)),
                    Delivery::Failed(e) if e.kind == RewardEventKind::Intercepted)
            })
            .count();
        assert_eq!(expected, 4);
        assert_eq!(got, expected);
    }

    #[test]
    fn compromise_penalty_magnitude() {
        let e = RewardEvent::compromise(120, 500, 18);
        assert_eq!(e.magnitude, -18.0 * 380.0);
    }
}
