//! Swarm geometry, per-drone state, radio connectivity and bandwidth.

mod graph;
mod motion;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use graph::{RadioGraph, Route};

use crate::redteam::{Privilege, RedAgent, Strategy};
use crate::rng::RngStreams;

pub type Uid = usize;

/// Number of drones in the standard scenario.
pub const DRONE_COUNT: usize = 18;

/// Saturation value for per-source malicious network event counters.
pub const MAX_EVENT_COUNT: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Integer grid cell as reported in observations.
    pub fn rounded(&self) -> (i32, i32) {
        (self.x.round() as i32, self.y.round() as i32)
    }
}

/// Compact set of drone UIDs (UIDs below 32), iterated in ascending order.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct UidSet(u32);

impl UidSet {
    pub const CAPACITY: usize = 32;

    pub const fn empty() -> Self {
        Self(0)
    }

    pub fn single(uid: Uid) -> Self {
        let mut s = Self::empty();
        s.insert(uid);
        s
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= Self::CAPACITY);
        if n == Self::CAPACITY {
            Self(u32::MAX)
        } else {
            Self((1u32 << n) - 1)
        }
    }

    pub fn insert(&mut self, uid: Uid) -> bool {
        assert!(uid < Self::CAPACITY, "uid {uid} out of range");
        let had = self.contains(uid);
        self.0 |= 1 << uid;
        !had
    }

    pub fn remove(&mut self, uid: Uid) -> bool {
        let had = self.contains(uid);
        if uid < Self::CAPACITY {
            self.0 &= !(1 << uid);
        }
        had
    }

    pub fn contains(&self, uid: Uid) -> bool {
        uid < Self::CAPACITY && self.0 & (1 << uid) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Self(self.0 & !other.0)
    }

    pub fn bits(&self) -> u32 {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Uid> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let uid = bits.trailing_zeros() as Uid;
            bits &= bits - 1;
            Some(uid)
        })
    }

    /// The `k`-th smallest member.
    pub fn nth(&self, k: usize) -> Option<Uid> {
        self.iter().nth(k)
    }
}

impl std::fmt::Debug for UidSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Uid> for UidSet {
    fn from_iter<I: IntoIterator<Item = Uid>>(iter: I) -> Self {
        let mut s = Self::empty();
        for uid in iter {
            s.insert(uid);
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Controller {
    Blue,
    /// A low-privilege red session coexists with the blue agent.
    RedLow,
    /// Activated malware has displaced the blue agent.
    RedHigh,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionOutcome {
    True,
    #[default]
    Unknown,
    False,
}

impl From<bool> for ActionOutcome {
    fn from(ok: bool) -> Self {
        if ok {
            ActionOutcome::True
        } else {
            ActionOutcome::False
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldConfig {
    pub drone_count: usize,
    pub arena_size: f64,
    pub radio_radius: f64,
    pub max_bandwidth: u32,
    /// Distance covered per movement step of the random-waypoint model.
    pub speed: f64,
    /// Steps a drone holds position after reaching each waypoint.
    pub pause_steps: u32,
    /// Waypoints are drawn at least this far from the arena edge.
    pub waypoint_margin: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            drone_count: DRONE_COUNT,
            arena_size: 100.0,
            radio_radius: 30.0,
            max_bandwidth: 100,
            speed: 2.0,
            pause_steps: 100,
            waypoint_margin: 15.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DroneState {
    pub uid: Uid,
    pub position: Position,
    pub red: Option<RedAgent>,
    pub block_list: UidSet,
    pub bandwidth_used: u32,
    /// Malicious network events observed this step, indexed by source UID.
    pub network_events: Vec<u8>,
    pub last_action_outcome: ActionOutcome,
}

impl DroneState {
    fn new(uid: Uid, position: Position, drone_count: usize) -> Self {
        Self {
            uid,
            position,
            red: None,
            block_list: UidSet::empty(),
            bandwidth_used: 0,
            network_events: vec![0; drone_count],
            last_action_outcome: ActionOutcome::Unknown,
        }
    }

    pub fn controller(&self) -> Controller {
        match self.red {
            None => Controller::Blue,
            Some(RedAgent { privilege: Privilege::Low, .. }) => Controller::RedLow,
            Some(RedAgent { privilege: Privilege::High, .. }) => Controller::RedHigh,
        }
    }

    pub fn is_red_high(&self) -> bool {
        self.controller() == Controller::RedHigh
    }

    /// A blue agent is present (possibly sharing the drone with a low session).
    pub fn has_blue_agent(&self) -> bool {
        !self.is_red_high()
    }

    pub fn malicious_process(&self) -> bool {
        self.controller() == Controller::RedLow
    }

    pub fn is_intercepting(&self) -> bool {
        matches!(
            self.red,
            Some(RedAgent { privilege: Privilege::High, strategy: Some(Strategy::Intercept), .. })
        )
    }

    /// Number of agent sessions on the drone.
    pub fn session_count(&self) -> u8 {
        match self.controller() {
            Controller::Blue | Controller::RedHigh => 1,
            Controller::RedLow => 2,
        }
    }

    /// Records one malicious event attributed to `source`, saturating.
    pub fn flag_event(&mut self, source: Uid) {
        let c = &mut self.network_events[source];
        *c = (*c + 1).min(MAX_EVENT_COUNT);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandwidthResult {
    Ok,
    Dropped,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwarmState {
    pub step: u32,
    pub drones: Vec<DroneState>,
    pub graph: RadioGraph,
    pub config: WorldConfig,
    pub rng: RngStreams,
    waypoints: Vec<Position>,
    /// Remaining pause steps per drone.
    paused: Vec<u32>,
}

impl SwarmState {
    /// Fresh swarm with uniform random positions drawn from the motion stream.
    pub fn new(config: WorldConfig, seed: u64) -> Self {
        let mut rng = RngStreams::new(seed);
        let n = config.drone_count;
        let positions: Vec<Position> = (0..n)
            .map(|_| random_point(&mut rng.motion, config.arena_size))
            .collect();
        let waypoints = (0..n).map(|_| waypoint(&mut rng.motion, &config)).collect();
        let mut state = Self::with_positions(config, seed, &positions);
        state.rng = rng;
        state.waypoints = waypoints;
        state
    }

    /// Swarm at explicit positions; waypoints equal the positions.
    pub fn with_positions(config: WorldConfig, seed: u64, positions: &[Position]) -> Self {
        let n = positions.len();
        let config = WorldConfig { drone_count: n, ..config };
        let drones = positions
            .iter()
            .enumerate()
            .map(|(uid, &p)| DroneState::new(uid, p, n))
            .collect();
        Self {
            step: 0,
            drones,
            graph: RadioGraph::from_positions(positions, config.radio_radius),
            config,
            rng: RngStreams::new(seed),
            waypoints: positions.to_vec(),
            paused: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.drones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.drones.is_empty()
    }

    pub fn positions(&self) -> Vec<Position> {
        self.drones.iter().map(|d| d.position).collect()
    }

    /// Moves drones to explicit positions and rebuilds the radio graph.
    pub fn set_positions(&mut self, positions: &[Position]) {
        assert_eq!(positions.len(), self.drones.len());
        for (d, &p) in self.drones.iter_mut().zip(positions) {
            d.position = p;
        }
        self.waypoints = positions.to_vec();
        self.rebuild_graph();
    }

    pub fn rebuild_graph(&mut self) {
        self.graph = RadioGraph::from_positions(&self.positions(), self.config.radio_radius);
    }

    pub fn shortest_route(&self, src: Uid, dst: Uid) -> Option<Route> {
        self.graph.shortest_route(src, dst)
    }

    /// True if any drone on the route drops traffic from `sender`.
    pub fn route_blocks(&self, route: &Route, sender: Uid) -> bool {
        route
            .hops
            .iter()
            .any(|&h| self.drones[h].block_list.contains(sender))
    }

    /// Charges `units` to every drone on the route, or nothing at all if any
    /// of them would exceed the bandwidth cap.
    pub fn consume_bandwidth(&mut self, route: &Route, units: u32) -> BandwidthResult {
        assert!(units >= 1, "bandwidth charge must be positive");
        let cap = self.config.max_bandwidth;
        let affordable = route
            .hops
            .iter()
            .all(|&h| self.drones[h].bandwidth_used + units <= cap);
        if !affordable {
            return BandwidthResult::Dropped;
        }
        for &h in &route.hops {
            self.drones[h].bandwidth_used += units;
        }
        BandwidthResult::Ok
    }

    pub fn total_bandwidth_used(&self) -> u64 {
        self.drones.iter().map(|d| d.bandwidth_used as u64).sum()
    }

    /// Per-step bookkeeping reset: bandwidth and event counters start at zero.
    pub fn begin_step(&mut self) {
        for d in &mut self.drones {
            d.bandwidth_used = 0;
            d.network_events.iter_mut().for_each(|c| *c = 0);
        }
    }

    pub fn red_high_count(&self) -> usize {
        self.drones.iter().filter(|d| d.is_red_high()).count()
    }

    pub fn fully_compromised(&self) -> bool {
        self.red_high_count() == self.drones.len()
    }
}

fn random_point<R: Rng>(rng: &mut R, size: f64) -> Position {
    Position::new(rng.random_range(0.0..=size), rng.random_range(0.0..=size))
}

fn waypoint<R: Rng>(rng: &mut R, config: &WorldConfig) -> Position {
    let (lo, hi) = (config.waypoint_margin, config.arena_size - config.waypoint_margin);
    Position::new(rng.random_range(lo..=hi), rng.random_range(lo..=hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> SwarmState {
        let pos: Vec<_> = (0..n).map(|i| Position::new(20.0 * i as f64, 0.0)).collect();
        SwarmState::with_positions(WorldConfig::default(), 0, &pos)
    }

    #[test]
    fn uid_set_iterates_ascending() {
        let s: UidSet = [9, 2, 17, 0].into_iter().collect();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2, 9, 17]);
        assert_eq!(s.nth(2), Some(9));
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn unit_send_charges_each_hop() {
        let mut s = line(4);
        let r = s.shortest_route(0, 3).unwrap();
        assert_eq!(r.hop_count(), 3);
        assert_eq!(s.consume_bandwidth(&r, 1), BandwidthResult::Ok);
        assert!(s.drones.iter().all(|d| d.bandwidth_used == 1));
    }

    #[test]
    fn saturated_hop_drops_without_mutation() {
        let mut s = line(3);
        s.drones[1].bandwidth_used = 100;
        let r = s.shortest_route(0, 2).unwrap();
        let before = s.clone();
        assert_eq!(s.consume_bandwidth(&r, 1), BandwidthResult::Dropped);
        assert_eq!(s, before);
    }

    #[test]
    fn hundred_sends_fit_then_drop() {
        let mut s = line(2);
        let r = s.shortest_route(0, 1).unwrap();
        let mut ok = 0;
        for _ in 0..100 {
            if s.consume_bandwidth(&r, 1) == BandwidthResult::Ok {
                ok += 1;
            }
        }
        assert_eq!(ok, 100);
        let total = s.total_bandwidth_used();
        assert_eq!(s.consume_bandwidth(&r, 1), BandwidthResult::Dropped);
        assert_eq!(s.total_bandwidth_used(), total);
    }

    #[test]
    fn event_counts_saturate() {
        let mut s = line(2);
        for _ in 0..5 {
            s.drones[0].flag_event(1);
        }
        assert_eq!(s.drones[0].network_events[1], MAX_EVENT_COUNT);
    }

    #[test]
    fn begin_step_resets_bandwidth() {
        let mut s = line(2);
        s.drones[0].bandwidth_used = 40;
        s.drones[1].flag_event(0);
        s.begin_step();
        assert_eq!(s.total_bandwidth_used(), 0);
        assert_eq!(s.drones[1].network_events[0], 0);
    }
}
