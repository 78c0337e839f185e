//! Random-waypoint swarm motion with pauses.

use super::{waypoint, SwarmState, WorldConfig};

impl SwarmState {
    /// Advances every drone toward its waypoint and rebuilds the radio
    /// graph. A drone that reaches its waypoint holds there for
    /// `pause_steps` steps, then heads for a fresh waypoint drawn from the
    /// motion stream.
    pub fn step_motion(&mut self) {
        let config = self.config;
        let WorldConfig { speed, arena_size, .. } = config;
        let rng = &mut self.rng.motion;
        let drones = self.drones.iter_mut().zip(self.waypoints.iter_mut()).zip(self.paused.iter_mut());
        for ((drone, target), paused) in drones {
            if *paused > 0 {
                *paused -= 1;
                continue;
            }
            let p = drone.position;
            let remaining = p.distance(target);
            if remaining <= speed {
                drone.position = *target;
                *target = waypoint(rng, &config);
                *paused = config.pause_steps;
            } else {
                let f = speed / remaining;
                drone.position.x = (p.x + (target.x - p.x) * f).clamp(0.0, arena_size);
                drone.position.y = (p.y + (target.y - p.y) * f).clamp(0.0, arena_size);
            }
        }
        self.rebuild_graph();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Position;

    #[test]
    fn zero_speed_keeps_positions() {
        let config = WorldConfig { speed: 0.0, ..WorldConfig::default() };
        let mut s = SwarmState::new(config, 11);
        let before = s.positions();
        let graph = s.graph.clone();
        for _ in 0..20 {
            s.step_motion();
        }
        assert_eq!(s.positions(), before);
        assert_eq!(s.graph, graph);
    }

    #[test]
    fn positions_stay_in_arena() {
        let mut s = SwarmState::new(WorldConfig::default(), 5);
        for _ in 0..500 {
            s.step_motion();
            for d in &s.drones {
                assert!((0.0..=100.0).contains(&d.position.x));
                assert!((0.0..=100.0).contains(&d.position.y));
            }
        }
    }

    #[test]
    fn moving_drone_covers_speed() {
        let config = WorldConfig::default();
        let mut s = SwarmState::new(config, 9);
        let before: Vec<Position> = s.positions();
        s.step_motion();
        for (a, b) in before.iter().zip(s.positions()) {
            assert!(a.distance(&b) <= config.speed + 1e-9);
        }
    }

    #[test]
    fn drones_hold_position_for_the_pause() {
        let config = WorldConfig { pause_steps: 5, ..WorldConfig::default() };
        let start = [Position::new(50.0, 50.0)];
        let mut s = SwarmState::with_positions(config, 3, &start);
        // starts on its waypoint, so it arrives immediately and pauses
        for _ in 0..6 {
            s.step_motion();
            assert_eq!(s.positions(), start);
        }
        s.step_motion();
        assert_ne!(s.positions(), start);
    }

    #[test]
    fn waypoints_respect_margin() {
        let config = WorldConfig { pause_steps: 0, waypoint_margin: 30.0, ..WorldConfig::default() };
        let mut s = SwarmState::new(config, 8);
        for _ in 0..2000 {
            s.step_motion();
        }
        for d in &s.drones {
            assert!((28.0..=72.0).contains(&d.position.x), "{:?}", d.position);
            assert!((28.0..=72.0).contains(&d.position.y), "{:?}", d.position);
        }
    }
}
