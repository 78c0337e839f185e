//! Episode configuration and team composition.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ObservationMode;
use crate::blueteam::{BlueConfig, CwConfig, ScriptedKind};
use crate::error::{Result, SimError};
use crate::redteam::RedConfig;
use crate::world::{WorldConfig, DRONE_COUNT};

pub const MAX_HORIZON: u32 = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardMode {
    /// Every failed message scores -1.
    Noisy,
    /// Unroutable messages are not penalised.
    Denoised,
}

/// Who controls a team slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SlotKind {
    Cw,
    Scripted(ScriptedKind),
    /// Actions are supplied by the caller of `Env::step`.
    External,
}

impl fmt::Display for SlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotKind::Cw => f.write_str("cw"),
            SlotKind::Scripted(k) => write!(f, "{k}"),
            SlotKind::External => f.write_str("external"),
        }
    }
}

impl FromStr for SlotKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cw" | "canary" => Ok(SlotKind::Cw),
            "external" | "ext" => Ok(SlotKind::External),
            other => other.parse().map(SlotKind::Scripted),
        }
    }
}

impl TryFrom<String> for SlotKind {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SlotKind> for String {
    fn from(k: SlotKind) -> Self {
        k.to_string()
    }
}

/// Parses a composition such as `cw:7,external:11`. An entry without a
/// count fills every remaining slot and must come last.
pub fn parse_team(text: &str) -> Result<Vec<SlotKind>> {
    let mut slots = Vec::with_capacity(DRONE_COUNT);
    let entries: Vec<&str> = text.split(',').map(str::trim).filter(|e| !e.is_empty()).collect();
    if entries.is_empty() {
        return Err(SimError::MalformedTeam("empty composition".into()));
    }
    for (i, entry) in entries.iter().enumerate() {
        let (kind, count) = match entry.split_once(':') {
            Some((k, c)) => {
                let c: usize = c
                    .trim()
                    .parse()
                    .map_err(|_| SimError::MalformedTeam(format!("bad count in `{entry}`")))?;
                (k, c)
            }
            None if i + 1 == entries.len() => (*entry, DRONE_COUNT.saturating_sub(slots.len())),
            None => {
                return Err(SimError::MalformedTeam(format!(
                    "`{entry}` has no count but is not the last entry"
                )))
            }
        };
        let kind: SlotKind = kind.parse().map_err(SimError::MalformedTeam)?;
        slots.extend(std::iter::repeat_n(kind, count));
    }
    if slots.len() != DRONE_COUNT {
        return Err(SimError::MalformedTeam(format!(
            "composition covers {} slots, expected {DRONE_COUNT}",
            slots.len()
        )));
    }
    Ok(slots)
}

pub fn format_team(slots: &[SlotKind]) -> String {
    let mut parts: Vec<(SlotKind, usize)> = Vec::new();
    for &s in slots {
        match parts.last_mut() {
            Some((k, n)) if *k == s => *n += 1,
            _ => parts.push((s, 1)),
        }
    }
    parts
        .iter()
        .map(|(k, n)| format!("{k}:{n}"))
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpisodeConfig {
    pub seed: u64,
    pub horizon: u32,
    pub observation_mode: ObservationMode,
    pub include_messages: bool,
    pub reward_mode: RewardMode,
    pub team_slots: Vec<SlotKind>,
    /// Assign slots to drones by a seeded random permutation each episode.
    pub randomize_hosting: bool,
    pub world: WorldConfig,
    pub red: RedConfig,
    pub blue: BlueConfig,
    pub cw: CwConfig,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            horizon: MAX_HORIZON,
            observation_mode: ObservationMode::Standard,
            include_messages: false,
            reward_mode: RewardMode::Noisy,
            team_slots: vec![SlotKind::Cw; DRONE_COUNT],
            randomize_hosting: false,
            world: WorldConfig::default(),
            red: RedConfig::default(),
            blue: BlueConfig::default(),
            cw: CwConfig::default(),
        }
    }
}

impl EpisodeConfig {
    pub fn with_team(team: Vec<SlotKind>) -> Self {
        Self { team_slots: team, ..Self::default() }
    }

    pub fn uniform(kind: SlotKind) -> Self {
        Self::with_team(vec![kind; DRONE_COUNT])
    }

    pub fn validate(&self) -> Result<()> {
        if self.team_slots.len() != DRONE_COUNT {
            return Err(SimError::MalformedTeam(format!(
                "{} team slots, expected {DRONE_COUNT}",
                self.team_slots.len()
            )));
        }
        if self.world.drone_count != DRONE_COUNT {
            return Err(SimError::InvalidConfig(format!(
                "drone_count must be {DRONE_COUNT} for the blue action space"
            )));
        }
        if self.horizon == 0 || self.horizon > MAX_HORIZON {
            return Err(SimError::InvalidConfig(format!(
                "horizon {} outside 1..={MAX_HORIZON}",
                self.horizon
            )));
        }
        let probs = [
            self.red.activation_probability,
            self.red.exploit_success_probability,
            self.red.exploit_flag_probability,
            self.red.switch_probability,
            self.blue.remove_success_probability,
            self.blue.retake_success_probability,
            self.blue.retake_false_flag_probability,
        ];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(SimError::InvalidConfig("probabilities must lie in [0, 1]".into()));
        }
        let margin = self.world.waypoint_margin;
        if !(0.0..self.world.arena_size / 2.0).contains(&margin) {
            return Err(SimError::InvalidConfig("waypoint_margin must lie in [0, arena_size / 2)".into()));
        }
        if self.world.speed < 0.0 || !self.world.speed.is_finite() {
            return Err(SimError::InvalidConfig("speed must be a finite non-negative number".into()));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_team() {
        let t = parse_team("cw:7,external:11").unwrap();
        assert_eq!(t.iter().filter(|&&k| k == SlotKind::Cw).count(), 7);
        assert_eq!(t[7], SlotKind::External);
        assert_eq!(format_team(&t), "cw:7,external:11");
    }

    #[test]
    fn trailing_kind_fills_team() {
        let t = parse_team("sleep").unwrap();
        assert_eq!(t, vec![SlotKind::Scripted(ScriptedKind::Sleep); 18]);
        let t = parse_team("remove:3,cw").unwrap();
        assert_eq!(t.len(), 18);
    }

    #[test]
    fn rejects_wrong_totals_and_kinds() {
        assert!(parse_team("cw:5").is_err());
        assert!(parse_team("cw:20").is_err());
        assert!(parse_team("pirate:18").is_err());
        assert!(parse_team("cw,sleep:3").is_err());
        assert!(parse_team("").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = EpisodeConfig::with_team(parse_team("cw:10,advanced-block:8").unwrap());
        cfg.reward_mode = RewardMode::Denoised;
        cfg.observation_mode = ObservationMode::Improved;
        let text = cfg.to_toml().unwrap();
        assert!(text.contains("advanced-block"));
        assert_eq!(EpisodeConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_toml_uses_defaults() {
        let cfg = EpisodeConfig::from_toml("seed = 9\n[red]\nactivation_probability = 0.0\n").unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.red.activation_probability, 0.0);
        assert_eq!(cfg.red.switch_probability, 0.10);
        assert_eq!(cfg.horizon, 500);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = EpisodeConfig::default();
        cfg.team_slots.pop();
        assert!(matches!(cfg.validate(), Err(SimError::MalformedTeam(_))));
        let cfg = EpisodeConfig { horizon: 501, ..EpisodeConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
