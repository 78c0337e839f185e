use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use dronesim::env::{parse_team, EpisodeConfig, ObservationMode, RewardMode, SlotKind};
use dronesim::redteam::RedConfig;
use dronesim_harness::{
    emit_histogram, emit_report, emit_sweep, evaluate, substitution_sweep, HarnessError, OutputFormat,
    PolicySet, StandIn,
};

#[derive(Parser)]
#[command(name = "dronesim", version, about = "Seeded batch evaluation of drone-swarm defenders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one team and report per-episode scores.
    Eval(Common),
    /// Replace 0..18 CW slots with a substitute and report each mix.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Kind placed in substituted slots (e.g. `sleep`, `external`).
        #[arg(long, default_value = "external")]
        substitute: SlotKind,
        /// Substitution counts to evaluate.
        #[arg(long, value_delimiter = ',', default_value = "0,3,6,9,12,15,18")]
        ks: Vec<usize>,
    },
    /// Action histogram of one randomly sampled agent per episode.
    Hist(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draw the master seed from the OS instead of `--seed`.
    #[arg(long)]
    entropy: bool,
    #[arg(long, default_value_t = 1000)]
    episodes: usize,
    /// TOML episode config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_obs_mode)]
    obs_mode: Option<ObservationMode>,
    #[arg(long, value_parser = parse_reward_mode)]
    reward_mode: Option<RewardMode>,
    /// Team composition such as `cw:7,external:11` or `sleep`.
    #[arg(long)]
    team: Option<String>,
    /// Policy driving external slots: `random` or a scripted agent name.
    #[arg(long, default_value = "random")]
    stand_in: StandIn,
    /// Disable malware entirely.
    #[arg(long)]
    no_malware: bool,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_obs_mode(s: &str) -> Result<ObservationMode, String> {
    match s {
        "standard" => Ok(ObservationMode::Standard),
        "improved" => Ok(ObservationMode::Improved),
        _ => Err(format!("unknown observation mode `{s}` (standard, improved)")),
    }
}

fn parse_reward_mode(s: &str) -> Result<RewardMode, String> {
    match s {
        "noisy" => Ok(RewardMode::Noisy),
        "denoised" => Ok(RewardMode::Denoised),
        _ => Err(format!("unknown reward mode `{s}` (noisy, denoised)")),
    }
}

impl Common {
    fn episode_config(&self) -> Result<EpisodeConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => EpisodeConfig::from_toml(&std::fs::read_to_string(path)?)?,
            None => EpisodeConfig::default(),
        };
        cfg.seed = if self.entropy { rand::rng().random() } else { self.seed };
        if let Some(m) = self.obs_mode {
            cfg.observation_mode = m;
        }
        if let Some(m) = self.reward_mode {
            cfg.reward_mode = m;
        }
        if let Some(t) = &self.team {
            cfg.team_slots = parse_team(t)?;
        }
        if self.no_malware {
            cfg.red = RedConfig::disabled();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn output(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn policies(&self) -> PolicySet {
        PolicySet { external: self.stand_in }
    }
}

fn run(cli: Cli) -> Result<Vec<String>, HarnessError> {
    match cli.command {
        Command::Eval(c) => {
            let report = evaluate(&c.episode_config()?, c.episodes, c.policies())?;
            emit_report(&report, c.format, c.output()?)?;
            Ok(report.violations)
        }
        Command::Hist(c) => {
            let report = evaluate(&c.episode_config()?, c.episodes, c.policies())?;
            emit_histogram(&report, c.format, c.output()?)?;
            Ok(report.violations)
        }
        Command::Sweep { common: c, substitute, ks } => {
            let reports = substitution_sweep(&c.episode_config()?, substitute, &ks, c.episodes, c.policies())?;
            emit_sweep(&reports, c.format, c.output()?)?;
            Ok(reports.into_iter().flat_map(|(_, r)| r.violations).collect())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(violations) if violations.is_empty() => ExitCode::SUCCESS,
        Ok(violations) => {
            for v in violations.iter().take(20) {
                eprintln!("invariant violation: {v}");
            }
            eprintln!("{} invariant violation(s)", violations.len());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
