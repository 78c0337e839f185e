use dronesim::blueteam::ActionKind;
use dronesim::env::{parse_team, EpisodeConfig};
use dronesim::redteam::RedConfig;
use dronesim_harness::{emit_histogram, emit_report, evaluate, EvaluationReport, OutputFormat, PolicySet};

fn small_report() -> EvaluationReport {
    let cfg = EpisodeConfig { seed: 11, ..EpisodeConfig::with_team(parse_team("cw:9,remove").unwrap()) };
    evaluate(&cfg, 12, PolicySet::default()).unwrap()
}

fn render(report: &EvaluationReport, format: OutputFormat) -> String {
    let mut buf = Vec::new();
    emit_report(report, format, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn json_round_trips() {
    let r = small_report();
    let back: EvaluationReport = serde_json::from_str(&render(&r, OutputFormat::Json)).unwrap();
    assert_eq!(back, r);
}

#[test]
fn csv_has_one_row_per_episode() {
    let r = small_report();
    let csv = render(&r, OutputFormat::Csv);
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["episode", "seed", "score", "steps", "compromised", "fingerprint"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 12);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0].parse::<usize>().unwrap(), i);
        assert_eq!(row[2].parse::<f64>().unwrap(), r.records[i].score);
        assert_eq!(&row[5], r.fingerprint);
    }
}

#[test]
fn repeated_evaluations_render_identically() {
    for format in [OutputFormat::Csv, OutputFormat::Json, OutputFormat::Table] {
        assert_eq!(render(&small_report(), format), render(&small_report(), format));
    }
}

#[test]
fn scores_respect_floor_and_mean_matches_records() {
    let r = small_report();
    assert!(r.violations.is_empty(), "{:?}", r.violations);
    let mean = r.scores().iter().sum::<f64>() / 12.0;
    assert!((mean - r.mean).abs() < 1e-9);
    assert!(r.scores().iter().all(|s| (-9000.0..=0.0).contains(s)));
}

#[test]
fn remove_team_only_removes() {
    let cfg = EpisodeConfig { seed: 4, ..EpisodeConfig::with_team(parse_team("remove").unwrap()) };
    let r = evaluate(&cfg, 20, PolicySet::default()).unwrap();
    assert!(r.sampled_actions() > 0);
    assert_eq!(r.histogram.keys().collect::<Vec<_>>(), [&ActionKind::RemoveOtherSessions]);
    let mut buf = Vec::new();
    emit_histogram(&r, OutputFormat::Csv, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("action,count,fraction,fingerprint\n"));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), ActionKind::ALL.len());
    assert!(rows[0].starts_with("RemoveOtherSessions,") && rows[0].contains(",1,"));
    assert!(rows[1..].iter().all(|r| r.contains(",0,0,")));
}

#[test]
fn quiet_swarm_without_malware_never_compromises() {
    let mut cfg = EpisodeConfig { seed: 2, ..EpisodeConfig::default() };
    cfg.red = RedConfig::disabled();
    let r = evaluate(&cfg, 10, PolicySet::default()).unwrap();
    assert!(r.records.iter().all(|e| !e.compromised && e.steps == 500));
    assert!(r.mean <= 0.0);
}
