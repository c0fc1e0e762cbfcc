//! Comma-separated metrics files with header rows.
//!
//! Formats:
//! - reward log: `episode,reward`, one record per training episode,
//!   appended and flushed as episodes finish;
//! - evaluation table: `axis,multiplier,policy,trials,delay_ratio,qos_ratio`,
//!   one record per (sweep point, policy);
//! - evaluation report record: `vehicles,objective,delay_ratio,qos_ratio`,
//!   the flat aggregate form of one decision scoring.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::agent::EpisodeRecord;
use crate::network::EvaluationReport;

pub const REWARD_LOG_HEADER: &str = "episode,reward";
pub const EVALUATION_TABLE_HEADER: &str = "axis,multiplier,policy,trials,delay_ratio,qos_ratio";
pub const REPORT_RECORD_HEADER: &str = "vehicles,objective,delay_ratio,qos_ratio";

/// Append-only per-episode reward log; every record is flushed on write, so
/// the file holds complete records at any point during a run.
pub struct RewardLog {
    writer: BufWriter<File>,
}

impl RewardLog {
    pub fn create<P: AsRef<Path>>(path: P) -> io::Result<Self> {
        let mut writer = BufWriter::new(File::create(path)?);
        writeln!(writer, "{REWARD_LOG_HEADER}")?;
        writer.flush()?;
        Ok(Self { writer })
    }

    pub fn append(&mut self, record: &EpisodeRecord) -> io::Result<()> {
        writeln!(self.writer, "{},{}", record.episode, record.reward)?;
        self.writer.flush()
    }
}

/// Parses a reward log written by [`RewardLog`].
pub fn read_reward_log(text: &str) -> Result<Vec<EpisodeRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == REWARD_LOG_HEADER => {}
        other => return Err(format!("bad reward log header: {other:?}")),
    }
    lines
        .enumerate()
        .map(|(idx, line)| {
            let (ep, reward) = line
                .split_once(',')
                .ok_or_else(|| format!("reward log line {}: '{line}'", idx + 2))?;
            Ok(EpisodeRecord {
                episode: ep
                    .parse()
                    .map_err(|_| format!("reward log line {}: bad episode", idx + 2))?,
                reward: reward
                    .parse()
                    .map_err(|_| format!("reward log line {}: bad reward", idx + 2))?,
            })
        })
        .collect()
}

/// Flat record form of an [`EvaluationReport`] for the metrics log.
pub fn report_record(report: &EvaluationReport) -> String {
    format!(
        "{},{},{},{}",
        report.vehicles.len(),
        report.objective,
        report.delay_ratio,
        report.qos_ratio
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{evaluate, RadioParams, ServerCapacities};
    use crate::env::decode_action;
    use crate::scenario::{ScenarioConfig, WorldState};

    #[test]
    fn reward_log_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rewards.csv");
        let records = vec![
            EpisodeRecord { episode: 1, reward: 12.5 },
            EpisodeRecord { episode: 2, reward: -0.03125 },
        ];
        let mut log = RewardLog::create(&path).unwrap();
        for r in &records {
            log.append(r).unwrap();
        }
        drop(log);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(read_reward_log(&text).unwrap(), records);
    }

    #[test]
    fn report_record_is_flat_and_headed() {
        let world = WorldState::init(&ScenarioConfig::default()).unwrap();
        let decision = decode_action(&vec![0.0; 16], &world).unwrap();
        let report = evaluate(
            &world,
            &decision,
            &ServerCapacities::default(),
            &RadioParams::default(),
        )
        .unwrap();
        let record = report_record(&report);
        assert_eq!(record.split(',').count(), REPORT_RECORD_HEADER.split(',').count());
        assert!(record.starts_with("4,"));
    }
}
