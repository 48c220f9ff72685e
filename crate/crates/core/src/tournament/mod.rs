//! Deathmatch tournaments: who plays which match, running matches through
//! the lockstep host, and the result tables.

mod stats;

use std::path::PathBuf;

use thiserror::Error;

pub use stats::*;

use crate::bots::BotSpec;
use crate::net::{Host, HostOptions, HostOutcome, NetError, DEFAULT_DURATION};
use crate::scenario::ScenarioConfig;
use crate::sim::{Counters, MAX_PLAYERS};

#[derive(Debug, Error)]
pub enum TournamentError {
    #[error("need ≥ 2 participants, got {0}")]
    TooFewParticipants(usize),
    #[error("match capacity must be 2..=16, got {0}")]
    Capacity(usize),
    #[error("infeasible schedule: {players} players minus {excluded} excluded exceeds capacity {capacity}")]
    Infeasible { players: usize, excluded: usize, capacity: usize },
    #[error("at least one map is required")]
    NoMaps,
    #[error("match {index}: {source}")]
    Match { index: usize, source: NetError },
    #[error("writing results: {0}")]
    Io(#[from] std::io::Error),
}

/// Decides the participants of each match.
///
/// With more players than seats, match `i < n_players` sits out player `i`
/// and every later match sits out the `worst_exclude` lowest ranked so far
/// (fewest cumulative frags, then more deaths, then higher id).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub n_players: usize,
    pub capacity: usize,
    pub n_matches: usize,
    pub worst_exclude: usize,
}

impl Schedule {
    pub fn new(n_players: usize, capacity: usize, n_matches: usize, worst_exclude: usize) -> Result<Schedule, TournamentError> {
        if n_players < 2 {
            return Err(TournamentError::TooFewParticipants(n_players));
        }
        if !(2..=MAX_PLAYERS).contains(&capacity) {
            return Err(TournamentError::Capacity(capacity));
        }
        let s = Schedule { n_players, capacity, n_matches, worst_exclude };
        if s.overfull() {
            let rotating = n_matches.min(n_players) > 0;
            let late = n_matches > n_players;
            let infeasible = |excluded: usize| n_players - excluded.min(n_players) > capacity || n_players < excluded + 2;
            if (rotating && infeasible(1)) || (late && infeasible(worst_exclude)) {
                let excluded = if rotating && infeasible(1) { 1 } else { worst_exclude };
                return Err(TournamentError::Infeasible { players: n_players, excluded, capacity });
            }
        }
        Ok(s)
    }

    fn overfull(&self) -> bool {
        self.n_players > self.capacity
    }

    /// Participants of match `index` (0-based), given each player's totals
    /// over the matches already played.
    pub fn participants(&self, index: usize, totals: &[Counters]) -> Vec<usize> {
        let all = 0..self.n_players;
        if !self.overfull() {
            return all.collect();
        }
        if index < self.n_players {
            return all.filter(|&p| p != index).collect();
        }
        let worst = worst(totals, self.n_players, self.worst_exclude);
        all.filter(|p| !worst.contains(p)).collect()
    }
}

/// The `k` lowest-ranked players, worst first.
pub fn worst(totals: &[Counters], n_players: usize, k: usize) -> Vec<usize> {
    let zero = Counters::default();
    let get = |p: usize| totals.get(p).unwrap_or(&zero);
    let mut order: Vec<usize> = (0..n_players).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (get(a), get(b));
        ca.frags().cmp(&cb.frags()).then(cb.deaths.cmp(&ca.deaths)).then(b.cmp(&a))
    });
    order.truncate(k);
    order
}

/// Plays one all-bot match through the lockstep host. `duration` defaults
/// to ten minutes.
pub fn run_match(participants: &[BotSpec], config: &ScenarioConfig, duration: Option<u32>) -> Result<HostOutcome, NetError> {
    if participants.len() < 2 || participants.len() > MAX_PLAYERS {
        return Err(NetError::Options(format!("2..=16 participants required, got {}", participants.len())));
    }
    let mut cfg = config.clone();
    cfg.players = participants.len();
    let opts = HostOptions {
        bots: participants.to_vec(),
        duration: Some(duration.unwrap_or(DEFAULT_DURATION)),
        ..HostOptions::new(cfg)
    };
    Host::bind(opts)?.run()
}

#[derive(Clone, Debug)]
pub struct TournamentOptions {
    /// Maps in rotation; match `i` plays `maps[i % maps.len()]`.
    pub maps: Vec<ScenarioConfig>,
    pub bots: Vec<BotSpec>,
    /// Display names; defaults to kind plus index.
    pub names: Vec<String>,
    pub matches: usize,
    pub capacity: usize,
    pub worst_exclude: usize,
    pub duration: Option<u32>,
    /// Directory for replays and tables, created if missing.
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct TournamentResult {
    pub names: Vec<String>,
    pub matches: Vec<MatchRecord>,
    pub tables: Tables,
}

/// Plays every scheduled match and builds the tables. Match `i` uses the
/// map's seed plus `i`; a bot without an explicit seed gets its
/// participant index.
pub fn run_tournament(opts: &TournamentOptions) -> Result<TournamentResult, TournamentError> {
    if opts.maps.is_empty() {
        return Err(TournamentError::NoMaps);
    }
    let schedule = Schedule::new(opts.bots.len(), opts.capacity, opts.matches, opts.worst_exclude)?;
    let names: Vec<String> = (0..opts.bots.len())
        .map(|i| opts.names.get(i).cloned().unwrap_or_else(|| format!("{}{}", opts.bots[i].kind, i + 1)))
        .collect();
    if let Some(dir) = &opts.out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut totals = vec![Counters::default(); names.len()];
    let mut records = Vec::new();
    for index in 0..opts.matches {
        let who = schedule.participants(index, &totals);
        let map = &opts.maps[index % opts.maps.len()];
        let mut cfg = map.clone();
        cfg.seed = map.seed.wrapping_add(index as u64);
        let specs: Vec<BotSpec> = who
            .iter()
            .map(|&p| BotSpec { kind: opts.bots[p].kind, seed: Some(opts.bots[p].seed.unwrap_or(p as u64)) })
            .collect();
        log::info!("match {}/{} on {}: {:?}", index + 1, opts.matches, cfg.map_name, who);
        let outcome = run_match(&specs, &cfg, opts.duration).map_err(|source| TournamentError::Match { index, source })?;
        for (&p, s) in who.iter().zip(&outcome.stats.players) {
            totals[p].accumulate(&s.counters);
        }
        let record = MatchRecord { map: cfg.map_name.clone(), participants: who, stats: outcome.stats };
        if let Some(dir) = &opts.out_dir {
            std::fs::write(dir.join(format!("match_{:02}.vzr", index + 1)), &outcome.replay)?;
        }
        records.push(record);
    }
    let tables = emit_tables(&names, &records);
    if let Some(dir) = &opts.out_dir {
        for (i, csv) in tables.per_match_csv.iter().enumerate() {
            std::fs::write(dir.join(format!("match_{:02}.csv", i + 1)), csv)?;
        }
        std::fs::write(dir.join("summary.csv"), &tables.summary_csv)?;
        std::fs::write(dir.join("summary.md"), &tables.summary_md)?;
    }
    Ok(TournamentResult { names, matches: records, tables })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_capacity() {
        let s = Schedule::new(8, 8, 10, 2).unwrap();
        for i in 0..10 {
            assert_eq!(s.participants(i, &[]), (0..8).collect::<Vec<_>>());
        }
    }

    #[test]
    fn infeasible_exclusion() {
        assert!(matches!(Schedule::new(9, 8, 12, 0), Err(TournamentError::Infeasible { .. })));
        assert!(matches!(Schedule::new(1, 8, 1, 0), Err(TournamentError::TooFewParticipants(1))));
        assert!(matches!(Schedule::new(12, 8, 3, 2), Err(TournamentError::Infeasible { excluded: 1, .. })));
    }

    #[test]
    fn worst_breaks_ties() {
        let c = |kills, deaths| Counters { kills, deaths, ..Default::default() };
        let totals = [c(5, 1), c(2, 3), c(2, 4), c(9, 0)];
        assert_eq!(worst(&totals, 4, 2), vec![2, 1]);
        let tied = [c(1, 1), c(1, 1), c(1, 1)];
        assert_eq!(worst(&tied, 3, 1), vec![2]);
    }
}
