//! Action-log recording and deterministic playback.
//!
//! A `.vzr` file holds the seed, the scenario and every tic's commands, so
//! playback re-simulates the match. Layout, little-endian:
//!
//! ```text
//! "VZR1" | version u16 | seed u64 | players u8
//! cfg_len u32 | config text | map_len u32 | map text
//! per tic: players × (buttons u32, turn_delta i16)
//!          after every 35th tic: state hash u64
//! footer:  final tic u32 | players × counters (56 bytes) | final hash u64 | "VZRE"
//! ```

use std::io::{self, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::render::{render_frame, update_discovery, FrameBundle, RenderOptions};
use crate::scenario::{reward_for, ConfigError, ScenarioConfig};
use crate::sim::{
    counters_bytes, counters_from_bytes, state_hash, step, Buttons, Counters, Event, SimError, TicCmd, WorldState,
};
use crate::tournament::MatchStats;

pub const MAGIC: &[u8; 4] = b"VZR1";
pub const FOOTER_MAGIC: &[u8; 4] = b"VZRE";
pub const VERSION: u16 = 1;
/// Tics between checkpoint hashes.
pub const CHECKPOINT_TICS: u32 = 35;
const RECORD_LEN: usize = 6;
const COUNTERS_LEN: usize = 56;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("not a replay file")]
    BadMagic,
    #[error("unsupported replay version {0}")]
    Version(u16),
    #[error("replay header is truncated")]
    TruncatedHeader,
    #[error("replay body is malformed")]
    Corrupt,
    #[error("embedded scenario: {0}")]
    Config(#[from] ConfigError),
    #[error("simulation: {0}")]
    Sim(#[from] SimError),
    #[error("checkpoint mismatch at tic {tic}: corrupt file or incompatible build")]
    Checkpoint { tic: u32 },
    #[error("final state mismatch at tic {tic}")]
    Footer { tic: u32 },
    #[error("partial replay: file ends after tic {last_tic}")]
    Partial { last_tic: u32 },
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

/// Streams a replay as a match is played.
pub struct ReplayWriter<W: Write> {
    out: W,
    players: usize,
    tics: u32,
}

impl<W: Write> ReplayWriter<W> {
    pub fn new(mut out: W, seed: u64, players: usize, config_text: &str, map_text: &str) -> io::Result<ReplayWriter<W>> {
        let mut h = Vec::new();
        h.extend_from_slice(MAGIC);
        h.extend_from_slice(&VERSION.to_le_bytes());
        h.extend_from_slice(&seed.to_le_bytes());
        h.push(players as u8);
        h.extend_from_slice(&(config_text.len() as u32).to_le_bytes());
        h.extend_from_slice(config_text.as_bytes());
        h.extend_from_slice(&(map_text.len() as u32).to_le_bytes());
        h.extend_from_slice(map_text.as_bytes());
        out.write_all(&h)?;
        Ok(ReplayWriter { out, players, tics: 0 })
    }

    /// Header for a scenario, with the config stored beside its map.
    pub fn for_config(out: W, config: &ScenarioConfig) -> io::Result<ReplayWriter<W>> {
        let (cfg, map) = config.to_parts();
        ReplayWriter::new(out, config.seed, config.players, &cfg, &map)
    }

    /// Appends the commands that produced `after`.
    pub fn record(&mut self, cmds: &[TicCmd], after: &WorldState) -> io::Result<()> {
        debug_assert_eq!(cmds.len(), self.players);
        let mut b = Vec::with_capacity(cmds.len() * RECORD_LEN + 8);
        for c in cmds {
            b.extend_from_slice(&c.buttons.0.to_le_bytes());
            b.extend_from_slice(&c.turn_delta.to_le_bytes());
        }
        self.tics += 1;
        if self.tics % CHECKPOINT_TICS == 0 {
            b.extend_from_slice(&state_hash(after).to_le_bytes());
        }
        self.out.write_all(&b)
    }

    pub fn tics(&self) -> u32 {
        self.tics
    }

    pub fn get_ref(&self) -> &W {
        &self.out
    }

    /// Writes the footer and returns the sink.
    pub fn finish(mut self, world: &WorldState) -> io::Result<W> {
        self.out.write_all(&footer_bytes(world))?;
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Footer closing a replay that ends at `world`.
pub fn footer_bytes(world: &WorldState) -> Vec<u8> {
    let mut b = Vec::new();
    b.extend_from_slice(&world.tic.to_le_bytes());
    for c in &world.counters {
        b.extend_from_slice(&counters_bytes(c));
    }
    b.extend_from_slice(&state_hash(world).to_le_bytes());
    b.extend_from_slice(FOOTER_MAGIC);
    b
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Footer {
    pub final_tic: u32,
    pub counters: Vec<Counters>,
    pub hash: u64,
}

/// Parsed contents of a replay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayFile {
    pub version: u16,
    pub seed: u64,
    pub players: usize,
    pub config_text: String,
    pub map_text: String,
    pub tics: Vec<Vec<TicCmd>>,
    /// `(tic, hash)` for every checkpoint present.
    pub checkpoints: Vec<(u32, u64)>,
    /// Absent when the file was cut short.
    pub footer: Option<Footer>,
}

/// Size in bytes of a complete replay with the given shape.
pub fn file_size(players: usize, config_len: usize, map_len: usize, tics: u32) -> usize {
    let header = 4 + 2 + 8 + 1 + 4 + config_len + 4 + map_len;
    let body = tics as usize * players * RECORD_LEN + (tics / CHECKPOINT_TICS) as usize * 8;
    header + body + footer_len(players)
}

fn footer_len(players: usize) -> usize {
    4 + players * COUNTERS_LEN + 8 + 4
}

impl ReplayFile {
    /// Parses a replay. A file without a footer parses with as many whole
    /// tics as it contains and `footer = None`.
    pub fn parse(bytes: &[u8]) -> Result<ReplayFile, ReplayError> {
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(ReplayError::BadMagic);
        }
        let mut r = Reader { b: bytes, at: 4 };
        let version = r.u16().ok_or(ReplayError::TruncatedHeader)?;
        if version != VERSION {
            return Err(ReplayError::Version(version));
        }
        let seed = r.u64().ok_or(ReplayError::TruncatedHeader)?;
        let players = r.u8().ok_or(ReplayError::TruncatedHeader)? as usize;
        let config_text = r.text().ok_or(ReplayError::TruncatedHeader)?;
        let map_text = r.text().ok_or(ReplayError::TruncatedHeader)?;
        if players == 0 {
            return Err(ReplayError::Corrupt);
        }

        let complete = bytes.len() >= r.at + footer_len(players) && bytes.ends_with(FOOTER_MAGIC);
        let body_end = if complete { bytes.len() - footer_len(players) } else { bytes.len() };
        let mut tics = Vec::new();
        let mut checkpoints = Vec::new();
        loop {
            let n = tics.len() as u32 + 1;
            let unit = players * RECORD_LEN + if n % CHECKPOINT_TICS == 0 { 8 } else { 0 };
            if r.at + unit > body_end {
                break;
            }
            let cmds = (0..players)
                .map(|_| TicCmd { buttons: Buttons(r.u32().unwrap()), turn_delta: r.u16().unwrap() as i16 })
                .collect();
            tics.push(cmds);
            if n % CHECKPOINT_TICS == 0 {
                checkpoints.push((n, r.u64().unwrap()));
            }
        }
        let footer = if complete {
            if r.at != body_end {
                return Err(ReplayError::Corrupt);
            }
            let final_tic = r.u32().unwrap();
            let counters = (0..players)
                .map(|_| {
                    let c = counters_from_bytes(bytes[r.at..r.at + COUNTERS_LEN].try_into().expect("56 bytes"));
                    r.at += COUNTERS_LEN;
                    c
                })
                .collect();
            let hash = r.u64().unwrap();
            Some(Footer { final_tic, counters, hash })
        } else {
            None
        };
        Ok(ReplayFile { version, seed, players, config_text, map_text, tics, checkpoints, footer })
    }

    pub fn config(&self) -> Result<ScenarioConfig, ReplayError> {
        let mut cfg = ScenarioConfig::from_parts(&self.config_text, &self.map_text)?;
        cfg.seed = self.seed;
        cfg.players = self.players;
        Ok(cfg)
    }
}

struct Reader<'a> {
    b: &'a [u8],
    at: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Option<&[u8]> {
        let s = self.b.get(self.at..self.at.checked_add(n)?)?;
        self.at += n;
        Some(s)
    }
    fn u8(&mut self) -> Option<u8> {
        self.take(1).map(|s| s[0])
    }
    fn u16(&mut self) -> Option<u16> {
        self.take(2).map(|s| u16::from_le_bytes(s.try_into().unwrap()))
    }
    fn u32(&mut self) -> Option<u32> {
        self.take(4).map(|s| u32::from_le_bytes(s.try_into().unwrap()))
    }
    fn u64(&mut self) -> Option<u64> {
        self.take(8).map(|s| u64::from_le_bytes(s.try_into().unwrap()))
    }
    fn text(&mut self) -> Option<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).ok()
    }
}

/// One re-simulated tic.
#[derive(Clone, Debug)]
pub struct ReplayStep {
    /// Tic count after the step.
    pub tic: u32,
    pub cmds: Vec<TicCmd>,
    pub events: Vec<Event>,
    /// Reward per player under the embedded scenario.
    pub rewards: Vec<f64>,
    pub hash: u64,
    /// Present when rendering was requested.
    pub frame: Option<FrameBundle>,
}

/// Re-simulates a replay tic by tic, verifying every checkpoint.
pub struct Replayer {
    file: ReplayFile,
    config: ScenarioConfig,
    world: WorldState,
    render: Option<RenderOptions>,
    viewer: usize,
    next: usize,
    checkpoint: usize,
    failed: bool,
}

impl Replayer {
    /// `render` retargets the output resolution and buffers; it has no
    /// effect on the simulation.
    pub fn new(file: ReplayFile, render: Option<RenderOptions>, viewer: usize) -> Result<Replayer, ReplayError> {
        let config = file.config()?;
        let world = WorldState::new(Arc::new(config.map.clone()), file.players, config.rules(), file.seed)?;
        Ok(Replayer { file, config, world, render, viewer, next: 0, checkpoint: 0, failed: false })
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn file(&self) -> &ReplayFile {
        &self.file
    }

    fn advance(&mut self) -> Result<ReplayStep, ReplayError> {
        let cmds = self.file.tics[self.next].clone();
        self.next += 1;
        let events = step(&mut self.world, &cmds)?;
        let hash = state_hash(&self.world);
        if let Some(&(tic, expected)) = self.file.checkpoints.get(self.checkpoint) {
            if tic == self.world.tic {
                self.checkpoint += 1;
                if expected != hash {
                    return Err(ReplayError::Checkpoint { tic });
                }
            }
        }
        let frame = self.render.map(|opts| {
            if opts.automap_enabled && !opts.automap_full {
                update_discovery(&mut self.world, self.viewer);
            }
            render_frame(&self.world, self.viewer, &opts)
        });
        let rewards = (0..self.file.players).map(|p| reward_for(&events, &self.config.rewards, p)).collect();
        Ok(ReplayStep { tic: self.world.tic, cmds, events, rewards, hash, frame })
    }

    /// Checks the footer once all tics have been replayed and returns the
    /// final statistics.
    pub fn finish(mut self) -> Result<MatchStats, ReplayError> {
        while self.next < self.file.tics.len() {
            if self.failed {
                break;
            }
            self.advance()?;
        }
        let Some(footer) = &self.file.footer else {
            return Err(ReplayError::Partial { last_tic: self.world.tic });
        };
        if footer.final_tic != self.world.tic
            || footer.hash != state_hash(&self.world)
            || footer.counters != self.world.counters
        {
            return Err(ReplayError::Footer { tic: self.world.tic });
        }
        Ok(MatchStats::from_world(&self.world))
    }
}

impl Iterator for Replayer {
    type Item = Result<ReplayStep, ReplayError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.next >= self.file.tics.len() {
            return None;
        }
        let r = self.advance();
        self.failed = r.is_err();
        Some(r)
    }
}

/// Replays `bytes` headlessly, returning every per-tic hash and the final stats.
pub fn replay_hashes(bytes: &[u8]) -> Result<(Vec<u64>, MatchStats), ReplayError> {
    let mut r = Replayer::new(ReplayFile::parse(bytes)?, None, 0)?;
    let mut hashes = Vec::new();
    for s in r.by_ref() {
        hashes.push(s?.hash);
    }
    Ok((hashes, r.finish()?))
}
