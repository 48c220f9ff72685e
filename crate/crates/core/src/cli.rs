//! Command-line front end: host, join, tournament, replay and bench.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::bots::{BotBrain, BotSpec};
use crate::net::{Client, ClientOptions, Host, HostOptions, NetError, DEFAULT_PORT};
use crate::render::{bench, resident_memory_bytes, BufferKind, RenderOptions};
use crate::replay::{ReplayError, ReplayFile, Replayer};
use crate::scenario::{parse_resolution, ConfigError, Mode, ScenarioConfig};
use crate::tournament::{rank, run_tournament, to_csv, MatchStats, TournamentError, TournamentOptions};

#[derive(Debug, Parser)]
#[command(name = "pixelarena", version, about = "Deterministic raycast deathmatch arena")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Host a lockstep match for remote agents and built-in bots.
    Host(HostArgs),
    /// Join a hosted match with a built-in bot.
    Join(JoinArgs),
    /// Run a bot tournament and write replays and tables.
    Tournament(TournamentArgs),
    /// Verify a replay and optionally render it or print its statistics.
    Replay(ReplayArgs),
    /// Measure single-threaded rendering speed.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct HostArgs {
    /// Scenario file; the built-in arena when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PORT)]
    pub port: u16,
    /// Serve the websocket bridge on this port (default 5030 when given bare).
    #[arg(long, num_args = 0..=1, default_missing_value = "5030")]
    pub ws_port: Option<u16>,
    /// Total player slots.
    #[arg(long, default_value_t = 2)]
    pub players: usize,
    /// Built-in bots for the last slots, e.g. fighter,wanderer:3.
    #[arg(long, value_delimiter = ',')]
    pub bots: Vec<BotSpec>,
    /// Match length in tics; defaults to the scenario's episode timeout.
    #[arg(long)]
    pub duration: Option<u32>,
    /// Override the scenario's control mode.
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Write the match replay here.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    /// Seconds to wait for players.
    #[arg(long, default_value_t = 300)]
    pub lobby_timeout: u64,
}

#[derive(Debug, Args)]
pub struct JoinArgs {
    /// Host address, host:port.
    pub addr: String,
    #[arg(long, default_value = "fighter")]
    pub bot: BotSpec,
    #[arg(long, default_value = "bot")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct TournamentArgs {
    /// Scenario files in rotation; the built-in arena when omitted.
    #[arg(long = "config")]
    pub configs: Vec<PathBuf>,
    /// Participants, e.g. fighter,fighter:9,wanderer.
    #[arg(long, value_delimiter = ',', required = true)]
    pub bots: Vec<BotSpec>,
    #[arg(long, default_value_t = 12)]
    pub matches: usize,
    #[arg(long, default_value_t = 8)]
    pub capacity: usize,
    #[arg(long, default_value_t = 2)]
    pub worst_exclude: usize,
    /// Match length in tics.
    #[arg(long, default_value_t = 21_000)]
    pub duration: u32,
    #[arg(long, default_value = "tournament_out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub file: PathBuf,
    /// Write numbered PPM/PGM frames into this directory.
    #[arg(long)]
    pub render: Option<PathBuf>,
    /// Output resolution for rendered frames.
    #[arg(long)]
    pub resolution: Option<String>,
    /// Extra buffers to export: depth, labels, automap.
    #[arg(long, value_delimiter = ',')]
    pub buffers: Vec<String>,
    /// Player whose view is rendered.
    #[arg(long, default_value_t = 0)]
    pub viewer: usize,
    /// Render every n-th tic.
    #[arg(long, default_value_t = 1)]
    pub every: u32,
    /// Print the final statistics as CSV.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "320x240")]
    pub resolution: String,
    /// Frames to render.
    #[arg(long, default_value_t = 2000)]
    pub tics: u32,
    /// `screen` or `all`.
    #[arg(long, default_value = "screen")]
    pub buffers: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Net(#[from] NetError),
    #[error("{0}")]
    Replay(#[from] ReplayError),
    #[error("{0}")]
    Tournament(#[from] TournamentError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

/// Parses arguments, `argv[0]` included.
pub fn parse_args<I, T>(argv: I) -> Result<Command, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(argv).map(|c| c.command)
}

/// Parses and runs, returning the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cmd = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cmd) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn load(path: Option<&PathBuf>) -> Result<ScenarioConfig, ConfigError> {
    match path {
        Some(p) => ScenarioConfig::load(p),
        None => Ok(ScenarioConfig::default()),
    }
}

fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("player{i}")).collect()
}

fn stats_csv(stats: &MatchStats, names: &[String]) -> String {
    let entries: Vec<_> = stats.players.iter().zip(names).map(|(s, n)| (n.clone(), s.counters.clone())).collect();
    to_csv(&rank(&entries))
}

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Host(a) => host(a),
        Command::Join(a) => join(a),
        Command::Tournament(a) => tournament(a),
        Command::Replay(a) => replay(a),
        Command::Bench(a) => bench_cmd(a),
    }
}

fn host(a: HostArgs) -> Result<(), CliError> {
    let mut cfg = load(a.config.as_ref())?;
    cfg.players = a.players;
    if let Some(m) = a.mode {
        cfg.mode = m;
    }
    let opts = HostOptions {
        bind: format!("0.0.0.0:{}", a.port),
        ws_bind: a.ws_port.map(|p| format!("0.0.0.0:{p}")),
        bots: a.bots,
        duration: a.duration,
        lobby_timeout: Duration::from_secs(a.lobby_timeout),
        ..HostOptions::new(cfg)
    };
    let host = Host::bind(opts)?;
    eprintln!("hosting on {}", host.local_addr());
    if let Some(ws) = host.ws_addr() {
        eprintln!("websocket bridge on {ws}");
    }
    let out = host.run()?;
    if let Some(p) = a.replay {
        std::fs::write(&p, &out.replay)?;
        eprintln!("replay written to {}", p.display());
    }
    for (i, f) in out.frozen.iter().enumerate() {
        if *f {
            eprintln!("note: slot {i} ({}) disconnected and was frozen", out.names[i]);
        }
    }
    print!("{}", stats_csv(&out.stats, &out.names));
    Ok(())
}

fn join(a: JoinArgs) -> Result<(), CliError> {
    let addr = if a.addr.contains(':') { a.addr } else { format!("{}:{DEFAULT_PORT}", a.addr) };
    let mut client = Client::connect(&addr, &a.name, ClientOptions::default())?;
    let me = client.player_id();
    let mut brain = BotBrain::new(a.bot.kind, a.bot.seed.unwrap_or(client.config().seed), me);
    client.run(&mut brain)?;
    let w = client.world();
    let c = &w.counters[me];
    println!("match over at tic {}: frags {} deaths {}", w.tic, c.frags(), c.deaths);
    Ok(())
}

fn tournament(a: TournamentArgs) -> Result<(), CliError> {
    let maps = if a.configs.is_empty() {
        vec![ScenarioConfig::default()]
    } else {
        a.configs.iter().map(ScenarioConfig::load).collect::<Result<_, _>>()?
    };
    let opts = TournamentOptions {
        maps,
        bots: a.bots,
        names: Vec::new(),
        matches: a.matches,
        capacity: a.capacity,
        worst_exclude: a.worst_exclude,
        duration: Some(a.duration),
        out_dir: Some(a.out.clone()),
    };
    let result = run_tournament(&opts)?;
    print!("{}", result.tables.summary_md);
    eprintln!("results written to {}", a.out.display());
    Ok(())
}

fn replay(a: ReplayArgs) -> Result<(), CliError> {
    let bytes = std::fs::read(&a.file)?;
    let file = ReplayFile::parse(&bytes)?;
    let cfg = file.config()?;
    let render = match &a.render {
        None => None,
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let mut o = cfg.render;
            if let Some(r) = &a.resolution {
                let (w, h) = parse_resolution(r).ok_or_else(|| CliError::Usage(format!("bad resolution '{r}'")))?;
                o.width = w;
                o.height = h;
            }
            for b in &a.buffers {
                match b.as_str() {
                    "depth" => o.depth_enabled = true,
                    "labels" => o.labels_enabled = true,
                    "automap" => o.automap_enabled = true,
                    other => return Err(CliError::Usage(format!("unknown buffer '{other}'"))),
                }
            }
            Some(o)
        }
    };
    if a.viewer >= file.players {
        return Err(CliError::Usage(format!("viewer {} but the replay has {} players", a.viewer, file.players)));
    }
    let players = file.players;
    let mut r = Replayer::new(file, render, a.viewer)?;
    let every = a.every.max(1);
    for step in r.by_ref() {
        let step = step?;
        if let (Some(dir), Some(frame)) = (&a.render, &step.frame) {
            if step.tic % every == 0 {
                for kind in BufferKind::ALL {
                    let path = dir.join(format!("{:06}_{}.{}", step.tic, kind.name(), frame.file_extension(kind)));
                    frame.export(kind, &path)?;
                }
            }
        }
    }
    let stats = r.finish()?;
    if a.stats {
        print!("{}", stats_csv(&stats, &default_names(players)));
    } else {
        eprintln!("replay verified: {} tics", stats.final_tic);
    }
    Ok(())
}

fn bench_cmd(a: BenchArgs) -> Result<(), CliError> {
    let (w, h) = parse_resolution(&a.resolution).ok_or_else(|| CliError::Usage(format!("bad resolution '{}'", a.resolution)))?;
    let opts = match a.buffers.as_str() {
        "screen" => RenderOptions::with_size(w, h),
        "all" => RenderOptions::with_size(w, h).all_buffers(),
        other => return Err(CliError::Usage(format!("--buffers must be screen or all, got '{other}'"))),
    };
    let r = bench(&opts, a.tics);
    println!("{}x{} {} frames in {:.3} s: {:.0} fps", r.width, r.height, r.frames, r.seconds, r.fps);
    for c in &r.costs {
        println!("  {:<8} {:.4} ms/frame", c.kind.name(), c.ms_per_frame);
    }
    if let Some(rss) = resident_memory_bytes() {
        println!("resident memory: {:.1} MB", rss as f64 / (1024.0 * 1024.0));
    }
    Ok(())
}
