//! Host and client ends of a lockstep match.
//!
//! Connection readers and the websocket bridge feed one ordered event queue;
//! the session loop alone mutates protocol state.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::protocol::{encode, ByeReason, Decoder, Message, ProtoError, PROTOCOL_VERSION};
use super::ws_bridge::{self, WsOut};
use crate::bots::{BotBrain, BotSpec, Controller};
use crate::replay::{ReplayWriter, CHECKPOINT_TICS};
use crate::scenario::{ConfigError, ScenarioConfig};
use crate::sim::{state_hash, step, Event, PlayerId, SimError, TicCmd, Tuning, WorldState, MAX_PLAYERS, TICS_PER_SECOND};
use crate::tournament::MatchStats;

pub const DEFAULT_PORT: u16 = 5029;
/// Default match length: ten minutes of play.
pub const DEFAULT_DURATION: u32 = 600 * TICS_PER_SECOND;
/// Early actions further ahead than this are discarded.
const MAX_LOOKAHEAD: u32 = 10 * TICS_PER_SECOND;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DesyncReport {
    pub tic: u32,
    pub player: PlayerId,
    pub expected: u64,
    pub got: u64,
}

#[derive(Debug, Error)]
pub enum NetError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("protocol: {0}")]
    Protocol(#[from] ProtoError),
    #[error("unexpected message: {0}")]
    Unexpected(String),
    #[error("rejected by host: {0:?}")]
    Rejected(ByeReason),
    #[error("host ended the match: {0:?}")]
    Ended(ByeReason),
    #[error("connection closed")]
    Disconnected,
    #[error("desync at tic {} from player {}", .0.tic, .0.player)]
    Desync(DesyncReport),
    #[error("lobby timed out with {ready} of {needed} players ready")]
    LobbyTimeout { ready: usize, needed: usize },
    #[error("scenario: {0}")]
    Config(#[from] ConfigError),
    #[error("simulation: {0}")]
    Sim(#[from] SimError),
    #[error("invalid host options: {0}")]
    Options(String),
}

/// Settings for one hosted match.
#[derive(Clone, Debug)]
pub struct HostOptions {
    /// Scenario; `players` is the total slot count and `mode` picks
    /// lockstep (sync) or 35 Hz pacing (async).
    pub config: ScenarioConfig,
    pub bind: String,
    /// Websocket bridge address, if any.
    pub ws_bind: Option<String>,
    /// Built-in bots occupying the last slots.
    pub bots: Vec<BotSpec>,
    /// Display names for the bot slots, in order; missing ones default to
    /// the bot kind and slot.
    pub bot_names: Vec<String>,
    /// Match length in tics; `None` takes the episode timeout.
    pub duration: Option<u32>,
    pub lobby_timeout: Duration,
    /// In sync mode a peer silent this long is frozen.
    pub peer_timeout: Duration,
}

impl HostOptions {
    pub fn new(config: ScenarioConfig) -> HostOptions {
        HostOptions {
            config,
            bind: "127.0.0.1:0".into(),
            ws_bind: None,
            bots: Vec::new(),
            bot_names: Vec::new(),
            duration: None,
            lobby_timeout: Duration::from_secs(60),
            peer_timeout: Duration::from_secs(30),
        }
    }

    fn match_length(&self) -> u32 {
        match self.duration {
            Some(d) => d,
            None if self.config.episode_timeout > 0 => self.config.episode_timeout,
            None => DEFAULT_DURATION,
        }
    }
}

/// Result of a completed match.
#[derive(Clone, Debug)]
pub struct HostOutcome {
    pub world: WorldState,
    pub stats: MatchStats,
    pub replay: Vec<u8>,
    pub names: Vec<String>,
    /// Tics each slot ran on a substituted empty action.
    pub missed: Vec<u32>,
    /// Slots whose peer disconnected or misbehaved mid-match.
    pub frozen: Vec<bool>,
    /// Tics per second over the played portion.
    pub tic_rate: f64,
}

pub(crate) type ConnId = u64;

pub(crate) enum Ev {
    Connected(ConnId, TcpStream),
    Msg(ConnId, Message),
    Closed(ConnId, Option<ProtoError>),
    WsJoin { id: ConnId, player: bool, name: String, out: Sender<WsOut> },
    WsInput { id: ConnId, cmd: TicCmd },
    WsClosed(ConnId),
}

enum SlotKind {
    Open,
    Remote { conn: ConnId, ready: bool },
    Ws { input: TicCmd },
    Bot(Box<BotBrain>),
    Frozen,
}

struct Slot {
    kind: SlotKind,
    name: String,
    early: BTreeMap<u32, TicCmd>,
    last_hash_tic: u32,
    missed: u32,
    frozen: bool,
}

struct WsPeer {
    out: Sender<WsOut>,
    slot: Option<usize>,
}

/// A bound, not yet running match host.
pub struct Host {
    opts: HostOptions,
    listener: TcpListener,
    ws: Option<TcpListener>,
}

impl Host {
    pub fn bind(mut opts: HostOptions) -> Result<Host, NetError> {
        let players = opts.config.players;
        if players == 0 || players > MAX_PLAYERS {
            return Err(NetError::Options(format!("players must be 1..=16, got {players}")));
        }
        if opts.bots.len() > players {
            return Err(NetError::Options(format!("{} bots for {players} slots", opts.bots.len())));
        }
        // bots are host-side controllers, not part of the shared scenario
        opts.config.bots.clear();
        opts.config.validate()?;
        let listener = TcpListener::bind(&opts.bind)?;
        let ws = opts.ws_bind.as_deref().map(TcpListener::bind).transpose()?;
        Ok(Host { opts, listener, ws })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.listener.local_addr().expect("bound listener")
    }

    pub fn ws_addr(&self) -> Option<SocketAddr> {
        self.ws.as_ref().map(|l| l.local_addr().expect("bound listener"))
    }

    /// Waits for every remote slot, plays the match and returns its outcome.
    pub fn run(self) -> Result<HostOutcome, NetError> {
        let stop = Arc::new(AtomicBool::new(false));
        let ids = Arc::new(AtomicU64::new(1));
        let (tx, rx) = mpsc::channel();
        let mut threads = vec![spawn_acceptor(self.listener, tx.clone(), stop.clone(), ids.clone())?];
        if let Some(ws) = self.ws {
            threads.push(ws_bridge::spawn_acceptor(ws, tx.clone(), stop.clone(), ids)?);
        }
        drop(tx);
        let mut s = Session::new(self.opts, rx)?;
        let result = s.lobby().and_then(|()| s.play());
        s.shutdown();
        stop.store(true, Ordering::SeqCst);
        for t in threads {
            let _ = t.join();
        }
        result
    }
}

fn spawn_acceptor(
    listener: TcpListener,
    tx: Sender<Ev>,
    stop: Arc<AtomicBool>,
    ids: Arc<AtomicU64>,
) -> io::Result<JoinHandle<()>> {
    listener.set_nonblocking(true)?;
    Ok(std::thread::spawn(move || {
        while !stop.load(Ordering::SeqCst) {
            match listener.accept() {
                Ok((stream, _)) => {
                    let id = ids.fetch_add(1, Ordering::SeqCst);
                    if stream.set_nonblocking(false).is_err() {
                        continue;
                    }
                    let _ = stream.set_nodelay(true);
                    let Ok(reader) = stream.try_clone() else { continue };
                    if tx.send(Ev::Connected(id, stream)).is_err() {
                        return;
                    }
                    let tx = tx.clone();
                    std::thread::spawn(move || read_loop(id, reader, tx));
                }
                Err(e) if e.kind() == io::ErrorKind::WouldBlock => std::thread::sleep(Duration::from_millis(2)),
                Err(e) => {
                    log::warn!("accept failed: {e}");
                    std::thread::sleep(Duration::from_millis(20));
                }
            }
        }
    }))
}

fn read_loop(id: ConnId, mut stream: TcpStream, tx: Sender<Ev>) {
    let mut dec = Decoder::new();
    let mut buf = [0u8; 4096];
    loop {
        match dec.next_message() {
            Ok(Some(m)) => {
                if tx.send(Ev::Msg(id, m)).is_err() {
                    return;
                }
                continue;
            }
            Ok(None) => {}
            Err(e) => {
                let _ = tx.send(Ev::Closed(id, Some(e)));
                return;
            }
        }
        match stream.read(&mut buf) {
            Ok(0) | Err(_) => {
                let _ = tx.send(Ev::Closed(id, None));
                return;
            }
            Ok(n) => dec.push(&buf[..n]),
        }
    }
}

struct Session {
    opts: HostOptions,
    rx: Receiver<Ev>,
    conns: HashMap<ConnId, TcpStream>,
    ws: HashMap<ConnId, WsPeer>,
    slots: Vec<Slot>,
    world: WorldState,
    recorder: ReplayWriter<Vec<u8>>,
    hashes: HashMap<u32, u64>,
    /// Tic whose commands are being collected.
    collecting: u32,
    started: bool,
}

impl Session {
    fn new(opts: HostOptions, rx: Receiver<Ev>) -> Result<Session, NetError> {
        let cfg = &opts.config;
        let world = WorldState::new(Arc::new(cfg.map.clone()), cfg.players, cfg.rules(), cfg.seed)?;
        let first_bot = cfg.players - opts.bots.len();
        let slots = (0..cfg.players)
            .map(|i| {
                let (kind, name) = if i >= first_bot {
                    let b = &opts.bots[i - first_bot];
                    let name = opts.bot_names.get(i - first_bot).cloned().unwrap_or_else(|| format!("{}{i}", b.kind));
                    (SlotKind::Bot(Box::new(BotBrain::new(b.kind, b.seed.unwrap_or(cfg.seed), i))), name)
                } else {
                    (SlotKind::Open, String::new())
                };
                Slot { kind, name, early: BTreeMap::new(), last_hash_tic: 0, missed: 0, frozen: false }
            })
            .collect();
        let recorder = ReplayWriter::for_config(Vec::new(), cfg)?;
        Ok(Session {
            rx,
            conns: HashMap::new(),
            ws: HashMap::new(),
            slots,
            world,
            recorder,
            hashes: HashMap::new(),
            collecting: 0,
            started: false,
            opts,
        })
    }

    fn needed(&self) -> usize {
        self.slots.iter().filter(|s| !matches!(s.kind, SlotKind::Bot(_))).count()
    }

    fn ready(&self) -> usize {
        self.slots
            .iter()
            .filter(|s| matches!(s.kind, SlotKind::Remote { ready: true, .. } | SlotKind::Ws { .. }))
            .count()
    }

    fn lobby(&mut self) -> Result<(), NetError> {
        let deadline = Instant::now() + self.opts.lobby_timeout;
        while self.ready() < self.needed() {
            let now = Instant::now();
            if now >= deadline {
                return Err(NetError::LobbyTimeout { ready: self.ready(), needed: self.needed() });
            }
            match self.rx.recv_timeout(deadline - now) {
                Ok(ev) => self.handle(ev)?,
                Err(RecvTimeoutError::Timeout) => {}
                Err(RecvTimeoutError::Disconnected) => return Err(NetError::Disconnected),
            }
        }
        self.started = true;
        log::info!("match starting with {} players", self.slots.len());
        Ok(())
    }

    fn slot_of(&self, conn: ConnId) -> Option<usize> {
        self.slots.iter().position(|s| matches!(s.kind, SlotKind::Remote { conn: c, .. } if c == conn))
    }

    fn send(&mut self, conn: ConnId, msg: &Message) -> bool {
        let ok = match self.conns.get_mut(&conn) {
            Some(s) => s.write_all(&encode(msg)).is_ok(),
            None => false,
        };
        if !ok {
            self.drop_conn(conn);
        }
        ok
    }

    fn bye(&mut self, conn: ConnId, reason: ByeReason) {
        self.send(conn, &Message::Bye { reason });
        self.drop_conn(conn);
    }

    fn drop_conn(&mut self, conn: ConnId) {
        if let Some(s) = self.conns.remove(&conn) {
            let _ = s.shutdown(Shutdown::Both);
        }
        if let Some(i) = self.slot_of(conn) {
            self.release(i);
        }
    }

    /// Frees a slot in the lobby and freezes it once the match runs.
    fn release(&mut self, i: usize) {
        let s = &mut self.slots[i];
        if self.started {
            log::warn!("slot {i} ({}) left; frozen to empty actions", s.name);
            s.kind = SlotKind::Frozen;
            s.frozen = true;
        } else {
            s.kind = SlotKind::Open;
            s.name.clear();
        }
        s.early.clear();
    }

    fn open_slot(&self) -> Option<usize> {
        if self.started {
            return None;
        }
        self.slots.iter().position(|s| matches!(s.kind, SlotKind::Open))
    }

    fn handle(&mut self, ev: Ev) -> Result<(), NetError> {
        match ev {
            Ev::Connected(id, stream) => {
                self.conns.insert(id, stream);
            }
            Ev::Closed(id, err) => {
                if let Some(e) = err {
                    log::warn!("connection {id}: {e}");
                    self.send(id, &Message::Bye { reason: ByeReason::ProtocolError });
                }
                self.drop_conn(id);
            }
            Ev::Msg(id, msg) => self.on_message(id, msg)?,
            Ev::WsJoin { id, player, name, out } => {
                let slot = if player {
                    match self.open_slot() {
                        Some(i) => {
                            self.slots[i].kind = SlotKind::Ws { input: TicCmd::EMPTY };
                            self.slots[i].name = name;
                            Some(i)
                        }
                        None => {
                            let _ = out.send(WsOut::Close("no free player slot".into()));
                            return Ok(());
                        }
                    }
                } else {
                    None
                };
                let _ = out.send(WsOut::Text(ws_bridge::welcome_json(&self.opts.config, slot)));
                self.ws.insert(id, WsPeer { out, slot });
            }
            Ev::WsInput { id, cmd } => {
                if let Some(i) = self.ws.get(&id).and_then(|p| p.slot) {
                    if let SlotKind::Ws { input, .. } = &mut self.slots[i].kind {
                        *input = cmd;
                    }
                }
            }
            Ev::WsClosed(id) => {
                if let Some(i) = self.ws.remove(&id).and_then(|p| p.slot) {
                    self.release(i);
                }
            }
        }
        Ok(())
    }

    fn on_message(&mut self, id: ConnId, msg: Message) -> Result<(), NetError> {
        let slot = self.slot_of(id);
        match (msg, slot) {
            (Message::Hello { proto, .. }, None) if proto != PROTOCOL_VERSION => {
                self.bye(id, ByeReason::VersionMismatch);
            }
            (Message::Hello { name, .. }, None) => match self.open_slot() {
                Some(i) => {
                    self.slots[i].kind = SlotKind::Remote { conn: id, ready: false };
                    self.slots[i].name = if name.is_empty() { format!("player{i}") } else { name };
                    let (config, map) = self.opts.config.to_parts();
                    let welcome = Message::Welcome { player_id: i as u8, seed: self.opts.config.seed, config, map };
                    self.send(id, &welcome);
                }
                None => self.bye(id, ByeReason::Full),
            },
            (Message::Ready, Some(i)) => {
                if let SlotKind::Remote { ready, .. } = &mut self.slots[i].kind {
                    *ready = true;
                }
            }
            (Message::Action { tic, cmd }, Some(i)) => {
                if tic < self.collecting && self.started {
                    log::debug!("slot {i}: late action for tic {tic} dropped");
                } else if tic <= self.collecting + MAX_LOOKAHEAD {
                    self.slots[i].early.insert(tic, cmd);
                }
            }
            (Message::Hash { tic, hash }, Some(i)) => {
                let expected = if tic <= self.world.tic { self.hashes.get(&tic).copied() } else { None };
                match expected {
                    None => {
                        log::warn!("slot {i}: hash for tic {tic} out of order at tic {}", self.world.tic);
                        self.bye(id, ByeReason::ProtocolError);
                    }
                    Some(h) if h != hash => {
                        let report = DesyncReport { tic, player: i, expected: h, got: hash };
                        log::error!("desync: {report:?}");
                        self.broadcast(&Message::Bye { reason: ByeReason::Desync });
                        return Err(NetError::Desync(report));
                    }
                    Some(_) => self.slots[i].last_hash_tic = tic,
                }
            }
            (Message::Bye { .. }, _) => self.drop_conn(id),
            (other, _) => {
                log::warn!("connection {id}: unexpected {other:?}");
                self.bye(id, ByeReason::ProtocolError);
            }
        }
        Ok(())
    }

    fn broadcast(&mut self, msg: &Message) {
        let bytes = encode(msg);
        let mut failed = Vec::new();
        for (&id, s) in &mut self.conns {
            if self.slots.iter().any(|sl| matches!(sl.kind, SlotKind::Remote { conn, .. } if conn == id))
                && s.write_all(&bytes).is_err()
            {
                failed.push(id);
            }
        }
        failed.into_iter().for_each(|id| self.drop_conn(id));
    }

    fn waiting_on(&self, t: u32) -> bool {
        self.slots.iter().any(|s| matches!(s.kind, SlotKind::Remote { .. }) && !s.early.contains_key(&t))
    }

    fn frag_limit_hit(&self) -> bool {
        let limit = self.opts.config.frag_limit;
        limit > 0 && self.world.counters.iter().any(|c| c.frags() >= limit as i64)
    }

    fn pump_until(&mut self, deadline: Instant) -> Result<(), NetError> {
        loop {
            let now = Instant::now();
            if now >= deadline {
                return Ok(());
            }
            match self.rx.recv_timeout(deadline - now) {
                Ok(ev) => self.handle(ev)?,
                Err(RecvTimeoutError::Timeout) => return Ok(()),
                Err(RecvTimeoutError::Disconnected) => {
                    std::thread::sleep(deadline - now);
                    return Ok(());
                }
            }
        }
    }

    fn play(&mut self) -> Result<HostOutcome, NetError> {
        let length = self.opts.match_length();
        let sync = self.opts.config.mode.is_sync();
        let period = Duration::from_secs_f64(1.0 / TICS_PER_SECOND as f64);
        let start = Instant::now();
        while self.world.tic < length && !self.frag_limit_hit() {
            let t = self.world.tic;
            self.collecting = t;
            if sync {
                while self.waiting_on(t) {
                    match self.rx.recv_timeout(self.opts.peer_timeout) {
                        Ok(ev) => self.handle(ev)?,
                        Err(_) => {
                            let late: Vec<ConnId> = self
                                .slots
                                .iter()
                                .filter(|s| !s.early.contains_key(&t))
                                .filter_map(|s| match s.kind {
                                    SlotKind::Remote { conn, .. } => Some(conn),
                                    _ => None,
                                })
                                .collect();
                            late.into_iter().for_each(|c| self.bye(c, ByeReason::PeerLeft));
                        }
                    }
                }
                while let Ok(ev) = self.rx.try_recv() {
                    self.handle(ev)?;
                }
            } else {
                self.pump_until(start + period * (t + 1))?;
            }
            let cmds = self.collect(t);
            self.broadcast(&Message::TicBatch { tic: t, cmds: cmds.clone() });
            step(&mut self.world, &cmds)?;
            self.recorder.record(&cmds, &self.world)?;
            if self.world.tic % CHECKPOINT_TICS == 0 {
                self.hashes.insert(self.world.tic, state_hash(&self.world));
            }
            self.stream_to_ws();
        }
        let elapsed = start.elapsed().as_secs_f64();
        self.collecting = self.world.tic;
        self.broadcast(&Message::Bye { reason: ByeReason::MatchOver });
        self.drain_hashes()?;
        let tic_rate = if elapsed > 0.0 { self.world.tic as f64 / elapsed } else { f64::INFINITY };
        let replay = std::mem::replace(&mut self.recorder, ReplayWriter::new(Vec::new(), 0, 0, "", "")?)
            .finish(&self.world)?;
        Ok(HostOutcome {
            stats: MatchStats::from_world(&self.world),
            world: self.world.clone(),
            replay,
            names: self.slots.iter().map(|s| s.name.clone()).collect(),
            missed: self.slots.iter().map(|s| s.missed).collect(),
            frozen: self.slots.iter().map(|s| s.frozen).collect(),
            tic_rate,
        })
    }

    fn collect(&mut self, t: u32) -> Vec<TicCmd> {
        let world = &self.world;
        self.slots
            .iter_mut()
            .enumerate()
            .map(|(i, s)| {
                let mut stale = s.early.split_off(&t);
                let own = stale.remove(&t);
                s.early = stale;
                match &mut s.kind {
                    SlotKind::Remote { .. } => own.unwrap_or_else(|| {
                        s.missed += 1;
                        TicCmd::EMPTY
                    }),
                    SlotKind::Ws { input, .. } => *input,
                    SlotKind::Bot(b) => b.act(world, i),
                    SlotKind::Open | SlotKind::Frozen => {
                        s.missed += 1;
                        TicCmd::EMPTY
                    }
                }
            })
            .collect()
    }

    /// Waits briefly for the final checkpoint hashes after the match ends.
    fn drain_hashes(&mut self) -> Result<(), NetError> {
        let last = self.world.tic / CHECKPOINT_TICS * CHECKPOINT_TICS;
        let deadline = Instant::now() + Duration::from_secs(2);
        while last > 0
            && self
                .slots
                .iter()
                .any(|s| matches!(s.kind, SlotKind::Remote { .. }) && s.last_hash_tic < last)
        {
            let now = Instant::now();
            if now >= deadline {
                break;
            }
            match self.rx.recv_timeout(deadline - now) {
                Ok(ev) => self.handle(ev)?,
                Err(_) => break,
            }
        }
        Ok(())
    }

    fn stream_to_ws(&mut self) {
        if self.ws.is_empty() {
            return;
        }
        let scoreboard = (self.world.tic % TICS_PER_SECOND == 0).then(|| {
            let names: Vec<String> = self.slots.iter().map(|s| s.name.clone()).collect();
            ws_bridge::scoreboard_json(&self.world, &names)
        });
        let mut gone = Vec::new();
        for (&id, peer) in &self.ws {
            let frames = ws_bridge::frame_messages(&self.world, peer.slot.unwrap_or(0), &self.opts.config.render);
            let mut ok = frames.into_iter().all(|f| peer.out.send(WsOut::Binary(f)).is_ok());
            if let Some(s) = &scoreboard {
                ok &= peer.out.send(WsOut::Text(s.clone())).is_ok();
            }
            if !ok {
                gone.push(id);
            }
        }
        for id in gone {
            self.handle(Ev::WsClosed(id)).expect("ws close is infallible");
        }
    }

    fn shutdown(&mut self) {
        for (_, s) in self.conns.drain() {
            let _ = s.shutdown(Shutdown::Both);
        }
        for (_, p) in self.ws.drain() {
            let _ = p.out.send(WsOut::Close("match over".into()));
        }
    }
}

/// Options for a connecting peer.
#[derive(Clone, Debug, Default)]
pub struct ClientOptions {
    /// Simulate with these constants instead of the defaults. Used to
    /// inject a deliberate divergence.
    pub tuning: Option<Tuning>,
    /// Sleep before each action is sent, modelling a slow agent.
    pub action_delay: Duration,
    /// Fail when the host is silent this long.
    pub read_timeout: Option<Duration>,
}

/// A peer in a lockstep match with its own copy of the world.
pub struct Client {
    stream: TcpStream,
    dec: Decoder,
    player_id: PlayerId,
    config: ScenarioConfig,
    world: WorldState,
    opts: ClientOptions,
    ended: Option<ByeReason>,
}

impl Client {
    /// Joins a host and completes the HELLO / WELCOME / READY handshake.
    pub fn connect(addr: impl ToSocketAddrs, name: &str, opts: ClientOptions) -> Result<Client, NetError> {
        let mut stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        stream.set_read_timeout(opts.read_timeout)?;
        stream.write_all(&encode(&Message::Hello { proto: PROTOCOL_VERSION, name: name.to_string() }))?;
        let mut dec = Decoder::new();
        let (player_id, seed, cfg_text, map_text) = match recv(&mut stream, &mut dec)? {
            Message::Welcome { player_id, seed, config, map } => (player_id as PlayerId, seed, config, map),
            Message::Bye { reason } => return Err(NetError::Rejected(reason)),
            other => return Err(NetError::Unexpected(format!("{other:?}"))),
        };
        let mut config = ScenarioConfig::from_parts(&cfg_text, &map_text)?;
        config.seed = seed;
        let tuning = opts.tuning.unwrap_or_default();
        let world = WorldState::with_tuning(Arc::new(config.map.clone()), config.players, config.rules(), tuning, seed)?;
        stream.write_all(&encode(&Message::Ready))?;
        Ok(Client { stream, dec, player_id, config, world, opts, ended: None })
    }

    pub fn player_id(&self) -> PlayerId {
        self.player_id
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// Why the host ended the session, once it has.
    pub fn ended(&self) -> Option<ByeReason> {
        self.ended
    }

    /// Submits this peer's command for the current tic.
    pub fn send_action(&mut self, cmd: TicCmd) -> Result<(), NetError> {
        if !self.opts.action_delay.is_zero() {
            std::thread::sleep(self.opts.action_delay);
        }
        if self.ended.is_some() {
            return Ok(());
        }
        let msg = Message::Action { tic: self.world.tic, cmd };
        if let Err(e) = self.stream.write_all(&encode(&msg)) {
            // a closed host is reported by the next read, with its BYE if it sent one
            log::debug!("sending action: {e}");
        }
        Ok(())
    }

    /// Waits for the next batch and steps the world with it. `None` once the
    /// match is over.
    pub fn next_tic(&mut self) -> Result<Option<Vec<Event>>, NetError> {
        if let Some(r) = self.ended {
            return if r == ByeReason::MatchOver { Ok(None) } else { Err(NetError::Ended(r)) };
        }
        match recv(&mut self.stream, &mut self.dec)? {
            Message::TicBatch { tic, cmds } if tic == self.world.tic => {
                let events = step(&mut self.world, &cmds)?;
                if self.world.tic % CHECKPOINT_TICS == 0 {
                    let msg = Message::Hash { tic: self.world.tic, hash: state_hash(&self.world) };
                    // the host may already be gone after the last batch
                    let _ = self.stream.write_all(&encode(&msg));
                }
                Ok(Some(events))
            }
            Message::Bye { reason } => {
                self.ended = Some(reason);
                if reason == ByeReason::MatchOver {
                    Ok(None)
                } else {
                    Err(NetError::Ended(reason))
                }
            }
            other => Err(NetError::Unexpected(format!("{other:?} at tic {}", self.world.tic))),
        }
    }

    /// Plays until the match ends, asking `controller` for every command.
    pub fn run(&mut self, controller: &mut dyn Controller) -> Result<(), NetError> {
        loop {
            let cmd = controller.act(&self.world, self.player_id);
            self.send_action(cmd)?;
            if self.next_tic()?.is_none() {
                return Ok(());
            }
        }
    }
}

impl Drop for Client {
    fn drop(&mut self) {
        let _ = self.stream.shutdown(Shutdown::Both);
    }
}

fn recv(stream: &mut TcpStream, dec: &mut Decoder) -> Result<Message, NetError> {
    let mut buf = [0u8; 4096];
    loop {
        if let Some(m) = dec.next_message()? {
            return Ok(m);
        }
        let n = stream.read(&mut buf)?;
        if n == 0 {
            return Err(NetError::Disconnected);
        }
        dec.push(&buf[..n]);
    }
}
