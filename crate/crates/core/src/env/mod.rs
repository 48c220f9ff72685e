//! Agent-facing environment: episode lifecycle, state access, actions,
//! frame skipping and the four control modes.
//!
//! Synchronous modes step only when the caller acts. Asynchronous modes run
//! a 35 Hz clock thread that steps with whatever action is pending and the
//! empty action otherwise, so a slow caller misses tics.

mod core;
pub mod ffi;

use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::net::{Client, ClientOptions, Host, HostOptions, NetError};
use crate::render::{render_frame, FrameBundle};
use crate::scenario::{Button, ConfigError, Mode, ScenarioConfig};
use crate::sim::{Buttons, PlayerId, RespawnOutcome, SimError, TicCmd, WorldState, TICS_PER_SECOND};

use self::core::LocalCore;

/// Bound on the TURN_DELTA axis, degrees per tic.
pub const MAX_TURN_DELTA_DEG: f64 = 15.0;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("simulation: {0}")]
    Sim(#[from] SimError),
    #[error("network: {0}")]
    Net(#[from] NetError),
    #[error("action has {got} values, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error("frame skip must be at least 1")]
    Skip,
    #[error("episode is finished")]
    EpisodeFinished,
    #[error("operation needs a {0} mode")]
    Mode(&'static str),
    #[error("environment is not initialized")]
    NotInitialized,
    #[error("invalid game argument: {0}")]
    GameArg(String),
}

/// Button values aligned with `available_buttons`.
pub type Action = Vec<f64>;

/// What the agent observes at one tic.
#[derive(Clone, Debug)]
pub struct EnvState {
    pub tic: u32,
    pub frame: FrameBundle,
    /// Values in the order of `available_game_variables`.
    pub game_variables: Vec<f64>,
    /// The human's action for this tic in spectator modes.
    pub last_action: Option<Action>,
    pub episode_finished: bool,
    pub player_dead: bool,
}

/// Converts an action vector to a tic command under a button layout.
pub fn action_to_cmd(buttons: &[Button], action: &[f64]) -> Result<TicCmd, EnvError> {
    if action.len() != buttons.len() {
        return Err(EnvError::Arity { expected: buttons.len(), got: action.len() });
    }
    let mut cmd = TicCmd::EMPTY;
    for (b, &v) in buttons.iter().zip(action) {
        match b.bit() {
            Some(bit) if v != 0.0 => cmd.buttons = cmd.buttons.with(bit),
            Some(_) => {}
            None => {
                let deg = if v.is_finite() { v.clamp(-MAX_TURN_DELTA_DEG, MAX_TURN_DELTA_DEG) } else { 0.0 };
                cmd.turn_delta = (deg * 100.0).round() as i16;
            }
        }
    }
    Ok(cmd)
}

/// Inverse of [`action_to_cmd`] for the buttons in the layout.
pub fn cmd_to_action(buttons: &[Button], cmd: &TicCmd) -> Action {
    buttons
        .iter()
        .map(|b| match b.bit() {
            Some(bit) => cmd.buttons.has(bit) as u8 as f64,
            None => cmd.turn_delta as f64 / 100.0,
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
enum NetRole {
    #[default]
    Local,
    Host { players: usize, port: u16 },
    Join { addr: String },
}

/// Shared state between a local environment and its clock thread.
struct Shared {
    core: Mutex<LocalCore>,
    tick: Condvar,
    spectator: Condvar,
}

enum Backend {
    Local { shared: Arc<Shared>, clock: Option<JoinHandle<()>> },
    Net { client: Box<Client>, host: Option<JoinHandle<()>>, finished: bool },
}

/// Sends human input to a spectator-mode environment from any thread.
#[derive(Clone)]
pub struct SpectatorHandle {
    shared: Arc<Shared>,
}

impl SpectatorHandle {
    /// Queues the action the human takes on the next tic.
    pub fn send(&self, cmd: TicCmd) {
        self.shared.core.lock().expect("env lock").spectator_input = Some(cmd);
        self.shared.spectator.notify_all();
    }
}

/// A game instance controlled through the agent API.
pub struct Env {
    config: ScenarioConfig,
    role: NetRole,
    backend: Option<Backend>,
    cache: Option<Arc<EnvState>>,
    episode: u64,
}

impl Env {
    /// An uninitialized environment; call [`Env::init`] before use.
    pub fn new(config: ScenarioConfig) -> Env {
        Env { config, role: NetRole::Local, backend: None, cache: None, episode: 0 }
    }

    pub fn from_config_text(text: &str) -> Result<Env, EnvError> {
        Ok(Env::new(crate::scenario::parse_config(text)?))
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.config.mode = mode;
    }

    /// Applies launcher-style arguments. Honored: `+name <s>`,
    /// `+colorset <n>`, `-host <players>`, `-port <n>`, `-join <addr>`.
    /// Anything else is ignored with a warning.
    pub fn add_game_args(&mut self, args: &str) -> Result<(), EnvError> {
        let mut it = args.split_whitespace();
        let mut port = crate::net::DEFAULT_PORT;
        while let Some(a) = it.next() {
            let mut value = || it.next().ok_or_else(|| EnvError::GameArg(format!("{a} needs a value")));
            match a {
                "+name" => self.config.player_name = value()?.to_string(),
                "+colorset" => {
                    let v = value()?;
                    self.config.colorset = v.parse().map_err(|_| EnvError::GameArg(format!("+colorset {v}")))?;
                }
                "-host" => {
                    let v = value()?;
                    let players = v.parse().map_err(|_| EnvError::GameArg(format!("-host {v}")))?;
                    self.role = NetRole::Host { players, port };
                }
                "-port" => {
                    let v = value()?;
                    port = v.parse().map_err(|_| EnvError::GameArg(format!("-port {v}")))?;
                    if let NetRole::Host { port: p, .. } = &mut self.role {
                        *p = port;
                    }
                }
                "-join" => self.role = NetRole::Join { addr: value()?.to_string() },
                other => log::warn!("ignoring unsupported game argument '{other}'"),
            }
        }
        Ok(())
    }

    /// Builds the world (or connects) and starts the first episode.
    pub fn init(&mut self) -> Result<(), EnvError> {
        self.close();
        self.config.validate()?;
        self.episode = 0;
        self.backend = Some(match self.role.clone() {
            NetRole::Local => self.start_local(self.config.seed)?,
            NetRole::Host { players, port } => {
                let mut cfg = self.config.clone();
                cfg.players = players.max(1);
                let opts = HostOptions {
                    bind: format!("127.0.0.1:{port}"),
                    ..HostOptions::new(cfg)
                };
                let host = Host::bind(opts)?;
                let addr = host.local_addr().to_string();
                let handle = std::thread::spawn(move || {
                    if let Err(e) = host.run() {
                        log::error!("host: {e}");
                    }
                });
                let client = Client::connect(&addr, &self.config.player_name, ClientOptions::default())?;
                Backend::Net { client: Box::new(client), host: Some(handle), finished: false }
            }
            NetRole::Join { addr } => {
                let addr = if addr.contains(':') { addr } else { format!("{addr}:{}", crate::net::DEFAULT_PORT) };
                let client = Client::connect(&addr, &self.config.player_name, ClientOptions::default())?;
                Backend::Net { client: Box::new(client), host: None, finished: false }
            }
        });
        self.cache = None;
        Ok(())
    }

    fn start_local(&self, seed: u64) -> Result<Backend, EnvError> {
        let core = LocalCore::new(&self.config, seed)?;
        let shared = Arc::new(Shared { core: Mutex::new(core), tick: Condvar::new(), spectator: Condvar::new() });
        let clock = (!self.config.mode.is_sync()).then(|| {
            let s = shared.clone();
            std::thread::spawn(move || run_clock(s))
        });
        Ok(Backend::Local { shared, clock })
    }

    /// Restarts the episode with the next seed in sequence (local only).
    pub fn new_episode(&mut self) -> Result<(), EnvError> {
        if matches!(self.backend, Some(Backend::Net { .. })) {
            return Err(EnvError::Mode("local"));
        }
        self.close();
        self.episode += 1;
        self.backend = Some(self.start_local(self.config.seed.wrapping_add(self.episode))?);
        self.cache = None;
        Ok(())
    }

    /// Stops the clock thread and disconnects.
    pub fn close(&mut self) {
        match self.backend.take() {
            Some(Backend::Local { shared, clock }) => {
                shared.core.lock().expect("env lock").stopped = true;
                shared.tick.notify_all();
                shared.spectator.notify_all();
                if let Some(c) = clock {
                    let _ = c.join();
                }
            }
            Some(Backend::Net { client, host, .. }) => {
                drop(client);
                if let Some(h) = host {
                    let _ = h.join();
                }
            }
            None => {}
        }
        self.cache = None;
    }

    fn local(&self) -> Result<&Arc<Shared>, EnvError> {
        match &self.backend {
            Some(Backend::Local { shared, .. }) => Ok(shared),
            Some(Backend::Net { .. }) => Err(EnvError::Mode("local")),
            None => Err(EnvError::NotInitialized),
        }
    }

    fn lock(&self) -> Result<MutexGuard<'_, LocalCore>, EnvError> {
        Ok(self.local()?.core.lock().expect("env lock"))
    }

    /// Runs `f` against the current world.
    pub fn with_world<R>(&self, f: impl FnOnce(&WorldState) -> R) -> Result<R, EnvError> {
        match &self.backend {
            Some(Backend::Local { shared, .. }) => Ok(f(&shared.core.lock().expect("env lock").world)),
            Some(Backend::Net { client, .. }) => Ok(f(client.world())),
            None => Err(EnvError::NotInitialized),
        }
    }

    pub fn player_id(&self) -> PlayerId {
        match &self.backend {
            Some(Backend::Net { client, .. }) => client.player_id(),
            _ => 0,
        }
    }

    pub fn tic(&self) -> u32 {
        self.with_world(|w| w.tic).unwrap_or(0)
    }

    pub fn state_hash(&self) -> Result<u64, EnvError> {
        self.with_world(crate::sim::state_hash)
    }

    pub fn is_episode_finished(&self) -> bool {
        match &self.backend {
            Some(Backend::Local { shared, .. }) => shared.core.lock().expect("env lock").finished,
            Some(Backend::Net { finished, .. }) => *finished,
            None => false,
        }
    }

    pub fn is_player_dead(&self) -> bool {
        let me = self.player_id();
        self.with_world(|w| w.actors.get(me).is_some_and(|a| !a.alive)).unwrap_or(false)
    }

    /// Current observation, rendered once per tic and cached.
    pub fn get_state(&mut self) -> Result<Arc<EnvState>, EnvError> {
        if self.is_episode_finished() {
            return Err(EnvError::EpisodeFinished);
        }
        let tic = self.tic();
        if let Some(s) = &self.cache {
            if s.tic == tic {
                return Ok(s.clone());
            }
        }
        let me = self.player_id();
        let cfg = &self.config;
        let build = |w: &WorldState, last: Option<TicCmd>, finished: bool| EnvState {
            tic: w.tic,
            frame: render_frame(w, me, &cfg.render),
            game_variables: cfg.available_game_variables.iter().map(|v| v.read(w, me)).collect(),
            last_action: last.map(|c| cmd_to_action(&cfg.available_buttons, &c)),
            episode_finished: finished,
            player_dead: w.actors.get(me).is_some_and(|a| !a.alive),
        };
        let state = match &self.backend {
            Some(Backend::Local { shared, .. }) => {
                let core = shared.core.lock().expect("env lock");
                let last = cfg.mode.is_spectator().then_some(core.last_human_cmd);
                build(&core.world, last, core.finished)
            }
            Some(Backend::Net { client, finished, .. }) => build(client.world(), None, *finished),
            None => return Err(EnvError::NotInitialized),
        };
        let state = Arc::new(state);
        self.cache = Some(state.clone());
        Ok(state)
    }

    /// Repeats `action` for `skip` tics and returns the summed reward.
    ///
    /// In asynchronous modes the action is handed to the clock, which
    /// applies it to the next `skip` tics; tics that passed before the call
    /// already ran with the empty action.
    pub fn make_action(&mut self, action: &[f64], skip: u32) -> Result<f64, EnvError> {
        if skip == 0 {
            return Err(EnvError::Skip);
        }
        let cmd = action_to_cmd(&self.config.available_buttons, action)?;
        if self.config.mode.is_spectator() {
            return Err(EnvError::Mode("player"));
        }
        self.submit(cmd, skip)
    }

    fn submit(&mut self, cmd: TicCmd, skip: u32) -> Result<f64, EnvError> {
        if self.is_episode_finished() {
            return Err(EnvError::EpisodeFinished);
        }
        let rewards = self.config.rewards;
        match self.backend.as_mut().ok_or(EnvError::NotInitialized)? {
            Backend::Local { shared, .. } => {
                let mut core = shared.core.lock().expect("env lock");
                if self.config.mode.is_sync() {
                    let mut total = 0.0;
                    for _ in 0..skip {
                        if core.finished {
                            break;
                        }
                        total += core.tick(cmd)?;
                    }
                    Ok(total)
                } else {
                    let target = core.world.tic + skip;
                    core.pending = Some((cmd, skip));
                    core.reward_window = (core.world.tic, 0.0);
                    while core.world.tic < target && !core.finished && !core.stopped {
                        core = shared.tick.wait(core).expect("env lock");
                    }
                    Ok(core.reward_window.1)
                }
            }
            Backend::Net { client, finished, .. } => {
                let me = client.player_id();
                let mut total = 0.0;
                for _ in 0..skip {
                    client.send_action(cmd)?;
                    match client.next_tic()? {
                        Some(events) => {
                            total += crate::scenario::reward_for(&events, &rewards, me);
                        }
                        None => {
                            *finished = true;
                            break;
                        }
                    }
                }
                Ok(total)
            }
        }
    }

    /// Asks for a respawn. In synchronous local play an eligible request
    /// takes effect immediately by running one tic with the respawn bit;
    /// otherwise it rides on the next tic's command.
    pub fn respawn_player(&mut self) -> Result<RespawnOutcome, EnvError> {
        let me = self.player_id();
        let (alive, allowed, tic) =
            self.with_world(|w| w.actors.get(me).map(|a| (a.alive, a.respawn_allowed_at_tic, w.tic)))?.ok_or(SimError::UnknownActor(me))?;
        if alive {
            return Ok(RespawnOutcome::AlreadyAlive);
        }
        if tic < allowed {
            return Ok(RespawnOutcome::NotEligible { allowed_at_tic: allowed });
        }
        match &self.backend {
            Some(Backend::Local { shared, .. }) if self.config.mode.is_sync() && !self.config.mode.is_spectator() => {
                shared.core.lock().expect("env lock").tick(TicCmd::new(Buttons::RESPAWN))?;
            }
            Some(Backend::Local { shared, .. }) => shared.core.lock().expect("env lock").respawn_requested = true,
            Some(Backend::Net { .. }) => {
                self.submit(TicCmd::new(Buttons::RESPAWN), 1)?;
            }
            None => return Err(EnvError::NotInitialized),
        }
        Ok(RespawnOutcome::Respawned(crate::sim::Event::Respawn { actor: me }))
    }

    /// Handle for feeding human input from another thread.
    pub fn spectator_handle(&self) -> Result<SpectatorHandle, EnvError> {
        if !self.config.mode.is_spectator() {
            return Err(EnvError::Mode("spectator"));
        }
        Ok(SpectatorHandle { shared: self.local()?.clone() })
    }

    /// Sets the human-controlled action for the next tic.
    pub fn spectator_input(&mut self, action: &[f64]) -> Result<(), EnvError> {
        let cmd = action_to_cmd(&self.config.available_buttons, action)?;
        self.spectator_handle()?.send(cmd);
        Ok(())
    }

    /// Spectator-mode counterpart of [`Env::make_action`]: lets `skip` tics
    /// pass under human control. In SYNC_SPECTATOR each tic waits for input.
    pub fn advance_action(&mut self, skip: u32) -> Result<f64, EnvError> {
        self.try_advance_action(skip, None).map(|r| r.unwrap_or(0.0))
    }

    /// Like [`Env::advance_action`] but gives up after `timeout` without
    /// input in SYNC_SPECTATOR, returning `None` with the tic unchanged.
    pub fn try_advance_action(&mut self, skip: u32, timeout: Option<Duration>) -> Result<Option<f64>, EnvError> {
        if !self.config.mode.is_spectator() {
            return Err(EnvError::Mode("spectator"));
        }
        if skip == 0 {
            return Err(EnvError::Skip);
        }
        if self.is_episode_finished() {
            return Err(EnvError::EpisodeFinished);
        }
        let shared = self.local()?.clone();
        let mut core = shared.core.lock().expect("env lock");
        if self.config.mode.is_sync() {
            let mut total = 0.0;
            for _ in 0..skip {
                let deadline = timeout.map(|t| Instant::now() + t);
                let cmd = loop {
                    if let Some(c) = core.spectator_input.take() {
                        break c;
                    }
                    match deadline {
                        None => core = shared.spectator.wait(core).expect("env lock"),
                        Some(d) => {
                            let now = Instant::now();
                            if now >= d {
                                return Ok(None);
                            }
                            core = shared.spectator.wait_timeout(core, d - now).expect("env lock").0;
                        }
                    }
                    if core.stopped {
                        return Err(EnvError::NotInitialized);
                    }
                };
                total += core.tick(cmd)?;
                if core.finished {
                    break;
                }
            }
            Ok(Some(total))
        } else {
            let target = core.world.tic + skip;
            core.reward_window = (core.world.tic, 0.0);
            while core.world.tic < target && !core.finished && !core.stopped {
                core = shared.tick.wait(core).expect("env lock");
            }
            Ok(Some(core.reward_window.1))
        }
    }

    /// Tics that ran with a substituted empty action for this player.
    pub fn missed_tics(&self) -> u32 {
        self.lock().map(|c| c.missed).unwrap_or(0)
    }

    /// Replay of the current episode up to now (local only).
    pub fn replay_bytes(&self) -> Result<Vec<u8>, EnvError> {
        Ok(self.lock()?.replay_snapshot())
    }
}

impl Drop for Env {
    fn drop(&mut self) {
        self.close();
    }
}

fn run_clock(shared: Arc<Shared>) {
    let period = Duration::from_secs_f64(1.0 / TICS_PER_SECOND as f64);
    let start = Instant::now();
    let mut n: u32 = 0;
    loop {
        n += 1;
        let deadline = start + period * n;
        let now = Instant::now();
        if deadline > now {
            std::thread::sleep(deadline - now);
        }
        let mut core = shared.core.lock().expect("env lock");
        if core.stopped || core.finished {
            shared.tick.notify_all();
            return;
        }
        let cmd = core.take_async_cmd();
        if let Err(e) = core.tick(cmd) {
            log::error!("clock step failed: {e}");
            core.stopped = true;
        }
        shared.tick.notify_all();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Rewards;

    fn env(mode: Mode) -> Env {
        let mut cfg = ScenarioConfig::default();
        cfg.mode = mode;
        cfg.render = crate::render::RenderOptions::with_size(64, 48);
        cfg.available_buttons = vec![Button::MoveForward, Button::TurnLeft, Button::TurnDelta];
        cfg.rewards = Rewards { living_reward: -0.01, ..Default::default() };
        let mut e = Env::new(cfg);
        e.init().unwrap();
        e
    }

    #[test]
    fn fresh_episode() {
        let mut e = env(Mode::SyncPlayer);
        assert_eq!(e.tic(), 0);
        assert!(!e.is_episode_finished() && !e.is_player_dead());
        let s = e.get_state().unwrap();
        assert_eq!(s.game_variables[0], 100.0);
        assert_eq!(s.frame.screen.len(), 64 * 48 * 3);
        assert!(s.frame.depth.is_none());
    }

    #[test]
    fn skip_sums_rewards() {
        let mut e = env(Mode::SyncPlayer);
        let r = e.make_action(&[0.0, 0.0, 0.0], 4).unwrap();
        assert!((r + 0.04).abs() < 1e-12);
        assert_eq!(e.tic(), 4);
    }

    #[test]
    fn arity_checked() {
        let mut e = env(Mode::SyncPlayer);
        assert!(matches!(e.make_action(&[1.0], 1), Err(EnvError::Arity { expected: 3, got: 1 })));
        assert!(matches!(e.make_action(&[0.0; 3], 0), Err(EnvError::Skip)));
    }

    #[test]
    fn turn_delta_clamped() {
        let b = [Button::TurnDelta];
        assert_eq!(action_to_cmd(&b, &[40.0]).unwrap().turn_delta, 1500);
        assert_eq!(action_to_cmd(&b, &[-2.5]).unwrap().turn_delta, -250);
        assert_eq!(action_to_cmd(&b, &[f64::NAN]).unwrap().turn_delta, 0);
    }

    #[test]
    fn state_is_cached_per_tic() {
        let mut e = env(Mode::SyncPlayer);
        let a = e.get_state().unwrap();
        let b = e.get_state().unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        e.make_action(&[1.0, 0.0, 0.0], 1).unwrap();
        assert!(!Arc::ptr_eq(&a, &e.get_state().unwrap()));
    }

    #[test]
    fn spectator_mode_rules() {
        let mut e = env(Mode::SyncPlayer);
        assert!(matches!(e.spectator_input(&[0.0; 3]), Err(EnvError::Mode(_))));
        let mut s = env(Mode::SyncSpectator);
        assert!(matches!(s.make_action(&[0.0; 3], 1), Err(EnvError::Mode(_))));
        assert_eq!(s.try_advance_action(1, Some(Duration::from_millis(20))).unwrap(), None);
        assert_eq!(s.tic(), 0);
        s.spectator_input(&[1.0, 0.0, 2.0]).unwrap();
        assert!(s.try_advance_action(1, Some(Duration::from_millis(20))).unwrap().is_some());
        assert_eq!(s.tic(), 1);
        assert_eq!(s.get_state().unwrap().last_action, Some(vec![1.0, 0.0, 2.0]));
    }
}
