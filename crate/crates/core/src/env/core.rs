use std::sync::Arc;

use crate::bots::BotBrain;
use crate::render::update_discovery;
use crate::replay::{footer_bytes, ReplayWriter};
use crate::scenario::{reward_for, Mode, Rewards, ScenarioConfig};
use crate::sim::{step, Buttons, SimError, TicCmd, WorldState};

/// Single-process game state behind an [`super::Env`]. The agent is player 0;
/// configured bots fill the following slots.
pub(super) struct LocalCore {
    pub world: WorldState,
    bots: Vec<Option<BotBrain>>,
    mode: Mode,
    rewards: Rewards,
    timeout: u32,
    frag_limit: u32,
    ends_on_death: bool,
    discover: bool,
    recorder: ReplayWriter<Vec<u8>>,
    pub finished: bool,
    pub stopped: bool,
    /// Asynchronous player action and how many more tics it applies to.
    pub pending: Option<(TicCmd, u32)>,
    /// Tic the current async request started at and the reward since.
    pub reward_window: (u32, f64),
    pub spectator_input: Option<TicCmd>,
    pub last_human_cmd: TicCmd,
    pub respawn_requested: bool,
    pub missed: u32,
}

impl LocalCore {
    pub fn new(cfg: &ScenarioConfig, seed: u64) -> Result<LocalCore, SimError> {
        let mut world = WorldState::new(Arc::new(cfg.map.clone()), cfg.players, cfg.rules(), seed)?;
        let bots = (0..cfg.players)
            .map(|slot| match slot {
                0 => None,
                s => cfg.bots.get(s - 1).map(|k| BotBrain::new(*k, seed, s)),
            })
            .collect();
        let discover = cfg.render.automap_enabled && !cfg.render.automap_full;
        if discover {
            update_discovery(&mut world, 0);
        }
        let mut header = cfg.clone();
        header.seed = seed;
        let recorder = ReplayWriter::for_config(Vec::new(), &header).expect("writing to memory");
        Ok(LocalCore {
            world,
            bots,
            mode: cfg.mode,
            rewards: cfg.rewards,
            timeout: cfg.episode_timeout,
            frag_limit: cfg.frag_limit,
            ends_on_death: cfg.episode_ends_on_death,
            discover,
            recorder,
            finished: false,
            stopped: false,
            pending: None,
            reward_window: (0, 0.0),
            spectator_input: None,
            last_human_cmd: TicCmd::EMPTY,
            respawn_requested: false,
            missed: 0,
        })
    }

    /// Command for the next clock tic in an asynchronous mode.
    pub fn take_async_cmd(&mut self) -> TicCmd {
        let cmd = match self.mode {
            Mode::AsyncSpectator => self.spectator_input.take(),
            _ => match &mut self.pending {
                Some((cmd, left)) if *left > 0 => {
                    *left -= 1;
                    Some(*cmd)
                }
                _ => None,
            },
        };
        cmd.unwrap_or_else(|| {
            self.missed += 1;
            TicCmd::EMPTY
        })
    }

    /// Advances one tic with `cmd` for player 0 and returns its reward.
    pub fn tick(&mut self, mut cmd: TicCmd) -> Result<f64, SimError> {
        if self.mode.is_spectator() {
            self.last_human_cmd = cmd;
        }
        if std::mem::take(&mut self.respawn_requested) {
            cmd.buttons = cmd.buttons.with(Buttons::RESPAWN);
        }
        let mut cmds = Vec::with_capacity(self.bots.len());
        cmds.push(cmd);
        for (slot, bot) in self.bots.iter_mut().enumerate().skip(1) {
            cmds.push(bot.as_mut().map_or(TicCmd::EMPTY, |b| b.act(&self.world, slot)));
        }
        let events = step(&mut self.world, &cmds)?;
        self.recorder.record(&cmds, &self.world).expect("writing to memory");
        if self.discover {
            update_discovery(&mut self.world, 0);
        }
        let r = reward_for(&events, &self.rewards, 0);
        self.reward_window.1 += r;
        self.finished = self.episode_over();
        Ok(r)
    }

    fn episode_over(&self) -> bool {
        let w = &self.world;
        (self.timeout > 0 && w.tic >= self.timeout)
            || (self.frag_limit > 0 && w.counters.iter().any(|c| c.frags() >= self.frag_limit as i64))
            || (self.ends_on_death && !w.actors[0].alive)
    }

    pub fn replay_snapshot(&self) -> Vec<u8> {
        let mut b = self.recorder.get_ref().clone();
        b.extend(footer_bytes(&self.world));
        b
    }
}
