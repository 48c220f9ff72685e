//! Scripted opponents used for training fill, tests and tournaments.
//!
//! Bots read the world directly: the static grid for path finding and the
//! same visibility test the simulation uses for its statistics. They turn
//! only through the analog turn delta, so a bot can predict its facing after
//! the tic exactly and a FIGHTER never fires without an enemy in view.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::fixed::{Angle, Vec2};
use crate::rng::Rng;
use crate::scenario::map::{CellPos, ItemKind, MapGrid};
use crate::sim::geometry::{sees, segment_clear};
use crate::sim::{Buttons, PlayerId, TicCmd, Weapon, WorldState};

/// Health below which a FIGHTER heads for the nearest medikit.
pub const LOW_HEALTH: i32 = 30;
/// Largest aim error, in hundredths of a degree, at which a FIGHTER fires.
pub const AIM_TOLERANCE_CD: i32 = 200;
const MAX_TURN_CD: i32 = 1500;
const ARRIVE_UNITS: i64 = 24;
const STUCK_TICS: u32 = 20;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum BotKind {
    Idle,
    Wanderer,
    Fighter,
}

impl BotKind {
    pub fn name(self) -> &'static str {
        match self {
            BotKind::Idle => "idle",
            BotKind::Wanderer => "wanderer",
            BotKind::Fighter => "fighter",
        }
    }
}

impl fmt::Display for BotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BotKind {
    type Err = String;
    fn from_str(s: &str) -> Result<BotKind, String> {
        match s.to_ascii_lowercase().as_str() {
            "idle" => Ok(BotKind::Idle),
            "wanderer" => Ok(BotKind::Wanderer),
            "fighter" => Ok(BotKind::Fighter),
            _ => Err(format!("unknown bot '{s}', expected idle, wanderer or fighter")),
        }
    }
}

/// `kind[:seed]` as given on the command line.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct BotSpec {
    pub kind: BotKind,
    pub seed: Option<u64>,
}

impl FromStr for BotSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<BotSpec, String> {
        let (kind, seed) = match s.split_once(':') {
            Some((k, v)) => (k, Some(v.parse::<u64>().map_err(|e| format!("bad bot seed '{v}': {e}"))?)),
            None => (s, None),
        };
        Ok(BotSpec { kind: kind.parse()?, seed })
    }
}

impl fmt::Display for BotSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.seed {
            Some(s) => write!(f, "{}:{s}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// Anything that picks a player's command from the current world.
pub trait Controller: Send {
    fn act(&mut self, world: &WorldState, me: PlayerId) -> TicCmd;
}

/// State of one scripted player.
#[derive(Clone, Debug)]
pub struct BotBrain {
    pub kind: BotKind,
    rng: Rng,
    path: VecDeque<CellPos>,
    goal: Option<CellPos>,
    last_pos: Vec2,
    still_tics: u32,
    strafe_right: bool,
}

impl BotBrain {
    /// A brain whose random choices derive from the match seed and slot.
    pub fn new(kind: BotKind, seed: u64, player: PlayerId) -> BotBrain {
        BotBrain {
            kind,
            rng: Rng::new(seed.wrapping_add(player as u64)),
            path: VecDeque::new(),
            goal: None,
            last_pos: Vec2::ZERO,
            still_tics: 0,
            strafe_right: false,
        }
    }

    pub fn waypoint(&self) -> Option<CellPos> {
        self.path.front().copied()
    }

    pub fn act(&mut self, world: &WorldState, me: PlayerId) -> TicCmd {
        let Some(a) = world.actors.get(me) else {
            return TicCmd::EMPTY;
        };
        if !a.alive {
            self.path.clear();
            self.goal = None;
            return TicCmd::new(Buttons::RESPAWN);
        }
        if self.kind == BotKind::Idle {
            return TicCmd::EMPTY;
        }
        if a.pos == self.last_pos {
            self.still_tics += 1;
        } else {
            self.still_tics = 0;
        }
        self.last_pos = a.pos;
        if self.still_tics >= STUCK_TICS {
            self.still_tics = 0;
            self.path.clear();
            self.goal = None;
        }

        if self.kind == BotKind::Fighter {
            if a.health < LOW_HEALTH {
                if let Some(cmd) = self.seek_medikit(world, me) {
                    return cmd;
                }
            }
            if let Some(cmd) = self.fight(world, me) {
                return cmd;
            }
        }
        self.wander(world, me)
    }

    fn fight(&mut self, world: &WorldState, me: PlayerId) -> Option<TicCmd> {
        let a = &world.actors[me];
        let grid = &world.grid;
        // nearest enemy with a clear line, ties to the lower id
        let target = world
            .actors
            .iter()
            .filter(|e| e.alive && e.id != me && segment_clear(grid, a.pos, e.pos))
            .min_by_key(|e| (a.pos.dist_sq_raw(e.pos), e.id))?;
        let desired = angle_to(a.pos, target.pos);
        let turn = centidegrees_between(a.angle, desired).clamp(-MAX_TURN_CD, MAX_TURN_CD);
        let facing = a.angle + Angle::from_centidegrees(turn);
        let mut buttons = 0;

        let dist_sq = a.pos.dist_sq_raw(target.pos);
        let near = (256i128 << 16) * (256i128 << 16);
        if a.has_rocket_launcher && a.rockets > 0 && dist_sq > near {
            if a.weapon != Weapon::RocketLauncher {
                buttons |= Buttons::SELECT_WEAPON_2;
            }
        } else if a.weapon != Weapon::Pistol {
            buttons |= Buttons::SELECT_WEAPON_1;
        }

        let aim_error = centidegrees_between(facing, desired).abs();
        let ready = a.cooldown <= 1 && a.ammo(a.weapon) > 0;
        if ready && aim_error <= AIM_TOLERANCE_CD && sees(grid, a.pos, facing, target.pos) {
            buttons |= Buttons::ATTACK;
        }
        if self.rng.below(35) == 0 {
            self.strafe_right = !self.strafe_right;
        }
        buttons |= if self.strafe_right { Buttons::MOVE_RIGHT } else { Buttons::MOVE_LEFT };
        if dist_sq > near {
            buttons |= Buttons::MOVE_FORWARD;
        }
        Some(TicCmd { buttons: Buttons(buttons), turn_delta: turn as i16 })
    }

    fn seek_medikit(&mut self, world: &WorldState, me: PlayerId) -> Option<TicCmd> {
        let here = CellPos::containing(world.actors[me].pos)?;
        let targets: Vec<CellPos> =
            world.items.iter().filter(|i| i.present() && i.kind == ItemKind::Medikit).map(|i| i.cell).collect();
        if targets.is_empty() {
            return None;
        }
        if !self.goal.is_some_and(|g| targets.contains(&g)) {
            let path = bfs(&world.grid, here, |c| targets.contains(&c))?;
            self.goal = path.back().copied().or(Some(here));
            self.path = path;
        }
        Some(self.follow(world, me))
    }

    fn wander(&mut self, world: &WorldState, me: PlayerId) -> TicCmd {
        let Some(here) = CellPos::containing(world.actors[me].pos) else {
            return TicCmd::EMPTY;
        };
        if self.path.is_empty() {
            let reachable = reachable_cells(&world.grid, here);
            if reachable.len() <= 1 {
                return TicCmd::EMPTY;
            }
            let goal = reachable[self.rng.below(reachable.len() as u32) as usize];
            self.path = bfs(&world.grid, here, |c| c == goal).unwrap_or_default();
            self.goal = Some(goal);
        }
        self.follow(world, me)
    }

    /// Steers along the current path, dropping waypoints on arrival.
    fn follow(&mut self, world: &WorldState, me: PlayerId) -> TicCmd {
        let a = &world.actors[me];
        let arrive = (ARRIVE_UNITS << 16) * (ARRIVE_UNITS << 16);
        while let Some(&wp) = self.path.front() {
            if a.pos.dist_sq_raw(wp.center()) <= arrive as i128 {
                self.path.pop_front();
            } else {
                break;
            }
        }
        let Some(wp) = self.path.front() else {
            self.goal = None;
            return TicCmd::EMPTY;
        };
        let desired = angle_to(a.pos, wp.center());
        let turn = centidegrees_between(a.angle, desired).clamp(-MAX_TURN_CD, MAX_TURN_CD);
        let after = centidegrees_between(a.angle + Angle::from_centidegrees(turn), desired).abs();
        let buttons = if after < 4500 { Buttons::MOVE_FORWARD } else { 0 };
        TicCmd { buttons: Buttons(buttons), turn_delta: turn as i16 }
    }
}

impl Controller for BotBrain {
    fn act(&mut self, world: &WorldState, me: PlayerId) -> TicCmd {
        BotBrain::act(self, world, me)
    }
}

fn angle_to(from: Vec2, to: Vec2) -> Angle {
    let d = to - from;
    Angle::from_vector(d.x.raw() as i64, d.y.raw() as i64)
}

/// Signed turn from `from` to `to` in hundredths of a degree, in (-18000, 18000].
fn centidegrees_between(from: Angle, to: Angle) -> i32 {
    let bam = to.0.wrapping_sub(from.0) as i32 as i64;
    // 2^32 BAM = 36000 cd; round to nearest
    let cd = (bam * 36000 + (1 << 31)).div_euclid(1 << 32);
    cd as i32
}

fn neighbors(grid: &MapGrid, c: CellPos) -> impl Iterator<Item = CellPos> + '_ {
    let (col, row) = (c.col as i64, c.row as i64);
    [(1, 0), (-1, 0), (0, 1), (0, -1)].into_iter().filter_map(move |(dc, dr)| {
        let (nc, nr) = (col + dc, row + dr);
        (!grid.is_wall(nc, nr)).then(|| CellPos::new(nc as u16, nr as u16))
    })
}

/// Floor cells reachable from `start`, in BFS order.
pub fn reachable_cells(grid: &MapGrid, start: CellPos) -> Vec<CellPos> {
    let w = grid.width();
    let mut seen = vec![false; w * grid.height()];
    let mut out = vec![start];
    seen[start.row as usize * w + start.col as usize] = true;
    let mut i = 0;
    while i < out.len() {
        let c = out[i];
        i += 1;
        for n in neighbors(grid, c) {
            let k = n.row as usize * w + n.col as usize;
            if !seen[k] {
                seen[k] = true;
                out.push(n);
            }
        }
    }
    out
}

/// Shortest 4-connected path from `start` (exclusive) to the first cell
/// satisfying `goal` (inclusive).
pub fn bfs(grid: &MapGrid, start: CellPos, goal: impl Fn(CellPos) -> bool) -> Option<VecDeque<CellPos>> {
    let w = grid.width();
    let idx = |c: CellPos| c.row as usize * w + c.col as usize;
    let mut parent: Vec<Option<CellPos>> = vec![None; w * grid.height()];
    let mut queue = VecDeque::from([start]);
    parent[idx(start)] = Some(start);
    while let Some(c) = queue.pop_front() {
        if goal(c) {
            let mut path = VecDeque::new();
            let mut cur = c;
            while cur != start {
                path.push_front(cur);
                cur = parent[idx(cur)].expect("visited cells have parents");
            }
            return Some(path);
        }
        for n in neighbors(grid, c) {
            if parent[idx(n)].is_none() {
                parent[idx(n)] = Some(c);
                queue.push_back(n);
            }
        }
    }
    None
}
