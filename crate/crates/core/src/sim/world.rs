use std::sync::Arc;

use crate::fixed::{Angle, Fixed, Vec2};
use crate::rng::Rng;
use crate::scenario::map::{CellPos, MapGrid};

use super::tuning::{Rules, Tuning, Weapon};
use super::types::{Actor, Barrel, Counters, Event, Item, PlayerId, Projectile};
use super::SimError;

/// Most players a single world accepts.
pub const MAX_PLAYERS: usize = 16;

/// Cells a player has seen, for the discovered-area automap. Lives beside the
/// simulation state and is not part of the state hash.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Discovered {
    cells: Vec<bool>,
}

impl Discovered {
    pub fn new(len: usize) -> Discovered {
        Discovered { cells: vec![false; len] }
    }

    pub fn mark(&mut self, index: usize) {
        if let Some(c) = self.cells.get_mut(index) {
            *c = true;
        }
    }

    pub fn contains(&self, index: usize) -> bool {
        self.cells.get(index).copied().unwrap_or(false)
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    pub fn clear(&mut self) {
        self.cells.iter_mut().for_each(|c| *c = false);
    }
}

/// Complete deterministic simulation state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorldState {
    pub tic: u32,
    pub rng: Rng,
    pub grid: Arc<MapGrid>,
    pub actors: Vec<Actor>,
    pub projectiles: Vec<Projectile>,
    pub items: Vec<Item>,
    pub barrels: Vec<Barrel>,
    pub spawn_points: Vec<CellPos>,
    pub counters: Vec<Counters>,
    pub rules: Rules,
    pub tuning: Tuning,
    pub discovered: Vec<Discovered>,
    pub(crate) next_entity_id: u32,
    pub(crate) next_attack_id: u32,
    /// Attack ids already credited as damaging during the current tic.
    pub(crate) credited_attacks: Vec<u32>,
}

impl WorldState {
    /// Builds a world at tic 0 with `players` actors placed one after
    /// another by the farthest-spawn rule.
    pub fn new(grid: Arc<MapGrid>, players: usize, rules: Rules, seed: u64) -> Result<WorldState, SimError> {
        WorldState::with_tuning(grid, players, rules, Tuning::default(), seed)
    }

    pub fn with_tuning(
        grid: Arc<MapGrid>,
        players: usize,
        rules: Rules,
        tuning: Tuning,
        seed: u64,
    ) -> Result<WorldState, SimError> {
        if players == 0 || players > MAX_PLAYERS {
            return Err(SimError::PlayerCount(players));
        }
        if grid.spawns.is_empty() {
            return Err(SimError::NoSpawnPoints);
        }
        let mut next_id = players as u32;
        let items = grid
            .items
            .iter()
            .map(|(kind, cell)| {
                let item = Item { id: next_id, kind: *kind, cell: *cell, respawn_at_tic: 0 };
                next_id += 1;
                item
            })
            .collect();
        let barrels = grid
            .barrels
            .iter()
            .map(|cell| {
                let b = Barrel { id: next_id, cell: *cell, health: tuning.barrel_health, destroyed: false };
                next_id += 1;
                b
            })
            .collect();
        let cells = grid.width() * grid.height();
        let mut world = WorldState {
            tic: 0,
            rng: Rng::new(seed),
            spawn_points: grid.spawns.clone(),
            grid,
            actors: Vec::with_capacity(players),
            projectiles: Vec::new(),
            items,
            barrels,
            counters: vec![Counters::default(); players],
            rules,
            tuning,
            discovered: vec![Discovered::new(cells); players],
            next_entity_id: next_id,
            next_attack_id: 1,
            credited_attacks: Vec::new(),
        };
        for id in 0..players {
            world.actors.push(Actor {
                id,
                pos: Vec2::ZERO,
                velocity: Vec2::ZERO,
                angle: Angle::ZERO,
                health: 0,
                armor: 0,
                has_rocket_launcher: false,
                weapon: Weapon::Pistol,
                bullets: 0,
                rockets: 0,
                alive: false,
                cooldown: 0,
                protection_until_tic: 0,
                respawn_allowed_at_tic: 0,
                life_distance: 0,
            });
            world.place(id)?;
            world.actors[id].protection_until_tic = 0;
        }
        Ok(world)
    }

    pub fn player_count(&self) -> usize {
        self.actors.len()
    }

    pub fn actor(&self, id: PlayerId) -> Option<&Actor> {
        self.actors.get(id)
    }

    pub(crate) fn alloc_entity_id(&mut self) -> u32 {
        let id = self.next_entity_id;
        self.next_entity_id = self.next_entity_id.wrapping_add(1);
        id
    }

    pub(crate) fn alloc_attack_id(&mut self) -> u32 {
        let id = self.next_attack_id;
        self.next_attack_id = self.next_attack_id.wrapping_add(1);
        id
    }

    pub fn next_ids(&self) -> (u32, u32) {
        (self.next_entity_id, self.next_attack_id)
    }

    /// Puts an actor at the best spawn with a fresh loadout.
    fn place(&mut self, id: PlayerId) -> Result<(), SimError> {
        let spawn = select_spawn(self, id)?;
        let center = spawn.center();
        let look = self.map_center() - center;
        let rules = self.rules;
        let full = self.tuning.full_health;
        let now = self.tic;
        let a = &mut self.actors[id];
        a.pos = center;
        a.velocity = Vec2::ZERO;
        a.angle = Angle::from_vector(look.x.raw() as i64, look.y.raw() as i64);
        a.health = full;
        a.armor = 0;
        a.has_rocket_launcher = rules.start_weapon == Weapon::RocketLauncher;
        a.weapon = rules.start_weapon;
        a.bullets = rules.start_bullets;
        a.rockets = rules.start_rockets;
        a.alive = true;
        a.cooldown = 0;
        a.protection_until_tic = now + rules.spawn_protection;
        a.life_distance = 0;
        Ok(())
    }

    fn map_center(&self) -> Vec2 {
        Vec2::new(
            Fixed::from_int(self.grid.width() as i32 * 64),
            Fixed::from_int(self.grid.height() as i32 * 64),
        )
    }
}

/// Spawn point maximizing the minimum distance to every other living actor.
/// Ties, including the case with nobody else alive, go to the lowest index.
pub fn select_spawn(world: &WorldState, respawning: PlayerId) -> Result<CellPos, SimError> {
    if world.spawn_points.is_empty() {
        return Err(SimError::NoSpawnPoints);
    }
    let mut best: Option<(CellPos, Option<i128>)> = None;
    for &spawn in &world.spawn_points {
        let c = spawn.center();
        let nearest = world
            .actors
            .iter()
            .filter(|a| a.alive && a.id != respawning)
            .map(|a| a.pos.dist_sq_raw(c))
            .min();
        let better = match &best {
            None => true,
            // None means unbounded (no living opponents)
            Some((_, cur)) => match (nearest, cur) {
                (None, _) => false,
                (Some(_), None) => false,
                (Some(n), Some(c)) => n > *c,
            },
        };
        if better {
            best = Some((spawn, nearest));
        }
    }
    Ok(best.expect("spawn list is non-empty").0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RespawnOutcome {
    Respawned(Event),
    AlreadyAlive,
    NotEligible { allowed_at_tic: u32 },
}

/// Brings a dead actor back at the farthest spawn with spawn protection.
pub fn respawn(world: &mut WorldState, id: PlayerId) -> Result<RespawnOutcome, SimError> {
    let actor = world.actors.get(id).ok_or(SimError::UnknownActor(id))?;
    if actor.alive {
        return Ok(RespawnOutcome::AlreadyAlive);
    }
    if world.tic < actor.respawn_allowed_at_tic {
        return Ok(RespawnOutcome::NotEligible { allowed_at_tic: actor.respawn_allowed_at_tic });
    }
    world.place(id)?;
    Ok(RespawnOutcome::Respawned(Event::Respawn { actor: id }))
}
