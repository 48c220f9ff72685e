//! Deterministic fixed-timestep deathmatch simulation.
//!
//! A [`WorldState`] is a plain value. [`step`] advances it by one tic from a
//! slice of per-player [`TicCmd`]s and reports what happened as [`Event`]s.
//! Gameplay math is integer-only, so equal inputs give equal
//! [`state_hash`]es on every platform.

mod combat;
pub mod geometry;
mod hash;
mod step;
mod tuning;
mod types;
mod world;

use thiserror::Error;

pub use combat::{fire_weapon, resolve_damage, visibility_test};
pub use hash::{counters_bytes, counters_from_bytes, state_hash, Fnv1a};
pub use step::step;
pub use tuning::{Rules, Tuning, Weapon};
pub use types::{
    Actor, Barrel, Buttons, Counters, Damage, Event, Item, PlayerId, Projectile, ProjectileKind, TicCmd,
};
pub use world::{respawn, select_spawn, Discovered, RespawnOutcome, WorldState, MAX_PLAYERS};

/// Tic rate of the simulation.
pub const TICS_PER_SECOND: u32 = 35;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("expected {expected} commands, got {got}")]
    CommandCount { expected: usize, got: usize },
    #[error("map has no spawn points")]
    NoSpawnPoints,
    #[error("player count {0} outside 1..=16")]
    PlayerCount(usize),
    #[error("no actor with id {0}")]
    UnknownActor(usize),
}
