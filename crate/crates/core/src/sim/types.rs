use crate::fixed::{Angle, Vec2};
use crate::scenario::map::{CellPos, ItemKind};

use super::tuning::Weapon;

/// Index of a player slot. Actors are stored at their player id.
pub type PlayerId = usize;

/// Per-tic button bitmask as carried on the wire and in replays.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Buttons(pub u32);

impl Buttons {
    pub const ATTACK: u32 = 1 << 0;
    pub const MOVE_FORWARD: u32 = 1 << 1;
    pub const MOVE_BACKWARD: u32 = 1 << 2;
    pub const MOVE_LEFT: u32 = 1 << 3;
    pub const MOVE_RIGHT: u32 = 1 << 4;
    pub const TURN_LEFT: u32 = 1 << 5;
    pub const TURN_RIGHT: u32 = 1 << 6;
    pub const SELECT_WEAPON_1: u32 = 1 << 7;
    pub const SELECT_WEAPON_2: u32 = 1 << 8;
    /// Request to respawn; ignored while alive or before the delay elapses.
    pub const RESPAWN: u32 = 1 << 31;

    pub fn has(self, bit: u32) -> bool {
        self.0 & bit != 0
    }

    pub fn with(self, bit: u32) -> Buttons {
        Buttons(self.0 | bit)
    }
}

/// One player's input for one tic: buttons plus an analog turn in
/// hundredths of a degree (positive turns right).
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TicCmd {
    pub buttons: Buttons,
    pub turn_delta: i16,
}

impl TicCmd {
    pub const EMPTY: TicCmd = TicCmd { buttons: Buttons(0), turn_delta: 0 };

    pub fn new(buttons: u32) -> TicCmd {
        TicCmd { buttons: Buttons(buttons), turn_delta: 0 }
    }

    pub fn is_empty(&self) -> bool {
        *self == TicCmd::EMPTY
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Actor {
    pub id: PlayerId,
    pub pos: Vec2,
    /// Displacement applied during the most recent tic.
    pub velocity: Vec2,
    pub angle: Angle,
    pub health: i32,
    pub armor: i32,
    pub has_rocket_launcher: bool,
    pub weapon: Weapon,
    pub bullets: u32,
    pub rockets: u32,
    pub alive: bool,
    pub cooldown: u32,
    pub protection_until_tic: u32,
    pub respawn_allowed_at_tic: u32,
    /// Distance walked during the current life, raw 16.16 in 64 bits.
    pub life_distance: i64,
}

impl Actor {
    pub fn ammo(&self, weapon: Weapon) -> u32 {
        match weapon {
            Weapon::Pistol => self.bullets,
            Weapon::RocketLauncher => self.rockets,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ProjectileKind {
    Rocket,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projectile {
    pub id: u32,
    pub owner: PlayerId,
    pub attack_id: u32,
    pub pos: Vec2,
    pub velocity: Vec2,
    pub kind: ProjectileKind,
    pub age: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub id: u32,
    pub kind: ItemKind,
    pub cell: CellPos,
    /// Zero while present, otherwise the tic at which it reappears.
    pub respawn_at_tic: u32,
}

impl Item {
    pub fn present(&self) -> bool {
        self.respawn_at_tic == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Barrel {
    pub id: u32,
    pub cell: CellPos,
    pub health: i32,
    pub destroyed: bool,
}

/// Per-player event counters every statistic is derived from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Counters {
    pub kills: u32,
    pub suicides: u32,
    pub deaths: u32,
    pub attacks: u32,
    pub attacks_visible: u32,
    pub attacks_damaging: u32,
    pub hits_taken: u32,
    pub damage_taken_hp: u32,
    pub picked_ammo: u32,
    pub picked_medikits: u32,
    pub picked_armors: u32,
    pub alive_tics: u32,
    /// Distance walked while alive, raw 16.16 in 64 bits.
    pub distance_raw: i64,
}

impl Counters {
    pub fn frags(&self) -> i64 {
        self.kills as i64 - self.suicides as i64
    }

    pub fn items_picked(&self) -> u32 {
        self.picked_ammo + self.picked_medikits + self.picked_armors
    }

    pub fn distance_units(&self) -> f64 {
        self.distance_raw as f64 / 65536.0
    }

    /// Field-wise sum, used to aggregate several matches.
    pub fn accumulate(&mut self, other: &Counters) {
        self.kills += other.kills;
        self.suicides += other.suicides;
        self.deaths += other.deaths;
        self.attacks += other.attacks;
        self.attacks_visible += other.attacks_visible;
        self.attacks_damaging += other.attacks_damaging;
        self.hits_taken += other.hits_taken;
        self.damage_taken_hp += other.damage_taken_hp;
        self.picked_ammo += other.picked_ammo;
        self.picked_medikits += other.picked_medikits;
        self.picked_armors += other.picked_armors;
        self.alive_tics += other.alive_tics;
        self.distance_raw += other.distance_raw;
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Damage {
    pub attack_id: Option<u32>,
    pub attacker: Option<PlayerId>,
    pub victim: PlayerId,
    pub amount: i32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Attack { attacker: PlayerId, attack_id: u32, weapon: Weapon, enemy_visible: bool },
    Damage(Damage),
    /// `killer` equals `victim` for self-inflicted deaths and is `None` for
    /// environmental ones.
    Death { victim: PlayerId, killer: Option<PlayerId> },
    Pickup { actor: PlayerId, kind: ItemKind },
    Respawn { actor: PlayerId },
}
