//! Gameplay constants in one table so experiments can vary them.
//!
//! The values are Doom-like magnitudes: a full run forward covers 10 units
//! per tic, which works out to roughly 29.5 km/h at 128 units = 3 m.

/// Tunable gameplay constants. Distances are whole game units, times are tics.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tuning {
    pub actor_radius: i32,
    pub forward_speed: i32,
    pub backward_speed: i32,
    pub strafe_speed: i32,
    /// Keyboard turn step in hundredths of a degree.
    pub turn_step_cd: i32,
    /// Bound on the analog turn delta, hundredths of a degree per tic.
    pub max_turn_delta_cd: i32,
    pub full_health: i32,
    pub max_armor: i32,
    pub pistol_cooldown: u32,
    pub rocket_cooldown: u32,
    pub pistol_damage_unit: i32,
    pub pistol_damage_rolls: u32,
    pub pistol_spread_cd: i32,
    pub hitscan_range: i32,
    pub rocket_speed: i32,
    pub rocket_direct_damage: i32,
    pub rocket_lifetime: u32,
    pub blast_damage: i32,
    pub blast_radius: i32,
    pub medikit_health: i32,
    pub armor_points: i32,
    pub clip_bullets: u32,
    pub box_rockets: u32,
    pub launcher_rockets: u32,
    pub max_bullets: u32,
    pub max_rockets: u32,
    pub barrel_health: i32,
    pub barrel_radius: i32,
    pub item_radius: i32,
    pub item_respawn_tics: u32,
}

impl Default for Tuning {
    fn default() -> Tuning {
        Tuning {
            actor_radius: 20,
            forward_speed: 10,
            backward_speed: 8,
            strafe_speed: 10,
            turn_step_cd: 500,
            max_turn_delta_cd: 1500,
            full_health: 100,
            max_armor: 100,
            pistol_cooldown: 10,
            rocket_cooldown: 30,
            pistol_damage_unit: 5,
            pistol_damage_rolls: 3,
            pistol_spread_cd: 200,
            hitscan_range: 2048,
            rocket_speed: 40,
            rocket_direct_damage: 80,
            rocket_lifetime: 350,
            blast_damage: 80,
            blast_radius: 128,
            medikit_health: 25,
            armor_points: 50,
            clip_bullets: 20,
            box_rockets: 10,
            launcher_rockets: 10,
            max_bullets: 200,
            max_rockets: 50,
            barrel_health: 20,
            barrel_radius: 16,
            item_radius: 20,
            item_respawn_tics: 1050,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Weapon {
    Pistol,
    RocketLauncher,
}

impl Weapon {
    /// Slot number as shown to agents (1 or 2).
    pub fn slot(self) -> u8 {
        match self {
            Weapon::Pistol => 1,
            Weapon::RocketLauncher => 2,
        }
    }
}

/// Match rules taken from the scenario.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rules {
    /// Minimum tics between death and respawn. Zero still means the next tic.
    pub respawn_delay: u32,
    pub spawn_protection: u32,
    pub start_weapon: Weapon,
    pub start_bullets: u32,
    pub start_rockets: u32,
}

impl Rules {
    /// 2016 edition: instant respawn, two seconds of protection.
    pub fn edition_2016() -> Rules {
        Rules { respawn_delay: 0, ..Rules::default() }
    }

    /// 2017 edition: ten seconds of obligatory waiting after death.
    pub fn edition_2017() -> Rules {
        Rules { respawn_delay: 350, ..Rules::default() }
    }
}

impl Default for Rules {
    fn default() -> Rules {
        Rules {
            respawn_delay: 0,
            spawn_protection: 70,
            start_weapon: Weapon::Pistol,
            start_bullets: 50,
            start_rockets: 0,
        }
    }
}
