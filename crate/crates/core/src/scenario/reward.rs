use crate::sim::{Event, PlayerId, WorldState};

use super::config::{GameVariable, Rewards};

/// Reward earned by `player` over one tic's events.
pub fn reward_for(events: &[Event], rewards: &Rewards, player: PlayerId) -> f64 {
    let mut r = rewards.living_reward;
    for ev in events {
        match ev {
            Event::Death { victim, killer } => {
                if *victim == player {
                    r -= rewards.death_penalty;
                    if killer.is_none_or(|k| k == player) {
                        r -= rewards.suicide_penalty;
                    }
                } else if *killer == Some(player) {
                    r += rewards.kill_reward;
                }
            }
            Event::Pickup { actor, .. } if *actor == player => r += rewards.item_reward,
            Event::Damage(d) => {
                if d.victim == player {
                    r -= rewards.damage_taken_penalty_per_hp * d.amount as f64;
                } else if d.attacker == Some(player) {
                    r += rewards.damage_inflicted_reward_per_hp * d.amount as f64;
                }
            }
            _ => {}
        }
    }
    r
}

impl GameVariable {
    /// Reads this variable for `player` from the simulation state.
    pub fn read(self, world: &WorldState, player: PlayerId) -> f64 {
        let (Some(a), Some(c)) = (world.actors.get(player), world.counters.get(player)) else {
            return 0.0;
        };
        match self {
            GameVariable::Health => a.health as f64,
            GameVariable::Armor => a.armor as f64,
            GameVariable::SelectedWeapon => a.weapon.slot() as f64,
            GameVariable::SelectedWeaponAmmo => a.ammo(a.weapon) as f64,
            GameVariable::FragCount => c.frags() as f64,
            GameVariable::KillCount => c.kills as f64,
            GameVariable::DeathCount => c.deaths as f64,
            GameVariable::HitsTaken => c.hits_taken as f64,
            GameVariable::DamageTaken => c.damage_taken_hp as f64,
            GameVariable::ItemCount => c.items_picked() as f64,
            GameVariable::PositionX => a.pos.x.to_f64(),
            GameVariable::PositionY => a.pos.y.to_f64(),
            GameVariable::Angle => a.angle.to_degrees(),
        }
    }
}
