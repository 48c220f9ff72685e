//! Firing, projectiles, blasts and damage bookkeeping.

use std::collections::VecDeque;

use crate::fixed::{Angle, Fixed, Vec2};

use super::geometry::{circle_entry, first_wall, segment_clear, sees, Frac};
use super::tuning::Weapon;
use super::types::{Damage, Event, PlayerId, Projectile, ProjectileKind};
use super::world::WorldState;

/// Positions and liveness at the start of a tic. Attack visibility is judged
/// against this snapshot so that what a shooter saw when choosing its input
/// is what gets recorded.
#[derive(Clone, Debug)]
pub(crate) struct Snapshot {
    pub pos: Vec<Vec2>,
    pub alive: Vec<bool>,
}

impl Snapshot {
    pub fn of(world: &WorldState) -> Snapshot {
        Snapshot {
            pos: world.actors.iter().map(|a| a.pos).collect(),
            alive: world.actors.iter().map(|a| a.alive).collect(),
        }
    }
}

/// True iff `target` is alive, within 45° of the observer's facing and not
/// occluded by a wall cell.
pub fn visibility_test(world: &WorldState, observer: PlayerId, target: PlayerId) -> bool {
    let (Some(o), Some(t)) = (world.actors.get(observer), world.actors.get(target)) else {
        return false;
    };
    observer != target && t.alive && sees(&world.grid, o.pos, o.angle, t.pos)
}

/// Whether any opponent is visible to `shooter` from the snapshot.
pub(crate) fn enemy_visible(world: &WorldState, snap: &Snapshot, shooter: PlayerId, facing: Angle) -> bool {
    let eye = snap.pos[shooter];
    (0..snap.pos.len())
        .any(|j| j != shooter && snap.alive[j] && sees(&world.grid, eye, facing, snap.pos[j]))
}

/// Fires the selected weapon if the cooldown has expired and ammo remains.
/// Visibility is judged against the current state.
pub fn fire_weapon(world: &mut WorldState, shooter: PlayerId) -> Vec<Event> {
    let snap = Snapshot::of(world);
    let mut events = Vec::new();
    fire(world, shooter, &snap, &mut events);
    events
}

pub(crate) fn fire(world: &mut WorldState, shooter: PlayerId, snap: &Snapshot, events: &mut Vec<Event>) {
    let tuning = world.tuning;
    let Some(actor) = world.actors.get(shooter) else { return };
    if !actor.alive || actor.cooldown > 0 {
        return;
    }
    let weapon = actor.weapon;
    if actor.ammo(weapon) == 0 {
        return;
    }
    let facing = actor.angle;
    let visible = enemy_visible(world, snap, shooter, facing);
    let attack_id = world.alloc_attack_id();
    {
        let a = &mut world.actors[shooter];
        match weapon {
            Weapon::Pistol => {
                a.bullets -= 1;
                a.cooldown = tuning.pistol_cooldown;
            }
            Weapon::RocketLauncher => {
                a.rockets -= 1;
                a.cooldown = tuning.rocket_cooldown;
            }
        }
    }
    let c = &mut world.counters[shooter];
    c.attacks += 1;
    if visible {
        c.attacks_visible += 1;
    }
    events.push(Event::Attack { attacker: shooter, attack_id, weapon, enemy_visible: visible });

    match weapon {
        Weapon::Pistol => {
            let spread = world.rng.below(2 * tuning.pistol_spread_cd as u32 + 1) as i32 - tuning.pistol_spread_cd;
            let amount = tuning.pistol_damage_unit * (1 + world.rng.below(tuning.pistol_damage_rolls) as i32);
            let dir = (facing + Angle::from_centidegrees(spread)).direction();
            let origin = world.actors[shooter].pos;
            let reach = Fixed::from_int(tuning.hitscan_range);
            let end = origin + Vec2::new(dir.x.mul(reach), dir.y.mul(reach));
            match first_hit(world, origin, end, Some(shooter)) {
                Hit::Actor(victim, _) => {
                    let dmg = Damage { attack_id: Some(attack_id), attacker: Some(shooter), victim, amount };
                    apply_damage(world, dmg, events);
                }
                Hit::Barrel(idx, _) => {
                    let mut queue = VecDeque::new();
                    damage_barrel(world, idx, amount, Some(shooter), Some(attack_id), &mut queue);
                    run_blasts(world, queue, events);
                }
                Hit::Wall(_) | Hit::Nothing => {}
            }
        }
        Weapon::RocketLauncher => {
            let dir = facing.direction();
            let id = world.alloc_entity_id();
            let pos = world.actors[shooter].pos;
            world.projectiles.push(Projectile {
                id,
                owner: shooter,
                attack_id,
                pos,
                velocity: Vec2::new(dir.x.mul_int(tuning.rocket_speed), dir.y.mul_int(tuning.rocket_speed)),
                kind: ProjectileKind::Rocket,
                age: 0,
            });
        }
    }
}

enum Hit {
    Nothing,
    Wall(Frac),
    Actor(PlayerId, Frac),
    Barrel(usize, Frac),
}

/// Nearest wall, actor or intact barrel along the segment. `skip` excludes
/// one actor (the shooter or the rocket's owner).
fn first_hit(world: &WorldState, p0: Vec2, p1: Vec2, skip: Option<PlayerId>) -> Hit {
    let mut best = match first_wall(&world.grid, p0, p1) {
        Some(t) => Hit::Wall(t),
        None => Hit::Nothing,
    };
    let best_t = |h: &Hit| match h {
        Hit::Nothing => None,
        Hit::Wall(t) | Hit::Actor(_, t) | Hit::Barrel(_, t) => Some(*t),
    };
    for a in &world.actors {
        if !a.alive || Some(a.id) == skip {
            continue;
        }
        if let Some(t) = circle_entry(p0, p1, a.pos, world.tuning.actor_radius) {
            if best_t(&best).is_none_or(|b| t < b) {
                best = Hit::Actor(a.id, t);
            }
        }
    }
    for (idx, b) in world.barrels.iter().enumerate() {
        if b.destroyed {
            continue;
        }
        if let Some(t) = circle_entry(p0, p1, b.cell.center(), world.tuning.barrel_radius) {
            if best_t(&best).is_none_or(|bt| t < bt) {
                best = Hit::Barrel(idx, t);
            }
        }
    }
    best
}

struct Blast {
    center: Vec2,
    attacker: Option<PlayerId>,
    attack_id: Option<u32>,
}

/// Moves every projectile one tic in ascending id order; impacts explode.
pub(crate) fn advance_projectiles(world: &mut WorldState, events: &mut Vec<Event>) {
    let mut i = 0;
    while i < world.projectiles.len() {
        let p = world.projectiles[i].clone();
        let end = p.pos + p.velocity;
        let hit = first_hit(world, p.pos, end, Some(p.owner));
        let t = match &hit {
            Hit::Nothing => None,
            Hit::Wall(t) | Hit::Actor(_, t) | Hit::Barrel(_, t) => Some(*t),
        };
        match t {
            None if p.age + 1 < world.tuning.rocket_lifetime => {
                let proj = &mut world.projectiles[i];
                proj.pos = end;
                proj.age += 1;
                i += 1;
            }
            _ => {
                world.projectiles.remove(i);
                let t = t.unwrap_or(Frac::ONE);
                // back off one unit along the flight so the blast center is in the open
                let speed = world.tuning.rocket_speed.max(1);
                let step_back = Vec2::new(Fixed(p.velocity.x.raw() / speed), Fixed(p.velocity.y.raw() / speed));
                let center = t.lerp(p.pos, end) - step_back;
                let center = if segment_clear(&world.grid, p.pos, center) { center } else { p.pos };
                let mut queue = VecDeque::new();
                match hit {
                    Hit::Actor(victim, _) => {
                        let dmg = Damage {
                            attack_id: Some(p.attack_id),
                            attacker: Some(p.owner),
                            victim,
                            amount: world.tuning.rocket_direct_damage,
                        };
                        apply_damage(world, dmg, events);
                    }
                    Hit::Barrel(idx, _) => {
                        let amount = world.tuning.rocket_direct_damage;
                        damage_barrel(world, idx, amount, Some(p.owner), Some(p.attack_id), &mut queue);
                    }
                    _ => {}
                }
                queue.push_front(Blast { center, attacker: Some(p.owner), attack_id: Some(p.attack_id) });
                run_blasts(world, queue, events);
            }
        }
    }
}

fn blast_amount(world: &WorldState, center: Vec2, target: Vec2) -> i32 {
    let t = world.tuning;
    let dist_raw = center.distance(target).raw() as i64;
    let radius_raw = (t.blast_radius as i64) << 16;
    if dist_raw >= radius_raw {
        return 0;
    }
    let falloff = dist_raw * t.blast_damage as i64 / radius_raw;
    (t.blast_damage as i64 - falloff).max(0) as i32
}

/// Resolves explosions in FIFO order; barrels destroyed along the way queue
/// their own blast, credited to whoever set off the chain.
fn run_blasts(world: &mut WorldState, mut queue: VecDeque<Blast>, events: &mut Vec<Event>) {
    while let Some(blast) = queue.pop_front() {
        for id in 0..world.actors.len() {
            let a = &world.actors[id];
            if !a.alive {
                continue;
            }
            let amount = blast_amount(world, blast.center, a.pos);
            if amount <= 0 || !segment_clear(&world.grid, blast.center, a.pos) {
                continue;
            }
            let dmg = Damage { attack_id: blast.attack_id, attacker: blast.attacker, victim: id, amount };
            apply_damage(world, dmg, events);
        }
        for idx in 0..world.barrels.len() {
            if world.barrels[idx].destroyed {
                continue;
            }
            let c = world.barrels[idx].cell.center();
            let amount = blast_amount(world, blast.center, c);
            if amount <= 0 || !segment_clear(&world.grid, blast.center, c) {
                continue;
            }
            damage_barrel(world, idx, amount, blast.attacker, blast.attack_id, &mut queue);
        }
    }
}

fn damage_barrel(
    world: &mut WorldState,
    idx: usize,
    amount: i32,
    attacker: Option<PlayerId>,
    attack_id: Option<u32>,
    queue: &mut VecDeque<Blast>,
) {
    let b = &mut world.barrels[idx];
    if b.destroyed {
        return;
    }
    b.health -= amount;
    if b.health <= 0 {
        b.health = 0;
        b.destroyed = true;
        queue.push_back(Blast { center: b.cell.center(), attacker, attack_id });
    }
}

/// Applies one damage instance: armor soaks a third (capped by the armor
/// left), the rest comes off health. Damage to dead or protected actors is
/// dropped without touching any counter.
pub fn resolve_damage(world: &mut WorldState, damage: Damage) -> Vec<Event> {
    let mut events = Vec::new();
    apply_damage(world, damage, &mut events);
    events
}

pub(crate) fn apply_damage(world: &mut WorldState, damage: Damage, events: &mut Vec<Event>) {
    let now = world.tic;
    let delay = world.rules.respawn_delay.max(1);
    let Some(victim) = world.actors.get_mut(damage.victim) else { return };
    if !victim.alive || damage.amount <= 0 || now < victim.protection_until_tic {
        return;
    }
    let absorbed = (damage.amount / 3).min(victim.armor);
    victim.armor -= absorbed;
    victim.health -= damage.amount - absorbed;
    let died = victim.health <= 0;
    if died {
        victim.health = 0;
        victim.alive = false;
        victim.cooldown = 0;
        victim.respawn_allowed_at_tic = now + delay;
    }
    let c = &mut world.counters[damage.victim];
    c.hits_taken += 1;
    c.damage_taken_hp += damage.amount as u32;
    events.push(Event::Damage(damage));

    if let (Some(attack_id), Some(attacker)) = (damage.attack_id, damage.attacker) {
        if attacker != damage.victim && !world.credited_attacks.contains(&attack_id) {
            world.credited_attacks.push(attack_id);
            if let Some(c) = world.counters.get_mut(attacker) {
                c.attacks_damaging += 1;
            }
        }
    }

    if died {
        world.counters[damage.victim].deaths += 1;
        match damage.attacker {
            Some(k) if k != damage.victim => world.counters[k].kills += 1,
            _ => world.counters[damage.victim].suicides += 1,
        }
        events.push(Event::Death { victim: damage.victim, killer: damage.attacker });
    }
}
