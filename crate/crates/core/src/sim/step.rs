use crate::fixed::{Angle, Fixed, Vec2};
use crate::scenario::map::{ItemKind, CELL_UNITS};

use super::combat::{advance_projectiles, fire, Snapshot};
use super::tuning::Weapon;
use super::types::{Buttons, Event, PlayerId, TicCmd};
use super::world::{respawn, RespawnOutcome, WorldState};
use super::SimError;

const CELL_RAW: i64 = (CELL_UNITS as i64) << 16;

/// Advances the world by one tic (1/35 s).
///
/// Phases run in a fixed order: inputs by ascending player id, projectiles
/// by ascending id, item pickups, then per-tic bookkeeping.
pub fn step(world: &mut WorldState, cmds: &[TicCmd]) -> Result<Vec<Event>, SimError> {
    if cmds.len() != world.actors.len() {
        return Err(SimError::CommandCount { expected: world.actors.len(), got: cmds.len() });
    }
    world.credited_attacks.clear();
    let snap = Snapshot::of(world);
    let mut events = Vec::new();

    for (id, cmd) in cmds.iter().enumerate() {
        apply_input(world, id, cmd, &snap, &mut events);
    }
    advance_projectiles(world, &mut events);
    pickups(world, &mut events);

    for (a, c) in world.actors.iter().zip(world.counters.iter_mut()) {
        if a.alive {
            c.alive_tics += 1;
        }
    }
    world.tic += 1;
    Ok(events)
}

fn apply_input(world: &mut WorldState, id: PlayerId, cmd: &TicCmd, snap: &Snapshot, events: &mut Vec<Event>) {
    if !world.actors[id].alive {
        if cmd.buttons.has(Buttons::RESPAWN) {
            if let Ok(RespawnOutcome::Respawned(ev)) = respawn(world, id) {
                events.push(ev);
            }
        }
        return;
    }
    let t = world.tuning;
    let b = cmd.buttons;
    {
        let a = &mut world.actors[id];
        a.cooldown = a.cooldown.saturating_sub(1);
        let mut turn_cd = (cmd.turn_delta as i32).clamp(-t.max_turn_delta_cd, t.max_turn_delta_cd);
        if b.has(Buttons::TURN_LEFT) {
            turn_cd -= t.turn_step_cd;
        }
        if b.has(Buttons::TURN_RIGHT) {
            turn_cd += t.turn_step_cd;
        }
        a.angle = a.angle + Angle::from_centidegrees(turn_cd);
    }

    let mut forward = 0;
    if b.has(Buttons::MOVE_FORWARD) {
        forward += t.forward_speed;
    }
    if b.has(Buttons::MOVE_BACKWARD) {
        forward -= t.backward_speed;
    }
    let mut strafe = 0;
    if b.has(Buttons::MOVE_RIGHT) {
        strafe += t.strafe_speed;
    }
    if b.has(Buttons::MOVE_LEFT) {
        strafe -= t.strafe_speed;
    }
    if forward != 0 || strafe != 0 {
        let angle = world.actors[id].angle;
        let dir = angle.direction();
        let right = (angle + Angle::DEG90).direction();
        let delta = Vec2::new(
            dir.x.mul_int(forward) + right.x.mul_int(strafe),
            dir.y.mul_int(forward) + right.y.mul_int(strafe),
        );
        let before = world.actors[id].pos;
        try_move(world, id, delta);
        let walked = before.distance(world.actors[id].pos).raw() as i64;
        world.actors[id].life_distance += walked;
        world.counters[id].distance_raw += walked;
        let after = world.actors[id].pos;
        world.actors[id].velocity = Vec2::new(after.x - before.x, after.y - before.y);
    } else {
        world.actors[id].velocity = Vec2::ZERO;
    }

    let a = &mut world.actors[id];
    if b.has(Buttons::SELECT_WEAPON_1) {
        a.weapon = Weapon::Pistol;
    } else if b.has(Buttons::SELECT_WEAPON_2) && a.has_rocket_launcher {
        a.weapon = Weapon::RocketLauncher;
    }
    if b.has(Buttons::ATTACK) {
        fire(world, id, snap, events);
    }
}

/// Axis-separated slide: x first, then y, each clamped against wall cells
/// inflated by the actor radius and rejected if it would push into another
/// actor or an intact barrel.
fn try_move(world: &mut WorldState, id: PlayerId, delta: Vec2) {
    let r = (world.tuning.actor_radius as i64) << 16;
    let mut pos = world.actors[id].pos;
    let x = pos.x.raw() as i64;
    let y = pos.y.raw() as i64;

    if delta.x.raw() != 0 {
        let nx = clamp_axis(world, x, delta.x.raw() as i64, y, r, true);
        let cand = Vec2::new(Fixed(nx as i32), pos.y);
        if !bumps(world, id, pos, cand) {
            pos = cand;
        }
    }
    let x = pos.x.raw() as i64;
    if delta.y.raw() != 0 {
        let ny = clamp_axis(world, y, delta.y.raw() as i64, x, r, false);
        let cand = Vec2::new(pos.x, Fixed(ny as i32));
        if !bumps(world, id, pos, cand) {
            pos = cand;
        }
    }
    world.actors[id].pos = pos;
}

/// New coordinate along one axis after moving by `d`, stopping flush with
/// the first wall cell the inflated box would overlap.
fn clamp_axis(world: &WorldState, along: i64, d: i64, across: i64, r: i64, is_x: bool) -> i64 {
    let grid = &world.grid;
    let target = along + d;
    // cells covered across the movement axis (half-open box)
    let lo = (across - r).div_euclid(CELL_RAW);
    let hi = (across + r - 1).div_euclid(CELL_RAW);
    let wall_at = |a: i64, b: i64| if is_x { grid.is_wall(a, b) } else { grid.is_wall(b, a) };
    if d > 0 {
        let from = (along + r - 1).div_euclid(CELL_RAW) + 1;
        let to = (target + r - 1).div_euclid(CELL_RAW);
        for cell in from..=to {
            if (lo..=hi).any(|k| wall_at(cell, k)) {
                return (cell * CELL_RAW - r).max(along);
            }
        }
    } else {
        let from = (along - r).div_euclid(CELL_RAW) - 1;
        let to = (target - r).div_euclid(CELL_RAW);
        let mut cell = from;
        while cell >= to {
            if (lo..=hi).any(|k| wall_at(cell, k)) {
                return ((cell + 1) * CELL_RAW + r).min(along);
            }
            cell -= 1;
        }
    }
    target
}

/// True if moving from `from` to `to` enters another body and gets closer.
fn bumps(world: &WorldState, id: PlayerId, from: Vec2, to: Vec2) -> bool {
    let t = world.tuning;
    let blocked_by = |center: Vec2, reach: i32| {
        let limit = ((reach as i128) << 16).pow(2);
        let after = to.dist_sq_raw(center);
        after < limit && after < from.dist_sq_raw(center)
    };
    world
        .actors
        .iter()
        .any(|o| o.id != id && o.alive && blocked_by(o.pos, 2 * t.actor_radius))
        || world
            .barrels
            .iter()
            .any(|b| !b.destroyed && blocked_by(b.cell.center(), t.actor_radius + t.barrel_radius))
}

fn pickups(world: &mut WorldState, events: &mut Vec<Event>) {
    let now = world.tic;
    for item in &mut world.items {
        if !item.present() && now >= item.respawn_at_tic {
            item.respawn_at_tic = 0;
        }
    }
    let t = world.tuning;
    let reach = ((t.actor_radius + t.item_radius) as i64) << 16;
    for id in 0..world.actors.len() {
        for idx in 0..world.items.len() {
            let a = &world.actors[id];
            let item = &world.items[idx];
            if !a.alive || !item.present() {
                continue;
            }
            let c = item.cell.center();
            let dx = (a.pos.x.raw() as i64 - c.x.raw() as i64).abs();
            let dy = (a.pos.y.raw() as i64 - c.y.raw() as i64).abs();
            if dx >= reach || dy >= reach {
                continue;
            }
            let kind = item.kind;
            let a = &mut world.actors[id];
            let counters = &mut world.counters[id];
            let taken = match kind {
                ItemKind::Medikit if a.health < t.full_health => {
                    a.health = (a.health + t.medikit_health).min(t.full_health);
                    counters.picked_medikits += 1;
                    true
                }
                ItemKind::Armor if a.armor < t.max_armor => {
                    a.armor = (a.armor + t.armor_points).min(t.max_armor);
                    counters.picked_armors += 1;
                    true
                }
                ItemKind::AmmoBullets if a.bullets < t.max_bullets => {
                    a.bullets = (a.bullets + t.clip_bullets).min(t.max_bullets);
                    counters.picked_ammo += 1;
                    true
                }
                ItemKind::AmmoRockets if a.rockets < t.max_rockets => {
                    a.rockets = (a.rockets + t.box_rockets).min(t.max_rockets);
                    counters.picked_ammo += 1;
                    true
                }
                ItemKind::WeaponRocketLauncher if !a.has_rocket_launcher || a.rockets < t.max_rockets => {
                    if !a.has_rocket_launcher {
                        a.has_rocket_launcher = true;
                        a.weapon = Weapon::RocketLauncher;
                    }
                    a.rockets = (a.rockets + t.launcher_rockets).min(t.max_rockets);
                    counters.picked_ammo += 1;
                    true
                }
                _ => false,
            };
            if taken {
                world.items[idx].respawn_at_tic = now + t.item_respawn_tics.max(1);
                events.push(Event::Pickup { actor: id, kind });
            }
        }
    }
}
