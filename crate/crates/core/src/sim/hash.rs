use super::types::Counters;
use super::world::WorldState;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
#[derive(Clone, Debug)]
pub struct Fnv1a(u64);

impl Default for Fnv1a {
    fn default() -> Self {
        Fnv1a(FNV_OFFSET)
    }
}

impl Fnv1a {
    pub fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= *b as u64;
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
    }

    pub fn u8(&mut self, v: u8) {
        self.write(&[v]);
    }

    pub fn u32(&mut self, v: u32) {
        self.write(&v.to_le_bytes());
    }

    pub fn i32(&mut self, v: i32) {
        self.write(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub fn i64(&mut self, v: i64) {
        self.write(&v.to_le_bytes());
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

/// Canonical little-endian encoding of one player's counters, shared by the
/// state hash and the replay footer.
pub fn counters_bytes(c: &Counters) -> [u8; 56] {
    let mut out = [0u8; 56];
    let words = [
        c.kills,
        c.suicides,
        c.deaths,
        c.attacks,
        c.attacks_visible,
        c.attacks_damaging,
        c.hits_taken,
        c.damage_taken_hp,
        c.picked_ammo,
        c.picked_medikits,
        c.picked_armors,
        c.alive_tics,
    ];
    for (i, w) in words.iter().enumerate() {
        out[i * 4..i * 4 + 4].copy_from_slice(&w.to_le_bytes());
    }
    out[48..56].copy_from_slice(&c.distance_raw.to_le_bytes());
    out
}

pub fn counters_from_bytes(b: &[u8; 56]) -> Counters {
    let w = |i: usize| u32::from_le_bytes([b[i * 4], b[i * 4 + 1], b[i * 4 + 2], b[i * 4 + 3]]);
    let mut d = [0u8; 8];
    d.copy_from_slice(&b[48..56]);
    Counters {
        kills: w(0),
        suicides: w(1),
        deaths: w(2),
        attacks: w(3),
        attacks_visible: w(4),
        attacks_damaging: w(5),
        hits_taken: w(6),
        damage_taken_hp: w(7),
        picked_ammo: w(8),
        picked_medikits: w(9),
        picked_armors: w(10),
        alive_tics: w(11),
        distance_raw: i64::from_le_bytes(d),
    }
}

/// FNV-1a over the canonical serialization: tic, rng state, actors by id,
/// projectiles, items, barrels, counters, id allocators.
pub fn state_hash(world: &WorldState) -> u64 {
    let mut h = Fnv1a::default();
    h.u32(world.tic);
    h.u64(world.rng.state());
    h.u32(world.actors.len() as u32);
    for a in &world.actors {
        h.u32(a.id as u32);
        h.i32(a.pos.x.raw());
        h.i32(a.pos.y.raw());
        h.i32(a.velocity.x.raw());
        h.i32(a.velocity.y.raw());
        h.u32(a.angle.0);
        h.i32(a.health);
        h.i32(a.armor);
        h.u32(a.bullets);
        h.u32(a.rockets);
        let flags = a.alive as u8 | (a.has_rocket_launcher as u8) << 1 | (a.weapon.slot() - 1) << 2;
        h.u8(flags);
        h.u32(a.cooldown);
        h.u32(a.protection_until_tic);
        h.u32(a.respawn_allowed_at_tic);
        h.i64(a.life_distance);
    }
    h.u32(world.projectiles.len() as u32);
    for p in &world.projectiles {
        h.u32(p.id);
        h.u32(p.owner as u32);
        h.u32(p.attack_id);
        h.i32(p.pos.x.raw());
        h.i32(p.pos.y.raw());
        h.i32(p.velocity.x.raw());
        h.i32(p.velocity.y.raw());
        h.u32(p.age);
    }
    h.u32(world.items.len() as u32);
    for i in &world.items {
        h.u32(i.id);
        h.u8(i.kind.code());
        h.u32(i.cell.col as u32 | (i.cell.row as u32) << 16);
        h.u32(i.respawn_at_tic);
    }
    h.u32(world.barrels.len() as u32);
    for b in &world.barrels {
        h.u32(b.id);
        h.u32(b.cell.col as u32 | (b.cell.row as u32) << 16);
        h.i32(b.health);
        h.u8(b.destroyed as u8);
    }
    for c in &world.counters {
        h.write(&counters_bytes(c));
    }
    let (entity, attack) = world.next_ids();
    h.u32(entity);
    h.u32(attack);
    h.finish()
}
