//! Helpers shared by the integration tests and the acceptance runner.

#![allow(dead_code)]

use std::sync::Arc;

use pixelarena::bots::{BotBrain, BotKind};
use pixelarena::fixed::{Angle, Vec2};
use pixelarena::render::ColumnHit;
use pixelarena::replay::ReplayWriter;
use pixelarena::scenario::{parse_map, MapGrid, ScenarioConfig, DEFAULT_MAP};
use pixelarena::sim::{state_hash, step, visibility_test, Buttons, Event, Rules, TicCmd, Weapon, WorldState};
use pixelarena::tournament::MatchStats;

/// Two rooms joined by a doorway, with a pillar and items.
pub const TWO_ROOMS: &str = "\
##############
#S...#......S#
#....#..##...#
#..M.....#...#
#....#...a...#
#S...#..r...S#
##############";

pub fn grid(map: &str) -> Arc<MapGrid> {
    Arc::new(parse_map(map).expect("test map parses"))
}

pub fn world(map: &str, players: usize, rules: Rules, seed: u64) -> WorldState {
    WorldState::new(grid(map), players, rules, seed).expect("test world builds")
}

/// Moves an actor to `(x, y)` game units facing `deg` degrees.
pub fn put(world: &mut WorldState, id: usize, x: i32, y: i32, deg: i32) {
    let a = &mut world.actors[id];
    a.pos = Vec2::from_units(x, y);
    a.angle = Angle::from_degrees(deg);
}

pub fn arena(players: usize, seed: u64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::with_map("arena", DEFAULT_MAP).expect("built-in map");
    cfg.players = players;
    cfg.seed = seed;
    cfg
}

/// A bot-only match recorded tic by tic.
pub struct Recorded {
    pub replay: Vec<u8>,
    pub hashes: Vec<u64>,
    pub stats: MatchStats,
    pub world: WorldState,
    pub events: Vec<(u32, Event)>,
}

/// Plays `kinds` (one per slot) for `tics` tics under `cfg` and records it.
pub fn record_bots(cfg: &ScenarioConfig, kinds: &[BotKind], tics: u32) -> Recorded {
    assert_eq!(cfg.players, kinds.len());
    let mut w = WorldState::new(Arc::new(cfg.map.clone()), cfg.players, cfg.rules(), cfg.seed).unwrap();
    let mut bots: Vec<BotBrain> = kinds.iter().enumerate().map(|(i, k)| BotBrain::new(*k, cfg.seed, i)).collect();
    let mut rec = ReplayWriter::for_config(Vec::new(), cfg).unwrap();
    let mut hashes = Vec::with_capacity(tics as usize);
    let mut events = Vec::new();
    for _ in 0..tics {
        let cmds: Vec<TicCmd> = bots.iter_mut().enumerate().map(|(i, b)| b.act(&w, i)).collect();
        let tic = w.tic;
        events.extend(step(&mut w, &cmds).unwrap().into_iter().map(|e| (tic, e)));
        hashes.push(state_hash(&w));
        rec.record(&cmds, &w).unwrap();
    }
    Recorded { replay: rec.finish(&w).unwrap(), hashes, stats: MatchStats::from_world(&w), world: w, events }
}

/// One row of the 2016 Track 1 results: (bot, frags, F/D, kills, suicides, deaths).
pub type ResultRow = (&'static str, i64, f64, u32, u32, u32);

pub const TRACK1_2016: [ResultRow; 9] = [
    ("F1", 559, 1.35, 597, 38, 413),
    ("Arnold", 413, 1.90, 532, 119, 217),
    ("Clyde", 393, 0.77, 476, 83, 509),
    ("TUHO", 312, 0.67, 424, 112, 465),
    ("5vision", 142, 0.28, 206, 64, 497),
    ("ColbyMules", 131, 0.25, 222, 91, 516),
    ("AbyssII", 118, 0.21, 217, 99, 542),
    ("WallDestroyerXxx", -130, -0.41, 13, 143, 315),
    ("Ivomi", -578, -0.68, 149, 727, 838),
];

/// Wall distance along a ray by marching in `step`-cell increments: the
/// first sample inside a wall cell, converted to the ray parameter.
pub fn march(grid: &MapGrid, px: f64, py: f64, rx: f64, ry: f64, step: f64) -> f64 {
    let len = (rx * rx + ry * ry).sqrt();
    let (ux, uy) = (rx / len, ry / len);
    let mut s = 0.0;
    loop {
        s += step;
        let (x, y) = (px + ux * s, py + uy * s);
        if grid.is_wall(x.floor() as i64, y.floor() as i64) {
            return s / len;
        }
        assert!(s < 1000.0, "ray escaped the map");
    }
}

/// Camera ray for screen column `c` of `width` from a facing angle.
pub fn column_ray(angle: Angle, width: usize, c: usize) -> (f64, f64) {
    let dir = (angle.cos().to_f64(), angle.sin().to_f64());
    let plane = (-dir.1, dir.0);
    let cam = (2.0 * c as f64 + 1.0 - width as f64) / width as f64;
    (dir.0 + plane.0 * cam, dir.1 + plane.1 * cam)
}

#[derive(Debug, PartialEq)]
pub enum RayCheck {
    Match,
    /// The ray clips a wall corner by less than the march step, so the
    /// march steps over it. Accepted only when the DDA hit lies on the wall
    /// cell boundary next to a corner and before the march's hit.
    CornerGraze,
    Mismatch(String),
}

pub fn check_ray(grid: &MapGrid, px: f64, py: f64, ray: (f64, f64), hit: &ColumnHit) -> RayCheck {
    let oracle = march(grid, px, py, ray.0, ray.1, 0.01);
    if (hit.perp_cells - oracle).abs() <= 0.02 {
        return RayCheck::Match;
    }
    let (hx, hy) = (px + ray.0 * hit.perp_cells, py + ray.1 * hit.perp_cells);
    let (c, r) = (hit.col as f64, hit.row as f64);
    let eps = 1e-9;
    let on_cell = hx >= c - eps && hx <= c + 1.0 + eps && hy >= r - eps && hy <= r + 1.0 + eps;
    let corner = [(c, r), (c + 1.0, r), (c, r + 1.0), (c + 1.0, r + 1.0)]
        .iter()
        .map(|(x, y)| ((hx - x).powi(2) + (hy - y).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min);
    if hit.perp_cells < oracle && grid.is_wall(hit.col, hit.row) && on_cell && corner <= 0.02 {
        RayCheck::CornerGraze
    } else {
        RayCheck::Mismatch(format!("dda {} ({},{}) vs march {oracle}", hit.perp_cells, hit.col, hit.row))
    }
}

/// Room for the statistics fixture: small enough that the two players
/// meet often, with a pillar so sight lines do break.
pub const CALIBRATION_MAP: &str = "\
##########
#S.......#
#...##...#
#........#
#.......S#
##########";

/// Hand count of the blind-firing player's attacks in [`calibration_match`].
pub struct Calibration {
    pub stats: MatchStats,
    pub blind_attacks: u32,
    pub blind_visible: u32,
    pub blind_damaging: u32,
}

/// A FIGHTER (slot 0) against a scripted player (slot 1) that holds ATTACK
/// while spinning 3° per tic. Visibility for each blind attack is judged
/// here from the tic-start positions and the shooter's turned facing,
/// independently of the simulation's own bookkeeping.
pub fn calibration_match(tics: u32) -> Calibration {
    let rules = Rules { start_bullets: 200, ..Rules::edition_2016() };
    let mut w = world(CALIBRATION_MAP, 2, rules, 23);
    let mut fighter = BotBrain::new(BotKind::Fighter, 23, 0);
    let blind = TicCmd { buttons: Buttons(Buttons::ATTACK | Buttons::RESPAWN), turn_delta: 300 };
    let (mut attacks, mut visible) = (0, 0);
    let mut damaging = std::collections::BTreeSet::new();
    for _ in 0..tics {
        let f = fighter.act(&w, 0);
        let mut view = w.clone();
        view.actors[1].angle = view.actors[1].angle + Angle::from_centidegrees(300);
        let saw = visibility_test(&view, 1, 0);
        for e in step(&mut w, &[f, blind]).unwrap() {
            match e {
                Event::Attack { attacker: 1, .. } => {
                    attacks += 1;
                    visible += saw as u32;
                }
                Event::Damage(d) if d.attacker == Some(1) && d.victim != 1 => {
                    damaging.insert(d.attack_id);
                }
                _ => {}
            }
        }
    }
    Calibration { stats: MatchStats::from_world(&w), blind_attacks: attacks, blind_visible: visible, blind_damaging: damaging.len() as u32 }
}

/// `num / den` in percent to one decimal, rounded half up.
pub fn percent_oracle(num: u32, den: u32) -> f64 {
    if den == 0 {
        return 0.0;
    }
    (1000.0 * num as f64 / den as f64).round() / 10.0
}

/// Runs a player straight along a corridor holding MOVE_FORWARD and
/// returns its reported average speed.
pub fn speed_run(tics: u32) -> f64 {
    let mut map = String::new();
    map.push_str(&"#".repeat(64));
    map.push_str("\n#S");
    map.push_str(&".".repeat(61));
    map.push_str("#\n");
    map.push_str(&"#".repeat(64));
    let mut w = world(&map, 1, Rules::default(), 1);
    put(&mut w, 0, 192, 192, 0);
    for _ in 0..tics {
        step(&mut w, &[TicCmd::new(Buttons::MOVE_FORWARD)]).unwrap();
    }
    MatchStats::from_world(&w).players[0].avg_speed_kmh
}

/// Rocket fired past a victim into the far wall. Returns the attack id,
/// the tic it was fired, the tic and amount of the blast damage, and the
/// shooter's counters afterwards.
pub fn rocket_blast() -> (u32, u32, u32, i32, MatchStats) {
    let rules = Rules { start_weapon: Weapon::RocketLauncher, start_rockets: 5, ..Rules::default() };
    let mut w = world("##########\n#S......S#\n##########", 2, rules, 3);
    put(&mut w, 0, 192, 192, 0);
    // off the rocket's line by twice the actor radius, near the east wall
    put(&mut w, 1, 9 * 128 - 40, 232, 180);
    let mut fired = None;
    let mut blast = None;
    for _ in 0..60 {
        let tic = w.tic;
        let cmd = if tic == 0 { TicCmd::new(Buttons::ATTACK) } else { TicCmd::EMPTY };
        for e in step(&mut w, &[cmd, TicCmd::EMPTY]).unwrap() {
            match e {
                Event::Attack { attacker: 0, attack_id, .. } => fired = Some((attack_id, tic)),
                Event::Damage(d) if d.victim == 1 => {
                    assert!(blast.is_none(), "one blast expected");
                    assert_eq!(d.attacker, Some(0));
                    blast = Some((d.attack_id.expect("blast carries its attack"), tic, d.amount));
                }
                _ => {}
            }
        }
    }
    let (id, fired_at) = fired.expect("rocket fired");
    let (blast_id, hit_at, amount) = blast.expect("blast reached the victim");
    assert_eq!(blast_id, id);
    (id, fired_at, hit_at, amount, MatchStats::from_world(&w))
}

/// Outcome counts of feeding random frames to the decoder.
#[derive(Debug, Default)]
pub struct FuzzReport {
    pub decoded: usize,
    pub errors: usize,
    pub panics: usize,
}

/// Decodes `n` random frames: half pure noise, half with a plausible
/// header (known type, small length) over a random payload, plus the
/// same bytes streamed through a [`Decoder`] in random chunks.
pub fn fuzz_frames(n: usize, seed: u64) -> FuzzReport {
    use pixelarena::net::{decode, Decoder};
    use rand::{Rng, SeedableRng};

    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut report = FuzzReport::default();
    let mut buf = Vec::with_capacity(64);
    for i in 0..n {
        buf.clear();
        if i % 2 == 0 {
            let len = rng.gen_range(0..48);
            buf.extend((0..len).map(|_| rng.gen::<u8>()));
        } else {
            let len: u32 = rng.gen_range(0..40);
            let claimed = if rng.gen_bool(0.8) { len } else { rng.gen() };
            buf.extend_from_slice(&claimed.to_le_bytes());
            buf.push(rng.gen_range(0..9));
            buf.extend((0..len).map(|_| rng.gen::<u8>()));
        }
        let chunk = rng.gen_range(1..8);
        let r = std::panic::catch_unwind(|| {
            let whole = decode(&buf).map(|_| ());
            let mut d = Decoder::new();
            for c in buf.chunks(chunk) {
                d.push(c);
                if d.next_message().is_err() {
                    break;
                }
            }
            whole
        });
        match r {
            Ok(Ok(())) => report.decoded += 1,
            Ok(Err(_)) => report.errors += 1,
            Err(_) => report.panics += 1,
        }
    }
    report
}

pub type HostThread = std::thread::JoinHandle<Result<pixelarena::net::HostOutcome, pixelarena::net::NetError>>;

/// Binds a host and runs it on its own thread.
pub fn start_host(opts: pixelarena::net::HostOptions) -> (std::net::SocketAddr, Option<std::net::SocketAddr>, HostThread) {
    let host = pixelarena::net::Host::bind(opts).expect("bind host");
    let (addr, ws) = (host.local_addr(), host.ws_addr());
    (addr, ws, std::thread::spawn(move || host.run()))
}

/// Hashes after each tic as seen by one client.
pub type ClientThread = std::thread::JoinHandle<Result<Vec<u64>, pixelarena::net::NetError>>;

/// Joins `addr` and plays with a built-in bot brain, recording the state
/// hash after every tic.
pub fn start_client(addr: std::net::SocketAddr, name: &str, opts: pixelarena::net::ClientOptions, kind: BotKind) -> ClientThread {
    let name = name.to_string();
    std::thread::spawn(move || {
        let mut c = pixelarena::net::Client::connect(addr, &name, opts)?;
        let mut brain = BotBrain::new(kind, 99, c.player_id());
        let mut hashes = Vec::new();
        loop {
            let cmd = brain.act(c.world(), c.player_id());
            c.send_action(cmd)?;
            if c.next_tic()?.is_none() {
                return Ok(hashes);
            }
            hashes.push(state_hash(c.world()));
        }
    })
}

/// Participants of match `index` worked out directly from the rules: a
/// full roster if it fits, otherwise player `index` sits out for the first
/// `n` matches and the `k` worst (fewest frags, most deaths, highest id)
/// after that.
pub fn schedule_oracle(n: usize, capacity: usize, index: usize, totals: &[pixelarena::sim::Counters], k: usize) -> Vec<usize> {
    if n <= capacity {
        return (0..n).collect();
    }
    if index < n {
        return (0..n).filter(|&p| p != index).collect();
    }
    let mut out: Vec<usize> = (0..n).collect();
    for _ in 0..k {
        let mut worst = out[0];
        for &p in &out[1..] {
            let (a, b) = (&totals[p], &totals[worst]);
            let (fa, fb) = (a.kills as i64 - a.suicides as i64, b.kills as i64 - b.suicides as i64);
            if fa < fb || (fa == fb && (a.deaths > b.deaths || (a.deaths == b.deaths && p > worst))) {
                worst = p;
            }
        }
        out.retain(|&p| p != worst);
    }
    out
}

/// A fresh empty directory under the system temp dir.
pub fn temp_dir(tag: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("pixelarena-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}
