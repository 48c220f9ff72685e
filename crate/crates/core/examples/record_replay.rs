//! Records a bot match to a file, replays it with checkpoint verification
//! and shows that a tampered file is rejected.
//!
//! cargo run --example record_replay -- match.vzr

use std::sync::Arc;

use pixelarena::bots::{BotBrain, BotKind};
use pixelarena::replay::{ReplayFile, ReplayWriter, Replayer};
use pixelarena::scenario::ScenarioConfig;
use pixelarena::sim::{step, TicCmd, WorldState};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "match.vzr".into());
    let mut cfg = ScenarioConfig::default();
    cfg.players = 4;
    cfg.seed = 2017;

    let mut world = WorldState::new(Arc::new(cfg.map.clone()), cfg.players, cfg.rules(), cfg.seed).expect("world");
    let mut bots: Vec<BotBrain> =
        (0..4).map(|i| BotBrain::new(if i % 2 == 0 { BotKind::Fighter } else { BotKind::Wanderer }, cfg.seed, i)).collect();
    let file = std::fs::File::create(&path).expect("create");
    let mut rec = ReplayWriter::for_config(std::io::BufWriter::new(file), &cfg).expect("header");
    for _ in 0..35 * 60 {
        let cmds: Vec<TicCmd> = bots.iter_mut().enumerate().map(|(i, b)| b.act(&world, i)).collect();
        step(&mut world, &cmds).expect("step");
        rec.record(&cmds, &world).expect("record");
    }
    rec.finish(&world).expect("finish");
    println!("recorded {} tics to {path}", world.tic);

    let bytes = std::fs::read(&path).expect("read");
    let stats = Replayer::new(ReplayFile::parse(&bytes).expect("parse"), None, 0).expect("replayer").finish().expect("verified");
    for (i, p) in stats.players.iter().enumerate() {
        println!("player {i}: frags {:>3}  deaths {:>3}  shooting {:>5.1}%", p.frags, p.counters.deaths, p.shooting_precision);
    }

    let mut tampered = ReplayFile::parse(&bytes).expect("parse");
    tampered.tics[100][1].turn_delta += 1;
    let err = Replayer::new(tampered, None, 0).expect("replayer").finish().expect_err("must diverge");
    println!("tampered copy rejected: {err}");
}
