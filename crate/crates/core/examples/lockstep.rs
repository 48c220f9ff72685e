//! Hosts a lockstep match with two in-process clients and a bot, then
//! checks that every peer saw the same states.
//!
//! cargo run --example lockstep

use std::time::Duration;

use pixelarena::bots::{BotBrain, BotKind, BotSpec};
use pixelarena::net::{Client, ClientOptions, Host, HostOptions};
use pixelarena::replay::replay_hashes;
use pixelarena::scenario::ScenarioConfig;
use pixelarena::sim::state_hash;
use pixelarena::tournament::{rank, to_csv};

fn main() {
    let mut cfg = ScenarioConfig::default();
    cfg.players = 3;
    let opts = HostOptions {
        bots: vec![BotSpec { kind: BotKind::Fighter, seed: None }],
        bot_names: vec!["house".into()],
        duration: Some(35 * 30),
        lobby_timeout: Duration::from_secs(10),
        ..HostOptions::new(cfg)
    };
    let host = Host::bind(opts).expect("bind");
    let addr = host.local_addr();
    println!("hosting on {addr}");
    let host = std::thread::spawn(move || host.run());

    let peers: Vec<_> = [("ann", BotKind::Fighter), ("bob", BotKind::Wanderer)]
        .into_iter()
        .map(|(name, kind)| {
            std::thread::spawn(move || {
                let mut c = Client::connect(addr, name, ClientOptions::default()).expect("join");
                let mut brain = BotBrain::new(kind, 1, c.player_id());
                let mut hashes = Vec::new();
                loop {
                    c.send_action(brain.act(c.world(), c.player_id())).expect("send");
                    if c.next_tic().expect("tic").is_none() {
                        return hashes;
                    }
                    hashes.push(state_hash(c.world()));
                }
            })
        })
        .collect();

    let out = host.join().expect("host thread").expect("match");
    let (replayed, _) = replay_hashes(&out.replay).expect("replay");
    for p in peers {
        let hashes = p.join().expect("peer");
        println!("peer agrees on {} of {} tics", hashes.iter().zip(&replayed).filter(|(a, b)| a == b).count(), replayed.len());
    }
    println!("{:.1} tics/s, missed {:?}", out.tic_rate, out.missed);
    let entries: Vec<_> = out.names.iter().cloned().zip(out.stats.players.iter().map(|p| p.counters.clone())).collect();
    print!("{}", to_csv(&rank(&entries)));
}
