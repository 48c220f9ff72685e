//! Runs a short round of bot matches with the competition's rotation and
//! prints the summary table.
//!
//! cargo run --example tournament -- results

use std::path::PathBuf;

use pixelarena::bots::{BotKind, BotSpec};
use pixelarena::scenario::ScenarioConfig;
use pixelarena::tournament::{run_tournament, TournamentOptions};

fn main() {
    let out_dir = std::env::args().nth(1).map(PathBuf::from);
    let kinds = [BotKind::Fighter, BotKind::Fighter, BotKind::Wanderer, BotKind::Fighter, BotKind::Wanderer];
    let opts = TournamentOptions {
        maps: vec![ScenarioConfig::default()],
        bots: kinds.iter().enumerate().map(|(i, &kind)| BotSpec { kind, seed: Some(i as u64 * 31) }).collect(),
        names: Vec::new(),
        matches: 7,
        capacity: 4,
        worst_exclude: 1,
        duration: Some(35 * 120),
        out_dir,
    };
    let r = run_tournament(&opts).expect("tournament");
    for (i, m) in r.matches.iter().enumerate() {
        let who: Vec<&str> = m.participants.iter().map(|&p| r.names[p].as_str()).collect();
        println!("match {}: {}", i + 1, who.join(", "));
    }
    println!();
    print!("{}", r.tables.summary_md);
}
