//! Renders one view with every buffer enabled and writes PPM/PGM files.
//!
//! cargo run --example render_buffers -- out_dir

use std::path::PathBuf;
use std::sync::Arc;

use pixelarena::render::{render_frame, BufferKind, RenderOptions};
use pixelarena::scenario::ScenarioConfig;
use pixelarena::sim::{step, TicCmd, WorldState};

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "frames".into()));
    std::fs::create_dir_all(&dir).expect("output dir");
    let cfg = ScenarioConfig::default();
    let mut world = WorldState::new(Arc::new(cfg.map.clone()), 4, cfg.rules(), 11).expect("world");
    // let the other players wander into view
    let mut bots: Vec<_> = (0..4).map(|i| pixelarena::bots::BotBrain::new(pixelarena::bots::BotKind::Wanderer, 11, i)).collect();
    for _ in 0..70 {
        let cmds: Vec<TicCmd> = bots.iter_mut().enumerate().map(|(i, b)| b.act(&world, i)).collect();
        step(&mut world, &cmds).expect("step");
    }

    let opts = RenderOptions { automap_full: true, ..RenderOptions::with_size(320, 240).all_buffers() };
    let frame = render_frame(&world, 0, &opts);
    for kind in BufferKind::ALL {
        let path = dir.join(format!("{}.{}", kind.name(), frame.file_extension(kind)));
        if frame.export(kind, &path).expect("write") {
            println!("wrote {}", path.display());
        }
    }
    let labels = frame.labels.as_ref().expect("labels enabled");
    let objects = labels.iter().copied().max().unwrap_or(0);
    println!("{objects} labeled objects in view at tic {}", frame.tic);
}
