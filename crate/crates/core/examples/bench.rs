//! Renders the benchmark world repeatedly and prints frame rates.
//!
//! cargo run --example bench -- 320x240 2000

use pixelarena::render::{bench, RenderOptions};
use pixelarena::scenario::parse_resolution;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (width, height) = args.first().map(|r| parse_resolution(r).expect("resolution like 320x240")).unwrap_or((320, 240));
    let frames = args.get(1).and_then(|n| n.parse().ok()).unwrap_or(2000);

    for opts in [RenderOptions::with_size(width, height), RenderOptions::with_size(width, height).all_buffers()] {
        let r = bench(&opts, frames);
        println!("{}x{} {} frames: {:.0} fps", r.width, r.height, r.frames, r.fps);
        for c in &r.costs {
            println!("  {:?}: {:.3} ms/frame", c.kind, c.ms_per_frame);
        }
    }
}
