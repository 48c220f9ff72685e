use std::hint::black_box;
use std::sync::Arc;
use std::time::Instant;

use crate::fixed::Angle;
use crate::scenario::{parse_map, DEFAULT_MAP};
use crate::sim::{Rules, WorldState};

use super::{render_frame, BufferKind, RenderOptions};

/// Time attributed to one buffer, per frame.
#[derive(Clone, Debug, PartialEq)]
pub struct BufferCost {
    pub kind: BufferKind,
    pub ms_per_frame: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub width: usize,
    pub height: usize,
    pub frames: u32,
    pub seconds: f64,
    pub fps: f64,
    /// Screen cost first, then the extra cost of each enabled buffer
    /// measured as (screen + buffer) minus screen alone.
    pub costs: Vec<BufferCost>,
}

/// The fixed world every benchmark renders: the built-in arena with four
/// players.
pub fn bench_world() -> WorldState {
    let grid = Arc::new(parse_map(DEFAULT_MAP).expect("built-in map parses"));
    WorldState::new(grid, 4, Rules::default(), 7).expect("built-in map has spawns")
}

fn time_frames(world: &mut WorldState, opts: &RenderOptions, frames: u32) -> f64 {
    let start = Instant::now();
    for i in 0..frames {
        // sweep the view so every frame differs
        world.actors[0].angle = Angle::from_degrees((i % 360) as i32);
        black_box(render_frame(black_box(world), 0, opts));
    }
    start.elapsed().as_secs_f64()
}

/// Renders the benchmark world `frames` times on the calling thread.
pub fn bench(opts: &RenderOptions, frames: u32) -> BenchReport {
    let frames = frames.max(1);
    let mut world = bench_world();
    let seconds = time_frames(&mut world, opts, frames);
    let per_frame = |s: f64| s * 1000.0 / frames as f64;

    let screen_only = RenderOptions { depth_enabled: false, labels_enabled: false, automap_enabled: false, ..*opts };
    let base = if screen_only == *opts { seconds } else { time_frames(&mut world, &screen_only, frames) };
    let mut costs = vec![BufferCost { kind: BufferKind::Screen, ms_per_frame: per_frame(base) }];
    let extras = [
        (opts.depth_enabled, BufferKind::Depth, RenderOptions { depth_enabled: true, ..screen_only }),
        (opts.labels_enabled, BufferKind::Labels, RenderOptions { labels_enabled: true, ..screen_only }),
        (opts.automap_enabled, BufferKind::Automap, RenderOptions { automap_enabled: true, ..screen_only }),
    ];
    for (on, kind, o) in extras {
        if on {
            let t = time_frames(&mut world, &o, frames);
            costs.push(BufferCost { kind, ms_per_frame: per_frame((t - base).max(0.0)) });
        }
    }
    BenchReport { width: opts.width, height: opts.height, frames, seconds, fps: frames as f64 / seconds, costs }
}

/// Resident set size of this process, where the platform reports it.
pub fn resident_memory_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmRSS:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}
