//! Off-screen software renderer.
//!
//! One DDA ray per screen column finds the wall; billboards for actors,
//! items, rockets and barrels are depth-sorted and clipped per column. The
//! same pass can fill a depth buffer, an object-label buffer with its list
//! of [`LabelEntry`]s, and a top-down automap.
//!
//! Rendering uses `f32` internally. It never feeds back into the
//! simulation, so determinism of gameplay is unaffected.

mod automap;
mod bench;
mod discovery;
mod export;
mod hud;
mod raycast;

use std::str::FromStr;

pub use automap::{render_automap, VIEWER as AUTOMAP_VIEWER, WALL as AUTOMAP_WALL};
pub use bench::{bench, bench_world, resident_memory_bytes, BenchReport, BufferCost};
pub use discovery::{discovery_rays, update_discovery, DISCOVERY_RAYS};
pub use export::{write_pgm, write_ppm};
pub use raycast::{cast_column, depth_byte, render_frame, wall_span, ColumnHit, DEPTH_UNITS_PER_STEP, EYE_HEIGHT, SPRITE_HEIGHT};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum PixelFormat {
    Rgb24,
    Gray8,
}

impl PixelFormat {
    pub fn channels(self) -> usize {
        match self {
            PixelFormat::Rgb24 => 3,
            PixelFormat::Gray8 => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PixelFormat::Rgb24 => "RGB24",
            PixelFormat::Gray8 => "GRAY8",
        }
    }

    /// Wire code used in frame headers.
    pub fn code(self) -> u8 {
        match self {
            PixelFormat::Rgb24 => 0,
            PixelFormat::Gray8 => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<PixelFormat> {
        match code {
            0 => Some(PixelFormat::Rgb24),
            1 => Some(PixelFormat::Gray8),
            _ => None,
        }
    }
}

impl FromStr for PixelFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<PixelFormat, String> {
        match s.to_ascii_uppercase().as_str() {
            "RGB24" => Ok(PixelFormat::Rgb24),
            "GRAY8" => Ok(PixelFormat::Gray8),
            _ => Err("expected RGB24 or GRAY8".into()),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct RenderOptions {
    pub width: usize,
    pub height: usize,
    pub format: PixelFormat,
    pub crosshair: bool,
    pub hud: bool,
    pub depth_enabled: bool,
    pub labels_enabled: bool,
    pub automap_enabled: bool,
    pub automap_full: bool,
}

impl Default for RenderOptions {
    fn default() -> RenderOptions {
        RenderOptions {
            width: 320,
            height: 240,
            format: PixelFormat::Rgb24,
            crosshair: false,
            hud: false,
            depth_enabled: false,
            labels_enabled: false,
            automap_enabled: false,
            automap_full: false,
        }
    }
}

impl RenderOptions {
    pub fn with_size(width: usize, height: usize) -> RenderOptions {
        RenderOptions { width, height, ..RenderOptions::default() }
    }

    pub fn all_buffers(mut self) -> RenderOptions {
        self.depth_enabled = true;
        self.labels_enabled = true;
        self.automap_enabled = true;
        self
    }
}

/// Which buffer a byte stream carries. Codes are part of the bridge wire format.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum BufferKind {
    Screen,
    Depth,
    Labels,
    Automap,
}

impl BufferKind {
    pub const ALL: [BufferKind; 4] = [BufferKind::Screen, BufferKind::Depth, BufferKind::Labels, BufferKind::Automap];

    pub fn name(self) -> &'static str {
        match self {
            BufferKind::Screen => "screen",
            BufferKind::Depth => "depth",
            BufferKind::Labels => "labels",
            BufferKind::Automap => "automap",
        }
    }

    pub fn from_code(code: u8) -> Option<BufferKind> {
        BufferKind::ALL.into_iter().find(|k| k.code() == code)
    }

    pub fn code(self) -> u8 {
        match self {
            BufferKind::Screen => 0,
            BufferKind::Depth => 1,
            BufferKind::Labels => 2,
            BufferKind::Automap => 3,
        }
    }
}

/// One labeled object in view.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelEntry {
    /// Value of this object's pixels in the label buffer (1..=255).
    pub label: u8,
    /// Simulation id: the player id for actors, the entity id otherwise.
    pub object_id: u32,
    pub name: &'static str,
    /// Tight bounding box `(x, y, w, h)` of the object's label pixels.
    pub bbox: (usize, usize, usize, usize),
    /// World position in game units.
    pub position: (f64, f64),
    pub angle_deg: f64,
    /// Velocity in game units per tic.
    pub velocity: (f64, f64),
}

/// Everything rendered for one viewer at one tic.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameBundle {
    pub tic: u32,
    pub width: usize,
    pub height: usize,
    pub format: PixelFormat,
    pub screen: Vec<u8>,
    pub depth: Option<Vec<u8>>,
    pub labels: Option<Vec<u8>>,
    pub automap: Option<Vec<u8>>,
    pub label_entries: Vec<LabelEntry>,
}

impl FrameBundle {
    pub fn channels(&self) -> usize {
        self.format.channels()
    }

    pub fn buffer(&self, kind: BufferKind) -> Option<&[u8]> {
        match kind {
            BufferKind::Screen => Some(&self.screen),
            BufferKind::Depth => self.depth.as_deref(),
            BufferKind::Labels => self.labels.as_deref(),
            BufferKind::Automap => self.automap.as_deref(),
        }
    }
}

/// Packs an RGB triple into the requested format.
pub(crate) fn luminance(rgb: [u8; 3]) -> u8 {
    ((77 * rgb[0] as u32 + 150 * rgb[1] as u32 + 29 * rgb[2] as u32) >> 8) as u8
}
