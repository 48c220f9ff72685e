use crate::scenario::map::{ItemKind, MapGrid, CELL_UNITS};
use crate::sim::{PlayerId, WorldState};

use super::{hud, luminance, FrameBundle, LabelEntry, PixelFormat, RenderOptions};

/// Game units per depth-buffer step.
pub const DEPTH_UNITS_PER_STEP: f64 = 8.0;
/// Camera height above the floor, in game units. Walls are one cell tall.
pub const EYE_HEIGHT: f64 = 64.0;
/// Billboard height in game units.
pub const SPRITE_HEIGHT: f64 = 56.0;
const SPRITE_RADIUS: f64 = 20.0;
const NEAR_PLANE: f64 = 0.05;
const CELL: f64 = CELL_UNITS as f64;

/// Wall found by one column ray.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ColumnHit {
    /// Distance along the view direction, in cells.
    pub perp_cells: f64,
    pub col: i64,
    pub row: i64,
    /// True if the ray crossed a horizontal grid line last.
    pub horizontal_side: bool,
}

/// Depth byte for a perpendicular distance in game units.
pub fn depth_byte(units: f64) -> u8 {
    (units / DEPTH_UNITS_PER_STEP).round().clamp(0.0, 255.0) as u8
}

/// Rows `[top, bottom)` covered by a wall at `perp_cells`, clamped to the frame.
pub fn wall_span(perp_cells: f64, width: usize, height: usize) -> (usize, usize) {
    let focal = width as f64 / 2.0;
    let horizon = height as f64 / 2.0;
    let half = focal / perp_cells.max(1e-6) / 2.0;
    (row_from(horizon - half, height), row_from(horizon + half, height))
}

/// First row whose center is at or below screen coordinate `y`.
fn row_from(y: f64, limit: usize) -> usize {
    (y - 0.5).ceil().clamp(0.0, limit as f64) as usize
}

#[derive(Copy, Clone, Debug)]
struct Camera {
    x: f64,
    y: f64,
    dir: (f64, f64),
    plane: (f64, f64),
}

impl Camera {
    fn of(world: &WorldState, viewer: PlayerId) -> Camera {
        let (pos, angle) = match world.actors.get(viewer) {
            Some(a) => (a.pos, a.angle),
            None => (Default::default(), Default::default()),
        };
        let dir = (angle.cos().to_f64(), angle.sin().to_f64());
        Camera {
            x: pos.x.to_f64() / CELL,
            y: pos.y.to_f64() / CELL,
            dir,
            // y grows downward, so the right-hand side is +90°
            plane: (-dir.1, dir.0),
        }
    }

    fn ray(&self, column: usize, width: usize) -> (f64, f64) {
        // antisymmetric numerator keeps mirrored columns exactly mirrored
        let cam = (2.0 * column as f64 + 1.0 - width as f64) / width as f64;
        (self.dir.0 + self.plane.0 * cam, self.dir.1 + self.plane.1 * cam)
    }
}

/// Casts the ray for screen column `column` of a `width`-pixel view.
pub fn cast_column(world: &WorldState, viewer: PlayerId, width: usize, column: usize) -> ColumnHit {
    let cam = Camera::of(world, viewer);
    let (rx, ry) = cam.ray(column, width);
    cast(&world.grid, cam.x, cam.y, rx, ry)
}

fn cast(grid: &MapGrid, px: f64, py: f64, rx: f64, ry: f64) -> ColumnHit {
    let mut col = px.floor() as i64;
    let mut row = py.floor() as i64;
    let dx = if rx == 0.0 { f64::INFINITY } else { (1.0 / rx).abs() };
    let dy = if ry == 0.0 { f64::INFINITY } else { (1.0 / ry).abs() };
    let (step_x, mut side_x) = if rx < 0.0 { (-1, (px - col as f64) * dx) } else { (1, (col as f64 + 1.0 - px) * dx) };
    let (step_y, mut side_y) = if ry < 0.0 { (-1, (py - row as f64) * dy) } else { (1, (row as f64 + 1.0 - py) * dy) };
    let limit = (grid.width() + grid.height()) * 2 + 4;
    let mut horizontal = false;
    for _ in 0..limit {
        if side_x < side_y {
            side_x += dx;
            col += step_x;
            horizontal = false;
        } else {
            side_y += dy;
            row += step_y;
            horizontal = true;
        }
        if grid.is_wall(col, row) {
            break;
        }
    }
    let perp = if horizontal { side_y - dy } else { side_x - dx };
    ColumnHit { perp_cells: perp.max(0.0), col, row, horizontal_side: horizontal }
}

struct Canvas<'a> {
    buf: &'a mut [u8],
    width: usize,
    format: PixelFormat,
}

impl Canvas<'_> {
    fn fill_row(&mut self, y: usize, rgb: [u8; 3]) {
        let w = self.width;
        match self.format {
            PixelFormat::Rgb24 => {
                for px in self.buf[y * w * 3..(y + 1) * w * 3].chunks_exact_mut(3) {
                    px.copy_from_slice(&rgb);
                }
            }
            PixelFormat::Gray8 => self.buf[y * w..(y + 1) * w].fill(luminance(rgb)),
        }
    }

    fn fill_column(&mut self, x: usize, y0: usize, y1: usize, rgb: [u8; 3]) {
        let w = self.width;
        match self.format {
            PixelFormat::Rgb24 => {
                for y in y0..y1 {
                    let i = (y * w + x) * 3;
                    self.buf[i..i + 3].copy_from_slice(&rgb);
                }
            }
            PixelFormat::Gray8 => {
                let g = luminance(rgb);
                for y in y0..y1 {
                    self.buf[y * w + x] = g;
                }
            }
        }
    }

    pub(super) fn put(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        match self.format {
            PixelFormat::Rgb24 => {
                let i = (y * self.width + x) * 3;
                self.buf[i..i + 3].copy_from_slice(&rgb);
            }
            PixelFormat::Gray8 => self.buf[y * self.width + x] = luminance(rgb),
        }
    }
}

fn fill_column_u8(buf: &mut [u8], width: usize, x: usize, y0: usize, y1: usize, v: u8) {
    for y in y0..y1 {
        buf[y * width + x] = v;
    }
}

const WALL_PALETTE: [[u8; 3]; 6] = [
    [168, 64, 52],
    [64, 120, 168],
    [156, 144, 84],
    [88, 152, 92],
    [132, 92, 156],
    [176, 124, 72],
];
const ACTOR_PALETTE: [[u8; 3]; 16] = [
    [40, 200, 40],
    [220, 40, 40],
    [40, 80, 230],
    [230, 210, 40],
    [220, 120, 220],
    [40, 210, 210],
    [240, 140, 40],
    [150, 150, 150],
    [120, 60, 20],
    [250, 250, 250],
    [90, 40, 150],
    [20, 110, 60],
    [200, 90, 120],
    [110, 160, 40],
    [60, 60, 60],
    [170, 200, 255],
];

fn scale(rgb: [u8; 3], f: f64) -> [u8; 3] {
    rgb.map(|c| (c as f64 * f).clamp(0.0, 255.0) as u8)
}

fn item_color(kind: ItemKind) -> [u8; 3] {
    match kind {
        ItemKind::Medikit => [235, 235, 235],
        ItemKind::Armor => [40, 200, 70],
        ItemKind::AmmoBullets => [225, 205, 40],
        ItemKind::AmmoRockets => [200, 90, 30],
        ItemKind::WeaponRocketLauncher => [255, 150, 0],
    }
}

/// A billboard projected into camera space.
struct Sprite {
    object_id: u32,
    name: &'static str,
    color: [u8; 3],
    /// Lateral and forward offsets in cells.
    tx: f64,
    ty: f64,
    position: (f64, f64),
    angle_deg: f64,
    velocity: (f64, f64),
}

fn collect_sprites(world: &WorldState, viewer: PlayerId, cam: &Camera) -> Vec<Sprite> {
    let mut out = Vec::new();
    let mut push = |object_id: u32, name, color, x: f64, y: f64, angle_deg, velocity| {
        let rel = (x / CELL - cam.x, y / CELL - cam.y);
        let ty = rel.0 * cam.dir.0 + rel.1 * cam.dir.1;
        if ty < NEAR_PLANE {
            return;
        }
        let tx = rel.0 * cam.plane.0 + rel.1 * cam.plane.1;
        out.push(Sprite { object_id, name, color, tx, ty, position: (x, y), angle_deg, velocity });
    };
    for a in world.actors.iter().filter(|a| a.alive && a.id != viewer) {
        push(
            a.id as u32,
            "Actor",
            ACTOR_PALETTE[a.id % ACTOR_PALETTE.len()],
            a.pos.x.to_f64(),
            a.pos.y.to_f64(),
            a.angle.to_degrees(),
            (a.velocity.x.to_f64(), a.velocity.y.to_f64()),
        );
    }
    for it in world.items.iter().filter(|i| i.present()) {
        let c = it.cell.center();
        push(it.id, it.kind.name(), item_color(it.kind), c.x.to_f64(), c.y.to_f64(), 0.0, (0.0, 0.0));
    }
    for b in world.barrels.iter().filter(|b| !b.destroyed) {
        let c = b.cell.center();
        push(b.id, "Barrel", [76, 112, 52], c.x.to_f64(), c.y.to_f64(), 0.0, (0.0, 0.0));
    }
    for p in &world.projectiles {
        let v = (p.velocity.x.to_f64(), p.velocity.y.to_f64());
        let angle = v.1.atan2(v.0).to_degrees().rem_euclid(360.0);
        push(p.id, "Rocket", [255, 210, 70], p.pos.x.to_f64(), p.pos.y.to_f64(), angle, v);
    }
    out
}

/// Renders `viewer`'s view of `world`. Reads the world only.
pub fn render_frame(world: &WorldState, viewer: PlayerId, opts: &RenderOptions) -> FrameBundle {
    let (w, h) = (opts.width.max(1), opts.height.max(1));
    let cam = Camera::of(world, viewer);
    let mut screen = vec![0u8; w * h * opts.format.channels()];
    let mut depth = opts.depth_enabled.then(|| vec![0u8; w * h]);
    let mut labels = opts.labels_enabled.then(|| vec![0u8; w * h]);
    let focal = w as f64 / 2.0;
    let horizon = h as f64 / 2.0;
    let mut canvas = Canvas { buf: &mut screen, width: w, format: opts.format };

    // ceiling and floor, shaded by row distance
    for y in 0..h {
        let dy = (y as f64 + 0.5 - horizon).abs();
        let shade = (0.25 + 0.75 * dy / horizon).min(1.0);
        let base = if (y as f64 + 0.5) < horizon { [72, 72, 84] } else { [96, 84, 64] };
        canvas.fill_row(y, scale(base, shade));
        if let Some(d) = depth.as_mut() {
            let units = focal * (EYE_HEIGHT / CELL) / dy.max(1e-6) * CELL;
            d[y * w..(y + 1) * w].fill(depth_byte(units));
        }
    }

    let mut wall_depth = vec![0u8; w];
    for (x, wd) in wall_depth.iter_mut().enumerate() {
        let (rx, ry) = cam.ray(x, w);
        let hit = cast(&world.grid, cam.x, cam.y, rx, ry);
        let (y0, y1) = wall_span(hit.perp_cells, w, h);
        let base = WALL_PALETTE[((hit.col * 7 + hit.row * 13).rem_euclid(6)) as usize];
        let fog = (1.0 / (1.0 + hit.perp_cells * 0.08)).max(0.25);
        let side = if hit.horizontal_side { 0.72 } else { 1.0 };
        canvas.fill_column(x, y0, y1, scale(base, fog * side));
        *wd = depth_byte(hit.perp_cells * CELL);
        if let Some(d) = depth.as_mut() {
            fill_column_u8(d, w, x, y0, y1, *wd);
        }
    }

    let mut sprites = collect_sprites(world, viewer, &cam);
    // label values go by ascending object id
    sprites.sort_by_key(|s| s.object_id);
    let label_of: Vec<u8> = (0..sprites.len()).map(|i| if i < 255 { i as u8 + 1 } else { 0 }).collect();
    let mut order: Vec<usize> = (0..sprites.len()).collect();
    order.sort_by(|&a, &b| sprites[b].ty.total_cmp(&sprites[a].ty).then(sprites[a].object_id.cmp(&sprites[b].object_id)));

    for &i in &order {
        let s = &sprites[i];
        let cx = focal * (1.0 + s.tx / s.ty);
        let half_w = focal * (SPRITE_RADIUS / CELL) / s.ty;
        let x0 = row_from(cx - half_w, w);
        let x1 = row_from(cx + half_w, w);
        let top = horizon + focal * ((EYE_HEIGHT - SPRITE_HEIGHT) / CELL) / s.ty;
        let bottom = horizon + focal * (EYE_HEIGHT / CELL) / s.ty;
        let (y0, y1) = (row_from(top, h), row_from(bottom, h));
        if x0 >= x1 || y0 >= y1 {
            continue;
        }
        let sd = depth_byte(s.ty * CELL);
        let fog = (1.0 / (1.0 + s.ty * 0.08)).max(0.3);
        let body = scale(s.color, fog);
        let rim = scale(s.color, fog * 0.6);
        for x in x0..x1 {
            if sd >= wall_depth[x] {
                continue;
            }
            let edge = x == x0 || x + 1 == x1;
            canvas.fill_column(x, y0, y1, if edge { rim } else { body });
            if let Some(d) = depth.as_mut() {
                fill_column_u8(d, w, x, y0, y1, sd);
            }
            if let Some(l) = labels.as_mut() {
                fill_column_u8(l, w, x, y0, y1, label_of[i]);
            }
        }
    }

    if opts.hud {
        if let Some(a) = world.actors.get(viewer) {
            hud::draw_status(&mut |x, y, c| canvas.put(x, y, c), w, h, a);
        }
    }
    if opts.crosshair {
        hud::draw_crosshair(&mut |x, y, c| canvas.put(x, y, c), w, h);
    }

    let label_entries = match &labels {
        Some(l) => label_entries(l, w, &sprites, &label_of),
        None => Vec::new(),
    };
    let automap = opts.automap_enabled.then(|| super::render_automap(world, viewer, opts));
    FrameBundle {
        tic: world.tic,
        width: w,
        height: h,
        format: opts.format,
        screen,
        depth,
        labels,
        automap,
        label_entries,
    }
}

fn label_entries(labels: &[u8], width: usize, sprites: &[Sprite], label_of: &[u8]) -> Vec<LabelEntry> {
    // min x, min y, max x, max y per label value
    let mut boxes = [(usize::MAX, usize::MAX, 0usize, 0usize); 256];
    for (row, line) in labels.chunks_exact(width).enumerate() {
        for (x, &v) in line.iter().enumerate() {
            if v != 0 {
                let b = &mut boxes[v as usize];
                b.0 = b.0.min(x);
                b.1 = b.1.min(row);
                b.2 = b.2.max(x);
                b.3 = b.3.max(row);
            }
        }
    }
    sprites
        .iter()
        .zip(label_of)
        .filter(|(_, &l)| l != 0 && boxes[l as usize].0 != usize::MAX)
        .map(|(s, &l)| {
            let b = boxes[l as usize];
            LabelEntry {
                label: l,
                object_id: s.object_id,
                name: s.name,
                bbox: (b.0, b.1, b.2 - b.0 + 1, b.3 - b.1 + 1),
                position: s.position,
                angle_deg: s.angle_deg,
                velocity: s.velocity,
            }
        })
        .collect()
}
