use crate::sim::{PlayerId, WorldState};

use super::{luminance, PixelFormat, RenderOptions};

/// Automap color of wall cells.
pub const WALL: [u8; 3] = [210, 210, 210];
const FLOOR: [u8; 3] = [44, 44, 52];
/// Automap color of the viewer's own marker.
pub const VIEWER: [u8; 3] = [40, 255, 40];
const OPPONENT: [u8; 3] = [255, 48, 48];
const ITEM: [u8; 3] = [240, 220, 60];
const ROCKET: [u8; 3] = [255, 150, 0];
const BARREL: [u8; 3] = [90, 140, 60];

struct Map<'a> {
    buf: &'a mut [u8],
    w: usize,
    h: usize,
    format: PixelFormat,
}

impl Map<'_> {
    fn put(&mut self, x: i64, y: i64, rgb: [u8; 3]) {
        if x < 0 || y < 0 || x as usize >= self.w || y as usize >= self.h {
            return;
        }
        let i = y as usize * self.w + x as usize;
        match self.format {
            PixelFormat::Rgb24 => self.buf[i * 3..i * 3 + 3].copy_from_slice(&rgb),
            PixelFormat::Gray8 => self.buf[i] = luminance(rgb),
        }
    }

    fn rect(&mut self, x0: i64, y0: i64, x1: i64, y1: i64, rgb: [u8; 3]) {
        for y in y0..y1 {
            for x in x0..x1 {
                self.put(x, y, rgb);
            }
        }
    }

    /// Filled triangle pointing along `angle` (radians, y down), centered on (cx, cy).
    fn triangle(&mut self, cx: f64, cy: f64, angle: f64, size: f64, rgb: [u8; 3]) {
        let pt = |a: f64, r: f64| (cx + a.cos() * r, cy + a.sin() * r);
        let v = [pt(angle, size), pt(angle + 2.45, size * 0.8), pt(angle - 2.45, size * 0.8)];
        let edge = |a: (f64, f64), b: (f64, f64), p: (f64, f64)| (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
        let area = edge(v[0], v[1], v[2]);
        let x0 = v.iter().map(|p| p.0).fold(f64::MAX, f64::min).floor() as i64;
        let x1 = v.iter().map(|p| p.0).fold(f64::MIN, f64::max).ceil() as i64;
        let y0 = v.iter().map(|p| p.1).fold(f64::MAX, f64::min).floor() as i64;
        let y1 = v.iter().map(|p| p.1).fold(f64::MIN, f64::max).ceil() as i64;
        for y in y0..=y1 {
            for x in x0..=x1 {
                let p = (x as f64 + 0.5, y as f64 + 0.5);
                let e = [edge(v[1], v[2], p), edge(v[2], v[0], p), edge(v[0], v[1], p)];
                if e.iter().all(|e| e * area >= 0.0) {
                    self.put(x, y, rgb);
                }
            }
        }
        // the center pixel always carries the marker
        self.put(cx.floor() as i64, cy.floor() as i64, rgb);
    }
}

/// Top-down view of the map for `viewer`: every cell with `automap_full`,
/// otherwise only the viewer's discovered cells. Objects are triangles
/// pointing the way they face.
pub fn render_automap(world: &WorldState, viewer: PlayerId, opts: &RenderOptions) -> Vec<u8> {
    let (w, h) = (opts.width.max(1), opts.height.max(1));
    let mut buf = vec![0u8; w * h * opts.format.channels()];
    let mut m = Map { buf: &mut buf, w, h, format: opts.format };
    let grid = &world.grid;
    let (mw, mh) = (grid.width(), grid.height());
    let s = (w as f64 / mw as f64).min(h as f64 / mh as f64);
    let ox = (w as f64 - s * mw as f64) / 2.0;
    let oy = (h as f64 - s * mh as f64) / 2.0;
    let seen = world.discovered.get(viewer);
    let known = |c: usize, r: usize| opts.automap_full || seen.is_some_and(|d| d.contains(r * mw + c));

    for r in 0..mh {
        for c in 0..mw {
            if !known(c, r) {
                continue;
            }
            let rgb = if grid.is_wall(c as i64, r as i64) { WALL } else { FLOOR };
            let px = |v: usize, o: f64| (o + v as f64 * s).floor() as i64;
            m.rect(px(c, ox), px(r, oy), px(c + 1, ox), px(r + 1, oy), rgb);
        }
    }

    let to_px = |x: f64, y: f64| (ox + x / 128.0 * s, oy + y / 128.0 * s);
    let visible = |x: f64, y: f64| {
        let (c, r) = ((x / 128.0).floor(), (y / 128.0).floor());
        c >= 0.0 && r >= 0.0 && (c as usize) < mw && (r as usize) < mh && known(c as usize, r as usize)
    };
    let size = (s * 0.35).max(2.0);
    let mut draw = |x: f64, y: f64, angle: f64, rgb| {
        if visible(x, y) {
            let (px, py) = to_px(x, y);
            m.triangle(px, py, angle, size, rgb);
        }
    };
    for it in world.items.iter().filter(|i| i.present()) {
        let c = it.cell.center();
        draw(c.x.to_f64(), c.y.to_f64(), -std::f64::consts::FRAC_PI_2, ITEM);
    }
    for b in world.barrels.iter().filter(|b| !b.destroyed) {
        let c = b.cell.center();
        draw(c.x.to_f64(), c.y.to_f64(), -std::f64::consts::FRAC_PI_2, BARREL);
    }
    for p in &world.projectiles {
        let angle = p.velocity.y.to_f64().atan2(p.velocity.x.to_f64());
        draw(p.pos.x.to_f64(), p.pos.y.to_f64(), angle, ROCKET);
    }
    for a in world.actors.iter().filter(|a| a.alive && a.id != viewer) {
        draw(a.pos.x.to_f64(), a.pos.y.to_f64(), a.angle.to_radians(), OPPONENT);
    }
    if let Some(a) = world.actors.get(viewer) {
        let (px, py) = to_px(a.pos.x.to_f64(), a.pos.y.to_f64());
        m.triangle(px, py, a.angle.to_radians(), size, VIEWER);
    }
    buf
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::scenario::map::parse_map;
    use crate::sim::Rules;

    fn pixel(buf: &[u8], w: usize, x: usize, y: usize) -> [u8; 3] {
        let i = (y * w + x) * 3;
        [buf[i], buf[i + 1], buf[i + 2]]
    }

    #[test]
    fn full_map_draws_every_wall() {
        let grid = Arc::new(parse_map("######\n#S...#\n#..#.#\n######").unwrap());
        let w = WorldState::new(grid.clone(), 1, Rules::default(), 1).unwrap();
        let opts = RenderOptions { automap_full: true, ..RenderOptions::with_size(60, 40) };
        let buf = render_automap(&w, 0, &opts);
        // 10 px per cell, no margins
        for r in 0..4 {
            for c in 0..6 {
                let p = pixel(&buf, 60, c * 10 + 1, r * 10 + 1);
                assert_eq!(p == WALL, grid.is_wall(c as i64, r as i64), "cell {c},{r}");
            }
        }
    }

    #[test]
    fn viewer_marker_in_both_modes() {
        let grid = Arc::new(parse_map("######\n#S...#\n######").unwrap());
        let w = WorldState::new(grid, 1, Rules::default(), 1).unwrap();
        for full in [false, true] {
            let opts = RenderOptions { automap_full: full, ..RenderOptions::with_size(60, 30) };
            let buf = render_automap(&w, 0, &opts);
            // viewer at cell (1,1) center = pixel (15, 15)
            assert_eq!(pixel(&buf, 60, 15, 15), VIEWER);
        }
    }
}
