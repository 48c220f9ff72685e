//! Exact integer geometry over the wall grid.
//!
//! Segments are walked cell by cell (Amanatides-Woo) with every comparison
//! done by cross-multiplication in `i128`, so there is no rounding at all.

use std::cmp::Ordering;

use crate::fixed::{Angle, Vec2};
use crate::scenario::map::{MapGrid, CELL_UNITS};

const CELL_RAW: i64 = (CELL_UNITS as i64) << 16;

/// A non-negative rational `num / den` with `den > 0`, used as a segment
/// parameter in `[0, 1]`.
#[derive(Copy, Clone, Debug)]
pub struct Frac {
    pub num: i128,
    pub den: i128,
}

impl Frac {
    pub const ZERO: Frac = Frac { num: 0, den: 1 };
    pub const ONE: Frac = Frac { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Frac {
        debug_assert!(den > 0);
        Frac { num, den }
    }

    /// Point `p0 + (p1 - p0) * self`, truncated toward zero per axis.
    pub fn lerp(self, p0: Vec2, p1: Vec2) -> Vec2 {
        let ax = p0.x.raw() as i128;
        let ay = p0.y.raw() as i128;
        let dx = p1.x.raw() as i128 - ax;
        let dy = p1.y.raw() as i128 - ay;
        Vec2::new(
            crate::fixed::Fixed((ax + dx * self.num / self.den) as i32),
            crate::fixed::Fixed((ay + dy * self.num / self.den) as i32),
        )
    }
}

impl PartialEq for Frac {
    fn eq(&self, other: &Frac) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frac {}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Frac) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Frac) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// Parameter at which the segment `p0 -> p1` first enters a wall cell, or
/// `None` if it stays on floor. A segment passing exactly through a corner
/// is blocked if either side cell is a wall.
pub fn first_wall(grid: &MapGrid, p0: Vec2, p1: Vec2) -> Option<Frac> {
    let x0 = p0.x.raw() as i64;
    let y0 = p0.y.raw() as i64;
    let dx = p1.x.raw() as i64 - x0;
    let dy = p1.y.raw() as i64 - y0;
    if dx == 0 && dy == 0 {
        return None;
    }
    let mut cx = x0.div_euclid(CELL_RAW);
    let mut cy = y0.div_euclid(CELL_RAW);
    let sx = dx.signum();
    let sy = dy.signum();
    let adx = dx.unsigned_abs() as i128;
    let ady = dy.unsigned_abs() as i128;
    let c = CELL_RAW as i128;
    // distance (along each axis) from p0 to the next boundary crossing
    let mut nx: i128 = match sx {
        1 => ((cx + 1) * CELL_RAW - x0) as i128,
        -1 => (x0 - cx * CELL_RAW) as i128,
        _ => 0,
    };
    let mut ny: i128 = match sy {
        1 => ((cy + 1) * CELL_RAW - y0) as i128,
        -1 => (y0 - cy * CELL_RAW) as i128,
        _ => 0,
    };
    loop {
        let order = if adx == 0 {
            Ordering::Greater
        } else if ady == 0 {
            Ordering::Less
        } else {
            (nx * ady).cmp(&(ny * adx))
        };
        match order {
            Ordering::Less => {
                if nx > adx {
                    return None;
                }
                cx += sx;
                if grid.is_wall(cx, cy) {
                    return Some(Frac::new(nx, adx));
                }
                nx += c;
            }
            Ordering::Greater => {
                if ny > ady {
                    return None;
                }
                cy += sy;
                if grid.is_wall(cx, cy) {
                    return Some(Frac::new(ny, ady));
                }
                ny += c;
            }
            Ordering::Equal => {
                if nx > adx {
                    return None;
                }
                let side_x = grid.is_wall(cx + sx, cy);
                let side_y = grid.is_wall(cx, cy + sy);
                cx += sx;
                cy += sy;
                if side_x || side_y || grid.is_wall(cx, cy) {
                    return Some(Frac::new(nx, adx));
                }
                nx += c;
                ny += c;
            }
        }
    }
}

pub fn segment_clear(grid: &MapGrid, p0: Vec2, p1: Vec2) -> bool {
    first_wall(grid, p0, p1).is_none()
}

/// Entry parameter of segment `p0 -> p1` into the circle at `center`.
/// A segment starting inside the circle enters at 0.
pub fn circle_entry(p0: Vec2, p1: Vec2, center: Vec2, radius: i32) -> Option<Frac> {
    let dx = p1.x.raw() as i128 - p0.x.raw() as i128;
    let dy = p1.y.raw() as i128 - p0.y.raw() as i128;
    let fx = p0.x.raw() as i128 - center.x.raw() as i128;
    let fy = p0.y.raw() as i128 - center.y.raw() as i128;
    let r = (radius as i128) << 16;
    let a = dx * dx + dy * dy;
    if a == 0 {
        return None;
    }
    let b = dx * fx + dy * fy;
    let c = fx * fx + fy * fy - r * r;
    if c <= 0 {
        return Some(Frac::ZERO);
    }
    if b >= 0 {
        return None; // moving away
    }
    let disc = b * b - a * c;
    if disc < 0 {
        return None;
    }
    let root = (disc as u128).isqrt() as i128;
    let num = -b - root;
    if num < 0 || num > a {
        return None;
    }
    Some(Frac::new(num, a))
}

/// True iff `target` lies within 45° of `facing` as seen from `eye`.
pub fn in_field_of_view(eye: Vec2, facing: Angle, target: Vec2) -> bool {
    let rx = target.x.raw() as i128 - eye.x.raw() as i128;
    let ry = target.y.raw() as i128 - eye.y.raw() as i128;
    let cos = facing.cos().raw() as i128;
    let sin = facing.sin().raw() as i128;
    let forward = rx * cos + ry * sin;
    let lateral = ry * cos - rx * sin;
    forward > 0 && lateral.abs() <= forward
}

/// Line of sight plus field-of-view check from `eye` toward `target`.
pub fn sees(grid: &MapGrid, eye: Vec2, facing: Angle, target: Vec2) -> bool {
    in_field_of_view(eye, facing, target) && segment_clear(grid, eye, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::map::parse_map;

    fn room() -> MapGrid {
        parse_map(
            "#######\n\
             #S....#\n\
             #..#..#\n\
             #.....#\n\
             #######",
        )
        .unwrap()
    }

    fn center(c: i32, r: i32) -> Vec2 {
        Vec2::from_units(c * 128 + 64, r * 128 + 64)
    }

    #[test]
    fn pillar_blocks_line_of_sight() {
        let g = room();
        assert!(!segment_clear(&g, center(1, 2), center(5, 2)));
        assert!(segment_clear(&g, center(1, 1), center(5, 1)));
    }

    #[test]
    fn wall_entry_distance_is_exact() {
        let g = room();
        // from x=100 heading +x toward the pillar face at x=384 (segment to x=700)
        let p0 = Vec2::from_units(100, 2 * 128 + 64);
        let p1 = Vec2::from_units(700, 2 * 128 + 64);
        let t = first_wall(&g, p0, p1).unwrap();
        assert_eq!(t.lerp(p0, p1), Vec2::from_units(384, 320));
    }

    #[test]
    fn corner_graze_is_blocked() {
        let g = room();
        // diagonal passing exactly through the pillar's corner
        assert!(!segment_clear(&g, Vec2::from_units(256, 256), Vec2::from_units(512, 512)));
    }

    #[test]
    fn circle_entry_ahead() {
        let p0 = Vec2::from_units(0, 0);
        let p1 = Vec2::from_units(100, 0);
        let t = circle_entry(p0, p1, Vec2::from_units(50, 0), 20).unwrap();
        assert_eq!(t.lerp(p0, p1), Vec2::from_units(30, 0));
        assert!(circle_entry(p0, p1, Vec2::from_units(50, 30), 20).is_none());
        assert!(circle_entry(p0, p1, Vec2::from_units(-50, 0), 20).is_none());
    }

    #[test]
    fn fov_boundaries() {
        let eye = Vec2::from_units(0, 0);
        assert!(in_field_of_view(eye, Angle::ZERO, Vec2::from_units(10, 0)));
        assert!(in_field_of_view(eye, Angle::ZERO, Vec2::from_units(10, 10)));
        assert!(!in_field_of_view(eye, Angle::ZERO, Vec2::from_units(10, 11)));
        assert!(!in_field_of_view(eye, Angle::ZERO, Vec2::from_units(-10, 0)));
        assert!(in_field_of_view(eye, Angle::DEG180, Vec2::from_units(-10, 0)));
    }
}
