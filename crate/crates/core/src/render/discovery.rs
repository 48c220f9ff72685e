use crate::sim::{PlayerId, WorldState};

/// Rays cast across the 90° field of view per discovery update.
pub const DISCOVERY_RAYS: usize = 256;

/// Unit directions of the discovery rays for a viewer facing `angle_deg`,
/// evenly spaced from 45° left to 45° right.
pub fn discovery_rays(angle_deg: f64) -> Vec<(f64, f64)> {
    (0..DISCOVERY_RAYS)
        .map(|i| {
            let a = (angle_deg - 45.0 + 90.0 * i as f64 / (DISCOVERY_RAYS - 1) as f64).to_radians();
            (a.cos(), a.sin())
        })
        .collect()
}

/// Marks every cell the viewer's field of view reaches, up to and including
/// the first wall on each ray, in its discovered set. Returns how many cells
/// were newly marked.
pub fn update_discovery(world: &mut WorldState, viewer: PlayerId) -> usize {
    let Some(a) = world.actors.get(viewer) else {
        return 0;
    };
    let grid = world.grid.clone();
    let (w, h) = (grid.width() as i64, grid.height() as i64);
    let px = a.pos.x.to_f64() / 128.0;
    let py = a.pos.y.to_f64() / 128.0;
    let rays = discovery_rays(a.angle.to_degrees());
    let seen = &mut world.discovered[viewer];
    let before = seen.count();
    let mut mark = |c: i64, r: i64| {
        if (0..w).contains(&c) && (0..h).contains(&r) {
            seen.mark((r * w + c) as usize);
        }
    };
    mark(px.floor() as i64, py.floor() as i64);
    for (rx, ry) in rays {
        let mut col = px.floor() as i64;
        let mut row = py.floor() as i64;
        let dx = if rx == 0.0 { f64::INFINITY } else { (1.0 / rx).abs() };
        let dy = if ry == 0.0 { f64::INFINITY } else { (1.0 / ry).abs() };
        let (sx, mut side_x) = if rx < 0.0 { (-1, (px - col as f64) * dx) } else { (1, (col as f64 + 1.0 - px) * dx) };
        let (sy, mut side_y) = if ry < 0.0 { (-1, (py - row as f64) * dy) } else { (1, (row as f64 + 1.0 - py) * dy) };
        for _ in 0..(w + h) * 2 + 4 {
            if side_x < side_y {
                side_x += dx;
                col += sx;
            } else {
                side_y += dy;
                row += sy;
            }
            mark(col, row);
            if grid.is_wall(col, row) {
                break;
            }
        }
    }
    seen.count() - before
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fixed::{Angle, Vec2};
    use crate::scenario::map::parse_map;
    use crate::sim::Rules;

    #[test]
    fn corridor_reveals_only_ahead() {
        let grid = Arc::new(parse_map("#########\n#S......#\n#########").unwrap());
        let mut w = WorldState::new(grid, 1, Rules::default(), 1).unwrap();
        w.actors[0].pos = Vec2::from_units(192, 192);
        w.actors[0].angle = Angle::ZERO;
        let n = update_discovery(&mut w, 0);
        assert!(n > 0);
        let d = &w.discovered[0];
        // the whole corridor row plus the far wall
        for c in 1..9 {
            assert!(d.contains(9 + c), "cell {c}");
        }
        // the wall behind the viewer stays unknown
        assert!(!d.contains(9));
        assert_eq!(update_discovery(&mut w, 0), 0);
    }
}
