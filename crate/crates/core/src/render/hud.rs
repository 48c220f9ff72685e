//! Status strip and crosshair. Both go to the screen buffer only.

use crate::sim::Actor;

type Plot<'a> = dyn FnMut(usize, usize, [u8; 3]) + 'a;

/// 3×5 glyphs, one row per byte, high bit on the left.
fn glyph(c: char) -> [u8; 5] {
    match c {
        '0' => [0b111, 0b101, 0b101, 0b101, 0b111],
        '1' => [0b010, 0b110, 0b010, 0b010, 0b111],
        '2' => [0b111, 0b001, 0b111, 0b100, 0b111],
        '3' => [0b111, 0b001, 0b011, 0b001, 0b111],
        '4' => [0b101, 0b101, 0b111, 0b001, 0b001],
        '5' => [0b111, 0b100, 0b111, 0b001, 0b111],
        '6' => [0b111, 0b100, 0b111, 0b101, 0b111],
        '7' => [0b111, 0b001, 0b010, 0b010, 0b010],
        '8' => [0b111, 0b101, 0b111, 0b101, 0b111],
        '9' => [0b111, 0b101, 0b111, 0b001, 0b111],
        'A' => [0b010, 0b101, 0b111, 0b101, 0b101],
        'H' => [0b101, 0b101, 0b111, 0b101, 0b101],
        'M' => [0b101, 0b111, 0b111, 0b101, 0b101],
        'P' => [0b110, 0b101, 0b110, 0b100, 0b100],
        'R' => [0b110, 0b101, 0b110, 0b101, 0b101],
        'W' => [0b101, 0b101, 0b111, 0b111, 0b101],
        _ => [0; 5],
    }
}

/// Height in pixels of the status strip for a frame of height `h`.
pub(super) fn strip_height(h: usize) -> usize {
    5 * (h / 120).max(1) + 4
}

pub(super) fn draw_status(plot: &mut Plot<'_>, w: usize, h: usize, actor: &Actor) {
    let s = (h / 120).max(1);
    let strip = strip_height(h).min(h);
    for y in h - strip..h {
        for x in 0..w {
            plot(x, y, [28, 28, 28]);
        }
    }
    let text = format!(
        "HP{} AR{} W{} AM{}",
        actor.health.max(0),
        actor.armor,
        actor.weapon.slot(),
        actor.ammo(actor.weapon)
    );
    let y0 = h.saturating_sub(strip) + 2;
    let mut x0 = 2;
    for c in text.chars() {
        let g = glyph(c);
        for (gy, bits) in g.iter().enumerate() {
            for gx in 0..3 {
                if bits & (0b100 >> gx) == 0 {
                    continue;
                }
                for dy in 0..s {
                    for dx in 0..s {
                        let (x, y) = (x0 + gx * s + dx, y0 + gy * s + dy);
                        if x < w && y < h {
                            plot(x, y, [230, 200, 60]);
                        }
                    }
                }
            }
        }
        x0 += 4 * s;
    }
}

pub(super) fn draw_crosshair(plot: &mut Plot<'_>, w: usize, h: usize) {
    let (cx, cy) = (w / 2, h / 2);
    let arm = (w / 80).max(2);
    for d in 1..=arm {
        for (x, y) in [(cx + d, cy), (cx.wrapping_sub(d), cy), (cx, cy + d), (cx, cy.wrapping_sub(d))] {
            if x < w && y < h {
                plot(x, y, [255, 255, 255]);
            }
        }
    }
}
