//! Character-grid map format.
//!
//! ```text
//! #######
//! #S.M.S#
//! #..B..#
//! #######
//! ```
//!
//! `#` wall, `.` floor, `S` spawn, `M` medikit, `A` armor, `a` bullets,
//! `r` rockets, `R` rocket launcher, `B` barrel. Every placement sits on a
//! floor cell at the cell center.

use std::fmt;

use thiserror::Error;

use crate::fixed::{Fixed, Vec2};

/// Side length of one grid cell in game units.
pub const CELL_UNITS: i32 = 128;

/// Largest accepted width or height, keeping coordinates inside 16.16 range.
pub const MAX_MAP_CELLS: usize = 200;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    Wall,
    Floor,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellPos {
    pub col: u16,
    pub row: u16,
}

impl CellPos {
    pub const fn new(col: u16, row: u16) -> CellPos {
        CellPos { col, row }
    }

    pub fn center(self) -> Vec2 {
        let half = CELL_UNITS / 2;
        Vec2::new(
            Fixed::from_int(self.col as i32 * CELL_UNITS + half),
            Fixed::from_int(self.row as i32 * CELL_UNITS + half),
        )
    }

    /// Cell containing a world position.
    pub fn containing(p: Vec2) -> Option<CellPos> {
        let col = p.x.floor().div_euclid(CELL_UNITS);
        let row = p.y.floor().div_euclid(CELL_UNITS);
        if col < 0 || row < 0 || col > u16::MAX as i32 || row > u16::MAX as i32 {
            return None;
        }
        Some(CellPos::new(col as u16, row as u16))
    }
}

impl fmt::Display for CellPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.col, self.row)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItemKind {
    Medikit,
    Armor,
    AmmoBullets,
    AmmoRockets,
    WeaponRocketLauncher,
}

impl ItemKind {
    pub fn name(self) -> &'static str {
        match self {
            ItemKind::Medikit => "Medikit",
            ItemKind::Armor => "Armor",
            ItemKind::AmmoBullets => "Clip",
            ItemKind::AmmoRockets => "RocketAmmo",
            ItemKind::WeaponRocketLauncher => "RocketLauncher",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            ItemKind::Medikit => 0,
            ItemKind::Armor => 1,
            ItemKind::AmmoBullets => 2,
            ItemKind::AmmoRockets => 3,
            ItemKind::WeaponRocketLauncher => 4,
        }
    }

    fn tile(self) -> char {
        match self {
            ItemKind::Medikit => 'M',
            ItemKind::Armor => 'A',
            ItemKind::AmmoBullets => 'a',
            ItemKind::AmmoRockets => 'r',
            ItemKind::WeaponRocketLauncher => 'R',
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("empty map")]
    Empty,
    #[error("non-rectangular map: line {line} has {found} columns, expected {expected}")]
    NonRectangular { line: usize, found: usize, expected: usize },
    #[error("unknown tile '{tile}' at {line}:{column}")]
    UnknownTile { tile: char, line: usize, column: usize },
    #[error("open border at {line}:{column}: border cells must be walls")]
    OpenBorder { line: usize, column: usize },
    #[error("map has no spawn point")]
    MissingSpawn,
    #[error("map is {width}x{height}, larger than the {max}x{max} limit")]
    TooLarge { width: usize, height: usize, max: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapGrid {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    pub spawns: Vec<CellPos>,
    pub items: Vec<(ItemKind, CellPos)>,
    pub barrels: Vec<CellPos>,
}

impl MapGrid {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Cell kind; everything outside the grid is wall.
    pub fn cell(&self, col: i64, row: i64) -> Cell {
        if col < 0 || row < 0 || col >= self.width as i64 || row >= self.height as i64 {
            return Cell::Wall;
        }
        self.cells[row as usize * self.width + col as usize]
    }

    pub fn is_wall(&self, col: i64, row: i64) -> bool {
        self.cell(col, row) == Cell::Wall
    }

    pub fn wall_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == Cell::Wall).count()
    }

    /// Serializes back to the text grid (LF line endings, no trailing newline).
    pub fn to_text(&self) -> String {
        let mut rows: Vec<Vec<char>> = (0..self.height)
            .map(|r| {
                (0..self.width)
                    .map(|c| match self.cells[r * self.width + c] {
                        Cell::Wall => '#',
                        Cell::Floor => '.',
                    })
                    .collect()
            })
            .collect();
        for s in &self.spawns {
            rows[s.row as usize][s.col as usize] = 'S';
        }
        for (kind, p) in &self.items {
            rows[p.row as usize][p.col as usize] = kind.tile();
        }
        for b in &self.barrels {
            rows[b.row as usize][b.col as usize] = 'B';
        }
        rows.into_iter().map(|r| r.into_iter().collect::<String>()).collect::<Vec<_>>().join("\n")
    }
}

/// Parses the character-grid format. CRLF endings and trailing blank lines
/// are tolerated.
pub fn parse_map(text: &str) -> Result<MapGrid, MapError> {
    let mut lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    while lines.first().is_some_and(|l| l.trim().is_empty()) {
        lines.remove(0);
    }
    if lines.is_empty() {
        return Err(MapError::Empty);
    }
    let width = lines[0].chars().count();
    let height = lines.len();
    if width == 0 {
        return Err(MapError::Empty);
    }
    if width > MAX_MAP_CELLS || height > MAX_MAP_CELLS {
        return Err(MapError::TooLarge { width, height, max: MAX_MAP_CELLS });
    }

    let mut grid = MapGrid {
        width,
        height,
        cells: Vec::with_capacity(width * height),
        spawns: Vec::new(),
        items: Vec::new(),
        barrels: Vec::new(),
    };
    for (r, line) in lines.iter().enumerate() {
        let found = line.chars().count();
        if found != width {
            return Err(MapError::NonRectangular { line: r + 1, found, expected: width });
        }
        for (c, ch) in line.chars().enumerate() {
            let pos = CellPos::new(c as u16, r as u16);
            let cell = match ch {
                '#' => Cell::Wall,
                '.' => Cell::Floor,
                'S' => {
                    grid.spawns.push(pos);
                    Cell::Floor
                }
                'M' | 'A' | 'a' | 'r' | 'R' => {
                    let kind = match ch {
                        'M' => ItemKind::Medikit,
                        'A' => ItemKind::Armor,
                        'a' => ItemKind::AmmoBullets,
                        'r' => ItemKind::AmmoRockets,
                        _ => ItemKind::WeaponRocketLauncher,
                    };
                    grid.items.push((kind, pos));
                    Cell::Floor
                }
                'B' => {
                    grid.barrels.push(pos);
                    Cell::Floor
                }
                other => {
                    return Err(MapError::UnknownTile { tile: other, line: r + 1, column: c + 1 })
                }
            };
            let border = r == 0 || c == 0 || r + 1 == height || c + 1 == width;
            if border && cell != Cell::Wall {
                return Err(MapError::OpenBorder { line: r + 1, column: c + 1 });
            }
            grid.cells.push(cell);
        }
    }
    if grid.spawns.is_empty() {
        return Err(MapError::MissingSpawn);
    }
    Ok(grid)
}
