//! 16.16 fixed-point scalars and binary angles.
//!
//! Everything the simulation computes goes through these two types so that
//! two machines fed the same inputs land on bit-identical states. The sine
//! table is built from a Taylor series using only IEEE basic operations,
//! which are exactly reproducible, instead of the platform `sin`.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

pub const FRAC_BITS: u32 = 16;
pub const FRAC_UNIT: i32 = 1 << FRAC_BITS;

/// Signed 16.16 fixed-point value measured in game units.
#[derive(Copy, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fixed(pub i32);

impl Fixed {
    pub const ZERO: Fixed = Fixed(0);
    pub const ONE: Fixed = Fixed(FRAC_UNIT);

    pub const fn from_int(v: i32) -> Fixed {
        Fixed(v << FRAC_BITS)
    }

    pub const fn from_raw(raw: i32) -> Fixed {
        Fixed(raw)
    }

    pub const fn raw(self) -> i32 {
        self.0
    }

    /// Integer part, truncated toward zero.
    pub const fn trunc(self) -> i32 {
        self.0 / FRAC_UNIT
    }

    /// Integer part, rounded toward negative infinity.
    pub const fn floor(self) -> i32 {
        self.0 >> FRAC_BITS
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / FRAC_UNIT as f64
    }

    /// Conversion for tooling and tests. Never used on the simulation path.
    pub fn from_f64(v: f64) -> Fixed {
        Fixed((v * FRAC_UNIT as f64).round() as i32)
    }

    /// Product truncated toward zero.
    pub fn mul(self, rhs: Fixed) -> Fixed {
        Fixed(((self.0 as i64 * rhs.0 as i64) / FRAC_UNIT as i64) as i32)
    }

    /// Quotient truncated toward zero. Division by zero saturates.
    pub fn div(self, rhs: Fixed) -> Fixed {
        if rhs.0 == 0 {
            return if self.0 >= 0 { Fixed(i32::MAX) } else { Fixed(i32::MIN) };
        }
        let q = ((self.0 as i64) << FRAC_BITS) / rhs.0 as i64;
        Fixed(q.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    pub fn mul_int(self, k: i32) -> Fixed {
        Fixed(self.0.wrapping_mul(k))
    }

    pub fn abs(self) -> Fixed {
        Fixed(self.0.wrapping_abs())
    }
}

impl Add for Fixed {
    type Output = Fixed;
    fn add(self, rhs: Fixed) -> Fixed {
        Fixed(self.0.wrapping_add(rhs.0))
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    fn sub(self, rhs: Fixed) -> Fixed {
        Fixed(self.0.wrapping_sub(rhs.0))
    }
}

impl AddAssign for Fixed {
    fn add_assign(&mut self, rhs: Fixed) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fixed {
    fn sub_assign(&mut self, rhs: Fixed) {
        *self = *self - rhs;
    }
}

impl Neg for Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed(self.0.wrapping_neg())
    }
}

impl fmt::Debug for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fixed({})", self.to_f64())
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

/// A pair of fixed-point coordinates.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Vec2 {
    pub x: Fixed,
    pub y: Fixed,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: Fixed::ZERO, y: Fixed::ZERO };

    pub const fn new(x: Fixed, y: Fixed) -> Vec2 {
        Vec2 { x, y }
    }

    pub const fn from_units(x: i32, y: i32) -> Vec2 {
        Vec2 { x: Fixed::from_int(x), y: Fixed::from_int(y) }
    }

    /// Squared distance in raw units (2^-32 units²), exact.
    pub fn dist_sq_raw(self, other: Vec2) -> i128 {
        let dx = other.x.0 as i128 - self.x.0 as i128;
        let dy = other.y.0 as i128 - self.y.0 as i128;
        dx * dx + dy * dy
    }

    /// Euclidean distance, truncated to whole raw steps.
    pub fn distance(self, other: Vec2) -> Fixed {
        let d = isqrt_u128(self.dist_sq_raw(other) as u128);
        Fixed(d.min(i32::MAX as u128) as i32)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

pub fn isqrt_u128(v: u128) -> u128 {
    v.isqrt()
}

pub const FINE_ANGLES: usize = 8192;
const FINE_SHIFT: u32 = 32 - 13;
const QUARTER: usize = FINE_ANGLES / 4;

/// Binary angle: the full circle is 2^32 and arithmetic wraps.
#[derive(Copy, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Angle(pub u32);

impl Angle {
    pub const ZERO: Angle = Angle(0);
    pub const DEG90: Angle = Angle(0x4000_0000);
    pub const DEG180: Angle = Angle(0x8000_0000);
    pub const DEG270: Angle = Angle(0xC000_0000);

    /// Angle from hundredths of a degree, truncated toward zero.
    pub fn from_centidegrees(cd: i32) -> Angle {
        let bam = ((cd as i64) << 32) / 36_000;
        Angle(bam as u32)
    }

    pub fn from_degrees(deg: i32) -> Angle {
        Angle::from_centidegrees(deg * 100)
    }

    pub fn to_degrees(self) -> f64 {
        self.0 as f64 * 360.0 / 4_294_967_296.0
    }

    pub fn to_radians(self) -> f64 {
        self.0 as f64 * std::f64::consts::TAU / 4_294_967_296.0
    }

    /// Signed offset to `other` in BAM, in (-2^31, 2^31].
    pub fn delta_to(self, other: Angle) -> i32 {
        other.0.wrapping_sub(self.0) as i32
    }

    pub fn fine_index(self) -> usize {
        (self.0 >> FINE_SHIFT) as usize
    }

    pub fn sin(self) -> Fixed {
        Fixed(sine_table()[self.fine_index()])
    }

    pub fn cos(self) -> Fixed {
        Fixed(sine_table()[(self.fine_index() + QUARTER) & (FINE_ANGLES - 1)])
    }

    /// Unit direction vector from the lookup table.
    pub fn direction(self) -> Vec2 {
        Vec2::new(self.cos(), self.sin())
    }

    /// Direction of the vector (dx, dy), quantized to the fine-angle grid.
    ///
    /// Binary search over the first quadrant of the sine table; every other
    /// quadrant is rotated into it first. The zero vector maps to angle 0.
    pub fn from_vector(dx: i64, dy: i64) -> Angle {
        if dx == 0 && dy == 0 {
            return Angle::ZERO;
        }
        // rotate into the quadrant x > 0, y >= 0
        let (qx, qy, base) = if dx > 0 && dy >= 0 {
            (dx, dy, 0u32)
        } else if dx <= 0 && dy > 0 {
            (dy, -dx, Angle::DEG90.0)
        } else if dx < 0 && dy <= 0 {
            (-dx, -dy, Angle::DEG180.0)
        } else {
            (-dy, dx, Angle::DEG270.0)
        };
        let table = sine_table();
        let (qx, qy) = (qx as i128, qy as i128);
        // largest fine index a in [0, QUARTER] with tan(a) <= qy/qx
        let (mut lo, mut hi) = (0usize, QUARTER);
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            let s = table[mid] as i128;
            let c = table[QUARTER - mid] as i128;
            if qx * s <= qy * c {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        // pick the nearer of lo and lo + 1
        let mut best = lo;
        if lo < QUARTER {
            let err = |a: usize| {
                let s = table[a] as i128;
                let c = table[QUARTER - a] as i128;
                (qy * c - qx * s).abs()
            };
            if err(lo + 1) < err(lo) {
                best = lo + 1;
            }
        }
        Angle(base.wrapping_add((best as u32) << FINE_SHIFT))
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle(self.0.wrapping_add(rhs.0))
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle(self.0.wrapping_sub(rhs.0))
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Angle({:.3}°)", self.to_degrees())
    }
}

/// The shared 8192-entry sine table in 16.16.
pub fn sine_table() -> &'static [i32; FINE_ANGLES] {
    static TABLE: OnceLock<Box<[i32; FINE_ANGLES]>> = OnceLock::new();
    TABLE.get_or_init(build_sine_table)
}

fn series_sin(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for k in 1..30 {
        let k = k as f64;
        term = -term * x2 / ((2.0 * k) * (2.0 * k + 1.0));
        sum += term;
    }
    sum
}

fn build_sine_table() -> Box<[i32; FINE_ANGLES]> {
    let mut table = Box::new([0i32; FINE_ANGLES]);
    for i in 0..=QUARTER {
        let x = std::f64::consts::FRAC_PI_2 * (i as f64) / (QUARTER as f64);
        table[i] = (series_sin(x) * FRAC_UNIT as f64).round() as i32;
    }
    for i in QUARTER + 1..2 * QUARTER {
        table[i] = table[2 * QUARTER - i];
    }
    for i in 2 * QUARTER..FINE_ANGLES {
        table[i] = -table[i - 2 * QUARTER];
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_truncates_toward_zero() {
        let a = Fixed::from_raw(3);
        let half = Fixed::from_raw(FRAC_UNIT / 2);
        assert_eq!(a.mul(half).raw(), 1);
        assert_eq!((-a).mul(half).raw(), -1);
        assert_eq!(Fixed::from_int(10).mul(Fixed::ONE), Fixed::from_int(10));
    }

    #[test]
    fn cardinal_directions_are_exact() {
        assert_eq!(Angle::ZERO.cos(), Fixed::ONE);
        assert_eq!(Angle::ZERO.sin(), Fixed::ZERO);
        assert_eq!(Angle::DEG90.sin(), Fixed::ONE);
        assert_eq!(Angle::DEG90.cos(), Fixed::ZERO);
        assert_eq!(Angle::DEG180.cos(), -Fixed::ONE);
        assert_eq!(Angle::DEG270.sin(), -Fixed::ONE);
    }

    #[test]
    fn table_tracks_libm_closely() {
        let t = sine_table();
        for (i, v) in t.iter().enumerate() {
            let want = (std::f64::consts::TAU * i as f64 / FINE_ANGLES as f64).sin();
            assert!((*v as f64 / FRAC_UNIT as f64 - want).abs() < 2e-5, "index {i}");
        }
    }

    #[test]
    fn centidegrees_round_trip() {
        assert_eq!(Angle::from_degrees(90), Angle::DEG90);
        assert_eq!(Angle::from_degrees(-90), Angle::DEG270);
        assert!((Angle::from_centidegrees(500).to_degrees() - 5.0).abs() < 1e-6);
    }

    #[test]
    fn from_vector_matches_atan2() {
        for (dx, dy) in [(1, 0), (0, 1), (-1, 0), (0, -1), (3, 4), (-7, 2), (-5, -5), (9, -1)] {
            let a = Angle::from_vector(dx * 1000, dy * 1000);
            let want = (dy as f64).atan2(dx as f64).to_degrees().rem_euclid(360.0);
            let got = a.to_degrees();
            let diff = (got - want + 540.0).rem_euclid(360.0) - 180.0;
            assert!(diff.abs() < 0.05, "({dx},{dy}) got {got} want {want}");
        }
    }

    #[test]
    fn distance_is_exact_on_axis() {
        let a = Vec2::from_units(0, 0);
        let b = Vec2::from_units(30, 40);
        assert_eq!(a.distance(b), Fixed::from_int(50));
    }
}
