/// xorshift64* generator shared by every random draw in the simulation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rng {
    state: u64,
}

const ZERO_SEED_SUBSTITUTE: u64 = 0x9E37_79B9_7F4A_7C15;
const MULTIPLIER: u64 = 2_685_821_657_736_338_717;

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng { state: if seed == 0 { ZERO_SEED_SUBSTITUTE } else { seed } }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(MULTIPLIER)
    }

    /// Uniform-ish value in `0..n` by modulo reduction. `n` must be non-zero.
    pub fn below(&mut self, n: u32) -> u32 {
        (self.next_u64() % n as u64) as u32
    }
}
