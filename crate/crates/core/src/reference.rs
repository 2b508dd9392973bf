//! Plain software Keccak-f[1600] and SHA3-256.
//!
//! Round constants and rotation offsets are generated here from their
//! definitions (the degree-8 LFSR and the (t+1)(t+2)/2 walk) rather than
//! copied from a table.

#![allow(clippy::needless_range_loop)]

/// Lanes indexed `[x][y]`, bit `z` of a lane at bit position `z`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SoftState(pub [[u64; 5]; 5]);

impl SoftState {
    /// Lane `i` is `A[i % 5][i / 5]`.
    pub fn from_lanes(lanes: &[u64; 25]) -> Self {
        let mut a = [[0; 5]; 5];
        for (i, &l) in lanes.iter().enumerate() {
            a[i % 5][i / 5] = l;
        }
        Self(a)
    }

    pub fn lanes(&self) -> [u64; 25] {
        std::array::from_fn(|i| self.0[i % 5][i / 5])
    }
}

fn lfsr_bit(t: usize) -> u64 {
    let mut r: u16 = 1;
    for _ in 0..t % 255 {
        r <<= 1;
        if r & 0x100 != 0 {
            r ^= 0x171;
        }
    }
    (r & 1) as u64
}

pub fn round_constant(round: usize) -> u64 {
    (0..7).fold(0, |rc, j| rc | lfsr_bit(j + 7 * round) << ((1 << j) - 1))
}

pub fn round_constants() -> [u64; 24] {
    std::array::from_fn(round_constant)
}

/// Offsets `[x][y]`.
pub fn rotation_offsets() -> [[u32; 5]; 5] {
    let mut r = [[0u32; 5]; 5];
    let (mut x, mut y) = (1, 0);
    for t in 0..24u32 {
        r[x][y] = ((t + 1) * (t + 2) / 2) % 64;
        (x, y) = (y, (2 * x + 3 * y) % 5);
    }
    r
}

pub fn theta(s: &mut SoftState) {
    let a = &mut s.0;
    let c: [u64; 5] = std::array::from_fn(|x| a[x].iter().fold(0, |acc, l| acc ^ l));
    for x in 0..5 {
        let d = c[(x + 4) % 5] ^ c[(x + 1) % 5].rotate_left(1);
        for lane in &mut a[x] {
            *lane ^= d;
        }
    }
}

pub fn rho(s: &mut SoftState) {
    let r = rotation_offsets();
    for x in 0..5 {
        for y in 0..5 {
            s.0[x][y] = s.0[x][y].rotate_left(r[x][y]);
        }
    }
}

pub fn pi(s: &mut SoftState) {
    let a = s.0;
    for x in 0..5 {
        for y in 0..5 {
            s.0[y][(2 * x + 3 * y) % 5] = a[x][y];
        }
    }
}

pub fn chi(s: &mut SoftState) {
    let a = s.0;
    for x in 0..5 {
        for y in 0..5 {
            s.0[x][y] = a[x][y] ^ (!a[(x + 1) % 5][y] & a[(x + 2) % 5][y]);
        }
    }
}

pub fn iota(s: &mut SoftState, round: usize) {
    s.0[0][0] ^= round_constant(round);
}

pub fn round(s: &mut SoftState, r: usize) {
    theta(s);
    rho(s);
    pi(s);
    chi(s);
    iota(s, r);
}

pub fn keccak_f(s: &mut SoftState) {
    for r in 0..24 {
        round(s, r);
    }
}

/// XOR a rate-sized block (little-endian lanes) into the state.
pub fn absorb_block(s: &mut SoftState, block: &[u8]) {
    for (i, chunk) in block.chunks_exact(8).enumerate() {
        s.0[i % 5][i / 5] ^= u64::from_le_bytes(chunk.try_into().unwrap());
    }
}

pub fn sha3_256(message: &[u8]) -> [u8; 32] {
    const RATE: usize = 136;
    let mut padded = message.to_vec();
    padded.push(0x06);
    padded.resize(padded.len().div_ceil(RATE) * RATE, 0);
    *padded.last_mut().unwrap() |= 0x80;
    let mut s = SoftState::default();
    for block in padded.chunks_exact(RATE) {
        absorb_block(&mut s, block);
        keccak_f(&mut s);
    }
    let mut out = [0u8; 32];
    for (i, chunk) in out.chunks_exact_mut(8).enumerate() {
        chunk.copy_from_slice(&s.0[i][0].to_le_bytes());
    }
    out
}
