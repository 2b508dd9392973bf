//! SHA3-256 on the crossbar: unit layout, step microcode and the sponge driver.

mod driver;
mod layout;
mod steps;

pub use driver::{CrossbarRun, HashPim, HashRun, Session};
pub use layout::{Geometry, LayoutDump, UnitLayout, UnitSet};
pub use steps::{
    absorb_microcode, chi_microcode, iota_microcode, keccak_f_microcode, pi_microcode,
    rho_microcode, round_body_microcode, round_microcode, theta_microcode, variable_rotate,
    StepBuilder,
};

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KeccakParams {
    pub b: usize,
    pub r: usize,
    pub c: usize,
    pub w: usize,
    pub rounds: usize,
    pub d: usize,
}

impl KeccakParams {
    pub const fn sha3_256() -> Self {
        Self {
            b: 1600,
            r: 1088,
            c: 512,
            w: 64,
            rounds: 24,
            d: 256,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.b != 1600 || self.w != 64 || self.rounds != 24 {
            return bad("only Keccak-f[1600] with 24 rounds is supported");
        }
        if self.b != self.r + self.c {
            return bad("b must equal r + c");
        }
        if self.r == 0 || !self.r.is_multiple_of(self.w) {
            return bad("rate must be a positive multiple of the lane width");
        }
        if self.d == 0 || self.d > self.r || !self.d.is_multiple_of(self.w) {
            return bad("digest bits must be a lane multiple no larger than the rate");
        }
        Ok(())
    }

    pub fn rate_bytes(&self) -> usize {
        self.r / 8
    }

    pub fn rate_lanes(&self) -> usize {
        self.r / self.w
    }
}

impl Default for KeccakParams {
    fn default() -> Self {
        Self::sha3_256()
    }
}

/// Rotation offsets `r[x][y]`.
pub const ROTATION_OFFSETS: [[u32; 5]; 5] = [
    [0, 36, 3, 41, 18],
    [1, 44, 10, 45, 2],
    [62, 6, 43, 15, 61],
    [28, 55, 25, 21, 56],
    [27, 20, 39, 8, 14],
];

pub const ROUND_CONSTANTS: [u64; 24] = [
    0x0000_0000_0000_0001,
    0x0000_0000_0000_8082,
    0x8000_0000_0000_808A,
    0x8000_0000_8000_8000,
    0x0000_0000_0000_808B,
    0x0000_0000_8000_0001,
    0x8000_0000_8000_8081,
    0x8000_0000_0000_8009,
    0x0000_0000_0000_008A,
    0x0000_0000_0000_0088,
    0x0000_0000_8000_8009,
    0x0000_0000_8000_000A,
    0x0000_0000_8000_808B,
    0x8000_0000_0000_008B,
    0x8000_0000_0000_8089,
    0x8000_0000_0000_8003,
    0x8000_0000_0000_8002,
    0x8000_0000_0000_0080,
    0x0000_0000_0000_800A,
    0x8000_0000_8000_000A,
    0x8000_0000_8000_8081,
    0x8000_0000_0000_8080,
    0x0000_0000_8000_0001,
    0x8000_0000_8000_8008,
];

/// Lane index `x + 5y` of the lane stored at unit column `5x + y`.
pub const fn lane_of_column(col: usize) -> usize {
    col / 5 + 5 * (col % 5)
}

pub const fn column_of_lane(lane: usize) -> usize {
    5 * (lane % 5) + lane / 5
}

/// SHA-3 padding (domain bits `01`, then pad10*1) into rate-sized blocks.
pub fn pad_message(message: &[u8], params: &KeccakParams) -> Vec<Vec<u8>> {
    let rate = params.rate_bytes();
    let mut padded = message.to_vec();
    padded.push(0x06);
    padded.resize(padded.len().div_ceil(rate) * rate, 0);
    *padded.last_mut().expect("at least one block") |= 0x80;
    padded.chunks(rate).map(<[u8]>::to_vec).collect()
}

/// Little-endian lanes of one block.
pub fn block_lanes(block: &[u8]) -> Vec<u64> {
    block
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digest(Vec<u8>);

impl Digest {
    pub fn from_lanes(lanes: &[u64], bits: usize) -> Self {
        let bytes = lanes
            .iter()
            .flat_map(|l| l.to_le_bytes())
            .take(bits / 8)
            .collect();
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn bits(&self) -> usize {
        self.0.len() * 8
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl Serialize for Digest {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}
