//! Fixtures shared by the benchmarks.

use hashpim::crossbar::{CrossbarConfig, Program};
use hashpim::keccak::{iota_microcode, round_body_microcode, UnitSet};
use hashpim::{HashPim, Result};

pub fn machine() -> HashPim {
    HashPim::new(CrossbarConfig::default()).expect("default crossbar")
}

pub fn units(hp: &HashPim, count: usize) -> UnitSet {
    let ids: Vec<usize> = (0..count).collect();
    UnitSet::new(*hp.geometry(), &ids).expect("unit ids in range")
}

/// theta..chi plus iota for round 0.
pub fn round_programs(hp: &HashPim, units: &UnitSet) -> Result<(Program, Program)> {
    Ok((
        hp.compile(&round_body_microcode(units)?)?,
        hp.compile(&iota_microcode(units, 0)?)?,
    ))
}
