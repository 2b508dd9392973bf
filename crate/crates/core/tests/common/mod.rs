#![allow(dead_code)]

use hashpim::crossbar::{Crossbar, CrossbarConfig, Label, LineSet, Orientation};
use hashpim::microcode::{MacroKind, MacroOp, OpStream};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_states(n: usize, seed: u64) -> Vec<[u64; 25]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| std::array::from_fn(|_| rng.gen())).collect()
}

pub fn random_messages(lengths: impl IntoIterator<Item = usize>, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    lengths
        .into_iter()
        .map(|n| (0..n).map(|_| rng.gen()).collect())
        .collect()
}

pub const N: usize = 24;

pub fn config() -> CrossbarConfig {
    CrossbarConfig {
        rows: N,
        cols: N,
        horizontal_partitions: 3,
        vertical_partitions: 3,
        partition_rows: 8,
        partition_cols: 8,
        ..CrossbarConfig::default()
    }
}

const KINDS: [MacroKind; 9] = [
    MacroKind::Xor2,
    MacroKind::Mux,
    MacroKind::Copy,
    MacroKind::Not,
    MacroKind::Nor2,
    MacroKind::Nor3,
    MacroKind::Or2,
    MacroKind::And2,
    MacroKind::Init,
];

fn arity(kind: MacroKind, rng: &mut ChaCha8Rng) -> usize {
    match kind {
        MacroKind::Xor2 | MacroKind::Nor2 | MacroKind::Or2 | MacroKind::And2 => 2,
        MacroKind::Mux => rng.gen_range(3..=4),
        MacroKind::Nor3 => 3,
        MacroKind::Copy | MacroKind::Not => 1,
        MacroKind::Init => 0,
    }
}

/// Barrier groups of ops on disjoint spans, so ops within a group are
/// independent as the stream contract requires.
pub fn random_stream(seed: u64) -> OpStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stream = OpStream::new();
    for _ in 0..rng.gen_range(1..10) {
        let orientation = if rng.gen() {
            Orientation::InRow
        } else {
            Orientation::InColumn
        };
        let mut lines: Vec<usize> = (0..N).collect();
        lines.shuffle(&mut rng);
        let ops = rng.gen_range(1..=4);
        let cuts = {
            let mut c: Vec<usize> = (1..N).collect();
            c.shuffle(&mut rng);
            let mut c: Vec<usize> = c[..ops - 1].to_vec();
            c.sort_unstable();
            c
        };
        let mut bounds = vec![0];
        bounds.extend(cuts);
        bounds.push(N);
        for w in bounds.windows(2) {
            let span = LineSet::from_lines(N, lines[w[0]..w[1]].iter().copied());
            let kind = *KINDS.choose(&mut rng).unwrap();
            let mut picks: Vec<usize> = (0..N).collect();
            picks.shuffle(&mut rng);
            let n_in = arity(kind, &mut rng);
            let inputs = &picks[..n_in];
            let mut output = picks[n_in];
            if matches!(kind, MacroKind::Xor2 | MacroKind::Mux) && rng.gen_bool(0.3) {
                output = inputs[1];
            }
            let mut op =
                MacroOp::new(kind, orientation, inputs, output, span, Label::Other).unwrap();
            let temps = &picks[n_in + 1..n_in + 1 + op.temps_needed()];
            if !temps.is_empty() {
                op = op.with_pool(stream.pool(temps));
            }
            stream.push(op);
        }
        stream.barrier();
    }
    stream
}

pub fn random_crossbar(seed: u64) -> Crossbar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
    let mut xb = Crossbar::new(config()).unwrap();
    let bits: Vec<Vec<bool>> = (0..N)
        .map(|_| (0..N).map(|_| rng.gen()).collect())
        .collect();
    xb.write_region(0, 0, &bits).unwrap();
    xb
}
