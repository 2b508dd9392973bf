use std::collections::HashMap;
use std::io::Write;
use std::ops::Range;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use super::layout::{Geometry, UnitLayout, UnitSet};
use super::steps::{absorb_microcode, iota_microcode, round_body_microcode};
use super::{
    block_lanes, lane_of_column, pad_message, Digest, KeccakParams, ROTATION_OFFSETS,
    ROUND_CONSTANTS,
};
use crate::crossbar::{Crossbar, CrossbarConfig, ExecutionStats, PartitionMap, Program};
use crate::error::{Error, Result};
use crate::microcode::{schedule, OpStream};

/// Programs for one set of active units.
#[derive(Debug)]
struct Compiled {
    body: Program,
    iota: Vec<Program>,
    absorb: Vec<(Range<usize>, Program)>,
}

/// SHA-3 accelerator built from one or more identical crossbars.
#[derive(Debug)]
pub struct HashPim {
    config: CrossbarConfig,
    params: KeccakParams,
    geometry: Geometry,
    map: PartitionMap,
    programs: Mutex<HashMap<Vec<usize>, Arc<Compiled>>>,
}

impl HashPim {
    pub fn new(config: CrossbarConfig) -> Result<Self> {
        Self::with_params(config, KeccakParams::sha3_256())
    }

    pub fn with_params(config: CrossbarConfig, params: KeccakParams) -> Result<Self> {
        params.validate()?;
        let geometry = Geometry::from_config(&config)?;
        let map = config.partition_map()?;
        Ok(Self {
            config,
            params,
            geometry,
            map,
            programs: Mutex::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &CrossbarConfig {
        &self.config
    }

    pub fn params(&self) -> &KeccakParams {
        &self.params
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    /// Units per crossbar.
    pub fn capacity(&self) -> usize {
        self.geometry.capacity()
    }

    pub fn compile(&self, stream: &OpStream) -> Result<Program> {
        Program::new(&self.map, schedule(stream, &self.map)?)
    }

    fn programs(&self, units: &UnitSet) -> Result<Arc<Compiled>> {
        let key = units.ids();
        if let Some(p) = self.programs.lock().expect("program cache").get(&key) {
            return Ok(Arc::clone(p));
        }
        let lanes = self.params.rate_lanes();
        let absorb = (0..lanes)
            .step_by(10)
            .map(|s| {
                let range = s..(s + 10).min(lanes);
                Ok((
                    range.clone(),
                    self.compile(&absorb_microcode(units, range)?)?,
                ))
            })
            .collect::<Result<_>>()?;
        let compiled = Arc::new(Compiled {
            body: self.compile(&round_body_microcode(units)?)?,
            iota: (0..ROUND_CONSTANTS.len())
                .map(|r| self.compile(&iota_microcode(units, r)?))
                .collect::<Result<_>>()?,
            absorb,
        });
        self.programs
            .lock()
            .expect("program cache")
            .insert(key, Arc::clone(&compiled));
        Ok(compiled)
    }

    pub fn session(&self) -> Result<Session<'_>> {
        Session::new(self)
    }

    pub fn hash(&self, message: &[u8]) -> Result<(Digest, ExecutionStats)> {
        let mut run = self.hash_messages(&[message], 1)?;
        let stats = run.crossbars.pop().expect("one crossbar").stats;
        Ok((run.digests.pop().expect("one digest"), stats))
    }

    /// One unit per message, filling crossbars in order; each crossbar runs
    /// on its own thread.
    pub fn hash_messages<M: AsRef<[u8]> + Sync>(
        &self,
        messages: &[M],
        crossbars: usize,
    ) -> Result<HashRun> {
        self.hash_messages_traced(messages, crossbars, None)
    }

    /// As [`HashPim::hash_messages`], tracing the first crossbar's cycles.
    pub fn hash_messages_traced<M: AsRef<[u8]> + Sync>(
        &self,
        messages: &[M],
        crossbars: usize,
        trace: Option<Box<dyn Write + Send>>,
    ) -> Result<HashRun> {
        let capacity = self.capacity() * crossbars;
        if messages.len() > capacity {
            return Err(Error::Capacity {
                messages: messages.len(),
                capacity,
            });
        }
        let chunks: Vec<Range<usize>> = (0..messages.len())
            .step_by(self.capacity())
            .map(|s| s..(s + self.capacity()).min(messages.len()))
            .collect();
        let mut trace = trace;
        let results: Vec<Result<(Vec<Digest>, CrossbarRun)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|range| {
                    let sink = trace.take();
                    let range = range.clone();
                    scope.spawn(move || {
                        let mut session = self.session()?;
                        if let Some(sink) = sink {
                            session.crossbar_mut().set_trace(sink);
                        }
                        let batch: Vec<&[u8]> =
                            messages[range.clone()].iter().map(AsRef::as_ref).collect();
                        let digests = session.hash(&batch)?;
                        Ok((digests, session.finish(range)?))
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("crossbar thread panicked"))
                .collect()
        });
        let mut run = HashRun {
            digests: Vec::with_capacity(messages.len()),
            crossbars: Vec::with_capacity(chunks.len()),
        };
        for r in results {
            let (digests, xb) = r?;
            run.digests.extend(digests);
            run.crossbars.push(xb);
        }
        Ok(run)
    }
}

/// Per-crossbar outcome of a hashing run.
#[derive(Clone, Debug, Serialize)]
pub struct CrossbarRun {
    pub messages: Range<usize>,
    pub stats: ExecutionStats,
    /// Lockstep Keccak-f invocations.
    pub permutations: u64,
    /// Sum over invocations of the units taking part.
    pub unit_permutations: u64,
}

#[derive(Clone, Debug)]
pub struct HashRun {
    pub digests: Vec<Digest>,
    pub crossbars: Vec<CrossbarRun>,
}

impl HashRun {
    pub fn stats(&self) -> ExecutionStats {
        let mut iter = self.crossbars.iter();
        let mut total = iter
            .next()
            .map(|c| c.stats.clone())
            .unwrap_or_else(|| ExecutionStats::new(0.0));
        for c in iter {
            total.merge(&c.stats);
        }
        total
    }

    fn rounds(&self) -> (u64, u64) {
        let rounds = ROUND_CONSTANTS.len() as u64;
        let p = self.crossbars.iter().map(|c| c.permutations).sum::<u64>();
        let u = self
            .crossbars
            .iter()
            .map(|c| c.unit_permutations)
            .sum::<u64>();
        (p * rounds, u * rounds)
    }

    /// Average cycles of one lockstep round (theta through iota).
    pub fn cycles_per_round(&self) -> Option<f64> {
        let (rounds, _) = self.rounds();
        (rounds > 0).then(|| self.stats().round_steps().cycles as f64 / rounds as f64)
    }

    /// Round-step energy per unit per round, in joules.
    pub fn energy_per_unit_round_j(&self) -> Option<f64> {
        let (_, unit_rounds) = self.rounds();
        let stats = self.stats();
        (unit_rounds > 0).then(|| {
            stats.round_steps().gate_executions as f64 * stats.gate_energy_fj() * 1e-15
                / unit_rounds as f64
        })
    }
}

/// One simulated crossbar with the constant blocks loaded.
#[derive(Debug)]
pub struct Session<'h> {
    hp: &'h HashPim,
    xb: Crossbar,
    permutations: u64,
    unit_permutations: u64,
}

impl<'h> Session<'h> {
    fn new(hp: &'h HashPim) -> Result<Self> {
        let mut s = Self {
            hp,
            xb: Crossbar::new(hp.config.clone())?,
            permutations: 0,
            unit_permutations: 0,
        };
        for column in 0..hp.geometry.unit_columns {
            s.load_offsets(column, &ROTATION_OFFSETS)?;
        }
        for band in 0..hp.geometry.bands {
            s.xb.write_words(
                hp.geometry.band_origin(band),
                hp.geometry.rc_col0(),
                &ROUND_CONSTANTS,
            )?;
        }
        Ok(s)
    }

    pub fn crossbar(&self) -> &Crossbar {
        &self.xb
    }

    pub fn crossbar_mut(&mut self) -> &mut Crossbar {
        &mut self.xb
    }

    pub fn geometry(&self) -> &Geometry {
        &self.hp.geometry
    }

    /// Overwrite the rotation offsets seen by one unit column, `offsets[x][y]`.
    pub fn load_offsets(&mut self, column: usize, offsets: &[[u32; 5]; 5]) -> Result<()> {
        let g = self.hp.geometry;
        if column >= g.unit_columns {
            return Err(Error::Address {
                what: "unit column",
                index: column,
                limit: g.unit_columns,
            });
        }
        if offsets.iter().flatten().any(|&r| r >= 64) {
            return Err(Error::Config("rotation offsets must be below 64".into()));
        }
        let bits: Vec<Vec<bool>> = (0..6)
            .map(|j| {
                (0..UnitLayout::LANES)
                    .map(|col| offsets[col / 5][col % 5] >> j & 1 == 1)
                    .collect()
            })
            .collect();
        self.xb
            .write_region(g.rot_row0(), g.column_origin(column), &bits)
    }

    fn unit(&self, id: usize) -> Result<UnitLayout> {
        self.hp.geometry.unit(id)
    }

    /// Store a state given as lanes `x + 5y`.
    pub fn write_state(&mut self, unit: usize, lanes: &[u64; 25]) -> Result<()> {
        let u = self.unit(unit)?;
        let words: Vec<u64> = (0..UnitLayout::LANES)
            .map(|c| lanes[lane_of_column(c)])
            .collect();
        self.xb.write_words(u.origin_row, u.origin_col, &words)
    }

    pub fn read_state(&mut self, unit: usize) -> Result<[u64; 25]> {
        let u = self.unit(unit)?;
        let words = self
            .xb
            .read_words(u.origin_row, u.origin_col, UnitLayout::LANES)?;
        let mut lanes = [0u64; 25];
        for (c, w) in words.into_iter().enumerate() {
            lanes[lane_of_column(c)] = w;
        }
        Ok(lanes)
    }

    /// Schedule and execute a stream with every bundle checked.
    pub fn execute(&mut self, stream: &OpStream) -> Result<()> {
        for bundle in schedule(stream, &self.hp.map)? {
            self.xb.execute_bundle(&bundle)?;
        }
        Ok(())
    }

    pub fn run(&mut self, program: &Program) -> Result<()> {
        self.xb.run(program)
    }

    /// XOR one rate block into each unit's state. The first block of a
    /// message is written straight into the zero state.
    pub fn absorb(&mut self, units: &UnitSet, blocks: &[&[u8]], first: bool) -> Result<()> {
        let rate = self.hp.params.rate_bytes();
        if blocks.len() != units.len() || blocks.iter().any(|b| b.len() != rate) {
            return Err(Error::Shape(format!(
                "expected {} blocks of {rate} bytes for {} units",
                units.len(),
                units.len()
            )));
        }
        let lanes: Vec<Vec<u64>> = blocks.iter().map(|b| block_lanes(b)).collect();
        if first {
            for (u, l) in units.units().iter().zip(&lanes) {
                let mut state = [0u64; 25];
                state[..l.len()].copy_from_slice(l);
                self.write_state(u.id, &state)?;
            }
            return Ok(());
        }
        let compiled = self.hp.programs(units)?;
        for (range, program) in &compiled.absorb {
            for (u, l) in units.units().iter().zip(&lanes) {
                self.xb
                    .write_words(u.origin_row, u.col(UnitLayout::C), &l[range.clone()])?;
            }
            self.xb.run(program)?;
        }
        Ok(())
    }

    /// Keccak-f on every unit in `units`, in lockstep.
    pub fn permute(&mut self, units: &UnitSet) -> Result<()> {
        let compiled = self.hp.programs(units)?;
        for iota in &compiled.iota {
            self.xb.run(&compiled.body)?;
            self.xb.run(iota)?;
        }
        self.permutations += 1;
        self.unit_permutations += units.len() as u64;
        Ok(())
    }

    /// Hash `messages[i]` in unit `i`.
    pub fn hash(&mut self, messages: &[&[u8]]) -> Result<Vec<Digest>> {
        let g = self.hp.geometry;
        if messages.len() > g.capacity() {
            return Err(Error::Capacity {
                messages: messages.len(),
                capacity: g.capacity(),
            });
        }
        let padded: Vec<Vec<Vec<u8>>> = messages
            .iter()
            .map(|m| pad_message(m, &self.hp.params))
            .collect();
        let blocks = padded.iter().map(Vec::len).max().unwrap_or(0);
        for i in 0..blocks {
            let ids: Vec<usize> = (0..padded.len()).filter(|&u| padded[u].len() > i).collect();
            let units = UnitSet::new(g, &ids)?;
            let block_refs: Vec<&[u8]> = ids.iter().map(|&u| padded[u][i].as_slice()).collect();
            self.absorb(&units, &block_refs, i == 0)?;
            self.permute(&units)?;
        }
        let lanes = self.hp.params.d / self.hp.params.w;
        (0..messages.len())
            .map(|u| {
                let u = self.unit(u)?;
                let words: Vec<u64> = (0..lanes)
                    .map(|x| {
                        self.xb
                            .read_words(u.origin_row, u.col(UnitLayout::lane(x, 0)), 1)
                            .map(|w| w[0])
                    })
                    .collect::<Result<_>>()?;
                Ok(Digest::from_lanes(&words, self.hp.params.d))
            })
            .collect()
    }

    pub fn finish(mut self, messages: Range<usize>) -> Result<CrossbarRun> {
        self.xb.finish_trace()?;
        Ok(CrossbarRun {
            messages,
            stats: self.xb.take_stats(),
            permutations: self.permutations,
            unit_permutations: self.unit_permutations,
        })
    }
}
