//! Logical model of one partitioned memristive crossbar.
//!
//! A [`Crossbar`] owns a [`CellGrid`], the [`PartitionMap`] derived from its
//! [`CrossbarConfig`], and running [`ExecutionStats`]. Work is issued as
//! [`CycleBundle`]s: sets of gates that execute in the same clock cycle. A
//! bundle is only executed if [`check_bundle`] accepts it. Pre-validated bundle
//! sequences can be wrapped in a [`Program`] and replayed without re-checking.
//!
//! Peripheral reads and writes ([`Crossbar::read_region`],
//! [`Crossbar::write_region`]) are charged to [`Label::Io`] at
//! `io_cycles_per_row` cycles per region row and no gate energy.

mod grid;
mod lineset;
mod op;
mod partition;
mod trace;

use std::io::Write;
use std::ops::Range;

use serde::{Deserialize, Serialize};

pub use grid::CellGrid;
pub use lineset::LineSet;
pub use op::{Axis, Cell, CycleBundle, Gate, Label, MicroOp, Orientation, Switch};
pub use partition::{check_bundle, BundleCheck, PartitionMap, Violation, ViolationKind};
pub use trace::{TraceOp, TraceRecord};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrossbarConfig {
    pub rows: usize,
    pub cols: usize,
    /// Partitions side by side along a row (column-direction count).
    pub horizontal_partitions: usize,
    /// Partitions stacked along a column (row-direction count).
    pub vertical_partitions: usize,
    pub partition_rows: usize,
    pub partition_cols: usize,
    pub gate_delay_ns: f64,
    pub gate_energy_fj: f64,
    pub cell_area_f2: f64,
    /// Fail on gate inputs (and region reads) of never-written cells.
    pub strict_init: bool,
    pub io_cycles_per_row: u64,
}

impl Default for CrossbarConfig {
    fn default() -> Self {
        Self {
            rows: 1024,
            cols: 1024,
            horizontal_partitions: 27,
            vertical_partitions: 14,
            partition_rows: 72,
            partition_cols: 37,
            gate_delay_ns: 3.0,
            gate_energy_fj: 6.4,
            cell_area_f2: 4.0,
            strict_init: false,
            io_cycles_per_row: 1,
        }
    }
}

impl CrossbarConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("rows", self.rows),
            ("cols", self.cols),
            ("horizontal_partitions", self.horizontal_partitions),
            ("vertical_partitions", self.vertical_partitions),
            ("partition_rows", self.partition_rows),
            ("partition_cols", self.partition_cols),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        let reals = [
            ("gate_delay_ns", self.gate_delay_ns),
            ("gate_energy_fj", self.gate_energy_fj),
            ("cell_area_f2", self.cell_area_f2),
        ];
        if let Some((name, _)) = reals.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        if self.rows < self.vertical_partitions * self.partition_rows {
            return Err(Error::Config(format!(
                "{} rows cannot hold {} partitions of {} rows",
                self.rows, self.vertical_partitions, self.partition_rows
            )));
        }
        if self.cols < self.horizontal_partitions * self.partition_cols {
            return Err(Error::Config(format!(
                "{} columns cannot hold {} partitions of {} columns",
                self.cols, self.horizontal_partitions, self.partition_cols
            )));
        }
        Ok(())
    }

    pub fn partition_map(&self) -> Result<PartitionMap> {
        self.validate()?;
        PartitionMap::uniform(
            self.rows,
            self.cols,
            self.partition_rows,
            self.vertical_partitions,
            self.partition_cols,
            self.horizontal_partitions,
        )
    }

    pub fn clock_hz(&self) -> f64 {
        1e9 / self.gate_delay_ns
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelStats {
    pub cycles: u64,
    pub gate_executions: u64,
}

impl std::ops::AddAssign for LabelStats {
    fn add_assign(&mut self, rhs: Self) {
        self.cycles += rhs.cycles;
        self.gate_executions += rhs.gate_executions;
    }
}

/// Cycle, gate and energy totals, broken down by [`Label`].
///
/// Energy is not stored; it is always `gate_executions * gate_energy_fj`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExecutionStats {
    gate_energy_fj: f64,
    per_label: [LabelStats; Label::COUNT],
}

impl ExecutionStats {
    pub fn new(gate_energy_fj: f64) -> Self {
        Self {
            gate_energy_fj,
            per_label: [LabelStats::default(); Label::COUNT],
        }
    }

    pub fn cycles(&self) -> u64 {
        self.per_label.iter().map(|s| s.cycles).sum()
    }

    pub fn gate_executions(&self) -> u64 {
        self.per_label.iter().map(|s| s.gate_executions).sum()
    }

    pub fn gate_energy_fj(&self) -> f64 {
        self.gate_energy_fj
    }

    pub fn energy_fj(&self) -> f64 {
        self.gate_executions() as f64 * self.gate_energy_fj
    }

    pub fn label(&self, label: Label) -> LabelStats {
        self.per_label[label.index()]
    }

    pub fn labels(&self) -> impl Iterator<Item = (Label, LabelStats)> + '_ {
        Label::ALL.iter().map(|&l| (l, self.per_label[l.index()]))
    }

    /// Totals over the five Keccak-f round steps.
    pub fn round_steps(&self) -> LabelStats {
        let mut total = LabelStats::default();
        for l in Label::ROUND_STEPS {
            total += self.label(l);
        }
        total
    }

    pub fn record(&mut self, label: Label, cycles: u64, gate_executions: u64) {
        let slot = &mut self.per_label[label.index()];
        slot.cycles += cycles;
        slot.gate_executions += gate_executions;
    }

    pub fn merge(&mut self, other: &ExecutionStats) {
        for (a, b) in self.per_label.iter_mut().zip(&other.per_label) {
            *a += *b;
        }
    }
}

impl Serialize for ExecutionStats {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            cycles: u64,
            gate_executions: u64,
            energy_fj: f64,
            per_label: std::collections::BTreeMap<&'a str, LabelStats>,
        }
        Repr {
            cycles: self.cycles(),
            gate_executions: self.gate_executions(),
            energy_fj: self.energy_fj(),
            per_label: self
                .labels()
                .filter(|(_, s)| s.cycles > 0 || s.gate_executions > 0)
                .map(|(l, s)| (l.name(), s))
                .collect(),
        }
        .serialize(serializer)
    }
}

/// A bundle sequence validated once against a partition map.
#[derive(Clone, Debug)]
pub struct Program {
    dims: (usize, usize),
    bundles: Vec<CycleBundle>,
    executions: Vec<u64>,
}

impl Program {
    pub fn new(map: &PartitionMap, bundles: Vec<CycleBundle>) -> Result<Self> {
        for bundle in &bundles {
            check_bundle(map, bundle).into_result()?;
        }
        let executions = bundles.iter().map(CycleBundle::gate_executions).collect();
        Ok(Self {
            dims: (map.rows(), map.cols()),
            bundles,
            executions,
        })
    }

    pub fn bundles(&self) -> &[CycleBundle] {
        &self.bundles
    }

    pub fn len(&self) -> usize {
        self.bundles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bundles.is_empty()
    }

    /// Stats this program adds when run once.
    pub fn stats(&self, gate_energy_fj: f64) -> ExecutionStats {
        let mut stats = ExecutionStats::new(gate_energy_fj);
        for (b, &n) in self.bundles.iter().zip(&self.executions) {
            stats.record(b.label, 1, n);
        }
        stats
    }
}

pub struct Crossbar {
    config: CrossbarConfig,
    partitions: PartitionMap,
    grid: CellGrid,
    stats: ExecutionStats,
    trace: Option<Box<dyn Write + Send>>,
}

impl std::fmt::Debug for Crossbar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Crossbar")
            .field("config", &self.config)
            .field("stats", &self.stats)
            .field("tracing", &self.trace.is_some())
            .finish_non_exhaustive()
    }
}

impl Crossbar {
    pub fn new(config: CrossbarConfig) -> Result<Self> {
        let partitions = config.partition_map()?;
        Ok(Self {
            grid: CellGrid::new(config.rows, config.cols),
            stats: ExecutionStats::new(config.gate_energy_fj),
            config,
            partitions,
            trace: None,
        })
    }

    pub fn config(&self) -> &CrossbarConfig {
        &self.config
    }

    pub fn partitions(&self) -> &PartitionMap {
        &self.partitions
    }

    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }

    pub fn stats(&self) -> &ExecutionStats {
        &self.stats
    }

    pub fn take_stats(&mut self) -> ExecutionStats {
        std::mem::replace(
            &mut self.stats,
            ExecutionStats::new(self.config.gate_energy_fj),
        )
    }

    /// Stream a JSON line per executed cycle to `sink`.
    pub fn set_trace(&mut self, sink: Box<dyn Write + Send>) {
        self.trace = Some(sink);
    }

    pub fn finish_trace(&mut self) -> Result<()> {
        if let Some(mut sink) = self.trace.take() {
            sink.flush()?;
        }
        Ok(())
    }

    fn strict_inputs(&self, bundle: &CycleBundle) -> Result<()> {
        if !self.config.strict_init {
            return Ok(());
        }
        for op in &bundle.ops {
            if let Some((row, col)) = self.grid.uninitialized_input(op) {
                return Err(Error::Uninitialized { row, col });
            }
        }
        Ok(())
    }

    fn emit(&mut self, bundle: &CycleBundle) -> Result<()> {
        if let Some(sink) = self.trace.as_mut() {
            let record = TraceRecord::new(self.stats.cycles(), bundle, &self.partitions);
            serde_json::to_writer(&mut *sink, &record).map_err(std::io::Error::from)?;
            sink.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Check, then execute one bundle as a single cycle.
    pub fn execute_bundle(&mut self, bundle: &CycleBundle) -> Result<()> {
        check_bundle(&self.partitions, bundle).into_result()?;
        self.strict_inputs(bundle)?;
        self.emit(bundle)?;
        for op in &bundle.ops {
            self.grid.apply(op);
        }
        self.stats.record(bundle.label, 1, bundle.gate_executions());
        Ok(())
    }

    pub fn run(&mut self, program: &Program) -> Result<()> {
        let actual = (self.config.rows, self.config.cols);
        if program.dims != actual {
            return Err(Error::ProgramMismatch {
                expected: program.dims,
                actual,
            });
        }
        for (bundle, &n) in program.bundles.iter().zip(&program.executions) {
            self.strict_inputs(bundle)?;
            self.emit(bundle)?;
            for op in &bundle.ops {
                self.grid.apply(op);
            }
            self.stats.record(bundle.label, 1, n);
        }
        Ok(())
    }

    pub fn read_region(
        &mut self,
        rows: Range<usize>,
        cols: Range<usize>,
    ) -> Result<Vec<Vec<bool>>> {
        let height = rows.len() as u64;
        let bits = self.grid.read_region(rows, cols, self.config.strict_init)?;
        self.stats
            .record(Label::Io, height * self.config.io_cycles_per_row, 0);
        Ok(bits)
    }

    pub fn write_region(&mut self, row0: usize, col0: usize, bits: &[Vec<bool>]) -> Result<()> {
        self.grid.write_region(row0, col0, bits)?;
        self.stats.record(
            Label::Io,
            bits.len() as u64 * self.config.io_cycles_per_row,
            0,
        );
        Ok(())
    }

    /// Write 64-bit words down consecutive columns starting at (`row0`, `col0`):
    /// bit `z` of `words[i]` lands in row `row0 + z` of column `col0 + i`.
    pub fn write_words(&mut self, row0: usize, col0: usize, words: &[u64]) -> Result<()> {
        let bits: Vec<Vec<bool>> = (0..64)
            .map(|z| words.iter().map(|w| w >> z & 1 == 1).collect())
            .collect();
        self.write_region(row0, col0, &bits)
    }

    /// Inverse of [`Crossbar::write_words`].
    pub fn read_words(&mut self, row0: usize, col0: usize, count: usize) -> Result<Vec<u64>> {
        let bits = self.read_region(row0..row0 + 64, col0..col0 + count)?;
        Ok((0..count)
            .map(|i| (0..64).fold(0u64, |acc, z| acc | (bits[z][i] as u64) << z))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CrossbarConfig {
        CrossbarConfig {
            rows: 16,
            cols: 16,
            horizontal_partitions: 2,
            vertical_partitions: 2,
            partition_rows: 8,
            partition_cols: 8,
            ..CrossbarConfig::default()
        }
    }

    fn set(xb: &mut Crossbar, cells: &[((usize, usize), bool)]) {
        for &((r, c), v) in cells {
            xb.write_region(r, c, &[vec![v]]).unwrap();
        }
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = CrossbarConfig::default();
        cfg.validate().unwrap();
        assert!((cfg.clock_hz() - 333.333e6).abs() < 1e3);
    }

    #[test]
    fn config_rejects_non_positive_and_oversubscribed() {
        let bad = [
            CrossbarConfig {
                gate_energy_fj: 0.0,
                ..CrossbarConfig::default()
            },
            CrossbarConfig {
                vertical_partitions: 15,
                ..CrossbarConfig::default()
            },
            CrossbarConfig {
                rows: 0,
                ..CrossbarConfig::default()
            },
        ];
        assert!(bad.iter().all(|c| c.validate().is_err()));
    }

    #[test]
    fn nor2_truth_table_cells() {
        for (a, b, want) in [
            (false, false, true),
            (true, false, false),
            (false, true, false),
            (true, true, false),
        ] {
            let mut xb = Crossbar::new(small()).unwrap();
            set(&mut xb, &[((0, 0), a), ((0, 1), b)]);
            let op = MicroOp::from_cells(
                Gate::Nor2,
                &[Cell::new(0, 0), Cell::new(0, 1)],
                Cell::new(0, 2),
                16,
                16,
            )
            .unwrap();
            xb.execute_bundle(&CycleBundle::with_ops(Label::Other, vec![op]))
                .unwrap();
            assert_eq!(xb.grid().get(0, 2).unwrap(), want, "NOR2({a},{b})");
        }
    }

    #[test]
    fn row_parallel_energy() {
        let cfg = CrossbarConfig {
            rows: 64,
            cols: 8,
            horizontal_partitions: 1,
            vertical_partitions: 1,
            partition_rows: 64,
            partition_cols: 8,
            ..CrossbarConfig::default()
        };
        let mut xb = Crossbar::new(cfg).unwrap();
        let ops = (0..64)
            .map(|r| {
                MicroOp::from_cells(
                    Gate::Nor2,
                    &[Cell::new(r, 0), Cell::new(r, 1)],
                    Cell::new(r, 2),
                    64,
                    8,
                )
                .unwrap()
            })
            .collect();
        xb.execute_bundle(&CycleBundle::with_ops(Label::Other, ops))
            .unwrap();
        assert_eq!(xb.stats().cycles(), 1);
        assert_eq!(xb.stats().gate_executions(), 64);
        assert!((xb.stats().energy_fj() - 409.6).abs() < 1e-9);
    }

    #[test]
    fn illegal_bundle_leaves_grid_untouched() {
        let mut xb = Crossbar::new(small()).unwrap();
        let a = MicroOp::from_cells(Gate::Init1, &[], Cell::new(0, 2), 16, 16).unwrap();
        let b = MicroOp::from_cells(Gate::Init1, &[], Cell::new(1, 3), 16, 16).unwrap();
        let err = xb
            .execute_bundle(&CycleBundle::with_ops(Label::Other, vec![a, b]))
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Scheduling(Violation {
                first: 0,
                second: Some(1),
                ..
            })
        ));
        assert!(!xb.grid().is_initialized(0, 2).unwrap());
        assert_eq!(xb.stats().cycles(), 0);
    }

    #[test]
    fn strict_mode_flags_uninitialized_inputs() {
        let mut cfg = small();
        cfg.strict_init = true;
        let mut xb = Crossbar::new(cfg).unwrap();
        let op =
            MicroOp::from_cells(Gate::Not, &[Cell::new(4, 4)], Cell::new(4, 5), 16, 16).unwrap();
        let bundle = CycleBundle::with_ops(Label::Other, vec![op]);
        assert!(matches!(
            xb.execute_bundle(&bundle),
            Err(Error::Uninitialized { row: 4, col: 4 })
        ));
        set(&mut xb, &[((4, 4), true)]);
        xb.execute_bundle(&bundle).unwrap();
        assert!(!xb.grid().get(4, 5).unwrap());
    }

    #[test]
    fn region_io_round_trip_and_accounting() {
        let mut cfg = small();
        cfg.strict_init = true;
        let mut xb = Crossbar::new(cfg).unwrap();
        let zeros = vec![vec![false; 5]; 8];
        xb.write_region(8, 3, &zeros).unwrap();
        assert_eq!(xb.read_region(8..16, 3..8).unwrap(), zeros);
        xb.write_region(5, 7, &[vec![true]]).unwrap();
        assert_eq!(xb.read_region(5..6, 7..8).unwrap(), vec![vec![true]]);
        assert!(matches!(
            xb.read_region(0..2, 0..2),
            Err(Error::Uninitialized { .. })
        ));
        assert!(matches!(
            xb.write_region(15, 0, &[vec![true], vec![true]]),
            Err(Error::Address { .. })
        ));
        // 8 + 8 + 1 + 1 rows moved through the periphery, no gates
        assert_eq!(xb.stats().label(Label::Io).cycles, 18);
        assert_eq!(xb.stats().gate_executions(), 0);
    }

    #[test]
    fn word_helpers() {
        let mut xb = Crossbar::new(CrossbarConfig {
            rows: 128,
            cols: 8,
            horizontal_partitions: 1,
            vertical_partitions: 1,
            partition_rows: 128,
            partition_cols: 8,
            ..CrossbarConfig::default()
        })
        .unwrap();
        xb.write_words(40, 2, &[1, u64::MAX, 0x8000_0000_0000_0001])
            .unwrap();
        assert_eq!(
            xb.read_words(40, 2, 3).unwrap(),
            vec![1, u64::MAX, 0x8000_0000_0000_0001]
        );
    }

    #[test]
    fn program_rejects_other_dimensions() {
        let map = small().partition_map().unwrap();
        let program = Program::new(&map, vec![]).unwrap();
        let mut xb = Crossbar::new(CrossbarConfig::default()).unwrap();
        assert!(matches!(
            xb.run(&program),
            Err(Error::ProgramMismatch { .. })
        ));
    }
}
