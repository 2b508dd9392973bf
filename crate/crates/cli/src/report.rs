use serde::Serialize;

use hashpim::crossbar::{CrossbarConfig, ExecutionStats};
use hashpim::keccak::{CrossbarRun, UnitLayout};
use hashpim::metrics::{MetricsInput, MetricsReport};
use hashpim::{HashPim, HashRun};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: CrossbarConfig,
    pub seed: Option<u64>,
    pub all_ok: bool,
    pub messages: Vec<MessageReport>,
    pub packing: Packing,
    pub execution: Option<Execution>,
    pub metrics: Option<MetricsSection>,
}

impl Report {
    pub fn new(
        config: CrossbarConfig,
        seed: Option<u64>,
        messages: Vec<MessageReport>,
        all_ok: bool,
        packing: Packing,
        run: Option<&HashRun>,
        metrics: Option<MetricsSection>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            config,
            seed,
            all_ok,
            messages,
            packing,
            execution: run.map(Execution::new),
            metrics,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MessageReport {
    pub source: String,
    pub bytes: usize,
    pub digest: String,
    pub expected: String,
    pub ok: bool,
}

#[derive(Debug, Serialize)]
pub struct Packing {
    pub unit_rows: usize,
    pub unit_cols: usize,
    pub units_per_crossbar: usize,
    pub messages: usize,
    pub crossbars_used: usize,
}

impl Packing {
    pub fn new(hp: &HashPim, messages: usize, run: Option<&HashRun>) -> Self {
        Self {
            unit_rows: UnitLayout::ROWS,
            unit_cols: UnitLayout::COLS,
            units_per_crossbar: hp.capacity(),
            messages,
            crossbars_used: run.map_or(0, |r| r.crossbars.len()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Execution {
    pub stats: ExecutionStats,
    pub cycles_per_round: Option<f64>,
    pub energy_per_unit_round_j: Option<f64>,
    pub crossbars: Vec<CrossbarRun>,
}

impl Execution {
    fn new(run: &HashRun) -> Self {
        Self {
            stats: run.stats(),
            cycles_per_round: run.cycles_per_round(),
            energy_per_unit_round_j: run.energy_per_unit_round_j(),
            crossbars: run.crossbars.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MetricsSection {
    /// `measured` or `paper`
    pub source: &'static str,
    pub input: MetricsInput,
    pub report: MetricsReport,
}

impl MetricsSection {
    pub fn new(source: &'static str, input: MetricsInput) -> hashpim::Result<Self> {
        Ok(Self {
            source,
            report: input.compute()?,
            input,
        })
    }
}

/// Metrics inputs from a simulated run on this configuration.
pub fn measured_input(hp: &HashPim, run: &HashRun, crossbars: usize) -> Option<MetricsInput> {
    let config = hp.config();
    Some(MetricsInput {
        clock_hz: config.clock_hz(),
        rate_bits: hp.params().r as f64,
        latency_round_cycles: run.cycles_per_round()?,
        energy_unit_j: run.energy_per_unit_round_j()?,
        units_per_crossbar: hp.capacity(),
        crossbars,
        cell_area_f2: config.cell_area_f2,
        crossbar_cells: config.rows * config.cols,
    })
}
