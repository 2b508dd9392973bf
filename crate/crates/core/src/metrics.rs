//! Throughput, power and area figures for a crossbar array of SHA-3 units.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricsInput {
    pub clock_hz: f64,
    pub rate_bits: f64,
    pub latency_round_cycles: f64,
    /// Joules per round per unit.
    pub energy_unit_j: f64,
    pub units_per_crossbar: usize,
    pub crossbars: usize,
    pub cell_area_f2: f64,
    pub crossbar_cells: usize,
}

impl MetricsInput {
    /// Published operating point: 3 ns gates, 3,494 cycles and 0.765 nJ per
    /// round, 378 units on a 1024x1024 crossbar of 4 F² cells.
    pub fn paper() -> Self {
        Self {
            clock_hz: 1e9 / 3.0,
            rate_bits: 1088.0,
            latency_round_cycles: 3494.0,
            energy_unit_j: 0.765e-9,
            units_per_crossbar: 378,
            crossbars: 1,
            cell_area_f2: 4.0,
            crossbar_cells: 1024 * 1024,
        }
    }

    pub fn with_crossbars(mut self, n: usize) -> Self {
        self.crossbars = n;
        self
    }

    fn validate(&self) -> Result<()> {
        let checks = [
            (self.clock_hz, "clock frequency"),
            (self.rate_bits, "rate"),
            (self.latency_round_cycles, "round latency"),
            (self.energy_unit_j, "energy per round"),
            (self.units_per_crossbar as f64, "units per crossbar"),
            (self.crossbars as f64, "crossbar count"),
            (self.cell_area_f2, "cell area"),
            (self.crossbar_cells as f64, "crossbar cells"),
        ];
        for (v, what) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Metrics(what));
            }
        }
        Ok(())
    }

    pub fn compute(&self) -> Result<MetricsReport> {
        self.validate()?;
        let tput_unit = self.rate_bits / self.latency_round_cycles * self.clock_hz;
        let tput_system = tput_unit * self.units_per_crossbar as f64 * self.crossbars as f64;
        let power = tput_system * self.energy_unit_j / self.rate_bits;
        let area = self.crossbars as f64 * self.crossbar_cells as f64 * self.cell_area_f2;
        Ok(MetricsReport {
            tput_unit_bps: tput_unit,
            tput_system_bps: tput_system,
            power_system_w: power,
            tput_per_watt: tput_system / power,
            tput_per_area: tput_system / area,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub tput_unit_bps: f64,
    pub tput_system_bps: f64,
    pub power_system_w: f64,
    /// bps/W
    pub tput_per_watt: f64,
    /// bps/F²
    pub tput_per_area: f64,
}

/// A published comparison point. Display only.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Competitor {
    pub name: &'static str,
    pub clock_mhz: f64,
    pub tput_gbps: f64,
    pub tput_per_watt_gbps: Option<f64>,
    pub tput_per_area: f64,
}

pub const COMPETITORS: [Competitor; 3] = [
    Competitor {
        name: "65nm ASIC",
        clock_mhz: 1000.0,
        tput_gbps: 48.0,
        tput_per_watt_gbps: None,
        tput_per_area: 7619.0,
    },
    Competitor {
        name: "SHINE-1",
        clock_mhz: 2000.0,
        tput_gbps: 33.4,
        tput_per_watt_gbps: Some(263.0),
        tput_per_area: 21916.0,
    },
    Competitor {
        name: "SHINE-2",
        clock_mhz: 2000.0,
        tput_gbps: 54.0,
        tput_per_watt_gbps: Some(311.0),
        tput_per_area: 22227.0,
    },
];
