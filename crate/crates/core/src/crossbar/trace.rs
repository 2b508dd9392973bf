use serde::Serialize;

use super::{Axis, CycleBundle, Gate, Label, Orientation, PartitionMap, Switch};

/// One line of the gate trace: everything issued in one cycle.
#[derive(Debug, Serialize)]
pub struct TraceRecord {
    pub cycle: u64,
    pub label: Label,
    pub closed_switches: Vec<Switch>,
    pub ops: Vec<TraceOp>,
}

#[derive(Debug, Serialize)]
pub struct TraceOp {
    /// `[row_band, col_band]` of every partition the op touches.
    pub partition: Vec<[usize; 2]>,
    pub gate: Gate,
    pub orientation: Orientation,
    pub inputs: Vec<usize>,
    pub output: usize,
    /// Half-open `[start, end)` runs of the replicated rows or columns.
    pub span: Vec<[usize; 2]>,
}

impl TraceRecord {
    pub fn new(cycle: u64, bundle: &CycleBundle, map: &PartitionMap) -> Self {
        let ops = bundle
            .ops
            .iter()
            .map(|op| {
                let (fixed, span_axis, bands) = match op.orientation {
                    Orientation::InRow => (map.col_band(op.output), Axis::Row, map.row_bands()),
                    Orientation::InColumn => (map.row_band(op.output), Axis::Col, map.col_bands()),
                };
                let partition = (0..bands)
                    .filter(|&b| op.span.intersects_range(map.band_range(span_axis, b)))
                    .map(|b| match op.orientation {
                        Orientation::InRow => [b, fixed],
                        Orientation::InColumn => [fixed, b],
                    })
                    .collect();
                TraceOp {
                    partition,
                    gate: op.gate,
                    orientation: op.orientation,
                    inputs: op.inputs.to_vec(),
                    output: op.output,
                    span: op
                        .span
                        .ranges()
                        .into_iter()
                        .map(|r| [r.start, r.end])
                        .collect(),
                }
            })
            .collect();
        Self {
            cycle,
            label: bundle.label,
            closed_switches: bundle.closed_switches.clone(),
            ops,
        }
    }
}
