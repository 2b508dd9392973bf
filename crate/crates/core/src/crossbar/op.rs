use std::fmt;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use super::LineSet;
use crate::error::{Error, Result};

/// Primitive stateful-logic gates. Every gate takes one cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Gate {
    Init1,
    Init0,
    Not,
    Nor2,
    Nor3,
    Or2,
    And2,
    Copy,
}

impl Gate {
    pub const ALL: [Gate; 8] = [
        Gate::Init1,
        Gate::Init0,
        Gate::Not,
        Gate::Nor2,
        Gate::Nor3,
        Gate::Or2,
        Gate::And2,
        Gate::Copy,
    ];

    pub fn arity(self) -> usize {
        match self {
            Gate::Init1 | Gate::Init0 => 0,
            Gate::Not | Gate::Copy => 1,
            Gate::Nor2 | Gate::Or2 | Gate::And2 => 2,
            Gate::Nor3 => 3,
        }
    }

    pub fn is_init(self) -> bool {
        matches!(self, Gate::Init1 | Gate::Init0)
    }

    /// Bitwise evaluation over 64 independent lanes; unused operands are ignored.
    #[inline]
    pub fn eval(self, a: u64, b: u64, c: u64) -> u64 {
        match self {
            Gate::Init1 => !0,
            Gate::Init0 => 0,
            Gate::Not => !a,
            Gate::Nor2 => !(a | b),
            Gate::Nor3 => !(a | b | c),
            Gate::Or2 => a | b,
            Gate::And2 => a & b,
            Gate::Copy => a,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::Init1 => "INIT1",
            Gate::Init0 => "INIT0",
            Gate::Not => "NOT",
            Gate::Nor2 => "NOR2",
            Gate::Nor3 => "NOR3",
            Gate::Or2 => "OR2",
            Gate::And2 => "AND2",
            Gate::Copy => "COPY",
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Cells share a row; the op may be replicated across rows.
    InRow,
    /// Cells share a column; the op may be replicated across columns.
    InColumn,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::InRow => "in-row",
            Orientation::InColumn => "in-column",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// Stats attribution for a bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Theta,
    Rho,
    Pi,
    Chi,
    Iota,
    Absorb,
    Io,
    Other,
}

impl Label {
    pub const COUNT: usize = 8;
    pub const ALL: [Label; Label::COUNT] = [
        Label::Theta,
        Label::Rho,
        Label::Pi,
        Label::Chi,
        Label::Iota,
        Label::Absorb,
        Label::Io,
        Label::Other,
    ];
    pub const ROUND_STEPS: [Label; 5] =
        [Label::Theta, Label::Rho, Label::Pi, Label::Chi, Label::Iota];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Theta => "theta",
            Label::Rho => "rho",
            Label::Pi => "pi",
            Label::Chi => "chi",
            Label::Iota => "iota",
            Label::Absorb => "absorb",
            Label::Io => "io",
            Label::Other => "other",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One stateful-logic gate pattern, replicated over `span`.
///
/// For an in-row op `inputs` and `output` are column indices and `span` is a
/// set of rows; for an in-column op they are row indices and `span` is a set
/// of columns. A cell-level op is a span of exactly one line. Each spanned
/// line counts as one gate execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MicroOp {
    pub gate: Gate,
    pub orientation: Orientation,
    pub inputs: ArrayVec<usize, 3>,
    pub output: usize,
    pub span: LineSet,
}

impl MicroOp {
    pub fn new(
        gate: Gate,
        orientation: Orientation,
        inputs: &[usize],
        output: usize,
        span: LineSet,
    ) -> Result<Self> {
        if inputs.len() != gate.arity() {
            return Err(Error::Shape(format!(
                "{gate} takes {} inputs, got {}",
                gate.arity(),
                inputs.len()
            )));
        }
        if inputs.contains(&output) {
            return Err(Error::Shape(format!(
                "{gate} output line {output} is also an input"
            )));
        }
        Ok(Self {
            gate,
            orientation,
            inputs: inputs.iter().copied().collect(),
            output,
            span,
        })
    }

    /// Gate on explicit cells; they must share a row or a column.
    ///
    /// `rows`/`cols` are the crossbar dimensions, needed to size the span.
    pub fn from_cells(
        gate: Gate,
        inputs: &[Cell],
        output: Cell,
        rows: usize,
        cols: usize,
    ) -> Result<Self> {
        let same_row = inputs.iter().all(|c| c.row == output.row);
        let same_col = inputs.iter().all(|c| c.col == output.col);
        if output.row >= rows || output.col >= cols {
            return Err(Error::Shape(format!(
                "output cell {output:?} outside {rows}x{cols}"
            )));
        }
        // a zero-input INIT prefers the row orientation
        if same_row {
            let lines: Vec<usize> = inputs.iter().map(|c| c.col).collect();
            Self::new(
                gate,
                Orientation::InRow,
                &lines,
                output.col,
                LineSet::from_lines(rows, [output.row]),
            )
        } else if same_col {
            let lines: Vec<usize> = inputs.iter().map(|c| c.row).collect();
            Self::new(
                gate,
                Orientation::InColumn,
                &lines,
                output.row,
                LineSet::from_lines(cols, [output.col]),
            )
        } else {
            Err(Error::Shape(format!(
                "{gate} cells {inputs:?} -> {output:?} share neither a row nor a column"
            )))
        }
    }

    pub fn gate_executions(&self) -> u64 {
        self.span.count() as u64
    }

    /// Input and output lines.
    pub fn lines(&self) -> impl Iterator<Item = usize> + '_ {
        self.inputs
            .iter()
            .copied()
            .chain(std::iter::once(self.output))
    }

    /// Same gate, orientation and lines (span may differ).
    pub fn same_pattern(&self, other: &MicroOp) -> bool {
        self.gate == other.gate
            && self.orientation == other.orientation
            && self.output == other.output
            && self.inputs == other.inputs
    }

    /// Cells touched: `(row, col)` pairs of inputs and output for each spanned line.
    pub fn cells(&self) -> Vec<(Vec<Cell>, Cell)> {
        self.span
            .iter()
            .map(|p| {
                let at = |line: usize| match self.orientation {
                    Orientation::InRow => Cell::new(p, line),
                    Orientation::InColumn => Cell::new(line, p),
                };
                (
                    self.inputs.iter().map(|&l| at(l)).collect(),
                    at(self.output),
                )
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    /// Switch on a row boundary: joins vertically adjacent partitions.
    Row,
    /// Switch on a column boundary: joins horizontally adjacent partitions.
    Col,
}

/// Partition switch; `index` is the position in the boundary list for `axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Switch {
    pub axis: Axis,
    pub index: usize,
}

/// Gates issued in one clock cycle, with the switches closed for that cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleBundle {
    pub ops: Vec<MicroOp>,
    pub closed_switches: Vec<Switch>,
    pub label: Label,
}

impl CycleBundle {
    pub fn new(label: Label) -> Self {
        Self {
            ops: Vec::new(),
            closed_switches: Vec::new(),
            label,
        }
    }

    pub fn with_ops(label: Label, ops: Vec<MicroOp>) -> Self {
        Self {
            ops,
            closed_switches: Vec::new(),
            label,
        }
    }

    pub fn close(&mut self, switch: Switch) {
        if !self.closed_switches.contains(&switch) {
            self.closed_switches.push(switch);
        }
    }

    pub fn gate_executions(&self) -> u64 {
        self.ops.iter().map(MicroOp::gate_executions).sum()
    }
}
