//! Macro-op expansion and greedy bundle packing.
//!
//! A producer describes work as an [`OpStream`]: macro-ops separated by
//! barriers. Ops between two barriers are promised to be independent, so the
//! scheduler may overlap them; every op after a barrier starts strictly after
//! the last bundle emitted before it.
//!
//! Expansions (every logic gate is preceded by an INIT1 of its output):
//!
//! | macro | logic gates | temps |
//! |-------|-------------|-------|
//! | `COPY a` | NOT, NOT | 1 |
//! | `XOR2 a b` | OR2, AND2, NOT, AND2 | 2 (3 if the output is an input) |
//! | `MUX s a b` | NOT, AND2, AND2, OR2 | 3 |
//! | `MUX s a b !s` | AND2, AND2, OR2 | 2 |
//! | primitive | the gate itself | 0 |

use std::collections::HashMap;

use crate::crossbar::{
    check_bundle, Cell, CycleBundle, Gate, Label, LineSet, MicroOp, Orientation, PartitionMap,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MacroKind {
    Xor2,
    /// `(select, a, b)` or `(select, a, b, !select)`; yields `a` where select is 1.
    Mux,
    Copy,
    Not,
    Nor2,
    Nor3,
    Or2,
    And2,
    Init,
}

impl MacroKind {
    fn accepts(self, n: usize) -> bool {
        match self {
            MacroKind::Xor2 | MacroKind::Nor2 | MacroKind::Or2 | MacroKind::And2 => n == 2,
            MacroKind::Mux => n == 3 || n == 4,
            MacroKind::Copy | MacroKind::Not => n == 1,
            MacroKind::Nor3 => n == 3,
            MacroKind::Init => n == 0,
        }
    }

    fn primitive(self) -> Option<Gate> {
        match self {
            MacroKind::Not => Some(Gate::Not),
            MacroKind::Nor2 => Some(Gate::Nor2),
            MacroKind::Nor3 => Some(Gate::Nor3),
            MacroKind::Or2 => Some(Gate::Or2),
            MacroKind::And2 => Some(Gate::And2),
            MacroKind::Init => Some(Gate::Init1),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PoolId(usize);

/// A logical operation on lines, replicated over `span` like a [`MicroOp`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacroOp {
    pub kind: MacroKind,
    pub orientation: Orientation,
    pub inputs: Vec<usize>,
    pub output: usize,
    pub span: LineSet,
    pub label: Label,
    /// Where expansion temporaries come from.
    pub pool: Option<PoolId>,
}

impl MacroOp {
    pub fn new(
        kind: MacroKind,
        orientation: Orientation,
        inputs: &[usize],
        output: usize,
        span: LineSet,
        label: Label,
    ) -> Result<Self> {
        if !kind.accepts(inputs.len()) {
            return Err(Error::Shape(format!(
                "{kind:?} cannot take {} inputs",
                inputs.len()
            )));
        }
        if kind.primitive().is_some() && inputs.contains(&output) {
            return Err(Error::Shape(format!(
                "{kind:?} output line {output} is also an input"
            )));
        }
        Ok(Self {
            kind,
            orientation,
            inputs: inputs.to_vec(),
            output,
            span,
            label,
            pool: None,
        })
    }

    /// Build from explicit cells, which must all share one row or one column.
    pub fn from_cells(
        kind: MacroKind,
        inputs: &[Cell],
        output: Cell,
        rows: usize,
        cols: usize,
        label: Label,
    ) -> Result<Self> {
        if output.row >= rows || output.col >= cols {
            return Err(Error::Shape(format!(
                "output cell {output:?} outside {rows}x{cols}"
            )));
        }
        if inputs.iter().all(|c| c.row == output.row) {
            let lines: Vec<usize> = inputs.iter().map(|c| c.col).collect();
            Self::new(
                kind,
                Orientation::InRow,
                &lines,
                output.col,
                LineSet::from_lines(rows, [output.row]),
                label,
            )
        } else if inputs.iter().all(|c| c.col == output.col) {
            let lines: Vec<usize> = inputs.iter().map(|c| c.row).collect();
            Self::new(
                kind,
                Orientation::InColumn,
                &lines,
                output.row,
                LineSet::from_lines(cols, [output.col]),
                label,
            )
        } else {
            Err(Error::Shape(format!(
                "{kind:?} cells span both rows and columns"
            )))
        }
    }

    pub fn with_pool(mut self, pool: PoolId) -> Self {
        self.pool = Some(pool);
        self
    }

    pub fn temps_needed(&self) -> usize {
        match self.kind {
            MacroKind::Xor2 if self.inputs.contains(&self.output) => 3,
            MacroKind::Xor2 => 2,
            MacroKind::Mux if self.inputs.len() == 4 => 2,
            MacroKind::Mux => 3,
            MacroKind::Copy => 1,
            _ => 0,
        }
    }
}

/// Primitive sequence for `op` using `temps` as scratch lines.
///
/// Temps are consumed in order of first write, so a trailing temp may be an
/// input that is dead after the macro's last read of it.
pub fn expand(op: &MacroOp, temps: &[usize]) -> Result<Vec<MicroOp>> {
    let need = op.temps_needed();
    if temps.len() < need {
        return Err(Error::Allocation {
            needed: need,
            available: temps.len(),
        });
    }
    let gate = |g: Gate, ins: &[usize], out: usize| {
        MicroOp::new(g, op.orientation, ins, out, op.span.clone())
    };
    let init = |out: usize| gate(Gate::Init1, &[], out);
    let ins = &op.inputs;
    let out = op.output;

    if let Some(g) = op.kind.primitive() {
        return if g == Gate::Init1 {
            Ok(vec![init(out)?])
        } else {
            Ok(vec![init(out)?, gate(g, ins, out)?])
        };
    }
    let seq = match op.kind {
        MacroKind::Copy => {
            let t = temps[0];
            vec![
                init(t)?,
                gate(Gate::Not, &[ins[0]], t)?,
                init(out)?,
                gate(Gate::Not, &[t], out)?,
            ]
        }
        MacroKind::Xor2 => {
            let (a, b) = (ins[0], ins[1]);
            if ins.contains(&out) {
                let (t1, t2, t3) = (temps[0], temps[1], temps[2]);
                vec![
                    init(t1)?,
                    gate(Gate::Or2, &[a, b], t1)?,
                    init(t2)?,
                    gate(Gate::And2, &[a, b], t2)?,
                    init(t3)?,
                    gate(Gate::Not, &[t2], t3)?,
                    init(out)?,
                    gate(Gate::And2, &[t1, t3], out)?,
                ]
            } else {
                // the AND2 term is parked in the output cell
                let (t1, t2) = (temps[0], temps[1]);
                vec![
                    init(t1)?,
                    gate(Gate::Or2, &[a, b], t1)?,
                    init(out)?,
                    gate(Gate::And2, &[a, b], out)?,
                    init(t2)?,
                    gate(Gate::Not, &[out], t2)?,
                    init(out)?,
                    gate(Gate::And2, &[t1, t2], out)?,
                ]
            }
        }
        MacroKind::Mux => {
            let (s, a, b) = (ins[0], ins[1], ins[2]);
            let mut seq = Vec::with_capacity(8);
            let (ns, t1, t2) = match ins.get(3) {
                Some(&ns) => (ns, temps[0], temps[1]),
                None => {
                    seq.push(init(temps[0])?);
                    seq.push(gate(Gate::Not, &[s], temps[0])?);
                    (temps[0], temps[1], temps[2])
                }
            };
            seq.extend([
                init(t1)?,
                gate(Gate::And2, &[a, s], t1)?,
                init(t2)?,
                gate(Gate::And2, &[b, ns], t2)?,
                init(out)?,
                gate(Gate::Or2, &[t1, t2], out)?,
            ]);
            seq
        }
        _ => unreachable!("primitive kinds handled above"),
    };
    Ok(seq)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StreamItem {
    Op(MacroOp),
    Barrier,
}

/// Ordered macro-ops with barriers, plus the scratch pools they draw from.
#[derive(Clone, Debug, Default)]
pub struct OpStream {
    items: Vec<StreamItem>,
    pools: Vec<Vec<usize>>,
}

impl OpStream {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a scratch pool. Ops sharing a pool inside one barrier group
    /// get distinct temps from it.
    pub fn pool(&mut self, lines: &[usize]) -> PoolId {
        self.pools.push(lines.to_vec());
        PoolId(self.pools.len() - 1)
    }

    pub fn push(&mut self, op: MacroOp) {
        self.items.push(StreamItem::Op(op));
    }

    pub fn barrier(&mut self) {
        if !matches!(self.items.last(), None | Some(StreamItem::Barrier)) {
            self.items.push(StreamItem::Barrier);
        }
    }

    /// Append `other` after a barrier.
    pub fn append(&mut self, other: OpStream) {
        self.barrier();
        let remap: Vec<PoolId> = other.pools.iter().map(|lines| self.pool(lines)).collect();
        for item in other.items {
            match item {
                StreamItem::Op(mut op) => {
                    op.pool = op.pool.map(|PoolId(i)| remap[i]);
                    self.items.push(StreamItem::Op(op));
                }
                StreamItem::Barrier => self.barrier(),
            }
        }
    }

    pub fn items(&self) -> &[StreamItem] {
        &self.items
    }

    pub fn ops(&self) -> impl Iterator<Item = &MacroOp> {
        self.items.iter().filter_map(|i| match i {
            StreamItem::Op(op) => Some(op),
            StreamItem::Barrier => None,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn pool_lines(&self, id: PoolId) -> &[usize] {
        &self.pools[id.0]
    }
}

fn validate_shape(op: &MacroOp, map: &PartitionMap) -> Result<()> {
    let (line_limit, span_len) = match op.orientation {
        Orientation::InRow => (map.cols(), map.rows()),
        Orientation::InColumn => (map.rows(), map.cols()),
    };
    if op.span.len() != span_len {
        return Err(Error::Shape(format!(
            "{:?} span sized {} for a {span_len}-line axis",
            op.kind,
            op.span.len()
        )));
    }
    if let Some(l) = op
        .inputs
        .iter()
        .chain([&op.output])
        .find(|&&l| l >= line_limit)
    {
        return Err(Error::Shape(format!(
            "{:?} line {l} outside 0..{line_limit}",
            op.kind
        )));
    }
    Ok(())
}

/// Expanded ops in stream order; `None` marks a barrier.
type Expanded = Vec<Option<(Label, Vec<MicroOp>)>>;

fn expand_stream(stream: &OpStream, map: &PartitionMap) -> Result<Expanded> {
    let mut cursors: HashMap<PoolId, usize> = HashMap::new();
    let mut out = Vec::with_capacity(stream.items.len());
    for item in &stream.items {
        match item {
            StreamItem::Barrier => {
                cursors.clear();
                out.push(None);
            }
            StreamItem::Op(op) => {
                validate_shape(op, map)?;
                let need = op.temps_needed();
                let temps: &[usize] = if need == 0 {
                    &[]
                } else {
                    let id = op.pool.ok_or(Error::Allocation {
                        needed: need,
                        available: 0,
                    })?;
                    let lines = &stream.pools[id.0];
                    let cursor = cursors.entry(id).or_insert(0);
                    let available = lines.len() - *cursor;
                    if available < need {
                        return Err(Error::Allocation {
                            needed: need,
                            available,
                        });
                    }
                    let temps = &lines[*cursor..*cursor + need];
                    *cursor += need;
                    temps
                };
                out.push(Some((op.label, expand(op, temps)?)));
            }
        }
    }
    Ok(out)
}

fn try_add(bundle: &mut CycleBundle, op: &MicroOp, map: &PartitionMap) -> bool {
    let closed_before = bundle.closed_switches.len();
    for s in map.required_switches(op) {
        bundle.close(s);
    }
    bundle.ops.push(op.clone());
    if check_bundle(map, bundle).is_legal() {
        return true;
    }
    bundle.ops.pop();
    bundle.closed_switches.truncate(closed_before);
    false
}

fn solo(label: Label, op: MicroOp, map: &PartitionMap) -> Result<CycleBundle> {
    let mut bundle = CycleBundle::new(label);
    for s in map.required_switches(&op) {
        bundle.close(s);
    }
    bundle.ops.push(op);
    check_bundle(map, &bundle).into_result()?;
    Ok(bundle)
}

/// Pack a stream into legal bundles, greedy first-fit within each barrier group.
pub fn schedule(stream: &OpStream, map: &PartitionMap) -> Result<Vec<CycleBundle>> {
    let mut bundles: Vec<CycleBundle> = Vec::new();
    let mut group_start = 0;
    for entry in expand_stream(stream, map)? {
        let Some((label, micro)) = entry else {
            group_start = bundles.len();
            continue;
        };
        let mut earliest = group_start;
        for op in micro {
            let slot = (earliest..bundles.len())
                .find(|&b| bundles[b].label == label && try_add(&mut bundles[b], &op, map));
            earliest = match slot {
                Some(b) => b + 1,
                None => {
                    bundles.push(solo(label, op, map)?);
                    bundles.len()
                }
            };
        }
    }
    Ok(bundles)
}

/// One primitive per cycle in stream order: the reference the packed
/// schedule must agree with.
pub fn schedule_serial(stream: &OpStream, map: &PartitionMap) -> Result<Vec<CycleBundle>> {
    let mut bundles = Vec::new();
    for (label, micro) in expand_stream(stream, map)?.into_iter().flatten() {
        for op in micro {
            bundles.push(solo(label, op, map)?);
        }
    }
    Ok(bundles)
}

/// Bundle count per label.
pub fn bundles_per_label(bundles: &[CycleBundle]) -> Vec<(Label, usize)> {
    Label::ALL
        .iter()
        .map(|&l| (l, bundles.iter().filter(|b| b.label == l).count()))
        .filter(|&(_, n)| n > 0)
        .collect()
}
