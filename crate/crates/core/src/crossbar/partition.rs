use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use serde::Serialize;

use super::{Axis, CycleBundle, LineSet, MicroOp, Orientation, Switch};
use crate::error::{Error, Result};

/// Switch-delimited partitioning of a crossbar.
///
/// `row_boundaries` holds the first row of every partition band after the
/// first; a switch sits on each boundary. Switches are open unless a bundle
/// lists them as closed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionMap {
    rows: usize,
    cols: usize,
    row_boundaries: Vec<usize>,
    col_boundaries: Vec<usize>,
    #[serde(skip)]
    row_band: Vec<u16>,
    #[serde(skip)]
    col_band: Vec<u16>,
}

fn band_lookup(len: usize, boundaries: &[usize]) -> Vec<u16> {
    let mut band = 0u16;
    let mut next = boundaries.iter().peekable();
    (0..len)
        .map(|i| {
            while next.peek().is_some_and(|&&b| b <= i) {
                next.next();
                band += 1;
            }
            band
        })
        .collect()
}

impl PartitionMap {
    pub fn new(
        rows: usize,
        cols: usize,
        row_boundaries: Vec<usize>,
        col_boundaries: Vec<usize>,
    ) -> Result<Self> {
        for (what, bounds, limit) in [
            ("row", &row_boundaries, rows),
            ("column", &col_boundaries, cols),
        ] {
            if bounds.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config(format!(
                    "{what} boundaries must be strictly increasing"
                )));
            }
            if bounds.first().is_some_and(|&b| b == 0) || bounds.last().is_some_and(|&b| b >= limit)
            {
                return Err(Error::Config(format!(
                    "{what} boundaries must lie strictly inside 0..{limit}"
                )));
            }
        }
        Ok(Self {
            rows,
            cols,
            row_band: band_lookup(rows, &row_boundaries),
            col_band: band_lookup(cols, &col_boundaries),
            row_boundaries,
            col_boundaries,
        })
    }

    /// `count` equal partitions of `size` along each axis, starting at 0. Any
    /// remainder of the grid forms one extra margin partition.
    pub fn uniform(
        rows: usize,
        cols: usize,
        row_size: usize,
        row_count: usize,
        col_size: usize,
        col_count: usize,
    ) -> Result<Self> {
        let bounds = |size: usize, count: usize, limit: usize| -> Vec<usize> {
            (1..=count)
                .map(|k| k * size)
                .filter(|&b| b < limit)
                .collect()
        };
        Self::new(
            rows,
            cols,
            bounds(row_size, row_count, rows),
            bounds(col_size, col_count, cols),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_boundaries(&self) -> &[usize] {
        &self.row_boundaries
    }

    pub fn col_boundaries(&self) -> &[usize] {
        &self.col_boundaries
    }

    pub fn row_bands(&self) -> usize {
        self.row_boundaries.len() + 1
    }

    pub fn col_bands(&self) -> usize {
        self.col_boundaries.len() + 1
    }

    pub fn row_band(&self, row: usize) -> usize {
        self.row_band[row] as usize
    }

    pub fn col_band(&self, col: usize) -> usize {
        self.col_band[col] as usize
    }

    pub fn band_range(&self, axis: Axis, band: usize) -> Range<usize> {
        let (bounds, limit) = match axis {
            Axis::Row => (&self.row_boundaries, self.rows),
            Axis::Col => (&self.col_boundaries, self.cols),
        };
        let start = if band == 0 { 0 } else { bounds[band - 1] };
        let end = bounds.get(band).copied().unwrap_or(limit);
        start..end
    }

    /// Switches an op must close: every boundary between its outermost lines.
    pub fn required_switches(&self, op: &MicroOp) -> Vec<Switch> {
        let (axis, lookup) = match op.orientation {
            Orientation::InRow => (Axis::Col, &self.col_band),
            Orientation::InColumn => (Axis::Row, &self.row_band),
        };
        let bands = op
            .lines()
            .filter_map(|l| lookup.get(l).map(|&b| b as usize));
        let (lo, hi) = bands.fold((usize::MAX, 0), |(lo, hi), b| (lo.min(b), hi.max(b)));
        if lo >= hi {
            return Vec::new();
        }
        (lo..hi).map(|index| Switch { axis, index }).collect()
    }

    /// Merged-partition id per band given the closed switches.
    fn groups(&self, closed: &[Switch]) -> (Vec<usize>, Vec<usize>) {
        let merge = |bands: usize, axis: Axis| {
            let mut group = vec![0; bands];
            for b in 1..bands {
                let joined = closed.iter().any(|s| s.axis == axis && s.index == b - 1);
                group[b] = if joined { group[b - 1] } else { b };
            }
            group
        };
        (
            merge(self.row_bands(), Axis::Row),
            merge(self.col_bands(), Axis::Col),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationKind {
    /// A line index or the span size does not fit the crossbar.
    OutOfBounds,
    /// The switch does not exist on this partition map.
    UnknownSwitch(Switch),
    /// The op's lines straddle an open switch.
    CrossesOpenSwitch(Switch),
    /// Two ops in one partition differ in gate, orientation or lines.
    MixedPattern { row_group: usize, col_group: usize },
    /// Two ops touch the same cells.
    CellConflict,
}

/// A legality failure naming the op(s) involved by bundle index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Violation {
    pub first: usize,
    pub second: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.second {
            Some(second) => write!(f, "ops {} and {}: {:?}", self.first, second, self.kind),
            None => write!(f, "op {}: {:?}", self.first, self.kind),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BundleCheck {
    pub violations: Vec<Violation>,
}

impl BundleCheck {
    pub fn is_legal(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::Scheduling(v)),
        }
    }
}

struct Slot {
    op: usize,
    covered: LineSet,
}

/// Legality of a bundle under the partition rules:
///
/// 1. inside one (merged) partition every op has the same gate, orientation
///    and line indices; only the span differs;
/// 2. ops in different partitions are independent;
/// 3. an op spanning partitions needs the switches between them closed, and
///    the joined partitions count as one for rule 1;
/// 4. no two ops touch the same cell (same-pattern ops must have disjoint spans).
pub fn check_bundle(map: &PartitionMap, bundle: &CycleBundle) -> BundleCheck {
    let mut violations = Vec::new();
    for (i, s) in bundle.closed_switches.iter().enumerate() {
        let count = match s.axis {
            Axis::Row => map.row_boundaries.len(),
            Axis::Col => map.col_boundaries.len(),
        };
        if s.index >= count {
            violations.push(Violation {
                first: i,
                second: None,
                kind: ViolationKind::UnknownSwitch(*s),
            });
        }
    }
    let (row_group, col_group) = map.groups(&bundle.closed_switches);
    let mut slots: HashMap<(usize, usize), Slot> = HashMap::new();

    for (i, op) in bundle.ops.iter().enumerate() {
        let (line_limit, span_len) = match op.orientation {
            Orientation::InRow => (map.cols, map.rows),
            Orientation::InColumn => (map.rows, map.cols),
        };
        if op.span.len() != span_len || op.lines().any(|l| l >= line_limit) {
            violations.push(Violation {
                first: i,
                second: None,
                kind: ViolationKind::OutOfBounds,
            });
            continue;
        }
        let mut open = map
            .required_switches(op)
            .into_iter()
            .filter(|s| !bundle.closed_switches.contains(s))
            .peekable();
        if let Some(&s) = open.peek() {
            violations.push(Violation {
                first: i,
                second: None,
                kind: ViolationKind::CrossesOpenSwitch(s),
            });
            continue;
        }

        // partitions the op touches: fixed group on the line axis, every
        // group its span reaches on the other axis
        let (line_axis_group, span_axis, span_groups) = match op.orientation {
            Orientation::InRow => (col_group[map.col_band(op.output)], Axis::Row, &row_group),
            Orientation::InColumn => (row_group[map.row_band(op.output)], Axis::Col, &col_group),
        };
        let mut keys: Vec<(usize, usize)> = Vec::new();
        for (band, &group) in span_groups.iter().enumerate() {
            if !op.span.intersects_range(map.band_range(span_axis, band)) {
                continue;
            }
            let key = match op.orientation {
                Orientation::InRow => (group, line_axis_group),
                Orientation::InColumn => (line_axis_group, group),
            };
            if !keys.contains(&key) {
                keys.push(key);
            }
        }

        for key in keys {
            match slots.get_mut(&key) {
                None => {
                    slots.insert(
                        key,
                        Slot {
                            op: i,
                            covered: op.span.clone(),
                        },
                    );
                }
                Some(slot) => {
                    let other = &bundle.ops[slot.op];
                    if !other.same_pattern(op) {
                        violations.push(Violation {
                            first: slot.op,
                            second: Some(i),
                            kind: ViolationKind::MixedPattern {
                                row_group: key.0,
                                col_group: key.1,
                            },
                        });
                    } else if slot.covered.intersects(&op.span) {
                        let j = bundle.ops[..i]
                            .iter()
                            .position(|o| o.same_pattern(op) && o.span.intersects(&op.span))
                            .unwrap_or(slot.op);
                        violations.push(Violation {
                            first: j,
                            second: Some(i),
                            kind: ViolationKind::CellConflict,
                        });
                    } else {
                        slot.covered.union_with(&op.span);
                    }
                }
            }
        }
    }
    violations.dedup();
    let mut seen = std::collections::HashSet::new();
    violations.retain(|v| seen.insert(v.clone()));
    BundleCheck { violations }
}
