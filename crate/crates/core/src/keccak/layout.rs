use std::collections::BTreeMap;
use std::ops::Range;

use serde::Serialize;

use super::{ROTATION_OFFSETS, ROUND_CONSTANTS};
use crate::crossbar::{CrossbarConfig, LineSet};
use crate::error::{Error, Result};

/// Placement of one SHA-3 unit: a 72x37 block at the top-left of its partition.
///
/// Columns `5x + y` hold lane `(x, y)` with bit `z` in row `z`. The 12
/// columns to the right and 8 rows below are scratch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UnitLayout {
    pub id: usize,
    pub band: usize,
    pub column: usize,
    pub origin_row: usize,
    pub origin_col: usize,
}

impl UnitLayout {
    pub const ROWS: usize = 72;
    pub const COLS: usize = 37;
    pub const STATE_ROWS: usize = 64;
    pub const LANES: usize = 25;

    /// `C[x]` column, relative to the unit.
    pub const C: usize = 25;
    /// `D[x]` column.
    pub const D: usize = 30;
    pub const SPARE: [usize; 2] = [35, 36];

    /// Current offset bit of each lane.
    pub const ROT_BIT: usize = 64;
    pub const NOT_ROT: usize = 65;
    /// Redundant slice for the rotation cycles.
    pub const REDUNDANT: usize = 66;
    pub const MUX_TMP: [usize; 2] = [67, 68];
    pub const HOP_TMP: usize = 69;

    pub const fn lane(x: usize, y: usize) -> usize {
        5 * (x % 5) + y % 5
    }

    pub fn state_rows(&self) -> Range<usize> {
        self.origin_row..self.origin_row + Self::STATE_ROWS
    }

    pub fn col(&self, rel: usize) -> usize {
        self.origin_col + rel
    }

    pub fn row(&self, rel: usize) -> usize {
        self.origin_row + rel
    }
}

/// How units, the rotation-offset block and the round-constant block sit in
/// a crossbar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Geometry {
    pub rows: usize,
    pub cols: usize,
    /// Unit rows (partition bands stacked vertically).
    pub bands: usize,
    /// Units per band.
    pub unit_columns: usize,
    pub partition_rows: usize,
    pub partition_cols: usize,
}

impl Geometry {
    pub fn from_config(config: &CrossbarConfig) -> Result<Self> {
        config.validate()?;
        let g = Self {
            rows: config.rows,
            cols: config.cols,
            bands: config.vertical_partitions,
            unit_columns: config.horizontal_partitions,
            partition_rows: config.partition_rows,
            partition_cols: config.partition_cols,
        };
        if g.partition_rows < UnitLayout::ROWS || g.partition_cols < UnitLayout::COLS {
            return Err(Error::Config(format!(
                "a {}x{} partition cannot hold a {}x{} unit",
                g.partition_rows,
                g.partition_cols,
                UnitLayout::ROWS,
                UnitLayout::COLS
            )));
        }
        if g.rows < g.rot_row0() + 6 {
            return Err(Error::Config(format!(
                "need {} rows for the rotation-offset block, have {}",
                g.rot_row0() + 6,
                g.rows
            )));
        }
        if g.cols < g.rc_col0() + 24 {
            return Err(Error::Config(format!(
                "need {} columns for the round-constant block, have {}",
                g.rc_col0() + 24,
                g.cols
            )));
        }
        Ok(g)
    }

    pub fn capacity(&self) -> usize {
        self.bands * self.unit_columns
    }

    /// Units are numbered row-major over bands.
    pub fn unit(&self, id: usize) -> Result<UnitLayout> {
        if id >= self.capacity() {
            return Err(Error::Address {
                what: "unit",
                index: id,
                limit: self.capacity(),
            });
        }
        let (band, column) = (id / self.unit_columns, id % self.unit_columns);
        Ok(UnitLayout {
            id,
            band,
            column,
            origin_row: band * self.partition_rows,
            origin_col: column * self.partition_cols,
        })
    }

    /// First of the six bit-plane rows holding the rotation offsets.
    pub fn rot_row0(&self) -> usize {
        self.bands * self.partition_rows
    }

    /// Column holding `RC[0]`; `RC[i]` is `i` columns to the right.
    pub fn rc_col0(&self) -> usize {
        self.unit_columns * self.partition_cols
    }

    pub fn band_origin(&self, band: usize) -> usize {
        band * self.partition_rows
    }

    pub fn column_origin(&self, column: usize) -> usize {
        column * self.partition_cols
    }
}

/// The units that take part in one lockstep program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitSet {
    geometry: Geometry,
    units: Vec<UnitLayout>,
    by_column: BTreeMap<usize, Vec<usize>>,
    by_band: BTreeMap<usize, Vec<usize>>,
}

impl UnitSet {
    pub fn new(geometry: Geometry, ids: &[usize]) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::Config("empty unit set".into()));
        }
        let mut ids = ids.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let units = ids
            .iter()
            .map(|&id| geometry.unit(id))
            .collect::<Result<Vec<_>>>()?;
        let mut by_column: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut by_band: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for u in &units {
            by_column.entry(u.column).or_default().push(u.band);
            by_band.entry(u.band).or_default().push(u.column);
        }
        Ok(Self {
            geometry,
            units,
            by_column,
            by_band,
        })
    }

    pub fn all(geometry: Geometry) -> Self {
        let ids: Vec<usize> = (0..geometry.capacity()).collect();
        Self::new(geometry, &ids).expect("capacity is positive")
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn units(&self) -> &[UnitLayout] {
        &self.units
    }

    pub fn ids(&self) -> Vec<usize> {
        self.units.iter().map(|u| u.id).collect()
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Active bands for each unit column.
    pub fn by_column(&self) -> &BTreeMap<usize, Vec<usize>> {
        &self.by_column
    }

    /// Active unit columns for each band.
    pub fn by_band(&self) -> &BTreeMap<usize, Vec<usize>> {
        &self.by_band
    }

    pub fn lowest_band(&self) -> usize {
        *self.by_band.keys().next().expect("non-empty")
    }

    pub fn leftmost_column(&self) -> usize {
        *self.by_column.keys().next().expect("non-empty")
    }

    /// Rows `origin + rel` of the given bands.
    pub fn rows_of(&self, bands: &[usize], rel: Range<usize>) -> LineSet {
        let mut set = LineSet::new(self.geometry.rows);
        for &b in bands {
            let o = self.geometry.band_origin(b);
            set.insert_range(o + rel.start..o + rel.end);
        }
        set
    }

    /// Columns `origin + c` for each `c` in `rel` of the given unit columns.
    pub fn cols_of(&self, columns: &[usize], rel: &[usize]) -> LineSet {
        let mut set = LineSet::new(self.geometry.cols);
        for &u in columns {
            let o = self.geometry.column_origin(u);
            for &c in rel {
                set.insert(o + c);
            }
        }
        set
    }

    /// Unit columns with at least one active unit.
    pub fn active_columns(&self) -> Vec<usize> {
        self.by_column.keys().copied().collect()
    }

    pub fn active_bands(&self) -> Vec<usize> {
        self.by_band.keys().copied().collect()
    }
}

/// Everything needed to locate data in the crossbar, for debugging.
#[derive(Debug, Serialize)]
pub struct LayoutDump {
    pub geometry: Geometry,
    pub capacity: usize,
    pub unit: UnitSlots,
    pub rotation_block: Block,
    pub round_constant_block: Block,
    pub rotation_offsets: [[u32; 5]; 5],
    pub round_constants: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct UnitSlots {
    pub rows: usize,
    pub cols: usize,
    pub lane_column: &'static str,
    pub bit_row: &'static str,
    pub c_columns: [usize; 5],
    pub d_columns: [usize; 5],
    pub spare_columns: [usize; 2],
    pub rot_bit_row: usize,
    pub not_rot_row: usize,
    pub redundant_row: usize,
    pub mux_temp_rows: [usize; 2],
    pub hop_temp_row: usize,
}

#[derive(Debug, Serialize)]
pub struct Block {
    pub rows: [usize; 2],
    pub cols: [usize; 2],
    pub note: &'static str,
}

impl LayoutDump {
    pub fn new(geometry: &Geometry) -> Self {
        Self {
            geometry: *geometry,
            capacity: geometry.capacity(),
            unit: UnitSlots {
                rows: UnitLayout::ROWS,
                cols: UnitLayout::COLS,
                lane_column: "5x + y",
                bit_row: "z",
                c_columns: std::array::from_fn(|x| UnitLayout::C + x),
                d_columns: std::array::from_fn(|x| UnitLayout::D + x),
                spare_columns: UnitLayout::SPARE,
                rot_bit_row: UnitLayout::ROT_BIT,
                not_rot_row: UnitLayout::NOT_ROT,
                redundant_row: UnitLayout::REDUNDANT,
                mux_temp_rows: UnitLayout::MUX_TMP,
                hop_temp_row: UnitLayout::HOP_TMP,
            },
            rotation_block: Block {
                rows: [geometry.rot_row0(), geometry.rot_row0() + 6],
                cols: [0, geometry.rc_col0()],
                note: "row rot_row0 + j holds bit j of r[x][y] in each unit column's lane column 5x + y",
            },
            round_constant_block: Block {
                rows: [0, geometry.rot_row0()],
                cols: [geometry.rc_col0(), geometry.rc_col0() + 24],
                note: "column rc_col0 + i holds RC[i], bit z in row z of every band",
            },
            rotation_offsets: ROTATION_OFFSETS,
            round_constants: ROUND_CONSTANTS.iter().map(|rc| format!("{rc:#018x}")).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_crossbar_holds_378_units() {
        let g = Geometry::from_config(&CrossbarConfig::default()).unwrap();
        assert_eq!(g.capacity(), 378);
        assert_eq!((g.bands, g.unit_columns), (14, 27));
        let last = g.unit(377).unwrap();
        assert_eq!((last.band, last.column), (13, 26));
        assert_eq!((last.origin_row, last.origin_col), (936, 962));
        assert!(last.origin_row + UnitLayout::ROWS <= g.rot_row0());
        assert!(last.origin_col + UnitLayout::COLS <= g.rc_col0());
        assert_eq!(g.rot_row0(), 1008);
        assert_eq!(g.rc_col0(), 999);
        assert!(g.unit(378).is_err());
    }

    #[test]
    fn rejects_small_partitions() {
        let cfg = CrossbarConfig {
            partition_rows: 64,
            ..CrossbarConfig::default()
        };
        assert!(Geometry::from_config(&cfg).is_err());
        let cfg = CrossbarConfig {
            cols: 1010,
            ..CrossbarConfig::default()
        };
        assert!(Geometry::from_config(&cfg).is_err());
    }

    #[test]
    fn unit_set_groups() {
        let g = Geometry::from_config(&CrossbarConfig::default()).unwrap();
        let set = UnitSet::new(g, &[28, 0, 1, 28]).unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set.by_column()[&1], vec![0, 1]);
        assert_eq!(set.by_band()[&0], vec![0, 1]);
        assert_eq!(set.lowest_band(), 0);
        assert_eq!(set.rows_of(&[0, 1], 0..64).count(), 128);
        assert_eq!(
            set.cols_of(&[0, 1], &[25]).iter().collect::<Vec<_>>(),
            vec![25, 62]
        );
        assert!(UnitSet::new(g, &[]).is_err());
    }

    #[test]
    fn dump_serializes() {
        let g = Geometry::from_config(&CrossbarConfig::default()).unwrap();
        let json = serde_json::to_string(&LayoutDump::new(&g)).unwrap();
        assert!(json.contains("\"capacity\":378"));
        assert!(json.contains("0x8000000080008008"));
    }
}
