use std::ops::Range;

use super::{MicroOp, Orientation};
use crate::error::{Error, Result};

/// Binary cell state of one crossbar plus written-since-reset flags.
///
/// Stored column-major as 64-row words so that row-parallel gates evaluate a
/// word of rows at a time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellGrid {
    rows: usize,
    cols: usize,
    stride: usize,
    state: Vec<u64>,
    initialized: Vec<u64>,
}

impl CellGrid {
    pub fn new(rows: usize, cols: usize) -> Self {
        let stride = rows.div_ceil(64);
        Self {
            rows,
            cols,
            stride,
            state: vec![0; stride * cols],
            initialized: vec![0; stride * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn reset(&mut self) {
        self.state.fill(0);
        self.initialized.fill(0);
    }

    fn check(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.rows {
            return Err(Error::Address {
                what: "row",
                index: row,
                limit: self.rows,
            });
        }
        if col >= self.cols {
            return Err(Error::Address {
                what: "column",
                index: col,
                limit: self.cols,
            });
        }
        Ok(())
    }

    fn check_region(&self, rows: &Range<usize>, cols: &Range<usize>) -> Result<()> {
        if rows.start > rows.end || rows.end > self.rows {
            return Err(Error::Address {
                what: "row",
                index: rows.end,
                limit: self.rows,
            });
        }
        if cols.start > cols.end || cols.end > self.cols {
            return Err(Error::Address {
                what: "column",
                index: cols.end,
                limit: self.cols,
            });
        }
        Ok(())
    }

    #[inline]
    fn at(&self, row: usize, col: usize) -> (usize, u32) {
        (col * self.stride + row / 64, (row % 64) as u32)
    }

    pub fn get(&self, row: usize, col: usize) -> Result<bool> {
        self.check(row, col)?;
        let (w, b) = self.at(row, col);
        Ok(self.state[w] >> b & 1 == 1)
    }

    pub fn is_initialized(&self, row: usize, col: usize) -> Result<bool> {
        self.check(row, col)?;
        let (w, b) = self.at(row, col);
        Ok(self.initialized[w] >> b & 1 == 1)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) -> Result<()> {
        self.check(row, col)?;
        let (w, b) = self.at(row, col);
        self.state[w] = self.state[w] & !(1 << b) | (value as u64) << b;
        self.initialized[w] |= 1 << b;
        Ok(())
    }

    /// Copy of a rectangular region, `bits[r][c]` relative to the region origin.
    pub fn read_region(
        &self,
        rows: Range<usize>,
        cols: Range<usize>,
        strict: bool,
    ) -> Result<Vec<Vec<bool>>> {
        self.check_region(&rows, &cols)?;
        rows.map(|r| {
            cols.clone()
                .map(|c| {
                    let (w, b) = self.at(r, c);
                    if strict && self.initialized[w] >> b & 1 == 0 {
                        return Err(Error::Uninitialized { row: r, col: c });
                    }
                    Ok(self.state[w] >> b & 1 == 1)
                })
                .collect()
        })
        .collect()
    }

    pub fn write_region(&mut self, row0: usize, col0: usize, bits: &[Vec<bool>]) -> Result<()> {
        let width = bits.first().map_or(0, Vec::len);
        if bits.iter().any(|r| r.len() != width) {
            return Err(Error::Shape("ragged region".into()));
        }
        self.check_region(&(row0..row0 + bits.len()), &(col0..col0 + width))?;
        for (dr, line) in bits.iter().enumerate() {
            for (dc, &v) in line.iter().enumerate() {
                let (w, b) = self.at(row0 + dr, col0 + dc);
                self.state[w] = self.state[w] & !(1 << b) | (v as u64) << b;
                self.initialized[w] |= 1 << b;
            }
        }
        Ok(())
    }

    /// A column of up to 64 cells starting at `row0`, bit `i` = row `row0 + i`.
    pub fn read_column_word(&self, row0: usize, col: usize, len: usize) -> Result<u64> {
        self.check_region(&(row0..row0 + len), &(col..col + 1))?;
        Ok((0..len).fold(0u64, |acc, i| {
            let (w, b) = self.at(row0 + i, col);
            acc | (self.state[w] >> b & 1) << i
        }))
    }

    pub fn write_column_word(
        &mut self,
        row0: usize,
        col: usize,
        len: usize,
        value: u64,
    ) -> Result<()> {
        self.check_region(&(row0..row0 + len), &(col..col + 1))?;
        for i in 0..len {
            let (w, b) = self.at(row0 + i, col);
            self.state[w] = self.state[w] & !(1 << b) | (value >> i & 1) << b;
            self.initialized[w] |= 1 << b;
        }
        Ok(())
    }

    /// First uninitialized input cell of `op`, if any.
    pub(crate) fn uninitialized_input(&self, op: &MicroOp) -> Option<(usize, usize)> {
        match op.orientation {
            Orientation::InRow => {
                for &col in &op.inputs {
                    let base = col * self.stride;
                    for (w, &mask) in op.span.words().iter().enumerate() {
                        let missing = mask & !self.initialized[base + w];
                        if missing != 0 {
                            return Some((w * 64 + missing.trailing_zeros() as usize, col));
                        }
                    }
                }
                None
            }
            Orientation::InColumn => op.span.iter().find_map(|col| {
                op.inputs.iter().find_map(|&row| {
                    let (w, b) = self.at(row, col);
                    (self.initialized[w] >> b & 1 == 0).then_some((row, col))
                })
            }),
        }
    }

    /// Evaluate one op in place. Caller guarantees bounds.
    #[inline]
    pub(crate) fn apply(&mut self, op: &MicroOp) {
        let gate = op.gate;
        let input = |k: usize| op.inputs.get(k).copied();
        match op.orientation {
            Orientation::InRow => {
                let stride = self.stride;
                let col_base = |c: Option<usize>| c.map(|c| c * stride);
                let (a, b, c) = (col_base(input(0)), col_base(input(1)), col_base(input(2)));
                let out = op.output * stride;
                for (w, &mask) in op.span.words().iter().enumerate() {
                    if mask == 0 {
                        continue;
                    }
                    let word = |base: Option<usize>| base.map_or(0, |b| self.state[b + w]);
                    let v = gate.eval(word(a), word(b), word(c));
                    let cell = &mut self.state[out + w];
                    *cell = *cell & !mask | v & mask;
                    self.initialized[out + w] |= mask;
                }
            }
            Orientation::InColumn => {
                let (ra, rb, rc) = (input(0), input(1), input(2));
                let (ow, ob) = (op.output / 64, (op.output % 64) as u32);
                for col in op.span.iter() {
                    let base = col * self.stride;
                    let bit = |r: Option<usize>| {
                        r.map_or(0, |r| self.state[base + r / 64] >> (r % 64) & 1)
                    };
                    let v = gate.eval(bit(ra), bit(rb), bit(rc)) & 1;
                    let cell = &mut self.state[base + ow];
                    *cell = *cell & !(1 << ob) | v << ob;
                    self.initialized[base + ow] |= 1 << ob;
                }
            }
        }
    }
}
