//! Step microcode. Every generator issues the same macro sequence in each
//! active unit (lockstep), so the scheduler can merge them across partitions.

use std::ops::Range;

use super::layout::{UnitLayout as U, UnitSet};
use super::{column_of_lane, ROUND_CONSTANTS};
use crate::crossbar::{Label, LineSet, Orientation};
use crate::error::{Error, Result};
use crate::microcode::{MacroKind, MacroOp, OpStream};

use MacroKind::*;

/// Emits unit-relative macros for every unit in a [`UnitSet`], one barrier
/// group per call.
#[derive(Debug)]
pub struct StepBuilder<'a> {
    units: &'a UnitSet,
    stream: OpStream,
    label: Label,
}

impl<'a> StepBuilder<'a> {
    pub fn new(units: &'a UnitSet, label: Label) -> Self {
        Self {
            units,
            stream: OpStream::new(),
            label,
        }
    }

    /// Row-parallel over the 64 state rows. Lines are unit-relative columns.
    pub fn in_row(
        &mut self,
        kind: MacroKind,
        inputs: &[usize],
        output: usize,
        pool: &[usize],
    ) -> Result<()> {
        let g = *self.units.geometry();
        for (&column, bands) in self.units.by_column() {
            let o = g.column_origin(column);
            let abs = |lines: &[usize]| lines.iter().map(|l| o + l).collect::<Vec<_>>();
            let span = self.units.rows_of(bands, 0..U::STATE_ROWS);
            self.emit(
                kind,
                Orientation::InRow,
                &abs(inputs),
                o + output,
                span,
                &abs(pool),
            )?;
        }
        self.stream.barrier();
        Ok(())
    }

    /// Column-parallel over unit-relative columns `cols`. Lines are
    /// unit-relative rows.
    pub fn in_column(
        &mut self,
        kind: MacroKind,
        inputs: &[usize],
        output: usize,
        cols: &[usize],
        pool: &[usize],
    ) -> Result<()> {
        let g = *self.units.geometry();
        for (&band, columns) in self.units.by_band() {
            let o = g.band_origin(band);
            let abs = |lines: &[usize]| lines.iter().map(|l| o + l).collect::<Vec<_>>();
            let span = self.units.cols_of(columns, cols);
            self.emit(
                kind,
                Orientation::InColumn,
                &abs(inputs),
                o + output,
                span,
                &abs(pool),
            )?;
        }
        self.stream.barrier();
        Ok(())
    }

    /// A single macro on absolute lines, in its own group.
    pub fn absolute(
        &mut self,
        kind: MacroKind,
        orientation: Orientation,
        inputs: &[usize],
        output: usize,
        span: LineSet,
        pool: &[usize],
    ) -> Result<()> {
        self.emit(kind, orientation, inputs, output, span, pool)?;
        self.stream.barrier();
        Ok(())
    }

    fn emit(
        &mut self,
        kind: MacroKind,
        orientation: Orientation,
        inputs: &[usize],
        output: usize,
        span: LineSet,
        pool: &[usize],
    ) -> Result<()> {
        let mut op = MacroOp::new(kind, orientation, inputs, output, span, self.label)?;
        if !pool.is_empty() {
            op = op.with_pool(self.stream.pool(pool));
        }
        self.stream.push(op);
        Ok(())
    }

    /// Copy offset bit-plane `j` down the switch chain into every band's
    /// rotation-bit row, one hop per band.
    fn broadcast_offsets(&mut self, j: usize, lane_cols: &[usize]) -> Result<()> {
        let g = *self.units.geometry();
        let span = self.units.cols_of(&self.units.active_columns(), lane_cols);
        let mut src = g.rot_row0() + j;
        for band in (self.units.lowest_band()..g.bands).rev() {
            let o = g.band_origin(band);
            let dst = o + U::ROT_BIT;
            self.absolute(
                Copy,
                Orientation::InColumn,
                &[src],
                dst,
                span.clone(),
                &[o + U::HOP_TMP],
            )?;
            src = dst;
        }
        Ok(())
    }

    /// Copy `RC[round]` leftward into column `C` of every unit column.
    fn broadcast_round_constant(&mut self, round: usize) -> Result<()> {
        let g = *self.units.geometry();
        let span = self
            .units
            .rows_of(&self.units.active_bands(), 0..U::STATE_ROWS);
        let mut src = g.rc_col0() + round;
        for column in (self.units.leftmost_column()..g.unit_columns).rev() {
            let o = g.column_origin(column);
            let dst = o + U::C;
            self.absolute(
                Copy,
                Orientation::InRow,
                &[src],
                dst,
                span.clone(),
                &[o + U::C + 1],
            )?;
            src = dst;
        }
        Ok(())
    }

    pub fn finish(self) -> OpStream {
        self.stream
    }
}

const fn lane(x: usize, y: usize) -> usize {
    U::lane(x, y)
}

const fn c(x: usize) -> usize {
    U::C + x % 5
}

const fn d(x: usize) -> usize {
    U::D + x % 5
}

const D_COLS: [usize; 5] = [U::D, U::D + 1, U::D + 2, U::D + 3, U::D + 4];

pub fn theta_microcode(units: &UnitSet) -> Result<OpStream> {
    let mut b = StepBuilder::new(units, Label::Theta);
    let pool = [d(0), d(1), d(2), d(3), d(4), U::SPARE[0], U::SPARE[1]];
    for x in 0..5 {
        b.in_row(Xor2, &[lane(x, 0), lane(x, 1)], c(x), &pool)?;
        for y in 2..5 {
            b.in_row(Xor2, &[c(x), lane(x, y)], c(x), &pool)?;
        }
    }
    for x in 0..5 {
        b.in_row(Not, &[c(x)], d(x), &[])?;
    }
    // D holds !C; a NOT chain shifts it one row down and restores polarity
    b.in_column(Not, &[63], U::REDUNDANT, &D_COLS, &[])?;
    for z in (1..64).rev() {
        b.in_column(Not, &[z - 1], z, &D_COLS, &[])?;
    }
    b.in_column(Copy, &[U::REDUNDANT], 0, &D_COLS, &[U::MUX_TMP[0]])?;
    // D[x] = C[x-1] ^ rot(C[x+1], 1), left in column C[x-1]
    for x in 0..5 {
        b.in_row(
            Xor2,
            &[c(x + 4), d(x + 1)],
            c(x + 4),
            &[U::SPARE[0], U::SPARE[1], d(x + 1)],
        )?;
    }
    for x in 0..5 {
        for y in 0..5 {
            b.in_row(Xor2, &[lane(x, y), c(x + 4)], lane(x, y), &pool)?;
        }
    }
    Ok(b.finish())
}

/// Rotate each lane column in `lane_cols` toward higher bit index by its
/// offset from the rotation-offset block, six mux stages of 2^j.
pub fn variable_rotate(units: &UnitSet, lane_cols: &[usize]) -> Result<OpStream> {
    if let Some(&col) = lane_cols.iter().find(|&&c| c >= U::LANES) {
        return Err(Error::Config(format!(
            "column {col} holds no rotation offset"
        )));
    }
    let mut b = StepBuilder::new(units, Label::Rho);
    for j in 0..6 {
        b.broadcast_offsets(j, lane_cols)?;
        b.in_column(Not, &[U::ROT_BIT], U::NOT_ROT, lane_cols, &[])?;
        let k = 1 << j;
        // each residue class mod k is one cycle of the permutation z -> z + k
        for start in 0..k {
            let top = start + 64 - k;
            b.in_column(
                Mux,
                &[U::ROT_BIT, top - k, top, U::NOT_ROT],
                U::REDUNDANT,
                lane_cols,
                &U::MUX_TMP,
            )?;
            for z in (start..top).step_by(k).rev() {
                let src = (z + 64 - k) % 64;
                b.in_column(
                    Mux,
                    &[U::ROT_BIT, src, z, U::NOT_ROT],
                    z,
                    lane_cols,
                    &U::MUX_TMP,
                )?;
            }
            b.in_column(Copy, &[U::REDUNDANT], top, lane_cols, &U::MUX_TMP[..1])?;
        }
    }
    Ok(b.finish())
}

pub fn rho_microcode(units: &UnitSet) -> Result<OpStream> {
    let cols: Vec<usize> = (0..U::LANES).collect();
    variable_rotate(units, &cols)
}

/// The 24-lane cycle of (x, y) -> (y, 2x + 3y) from (1, 0).
fn pi_cycle() -> Vec<(usize, usize)> {
    let mut cycle = vec![(1, 0)];
    loop {
        let (x, y) = *cycle.last().unwrap();
        let next = (y, (2 * x + 3 * y) % 5);
        if next == cycle[0] {
            return cycle;
        }
        cycle.push(next);
    }
}

pub fn pi_microcode(units: &UnitSet) -> Result<OpStream> {
    let mut b = StepBuilder::new(units, Label::Pi);
    let cycle = pi_cycle();
    let col = |i: usize| lane(cycle[i].0, cycle[i].1);
    let last = cycle.len() - 1;
    let tmp = [c(1)];
    b.in_row(Copy, &[col(last)], c(0), &tmp)?;
    for i in (0..last).rev() {
        b.in_row(Copy, &[col(i)], col(i + 1), &tmp)?;
    }
    b.in_row(Copy, &[c(0)], col(0), &tmp)?;
    Ok(b.finish())
}

pub fn chi_microcode(units: &UnitSet) -> Result<OpStream> {
    let mut b = StepBuilder::new(units, Label::Chi);
    for y in 0..5 {
        for x in 0..5 {
            b.in_row(Not, &[lane(x, y)], c(x), &[])?;
        }
        // !a[x+1] & a[x+2] == NOR(a[x+1], !a[x+2])
        for x in 0..5 {
            b.in_row(Nor2, &[lane(x + 1, y), c(x + 2)], d(x), &[])?;
        }
        for x in 0..5 {
            b.in_row(
                Xor2,
                &[lane(x, y), d(x)],
                lane(x, y),
                &[U::SPARE[0], U::SPARE[1], d(x)],
            )?;
        }
    }
    Ok(b.finish())
}

pub fn iota_microcode(units: &UnitSet, round: usize) -> Result<OpStream> {
    if round >= ROUND_CONSTANTS.len() {
        return Err(Error::Round(round));
    }
    let mut b = StepBuilder::new(units, Label::Iota);
    b.broadcast_round_constant(round)?;
    b.in_row(
        Xor2,
        &[lane(0, 0), c(0)],
        lane(0, 0),
        &[U::SPARE[0], U::SPARE[1], c(0)],
    )?;
    Ok(b.finish())
}

/// XOR lanes `lanes` (at most 10) from scratch columns `C..` into the state.
pub fn absorb_microcode(units: &UnitSet, lanes: Range<usize>) -> Result<OpStream> {
    if lanes.len() > 10 || lanes.end > U::LANES {
        return Err(Error::Config(format!(
            "cannot stage lanes {lanes:?} in 10 scratch columns"
        )));
    }
    let mut b = StepBuilder::new(units, Label::Absorb);
    for (k, l) in lanes.enumerate() {
        let src = U::C + k;
        b.in_row(
            Xor2,
            &[column_of_lane(l), src],
            column_of_lane(l),
            &[U::SPARE[0], U::SPARE[1], src],
        )?;
    }
    Ok(b.finish())
}

/// theta, rho, pi and chi: the round-independent part.
pub fn round_body_microcode(units: &UnitSet) -> Result<OpStream> {
    let mut s = theta_microcode(units)?;
    s.append(rho_microcode(units)?);
    s.append(pi_microcode(units)?);
    s.append(chi_microcode(units)?);
    Ok(s)
}

pub fn round_microcode(units: &UnitSet, round: usize) -> Result<OpStream> {
    let mut s = round_body_microcode(units)?;
    s.append(iota_microcode(units, round)?);
    Ok(s)
}

pub fn keccak_f_microcode(units: &UnitSet) -> Result<OpStream> {
    let mut s = OpStream::new();
    for r in 0..ROUND_CONSTANTS.len() {
        s.append(round_microcode(units, r)?);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_cycle_covers_all_but_origin() {
        let cycle = pi_cycle();
        assert_eq!(cycle.len(), 24);
        assert!(!cycle.contains(&(0, 0)));
        assert_eq!(cycle[1], (0, 2));
        assert_eq!(cycle[2], (2, 1));
    }
}
