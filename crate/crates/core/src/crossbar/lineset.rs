use std::fmt;
use std::ops::Range;

/// Fixed-size bitset over line indices (rows or columns of a crossbar).
///
/// An op's span is a `LineSet` over the axis perpendicular to its gate lines:
/// the rows an in-row op is replicated across, or the columns of an in-column op.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LineSet {
    len: usize,
    words: Vec<u64>,
}

impl LineSet {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_range(len: usize, range: Range<usize>) -> Self {
        let mut set = Self::new(len);
        set.insert_range(range);
        set
    }

    pub fn from_lines<I: IntoIterator<Item = usize>>(len: usize, lines: I) -> Self {
        let mut set = Self::new(len);
        for line in lines {
            set.insert(line);
        }
        set
    }

    /// Capacity of the set (number of addressable lines).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Panics if `line >= len`.
    pub fn insert(&mut self, line: usize) {
        assert!(line < self.len, "line {line} outside set of {}", self.len);
        self.words[line / 64] |= 1 << (line % 64);
    }

    pub fn insert_range(&mut self, range: Range<usize>) {
        assert!(
            range.end <= self.len,
            "range {range:?} outside set of {}",
            self.len
        );
        for line in range {
            self.words[line / 64] |= 1 << (line % 64);
        }
    }

    pub fn contains(&self, line: usize) -> bool {
        line < self.len && self.words[line / 64] >> (line % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn intersects(&self, other: &LineSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// True if any line in `range` is set.
    pub fn intersects_range(&self, range: Range<usize>) -> bool {
        let end = range.end.min(self.len);
        if range.start >= end {
            return false;
        }
        let (first, last) = (range.start / 64, (end - 1) / 64);
        (first..=last).any(|w| {
            let mut mask = !0u64;
            if w == first {
                mask &= !0u64 << (range.start % 64);
            }
            if w == last && !end.is_multiple_of(64) {
                mask &= !0u64 >> (64 - end % 64);
            }
            self.words[w] & mask != 0
        })
    }

    pub fn union_with(&mut self, other: &LineSet) {
        assert_eq!(self.len, other.len, "line set length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }

    /// Contiguous runs of set lines, as half-open ranges.
    pub fn ranges(&self) -> Vec<Range<usize>> {
        let mut out: Vec<Range<usize>> = Vec::new();
        for line in self.iter() {
            match out.last_mut() {
                Some(r) if r.end == line => r.end += 1,
                _ => out.push(line..line + 1),
            }
        }
        out
    }
}

impl fmt::Debug for LineSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.ranges()).finish()
    }
}
