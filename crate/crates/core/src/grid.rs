//! Finite b-adic grids over `[0, 1]` and the occupied-cell sets that live on them.
//!
//! A [`GridSet`] at depth `m` is the set of occupied cells `[i b^-m, (i+1) b^-m)`.
//! Coarser levels are obtained by projecting every occupied leaf onto its
//! ancestor, which is all that equal-width cover counting needs.

use std::io::{Cursor, Read};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base and depth of a b-adic grid over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    base: u32,
    depth: u32,
}

impl GridSpec {
    pub fn new(base: u32, depth: u32) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidGrid(format!("base must be at least 2, got {base}")));
        }
        if u64::from(base).checked_pow(depth).is_none() {
            return Err(Error::Capacity { base, depth });
        }
        Ok(Self { base, depth })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Number of cells at the finest level, `base^depth`.
    pub fn size(&self) -> u64 {
        self.cells_at(self.depth)
    }

    /// Number of cells at `level`. Callers keep `level <= depth`.
    pub fn cells_at(&self, level: u32) -> u64 {
        u64::from(self.base).pow(level)
    }

    /// Cell width at the finest level.
    pub fn cell_width(&self) -> f64 {
        f64::from(self.base).powi(-(self.depth as i32))
    }

    fn check_level(&self, level: u32) -> Result<()> {
        if level > self.depth {
            Err(Error::LevelOutOfRange {
                level,
                depth: self.depth,
            })
        } else {
            Ok(())
        }
    }
}

/// Digit-restricted self-similar set: cells whose base-`base` expansion uses
/// only `kept_digits`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CantorSpec {
    pub base: u32,
    pub kept_digits: Vec<u32>,
    pub depth: u32,
}

impl CantorSpec {
    pub fn new(base: u32, kept_digits: impl Into<Vec<u32>>, depth: u32) -> Result<Self> {
        let spec = Self {
            base,
            kept_digits: kept_digits.into(),
            depth,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The middle-thirds Cantor set.
    pub fn triadic(depth: u32) -> Self {
        Self {
            base: 3,
            kept_digits: vec![0, 2],
            depth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        GridSpec::new(self.base, self.depth)?;
        if self.kept_digits.is_empty() {
            return Err(Error::InvalidGrid("kept digit set is empty".into()));
        }
        if let Some(&d) = self.kept_digits.iter().find(|&&d| d >= self.base) {
            return Err(Error::InvalidGrid(format!(
                "digit {d} is not a base-{} digit",
                self.base
            )));
        }
        let mut sorted = self.kept_digits.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.kept_digits.len() {
            return Err(Error::InvalidGrid("kept digits contain duplicates".into()));
        }
        Ok(())
    }

    /// `log |kept| / log base`.
    pub fn similarity_dimension(&self) -> f64 {
        (self.kept_digits.len() as f64).ln() / f64::from(self.base).ln()
    }
}

/// Occupied cells of a b-adic grid, stored as a strictly increasing index list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GridSetRepr", into = "GridSetRepr")]
pub struct GridSet {
    spec: GridSpec,
    cells: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct GridSetRepr {
    base: u32,
    depth: u32,
    cells: Vec<u64>,
}

impl TryFrom<GridSetRepr> for GridSet {
    type Error = Error;

    fn try_from(r: GridSetRepr) -> Result<Self> {
        GridSet::new(GridSpec::new(r.base, r.depth)?, r.cells)
    }
}

impl From<GridSet> for GridSetRepr {
    fn from(s: GridSet) -> Self {
        Self {
            base: s.spec.base,
            depth: s.spec.depth,
            cells: s.cells,
        }
    }
}

/// Occupied-cell counts for every level `0..=depth` of a [`GridSet`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleCounts {
    pub base: u32,
    pub counts: Vec<u64>,
}

impl ScaleCounts {
    pub fn depth(&self) -> u32 {
        (self.counts.len() - 1) as u32
    }
}

impl GridSet {
    /// Builds a set from strictly increasing in-range indices.
    pub fn new(spec: GridSpec, cells: Vec<u64>) -> Result<Self> {
        if cells.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("cell indices must be strictly increasing".into()));
        }
        if let Some(&last) = cells.last() {
            if last >= spec.size() {
                return Err(Error::IndexOutOfRange {
                    level: spec.depth,
                    index: last,
                    limit: spec.size(),
                });
            }
        }
        Ok(Self { spec, cells })
    }

    /// Sorts and deduplicates before validating the range.
    pub fn from_unsorted(spec: GridSpec, mut cells: Vec<u64>) -> Result<Self> {
        cells.sort_unstable();
        cells.dedup();
        Self::new(spec, cells)
    }

    pub fn empty(spec: GridSpec) -> Self {
        Self {
            spec,
            cells: Vec::new(),
        }
    }

    pub fn full(spec: GridSpec) -> Self {
        Self {
            spec,
            cells: (0..spec.size()).collect(),
        }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn base(&self) -> u32 {
        self.spec.base
    }

    pub fn depth(&self) -> u32 {
        self.spec.depth
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: u64) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    /// Projects occupied leaves onto their ancestors at `target_depth`.
    pub fn coarsen(&self, target_depth: u32) -> Result<GridSet> {
        self.spec.check_level(target_depth)?;
        let spec = GridSpec {
            base: self.spec.base,
            depth: target_depth,
        };
        let factor = self.spec.cells_at(self.spec.depth - target_depth);
        Ok(GridSet {
            spec,
            cells: project(&self.cells, factor),
        })
    }

    /// `counts[m]` = number of occupied cells at level `m`.
    pub fn scale_counts(&self) -> ScaleCounts {
        let base = u64::from(self.spec.base);
        let mut counts = vec![0; self.spec.depth as usize + 1];
        let mut level_cells = self.cells.clone();
        for level in (0..=self.spec.depth as usize).rev() {
            counts[level] = level_cells.len() as u64;
            if level > 0 {
                level_cells = project(&level_cells, base);
            }
        }
        ScaleCounts {
            base: self.spec.base,
            counts,
        }
    }

    /// Equal-width cover sum `count(level) * base^(-level * beta)`.
    pub fn hausdorff_sum(&self, beta: f64, level: u32) -> Result<f64> {
        self.spec.check_level(level)?;
        let count = self.coarsen(level)?.len();
        Ok(hausdorff_sum_from_count(count as u64, self.spec.base, beta, level))
    }

    /// Shifts every index by `shift` modulo the grid size.
    pub fn translate(&self, shift: u64) -> GridSet {
        let size = self.spec.size();
        let shift = shift % size;
        let cells = self
            .cells
            .iter()
            .map(|&c| ((u128::from(c) + u128::from(shift)) % u128::from(size)) as u64)
            .collect();
        GridSet::from_unsorted(self.spec, cells).expect("translated indices stay in range")
    }

    pub fn union(&self, other: &GridSet) -> Result<GridSet> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch(format!(
                "cannot union {:?} with {:?}",
                self.spec, other.spec
            )));
        }
        let mut cells = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.cells.len() && j < other.cells.len() {
            let (a, b) = (self.cells[i], other.cells[j]);
            cells.push(a.min(b));
            i += usize::from(a <= b);
            j += usize::from(b <= a);
        }
        cells.extend_from_slice(&self.cells[i..]);
        cells.extend_from_slice(&other.cells[j..]);
        Ok(GridSet {
            spec: self.spec,
            cells,
        })
    }

    /// Compact binary form: little-endian header `base: u32, depth: u32,
    /// count: u64`, then the gaps between consecutive indices (the first gap
    /// measured from 0) as unsigned LEB128 varints.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.cells.len() * 2);
        out.extend_from_slice(&self.spec.base.to_le_bytes());
        out.extend_from_slice(&self.spec.depth.to_le_bytes());
        out.extend_from_slice(&(self.cells.len() as u64).to_le_bytes());
        let mut prev = 0;
        for &c in &self.cells {
            leb128::write::unsigned(&mut out, c - prev).expect("writing to a Vec cannot fail");
            prev = c;
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<GridSet> {
        let mut cur = Cursor::new(bytes);
        let mut u32buf = [0u8; 4];
        let mut u64buf = [0u8; 8];
        let short = |_| Error::Decode("truncated header".into());
        cur.read_exact(&mut u32buf).map_err(short)?;
        let base = u32::from_le_bytes(u32buf);
        cur.read_exact(&mut u32buf).map_err(short)?;
        let depth = u32::from_le_bytes(u32buf);
        cur.read_exact(&mut u64buf).map_err(short)?;
        let count = u64::from_le_bytes(u64buf);
        let spec = GridSpec::new(base, depth)?;
        if count > spec.size() {
            return Err(Error::Decode(format!("count {count} exceeds grid size")));
        }
        let mut cells = Vec::with_capacity(count.min(1 << 20) as usize);
        let mut prev: u64 = 0;
        for i in 0..count {
            let gap = leb128::read::unsigned(&mut cur)
                .map_err(|e| Error::Decode(format!("varint {i}: {e}")))?;
            if i > 0 && gap == 0 {
                return Err(Error::Decode("repeated cell index".into()));
            }
            prev = prev
                .checked_add(gap)
                .ok_or_else(|| Error::Decode("index overflow".into()))?;
            cells.push(prev);
        }
        if (cur.position() as usize) != bytes.len() {
            return Err(Error::Decode("trailing bytes after cell list".into()));
        }
        GridSet::new(spec, cells)
    }
}

/// `floor(i / factor)` for each sorted index, deduplicated in one pass.
fn project(cells: &[u64], factor: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(cells.len());
    for &c in cells {
        let parent = c / factor;
        if out.last() != Some(&parent) {
            out.push(parent);
        }
    }
    out
}

/// `count * base^(-level * beta)` evaluated in log space; zero for an empty count.
pub fn hausdorff_sum_from_count(count: u64, base: u32, beta: f64, level: u32) -> f64 {
    if count == 0 {
        return 0.0;
    }
    ((count as f64).ln() - f64::from(level) * beta * f64::from(base).ln()).exp()
}

/// Enumerates every depth-`m` cell whose digits all lie in `kept_digits`.
pub fn cantor_set(spec: &CantorSpec) -> Result<GridSet> {
    spec.validate()?;
    let grid = GridSpec::new(spec.base, spec.depth)?;
    let mut digits = spec.kept_digits.clone();
    digits.sort_unstable();
    let base = u64::from(spec.base);
    let mut cells = vec![0u64];
    for _ in 0..spec.depth {
        cells = cells
            .iter()
            .flat_map(|&c| digits.iter().map(move |&d| c * base + u64::from(d)))
            .collect();
    }
    Ok(GridSet { spec: grid, cells })
}

/// Re-expresses a set on a base-2 grid of depth `binary_depth`: every
/// occupied cell `[i b^-k, (i+1) b^-k)` selects the binary cells whose
/// midpoints fall inside it.
pub fn embed_in_binary(set: &GridSet, binary_depth: u32) -> Result<GridSet> {
    let target = GridSpec::new(2, binary_depth)?;
    let cell = u128::from(set.spec.size());
    let n = 1u128 << binary_depth;
    let mut out = Vec::new();
    for &i in &set.cells {
        // midpoint (2j + 1) / 2n lies in [i / cell, (i + 1) / cell)
        let lo = 2 * u128::from(i) * n;
        let hi = lo + 2 * n;
        let mut j = lo.saturating_sub(cell).div_ceil(2 * cell);
        while (2 * j + 1) * cell < hi {
            if (2 * j + 1) * cell >= lo {
                out.push(j as u64);
            }
            j += 1;
        }
    }
    GridSet::new(target, out)
}

/// Largest `k` with `base^k <= 2^binary_depth`.
pub fn matching_depth(base: u32, binary_depth: u32) -> u32 {
    let limit = 1u128 << binary_depth;
    let mut k = 0;
    let mut size = 1u128;
    while size * u128::from(base) <= limit {
        size *= u128::from(base);
        k += 1;
    }
    k
}
