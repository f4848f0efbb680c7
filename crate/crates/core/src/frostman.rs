//! Cascade construction of a measure on a [`GridSet`] whose mass on every
//! level-ℓ cell is at most `C * base^(-ℓα)`.
//!
//! Every occupied leaf starts with mass `base^(-depth·α)`. Walking from the
//! level just above the leaves up to the root, any cell whose subtree mass
//! exceeds its cap `base^(-ℓα)` has its whole subtree rescaled down to the cap.
//! Rescaling never raises a mass, so caps checked at finer levels keep holding.
//! The surviving total `Z` is divided out at the end and `C = 1/Z`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSet;
use crate::stats::compensated_sum;

/// Relative slack before a cap counts as exceeded.
const CAP_TOLERANCE: f64 = 1e-12;

/// Frostman constants above this are reported as degenerate.
pub const DEGENERATE_CONSTANT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeMeasure {
    set: GridSet,
    alpha: f64,
    frostman_constant: f64,
    leaf_mass: Vec<f64>,
}

impl CascadeMeasure {
    pub fn set(&self) -> &GridSet {
        &self.set
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn frostman_constant(&self) -> f64 {
        self.frostman_constant
    }

    /// Masses aligned with `set().cells()`.
    pub fn leaf_mass(&self) -> &[f64] {
        &self.leaf_mass
    }

    /// Total mass before normalization.
    pub fn raw_total(&self) -> f64 {
        1.0 / self.frostman_constant
    }

    /// True when the constant is too large to be a useful Frostman bound at this α.
    pub fn is_degenerate(&self) -> bool {
        self.frostman_constant > DEGENERATE_CONSTANT
    }

    fn cap(&self, level: u32) -> f64 {
        cap(self.set.base(), level, self.alpha)
    }

    /// Mass of the level-`level` cell `cell_index`.
    pub fn cell_mass(&self, level: u32, cell_index: u64) -> Result<f64> {
        let spec = self.set.spec();
        if level > spec.depth() {
            return Err(Error::LevelOutOfRange {
                level,
                depth: spec.depth(),
            });
        }
        let limit = spec.cells_at(level);
        if cell_index >= limit {
            return Err(Error::IndexOutOfRange {
                level,
                index: cell_index,
                limit,
            });
        }
        let factor = spec.cells_at(spec.depth() - level);
        let cells = self.set.cells();
        let start = cells.partition_point(|&c| c < cell_index * factor);
        let end = cells.partition_point(|&c| c < (cell_index + 1) * factor);
        Ok(compensated_sum(self.leaf_mass[start..end].iter().copied()))
    }

    /// `(cell_index, mass)` for every occupied cell at `level`.
    pub fn level_masses(&self, level: u32) -> Vec<(u64, f64)> {
        let spec = self.set.spec();
        let factor = spec.cells_at(spec.depth() - level);
        let cells = self.set.cells();
        let mut out = Vec::new();
        let mut start = 0;
        while start < cells.len() {
            let parent = cells[start] / factor;
            let end = start + cells[start..].partition_point(|&c| c / factor == parent);
            out.push((parent, compensated_sum(self.leaf_mass[start..end].iter().copied())));
            start = end;
        }
        out
    }

    /// Largest observed `μ(I) / base^(-ℓα)` over every occupied cell at every level.
    pub fn verify_frostman(&self) -> f64 {
        (0..=self.set.depth())
            .flat_map(|level| {
                let cap = self.cap(level);
                self.level_masses(level).into_iter().map(move |(_, m)| m / cap)
            })
            .fold(0.0, f64::max)
    }

    /// Mass of `[a, b)` with each leaf's mass spread uniformly over its cell.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let width = self.set.spec().cell_width();
        self.set
            .cells()
            .iter()
            .zip(&self.leaf_mass)
            .map(|(&c, &m)| {
                let lo = c as f64 * width;
                let overlap = (b.min(lo + width) - a.max(lo)).max(0.0);
                m * overlap / width
            })
            .sum()
    }

    /// Writes `level,cell_index,mass` rows for every occupied cell.
    pub fn write_cell_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["level", "cell_index", "mass"])?;
        for level in 0..=self.set.depth() {
            for (idx, mass) in self.level_masses(level) {
                w.write_record([level.to_string(), idx.to_string(), mass.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn cap(base: u32, level: u32, alpha: f64) -> f64 {
    (-f64::from(level) * alpha * f64::from(base).ln()).exp()
}

pub fn frostman_cascade(set: &GridSet, alpha: f64) -> Result<CascadeMeasure> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if set.is_empty() {
        return Err(Error::EmptySupport);
    }
    let spec = set.spec();
    let cells = set.cells();
    let mut mass = vec![cap(spec.base(), spec.depth(), alpha); cells.len()];

    for level in (0..spec.depth()).rev() {
        let factor = spec.cells_at(spec.depth() - level);
        let limit = cap(spec.base(), level, alpha);
        let mut start = 0;
        while start < cells.len() {
            let parent = cells[start] / factor;
            let end = start + cells[start..].partition_point(|&c| c / factor == parent);
            let subtree = compensated_sum(mass[start..end].iter().copied());
            if subtree > limit * (1.0 + CAP_TOLERANCE) {
                let scale = limit / subtree;
                mass[start..end].iter_mut().for_each(|m| *m *= scale);
            }
            start = end;
        }
    }

    let total = compensated_sum(mass.iter().copied());
    mass.iter_mut().for_each(|m| *m /= total);
    Ok(CascadeMeasure {
        set: set.clone(),
        alpha,
        frostman_constant: 1.0 / total,
        leaf_mass: mass,
    })
}
