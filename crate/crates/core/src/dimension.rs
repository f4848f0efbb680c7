//! Log-log slope estimates of dimension from scale counts, and the β profile
//! of equal-width cover sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{hausdorff_sum_from_count, GridSet, ScaleCounts};

/// Least-squares fit of `log_base(count)` against level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub level_lo: u32,
    pub level_hi: u32,
    pub rms_residual: f64,
    pub points_used: usize,
}

impl DimensionEstimate {
    /// Whether the slope lies in the range a subset of `[0, 1]` can have.
    /// Diagnostic only; the slope itself is never clamped.
    pub fn is_plausible(&self) -> bool {
        (-1e-9..=1.0 + 1e-9).contains(&self.slope)
    }

    pub const CSV_HEADER: &'static str = "level_lo,level_hi,slope,intercept,rms_residual";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.level_lo, self.level_hi, self.slope, self.intercept, self.rms_residual
        )
    }
}

/// Default fit range `[depth / 4, depth]`.
pub fn default_fit_range(depth: u32) -> (u32, u32) {
    (depth / 4, depth)
}

pub fn estimate_dimension(counts: &ScaleCounts, level_lo: u32, level_hi: u32) -> Result<DimensionEstimate> {
    estimate_dimension_at(counts, &(level_lo..=level_hi).collect::<Vec<_>>())
}

/// Fits over an arbitrary set of levels (all must be occupied).
pub fn estimate_dimension_at(counts: &ScaleCounts, levels: &[u32]) -> Result<DimensionEstimate> {
    let depth = counts.depth();
    if levels.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least two levels, got {}",
            levels.len()
        )));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DegenerateFit("levels must be strictly increasing".into()));
    }
    let (lo, hi) = (levels[0], levels[levels.len() - 1]);
    if hi > depth {
        return Err(Error::LevelOutOfRange { level: hi, depth });
    }
    let ln_base = f64::from(counts.base).ln();
    let mut xs = Vec::with_capacity(levels.len());
    let mut ys = Vec::with_capacity(levels.len());
    for &level in levels {
        let c = counts.counts[level as usize];
        if c == 0 {
            return Err(Error::EmptyLevel { level });
        }
        xs.push(f64::from(level));
        ys.push((c as f64).ln() / ln_base);
    }
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(DimensionEstimate {
        slope,
        intercept,
        level_lo: lo,
        level_hi: hi,
        rms_residual: (sse / n).sqrt(),
        points_used: xs.len(),
    })
}

/// Cover sums at the finest level for a range of exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdProfile {
    pub betas: Vec<f64>,
    pub sums: Vec<f64>,
}

pub fn threshold_profile(set: &GridSet, betas: &[f64]) -> Result<ThresholdProfile> {
    if betas.iter().any(|b| !(0.0..=1.0).contains(b)) {
        return Err(Error::Domain("every beta must lie in [0, 1]".into()));
    }
    if betas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("betas must be strictly increasing".into()));
    }
    let count = set.len() as u64;
    let sums = betas
        .iter()
        .map(|&beta| hausdorff_sum_from_count(count, set.base(), beta, set.depth()))
        .collect();
    Ok(ThresholdProfile {
        betas: betas.to_vec(),
        sums,
    })
}
