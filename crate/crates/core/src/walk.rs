//! Simple ±1 random walks on `N = 2^m` steps, read as Brownian paths with
//! time step `Δt = 1/N` and space step `√Δt`, plus the path functionals built
//! on them: level sets, local time, occupation measure, running maxima, record
//! times and images of time sets.
//!
//! All statistics use the lattice times `k Δt`; the polygonal interpolation
//! between them is never materialized.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSet, GridSpec};
use crate::rng::{PhiloxSteps, StepSource};

pub const MAX_STEPS_LOG2: u32 = 30;

/// `2 (2/π)^{1/2}`, the Perkins normalization between occupation measure and local time.
pub const PERKINS_CONSTANT: f64 = 1.595_769_121_605_730_7;

/// A lattice value, in units of `√Δt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    pub units: i64,
}

impl LatticePoint {
    pub const ZERO: LatticePoint = LatticePoint { units: 0 };

    pub fn new(units: i64) -> Self {
        Self { units }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkPath {
    steps_log2: u32,
    seed: u64,
    positions: Vec<i32>,
}

fn check_steps(steps_log2: u32) -> Result<()> {
    if (1..=MAX_STEPS_LOG2).contains(&steps_log2) {
        Ok(())
    } else {
        Err(Error::StepsOutOfRange(steps_log2))
    }
}

/// Lazily produces `p_0, p_1, …, p_N` from a step source.
pub struct PositionStream<'a, S: StepSource> {
    source: &'a S,
    n: u64,
    k: u64,
    pos: i64,
    words: [u32; 4],
}

impl<'a, S: StepSource> PositionStream<'a, S> {
    pub fn new(source: &'a S, steps_log2: u32) -> Result<Self> {
        check_steps(steps_log2)?;
        Ok(Self {
            source,
            n: 1 << steps_log2,
            k: 0,
            pos: 0,
            words: [0; 4],
        })
    }
}

impl<S: StepSource> Iterator for PositionStream<'_, S> {
    type Item = i64;

    fn next(&mut self) -> Option<i64> {
        if self.k > self.n {
            return None;
        }
        let out = self.pos;
        if self.k < self.n {
            let within = (self.k % 128) as usize;
            if within == 0 {
                self.words = self.source.block(self.k / 128);
            }
            let up = (self.words[within / 32] >> (within % 32)) & 1 == 1;
            self.pos += if up { 1 } else { -1 };
        }
        self.k += 1;
        Some(out)
    }
}

pub fn sample_walk(steps_log2: u32, seed: u64) -> Result<WalkPath> {
    sample_walk_with(steps_log2, seed, &PhiloxSteps::new(seed))
}

/// Builds a path from an arbitrary step source; `seed` is recorded only.
pub fn sample_walk_with<S: StepSource>(steps_log2: u32, seed: u64, source: &S) -> Result<WalkPath> {
    let positions = PositionStream::new(source, steps_log2)?
        .map(|p| p as i32)
        .collect();
    Ok(WalkPath {
        steps_log2,
        seed,
        positions,
    })
}

/// Number of `k < t_cells` with `p_k = x`, without storing the path.
pub fn streaming_visit_count(steps_log2: u32, seed: u64, t_cells: u64, x: LatticePoint) -> Result<u64> {
    let source = PhiloxSteps::new(seed);
    let count = PositionStream::new(&source, steps_log2)?
        .take(t_cells.min(1 << steps_log2) as usize)
        .filter(|&p| p == x.units)
        .count();
    Ok(count as u64)
}

/// Local time `L(t, x)` computed while streaming the path.
pub fn streaming_local_time(steps_log2: u32, seed: u64, t_cells: u64, x: LatticePoint) -> Result<f64> {
    if t_cells > 1 << steps_log2.min(MAX_STEPS_LOG2) {
        return Err(Error::Domain(format!("t_cells {t_cells} exceeds N")));
    }
    Ok(streaming_visit_count(steps_log2, seed, t_cells, x)? as f64 * space_step(steps_log2))
}

/// Level set `{k < N : p_k = x}` computed while streaming the path.
pub fn streaming_level_set(steps_log2: u32, seed: u64, x: LatticePoint) -> Result<GridSet> {
    let source = PhiloxSteps::new(seed);
    let cells = PositionStream::new(&source, steps_log2)?
        .take(1 << steps_log2)
        .enumerate()
        .filter(|&(_, p)| p == x.units)
        .map(|(k, _)| k as u64)
        .collect();
    GridSet::new(GridSpec::new(2, steps_log2)?, cells)
}

/// `√Δt = 2^(-m/2)`.
pub fn space_step(steps_log2: u32) -> f64 {
    0.5f64.powi(steps_log2 as i32).sqrt()
}

impl WalkPath {
    /// Builds a path from explicit increments (`true` = +1). The number of
    /// increments must be `2^steps_log2`.
    pub fn from_increments(steps_log2: u32, seed: u64, increments: &[bool]) -> Result<Self> {
        check_steps(steps_log2)?;
        if increments.len() as u64 != 1 << steps_log2 {
            return Err(Error::Domain(format!(
                "expected {} increments, got {}",
                1u64 << steps_log2,
                increments.len()
            )));
        }
        let mut positions = Vec::with_capacity(increments.len() + 1);
        let mut p = 0i32;
        positions.push(p);
        for &up in increments {
            p += if up { 1 } else { -1 };
            positions.push(p);
        }
        Ok(Self {
            steps_log2,
            seed,
            positions,
        })
    }

    pub fn steps_log2(&self) -> u32 {
        self.steps_log2
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of steps `N`.
    pub fn steps(&self) -> u64 {
        1 << self.steps_log2
    }

    /// `p_0 … p_N` in lattice units.
    pub fn positions(&self) -> &[i32] {
        &self.positions
    }

    pub fn time_step(&self) -> f64 {
        0.5f64.powi(self.steps_log2 as i32)
    }

    pub fn space_step(&self) -> f64 {
        space_step(self.steps_log2)
    }

    /// Path value `p_k √Δt` at lattice time `k`.
    pub fn value(&self, k: usize) -> f64 {
        f64::from(self.positions[k]) * self.space_step()
    }

    fn time_grid(&self) -> GridSpec {
        GridSpec::new(2, self.steps_log2).expect("steps_log2 <= 30 fits any index")
    }

    fn visits(&self, t_cells: u64, x: LatticePoint) -> impl Iterator<Item = u64> + '_ {
        let limit = t_cells.min(self.steps()) as usize;
        self.positions[..limit]
            .iter()
            .enumerate()
            .filter(move |&(_, &p)| i64::from(p) == x.units)
            .map(|(k, _)| k as u64)
    }

    /// `{k < N : p_k = x}` on the base-2 time grid of depth `m`.
    pub fn level_set(&self, x: LatticePoint) -> GridSet {
        GridSet::new(self.time_grid(), self.visits(self.steps(), x).collect())
            .expect("visit times are increasing and below N")
    }

    fn check_time(&self, t_cells: u64) -> Result<()> {
        if t_cells > self.steps() {
            Err(Error::Domain(format!("t_cells {t_cells} exceeds N = {}", self.steps())))
        } else {
            Ok(())
        }
    }

    /// `L(t, x) = #{k < t_cells : p_k = x} · √Δt`.
    pub fn local_time(&self, t_cells: u64, x: LatticePoint) -> Result<f64> {
        self.check_time(t_cells)?;
        Ok(self.visits(t_cells, x).count() as f64 * self.space_step())
    }

    /// Lebesgue measure of the `δ/2`-neighbourhood of the visit times to `x`
    /// before `t_cells`, clipped to `[0, t_cells Δt]`.
    pub fn occupation_lambda(&self, t_cells: u64, x: LatticePoint, delta: f64) -> Result<f64> {
        if delta.is_nan() || delta <= 0.0 {
            return Err(Error::Domain(format!("delta must be positive, got {delta}")));
        }
        self.check_time(t_cells)?;
        let dt = self.time_step();
        let times = self.visits(t_cells, x).map(|k| k as f64 * dt);
        Ok(neighbourhood_measure(times, delta, t_cells as f64 * dt))
    }

    /// `λ δ^{-1/2} / (2 (2/π)^{1/2} L)`.
    pub fn perkins_ratio(&self, t_cells: u64, x: LatticePoint, delta: f64) -> Result<f64> {
        let lambda = self.occupation_lambda(t_cells, x, delta)?;
        let local = self.local_time(t_cells, x)?;
        if local == 0.0 {
            return Err(Error::ZeroLocalTime);
        }
        Ok(lambda / delta.sqrt() / (PERKINS_CONSTANT * local))
    }

    /// `M_k = max_{j <= k} p_j`.
    pub fn running_max(&self) -> Vec<i32> {
        self.positions
            .iter()
            .scan(i32::MIN, |m, &p| {
                *m = (*m).max(p);
                Some(*m)
            })
            .collect()
    }

    /// `M_k - p_k`, the walk reflected at its running maximum.
    pub fn reflected(&self) -> Vec<i32> {
        self.running_max()
            .iter()
            .zip(&self.positions)
            .map(|(m, p)| m - p)
            .collect()
    }

    /// `{k < N : p_k = M_k}`.
    pub fn record_times(&self) -> GridSet {
        let cells = self
            .running_max()
            .iter()
            .zip(&self.positions)
            .take(self.steps() as usize)
            .enumerate()
            .filter(|(_, (m, p))| m == p)
            .map(|(k, _)| k as u64)
            .collect();
        GridSet::new(self.time_grid(), cells).expect("record times are increasing and below N")
    }

    /// Distinct values `{p_k : k ∈ times}` on a base-2 value grid with cells two
    /// lattice units wide.
    ///
    /// The value window is `[-H, H)` with `H = 2^(⌈m/2⌉ + e)` lattice units and
    /// the grid has depth `⌈m/2⌉ + e`, so cell `j` holds the units `u` with
    /// `(u + H) / 2 = j`. `e = 0` gives the window `[-√N, √N)`; `e` is the
    /// smallest value whose window holds every image point.
    pub fn image_set(&self, times: &GridSet) -> Result<GridSet> {
        if times.base() != 2 || times.depth() != self.steps_log2 {
            return Err(Error::GridMismatch(format!(
                "time set has base {} depth {}, walk needs base 2 depth {}",
                times.base(),
                times.depth(),
                self.steps_log2
            )));
        }
        let mut values: Vec<i64> = times
            .cells()
            .iter()
            .map(|&k| i64::from(self.positions[k as usize]))
            .collect();
        values.sort_unstable();
        values.dedup();
        let mut depth = self.steps_log2.div_ceil(2);
        if let (Some(&lo), Some(&hi)) = (values.first(), values.last()) {
            while lo < -(1i64 << depth) || hi >= 1i64 << depth {
                depth += 1;
            }
        }
        let half = 1i64 << depth;
        let cells = values.iter().map(|&u| ((u + half) / 2) as u64).collect();
        GridSet::from_unsorted(GridSpec::new(2, depth)?, cells)
    }

    /// Nominal image depth `⌈m/2⌉`, the depth [`WalkPath::image_set`] uses when
    /// the path stays inside `[-√N, √N)`.
    pub fn nominal_image_depth(&self) -> u32 {
        self.steps_log2.div_ceil(2)
    }

    /// Binary form: little-endian `steps_log2: u32`, `seed: u64`, then the
    /// `N` increments packed one bit each, least significant bit first, set
    /// bit = +1.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.steps() as usize;
        let mut out = Vec::with_capacity(12 + n.div_ceil(8));
        out.extend_from_slice(&self.steps_log2.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        let mut packed = vec![0u8; n.div_ceil(8)];
        for (k, w) in self.positions.windows(2).enumerate() {
            if w[1] > w[0] {
                packed[k / 8] |= 1 << (k % 8);
            }
        }
        out.extend_from_slice(&packed);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 12 {
            return Err(Error::Decode("truncated walk header".into()));
        }
        let steps_log2 = u32::from_le_bytes(bytes[0..4].try_into().expect("4 bytes"));
        let seed = u64::from_le_bytes(bytes[4..12].try_into().expect("8 bytes"));
        check_steps(steps_log2)?;
        let n = 1usize << steps_log2;
        let body = &bytes[12..];
        if body.len() != n.div_ceil(8) {
            return Err(Error::Decode(format!(
                "expected {} increment bytes, found {}",
                n.div_ceil(8),
                body.len()
            )));
        }
        let increments: Vec<bool> = (0..n).map(|k| (body[k / 8] >> (k % 8)) & 1 == 1).collect();
        Self::from_increments(steps_log2, seed, &increments)
    }
}

/// Measure of `⋃ [s - δ/2, s + δ/2] ∩ [0, horizon]` over sorted times `s`,
/// in one sweep.
pub fn neighbourhood_measure(times: impl IntoIterator<Item = f64>, delta: f64, horizon: f64) -> f64 {
    let half = delta / 2.0;
    let mut total = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for s in times {
        let (lo, hi) = ((s - half).max(0.0), (s + half).min(horizon));
        current = match current {
            Some((a, b)) if lo <= b => Some((a, b.max(hi))),
            Some((a, b)) => {
                total += b - a;
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some((a, b)) = current {
        total += b - a;
    }
    total
}

/// One named statistic of one replica's walk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkStatRow {
    pub replica: u64,
    pub seed: u64,
    pub statistic: String,
    pub value: f64,
}

/// Writes `replica,seed,statistic,value` rows.
pub fn write_stat_rows<W: Write>(writer: W, rows: &[WalkStatRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
