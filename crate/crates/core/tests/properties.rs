use std::collections::HashSet;

use fractal_lab::dimension::{default_fit_range, estimate_dimension, estimate_dimension_at};
use fractal_lab::grid::{cantor_set, CantorSpec, GridSet, GridSpec};
use fractal_lab::walk::{neighbourhood_measure, sample_walk, LatticePoint};
use fractal_lab::{frostman_cascade, threshold_profile, CascadeMeasure};
use proptest::prelude::*;

fn grid_set() -> impl Strategy<Value = GridSet> {
    (2u32..=3, 0u32..=8).prop_flat_map(|(base, depth)| {
        let size = u64::from(base).pow(depth);
        prop::collection::vec(0..size, 0..200).prop_map(move |cells| {
            GridSet::from_unsorted(GridSpec::new(base, depth).unwrap(), cells).unwrap()
        })
    })
}

fn nonempty_grid_set() -> impl Strategy<Value = GridSet> {
    grid_set().prop_filter("nonempty", |s| !s.is_empty())
}

/// Minimum over cutsets of `Σ base^(-ℓα)`, by recursion over the explicit tree.
fn min_cut(set: &GridSet, alpha: f64) -> f64 {
    let spec = set.spec();
    let occupied: Vec<HashSet<u64>> = (0..=spec.depth())
        .map(|l| set.coarsen(l).unwrap().cells().iter().copied().collect())
        .collect();
    fn go(level: u32, idx: u64, base: u32, depth: u32, alpha: f64, occ: &[HashSet<u64>]) -> f64 {
        if !occ[level as usize].contains(&idx) {
            return 0.0;
        }
        let cap = f64::from(base).powf(-f64::from(level) * alpha);
        if level == depth {
            return cap;
        }
        let children: f64 = (0..u64::from(base))
            .map(|d| go(level + 1, idx * u64::from(base) + d, base, depth, alpha, occ))
            .sum();
        cap.min(children)
    }
    go(0, 0, spec.base(), spec.depth(), alpha, &occupied)
}

fn relative_excess(value: f64, bound: f64) -> f64 {
    (value - bound) / bound
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn counts_grow_by_at_most_base(set in grid_set()) {
        let c = set.scale_counts();
        let base = u64::from(set.base());
        for m in 0..set.depth() as usize {
            prop_assert!(c.counts[m] <= c.counts[m + 1]);
            prop_assert!(c.counts[m + 1] <= base * c.counts[m]);
        }
        for (m, &count) in c.counts.iter().enumerate() {
            prop_assert!(count <= (set.len() as u64).min(base.pow(m as u32)));
        }
        prop_assert_eq!(c.counts[set.depth() as usize], set.len() as u64);
        prop_assert!(c.counts[0] <= 1);
    }

    #[test]
    fn coarsen_composes(set in grid_set(), a in 0u32..=8, b in 0u32..=8) {
        let (a, b) = (a.min(set.depth()), b.min(set.depth()));
        let (hi, lo) = (a.max(b), a.min(b));
        prop_assert_eq!(set.coarsen(hi).unwrap().coarsen(lo).unwrap(), set.coarsen(lo).unwrap());
    }

    #[test]
    fn coarsen_matches_definition(set in grid_set(), target in 0u32..=8) {
        let target = target.min(set.depth());
        let factor = u64::from(set.base()).pow(set.depth() - target);
        let mut expected: Vec<u64> = set.cells().iter().map(|c| c / factor).collect();
        expected.dedup();
        let coarse = set.coarsen(target).unwrap();
        prop_assert_eq!(coarse.cells(), &expected[..]);
    }

    #[test]
    fn cover_sum_strictly_decreases_in_beta(set in nonempty_grid_set(), b1 in 0.0f64..1.0, gap in 0.01f64..0.5) {
        prop_assume!(set.depth() >= 1);
        let b2 = (b1 + gap).min(1.0);
        prop_assume!(b2 > b1);
        for level in 1..=set.depth() {
            prop_assert!(set.hausdorff_sum(b2, level).unwrap() < set.hausdorff_sum(b1, level).unwrap());
        }
    }

    #[test]
    fn translation_keeps_cardinality(set in grid_set(), shift in any::<u64>()) {
        let moved = set.translate(shift);
        prop_assert_eq!(moved.scale_counts().counts[set.depth() as usize], set.len() as u64);
    }

    #[test]
    fn serialization_round_trips(set in grid_set()) {
        prop_assert_eq!(GridSet::from_bytes(&set.to_bytes()).unwrap(), set.clone());
        let json = serde_json::to_string(&set).unwrap();
        prop_assert_eq!(serde_json::from_str::<GridSet>(&json).unwrap(), set);
    }

    #[test]
    fn self_similar_slope_is_exact(base in 2u32..=5, depth in 2u32..=10, mask in 1u32..31, lo in 1u32..10, span in 1u32..10) {
        let kept: Vec<u32> = (0..base).filter(|d| mask & (1 << d) != 0).collect();
        prop_assume!(!kept.is_empty());
        let spec = CantorSpec::new(base, kept, depth).unwrap();
        let lo = lo.min(depth - 1);
        let hi = (lo + span).min(depth);
        let est = estimate_dimension(&cantor_set(&spec).unwrap().scale_counts(), lo, hi).unwrap();
        prop_assert!((est.slope - spec.similarity_dimension()).abs() < 1e-9);
    }

    #[test]
    fn profile_is_strictly_decreasing(set in nonempty_grid_set()) {
        prop_assume!(set.len() >= 2);
        let betas: Vec<f64> = (0..=10).map(|i| f64::from(i) / 10.0).collect();
        let p = threshold_profile(&set, &betas).unwrap();
        prop_assert!(p.sums.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn frostman_inequality_and_normalization(set in nonempty_grid_set(), alpha_i in 1usize..=9) {
        let alpha = alpha_i as f64 / 10.0;
        let m = frostman_cascade(&set, alpha).unwrap();
        let total: f64 = m.leaf_mass().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(m.leaf_mass().iter().all(|&x| x > 0.0));
        let c = m.frostman_constant();
        for level in 0..=set.depth() {
            let cap = f64::from(set.base()).powf(-f64::from(level) * alpha);
            for (_, mass) in m.level_masses(level) {
                prop_assert!(relative_excess(mass, c * cap) <= 1e-9);
            }
        }
        prop_assert!(m.verify_frostman() <= c * (1.0 + 1e-9));
    }

    #[test]
    fn frostman_additivity(set in nonempty_grid_set(), alpha_i in 1usize..=9) {
        let m = frostman_cascade(&set, alpha_i as f64 / 10.0).unwrap();
        let base = u64::from(set.base());
        for level in 0..set.depth() {
            for (idx, mass) in m.level_masses(level) {
                let children: f64 = (0..base).map(|d| m.cell_mass(level + 1, idx * base + d).unwrap()).sum();
                prop_assert!((mass - children).abs() <= 1e-12);
                prop_assert!((mass - m.cell_mass(level, idx).unwrap()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn frostman_constant_is_inverse_min_cut(set in nonempty_grid_set(), alpha_i in 1usize..=9) {
        let alpha = alpha_i as f64 / 10.0;
        let m = frostman_cascade(&set, alpha).unwrap();
        let cut = min_cut(&set, alpha);
        prop_assert!((m.raw_total() - cut).abs() <= 1e-10 * cut, "{} vs {}", m.raw_total(), cut);
        // any single level is a cutset, so the constant is at least 1 / (cover sum)
        for level in 0..=set.depth() {
            let sum = set.hausdorff_sum(alpha, level).unwrap();
            prop_assert!(m.frostman_constant() * sum >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn frostman_interval_extension(set in nonempty_grid_set(), alpha_i in 1usize..=9, a in 0.0f64..1.0, len in 1e-6f64..1.0) {
        let alpha = alpha_i as f64 / 10.0;
        let m = frostman_cascade(&set, alpha).unwrap();
        let mass = m.interval_mass(a, a + len);
        let bound = 2.0 * m.frostman_constant() * (f64::from(set.base()) * len).powf(alpha);
        prop_assert!(mass <= bound * (1.0 + 1e-9), "{} > {}", mass, bound);
    }

    #[test]
    fn walk_functionals(m in 1u32..=12, seed in any::<u64>()) {
        let w = sample_walk(m, seed).unwrap();
        let p = w.positions();
        prop_assert_eq!(p[0], 0);
        prop_assert!(p.windows(2).all(|s| (s[1] - s[0]).abs() == 1));
        prop_assert!(p.iter().enumerate().all(|(k, &v)| v.unsigned_abs() as usize <= k));

        // record times against the reflected walk's zero set
        let mut running = i32::MIN;
        let reflected_zeros: Vec<u64> = p[..p.len() - 1]
            .iter()
            .enumerate()
            .filter_map(|(k, &v)| {
                running = running.max(v);
                (running - v == 0).then_some(k as u64)
            })
            .collect();
        let records = w.record_times();
        prop_assert_eq!(records.cells(), &reflected_zeros[..]);

        for x in [-2i64, -1, 0, 1, 3] {
            let x = LatticePoint::new(x);
            let level = w.level_set(x);
            prop_assert_eq!(
                w.local_time(w.steps(), x).unwrap(),
                level.len() as f64 * 0.5f64.powf(f64::from(m) / 2.0)
            );
        }
    }

    #[test]
    fn occupation_lambda_bounds(m in 4u32..=12, seed in any::<u64>(), delta_exp in 1i32..12, t_frac in 0.1f64..=1.0) {
        let w = sample_walk(m, seed).unwrap();
        let delta = 2f64.powi(-delta_exp);
        let t_cells = ((w.steps() as f64 * t_frac) as u64).max(1);
        let visits = w.level_set(LatticePoint::ZERO).cells().iter().filter(|&&k| k < t_cells).count() as f64;
        let horizon = t_cells as f64 * w.time_step();
        let lambda = w.occupation_lambda(t_cells, LatticePoint::ZERO, delta).unwrap();
        prop_assert!(lambda <= visits * delta + 1e-12);
        prop_assert!(lambda <= horizon + 1e-12);
        // same-level visits are at least 2Δt apart; clipping removes at most δ/2 per end
        prop_assert!(lambda >= visits * delta.min(2.0 * w.time_step()) - delta - 1e-12);
    }

    #[test]
    fn neighbourhood_measure_matches_grid_oracle(times in prop::collection::btree_set(0u32..64, 0..10), width in 1u32..20) {
        // on a grid of 1/128, interval endpoints are exact so counting covered
        // half-cells gives the measure
        let times: Vec<f64> = times.into_iter().map(|t| f64::from(t) / 64.0).collect();
        let delta = f64::from(width) / 64.0;
        let fine = 1.0 / 128.0;
        let covered = (0..128)
            .filter(|&i| {
                let mid = (f64::from(i) + 0.5) * fine;
                times.iter().any(|&s| (mid - s).abs() <= delta / 2.0)
            })
            .count();
        let got = neighbourhood_measure(times.iter().copied(), delta, 1.0);
        prop_assert!((got - covered as f64 * fine).abs() < 1e-12);
    }
}

#[test]
fn walk_generation_is_deterministic() {
    for seed in [0u64, 1, u64::MAX, 0xdead_beef] {
        assert_eq!(sample_walk(14, seed).unwrap().to_bytes(), sample_walk(14, seed).unwrap().to_bytes());
    }
    assert_ne!(sample_walk(14, 1).unwrap(), sample_walk(14, 2).unwrap());
}

fn prefixed(prefix: u64, inner: &GridSet, depth: u32) -> Vec<u64> {
    let offset = prefix * 3u64.pow(depth - 1);
    inner.cells().iter().map(|c| offset + c).collect()
}

#[test]
fn union_slope_follows_the_larger_dimension() {
    let depth = 16;
    let spec = GridSpec::new(3, depth).unwrap();
    let cantor = cantor_set(&CantorSpec::triadic(depth - 1)).unwrap();
    let full = GridSet::full(GridSpec::new(3, depth - 1).unwrap());
    let point = GridSet::new(GridSpec::new(3, depth - 1).unwrap(), vec![5]).unwrap();
    let (lo, hi) = default_fit_range(depth);

    // Cantor piece in [0, 1/3), full interval in [2/3, 1): dimension 1
    let a = GridSet::new(spec, prefixed(0, &cantor, depth)).unwrap();
    let b = GridSet::new(spec, prefixed(2, &full, depth)).unwrap();
    let est = estimate_dimension(&a.union(&b).unwrap().scale_counts(), lo, hi).unwrap();
    assert!((est.slope - 1.0).abs() < 0.02, "{}", est.slope);

    // Cantor piece and a single point: dimension log 2 / log 3
    let c = GridSet::new(spec, prefixed(1, &point, depth)).unwrap();
    let est = estimate_dimension(&a.union(&c).unwrap().scale_counts(), lo, hi).unwrap();
    assert!((est.slope - 2f64.ln() / 3f64.ln()).abs() < 0.02, "{}", est.slope);
}

#[test]
fn subsampling_levels_on_exact_sets() {
    let counts = cantor_set(&CantorSpec::triadic(18)).unwrap().scale_counts();
    let all = estimate_dimension(&counts, 1, 18).unwrap().slope;
    let every_third: Vec<u32> = (1..=18).step_by(3).collect();
    let sub = estimate_dimension_at(&counts, &every_third).unwrap().slope;
    assert!((all - sub).abs() < 1e-12);
}

#[test]
fn cascade_json_round_trip_keeps_constant() {
    let set = cantor_set(&CantorSpec::new(4, vec![0, 3], 6).unwrap()).unwrap();
    let m = frostman_cascade(&set, 0.4).unwrap();
    let back: CascadeMeasure = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(back.frostman_constant(), m.frostman_constant());
    assert_eq!(back.leaf_mass(), m.leaf_mass());
}
