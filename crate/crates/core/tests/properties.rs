use proptest::collection::vec;
use proptest::prelude::*;
use sno::metrics::population_diversity;
use sno::objective::repair_bounds;
use sno::schedule::{attracted_count, candidate_region_count, population_target};
use sno::stats::{average_ranks, wilcoxon_classify, Classification, RankMode, ResultTable};
use sno::{Problem, RegionSchedule, TestFunction};

fn points(d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    vec(vec(-1e3..1e3f64, d), 1..40)
}

fn diversity(p: &[Vec<f64>]) -> f64 {
    population_diversity(p.iter().map(Vec::as_slice))
}

proptest! {
    #[test]
    fn diversity_ignores_translation(p in points(4), shift in vec(-1e3..1e3f64, 4)) {
        let moved: Vec<Vec<f64>> = p.iter().map(|x| x.iter().zip(&shift).map(|(a, b)| a + b).collect()).collect();
        let (a, b) = (diversity(&p), diversity(&moved));
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn diversity_scales_linearly(p in points(3), k in 0.01..100.0f64) {
        let scaled: Vec<Vec<f64>> = p.iter().map(|x| x.iter().map(|a| a * k).collect()).collect();
        let (a, b) = (diversity(&p), diversity(&scaled));
        prop_assert!((b - k * a).abs() <= 1e-9 * (k * a).max(1.0));
    }

    #[test]
    fn repair_is_idempotent(x in vec(-500.0..500.0f64, 5)) {
        let problem = Problem::builtin(TestFunction::Rastrigin, 5).unwrap();
        let mut once = x.clone();
        repair_bounds(&mut once, &problem);
        prop_assert!(problem.contains(&once));
        let mut twice = once.clone();
        repair_bounds(&mut twice, &problem);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn schedules_stay_in_range(delta in 0.0..=1.0f64, h in 1..500usize, n_a_max in 1..20usize) {
        for s in [RegionSchedule::Shrinking, RegionSchedule::Growing] {
            let m = candidate_region_count(delta, h, s);
            prop_assert!((1..=h).contains(&m));
        }
        let n_a = attracted_count(delta, n_a_max);
        prop_assert!((1..=n_a_max).contains(&n_a));
        let n = population_target(delta, 190, 38);
        prop_assert!((38..=190).contains(&n));
    }

    #[test]
    fn ranks_ignore_monotone_transforms(
        errors in vec(vec(0.0..50.0f64, 4), 3),
    ) {
        let table = |f: &dyn Fn(f64) -> f64| -> Vec<ResultTable> {
            errors
                .iter()
                .enumerate()
                .map(|(a, e)| ResultTable::new(format!("a{a}")).with("f", e.iter().map(|&v| f(v)).collect()))
                .collect()
        };
        for mode in [RankMode::Avg, RankMode::Best] {
            let plain = average_ranks(&table(&|v| v), mode).unwrap();
            let warped = average_ranks(&table(&|v| (v + 1.0).ln() * 3.0 + 7.0), mode).unwrap();
            prop_assert_eq!(plain, warped);
        }
    }

    #[test]
    fn wilcoxon_is_antisymmetric(a in vec(0.0..10.0f64, 5..25), shift in 0.0..5.0f64) {
        let b: Vec<f64> = a.iter().rev().map(|v| v * 0.7 + shift).collect();
        let ab = wilcoxon_classify(&a, &b, 0.05).unwrap();
        let ba = wilcoxon_classify(&b, &a, 0.05).unwrap();
        let expect = match ab {
            Classification::Better => Classification::Worse,
            Classification::Worse => Classification::Better,
            Classification::NoDifference => Classification::NoDifference,
        };
        prop_assert_eq!(ba, expect);
    }
}
