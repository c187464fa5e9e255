use compwb_core::experiments::{gevrey_stationary_point, nuclearity_sum};
use compwb_core::fdb::{enumerate_partitions, PartitionIter};
use compwb_core::functions::{reevaluate_witness, seminorm_p_lambda, ModelFunction};
use compwb_core::sequences::{associated_weight, WeightSequence};
use compwb_core::weights::{
    conjugate_shift_bound, default_test_points, dilation_constant, ConjugateEvaluator,
    WeightFunction,
};
use compwb_core::{Grid, LogNum};
use proptest::prelude::*;

fn gevrey(d: f64) -> ConjugateEvaluator {
    ConjugateEvaluator::auto(WeightFunction::gevrey(d).into_arc())
}

/// Partition counts p(0..=15).
const PARTITIONS: [usize; 16] = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176];

#[test]
fn partition_counts() {
    for (j, &p) in PARTITIONS.iter().enumerate().skip(1) {
        let parts = enumerate_partitions(j).unwrap();
        assert_eq!(parts.len(), p);
        assert!(parts.iter().all(|k| k.weight() == j));
        assert_eq!(PartitionIter::new(j).count(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lognum_sum_matches_floats(xs in prop::collection::vec(-1e6f64..1e6, 1..20)) {
        let terms: Vec<LogNum> = xs.iter().map(|&x| LogNum::from_f64(x)).collect();
        let got = LogNum::sum(&terms).to_f64();
        let expect: f64 = xs.iter().sum();
        let scale: f64 = xs.iter().map(|x| x.abs()).sum();
        prop_assert!((got - expect).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn numeric_conjugate_matches_closed_form(d in 1.1f64..4.0, ls in -1.0f64..2.0) {
        let s = 10f64.powf(ls) / d * 1.001;
        let closed = gevrey(d).eval(s).unwrap();
        let numeric = ConjugateEvaluator::numeric(WeightFunction::gevrey(d).into_arc()).eval(s).unwrap();
        prop_assert!((closed - numeric).abs() <= 1e-9 * closed.abs().max(1.0));
    }

    #[test]
    fn conjugate_is_convex(d in 1.1f64..4.0, a in 0.0f64..50.0, b in 0.0f64..50.0) {
        let c = gevrey(d);
        let mid = c.eval(0.5 * (a + b)).unwrap();
        let avg = 0.5 * (c.eval(a).unwrap() + c.eval(b).unwrap());
        prop_assert!(mid <= avg + 1e-9 * avg.abs().max(1.0));
    }

    #[test]
    fn shift_bound_holds(lambda in 0.2f64..6.0, n in 1u32..=3) {
        let r = conjugate_shift_bound(&gevrey(2.0), lambda, n, 2, 200, &default_test_points()).unwrap();
        prop_assert!(r.verdict.all_hold);
        prop_assert!(r.reverify());
    }

    #[test]
    fn stationary_point_is_the_maximizer(j in 1u64..500, lambda in 1u32..6, k in 0.5f64..3.0) {
        let lam = lambda as f64;
        let (_, v) = gevrey_stationary_point(2.0, k, lam, j);
        let numeric = ConjugateEvaluator::numeric(WeightFunction::gevrey(2.0).into_arc());
        let rhs = lam * numeric.eval(k * j as f64 / lam).unwrap();
        prop_assert!((v - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
    }

    #[test]
    fn nuclear_partial_sums_are_capped(d in 1.2f64..4.0, m in 1u32..4) {
        let w = WeightFunction::gevrey(d);
        let l = dilation_constant(&w, &default_test_points(), 100).witness.unwrap();
        let r = nuclearity_sum(&gevrey(d), m, l, 60, &default_test_points()).unwrap();
        prop_assert!(r.verdict.all_hold);
        let sums = r.column("log_partial_sum").unwrap();
        prop_assert!(sums.windows(2).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn associated_weight_is_the_pointwise_sup(x in 0.0f64..14.0) {
        let seq = WeightSequence::gevrey(2.0);
        let (v, p) = associated_weight(&seq, x.exp(), 10_000).unwrap();
        let brute = (0..=10_000)
            .map(|p| p as f64 * x - seq.log_m(p).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((v - brute).abs() <= 1e-9 * brute.abs().max(1.0));
        prop_assert!((p as f64 * x - seq.log_m(p).unwrap() - v).abs() <= 1e-9 * v.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn seminorm_witness_reproduces_value(lambda in 0.5f64..4.0, jk in 2usize..10) {
        let c = gevrey(2.0);
        let g = Grid::sym(5.0, 0.125);
        let r = seminorm_p_lambda(&ModelFunction::Gaussian, lambda, &c, &g, jk, jk).unwrap();
        prop_assert_eq!(reevaluate_witness(&r, &ModelFunction::Gaussian, &c).unwrap(), r.value);
        prop_assert!(r.enlarged_value.log_abs() >= r.value.log_abs());
    }
}
