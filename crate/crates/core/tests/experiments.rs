use compwb_core::experiments::{
    bounded_derivative_chain, composed_seminorm_bound, negative_chain, sufficient_condition_check,
};
use compwb_core::functions::{estimate_growth_exponent, ModelFunction};
use compwb_core::sequences::{check_sequence_conditions, doubling_from_sequence, WeightSequence};
use compwb_core::weights::{ConjugateEvaluator, WeightFunction};
use compwb_core::Grid;
use num_rational::BigRational;

#[test]
fn negative_chain_full_range() {
    let r = negative_chain(2.0, 1.0, 3.5, 400, 1e6).unwrap();
    assert_eq!(r.rows.len(), 400);
    assert!(r.verdict.all_hold);
    assert_eq!(r.verdict.diverged, Some(true));
    assert!(r.reverify());
    let idx: Vec<u64> = r.rows.iter().map(|r| r.index).collect();
    assert!(idx.windows(2).all(|w| w[1] == w[0] + 1));
}

#[test]
fn bounded_chain_brackets() {
    let cube = ModelFunction::polynomial(&[0, 0, 0, 1]);
    let r = bounded_derivative_chain(2.0, &cube, 12, 1e6).unwrap();
    assert!(r.verdict.all_hold && r.verdict.diverged == Some(true));
}

#[test]
fn composed_seminorm_is_stable() {
    let sigma = ConjugateEvaluator::auto(WeightFunction::gevrey(3.0).into_arc());
    let sq = ModelFunction::polynomial(&[0, 0, 1]);
    for m in [1.0, 2.0, 4.0] {
        let small = composed_seminorm_bound(
            &ModelFunction::Gaussian,
            &sq,
            &sigma,
            m,
            &Grid::sym(5.0, 0.0625),
            24,
            24,
            Some(24),
        )
        .unwrap();
        let big = composed_seminorm_bound(
            &ModelFunction::Gaussian,
            &sq,
            &sigma,
            m,
            &Grid::sym(6.0, 0.0625),
            30,
            30,
            Some(30),
        )
        .unwrap();
        assert!(small.stable, "m = {m}");
        assert!(big.value.rel_diff(&small.value) < 1e-6, "m = {m}");
    }
}

#[test]
fn sufficient_check_doubles_jmax() {
    let sq = ModelFunction::polynomial(&[0, 0, 1]);
    let g = Grid::sym(6.0, 0.125);
    let w = WeightFunction::gevrey(2.0);
    let a = sufficient_condition_check(&sq, &w, 1.5, &[1, 2, 4], &g, 15).unwrap();
    let b = sufficient_condition_check(&sq, &w, 1.5, &[1, 2, 4], &g, 30).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!((x.log_c - y.log_c).abs() < 1e-12);
    }
}

#[test]
fn growth_exponents_of_gaussians() {
    let zero = BigRational::from_integer(0.into());
    let g2 = ModelFunction::Gaussian
        .exact_jet(&zero, 80)
        .unwrap()
        .to_lognum();
    let s2 = estimate_growth_exponent(&g2, 1, 80).unwrap().s_hat;
    assert!((0.45..=0.55).contains(&s2), "{s2}");
    let quartic = ModelFunction::compose(
        ModelFunction::Gaussian,
        ModelFunction::polynomial(&[0, 0, 1]),
    );
    let g4 = quartic.exact_jet(&zero, 80).unwrap().to_lognum();
    let s4 = estimate_growth_exponent(&g4, 1, 80).unwrap().s_hat;
    assert!((0.70..=0.80).contains(&s4), "{s4}");
}

#[test]
fn gevrey_sequence_side() {
    let m = WeightSequence::gevrey(2.0);
    let r = check_sequence_conditions(&m, 200, 4000).unwrap();
    let pi2 = std::f64::consts::PI.powi(2) / 6.0;
    assert!((r.gamma1.sup - pi2).abs() < 1e-4);
    assert!((r.petzsche.liminf(2).unwrap() - 4.0).abs() < 1e-9);
    assert_eq!(doubling_from_sequence(&m, None).h, Some(4));
}
