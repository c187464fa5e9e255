//! Faà di Bruno against truncated polynomial composition.

use compwb_core::fdb::{
    compose_jet, faa_di_bruno, factorial, identity_lah, identity_two_power, Jet,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

const ORDER: usize = 12;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn fact(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(factorial(n)))
}

/// Product of two coefficient vectors truncated at `ORDER`.
fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); ORDER + 1];
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            if i + k <= ORDER {
                out[i + k] += x * y;
            }
        }
    }
    out
}

/// Taylor coefficients of `H(P(t) - P(0))` up to `ORDER`, by Horner.
fn compose_poly(h: &[BigRational], p: &[BigRational]) -> Vec<BigRational> {
    let mut shifted = p.to_vec();
    shifted[0] = BigRational::zero();
    shifted.resize(ORDER + 1, BigRational::zero());
    let mut acc = vec![BigRational::zero(); ORDER + 1];
    for c in h.iter().rev() {
        acc = poly_mul(&acc, &shifted);
        acc[0] += c;
    }
    acc
}

/// Jet of `Σ c_i t^i` at `t = 0`, padded to `ORDER`.
fn jet_of(c: &[BigRational]) -> Jet<BigRational> {
    let values = (0..=ORDER)
        .map(|i| {
            c.get(i)
                .map(|ci| ci * fact(i))
                .unwrap_or_else(BigRational::zero)
        })
        .collect();
    Jet::new(c[0].clone(), values)
}

fn coeffs() -> impl Strategy<Value = Vec<BigRational>> {
    (1usize..=6).prop_flat_map(|len| {
        prop::collection::vec((-20i64..=20, 1i64..=9), len)
            .prop_map(|v| v.into_iter().map(|(n, d)| rat(n, d)).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn faa_di_bruno_matches_polynomial_composition(h in coeffs(), p in coeffs()) {
        let expect = compose_poly(&h, &p);
        let mut hj = jet_of(&h);
        hj.base = p[0].clone();
        let pj = jet_of(&p);
        for j in 0..=ORDER {
            let got = faa_di_bruno(&hj, &pj, j).unwrap();
            prop_assert_eq!(got, &expect[j] * fact(j));
        }
        let all = compose_jet(&hj, &pj, ORDER).unwrap();
        for j in 0..=ORDER {
            prop_assert_eq!(&all.values[j], &(&expect[j] * fact(j)));
        }
    }
}

#[test]
fn geometric_self_composition() {
    // h(x) = x/(1-x) has h∘h(x) = x/(1-2x), so (h∘h)^{(j)}(0) = 2^{j-1} j!.
    let h: Vec<BigRational> = (0..=ORDER)
        .map(|i| {
            if i == 0 {
                BigRational::zero()
            } else {
                BigRational::one()
            }
        })
        .collect();
    let hj = jet_of(&h);
    for j in 1..=ORDER {
        let got = faa_di_bruno(&hj, &hj, j).unwrap();
        assert_eq!(
            got,
            fact(j) * BigRational::from_integer(BigInt::from(1u64 << (j - 1)))
        );
    }
}

#[test]
fn identities_hold_to_twenty_five() {
    for j in 1..=25 {
        assert!(identity_two_power(j).unwrap().holds(), "two-power j = {j}");
        assert!(identity_lah(j).unwrap().holds(), "Lah j = {j}");
    }
}
