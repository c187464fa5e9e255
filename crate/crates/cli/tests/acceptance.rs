//! Acceptance gate: one PASS/FAIL line per criterion; exits nonzero on any FAIL.

use std::f64::consts::{E, PI};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use compwb_core::experiments::{
    bounded_derivative_chain, composed_seminorm_bound, necessary_growth, negative_chain,
    nuclearity_sum,
};
use compwb_core::fdb::{faa_di_bruno, factorial, identity_lah, identity_two_power, Jet};
use compwb_core::functions::{estimate_growth_exponent, ModelFunction};
use compwb_core::report::{ChainReport, Param};
use compwb_core::sequences::{check_sequence_conditions, doubling_from_sequence, WeightSequence};
use compwb_core::weights::{
    conjugate_shift_bound, default_test_points, dilation_constant, ConjugateEvaluator,
    SearchBounds, WeightFunction,
};
use compwb_core::Grid;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn real(r: &ChainReport, key: &str) -> f64 {
    match r.params.get(key) {
        Some(Param::Real(v)) => *v,
        Some(Param::Int(v)) => *v as f64,
        other => panic!("param {key}: {other:?}"),
    }
}

fn failing_checks(r: &ChainReport, names: &[&str]) -> usize {
    r.rows
        .iter()
        .flat_map(|row| &row.checks)
        .filter(|c| names.contains(&c.name.as_str()) && !c.holds)
        .count()
}

fn gevrey(d: f64) -> ConjugateEvaluator {
    ConjugateEvaluator::auto(WeightFunction::gevrey(d).into_arc())
}

const FDB_ORDER: usize = 12;

fn rat_fact(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(factorial(n)))
}

/// Taylor coefficients of `H(P(t) - P(0))` through `FDB_ORDER`, by Horner.
fn poly_compose(h: &[BigRational], p: &[BigRational]) -> Vec<BigRational> {
    let mut shift = p.to_vec();
    shift[0] = BigRational::zero();
    let mut acc = vec![BigRational::zero(); FDB_ORDER + 1];
    for c in h.iter().rev() {
        let mut next = vec![BigRational::zero(); FDB_ORDER + 1];
        for (i, a) in acc.iter().enumerate() {
            for (k, b) in shift.iter().enumerate() {
                if i + k <= FDB_ORDER {
                    next[i + k] += a * b;
                }
            }
        }
        next[0] += c;
        acc = next;
    }
    acc
}

fn jet_of(c: &[BigRational], base: BigRational) -> Jet<BigRational> {
    let values = (0..=FDB_ORDER)
        .map(|i| {
            c.get(i)
                .map(|ci| ci * rat_fact(i))
                .unwrap_or_else(BigRational::zero)
        })
        .collect();
    Jet::new(base, values)
}

fn fdb_oracle() -> Outcome {
    let coeffs = || {
        prop::collection::vec((-30i64..=30, 1i64..=12), 1..=6).prop_map(|v| {
            v.into_iter()
                .map(|(n, d)| BigRational::new(n.into(), d.into()))
                .collect::<Vec<_>>()
        })
    };
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: 200,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let counter = std::cell::Cell::new(0usize);
    runner
        .run(&(coeffs(), coeffs()), |(h, p)| {
            counter.set(counter.get() + 1);
            let expect = poly_compose(&h, &p);
            let hj = jet_of(&h, p[0].clone());
            let pj = jet_of(&p, BigRational::zero());
            for (j, e) in expect.iter().enumerate() {
                let got =
                    faa_di_bruno(&hj, &pj, j).map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert_eq!(got, e * rat_fact(j), "order {}", j);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!(
        "{} pairs, orders 0..={FDB_ORDER}, exact",
        counter.get()
    ))
}

fn identities() -> Outcome {
    for j in 1..=25 {
        let a = identity_two_power(j).map_err(|e| e.to_string())?;
        let b = identity_lah(j).map_err(|e| e.to_string())?;
        if !a.holds() || !b.holds() {
            return Err(format!("j = {j}"));
        }
        if a.closed_form != num_bigint::BigUint::from(1u8) << (j - 1) {
            return Err(format!("two-power closed form at j = {j}"));
        }
    }
    Ok("50 rows exact".into())
}

fn conjugate_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [1.5, 2.0, 3.0] {
        let numeric = ConjugateEvaluator::numeric(WeightFunction::gevrey(d).into_arc());
        let auto = gevrey(d);
        let (lo, hi) = ((1.0 / d).ln(), 100f64.ln());
        for i in 0..200 {
            let s = (lo + (hi - lo) * i as f64 / 199.0).exp();
            let closed = s * d * ((s * d).ln() - 1.0);
            let (v, _) = numeric.numeric_sup(s).map_err(|e| e.to_string())?;
            let err = (v - closed).abs() / closed.abs().max(1.0);
            worst = worst.max(err);
            if err > 1e-9 {
                return Err(format!("d = {d}, s = {s}: {v} vs {closed}"));
            }
        }
        for i in 0..50 {
            let s = (1.0 / d) * (i as f64 / 50.0);
            for c in [&numeric, &auto] {
                let v = c.eval(s).map_err(|e| e.to_string())?;
                if v != -1.0 {
                    return Err(format!("plateau d = {d}, s = {s}: {v}"));
                }
            }
        }
    }
    Ok(format!("worst relative error {worst:.2e}; plateau exact"))
}

fn shift_bound() -> Outcome {
    let points = default_test_points();
    let logpow = WeightFunction::logpow(2.0);
    let l_logpow = dilation_constant(&logpow, &points, SearchBounds::default().l)
        .witness
        .ok_or("no dilation constant for logpow")?;
    let l_gevrey = dilation_constant(&WeightFunction::gevrey(2.0), &points, 100)
        .witness
        .ok_or("no dilation constant for gevrey")?;
    if l_gevrey != 2 {
        return Err(format!("gevrey d=2 gives L = {l_gevrey}"));
    }
    let cases = [
        (gevrey(2.0), 2),
        (ConjugateEvaluator::auto(logpow.into_arc()), l_logpow),
    ];
    let mut rows = 0;
    let mut violations = 0;
    for (c, l) in &cases {
        for lambda in [1.0, 2.0, 5.0] {
            for n in 1..=3 {
                let r = conjugate_shift_bound(c, lambda, n, *l, 500, &points)
                    .map_err(|e| e.to_string())?;
                rows += r.rows.len();
                violations += r
                    .rows
                    .iter()
                    .filter(|row| row.values[0] > row.values[1] + 1e-9)
                    .count();
            }
        }
    }
    if violations > 0 {
        return Err(format!("{violations} violations"));
    }
    Ok(format!(
        "{rows} rows, logpow L = {l_logpow}, zero violations"
    ))
}

fn negative() -> Outcome {
    let r = negative_chain(2.0, 1.0, 3.5, 400, 1e6).map_err(|e| e.to_string())?;
    if r.rows.len() != 400 {
        return Err(format!("{} rows", r.rows.len()));
    }
    let lhs = r
        .column("stationarity_lhs")
        .ok_or("no stationarity column")?;
    let rhs = r
        .column("stationarity_rhs")
        .ok_or("no stationarity column")?;
    let worst = lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max);
    if worst > 1e-9 {
        return Err(format!("stationarity relative error {worst:e}"));
    }
    let bad = failing_checks(&r, &["convexity", "block_index", "block", "lower_bound"]);
    if bad > 0 {
        return Err(format!("{bad} convexity/block failures"));
    }
    let crossing = r
        .column("log_lower")
        .ok_or("no lower-bound column")?
        .iter()
        .position(|&v| v > 1e6f64.ln())
        .ok_or("lower bound never crosses 1e6")?;
    if r.verdict.first_crossing_index != Some(r.rows[crossing].index) {
        return Err("reported crossing disagrees with the column".into());
    }
    Ok(format!(
        "stationarity worst {worst:.1e}; crossing at j = {}",
        r.rows[crossing].index
    ))
}

fn bounded() -> Outcome {
    let cube = ModelFunction::polynomial(&[0, 0, 0, 1]);
    let r = bounded_derivative_chain(2.0, &cube, 12, 1e6).map_err(|e| e.to_string())?;
    let bad = failing_checks(&r, &["bracket_lower", "bracket_upper", "derivative"]);
    if bad > 0 || r.rows.len() != 12 {
        return Err(format!("{bad} bracket failures over {} rows", r.rows.len()));
    }
    let log_x = r.column("log_x").ok_or("no log_x")?;
    let js = r.column("j").ok_or("no j")?;
    for (i, (lx, j)) in log_x.iter().zip(&js).enumerate() {
        // x_{m,j} = (d j / m)^d, so j(m) = floor((m/d) x^{1/d}).
        let m = (i + 1) as f64;
        let expect = ((m / 2.0) * (lx / 2.0).exp()).floor();
        if (expect - j).abs() > 0.0 {
            return Err(format!("m = {m}: j = {j}, oracle {expect}"));
        }
    }
    let m = r
        .column("log_term")
        .ok_or("no log_term")?
        .iter()
        .position(|&t| t > 1e6f64.ln())
        .ok_or("term never exceeds 1e6")?;
    Ok(format!("brackets hold; term exceeds 1e6 at m = {}", m + 1))
}

fn sufficient() -> Outcome {
    let sigma = gevrey(3.0);
    let sq = ModelFunction::polynomial(&[0, 0, 1]);
    let mut worst: f64 = 0.0;
    for m in [1.0, 2.0, 4.0] {
        let run = |radius: f64, cap: usize| {
            composed_seminorm_bound(
                &ModelFunction::Gaussian,
                &sq,
                &sigma,
                m,
                &Grid::sym(radius, 0.0625),
                cap,
                cap,
                Some(cap),
            )
            .map_err(|e| e.to_string())
        };
        let small = run(5.0, 24)?;
        let big = run(6.0, 30)?;
        let change = big.value.rel_diff(&small.value);
        worst = worst.max(change);
        if !small.stable || change >= 1e-6 {
            return Err(format!(
                "m = {m}: change {change:e}, stable {}",
                small.stable
            ));
        }
    }
    Ok(format!("worst relative change {worst:.1e}"))
}

fn nuclear() -> Outcome {
    let r = nuclearity_sum(&gevrey(2.0), 1, 2, 50, &default_test_points())
        .map_err(|e| e.to_string())?;
    for (i, v) in r.column("log_ratio").ok_or("no ratios")?.iter().enumerate() {
        let j = (i + 1) as f64;
        let rel = (v + j * 4f64.ln()).exp_m1().abs();
        if rel > 1e-12 {
            return Err(format!("j = {j}: relative error {rel:e}"));
        }
    }
    let sum = real(&r, "partial_sum");
    let bound = real(&r, "bound");
    let cap = E * E / (E - 1.0);
    if (sum - 1.0 / 3.0).abs() > 1e-10 || (bound - cap).abs() > 1e-12 * cap || sum > bound {
        return Err(format!("partial sum {sum}, bound {bound}"));
    }
    Ok(format!("partial sum {sum:.12}; bound {bound:.6}"))
}

fn necessary() -> Outcome {
    let w = WeightFunction::gevrey(2.0);
    let r = necessary_growth(
        &ModelFunction::polynomial(&[0, 0, 1]),
        &w,
        &w,
        &Grid::log(1e-3, 1e3, 4001),
    )
    .map_err(|e| e.to_string())?;
    if (r.c - 0.5).abs() > 1e-6 || (r.argmax_x.abs() - 1.0).abs() > 1e-3 {
        return Err(format!("C = {}, argmax {}", r.c, r.argmax_x));
    }
    Ok(format!("C = {:.9}, argmax |x| = {}", r.c, r.argmax_x.abs()))
}

fn sequence() -> Outcome {
    let m = WeightSequence::gevrey(2.0);
    let r = check_sequence_conditions(&m, 200, 4000).map_err(|e| e.to_string())?;
    let target = PI * PI / 6.0;
    if (r.gamma1.sup - target).abs() > 1e-4 {
        return Err(format!("gamma1 sup {}", r.gamma1.sup));
    }
    let log_liminf = r
        .petzsche
        .per_q
        .iter()
        .find(|(q, _)| *q == 2)
        .map(|(_, l)| *l)
        .ok_or("no Q = 2 row")?;
    if (log_liminf - 4f64.ln()).abs() > 1e-12 {
        return Err(format!("log liminf {log_liminf}"));
    }
    let h = doubling_from_sequence(&m, None).h;
    if h != Some(4) {
        return Err(format!("H = {h:?}"));
    }
    Ok(format!("sup {:.6}; log liminf = ln 4; H = 4", r.gamma1.sup))
}

fn index() -> Outcome {
    let zero = BigRational::zero();
    let s = |f: &ModelFunction| -> Result<f64, String> {
        let jet = f.exact_jet(&zero, 80).map_err(|e| e.to_string())?;
        Ok(estimate_growth_exponent(&jet.to_lognum(), 1, 80)
            .map_err(|e| e.to_string())?
            .s_hat)
    };
    let s2 = s(&ModelFunction::Gaussian)?;
    let quartic = ModelFunction::compose(
        ModelFunction::Gaussian,
        ModelFunction::polynomial(&[0, 0, 1]),
    );
    // exp(-x^4) = Σ (-1)^k x^{4k} / k!, so f^{(4k)}(0) = (-1)^k (4k)! / k!.
    let jet = quartic.exact_jet(&zero, 80).map_err(|e| e.to_string())?;
    for k in 0..=20usize {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let expect = BigRational::from_integer(BigInt::from(sign) * BigInt::from(factorial(4 * k)))
            / rat_fact(k);
        if jet.values[4 * k] != expect {
            return Err(format!("exp(-x^4) jet differs at order {}", 4 * k));
        }
    }
    let s4 = s(&quartic)?;
    if !(0.45..=0.55).contains(&s2) || !(0.70..=0.80).contains(&s4) {
        return Err(format!("s_hat {s2} and {s4}"));
    }
    Ok(format!("exp(-x^2): {s2:.4}; exp(-x^4): {s4:.4}"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_compwb");
    let dir = tempfile_dir()?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let out = dir.join(format!("{name}.csv"));
        let status = Command::new(bin)
            .args([
                "experiment",
                "negative",
                "--d",
                "2",
                "--k",
                "1",
                "--dprime",
                "3.5",
            ])
            .args(["--jmax", "400", "--out"])
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        if status.code() != Some(0) {
            return Err(format!("exit status {status}"));
        }
        if !out.exists() {
            return Err("CSV missing".into());
        }
        std::fs::read(out.with_extension("json")).map_err(|e| e.to_string())
    };
    let a = run("first")?;
    let b = run("second")?;
    let _ = std::fs::remove_dir_all(&dir);
    if a != b {
        return Err("JSON summaries differ".into());
    }
    Ok(format!("{} identical bytes", a.len()))
}

fn tempfile_dir() -> Result<std::path::PathBuf, String> {
    let dir =
        Path::new(env!("CARGO_TARGET_TMPDIR")).join(format!("acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    Ok(dir)
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "FdB oracle equivalence",
            limit: secs(10),
            run: fdb_oracle,
        },
        Criterion {
            id: 2,
            name: "multinomial identities",
            limit: secs(5),
            run: identities,
        },
        Criterion {
            id: 3,
            name: "conjugate closed form",
            limit: secs(5),
            run: conjugate_closed_form,
        },
        Criterion {
            id: 4,
            name: "conjugate shift inequality",
            limit: secs(30),
            run: shift_bound,
        },
        Criterion {
            id: 5,
            name: "negative chain",
            limit: secs(60),
            run: negative,
        },
        Criterion {
            id: 6,
            name: "bounded-derivative chain",
            limit: secs(10),
            run: bounded,
        },
        Criterion {
            id: 7,
            name: "composed seminorm stability",
            limit: secs(120),
            run: sufficient,
        },
        Criterion {
            id: 8,
            name: "nuclearity sums",
            limit: secs(1),
            run: nuclear,
        },
        Criterion {
            id: 9,
            name: "necessary-growth constant",
            limit: secs(1),
            run: necessary,
        },
        Criterion {
            id: 10,
            name: "sequence side",
            limit: secs(5),
            run: sequence,
        },
        Criterion {
            id: 11,
            name: "index estimator",
            limit: secs(5),
            run: index,
        },
        Criterion {
            id: 12,
            name: "CLI determinism",
            limit: None,
            run: determinism,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if took > limit => Err(format!(
                "took {:.2} s, limit {} s",
                took.as_secs_f64(),
                limit.as_secs()
            )),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {tag}  {}: {detail} [{:.2} s]",
            c.id,
            c.name,
            took.as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
