use serde::Serialize;

use super::tol_for;
use crate::error::Error;
use crate::par;
use crate::report::{ChainReport, ChainRow, Check, Param};
use crate::weights::{default_test_points, dilation_constant, ConjugateEvaluator, WeightFunction};

const MAX_THRESHOLD: u64 = 1 << 62;

/// Blocks `I_m = (j_{m-1}, j_m]` with `j_n = max(2^n, s_{n+1})`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockSchedule {
    /// Dilation constant of the rescaled weight.
    pub l: u64,
    /// `s_1, s_2, ...`.
    pub thresholds: Vec<u64>,
    /// `j_0, j_1, ...`.
    pub ends: Vec<u64>,
}

impl BlockSchedule {
    /// Block `m >= 1` containing `j > j_0`.
    pub fn block_of(&self, j: u64) -> Option<usize> {
        (1..self.ends.len()).find(|&m| self.ends[m - 1] < j && j <= self.ends[m])
    }
}

/// `(x_j, k j log x_j - λ ω(x_j))` for `ω = t^{1/d}`, where
/// `x_j = (k j d / λ)^d` is the stationary point.
pub fn gevrey_stationary_point(d: f64, k: f64, lambda: f64, j: u64) -> (f64, f64) {
    let r = k * j as f64 * d / lambda;
    (r.powf(d), k * j as f64 * d * r.ln() - lambda * r)
}

/// Smallest `s` with `φ_σ*(s') <= 2Ln φ_ω̃*(s'/(2Ln))` from `s` on. Found by
/// exponential search and bisection, then re-checked up to `64 s`.
fn block_threshold(
    sigma: &ConjugateEvaluator,
    tilde: &ConjugateEvaluator,
    l: u64,
    n: u64,
) -> Result<u64, Error> {
    let scale = (2 * l * n) as f64;
    let holds = |s: u64| -> Result<bool, Error> {
        let s = s as f64;
        Ok(sigma.eval(s)? <= tilde.scaled(scale, s)?)
    };
    let mut hi = 1u64;
    while !holds(hi)? {
        if hi >= MAX_THRESHOLD {
            return Err(Error::SearchExhausted(format!(
                "no block threshold s_{n} below {MAX_THRESHOLD}"
            )));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    if hi > 1 {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if holds(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    for i in 1..=48 {
        let s = (hi as f64 * 2f64.powf(i as f64 / 8.0)).round() as u64;
        if !holds(s)? {
            return Err(Error::Regime(format!(
                "block condition for n = {n} holds at s = {hi} but fails again at s = {s}"
            )));
        }
    }
    Ok(hi)
}

/// Block schedule for `ω = t^{1/d}`, `σ = t^{1/d'}` and `ω̃(t) = ω(t^{1/(k+1)})`,
/// extended until `j_m >= reach`.
pub fn block_schedule(d: f64, k: f64, d_prime: f64, reach: u64) -> Result<BlockSchedule, Error> {
    check_regime(d, k, d_prime)?;
    let tilde_w = WeightFunction::gevrey(d).rescaled(k + 1.0);
    let l = dilation_constant(&tilde_w, &default_test_points(), 1000)
        .witness
        .ok_or_else(|| {
            Error::Precondition("no dilation constant L <= 1000 for the rescaled weight".into())
        })?;
    let tilde = ConjugateEvaluator::auto(tilde_w.into_arc());
    let sigma = ConjugateEvaluator::auto(WeightFunction::gevrey(d_prime).into_arc());
    let mut thresholds = vec![block_threshold(&sigma, &tilde, l, 1)?];
    let mut ends = vec![thresholds[0].max(1)];
    let mut n = 1u32;
    while *ends.last().unwrap() < reach {
        thresholds.push(block_threshold(&sigma, &tilde, l, n as u64 + 1)?);
        ends.push(thresholds[n as usize].max(1u64 << n));
        n += 1;
    }
    Ok(BlockSchedule {
        l,
        thresholds,
        ends,
    })
}

fn check_regime(d: f64, k: f64, d_prime: f64) -> Result<(), Error> {
    if !(d >= 1.0 && k > 0.0) {
        return Err(Error::Precondition("d >= 1 and k > 0 are required".into()));
    }
    if !(d <= d_prime && d_prime < (k + 1.0) * d) {
        return Err(Error::Regime(format!(
            "d' = {d_prime} must satisfy d <= d' < (k+1) d = {}; otherwise omega(t^(1/(k+1))) = o(sigma(t)) fails",
            (k + 1.0) * d
        )));
    }
    Ok(())
}

/// Chain rows for `j_0 < j <= j_0 + jmax`, Gevrey weights `ω = t^{1/d}`,
/// `σ = t^{1/d'}`. Rows before `j_0` belong to no block and are not emitted.
pub fn negative_chain(
    d: f64,
    k: f64,
    d_prime: f64,
    jmax: u64,
    threshold: f64,
) -> Result<ChainReport, Error> {
    check_regime(d, k, d_prime)?;
    let probe = block_schedule(d, k, d_prime, 1)?;
    let j0 = probe.ends[0];
    let sched = block_schedule(d, k, d_prime, j0 + jmax)?;
    let l = sched.l as f64;
    let omega = ConjugateEvaluator::auto(WeightFunction::gevrey(d).into_arc());
    let numeric = ConjugateEvaluator::numeric(WeightFunction::gevrey(d).into_arc());
    let tilde = ConjugateEvaluator::auto(WeightFunction::gevrey(d).rescaled(k + 1.0).into_arc());
    let sigma = ConjugateEvaluator::auto(WeightFunction::gevrey(d_prime).into_arc());

    let rows = par::map_range(jmax as usize, |i| -> Result<ChainRow, Error> {
        let j = j0 + 1 + i as u64;
        let jf = j as f64;
        let m = sched.block_of(j).expect("schedule reaches every row");
        let lam = m as f64;
        let (x, stat_lhs) = gevrey_stationary_point(d, k, lam, j);
        let stat_rhs = lam * numeric.numeric_sup(k * jf / lam)?.0;
        let log_a = omega.scaled(lam, jf)?;
        let growth = log_a + stat_lhs;
        let convexity = omega.scaled(2.0 * lam, (k + 1.0) * jf)?;
        let tilde_val = tilde.scaled(2.0 * lam, jf)?;
        let tilde_wide = tilde.scaled(2.0 * l * lam, jf)?;
        let shifted = tilde_wide + jf - 2.0 * lam * l;
        let sigma_conj = sigma.eval(jf)?;
        let lower = jf - 2.0 * lam * l;
        let tol = tol_for(growth);
        Ok(ChainRow {
            index: j,
            values: vec![
                lam,
                x.ln(),
                stat_lhs,
                stat_rhs,
                log_a,
                growth,
                convexity,
                tilde_val,
                shifted,
                sigma_conj,
                lower,
            ],
            checks: vec![
                Check::close("stationarity", stat_lhs, stat_rhs, crate::report::CHAIN_TOL),
                Check::le("convexity", convexity, growth, tol),
                Check::close("rescaled", tilde_val, convexity, 1e-12),
                Check::le("shift", shifted, tilde_val, tol),
                Check::le("block_index", sched.thresholds[m - 1] as f64 + 1.0, jf, 0.0),
                Check::le("block", sigma_conj, tilde_wide, tol),
                Check::le("lower_bound", lower, growth - sigma_conj, tol),
            ],
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut report = ChainReport::new(
        "negative",
        &[
            "lambda",
            "log_x",
            "stationarity_lhs",
            "stationarity_rhs",
            "log_a",
            "log_growth",
            "convexity",
            "tilde",
            "shifted",
            "sigma_conj",
            "log_lower",
        ],
    )
    .param("d", d)
    .param("k", k)
    .param("d_prime", d_prime)
    .param("jmax", jmax)
    .param("threshold", threshold)
    .param("L_tilde", sched.l)
    .param("j0", j0)
    .param(
        "block_ends",
        Param::List(sched.ends.iter().map(|&e| e as f64).collect()),
    );
    report.finish_rows(rows);
    report.mark_divergence("log_lower", threshold.ln());
    report
        .notes
        .push(format!("rows start after the first block end j_0 = {j0}"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_point_example() {
        let (x, v) = gevrey_stationary_point(2.0, 1.0, 1.0, 3);
        assert!((x - 36.0).abs() < 1e-12);
        assert!((v - (6.0 * 6f64.ln() - 6.0)).abs() < 1e-12);
        let c = ConjugateEvaluator::numeric(WeightFunction::gevrey(2.0).into_arc());
        assert!((c.eval(3.0).unwrap() - v).abs() < 1e-9 * v);
    }

    #[test]
    fn regime_boundary() {
        assert!(matches!(
            negative_chain(2.0, 1.0, 4.0, 10, 1e6),
            Err(Error::Regime(_))
        ));
        assert!(matches!(
            negative_chain(2.0, 1.0, 1.5, 10, 1e6),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn first_threshold_matches_closed_form() {
        // 4 log(s/n) - 4 >= 3.5 log(3.5 s) - 3.5 with L = 2, so s_1 = ceil(e 3.5^7).
        let sched = block_schedule(2.0, 1.0, 3.5, 1).unwrap();
        assert_eq!(sched.l, 2);
        let expected = (1.0 + 7.0 * 3.5f64.ln()).exp().ceil() as u64;
        assert!(
            sched.thresholds[0].abs_diff(expected) <= 1,
            "{} vs {expected}",
            sched.thresholds[0]
        );
    }

    #[test]
    fn chain_holds_and_diverges() {
        let r = negative_chain(2.0, 1.0, 3.5, 60, 1e6).unwrap();
        assert_eq!(r.rows.len(), 60);
        assert!(
            r.verdict.all_hold,
            "{:?}",
            r.rows.iter().find(|r| !r.holds())
        );
        assert_eq!(r.verdict.diverged, Some(true));
        assert!(r.reverify());
    }
}
