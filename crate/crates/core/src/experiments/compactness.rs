use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::fdb::{faa_di_bruno, single_jet_compose, Jet};
use crate::functions::ModelFunction;
use crate::lognum::LogNum;
use crate::par;
use crate::report::{ChainReport, ChainRow, Check};
use crate::weights::ConjugateEvaluator;

/// Rows `n = 1..=nmax`: outer jet `b_n` with `b_n(n) = e^{pφ*(n/p)}` at `ψ(x_0)`,
/// `(f_n∘ψ)^{(n)}(x_0)` by full Faà di Bruno against the single-order shortcut,
/// and the growth `n log|ψ'(x_0)|` left after dividing by `b_n(n)`.
pub fn compactness_blowup(
    psi: &ModelFunction,
    x0: f64,
    p: u32,
    conj: &ConjugateEvaluator,
    nmax: usize,
    threshold: f64,
) -> Result<ChainReport, Error> {
    if p == 0 {
        return Err(Error::Precondition("p >= 1 is required".into()));
    }
    let x = BigRational::from_float(x0)
        .ok_or_else(|| Error::Precondition(format!("x0 = {x0} is not finite")))?;
    let jet = psi.exact_jet(&x, nmax.max(1))?;
    let d1 = jet.values[1].clone();
    if d1.abs() <= BigRational::one() {
        return Err(Error::Precondition(format!(
            "|psi'(x0)| = {d1} <= 1; use the rescaled sigma(x) = psi(a x) with a > 1/|psi'(x0)|"
        )));
    }
    let log_d1 = LogNum::from_ratio(&d1).log_abs();
    let rows = par::map_range(nmax, |i| -> Result<ChainRow, Error> {
        let n = i + 1;
        let mut values = vec![BigRational::zero(); n + 1];
        values[n] = BigRational::one();
        let outer = Jet::new(jet.values[0].clone(), values);
        let full = faa_di_bruno(&outer, &jet, n)?;
        let short = single_jet_compose(&outer, &jet, n)?;
        let log_full = LogNum::from_ratio(&full).log_abs();
        let log_short = LogNum::from_ratio(&short).log_abs();
        let log_b = conj.scaled(p as f64, n as f64)?;
        Ok(ChainRow {
            index: n as u64,
            values: vec![log_b, log_b + log_full, log_full],
            checks: vec![
                Check::exact("faa_shortcut", log_full, log_short, full == short),
                Check::close("growth", log_full, n as f64 * log_d1, 1e-12),
            ],
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut report = ChainReport::new("compactness", &["log_b", "log_composed", "log_growth"])
        .param("psi", psi.to_string())
        .param("x0", x0)
        .param("p", p as i64)
        .param("weight", conj.weight().label())
        .param("nmax", nmax)
        .param("threshold", threshold);
    report.finish_rows(rows);
    report.mark_divergence("log_growth", threshold.ln());
    Ok(report)
}
