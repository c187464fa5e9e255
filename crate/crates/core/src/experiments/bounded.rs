use std::f64::consts::LN_2;

use crate::error::Error;
use crate::functions::ModelFunction;
use crate::par;
use crate::report::{ChainReport, ChainRow, Check, CHAIN_TOL};

const MIN_EXP: i32 = -8;
const MAX_EXP: i32 = 60;

/// Smallest `|y|` on the grid `±2^i` (refined by bisection) with
/// `log|ψ'(y)| >= log_target` and `ψ(y) > 0`.
pub fn derivative_witness(psi: &ModelFunction, log_target: f64) -> Result<f64, Error> {
    let accepts = |y: f64| -> Result<bool, Error> {
        let jet = psi.jet(y, 1)?;
        Ok(jet.values[0].sign() > 0 && jet.values[1].log_abs() >= log_target)
    };
    for i in MIN_EXP..=MAX_EXP {
        for sign in [1.0, -1.0] {
            let mut hi = sign * 2f64.powi(i);
            if !accepts(hi)? {
                continue;
            }
            let mut lo = if i == MIN_EXP { 0.0 } else { hi / 2.0 };
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if accepts(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(hi);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no y with |y| <= 2^{MAX_EXP}, psi(y) > 0 and log|psi'(y)| >= {log_target}"
    )))
}

/// Rows `m = 1..=mmax` with `|ψ'(y_m)| >= 2^{md}`, `x_m = ψ(y_m)`, the bracket
/// `x_{m,j} <= x_m < x_{m,j+1}` for `x_{m,j} = (jd/m)^d`, and the term
/// `(2^m/(me))^{j(m) d}`.
pub fn bounded_derivative_chain(
    d: f64,
    psi: &ModelFunction,
    mmax: u32,
    threshold: f64,
) -> Result<ChainReport, Error> {
    if !(d > 1.0) {
        return Err(Error::Precondition("d > 1 is required".into()));
    }
    let rows = par::map_range(mmax as usize, |i| -> Result<ChainRow, Error> {
        let m = (i + 1) as f64;
        let target = m * d * LN_2;
        let y = derivative_witness(psi, target)?;
        let jet = psi.jet(y, 1)?;
        let log_x = jet.values[0].log_abs();
        let log_dpsi = jet.values[1].log_abs();
        let j = ((m / d) * (log_x / d).exp()).floor();
        let grid_log = |j: f64| {
            if j == 0.0 {
                f64::NEG_INFINITY
            } else {
                d * (j * d / m).ln()
            }
        };
        let log_term = j * d * (m * LN_2 - m.ln() - 1.0);
        Ok(ChainRow {
            index: (i + 1) as u64,
            values: vec![y, log_x, log_dpsi, j, log_term],
            checks: vec![
                Check::le("derivative", target, log_dpsi, 0.0),
                Check::le("bracket_lower", grid_log(j), log_x, CHAIN_TOL),
                Check::le("bracket_upper", log_x, grid_log(j + 1.0), 0.0),
            ],
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut report = ChainReport::new(
        "bounded",
        &["y", "log_x", "log_derivative", "j", "log_term"],
    )
    .param("d", d)
    .param("psi", psi.to_string())
    .param("mmax", mmax as i64)
    .param("threshold", threshold);
    report.finish_rows(rows);
    report.mark_divergence("log_term", threshold.ln());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> ModelFunction {
        ModelFunction::polynomial(&[0, 0, 0, 1])
    }

    #[test]
    fn cube_witness_is_algebraic() {
        for m in 1..=8 {
            let y = derivative_witness(&cube(), 2.0 * m as f64 * LN_2).unwrap();
            let exact = (4f64.powi(m) / 3.0).sqrt();
            assert!(
                (y - exact).abs() <= 1e-12 * exact,
                "m = {m}: {y} vs {exact}"
            );
        }
    }

    #[test]
    fn base_below_and_above_one() {
        let base = |m: f64| m * LN_2 - m.ln() - 1.0;
        assert!(((base(2.0)).exp() - 4.0 / (2.0 * std::f64::consts::E)).abs() < 1e-15);
        assert!(base(2.0) < 0.0 && base(5.0) > 0.0);
    }

    #[test]
    fn cube_chain_diverges() {
        let r = bounded_derivative_chain(2.0, &cube(), 12, 1e6).unwrap();
        assert!(r.verdict.all_hold);
        assert_eq!(r.verdict.first_crossing_index, Some(4));
        let js = r.column("j").unwrap();
        assert!(js.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn bounded_derivative_exhausts_search() {
        let sin: ModelFunction = "sin".parse().unwrap();
        assert!(matches!(
            bounded_derivative_chain(2.0, &sin, 2, 1e6),
            Err(Error::SearchExhausted(_))
        ));
    }
}
