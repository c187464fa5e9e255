use std::f64::consts::E;

use crate::error::Error;
use crate::functions::seminorm::{penalties, scan_sup, IndexBox};
use crate::functions::ModelFunction;
use crate::grid::Grid;
use crate::lognum::LogNum;
use crate::par;
use crate::report::{ChainReport, ChainRow, Check, CHAIN_TOL};
use crate::weights::{verify_dilation, ConjugateEvaluator};

/// Partial sums of `v_m(j)/v_ℓ(j) = e^{ℓφ*(j/ℓ) - mφ*(j/m)}`, `ℓ = Lm`, for
/// `1 <= j <= jmax`, against the cap `e^{mL}/(e-1)`.
pub fn nuclearity_sum(
    conj: &ConjugateEvaluator,
    m: u32,
    l: u64,
    jmax: u64,
    points: &[f64],
) -> Result<ChainReport, Error> {
    if m == 0 {
        return Err(Error::Precondition("m >= 1 is required".into()));
    }
    verify_dilation(conj.weight().as_ref(), l, points)
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let mf = m as f64;
    let ell = (l * m as u64) as f64;
    let log_bound = mf * l as f64 - (E - 1.0).ln();
    let ratios = par::map_range(jmax as usize, |i| -> Result<f64, Error> {
        let j = (i + 1) as f64;
        Ok(conj.scaled(ell, j)? - conj.scaled(mf, j)?)
    });
    let mut partial = LogNum::ZERO;
    let mut rows = Vec::with_capacity(jmax as usize);
    for (i, r) in ratios.into_iter().enumerate() {
        let log_ratio = r?;
        let j = (i + 1) as f64;
        partial = partial.add(LogNum::exp(log_ratio));
        let term_bound = mf * l as f64 - j;
        rows.push(ChainRow {
            index: (i + 1) as u64,
            values: vec![log_ratio, term_bound, partial.log_abs(), log_bound],
            checks: vec![
                Check::le("term", log_ratio, term_bound, CHAIN_TOL),
                Check::le("partial", partial.log_abs(), log_bound, CHAIN_TOL),
            ],
        });
    }
    let mut report = ChainReport::new(
        "nuclear",
        &[
            "log_ratio",
            "log_term_bound",
            "log_partial_sum",
            "log_bound",
        ],
    )
    .param("weight", conj.weight().label())
    .param("m", m as i64)
    .param("L", l)
    .param("ell", ell)
    .param("jmax", jmax)
    .param("partial_sum", partial.to_f64())
    .param("bound", log_bound.exp());
    report.finish_rows(rows);
    Ok(report)
}

/// `C_n = sup_j exp((m - λ_j) ω(x_j) + m)`, `m = Kn`, over the given prefix,
/// with `π_{n,n}(U_j f) <= C_n π_{m,m}(f)` spot-checked for the gaussian at the
/// first, middle and last `j` on `grid` up to derivative order `jspot`.
pub fn equicontinuity_constant(
    xs: &[f64],
    lambdas: &[f64],
    conj: &ConjugateEvaluator,
    n: u32,
    k: u32,
    grid: &Grid,
    jspot: usize,
) -> Result<ChainReport, Error> {
    if xs.is_empty() || xs.len() != lambdas.len() {
        return Err(Error::Precondition(
            "x and lambda sequences must be nonempty and of equal length".into(),
        ));
    }
    if xs.iter().chain(lambdas).any(|v| !(*v > 0.0)) {
        return Err(Error::Precondition(
            "x and lambda sequences must be positive".into(),
        ));
    }
    if n == 0 || k == 0 {
        return Err(Error::Precondition("n >= 1 and K >= 1 are required".into()));
    }
    let w = conj.weight().clone();
    let m = (k * n) as f64;
    let nf = n as f64;
    let omegas = xs
        .iter()
        .map(|&x| w.eval(x))
        .collect::<Result<Vec<_>, _>>()?;
    let exponents: Vec<f64> = omegas
        .iter()
        .zip(lambdas)
        .map(|(o, lam)| (m - lam) * o + m)
        .collect();
    let log_c = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let f = ModelFunction::Gaussian;
    let points = grid.points();
    let jets = |x: f64, j: usize| f.jet(x, j).map_err(Error::from);
    let idx = IndexBox {
        j_max: jspot,
        k_max: 0,
        cap: None,
    };
    let pen_m = penalties(conj, m, jspot)?;
    let pen_n = penalties(conj, nf, jspot)?;
    let (pi_mm, _) = scan_sup(&points, jets, idx, &pen_m, |y| Ok(m * w.eval(y.abs())?))?;

    let last = xs.len() - 1;
    let mut spots = vec![0, last / 2, last];
    spots.dedup();
    let mut rows: Vec<ChainRow> = (0..xs.len())
        .map(|i| ChainRow {
            index: (i + 1) as u64,
            values: vec![xs[i], lambdas[i], exponents[i]],
            checks: Vec::new(),
        })
        .collect();
    for &i in &spots {
        let xj = xs[i];
        let shift = -lambdas[i] * omegas[i];
        let (lhs, _) = scan_sup(&points, jets, idx, &pen_n, |y| {
            Ok(nf * w.eval((y + xj).abs())? + shift)
        })?;
        let rhs = log_c + pi_mm.log_abs();
        rows[i].checks.push(Check::le(
            "spot",
            lhs.log_abs(),
            rhs,
            CHAIN_TOL * rhs.abs().max(1.0),
        ));
    }
    let mut report = ChainReport::new("equicont", &["x", "lambda", "exponent"])
        .param("weight", w.label())
        .param("n", n as i64)
        .param("K", k as i64)
        .param("m", m)
        .param("log_C", log_c)
        .param("C", log_c.exp())
        .param("grid", grid.to_string())
        .param("jspot", jspot);
    report.finish_rows(rows);
    if lambdas.iter().all(|&l| l <= m) {
        report.notes.push(format!(
            "warning: lambda_j <= m = {m} for every provided j; the prefix does not show lambda_j -> infinity"
        ));
    } else if lambdas[last] <= m {
        report.notes.push(format!(
            "warning: the last lambda_j does not exceed m = {m}"
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{default_test_points, WeightFunction};

    fn conj() -> ConjugateEvaluator {
        ConjugateEvaluator::auto(WeightFunction::gevrey(2.0).into_arc())
    }

    #[test]
    fn gevrey_ratios_are_powers_of_four() {
        let r = nuclearity_sum(&conj(), 1, 2, 50, &default_test_points()).unwrap();
        assert!(r.verdict.all_hold);
        for (j, v) in r.column("log_ratio").unwrap().iter().enumerate() {
            let expected = -((j + 1) as f64) * 4f64.ln();
            assert!((v - expected).exp_m1().abs() < 1e-12);
        }
        let sum = match r.params["partial_sum"] {
            crate::report::Param::Real(v) => v,
            _ => unreachable!(),
        };
        assert!((sum - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn empty_sum_and_bad_l() {
        let r = nuclearity_sum(&conj(), 1, 2, 0, &default_test_points()).unwrap();
        assert!(r.rows.is_empty() && r.verdict.all_hold);
        assert!(matches!(
            nuclearity_sum(&conj(), 1, 1, 5, &default_test_points()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn equicontinuity_example() {
        let xs: Vec<f64> = (1..=40).map(|j| j as f64).collect();
        let r =
            equicontinuity_constant(&xs, &xs, &conj(), 1, 2, &Grid::sym(6.0, 0.125), 12).unwrap();
        assert!(r.verdict.all_hold);
        assert!(r.notes.is_empty());
        let log_c = match r.params["log_C"] {
            crate::report::Param::Real(v) => v,
            _ => unreachable!(),
        };
        assert!((log_c - 3.0).abs() < 1e-12);
        let flat = vec![1.0; 10];
        let w = equicontinuity_constant(&xs[..10], &flat, &conj(), 1, 2, &Grid::sym(4.0, 0.25), 6)
            .unwrap();
        assert!(w.notes[0].starts_with("warning"));
    }
}
