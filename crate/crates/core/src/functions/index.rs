use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::FunctionError;
use crate::fdb::Jet;
use crate::lognum::LogNum;

const MIN_POINTS: usize = 8;

/// Fit `log|f^{(j)}| ≈ s j log j + c j + b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexEstimate {
    pub s_hat: f64,
    pub c_hat: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub j_lo: usize,
    pub j_hi: usize,
    /// `(j, log|f^{(j)}|)` used in the fit.
    pub points: Vec<(usize, f64)>,
}

/// Least-squares fit over the given `(j, log|f^{(j)}|)` pairs.
pub fn fit_growth_exponent(points: &[(usize, f64)]) -> Result<IndexEstimate, FunctionError> {
    if points.len() < MIN_POINTS {
        return Err(FunctionError::Degenerate(format!(
            "{} nonzero derivatives, at least {MIN_POINTS} needed",
            points.len()
        )));
    }
    let n = points.len();
    let a = DMatrix::from_fn(n, 3, |r, c| {
        let j = points[r].0 as f64;
        match c {
            0 if j > 0.0 => j * j.ln(),
            0 => 0.0,
            1 => j,
            _ => 1.0,
        }
    });
    let b = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let sol = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| FunctionError::Degenerate(e.to_string()))?;
    let resid = &a * &sol - &b;
    Ok(IndexEstimate {
        s_hat: sol[0],
        c_hat: sol[1],
        intercept: sol[2],
        residual_rms: (resid.norm_squared() / n as f64).sqrt(),
        j_lo: points[0].0,
        j_hi: points[n - 1].0,
        points: points.to_vec(),
    })
}

/// Fit over the nonzero jet entries with `j_lo <= j <= j_hi`.
pub fn estimate_growth_exponent(
    jet: &Jet<LogNum>,
    j_lo: usize,
    j_hi: usize,
) -> Result<IndexEstimate, FunctionError> {
    let hi = j_hi.min(jet.values.len() - 1);
    let points: Vec<(usize, f64)> = (j_lo..=hi)
        .filter(|&j| !jet.values[j].is_zero())
        .map(|j| (j, jet.values[j].log_abs()))
        .collect();
    fit_growth_exponent(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::ModelFunction;
    use num_rational::BigRational;

    #[test]
    fn exact_fit_recovers_exponent() {
        let pts: Vec<(usize, f64)> = (1..=40)
            .map(|j| (j, 0.7 * j as f64 * (j as f64).ln()))
            .collect();
        let e = fit_growth_exponent(&pts).unwrap();
        assert!((e.s_hat - 0.7).abs() < 1e-9);
        assert!(e.residual_rms < 1e-9);
    }

    #[test]
    fn gaussian_jets() {
        let jet = ModelFunction::Gaussian
            .exact_jet(&BigRational::from_integer(0.into()), 80)
            .unwrap()
            .to_lognum();
        let e = estimate_growth_exponent(&jet, 1, 80).unwrap();
        assert!((e.s_hat - 0.5).abs() < 0.05, "{}", e.s_hat);
        assert_eq!(fit_growth_exponent(&e.points).unwrap(), e);
    }

    #[test]
    fn polynomial_is_degenerate() {
        let p = ModelFunction::polynomial(&[1, 2, 3]);
        let jet = p.jet(0.5, 20).unwrap();
        assert!(matches!(
            estimate_growth_exponent(&jet, 0, 20),
            Err(FunctionError::Degenerate(_))
        ));
    }
}
