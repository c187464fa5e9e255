use serde::Serialize;

use super::ModelFunction;
use crate::error::{Error, FunctionError, WeightError};
use crate::fdb::Jet;
use crate::grid::Grid;
use crate::lognum::LogNum;
use crate::par;
use crate::weights::ConjugateEvaluator;

/// Enlargement factor for the stability probe.
pub const STABILITY_FACTOR: f64 = 1.25;
/// Relative change below which a seminorm estimate counts as stable.
pub const STABILITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeminormFamily {
    /// `sup |x^k f^{(j)}(x)| e^{-λ φ*((j+k)/λ)}`.
    PLambda,
    /// `sup |f^{(j)}(x)| e^{-λ φ*(j/λ) + μ ω(x)}`.
    Pi,
    /// `sup |x^q (f∘ψ)^{(j)}(x)| e^{-m φ_σ*((j+q)/m)}`.
    Composed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeminormWitness {
    pub j: usize,
    pub k: usize,
    pub x: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeminormReport {
    pub family: SeminormFamily,
    pub function: String,
    pub weight: String,
    pub lambda: f64,
    pub mu: Option<f64>,
    pub grid: String,
    pub j_max: usize,
    pub k_max: Option<usize>,
    /// Cap on `j + k`, when the index set is a triangle.
    pub order_cap: Option<usize>,
    pub value: LogNum,
    pub witness: Option<SeminormWitness>,
    /// Value on the box enlarged by 25% in every direction.
    pub enlarged_value: LogNum,
    pub stable: bool,
    pub degenerate: bool,
}

impl SeminormReport {
    /// `|exp(enlarged - value) - 1|`.
    pub fn relative_change(&self) -> f64 {
        if self.value.is_zero() {
            return if self.enlarged_value.is_zero() {
                0.0
            } else {
                f64::INFINITY
            };
        }
        (self.enlarged_value.log_abs() - self.value.log_abs())
            .exp_m1()
            .abs()
    }
}

/// Index box of one scan.
#[derive(Clone, Copy, Debug)]
pub(crate) struct IndexBox {
    pub j_max: usize,
    pub k_max: usize,
    pub cap: Option<usize>,
}

impl IndexBox {
    fn admits(&self, j: usize, k: usize) -> bool {
        j <= self.j_max && k <= self.k_max && self.cap.is_none_or(|c| j + k <= c)
    }

    fn enlarged(&self, factor: f64, j_limit: usize) -> IndexBox {
        let up = |n: usize| ((n as f64 * factor).ceil() as usize).max(n);
        IndexBox {
            j_max: up(self.j_max).min(j_limit),
            k_max: up(self.k_max),
            cap: self.cap.map(up),
        }
    }
}

/// Largest `log|x^k f^{(j)}(x)| - penalty(j + k) + bonus(x)` over the box.
/// Ties keep the first hit in (x, j, k) order.
pub(crate) fn scan_sup<J, B>(
    points: &[f64],
    jets: J,
    idx: IndexBox,
    penalty: &[f64],
    bonus: B,
) -> Result<(LogNum, Option<SeminormWitness>), Error>
where
    J: Fn(f64, usize) -> Result<Jet<LogNum>, Error> + Sync,
    B: Fn(f64) -> Result<f64, Error> + Sync,
{
    let per_point = par::map_slice(
        points,
        |&x| -> Result<(LogNum, Option<SeminormWitness>), Error> {
            let jet = jets(x, idx.j_max)?;
            let b = bonus(x)?;
            let lx = x.abs().ln();
            let mut best = (LogNum::ZERO, None);
            for j in 0..=idx.j_max {
                let d = jet.values[j];
                if d.is_zero() {
                    continue;
                }
                for k in 0..=idx.k_max {
                    if !idx.admits(j, k) {
                        break;
                    }
                    if k > 0 && x == 0.0 {
                        break;
                    }
                    let xk = if k == 0 { 0.0 } else { k as f64 * lx };
                    let v = LogNum::from_parts(1, xk + d.log_abs() - penalty[j + k] + b);
                    if best.1.is_none() || v.log_abs() > best.0.log_abs() {
                        best = (v, Some(SeminormWitness { j, k, x }));
                    }
                }
            }
            Ok(best)
        },
    );
    let mut best = (LogNum::ZERO, None);
    for r in per_point {
        let (v, w) = r?;
        if w.is_some() && (best.1.is_none() || v.log_abs() > best.0.log_abs()) {
            best = (v, w);
        }
    }
    Ok(best)
}

/// `scale * φ*(n / scale)` for `n <= n_max`.
pub(crate) fn penalties(
    conj: &ConjugateEvaluator,
    scale: f64,
    n_max: usize,
) -> Result<Vec<f64>, WeightError> {
    (0..=n_max).map(|n| conj.scaled(scale, n as f64)).collect()
}

/// Original grid points plus those of the enlarged grid, sorted and deduplicated.
pub(crate) fn enlarged_points(grid: &Grid, factor: f64) -> Vec<f64> {
    let mut pts = grid.points();
    pts.extend(grid.enlarged(factor).points());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

pub(crate) struct ScanSpec<'a> {
    pub family: SeminormFamily,
    pub function: String,
    pub conj: &'a ConjugateEvaluator,
    pub lambda: f64,
    pub mu: Option<f64>,
    pub grid: &'a Grid,
    pub idx: IndexBox,
    pub j_limit: usize,
}

pub(crate) fn run_scan<J, B>(spec: ScanSpec<'_>, jets: J, bonus: B) -> Result<SeminormReport, Error>
where
    J: Fn(f64, usize) -> Result<Jet<LogNum>, Error> + Sync,
    B: Fn(f64) -> Result<f64, Error> + Sync,
{
    let big = spec.idx.enlarged(STABILITY_FACTOR, spec.j_limit);
    let n_max = big
        .cap
        .unwrap_or(big.j_max + big.k_max)
        .max(big.j_max + big.k_max.min(big.cap.unwrap_or(usize::MAX)));
    let pen = penalties(spec.conj, spec.lambda, n_max)?;
    let (value, witness) = scan_sup(&spec.grid.points(), &jets, spec.idx, &pen, &bonus)?;
    let (enlarged_value, _) = scan_sup(
        &enlarged_points(spec.grid, STABILITY_FACTOR),
        &jets,
        big,
        &pen,
        &bonus,
    )?;
    let mut report = SeminormReport {
        family: spec.family,
        function: spec.function,
        weight: spec.conj.weight().label(),
        lambda: spec.lambda,
        mu: spec.mu,
        grid: spec.grid.to_string(),
        j_max: spec.idx.j_max,
        k_max: (spec.family != SeminormFamily::Pi).then_some(spec.idx.k_max),
        order_cap: spec.idx.cap,
        value,
        witness,
        enlarged_value,
        stable: false,
        degenerate: witness.is_none(),
    };
    report.stable = !report.degenerate && report.relative_change() < STABILITY_TOL;
    Ok(report)
}

fn jet_fn(f: &ModelFunction) -> impl Fn(f64, usize) -> Result<Jet<LogNum>, Error> + Sync + '_ {
    move |x, j| f.jet(x, j).map_err(Error::from)
}

/// Lower estimate of `p_λ(f)` over `j <= J`, `k <= K` and the grid.
pub fn seminorm_p_lambda(
    f: &ModelFunction,
    lambda: f64,
    conj: &ConjugateEvaluator,
    grid: &Grid,
    j_max: usize,
    k_max: usize,
) -> Result<SeminormReport, Error> {
    if !(lambda > 0.0) {
        return Err(Error::Precondition("lambda must be positive".into()));
    }
    if j_max + k_max > 200 {
        return Err(FunctionError::Capability {
            family: f.family().into(),
            what: format!("J + K = {} > 200", j_max + k_max),
        }
        .into());
    }
    run_scan(
        ScanSpec {
            family: SeminormFamily::PLambda,
            function: f.to_string(),
            conj,
            lambda,
            mu: None,
            grid,
            idx: IndexBox {
                j_max,
                k_max,
                cap: None,
            },
            j_limit: f.max_order(),
        },
        jet_fn(f),
        |_| Ok(0.0),
    )
}

/// Lower estimate of `π_{λ,μ}(f)` over `j <= J` and the grid.
pub fn seminorm_pi(
    f: &ModelFunction,
    lambda: f64,
    mu: f64,
    conj: &ConjugateEvaluator,
    grid: &Grid,
    j_max: usize,
) -> Result<SeminormReport, Error> {
    if !(lambda > 0.0 && mu > 0.0) {
        return Err(Error::Precondition("lambda and mu must be positive".into()));
    }
    let w = conj.weight().clone();
    run_scan(
        ScanSpec {
            family: SeminormFamily::Pi,
            function: f.to_string(),
            conj,
            lambda,
            mu: Some(mu),
            grid,
            idx: IndexBox {
                j_max,
                k_max: 0,
                cap: None,
            },
            j_limit: f.max_order(),
        },
        jet_fn(f),
        move |x| Ok(mu * w.eval(x.abs())?),
    )
}

/// Recomputes the single term at a report's witness.
pub fn reevaluate_witness(
    r: &SeminormReport,
    f: &ModelFunction,
    conj: &ConjugateEvaluator,
) -> Result<LogNum, Error> {
    let w = r
        .witness
        .ok_or_else(|| Error::Precondition("degenerate report has no witness".into()))?;
    let jet = f.jet(w.x, r.j_max)?;
    let pen = conj.scaled(r.lambda, (w.j + w.k) as f64)?;
    let bonus = match r.mu {
        Some(mu) => mu * conj.weight().eval(w.x.abs())?,
        None => 0.0,
    };
    let xk = if w.k == 0 {
        0.0
    } else {
        w.k as f64 * w.x.abs().ln()
    };
    Ok(LogNum::from_parts(
        1,
        xk + jet.values[w.j].log_abs() - pen + bonus,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightFunction;

    fn conj(d: f64) -> ConjugateEvaluator {
        ConjugateEvaluator::auto(WeightFunction::gevrey(d).into_arc())
    }

    #[test]
    fn gaussian_p_lambda_has_witness() {
        let g = Grid::sym(8.0, 0.0625);
        let r = seminorm_p_lambda(&ModelFunction::Gaussian, 1.0, &conj(2.0), &g, 10, 10).unwrap();
        assert!(!r.degenerate);
        assert!(r.value.log_abs().is_finite());
        let again = reevaluate_witness(&r, &ModelFunction::Gaussian, &conj(2.0)).unwrap();
        assert_eq!(again, r.value);
        assert!(r.enlarged_value.log_abs() >= r.value.log_abs());
    }

    #[test]
    fn zero_function_is_degenerate() {
        let z = ModelFunction::polynomial(&[0]);
        let r = seminorm_p_lambda(&z, 1.0, &conj(2.0), &Grid::sym(2.0, 0.5), 3, 3).unwrap();
        assert!(r.degenerate && r.value.is_zero() && !r.stable);
    }

    #[test]
    fn square_is_unstable() {
        let p = ModelFunction::polynomial(&[0, 0, 1]);
        let r = seminorm_p_lambda(&p, 1.0, &conj(2.0), &Grid::sym(8.0, 0.25), 4, 4).unwrap();
        assert!(!r.stable);
    }

    #[test]
    fn pi_family() {
        let g = Grid::sym(8.0, 0.0625);
        let r = seminorm_pi(&ModelFunction::Gaussian, 1.0, 1.0, &conj(2.0), &g, 12).unwrap();
        assert!(r.stable, "{r:?}");
        let e = seminorm_pi(&ModelFunction::ExpSqr, 1.0, 1.0, &conj(2.0), &g, 12).unwrap();
        assert!(!e.stable);
        let b = ModelFunction::GevreyBump { gamma: 1.0, r: 1.0 };
        let rb = seminorm_pi(&b, 1.0, 1.0, &conj(3.0), &Grid::sym(1.5, 0.03125), 12).unwrap();
        assert!(rb.value.log_abs().is_finite());
    }
}
