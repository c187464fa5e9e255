use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::{ConjugateEvaluator, Weight};
use crate::error::{Error, WeightError};
use crate::grid::Grid;
use crate::par;
use crate::quad::{integrate_real_line, integrate_to_infinity, QuadConfig, QuadResult};
use crate::report::{ChainReport, ChainRow, Check, CHAIN_TOL};

/// Relative slack when re-substituting a witness constant.
const WITNESS_SLACK: f64 = 1e-12;

/// Largest `log t` probed by the doubling check beyond the grid.
const FAR_LOG_T: f64 = 1e4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchBounds {
    pub k: u64,
    pub c: u64,
    pub h: u64,
    pub l: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            k: 1_000,
            c: 1_000,
            h: 1_000_000,
            l: 1_000,
        }
    }
}

/// `log:1e-2,1e8,2000` plus `t = 0`.
pub fn default_test_points() -> Vec<f64> {
    let mut pts = vec![0.0];
    pts.extend(Grid::log(1e-2, 1e8, 2000).points());
    pts
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessCheck {
    pub witness: Option<u64>,
    /// Largest ratio the witness has to dominate.
    pub max_ratio: f64,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralCheck {
    pub integral: Option<QuadResult>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaTrend {
    /// `(t, omega(t) / log(1 + t^2))` at decades of `t`.
    pub samples: Vec<(f64, f64)>,
    pub increasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexityCheck {
    pub checked: usize,
    pub violations: usize,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonCheck {
    pub witness: Option<u64>,
    pub max_ratio: f64,
    pub max_rel_quad_error: f64,
    pub samples: usize,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightConditionReport {
    pub weight: String,
    pub grid: String,
    pub alpha: WitnessCheck,
    pub beta: IntegralCheck,
    pub gamma: GammaTrend,
    pub delta: ConvexityCheck,
    pub epsilon: EpsilonCheck,
    pub doubling: WitnessCheck,
    /// `omega(e t) <= L (1 + omega(t))`, used by the conjugate shift bound.
    pub dilation: WitnessCheck,
    /// Largest `log t` at which the doubling inequality was probed.
    pub doubling_probe_log_t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionRow {
    pub condition: String,
    pub witness: Option<f64>,
    pub grid: String,
    pub verdict: bool,
}

impl WeightConditionReport {
    /// Flat `{condition, witness, grid, verdict}` rows.
    pub fn rows(&self) -> Vec<ConditionRow> {
        let row = |c: &str, w: Option<f64>, v: bool| ConditionRow {
            condition: c.to_string(),
            witness: w,
            grid: self.grid.clone(),
            verdict: v,
        };
        let beta_ok = self
            .beta
            .integral
            .as_ref()
            .map(|q| q.converged && q.value.is_finite())
            .unwrap_or(false);
        vec![
            row(
                "alpha",
                self.alpha.witness.map(|k| k as f64),
                self.alpha.witness.is_some(),
            ),
            row(
                "beta",
                self.beta.integral.as_ref().map(|q| q.value),
                beta_ok,
            ),
            row(
                "gamma",
                self.gamma.samples.last().map(|s| s.1),
                self.gamma.increasing,
            ),
            row(
                "delta",
                Some(self.delta.violations as f64),
                self.delta.failure.is_none() && self.delta.violations == 0,
            ),
            row(
                "epsilon",
                self.epsilon.witness.map(|c| c as f64),
                self.epsilon.witness.is_some(),
            ),
            row(
                "doubling",
                self.doubling.witness.map(|h| h as f64),
                self.doubling.witness.is_some(),
            ),
            row(
                "dilation",
                self.dilation.witness.map(|l| l as f64),
                self.dilation.witness.is_some(),
            ),
        ]
    }
}

fn log_coords(points: &[f64]) -> Vec<f64> {
    points
        .iter()
        .filter(|&&t| t > 0.0)
        .map(|t| t.ln())
        .collect()
}

/// Smallest integer `n >= 1` with `ratio <= n` at every sample, re-substituted.
fn ratio_witness(ratios: &[f64], bound: u64) -> WitnessCheck {
    let max_ratio = ratios.iter().copied().fold(0.0f64, f64::max);
    if !max_ratio.is_finite() {
        return WitnessCheck {
            witness: None,
            max_ratio,
            failure: Some("ratio is not finite on the grid".into()),
        };
    }
    let mut n = ((max_ratio * (1.0 - WITNESS_SLACK)).ceil() as u64).max(1);
    while ratios.iter().any(|&r| r > n as f64 * (1.0 + WITNESS_SLACK)) {
        n += 1;
    }
    if n > bound {
        return WitnessCheck {
            witness: None,
            max_ratio,
            failure: Some(format!("needs {n} > search bound {bound}")),
        };
    }
    WitnessCheck {
        witness: Some(n),
        max_ratio,
        failure: None,
    }
}

fn failed(msg: String) -> WitnessCheck {
    WitnessCheck {
        witness: None,
        max_ratio: f64::NAN,
        failure: Some(msg),
    }
}

/// Smallest integer `L` with `omega(e t) <= L (1 + omega(t))` on `points`.
pub fn dilation_constant(w: &dyn Weight, points: &[f64], bound: u64) -> WitnessCheck {
    let ratios: Result<Vec<f64>, WeightError> = points
        .iter()
        .map(|&t| {
            if t == 0.0 {
                let w0 = w.eval(0.0)?;
                Ok(w0 / (1.0 + w0))
            } else {
                let x = t.ln();
                Ok(w.phi(x + 1.0)? / (1.0 + w.phi(x)?))
            }
        })
        .collect();
    match ratios {
        Ok(r) => ratio_witness(&r, bound),
        Err(e) => failed(e.to_string()),
    }
}

/// Errors with the first grid point violating `omega(e t) <= L (1 + omega(t))`.
pub fn verify_dilation(w: &dyn Weight, l: u64, points: &[f64]) -> Result<(), WeightError> {
    for &t in points {
        let (lhs, base) = if t == 0.0 {
            (w.eval(std::f64::consts::E * 0.0)?, w.eval(0.0)?)
        } else {
            (w.phi(t.ln() + 1.0)?, w.phi(t.ln())?)
        };
        if lhs > l as f64 * (1.0 + base) * (1.0 + WITNESS_SLACK) {
            return Err(WeightError::InvalidDilation { l, t });
        }
    }
    Ok(())
}

fn doubling_holds(w: &dyn Weight, xs: &[f64], w0: f64, h: u64) -> Result<bool, WeightError> {
    let hf = h as f64;
    let lh = hf.ln();
    if 2.0 * w0 > w0 + hf {
        return Ok(false);
    }
    for &x in xs {
        let lhs = 2.0 * w.phi(x)?;
        let rhs = w.phi(x + lh)? + hf;
        if !lhs.is_finite() || !rhs.is_finite() {
            continue;
        }
        if lhs > rhs * (1.0 + WITNESS_SLACK) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest integer `H <= bound` with `2 omega(t) <= omega(H t) + H` at the
/// sample points (given as `x = log t`), found by bisection (the right side is
/// nondecreasing in `H`).
pub(crate) fn doubling_witness(w: &dyn Weight, xs: &[f64], w0: f64, bound: u64) -> WitnessCheck {
    match doubling_holds(w, xs, w0, bound) {
        Err(e) => return failed(e.to_string()),
        Ok(false) => {
            return WitnessCheck {
                witness: None,
                max_ratio: f64::NAN,
                failure: Some(format!("no H <= {bound}")),
            }
        }
        Ok(true) => {}
    }
    let (mut lo, mut hi) = (0u64, bound);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match doubling_holds(w, xs, w0, mid) {
            Ok(true) => hi = mid,
            Ok(false) => lo = mid,
            Err(e) => return failed(e.to_string()),
        }
    }
    WitnessCheck {
        witness: Some(hi),
        max_ratio: f64::NAN,
        failure: None,
    }
}

/// Grid `x` values followed by a geometric tail up to `log t = 1e4`.
pub(crate) fn doubling_probe(xs: &[f64]) -> Vec<f64> {
    let mut out = xs.to_vec();
    let mut x = xs.iter().copied().fold(1.0f64, f64::max);
    while x < FAR_LOG_T {
        x = (x * 1.5).min(FAR_LOG_T);
        out.push(x);
    }
    out
}

fn quad_cfg() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_intervals: 4000,
    }
}

/// `∫_0^∞ omega(t) / (1 + t^2) dt`, integrated in `x = log t`.
fn beta_integral(w: &dyn Weight) -> IntegralCheck {
    let err = std::cell::RefCell::new(None::<WeightError>);
    let f = |x: f64| {
        let ax = x.abs();
        match w.phi(x) {
            Ok(p) if p > 0.0 => (p.ln() - ax - (-2.0 * ax).exp().ln_1p()).exp(),
            Ok(_) => 0.0,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let r = integrate_real_line(f, &w.kinks(), quad_cfg());
    if let Some(e) = err.into_inner() {
        return IntegralCheck {
            integral: None,
            failure: Some(e.to_string()),
        };
    }
    IntegralCheck {
        integral: Some(r),
        failure: None,
    }
}

/// `∫_1^∞ omega(y t) / t^2 dt = ∫_0^∞ phi(log y + x) e^{-x} dx`.
fn epsilon_integral(w: &dyn Weight, y: f64) -> Result<QuadResult, WeightError> {
    let ly = y.ln();
    let err = std::cell::RefCell::new(None::<WeightError>);
    let f = |x: f64| match w.phi(ly + x) {
        Ok(p) if p > 0.0 => (p.ln() - x).exp(),
        Ok(_) => 0.0,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let breaks: Vec<f64> = w.kinks().into_iter().map(|k| k - ly).collect();
    let r = integrate_to_infinity(f, 0.0, &breaks, quad_cfg());
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

fn epsilon_check(w: &dyn Weight, points: &[f64], bound: u64) -> EpsilonCheck {
    let pos: Vec<f64> = points.iter().copied().filter(|&t| t > 0.0).collect();
    let stride = (pos.len() / 40).max(1);
    let ys: Vec<f64> = pos.iter().copied().step_by(stride).collect();
    let results = par::map_slice(&ys, |&y| -> Result<(f64, f64), WeightError> {
        let q = epsilon_integral(w, y)?;
        Ok((q.value / (w.eval(y)? + 1.0), q.rel_error()))
    });
    let mut ratios = Vec::with_capacity(results.len());
    let mut max_err = 0.0f64;
    for r in results {
        match r {
            Ok((ratio, e)) => {
                ratios.push(ratio);
                max_err = max_err.max(e);
            }
            Err(e) => {
                return EpsilonCheck {
                    witness: None,
                    max_ratio: f64::NAN,
                    max_rel_quad_error: max_err,
                    samples: ys.len(),
                    failure: Some(e.to_string()),
                }
            }
        }
    }
    let wc = ratio_witness(&ratios, bound);
    EpsilonCheck {
        witness: wc.witness,
        max_ratio: wc.max_ratio,
        max_rel_quad_error: max_err,
        samples: ys.len(),
        failure: wc.failure,
    }
}

pub(crate) fn gamma_trend(w: &dyn Weight, t_max: f64) -> GammaTrend {
    let mut samples = Vec::new();
    let mut t = 10.0;
    while t <= t_max * (1.0 + 1e-12) {
        if let Ok(v) = w.eval(t) {
            samples.push((t, v / (1.0 + t * t).ln()));
        }
        t *= 10.0;
    }
    let tail = &samples[samples.len().saturating_sub(4)..];
    let increasing = tail.len() >= 2 && tail.windows(2).all(|p| p[1].1 > p[0].1);
    GammaTrend {
        samples,
        increasing,
    }
}

fn convexity_check(w: &dyn Weight, xs: &[f64]) -> ConvexityCheck {
    let mut checked = 0;
    let mut violations = 0;
    for stride in [1usize, 8] {
        for i in stride..xs.len().saturating_sub(stride) {
            let (a, b) = (xs[i - stride], xs[i + stride]);
            let vals = (w.phi(a), w.phi(0.5 * (a + b)), w.phi(b));
            let (fa, fm, fb) = match vals {
                (Ok(fa), Ok(fm), Ok(fb)) => (fa, fm, fb),
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                    return ConvexityCheck {
                        checked,
                        violations,
                        failure: Some(e.to_string()),
                    }
                }
            };
            if !(fa.is_finite() && fb.is_finite()) {
                continue;
            }
            checked += 1;
            let chord = 0.5 * (fa + fb);
            if fm > chord + 1e-12 * chord.abs().max(1.0) {
                violations += 1;
            }
        }
    }
    ConvexityCheck {
        checked,
        violations,
        failure: None,
    }
}

/// Numerically checks conditions (α) to (ε), the doubling inequality and the
/// dilation constant on `grid` (plus `t = 0`). Failures are recorded, not raised.
pub fn check_weight_conditions(
    w: &dyn Weight,
    grid: &Grid,
    bounds: SearchBounds,
) -> WeightConditionReport {
    let mut points = vec![0.0];
    points.extend(grid.points().into_iter().filter(|&t| t > 0.0));
    let xs = log_coords(&points);

    let alpha = match points
        .iter()
        .map(|&t| -> Result<f64, WeightError> {
            if t == 0.0 {
                let w0 = w.eval(0.0)?;
                Ok(w0 / (w0 + 1.0))
            } else {
                let x = t.ln();
                Ok(w.phi(x + std::f64::consts::LN_2)? / (w.phi(x)? + 1.0))
            }
        })
        .collect::<Result<Vec<f64>, _>>()
    {
        Ok(r) => ratio_witness(&r, bounds.k),
        Err(e) => failed(e.to_string()),
    };

    let doubling_xs = doubling_probe(&xs);
    let doubling = match w.eval(0.0) {
        Ok(w0) => doubling_witness(w, &doubling_xs, w0, bounds.h),
        Err(e) => failed(e.to_string()),
    };

    WeightConditionReport {
        weight: w.label(),
        grid: format!("{grid} + t=0"),
        alpha,
        beta: beta_integral(w),
        gamma: gamma_trend(w, grid.radius()),
        delta: convexity_check(w, &xs),
        epsilon: epsilon_check(w, &points, bounds.c),
        doubling,
        dilation: dilation_constant(w, &points, bounds.l),
        doubling_probe_log_t: doubling_xs.last().copied().unwrap_or(0.0),
    }
}

/// Rows `mu phi*(j/mu) + N j <= lambda phi*(j/lambda) + lambda Σ_{k=1}^N L^k`
/// with `mu = L^N lambda`, for `0 <= j <= jmax`. `L` is re-verified on
/// `points` first.
pub fn conjugate_shift_bound(
    c: &ConjugateEvaluator,
    lambda: f64,
    n: u32,
    l: u64,
    jmax: u64,
    points: &[f64],
) -> Result<ChainReport, Error> {
    if !(lambda > 0.0) || n == 0 || l == 0 {
        return Err(Error::Precondition(
            "lambda > 0, N >= 1 and L >= 1 are required".into(),
        ));
    }
    verify_dilation(c.weight().as_ref(), l, points)?;
    let lf = l as f64;
    let mu = lf.powi(n as i32) * lambda;
    let geometric: f64 = (1..=n).map(|k| lf.powi(k as i32)).sum();
    let rows = par::map_range(jmax as usize + 1, |j| -> Result<ChainRow, WeightError> {
        let jf = j as f64;
        let lhs = c.scaled(mu, jf)? + n as f64 * jf;
        let rhs = c.scaled(lambda, jf)? + lambda * geometric;
        Ok(ChainRow {
            index: j as u64,
            values: vec![lhs, rhs, rhs - lhs],
            checks: vec![Check::le("shift", lhs, rhs, CHAIN_TOL)],
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut report = ChainReport::new("conjugate-shift", &["lhs", "rhs", "margin"])
        .param("weight", c.weight().label())
        .param("lambda", lambda)
        .param("N", n as i64)
        .param("L", l)
        .param("mu", mu)
        .param("jmax", jmax);
    report.finish_rows(rows);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationWitness {
    /// `log C`, `C = max_j A^j j! e^{-lambda phi*(j/lambda)}`.
    pub log_c: f64,
    pub argmax_j: u64,
    /// Whether the maximum is attained strictly inside `[0, jmax]`.
    pub interior: bool,
}

impl DominationWitness {
    pub fn c(&self) -> f64 {
        self.log_c.exp()
    }
}

/// Smallest `C` with `A^j j! <= C e^{lambda phi*(j/lambda)}` for `j <= jmax`.
pub fn factorial_domination(
    c: &ConjugateEvaluator,
    a: f64,
    lambda: f64,
    jmax: u64,
) -> Result<DominationWitness, Error> {
    if !(a > 0.0 && lambda > 0.0) {
        return Err(Error::Precondition(
            "A > 0 and lambda > 0 are required".into(),
        ));
    }
    let trend = gamma_trend(c.weight().as_ref(), 1e8);
    if !trend.increasing {
        return Err(Error::Precondition(format!(
            "{} does not show omega(t)/log(1+t^2) increasing",
            c.weight().label()
        )));
    }
    let la = a.ln();
    let terms = par::map_range(jmax as usize + 1, |j| -> Result<f64, WeightError> {
        let jf = j as f64;
        Ok(jf * la + ln_gamma(jf + 1.0) - c.scaled(lambda, jf)?)
    });
    let mut best = (f64::NEG_INFINITY, 0u64);
    for (j, t) in terms.into_iter().enumerate() {
        let t = t?;
        if t > best.0 {
            best = (t, j as u64);
        }
    }
    Ok(DominationWitness {
        log_c: best.0,
        argmax_j: best.1,
        interior: best.1 > 0 && best.1 < jmax,
    })
}
