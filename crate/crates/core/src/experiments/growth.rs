use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::grows;
use crate::error::{Error, FunctionError};
use crate::functions::ModelFunction;
use crate::grid::Grid;
use crate::par;
use crate::report::{ChainReport, ChainRow, Check, CHAIN_TOL};
use crate::weights::Weight;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NecessaryReport {
    pub psi: String,
    pub sigma: String,
    pub omega: String,
    pub grid: String,
    /// `max σ(x) / (1 + ω(ψ(x)))` on the grid.
    pub c: f64,
    pub argmax_x: f64,
    /// Same maximum over grid points with `|x| <= radius / 2`.
    pub c_inner: f64,
    pub grows: bool,
    /// `(x, ratio)` for every grid point.
    pub ratios: Vec<(f64, f64)>,
}

impl NecessaryReport {
    pub fn to_chain(&self) -> ChainReport {
        let mut rows: Vec<ChainRow> = self
            .ratios
            .iter()
            .enumerate()
            .map(|(i, &(x, r))| ChainRow {
                index: i as u64,
                values: vec![x, r],
                checks: Vec::new(),
            })
            .collect();
        if let Some(last) = rows.last_mut() {
            last.checks.push(Check::le(
                "bounded_in_radius",
                self.c,
                self.c_inner,
                super::TREND_TOL * self.c_inner.abs().max(1.0),
            ));
        }
        let mut report = ChainReport::new("necessary", &["x", "ratio"])
            .param("psi", self.psi.clone())
            .param("sigma", self.sigma.clone())
            .param("omega", self.omega.clone())
            .param("grid", self.grid.clone())
            .param("C", self.c)
            .param("argmax_x", self.argmax_x)
            .param("C_inner", self.c_inner);
        report.finish_rows(rows);
        report
    }
}

/// Measures `C` in `σ(x) <= C (1 + ω(ψ(x)))` on the grid, flagging growth
/// between the inner half of the grid and the full grid.
pub fn necessary_growth(
    psi: &ModelFunction,
    sigma: &dyn Weight,
    omega: &dyn Weight,
    grid: &Grid,
) -> Result<NecessaryReport, Error> {
    let points = grid.points();
    let ratios = par::map_slice(&points, |&x| -> Result<(f64, f64), Error> {
        Ok((
            x,
            sigma.eval(x.abs())? / (1.0 + omega.eval(psi.value(x).abs())?),
        ))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let inner = grid.radius() / 2.0;
    let mut best = (f64::NEG_INFINITY, 0.0);
    let mut best_inner = f64::NEG_INFINITY;
    for &(x, r) in &ratios {
        if r > best.0 {
            best = (r, x);
        }
        if x.abs() <= inner {
            best_inner = best_inner.max(r);
        }
    }
    Ok(NecessaryReport {
        psi: psi.to_string(),
        sigma: sigma.label(),
        omega: omega.label(),
        grid: grid.to_string(),
        c: best.0,
        argmax_x: best.1,
        c_inner: best_inner,
        grows: grows(best.0, best_inner),
        ratios,
    })
}

/// Rows `j = 0..=jmax`: the smallest `B` with `|ψ^{(j)}(x)| <= j! B^{j+1}` over
/// the grid, and, where the family has a unit growth constant, the Cauchy
/// prediction `j! (1 + |x| + r)^{a_2} / r^j` with `r = δ|x|` for `|x| >= 1`.
pub fn cauchy_derivative_bound(
    psi: &ModelFunction,
    delta: f64,
    grid: &Grid,
    jmax: usize,
) -> Result<ChainReport, Error> {
    let a2 = psi
        .analytic_growth()
        .ok_or_else(|| FunctionError::Capability {
            family: psi.family().into(),
            what: "Cauchy estimates (no analyticity metadata)".into(),
        })?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition("delta must lie in (0, 1)".into()));
    }
    let unit_constant = match psi {
        ModelFunction::Sqrt1px2 => true,
        ModelFunction::Pow1px2 { a } => *a >= 0.0,
        _ => false,
    };
    let points = grid.points();
    let jets = par::map_slice(&points, |&x| psi.jet(x, jmax))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let rows = par::map_range(jmax + 1, |j| {
        let lf = ln_gamma(j as f64 + 1.0);
        let mut cand = (f64::NEG_INFINITY, 0.0);
        let mut margin = f64::NEG_INFINITY;
        for (&x, jet) in points.iter().zip(&jets) {
            let v = jet.values[j];
            if v.is_zero() {
                continue;
            }
            let c = (v.log_abs() - lf) / (j as f64 + 1.0);
            if c > cand.0 {
                cand = (c, x);
            }
            if unit_constant && x.abs() >= 1.0 {
                let r = delta * x.abs();
                let pred = lf + a2 * (1.0 + x.abs() + r).ln() - j as f64 * r.ln();
                margin = margin.max(v.log_abs() - pred);
            }
        }
        let mut checks = Vec::new();
        if margin > f64::NEG_INFINITY {
            checks.push(Check::le("cauchy", margin, 0.0, CHAIN_TOL));
        }
        ChainRow {
            index: j as u64,
            values: vec![cand.0, cand.1, margin],
            checks,
        }
    });
    let log_b = rows
        .iter()
        .map(|r| r.values[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let mut report = ChainReport::new("cauchy", &["log_b_candidate", "argmax_x", "log_margin"])
        .param("psi", psi.to_string())
        .param("delta", delta)
        .param("grid", grid.to_string())
        .param("jmax", jmax)
        .param("log_B", log_b)
        .param("B", log_b.exp());
    report.finish_rows(rows);
    if !unit_constant {
        report
            .notes
            .push("no unit growth constant for this family; Cauchy prediction not checked".into());
    }
    Ok(report)
}
