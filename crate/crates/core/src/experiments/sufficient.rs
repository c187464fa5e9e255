use serde::Serialize;

use super::{grows, log1p_exp};
use crate::error::Error;
use crate::functions::seminorm::{run_scan, IndexBox, ScanSpec};
use crate::functions::{ModelFunction, SeminormFamily, SeminormReport};
use crate::grid::Grid;
use crate::par;
use crate::report::{ChainReport, ChainRow, Check};
use crate::weights::{ConjugateEvaluator, Weight, WeightFunction};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SufficientRow {
    pub m: u32,
    /// `log C_m` over `1 <= j <= jmax`.
    pub log_c: f64,
    pub argmax_j: usize,
    pub argmax_x: f64,
    /// `log C_m` over `1 <= j <= jmax / 2`.
    pub log_c_half: f64,
    /// `log C_m` over grid points with `|x| <= radius / 2` and `|x| <= radius / 4`.
    pub log_c_inner: [f64; 2],
    pub grows_in_j: bool,
    /// The increment from half to full radius is positive and not smaller
    /// than the one from quarter to half radius.
    pub grows_in_radius: bool,
    pub grows: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SufficientReport {
    pub psi: String,
    pub weight: String,
    pub a: f64,
    pub p: f64,
    pub grid: String,
    pub jmax: usize,
    /// Smallest `C_0` with `|x| <= C_0 (1 + |ψ(x)|)^a` on the grid.
    pub c0: f64,
    pub c0_argmax: f64,
    pub rows: Vec<SufficientRow>,
    /// Some `C_m` still grows in `jmax` or in the grid radius.
    pub flagged: bool,
}

impl SufficientReport {
    pub fn to_chain(&self) -> ChainReport {
        let rows = self
            .rows
            .iter()
            .map(|r| ChainRow {
                index: r.m as u64,
                values: vec![
                    r.log_c,
                    r.argmax_j as f64,
                    r.argmax_x,
                    r.log_c_half,
                    r.log_c_inner[0],
                    r.log_c_inner[1],
                ],
                checks: vec![
                    Check::le(
                        "stable_in_j",
                        r.log_c,
                        r.log_c_half,
                        super::TREND_TOL * r.log_c_half.abs().max(1.0),
                    ),
                    Check::exact(
                        "decelerating_in_radius",
                        r.log_c - r.log_c_inner[0],
                        r.log_c_inner[0] - r.log_c_inner[1],
                        !r.grows_in_radius,
                    ),
                ],
            })
            .collect();
        let mut report = ChainReport::new(
            "sufficient",
            &[
                "log_c",
                "argmax_j",
                "argmax_x",
                "log_c_half",
                "log_c_half_radius",
                "log_c_quarter_radius",
            ],
        )
        .param("psi", self.psi.clone())
        .param("weight", self.weight.clone())
        .param("a", self.a)
        .param("p", self.p)
        .param("grid", self.grid.clone())
        .param("jmax", self.jmax)
        .param("C0", self.c0)
        .param("C0_argmax", self.c0_argmax);
        report.finish_rows(rows);
        report
    }
}

/// Measures `C_0` and `C_m`, `m ∈ m_list`, in
/// `|ψ^{(j)}(x)| <= C_m e^{mφ_σ*(j/m)} (1 + |ψ(x)|)^{a-1}` with `σ(t) = ω(t^{1/a})`.
/// Trends compare `jmax / 2` with `jmax`, and a quarter, half and full grid radius.
pub fn sufficient_condition_check(
    psi: &ModelFunction,
    omega: &WeightFunction,
    a: f64,
    m_list: &[u32],
    grid: &Grid,
    jmax: usize,
) -> Result<SufficientReport, Error> {
    if !(a >= 1.0) || m_list.is_empty() || m_list.contains(&0) || jmax < 2 {
        return Err(Error::Precondition(
            "a >= 1, a nonempty list of positive m and jmax >= 2 are required".into(),
        ));
    }
    let p = a - 1.0;
    let sigma = ConjugateEvaluator::auto(omega.clone().rescaled(a).into_arc());
    let penalties = m_list
        .iter()
        .map(|&m| crate::functions::seminorm::penalties(&sigma, m as f64, jmax))
        .collect::<Result<Vec<_>, _>>()?;
    let half = jmax / 2;
    let points = grid.points();

    // Per point: (log C_0 term, per m: (best full, argmax j, best half)).
    type PointBest = (f64, Vec<(f64, usize, f64)>);
    let per_point = par::map_slice(&points, |&x| -> Result<PointBest, Error> {
        let jet = psi.jet(x, jmax)?;
        let lpsi = log1p_exp(jet.values[0].log_abs());
        let c0 = x.abs().ln() - a * lpsi;
        let per_m = penalties
            .iter()
            .map(|pen| {
                let mut best = (f64::NEG_INFINITY, 0, f64::NEG_INFINITY);
                for j in 1..=jmax {
                    let v = jet.values[j];
                    if v.is_zero() {
                        continue;
                    }
                    let t = v.log_abs() - pen[j] - p * lpsi;
                    if t > best.0 {
                        best.0 = t;
                        best.1 = j;
                    }
                    if j <= half && t > best.2 {
                        best.2 = t;
                    }
                }
                best
            })
            .collect();
        Ok((c0, per_m))
    });

    let mut c0 = (f64::NEG_INFINITY, 0.0);
    let mut rows: Vec<SufficientRow> = m_list
        .iter()
        .map(|&m| SufficientRow {
            m,
            log_c: f64::NEG_INFINITY,
            argmax_j: 0,
            argmax_x: 0.0,
            log_c_half: f64::NEG_INFINITY,
            log_c_inner: [f64::NEG_INFINITY; 2],
            grows_in_j: false,
            grows_in_radius: false,
            grows: false,
        })
        .collect();
    let radius = grid.radius();
    for (x, r) in points.iter().zip(per_point) {
        let (t0, per_m) = r?;
        if t0 > c0.0 {
            c0 = (t0, *x);
        }
        for (row, (full, j, halfv)) in rows.iter_mut().zip(per_m) {
            if full > row.log_c {
                row.log_c = full;
                row.argmax_j = j;
                row.argmax_x = *x;
            }
            row.log_c_half = row.log_c_half.max(halfv);
            for (slot, div) in row.log_c_inner.iter_mut().zip([2.0, 4.0]) {
                if x.abs() <= radius / div {
                    *slot = slot.max(full);
                }
            }
        }
    }
    for row in &mut rows {
        let [half_r, quarter_r] = row.log_c_inner;
        row.grows_in_j = grows(row.log_c, row.log_c_half);
        row.grows_in_radius = grows(row.log_c, half_r)
            && (quarter_r == f64::NEG_INFINITY || row.log_c - half_r >= half_r - quarter_r);
        row.grows = row.grows_in_j || row.grows_in_radius;
    }
    Ok(SufficientReport {
        psi: psi.to_string(),
        weight: omega.label(),
        a,
        p,
        grid: grid.to_string(),
        jmax,
        c0: c0.0.exp(),
        c0_argmax: c0.1,
        flagged: rows.iter().any(|r| r.grows),
        rows,
    })
}

/// Lower estimate of `sup |x^q (f∘ψ)^{(j)}(x)| e^{-mφ_σ*((j+q)/m)}` over
/// `j <= jmax`, `q <= qmax`, `j + q <= cap` and the grid.
#[allow(clippy::too_many_arguments)]
pub fn composed_seminorm_bound(
    f: &ModelFunction,
    psi: &ModelFunction,
    sigma: &ConjugateEvaluator,
    m: f64,
    grid: &Grid,
    jmax: usize,
    qmax: usize,
    cap: Option<usize>,
) -> Result<SeminormReport, Error> {
    if !(m > 0.0) {
        return Err(Error::Precondition("m must be positive".into()));
    }
    let composed = ModelFunction::compose(f.clone(), psi.clone());
    run_scan(
        ScanSpec {
            family: SeminormFamily::Composed,
            function: composed.to_string(),
            conj: sigma,
            lambda: m,
            mu: None,
            grid,
            idx: IndexBox {
                j_max: jmax,
                k_max: qmax,
                cap,
            },
            j_limit: composed.max_order(),
        },
        |x, j| composed.jet(x, j).map_err(Error::from),
        |_| Ok(0.0),
    )
}
