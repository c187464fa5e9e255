//! Weight sequences `M_p`, their growth conditions, and the associated
//! weight `M(t) = sup_p log(t^p / M_p)`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, ParseError, WeightError};
use crate::grid::Grid;
use crate::par;
use crate::weights::{
    default_test_points, param_f64, parse_params, ConditionRow, ConjugateEvaluator, Weight,
};

/// Index range of the internal associated weight used for conjugates of
/// generator-backed sequences.
const GENERATOR_PMAX: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
enum Source {
    /// `M_p = (p!)^d`.
    Gevrey { d: f64 },
    /// `log M_p` for `p = 0..len`.
    Table(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    source: Source,
    log_convex: bool,
}

impl WeightSequence {
    pub fn gevrey(d: f64) -> Self {
        WeightSequence {
            source: Source::Gevrey { d },
            log_convex: true,
        }
    }

    /// Requires `log M_0 = 0` and at least two entries.
    pub fn from_log_table(log_m: Vec<f64>) -> Result<Self, ParseError> {
        if log_m.len() < 2 {
            return Err(ParseError::Sequence("table needs at least two rows".into()));
        }
        if log_m[0] != 0.0 {
            return Err(ParseError::Sequence("log M_0 must be 0".into()));
        }
        if log_m.iter().any(|v| !v.is_finite()) {
            return Err(ParseError::Sequence("log M_p must be finite".into()));
        }
        let log_convex =
            (2..log_m.len()).all(|p| log_m[p] - log_m[p - 1] >= log_m[p - 1] - log_m[p - 2]);
        Ok(WeightSequence {
            source: Source::Table(log_m),
            log_convex,
        })
    }

    /// Two-column CSV `p,logMp` with `p = 0, 1, 2, ...` in order.
    pub fn from_csv(path: &Path) -> Result<Self, ParseError> {
        let err = |m: String| ParseError::Table {
            path: path.display().to_string(),
            message: m,
        };
        let mut rdr = csv::Reader::from_path(path).map_err(|e| err(e.to_string()))?;
        let headers = rdr.headers().map_err(|e| err(e.to_string()))?.clone();
        if headers.len() != 2 || &headers[0] != "p" || &headers[1] != "logMp" {
            return Err(err("expected header `p,logMp`".into()));
        }
        let mut log_m = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| err(e.to_string()))?;
            let p: usize = rec[0]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad p `{}`", &rec[0])))?;
            if p != i {
                return Err(err(format!("expected p = {i}, found {p}")));
            }
            let v: f64 = rec[1]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad logMp `{}`", &rec[1])))?;
            log_m.push(v);
        }
        Self::from_log_table(log_m)
    }

    pub fn is_log_convex(&self) -> bool {
        self.log_convex
    }

    /// Largest available index, `None` for generator sequences.
    pub fn max_index(&self) -> Option<usize> {
        match &self.source {
            Source::Gevrey { .. } => None,
            Source::Table(v) => Some(v.len() - 1),
        }
    }

    fn out_of_table(&self, p: usize) -> WeightError {
        WeightError::SequenceOutOfTable {
            p,
            len: self.max_index().map_or(0, |m| m + 1),
        }
    }

    /// `log M_p`.
    pub fn log_m(&self, p: usize) -> Result<f64, WeightError> {
        match &self.source {
            Source::Gevrey { d } => Ok(if p < 2 {
                0.0
            } else {
                d * ln_gamma(p as f64 + 1.0)
            }),
            Source::Table(v) => v.get(p).copied().ok_or_else(|| self.out_of_table(p)),
        }
    }

    /// `log m_p = log M_p - log M_{p-1}` for `p >= 1`.
    pub fn log_quotient(&self, p: usize) -> Result<f64, WeightError> {
        assert!(p >= 1, "quotients start at p = 1");
        match &self.source {
            Source::Gevrey { d } => Ok(d * (p as f64).ln()),
            Source::Table(v) => {
                if p >= v.len() {
                    return Err(self.out_of_table(p));
                }
                Ok(v[p] - v[p - 1])
            }
        }
    }

    /// `log(m_q / m_p)`.
    pub fn log_quotient_ratio(&self, p: usize, q: usize) -> Result<f64, WeightError> {
        match &self.source {
            Source::Gevrey { d } => Ok(d * (q as f64 / p as f64).ln()),
            Source::Table(_) => Ok(self.log_quotient(q)? - self.log_quotient(p)?),
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            Source::Gevrey { d } => write!(f, "gevreyseq:d={d}"),
            Source::Table(v) => write!(f, "table[{} rows]", v.len()),
        }
    }
}

impl FromStr for WeightSequence {
    type Err = ParseError;

    /// `gevreyseq:d=<real>` or `table:<path.csv>`.
    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let err = |m: String| ParseError::Sequence(format!("`{spec}`: {m}"));
        let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
        match kind.trim() {
            "gevreyseq" => {
                let d = param_f64(&parse_params(body).map_err(err)?, "d").map_err(err)?;
                if !(d > 0.0 && d.is_finite()) {
                    return Err(err("d must be positive".into()));
                }
                Ok(WeightSequence::gevrey(d))
            }
            "table" => WeightSequence::from_csv(Path::new(body.trim())),
            other => Err(err(format!("unknown sequence kind `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct M0Check {
    /// Largest `c` with `(c (p+1))^p <= M_p` for `1 <= p <= P`.
    pub c: f64,
    pub binding_p: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct M1Check {
    pub checked: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct M2Check {
    pub a: f64,
    /// Smallest `H` with `M_p <= A H^p M_q M_{p-q}` for `p <= P`, given `A`.
    pub h: f64,
    pub binding_p: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailEstimate {
    /// Fitted exponent in `m_j ~ m_J (j / J)^alpha`.
    pub alpha: f64,
    /// Midpoint integral estimate of `Σ_{j > J} 1/m_j`.
    pub estimate: f64,
    /// `∫_J^∞` bound, valid when `1/m_j` is decreasing.
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gamma1Check {
    /// `sup_{1<=p<=P} (m_p / p) Σ_{j>=p} 1/m_j` with the estimated tail.
    pub sup: f64,
    /// Same supremum with the tail replaced by its upper bound.
    pub sup_upper: f64,
    pub argmax_p: usize,
    pub p_max: usize,
    pub j_max: usize,
    pub tail: Option<TailEstimate>,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct M3PrimeCheck {
    pub partial_sum: f64,
    pub tail: Option<TailEstimate>,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PetzscheCheck {
    /// `(Q, log liminf m_{Qj}/m_j)` estimated over `P/2 <= j <= P`.
    pub per_q: Vec<(usize, f64)>,
    pub best_q: usize,
    pub best_log_liminf: f64,
    pub outcome: Outcome,
}

impl PetzscheCheck {
    pub fn liminf(&self, q: usize) -> Option<f64> {
        self.per_q
            .iter()
            .find(|(qq, _)| *qq == q)
            .map(|(_, l)| l.exp())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceConditionReport {
    pub sequence: String,
    pub m0: M0Check,
    pub m1: M1Check,
    pub m2: M2Check,
    pub gamma1: Gamma1Check,
    pub m3prime: M3PrimeCheck,
    pub petzsche: PetzscheCheck,
}

impl SequenceConditionReport {
    pub fn rows(&self) -> Vec<ConditionRow> {
        let grid = format!("p<={}, j<={}", self.gamma1.p_max, self.gamma1.j_max);
        let row = |c: &str, w: Option<f64>, v: bool| ConditionRow {
            condition: c.to_string(),
            witness: w,
            grid: grid.clone(),
            verdict: v,
        };
        vec![
            row("M0", Some(self.m0.c), self.m0.c > 0.0),
            row(
                "M1",
                Some(self.m1.violations as f64),
                self.m1.violations == 0,
            ),
            row("M2", Some(self.m2.h), self.m2.h.is_finite()),
            row(
                "gamma1",
                Some(self.gamma1.sup),
                self.gamma1.outcome == Outcome::Holds,
            ),
            row(
                "M3prime",
                Some(self.m3prime.partial_sum),
                self.m3prime.outcome == Outcome::Holds,
            ),
            row(
                "petzsche",
                Some(self.petzsche.best_log_liminf.exp()),
                self.petzsche.outcome == Outcome::Holds,
            ),
        ]
    }
}

fn tail_estimate(m: &WeightSequence, j: usize) -> Result<Option<TailEstimate>, WeightError> {
    let lj = m.log_quotient(j)?;
    let alpha = m.log_quotient_ratio(j / 2, j)? / (j as f64 / (j / 2) as f64).ln();
    if !(alpha > 1.0 + 1e-9) {
        return Ok(None);
    }
    let jf = j as f64;
    let inv_mj = (-lj).exp();
    Ok(Some(TailEstimate {
        alpha,
        estimate: inv_mj * jf.powf(alpha) * (jf + 0.5).powf(1.0 - alpha) / (alpha - 1.0),
        upper: inv_mj * jf / (alpha - 1.0),
    }))
}

/// Checks (M0), (M1), (M2), (γ₁), (M3)' and the Petzsche criterion on
/// `p <= P`, with sums truncated at `J` plus an integral tail.
pub fn check_sequence_conditions(
    m: &WeightSequence,
    p_max: usize,
    j_max: usize,
) -> Result<SequenceConditionReport, Error> {
    if p_max < 50 || j_max < 10 * p_max {
        return Err(Error::Precondition(format!(
            "need P >= 50 and J >= 10 P (got P = {p_max}, J = {j_max})"
        )));
    }
    let log_m: Vec<f64> = (0..=j_max).map(|p| m.log_m(p)).collect::<Result<_, _>>()?;
    let log_q: Vec<f64> = std::iter::once(f64::NAN)
        .chain(
            (1..=j_max)
                .map(|p| m.log_quotient(p))
                .collect::<Result<Vec<_>, _>>()?,
        )
        .collect();

    let mut m0 = M0Check {
        c: f64::INFINITY,
        binding_p: 0,
    };
    for p in 1..=p_max {
        let c = (log_m[p] / p as f64).exp() / (p as f64 + 1.0);
        if c < m0.c {
            m0 = M0Check { c, binding_p: p };
        }
    }

    let violations = (2..=j_max).filter(|&p| log_q[p] < log_q[p - 1]).count();
    let m1 = M1Check {
        checked: j_max - 1,
        violations,
    };

    let d_p = par::map_range(p_max + 1, |p| {
        (0..=p)
            .map(|q| log_m[p] - log_m[q] - log_m[p - q])
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let (mut h_log, mut h_p) = (0.0f64, 0usize);
    for (p, &dp) in d_p.iter().enumerate().skip(1) {
        if dp / p as f64 > h_log {
            h_log = dp / p as f64;
            h_p = p;
        }
    }
    let m2 = M2Check {
        a: 1.0,
        h: h_log.exp(),
        binding_p: h_p,
    };

    // Suffix sums Σ_{p<=j<=J} 1/m_j, smallest terms first.
    let mut suffix = vec![0.0; j_max + 2];
    for j in (1..=j_max).rev() {
        suffix[j] = suffix[j + 1] + (-log_q[j]).exp();
    }
    let tail = if m1.violations == 0 {
        tail_estimate(m, j_max)?
    } else {
        None
    };
    let (est, upper) = tail.as_ref().map_or((0.0, 0.0), |t| (t.estimate, t.upper));
    let mut gamma1 = Gamma1Check {
        sup: 0.0,
        sup_upper: 0.0,
        argmax_p: 0,
        p_max,
        j_max,
        tail: tail.clone(),
        outcome: Outcome::Inconclusive,
    };
    for p in 1..=p_max {
        let scale = log_q[p] - (p as f64).ln();
        let v = (scale + (suffix[p] + est).ln()).exp();
        let vu = (scale + (suffix[p] + upper).ln()).exp();
        if v > gamma1.sup {
            gamma1.sup = v;
            gamma1.argmax_p = p;
        }
        gamma1.sup_upper = gamma1.sup_upper.max(vu);
    }
    gamma1.outcome = if m1.violations > 0 {
        Outcome::Inconclusive
    } else if tail.is_none() {
        Outcome::Fails
    } else {
        Outcome::Holds
    };

    let m3prime = M3PrimeCheck {
        partial_sum: suffix[1],
        tail: tail.clone(),
        outcome: gamma1.outcome,
    };

    let lo = (p_max / 2).max(1);
    let mut per_q = Vec::new();
    for q in 2..=8usize {
        if let Some(max) = m.max_index() {
            if q * lo > max {
                continue;
            }
        }
        let mut liminf = f64::INFINITY;
        for j in lo..=p_max {
            if m.max_index().is_some_and(|max| q * j > max) {
                break;
            }
            liminf = liminf.min(m.log_quotient_ratio(j, q * j)?);
        }
        per_q.push((q, liminf));
    }
    let (best_q, best_log_liminf) =
        per_q
            .iter()
            .copied()
            .fold((0, f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b });
    let petzsche = PetzscheCheck {
        per_q,
        best_q,
        best_log_liminf,
        outcome: if best_log_liminf > 0.0 {
            Outcome::Holds
        } else if best_q == 0 {
            Outcome::Inconclusive
        } else {
            Outcome::Fails
        },
    };

    Ok(SequenceConditionReport {
        sequence: m.label(),
        m0,
        m1,
        m2,
        gamma1,
        m3prime,
        petzsche,
    })
}

/// `M(t) = sup_{0 <= p <= pmax} (p log t - log M_p)`, usable wherever a
/// [`Weight`] is expected.
#[derive(Clone, Debug)]
pub struct AssociatedWeight {
    seq: WeightSequence,
    pmax: usize,
}

impl AssociatedWeight {
    pub fn new(seq: WeightSequence, pmax: usize) -> Result<Self, WeightError> {
        if let Some(max) = seq.max_index() {
            if pmax > max {
                return Err(WeightError::SequenceOutOfTable {
                    p: pmax,
                    len: max + 1,
                });
            }
        }
        Ok(AssociatedWeight { seq, pmax })
    }

    /// Largest index range the sequence supports.
    pub fn wide(seq: WeightSequence) -> Self {
        let pmax = seq.max_index().unwrap_or(GENERATOR_PMAX);
        AssociatedWeight { seq, pmax }
    }

    pub fn pmax(&self) -> usize {
        self.pmax
    }

    pub fn sequence(&self) -> &WeightSequence {
        &self.seq
    }

    /// `(M(e^x), p*)` with the smallest maximizing index.
    pub fn eval_log(&self, x: f64) -> Result<(f64, usize), WeightError> {
        if x <= 0.0 {
            return Ok((0.0, 0));
        }
        let p_star = if self.seq.is_log_convex() {
            // Concave in p: p* is the last index whose quotient lies strictly below e^x.
            let (mut lo, mut hi) = (0usize, self.pmax);
            while lo < hi {
                let mid = lo + (hi - lo).div_ceil(2);
                if self.seq.log_quotient(mid)? < x {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            lo
        } else {
            let mut best = (0.0, 0usize);
            for p in 1..=self.pmax {
                let v = p as f64 * x - self.seq.log_m(p)?;
                if v > best.0 {
                    best = (v, p);
                }
            }
            best.1
        };
        if p_star == self.pmax {
            return Err(WeightError::Truncated {
                t: x.exp(),
                pmax: self.pmax,
            });
        }
        Ok((p_star as f64 * x - self.seq.log_m(p_star)?, p_star))
    }

    /// `(M(t), p*)`; `M(0) = 0` by the formula.
    pub fn eval_with_argmax(&self, t: f64) -> Result<(f64, usize), WeightError> {
        let t = t.abs();
        if t == 0.0 {
            return Ok((0.0, 0));
        }
        self.eval_log(t.ln())
    }
}

impl Weight for AssociatedWeight {
    fn eval(&self, t: f64) -> Result<f64, WeightError> {
        self.eval_with_argmax(t).map(|v| v.0)
    }

    fn phi(&self, x: f64) -> Result<f64, WeightError> {
        self.eval_log(x).map(|v| v.0)
    }

    fn label(&self) -> String {
        format!("assoc({})", self.seq)
    }
}

/// `(M(t), p*)` over `0 <= p <= pmax`.
pub fn associated_weight(
    m: &WeightSequence,
    t: f64,
    pmax: usize,
) -> Result<(f64, usize), WeightError> {
    AssociatedWeight::new(m.clone(), pmax)?.eval_with_argmax(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SandwichDirection {
    /// `exp(k phi_M*(p/k)) <= C h^p M_p`: given `h`, find `k`.
    SeqDominates,
    /// `h^p M_p <= D exp(k phi_M*(p/k))`: given `k`, find `h`.
    ConjDominates,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichWitness {
    pub direction: SandwichDirection,
    pub k: u32,
    pub h: f64,
    /// `log C` (or `log D`): the largest log ratio over `p <= pmax`.
    pub log_constant: f64,
    pub argmax_p: usize,
    pub log_ratios: Vec<f64>,
}

impl SandwichWitness {
    pub fn constant(&self) -> f64 {
        self.log_constant.exp()
    }
}

const MAX_K: u32 = 64;
const MAX_HALVINGS: u32 = 64;

fn sandwich_ratios(
    m: &WeightSequence,
    conj: &ConjugateEvaluator,
    dir: SandwichDirection,
    k: u32,
    h: f64,
    pmax: usize,
) -> Result<Vec<f64>, WeightError> {
    let kf = k as f64;
    let lh = h.ln();
    par::map_range(pmax + 1, |p| -> Result<f64, WeightError> {
        let c = kf * conj.eval(p as f64 / kf)?;
        let s = p as f64 * lh + m.log_m(p)?;
        Ok(match dir {
            SandwichDirection::SeqDominates => c - s,
            SandwichDirection::ConjDominates => s - c,
        })
    })
    .into_iter()
    .collect()
}

/// A ratio sequence counts as bounded when its maximum sits in the first
/// half of `[0, pmax]` and it is still decreasing at `pmax`.
fn bounded_trend(r: &[f64]) -> (bool, usize, f64) {
    let (argmax, max) = r
        .iter()
        .copied()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |b, (i, v)| if v > b.1 { (i, v) } else { b },
        );
    let n = r.len() - 1;
    let ok = n >= 2 && argmax <= n / 2 && r[n] < r[n - 1];
    (ok, argmax, max)
}

/// Finds the sandwich parameters and constant. `param` is `h` for
/// [`SandwichDirection::SeqDominates`] and `k` for the other direction.
pub fn sandwich_check(
    m: &WeightSequence,
    dir: SandwichDirection,
    param: f64,
    pmax: usize,
) -> Result<SandwichWitness, Error> {
    if pmax < 2 {
        return Err(Error::Precondition("pmax must be at least 2".into()));
    }
    let conj = ConjugateEvaluator::numeric(Arc::new(AssociatedWeight::wide(m.clone())));
    let witness = |k: u32, h: f64, r: Vec<f64>| {
        let (_, argmax_p, log_constant) = bounded_trend(&r);
        SandwichWitness {
            direction: dir,
            k,
            h,
            log_constant,
            argmax_p,
            log_ratios: r,
        }
    };
    match dir {
        SandwichDirection::SeqDominates => {
            let h = param;
            if !(h > 0.0 && h < 1.0) {
                return Err(Error::Precondition("h must lie in (0, 1)".into()));
            }
            let mut last = (0.0, 0);
            for k in 1..=MAX_K {
                let r = sandwich_ratios(m, &conj, dir, k, h, pmax)?;
                let (ok, argmax, _) = bounded_trend(&r);
                if ok {
                    return Ok(witness(k, h, r));
                }
                last = (r[pmax], argmax);
            }
            Err(Error::SearchExhausted(format!(
                "no k <= {MAX_K}: at k = {MAX_K} the log ratio at p = {pmax} is {} (max at p = {})",
                last.0, last.1
            )))
        }
        SandwichDirection::ConjDominates => {
            if !(param >= 1.0 && param.fract() == 0.0 && param <= MAX_K as f64) {
                return Err(Error::Precondition(format!(
                    "k must be an integer in 1..={MAX_K}"
                )));
            }
            let k = param as u32;
            let mut h = 1.0;
            let mut last = (0.0, 0);
            for _ in 0..MAX_HALVINGS {
                h *= 0.5;
                let r = sandwich_ratios(m, &conj, dir, k, h, pmax)?;
                let (ok, argmax, _) = bounded_trend(&r);
                if ok {
                    return Ok(witness(k, h, r));
                }
                last = (r[pmax], argmax);
            }
            Err(Error::SearchExhausted(format!(
                "no h >= 2^-{MAX_HALVINGS}: last log ratio at p = {pmax} is {} (max at p = {})",
                last.0, last.1
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceDoubling {
    pub h: Option<u64>,
    pub grid_points: usize,
    pub failure: Option<String>,
}

/// Smallest integer `H <= 10^6` with `2 M(t) <= M(H t) + H` on `grid` (and `t = 0`).
pub fn doubling_from_sequence(m: &WeightSequence, grid: Option<&Grid>) -> SequenceDoubling {
    let pts = match grid {
        Some(g) => g.points(),
        None => default_test_points(),
    };
    let xs: Vec<f64> = pts.iter().filter(|&&t| t > 0.0).map(|t| t.ln()).collect();
    let w = AssociatedWeight::wide(m.clone());
    let wc = crate::weights::doubling_witness(&w, &xs, 0.0, 1_000_000);
    SequenceDoubling {
        h: wc.witness,
        grid_points: xs.len() + 1,
        failure: wc.failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gevrey_quotients_are_powers() {
        let m = WeightSequence::gevrey(2.0);
        for p in 1..300 {
            let direct = m.log_m(p).unwrap() - m.log_m(p - 1).unwrap();
            assert!((direct - m.log_quotient(p).unwrap()).abs() <= 1e-12 * direct.abs().max(1.0));
        }
        assert_eq!(m.log_m(0).unwrap(), 0.0);
    }

    #[test]
    fn gevrey_two_report() {
        let r = check_sequence_conditions(&WeightSequence::gevrey(2.0), 200, 2000).unwrap();
        assert!(
            (r.gamma1.sup - PI * PI / 6.0).abs() < 1e-6,
            "{:?}",
            r.gamma1
        );
        assert_eq!(r.gamma1.argmax_p, 1);
        assert_eq!(r.petzsche.per_q[0], (2, 4f64.ln()));
        assert_eq!(r.m0.c, 0.5);
        assert_eq!(r.m1.violations, 0);
        assert!(r.m2.h <= 4.0);
        assert_eq!(r.gamma1.outcome, Outcome::Holds);
    }

    #[test]
    fn factorial_sequence_fails_gamma1() {
        let r = check_sequence_conditions(&WeightSequence::gevrey(1.0), 50, 500).unwrap();
        assert_eq!(r.gamma1.outcome, Outcome::Fails);
    }

    #[test]
    fn precondition_on_truncation() {
        assert!(check_sequence_conditions(&WeightSequence::gevrey(2.0), 40, 400).is_err());
        assert!(check_sequence_conditions(&WeightSequence::gevrey(2.0), 50, 100).is_err());
    }

    #[test]
    fn associated_weight_examples() {
        let m = WeightSequence::gevrey(2.0);
        assert_eq!(associated_weight(&m, 1.0, 200).unwrap(), (0.0, 0));
        assert_eq!(associated_weight(&m, 0.0, 200).unwrap(), (0.0, 0));
        let (v, p) = associated_weight(&m, 4f64.exp(), 200).unwrap();
        assert_eq!(p, 7);
        let oracle = 28.0 - 2.0 * (1..=7).map(|k| (k as f64).ln()).sum::<f64>();
        assert!((v - oracle).abs() < 1e-12);
        let m3 = WeightSequence::gevrey(3.0);
        let (v, _) = associated_weight(&m3, 1e6, 2000).unwrap();
        assert!((v / 300.0 - 1.0).abs() < 0.05);
    }

    #[test]
    fn truncation_is_reported() {
        let m = WeightSequence::gevrey(2.0);
        assert!(matches!(
            associated_weight(&m, 1e6, 10),
            Err(WeightError::Truncated { pmax: 10, .. })
        ));
    }

    #[test]
    fn non_convex_table_uses_scan() {
        let m = WeightSequence::from_log_table(vec![0.0, 2.0, 2.5, 6.0, 12.0, 20.0]).unwrap();
        assert!(!m.is_log_convex());
        let (v, p) = associated_weight(&m, 3f64.exp(), 5).unwrap();
        let brute = (0..=5)
            .map(|p| (p as f64 * 3.0 - m.log_m(p).unwrap(), p))
            .fold((f64::NEG_INFINITY, 0), |b, x| if x.0 > b.0 { x } else { b });
        assert_eq!((v, p), brute);
    }

    #[test]
    fn sandwich_gevrey_two() {
        let m = WeightSequence::gevrey(2.0);
        let w = sandwich_check(&m, SandwichDirection::SeqDominates, 0.5, 300).unwrap();
        assert_eq!(w.k, 2);
        assert_eq!(w.log_ratios.len(), 301);
        assert!(w.log_ratios.iter().all(|&r| r <= w.log_constant));
        let w2 = sandwich_check(&m, SandwichDirection::ConjDominates, 1.0, 300).unwrap();
        assert_eq!(w2.h, 0.5);
        assert!(w2.log_constant.abs() < 1e-9);
    }

    #[test]
    fn doubling_witnesses() {
        assert_eq!(
            doubling_from_sequence(&WeightSequence::gevrey(2.0), None).h,
            Some(4)
        );
        assert_eq!(
            doubling_from_sequence(&WeightSequence::gevrey(3.0), None).h,
            Some(8)
        );
    }

    #[test]
    fn parses_specs() {
        assert_eq!(
            "gevreyseq:d=2".parse::<WeightSequence>().unwrap(),
            WeightSequence::gevrey(2.0)
        );
        assert!("gevreyseq:d=-1".parse::<WeightSequence>().is_err());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        std::fs::write(&p, "p,logMp\n0,0\n1,0\n2,1.3862943611198906\n").unwrap();
        let m: WeightSequence = format!("table:{}", p.display()).parse().unwrap();
        assert_eq!(m.max_index(), Some(2));
        std::fs::write(&p, "p,logMp\n0,1\n1,0\n").unwrap();
        assert!(format!("table:{}", p.display())
            .parse::<WeightSequence>()
            .is_err());
    }
}
