//! Weight functions `omega`, the convex profile `phi(x) = omega(e^x)`, and
//! their Young conjugates.

mod conditions;
mod conjugate;

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

pub(crate) use conditions::doubling_witness;
pub use conditions::{
    check_weight_conditions, conjugate_shift_bound, default_test_points, dilation_constant,
    factorial_domination, verify_dilation, ConditionRow, ConvexityCheck, DominationWitness,
    EpsilonCheck, GammaTrend, IntegralCheck, SearchBounds, WeightConditionReport, WitnessCheck,
};
pub use conjugate::{ConjugateEvaluator, ConjugateMethod, SUP_REL_TOL};

use crate::error::{ParseError, WeightError};

/// Anything that can serve as a weight: evaluation on `[0, ∞)` plus the
/// optional closed-form conjugate.
pub trait Weight: Send + Sync + fmt::Debug {
    /// `omega(|t|)`.
    fn eval(&self, t: f64) -> Result<f64, WeightError>;

    /// `phi(x) = omega(e^x)`.
    fn phi(&self, x: f64) -> Result<f64, WeightError> {
        self.eval(x.exp())
    }

    /// `phi*(s)` when a closed form is known.
    fn closed_conjugate(&self, _s: f64) -> Option<f64> {
        None
    }

    /// Points (in `x = log t`) where `phi` is not smooth.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }

    fn label(&self) -> String;
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    ts: Vec<f64>,
    omegas: Vec<f64>,
}

impl Table {
    /// Requires strictly increasing `t >= 0` and nondecreasing, nonnegative `omega`.
    pub fn new(ts: Vec<f64>, omegas: Vec<f64>) -> Result<Self, ParseError> {
        let bad = |m: String| Err(ParseError::Weight(m));
        if ts.len() != omegas.len() || ts.len() < 2 {
            return bad("table needs at least two (t, omega) rows".into());
        }
        if ts[0] < 0.0 {
            return bad("table t values must be nonnegative".into());
        }
        for i in 1..ts.len() {
            if ts[i] <= ts[i - 1] {
                return bad(format!("t must be strictly increasing (row {i})"));
            }
            if omegas[i] < omegas[i - 1] {
                return bad(format!("omega must be nondecreasing (row {i})"));
            }
        }
        if omegas.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return bad("omega values must be finite and nonnegative".into());
        }
        Ok(Table { ts, omegas })
    }

    pub fn from_csv(path: &Path) -> Result<Self, ParseError> {
        let err = |m: String| ParseError::Table {
            path: path.display().to_string(),
            message: m,
        };
        let mut rdr = csv::Reader::from_path(path).map_err(|e| err(e.to_string()))?;
        let headers = rdr.headers().map_err(|e| err(e.to_string()))?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "omega" {
            return Err(err("expected header `t,omega`".into()));
        }
        let mut ts = Vec::new();
        let mut ws = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| err(e.to_string()))?;
            let t: f64 = rec[0]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad t `{}`", &rec[0])))?;
            let w: f64 = rec[1]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad omega `{}`", &rec[1])))?;
            ts.push(t);
            ws.push(w);
        }
        Table::new(ts, ws)
    }

    fn range(&self) -> (f64, f64) {
        (self.ts[0], *self.ts.last().unwrap())
    }

    /// Piecewise linear in `(log t, omega)`; linear in `t` on a leading `[0, t1]` segment.
    fn eval(&self, t: f64) -> Result<f64, WeightError> {
        let (lo, hi) = self.range();
        if t < lo || t > hi || t.is_nan() {
            return Err(WeightError::OutOfRange { t, lo, hi });
        }
        let i = match self.ts.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => return Ok(self.omegas[i]),
            Err(i) => i - 1,
        };
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let (w0, w1) = (self.omegas[i], self.omegas[i + 1]);
        let frac = if t0 == 0.0 {
            t / t1
        } else {
            (t / t0).ln() / (t1 / t0).ln()
        };
        Ok(w0 + frac * (w1 - w0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightFunction {
    /// `t^(1/d)`.
    Gevrey {
        d: f64,
    },
    /// `max(0, log(t)^s)`.
    LogPow {
        s: f64,
    },
    Tabulated(Table),
    /// `omega(t^(1/a))` for an inner weight `omega`.
    Rescaled {
        inner: Box<WeightFunction>,
        a: f64,
    },
}

impl WeightFunction {
    pub fn gevrey(d: f64) -> Self {
        WeightFunction::Gevrey { d }
    }

    pub fn logpow(s: f64) -> Self {
        WeightFunction::LogPow { s }
    }

    pub fn rescaled(self, a: f64) -> Self {
        WeightFunction::Rescaled {
            inner: Box::new(self),
            a,
        }
    }

    pub fn into_arc(self) -> Arc<dyn Weight> {
        Arc::new(self)
    }
}

/// Evaluates `omega(|t|)`.
pub fn eval_weight(w: &dyn Weight, t: f64) -> Result<f64, WeightError> {
    w.eval(t.abs())
}

impl Weight for WeightFunction {
    fn eval(&self, t: f64) -> Result<f64, WeightError> {
        let t = t.abs();
        match self {
            WeightFunction::Gevrey { d } => Ok(t.powf(1.0 / d)),
            WeightFunction::LogPow { s } => {
                if t <= 1.0 {
                    Ok(0.0)
                } else {
                    Ok(t.ln().powf(*s))
                }
            }
            WeightFunction::Tabulated(table) => table.eval(t),
            WeightFunction::Rescaled { inner, a } => inner.eval(t.powf(1.0 / a)),
        }
    }

    fn phi(&self, x: f64) -> Result<f64, WeightError> {
        match self {
            WeightFunction::Gevrey { d } => Ok((x / d).exp()),
            WeightFunction::LogPow { s } => Ok(if x <= 0.0 { 0.0 } else { x.powf(*s) }),
            WeightFunction::Tabulated(table) => table.eval(x.exp()),
            WeightFunction::Rescaled { inner, a } => inner.phi(x / a),
        }
    }

    fn closed_conjugate(&self, s: f64) -> Option<f64> {
        match self {
            WeightFunction::Gevrey { d } => {
                let sd = s * d;
                // Maximizer t = d log(sd) leaves [0, ∞) when sd <= 1; sup pinned at t = 0.
                Some(if sd <= 1.0 {
                    -1.0
                } else {
                    sd * (sd.ln() - 1.0)
                })
            }
            WeightFunction::LogPow { s: p } => {
                // sup_{t>=0} s t - t^p, attained at t = (s/p)^(1/(p-1)).
                if *p <= 1.0 {
                    return None;
                }
                Some((p - 1.0) * (s / p).powf(p / (p - 1.0)))
            }
            WeightFunction::Tabulated(_) => None,
            WeightFunction::Rescaled { inner, a } => inner.closed_conjugate(a * s),
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match self {
            WeightFunction::Gevrey { .. } => Vec::new(),
            WeightFunction::LogPow { .. } => vec![0.0],
            WeightFunction::Tabulated(t) => {
                t.ts.iter().filter(|&&t| t > 0.0).map(|t| t.ln()).collect()
            }
            WeightFunction::Rescaled { inner, a } => {
                inner.kinks().into_iter().map(|x| x * a).collect()
            }
        }
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::Gevrey { d } => write!(f, "gevrey:d={d}"),
            WeightFunction::LogPow { s } => write!(f, "logpow:s={s}"),
            WeightFunction::Tabulated(t) => write!(f, "table[{} rows]", t.ts.len()),
            WeightFunction::Rescaled { inner, a } => write!(f, "rescaled({inner},a={a})"),
        }
    }
}

/// Parses `key=value` pairs after the first `:`.
pub(crate) fn parse_params(body: &str) -> Result<Vec<(String, String)>, String> {
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| format!("expected key=value, got `{kv}`"))
        })
        .collect()
}

pub(crate) fn param_f64(params: &[(String, String)], key: &str) -> Result<f64, String> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .ok_or_else(|| format!("missing parameter `{key}`"))?
        .1
        .parse::<f64>()
        .map_err(|_| format!("parameter `{key}` is not a number"))
}

impl FromStr for WeightFunction {
    type Err = ParseError;

    /// `gevrey:d=<real>`, `logpow:s=<real>` or `table:<path.csv>`.
    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let err = |m: String| ParseError::Weight(format!("`{spec}`: {m}"));
        let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
        match kind.trim() {
            "gevrey" => {
                let d = param_f64(&parse_params(body).map_err(err)?, "d").map_err(err)?;
                if !(d > 0.0 && d.is_finite()) {
                    return Err(err("d must be positive".into()));
                }
                Ok(WeightFunction::Gevrey { d })
            }
            "logpow" => {
                let s = param_f64(&parse_params(body).map_err(err)?, "s").map_err(err)?;
                if !(s > 1.0 && s.is_finite()) {
                    return Err(err("s must exceed 1".into()));
                }
                Ok(WeightFunction::LogPow { s })
            }
            "table" => Ok(WeightFunction::Tabulated(Table::from_csv(Path::new(
                body.trim(),
            ))?)),
            other => Err(err(format!("unknown weight kind `{other}`"))),
        }
    }
}
