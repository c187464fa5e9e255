use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use super::Weight;
use crate::error::WeightError;

/// Golden-section stopping tolerance, relative to the bracket location.
pub const SUP_REL_TOL: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const BRACKET_LIMIT: f64 = 1e15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConjugateMethod {
    ClosedForm,
    NumericSup,
    /// Closed form when the weight has one, numeric otherwise.
    Auto,
}

/// Evaluates `phi*(s) = sup_{t >= 0} (s t - omega(e^t))`.
///
/// Numeric values are memoized; the cache is shared between threads.
pub struct ConjugateEvaluator {
    weight: Arc<dyn Weight>,
    method: ConjugateMethod,
    cache: RwLock<HashMap<u64, (f64, f64)>>,
}

impl fmt::Debug for ConjugateEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConjugateEvaluator")
            .field("weight", &self.weight.label())
            .field("method", &self.method)
            .finish()
    }
}

impl ConjugateEvaluator {
    pub fn new(weight: Arc<dyn Weight>, method: ConjugateMethod) -> Self {
        ConjugateEvaluator {
            weight,
            method,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn auto(weight: Arc<dyn Weight>) -> Self {
        Self::new(weight, ConjugateMethod::Auto)
    }

    pub fn numeric(weight: Arc<dyn Weight>) -> Self {
        Self::new(weight, ConjugateMethod::NumericSup)
    }

    pub fn weight(&self) -> &Arc<dyn Weight> {
        &self.weight
    }

    pub fn method(&self) -> ConjugateMethod {
        self.method
    }

    /// `phi*(s)` for `s >= 0`.
    pub fn eval(&self, s: f64) -> Result<f64, WeightError> {
        if s < 0.0 || s.is_nan() {
            return Err(WeightError::NegativeArgument(s));
        }
        match self.method {
            ConjugateMethod::ClosedForm => self
                .weight
                .closed_conjugate(s)
                .ok_or_else(|| WeightError::NoClosedForm(self.weight.label())),
            ConjugateMethod::NumericSup => self.numeric_sup(s).map(|(v, _)| v),
            ConjugateMethod::Auto => match self.weight.closed_conjugate(s) {
                Some(v) => Ok(v),
                None => self.numeric_sup(s).map(|(v, _)| v),
            },
        }
    }

    /// `lambda * phi*(j / lambda)`, the exponent of the derivative scale.
    pub fn scaled(&self, lambda: f64, j: f64) -> Result<f64, WeightError> {
        Ok(lambda * self.eval(j / lambda)?)
    }

    /// Numeric supremum and its maximizer `t*`, regardless of the configured method.
    pub fn numeric_sup(&self, s: f64) -> Result<(f64, f64), WeightError> {
        if s < 0.0 || s.is_nan() {
            return Err(WeightError::NegativeArgument(s));
        }
        let key = s.to_bits();
        if let Some(v) = self.cache.read().expect("cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = maximize_concave(
            |t| {
                let p = self.weight.phi(t)?;
                if !p.is_finite() {
                    return Err(WeightError::NoMaximum { s, t_reached: t });
                }
                Ok(s * t - p)
            },
            s,
        )?;
        self.cache.write().expect("cache poisoned").insert(key, v);
        Ok(v)
    }
}

/// Maximizes a concave `g` over `t >= 0` by geometric bracketing and golden
/// section; returns `(sup, argmax)`. The value is the best of every evaluated
/// point, so it never exceeds the true supremum.
fn maximize_concave<G>(g: G, s: f64) -> Result<(f64, f64), WeightError>
where
    G: Fn(f64) -> Result<f64, WeightError>,
{
    let eval = |t: f64| -> Result<f64, WeightError> {
        let v = g(t)?;
        Ok(if v.is_nan() { f64::NEG_INFINITY } else { v })
    };
    let mut best = (eval(0.0)?, 0.0);
    let consider = |v: f64, t: f64, best: &mut (f64, f64)| {
        if v > best.0 {
            *best = (v, t);
        }
    };

    // Bracket [lo, hi] around the maximum with g(mid) >= g(lo), g(mid) > g(hi).
    let (mut lo, mut mid, hi);
    let mut g_mid = best.0;
    let mut t = 1.0;
    let mut g_t = eval(t)?;
    consider(g_t, t, &mut best);
    if g_t <= g_mid {
        lo = 0.0;
        hi = t;
    } else {
        lo = 0.0;
        mid = t;
        g_mid = g_t;
        loop {
            t *= 2.0;
            if t > BRACKET_LIMIT {
                return Err(WeightError::NoMaximum { s, t_reached: mid });
            }
            g_t = eval(t)?;
            consider(g_t, t, &mut best);
            if g_t < g_mid {
                hi = t;
                break;
            }
            lo = mid;
            mid = t;
            g_mid = g_t;
        }
    }
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = eval(c)?;
    let mut gd = eval(d)?;
    consider(gc, c, &mut best);
    consider(gd, d, &mut best);
    let mut iters = 0;
    while (b - a) > SUP_REL_TOL * b.abs().max(1.0) && iters < 400 {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = eval(c)?;
            consider(gc, c, &mut best);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = eval(d)?;
            consider(gd, d, &mut best);
        }
        iters += 1;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightFunction;

    fn gev(d: f64) -> Arc<dyn Weight> {
        WeightFunction::gevrey(d).into_arc()
    }

    #[test]
    fn closed_form_examples() {
        let c = ConjugateEvaluator::auto(gev(2.0));
        assert!(c.eval(std::f64::consts::E / 2.0).unwrap().abs() < 1e-15);
        assert_eq!(c.eval(0.4).unwrap(), -1.0);
        let c3 = ConjugateEvaluator::auto(gev(3.0));
        assert!((c3.eval(2.0).unwrap() - (6.0 * (6f64.ln() - 1.0))).abs() < 1e-12);
    }

    #[test]
    fn numeric_matches_closed_form() {
        for &d in &[1.5, 2.0, 3.0] {
            let num = ConjugateEvaluator::numeric(gev(d));
            let w = WeightFunction::gevrey(d);
            for i in 0..50 {
                let s = (1.0 / d) * (100.0 * d).powf(i as f64 / 49.0);
                let exact = w.closed_conjugate(s).unwrap();
                let got = num.eval(s).unwrap();
                let rel = (got - exact).abs() / exact.abs().max(1e-300);
                assert!(rel <= 1e-9, "d={d} s={s} exact={exact} got={got}");
            }
        }
    }

    #[test]
    fn plateau_is_exact_numerically() {
        let num = ConjugateEvaluator::numeric(gev(2.0));
        assert_eq!(num.eval(0.4).unwrap(), -1.0);
        assert_eq!(num.eval(0.0).unwrap(), -1.0);
    }

    #[test]
    fn closed_form_method_requires_one() {
        let t = crate::weights::Table::new(vec![0.0, 1.0, 10.0], vec![0.0, 1.0, 5.0]).unwrap();
        let c = ConjugateEvaluator::new(
            WeightFunction::Tabulated(t).into_arc(),
            ConjugateMethod::ClosedForm,
        );
        assert!(matches!(c.eval(1.0), Err(WeightError::NoClosedForm(_))));
    }

    #[derive(Debug)]
    struct LogWeight;
    impl Weight for LogWeight {
        fn eval(&self, t: f64) -> Result<f64, WeightError> {
            Ok((1.0 + t).ln())
        }
        fn label(&self) -> String {
            "log(1+t)".into()
        }
    }

    #[test]
    fn weight_without_growth_fails_to_bracket() {
        let c = ConjugateEvaluator::numeric(Arc::new(LogWeight));
        assert!(matches!(c.eval(2.0), Err(WeightError::NoMaximum { .. })));
    }

    #[test]
    fn negative_argument_rejected() {
        let c = ConjugateEvaluator::auto(gev(2.0));
        assert!(c.eval(-0.1).is_err());
    }
}
