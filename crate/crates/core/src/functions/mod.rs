//! Model functions with values and derivative jets, seminorm estimators and
//! a derivative-growth index fit.

mod index;
pub(crate) mod seminorm;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use statrs::function::gamma::ln_gamma;

pub use index::{estimate_growth_exponent, fit_growth_exponent, IndexEstimate};
pub use seminorm::{
    reevaluate_witness, seminorm_p_lambda, seminorm_pi, SeminormFamily, SeminormReport,
    SeminormWitness,
};

use crate::error::{FunctionError, ParseError};
use crate::fdb::{self, Jet};
use crate::lognum::LogNum;
use crate::series::Series;
use crate::weights::{param_f64, parse_params};

/// Largest jet order for families with closed recurrences.
pub const MAX_ORDER: usize = 200;
/// Largest jet order for bump cutoffs (series of `exp(-u^{-γ})`).
pub const MAX_BUMP_ORDER: usize = 40;

/// Largest order of a floating composed jet; the partition plan grows like `p(n)`.
pub const MAX_COMPOSED_ORDER: usize = 40;

const RESCALE: f64 = 1e150;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelFunction {
    /// `e^{-x^2}`.
    Gaussian,
    /// `Σ c_i x^i`.
    Polynomial(Vec<BigRational>),
    /// `a x^n / n! χ(x)`, `χ = 1` on `|x| <= r/2`, `χ = 0` on `|x| >= r`.
    MonomialBump {
        n: usize,
        a: BigRational,
        r: f64,
        gamma: f64,
    },
    /// `(1 + x^2)^{1/2}`.
    Sqrt1px2,
    /// `(1 + x^2)^a`.
    Pow1px2 {
        a: f64,
    },
    /// `e^{x^2}`.
    ExpSqr,
    /// `exp(-(1 - (x/r)^2)^{-γ})` on `|x| < r`, 0 outside.
    GevreyBump {
        gamma: f64,
        r: f64,
    },
    /// `P(x) / Q(x)`.
    Rational {
        num: Vec<BigRational>,
        den: Vec<BigRational>,
    },
    Sin,
    /// `outer(inner(x))`.
    Composed {
        outer: Box<ModelFunction>,
        inner: Box<ModelFunction>,
    },
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

fn horner(c: &[BigRational], x: f64) -> f64 {
    c.iter()
        .rev()
        .fold(0.0, |acc, ci| acc * x + ci.to_f64().unwrap_or(f64::NAN))
}

/// Taylor coefficients of `Σ c_i (x0 + h)^i`.
fn shifted_poly(c: &[BigRational], x0: &BigRational, order: usize) -> Series<BigRational> {
    let h = Series::variable(x0.clone(), order);
    let mut acc = Series::constant(BigRational::zero(), order);
    for ci in c.iter().rev() {
        acc = acc.mul(&h).add_constant(ci);
    }
    acc
}

fn ln_factorial(k: usize) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

fn factorial_exact(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(fdb::factorial(k)))
}

/// Taylor series of `outer ∘ inner` at the inner base point, by Horner in
/// `inner - inner(x)`; `outer` is expanded at `inner(x)`.
fn compose_taylor(
    outer: &Jet<BigRational>,
    inner: &Jet<BigRational>,
    order: usize,
) -> Series<BigRational> {
    let mut shift: Vec<BigRational> = inner
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v / factorial_exact(k))
        .collect();
    shift[0] = BigRational::zero();
    let shift = Series::new(shift, order);
    let mut acc = Series::constant(BigRational::zero(), order);
    for (k, v) in outer.values.iter().enumerate().rev() {
        acc = acc.mul(&shift).add_constant(&(v / factorial_exact(k)));
    }
    acc
}

/// Derivatives `k! c_k` of an exact series.
fn exact_derivatives(s: &Series<BigRational>) -> Vec<BigRational> {
    s.coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * factorial_exact(k))
        .collect()
}

/// Derivatives `k! c_k` of a float series, in log domain.
fn float_derivatives(s: &Series<f64>) -> Vec<LogNum> {
    s.coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| LogNum::from_f64(c).scale_exp(ln_factorial(k)))
        .collect()
}

/// `f^{(k)}(x) = s_k P_k(x) e^{±x^2}` with `P_{k+1} = 2x P_k + 2 k σ P_{k-1}`,
/// `σ = -1` for the Gaussian (then `s_k = (-1)^k`), `σ = +1` for `e^{x^2}`.
fn hermite_jet(x: f64, order: usize, gaussian: bool) -> Vec<LogNum> {
    let sigma = if gaussian { -1.0 } else { 1.0 };
    let base_log = sigma * x * x;
    let mut out = Vec::with_capacity(order + 1);
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    let mut log_scale = 0.0;
    for k in 0..=order {
        let sign = if gaussian && k % 2 == 1 { -1.0 } else { 1.0 };
        out.push(LogNum::from_f64(sign * cur).scale_exp(log_scale + base_log));
        let next = 2.0 * x * cur + 2.0 * k as f64 * sigma * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    out
}

/// `E(u) = exp(-u^{-γ})` as a float series in `h` around `u0 > 0`.
fn flat_exp_series(u: &Series<f64>, gamma: f64) -> Series<f64> {
    let g = u.powf(-gamma);
    g.scale(&-1.0).exp()
}

impl ModelFunction {
    pub fn polynomial(coeffs: &[i64]) -> Self {
        ModelFunction::Polynomial(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn compose(outer: ModelFunction, inner: ModelFunction) -> Self {
        ModelFunction::Composed {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            ModelFunction::Gaussian => "gaussian",
            ModelFunction::Polynomial(_) => "poly",
            ModelFunction::MonomialBump { .. } => "monbump",
            ModelFunction::Sqrt1px2 => "sqrt1px2",
            ModelFunction::Pow1px2 { .. } => "pow1px2",
            ModelFunction::ExpSqr => "expsqr",
            ModelFunction::GevreyBump { .. } => "gbump",
            ModelFunction::Rational { .. } => "rational",
            ModelFunction::Sin => "sin",
            ModelFunction::Composed { .. } => "compose",
        }
    }

    /// Largest supported jet order.
    pub fn max_order(&self) -> usize {
        match self {
            ModelFunction::MonomialBump { .. } | ModelFunction::GevreyBump { .. } => MAX_BUMP_ORDER,
            ModelFunction::Composed { outer, inner } => MAX_COMPOSED_ORDER
                .min(outer.max_order())
                .min(inner.max_order()),
            _ => MAX_ORDER,
        }
    }

    /// Largest supported exact jet order.
    pub fn max_exact_order(&self) -> usize {
        match self {
            ModelFunction::Composed { outer, inner } => {
                outer.max_exact_order().min(inner.max_exact_order())
            }
            _ => self.max_order(),
        }
    }

    /// Exponent `a_2` with `|ψ(z)| <= C (1 + |z|)^{a_2}` on a cone around the
    /// real axis, for the families analytic there.
    pub fn analytic_growth(&self) -> Option<f64> {
        match self {
            ModelFunction::Sqrt1px2 => Some(1.0),
            ModelFunction::Pow1px2 { a } => Some(2.0 * a),
            ModelFunction::Rational { num, den } => {
                Some((num.len() as f64 - den.len() as f64).max(0.0))
            }
            _ => None,
        }
    }

    fn cutoff(r: f64, gamma: f64, x: f64) -> f64 {
        let half = 0.5 * r;
        let u = (x.abs() - half) / half;
        if u <= 0.0 {
            1.0
        } else if u >= 1.0 {
            0.0
        } else {
            let e = |v: f64| (-v.powf(-gamma)).exp();
            1.0 - e(u) / (e(u) + e(1.0 - u))
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            ModelFunction::Gaussian => (-x * x).exp(),
            ModelFunction::Polynomial(c) => horner(c, x),
            ModelFunction::MonomialBump { n, a, r, gamma } => {
                let mono =
                    a.to_f64().unwrap_or(f64::NAN) * (x.powi(*n as i32) / ln_factorial(*n).exp());
                mono * Self::cutoff(*r, *gamma, x)
            }
            ModelFunction::Sqrt1px2 => x.hypot(1.0),
            ModelFunction::Pow1px2 { a } => (1.0 + x * x).powf(*a),
            ModelFunction::ExpSqr => (x * x).exp(),
            ModelFunction::GevreyBump { gamma, r } => {
                let v = 1.0 - (x / r) * (x / r);
                if v <= 0.0 {
                    0.0
                } else {
                    (-v.powf(-gamma)).exp()
                }
            }
            ModelFunction::Rational { num, den } => horner(num, x) / horner(den, x),
            ModelFunction::Sin => x.sin(),
            ModelFunction::Composed { outer, inner } => outer.value(inner.value(x)),
        }
    }

    fn capability(&self, what: String) -> FunctionError {
        FunctionError::Capability {
            family: self.family().to_string(),
            what,
        }
    }

    fn check_order(&self, order: usize, limit: usize) -> Result<(), FunctionError> {
        if order > limit {
            return Err(self.capability(format!("jets of order {order} (limit {limit})")));
        }
        Ok(())
    }

    /// Exact jet at a rational point, for the families and points where the
    /// derivatives are rational.
    pub fn exact_jet(
        &self,
        x: &BigRational,
        order: usize,
    ) -> Result<Jet<BigRational>, FunctionError> {
        self.check_order(order, self.max_exact_order())?;
        let jet = |values: Vec<BigRational>| Ok(Jet::new(x.clone(), values));
        let xf = x.to_f64().unwrap_or(f64::NAN);
        let not_exact = || self.capability(format!("exact jets at x = {xf}"));
        match self {
            ModelFunction::Polynomial(c) => jet(exact_derivatives(&shifted_poly(c, x, order))),
            ModelFunction::MonomialBump { n, a, r, .. } => {
                if xf.abs() >= *r {
                    return jet(vec![BigRational::zero(); order + 1]);
                }
                if xf.abs() > 0.5 * r {
                    return Err(not_exact());
                }
                let mut c = vec![BigRational::zero(); n + 1];
                c[*n] = a / factorial_exact(*n);
                jet(exact_derivatives(&shifted_poly(&c, x, order)))
            }
            ModelFunction::Gaussian | ModelFunction::ExpSqr if x.is_zero() => {
                let sign = if matches!(self, ModelFunction::Gaussian) {
                    -1
                } else {
                    1
                };
                let sq = Series::new(
                    vec![
                        BigRational::zero(),
                        BigRational::zero(),
                        BigRational::from_integer(sign.into()),
                    ],
                    order,
                );
                jet(exact_derivatives(&sq.exp_shifted()))
            }
            ModelFunction::Sqrt1px2 if x.is_zero() => {
                let v = Series::new(
                    vec![BigRational::one(), BigRational::zero(), BigRational::one()],
                    order,
                );
                jet(exact_derivatives(&v.pow(
                    &BigRational::new(1.into(), 2.into()),
                    BigRational::one(),
                )))
            }
            ModelFunction::Pow1px2 { a } if x.is_zero() => {
                let v = Series::new(
                    vec![BigRational::one(), BigRational::zero(), BigRational::one()],
                    order,
                );
                jet(exact_derivatives(&v.pow(&rat(*a), BigRational::one())))
            }
            ModelFunction::Rational { num, den } => {
                let q = shifted_poly(den, x, order);
                if q.c0().is_zero() {
                    return Err(FunctionError::Evaluation(format!(
                        "denominator vanishes at x = {xf}"
                    )));
                }
                jet(exact_derivatives(&shifted_poly(num, x, order).div(&q)))
            }
            ModelFunction::Sin if x.is_zero() => jet((0..=order)
                .map(|k| BigRational::from_integer([0, 1, 0, -1][k % 4].into()))
                .collect()),
            ModelFunction::Composed { outer, inner } => {
                let ij = inner.exact_jet(x, order)?;
                let oj = outer.exact_jet(&ij.values[0], order)?;
                jet(exact_derivatives(&compose_taylor(&oj, &ij, order)))
            }
            _ => Err(not_exact()),
        }
    }

    /// `f^{(0..=order)}(x)` in log domain.
    pub fn jet(&self, x: f64, order: usize) -> Result<Jet<LogNum>, FunctionError> {
        self.check_order(order, self.max_order())?;
        if !x.is_finite() {
            return Err(FunctionError::Evaluation(format!("x = {x}")));
        }
        let base = LogNum::from_f64(x);
        let done = |values: Vec<LogNum>| Ok(Jet::new(base, values));
        match self {
            ModelFunction::Gaussian | ModelFunction::ExpSqr if x != 0.0 => done(hermite_jet(
                x,
                order,
                matches!(self, ModelFunction::Gaussian),
            )),
            ModelFunction::Sqrt1px2 | ModelFunction::Pow1px2 { .. } if x != 0.0 => {
                let a = match self {
                    ModelFunction::Pow1px2 { a } => *a,
                    _ => 0.5,
                };
                let v = Series::new(vec![1.0 + x * x, 2.0 * x, 1.0], order);
                done(float_derivatives(&v.powf(a)))
            }
            ModelFunction::MonomialBump { n, a, r, gamma } if x.abs() > 0.5 * r && x.abs() < *r => {
                let half = 0.5 * r;
                let s = x.signum();
                // u = (|x| - r/2) / (r/2), locally linear in h with slope sign(x)/half.
                let u = Series::new(vec![(x.abs() - half) / half, s / half], order);
                let one_minus_u = Series::new(vec![1.0 - u.coeffs[0], -u.coeffs[1]], order);
                let eu = flat_exp_series(&u, *gamma);
                let ev = flat_exp_series(&one_minus_u, *gamma);
                let step = eu.div(&eu.add(&ev));
                let chi = Series::constant(1.0, order).sub(&step);
                let mut c = vec![0.0; n + 1];
                c[*n] = a.to_f64().unwrap_or(f64::NAN) / ln_factorial(*n).exp();
                let mut mono = Series::constant(0.0, order);
                let h = Series::variable(x, order);
                for ci in c.iter().rev() {
                    mono = mono.mul(&h).add_constant(ci);
                }
                done(float_derivatives(&mono.mul(&chi)))
            }
            ModelFunction::GevreyBump { gamma, r } => {
                if x.abs() >= *r {
                    return done(vec![LogNum::ZERO; order + 1]);
                }
                if gamma.fract() == 0.0 && *gamma >= 1.0 {
                    let (xr, rr) = (rat(x), rat(*r));
                    let v = Series::new(
                        vec![
                            BigRational::one() - &xr * &xr / (&rr * &rr),
                            -BigRational::from_integer(2.into()) * &xr / (&rr * &rr),
                            -BigRational::one() / (&rr * &rr),
                        ],
                        order,
                    );
                    let g = v.pow(
                        &BigRational::from_integer(BigInt::from(-(*gamma as i64))),
                        num_traits::Pow::pow(v.c0(), -(*gamma as i32)),
                    );
                    let g0 = g.c0().to_f64().unwrap_or(f64::INFINITY);
                    let e = g.scale(&-BigRational::one()).exp_shifted();
                    return done(
                        exact_derivatives(&e)
                            .iter()
                            .map(|d| LogNum::from_ratio(d).scale_exp(-g0))
                            .collect(),
                    );
                }
                let v = Series::new(
                    vec![1.0 - (x / r) * (x / r), -2.0 * x / (r * r), -1.0 / (r * r)],
                    order,
                );
                let g = v.powf(-gamma);
                let g0 = g.coeffs[0];
                let e = g.scale(&-1.0).exp_shifted();
                done(
                    float_derivatives(&e)
                        .into_iter()
                        .map(|d| d.scale_exp(-g0))
                        .collect(),
                )
            }
            ModelFunction::Sin if x != 0.0 => done(
                (0..=order)
                    .map(|k| LogNum::from_f64((x + k as f64 * std::f64::consts::FRAC_PI_2).sin()))
                    .collect(),
            ),
            ModelFunction::Composed { outer, inner } => {
                let ij = inner.jet(x, order)?;
                let y = ij.values[0].to_f64();
                let mut oj = outer.jet(y, order)?;
                oj.base = ij.values[0];
                let c = fdb::shared_plan(order)
                    .map_err(|e| FunctionError::Evaluation(e.to_string()))?
                    .compose(&oj, &ij, order)
                    .map_err(|e| FunctionError::Evaluation(e.to_string()))?;
                done(c.values)
            }
            _ => {
                let e = self.exact_jet(&rat(x), order)?;
                done(e.values.iter().map(LogNum::from_ratio).collect())
            }
        }
    }
}

/// Jet of `f` at `x` up to order `order`, in log domain.
pub fn jet_of(f: &ModelFunction, x: f64, order: usize) -> Result<Jet<LogNum>, FunctionError> {
    f.jet(x, order)
}

fn fmt_coeffs(c: &[BigRational]) -> String {
    c.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for ModelFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelFunction::Gaussian => write!(f, "gaussian"),
            ModelFunction::Polynomial(c) => write!(f, "poly:{}", fmt_coeffs(c)),
            ModelFunction::MonomialBump { n, a, r, gamma } => {
                write!(f, "monbump:n={n},a={a},r={r},g={gamma}")
            }
            ModelFunction::Sqrt1px2 => write!(f, "sqrt1px2"),
            ModelFunction::Pow1px2 { a } => write!(f, "pow1px2:a={a}"),
            ModelFunction::ExpSqr => write!(f, "expsqr"),
            ModelFunction::GevreyBump { gamma, r } => write!(f, "gbump:g={gamma},r={r}"),
            ModelFunction::Rational { num, den } => {
                write!(f, "rational:{}|{}", fmt_coeffs(num), fmt_coeffs(den))
            }
            ModelFunction::Sin => write!(f, "sin"),
            ModelFunction::Composed { outer, inner } => write!(f, "{outer}@{inner}"),
        }
    }
}

/// Exact value of an integer, `p/q` or plain decimal literal.
pub fn parse_exact(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.contains('/') {
        return fdb::parse_rational(s).map_err(|e| e.to_string());
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int}{frac}");
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("`{s}` is not a decimal or p/q literal"));
    }
    let n: BigInt = digits.parse().map_err(|_| format!("bad number `{s}`"))?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    let v = BigRational::new(n, d);
    Ok(if neg { -v } else { v })
}

fn parse_coeffs(body: &str) -> Result<Vec<BigRational>, String> {
    let c = body
        .split(',')
        .map(parse_exact)
        .collect::<Result<Vec<_>, _>>()?;
    if c.is_empty() {
        return Err("no coefficients".into());
    }
    Ok(c)
}

impl FromStr for ModelFunction {
    type Err = ParseError;

    /// `gaussian`, `poly:1,0,2`, `monbump:n=3,a=7,r=0.5,g=1`, `sqrt1px2`,
    /// `pow1px2:a=1.5`, `expsqr`, `gbump:g=1,r=1`, `rational:0,1|1,-1`,
    /// `sin`, `id`, and `outer@inner` for compositions.
    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let err = |m: String| ParseError::Function(format!("`{spec}`: {m}"));
        if let Some((outer, inner)) = spec.split_once('@') {
            return Ok(ModelFunction::compose(outer.parse()?, inner.parse()?));
        }
        let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(err(format!("{name} must be positive")))
            }
        };
        match kind.trim() {
            "gaussian" => Ok(ModelFunction::Gaussian),
            "sqrt1px2" => Ok(ModelFunction::Sqrt1px2),
            "expsqr" => Ok(ModelFunction::ExpSqr),
            "sin" => Ok(ModelFunction::Sin),
            "id" => Ok(ModelFunction::polynomial(&[0, 1])),
            "poly" => Ok(ModelFunction::Polynomial(parse_coeffs(body).map_err(err)?)),
            "pow1px2" => {
                let a = param_f64(&parse_params(body).map_err(err)?, "a").map_err(err)?;
                Ok(ModelFunction::Pow1px2 {
                    a: positive("a", a)?,
                })
            }
            "monbump" => {
                let p = parse_params(body).map_err(err)?;
                let n = param_f64(&p, "n").map_err(err)?;
                if !(n >= 0.0 && n.fract() == 0.0 && n <= MAX_ORDER as f64) {
                    return Err(err("n must be a nonnegative integer".into()));
                }
                let a = p
                    .iter()
                    .find(|(k, _)| k == "a")
                    .ok_or_else(|| err("missing parameter `a`".into()))
                    .and_then(|(_, v)| parse_exact(v).map_err(err))?;
                Ok(ModelFunction::MonomialBump {
                    n: n as usize,
                    a,
                    r: positive("r", param_f64(&p, "r").map_err(err)?)?,
                    gamma: positive("g", param_f64(&p, "g").map_err(err)?)?,
                })
            }
            "gbump" => {
                let p = parse_params(body).map_err(err)?;
                Ok(ModelFunction::GevreyBump {
                    gamma: positive("g", param_f64(&p, "g").map_err(err)?)?,
                    r: positive("r", param_f64(&p, "r").map_err(err)?)?,
                })
            }
            "rational" => {
                let (n, d) = body
                    .split_once('|')
                    .ok_or_else(|| err("expected numerator|denominator".into()))?;
                let den = parse_coeffs(d).map_err(err)?;
                if den.iter().all(|c| c.is_zero()) {
                    return Err(err("zero denominator".into()));
                }
                Ok(ModelFunction::Rational {
                    num: parse_coeffs(n).map_err(err)?,
                    den,
                })
            }
            other => Err(err(format!("unknown function family `{other}`"))),
        }
    }
}

/// `|f^{(k)}(x)|` compared against a central finite difference, for tests.
#[cfg(test)]
pub(crate) fn finite_difference(f: &ModelFunction, x: f64, k: usize, h: f64) -> f64 {
    let binom = |n: usize, i: usize| -> f64 {
        (0..i).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
    };
    let mut acc = 0.0;
    for i in 0..=k {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom(k, i) * f.value(x + (k as f64 / 2.0 - i as f64) * h);
    }
    acc / h.powi(k as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn floats(j: &Jet<LogNum>) -> Vec<f64> {
        j.values.iter().map(|v| v.to_f64()).collect()
    }

    #[test]
    fn documented_jets() {
        let g = ModelFunction::Gaussian.exact_jet(&q(0), 4).unwrap();
        assert_eq!(g.values, vec![q(1), q(0), q(-2), q(0), q(12)]);
        let mb: ModelFunction = "monbump:n=3,a=7,r=0.5,g=1".parse().unwrap();
        assert_eq!(
            mb.exact_jet(&q(0), 5).unwrap().values,
            vec![q(0), q(0), q(0), q(7), q(0), q(0)]
        );
        let s = ModelFunction::Sqrt1px2.exact_jet(&q(0), 2).unwrap();
        assert_eq!(s.values, vec![q(1), q(0), q(1)]);
    }

    #[test]
    fn gaussian_even_derivatives_at_zero() {
        let j = ModelFunction::Gaussian.exact_jet(&q(0), 40).unwrap();
        for m in 0..=20usize {
            let expect =
                BigRational::from_integer(BigInt::from(fdb::factorial(2 * m) / fdb::factorial(m)));
            let expect = if m % 2 == 1 { -expect } else { expect };
            assert_eq!(j.values[2 * m], expect);
        }
    }

    #[test]
    fn jets_match_finite_differences() {
        let fams = [
            "gaussian",
            "expsqr",
            "sqrt1px2",
            "pow1px2:a=1.5",
            "gbump:g=1,r=2",
            "gbump:g=1.5,r=2",
            "monbump:n=2,a=3,r=0.8,g=1",
            "rational:1,2|1,0,1",
            "sin",
            "poly:1,-2,0,3",
            "gaussian@poly:0,0,1",
        ];
        for spec in fams {
            let f: ModelFunction = spec.parse().unwrap();
            for &x in &[0.3, 1.1] {
                let jet = f.jet(x, 4).unwrap();
                assert!(
                    (jet.values[0].to_f64() - f.value(x)).abs()
                        <= 1e-12 * f.value(x).abs().max(1e-300)
                );
                for k in 1..=4 {
                    let h = 5e-2;
                    let d = |m: f64| finite_difference(&f, x, k, h / m);
                    // Two Richardson steps on the O(h^2) central difference.
                    let r1 = (4.0 * d(2.0) - d(1.0)) / 3.0;
                    let r2 = (4.0 * d(4.0) - d(2.0)) / 3.0;
                    let est = (16.0 * r2 - r1) / 15.0;
                    let got = jet.values[k].to_f64();
                    let scale = got.abs().max(f.value(x).abs()).max(1e-12);
                    assert!(
                        (est - got).abs() <= 1e-6 * scale,
                        "{spec} x={x} k={k}: jet {got} vs fd {est}"
                    );
                }
            }
        }
    }

    #[test]
    fn bump_transition_zone_is_smooth() {
        // x = 0.3 lies in the cutoff transition for r = 0.5.
        let f: ModelFunction = "monbump:n=1,a=1,r=0.5,g=1".parse().unwrap();
        let jet = f.jet(0.3, 3).unwrap();
        assert!((jet.values[0].to_f64() - f.value(0.3)).abs() < 1e-14);
        assert!(f.exact_jet(&rat(0.3), 3).is_err());
        assert_eq!(floats(&f.jet(0.6, 3).unwrap()), vec![0.0; 4]);
    }

    #[test]
    fn gevrey_bump_vanishes_outside() {
        let f = ModelFunction::GevreyBump { gamma: 1.0, r: 1.0 };
        assert_eq!(floats(&f.jet(1.0, 10).unwrap()), vec![0.0; 11]);
        assert_eq!(f.value(-1.5), 0.0);
        assert!(f.jet(0.2, 41).is_err());
    }

    #[test]
    fn hermite_jets_stay_finite_at_high_order() {
        let j = ModelFunction::Gaussian.jet(3.0, 200).unwrap();
        assert!(j
            .values
            .iter()
            .all(|v| v.log_abs().is_finite() || v.is_zero()));
        let exact = ModelFunction::Gaussian
            .exact_jet(&q(0), 200)
            .unwrap()
            .to_lognum();
        let via_rec = hermite_jet(1e-300, 60, true);
        for k in (0..=60).step_by(2) {
            assert!(exact.values[k].rel_diff(&via_rec[k]) < 1e-12, "k={k}");
        }
    }

    #[test]
    fn parses_specs() {
        for spec in [
            "gaussian",
            "poly:1,0,2",
            "monbump:n=3,a=7,r=0.5,g=1",
            "sqrt1px2",
            "pow1px2:a=1.5",
            "expsqr",
            "gbump:g=1,r=1",
            "rational:0,1|1,-1",
            "sin",
            "gaussian@poly:0,0,1",
        ] {
            let f: ModelFunction = spec.parse().unwrap();
            assert_eq!(f.to_string(), spec);
        }
        assert_eq!(
            parse_exact("1.25").unwrap(),
            BigRational::new(5.into(), 4.into())
        );
        assert_eq!(
            parse_exact("-3/6").unwrap(),
            BigRational::new((-1).into(), 2.into())
        );
        assert!("cosh".parse::<ModelFunction>().is_err());
        assert!("pow1px2:a=-1".parse::<ModelFunction>().is_err());
        assert!("rational:1|0".parse::<ModelFunction>().is_err());
    }
}
