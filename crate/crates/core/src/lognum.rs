//! Signed log-magnitude numbers.
//!
//! A [`LogNum`] stores `sign * exp(log_abs)`. Products and quotients are
//! additions in the exponent; sums shift every term by the largest exponent
//! and accumulate the scaled mantissas with Neumaier compensation, so values
//! like `500!` or `exp(lambda * phi*(j / lambda))` at large `j` never overflow.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Exponent gap (in nats) past which the smaller addend cannot affect an f64 sum.
pub const NEGLIGIBLE_GAP: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogNum {
    sign: i8,
    log_abs: f64,
}

impl LogNum {
    pub const ZERO: LogNum = LogNum {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogNum = LogNum {
        sign: 1,
        log_abs: 0.0,
    };

    /// Builds `sign * exp(log_abs)`. A zero sign or a `-inf` exponent gives zero.
    pub fn from_parts(sign: i8, log_abs: f64) -> Self {
        if sign == 0 || log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogNum {
                sign: sign.signum(),
                log_abs,
            }
        }
    }

    /// Positive number `exp(log)`.
    pub fn exp(log: f64) -> Self {
        Self::from_parts(1, log)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogNum {
                sign: if x < 0.0 { -1 } else { 1 },
                log_abs: x.abs().ln(),
            }
        }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::ZERO;
        }
        let sign = if n.sign() == Sign::Minus { -1 } else { 1 };
        LogNum {
            sign,
            log_abs: ln_biguint(n.magnitude()),
        }
    }

    pub fn from_ratio(r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::ZERO;
        }
        let sign = if r.is_negative() { -1 } else { 1 };
        LogNum {
            sign,
            log_abs: ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude()),
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn log_abs(&self) -> f64 {
        self.log_abs
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        if self.is_zero() {
            self
        } else {
            LogNum {
                sign: 1,
                log_abs: self.log_abs,
            }
        }
    }

    /// Linear value; overflows to `±inf` or underflows to `0` outside f64 range.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_abs.exp(),
        }
    }

    pub fn powi(self, n: u32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        let sign = if self.sign < 0 && n % 2 == 1 { -1 } else { 1 };
        LogNum {
            sign,
            log_abs: self.log_abs * f64::from(n),
        }
    }

    /// Multiplies by `exp(delta)`.
    pub fn scale_exp(self, delta: f64) -> Self {
        if self.is_zero() {
            self
        } else {
            LogNum {
                sign: self.sign,
                log_abs: self.log_abs + delta,
            }
        }
    }

    pub fn add(self, other: LogNum) -> LogNum {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.log_abs >= other.log_abs {
            (self, other)
        } else {
            (other, self)
        };
        if big.log_abs - small.log_abs > NEGLIGIBLE_GAP || big.log_abs.is_infinite() {
            return big;
        }
        let m = big.log_abs;
        let r = f64::from(big.sign) + f64::from(small.sign) * (small.log_abs - m).exp();
        if r == 0.0 {
            Self::ZERO
        } else {
            LogNum {
                sign: if r < 0.0 { -1 } else { 1 },
                log_abs: m + r.abs().ln(),
            }
        }
    }

    pub fn sub(self, other: LogNum) -> LogNum {
        self.add(-other)
    }

    /// Deterministic two-pass sum: shift by the largest exponent, then a
    /// compensated linear accumulation in the input order.
    pub fn sum<'a, I>(terms: I) -> LogNum
    where
        I: IntoIterator<Item = &'a LogNum>,
        I::IntoIter: Clone,
    {
        let it = terms.into_iter();
        let m = it
            .clone()
            .filter(|t| !t.is_zero())
            .map(|t| t.log_abs)
            .fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if m.is_infinite() {
            // +inf magnitude dominates; sign of the first such term.
            let s = it
                .filter(|t| t.log_abs == m)
                .map(|t| t.sign)
                .next()
                .unwrap_or(1);
            return LogNum::from_parts(s, m);
        }
        let mut acc = 0.0f64;
        let mut comp = 0.0f64;
        for t in it {
            if t.is_zero() {
                continue;
            }
            let v = f64::from(t.sign) * (t.log_abs - m).exp();
            let s = acc + v;
            if acc.abs() >= v.abs() {
                comp += (acc - s) + v;
            } else {
                comp += (v - s) + acc;
            }
            acc = s;
        }
        let r = acc + comp;
        if r == 0.0 {
            Self::ZERO
        } else {
            LogNum {
                sign: if r < 0.0 { -1 } else { 1 },
                log_abs: m + r.abs().ln(),
            }
        }
    }

    /// Orders by absolute value; zero is smallest.
    pub fn cmp_abs(&self, other: &LogNum) -> Ordering {
        self.log_abs.total_cmp(&other.log_abs)
    }

    /// Relative distance `|a - b| / max(|a|, |b|)`, computed in log space.
    pub fn rel_diff(&self, other: &LogNum) -> f64 {
        if self.is_zero() && other.is_zero() {
            return 0.0;
        }
        if self.sign != other.sign {
            return if self.is_zero() || other.is_zero() {
                1.0
            } else {
                2.0
            };
        }
        let d = (self.log_abs - other.log_abs).abs();
        if d.is_nan() {
            return 0.0;
        }
        -(-d).exp_m1()
    }
}

impl Default for LogNum {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Neg for LogNum {
    type Output = LogNum;
    fn neg(self) -> LogNum {
        LogNum {
            sign: -self.sign,
            log_abs: self.log_abs,
        }
    }
}

impl Mul for LogNum {
    type Output = LogNum;
    fn mul(self, rhs: LogNum) -> LogNum {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogNum {
            sign: self.sign * rhs.sign,
            log_abs: self.log_abs + rhs.log_abs,
        }
    }
}

impl Div for LogNum {
    type Output = LogNum;
    fn div(self, rhs: LogNum) -> LogNum {
        assert!(!rhs.is_zero(), "LogNum division by zero");
        if self.is_zero() {
            return Self::ZERO;
        }
        LogNum {
            sign: self.sign * rhs.sign,
            log_abs: self.log_abs - rhs.log_abs,
        }
    }
}

impl fmt::Display for LogNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({})", if s < 0 { "-" } else { "" }, self.log_abs),
        }
    }
}

/// Natural log of a big unsigned integer, accurate to f64 precision.
pub fn ln_biguint(n: &num_bigint::BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::One;

    #[test]
    fn add_handles_cancellation() {
        let a = LogNum::from_f64(3.0);
        let b = LogNum::from_f64(-3.0);
        assert!(a.add(b).is_zero());
        let c = LogNum::from_f64(2.5).add(LogNum::from_f64(-1.0));
        assert!((c.to_f64() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn sum_of_huge_terms_stays_finite() {
        let terms: Vec<LogNum> = (0..10).map(|_| LogNum::exp(2000.0)).collect();
        let s = LogNum::sum(&terms);
        assert!((s.log_abs() - (2000.0 + 10f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn negligible_addend_is_dropped() {
        let big = LogNum::exp(100.0);
        let tiny = LogNum::exp(10.0);
        assert_eq!(big.add(tiny), big);
    }

    #[test]
    fn bigint_log_matches_factorial() {
        let mut f = BigUint::one();
        for k in 1u32..=300 {
            f *= k;
        }
        let ln = ln_biguint(&f);
        let expected = statrs::function::gamma::ln_gamma(301.0);
        assert!((ln - expected).abs() / expected < 1e-13);
    }

    #[test]
    fn powi_tracks_sign() {
        let x = LogNum::from_f64(-2.0);
        assert_eq!(x.powi(3).sign(), -1);
        assert!((x.powi(3).to_f64() + 8.0).abs() < 1e-12);
        assert_eq!(x.powi(0), LogNum::ONE);
    }
}
