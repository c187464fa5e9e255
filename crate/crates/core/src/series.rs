//! Truncated Taylor series `Σ c_k h^k` over `f64` or exact rationals.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub trait SeriesScalar:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_usize(n: usize) -> Self;
    fn div(&self, other: &Self) -> Self;
}

impl SeriesScalar for f64 {
    fn from_usize(n: usize) -> Self {
        n as f64
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
}

impl SeriesScalar for BigRational {
    fn from_usize(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
}

/// Coefficients `c_0..=c_N`; every operation truncates at the same `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<T> {
    pub coeffs: Vec<T>,
}

impl<T: SeriesScalar> Series<T> {
    /// Pads with zeros or truncates to order `n`.
    pub fn new(mut coeffs: Vec<T>, n: usize) -> Self {
        coeffs.resize(n + 1, T::zero());
        Series { coeffs }
    }

    pub fn constant(c: T, n: usize) -> Self {
        Self::new(vec![c], n)
    }

    /// `x0 + h`.
    pub fn variable(x0: T, n: usize) -> Self {
        Self::new(vec![x0, T::one()], n)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn c0(&self) -> &T {
        &self.coeffs[0]
    }

    pub fn add(&self, other: &Self) -> Self {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    pub fn add_constant(&self, c: &T) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].clone() + c.clone();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order();
        let mut out = vec![T::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + k] = out[i + k].clone() + a.clone() * b.clone();
            }
        }
        Series { coeffs: out }
    }

    /// `self / other`; `other` must have a nonzero constant term.
    pub fn div(&self, other: &Self) -> Self {
        let n = self.order();
        let b0 = other.coeffs[0].clone();
        let mut q: Vec<T> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k].clone();
            for i in 1..=k {
                acc = acc - other.coeffs[i].clone() * q[k - i].clone();
            }
            q.push(acc.div(&b0));
        }
        Series { coeffs: q }
    }

    /// `exp(self - c_0)`, whose constant term is 1.
    pub fn exp_shifted(&self) -> Self {
        let n = self.order();
        let mut e: Vec<T> = vec![T::one()];
        for k in 1..=n {
            let mut acc = T::zero();
            for i in 1..=k {
                acc = acc + T::from_usize(i) * self.coeffs[i].clone() * e[k - i].clone();
            }
            e.push(acc.div(&T::from_usize(k)));
        }
        Series { coeffs: e }
    }

    /// `self^alpha` given `p0 = c_0^alpha`; needs `c_0 != 0`.
    pub fn pow(&self, alpha: &T, p0: T) -> Self {
        let n = self.order();
        let v0 = self.coeffs[0].clone();
        let mut p: Vec<T> = vec![p0];
        for k in 1..=n {
            let mut acc = T::zero();
            for i in 1..=k {
                let f = alpha.clone() * T::from_usize(i) - T::from_usize(k - i);
                acc = acc + f * self.coeffs[i].clone() * p[k - i].clone();
            }
            p.push(acc.div(&(T::from_usize(k) * v0.clone())));
        }
        Series { coeffs: p }
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut out = Self::constant(T::one(), self.order());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }
}

impl Series<f64> {
    /// `log(self)` for a positive constant term.
    pub fn ln(&self) -> Self {
        let n = self.order();
        let v0 = self.coeffs[0];
        let mut l = vec![v0.ln()];
        for k in 1..=n {
            let mut acc = k as f64 * self.coeffs[k];
            for i in 1..k {
                acc -= i as f64 * l[i] * self.coeffs[k - i];
            }
            l.push(acc / (k as f64 * v0));
        }
        Series { coeffs: l }
    }

    pub fn exp(&self) -> Self {
        self.exp_shifted().scale(&self.coeffs[0].exp())
    }

    /// `self^alpha` for a positive constant term.
    pub fn powf(&self, alpha: f64) -> Self {
        self.pow(&alpha, self.coeffs[0].powf(alpha))
    }
}
