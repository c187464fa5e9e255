//! Exact Faà di Bruno composition of derivative jets.
//!
//! Coefficients are exact big integers; jets are either exact rationals or
//! signed log-magnitude numbers, behind the [`JetScalar`] trait.

mod partitions;

use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

pub use partitions::{
    binomial, enumerate_partitions, factorial, PartitionIter, PartitionMultiIndex,
    MAX_COLLECTED_ORDER,
};

use crate::error::{FdbError, ParseError};
use crate::lognum::LogNum;
use crate::par;

/// Relative tolerance for matching log-magnitude base points.
const BASE_POINT_TOL: f64 = 1e-12;

pub trait JetScalar: Clone + Send + Sync + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_biguint(n: &BigUint) -> Self;
    /// Conversion of a plan coefficient whose logarithm is already known.
    fn from_coefficient(exact: &BigUint, _log: LogNum) -> Self {
        Self::from_biguint(exact)
    }
    fn mul(&self, other: &Self) -> Self;
    fn powu(&self, n: u32) -> Self;
    /// Order-independent up to rounding; callers pass terms in a fixed order.
    fn sum(terms: Vec<Self>) -> Self;
    fn same_point(&self, other: &Self) -> bool;
}

impl JetScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_biguint(n: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(n.clone()))
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn powu(&self, n: u32) -> Self {
        Pow::pow(self, n)
    }
    fn sum(terms: Vec<Self>) -> Self {
        terms.into_iter().fold(Zero::zero(), |a, b| a + b)
    }
    fn same_point(&self, other: &Self) -> bool {
        self == other
    }
}

impl JetScalar for LogNum {
    fn zero() -> Self {
        LogNum::ZERO
    }
    fn one() -> Self {
        LogNum::ONE
    }
    fn is_zero(&self) -> bool {
        LogNum::is_zero(self)
    }
    fn from_biguint(n: &BigUint) -> Self {
        LogNum::from_bigint(&BigInt::from(n.clone()))
    }
    fn from_coefficient(_exact: &BigUint, log: LogNum) -> Self {
        log
    }
    fn mul(&self, other: &Self) -> Self {
        *self * *other
    }
    fn powu(&self, n: u32) -> Self {
        self.powi(n)
    }
    fn sum(terms: Vec<Self>) -> Self {
        LogNum::sum(terms.iter())
    }
    fn same_point(&self, other: &Self) -> bool {
        self == other || self.rel_diff(other) <= BASE_POINT_TOL
    }
}

/// `f^(0), ..., f^(J)` at `base`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Jet<T> {
    pub base: T,
    pub values: Vec<T>,
}

impl<T: JetScalar> Jet<T> {
    pub fn new(base: T, values: Vec<T>) -> Self {
        assert!(!values.is_empty(), "a jet has at least the value entry");
        Jet { base, values }
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    /// Jet of `y ↦ y` at `base`.
    pub fn identity(base: T, order: usize) -> Self {
        let mut values = vec![T::zero(); order + 1];
        values[0] = base.clone();
        if order >= 1 {
            values[1] = T::one();
        }
        Jet { base, values }
    }

    pub fn truncated(&self, order: usize) -> Self {
        Jet {
            base: self.base.clone(),
            values: self.values[..=order.min(self.order())].to_vec(),
        }
    }
}

impl Jet<BigRational> {
    pub fn to_lognum(&self) -> Jet<LogNum> {
        Jet {
            base: LogNum::from_ratio(&self.base),
            values: self.values.iter().map(LogNum::from_ratio).collect(),
        }
    }
}

fn check_inputs<T: JetScalar>(h: &Jet<T>, psi: &Jet<T>, j: usize) -> Result<(), FdbError> {
    if h.order() < j {
        return Err(FdbError::Arity {
            need: j,
            have: h.order(),
        });
    }
    if psi.order() < j {
        return Err(FdbError::Arity {
            need: j,
            have: psi.order(),
        });
    }
    if !h.base.same_point(&psi.values[0]) {
        return Err(FdbError::BasePoint);
    }
    Ok(())
}

fn term<T: JetScalar>(coef: T, p: &PartitionMultiIndex, h: &Jet<T>, psi: &Jet<T>) -> T {
    let mut acc = h.values[p.k() as usize].clone();
    if acc.is_zero() {
        return acc;
    }
    for (l, k) in p.parts() {
        acc = acc.mul(&psi.values[l].powu(k));
    }
    acc.mul(&coef)
}

/// `(h∘ψ)^{(j)}(x_0)` with `h` based at `ψ(x_0)`.
pub fn faa_di_bruno<T: JetScalar>(h: &Jet<T>, psi: &Jet<T>, j: usize) -> Result<T, FdbError> {
    check_inputs(h, psi, j)?;
    if j == 0 {
        return Ok(h.values[0].clone());
    }
    let terms: Vec<T> = PartitionIter::new(j)
        .map(|p| term(T::from_biguint(&p.fdb_coefficient()), &p, h, psi))
        .collect();
    Ok(T::sum(terms))
}

/// `h^{(n)}(ψ(x_0)) ψ'(x_0)^n`, valid when `h` vanishes at every other order.
pub fn single_jet_compose<T: JetScalar>(h: &Jet<T>, psi: &Jet<T>, n: usize) -> Result<T, FdbError> {
    check_inputs(h, psi, n)?;
    let offending: Vec<usize> = (0..=h.order())
        .filter(|&k| k != n && !h.values[k].is_zero())
        .collect();
    if !offending.is_empty() {
        return Err(FdbError::NotSingle(offending));
    }
    if n == 0 {
        return Ok(h.values[0].clone());
    }
    Ok(h.values[n].mul(&psi.values[1].powu(n as u32)))
}

/// Partitions and exact coefficients for every order up to `jmax`.
#[derive(Clone, Debug)]
pub struct FdbPlan {
    by_order: Vec<Vec<PlanEntry>>,
}

#[derive(Clone, Debug)]
pub struct PlanEntry {
    pub index: PartitionMultiIndex,
    pub coefficient: BigUint,
    pub log_coefficient: LogNum,
}

impl FdbPlan {
    pub fn new(jmax: usize) -> Result<Self, FdbError> {
        if jmax > MAX_COLLECTED_ORDER {
            return Err(FdbError::OrderTooLarge(jmax));
        }
        let by_order = par::map_range(jmax + 1, |j| {
            PartitionIter::new(j)
                .map(|index| {
                    let coefficient = index.fdb_coefficient();
                    let log_coefficient = LogNum::from_biguint(&coefficient);
                    PlanEntry {
                        index,
                        coefficient,
                        log_coefficient,
                    }
                })
                .collect()
        });
        Ok(FdbPlan { by_order })
    }

    pub fn max_order(&self) -> usize {
        self.by_order.len() - 1
    }

    pub fn entries(&self, j: usize) -> &[PlanEntry] {
        &self.by_order[j]
    }

    pub fn faa_di_bruno<T: JetScalar>(
        &self,
        h: &Jet<T>,
        psi: &Jet<T>,
        j: usize,
    ) -> Result<T, FdbError> {
        if j > self.max_order() {
            return Err(FdbError::OrderTooLarge(j));
        }
        check_inputs(h, psi, j)?;
        if j == 0 {
            return Ok(h.values[0].clone());
        }
        let terms = self.by_order[j]
            .iter()
            .map(|e| {
                let c = T::from_coefficient(&e.coefficient, e.log_coefficient);
                term(c, &e.index, h, psi)
            })
            .collect();
        Ok(T::sum(terms))
    }

    pub fn compose<T: JetScalar>(
        &self,
        h: &Jet<T>,
        psi: &Jet<T>,
        order: usize,
    ) -> Result<Jet<T>, FdbError> {
        check_inputs(h, psi, order)?;
        let values = (0..=order)
            .map(|j| self.faa_di_bruno(h, psi, j))
            .collect::<Result<Vec<T>, _>>()?;
        Ok(Jet {
            base: psi.base.clone(),
            values,
        })
    }
}

static SHARED_PLAN: RwLock<Option<Arc<FdbPlan>>> = RwLock::new(None);

/// Process-wide plan covering at least `order`, grown on demand.
pub fn shared_plan(order: usize) -> Result<Arc<FdbPlan>, FdbError> {
    if let Some(p) = SHARED_PLAN.read().expect("plan lock").as_ref() {
        if p.max_order() >= order {
            return Ok(Arc::clone(p));
        }
    }
    let mut slot = SHARED_PLAN.write().expect("plan lock");
    if let Some(p) = slot.as_ref() {
        if p.max_order() >= order {
            return Ok(Arc::clone(p));
        }
    }
    let plan = Arc::new(FdbPlan::new(order)?);
    *slot = Some(Arc::clone(&plan));
    Ok(plan)
}

/// Jet of `h∘ψ` at `x_0` up to `order`.
pub fn compose_jet<T: JetScalar>(
    h: &Jet<T>,
    psi: &Jet<T>,
    order: usize,
) -> Result<Jet<T>, FdbError> {
    FdbPlan::new(order)?.compose(h, psi, order)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityRow {
    pub j: usize,
    /// Sum over multi-indices.
    #[serde(serialize_with = "decimal")]
    pub enumerated: BigUint,
    /// Independent closed form.
    #[serde(serialize_with = "decimal")]
    pub closed_form: BigUint,
}

fn decimal<S: serde::Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

impl IdentityRow {
    pub fn holds(&self) -> bool {
        self.enumerated == self.closed_form
    }
}

const MAX_IDENTITY_ORDER: usize = 30;

fn identity_order(j: usize) -> Result<(), FdbError> {
    if j == 0 || j > MAX_IDENTITY_ORDER {
        return Err(FdbError::OrderTooLarge(j));
    }
    Ok(())
}

/// `Σ k!/(k_1! ... k_j!)` against `2^{j-1}`.
pub fn identity_two_power(j: usize) -> Result<IdentityRow, FdbError> {
    identity_order(j)?;
    let enumerated = PartitionIter::new(j).map(|p| p.multinomial()).sum();
    Ok(IdentityRow {
        j,
        enumerated,
        closed_form: BigUint::one() << (j - 1),
    })
}

/// `Σ j!/(k_1! ... k_j!)` against `Σ_k C(j-1, k-1) j!/k!`.
pub fn identity_lah(j: usize) -> Result<IdentityRow, FdbError> {
    identity_order(j)?;
    let enumerated = PartitionIter::new(j).map(|p| p.lah_weight()).sum();
    let jf = factorial(j);
    let closed_form = (1..=j)
        .map(|k| binomial(j - 1, k - 1) * &jf / factorial(k))
        .sum();
    Ok(IdentityRow {
        j,
        enumerated,
        closed_form,
    })
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    let s = s.trim();
    let bad = || ParseError::Jet(format!("`{s}` is not a rational p/q"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}
