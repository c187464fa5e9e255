//! Multi-indices `(k_1, ..., k_j)` with `Σ ℓ k_ℓ = j`, streamed in
//! ascending lexicographic order of `k_vec`.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::error::FdbError;

/// Largest order [`enumerate_partitions`] will materialize.
pub const MAX_COLLECTED_ORDER: usize = 80;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PartitionMultiIndex {
    /// `k_vec[ℓ - 1] = k_ℓ`.
    pub k_vec: Vec<u32>,
}

impl PartitionMultiIndex {
    pub fn j(&self) -> usize {
        self.k_vec.len()
    }

    /// `k = Σ k_ℓ`, the order of the outer derivative.
    pub fn k(&self) -> u32 {
        self.k_vec.iter().sum()
    }

    /// `Σ ℓ k_ℓ`.
    pub fn weight(&self) -> usize {
        self.k_vec
            .iter()
            .enumerate()
            .map(|(i, &k)| (i + 1) * k as usize)
            .sum()
    }

    /// Nonzero entries as `(ℓ, k_ℓ)`.
    pub fn parts(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.k_vec
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| (i + 1, k))
    }

    /// `j! / Π k_ℓ! (ℓ!)^{k_ℓ}`, the Faà di Bruno coefficient.
    pub fn fdb_coefficient(&self) -> BigUint {
        let mut den = BigUint::one();
        for (l, k) in self.parts() {
            den *= factorial(k as usize) * factorial(l).pow(k);
        }
        factorial(self.j()) / den
    }

    /// `k! / Π k_ℓ!`.
    pub fn multinomial(&self) -> BigUint {
        factorial(self.k() as usize) / self.k_factorials()
    }

    /// `j! / Π k_ℓ!`.
    pub fn lah_weight(&self) -> BigUint {
        factorial(self.j()) / self.k_factorials()
    }

    fn k_factorials(&self) -> BigUint {
        self.parts()
            .map(|(_, k)| factorial(k as usize))
            .fold(BigUint::one(), |a, b| a * b)
    }
}

pub fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |a, b| a * b)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Streaming enumeration; yields nothing for `j = 0`.
#[derive(Clone, Debug)]
pub struct PartitionIter {
    current: Option<Vec<u32>>,
}

impl PartitionIter {
    pub fn new(j: usize) -> Self {
        let current = (j > 0).then(|| {
            let mut v = vec![0; j];
            v[j - 1] = 1;
            v
        });
        PartitionIter { current }
    }

    /// Lexicographic successor: raise the rightmost `k_i` by the smallest
    /// step whose remainder `r` can be filled by parts larger than `i`, then
    /// complete the suffix minimally (a single part `r`, or nothing).
    fn successor(k: &[u32]) -> Option<Vec<u32>> {
        let j = k.len();
        let mut prefix = vec![0usize; j + 1];
        for i in 1..=j {
            prefix[i] = prefix[i - 1] + i * k[i - 1] as usize;
        }
        for i in (1..j).rev() {
            let mut step = 1;
            while prefix[i] + step * i <= j {
                let r = j - prefix[i] - step * i;
                if r == 0 || r > i {
                    let mut next = k[..i].to_vec();
                    next[i - 1] += step as u32;
                    next.resize(j, 0);
                    if r > 0 {
                        next[r - 1] = 1;
                    }
                    return Some(next);
                }
                step += 1;
            }
        }
        None
    }
}

impl Iterator for PartitionIter {
    type Item = PartitionMultiIndex;

    fn next(&mut self) -> Option<Self::Item> {
        let cur = self.current.take()?;
        self.current = Self::successor(&cur);
        Some(PartitionMultiIndex { k_vec: cur })
    }
}

/// All multi-indices of order `j` in ascending lexicographic order; empty for `j = 0`.
pub fn enumerate_partitions(j: usize) -> Result<Vec<PartitionMultiIndex>, FdbError> {
    if j > MAX_COLLECTED_ORDER {
        return Err(FdbError::OrderTooLarge(j));
    }
    Ok(PartitionIter::new(j).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orders_in_lex_order() {
        let p3: Vec<Vec<u32>> = PartitionIter::new(3).map(|p| p.k_vec).collect();
        assert_eq!(p3, vec![vec![0, 0, 1], vec![1, 1, 0], vec![3, 0, 0]]);
        assert_eq!(enumerate_partitions(1).unwrap().len(), 1);
        assert_eq!(enumerate_partitions(5).unwrap().len(), 7);
        assert_eq!(enumerate_partitions(8).unwrap().len(), 22);
        assert!(enumerate_partitions(0).unwrap().is_empty());
        assert!(enumerate_partitions(81).is_err());
    }

    #[test]
    fn invariants_hold() {
        for j in 1..=14 {
            let all: Vec<_> = PartitionIter::new(j).collect();
            for w in all.windows(2) {
                assert!(w[0].k_vec < w[1].k_vec);
            }
            for p in &all {
                assert_eq!(p.weight(), j);
                assert!(p.k() >= 1 && p.k() as usize <= j);
            }
        }
    }

    #[test]
    fn coefficients() {
        // j = 4, k_vec = (2, 1, 0, 0): 4! / (2! 1!^2 * 1! 2!^1) = 6
        let p = PartitionMultiIndex {
            k_vec: vec![2, 1, 0, 0],
        };
        assert_eq!(p.fdb_coefficient(), BigUint::from(6u32));
        assert_eq!(p.multinomial(), BigUint::from(3u32));
        assert_eq!(p.lah_weight(), BigUint::from(12u32));
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
    }
}
