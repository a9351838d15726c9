//! Prime tables built by a segmented sieve of Eratosthenes.
//!
//! Memory use is bounded by the segment size plus the output list, so limits
//! up to ~10^8 are practical. Primes are indexed from 1 (`p_1 = 2`).

use thiserror::Error;

const SEGMENT: usize = 1 << 18;

#[derive(Debug, Error, PartialEq)]
pub enum PrimeError {
    #[error("sieve limit {0} is below 2, the table would be empty")]
    EmptyTable(u64),
    #[error("prime index {index} out of range, table holds {len} primes")]
    OutOfRange { index: usize, len: usize },
    #[error("bound {bound} exceeds the sieve limit {limit}")]
    BeyondLimit { bound: f64, limit: u64 },
}

/// All primes up to `limit`, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// The `m`-th prime, 1-indexed.
    pub fn nth_prime(&self, m: usize) -> Result<u64, PrimeError> {
        m.checked_sub(1)
            .and_then(|i| self.primes.get(i).copied())
            .ok_or(PrimeError::OutOfRange {
                index: m,
                len: self.primes.len(),
            })
    }

    /// Primes `p ≤ x`. Errors when `x` reaches past the sieve limit.
    pub fn up_to(&self, x: f64) -> Result<&[u64], PrimeError> {
        if x >= (self.limit + 1) as f64 {
            return Err(PrimeError::BeyondLimit {
                bound: x,
                limit: self.limit,
            });
        }
        if x < 2.0 {
            return Ok(&[]);
        }
        let end = self.primes.partition_point(|&p| (p as f64) <= x);
        Ok(&self.primes[..end])
    }

    /// Number of primes `p ≤ x` (the prime-counting function).
    pub fn pi(&self, x: f64) -> Result<usize, PrimeError> {
        self.up_to(x).map(<[u64]>::len)
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }
}

/// Sieve all primes up to and including `limit`.
pub fn sieve_up_to(limit: u64) -> Result<PrimeTable, PrimeError> {
    if limit < 2 {
        return Err(PrimeError::EmptyTable(limit));
    }
    let root = isqrt(limit);
    let base = simple_sieve(root);
    let mut primes = base.clone();

    let mut lo = root + 1;
    let mut marks = vec![true; SEGMENT];
    while lo <= limit {
        let hi = (lo + SEGMENT as u64 - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        marks[..len].fill(true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let first = (lo.div_ceil(p) * p).max(p * p);
            let mut m = first;
            while m <= hi {
                marks[(m - lo) as usize] = false;
                m += p;
            }
        }
        primes.extend(
            marks[..len]
                .iter()
                .enumerate()
                .filter(|(_, &is_p)| is_p)
                .map(|(i, _)| lo + i as u64),
        );
        lo = hi + 1;
    }
    Ok(PrimeTable { limit, primes })
}

/// Sieve large enough to hold at least `count` primes.
pub fn sieve_first(count: usize) -> PrimeTable {
    let n = count.max(6) as f64;
    // p_n < n(ln n + ln ln n) for n ≥ 6
    let bound = (n * (n.ln() + n.ln().ln())).ceil() as u64 + 10;
    sieve_up_to(bound).expect("bound is at least 2")
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is_p = vec![true; n + 1];
    is_p[0] = false;
    if n >= 1 {
        is_p[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is_p[i] {
            let mut j = i * i;
            while j <= n {
                is_p[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is_p
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}
