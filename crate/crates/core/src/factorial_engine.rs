//! Factorials: the exact value by balanced product tree, and the residue
//! stream `n! mod p` over a pool of primes that all exceed the scan ceiling.

use rug::Integer;

use crate::error::{Error, Result};
use crate::exact_arith::{is_prime_64, mul_mod, Natural};

/// Default memory guard for [`factorial_exact`].
pub const DEFAULT_EXACT_CEILING: u64 = 10_000_000;

/// Default number of filter primes.
pub const DEFAULT_POOL_SIZE: usize = 48;

const MAX_SCAN_CEILING: u64 = 1 << 32;

/// The filter primes for a scan up to `max_n`. Every prime is larger than
/// `max_n`, so none of them ever divides a scanned `n!`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePool {
    max_n: u64,
    primes: Vec<u64>,
}

impl PrimePool {
    /// The `count` smallest primes strictly greater than `max_n`.
    pub fn build(max_n: u64, count: usize) -> Result<Self> {
        if max_n >= MAX_SCAN_CEILING {
            return Err(Error::UnsupportedCeiling(max_n));
        }
        if count == 0 {
            return Err(Error::EmptyPool);
        }
        let primes = (max_n + 1..)
            .filter(|&c| c > 2 && is_prime_64(c))
            .take(count)
            .collect();
        Ok(PrimePool { max_n, primes })
    }

    /// Reassembles a pool from stored parts, re-checking its invariants.
    pub fn from_parts(max_n: u64, primes: Vec<u64>) -> Result<Self> {
        if max_n >= MAX_SCAN_CEILING {
            return Err(Error::UnsupportedCeiling(max_n));
        }
        if primes.is_empty() {
            return Err(Error::EmptyPool);
        }
        let sorted = primes.windows(2).all(|w| w[0] < w[1]);
        if !sorted || primes.iter().any(|&p| p <= max_n || p == 2 || !is_prime_64(p)) {
            return Err(Error::Domain(format!(
                "pool primes must be increasing odd primes above {max_n}"
            )));
        }
        Ok(PrimePool { max_n, primes })
    }

    pub fn max_n(&self) -> u64 {
        self.max_n
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
}

/// Scan cursor: `n`, `n! mod p` for every pool prime, and optionally `n!`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorialState {
    n: u64,
    residues: Vec<u64>,
    exact: Option<Natural>,
}

impl FactorialState {
    /// The state at `n = 0`, where every residue is `0! = 1`.
    pub fn start(pool: &PrimePool, carry_exact: bool) -> Self {
        FactorialState {
            n: 0,
            residues: vec![1; pool.len()],
            exact: carry_exact.then(|| Integer::from(1)),
        }
    }

    /// Rebuilds a residue-only state, checking it against the pool.
    pub fn from_residues(pool: &PrimePool, n: u64, residues: Vec<u64>) -> Result<Self> {
        if n > pool.max_n() {
            return Err(Error::CeilingExceeded(pool.max_n()));
        }
        if residues.len() != pool.len()
            || residues
                .iter()
                .zip(pool.primes())
                .any(|(&r, &p)| r == 0 || r >= p)
        {
            return Err(Error::Domain(format!(
                "residues at n = {n} are inconsistent with the prime pool"
            )));
        }
        Ok(FactorialState {
            n,
            residues,
            exact: None,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn exact(&self) -> Option<&Natural> {
        self.exact.as_ref()
    }

    /// Moves to `n + 1`.
    pub fn advance(&mut self, pool: &PrimePool) -> Result<()> {
        if self.n >= pool.max_n() {
            return Err(Error::CeilingExceeded(pool.max_n()));
        }
        let next = self.n + 1;
        for (r, &p) in self.residues.iter_mut().zip(pool.primes()) {
            *r = mul_mod(*r, next % p, p);
        }
        if let Some(exact) = self.exact.as_mut() {
            *exact *= next;
        }
        self.n = next;
        Ok(())
    }

    /// Jumps to `n`, with residues already computed by the caller.
    pub(crate) fn set_residues(&mut self, n: u64, residues: &[u64]) {
        debug_assert!(self.exact.is_none());
        self.n = n;
        self.residues.copy_from_slice(residues);
    }
}

/// `n!` with the default ceiling.
pub fn factorial_exact(n: u64) -> Result<Natural> {
    factorial_exact_with_ceiling(n, DEFAULT_EXACT_CEILING)
}

pub fn factorial_exact_with_ceiling(n: u64, ceiling: u64) -> Result<Natural> {
    if n > ceiling {
        return Err(Error::ExactCeiling { n, ceiling });
    }
    if n < 2 {
        return Ok(Integer::from(1));
    }
    Ok(range_product(2, n))
}

/// Product of `lo..=hi` by splitting the range in half, so the multiplications
/// near the root pair operands of similar size.
fn range_product(lo: u64, hi: u64) -> Integer {
    const LEAF: u64 = 16;
    if hi - lo < LEAF {
        let mut acc = Integer::from(1);
        let mut word: u64 = 1;
        for k in lo..=hi {
            match word.checked_mul(k) {
                Some(w) => word = w,
                None => {
                    acc *= word;
                    word = k;
                }
            }
        }
        acc *= word;
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    let (left, right) = rayon::join(|| range_product(lo, mid), || range_product(mid + 1, hi));
    left * right
}

/// Returns `n` if `x = n!`. Divides by 2, 3, 4, ... while the division is
/// exact. `1` maps to 0 since `0! = 1! = 1`.
pub fn is_factorial(x: &Natural) -> Option<u64> {
    if *x < 1 {
        return None;
    }
    let mut rest = x.clone();
    let mut k = 1u64;
    while rest != 1 {
        let d = k + 1;
        if d > u64::from(u32::MAX) || !rest.is_divisible_u(d as u32) {
            return None;
        }
        rest.div_exact_u_mut(d as u32);
        k = d;
    }
    Some(if k == 1 { 0 } else { k })
}
