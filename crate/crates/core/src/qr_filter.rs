//! Quadratic-residue rejection.
//!
//! If `n! + 1 = m^2` then `(n! + 1 | p)` is 0 or +1 for every odd prime `p`, so
//! a single prime with symbol -1 proves `n` is not a solution. Symbols 0 and
//! +1 are both treated as "pass".

use crate::exact_arith::{legendre, Legendre};
use crate::factorial_engine::{FactorialState, PrimePool};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterOutcome {
    pub passed: bool,
    /// The first pool prime, in pool order, with `(n! + 1 | p) = -1`.
    pub rejecting_prime: Option<u64>,
    pub symbols_evaluated: usize,
}

/// Evaluates the filter for the cursor position of `state`.
pub fn passes(state: &FactorialState, pool: &PrimePool) -> FilterOutcome {
    passes_residues(state.residues().iter().copied(), pool.primes())
}

/// Same as [`passes`] for a bare stream of `n! mod p` values in pool order.
pub fn passes_residues(residues: impl IntoIterator<Item = u64>, primes: &[u64]) -> FilterOutcome {
    let mut evaluated = 0;
    for (r, &p) in residues.into_iter().zip(primes) {
        evaluated += 1;
        let shifted = if r + 1 == p { 0 } else { r + 1 };
        if legendre(shifted, p) == Legendre::NonResidue {
            return FilterOutcome {
                passed: false,
                rejecting_prime: Some(p),
                symbols_evaluated: evaluated,
            };
        }
    }
    FilterOutcome {
        passed: true,
        rejecting_prime: None,
        symbols_evaluated: evaluated,
    }
}
