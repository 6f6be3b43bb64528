//! Exact solution criteria for `n! + 1 = m^2`.
//!
//! With `k = isqrt(n!)` and `sqrt(n!) = k + e`, every statement about the
//! irrational fractional part `e` is rewritten as an integer identity:
//! `e(2k + e)` is the defect `n! - k^2`, and `e(2k + e) = 2k` is `defect = 2k`,
//! which is the same as `k(k + 2) = n!`, which is the same as
//! `n! + 1 = (k + 1)^2`. No predicate here touches a decimal or a float.

use std::cmp::Ordering;
use std::fmt;

use rug::Integer;

use crate::error::{Error, Result};
use crate::exact_arith::{isqrt, Natural};
use crate::factorial_engine::factorial_exact;

/// Every criterion evaluated for one `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub n: u64,
    /// `isqrt(n!)`
    pub k: Natural,
    /// `k + 1`, the only possible `m` for this `n`.
    pub m_candidate: Natural,
    pub k_even: bool,
    /// `k(k + 2) = n!`
    pub product_matches: bool,
    /// `n! - k^2`
    pub defect: Natural,
    pub is_solution: bool,
    pub m: Option<Natural>,
}

impl VerifyReport {
    /// `k(k + 2)`.
    pub fn product(&self) -> Natural {
        Integer::from(&self.k + 2u32) * &self.k
    }
}

/// Builds the report from an already computed `n!`.
pub fn verify_factorial(n: u64, factorial: &Natural) -> VerifyReport {
    let k = isqrt(factorial);
    let defect = Integer::from(factorial - &Integer::from(k.square_ref()));
    let twice_k = Integer::from(&k * 2u32);
    let product = Integer::from(&k + 2u32) * &k;
    let product_matches = product == *factorial;
    let is_solution = defect == twice_k;
    debug_assert_eq!(is_solution, product_matches);
    let m_candidate = Integer::from(&k + 1u32);
    VerifyReport {
        n,
        k_even: k.is_even(),
        product_matches,
        defect,
        is_solution,
        m: is_solution.then(|| m_candidate.clone()),
        m_candidate,
        k,
    }
}

pub fn verify(n: u64) -> Result<VerifyReport> {
    Ok(verify_factorial(n, &factorial_exact(n)?))
}

/// `isqrt(n!) + 1`.
pub fn candidate_m(n: u64) -> Result<Natural> {
    Ok(isqrt(&factorial_exact(n)?) + 1u32)
}

/// `n! - isqrt(n!)^2`, the integer value of `e(2k + e)`.
pub fn defect(n: u64) -> Result<Natural> {
    Ok(verify(n)?.defect)
}

/// Where `n!` sits relative to `k(k + 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundCheck {
    /// `n! < k(k + 2)`: not a solution.
    Strict,
    /// `n! = k(k + 2)`: a solution.
    Equality,
    /// `n! > k(k + 2)`. Cannot happen for a correct `k`.
    Violated,
}

impl BoundCheck {
    /// `n! <= k(k + 2)`.
    pub fn holds(self) -> bool {
        self != BoundCheck::Violated
    }
}

impl fmt::Display for BoundCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundCheck::Strict => "strict",
            BoundCheck::Equality => "equality",
            BoundCheck::Violated => "violated",
        })
    }
}

pub fn bound_check_report(report: &VerifyReport, factorial: &Natural) -> BoundCheck {
    let check = match factorial.cmp(&report.product()) {
        Ordering::Less => BoundCheck::Strict,
        Ordering::Equal => BoundCheck::Equality,
        Ordering::Greater => BoundCheck::Violated,
    };
    assert_eq!(
        check == BoundCheck::Strict,
        !report.is_solution,
        "n! <= k(k+2) must be strict exactly off the solutions (n = {})",
        report.n
    );
    check
}

/// `n! <= k(k + 2)`, strict exactly when `n` is not a solution.
pub fn bound_check(n: u64) -> Result<BoundCheck> {
    let factorial = factorial_exact(n)?;
    let report = verify_factorial(n, &factorial);
    Ok(bound_check_report(&report, &factorial))
}

/// `k^2 - 1 < n!`: the factorization `n! = (k - 1)(k + 1)` never occurs.
pub fn alternative_factorization_excluded(n: u64) -> Result<bool> {
    let factorial = factorial_exact(n)?;
    let k = isqrt(&factorial);
    Ok(Integer::from(k.square_ref()) - 1u32 < factorial)
}

/// A solution's `n! = (m - 1)(m + 1)` split into `2a` and `2^(e-1) b`, with `a`
/// and `b` odd and `e` the power of 2 in `n!`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorStructure {
    pub a: Natural,
    pub b: Natural,
    pub e: u32,
    /// `2a`, the factor that is 2 mod 4.
    pub half_even: Natural,
    /// `2^(e-1) b`
    pub half_pow: Natural,
}

pub fn factor_structure(n: u64) -> Result<FactorStructure> {
    let factorial = factorial_exact(n)?;
    let report = verify_factorial(n, &factorial);
    if !report.is_solution {
        return Err(Error::NotASolution(n));
    }
    let low = report.k.clone();
    let high = Integer::from(&report.k + 2u32);
    // Of two consecutive even numbers exactly one is 2 mod 4.
    let (half_even, half_pow) = if low.mod_u(4) == 2 {
        (low, high)
    } else {
        (high, low)
    };
    let e = factorial.find_one(0).expect("n! > 0");
    let a = Integer::from(&half_even >> 1);
    let b = Integer::from(&half_pow >> (e - 1));
    let structure = FactorStructure {
        a,
        b,
        e,
        half_even,
        half_pow,
    };
    debug_assert!(structure.holds_for(&factorial));
    Ok(structure)
}

impl FactorStructure {
    /// Checks every invariant against `n!`.
    pub fn holds_for(&self, factorial: &Natural) -> bool {
        let diff = Integer::from(&self.half_even - &self.half_pow).abs();
        self.a.is_odd()
            && self.b.is_odd()
            && self.e >= 1
            && Integer::from(self.a.gcd_ref(&self.half_pow)) == 1
            && diff == 2
            && Integer::from(&self.half_even * &self.half_pow) == *factorial
            && self.half_even == Integer::from(&self.a * 2u32)
            && self.half_pow == Integer::from(&self.b << (self.e - 1))
            && factorial.find_one(0) == Some(self.e)
    }
}
