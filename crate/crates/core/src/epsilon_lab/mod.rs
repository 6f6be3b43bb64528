//! Fixed-point decimal expansions of `e = sqrt(n!) - isqrt(n!)` and of
//! `f(k) = sqrt(k^2 + 2k) - k`, the value `e` must take when `n` is a solution
//! with `isqrt(n!) = k`.
//!
//! Everything is truncated, never rounded, so a longer expansion always
//! extends a shorter one digit for digit.

mod table;

pub use table::{reproduce_table, Finding, PublishedRow, TableRow, PUBLISHED_ROWS};

use rug::Integer;

use crate::error::{Error, Result};
use crate::exact_arith::{isqrt, pow10, sqrt_digits, BitBudget, Natural, ScaledDecimal};
use crate::factorial_engine::factorial_exact;

/// Default ceiling on the digits examined by [`nine_run`].
pub const DEFAULT_NINE_RUN_CAP: u32 = 1 << 21;

const NINE_RUN_START: u32 = 64;

/// The first `digits` fractional digits of `sqrt(n!)`.
pub fn epsilon_digits(n: u64, digits: u32, budget: BitBudget) -> Result<ScaledDecimal> {
    let factorial = factorial_exact(n)?;
    Ok(sqrt_digits(&factorial, digits, budget)?.fractional_part())
}

/// `f(k) = sqrt(k^2 + 2k) - k` to `digits` truncated digits.
pub fn epsilon_of_k(k: &Natural, digits: u32, budget: BitBudget) -> Result<ScaledDecimal> {
    if *k < 1 {
        return Err(Error::Domain(format!("f(k) needs k >= 1, got {k}")));
    }
    let radicand = Integer::from(k + 2u32) * k;
    let root = sqrt_digits(&radicand, digits, budget)?;
    let mantissa = Integer::from(root.mantissa() - &Integer::from(k * &pow10(digits)));
    debug_assert!(mantissa >= 0 && mantissa < pow10(digits));
    Ok(ScaledDecimal::new(mantissa, digits))
}

/// `e^2 / (2(1 - e))` to `digits` truncated digits. Diagnostic only; the
/// solution test is [`crate::conditions::verify`].
///
/// With `N = n!` and `k = isqrt(N)`, rationalising the denominator gives
/// `(P + Q sqrt(N)) / R` where `Q = N - k(k+2) <= 0` and
/// `R = 2((k+1)^2 - N) > 0`, so the digits come out exact from one integer
/// square root. For a solution `Q = 0` and the ratio is exactly `k`.
pub fn k_ratio_digits(n: u64, digits: u32, budget: BitBudget) -> Result<ScaledDecimal> {
    let factorial = factorial_exact(n)?;
    let k = isqrt(&factorial);
    let k_sq = Integer::from(k.square_ref());
    if k_sq == factorial {
        return Err(Error::Domain(format!(
            "fractional part of sqrt({n}!) is zero; the ratio is undefined"
        )));
    }
    let k1 = Integer::from(&k + 1u32);
    let q = Integer::from(&factorial - &(Integer::from(&k + 2u32) * &k));
    let p = Integer::from(&factorial + &k_sq) * &k1 - Integer::from(&factorial * &k) * 2u32;
    let r = (Integer::from(k1.square_ref()) - &factorial) * 2u32;
    debug_assert!(q <= 0 && r > 0);

    let scale = pow10(digits);
    let scaled_p = p * &scale;
    let numerator = if q == 0 {
        scaled_p
    } else {
        // T = |Q| 10^d sqrt(N) = sqrt(Q^2 10^2d N); floor((P' - T) / R) with T
        // irrational equals floor((P' - floor(T) - 1) / R).
        let radicand = q.square() * &factorial;
        let t = sqrt_digits(&radicand, digits, budget)?;
        let exact = Integer::from(t.mantissa().square_ref()) == radicand * &scale * &scale;
        let mut m = scaled_p - t.mantissa();
        if !exact {
            m -= 1;
        }
        m
    };
    let (quotient, _) = numerator.div_rem_floor(r);
    Ok(ScaledDecimal::new(quotient, digits))
}

/// How far the leading run of 9s in the expansion of `e` extends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonProfile {
    pub n: u64,
    /// The digit cap the search was allowed to reach.
    pub digits_requested: u32,
    /// `e` at the last precision computed.
    pub epsilon: ScaledDecimal,
    /// Number of leading 9s; `None` when `e` is exactly zero.
    pub nine_run: Option<u32>,
    /// Set when every computed digit was a 9 and the cap stopped the search.
    pub nine_run_is_lower_bound: bool,
    /// Precisions tried, in order. The floor-root invariant was checked at
    /// each one.
    pub precision_steps: Vec<u32>,
}

/// Counts leading 9s of `e` for `n`, doubling the precision from 64 digits
/// until a non-9 digit shows up or `cap` digits have been examined.
pub fn nine_run(n: u64, cap: u32, budget: BitBudget) -> Result<EpsilonProfile> {
    if cap == 0 {
        return Err(Error::Domain("nine-run cap must be positive".into()));
    }
    let factorial = factorial_exact(n)?;
    let mut digits = NINE_RUN_START.min(cap);
    let mut steps = Vec::new();
    loop {
        let root = sqrt_digits(&factorial, digits, budget)?;
        steps.push(digits);
        let scaled = Integer::from(&factorial * &pow10(2 * digits));
        assert!(
            Integer::from(root.mantissa().square_ref()) <= scaled
                && Integer::from(root.mantissa() + 1u32).square() > scaled,
            "floor square root invariant failed for n = {n} at {digits} digits"
        );
        let epsilon = root.fractional_part();
        if *epsilon.mantissa() == 0 && Integer::from(isqrt(&factorial).square_ref()) == factorial {
            return Ok(EpsilonProfile {
                n,
                digits_requested: cap,
                epsilon,
                nine_run: None,
                nine_run_is_lower_bound: false,
                precision_steps: steps,
            });
        }
        let run = epsilon
            .fraction_digits()
            .bytes()
            .take_while(|&b| b == b'9')
            .count() as u32;
        if run < digits || digits >= cap {
            return Ok(EpsilonProfile {
                n,
                digits_requested: cap,
                epsilon,
                nine_run: Some(run),
                nine_run_is_lower_bound: run == digits,
                precision_steps: steps,
            });
        }
        digits = digits.saturating_mul(2).min(cap);
    }
}

fn decimal_len(x: u64) -> u32 {
    x.checked_ilog10().map_or(1, |l| l + 1)
}

/// `f(k) < f(k+1) < 1` for every `k` in `[k_from, k_to)`, compared as exact
/// truncated mantissas. Consecutive values differ by roughly `1/(2k^2)`, so
/// `digits` must be at least `2 * len10(k_to) + 2`.
pub fn check_f_monotone(k_from: u64, k_to: u64, digits: u32, budget: BitBudget) -> Result<bool> {
    if k_from < 1 || k_from >= k_to {
        return Err(Error::Domain(format!(
            "monotonicity range needs 1 <= k_from < k_to, got [{k_from}, {k_to}]"
        )));
    }
    let guard = 2 * decimal_len(k_to) + 2;
    if digits < guard {
        return Err(Error::Domain(format!(
            "{digits} digits cannot separate f(k) near k = {k_to}; need at least {guard}"
        )));
    }
    let one = pow10(digits);
    let mut prev = epsilon_of_k(&Integer::from(k_from), digits, budget)?;
    if *prev.mantissa() >= one {
        return Ok(false);
    }
    for k in k_from + 1..=k_to {
        let cur = epsilon_of_k(&Integer::from(k), digits, budget)?;
        if cur <= prev || *cur.mantissa() >= one {
            return Ok(false);
        }
        prev = cur;
    }
    Ok(true)
}
