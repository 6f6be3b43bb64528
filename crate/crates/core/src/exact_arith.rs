//! Arbitrary-precision and 64-bit modular primitives.
//!
//! Big integers are GMP integers through `rug`; GMP's multiplication and
//! division are subquadratic, which matters once operands reach millions of
//! bits (the square root of 10^5! with a few thousand guard digits, say).
//! The root extraction itself is implemented here as integer Newton
//! iteration so the floor contract is owned by this crate.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Complete, Integer};

use crate::error::{Error, Result};

/// Non-negative arbitrary-precision integer. Every function in this crate that
/// takes or returns a `Natural` keeps it `>= 0`.
pub type Natural = Integer;

/// Environment variable that overrides [`BitBudget::default`].
pub const BIT_BUDGET_ENV: &str = "BROCARD_BIT_BUDGET";

/// Upper bound on the size of the scaled operand handed to [`sqrt_digits`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitBudget(pub u64);

impl BitBudget {
    pub const DEFAULT: BitBudget = BitBudget(1 << 26);

    /// Reads `BROCARD_BIT_BUDGET` (a decimal bit count), falling back to the
    /// default when it is unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BIT_BUDGET_ENV) {
            Ok(raw) => raw
                .trim()
                .parse::<u64>()
                .map(BitBudget)
                .map_err(|_| Error::Domain(format!("{BIT_BUDGET_ENV}={raw:?} is not a bit count"))),
            Err(_) => Ok(Self::DEFAULT),
        }
    }
}

impl Default for BitBudget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// An exact decimal `mantissa * 10^(-frac_digits)` with a non-negative mantissa.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScaledDecimal {
    mantissa: Natural,
    frac_digits: u32,
}

impl ScaledDecimal {
    pub fn new(mantissa: Natural, frac_digits: u32) -> Self {
        assert!(mantissa.cmp0() != Ordering::Less, "negative mantissa");
        ScaledDecimal {
            mantissa,
            frac_digits,
        }
    }

    pub fn mantissa(&self) -> &Natural {
        &self.mantissa
    }

    pub fn frac_digits(&self) -> u32 {
        self.frac_digits
    }

    /// `10^frac_digits`, i.e. the mantissa of 1.
    pub fn unit(&self) -> Integer {
        pow10(self.frac_digits)
    }

    pub fn integer_part(&self) -> Natural {
        Integer::from(&self.mantissa / &self.unit())
    }

    /// The value minus its integer part, at the same precision.
    pub fn fractional_part(&self) -> ScaledDecimal {
        ScaledDecimal {
            mantissa: Integer::from(&self.mantissa % &self.unit()),
            frac_digits: self.frac_digits,
        }
    }

    /// The fractional digits as a zero-padded string of length `frac_digits`.
    pub fn fraction_digits(&self) -> String {
        let frac = self.fractional_part().mantissa.to_string();
        format!("{frac:0>width$}", width = self.frac_digits as usize)
    }

    /// Drops trailing fractional digits. Never rounds.
    pub fn truncate_to(&self, frac_digits: u32) -> ScaledDecimal {
        if frac_digits >= self.frac_digits {
            return self.rescale(frac_digits);
        }
        let drop = pow10(self.frac_digits - frac_digits);
        ScaledDecimal {
            mantissa: Integer::from(&self.mantissa / &drop),
            frac_digits,
        }
    }

    fn rescale(&self, frac_digits: u32) -> ScaledDecimal {
        debug_assert!(frac_digits >= self.frac_digits);
        ScaledDecimal {
            mantissa: Integer::from(&self.mantissa * &pow10(frac_digits - self.frac_digits)),
            frac_digits,
        }
    }

    /// Distance in units of the last place, after truncating `self` to the
    /// precision of `other`. Used to compare a truncated expansion against a
    /// rounded published one.
    pub fn ulp_distance(&self, other: &ScaledDecimal) -> Option<Integer> {
        if self.frac_digits < other.frac_digits {
            return None;
        }
        let mine = self.truncate_to(other.frac_digits);
        Some((mine.mantissa - &other.mantissa).abs())
    }
}

impl Ord for ScaledDecimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.frac_digits.max(other.frac_digits);
        self.rescale(d).mantissa.cmp(&other.rescale(d).mantissa)
    }
}

impl PartialOrd for ScaledDecimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ScaledDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.frac_digits == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}.{}", self.integer_part(), self.fraction_digits())
        }
    }
}

impl FromStr for ScaledDecimal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("{s:?} is not a non-negative decimal"));
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let mantissa = Integer::from_str(&format!("{int}{frac}")).map_err(|_| bad())?;
        Ok(ScaledDecimal::new(mantissa, frac.len() as u32))
    }
}

pub fn pow10(exp: u32) -> Integer {
    Integer::u_pow_u(10, exp).complete()
}

/// Floor square root: the `s` with `s^2 <= x < (s+1)^2`.
///
/// Newton iteration seeded at `2^ceil(bits/2)`, which is never below the root,
/// so the iterates decrease monotonically onto the floor. The adjustment loops
/// afterwards pin the contract regardless.
pub fn isqrt(x: &Natural) -> Natural {
    assert!(x.cmp0() != Ordering::Less, "isqrt of a negative number");
    if *x < 2 {
        return x.clone();
    }
    let bits = x.significant_bits();
    let mut s = Integer::from(1) << bits.div_ceil(2);
    loop {
        let next: Integer = (Integer::from(x / &s) + &s) >> 1;
        if next >= s {
            break;
        }
        s = next;
    }
    while Integer::from(s.square_ref()) > *x {
        s -= 1;
    }
    loop {
        let up = Integer::from(&s + 1u32);
        if Integer::from(up.square_ref()) > *x {
            break;
        }
        s = up;
    }
    s
}

/// `sqrt(x)` truncated to `digits` fractional decimal digits, as the exact
/// mantissa `isqrt(x * 10^(2 digits))`.
pub fn sqrt_digits(x: &Natural, digits: u32, budget: BitBudget) -> Result<ScaledDecimal> {
    // log2(10) < 3.3220
    let scale_bits = (2 * u64::from(digits) * 33_220).div_ceil(10_000);
    let needed = u64::from(x.significant_bits()) + scale_bits;
    if needed > budget.0 {
        return Err(Error::BitBudget {
            needed,
            budget: budget.0,
        });
    }
    let scaled = Integer::from(x * &pow10(2 * digits));
    Ok(ScaledDecimal::new(isqrt(&scaled), digits))
}

/// Floor `r`-th root: the `y` with `y^r <= x < (y+1)^r`.
pub fn root_floor(x: &Natural, r: u32) -> Natural {
    assert!(r >= 1, "root index must be positive");
    assert!(x.cmp0() != Ordering::Less, "root of a negative number");
    if r == 1 || *x < 2 {
        return x.clone();
    }
    if r == 2 {
        return isqrt(x);
    }
    let bits = x.significant_bits();
    let mut y = Integer::from(1) << bits.div_ceil(r);
    loop {
        let lower_pow = y.clone().pow(r - 1);
        let next = (Integer::from(x / &lower_pow) + Integer::from(&y * (r - 1))) / r;
        if next >= y {
            break;
        }
        y = next;
    }
    while y.clone().pow(r) > *x {
        y -= 1;
    }
    loop {
        let up = Integer::from(&y + 1u32);
        if up.clone().pow(r) > *x {
            break;
        }
        y = up;
    }
    y
}

/// `x - root_floor(x, r)^r`. For `r = 2` this is the integer `e(2y + e)` where
/// `sqrt(x) = y + e`; for general `r` it is the binomial expansion of
/// `(y + e)^r - y^r`.
pub fn root_defect(x: &Natural, r: u32) -> Natural {
    let y = root_floor(x, r);
    Integer::from(x - &y.pow(r))
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    if p <= 1 << 32 {
        a * b % p
    } else {
        (u128::from(a) * u128::from(b) % u128::from(p)) as u64
    }
}

/// `a^e mod p` by square-and-multiply.
pub fn modpow(a: u64, mut e: u64, p: u64) -> u64 {
    debug_assert!(p >= 2);
    let mut base = a % p;
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

/// Value of a Legendre symbol `(a | p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i8)]
pub enum Legendre {
    NonResidue = -1,
    Zero = 0,
    Residue = 1,
}

impl Legendre {
    pub fn value(self) -> i8 {
        self as i8
    }
}

/// Euler's criterion: `a^((p-1)/2) mod p` is 1 for nonzero squares, `p - 1`
/// for non-squares and 0 for multiples of `p`. `p` must be an odd prime.
pub fn legendre(a: u64, p: u64) -> Legendre {
    debug_assert!(p > 2 && p % 2 == 1);
    let a = a % p;
    if a == 0 {
        return Legendre::Zero;
    }
    match modpow(a, (p - 1) / 2, p) {
        1 => Legendre::Residue,
        r if r == p - 1 => Legendre::NonResidue,
        r => panic!("{p} is not prime: Euler criterion gave {r}"),
    }
}

/// Deterministic Miller-Rabin. The first twelve primes as witnesses are
/// sufficient for every n < 3.3 * 10^24, which covers `u64`.
pub fn is_prime_64(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = modpow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
