use rug::Integer;

use crate::conditions::{bound_check_report, verify_factorial, BoundCheck};
use crate::error::Result;
use crate::exact_arith::{sqrt_digits, BitBudget, Natural, ScaledDecimal};
use crate::factorial_engine::factorial_exact;

use super::k_ratio_digits;

/// Values printed in the published worked examples for small `n`, kept as the
/// literal strings so their precision is preserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PublishedRow {
    pub n: u64,
    /// `isqrt(n!)` as printed alongside the `k(k+2)` product test.
    pub k_product_test: u64,
    /// `isqrt(n!)` as printed alongside the fractional-part expansions.
    pub k_expansion: u64,
    pub epsilon: &'static str,
    pub ratio: &'static str,
}

pub const PUBLISHED_ROWS: [PublishedRow; 11] = [
    row(1, 1, 1, "0", "0"),
    row(2, 1, 1, "0.414213562", "0.146446609"),
    row(3, 2, 2, "0.449489743", "0.183503419"),
    row(4, 4, 4, "0.898979486", "4"),
    row(5, 10, 10, "0.95445115", "10"),
    row(6, 26, 26, "0.83281573", "2.07430412"),
    row(7, 70, 70, "0.9929573972", "70"),
    row(8, 26, 200, "0.7984064", "1.581033892"),
    row(9, 602, 602, "0.3952191", "0.1291361398"),
    row(10, 1904, 1904, "0.940944", "7.496063447"),
    row(11, 6317, 6371, "0.974359", "18.51278095"),
];

const fn row(
    n: u64,
    k_product_test: u64,
    k_expansion: u64,
    epsilon: &'static str,
    ratio: &'static str,
) -> PublishedRow {
    PublishedRow {
        n,
        k_product_test,
        k_expansion,
        epsilon,
        ratio,
    }
}

impl PublishedRow {
    pub fn lookup(n: u64) -> Option<&'static PublishedRow> {
        PUBLISHED_ROWS.iter().find(|r| r.n == n)
    }
}

/// A disagreement between a published value and the computed one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finding {
    /// A printed `k` differs from `isqrt(n!)`.
    KMisprint {
        column: &'static str,
        published: u64,
        computed: Natural,
    },
    /// A printed decimal is more than one unit in its last place away from
    /// the truncated expansion.
    DigitMismatch {
        column: &'static str,
        published: &'static str,
        computed: ScaledDecimal,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub n: u64,
    pub factorial: Natural,
    pub k: Natural,
    pub k_even: bool,
    /// `k(k + 2)`
    pub product: Natural,
    pub bound: BoundCheck,
    pub defect: Natural,
    pub is_solution: bool,
    pub epsilon: ScaledDecimal,
    /// `None` where the fractional part is zero.
    pub ratio: Option<ScaledDecimal>,
    pub published: Option<&'static PublishedRow>,
    pub findings: Vec<Finding>,
}

fn compare_digits(
    column: &'static str,
    published: &'static str,
    computed: &ScaledDecimal,
    findings: &mut Vec<Finding>,
) {
    let Ok(reference) = published.parse::<ScaledDecimal>() else {
        return;
    };
    let close = computed
        .ulp_distance(&reference)
        .is_some_and(|d| d <= 1);
    if !close {
        findings.push(Finding::DigitMismatch {
            column,
            published,
            computed: computed.clone(),
        });
    }
}

/// Computes the worked-example columns for every `n` in `from..=to` and checks
/// them against the published values where those exist. `digits` sets the
/// displayed precision; comparisons use at least as many digits as were
/// printed.
pub fn reproduce_table(from: u64, to: u64, digits: u32, budget: BitBudget) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for n in from..=to {
        let factorial = factorial_exact(n)?;
        let report = verify_factorial(n, &factorial);
        let bound = bound_check_report(&report, &factorial);
        let published = PublishedRow::lookup(n);

        let printed_digits = published.map_or(0, |p| {
            [p.epsilon, p.ratio]
                .iter()
                .map(|s| s.split_once('.').map_or(0, |(_, f)| f.len() as u32))
                .max()
                .unwrap_or(0)
        });
        let work = digits.max(printed_digits);
        let epsilon_full = sqrt_digits(&factorial, work, budget)?.fractional_part();
        let ratio_full = if *epsilon_full.mantissa() == 0
            && Integer::from(report.k.square_ref()) == factorial
        {
            None
        } else {
            Some(k_ratio_digits(n, work, budget)?)
        };

        let mut findings = Vec::new();
        if let Some(p) = published {
            for (column, printed) in [("k_product_test", p.k_product_test), ("k_expansion", p.k_expansion)] {
                if report.k != printed {
                    findings.push(Finding::KMisprint {
                        column,
                        published: printed,
                        computed: report.k.clone(),
                    });
                }
            }
            compare_digits("epsilon", p.epsilon, &epsilon_full, &mut findings);
            if let Some(ratio) = &ratio_full {
                compare_digits("ratio", p.ratio, ratio, &mut findings);
            }
        }

        rows.push(TableRow {
            n,
            product: report.product(),
            factorial,
            k_even: report.k_even,
            bound,
            defect: report.defect.clone(),
            is_solution: report.is_solution,
            epsilon: epsilon_full.truncate_to(digits),
            ratio: ratio_full.map(|r| r.truncate_to(digits)),
            published,
            findings,
            k: report.k,
        });
    }
    Ok(rows)
}
