//! The integer solutions of the system
//!
//! ```text
//! F(x, y) = y^4 + 4y^3 + 2xy^2 + 4y^2 + 4xy - 3x^2 = 0
//! G(x, y) = y^3 + 3y^2 + 2y - xy - x            = 0
//! ```
//!
//! which every solution `x = n!`, `y = isqrt(n!)` satisfies. As a quadratic in
//! `x`, `F` has roots `y(y+2)` and `-y(y+2)/3`; `G` factors as
//! `(y + 1)(y(y+2) - x)`. Window solving takes the roots of `F` for each `y`
//! and confirms them against both polynomials.

use rug::Integer;

use crate::error::{Error, Result};
use crate::exact_arith::isqrt;
use crate::factorial_engine::is_factorial;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub x: Integer,
    pub y: Integer,
}

impl LatticePoint {
    pub fn new(x: impl Into<Integer>, y: impl Into<Integer>) -> Self {
        LatticePoint {
            x: x.into(),
            y: y.into(),
        }
    }
}

/// `(F(x, y), G(x, y))`.
pub fn eval_system(p: &LatticePoint) -> (Integer, Integer) {
    let (x, y) = (&p.x, &p.y);
    let y2 = Integer::from(y.square_ref());
    let y3 = Integer::from(&y2 * y);
    let y4 = Integer::from(y2.square_ref());
    let xy = Integer::from(x * y);

    let mut f = y4;
    f += Integer::from(&y3 * 4u32);
    f += Integer::from(&xy * y) * 2u32;
    f += Integer::from(&y2 * 4u32);
    f += Integer::from(&xy * 4u32);
    f -= Integer::from(x.square_ref()) * 3u32;

    let mut g = y3;
    g += Integer::from(&y2 * 3u32);
    g += Integer::from(y * 2u32);
    g -= &xy;
    g -= x;
    (f, g)
}

/// Integer roots in `x` of `F(x, y) = 0` for fixed `y`, larger root first,
/// without duplicates.
pub fn roots_in_x(y: &Integer) -> Vec<Integer> {
    // 3x^2 - 2y(y+2) x - y^2 (y+2)^2 = 0
    let w = Integer::from(y + 2u32) * y;
    let a = Integer::from(3);
    let b = Integer::from(&w * 2u32);
    let c = Integer::from(w.square_ref());
    let disc = Integer::from(b.square_ref()) + Integer::from(&a * &c) * 4u32;
    let s = isqrt(&disc);
    assert_eq!(
        Integer::from(s.square_ref()),
        disc,
        "discriminant 16 y^2 (y+2)^2 must be a perfect square"
    );
    let two_a = Integer::from(&a * 2u32);
    let mut roots: Vec<Integer> = Vec::with_capacity(2);
    for numerator in [Integer::from(&b + &s), Integer::from(&b - &s)] {
        if numerator.is_divisible(&two_a) {
            let root = numerator.div_exact(&two_a);
            if !roots.contains(&root) {
                roots.push(root);
            }
        }
    }
    roots
}

/// Every integer point with `y_min <= y <= y_max` where both polynomials
/// vanish, ordered by `y` then descending `x`. With `factorials_only`, keeps
/// only points whose `x` is a factorial `>= 1`.
pub fn solve_window(y_min: &Integer, y_max: &Integer, factorials_only: bool) -> Result<Vec<LatticePoint>> {
    if y_min > y_max {
        return Err(Error::Domain(format!("empty y-window [{y_min}, {y_max}]")));
    }
    let mut points = Vec::new();
    let mut y = y_min.clone();
    while y <= *y_max {
        for x in roots_in_x(&y) {
            let point = LatticePoint { x, y: y.clone() };
            let (f, g) = eval_system(&point);
            debug_assert_eq!(f, 0);
            if g != 0 {
                continue;
            }
            if factorials_only && (point.x < 1 || is_factorial(&point.x).is_none()) {
                continue;
            }
            points.push(point);
        }
        y += 1;
    }
    Ok(points)
}

/// Checks at `(x, y)` that `(y^2 + 2y + x)^2 - (2x)^2` equals
/// `(y^2 + 2y + 3x)(y^2 + 2y - x)` and that this product equals `F(x, y)`.
pub fn ferrari_identity_check(y: &Integer, x: &Integer) -> bool {
    let base = Integer::from(y + 2u32) * y;
    let lhs = Integer::from(&base + x).square() - Integer::from(x * 2u32).square();
    let product = Integer::from(&base + &Integer::from(x * 3u32)) * Integer::from(&base - x);
    let (f, _) = eval_system(&LatticePoint {
        x: x.clone(),
        y: y.clone(),
    });
    lhs == product && product == f
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Integer {
        Integer::from(v)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_system(&LatticePoint::new(24, 4)), (int(0), int(0)));
        assert_eq!(eval_system(&LatticePoint::new(120, 10)), (int(0), int(0)));
        assert_eq!(eval_system(&LatticePoint::new(5040, 70)), (int(0), int(0)));
        assert_eq!(eval_system(&LatticePoint::new(0, 0)), (int(0), int(0)));
        assert_eq!(eval_system(&LatticePoint::new(1, 1)), (int(12), int(4)));
    }

    #[test]
    fn roots_examples() {
        assert_eq!(roots_in_x(&int(4)), vec![int(24), int(-8)]);
        assert_eq!(roots_in_x(&int(-1)), vec![int(-1)]);
        assert_eq!(roots_in_x(&int(0)), vec![int(0)]);
        assert_eq!(roots_in_x(&int(-2)), vec![int(0)]);
        // y(y+2) = 3 at y = 1: -1 is an integer root
        assert_eq!(roots_in_x(&int(1)), vec![int(3), int(-1)]);
        // y = 2: y(y+2) = 8, 8/3 not integral
        assert_eq!(roots_in_x(&int(2)), vec![int(8)]);
    }

    #[test]
    fn window_examples() {
        let pts = solve_window(&int(-10), &int(-1), false).unwrap();
        let mut got: Vec<(i64, i64)> = pts
            .iter()
            .map(|p| (p.x.to_i64().unwrap(), p.y.to_i64().unwrap()))
            .collect();
        got.sort();
        let mut expected = vec![
            (80, -10),
            (63, -9),
            (48, -8),
            (35, -7),
            (24, -6),
            (15, -5),
            (8, -4),
            (3, -3),
            (0, -2),
            (-1, -1),
        ];
        expected.sort();
        assert_eq!(got, expected);

        let pts = solve_window(&int(0), &int(100), true).unwrap();
        assert_eq!(
            pts,
            vec![
                LatticePoint::new(24, 4),
                LatticePoint::new(120, 10),
                LatticePoint::new(5040, 70)
            ]
        );
        assert_eq!(
            solve_window(&int(0), &int(0), false).unwrap(),
            vec![LatticePoint::new(0, 0)]
        );
        assert!(solve_window(&int(1), &int(0), false).is_err());
    }

    #[test]
    fn family_is_on_both_curves() {
        for y in -1000..=1000i64 {
            let y = int(y);
            let x = Integer::from(&y + 2u32) * &y;
            assert_eq!(eval_system(&LatticePoint { x, y }), (int(0), int(0)));
        }
    }

    #[test]
    fn second_branch_only_meets_g_at_small_y() {
        let mut hits = Vec::new();
        for y in -3000..=3000i64 {
            let w = (y + 2) * y;
            if w % 3 != 0 {
                continue;
            }
            let p = LatticePoint::new(-w / 3, y);
            let (f, g) = eval_system(&p);
            assert_eq!(f, 0);
            if g == 0 {
                hits.push(y);
            }
        }
        assert_eq!(hits, vec![-2, 0]);
        // y = -1 has the second root 1/3, which is not an integer point.
        assert_eq!(roots_in_x(&int(-1)).len(), 1);
    }

    #[test]
    fn ferrari_examples() {
        assert!(ferrari_identity_check(&int(4), &int(24)));
        assert!(ferrari_identity_check(&int(10), &int(120)));
        assert!(ferrari_identity_check(&int(1), &int(1)));
        for y in -20..=20 {
            for x in -50..=50 {
                assert!(ferrari_identity_check(&int(y), &int(x)));
            }
        }
    }
}
