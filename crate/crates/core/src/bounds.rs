//! Per-vertex lower and upper bound polynomials `f(p)`, `g(p)` for the
//! maximal expected number of percolation components on the three planar
//! lattices, and a certified maximiser for them.
//!
//! Square coefficients are stored in their expanded form. The triangular
//! and hexagonal polynomials are assembled from `c * p^a * (1-p)^b` terms
//! and expanded here, never by hand.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::graph::LatticeKind;
use crate::poly::{ratio, rational_from_f64, rational_to_f64, IntegerPoly, RationalPolynomial};

/// Sum of `(num/den) * p^a * (1-p)^b` over `(num, den, a, b)`.
pub fn expand_terms(terms: &[(i64, i64, usize, u32)]) -> RationalPolynomial {
    let one_minus_p = RationalPolynomial::one_minus_p();
    terms
        .iter()
        .fold(RationalPolynomial::zero(), |acc, &(num, den, a, b)| {
            let term = &RationalPolynomial::monomial(ratio(num, den), a) * &one_minus_p.pow(b);
            &acc + &term
        })
}

/// Square-lattice upper bound in its unexpanded form
/// `1/2 * (p - 3/2 p^2 + 3/2 p^2 (1-p)^6 + ...)`.
pub const SQUARE_UPPER_TERMS: [(i64, i64, usize, u32); 12] = [
    (1, 2, 1, 0),
    (-3, 4, 2, 0),
    (3, 4, 2, 6),
    (1, 2, 1, 4),
    (1, 4, 4, 0),
    (1, 4, 4, 8),
    (1, 1, 3, 7),
    (1, 2, 3, 8),
    (1, 1, 4, 8),
    (1, 1, 4, 9),
    (1, 4, 4, 10),
    (1, 1, 5, 9),
];

pub const TRIANGULAR_UPPER_TERMS: [(i64, i64, usize, u32); 10] = [
    (1, 2, 1, 0),
    (-1, 1, 2, 0),
    (1, 1, 2, 8),
    (1, 2, 1, 6),
    (1, 2, 3, 0),
    (1, 2, 3, 9),
    (3, 2, 3, 10),
    (1, 2, 4, 10),
    (1, 1, 4, 11),
    (1, 2, 5, 11),
];

pub const HEXAGONAL_UPPER_TERMS: [(i64, i64, usize, u32); 9] = [
    (1, 2, 1, 0),
    (-9, 16, 2, 0),
    (9, 16, 2, 4),
    (1, 2, 1, 3),
    (3, 4, 3, 5),
    (1, 16, 6, 0),
    (1, 16, 6, 6),
    (1, 8, 4, 6),
    (3, 4, 4, 6),
];

pub const TRIANGULAR_LOWER_TERMS: [(i64, i64, usize, u32); 4] =
    [(1, 1, 1, 0), (-3, 1, 2, 0), (2, 1, 3, 0), (1, 1, 6, 1)];

pub const HEXAGONAL_LOWER_TERMS: [(i64, i64, usize, u32); 4] =
    [(1, 1, 1, 0), (-3, 2, 2, 0), (1, 2, 6, 0), (1, 1, 12, 1)];

fn square_lower() -> RationalPolynomial {
    RationalPolynomial::from_integers(&[0, 1, -2, 0, 1, 0, 0, 0, 1, -1, 2, -4, 2, -4, 2])
}

fn square_upper() -> RationalPolynomial {
    RationalPolynomial::from_terms(&[
        (1, 1, 1),
        (2, -2, 1),
        (4, 1, 1),
        (6, 43, 2),
        (7, -165, 2),
        (8, 535, 4),
        (9, -112, 1),
        (10, 81, 2),
        (11, 17, 2),
        (12, -29, 2),
        (13, 11, 2),
        (14, -3, 4),
    ])
}

/// Bound polynomials and the reference intervals they must certify.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsEntry {
    pub lattice: LatticeKind,
    pub lower: RationalPolynomial,
    pub upper: RationalPolynomial,
    pub reference_lower: f64,
    pub reference_upper: f64,
    pub p_max_window: (f64, f64),
    pub p_max_upper_window: (f64, f64),
}

pub fn bound_polys(lattice: LatticeKind) -> BoundsEntry {
    match lattice {
        LatticeKind::Square => BoundsEntry {
            lattice,
            lower: square_lower(),
            upper: square_upper(),
            reference_lower: 0.12953,
            reference_upper: 0.13268,
            p_max_window: (0.26, 0.28),
            p_max_upper_window: (0.28, 0.30),
        },
        LatticeKind::Triangular => BoundsEntry {
            lattice,
            lower: expand_terms(&TRIANGULAR_LOWER_TERMS),
            upper: expand_terms(&TRIANGULAR_UPPER_TERMS),
            reference_lower: 0.09629,
            reference_upper: 0.10107,
            p_max_window: (0.20, 0.22),
            p_max_upper_window: (0.23, 0.25),
        },
        LatticeKind::Hexagonal => BoundsEntry {
            lattice,
            lower: expand_terms(&HEXAGONAL_LOWER_TERMS),
            upper: expand_terms(&HEXAGONAL_UPPER_TERMS),
            reference_lower: 0.16738,
            reference_upper: 0.17144,
            p_max_window: (0.33, 0.35),
            p_max_upper_window: (0.35, 0.37),
        },
    }
}

/// Grid resolution of the derivative sign scan.
pub const SCAN_INTERVALS: u32 = 10_000;

/// Bracket width reached by bisection.
pub const BRACKET_WIDTH: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct MaxResult {
    pub argmax: f64,
    pub value: f64,
    pub bracket_width: f64,
    /// Exact value of the polynomial at the reported point.
    pub exact_value: BigRational,
}

/// Maximises `poly` on `[lo, hi]`.
///
/// Sign changes of the exact derivative are located on a uniform grid of
/// [`SCAN_INTERVALS`] intervals and each is bisected to [`BRACKET_WIDTH`].
/// The best of those midpoints and the two endpoints wins, compared by exact
/// evaluation; ties go to the smaller point.
pub fn maximize_poly(poly: &RationalPolynomial, lo: f64, hi: f64) -> Result<MaxResult> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(invalid(
            "interval",
            format!("need lo < hi, got [{lo}, {hi}]"),
        ));
    }
    let deriv = IntegerPoly::from(&poly.derivative());
    let lo_q = rational_from_f64(lo);
    let hi_q = rational_from_f64(hi);
    let step = (&hi_q - &lo_q) / BigRational::from_integer(SCAN_INTERVALS.into());
    let target = rational_from_f64(BRACKET_WIDTH);
    let two = BigRational::from_integer(2.into());

    // (point, bracket width)
    let mut candidates: Vec<(BigRational, BigRational)> = vec![
        (lo_q.clone(), BigRational::zero()),
        (hi_q.clone(), BigRational::zero()),
    ];
    let grid = |i: u32| &lo_q + &step * BigRational::from_integer(i.into());
    let mut left = lo_q.clone();
    let mut left_sign = deriv.sign_at(&left);
    for i in 1..=SCAN_INTERVALS {
        let right = if i == SCAN_INTERVALS {
            hi_q.clone()
        } else {
            grid(i)
        };
        let right_sign = deriv.sign_at(&right);
        if left_sign == Sign::NoSign {
            candidates.push((left.clone(), BigRational::zero()));
        } else if right_sign != Sign::NoSign && right_sign != left_sign {
            let (mut a, mut b) = (left.clone(), right.clone());
            while &b - &a > target {
                let mid = (&a + &b) / &two;
                let s = deriv.sign_at(&mid);
                if s == Sign::NoSign {
                    a = mid.clone();
                    b = mid;
                    break;
                }
                if s == left_sign {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let width = &b - &a;
            candidates.push(((&a + &b) / &two, width));
        }
        left = right;
        left_sign = right_sign;
    }

    let mut best: Option<(BigRational, BigRational, BigRational)> = None;
    for (x, width) in candidates {
        let v = poly.eval(&x);
        let better = match &best {
            None => true,
            Some((bx, _, bv)) => v > *bv || (v == *bv && x < *bx),
        };
        if better {
            best = Some((x, width, v));
        }
    }
    let (x, width, v) = best.expect("endpoints are always candidates");
    Ok(MaxResult {
        argmax: rational_to_f64(&x),
        value: rational_to_f64(&v),
        bracket_width: rational_to_f64(&width),
        exact_value: v,
    })
}

fn scale_1e5() -> BigInt {
    BigInt::from(100_000)
}

/// Largest multiple of `1e-5` not above `x`.
pub fn truncate_5dp(x: &BigRational) -> BigRational {
    let scaled = x * BigRational::from_integer(scale_1e5());
    BigRational::new(scaled.numer().div_floor(scaled.denom()), scale_1e5())
}

/// Smallest multiple of `1e-5` not below `x`.
pub fn round_up_5dp(x: &BigRational) -> BigRational {
    let scaled = x * BigRational::from_integer(scale_1e5());
    BigRational::new(scaled.numer().div_ceil(scaled.denom()), scale_1e5())
}

/// Maximised bounds of one lattice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub lattice: LatticeKind,
    pub p_max: f64,
    pub lower: f64,
    pub p_max_upper: f64,
    pub upper: f64,
    pub gap: f64,
}

pub fn bounds_report(lattice: LatticeKind) -> Result<BoundsReport> {
    let entry = bound_polys(lattice);
    let f = maximize_poly(&entry.lower, 0.0, 1.0)?;
    let g = maximize_poly(&entry.upper, 0.0, 1.0)?;
    Ok(BoundsReport {
        lattice,
        p_max: f.argmax,
        lower: f.value,
        p_max_upper: g.argmax,
        upper: g.value,
        gap: rational_to_f64(&(&g.exact_value - &f.exact_value)),
    })
}

/// One row of the lattice table: lower bound truncated and upper bound
/// rounded up to five decimals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub lattice: LatticeKind,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
}

pub fn table_row(lattice: LatticeKind) -> Result<TableRow> {
    let entry = bound_polys(lattice);
    let f = maximize_poly(&entry.lower, 0.0, 1.0)?;
    let g = maximize_poly(&entry.upper, 0.0, 1.0)?;
    let lower = truncate_5dp(&f.exact_value);
    let upper = round_up_5dp(&g.exact_value);
    Ok(TableRow {
        lattice,
        lower: rational_to_f64(&lower),
        upper: rational_to_f64(&upper),
        gap: rational_to_f64(&(&upper - &lower)),
    })
}

pub fn bound_table() -> Result<Vec<TableRow>> {
    LatticeKind::ALL.into_iter().map(table_row).collect()
}

/// Exact check that `lower(x) <= upper(x)` at `points + 1` evenly spaced
/// points of `[0, 1]`.
pub fn lower_below_upper_on_grid(entry: &BoundsEntry, points: u32) -> bool {
    let diff = IntegerPoly::from(&(&entry.upper - &entry.lower));
    (0..=points).all(|i| {
        let x = BigRational::new(BigInt::from(i), BigInt::from(points));
        diff.sign_at(&x) != Sign::Minus
    })
}

/// Exact `p(0)` and `p(1)`.
pub fn endpoint_values(poly: &RationalPolynomial) -> (BigRational, BigRational) {
    (
        poly.eval(&BigRational::zero()),
        poly.eval(&BigRational::one()),
    )
}
