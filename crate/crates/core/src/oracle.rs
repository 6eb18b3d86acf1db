//! Exact ground truth on small graphs by enumerating every vertex subset.
//!
//! Component counts of all `2^N` subsets are tabulated once: the component
//! of the lowest vertex in `S` is flood-filled with bitmasks and
//! `comp(S) = 1 + comp(S minus that component)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::first_argmax;
use crate::graph::Graph;
use crate::poly::RationalPolynomial;

/// Largest graph accepted by the subset enumerations.
pub const MAX_EXACT_VERTICES: usize = 24;

/// Largest `n` accepted by [`binomial_mad`].
pub const MAX_MAD_TRIALS: u32 = 64;

fn guard(graph: &Graph) -> Result<usize> {
    let n = graph.num_vertices();
    if n > MAX_EXACT_VERTICES {
        return Err(Error::SizeGuard {
            n,
            max: MAX_EXACT_VERTICES,
        });
    }
    Ok(n)
}

/// `comp[mask]` for every subset of the vertex set.
pub fn subset_components(graph: &Graph) -> Result<Vec<u8>> {
    let n = guard(graph)?;
    let nbr: Vec<u32> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let mut comp = vec![0u8; 1usize << n];
    for mask in 1u32..(1u32 << n) {
        let low = mask & mask.wrapping_neg();
        let mut reach = low;
        let mut frontier = low;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = nbr[v] & mask & !reach;
            reach |= new;
            frontier |= new;
        }
        comp[mask as usize] = 1 + comp[(mask & !reach) as usize];
    }
    Ok(comp)
}

/// `sums[k] = sum of comp(S)` over all `|S| = k`.
fn component_sums_by_size(n: usize, comp: &[u8]) -> Vec<u64> {
    let mut sums = vec![0u64; n + 1];
    for (mask, &c) in comp.iter().enumerate() {
        sums[mask.count_ones() as usize] += c as u64;
    }
    sums
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Exact `E[C_t]` for `t = 1..=N`; `values[t - 1]` is step `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCurve {
    pub values: Vec<BigRational>,
}

impl ExactCurve {
    /// Earliest step with the largest expected count.
    pub fn blind_optimum(&self) -> Option<(usize, BigRational)> {
        first_argmax(self.values.iter().cloned())
    }
}

pub fn exact_curve(graph: &Graph) -> Result<ExactCurve> {
    let comp = subset_components(graph)?;
    Ok(exact_curve_from(graph.num_vertices(), &comp))
}

fn exact_curve_from(n: usize, comp: &[u8]) -> ExactCurve {
    let sums = component_sums_by_size(n, comp);
    let values = (1..=n)
        .map(|t| BigRational::new(BigInt::from(sums[t]), binomial(n as u64, t as u64)))
        .collect();
    ExactCurve { values }
}

/// Exact blind and full-information game values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameValue {
    pub blind_value: BigRational,
    pub blind_stop: usize,
    pub full_value: BigRational,
}

/// Backward induction over all subsets:
/// `V(S) = max(comp(S), mean over v outside S of V(S + v))` for non-empty
/// `S`, and `V(empty) = mean over v of V({v})` since at least one vertex
/// must be revealed.
///
/// Values at subset size `k` are held as integers over the common
/// denominator `(N - k)!`, which keeps the whole recursion exact in `u128`
/// for `N <= 24`.
pub fn full_info_value(graph: &Graph) -> Result<GameValue> {
    let comp = subset_components(graph)?;
    let n = graph.num_vertices();
    let curve = exact_curve_from(n, &comp);
    let (blind_stop, blind_value) = match curve.blind_optimum() {
        Some(best) => best,
        // empty graph: nothing to reveal
        None => {
            return Ok(GameValue {
                blind_value: BigRational::zero(),
                blind_stop: 0,
                full_value: BigRational::zero(),
            })
        }
    };

    let factorial: Vec<u128> = (0..=n as u128)
        .scan(1u128, |f, k| {
            if k > 0 {
                *f *= k;
            }
            Some(*f)
        })
        .collect();
    let full = (1u32 << n) - 1;
    let mut value = vec![0u128; 1usize << n];
    // Supersets of S compare greater than S, so descending order sees them first.
    for mask in (0..=full).rev() {
        let k = mask.count_ones() as usize;
        let scale = factorial[n - k];
        let mut cont = 0u128;
        let mut missing = full & !mask;
        while missing != 0 {
            let v = missing & missing.wrapping_neg();
            missing &= missing - 1;
            cont += value[(mask | v) as usize];
        }
        // cont / ((N - k) (N - k - 1)!) = cont / (N - k)!
        value[mask as usize] = if mask == full {
            comp[mask as usize] as u128
        } else if mask == 0 {
            cont
        } else {
            cont.max(comp[mask as usize] as u128 * scale)
        };
    }
    let full_value = BigRational::new(BigInt::from(value[0]), BigInt::from(factorial[n]));
    Ok(GameValue {
        blind_value,
        blind_stop,
        full_value,
    })
}

/// `E[C_p]` as an exact polynomial in `p`.
pub fn exact_percolation_polynomial(graph: &Graph) -> Result<RationalPolynomial> {
    let comp = subset_components(graph)?;
    let n = graph.num_vertices();
    let sums = component_sums_by_size(n, &comp);
    // sum_k a_k p^k (1-p)^(n-k), with (1-p)^m expanded binomially
    let mut coeffs = vec![BigInt::zero(); n + 1];
    for (k, &a) in sums.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let m = (n - k) as u64;
        for j in 0..=m {
            let term = BigInt::from(a) * binomial(m, j);
            if j % 2 == 0 {
                coeffs[k + j as usize] += term;
            } else {
                coeffs[k + j as usize] -= term;
            }
        }
    }
    Ok(RationalPolynomial::new(
        coeffs.into_iter().map(BigRational::from_integer).collect(),
    ))
}

/// Exact `E|X - np|` for `X ~ Binomial(n, p)`.
pub fn binomial_mad(n: u32, p: &BigRational) -> Result<BigRational> {
    if n > MAX_MAD_TRIALS {
        return Err(Error::SizeGuard {
            n: n as usize,
            max: MAX_MAD_TRIALS as usize,
        });
    }
    if p.is_negative() || *p > BigRational::one() {
        return Err(crate::error::invalid(
            "p",
            format!("probability {p} outside [0, 1]"),
        ));
    }
    let q = BigRational::one() - p;
    let mean = p * BigRational::from_integer(n.into());
    let mut total = BigRational::zero();
    for k in 0..=n {
        let prob = BigRational::from_integer(binomial(n.into(), k.into()))
            * num_traits::pow(p.clone(), k as usize)
            * num_traits::pow(q.clone(), (n - k) as usize);
        total += prob * (BigRational::from_integer(k.into()) - &mean).abs();
    }
    Ok(total)
}

/// Exact test of `excess <= coeff * sqrt(n) / 2` without irrational
/// arithmetic.
pub fn within_half_sqrt_bound(excess: &BigRational, coeff: u64, n: u64) -> bool {
    if !excess.is_positive() {
        return true;
    }
    let twice = excess * BigRational::from_integer(2.into());
    twice.clone() * twice <= BigRational::from_integer(BigInt::from(coeff) * coeff * n)
}

/// Rational rendered as `num/den`, or `num` when integral.
pub fn rational_string(x: &BigRational) -> String {
    x.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlindJson {
    pub t: usize,
    pub value: String,
}

/// Serialized oracle output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub exact_curve: Vec<String>,
    pub blind: BlindJson,
    pub full_value: String,
    pub percolation_poly: Vec<String>,
}

pub fn oracle_report(graph: &Graph) -> Result<OracleReport> {
    let curve = exact_curve(graph)?;
    let game = full_info_value(graph)?;
    let poly = exact_percolation_polynomial(graph)?;
    let mut percolation_poly: Vec<String> = poly.coeffs().iter().map(rational_string).collect();
    if percolation_poly.is_empty() {
        percolation_poly.push("0".into());
    }
    Ok(OracleReport {
        exact_curve: curve.values.iter().map(rational_string).collect(),
        blind: BlindJson {
            t: game.blind_stop,
            value: rational_string(&game.blind_value),
        },
        full_value: rational_string(&game.full_value),
        percolation_poly,
    })
}
