mod common;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use latticestop::estimator::{blind_policy, estimate_curve, CurveEstimate, CurvePoint};
use latticestop::oracle::{
    binomial, exact_curve, exact_percolation_polynomial, full_info_value, subset_components,
};
use latticestop::poly::{ratio, rational_to_f64};
use latticestop::Graph;

use common::{brute_components, c4, path3, random_graph, rng, two_k2};

fn members(n: usize, mask: usize) -> Vec<bool> {
    (0..n).map(|v| mask >> v & 1 == 1).collect()
}

/// E[C_t] by enumerating subsets and counting components with DFS.
fn brute_curve(g: &Graph) -> Vec<BigRational> {
    let n = g.num_vertices();
    let mut sums = vec![0u64; n + 1];
    for mask in 0..1usize << n {
        sums[mask.count_ones() as usize] += brute_components(g, &members(n, mask)) as u64;
    }
    (1..=n)
        .map(|t| BigRational::new(BigInt::from(sums[t]), binomial(n as u64, t as u64)))
        .collect()
}

/// Full-information value by memoised recursion on rationals.
fn brute_full_value(g: &Graph) -> BigRational {
    fn value(g: &Graph, mask: usize, memo: &mut HashMap<usize, BigRational>) -> BigRational {
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let n = g.num_vertices();
        let stop = BigRational::from_integer(brute_components(g, &members(n, mask)).into());
        let outside: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 0).collect();
        let result = if outside.is_empty() {
            stop
        } else {
            let total = outside.iter().fold(BigRational::zero(), |acc, &v| {
                acc + value(g, mask | 1 << v, memo)
            });
            let cont = total / BigRational::from_integer(outside.len().into());
            if mask == 0 || cont > stop {
                cont
            } else {
                stop
            }
        };
        memo.insert(mask, result.clone());
        result
    }
    value(g, 0, &mut HashMap::new())
}

#[test]
fn named_fixtures() {
    let q = |n, d| ratio(n, d);
    assert_eq!(
        exact_curve(&c4()).unwrap().values,
        vec![q(1, 1), q(4, 3), q(1, 1), q(1, 1)]
    );
    assert_eq!(
        exact_curve(&two_k2()).unwrap().values,
        vec![q(1, 1), q(5, 3), q(2, 1), q(2, 1)]
    );
    assert_eq!(
        exact_curve(&path3()).unwrap().values,
        vec![q(1, 1), q(4, 3), q(1, 1)]
    );
}

#[test]
fn subset_table_matches_dfs() {
    let mut r = rng(1);
    for _ in 0..30 {
        let n = r.random_range(1..=10);
        let g = random_graph(&mut r, n);
        let table = subset_components(&g).unwrap();
        for (mask, &c) in table.iter().enumerate() {
            assert_eq!(c as usize, brute_components(&g, &members(n, mask)));
        }
    }
}

#[test]
fn curves_and_game_values_match_brute_force() {
    let mut r = rng(2);
    for _ in 0..40 {
        let n = r.random_range(1..=8);
        let g = random_graph(&mut r, n);
        let curve = exact_curve(&g).unwrap();
        assert_eq!(curve.values, brute_curve(&g));
        assert_eq!(curve.values[0], BigRational::one());
        let all = brute_components(&g, &vec![true; n]);
        assert_eq!(curve.values[n - 1], BigRational::from_integer(all.into()));

        let game = full_info_value(&g).unwrap();
        assert_eq!(game.full_value, brute_full_value(&g));
        assert!(game.full_value >= game.blind_value);
        let max_subset = (0..1usize << n)
            .map(|m| brute_components(&g, &members(n, m)))
            .max()
            .unwrap();
        assert!(game.full_value <= BigRational::from_integer(max_subset.into()));
    }
}

#[test]
fn full_information_strictly_helps_on_a_four_path() {
    let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    let game = full_info_value(&p4).unwrap();
    assert_eq!(game.full_value, brute_full_value(&p4));
    assert!(
        game.full_value > game.blind_value,
        "{} vs {}",
        game.full_value,
        game.blind_value
    );
}

#[test]
fn largest_guarded_size_runs() {
    let g = Graph::edgeless(24);
    let game = full_info_value(&g).unwrap();
    assert_eq!(game.full_value, ratio(24, 1));
    assert_eq!(game.blind_stop, 24);
}

#[test]
fn percolation_polynomial_matches_outcome_enumeration() {
    let mut r = rng(3);
    for _ in 0..20 {
        let n = r.random_range(1..=9);
        let g = random_graph(&mut r, n);
        let poly = exact_percolation_polynomial(&g).unwrap();
        assert_eq!(poly.eval(&BigRational::zero()), BigRational::zero());
        let all = brute_components(&g, &vec![true; n]);
        assert_eq!(
            poly.eval(&BigRational::one()),
            BigRational::from_integer(all.into())
        );
        for _ in 0..3 {
            let p = ratio(r.random_range(0..=30), 30);
            let q = BigRational::one() - &p;
            let direct = (0..1usize << n).fold(BigRational::zero(), |acc, mask| {
                let k = mask.count_ones() as usize;
                let c = BigRational::from_integer(brute_components(&g, &members(n, mask)).into());
                acc + c * num_traits::pow(p.clone(), k) * num_traits::pow(q.clone(), n - k)
            });
            assert_eq!(poly.eval(&p), direct);
        }
    }
}

fn as_curve(values: &[BigRational]) -> CurveEstimate {
    CurveEstimate {
        trials: 1,
        points: values
            .iter()
            .map(|v| CurvePoint {
                mean: rational_to_f64(v),
                sample_std: 0.0,
                ci95_halfwidth: 0.0,
            })
            .collect(),
    }
}

#[test]
fn blind_policy_on_exact_curves_picks_the_first_argmax() {
    let mut r = rng(4);
    for _ in 0..40 {
        let n = r.random_range(1..=10);
        let g = random_graph(&mut r, n);
        let curve = exact_curve(&g).unwrap();
        let (t, v) = curve.blind_optimum().unwrap();
        let first = curve.values.iter().position(|x| *x == v).unwrap() + 1;
        assert_eq!(t, first);
        assert_eq!(blind_policy(&as_curve(&curve.values)).unwrap().stop_time, t);
    }
}

#[test]
fn monte_carlo_agrees_with_exact_curves() {
    let mut graphs = vec![c4(), path3(), two_k2()];
    let mut r = rng(5);
    for _ in 0..20 {
        let n = r.random_range(1..=8);
        graphs.push(random_graph(&mut r, n));
    }
    let trials = 100_000u64;
    for (i, g) in graphs.iter().enumerate() {
        let mc = estimate_curve(g, trials, 500 + i as u64).unwrap();
        let exact = exact_curve(g).unwrap().values;
        for (pt, ex) in mc.points.iter().zip(&exact) {
            let se = pt.sample_std / (trials as f64).sqrt();
            let dev = (pt.mean - rational_to_f64(ex)).abs();
            assert!(
                dev <= 4.0 * se + 1e-12,
                "graph {i}: mean {} exact {ex}",
                pt.mean
            );
        }
    }
}
