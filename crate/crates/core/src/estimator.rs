//! Monte Carlo estimation of the blind value curve, playable stopping rules,
//! and empirical checks of the coupling and concentration inequalities.
//!
//! Every estimator derives trial `i`'s random stream from
//! `(master_seed, i)` and reduces with exact integer sums, so outputs are
//! bit-identical between sequential and parallel runs.

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::graph::{count_patterns, CellList, Graph};
use crate::reveal::{
    check_probability, count_components, coupled_views, percolation_sample, sample_permutation,
    trial_rng, DsuState, Permutation,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub mean: f64,
    pub sample_std: f64,
    pub ci95_halfwidth: f64,
}

/// Per-step Monte Carlo estimate of `E[C_t]`; `points[t - 1]` is step `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveEstimate {
    pub trials: u64,
    pub points: Vec<CurvePoint>,
}

impl CurveEstimate {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn means(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.mean)
    }

    pub fn max_mean(&self) -> f64 {
        self.means().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `t,mean,std,ci95,trials`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,mean,std,ci95,trials\n");
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                i + 1,
                p.mean,
                p.sample_std,
                p.ci95_halfwidth,
                self.trials
            ));
        }
        out
    }
}

/// Exact running sums of an integer-valued sample.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Moments {
    pub n: u64,
    pub sum: u128,
    pub sum_sq: u128,
}

impl Moments {
    pub fn push(&mut self, x: u64) {
        self.n += 1;
        self.sum += x as u128;
        self.sum_sq += (x as u128) * (x as u128);
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.sum as f64 / self.n as f64
    }

    /// Unbiased sample standard deviation; 0 for fewer than two samples.
    pub fn sample_std(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as u128;
        // n * sum_sq - sum^2 is exact and non-negative
        let numer = n * self.sum_sq - self.sum * self.sum;
        (numer as f64 / (n * (n - 1)) as f64).sqrt()
    }
}

#[derive(Clone, Debug)]
struct CurveSums {
    sum: Vec<u64>,
    sum_sq: Vec<u128>,
}

impl CurveSums {
    fn new(n: usize) -> Self {
        Self {
            sum: vec![0; n],
            sum_sq: vec![0; n],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.sum.iter_mut().zip(other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(other.sum_sq) {
            *a += b;
        }
        self
    }
}

fn reveal_counts(graph: &Graph, perm: &Permutation, mut visit: impl FnMut(usize, usize)) {
    let mut dsu = DsuState::new(graph.num_vertices());
    for (i, &v) in perm.as_slice().iter().enumerate() {
        visit(i, dsu.reveal(graph, v));
    }
}

pub fn estimate_curve(graph: &Graph, trials: u64, master_seed: u64) -> Result<CurveEstimate> {
    estimate_curve_with(graph, trials, master_seed, Exec::default())
}

pub fn estimate_curve_with(
    graph: &Graph,
    trials: u64,
    master_seed: u64,
    exec: Exec,
) -> Result<CurveEstimate> {
    if trials == 0 {
        return Err(invalid("trials", "need at least one trial"));
    }
    let n = graph.num_vertices();
    let sums = exec.fold_trials(
        trials,
        || CurveSums::new(n),
        |mut acc, i| {
            let perm = sample_permutation(n, &mut trial_rng(master_seed, i));
            reveal_counts(graph, &perm, |t, c| {
                acc.sum[t] += c as u64;
                acc.sum_sq[t] += (c as u128) * (c as u128);
            });
            acc
        },
        CurveSums::merge,
    );
    let points = sums
        .sum
        .iter()
        .zip(&sums.sum_sq)
        .map(|(&sum, &sum_sq)| {
            let m = Moments {
                n: trials,
                sum: sum as u128,
                sum_sq,
            };
            let sample_std = m.sample_std();
            CurvePoint {
                mean: m.mean(),
                sample_std,
                ci95_halfwidth: 1.96 * sample_std / (trials as f64).sqrt(),
            }
        })
        .collect();
    Ok(CurveEstimate { trials, points })
}

/// Fixed stopping time chosen before play.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlindPolicy {
    pub stop_time: usize,
    pub value: f64,
}

/// Index (1-based) of the first maximum; `None` on an empty sequence.
pub(crate) fn first_argmax<T: PartialOrd>(
    values: impl IntoIterator<Item = T>,
) -> Option<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((i + 1, v));
        }
    }
    best
}

/// Stop at the earliest step with the largest estimated mean.
pub fn blind_policy(curve: &CurveEstimate) -> Result<BlindPolicy> {
    let (stop_time, value) =
        first_argmax(curve.means()).ok_or_else(|| invalid("curve", "curve is empty"))?;
    Ok(BlindPolicy { stop_time, value })
}

fn check_stop_time(graph: &Graph, t: usize) -> Result<()> {
    if t == 0 || t > graph.num_vertices() {
        return Err(invalid(
            "stop_time",
            format!("must lie in 1..={}, got {t}", graph.num_vertices()),
        ));
    }
    Ok(())
}

/// Components after revealing the first `t` vertices of `perm`.
pub fn prefix_count(graph: &Graph, perm: &Permutation, t: usize) -> usize {
    let mut dsu = DsuState::new(graph.num_vertices());
    for &v in &perm.as_slice()[..t] {
        dsu.reveal(graph, v);
    }
    dsu.components()
}

/// Plays one game with a fixed stopping time and returns the payoff.
pub fn play_blind<R: Rng + ?Sized>(
    graph: &Graph,
    policy: &BlindPolicy,
    rng: &mut R,
) -> Result<usize> {
    check_stop_time(graph, policy.stop_time)?;
    let perm = sample_permutation(graph.num_vertices(), rng);
    Ok(prefix_count(graph, &perm, policy.stop_time))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FullPlay {
    pub payoff: usize,
    pub stop_time: usize,
}

/// Threshold rule that watches the revealed prefix: stop as soon as the
/// current count reaches the curve's maximum mean, and otherwise at the
/// curve's argmax.
pub fn play_full_heuristic<R: Rng + ?Sized>(
    graph: &Graph,
    curve: &CurveEstimate,
    rng: &mut R,
) -> Result<FullPlay> {
    if curve.len() != graph.num_vertices() {
        return Err(invalid(
            "curve",
            format!(
                "curve has {} steps, graph has {} vertices",
                curve.len(),
                graph.num_vertices()
            ),
        ));
    }
    let policy = blind_policy(curve)?;
    let perm = sample_permutation(graph.num_vertices(), rng);
    Ok(play_threshold(graph, &perm, policy.value, policy.stop_time))
}

pub(crate) fn play_threshold(
    graph: &Graph,
    perm: &Permutation,
    threshold: f64,
    fallback: usize,
) -> FullPlay {
    let mut dsu = DsuState::new(graph.num_vertices());
    for (i, &v) in perm.as_slice().iter().enumerate() {
        let t = i + 1;
        let c = dsu.reveal(graph, v);
        if c as f64 >= threshold || t == fallback {
            return FullPlay {
                payoff: c,
                stop_time: t,
            };
        }
    }
    unreachable!("fallback stop time lies within the permutation")
}

/// Mean payoff statistics of repeated plays.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlaySummary {
    pub plays: u64,
    pub mean: f64,
    pub std_error: f64,
}

impl From<Moments> for PlaySummary {
    fn from(m: Moments) -> Self {
        Self {
            plays: m.n,
            mean: m.mean(),
            std_error: m.sample_std() / (m.n.max(1) as f64).sqrt(),
        }
    }
}

pub fn mean_blind_payoff(
    graph: &Graph,
    policy: &BlindPolicy,
    plays: u64,
    seed: u64,
) -> Result<PlaySummary> {
    check_stop_time(graph, policy.stop_time)?;
    let m = Exec::default().fold_trials(
        plays,
        Moments::default,
        |mut m, i| {
            let perm = sample_permutation(graph.num_vertices(), &mut trial_rng(seed, i));
            m.push(prefix_count(graph, &perm, policy.stop_time) as u64);
            m
        },
        Moments::merge,
    );
    Ok(m.into())
}

pub fn mean_full_heuristic_payoff(
    graph: &Graph,
    curve: &CurveEstimate,
    plays: u64,
    seed: u64,
) -> Result<PlaySummary> {
    let policy = blind_policy(curve)?;
    if curve.len() != graph.num_vertices() {
        return Err(invalid("curve", "curve does not match graph size"));
    }
    let m = Exec::default().fold_trials(
        plays,
        Moments::default,
        |mut m, i| {
            let perm = sample_permutation(graph.num_vertices(), &mut trial_rng(seed, i));
            m.push(play_threshold(graph, &perm, policy.value, policy.stop_time).payoff as u64);
            m
        },
        Moments::merge,
    );
    Ok(m.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PercolationStats {
    pub p: f64,
    pub trials: u64,
    pub mean: f64,
    pub std: f64,
}

pub fn percolation_mean(graph: &Graph, p: f64, trials: u64, seed: u64) -> Result<PercolationStats> {
    check_probability(p)?;
    if trials < 2 {
        return Err(invalid(
            "trials",
            format!("need at least two trials, got {trials}"),
        ));
    }
    let m = percolation_moments(graph, p, trials, seed)?;
    Ok(PercolationStats {
        p,
        trials,
        mean: m.mean(),
        std: m.sample_std(),
    })
}

fn percolation_moments(graph: &Graph, p: f64, trials: u64, seed: u64) -> Result<Moments> {
    check_probability(p)?;
    Ok(Exec::default().fold_trials(
        trials,
        Moments::default,
        |mut m, i| {
            let (_, c) = percolation_sample(graph, p, &mut trial_rng(seed, i))
                .expect("probability validated above");
            m.push(c as u64);
            m
        },
        Moments::merge,
    ))
}

/// Mean pattern counts of `G_p` over independent occupancies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PatternMeans {
    pub p: f64,
    pub trials: u64,
    pub isolated_vertices: f64,
    pub isolated_edges: f64,
    pub empty_cells: f64,
}

pub fn pattern_means(
    graph: &Graph,
    cells: &CellList,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<PatternMeans> {
    check_probability(p)?;
    if trials == 0 {
        return Err(invalid("trials", "need at least one trial"));
    }
    let (iv, ie, ec) = Exec::default().fold_trials(
        trials,
        || (0u64, 0u64, 0u64),
        |(iv, ie, ec), i| {
            let (occ, _) = percolation_sample(graph, p, &mut trial_rng(seed, i)).expect("valid p");
            let c = count_patterns(graph, cells, &occ).expect("lengths match");
            (
                iv + c.isolated_vertices as u64,
                ie + c.isolated_edges as u64,
                ec + c.empty_cells as u64,
            )
        },
        |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
    );
    let t = trials as f64;
    Ok(PatternMeans {
        p,
        trials,
        isolated_vertices: iv as f64 / t,
        isolated_edges: ie as f64 / t,
        empty_cells: ec as f64 / t,
    })
}

/// Tally of the two-sided comparison between the revealed count `C_t` and
/// the percolation count `C_{t/N}` of the same arrival-time draw.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CouplingReport {
    pub samples: u64,
    pub instances: u64,
    pub violations: u64,
}

/// Checks `|C_t - C_{t/N}| <= D * |V_{t/N} - t|` on coupled samples for
/// every `t` in `t_grid`.
pub fn coupling_check(
    graph: &Graph,
    trials: u64,
    t_grid: &[usize],
    seed: u64,
) -> Result<CouplingReport> {
    coupling_check_with(graph, trials, t_grid, seed, Exec::default())
}

pub fn coupling_check_with(
    graph: &Graph,
    trials: u64,
    t_grid: &[usize],
    seed: u64,
    exec: Exec,
) -> Result<CouplingReport> {
    let n = graph.num_vertices();
    if let Some(&bad) = t_grid.iter().find(|&&t| t == 0 || t > n) {
        return Err(invalid("t_grid", format!("time {bad} outside 1..={n}")));
    }
    let d = graph.max_degree();
    Ok(exec.fold_trials(
        trials,
        CouplingReport::default,
        |mut acc, i| {
            let sample = coupled_views(graph, &mut trial_rng(seed, i)).expect("lengths match");
            acc.samples += 1;
            for &t in t_grid {
                let occ = sample.occupancy(t as f64 / n as f64);
                let open = occ.open_count();
                let c_p = count_components(graph, &occ).expect("lengths match");
                let c_t = sample.revealed_count(t);
                if !coupling_holds(c_t, c_p, d, open, t) {
                    acc.violations += 1;
                }
                acc.instances += 1;
            }
            acc
        },
        |a, b| CouplingReport {
            samples: a.samples + b.samples,
            instances: a.instances + b.instances,
            violations: a.violations + b.violations,
        },
    ))
}

/// Both directions of the coupling inequality in exact integers.
pub fn coupling_holds(c_t: usize, c_p: usize, max_degree: usize, open: usize, t: usize) -> bool {
    let slack = max_degree * open.abs_diff(t);
    c_t <= c_p + slack && c_p <= c_t + slack
}

/// Empirical spread of `C_p` against the bounded-differences budget
/// `sqrt(sum_j b_j^2)` with `b_j = max(deg(v_j), 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub p: f64,
    pub trials: u64,
    pub mean: f64,
    pub empirical_std: f64,
    pub lipschitz_budget: f64,
    pub passes: bool,
}

pub fn lipschitz_budget(graph: &Graph) -> f64 {
    let sum_sq: u64 = (0..graph.num_vertices())
        .map(|v| {
            let b = graph.degree(v).max(1) as u64;
            b * b
        })
        .sum();
    (sum_sq as f64).sqrt()
}

pub fn concentration_report(
    graph: &Graph,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<ConcentrationReport> {
    check_probability(p)?;
    if trials < 30 {
        return Err(invalid(
            "trials",
            format!("need at least 30 trials, got {trials}"),
        ));
    }
    let m = percolation_moments(graph, p, trials, seed)?;
    let budget = lipschitz_budget(graph);
    let empirical_std = m.sample_std();
    Ok(ConcentrationReport {
        p,
        trials,
        mean: m.mean(),
        empirical_std,
        lipschitz_budget: budget,
        passes: empirical_std <= budget / 2.0,
    })
}

/// Degree cap `(eps^2 / 32) sqrt(N)` under which blind and full-information
/// values differ by at most `eps * N` for large `N`.
pub fn degree_cap(epsilon: f64, n: u64) -> f64 {
    epsilon * epsilon / 32.0 * (n as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapCertificate {
    pub n: u64,
    pub max_degree: u64,
    pub epsilon: f64,
    pub degree_cap: f64,
    pub additive_bound: f64,
    pub vacuous: bool,
    pub n_required_note: String,
}

/// Smallest `eps` whose degree cap admits `max_degree`.
pub fn gap_certificate(n: u64, max_degree: u64) -> Result<GapCertificate> {
    if n == 0 {
        return Err(invalid("n", "graph must have at least one vertex"));
    }
    let epsilon = (32.0 * max_degree as f64 / (n as f64).sqrt()).sqrt();
    let vacuous = epsilon >= 1.0;
    Ok(GapCertificate {
        n,
        max_degree,
        epsilon,
        degree_cap: degree_cap(epsilon, n),
        additive_bound: epsilon * n as f64,
        vacuous,
        n_required_note: if vacuous {
            "epsilon >= 1: the degree cap gives no useful guarantee at this size".into()
        } else {
            "holds only for N beyond an unquantified threshold N_eps".into()
        },
    })
}
