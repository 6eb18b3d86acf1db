//! The vertex-reveal process and site percolation.
//!
//! Component counts are maintained with a union-find over activated
//! vertices, so a whole trajectory `C_1..C_N` costs one near-linear pass.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, Occupancy};

/// Random stream for trial `trial_index` of an experiment seeded with
/// `master_seed`. Streams are independent of how trials are scheduled.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

/// Union-find over a growing set of active vertices.
#[derive(Clone, Debug)]
pub struct DsuState {
    parent: Vec<usize>,
    size: Vec<usize>,
    active: Vec<bool>,
    components: usize,
}

impl DsuState {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            active: vec![false; n],
            components: 0,
        }
    }

    pub fn components(&self) -> usize {
        self.components
    }

    #[inline]
    pub fn is_active(&self, v: usize) -> bool {
        self.active[v]
    }

    pub fn activate(&mut self, v: usize) {
        if !self.active[v] {
            self.active[v] = true;
            self.components += 1;
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            // path halving
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Merges the sets of `a` and `b`; returns whether they were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        true
    }

    /// Activates `v` and joins it with its already active neighbors.
    /// Returns the component count afterwards.
    pub fn reveal(&mut self, graph: &Graph, v: usize) -> usize {
        self.activate(v);
        for &u in graph.neighbors(v) {
            if self.active[u] {
                self.union(v, u);
            }
        }
        self.components
    }
}

/// Vertex reveal order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &v in &order {
            if v >= order.len() || std::mem::replace(&mut seen[v], true) {
                return Err(invalid(
                    "permutation",
                    format!("{order:?} is not a bijection"),
                ));
            }
        }
        Ok(Self { order })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }
}

/// Uniform random permutation of `0..n` (Fisher-Yates).
pub fn sample_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    Permutation { order }
}

/// Component counts after each reveal; entry `t - 1` is `C_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub counts: Vec<usize>,
}

impl Trajectory {
    /// `t,count` CSV with rows `1..=N`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, c));
        }
        out
    }
}

pub fn trajectory(graph: &Graph, perm: &Permutation) -> Result<Trajectory> {
    if perm.len() != graph.num_vertices() {
        return Err(Error::LengthMismatch {
            expected: graph.num_vertices(),
            got: perm.len(),
        });
    }
    let mut dsu = DsuState::new(graph.num_vertices());
    let mut counts = Vec::with_capacity(perm.len());
    let mut prev = 0usize;
    for &v in perm.as_slice() {
        let c = dsu.reveal(graph, v);
        debug_assert!(c <= prev + 1 && c + graph.degree(v) > prev);
        counts.push(c);
        prev = c;
    }
    Ok(Trajectory { counts })
}

/// Number of components of the subgraph induced by the open vertices.
pub fn count_components(graph: &Graph, occ: &Occupancy) -> Result<usize> {
    if occ.len() != graph.num_vertices() {
        return Err(Error::LengthMismatch {
            expected: graph.num_vertices(),
            got: occ.len(),
        });
    }
    let mut dsu = DsuState::new(graph.num_vertices());
    for v in occ.open_vertices() {
        dsu.reveal(graph, v);
    }
    Ok(dsu.components())
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(
            "p",
            format!("probability must lie in [0, 1], got {p}"),
        ))
    }
}

/// Opens each vertex independently with probability `p`.
pub fn percolation_sample<R: Rng + ?Sized>(
    graph: &Graph,
    p: f64,
    rng: &mut R,
) -> Result<(Occupancy, usize)> {
    check_probability(p)?;
    let occ = Occupancy::new(
        (0..graph.num_vertices())
            .map(|_| rng.random::<f64>() < p)
            .collect(),
    );
    let count = count_components(graph, &occ)?;
    Ok((occ, count))
}

/// Per-vertex arrival times in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrivalTimes {
    pub omega: Vec<f64>,
}

impl ArrivalTimes {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if let Some(bad) = omega.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(invalid(
                "omega",
                format!("arrival time {bad} outside [0, 1]"),
            ));
        }
        Ok(Self { omega })
    }

    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            omega: (0..n).map(|_| rng.random::<f64>()).collect(),
        }
    }

    /// Vertices sorted by arrival time, ties broken by index.
    pub fn permutation(&self) -> Permutation {
        let mut order: Vec<usize> = (0..self.omega.len()).collect();
        order.sort_by(|&a, &b| self.omega[a].total_cmp(&self.omega[b]).then(a.cmp(&b)));
        Permutation { order }
    }

    /// Vertices that have arrived by time `p`.
    pub fn occupancy(&self, p: f64) -> Occupancy {
        Occupancy::new(self.omega.iter().map(|&w| w <= p).collect())
    }
}

/// One arrival-time draw viewed both as a reveal order and as a family of
/// percolation configurations.
#[derive(Clone, Debug)]
pub struct CoupledSample {
    pub arrivals: ArrivalTimes,
    pub permutation: Permutation,
    pub trajectory: Trajectory,
}

impl CoupledSample {
    pub fn from_arrivals(graph: &Graph, arrivals: ArrivalTimes) -> Result<Self> {
        let permutation = arrivals.permutation();
        let trajectory = trajectory(graph, &permutation)?;
        Ok(Self {
            arrivals,
            permutation,
            trajectory,
        })
    }

    /// `C_t` for `t` in `1..=N`.
    pub fn revealed_count(&self, t: usize) -> usize {
        self.trajectory.counts[t - 1]
    }

    pub fn occupancy(&self, p: f64) -> Occupancy {
        self.arrivals.occupancy(p)
    }
}

pub fn coupled_views<R: Rng + ?Sized>(graph: &Graph, rng: &mut R) -> Result<CoupledSample> {
    CoupledSample::from_arrivals(graph, ArrivalTimes::sample(graph.num_vertices(), rng))
}
