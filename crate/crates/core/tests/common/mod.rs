#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use latticestop::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdos-Renyi style graph with a random edge density.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize) -> Graph {
    let density: f64 = rng.random_range(0.1..0.7);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < density {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn c4() -> Graph {
    Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap()
}

pub fn two_k2() -> Graph {
    Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap()
}

pub fn path3() -> Graph {
    Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
}

/// Components of the subgraph induced by `members`, by depth-first search.
pub fn brute_components(graph: &Graph, members: &[bool]) -> usize {
    let n = graph.num_vertices();
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if !members[s] || seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &u in graph.neighbors(v) {
                if members[u] && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    count
}
