//! Lattice graphs, their elementary cells, and occupancy-dependent counts.
//!
//! All generators index vertices 0-based and row-major.
//!
//! * Square, side `n`: vertex `(i, j)` is `i * n + j`; each unit square is a
//!   cell listed as `(i,j) (i,j+1) (i+1,j+1) (i+1,j)`.
//! * Triangular, side `n`: the square grid plus the diagonal
//!   `(i,j)-(i+1,j+1)` in every unit square. Each unit square yields the two
//!   triangles `(i,j) (i,j+1) (i+1,j+1)` and `(i,j) (i+1,j+1) (i+1,j)`.
//! * Hexagonal, `rows x cols` hexagons: a brick-wall embedding. Hexagon row
//!   `h` spans vertex rows `h` and `h + 1`; its `k`-th hexagon starts at
//!   column `j0 = h % 2 + 2k` and is listed as
//!   `(h,j0) (h,j0+1) (h,j0+2) (h+1,j0+2) (h+1,j0+1) (h+1,j0)`.
//!   Vertex row `i` keeps only the columns touched by a hexagon, so no
//!   vertex has degree below two and `N = 2(rows+1)(cols+1) - 2`.
//!
//! Edges of every lattice are exactly the boundary edges of its cells.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Immutable simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
    max_degree: usize,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges (in either orientation) and out-of-range endpoints.
    pub fn from_edges(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); num_vertices];
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) references a vertex >= {num_vertices}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            adjacency,
            edge_count: seen.len(),
            max_degree,
        })
    }

    /// Graph with `n` vertices and no edges.
    pub fn edgeless(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
            max_degree: 0,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Square,
    Triangular,
    Hexagonal,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 3] = [Self::Square, Self::Triangular, Self::Hexagonal];

    pub fn name(self) -> &'static str {
        match self {
            Self::Square => "square",
            Self::Triangular => "triangular",
            Self::Hexagonal => "hexagonal",
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(Self::Square),
            "triangular" => Ok(Self::Triangular),
            "hexagonal" => Ok(Self::Hexagonal),
            other => Err(invalid("lattice", format!("unknown lattice `{other}`"))),
        }
    }
}

/// Lattice kind together with its size parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeSpec {
    Square { n: usize },
    Triangular { n: usize },
    Hexagonal { rows: usize, cols: usize },
}

impl LatticeSpec {
    pub fn kind(&self) -> LatticeKind {
        match self {
            Self::Square { .. } => LatticeKind::Square,
            Self::Triangular { .. } => LatticeKind::Triangular,
            Self::Hexagonal { .. } => LatticeKind::Hexagonal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Square { n } | Self::Triangular { n } if n < 2 => {
                Err(invalid("n", format!("side must be at least 2, got {n}")))
            }
            Self::Hexagonal { rows, cols } if rows < 1 || cols < 1 => Err(invalid(
                "rows/cols",
                format!("need at least one hexagon per side, got {rows}x{cols}"),
            )),
            _ => Ok(()),
        }
    }

    /// Vertex count implied by the size parameters.
    pub fn num_vertices(&self) -> usize {
        match *self {
            Self::Square { n } | Self::Triangular { n } => n * n,
            Self::Hexagonal { rows, cols } => 2 * (rows + 1) * (cols + 1) - 2,
        }
    }

    /// Cell count: `(n-1)^2`, `2(n-1)^2` or `rows * cols`.
    pub fn num_cells(&self) -> usize {
        match *self {
            Self::Square { n } => (n - 1) * (n - 1),
            Self::Triangular { n } => 2 * (n - 1) * (n - 1),
            Self::Hexagonal { rows, cols } => rows * cols,
        }
    }
}

/// Elementary inner faces of a lattice, each a vertex cycle.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellList {
    pub cells: Vec<Vec<usize>>,
}

impl CellList {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Open/closed flag per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occupancy {
    open: Vec<bool>,
}

impl Occupancy {
    pub fn new(open: Vec<bool>) -> Self {
        Self { open }
    }

    pub fn all_closed(n: usize) -> Self {
        Self {
            open: vec![false; n],
        }
    }

    pub fn all_open(n: usize) -> Self {
        Self {
            open: vec![true; n],
        }
    }

    pub fn from_open_set(n: usize, open: impl IntoIterator<Item = usize>) -> Self {
        let mut occ = Self::all_closed(n);
        for v in open {
            occ.open[v] = true;
        }
        occ
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    #[inline]
    pub fn is_open(&self, v: usize) -> bool {
        self.open[v]
    }

    pub fn set(&mut self, v: usize, open: bool) {
        self.open[v] = open;
    }

    pub fn open_count(&self) -> usize {
        self.open.iter().filter(|&&b| b).count()
    }

    pub fn open_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.open
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(v, _)| v)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.open
    }

    /// One character per vertex, `1` for open.
    pub fn to_bitstring(&self) -> String {
        self.open
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                other => Err(invalid(
                    "occupancy",
                    format!("unexpected character {other:?}"),
                )),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternCounts {
    pub isolated_vertices: usize,
    pub isolated_edges: usize,
    pub empty_cells: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeStats {
    pub max_degree: usize,
    pub histogram: BTreeMap<usize, usize>,
}

/// Generates the lattice described by `spec` and its cell list.
pub fn gen_lattice(spec: &LatticeSpec) -> Result<(Graph, CellList)> {
    spec.validate()?;
    let (n_vertices, cells) = match *spec {
        LatticeSpec::Square { n } => (n * n, square_cells(n)),
        LatticeSpec::Triangular { n } => (n * n, triangular_cells(n)),
        LatticeSpec::Hexagonal { rows, cols } => hexagonal_cells(rows, cols),
    };
    let edges: BTreeSet<(usize, usize)> = cells
        .iter()
        .flat_map(|cell| {
            let k = cell.len();
            (0..k).map(move |i| {
                let (a, b) = (cell[i], cell[(i + 1) % k]);
                (a.min(b), a.max(b))
            })
        })
        .collect();
    let edges: Vec<_> = edges.into_iter().collect();
    let graph = Graph::from_edges(n_vertices, &edges)?;
    Ok((graph, CellList { cells }))
}

fn square_cells(n: usize) -> Vec<Vec<usize>> {
    let at = |i: usize, j: usize| i * n + j;
    let mut cells = Vec::with_capacity((n - 1) * (n - 1));
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            cells.push(vec![at(i, j), at(i, j + 1), at(i + 1, j + 1), at(i + 1, j)]);
        }
    }
    cells
}

fn triangular_cells(n: usize) -> Vec<Vec<usize>> {
    let at = |i: usize, j: usize| i * n + j;
    let mut cells = Vec::with_capacity(2 * (n - 1) * (n - 1));
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            cells.push(vec![at(i, j), at(i, j + 1), at(i + 1, j + 1)]);
            cells.push(vec![at(i, j), at(i + 1, j + 1), at(i + 1, j)]);
        }
    }
    cells
}

fn hexagonal_cells(rows: usize, cols: usize) -> (usize, Vec<Vec<usize>>) {
    // Column span of vertex row i: union of the hexagon rows i-1 and i.
    let span = |i: usize| {
        let hex_rows = [i.checked_sub(1), (i < rows).then_some(i)];
        let parities = hex_rows.iter().flatten().map(|h| h % 2);
        let lo = parities.clone().min().unwrap_or(0);
        let hi = 2 * cols + parities.max().unwrap_or(0);
        (lo, hi)
    };
    let mut offsets = Vec::with_capacity(rows + 1);
    let mut total = 0;
    for i in 0..=rows {
        let (lo, hi) = span(i);
        offsets.push((total, lo));
        total += hi - lo + 1;
    }
    let at = |i: usize, j: usize| {
        let (base, lo) = offsets[i];
        base + j - lo
    };
    let mut cells = Vec::with_capacity(rows * cols);
    for h in 0..rows {
        for k in 0..cols {
            let j0 = h % 2 + 2 * k;
            cells.push(vec![
                at(h, j0),
                at(h, j0 + 1),
                at(h, j0 + 2),
                at(h + 1, j0 + 2),
                at(h + 1, j0 + 1),
                at(h + 1, j0),
            ]);
        }
    }
    (total, cells)
}

pub fn graph_stats(graph: &Graph) -> DegreeStats {
    let mut histogram = BTreeMap::new();
    for v in 0..graph.num_vertices() {
        *histogram.entry(graph.degree(v)).or_insert(0) += 1;
    }
    DegreeStats {
        max_degree: graph.max_degree(),
        histogram,
    }
}

fn check_len(graph: &Graph, occ: &Occupancy) -> Result<()> {
    if occ.len() != graph.num_vertices() {
        return Err(Error::LengthMismatch {
            expected: graph.num_vertices(),
            got: occ.len(),
        });
    }
    Ok(())
}

/// Isolated open vertices, isolated open edges, and fully open cells.
pub fn count_patterns(graph: &Graph, cells: &CellList, occ: &Occupancy) -> Result<PatternCounts> {
    check_len(graph, occ)?;
    let open_degree: Vec<usize> = (0..graph.num_vertices())
        .map(|v| {
            if occ.is_open(v) {
                graph
                    .neighbors(v)
                    .iter()
                    .filter(|&&u| occ.is_open(u))
                    .count()
            } else {
                0
            }
        })
        .collect();

    let mut counts = PatternCounts::default();
    for v in occ.open_vertices() {
        match open_degree[v] {
            0 => counts.isolated_vertices += 1,
            // each isolated edge is seen from its smaller endpoint only
            1 => {
                let u = graph.neighbors(v).iter().copied().find(|&u| occ.is_open(u));
                if let Some(u) = u {
                    if v < u && open_degree[u] == 1 {
                        counts.isolated_edges += 1;
                    }
                }
            }
            _ => {}
        }
    }
    counts.empty_cells = cells
        .cells
        .iter()
        .filter(|cell| cell.iter().all(|&v| occ.is_open(v)))
        .count();
    Ok(counts)
}
