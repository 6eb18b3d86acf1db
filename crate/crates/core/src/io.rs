//! Graph JSON files.
//!
//! ```json
//! {"kind":"square","params":{"n":2},"n_vertices":4,
//!  "edges":[[0,1],[0,2],[1,3],[2,3]],"cells":[[0,1,3,2]]}
//! ```
//!
//! Edges are written with `u < v` in lexicographic order, so saving the
//! same graph always produces the same bytes.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graph::{CellList, Graph, LatticeSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphFile {
    pub kind: String,
    pub params: Map<String, Value>,
    pub n_vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub cells: Vec<Vec<usize>>,
}

pub fn spec_params(spec: &LatticeSpec) -> Map<String, Value> {
    let v = match *spec {
        LatticeSpec::Square { n } | LatticeSpec::Triangular { n } => json!({ "n": n }),
        LatticeSpec::Hexagonal { rows, cols } => json!({ "rows": rows, "cols": cols }),
    };
    match v {
        Value::Object(m) => m,
        _ => unreachable!(),
    }
}

impl GraphFile {
    pub fn new(kind: &str, params: Map<String, Value>, graph: &Graph, cells: &CellList) -> Self {
        Self {
            kind: kind.to_string(),
            params,
            n_vertices: graph.num_vertices(),
            edges: graph.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            cells: cells.cells.clone(),
        }
    }

    pub fn from_lattice(spec: &LatticeSpec, graph: &Graph, cells: &CellList) -> Self {
        Self::new(spec.kind().name(), spec_params(spec), graph, cells)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("graph file serializes");
        s.push('\n');
        s
    }
}

fn schema(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        reason: reason.into(),
    }
}

fn as_index(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| schema(path, format!("expected a non-negative integer, found {v}")))
}

/// Parses and validates a graph file held in memory.
pub fn parse_graph(text: &str) -> Result<(Graph, CellList, GraphFile)> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| schema("$", format!("not valid JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| schema("$", "expected an object"))?;
    let field = |name: &str| {
        obj.get(name)
            .ok_or_else(|| schema(format!("$.{name}"), "missing field"))
    };

    let kind = field("kind")?
        .as_str()
        .ok_or_else(|| schema("$.kind", "expected a string"))?
        .to_string();
    let params = field("params")?
        .as_object()
        .ok_or_else(|| schema("$.params", "expected an object"))?
        .clone();
    let n = as_index(field("n_vertices")?, "$.n_vertices")?;

    let raw_edges = field("edges")?
        .as_array()
        .ok_or_else(|| schema("$.edges", "expected an array"))?;
    let mut edges = Vec::with_capacity(raw_edges.len());
    let mut seen = BTreeSet::new();
    for (i, e) in raw_edges.iter().enumerate() {
        let path = format!("$.edges[{i}]");
        let pair = e
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| schema(&path, "expected a pair [u, v]"))?;
        let u = as_index(&pair[0], &format!("{path}[0]"))?;
        let v = as_index(&pair[1], &format!("{path}[1]"))?;
        if u >= n || v >= n {
            return Err(schema(
                &path,
                format!("vertex index out of range (n_vertices = {n})"),
            ));
        }
        if u == v {
            return Err(schema(&path, "self-loop"));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(schema(&path, format!("duplicate edge ({u}, {v})")));
        }
        edges.push((u, v));
    }
    let graph = Graph::from_edges(n, &edges)?;

    let cells = match obj.get("cells") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(raw)) => {
            let mut cells = Vec::with_capacity(raw.len());
            for (i, c) in raw.iter().enumerate() {
                let path = format!("$.cells[{i}]");
                let verts = c
                    .as_array()
                    .ok_or_else(|| schema(&path, "expected an array of vertices"))?;
                let cell = verts
                    .iter()
                    .enumerate()
                    .map(|(j, x)| as_index(x, &format!("{path}[{j}]")))
                    .collect::<Result<Vec<_>>>()?;
                if cell.len() < 3 {
                    return Err(schema(&path, "a cell needs at least three vertices"));
                }
                if let Some(&bad) = cell.iter().find(|&&v| v >= n) {
                    return Err(schema(&path, format!("vertex {bad} out of range")));
                }
                let k = cell.len();
                if !(0..k).all(|j| graph.has_edge(cell[j], cell[(j + 1) % k])) {
                    return Err(schema(
                        &path,
                        "cell vertices do not form a cycle of the graph",
                    ));
                }
                cells.push(cell);
            }
            cells
        }
        Some(_) => return Err(schema("$.cells", "expected an array")),
    };

    let file = GraphFile {
        kind,
        params,
        n_vertices: n,
        edges: graph.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        cells: cells.clone(),
    };
    Ok((graph, CellList { cells }, file))
}

pub fn load_graph(path: &Path) -> Result<(Graph, CellList, GraphFile)> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text)
}

pub fn save_graph(path: &Path, file: &GraphFile) -> Result<()> {
    std::fs::write(path, file.to_json())?;
    Ok(())
}
