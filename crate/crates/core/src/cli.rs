//! Command-line front end. Every command is a pure function of its flags
//! (the seed is mandatory wherever randomness is used) and produces its
//! whole output as one string written at the end.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{bound_polys, bounds_report, table_row, BoundsReport, TableRow};
use crate::error::{invalid, Error, Result};
use crate::estimator::{
    blind_policy, concentration_report, coupling_check, estimate_curve, gap_certificate,
    mean_full_heuristic_payoff, percolation_mean, BlindPolicy,
};
use crate::graph::{gen_lattice, CellList, Graph, LatticeKind, LatticeSpec};
use crate::io::{load_graph, GraphFile};
use crate::oracle::oracle_report;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "LATTICESTOP_THREADS";

/// Default finite-size slack on per-vertex quantities.
pub const DEFAULT_SLACK: f64 = 0.005;

/// Tolerance on table gaps against the reference values.
pub const GAP_TOLERANCE: f64 = 2e-5;

#[derive(Debug, Parser)]
#[command(
    name = "latticestop",
    version,
    about = "Component-count stopping games on lattices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a lattice as graph JSON.
    Lattice {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Estimate the blind value curve by Monte Carlo.
    Simulate {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Also write the blind policy JSON here.
        #[arg(long)]
        blind_out: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Mean and standard deviation of the site percolation component count.
    Percolate {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Maximised bound polynomials and the conservative lattice table.
    Bounds {
        #[arg(long)]
        lattice: Option<LatticeKind>,
        #[arg(long)]
        assert: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact curve, game values and percolation polynomial of a small graph.
    Oracle {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Count violations of the coupling inequality on coupled samples.
    CouplingCheck {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated reveal times; defaults to ten evenly spaced ones.
        #[arg(long, value_delimiter = ',')]
        t_grid: Vec<usize>,
        #[arg(long)]
        assert: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Empirical spread of C_p against the bounded-differences budget.
    Concentration {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        assert: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Blind versus full-information gap certificate for a graph size.
    Gap {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        n_vertices: Option<u64>,
        #[arg(long)]
        max_degree: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Composite report comparing Monte Carlo curve maxima against the bounds.
    Report {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Percolation probability for the concentration check; defaults to
        /// the lower-bound maximiser of the lattice.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SLACK)]
        slack: f64,
        #[arg(long, default_value_t = 100)]
        coupling_trials: u64,
        #[arg(long)]
        assert: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    #[arg(long, conflicts_with = "graph")]
    pub lattice: Option<LatticeKind>,
    /// Side length for square and triangular lattices.
    #[arg(long)]
    pub n: Option<usize>,
    /// Hexagon rows of a hexagonal lattice.
    #[arg(long)]
    pub rows: Option<usize>,
    /// Hexagon columns of a hexagonal lattice.
    #[arg(long)]
    pub cols: Option<usize>,
    /// Graph JSON file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    #[default]
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// A loaded or generated graph together with its description.
pub struct GraphSource {
    pub graph: Graph,
    pub cells: CellList,
    pub file: GraphFile,
    pub lattice: Option<LatticeKind>,
}

impl GraphArgs {
    pub fn spec(&self) -> Result<Option<LatticeSpec>> {
        let Some(kind) = self.lattice else {
            return Ok(None);
        };
        let need = |v: Option<usize>, name: &'static str| {
            v.ok_or_else(|| invalid(name, format!("required for the {kind} lattice")))
        };
        let spec = match kind {
            LatticeKind::Square => LatticeSpec::Square {
                n: need(self.n, "n")?,
            },
            LatticeKind::Triangular => LatticeSpec::Triangular {
                n: need(self.n, "n")?,
            },
            LatticeKind::Hexagonal => LatticeSpec::Hexagonal {
                rows: need(self.rows, "rows")?,
                cols: need(self.cols, "cols")?,
            },
        };
        spec.validate()?;
        Ok(Some(spec))
    }

    pub fn resolve(&self) -> Result<GraphSource> {
        if let Some(spec) = self.spec()? {
            let (graph, cells) = gen_lattice(&spec)?;
            let file = GraphFile::from_lattice(&spec, &graph, &cells);
            return Ok(GraphSource {
                graph,
                cells,
                file,
                lattice: Some(spec.kind()),
            });
        }
        let Some(path) = &self.graph else {
            return Err(invalid(
                "graph",
                "pass either --lattice with its size or --graph <path>",
            ));
        };
        let (graph, cells, file) = load_graph(path)?;
        let lattice = file.kind.parse().ok();
        Ok(GraphSource {
            graph,
            cells,
            file,
            lattice,
        })
    }

    fn is_set(&self) -> bool {
        self.lattice.is_some() || self.graph.is_some()
    }
}

/// Result of one command: the text to emit and whether its verdict held.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub passed: bool,
    pub assert: bool,
}

impl Outcome {
    fn plain(output: String) -> Self {
        Self {
            output,
            passed: true,
            assert: false,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn json_only(output: &OutputArgs, command: &'static str) -> Result<()> {
    match output.format {
        Some(Format::Csv) => Err(invalid("format", format!("`{command}` only writes json"))),
        _ => Ok(()),
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(invalid("trials", "need at least one trial"));
    }
    Ok(())
}

/// Ten evenly spaced reveal times `ceil(k N / 10)`, deduplicated.
pub fn default_t_grid(n: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = (1..=10).map(|k| (k * n).div_ceil(10).max(1)).collect();
    grid.dedup();
    grid
}

#[derive(Debug, Clone, Serialize)]
struct BoundsRow {
    #[serde(flatten)]
    bounds: BoundsReport,
    table_lower: f64,
    table_upper: f64,
    table_gap: f64,
}

/// Reference gaps of the lattice table.
pub fn reference_gap(kind: LatticeKind) -> f64 {
    match kind {
        LatticeKind::Square => 0.00315,
        LatticeKind::Triangular => 0.00478,
        LatticeKind::Hexagonal => 0.00406,
    }
}

/// Whether a bounds row reproduces the reference intervals, argmax windows
/// and table gap.
pub fn bounds_verdict(report: &BoundsReport, row: &TableRow) -> bool {
    let entry = bound_polys(report.lattice);
    let within = |x: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&x);
    report.lower > entry.reference_lower
        && report.upper < entry.reference_upper
        && within(report.p_max, entry.p_max_window)
        && within(report.p_max_upper, entry.p_max_upper_window)
        && row.lower >= entry.reference_lower
        && row.upper <= entry.reference_upper
        && (row.gap - reference_gap(report.lattice)).abs() <= GAP_TOLERANCE
}

pub fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::Lattice { graph, output } => {
            json_only(output, "lattice")?;
            let src = graph.resolve()?;
            Ok(Outcome::plain(src.file.to_json()))
        }

        Command::Simulate {
            graph,
            run,
            blind_out,
            output,
        } => {
            check_trials(run.trials)?;
            let src = graph.resolve()?;
            let curve = estimate_curve(&src.graph, run.trials, run.seed)?;
            let blind = blind_policy(&curve)?;
            if let Some(path) = blind_out {
                std::fs::write(path, to_json(&blind))?;
            }
            let text = match output.format.unwrap_or(Format::Csv) {
                Format::Csv => curve.to_csv(),
                Format::Json => to_json(&json!({ "curve": curve, "blind": blind })),
            };
            Ok(Outcome::plain(text))
        }

        Command::Percolate {
            graph,
            run,
            p,
            output,
        } => {
            let src = graph.resolve()?;
            let stats = percolation_mean(&src.graph, *p, run.trials, run.seed)?;
            let n = src.graph.num_vertices().max(1) as f64;
            let text = match output.format.unwrap_or_default() {
                Format::Csv => format!(
                    "p,trials,mean,std,mean_per_vertex\n{},{},{},{},{}\n",
                    stats.p,
                    stats.trials,
                    stats.mean,
                    stats.std,
                    stats.mean / n
                ),
                Format::Json => to_json(&json!({
                    "p": stats.p,
                    "trials": stats.trials,
                    "mean": stats.mean,
                    "std": stats.std,
                    "mean_per_vertex": stats.mean / n,
                })),
            };
            Ok(Outcome::plain(text))
        }

        Command::Bounds {
            lattice,
            assert,
            output,
        } => {
            let kinds = match lattice {
                Some(k) => vec![*k],
                None => LatticeKind::ALL.to_vec(),
            };
            let mut rows = Vec::new();
            let mut passed = true;
            for kind in kinds {
                let bounds = bounds_report(kind)?;
                let table = table_row(kind)?;
                passed &= bounds_verdict(&bounds, &table);
                rows.push(BoundsRow {
                    bounds,
                    table_lower: table.lower,
                    table_upper: table.upper,
                    table_gap: table.gap,
                });
            }
            let text = match output.format.unwrap_or_default() {
                Format::Json => to_json(&rows),
                Format::Csv => {
                    let mut s = String::from(
                        "lattice,p_max,lower,p_max_upper,upper,gap,table_lower,table_upper,table_gap\n",
                    );
                    for r in &rows {
                        let b = &r.bounds;
                        s.push_str(&format!(
                            "{},{},{},{},{},{},{},{},{}\n",
                            b.lattice,
                            b.p_max,
                            b.lower,
                            b.p_max_upper,
                            b.upper,
                            b.gap,
                            r.table_lower,
                            r.table_upper,
                            r.table_gap
                        ));
                    }
                    s
                }
            };
            Ok(Outcome {
                output: text,
                passed,
                assert: *assert,
            })
        }

        Command::Oracle { graph, output } => {
            json_only(output, "oracle")?;
            let src = graph.resolve()?;
            Ok(Outcome::plain(to_json(&oracle_report(&src.graph)?)))
        }

        Command::CouplingCheck {
            graph,
            run,
            t_grid,
            assert,
            output,
        } => {
            json_only(output, "coupling-check")?;
            check_trials(run.trials)?;
            let src = graph.resolve()?;
            let grid = if t_grid.is_empty() {
                default_t_grid(src.graph.num_vertices())
            } else {
                t_grid.clone()
            };
            let report = coupling_check(&src.graph, run.trials, &grid, run.seed)?;
            Ok(Outcome {
                output: to_json(&json!({
                    "samples": report.samples,
                    "instances": report.instances,
                    "t_grid": grid,
                    "violations": report.violations,
                })),
                passed: report.violations == 0,
                assert: *assert,
            })
        }

        Command::Concentration {
            graph,
            run,
            p,
            assert,
            output,
        } => {
            json_only(output, "concentration")?;
            let src = graph.resolve()?;
            let report = concentration_report(&src.graph, *p, run.trials, run.seed)?;
            Ok(Outcome {
                output: to_json(&report),
                passed: report.passes,
                assert: *assert,
            })
        }

        Command::Gap {
            graph,
            n_vertices,
            max_degree,
            output,
        } => {
            json_only(output, "gap")?;
            let (n, d) = if graph.is_set() {
                let src = graph.resolve()?;
                (
                    src.graph.num_vertices() as u64,
                    src.graph.max_degree() as u64,
                )
            } else {
                match (n_vertices, max_degree) {
                    (Some(n), Some(d)) => (*n, *d),
                    _ => {
                        return Err(invalid(
                            "graph",
                            "pass a graph or both --n-vertices and --max-degree",
                        ))
                    }
                }
            };
            Ok(Outcome::plain(to_json(&gap_certificate(n, d)?)))
        }

        Command::Report {
            graph,
            run,
            p,
            slack,
            coupling_trials,
            assert,
            output,
        } => {
            json_only(output, "report")?;
            let report = composite_report(graph, run, *p, *slack, *coupling_trials)?;
            let passed = report["verdict"]["pass"].as_bool().unwrap_or(false);
            Ok(Outcome {
                output: to_json(&report),
                passed,
                assert: *assert,
            })
        }
    }
}

fn composite_report(
    graph: &GraphArgs,
    run: &RunArgs,
    p: Option<f64>,
    slack: f64,
    coupling_trials: u64,
) -> Result<Value> {
    if !(0.0..=0.1).contains(&slack) {
        return Err(invalid(
            "slack",
            format!("must lie in [0, 0.1], got {slack}"),
        ));
    }
    check_trials(run.trials)?;
    let src = graph.resolve()?;
    let g = &src.graph;
    let n = g.num_vertices();
    let nf = n as f64;

    let curve = estimate_curve(g, run.trials, run.seed)?;
    let blind: BlindPolicy = blind_policy(&curve)?;
    let full = mean_full_heuristic_payoff(g, &curve, run.trials, run.seed ^ 0x5eed)?;
    let coupling = coupling_check(g, coupling_trials, &default_t_grid(n), run.seed)?;

    let bounds = src.lattice.map(bounds_report).transpose()?;
    let conc_p = p.or(bounds.as_ref().map(|b| b.p_max)).unwrap_or(0.5);
    let concentration = concentration_report(g, conc_p, run.trials.max(30), run.seed)?;
    let gap = gap_certificate(n as u64, g.max_degree() as u64)?;

    let per_vertex = blind.value / nf;
    let (window, in_window) = match &bounds {
        Some(b) => {
            let (lo, hi) = (b.lower - slack, b.upper + slack);
            (
                json!({ "lower": lo, "upper": hi }),
                lo < per_vertex && per_vertex < hi,
            )
        }
        None => (Value::Null, true),
    };
    let pass = in_window && coupling.violations == 0 && concentration.passes;

    Ok(json!({
        "graph": {
            "kind": src.file.kind,
            "params": src.file.params,
            "n_vertices": n,
            "edge_count": g.edge_count(),
            "max_degree": g.max_degree(),
        },
        "curve_summary": {
            "trials": curve.trials,
            "max_mean": blind.value,
            "max_mean_per_vertex": per_vertex,
            "argmax_t": blind.stop_time,
            "argmax_fraction": blind.stop_time as f64 / nf,
            "max_ci95": curve.points[blind.stop_time - 1].ci95_halfwidth,
        },
        "blind": {
            "stop_time": blind.stop_time,
            "value": blind.value,
            "per_vertex": per_vertex,
        },
        "full_heuristic": {
            "plays": full.plays,
            "mean_payoff": full.mean,
            "per_vertex": full.mean / nf,
            "std_error": full.std_error,
        },
        "coupling_violations": coupling.violations,
        "coupling_instances": coupling.instances,
        "concentration": concentration,
        "gap_certificate": gap,
        "bounds": bounds,
        "verdict": {
            "slack": slack,
            "window": window,
            "value": per_vertex,
            "pass": pass,
        },
    }))
}

/// Process exit status for an error: 2 for bad parameters, 3 for a
/// malformed graph, 4 for the oracle size guard, 5 for I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter { .. } | Error::LengthMismatch { .. } => 2,
        Error::Schema { .. } | Error::InvalidGraph(_) | Error::Json(_) => 3,
        Error::SizeGuard { .. } => 4,
        Error::Io(_) => 5,
    }
}

/// Output destination of a command, if it has one.
pub fn out_path(command: &Command) -> Option<&PathBuf> {
    let output = match command {
        Command::Lattice { output, .. }
        | Command::Simulate { output, .. }
        | Command::Percolate { output, .. }
        | Command::Bounds { output, .. }
        | Command::Oracle { output, .. }
        | Command::CouplingCheck { output, .. }
        | Command::Concentration { output, .. }
        | Command::Gap { output, .. }
        | Command::Report { output, .. } => output,
    };
    output.out.as_ref()
}
