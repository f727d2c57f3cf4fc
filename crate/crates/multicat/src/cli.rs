//! Argument parsing and subcommand dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use multicat_core::finset::finset_multiplicity;
use multicat_core::graph::{betti_numbers, evaluate, SimpleGraph, Strategy};
use multicat_core::group::{group_multiplicities, small_groups, GroupHom};
use multicat_core::knot::{
    distance_lower_bound_to_unknot, multiplicity_index_bounds, pair_multiplicity_facts, KnotRecord,
};
use multicat_core::module::{default_bound, FgZModule, ZModuleHom, DEFAULT_CANDIDATE_LIMIT};
use multicat_core::{Certificate, DistValue, MultValue, WitnessedMultiplicity};
use serde_json::{json, Value};

use crate::checks::{run_checks, CheckOptions, Fault, Scope};
use crate::formats::{
    classify_group_arg, load_group, parse_graph, parse_json_lines, parse_module_arg, parse_module_list, PairLine,
};
use crate::matrix::{distance_matrix, Corpus, Measure};
use crate::parallel::{rank_multiplicities_parallel, solve_circle, with_threads, WallClock};
use crate::{read_input, CliError};

#[derive(Debug, Parser)]
#[command(name = "multicat", version, about = "Exact multiplicities and multiplicity distances")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Bnb,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "MULTICAT_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Wall-clock budget for the graph solver, in seconds.
    #[arg(long, global = true)]
    time_limit: Option<f64>,
    /// Free-block entry bound for mixed module searches.
    #[arg(long, global = true)]
    bound: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "bnb")]
    strategy: StrategyArg,
    /// Report elapsed time (makes output non-deterministic).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// m(X:Y) = ceil(|X|/|Y|) for finite sets of the given sizes.
    Finset { x: usize, y: usize },
    /// Kernel and cokernel multiplicities between two finite groups.
    Group {
        /// Built-in name (cyclic:n, dihedral:n, dicyclic:n, klein4, q8, a4, product:<a>,<b>) or table file.
        source: String,
        target: String,
    },
    /// m_map(G : S^1) for a finite graph.
    GraphCircle {
        /// Edge-list file (`V E`, then `u v` lines); `-` reads stdin.
        file: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["file", "cycle", "path"])]
        complete: Option<usize>,
        #[arg(long, conflicts_with_all = ["file", "path"])]
        cycle: Option<usize>,
        #[arg(long, conflicts_with = "file")]
        path: Option<usize>,
    },
    /// Kernel- and cokernel-rank multiplicities between two Z-modules.
    Module {
        #[arg(long, num_args = 2, value_names = ["M", "N"], required = true)]
        pair: Vec<String>,
    },
    /// Multiplicity-index bounds from JSON-lines knot records.
    Knot {
        /// JSON-lines file; `-` reads stdin.
        file: PathBuf,
        /// Lines are `{"k1":..,"k2":..,"relation":..}` pair queries.
        #[arg(long)]
        pairs: bool,
    },
    /// Pairwise distance matrix with a metric audit.
    Matrix {
        #[arg(long, value_enum)]
        category: CategoryArg,
        #[arg(long, value_enum, default_value = "kernel")]
        measure: Measure,
        /// File with one object per line (modules or group names).
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Use every group type up to this order.
        #[arg(long)]
        small_groups: Option<usize>,
        objects: Vec<String>,
    },
    /// Runs the property suites.
    Check {
        #[arg(long, value_enum, default_value = "all")]
        scope: Scope,
        #[arg(long, default_value_t = 8)]
        max_order: usize,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CategoryArg {
    Finset,
    Group,
    Module,
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let started = Instant::now();
    let threads = cli.global.threads.map(usize::from);
    let result = validate(&cli).and_then(|()| with_threads(threads, || dispatch(&cli)));
    match result {
        Ok((mut payload, code)) => {
            if cli.global.timing {
                payload["timing"] = json!({ "elapsed_ms": started.elapsed().as_secs_f64() * 1e3 });
            }
            let text = match cli.global.format {
                Format::Json => serde_json::to_string_pretty(&payload).expect("values serialize") + "\n",
                Format::Text => render_text(&payload),
            };
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn validate(cli: &Cli) -> Result<(), CliError> {
    if let Some(t) = cli.global.time_limit {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!("--time-limit must be a non-negative number of seconds, got {t}")));
        }
    }
    match &cli.command {
        Command::GraphCircle { file: None, complete: None, cycle: None, path: None } => {
            Err(CliError::Usage("graph-circle needs a file, --complete, --cycle or --path".into()))
        }
        Command::Matrix { corpus: None, small_groups: None, objects, .. } if objects.is_empty() => {
            Err(CliError::Usage("matrix needs objects, --corpus or --small-groups".into()))
        }
        Command::Matrix { category, small_groups: Some(_), .. } if *category != CategoryArg::Group => {
            Err(CliError::Usage("--small-groups only applies to --category group".into()))
        }
        _ => Ok(()),
    }
}

type Outcome = Result<(Value, i32), CliError>;

fn dispatch(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Finset { x, y } => finset(*x, *y),
        Command::Group { source, target } => group(source, target),
        Command::GraphCircle { file, complete, cycle, path } => graph(g, file.as_ref(), *complete, *cycle, *path),
        Command::Module { pair } => module(g, &pair[0], &pair[1]),
        Command::Knot { file, pairs } => knot(file, *pairs),
        Command::Matrix { category, measure, corpus, small_groups, objects } => {
            matrix(g, *category, *measure, corpus.as_ref(), *small_groups, objects)
        }
        Command::Check { scope, max_order, inject_fault } => {
            let report = run_checks(&CheckOptions { scope: *scope, max_order: *max_order, fault: *inject_fault });
            let code = if report.passed { 0 } else { 1 };
            Ok((
                json!({ "subcommand": "check", "inputs": { "scope": scope, "max_order": max_order }, "report": report }),
                code,
            ))
        }
    }
}

fn exact_value<W: serde::Serialize>(m: &WitnessedMultiplicity<W>) -> Value {
    json!({ "value": m.value, "certificate": m.certificate, "witness": m.witness })
}

fn distance(a: MultValue, b: MultValue, ca: Certificate, cb: Certificate) -> Value {
    let d = DistValue::from_pair(a, b).expect("one family per category");
    json!({ "product": d.product, "display_ln": d.display_ln, "certificate": ca.meet(cb) })
}

fn finset(x: usize, y: usize) -> Outcome {
    let there = finset_multiplicity(x, y).map_err(|e| CliError::Domain(format!("finset {x} {y}: {e}")))?;
    let back = finset_multiplicity(y, x).map_err(|e| CliError::Domain(format!("finset {y} {x}: {e}")))?;
    let witness = there.witness.as_ref().map(|f| f.images().to_vec());
    Ok((
        json!({
            "subcommand": "finset",
            "inputs": { "x": x, "y": y },
            "value": there.value,
            "certificate": there.certificate,
            "witness": { "images": witness },
            "distance": distance(there.value, back.value, there.certificate, back.certificate),
        }),
        0,
    ))
}

fn hom_entry(m: &WitnessedMultiplicity<GroupHom>) -> Value {
    exact_value(m)
}

fn group(source: &str, target: &str) -> Outcome {
    let g = load_group(&classify_group_arg(source))?;
    let h = load_group(&classify_group_arg(target))?;
    let there = group_multiplicities(&g, &h);
    let back = group_multiplicities(&h, &g);
    Ok((
        json!({
            "subcommand": "group",
            "inputs": { "source": source, "target": target, "orders": [g.order(), h.order()] },
            "m_ker": hom_entry(&there.m_ker),
            "m_coker": hom_entry(&there.m_coker),
            "distance": {
                "d_ker": distance(there.m_ker.value, back.m_ker.value, there.m_ker.certificate, back.m_ker.certificate),
                "d_coker": distance(there.m_coker.value, back.m_coker.value, there.m_coker.certificate, back.m_coker.certificate),
            },
        }),
        0,
    ))
}

fn graph(
    g: &GlobalOpts,
    file: Option<&PathBuf>,
    complete: Option<usize>,
    cycle: Option<usize>,
    path: Option<usize>,
) -> Outcome {
    let domain = |e: multicat_core::graph::GraphError| CliError::Domain(e.to_string());
    let (graph, added, source) = match (file, complete, cycle, path) {
        (Some(p), ..) => {
            let text = read_input(p)?;
            let (graph, added) = parse_graph(&text, &p.display().to_string())?;
            (graph, added, p.display().to_string())
        }
        (_, Some(n), ..) => (SimpleGraph::complete(n).map_err(domain)?, 0, format!("K_{n}")),
        (_, _, Some(n), _) => (SimpleGraph::cycle(n).map_err(domain)?, 0, format!("C_{n}")),
        (.., Some(n)) => (SimpleGraph::path(n).map_err(domain)?, 0, format!("P_{n}")),
        _ => unreachable!("validated"),
    };
    let strategy = match g.strategy {
        StrategyArg::Exhaustive => Strategy::Exhaustive,
        StrategyArg::Bnb => Strategy::BranchAndBound,
    };
    let deadline = WallClock::after(g.time_limit.map(Duration::from_secs_f64));
    let solution = solve_circle(&graph, strategy, &deadline);
    let witness = solution.witness.as_ref().expect("every graph maps to the circle");
    let profile = evaluate(&graph, &witness.layout, &witness.arcs).map_err(domain)?;
    let (b0, b1) = betti_numbers(&graph);
    Ok((
        json!({
            "subcommand": "graph-circle",
            "inputs": {
                "source": source,
                "vertices": graph.vertex_count(),
                "edges": graph.edge_count(),
                "subdivision_vertices": added,
                "strategy": strategy,
            },
            "value": solution.value.as_count(),
            "layout": witness.layout,
            "arcs": witness.arcs,
            "certificate": solution.certificate,
            "fiber_profile": profile,
            "betti_numbers": [b0, b1],
        }),
        0,
    ))
}

fn rank_entry(m: &WitnessedMultiplicity<ZModuleHom>) -> Value {
    json!({ "exp": m.value.as_exp(), "certificate": m.certificate, "witness": m.witness })
}

fn module(g: &GlobalOpts, a: &str, b: &str) -> Outcome {
    let m = parse_module_arg(a)?;
    let n = parse_module_arg(b)?;
    let bound = g.bound.unwrap_or_else(|| default_bound(&m, &n));
    let there = rank_multiplicities_parallel(&m, &n, bound, DEFAULT_CANDIDATE_LIMIT);
    let back = rank_multiplicities_parallel(&n, &m, bound, DEFAULT_CANDIDATE_LIMIT);
    let direction = |r: &multicat_core::module::RankMultiplicities| json!({ "m_rker": rank_entry(&r.m_rker), "m_rcoker": rank_entry(&r.m_rcoker) });
    Ok((
        json!({
            "subcommand": "module",
            "inputs": { "m": m.to_string(), "n": n.to_string(), "bound": bound },
            "m_rker": rank_entry(&there.m_rker),
            "m_rcoker": rank_entry(&there.m_rcoker),
            "witness": there.m_rker.witness,
            "reverse": direction(&back),
            "distance": {
                "d_rker": distance(there.m_rker.value, back.m_rker.value, there.m_rker.certificate, back.m_rker.certificate),
                "d_rcoker": distance(there.m_rcoker.value, back.m_rcoker.value, there.m_rcoker.certificate, back.m_rcoker.certificate),
            },
        }),
        0,
    ))
}

fn knot(file: &Path, pairs: bool) -> Outcome {
    let name = file.display().to_string();
    let text = read_input(file)?;
    let mut results = Vec::new();
    let mut failed = false;
    if pairs {
        for (i, line) in parse_json_lines::<PairLine>(&text, &name)?.iter().enumerate() {
            let label = format!("{}:{}", line.k1.name, line.k2.name);
            results.push(match pair_multiplicity_facts(&line.k1, &line.k2, &line.relation) {
                Ok(b) => json!({ "entry": i + 1, "pair": label, "bounds": b }),
                Err(e) => {
                    failed = true;
                    json!({ "entry": i + 1, "pair": label, "error": e.to_string() })
                }
            });
        }
    } else {
        for (i, rec) in parse_json_lines::<KnotRecord>(&text, &name)?.iter().enumerate() {
            let outcome = multiplicity_index_bounds(rec).and_then(|b| Ok((b, distance_lower_bound_to_unknot(rec)?)));
            results.push(match outcome {
                Ok((b, d)) => json!({ "entry": i + 1, "name": rec.name, "bounds": b, "unknot_distance": d }),
                Err(e) => {
                    failed = true;
                    json!({ "entry": i + 1, "name": rec.name, "error": e.to_string() })
                }
            });
        }
    }
    Ok((
        json!({ "subcommand": "knot", "inputs": { "file": name, "pairs": pairs }, "results": results }),
        i32::from(failed),
    ))
}

fn matrix(
    g: &GlobalOpts,
    category: CategoryArg,
    measure: Measure,
    corpus_file: Option<&PathBuf>,
    small: Option<usize>,
    objects: &[String],
) -> Outcome {
    let mut items: Vec<String> = objects.to_vec();
    if let Some(p) = corpus_file {
        let text = read_input(p)?;
        items.extend(
            text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty()).map(String::from),
        );
    }
    let corpus = match category {
        CategoryArg::Finset => Corpus::Sets(
            items
                .iter()
                .map(|s| match s.parse::<usize>() {
                    Ok(n) if n > 0 => Ok(n),
                    _ => Err(CliError::Domain(format!("set size {s:?} must be a positive integer"))),
                })
                .collect::<Result<_, _>>()?,
        ),
        CategoryArg::Group => {
            let mut groups: Vec<(String, Arc<_>)> = match small {
                Some(max) => small_groups(max).into_iter().map(|(n, g)| (n.to_string(), Arc::new(g))).collect(),
                None => Vec::new(),
            };
            for s in &items {
                groups.push((s.clone(), load_group(&classify_group_arg(s))?));
            }
            Corpus::Groups(groups)
        }
        CategoryArg::Module => {
            let mut modules: Vec<FgZModule> = Vec::new();
            for s in objects {
                modules.push(parse_module_arg(s)?);
            }
            if let Some(p) = corpus_file {
                modules.extend(parse_module_list(&read_input(p)?, &p.display().to_string())?);
            }
            Corpus::Modules(modules)
        }
    };
    let bound = g.bound.unwrap_or_else(|| match &corpus {
        Corpus::Modules(ms) => ms.iter().map(|m| default_bound(m, &FgZModule::zero())).max().unwrap_or(1),
        _ => 1,
    });
    let m = distance_matrix(&corpus, measure, bound, DEFAULT_CANDIDATE_LIMIT);
    let code = if m.audit.passed() { 0 } else { 1 };
    let category = format!("{category:?}").to_lowercase();
    Ok((
        json!({ "subcommand": "matrix", "inputs": { "category": category, "measure": measure, "bound": bound }, "matrix": m }),
        code,
    ))
}

/// Indented `key: value` rendering; distance matrices also get a table.
fn render_text(v: &Value) -> String {
    let mut out = String::new();
    if let Some(m) = v.get("matrix") {
        render_table(m, &mut out);
    }
    render_value(v, 0, &mut out);
    out
}

fn render_table(m: &Value, out: &mut String) {
    let labels: Vec<&str> = m["labels"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
    let width = labels.iter().map(|l| l.len()).max().unwrap_or(1).max(8);
    out.push_str(&format!("{:width$}", ""));
    for l in &labels {
        out.push_str(&format!(" {l:>width$}"));
    }
    out.push('\n');
    for (i, row) in m["cells"].as_array().into_iter().flatten().enumerate() {
        out.push_str(&format!("{:width$}", labels.get(i).unwrap_or(&"")));
        for cell in row.as_array().into_iter().flatten() {
            let mark = if cell["certificate"] == "exact" { "" } else { "*" };
            let shown = match cell["display_ln"].as_f64() {
                Some(x) => format!("{x:.6}{mark}"),
                None => format!("inf{mark}"),
            };
            out.push_str(&format!(" {shown:>width$}"));
        }
        out.push('\n');
    }
    out.push('\n');
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(format!("[{}]", items.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        Value::Object(map) if map.len() == 1 => {
            let (k, x) = map.iter().next().expect("one entry");
            scalar(x).filter(|_| !x.is_object() && !x.is_array()).map(|s| format!("{k} {s}"))
        }
        _ => None,
    }
}

fn render_value(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if depth == 0 && k == "matrix" {
                    if let Some(a) = x.get("audit") {
                        out.push_str("audit:\n");
                        render_value(a, 1, out);
                    }
                    continue;
                }
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_value(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}- #{i}\n"));
                        render_value(x, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
