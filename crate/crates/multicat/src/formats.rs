//! Text formats: group tables, named groups, edge lists, module lists and
//! JSON-lines knot records.

use std::sync::Arc;

use multicat_core::graph::{GraphError, SimpleGraph};
use multicat_core::group::{FiniteGroup, GroupError};
use multicat_core::knot::{KnotRecord, PairRelation};
use multicat_core::module::{parse_module, FgZModule, ModuleError};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{source_name}: line {line}: {message}")]
    Syntax { source_name: String, line: usize, message: String },
    #[error("{1}: {0}")]
    Group(GroupError, String),
    #[error("{1}: {0}")]
    Graph(GraphError, String),
    #[error("{source_name}: line {line}: {error}")]
    Module { source_name: String, line: usize, error: ModuleError },
    #[error("unknown group {0:?}; expected cyclic:n, dihedral:n, dicyclic:n, klein4, q8, a4, product:<a>,<b> or a table file")]
    UnknownGroup(String),
}

fn syntax(source_name: &str, line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { source_name: source_name.to_string(), line, message: message.into() }
}

/// Non-blank lines with `#` comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_numbers(source_name: &str, line: usize, text: &str) -> Result<Vec<usize>, FormatError> {
    text.split_whitespace()
        .map(|tok| tok.parse().map_err(|_| syntax(source_name, line, format!("expected an integer, found {tok:?}"))))
        .collect()
}

/// Line 1 `n`, then `n` rows of `n` indices; row `i` lists `i ∘ j`.
pub fn parse_group_table(text: &str, source_name: &str) -> Result<FiniteGroup, FormatError> {
    let mut lines = content_lines(text);
    let (first, header) = lines.next().ok_or_else(|| syntax(source_name, 1, "empty group file"))?;
    let n = match parse_numbers(source_name, first, header)?.as_slice() {
        [n] => *n,
        _ => return Err(syntax(source_name, first, "first line must hold the group order")),
    };
    let mut rows = Vec::with_capacity(n);
    for (line, text) in lines {
        rows.push(parse_numbers(source_name, line, text)?);
    }
    multicat_core::group::validate_group(n, &rows).map_err(|e| FormatError::Group(e, source_name.to_string()))
}

fn parse_param(name: &str, arg: &str) -> Result<usize, FormatError> {
    arg.parse().map_err(|_| FormatError::UnknownGroup(name.to_string()))
}

/// A built-in group by name. `product:` splits at the first comma whose two
/// sides both parse, so products nest.
pub fn named_group(name: &str) -> Result<FiniteGroup, FormatError> {
    let group_err = |e: GroupError| FormatError::Group(e, name.to_string());
    match name {
        "klein4" => return Ok(FiniteGroup::klein4()),
        "q8" => return Ok(FiniteGroup::q8()),
        "a4" => return Ok(FiniteGroup::a4()),
        _ => {}
    }
    let (kind, arg) = name.split_once(':').ok_or_else(|| FormatError::UnknownGroup(name.to_string()))?;
    match kind {
        "cyclic" => FiniteGroup::cyclic(parse_param(name, arg)?).map_err(group_err),
        "dihedral" => FiniteGroup::dihedral(parse_param(name, arg)?).map_err(group_err),
        "dicyclic" => FiniteGroup::dicyclic(parse_param(name, arg)?).map_err(group_err),
        "product" => {
            for (i, _) in arg.match_indices(',') {
                if let (Ok(a), Ok(b)) = (named_group(&arg[..i]), named_group(&arg[i + 1..])) {
                    return Ok(FiniteGroup::product(&a, &b));
                }
            }
            Err(FormatError::UnknownGroup(name.to_string()))
        }
        _ => Err(FormatError::UnknownGroup(name.to_string())),
    }
}

/// Where a group argument comes from.
pub enum GroupSource {
    Named(String),
    File(std::path::PathBuf),
}

/// Names are tried first; anything else that exists on disk is a table file.
pub fn classify_group_arg(arg: &str) -> GroupSource {
    let path = std::path::Path::new(arg);
    if named_group(arg).is_err() && path.exists() {
        GroupSource::File(path.to_path_buf())
    } else {
        GroupSource::Named(arg.to_string())
    }
}

pub fn load_group(source: &GroupSource) -> Result<Arc<FiniteGroup>, crate::CliError> {
    let g = match source {
        GroupSource::Named(name) => named_group(name)?,
        GroupSource::File(path) => {
            let text = crate::read_input(path)?;
            parse_group_table(&text, &path.display().to_string())?
        }
    };
    Ok(Arc::new(g))
}

/// An edge list: first line `V E`, then `E` lines `u v`. Loops and repeated
/// edges are subdivided; the second value counts the vertices added.
pub fn parse_graph(text: &str, source_name: &str) -> Result<(SimpleGraph, usize), FormatError> {
    let mut lines = content_lines(text);
    let (first, header) = lines.next().ok_or_else(|| syntax(source_name, 1, "empty graph file"))?;
    let (v, e) = match parse_numbers(source_name, first, header)?.as_slice() {
        [v, e] => (*v, *e),
        _ => return Err(syntax(source_name, first, "first line must be `V E`")),
    };
    let mut edges = Vec::with_capacity(e);
    let mut last = first;
    for (line, text) in lines {
        match parse_numbers(source_name, line, text)?.as_slice() {
            [a, b] => edges.push((*a, *b)),
            _ => return Err(syntax(source_name, line, "edge lines must be `u v`")),
        }
        last = line;
    }
    if edges.len() != e {
        return Err(syntax(source_name, last, format!("header announces {e} edges, found {}", edges.len())));
    }
    SimpleGraph::from_multigraph(v, edges).map_err(|err| FormatError::Graph(err, source_name.to_string()))
}

/// One module descriptor per line.
pub fn parse_module_list(text: &str, source_name: &str) -> Result<Vec<FgZModule>, FormatError> {
    content_lines(text)
        .map(|(line, text)| {
            parse_module(text).map_err(|error| FormatError::Module {
                source_name: source_name.to_string(),
                line,
                error,
            })
        })
        .collect()
}

pub fn parse_module_arg(text: &str) -> Result<FgZModule, FormatError> {
    parse_module(text).map_err(|error| FormatError::Module { source_name: format!("{text:?}"), line: 1, error })
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairLine {
    pub k1: KnotRecord,
    pub k2: KnotRecord,
    #[serde(default)]
    pub relation: PairRelation,
}

/// One JSON value per non-blank line.
pub fn parse_json_lines<T: for<'de> Deserialize<'de>>(text: &str, source_name: &str) -> Result<Vec<T>, FormatError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| syntax(source_name, i + 1, e.to_string())))
        .collect()
}
