//! Subcommand implementations. Each returns the text to print so the binary
//! stays a thin shell and tests can call these directly.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use shex_atlas::focus::{classify, collapse_neighbourhood, FocusError, FocusState};
use shex_atlas::graph3d::emit_graph3d;
use shex_atlas::mermaid::emit_classdiagram;
use shex_atlas::metrics::{aggregate_discriminability, precision, read_study_csv, NotationSpec};
use shex_atlas::schema_graph::{build_graph, VisualGraph};
use shex_atlas::shexc::{parse_schema, ParseError, ShExSchema};
use shex_atlas::wikidata::{
    extract_entity_id, tooltip_text, EntitySummary, FixtureSource, HttpSource, LookupError, WikidataClient,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {err}", path.display())]
    Parse { path: PathBuf, err: ParseError },
    #[error("{0}")]
    Malformed(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("unknown node {id}{}", suggestion_suffix(.suggestions))]
    UnknownNode { id: String, suggestions: Vec<String> },
    #[error("{0} is not a Wikidata entity or property")]
    NotWikidata(String),
    #[error(transparent)]
    Lookup(#[from] LookupError),
    #[error("{0}")]
    Config(String),
    #[error("server error: {0}")]
    Server(String),
}

fn suggestion_suffix(s: &[String]) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!("; did you mean {}?", s.join(", "))
    }
}

impl CliError {
    /// 1: malformed input, 2: I/O or network, 3: unknown node or entity.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Malformed(_) | CliError::Config(_) => 1,
            CliError::Io { .. } | CliError::Server(_) => 2,
            CliError::Lookup(LookupError::NotFound(_)) => 3,
            CliError::Lookup(_) => 2,
            CliError::UnknownNode { .. } | CliError::NotWikidata(_) => 3,
        }
    }
}

/// Up to three node ids close to `wanted`, best first.
pub fn near_misses(g: &VisualGraph, wanted: &str) -> Vec<String> {
    let fold = |s: &str| s.trim_start_matches(':').to_lowercase();
    let w = fold(wanted);
    let mut scored: Vec<(f64, &str)> = g
        .nodes
        .iter()
        .map(|n| {
            let id = fold(&n.id);
            let mut score = strsim::jaro_winkler(&w, &id);
            if !w.is_empty() && (id.contains(&w) || w.contains(&id)) {
                score = score.max(0.9);
            }
            (score, n.id.as_str())
        })
        .filter(|(s, _)| *s >= 0.75)
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    scored.into_iter().take(3).map(|(_, id)| id.to_string()).collect()
}

fn unknown_node(g: &VisualGraph, err: FocusError) -> CliError {
    let FocusError::UnknownNode(id) = err;
    CliError::UnknownNode {
        suggestions: near_misses(g, &id),
        id,
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_schema(path: &Path) -> Result<ShExSchema, CliError> {
    parse_schema(&read(path)?).map_err(|err| CliError::Parse {
        path: path.to_path_buf(),
        err,
    })
}

pub fn load_graph(path: &Path) -> Result<VisualGraph, CliError> {
    Ok(build_graph(&load_schema(path)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Classdiagram,
    Graph3d,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Converted {
    pub document: String,
    /// Sanitization map as TSV; class diagrams only.
    pub map_tsv: Option<String>,
}

pub fn convert(input: &Path, format: Format) -> Result<Converted, CliError> {
    let g = load_graph(input)?;
    Ok(match format {
        Format::Classdiagram => {
            let d = emit_classdiagram(&g);
            Converted {
                document: d.text,
                map_tsv: Some(d.map.to_tsv()),
            }
        }
        Format::Graph3d => Converted {
            document: emit_graph3d(&g).to_json() + "\n",
            map_tsv: None,
        },
    })
}

/// Splits a comma list, dropping blanks.
pub fn node_list(raw: &str) -> Vec<String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn focus(input: &Path, nodes: &[String], include_incoming: bool) -> Result<String, CliError> {
    let g = load_graph(input)?;
    let state = FocusState::from_ids(&g, nodes).map_err(|e| unknown_node(&g, e))?;
    let c = classify(&g, &state, include_incoming).map_err(|e| unknown_node(&g, e))?;
    Ok(to_json(&c))
}

pub fn collapse(input: &Path, node: &str) -> Result<String, CliError> {
    let g = load_graph(input)?;
    let sub = collapse_neighbourhood(&g, node).map_err(|e| unknown_node(&g, e))?;
    Ok(emit_graph3d(&sub).to_json() + "\n")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
    Both,
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("documents serialize") + "\n"
}

fn render(text: String, json: String, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => text,
        ReportFormat::Json => json,
        ReportFormat::Both => format!("{text}\n{json}"),
    }
}

pub fn metrics(spec_path: &Path, format: ReportFormat) -> Result<String, CliError> {
    let text = read(spec_path)?;
    let malformed = |e: &dyn std::fmt::Display| CliError::Malformed(format!("{}: {e}", spec_path.display()));
    let spec = NotationSpec::from_json(&text).map_err(|e| malformed(&e))?;
    let report = aggregate_discriminability(&spec).map_err(|e| malformed(&e))?;
    Ok(render(report.to_text(), to_json(&report), format))
}

pub fn study(records_path: &Path, format: ReportFormat) -> Result<String, CliError> {
    let file = fs::File::open(records_path).map_err(|source| CliError::Io {
        path: records_path.to_path_buf(),
        source,
    })?;
    let malformed = |e: &dyn std::fmt::Display| CliError::Malformed(format!("{}: {e}", records_path.display()));
    let records = read_study_csv(file).map_err(|e| malformed(&e))?;
    let entries = precision(&records).map_err(|e| malformed(&e))?;
    let width = entries.iter().map(|e| e.participant.len()).max().unwrap_or(0).max(11);
    let mut text = format!("{:width$}  precision\n", "participant");
    for e in &entries {
        text.push_str(&format!("{:width$}  {:.4}\n", e.participant, e.precision));
    }
    Ok(render(text, to_json(&entries), format))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum WikidataMode {
    Off,
    Fixture,
    Live,
}

/// Builds the lookup client for `mode`. Fixture mode without a path uses the
/// bundled table.
pub fn wikidata_client(
    mode: WikidataMode,
    fixture: Option<&Path>,
    cache_dir: Option<&Path>,
) -> Result<Option<WikidataClient>, CliError> {
    let client = match mode {
        WikidataMode::Off => return Ok(None),
        WikidataMode::Fixture => {
            let source = match fixture {
                Some(p) => FixtureSource::from_path(p).map_err(|e| CliError::Malformed(e.to_string()))?,
                None => FixtureSource::bundled(),
            };
            WikidataClient::new(source)
        }
        WikidataMode::Live => WikidataClient::new(HttpSource::new()?),
    };
    Ok(Some(match cache_dir {
        Some(dir) => client.with_disk_cache(dir),
        None => client,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntityAnswer {
    pub term: String,
    #[serde(flatten)]
    pub summary: EntitySummary,
    pub tooltip: String,
}

pub fn lookup_entity(client: &WikidataClient, term: &str, language: &str) -> Result<EntityAnswer, CliError> {
    let id = extract_entity_id(term).ok_or_else(|| CliError::NotWikidata(term.to_string()))?;
    let summary = client.fetch_entity_summary(id, language)?;
    Ok(EntityAnswer {
        term: term.to_string(),
        tooltip: tooltip_text(&summary),
        summary,
    })
}

pub fn entity(client: Option<&WikidataClient>, term: &str, language: &str, json: bool) -> Result<String, CliError> {
    let client = client.ok_or_else(|| CliError::Config("wikidata lookups are off; choose fixture or live mode".into()))?;
    let answer = lookup_entity(client, term, language)?;
    Ok(if json {
        to_json(&answer)
    } else {
        answer.tooltip + "\n"
    })
}
