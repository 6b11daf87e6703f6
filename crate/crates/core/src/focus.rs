//! Complexity management over a [`VisualGraph`]: cumulative focus with a
//! highlighted/dimmed partition, and neighbourhood collapse.
//!
//! Everything here is a pure function of its arguments. Focus state is a
//! value owned by the caller; each toggle returns a new state.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::schema_graph::VisualGraph;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FocusError {
    #[error("unknown node id {0}")]
    UnknownNode(String),
}

/// Ordered set of focused node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FocusState {
    focused: Vec<String>,
}

impl FocusState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a state from ids, validating them against `g`. Duplicates keep
    /// their first position.
    pub fn from_ids<I, S>(g: &VisualGraph, ids: I) -> Result<Self, FocusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut focused: Vec<String> = Vec::new();
        for id in ids {
            let id = id.as_ref();
            if !g.contains_node(id) {
                return Err(FocusError::UnknownNode(id.to_string()));
            }
            if !focused.iter().any(|f| f == id) {
                focused.push(id.to_string());
            }
        }
        Ok(Self { focused })
    }

    pub fn focused(&self) -> &[String] {
        &self.focused
    }

    pub fn is_empty(&self) -> bool {
        self.focused.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.focused.iter().any(|f| f == id)
    }

    /// Removes `node` if focused, appends it otherwise.
    pub fn toggle(&self, g: &VisualGraph, node: &str) -> Result<FocusState, FocusError> {
        if !g.contains_node(node) {
            return Err(FocusError::UnknownNode(node.to_string()));
        }
        let mut focused = self.focused.clone();
        match focused.iter().position(|f| f == node) {
            Some(i) => {
                focused.remove(i);
            }
            None => focused.push(node.to_string()),
        }
        Ok(FocusState { focused })
    }
}

pub fn toggle_focus(state: &FocusState, g: &VisualGraph, node: &str) -> Result<FocusState, FocusError> {
    state.toggle(g, node)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisibilityMode {
    AllNormal,
    Partitioned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibilityClassification {
    pub highlighted_nodes: BTreeSet<String>,
    pub highlighted_edges: BTreeSet<String>,
    pub dimmed_nodes: BTreeSet<String>,
    pub dimmed_edges: BTreeSet<String>,
    pub mode: VisibilityMode,
}

impl VisibilityClassification {
    pub fn all_normal() -> Self {
        Self {
            highlighted_nodes: BTreeSet::new(),
            highlighted_edges: BTreeSet::new(),
            dimmed_nodes: BTreeSet::new(),
            dimmed_edges: BTreeSet::new(),
            mode: VisibilityMode::AllNormal,
        }
    }
}

/// Splits the graph into highlighted and dimmed elements.
///
/// Each focused node highlights itself, its outgoing edges and their targets;
/// with `include_incoming` also its incoming edges and their sources. An empty
/// focus leaves everything at normal visibility.
pub fn classify(
    g: &VisualGraph,
    state: &FocusState,
    include_incoming: bool,
) -> Result<VisibilityClassification, FocusError> {
    if let Some(missing) = state.focused.iter().find(|f| !g.contains_node(f)) {
        return Err(FocusError::UnknownNode(missing.clone()));
    }
    if state.is_empty() {
        return Ok(VisibilityClassification::all_normal());
    }
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for f in &state.focused {
        nodes.insert(f.clone());
        for e in g.outgoing(f) {
            edges.insert(e.id.clone());
            nodes.insert(e.target.clone());
        }
        if include_incoming {
            for e in g.incoming(f) {
                edges.insert(e.id.clone());
                nodes.insert(e.source.clone());
            }
        }
    }
    let dimmed_nodes = g
        .nodes
        .iter()
        .filter(|n| !nodes.contains(&n.id))
        .map(|n| n.id.clone())
        .collect();
    let dimmed_edges = g
        .edges
        .iter()
        .filter(|e| !edges.contains(&e.id))
        .map(|e| e.id.clone())
        .collect();
    Ok(VisibilityClassification {
        highlighted_nodes: nodes,
        highlighted_edges: edges,
        dimmed_nodes,
        dimmed_edges,
        mode: VisibilityMode::Partitioned,
    })
}

/// Induced subgraph on `node` and its in- and out-neighbours, keeping the
/// original order of nodes and edges.
pub fn collapse_neighbourhood(g: &VisualGraph, node: &str) -> Result<VisualGraph, FocusError> {
    if !g.contains_node(node) {
        return Err(FocusError::UnknownNode(node.to_string()));
    }
    let mut keep: BTreeSet<&str> = BTreeSet::new();
    keep.insert(node);
    for e in &g.edges {
        if e.source == node {
            keep.insert(&e.target);
        }
        if e.target == node {
            keep.insert(&e.source);
        }
    }
    Ok(VisualGraph {
        nodes: g.nodes.iter().filter(|n| keep.contains(n.id.as_str())).cloned().collect(),
        edges: g
            .edges
            .iter()
            .filter(|e| keep.contains(e.source.as_str()) && keep.contains(e.target.as_str()))
            .cloned()
            .collect(),
    })
}
