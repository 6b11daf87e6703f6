//! Mermaid `classDiagram` emitter.
//!
//! Mermaid rejects most of the punctuation that appears in ShEx terms
//! (`:User`, `<http://...>`), so every identifier is rewritten to
//! `[A-Za-z0-9_]` and the pairs are kept in a [`SanitizationMap`] from which a
//! viewer restores the original labels after rendering. The dialect targeted
//! is the Mermaid v10 class-diagram grammar.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::schema_graph::{EdgeSymbol, VisualGraph};

pub const HEADER: &str = "classDiagram";

/// Characters rewritten inside class member rows.
const ROW_FORBIDDEN: &[char] = &['{', '}', '<', '>', '"', '%', '#', '~', '`', ':', ';'];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SanitizeError {
    #[error("cannot sanitize an empty identifier")]
    Empty,
    #[error("malformed mapping line {line}: {reason}")]
    MalformedMapping { line: usize, reason: String },
}

/// Bijective original ↔ safe-id table built up during one emission.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SanitizationMap {
    forward: BTreeMap<String, String>,
    reverse: BTreeMap<String, String>,
}

impl SanitizationMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn safe_id(&self, original: &str) -> Option<&str> {
        self.forward.get(original).map(String::as_str)
    }

    pub fn original(&self, safe: &str) -> Option<&str> {
        self.reverse.get(safe).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Pairs as `(safe, original)` in safe-id order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.reverse.iter().map(|(s, o)| (s.as_str(), o.as_str()))
    }

    fn register(&mut self, original: &str, base: String) -> String {
        let mut candidate = base.clone();
        let mut n = 2;
        while self.reverse.contains_key(&candidate) {
            candidate = format!("{base}_{n}");
            n += 1;
        }
        self.forward.insert(original.to_string(), candidate.clone());
        self.reverse.insert(candidate.clone(), original.to_string());
        candidate
    }

    /// Two-column tab-separated document: a `safe\toriginal` header followed
    /// by one pair per line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("safe\toriginal\n");
        for (safe, original) in self.pairs() {
            let _ = writeln!(out, "{safe}\t{original}");
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, SanitizeError> {
        let mut map = SanitizationMap::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 && line == "safe\toriginal" {
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (safe, original) = line.split_once('\t').ok_or_else(|| SanitizeError::MalformedMapping {
                line: i + 1,
                reason: "expected two tab-separated columns".into(),
            })?;
            if map.reverse.contains_key(safe) || map.forward.contains_key(original) {
                return Err(SanitizeError::MalformedMapping {
                    line: i + 1,
                    reason: "mapping is not one-to-one".into(),
                });
            }
            map.forward.insert(original.to_string(), safe.to_string());
            map.reverse.insert(safe.to_string(), original.to_string());
        }
        Ok(map)
    }
}

/// Returns the Mermaid-safe form of `id`, registering it in `map`.
///
/// Characters outside `[A-Za-z0-9_]` become `_`, a leading digit gets an `x`
/// prefix, and a result already taken by a different original gets `_2`,
/// `_3`, ... appended. Repeated calls with the same id return the same value.
pub fn sanitize_identifier(id: &str, map: &mut SanitizationMap) -> Result<String, SanitizeError> {
    if id.is_empty() {
        return Err(SanitizeError::Empty);
    }
    if let Some(existing) = map.forward.get(id) {
        return Ok(existing.clone());
    }
    let mut base: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if base.starts_with(|c: char| c.is_ascii_digit()) {
        base.insert(0, 'x');
    }
    Ok(map.register(id, base))
}

/// Rewrites a class-member row only if it contains characters the dialect
/// cannot carry; such rows are registered in `map` like identifiers.
fn sanitize_row(row: &str, map: &mut SanitizationMap) -> String {
    if !row.contains(ROW_FORBIDDEN) {
        return row.to_string();
    }
    if let Some(existing) = map.forward.get(row) {
        return existing.clone();
    }
    let base: String = row
        .chars()
        .map(|c| if ROW_FORBIDDEN.contains(&c) { '_' } else { c })
        .collect();
    map.register(row, base)
}

/// Replaces each safe id with its original; unknown ids pass through.
pub fn restore_labels(rendered_labels: &[String], map: &SanitizationMap) -> Vec<String> {
    rendered_labels
        .iter()
        .map(|l| map.original(l).unwrap_or(l).to_string())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramText {
    pub text: String,
    pub map: SanitizationMap,
}

pub fn arrow(symbol: EdgeSymbol) -> &'static str {
    match symbol {
        EdgeSymbol::DirectedArrow => "-->",
        EdgeSymbol::DiamondArrow => "*--",
        EdgeSymbol::DashedLine => "..>",
    }
}

/// Emits `g` as class-diagram text: one class per node (members are the
/// constraint rows), then one relation per edge, both in graph order.
pub fn emit_classdiagram(g: &VisualGraph) -> DiagramText {
    let mut map = SanitizationMap::new();
    let mut text = String::from(HEADER);
    text.push('\n');

    for node in &g.nodes {
        // Node ids are never empty; the graph builder derives them from labels.
        let name = sanitize_identifier(&node.id, &mut map).expect("node id is non-empty");
        if node.rows.is_empty() {
            let _ = writeln!(text, "    class {name}");
            continue;
        }
        let _ = writeln!(text, "    class {name} {{");
        for row in &node.rows {
            let _ = writeln!(text, "        {}", sanitize_row(&row.text, &mut map));
        }
        text.push_str("    }\n");
    }

    for edge in &g.edges {
        let source = sanitize_identifier(&edge.source, &mut map).expect("edge endpoint is non-empty");
        let target = sanitize_identifier(&edge.target, &mut map).expect("edge endpoint is non-empty");
        // Compositional labels are fixed words the dialect accepts as-is.
        let mut label = if edge.label.is_empty() || edge.relation_kind.is_compositional() {
            edge.label.clone()
        } else {
            sanitize_identifier(&edge.label, &mut map).expect("label is non-empty")
        };
        if !edge.cardinality_label.is_empty() {
            if !label.is_empty() {
                label.push(' ');
            }
            label.push_str(&edge.cardinality_label);
        }
        if label.is_empty() {
            let _ = writeln!(text, "    {source} {} {target}", arrow(edge.symbol));
        } else {
            let _ = writeln!(text, "    {source} {} {target} : {label}", arrow(edge.symbol));
        }
    }

    DiagramText { text, map }
}

/// Reader for the subset of the class-diagram dialect this module emits.
pub mod reader {
    use super::HEADER;

    #[derive(Debug, Clone, Default, PartialEq, Eq)]
    pub struct ParsedDiagram {
        pub classes: Vec<ParsedClass>,
        pub relations: Vec<ParsedRelation>,
    }

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct ParsedClass {
        pub name: String,
        pub members: Vec<String>,
    }

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct ParsedRelation {
        pub source: String,
        pub arrow: String,
        pub target: String,
        pub label: Option<String>,
    }

    pub fn read(text: &str) -> Result<ParsedDiagram, String> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim() == HEADER => {}
            _ => return Err("missing classDiagram header".into()),
        }
        let mut out = ParsedDiagram::default();
        let mut open: Option<ParsedClass> = None;
        for (i, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(class) = open.as_mut() {
                if line == "}" {
                    out.classes.push(open.take().unwrap());
                } else {
                    class.members.push(line.to_string());
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("class ") {
                match rest.strip_suffix('{') {
                    Some(name) => {
                        open = Some(ParsedClass {
                            name: name.trim().to_string(),
                            members: Vec::new(),
                        })
                    }
                    None => out.classes.push(ParsedClass {
                        name: rest.trim().to_string(),
                        members: Vec::new(),
                    }),
                }
                continue;
            }
            let (rel, label) = match line.split_once(" : ") {
                Some((r, l)) => (r, Some(l.to_string())),
                None => (line, None),
            };
            let parts: Vec<&str> = rel.split_whitespace().collect();
            match parts.as_slice() {
                [s, a, t] if ["-->", "*--", "..>"].contains(a) => out.relations.push(ParsedRelation {
                    source: s.to_string(),
                    arrow: a.to_string(),
                    target: t.to_string(),
                    label,
                }),
                _ => return Err(format!("line {}: unrecognized statement '{line}'", i + 1)),
            }
        }
        if open.is_some() {
            return Err("unterminated class block".into());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema_graph::build_graph;
    use crate::shexc::parse_schema;

    const HEAD: &str = "PREFIX : <http://ex.org/>\nPREFIX schema: <http://schema.org/>\nPREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n";

    fn emit(body: &str) -> DiagramText {
        emit_classdiagram(&build_graph(&parse_schema(&format!("{HEAD}{body}")).unwrap()))
    }

    #[test]
    fn sanitize_examples() {
        let mut map = SanitizationMap::new();
        assert_eq!(sanitize_identifier(":User", &mut map).unwrap(), "_User");
        assert_eq!(sanitize_identifier("A", &mut map).unwrap(), "A");
        assert_eq!(sanitize_identifier(":User", &mut map).unwrap(), "_User");
        assert_eq!(sanitize_identifier("9lives", &mut map).unwrap(), "x9lives");
        assert_eq!(sanitize_identifier("", &mut map), Err(SanitizeError::Empty));
    }

    #[test]
    fn collisions_get_suffixes() {
        let mut map = SanitizationMap::new();
        assert_eq!(sanitize_identifier(":User", &mut map).unwrap(), "_User");
        assert_eq!(sanitize_identifier("_User", &mut map).unwrap(), "_User_2");
        assert_eq!(sanitize_identifier("-User", &mut map).unwrap(), "_User_3");
        let restored = restore_labels(&["_User".into(), "_User_2".into(), "_User_3".into()], &map);
        assert_eq!(restored, [":User", "_User", "-User"]);
    }

    #[test]
    fn restore_pass_through() {
        let mut map = SanitizationMap::new();
        sanitize_identifier(":User", &mut map).unwrap();
        assert_eq!(restore_labels(&["_User".into()], &map), [":User"]);
        assert!(restore_labels(&[], &map).is_empty());
        assert_eq!(restore_labels(&["unknown".into()], &map), ["unknown"]);
    }

    #[test]
    fn shape_ref_relation() {
        let d = emit(":User { schema:worksFor @:Company ; }\n:Company {}");
        assert!(d.text.starts_with("classDiagram\n"));
        assert!(d.text.contains("_User --> _Company : schema_worksFor"), "{}", d.text);
        assert_eq!(d.map.original("schema_worksFor"), Some("schema:worksFor"));
    }

    #[test]
    fn empty_graph_is_header_only() {
        let d = emit_classdiagram(&VisualGraph::default());
        assert_eq!(d.text, "classDiagram\n");
        assert!(d.map.is_empty());
    }

    #[test]
    fn not_uses_dashed_arrow() {
        let d = emit(":NoName Not { schema:name . }");
        assert!(d.text.contains("_NoName ..> _NoName_NOT_0 : NOT"), "{}", d.text);
    }

    #[test]
    fn rows_keep_cardinality_and_sanitize_braces() {
        let d = emit(":User { :name xsd:string ? ; :tag xsd:string {2,5} }");
        let parsed = reader::read(&d.text).unwrap();
        let members = &parsed.classes[0].members;
        assert!(members[0].ends_with(" ?"));
        assert!(!members[1].contains('{'));
        let restored = restore_labels(members, &d.map);
        assert_eq!(restored, [":name xsd:string ?", ":tag xsd:string {2,5}"]);
    }

    #[test]
    fn edge_cardinality_after_label() {
        let d = emit(":A { :p @:B * }\n:B {}");
        assert!(d.text.contains("_A --> _B : _p *"), "{}", d.text);
    }

    #[test]
    fn tsv_round_trip() {
        let d = emit(":User { schema:worksFor @:Company ; }");
        let back = SanitizationMap::from_tsv(&d.map.to_tsv()).unwrap();
        assert_eq!(back, d.map);
        assert!(SanitizationMap::from_tsv("a\tb\na\tc\n").is_err());
        assert!(SanitizationMap::from_tsv("no tab here\n").is_err());
    }

    #[test]
    fn reader_counts_match_graph() {
        let src = ":User { schema:name xsd:string } AND { schema:age xsd:integer ; :x @:User }";
        let g = build_graph(&parse_schema(&format!("{HEAD}{src}")).unwrap());
        let d = emit_classdiagram(&g);
        let parsed = reader::read(&d.text).unwrap();
        assert_eq!(parsed.classes.len(), g.nodes.len());
        assert_eq!(parsed.relations.len(), g.edges.len());
    }
}
