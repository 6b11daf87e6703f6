//! Notation-level model of a schema.
//!
//! Shapes become boxes whose rows hold within-node constraints. References
//! become directed arrows, `AND`/`OR`/`OneOf` become diamond arrows to the
//! operand bodies, and `NOT`/labelled groups become dashed lines. Operand
//! bodies have no name in the source, so they get synthetic nodes with ids
//! derived from their owner (see [`synth_node_id`]).

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::shexc::{format_cardinality, Iri, NodeKind, ShExSchema, ShapeExpr, TripleExpr};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisualGraph {
    pub nodes: Vec<VisualNode>,
    pub edges: Vec<VisualEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisualNode {
    pub id: String,
    pub display_label: String,
    pub rows: Vec<ConstraintRow>,
    pub synthetic: bool,
    /// Referenced but never declared in the schema.
    pub external: bool,
    pub closed: bool,
    pub node_kind: Option<NodeKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintRow {
    pub text: String,
    pub kind: RowKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    TripleConstraint,
    NodeKind,
    Extra,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisualEdge {
    pub id: String,
    pub source: String,
    pub target: String,
    pub label: String,
    pub cardinality_label: String,
    pub symbol: EdgeSymbol,
    pub relation_kind: RelationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeSymbol {
    DirectedArrow,
    DiamondArrow,
    DashedLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Ref,
    And,
    Or,
    OneOf,
    Not,
    Labelled,
}

impl RelationKind {
    pub const ALL: [RelationKind; 6] = [
        RelationKind::Ref,
        RelationKind::And,
        RelationKind::Or,
        RelationKind::OneOf,
        RelationKind::Not,
        RelationKind::Labelled,
    ];

    pub fn symbol(self) -> EdgeSymbol {
        match self {
            RelationKind::Ref => EdgeSymbol::DirectedArrow,
            RelationKind::And | RelationKind::Or | RelationKind::OneOf => EdgeSymbol::DiamondArrow,
            RelationKind::Not | RelationKind::Labelled => EdgeSymbol::DashedLine,
        }
    }

    /// Everything except plain references expresses composition.
    pub fn is_compositional(self) -> bool {
        self != RelationKind::Ref
    }

    /// Tag used inside synthetic node ids.
    pub fn tag(self) -> &'static str {
        match self {
            RelationKind::Ref => "REF",
            RelationKind::And => "AND",
            RelationKind::Or => "OR",
            RelationKind::OneOf => "ONEOF",
            RelationKind::Not => "NOT",
            RelationKind::Labelled => "LABELLED",
        }
    }

    /// Text drawn on compositional edges.
    pub fn edge_label(self) -> &'static str {
        match self {
            RelationKind::Ref => "",
            RelationKind::And => "AND",
            RelationKind::Or => "OR",
            RelationKind::OneOf => "OneOf",
            RelationKind::Not => "NOT",
            RelationKind::Labelled => "Composed of",
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Deterministic id for the `index`-th synthetic child of `parent_label`
/// created for relation `kind`, e.g. `:User/AND_0`.
pub fn synth_node_id(parent_label: &str, kind: RelationKind, index: usize) -> String {
    format!("{parent_label}/{}_{index}", kind.tag())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("duplicate node id {0}")]
    DuplicateNode(String),
    #[error("edge {edge} references missing node {node}")]
    DanglingEdge { edge: String, node: String },
    #[error("duplicate edge id {0}")]
    DuplicateEdge(String),
}

impl VisualGraph {
    pub fn node(&self, id: &str) -> Option<&VisualNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.node(id).is_some()
    }

    pub fn outgoing<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a VisualEdge> + 'a {
        self.edges.iter().filter(move |e| e.source == id)
    }

    pub fn incoming<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a VisualEdge> + 'a {
        self.edges.iter().filter(move |e| e.target == id)
    }

    pub fn declared_nodes(&self) -> impl Iterator<Item = &VisualNode> {
        self.nodes.iter().filter(|n| !n.synthetic && !n.external)
    }

    pub fn edges_with(&self, symbol: EdgeSymbol) -> usize {
        self.edges.iter().filter(|e| e.symbol == symbol).count()
    }

    /// Checks id uniqueness and that every edge endpoint exists.
    pub fn validate(&self) -> Result<(), GraphError> {
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(GraphError::DuplicateNode(n.id.clone()));
            }
        }
        let mut edge_ids = BTreeSet::new();
        for e in &self.edges {
            if !edge_ids.insert(e.id.as_str()) {
                return Err(GraphError::DuplicateEdge(e.id.clone()));
            }
            for end in [&e.source, &e.target] {
                if !ids.contains(end.as_str()) {
                    return Err(GraphError::DanglingEdge {
                        edge: e.id.clone(),
                        node: end.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Compiles a parsed schema into its visual model.
pub fn build_graph(schema: &ShExSchema) -> VisualGraph {
    let mut b = Builder {
        schema,
        graph: VisualGraph::default(),
        by_iri: HashMap::new(),
        node_index: HashMap::new(),
        counters: HashMap::new(),
    };
    for decl in &schema.shapes {
        b.by_iri
            .insert(decl.label.expanded.clone(), decl.label.written.clone());
        b.push_node(VisualNode {
            id: decl.label.written.clone(),
            display_label: decl.label.written.clone(),
            rows: Vec::new(),
            synthetic: false,
            external: false,
            closed: false,
            node_kind: None,
        });
    }
    for decl in &schema.shapes {
        b.shape_expr(&decl.label.written, &decl.expr);
    }
    b.graph
}

struct Builder<'a> {
    schema: &'a ShExSchema,
    graph: VisualGraph,
    /// Expanded IRI → node id for declared and external shapes.
    by_iri: HashMap<String, String>,
    node_index: HashMap<String, usize>,
    counters: HashMap<(String, RelationKind), usize>,
}

impl Builder<'_> {
    fn push_node(&mut self, node: VisualNode) {
        self.node_index.insert(node.id.clone(), self.graph.nodes.len());
        self.graph.nodes.push(node);
    }

    fn node_mut(&mut self, id: &str) -> &mut VisualNode {
        let idx = self.node_index[id];
        &mut self.graph.nodes[idx]
    }

    fn add_row(&mut self, owner: &str, text: String, kind: RowKind) {
        self.node_mut(owner).rows.push(ConstraintRow { text, kind });
    }

    fn add_edge(&mut self, source: &str, target: &str, kind: RelationKind, label: String, cardinality_label: String) {
        let id = format!("e{}", self.graph.edges.len());
        self.graph.edges.push(VisualEdge {
            id,
            source: source.to_string(),
            target: target.to_string(),
            label,
            cardinality_label,
            symbol: kind.symbol(),
            relation_kind: kind,
        });
    }

    /// Node id for a reference target, creating an external node on first use.
    fn resolve(&mut self, target: &Iri) -> String {
        if let Some(id) = self.by_iri.get(&target.expanded) {
            return id.clone();
        }
        debug_assert!(self.schema.shape(&target.expanded).is_none());
        let id = target.written.clone();
        self.by_iri.insert(target.expanded.clone(), id.clone());
        self.push_node(VisualNode {
            id: id.clone(),
            display_label: id.clone(),
            rows: Vec::new(),
            synthetic: false,
            external: true,
            closed: false,
            node_kind: None,
        });
        id
    }

    fn synthetic_child(&mut self, owner: &str, kind: RelationKind, display: Option<String>) -> String {
        let counter = self.counters.entry((owner.to_string(), kind)).or_insert(0);
        let id = synth_node_id(owner, kind, *counter);
        *counter += 1;
        self.push_node(VisualNode {
            display_label: display.unwrap_or_else(|| id.clone()),
            id: id.clone(),
            rows: Vec::new(),
            synthetic: true,
            external: false,
            closed: false,
            node_kind: None,
        });
        self.add_edge(owner, &id, kind, kind.edge_label().to_string(), String::new());
        id
    }

    fn shape_expr(&mut self, owner: &str, expr: &ShapeExpr) {
        match expr {
            ShapeExpr::Shape(shape) => {
                if let Some(kind) = shape.node_kind {
                    self.node_mut(owner).node_kind = Some(kind);
                    self.add_row(owner, format!("nodeKind: {kind}"), RowKind::NodeKind);
                }
                if !shape.extra.is_empty() {
                    let preds: Vec<&str> = shape.extra.iter().map(|p| p.written.as_str()).collect();
                    self.add_row(owner, format!("EXTRA {}", preds.join(" ")), RowKind::Extra);
                }
                if shape.closed {
                    self.node_mut(owner).closed = true;
                    self.add_row(owner, "CLOSED".to_string(), RowKind::Closed);
                }
                if let Some(te) = &shape.triple_expr {
                    self.triple_expr(owner, te);
                }
            }
            ShapeExpr::And(ops) => ops.iter().for_each(|op| self.operand(owner, RelationKind::And, op)),
            ShapeExpr::Or(ops) => ops.iter().for_each(|op| self.operand(owner, RelationKind::Or, op)),
            ShapeExpr::Not(inner) => self.operand(owner, RelationKind::Not, inner),
            // A bare alias or node constraint has no box of its own to point
            // from, so it is listed textually.
            ShapeExpr::Ref(target) => {
                self.add_row(owner, format!("@{}", target.written), RowKind::NodeKind)
            }
            ShapeExpr::NodeConstraintOnly(text) => self.add_row(owner, text.clone(), RowKind::NodeKind),
        }
    }

    fn operand(&mut self, owner: &str, kind: RelationKind, op: &ShapeExpr) {
        if let ShapeExpr::Ref(target) = op {
            let target = self.resolve(target);
            self.add_edge(owner, &target, kind, kind.edge_label().to_string(), String::new());
            return;
        }
        let child = self.synthetic_child(owner, kind, None);
        self.shape_expr(&child, op);
    }

    fn triple_expr(&mut self, owner: &str, te: &TripleExpr) {
        match te {
            TripleExpr::TripleConstraint(tc) => {
                let card = format_cardinality(tc.cardinality);
                match &tc.value.ref_target {
                    Some(target) => {
                        let target = self.resolve(target);
                        self.add_edge(owner, &target, RelationKind::Ref, tc.predicate.written.clone(), card);
                    }
                    None => {
                        let mut text = format!("{} {}", tc.predicate.written, tc.value.raw);
                        if !card.is_empty() {
                            text.push(' ');
                            text.push_str(&card);
                        }
                        self.add_row(owner, text, RowKind::TripleConstraint);
                    }
                }
            }
            TripleExpr::EachOf(items) => items.iter().for_each(|i| self.triple_expr(owner, i)),
            TripleExpr::OneOf(alts) => {
                for alt in alts {
                    let child = self.synthetic_child(owner, RelationKind::OneOf, None);
                    self.triple_expr(&child, alt);
                }
            }
            TripleExpr::Labelled { name, inner } => {
                let child = self.synthetic_child(owner, RelationKind::Labelled, Some(name.clone()));
                self.triple_expr(&child, inner);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shexc::parse_schema;

    const HEAD: &str = "PREFIX : <http://ex.org/>\nPREFIX schema: <http://schema.org/>\nPREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n";

    fn graph(body: &str) -> VisualGraph {
        let g = build_graph(&parse_schema(&format!("{HEAD}{body}")).unwrap());
        g.validate().unwrap();
        g
    }

    #[test]
    fn synth_ids() {
        assert_eq!(synth_node_id(":User", RelationKind::And, 0), ":User/AND_0");
        assert_eq!(
            synth_node_id(":User", RelationKind::And, 0),
            synth_node_id(":User", RelationKind::And, 0)
        );
        assert_eq!(synth_node_id(":User", RelationKind::OneOf, 1), ":User/ONEOF_1");
    }

    #[test]
    fn symbol_table() {
        use EdgeSymbol::*;
        let expected = [DirectedArrow, DiamondArrow, DiamondArrow, DiamondArrow, DashedLine, DashedLine];
        for (kind, sym) in RelationKind::ALL.iter().zip(expected) {
            assert_eq!(kind.symbol(), sym);
        }
    }

    #[test]
    fn shape_ref_becomes_directed_arrow() {
        let g = graph(":User { schema:worksFor @:Company ; }\n:Company {}");
        let ids: Vec<&str> = g.nodes.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, [":User", ":Company"]);
        assert_eq!(g.edges.len(), 1);
        let e = &g.edges[0];
        assert_eq!((e.source.as_str(), e.target.as_str()), (":User", ":Company"));
        assert_eq!(e.label, "schema:worksFor");
        assert_eq!(e.symbol, EdgeSymbol::DirectedArrow);
        assert!(g.nodes[0].rows.is_empty());
    }

    #[test]
    fn undeclared_reference_creates_external_node() {
        let g = graph(":User { schema:worksFor @:Company * }");
        let company = g.node(":Company").unwrap();
        assert!(company.external && !company.synthetic && company.rows.is_empty());
        assert_eq!(g.edges[0].cardinality_label, "*");
    }

    #[test]
    fn not_body_is_synthetic_dashed() {
        let g = graph(":NoName Not { schema:name . }");
        assert_eq!(g.nodes.len(), 2);
        let syn = &g.nodes[1];
        assert_eq!(syn.id, ":NoName/NOT_0");
        assert!(syn.synthetic);
        assert_eq!(syn.rows, vec![ConstraintRow { text: "schema:name .".into(), kind: RowKind::TripleConstraint }]);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].symbol, EdgeSymbol::DashedLine);
        assert_eq!(g.edges[0].label, "NOT");
    }

    #[test]
    fn and_or_operands() {
        let g = graph(":User { schema:name xsd:string } AND { schema:age xsd:integer }");
        assert_eq!(g.nodes.len(), 3);
        assert_eq!(g.nodes[1].id, ":User/AND_0");
        assert_eq!(g.nodes[2].rows[0].text, "schema:age xsd:integer");
        assert!(g.edges.iter().all(|e| e.symbol == EdgeSymbol::DiamondArrow && e.label == "AND"));

        let g = graph(":User { schema:name xsd:string } OR @:Other\n:Other {}");
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.edges[1].target, ":Other");
        assert_eq!(g.edges[1].label, "OR");
        assert_eq!(g.nodes.iter().filter(|n| n.synthetic).count(), 1);
    }

    #[test]
    fn one_of_alternatives() {
        let g = graph(":User { :name xsd:string; | ( :givenName xsd:string +; :familyName xsd:string; ); }");
        let syn: Vec<&VisualNode> = g.nodes.iter().filter(|n| n.synthetic).collect();
        assert_eq!(syn.len(), 2);
        assert_eq!(syn[0].id, ":User/ONEOF_0");
        assert_eq!(syn[0].rows.len(), 1);
        assert_eq!(syn[1].rows[0].text, ":givenName xsd:string +");
        assert_eq!(syn[1].rows.len(), 2);
        assert!(g.edges.iter().all(|e| e.label == "OneOf" && e.symbol == EdgeSymbol::DiamondArrow));
    }

    #[test]
    fn labelled_group_composed_of() {
        let g = graph(":User { $:name ( :name .; :email IRI; ) }");
        let syn = &g.nodes[1];
        assert_eq!(syn.display_label, ":name");
        assert_eq!(syn.id, ":User/LABELLED_0");
        assert_eq!(syn.rows.len(), 2);
        assert_eq!(g.edges[0].label, "Composed of");
        assert_eq!(g.edges[0].symbol, EdgeSymbol::DashedLine);
    }

    #[test]
    fn modifiers_become_rows() {
        let g = graph(":HomePage IRI\n:User EXTRA schema:name CLOSED { schema:name xsd:string ; }");
        assert_eq!(g.nodes[0].rows[0].text, "nodeKind: IRI");
        assert_eq!(g.nodes[0].node_kind, Some(NodeKind::Iri));
        let kinds: Vec<RowKind> = g.nodes[1].rows.iter().map(|r| r.kind).collect();
        assert_eq!(kinds, [RowKind::Extra, RowKind::Closed, RowKind::TripleConstraint]);
        assert!(g.nodes[1].closed);
    }

    #[test]
    fn self_reference_is_self_loop() {
        let g = graph(":A { :p @:A }");
        assert_eq!(g.edges[0].source, g.edges[0].target);
    }

    #[test]
    fn nested_refs_inside_one_of_are_counted() {
        let s = parse_schema(&format!("{HEAD}:A {{ :p @:B | (:q @:C ; :r @:B) }} AND {{ :s @:A }}\n:B {{}}\n:C {{}}")).unwrap();
        let g = build_graph(&s);
        g.validate().unwrap();
        assert_eq!(g.edges_with(EdgeSymbol::DirectedArrow), s.shape_reference_count());
        assert_eq!(s.shape_reference_count(), 4);
        // The OneOf sits inside the first AND operand.
        assert!(g.node(":A/AND_0/ONEOF_1").is_some());
    }
}
