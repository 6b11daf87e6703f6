use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Prefix declarations collected from `PREFIX` and `BASE` directives.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixTable {
    pub mappings: BTreeMap<String, String>,
    pub base: Option<String>,
}

impl PrefixTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style insertion, mostly useful in tests.
    pub fn with(mut self, prefix: &str, iri: &str) -> Self {
        self.mappings.insert(prefix.to_string(), iri.to_string());
        self
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.mappings.get(prefix).map(String::as_str)
    }
}

/// An IRI as it appeared in the source together with its expanded form.
///
/// Equality and ordering consider both, so two spellings of the same IRI are
/// different terms; use [`Iri::expanded`] when resolving references.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Iri {
    pub written: String,
    pub expanded: String,
}

impl Iri {
    pub fn new(written: impl Into<String>, expanded: impl Into<String>) -> Self {
        Self {
            written: written.into(),
            expanded: expanded.into(),
        }
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.written)
    }
}

/// 1-based source location.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShExSchema {
    pub prefixes: PrefixTable,
    pub shapes: Vec<ShapeDecl>,
}

impl ShExSchema {
    pub fn shape(&self, expanded: &str) -> Option<&ShapeDecl> {
        self.shapes.iter().find(|s| s.label.expanded == expanded)
    }

    /// Reference targets (written form, first occurrence order) that do not
    /// resolve to a declared shape.
    pub fn external_targets(&self) -> Vec<Iri> {
        let mut out: Vec<Iri> = Vec::new();
        for decl in &self.shapes {
            decl.expr.visit_refs(&mut |target| {
                if self.shape(&target.expanded).is_none()
                    && !out.iter().any(|t| t.expanded == target.expanded)
                {
                    out.push(target.clone());
                }
            });
        }
        out
    }

    /// Count of triple constraints whose value is a shape reference, nested
    /// bodies included.
    pub fn shape_reference_count(&self) -> usize {
        let mut n = 0;
        for decl in &self.shapes {
            decl.expr.visit_triple_constraints(&mut |tc| {
                if tc.value.ref_target.is_some() {
                    n += 1;
                }
            });
        }
        n
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeDecl {
    pub label: Iri,
    pub expr: ShapeExpr,
    /// Where the label started. Not part of structural identity.
    #[serde(skip)]
    pub position: Position,
}

impl ShapeDecl {
    pub fn structurally_eq(&self, other: &ShapeDecl) -> bool {
        self.label == other.label && self.expr == other.expr
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Iri,
    BNode,
    Literal,
    NonLiteral,
}

impl NodeKind {
    pub fn keyword(self) -> &'static str {
        match self {
            NodeKind::Iri => "IRI",
            NodeKind::BNode => "BNODE",
            NodeKind::Literal => "LITERAL",
            NodeKind::NonLiteral => "NONLITERAL",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word.to_ascii_uppercase().as_str() {
            "IRI" => Some(NodeKind::Iri),
            "BNODE" => Some(NodeKind::BNode),
            "LITERAL" => Some(NodeKind::Literal),
            "NONLITERAL" => Some(NodeKind::NonLiteral),
            _ => None,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeExpr {
    Shape(Shape),
    And(Vec<ShapeExpr>),
    Or(Vec<ShapeExpr>),
    Not(Box<ShapeExpr>),
    Ref(Iri),
    /// Datatype, value set or `.` used directly as a shape expression.
    NodeConstraintOnly(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub triple_expr: Option<TripleExpr>,
    pub extra: Vec<Iri>,
    pub closed: bool,
    pub node_kind: Option<NodeKind>,
    /// `true` when the shape had a `{ ... }` body, even an empty one.
    pub has_body: bool,
}

impl ShapeExpr {
    pub fn visit_refs(&self, f: &mut impl FnMut(&Iri)) {
        match self {
            ShapeExpr::Shape(shape) => {
                if let Some(te) = &shape.triple_expr {
                    te.visit_triple_constraints(&mut |tc| {
                        if let Some(target) = &tc.value.ref_target {
                            f(target)
                        }
                    });
                }
            }
            ShapeExpr::And(ops) | ShapeExpr::Or(ops) => {
                ops.iter().for_each(|op| op.visit_refs(f));
            }
            ShapeExpr::Not(inner) => inner.visit_refs(f),
            ShapeExpr::Ref(target) => f(target),
            ShapeExpr::NodeConstraintOnly(_) => {}
        }
    }

    pub fn visit_triple_constraints(&self, f: &mut impl FnMut(&TripleConstraint)) {
        match self {
            ShapeExpr::Shape(shape) => {
                if let Some(te) = &shape.triple_expr {
                    te.visit_triple_constraints(f);
                }
            }
            ShapeExpr::And(ops) | ShapeExpr::Or(ops) => {
                ops.iter().for_each(|op| op.visit_triple_constraints(f));
            }
            ShapeExpr::Not(inner) => inner.visit_triple_constraints(f),
            ShapeExpr::Ref(_) | ShapeExpr::NodeConstraintOnly(_) => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TripleExpr {
    TripleConstraint(TripleConstraint),
    EachOf(Vec<TripleExpr>),
    OneOf(Vec<TripleExpr>),
    Labelled { name: String, inner: Box<TripleExpr> },
}

impl TripleExpr {
    pub fn visit_triple_constraints(&self, f: &mut impl FnMut(&TripleConstraint)) {
        match self {
            TripleExpr::TripleConstraint(tc) => f(tc),
            TripleExpr::EachOf(items) | TripleExpr::OneOf(items) => {
                items.iter().for_each(|i| i.visit_triple_constraints(f));
            }
            TripleExpr::Labelled { inner, .. } => inner.visit_triple_constraints(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleConstraint {
    pub predicate: Iri,
    pub value: ValueExprText,
    pub cardinality: Cardinality,
}

/// Value expression kept as normalized source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueExprText {
    pub raw: String,
    pub ref_target: Option<Iri>,
}

impl ValueExprText {
    pub fn plain(raw: impl Into<String>) -> Self {
        Self {
            raw: raw.into(),
            ref_target: None,
        }
    }

    pub fn reference(target: Iri) -> Self {
        Self {
            raw: format!("@{}", target.written),
            ref_target: Some(target),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cardinality {
    pub min: u32,
    /// `None` is unbounded.
    pub max: Option<u32>,
}

impl Cardinality {
    pub const ONE: Cardinality = Cardinality { min: 1, max: Some(1) };
    pub const OPTIONAL: Cardinality = Cardinality { min: 0, max: Some(1) };
    pub const STAR: Cardinality = Cardinality { min: 0, max: None };
    pub const PLUS: Cardinality = Cardinality { min: 1, max: None };

    pub fn new(min: u32, max: Option<u32>) -> Option<Self> {
        match max {
            Some(max) if max < min => None,
            _ => Some(Self { min, max }),
        }
    }
}

impl Default for Cardinality {
    fn default() -> Self {
        Self::ONE
    }
}

/// Renders a cardinality the way ShExC writes it; the default `{1,1}` is
/// implicit and renders empty.
pub fn format_cardinality(c: Cardinality) -> String {
    match (c.min, c.max) {
        (1, Some(1)) => String::new(),
        (0, Some(1)) => "?".to_string(),
        (0, None) => "*".to_string(),
        (1, None) => "+".to_string(),
        (min, None) => format!("{{{min},}}"),
        (min, Some(max)) => format!("{{{min},{max}}}"),
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_cardinality(*self))
    }
}
