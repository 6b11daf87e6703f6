//! ShExC pretty printer for the supported subset. Output re-parses to a
//! structurally identical schema.

use std::fmt::{self, Write};

use super::ast::*;

impl fmt::Display for ShExSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(base) = &self.prefixes.base {
            writeln!(f, "BASE <{base}>")?;
        }
        for (prefix, iri) in &self.prefixes.mappings {
            writeln!(f, "PREFIX {prefix}: <{iri}>")?;
        }
        if !self.prefixes.mappings.is_empty() || self.prefixes.base.is_some() {
            writeln!(f)?;
        }
        for decl in &self.shapes {
            writeln!(f, "{} {}", decl.label, decl.expr)?;
        }
        Ok(())
    }
}

fn needs_group(e: &ShapeExpr) -> bool {
    matches!(e, ShapeExpr::And(_) | ShapeExpr::Or(_))
}

fn write_operands(f: &mut fmt::Formatter<'_>, ops: &[ShapeExpr], sep: &str) -> fmt::Result {
    for (i, op) in ops.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        if needs_group(op) {
            write!(f, "({op})")?;
        } else {
            write!(f, "{op}")?;
        }
    }
    Ok(())
}

impl fmt::Display for ShapeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeExpr::Shape(shape) => write!(f, "{shape}"),
            ShapeExpr::And(ops) => write_operands(f, ops, " AND "),
            ShapeExpr::Or(ops) => write_operands(f, ops, " OR "),
            ShapeExpr::Not(inner) if needs_group(inner) => write!(f, "NOT ({inner})"),
            ShapeExpr::Not(inner) => write!(f, "NOT {inner}"),
            ShapeExpr::Ref(target) => write!(f, "@{target}"),
            ShapeExpr::NodeConstraintOnly(text) => f.write_str(text),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if let Some(kind) = self.node_kind {
            parts.push(kind.keyword().to_string());
        }
        if !self.extra.is_empty() {
            let preds: Vec<&str> = self.extra.iter().map(|p| p.written.as_str()).collect();
            parts.push(format!("EXTRA {}", preds.join(" ")));
        }
        if self.closed {
            parts.push("CLOSED".to_string());
        }
        if self.has_body || self.node_kind.is_none() {
            match &self.triple_expr {
                Some(te) => parts.push(format!("{{ {te} }}")),
                None => parts.push("{ }".to_string()),
            }
        }
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Display for TripleConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.predicate, self.value.raw)?;
        let card = format_cardinality(self.cardinality);
        if !card.is_empty() {
            write!(f, " {card}")?;
        }
        Ok(())
    }
}

fn write_grouped(out: &mut String, te: &TripleExpr) {
    match te {
        TripleExpr::EachOf(_) | TripleExpr::OneOf(_) => {
            let _ = write!(out, "({te})");
        }
        _ => {
            let _ = write!(out, "{te}");
        }
    }
}

impl fmt::Display for TripleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TripleExpr::TripleConstraint(tc) => write!(f, "{tc}"),
            TripleExpr::EachOf(items) | TripleExpr::OneOf(items) => {
                let sep = if matches!(self, TripleExpr::EachOf(_)) {
                    " ; "
                } else {
                    " | "
                };
                let mut out = String::new();
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    write_grouped(&mut out, item);
                }
                f.write_str(&out)
            }
            TripleExpr::Labelled { name, inner } => write!(f, "${name} ({inner})"),
        }
    }
}
