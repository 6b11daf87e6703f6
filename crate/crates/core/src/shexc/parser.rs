use super::ast::*;
use super::error::{ParseError, ParseErrorKind, UnknownPrefix};
use super::lexer::{tokenize, Spanned, Tok};

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

const FACETS: &[&str] = &[
    "LENGTH",
    "MINLENGTH",
    "MAXLENGTH",
    "PATTERN",
    "MININCLUSIVE",
    "MINEXCLUSIVE",
    "MAXINCLUSIVE",
    "MAXEXCLUSIVE",
    "TOTALDIGITS",
    "FRACTIONDIGITS",
];

/// Parses a ShExC document into a [`ShExSchema`].
///
/// Only the constructs of the visual notation are accepted (see the crate
/// docs); anything else yields [`ParseErrorKind::Unsupported`] naming the
/// construct.
pub fn parse_schema(text: &str) -> Result<ShExSchema, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        i: 0,
        prefixes: PrefixTable::default(),
    };
    p.schema()
}

/// Expands a prefixed name (`p:local`) against `table`. Absolute IRIs, bare or
/// in angle brackets, are returned unchanged.
pub fn expand_iri(prefixed: &str, table: &PrefixTable) -> Result<String, UnknownPrefix> {
    if let Some(inner) = prefixed.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
        return Ok(resolve_relative(inner, table.base.as_deref()));
    }
    if prefixed.contains("://") || prefixed.starts_with("urn:") {
        return Ok(prefixed.to_string());
    }
    let (prefix, local) = prefixed.split_once(':').ok_or_else(|| UnknownPrefix {
        prefix: String::new(),
        term: prefixed.to_string(),
    })?;
    match table.get(prefix) {
        Some(ns) => Ok(format!("{ns}{local}")),
        None => Err(UnknownPrefix {
            prefix: prefix.to_string(),
            term: prefixed.to_string(),
        }),
    }
}

fn resolve_relative(iri: &str, base: Option<&str>) -> String {
    let has_scheme = iri
        .split_once(':')
        .is_some_and(|(scheme, _)| !scheme.is_empty() && scheme.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c)));
    match base {
        Some(base) if !has_scheme => format!("{base}{iri}"),
        _ => iri.to_string(),
    }
}

struct Parser {
    toks: Vec<Spanned>,
    i: usize,
    prefixes: PrefixTable,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.i + offset).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn pos(&self) -> Position {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, kind: ParseErrorKind) -> PResult<T> {
        Err(ParseError::new(kind, self.pos()))
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        self.err(ParseErrorKind::Syntax(format!(
            "expected {expected}, found {}",
            self.peek().describe()
        )))
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("'{}'", tok.punct()))
        }
    }

    /// Fails with a named "unsupported" error on tokens that introduce ShExC
    /// constructs outside the notation.
    fn reject_unsupported(&self) -> PResult<()> {
        let what = match self.peek() {
            Tok::Percent => "semantic actions",
            Tok::DoubleSlash => "annotations",
            Tok::Amp => "triple expression inclusion",
            Tok::Caret => "inverse triple constraints",
            _ => return Ok(()),
        };
        self.err(ParseErrorKind::Unsupported(what.into()))
    }

    fn schema(&mut self) -> PResult<ShExSchema> {
        let mut shapes: Vec<ShapeDecl> = Vec::new();
        loop {
            let tok = self.peek().clone();
            match tok {
                Tok::Eof => break,
                Tok::Word(ref w) if w.eq_ignore_ascii_case("PREFIX") => {
                    self.bump();
                    self.prefix_decl()?;
                }
                Tok::Word(ref w) if w.eq_ignore_ascii_case("BASE") => {
                    self.bump();
                    match self.bump().tok {
                        Tok::IriRef(iri) => self.prefixes.base = Some(iri),
                        _ => {
                            self.i -= 1;
                            return self.unexpected("IRI after BASE");
                        }
                    }
                }
                Tok::Word(ref w)
                    if ["IMPORT", "START", "ABSTRACT"]
                        .iter()
                        .any(|k| w.eq_ignore_ascii_case(k)) =>
                {
                    return self.err(ParseErrorKind::Unsupported(format!(
                        "{} declarations",
                        w.to_ascii_uppercase()
                    )));
                }
                Tok::PName { .. } | Tok::IriRef(_) => {
                    let pos = self.pos();
                    let label = self.iri()?;
                    if shapes.iter().any(|s| s.label.expanded == label.expanded) {
                        return Err(ParseError::new(
                            ParseErrorKind::DuplicateShape(label.written),
                            pos,
                        ));
                    }
                    if self.peek().is_keyword("EXTERNAL") {
                        return self.err(ParseErrorKind::Unsupported("EXTERNAL shapes".into()));
                    }
                    let expr = self.shape_or()?;
                    self.reject_unsupported()?;
                    shapes.push(ShapeDecl {
                        label,
                        expr,
                        position: pos,
                    });
                }
                Tok::Percent | Tok::DoubleSlash | Tok::Amp | Tok::Caret => {
                    self.reject_unsupported()?;
                }
                _ => return self.unexpected("PREFIX, BASE or a shape declaration"),
            }
        }
        Ok(ShExSchema {
            prefixes: std::mem::take(&mut self.prefixes),
            shapes,
        })
    }

    fn prefix_decl(&mut self) -> PResult<()> {
        let prefix = match self.peek().clone() {
            Tok::PName { prefix, local } if local.is_empty() => prefix,
            _ => return self.unexpected("prefix name such as 'ex:'"),
        };
        self.bump();
        let iri = match self.peek().clone() {
            Tok::IriRef(iri) if !iri.is_empty() => iri,
            _ => return self.unexpected("non-empty IRI"),
        };
        self.bump();
        self.prefixes.mappings.insert(prefix, iri);
        Ok(())
    }

    /// Prefixed name or IRI reference, resolved against the prefix table.
    fn iri(&mut self) -> PResult<Iri> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::PName { prefix, local } => {
                self.bump();
                match self.prefixes.get(&prefix) {
                    Some(ns) => Ok(Iri::new(format!("{prefix}:{local}"), format!("{ns}{local}"))),
                    None => Err(ParseError::new(ParseErrorKind::UnknownPrefix(prefix), pos)),
                }
            }
            Tok::IriRef(iri) => {
                self.bump();
                let expanded = resolve_relative(&iri, self.prefixes.base.as_deref());
                Ok(Iri::new(format!("<{iri}>"), expanded))
            }
            _ => self.unexpected("IRI or prefixed name"),
        }
    }

    fn shape_or(&mut self) -> PResult<ShapeExpr> {
        let mut ops = vec![self.shape_and()?];
        while self.peek().is_keyword("OR") {
            self.bump();
            ops.push(self.shape_and()?);
        }
        Ok(if ops.len() == 1 {
            ops.pop().unwrap()
        } else {
            ShapeExpr::Or(ops)
        })
    }

    fn shape_and(&mut self) -> PResult<ShapeExpr> {
        let mut ops = vec![self.shape_not()?];
        while self.peek().is_keyword("AND") {
            self.bump();
            ops.push(self.shape_not()?);
        }
        Ok(if ops.len() == 1 {
            ops.pop().unwrap()
        } else {
            ShapeExpr::And(ops)
        })
    }

    fn shape_not(&mut self) -> PResult<ShapeExpr> {
        if self.peek().is_keyword("NOT") {
            self.bump();
            let inner = self.shape_not()?;
            return Ok(ShapeExpr::Not(Box::new(inner)));
        }
        self.shape_atom()
    }

    fn starts_shape_definition(&self) -> bool {
        matches!(self.peek(), Tok::LBrace)
            || self.peek().is_keyword("EXTRA")
            || self.peek().is_keyword("CLOSED")
    }

    fn shape_atom(&mut self) -> PResult<ShapeExpr> {
        self.reject_unsupported()?;
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.shape_or()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::At => {
                self.bump();
                Ok(ShapeExpr::Ref(self.iri()?))
            }
            Tok::Dot => {
                self.bump();
                Ok(ShapeExpr::NodeConstraintOnly(".".into()))
            }
            Tok::LBracket => Ok(ShapeExpr::NodeConstraintOnly(self.value_set()?)),
            Tok::PName { .. } | Tok::IriRef(_) => {
                let dt = self.iri()?;
                self.reject_facets()?;
                Ok(ShapeExpr::NodeConstraintOnly(dt.written))
            }
            Tok::Word(w) => {
                if let Some(kind) = NodeKind::from_keyword(&w) {
                    self.bump();
                    self.reject_facets()?;
                    if self.starts_shape_definition() {
                        self.shape_definition(Some(kind))
                    } else {
                        Ok(ShapeExpr::Shape(Shape {
                            node_kind: Some(kind),
                            ..Shape::default()
                        }))
                    }
                } else if self.starts_shape_definition() {
                    self.shape_definition(None)
                } else {
                    self.unexpected("shape expression")
                }
            }
            Tok::LBrace => self.shape_definition(None),
            _ => self.unexpected("shape expression"),
        }
    }

    fn reject_facets(&self) -> PResult<()> {
        if let Tok::Word(w) = self.peek() {
            if FACETS.iter().any(|f| w.eq_ignore_ascii_case(f)) {
                return self.err(ParseErrorKind::Unsupported(format!(
                    "string/numeric facet {}",
                    w.to_ascii_uppercase()
                )));
            }
        }
        Ok(())
    }

    fn shape_definition(&mut self, node_kind: Option<NodeKind>) -> PResult<ShapeExpr> {
        let mut shape = Shape {
            node_kind,
            has_body: true,
            ..Shape::default()
        };
        loop {
            if self.peek().is_keyword("EXTRA") {
                self.bump();
                let before = shape.extra.len();
                while self.starts_predicate() {
                    shape.extra.push(self.predicate()?);
                }
                if shape.extra.len() == before {
                    return self.unexpected("predicate after EXTRA");
                }
            } else if self.peek().is_keyword("CLOSED") {
                self.bump();
                shape.closed = true;
            } else {
                break;
            }
        }
        self.expect(Tok::LBrace)?;
        if *self.peek() != Tok::RBrace {
            shape.triple_expr = Some(self.triple_expr()?);
        }
        self.expect(Tok::RBrace)?;
        self.reject_unsupported()?;
        Ok(ShapeExpr::Shape(shape))
    }

    fn starts_predicate(&self) -> bool {
        matches!(self.peek(), Tok::PName { .. } | Tok::IriRef(_)) || self.peek().is_keyword_exact("a")
    }

    fn predicate(&mut self) -> PResult<Iri> {
        if self.peek().is_keyword_exact("a") {
            self.bump();
            return Ok(Iri::new("a", RDF_TYPE));
        }
        self.iri()
    }

    fn triple_expr(&mut self) -> PResult<TripleExpr> {
        let mut alts = vec![self.group()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            alts.push(self.group()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            TripleExpr::OneOf(alts)
        })
    }

    fn starts_unary(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Dollar | Tok::LParen | Tok::Caret | Tok::Amp
        ) || self.starts_predicate()
    }

    fn group(&mut self) -> PResult<TripleExpr> {
        let mut items = vec![self.unary()?];
        while *self.peek() == Tok::Semi {
            self.bump();
            if self.starts_unary() {
                items.push(self.unary()?);
            } else {
                break;
            }
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            TripleExpr::EachOf(items)
        })
    }

    fn unary(&mut self) -> PResult<TripleExpr> {
        self.reject_unsupported()?;
        if *self.peek() == Tok::Dollar {
            self.bump();
            let name = match self.peek() {
                Tok::PName { .. } | Tok::IriRef(_) => self.iri()?.written,
                _ => return self.unexpected("label after '$'"),
            };
            let inner = self.unary_body()?;
            return Ok(TripleExpr::Labelled {
                name,
                inner: Box::new(inner),
            });
        }
        self.unary_body()
    }

    fn unary_body(&mut self) -> PResult<TripleExpr> {
        self.reject_unsupported()?;
        if *self.peek() == Tok::LParen {
            self.bump();
            let inner = self.triple_expr()?;
            self.expect(Tok::RParen)?;
            if self.starts_cardinality() {
                return self.err(ParseErrorKind::Unsupported(
                    "cardinality on a grouped triple expression".into(),
                ));
            }
            self.reject_unsupported()?;
            return Ok(inner);
        }
        if !self.starts_predicate() {
            return self.unexpected("triple constraint");
        }
        let predicate = self.predicate()?;
        let value = self.value_expr()?;
        let cardinality = if self.starts_cardinality() {
            self.cardinality()?
        } else {
            Cardinality::ONE
        };
        self.reject_unsupported()?;
        Ok(TripleExpr::TripleConstraint(TripleConstraint {
            predicate,
            value,
            cardinality,
        }))
    }

    fn value_expr(&mut self) -> PResult<ValueExprText> {
        self.reject_unsupported()?;
        let value = match self.peek().clone() {
            Tok::At => {
                self.bump();
                ValueExprText::reference(self.iri()?)
            }
            Tok::Dot => {
                self.bump();
                ValueExprText::plain(".")
            }
            Tok::LBracket => ValueExprText::plain(self.value_set()?),
            Tok::PName { .. } | Tok::IriRef(_) => ValueExprText::plain(self.iri()?.written),
            Tok::Word(w) if NodeKind::from_keyword(&w).is_some() => {
                self.bump();
                ValueExprText::plain(NodeKind::from_keyword(&w).unwrap().keyword())
            }
            Tok::LBrace => {
                return self.err(ParseErrorKind::Unsupported(
                    "inline shape as value expression".into(),
                ))
            }
            _ => return self.unexpected("value expression"),
        };
        self.reject_facets()?;
        if self.peek().is_keyword("AND") || self.peek().is_keyword("OR") || self.peek().is_keyword("NOT") {
            return self.err(ParseErrorKind::Unsupported(
                "logical operators inside a value expression".into(),
            ));
        }
        Ok(value)
    }

    /// Collects a value set as normalized text, e.g. `[wd:Q5 wd:Q6]`.
    fn value_set(&mut self) -> PResult<String> {
        self.expect(Tok::LBracket)?;
        let mut items: Vec<String> = Vec::new();
        let mut glue_next = false;
        loop {
            let tok = self.peek().clone();
            let text = match &tok {
                Tok::RBracket => {
                    self.bump();
                    break;
                }
                Tok::Eof => return self.unexpected("']'"),
                Tok::PName { prefix, .. } => {
                    if self.prefixes.get(prefix).is_none() {
                        return self.err(ParseErrorKind::UnknownPrefix(prefix.clone()));
                    }
                    tok.describe()
                }
                Tok::IriRef(_) | Tok::Str(_) | Tok::Int(_) | Tok::Word(_) | Tok::Dot => tok.describe(),
                Tok::Tilde => {
                    self.bump();
                    match items.last_mut() {
                        Some(last) => last.push('~'),
                        None => items.push("~".into()),
                    }
                    continue;
                }
                Tok::Minus | Tok::At => {
                    self.bump();
                    items.push(tok.punct().to_string());
                    glue_next = true;
                    continue;
                }
                _ => return self.unexpected("value set item"),
            };
            self.bump();
            if glue_next {
                items.last_mut().unwrap().push_str(&text);
                glue_next = false;
            } else {
                items.push(text);
            }
        }
        Ok(format!("[{}]", items.join(" ")))
    }

    fn starts_cardinality(&self) -> bool {
        matches!(self.peek(), Tok::Question | Tok::Star | Tok::Plus)
            || (*self.peek() == Tok::LBrace && matches!(self.peek_at(1), Tok::Int(_)))
    }

    fn cardinality(&mut self) -> PResult<Cardinality> {
        let pos = self.pos();
        match self.bump().tok {
            Tok::Question => return Ok(Cardinality::OPTIONAL),
            Tok::Star => return Ok(Cardinality::STAR),
            Tok::Plus => return Ok(Cardinality::PLUS),
            _ => {}
        }
        let min = match self.bump().tok {
            Tok::Int(n) => n,
            _ => unreachable!("starts_cardinality checked for an integer"),
        };
        let max = match self.peek().clone() {
            Tok::RBrace => Some(min),
            Tok::Comma => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        Some(n)
                    }
                    Tok::Star => {
                        self.bump();
                        None
                    }
                    _ => None,
                }
            }
            _ => return self.unexpected("',' or '}' in cardinality"),
        };
        self.expect(Tok::RBrace)?;
        Cardinality::new(min, max).ok_or_else(|| {
            ParseError::new(
                ParseErrorKind::Syntax(format!(
                    "cardinality minimum {min} exceeds maximum {}",
                    max.unwrap_or_default()
                )),
                pos,
            )
        })
    }
}

impl Tok {
    /// Case-sensitive word match, used for the `a` predicate shorthand.
    fn is_keyword_exact(&self, kw: &str) -> bool {
        matches!(self, Tok::Word(w) if w == kw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = "PREFIX : <http://ex.org/>\nPREFIX schema: <http://schema.org/>\nPREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n";

    fn parse(body: &str) -> ShExSchema {
        parse_schema(&format!("{HEAD}{body}")).unwrap()
    }

    fn parse_err(body: &str) -> ParseError {
        parse_schema(&format!("{HEAD}{body}")).unwrap_err()
    }

    fn only_tc(expr: &ShapeExpr) -> &TripleConstraint {
        match expr {
            ShapeExpr::Shape(Shape {
                triple_expr: Some(TripleExpr::TripleConstraint(tc)),
                ..
            }) => tc,
            other => panic!("expected single triple constraint, got {other:?}"),
        }
    }

    #[test]
    fn optional_triple_constraint() {
        let s = parse(":User { :name xsd:string ?; }");
        assert_eq!(s.shapes.len(), 1);
        let tc = only_tc(&s.shapes[0].expr);
        assert_eq!(tc.cardinality, Cardinality { min: 0, max: Some(1) });
        assert_eq!(tc.predicate.expanded, "http://ex.org/name");
        assert_eq!(tc.value.raw, "xsd:string");
    }

    #[test]
    fn empty_document() {
        let s = parse_schema("").unwrap();
        assert!(s.shapes.is_empty());
        assert!(s.prefixes.mappings.is_empty());
    }

    #[test]
    fn not_with_wildcard_value() {
        let s = parse(":NoName Not { schema:name . }");
        match &s.shapes[0].expr {
            ShapeExpr::Not(inner) => {
                let tc = only_tc(inner);
                assert_eq!(tc.value.raw, ".");
                assert_eq!(tc.value.ref_target, None);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shape_reference_value() {
        let s = parse(":User { schema:worksFor @:Company ; }");
        let tc = only_tc(&s.shapes[0].expr);
        assert_eq!(tc.value.raw, "@:Company");
        assert_eq!(tc.value.ref_target.as_ref().unwrap().expanded, "http://ex.org/Company");
        assert_eq!(s.external_targets().len(), 1);
    }

    #[test]
    fn cardinality_forms() {
        let s = parse(":A { :a . ; :b . * ; :c . + ; :d . {2} ; :e . {2,} ; :f . {1,4} ; :g . {3,*} }");
        let mut cards = Vec::new();
        s.shapes[0]
            .expr
            .visit_triple_constraints(&mut |tc| cards.push(tc.cardinality));
        assert_eq!(
            cards,
            vec![
                Cardinality::ONE,
                Cardinality::STAR,
                Cardinality::PLUS,
                Cardinality { min: 2, max: Some(2) },
                Cardinality { min: 2, max: None },
                Cardinality { min: 1, max: Some(4) },
                Cardinality { min: 3, max: None },
            ]
        );
    }

    #[test]
    fn inverted_cardinality_rejected() {
        let e = parse_err(":A { :a . {4,2} }");
        assert!(matches!(e.kind, ParseErrorKind::Syntax(ref m) if m.contains("exceeds")));
    }

    #[test]
    fn one_of_with_grouped_alternative() {
        let s = parse(":User { :name xsd:string; | ( :givenName xsd:string +; :familyName xsd:string; ); }");
        let ShapeExpr::Shape(shape) = &s.shapes[0].expr else { panic!() };
        let Some(TripleExpr::OneOf(alts)) = &shape.triple_expr else {
            panic!("{:?}", shape.triple_expr)
        };
        assert_eq!(alts.len(), 2);
        assert!(matches!(alts[0], TripleExpr::TripleConstraint(_)));
        let TripleExpr::EachOf(items) = &alts[1] else { panic!() };
        assert_eq!(items.len(), 2);
    }

    #[test]
    fn labelled_group() {
        let s = parse(":User { $:name ( :name .; :email IRI; ) }");
        let ShapeExpr::Shape(shape) = &s.shapes[0].expr else { panic!() };
        let Some(TripleExpr::Labelled { name, inner }) = &shape.triple_expr else { panic!() };
        assert_eq!(name, ":name");
        assert!(matches!(**inner, TripleExpr::EachOf(ref v) if v.len() == 2));
    }

    #[test]
    fn logical_operators_and_precedence() {
        let s = parse(":U { :a . } AND { :b . } OR NOT @:V");
        let ShapeExpr::Or(ops) = &s.shapes[0].expr else { panic!() };
        assert!(matches!(ops[0], ShapeExpr::And(ref v) if v.len() == 2));
        assert!(matches!(ops[1], ShapeExpr::Not(ref inner) if matches!(**inner, ShapeExpr::Ref(_))));
    }

    #[test]
    fn extra_closed_and_node_kind() {
        let s = parse(":User EXTRA schema:name CLOSED { schema:name xsd:string ; }\n:HomePage IRI\n:C CLOSED {}");
        let ShapeExpr::Shape(u) = &s.shapes[0].expr else { panic!() };
        assert_eq!(u.extra.len(), 1);
        assert!(u.closed);
        let ShapeExpr::Shape(h) = &s.shapes[1].expr else { panic!() };
        assert_eq!(h.node_kind, Some(NodeKind::Iri));
        assert!(!h.has_body);
        let ShapeExpr::Shape(c) = &s.shapes[2].expr else { panic!() };
        assert!(c.closed && c.triple_expr.is_none() && c.has_body);
    }

    #[test]
    fn a_predicate_and_value_sets() {
        let s = parse(":A { a [ schema:Person schema:Thing ] ; :s [\"x\" 1] }");
        let mut raws = Vec::new();
        s.shapes[0].expr.visit_triple_constraints(&mut |tc| {
            raws.push((tc.predicate.written.clone(), tc.value.raw.clone()))
        });
        assert_eq!(raws[0], ("a".into(), "[schema:Person schema:Thing]".into()));
        assert_eq!(raws[1].1, "[\"x\" 1]");
    }

    #[test]
    fn duplicate_label_rejected_at_second_declaration() {
        let e = parse_err(":A {}\n:A {}");
        assert_eq!(e.kind, ParseErrorKind::DuplicateShape(":A".into()));
        assert_eq!(e.line, 5);
    }

    #[test]
    fn unknown_prefix_has_position() {
        let e = parse_schema(":A { foo:bar . }").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownPrefix(String::new()));
        let e = parse_err(":A { foo:bar . }");
        assert_eq!(e.kind, ParseErrorKind::UnknownPrefix("foo".into()));
        assert_eq!((e.line, e.column), (4, 6));
    }

    #[test]
    fn unsupported_constructs_are_named() {
        for (src, needle) in [
            (":A { :p . %ex:act{ code %} }", "semantic actions"),
            ("IMPORT <x>", "IMPORT"),
            (":A { ^:p . }", "inverse"),
            (":A { &:B }", "inclusion"),
            (":A { :p xsd:string MINLENGTH 3 }", "facet"),
            (":A { :p { :q . } }", "inline shape"),
            (":A { :p @:B OR @:C }", "logical"),
            (":A { (:p . ; :q .)+ }", "grouped"),
            (":A { :p . // :x \"y\" }", "annotations"),
        ] {
            let e = parse_err(src);
            match e.kind {
                ParseErrorKind::Unsupported(ref what) => {
                    assert!(what.contains(needle), "{src}: {what}")
                }
                ref other => panic!("{src}: expected unsupported, got {other:?}"),
            }
        }
    }

    #[test]
    fn syntax_error_location() {
        let e = parse_schema("PREFIX : <http://ex.org/>\n:A { :p }").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!((e.line, e.column), (2, 9));
    }

    #[test]
    fn base_resolves_relative_labels() {
        let s = parse_schema("BASE <http://ex.org/>\n<gene> { <p> @<protein> }\n<protein> {}").unwrap();
        assert_eq!(s.shapes[0].label.expanded, "http://ex.org/gene");
        assert!(s.external_targets().is_empty());
    }

    #[test]
    fn expand_iri_cases() {
        let t = PrefixTable::new()
            .with("wd", "http://www.wikidata.org/entity/")
            .with("", "http://ex.org/");
        assert_eq!(
            expand_iri("wd:Q42944", &t).unwrap(),
            "http://www.wikidata.org/entity/Q42944"
        );
        assert_eq!(expand_iri(":User", &t).unwrap(), "http://ex.org/User");
        assert_eq!(
            expand_iri("http://schema.org/name", &t).unwrap(),
            "http://schema.org/name"
        );
        assert_eq!(expand_iri("<http://a/b>", &t).unwrap(), "http://a/b");
        let err = expand_iri("schema:name", &t).unwrap_err();
        assert_eq!(err.prefix, "schema");
    }

    #[test]
    fn format_cardinality_table() {
        assert_eq!(format_cardinality(Cardinality::ONE), "");
        assert_eq!(format_cardinality(Cardinality::OPTIONAL), "?");
        assert_eq!(format_cardinality(Cardinality::STAR), "*");
        assert_eq!(format_cardinality(Cardinality::PLUS), "+");
        assert_eq!(format_cardinality(Cardinality { min: 2, max: Some(5) }), "{2,5}");
        assert_eq!(format_cardinality(Cardinality { min: 3, max: None }), "{3,}");
        assert_eq!(format_cardinality(Cardinality { min: 0, max: Some(0) }), "{0,0}");
    }
}
