//! ShExC front end: lexer, parser and pretty printer for the subset of the
//! compact syntax that the visual notation can draw.
//!
//! Supported: `PREFIX`/`BASE`, shape declarations, triple constraints with
//! `?`, `*`, `+` and `{m,n}` cardinalities, `;` groups, `|` alternatives,
//! `$label ( ... )` groups, `AND`/`OR`/`NOT`, `@` references, `EXTRA`,
//! `CLOSED` and top-level node kinds.

mod ast;
mod error;
mod lexer;
mod parser;
mod print;

pub use ast::*;
pub use error::{ParseError, ParseErrorKind, UnknownPrefix};
pub use parser::{expand_iri, parse_schema};
