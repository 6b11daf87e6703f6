//! Compiles Shape Expressions schemas into a UML-like visual notation.
//!
//! The pipeline is `shexc` (parse) → `schema_graph` (notation model) →
//! `mermaid` / `graph3d` (documents). `focus` implements highlight and
//! collapse over the notation model, `metrics` scores a notation's perceptual
//! discriminability, and `wikidata` resolves entity ids to tooltip text.

pub mod shexc;
pub mod schema_graph;
pub mod mermaid;
pub mod graph3d;
pub mod focus;
pub mod metrics;
pub mod wikidata;
