//! Force-graph document emitter.
//!
//! References are drawn as curved links so that any number of them can sit
//! between the same two shapes; compositional relations are unique to their
//! source and stay straight. The curved links of a node pair are spread
//! evenly around the axis joining the pair.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::schema_graph::{RelationKind, VisualGraph};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Graph3D {
    pub nodes: Vec<Node3D>,
    pub links: Vec<Link3D>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node3D {
    pub id: String,
    pub display_label: String,
    /// Constraint rows, shown only when the node is opened.
    pub constraints: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link3D {
    pub source: String,
    pub target: String,
    pub label: String,
    pub curvature: f64,
    /// Radians in `[0, 2π)`, measured in the link's own source frame.
    pub rotation: f64,
    pub arrowhead: Arrowhead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrowhead {
    None,
    Arrow,
    Diamond,
}

impl Arrowhead {
    pub fn for_relation(kind: RelationKind) -> Self {
        match kind {
            RelationKind::Ref => Arrowhead::Arrow,
            RelationKind::And | RelationKind::Or | RelationKind::OneOf => Arrowhead::Diamond,
            RelationKind::Not | RelationKind::Labelled => Arrowhead::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub ref_curvature: f64,
    pub self_loop_curvature: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            ref_curvature: 0.2,
            self_loop_curvature: 0.4,
        }
    }
}

/// A link before geometry is assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialLink {
    pub source: String,
    pub target: String,
    pub label: String,
    pub arrowhead: Arrowhead,
    pub compositional: bool,
}

fn pair_key<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// True when the link runs against its pair's canonical `u < v` orientation.
pub fn is_counter_canonical(source: &str, target: &str) -> bool {
    source > target
}

/// Angle of `link` expressed in its pair's canonical frame, i.e. with the
/// source-frame correction undone.
pub fn canonical_angle(link: &Link3D) -> f64 {
    if is_counter_canonical(&link.source, &link.target) {
        (link.rotation + PI).rem_euclid(TAU)
    } else {
        link.rotation
    }
}

fn normalize(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Assigns curvature and rotation to every link.
///
/// Links are grouped by unordered node pair. The first compositional link of
/// a pair is straight (curvature 0, rotation 0) and takes no slot; every other
/// link is curved. The `n` curved links of a pair take slots `2πk/n` in input
/// order, in the canonical frame of the pair (`u < v` by id). A link running
/// `v → u` stores its slot plus π, because the same position reads half a turn
/// apart from the other end. A pair with a single curved link keeps rotation 0.
pub fn assign_link_geometry(links: &[PartialLink], config: &GeometryConfig) -> Vec<Link3D> {
    let mut straight_taken: HashSet<(&str, &str)> = HashSet::new();
    let mut curved = vec![false; links.len()];
    for (i, l) in links.iter().enumerate() {
        let key = pair_key(&l.source, &l.target);
        let self_loop = l.source == l.target;
        curved[i] = self_loop || !l.compositional || !straight_taken.insert(key);
    }

    let mut groups: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
    for (i, l) in links.iter().enumerate() {
        if curved[i] {
            groups.entry(pair_key(&l.source, &l.target)).or_default().push(i);
        }
    }
    let mut rotation = vec![0.0_f64; links.len()];
    for members in groups.values() {
        let n = members.len();
        if n < 2 {
            continue;
        }
        for (k, &i) in members.iter().enumerate() {
            let slot = TAU * k as f64 / n as f64;
            let l = &links[i];
            rotation[i] = if is_counter_canonical(&l.source, &l.target) {
                normalize(slot + PI)
            } else {
                slot
            };
        }
    }

    links
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let curvature = if !curved[i] {
                0.0
            } else if l.source == l.target {
                config.self_loop_curvature
            } else {
                config.ref_curvature
            };
            Link3D {
                source: l.source.clone(),
                target: l.target.clone(),
                label: l.label.clone(),
                curvature,
                rotation: rotation[i],
                arrowhead: l.arrowhead,
            }
        })
        .collect()
}

pub fn emit_graph3d(g: &VisualGraph) -> Graph3D {
    emit_graph3d_with(g, &GeometryConfig::default())
}

pub fn emit_graph3d_with(g: &VisualGraph, config: &GeometryConfig) -> Graph3D {
    let nodes = g
        .nodes
        .iter()
        .map(|n| Node3D {
            id: n.id.clone(),
            display_label: n.display_label.clone(),
            constraints: n.rows.iter().map(|r| r.text.clone()).collect(),
        })
        .collect();
    let partial: Vec<PartialLink> = g
        .edges
        .iter()
        .map(|e| PartialLink {
            source: e.source.clone(),
            target: e.target.clone(),
            label: format!("{} {}", e.label, e.cardinality_label).trim().to_string(),
            arrowhead: Arrowhead::for_relation(e.relation_kind),
            compositional: e.relation_kind.is_compositional(),
        })
        .collect();
    Graph3D {
        nodes,
        links: assign_link_geometry(&partial, config),
    }
}

impl Graph3D {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph document serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema_graph::build_graph;
    use crate::shexc::parse_schema;

    const HEAD: &str = "PREFIX : <http://ex.org/>\nPREFIX schema: <http://schema.org/>\nPREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n";

    fn doc(body: &str) -> Graph3D {
        emit_graph3d(&build_graph(&parse_schema(&format!("{HEAD}{body}")).unwrap()))
    }

    fn reference(s: &str, t: &str) -> PartialLink {
        PartialLink {
            source: s.into(),
            target: t.into(),
            label: "p".into(),
            arrowhead: Arrowhead::Arrow,
            compositional: false,
        }
    }

    fn composition(s: &str, t: &str) -> PartialLink {
        PartialLink {
            compositional: true,
            arrowhead: Arrowhead::Diamond,
            ..reference(s, t)
        }
    }

    fn circular_gap(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(TAU);
        d.min(TAU - d)
    }

    #[test]
    fn shape_ref_document() {
        let d = doc(":User { schema:worksFor @:Company ; }\n:Company {}");
        assert_eq!(d.nodes.len(), 2);
        assert_eq!(d.links.len(), 1);
        let l = &d.links[0];
        assert_eq!(l.arrowhead, Arrowhead::Arrow);
        assert_eq!(l.curvature, 0.2);
        assert_eq!(l.rotation, 0.0);
        assert_eq!(l.label, "schema:worksFor");
    }

    #[test]
    fn not_link_is_straight_without_head() {
        let d = doc(":NoName Not { schema:name . }");
        let l = &d.links[0];
        assert_eq!(l.arrowhead, Arrowhead::None);
        assert_eq!(l.curvature, 0.0);
        assert_eq!(d.nodes[1].constraints, ["schema:name ."]);
    }

    #[test]
    fn empty_document() {
        let d = emit_graph3d(&VisualGraph::default());
        assert!(d.nodes.is_empty() && d.links.is_empty());
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"nodes":[],"links":[]}"#);
    }

    #[test]
    fn label_includes_cardinality() {
        let d = doc(":A { :p @:B * }\n:B {}");
        assert_eq!(d.links[0].label, ":p *");
    }

    #[test]
    fn three_parallel_refs_split_the_circle() {
        let links = assign_link_geometry(
            &[reference("A", "B"), reference("A", "B"), reference("A", "B")],
            &GeometryConfig::default(),
        );
        let rots: Vec<f64> = links.iter().map(|l| l.rotation).collect();
        assert_eq!(rots[0], 0.0);
        assert!((rots[1] - TAU / 3.0).abs() < 1e-12);
        assert!((rots[2] - 2.0 * TAU / 3.0).abs() < 1e-12);
    }

    #[test]
    fn opposing_pair_uses_source_frame() {
        let links = assign_link_geometry(&[reference("A", "B"), reference("B", "A")], &GeometryConfig::default());
        // Slots 0 and π in the canonical frame; B→A stores π + π ≡ 0.
        assert_eq!(links[0].rotation, 0.0);
        assert!(links[1].rotation.abs() < 1e-12);
        assert!((canonical_angle(&links[1]) - PI).abs() < 1e-12);
    }

    #[test]
    fn single_reversed_link_keeps_zero_rotation() {
        let links = assign_link_geometry(&[reference("B", "A")], &GeometryConfig::default());
        assert_eq!(links[0].rotation, 0.0);
    }

    #[test]
    fn self_loops_and_compositions() {
        let links = assign_link_geometry(
            &[reference("A", "A"), composition("A", "A"), composition("A", "B"), reference("A", "B")],
            &GeometryConfig::default(),
        );
        assert_eq!(links[0].curvature, 0.4);
        assert_eq!(links[1].curvature, 0.4);
        assert!((links[1].rotation - PI).abs() < 1e-12);
        assert_eq!((links[2].curvature, links[2].rotation), (0.0, 0.0));
        // The reference is the only curved link of {A,B}.
        assert_eq!((links[3].curvature, links[3].rotation), (0.2, 0.0));
    }

    #[test]
    fn second_composition_between_a_pair_is_curved() {
        let links = assign_link_geometry(&[composition("A", "B"), composition("B", "A")], &GeometryConfig::default());
        assert_eq!(links[0].curvature, 0.0);
        assert_eq!(links[1].curvature, 0.2);
    }

    /// Every direction pattern of up to four links between one pair: the
    /// canonical-frame angles must be distinct and evenly spread.
    #[test]
    fn brute_force_mixed_directions() {
        for n in 1..=4usize {
            for mask in 0..(1u32 << n) {
                let input: Vec<PartialLink> = (0..n)
                    .map(|i| if mask & (1 << i) != 0 { reference("B", "A") } else { reference("A", "B") })
                    .collect();
                let out = assign_link_geometry(&input, &GeometryConfig::default());
                let angles: Vec<f64> = out.iter().map(canonical_angle).collect();
                if n == 1 {
                    assert_eq!(out[0].rotation, 0.0);
                    continue;
                }
                let mut min_gap = f64::INFINITY;
                for i in 0..n {
                    for j in (i + 1)..n {
                        min_gap = min_gap.min(circular_gap(angles[i], angles[j]));
                    }
                }
                assert!((min_gap - TAU / n as f64).abs() < 1e-9, "n={n} mask={mask:b} angles={angles:?}");
                assert!(out.iter().all(|l| (0.0..TAU).contains(&l.rotation)));
            }
        }
    }
}
