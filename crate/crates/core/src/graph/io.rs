//! JSON graph documents and Graphviz export.
//!
//! Weights are written as JSON numbers using the shortest decimal that parses
//! back to the identical `f64`, so a serialize/parse round trip is bit-exact.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::HermitianWeightedGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub i: usize,
    pub j: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertex_count: usize,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

impl From<&HermitianWeightedGraph> for GraphDocument {
    fn from(g: &HermitianWeightedGraph) -> Self {
        Self {
            vertex_count: g.vertex_count(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    i: e.i,
                    j: e.j,
                    re: e.w.re,
                    im: e.w.im,
                })
                .collect(),
            labels: g.labels().map(<[String]>::to_vec),
        }
    }
}

impl TryFrom<GraphDocument> for HermitianWeightedGraph {
    type Error = Error;

    fn try_from(doc: GraphDocument) -> Result<Self> {
        HermitianWeightedGraph::new(
            doc.vertex_count,
            doc.edges
                .into_iter()
                .map(|e| (e.i, e.j, Complex64::new(e.re, e.im))),
            doc.labels,
        )
    }
}

pub fn serialize_graph(g: &HermitianWeightedGraph) -> String {
    let mut s = serde_json::to_string_pretty(&GraphDocument::from(g))
        .expect("graph documents always serialize");
    s.push('\n');
    s
}

pub fn parse_graph(text: &str) -> Result<HermitianWeightedGraph> {
    let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.try_into()
}

/// Undirected Graphviz rendering; each edge is labelled `|w|∠arg(w)`.
pub fn export_dot(g: &HermitianWeightedGraph) -> String {
    let mut out = String::from("graph G {\n");
    for v in 0..g.vertex_count() {
        match g.label(v) {
            Some(l) => out.push_str(&format!("  {v} [label=\"{}\"];\n", l.replace('"', "\\\""))),
            None => out.push_str(&format!("  {v};\n")),
        }
    }
    for e in g.edges() {
        out.push_str(&format!(
            "  {} -- {} [label=\"{:.6}∠{:.6}\"];\n",
            e.i,
            e.j,
            e.w.norm(),
            e.w.arg()
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_g_line, build_triangle_complex, build_two_site};

    #[test]
    fn two_site_round_trips() {
        let p = build_two_site();
        assert_eq!(parse_graph(&serialize_graph(&p)).unwrap(), p);
    }

    #[test]
    fn triangle_round_trip_is_bit_exact() {
        let t = build_triangle_complex();
        let back = parse_graph(&serialize_graph(&t)).unwrap();
        for (a, b) in t.edges().iter().zip(back.edges()) {
            assert_eq!(a.w.re.to_bits(), b.w.re.to_bits());
            assert_eq!(a.w.im.to_bits(), b.w.im.to_bits());
        }
    }

    #[test]
    fn labels_survive() {
        let g = build_g_line(3).unwrap();
        let back = parse_graph(&serialize_graph(&g)).unwrap();
        assert_eq!(back.labels(), g.labels());
    }

    #[test]
    fn parse_errors_report_position() {
        let err = parse_graph("{\n  \"vertex_count\": 2,\n  \"edges\": [oops]\n}").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
        // Well-formed JSON describing an invalid graph.
        let err = parse_graph(r#"{"vertex_count": 2, "edges": [{"i": 0, "j": 0, "re": 1, "im": 0}]}"#)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidGraph(_)));
        assert!(parse_graph(r#"{"vertex_count": 2, "edges": [], "extra": 1}"#).is_err());
    }

    #[test]
    fn dot_counts() {
        let dot = export_dot(&build_g_line(2).unwrap());
        assert_eq!(dot.matches("[label=\"").count(), 5);
        assert_eq!(dot.matches(" -- ").count(), 2);
        assert!(dot.contains("0 -- 1 [label=\"1.414214∠0.000000\"]"));
        assert!(dot.contains("1 [label=\"1,1\"]"));
    }
}
