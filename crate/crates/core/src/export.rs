//! Stream and graph exports: sankey JSON, GraphML, and Graphviz DOT.
//!
//! All writers iterate in fixed orders and format numbers explicitly, so a
//! given input always produces the same bytes.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::cooccurrence::{CooccurrenceGraph, SimilarityGraph};
use crate::error::{Error, Result};
use crate::metrics::format_value;
use crate::streams::{StreamEvent, StreamGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    SankeyJson,
    GraphMl,
    Dot,
}

impl ExportFormat {
    pub const ALL: [ExportFormat; 3] = [ExportFormat::SankeyJson, ExportFormat::GraphMl, ExportFormat::Dot];

    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::SankeyJson => "json",
            ExportFormat::GraphMl => "graphml",
            ExportFormat::Dot => "dot",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sankey-json" | "sankey" | "json" => Ok(ExportFormat::SankeyJson),
            "graphml" => Ok(ExportFormat::GraphMl),
            "dot" => Ok(ExportFormat::Dot),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Serialize)]
struct SankeyNode<'a> {
    id: String,
    period: String,
    community: usize,
    label: &'a str,
    size: u64,
}

#[derive(Serialize)]
struct SankeyLink {
    source: usize,
    target: usize,
    weight: u64,
    overlap: f64,
}

#[derive(Serialize)]
struct Sankey<'a> {
    nodes: Vec<SankeyNode<'a>>,
    links: Vec<SankeyLink>,
    events: &'a [StreamEvent],
}

fn node_id(s: &StreamGraph, i: usize) -> String {
    format!("{}/c{}", s.nodes[i].period, s.nodes[i].community)
}

pub fn export_streams(s: &StreamGraph, format: ExportFormat) -> Result<String> {
    match format {
        ExportFormat::SankeyJson => {
            let doc = Sankey {
                nodes: s
                    .nodes
                    .iter()
                    .enumerate()
                    .map(|(i, n)| SankeyNode {
                        id: node_id(s, i),
                        period: n.period.to_string(),
                        community: n.community,
                        label: &n.label.0,
                        size: n.size,
                    })
                    .collect(),
                links: s
                    .links
                    .iter()
                    .map(|l| SankeyLink {
                        source: l.source,
                        target: l.target,
                        weight: l.weight,
                        // fixed precision keeps bytes stable
                        overlap: (l.normalized * 1e6).round() / 1e6,
                    })
                    .collect(),
                events: &s.events,
            };
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            Ok(text)
        }
        ExportFormat::GraphMl => {
            let mut x = String::new();
            x.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
            x.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
            x.push_str("  <key id=\"period\" for=\"node\" attr.name=\"period\" attr.type=\"string\"/>\n");
            x.push_str("  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n");
            x.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
            x.push_str("  <key id=\"size\" for=\"node\" attr.name=\"size\" attr.type=\"long\"/>\n");
            x.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
            x.push_str("  <key id=\"overlap\" for=\"edge\" attr.name=\"overlap\" attr.type=\"double\"/>\n");
            x.push_str("  <graph id=\"streams\" edgedefault=\"directed\">\n");
            for (i, n) in s.nodes.iter().enumerate() {
                let _ = writeln!(x, "    <node id=\"{}\">", xml_escape(&node_id(s, i)));
                let _ = writeln!(x, "      <data key=\"period\">{}</data>", n.period);
                let _ = writeln!(x, "      <data key=\"community\">{}</data>", n.community);
                let _ = writeln!(x, "      <data key=\"label\">{}</data>", xml_escape(&n.label.0));
                let _ = writeln!(x, "      <data key=\"size\">{}</data>", n.size);
                x.push_str("    </node>\n");
            }
            for l in &s.links {
                let _ = writeln!(
                    x,
                    "    <edge source=\"{}\" target=\"{}\">",
                    xml_escape(&node_id(s, l.source)),
                    xml_escape(&node_id(s, l.target))
                );
                let _ = writeln!(x, "      <data key=\"weight\">{}</data>", l.weight);
                let _ = writeln!(x, "      <data key=\"overlap\">{:.6}</data>", l.normalized);
                x.push_str("    </edge>\n");
            }
            x.push_str("  </graph>\n</graphml>\n");
            Ok(x)
        }
        ExportFormat::Dot => {
            let mut x = String::from("digraph streams {\n  rankdir=LR;\n");
            for (i, n) in s.nodes.iter().enumerate() {
                let _ = writeln!(
                    x,
                    "  \"{}\" [label=\"{}\\n{}\", period=\"{}\", size={}];",
                    dot_escape(&node_id(s, i)),
                    dot_escape(&n.label.0),
                    n.period,
                    n.period,
                    n.size
                );
            }
            for l in &s.links {
                let _ = writeln!(
                    x,
                    "  \"{}\" -> \"{}\" [weight={}, overlap={:.6}];",
                    dot_escape(&node_id(s, l.source)),
                    dot_escape(&node_id(s, l.target)),
                    l.weight,
                    l.normalized
                );
            }
            x.push_str("}\n");
            Ok(x)
        }
    }
}

/// One period's co-occurrence graph with node `code`/`count` and edge
/// `weight`/`similarity` attributes. Sankey form is not defined for graphs.
pub fn export_graph(g: &CooccurrenceGraph, sim: &SimilarityGraph, format: ExportFormat) -> Result<String> {
    let similarity = |a, b| sim.similarity(a, b).unwrap_or(0.0);
    match format {
        ExportFormat::SankeyJson => Err(Error::UnknownFormat("sankey-json for a co-occurrence graph".into())),
        ExportFormat::GraphMl => {
            let mut x = String::new();
            x.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
            x.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
            x.push_str("  <key id=\"code\" for=\"node\" attr.name=\"code\" attr.type=\"string\"/>\n");
            x.push_str("  <key id=\"count\" for=\"node\" attr.name=\"count\" attr.type=\"long\"/>\n");
            x.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
            x.push_str("  <key id=\"similarity\" for=\"edge\" attr.name=\"similarity\" attr.type=\"double\"/>\n");
            let _ = writeln!(x, "  <graph id=\"{}\" edgedefault=\"undirected\">", g.period);
            for (d, c) in &g.nodes {
                let _ = writeln!(x, "    <node id=\"{d}\">");
                let _ = writeln!(x, "      <data key=\"code\">{d}</data>");
                let _ = writeln!(x, "      <data key=\"count\">{c}</data>");
                x.push_str("    </node>\n");
            }
            for ((a, b), w) in &g.edges {
                let _ = writeln!(x, "    <edge source=\"{a}\" target=\"{b}\">");
                let _ = writeln!(x, "      <data key=\"weight\">{w}</data>");
                let _ = writeln!(x, "      <data key=\"similarity\">{:.6}</data>", similarity(*a, *b));
                x.push_str("    </edge>\n");
            }
            x.push_str("  </graph>\n</graphml>\n");
            Ok(x)
        }
        ExportFormat::Dot => {
            let mut x = format!("graph \"{}\" {{\n", g.period);
            for (d, c) in &g.nodes {
                let _ = writeln!(x, "  {d} [code=\"{d}\", count={}];", format_value(*c as f64));
            }
            for ((a, b), w) in &g.edges {
                let _ = writeln!(x, "  {a} -- {b} [weight={w}, similarity={:.6}];", similarity(*a, *b));
            }
            x.push_str("}\n");
            Ok(x)
        }
    }
}
