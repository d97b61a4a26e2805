//! Per-period discipline co-occurrence graphs, cosine edge similarity, and
//! community detection and labeling on top of them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use serde::Serialize;

use crate::catalog::DisciplineAssignment;
use crate::corpus::Period;
use crate::discipline::Discipline;
use crate::louvain::{detect_communities, Partition, WeightedGraph};
use crate::similarity::cosine;

/// Nodes are disciplines with the number of papers whose reference union
/// contains them; edge weights count papers containing both endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceGraph {
    pub period: Period,
    pub nodes: BTreeMap<Discipline, u64>,
    /// Keyed by `(a, b)` with `a < b`.
    pub edges: BTreeMap<(Discipline, Discipline), u64>,
}

fn ordered(a: Discipline, b: Discipline) -> (Discipline, Discipline) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CooccurrenceGraph {
    pub fn empty(period: Period) -> Self {
        CooccurrenceGraph {
            period,
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
        }
    }

    pub fn node_count(&self, d: Discipline) -> u64 {
        self.nodes.get(&d).copied().unwrap_or(0)
    }

    pub fn edge_weight(&self, a: Discipline, b: Discipline) -> u64 {
        self.edges.get(&ordered(a, b)).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Adds one paper's reference-discipline union.
    pub fn add_paper(&mut self, paper: &DisciplineAssignment) {
        let members: Vec<Discipline> = paper.reference_union().iter().collect();
        for (i, &a) in members.iter().enumerate() {
            *self.nodes.entry(a).or_default() += 1;
            for &b in &members[i + 1..] {
                *self.edges.entry(ordered(a, b)).or_default() += 1;
            }
        }
    }

    /// Keeps the `max_nodes` most frequent disciplines (ties by code order)
    /// and the edges among them.
    pub fn top_nodes(&self, max_nodes: usize) -> CooccurrenceGraph {
        if self.nodes.len() <= max_nodes {
            return self.clone();
        }
        let mut ranked: Vec<(Discipline, u64)> = self.nodes.iter().map(|(d, c)| (*d, *c)).collect();
        ranked.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
        let keep: BTreeMap<Discipline, u64> = ranked.into_iter().take(max_nodes).collect();
        let edges = self
            .edges
            .iter()
            .filter(|((a, b), _)| keep.contains_key(a) && keep.contains_key(b))
            .map(|(k, w)| (*k, *w))
            .collect();
        CooccurrenceGraph {
            period: self.period,
            nodes: keep,
            edges,
        }
    }
}

impl Add for &CooccurrenceGraph {
    type Output = CooccurrenceGraph;

    /// Node- and edge-wise sum; the period of the left operand is kept.
    fn add(self, other: &CooccurrenceGraph) -> CooccurrenceGraph {
        let mut out = self.clone();
        for (d, c) in &other.nodes {
            *out.nodes.entry(*d).or_default() += c;
        }
        for (e, w) in &other.edges {
            *out.edges.entry(*e).or_default() += w;
        }
        out
    }
}

/// Co-occurrence graph of the given papers. Papers with fewer than two
/// disciplines add nodes only.
pub fn build_cooccurrence<'a, I>(papers: I, period: Period) -> CooccurrenceGraph
where
    I: IntoIterator<Item = &'a DisciplineAssignment>,
{
    let mut g = CooccurrenceGraph::empty(period);
    for p in papers {
        g.add_paper(p);
    }
    g
}

/// Co-occurrence graph reweighted by cosine similarity of adjacency rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    /// Node order used by `graph`.
    pub nodes: Vec<Discipline>,
    pub graph: WeightedGraph,
    /// `(i, j, similarity)` with `i < j`, positions into `nodes`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl SimilarityGraph {
    pub fn similarity(&self, a: Discipline, b: Discipline) -> Option<f64> {
        let ia = self.nodes.iter().position(|&d| d == a)?;
        let ib = self.nodes.iter().position(|&d| d == b)?;
        let w = self.graph.weight(ia, ib);
        (w > 0.0).then_some(w)
    }
}

/// Adjacency rows over the graph's nodes, with the node count on the diagonal.
fn adjacency_rows(g: &CooccurrenceGraph) -> (Vec<Discipline>, Vec<Vec<f64>>) {
    let nodes: Vec<Discipline> = g.nodes.keys().copied().collect();
    let rows = nodes
        .iter()
        .map(|&a| {
            nodes
                .iter()
                .map(|&b| {
                    if a == b {
                        g.node_count(a) as f64
                    } else {
                        g.edge_weight(a, b) as f64
                    }
                })
                .collect()
        })
        .collect();
    (nodes, rows)
}

/// Cosine similarity of every node pair's adjacency rows (self-weight =
/// node count), whether or not they share an edge.
pub fn similarity_matrix(g: &CooccurrenceGraph) -> (Vec<Discipline>, Vec<Vec<f64>>) {
    let (nodes, rows) = adjacency_rows(g);
    let sims = rows
        .iter()
        .map(|a| rows.iter().map(|b| cosine(a, b).unwrap_or(0.0)).collect())
        .collect();
    (nodes, sims)
}

/// Reweights each co-occurrence edge by the cosine similarity of its
/// endpoints' adjacency rows; edges with zero similarity are dropped.
pub fn edge_similarity(g: &CooccurrenceGraph) -> SimilarityGraph {
    let (nodes, rows) = adjacency_rows(g);
    let index = |d: Discipline| nodes.iter().position(|&x| x == d).expect("edge endpoint is a node");
    let mut edges = Vec::new();
    for &(a, b) in g.edges.keys() {
        let (i, j) = (index(a), index(b));
        if let Some(s) = cosine(&rows[i], &rows[j]) {
            if s > 0.0 {
                edges.push((i, j, s));
            }
        }
    }
    SimilarityGraph {
        graph: WeightedGraph::from_edges(nodes.len(), &edges),
        nodes,
        edges,
    }
}

/// Text label of a community: the endpoints of its heaviest internal edge,
/// more frequent discipline first, or a single code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CommunityLabel(pub String);

impl fmt::Display for CommunityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The internal edge with the largest raw co-occurrence weight names the
/// community; ties go to the alphabetically smallest code pair. Within the
/// label the discipline with the higher node count comes first (alphabetical
/// on equal counts). Singletons, and communities without internal edges, are
/// named by their most frequent member.
pub fn label_community(members: &[Discipline], g: &CooccurrenceGraph) -> CommunityLabel {
    assert!(!members.is_empty(), "community must be nonempty");
    let alpha = |a: Discipline, b: Discipline| {
        if a.abbrev() <= b.abbrev() {
            (a, b)
        } else {
            (b, a)
        }
    };
    let mut best: Option<(u64, (Discipline, Discipline))> = None;
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            let w = g.edge_weight(a, b);
            if w == 0 {
                continue;
            }
            let pair = alpha(a, b);
            let better = match best {
                None => true,
                Some((bw, bp)) => w > bw || (w == bw && (pair.0.abbrev(), pair.1.abbrev()) < (bp.0.abbrev(), bp.1.abbrev())),
            };
            if better {
                best = Some((w, pair));
            }
        }
    }
    match best {
        Some((_, (a, b))) => {
            let (first, second) = if g.node_count(b) > g.node_count(a) { (b, a) } else { (a, b) };
            CommunityLabel(format!("{}&{}", first.abbrev(), second.abbrev()))
        }
        None => {
            let top = members
                .iter()
                .copied()
                .max_by(|x, y| g.node_count(*x).cmp(&g.node_count(*y)).then(y.abbrev().cmp(x.abbrev())))
                .expect("nonempty");
            CommunityLabel(top.abbrev().to_string())
        }
    }
}

/// One detected community in a period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Community {
    pub id: usize,
    /// Member disciplines with their node counts in the period.
    pub members: BTreeMap<Discipline, u64>,
    pub label: CommunityLabel,
}

impl Community {
    /// Sum of member occurrence counts.
    pub fn size(&self) -> u64 {
        self.members.values().sum()
    }
}

/// A period's co-occurrence graph with its partition and labeled communities.
#[derive(Debug, Clone)]
pub struct PeriodNetwork {
    pub graph: CooccurrenceGraph,
    pub similarity: SimilarityGraph,
    pub partition: Partition,
    pub communities: Vec<Community>,
}

pub fn communities_of(partition: &Partition, nodes: &[Discipline], g: &CooccurrenceGraph) -> Vec<Community> {
    partition
        .communities()
        .into_iter()
        .enumerate()
        .map(|(id, idx)| {
            let members: Vec<Discipline> = idx.iter().map(|&i| nodes[i]).collect();
            Community {
                id,
                label: label_community(&members, g),
                members: members.iter().map(|&d| (d, g.node_count(d))).collect(),
            }
        })
        .collect()
}

/// Similarity reweighting, community detection, and labeling for one period.
pub fn analyze_period(graph: CooccurrenceGraph, seed: u64, resolution: f64) -> PeriodNetwork {
    let similarity = edge_similarity(&graph);
    let partition = detect_communities(&similarity.graph, seed, resolution);
    let communities = communities_of(&partition, &similarity.nodes, &graph);
    PeriodNetwork {
        graph,
        similarity,
        partition,
        communities,
    }
}
