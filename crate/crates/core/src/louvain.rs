//! Modularity-based community detection (Louvain local moves plus graph
//! aggregation) on undirected weighted graphs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Gains within this margin are treated as ties.
const EPS: f64 = 1e-12;

/// Undirected weighted graph on nodes `0..n`. Parallel edges are summed;
/// self-loops count once toward their node's degree per endpoint.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    adj: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph {
            n,
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut g = WeightedGraph::new(n);
        for &(a, b, w) in edges {
            g.add_edge(a, b, w);
        }
        g
    }

    /// Adds `w` to edge `{a, b}`. Nonpositive weights are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize, w: f64) {
        assert!(a < self.n && b < self.n, "edge endpoint out of range");
        if w.is_nan() || w <= 0.0 {
            return;
        }
        Self::bump(&mut self.adj[a], b, w);
        if a != b {
            Self::bump(&mut self.adj[b], a, w);
        }
    }

    fn bump(list: &mut Vec<(usize, f64)>, to: usize, w: f64) {
        match list.iter_mut().find(|(t, _)| *t == to) {
            Some((_, x)) => *x += w,
            None => list.push((to, w)),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, a: usize) -> &[(usize, f64)] {
        &self.adj[a]
    }

    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.adj[a].iter().find(|(t, _)| *t == b).map_or(0.0, |(_, w)| *w)
    }

    /// Adjacency-matrix entry `A_ab`; a self-loop of weight `w` gives `A_aa = 2w`.
    fn a(&self, a: usize, b: usize) -> f64 {
        let w = self.weight(a, b);
        if a == b {
            2.0 * w
        } else {
            w
        }
    }

    /// `k_a = sum_b A_ab`.
    pub fn degree(&self, a: usize) -> f64 {
        self.adj[a]
            .iter()
            .map(|&(t, w)| if t == a { 2.0 * w } else { w })
            .sum()
    }

    /// `2m`, the sum of all degrees.
    pub fn total_degree(&self) -> f64 {
        (0..self.n).map(|a| self.degree(a)).sum()
    }
}

/// `Q = (1/2m) sum_ij [A_ij - gamma k_i k_j / 2m] delta(c_i, c_j)`.
/// Zero for graphs without weight.
pub fn modularity(g: &WeightedGraph, assignment: &[usize], resolution: f64) -> f64 {
    assert_eq!(assignment.len(), g.node_count());
    let two_m = g.total_degree();
    if two_m <= 0.0 {
        return 0.0;
    }
    let communities = assignment.iter().copied().max().map_or(0, |c| c + 1);
    let mut internal = vec![0.0; communities];
    let mut total = vec![0.0; communities];
    for a in 0..g.node_count() {
        total[assignment[a]] += g.degree(a);
        for &(b, _) in g.neighbors(a) {
            if assignment[a] == assignment[b] {
                internal[assignment[a]] += g.a(a, b);
            }
        }
    }
    internal
        .iter()
        .zip(&total)
        .map(|(inn, tot)| inn / two_m - resolution * (tot / two_m).powi(2))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    /// Community id per node, numbered `0..` in order of each community's lowest node.
    pub assignment: Vec<usize>,
    pub modularity: f64,
    pub seed: u64,
    pub resolution: f64,
    /// Modularity after each aggregation level, in order.
    pub level_modularity: Vec<f64>,
}

impl Partition {
    pub fn community_count(&self) -> usize {
        self.assignment.iter().copied().max().map_or(0, |c| c + 1)
    }

    /// Member nodes of each community, ascending.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.community_count()];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

/// Renumbers communities by their lowest member.
pub fn canonical_labels(assignment: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    assignment
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// Greedy modularity optimization.
///
/// Each level visits nodes in a seeded shuffled order and moves each one to
/// the neighboring community with the largest modularity gain, repeating
/// sweeps until nothing moves; a node moves only on a strict improvement, and
/// equal gains go to the lowest community id. Communities are then collapsed
/// into nodes and the process repeats until a level makes no move.
pub fn detect_communities(g: &WeightedGraph, seed: u64, resolution: f64) -> Partition {
    assert!(resolution > 0.0, "resolution must be positive");
    let n = g.node_count();
    let singletons: Vec<usize> = (0..n).collect();
    if g.total_degree() <= 0.0 {
        return Partition {
            assignment: singletons,
            modularity: 0.0,
            seed,
            resolution,
            level_modularity: vec![],
        };
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership = singletons;
    let mut level_graph = g.clone();
    let mut level_modularity = Vec::new();
    loop {
        let (local, moved) = one_level(&level_graph, resolution, &mut rng);
        if !moved {
            break;
        }
        let local = canonical_labels(&local);
        for m in membership.iter_mut() {
            *m = local[*m];
        }
        level_modularity.push(modularity(g, &membership, resolution));
        level_graph = aggregate(&level_graph, &local);
    }

    let assignment = canonical_labels(&membership);
    Partition {
        modularity: modularity(g, &assignment, resolution),
        assignment,
        seed,
        resolution,
        level_modularity,
    }
}

fn one_level(g: &WeightedGraph, resolution: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = g.node_count();
    let two_m = g.total_degree();
    let degree: Vec<f64> = (0..n).map(|a| g.degree(a)).collect();
    let mut community: Vec<usize> = (0..n).collect();
    let mut comm_total = degree.clone();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut any_move = false;
    let mut weights_to = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    loop {
        let mut moved = false;
        for &node in &order {
            let own = community[node];
            let k = degree[node];

            for &(nb, w) in g.neighbors(node) {
                if nb == node {
                    continue;
                }
                let c = community[nb];
                if weights_to[c] == 0.0 {
                    touched.push(c);
                }
                weights_to[c] += w;
            }

            comm_total[own] -= k;
            let gain = |c: usize, w_to: f64| w_to - resolution * comm_total[c] * k / two_m;
            let stay = gain(own, weights_to[own]);
            let mut best = own;
            let mut best_gain = stay;
            for &c in &touched {
                let gc = gain(c, weights_to[c]);
                if gc > best_gain + EPS || ((gc - best_gain).abs() <= EPS && c < best && gc > stay + EPS) {
                    best = c;
                    best_gain = gc;
                }
            }
            comm_total[best] += k;
            if best != own {
                community[node] = best;
                moved = true;
                any_move = true;
            }

            for &c in &touched {
                weights_to[c] = 0.0;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
    }
    (community, any_move)
}

/// Collapses each community into one node; internal weight becomes a self-loop.
fn aggregate(g: &WeightedGraph, community: &[usize]) -> WeightedGraph {
    let k = community.iter().copied().max().map_or(0, |c| c + 1);
    let mut out = WeightedGraph::new(k);
    for a in 0..g.node_count() {
        for &(b, w) in g.neighbors(a) {
            // each non-loop edge is seen from both ends
            if a < b {
                out.add_edge(community[a], community[b], w);
            } else if a == b {
                out.add_edge(community[a], community[a], w);
            }
        }
    }
    out
}
