use idrkit_core::catalog::DisciplineAssignment;
use idrkit_core::cooccurrence::{build_cooccurrence, Community, CommunityLabel};
use idrkit_core::discipline::{Discipline, DisciplineSet};
use idrkit_core::louvain::{detect_communities, WeightedGraph};
use idrkit_core::streams::{align_streams, PeriodSlice};
use idrkit_core::Period;
use proptest::prelude::*;

/// Q straight from the definition with a dense adjacency matrix.
pub fn direct_modularity(n: usize, edges: &[(usize, usize, f64)], assign: &[usize]) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        a[i][j] += w;
        a[j][i] += w;
    }
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if assign[i] == assign[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Best modularity over every set partition (restricted growth strings).
fn exhaustive_best(n: usize, edges: &[(usize, usize, f64)]) -> (f64, Vec<usize>) {
    let mut rgs = vec![0usize; n];
    let mut best = (f64::NEG_INFINITY, rgs.clone());
    loop {
        let q = direct_modularity(n, edges, &rgs);
        if q > best.0 + 1e-12 {
            best = (q, rgs.clone());
        }
        // next restricted growth string
        let mut i = n - 1;
        loop {
            let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
            if i > 0 && rgs[i] <= max_prefix {
                rgs[i] += 1;
                for x in rgs.iter_mut().skip(i + 1) {
                    *x = 0;
                }
                break;
            }
            if i <= 1 {
                return best;
            }
            i -= 1;
        }
    }
}

fn two_cliques() -> Vec<(usize, usize, f64)> {
    let mut e = Vec::new();
    for base in [0, 5] {
        for i in 0..5 {
            for j in i + 1..5 {
                e.push((base + i, base + j, 1.0));
            }
        }
    }
    e.push((4, 5, 1.0));
    e
}

#[test]
fn exhaustive_search_agrees_on_two_cliques() {
    let edges = two_cliques();
    let (best_q, best) = exhaustive_best(10, &edges);
    assert_eq!(best, vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
    let g = WeightedGraph::from_edges(10, &edges);
    for seed in 0..10 {
        let p = detect_communities(&g, seed, 1.0);
        assert_eq!(p.assignment, best, "seed {seed}");
        assert!((p.modularity - best_q).abs() < 1e-9);
    }
}

#[test]
fn exhaustive_oracle_counts_bell_number() {
    // sanity check of the enumerator on B(5) = 52
    let mut count = 0;
    let n = 5;
    let mut rgs = vec![0usize; n];
    loop {
        count += 1;
        let mut i = n - 1;
        let done = loop {
            let m = rgs[..i].iter().copied().max().unwrap_or(0);
            if i > 0 && rgs[i] <= m {
                rgs[i] += 1;
                for x in rgs.iter_mut().skip(i + 1) {
                    *x = 0;
                }
                break false;
            }
            if i <= 1 {
                break true;
            }
            i -= 1;
        };
        if done {
            break;
        }
    }
    assert_eq!(count, 52);
}

fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..14).prop_flat_map(|n| {
        let edges = proptest::collection::vec((0..n, 0..n, 1u32..6), 0..40)
            .prop_map(|es| es.into_iter().filter(|(a, b, _)| a != b).map(|(a, b, w)| (a, b, w as f64)).collect());
        (Just(n), edges)
    })
}

proptest! {
    #[test]
    fn louvain_improves_on_singletons_and_is_deterministic((n, edges) in random_graph(), seed in 0u64..1000) {
        let g = WeightedGraph::from_edges(n, &edges);
        let p = detect_communities(&g, seed, 1.0);
        let singletons: Vec<usize> = (0..n).collect();
        prop_assert!(p.modularity >= direct_modularity(n, &edges, &singletons) - 1e-12);
        prop_assert!((p.modularity - direct_modularity(n, &edges, &p.assignment)).abs() < 1e-9);
        for w in p.level_modularity.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
        prop_assert_eq!(p.assignment.len(), n);
        let members: usize = p.communities().iter().map(Vec::len).sum();
        prop_assert_eq!(members, n);
        prop_assert!(p.communities().iter().all(|c| !c.is_empty()));
        prop_assert_eq!(detect_communities(&g, seed, 1.0), p);
    }
}

fn assignment(refs: Vec<Vec<usize>>) -> DisciplineAssignment {
    DisciplineAssignment {
        paper_id: "p".into(),
        citing: None,
        coverage: 1.0,
        references: refs
            .into_iter()
            .map(|r| Some(r.into_iter().map(|i| Discipline::ALL[i]).collect::<DisciplineSet>()))
            .collect(),
    }
}

fn papers() -> impl Strategy<Value = Vec<DisciplineAssignment>> {
    proptest::collection::vec(
        proptest::collection::vec(proptest::collection::vec(0usize..8, 1..3), 0..5).prop_map(assignment),
        0..12,
    )
}

proptest! {
    #[test]
    fn cooccurrence_is_additive_and_bounded(a in papers(), b in papers()) {
        let p = Period::Year(2000);
        let ga = build_cooccurrence(&a, p);
        let gb = build_cooccurrence(&b, p);
        let all: Vec<_> = a.iter().chain(&b).cloned().collect();
        let gab = build_cooccurrence(&all, p);
        prop_assert_eq!(&gab, &(&ga + &gb));
        for ((x, y), w) in &gab.edges {
            prop_assert!(x < y);
            prop_assert!(*w > 0);
            prop_assert!(*w <= gab.node_count(*x).min(gab.node_count(*y)));
        }
    }

    #[test]
    fn raising_threshold_never_adds_links(
        sizes in proptest::collection::vec(proptest::collection::vec((0usize..10, 1u64..6), 1..5), 2..8),
    ) {
        // alternate the generated communities over three periods
        let mut slices: Vec<PeriodSlice> = (0..3).map(|t| PeriodSlice { period: Period::Year(2000 + t), communities: vec![] }).collect();
        for (i, ms) in sizes.iter().enumerate() {
            let s = &mut slices[i % 3];
            let id = s.communities.len();
            s.communities.push(Community {
                id,
                members: ms.iter().map(|&(d, c)| (Discipline::ALL[d], c)).collect(),
                label: CommunityLabel(String::new()),
            });
        }
        let mut prev: Option<Vec<(usize, usize)>> = None;
        for step in 0..=10 {
            let g = align_streams(&slices, step as f64 / 10.0);
            for l in &g.links {
                let (a, b) = (&g.nodes[l.source], &g.nodes[l.target]);
                match (a.period, b.period) {
                    (Period::Year(x), Period::Year(y)) => prop_assert_eq!(y, x + 1),
                    _ => unreachable!(),
                }
            }
            let links: Vec<(usize, usize)> = g.links.iter().map(|l| (l.source, l.target)).collect();
            if let Some(p) = &prev {
                prop_assert!(links.iter().all(|l| p.contains(l)));
            }
            prev = Some(links);
        }
    }
}
