use std::collections::HashSet;

use geocomm::lowdeg::{enumerate_graphs_upto, fourier_coefficient_mc, low_degree_advantage, rgg_fourier_bound};
use geocomm::sphere::signed_cycle_expectation;
use geocomm::{ModelParams, Seed, SmallGraph};
use proptest::prelude::*;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn all_pairs(v: usize) -> Vec<(usize, usize)> {
    (0..v).flat_map(|i| (i + 1..v).map(move |j| (i, j))).collect()
}

/// Canonical form by brute force: the lexicographically smallest sorted edge
/// list over every relabeling.
fn brute_canonical(v: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    permutations(v)
        .into_iter()
        .map(|perm| {
            let mut e: Vec<(usize, usize)> =
                edges.iter().map(|&(i, j)| (perm[i].min(perm[j]), perm[i].max(perm[j]))).collect();
            e.sort_unstable();
            e
        })
        .min()
        .unwrap()
}

/// Isomorphism classes of graphs on exactly `v` vertices with no isolated
/// vertex, by brute force over labelled graphs.
fn brute_classes(v: usize) -> HashSet<Vec<(usize, usize)>> {
    let pairs = all_pairs(v);
    let mut classes = HashSet::new();
    for mask in 1u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
        let covered = (0..v).all(|x| edges.iter().any(|&(i, j)| i == x || j == x));
        if covered {
            classes.insert(brute_canonical(v, &edges));
        }
    }
    classes
}

fn params(n: usize, p: f64, d: usize, k: f64) -> ModelParams {
    ModelParams::new(n, p, d, k).unwrap()
}

#[test]
fn enumeration_matches_brute_force_classes() {
    let graphs = enumerate_graphs_upto(5).unwrap();
    for v in 2..=5 {
        let ours: HashSet<Vec<(usize, usize)>> =
            graphs.iter().filter(|h| h.vertices() == v).map(|h| brute_canonical(v, &h.edges())).collect();
        let count = graphs.iter().filter(|h| h.vertices() == v).count();
        assert_eq!(count, ours.len(), "duplicate classes at v={v}");
        assert_eq!(ours, brute_classes(v), "v={v}");
    }
    let cumulative: Vec<usize> = (2..=5).map(|v| enumerate_graphs_upto(v).unwrap().len()).collect();
    assert_eq!(cumulative, [1, 3, 10, 33]);
    assert!(enumerate_graphs_upto(6).is_err());
}

#[test]
fn canonical_code_is_invariant_under_every_permutation() {
    for v in 1..=4 {
        let pairs = all_pairs(v);
        let perms = permutations(v);
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
            let h = SmallGraph::from_edges(v, &edges).unwrap();
            for perm in &perms {
                let moved: Vec<(usize, usize)> = edges.iter().map(|&(i, j)| (perm[i], perm[j])).collect();
                let g = SmallGraph::from_edges(v, &moved).unwrap();
                assert_eq!(g.canonical_code(), h.canonical_code());
                assert!(g.is_isomorphic(&h));
            }
        }
    }
}

#[test]
fn distinct_classes_have_distinct_codes() {
    let graphs = enumerate_graphs_upto(5).unwrap();
    let codes: HashSet<(usize, u32)> = graphs.iter().map(|h| (h.vertices(), h.canonical_code())).collect();
    assert_eq!(codes.len(), graphs.len());
    assert!(!SmallGraph::path(3).is_isomorphic(&SmallGraph::star(3)));
}

#[test]
fn automorphism_and_embedding_counts() {
    let cases = [
        (SmallGraph::edge(), 2usize),
        (SmallGraph::triangle(), 6),
        (SmallGraph::path(3), 2),
        (SmallGraph::star(3), 6),
        (SmallGraph::cycle(4), 8),
        (SmallGraph::complete(4), 24),
        (SmallGraph::matching(2), 8),
        (SmallGraph::cycle(5), 10),
    ];
    for (h, aut) in cases {
        assert_eq!(h.automorphisms(), aut, "{:?}", h.edges());
        let n = 10usize;
        let falling: f64 = (0..h.vertices()).map(|i| (n - i) as f64).product();
        assert!((h.embeddings(n) - falling / aut as f64).abs() < 1e-9);
    }
    assert_eq!(SmallGraph::triangle().embeddings(10), 120.0);
    assert_eq!(SmallGraph::triangle().embeddings(2), 0.0);
}

#[test]
fn structural_queries() {
    let h = SmallGraph::from_edges(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
    assert!(h.is_forest() && h.has_tree_component() && !h.is_connected());
    assert_eq!(h.component_count(), 2);
    let k3_plus_edge = SmallGraph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
    assert!(!k3_plus_edge.is_forest() && k3_plus_edge.has_tree_component());
    let two_triangles_share = SmallGraph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
    assert!(!two_triangles_share.has_tree_component() && two_triangles_share.is_connected());
    assert!(SmallGraph::from_edges(3, &[(0, 0)]).is_err());
    assert!(SmallGraph::from_edges(3, &[(0, 3)]).is_err());
}

#[test]
fn forest_coefficients_vanish() {
    // Every forest with at most three edges and no isolated vertex.
    let forests = [
        SmallGraph::edge(),
        SmallGraph::path(2),
        SmallGraph::matching(2),
        SmallGraph::path(3),
        SmallGraph::star(3),
        SmallGraph::from_edges(5, &[(0, 1), (1, 2), (3, 4)]).unwrap(),
        SmallGraph::matching(3),
    ];
    let pr = params(40, 0.5, 8, 20.0);
    for (i, h) in forests.iter().enumerate() {
        assert!(h.is_forest());
        let est = fourier_coefficient_mc(h, &pr, 100_000, Seed(300 + i as u64)).unwrap();
        assert!(est.phi.abs() <= 3.0 * est.stderr, "{:?}: {} ± {}", h.edges(), est.phi, est.stderr);
    }
}

#[test]
fn disjoint_edges_factorize() {
    let pr = params(30, 0.3, 6, 30.0);
    let two = fourier_coefficient_mc(&SmallGraph::matching(2), &pr, 100_000, Seed(7)).unwrap();
    let one = fourier_coefficient_mc(&SmallGraph::edge(), &pr, 100_000, Seed(8)).unwrap();
    assert!((two.phi - one.phi * one.phi).abs() <= 3.0 * (two.stderr + 2.0 * one.phi.abs() * one.stderr));
}

#[test]
fn triangle_coefficient_matches_series() {
    let (p, d) = (0.5, 8);
    let pr = params(20, p, d, 20.0);
    let est = fourier_coefficient_mc(&SmallGraph::triangle(), &pr, 100_000, Seed(9)).unwrap();
    let exact = signed_cycle_expectation(3, p, d).unwrap().value / (p * (1.0 - p)).powf(1.5);
    assert!((est.phi - exact).abs() <= 3.0 * est.stderr, "{} vs {exact}", est.phi);
}

#[test]
fn triangle_coefficient_scales_with_membership_cubed() {
    let full = fourier_coefficient_mc(&SmallGraph::triangle(), &params(40, 0.5, 8, 40.0), 100_000, Seed(10)).unwrap();
    let part = fourier_coefficient_mc(&SmallGraph::triangle(), &params(40, 0.5, 8, 30.0), 100_000, Seed(11)).unwrap();
    let ratio = part.phi / full.phi;
    let se = ratio * ((part.stderr / part.phi).powi(2) + (full.stderr / full.phi).powi(2)).sqrt();
    assert!((ratio - 0.75f64.powi(3)).abs() <= 3.0 * se, "{ratio} ± {se}");
}

#[test]
fn advantage_skips_trees_and_sums_its_terms() {
    let pr = params(40, 0.5, 8, 20.0);
    let rep = low_degree_advantage(&pr, 4, 6, 5000, Seed(12)).unwrap();
    assert_eq!(rep.terms.len(), 10);
    let mut total = 0.0;
    for t in &rep.terms {
        assert_eq!(t.estimate.is_none(), t.graph.has_tree_component());
        total += t.contribution;
    }
    assert!((rep.value - total).abs() < 1e-12 * total.abs().max(1.0));
    assert_eq!(rep, low_degree_advantage(&pr, 4, 6, 5000, Seed(12)).unwrap());
    let capped = low_degree_advantage(&pr, 4, 3, 5000, Seed(12)).unwrap();
    assert!(capped.terms.iter().all(|t| t.graph.edge_count() <= 3));
}

#[test]
fn advantage_grows_with_community_size() {
    let small = low_degree_advantage(&params(30, 0.5, 8, 10.0), 3, 3, 40_000, Seed(13)).unwrap();
    let large = low_degree_advantage(&params(30, 0.5, 8, 30.0), 3, 3, 40_000, Seed(13)).unwrap();
    assert!(large.value > small.value + 3.0 * (large.stderr + small.stderr));
}

#[test]
fn fourier_bound_formula() {
    let h = SmallGraph::triangle();
    let d = 1_000_000usize;
    let b = rgg_fourier_bound(&h, 0.1, d, 1.0);
    let inner = 9.0 * (d as f64).ln().powf(1.5) / (d as f64).sqrt();
    assert!((b.value - 0.8f64.powi(3) * inner).abs() < 1e-15);
    assert!(b.precondition_holds);
    assert!(!rgg_fourier_bound(&h, 0.1, 16, 1.0).precondition_holds);
    assert!(!rgg_fourier_bound(&SmallGraph::matching(2), 0.1, d, 1.0).precondition_holds);
}

#[test]
fn estimator_rejects_bad_inputs() {
    let pr = params(3, 0.5, 8, 3.0);
    assert!(fourier_coefficient_mc(&SmallGraph::cycle(4), &pr, 10, Seed(1)).is_err());
    assert!(fourier_coefficient_mc(&SmallGraph::triangle(), &pr, 0, Seed(1)).is_err());
    assert!(fourier_coefficient_mc(&SmallGraph::triangle(), &params(3, 1.0, 8, 3.0), 10, Seed(1)).is_err());
}

proptest! {
    #[test]
    fn canonical_code_survives_relabeling(mask in 0u32..1024, seed in 0usize..120) {
        let pairs = all_pairs(5);
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
        let perm = &permutations(5)[seed];
        let moved: Vec<(usize, usize)> = edges.iter().map(|&(i, j)| (perm[i], perm[j])).collect();
        let a = SmallGraph::from_edges(5, &edges).unwrap();
        let b = SmallGraph::from_edges(5, &moved).unwrap();
        prop_assert_eq!(a.canonical_code(), b.canonical_code());
        prop_assert_eq!(a.automorphisms(), b.automorphisms());
    }
}
