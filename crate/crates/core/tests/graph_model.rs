use geocomm::graph::{pair_count, pair_index, sample_null, Latents};
use geocomm::sphere::{inner_product_tail, solve_threshold};
use geocomm::stats::signed_triangle_count;
use geocomm::{Graph, ModelParams, Sampler, Seed};
use proptest::prelude::*;

fn binomial_pmf(n: usize, p: f64, k: usize) -> f64 {
    let ln = libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
        + k as f64 * p.ln()
        + (n - k) as f64 * (1.0 - p).ln();
    ln.exp()
}

/// Pearson statistic with cells pooled until each expects at least 5, and
/// its degrees of freedom.
fn chi_square(observed: &[usize], expected: &[f64]) -> (f64, usize) {
    let mut cells = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&ob, &ex) in observed.iter().zip(expected) {
        o += ob as f64;
        e += ex;
        if e >= 5.0 {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += o;
        last.1 += e;
    }
    let stat = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    (stat, cells.len() - 1)
}

/// Upper 0.1% point of χ²_df by the Wilson–Hilferty approximation.
fn chi_square_critical(df: usize) -> f64 {
    let k = df as f64;
    let z = 3.090_232_306_167_813;
    k * (1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt()).powi(3)
}

#[test]
fn pair_index_enumerates_pairs_in_order() {
    for n in 1..30 {
        let mut expect = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), expect);
                expect += 1;
            }
        }
        assert_eq!(expect, pair_count(n));
    }
}

#[test]
fn null_edge_frequency_and_pair_independence() {
    let (n, p, draws) = (40, 0.3, 2000);
    let mut rng = Seed(1).stream(0);
    let (mut edges, mut both, mut pairs) = (0usize, 0usize, 0usize);
    for _ in 0..draws {
        let g = sample_null(n, p, &mut rng);
        edges += g.edge_count();
        for v in 1..n - 1 {
            pairs += 1;
            both += (g.has_edge(0, v) && g.has_edge(0, v + 1)) as usize;
        }
    }
    let total = (draws * pair_count(n)) as f64;
    let freq = edges as f64 / total;
    assert!((freq - p).abs() < 4.0 * (p * (1.0 - p) / total).sqrt());
    let joint = both as f64 / pairs as f64;
    let q = p * p;
    assert!((joint - q).abs() < 5.0 * (q * (1.0 - q) / pairs as f64).sqrt());
}

fn geometric_edge_frequency(p: f64, d: usize, n: usize, draws: usize, seed: u64) -> (f64, f64) {
    let sampler = Sampler::new(ModelParams::new(n, p, d, n as f64).unwrap()).unwrap();
    let mut rng = Seed(seed).stream(0);
    let edges: usize = (0..draws).map(|_| sampler.full_geometric(&mut rng).graph.edge_count()).sum();
    let total = (draws * pair_count(n)) as f64;
    (edges as f64 / total, total)
}

#[test]
fn full_geometric_edge_marginal_is_p() {
    // Geometric edges are pairwise independent, so the edge count has
    // binomial variance.
    for &(p, d, n) in &[(0.1, 5usize, 4usize), (0.3, 50, 6), (0.3, 3, 6), (0.5, 1_000_000, 6), (0.1, 100_000_000, 4)] {
        let draws = 40_000;
        let (freq, _) = geometric_edge_frequency(p, d, n, draws, 17 + d as u64);
        let sd = (p * (1.0 - p) / (draws * pair_count(n)) as f64).sqrt();
        assert!((freq - p).abs() < 4.0 * sd, "p={p} d={d}: {freq}");
    }
}

#[test]
fn latent_inner_products_follow_the_law() {
    // One pair per draw, through both the direct (d ≤ s) and Bartlett paths.
    for &(d, s) in &[(6usize, 8usize), (16, 3), (400, 2)] {
        let t = 0.15;
        let q = inner_product_tail(t, d).unwrap();
        let mut rng = Seed(2).stream(d as u64);
        let draws = 60_000;
        let hits = (0..draws).filter(|_| Latents::sample((0..s).collect(), d, &mut rng).inner(0, 1) >= t).count();
        let sd = (q * (1.0 - q) / draws as f64).sqrt();
        assert!((hits as f64 / draws as f64 - q).abs() < 4.0 * sd, "d={d} s={s}");
    }
}

#[test]
fn latent_triple_product_moment() {
    // E[<u,v><v,w><w,u>] = tr(I/d · I/d · I/d)·d⁰ = 1/d².
    for &(d, s) in &[(3usize, 5usize), (12, 3)] {
        let mut rng = Seed(8).stream(d as u64);
        let draws = 200_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..draws {
            let l = Latents::sample((0..s).collect(), d, &mut rng);
            let x = l.inner(0, 1) * l.inner(1, 2) * l.inner(2, 0);
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / draws as f64;
        let se = ((sum_sq / draws as f64 - mean * mean) / draws as f64).sqrt();
        let target = 1.0 / (d * d) as f64;
        assert!((mean - target).abs() < 4.0 * se, "d={d}: {mean} vs {target}");
    }
}

#[test]
fn latent_rows_are_unit_vectors() {
    let mut rng = Seed(4).stream(0);
    for &(d, s) in &[(5usize, 9usize), (1000, 12), (100_000_000, 30)] {
        let l = Latents::sample((0..s).collect(), d, &mut rng);
        assert_eq!(l.ambient_dim(), d);
        assert_eq!(l.coord_dim(), d.min(s));
        for i in 0..s {
            assert!((l.inner(i, i) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn huge_dimension_signed_triangles_are_centred() {
    let (n, p) = (30, 0.5);
    let sampler = Sampler::new(ModelParams::new(n, p, 1_000_000, n as f64).unwrap()).unwrap();
    let trials = 3000;
    let mut sum = 0.0;
    for t in 0..trials {
        let g = sampler.full_geometric(&mut Seed(21).stream(t)).graph;
        sum += signed_triangle_count(&g, p);
    }
    let var = 4060.0 * (p * (1.0 - p)).powi(3);
    let se = (var / trials as f64).sqrt();
    assert!((sum / trials as f64).abs() < 4.0 * se);
}

#[test]
fn empty_community_is_the_null_model() {
    let (n, p) = (20, 0.3);
    let sampler = Sampler::new(ModelParams::new(n, p, 8, 0.0).unwrap()).unwrap();
    let mut rng = Seed(3).stream(0);
    let draws = 5000;
    let counts: Vec<f64> = (0..draws)
        .map(|_| {
            let s = sampler.planted(&mut rng);
            assert_eq!(s.community_size(), 0);
            s.graph.edge_count() as f64
        })
        .collect();
    let m = pair_count(n) as f64;
    let mean = counts.iter().sum::<f64>() / draws as f64;
    let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (draws - 1) as f64;
    let var0 = m * p * (1.0 - p);
    assert!((mean - m * p).abs() < 4.0 * (var0 / draws as f64).sqrt());
    assert!((var / var0 - 1.0).abs() < 0.1);
}

#[test]
fn full_community_matches_full_geometric() {
    let params = ModelParams::new(12, 0.2, 10, 12.0).unwrap();
    let sampler = Sampler::new(params).unwrap();
    let planted = sampler.planted(&mut Seed(5).stream(0));
    assert_eq!(planted.community_size(), 12);
    let tau = solve_threshold(0.2, 10).unwrap().tau;
    for (i, j) in (0..12).flat_map(|i| (i + 1..12).map(move |j| (i, j))) {
        let a = planted.latents.get(i).unwrap();
        let b = planted.latents.get(j).unwrap();
        let ip: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        assert_eq!(planted.graph.has_edge(i, j), ip >= tau);
    }
}

#[test]
fn community_size_is_binomial() {
    let (n, k) = (50, 15.0);
    let sampler = Sampler::new(ModelParams::new(n, 0.4, 6, k).unwrap()).unwrap();
    let mut rng = Seed(6).stream(0);
    let draws = 6000;
    let mut counts = vec![0usize; n + 1];
    for _ in 0..draws {
        counts[sampler.planted(&mut rng).community_size()] += 1;
    }
    let expected: Vec<f64> = (0..=n).map(|s| draws as f64 * binomial_pmf(n, k / n as f64, s)).collect();
    let (stat, df) = chi_square(&counts, &expected);
    assert!(stat < chi_square_critical(df), "χ² = {stat} on {df} df");
}

#[test]
fn planted_edges_keep_marginal_p() {
    let (n, p) = (8, 0.3);
    let sampler = Sampler::new(ModelParams::new(n, p, 6, 4.0).unwrap()).unwrap();
    let mut rng = Seed(9).stream(0);
    let draws = 100_000;
    let mut hits = vec![0usize; pair_count(n)];
    for _ in 0..draws {
        let g = sampler.planted(&mut rng).graph;
        for (i, j) in g.edges() {
            hits[pair_index(n, i, j)] += 1;
        }
    }
    let sd = (p * (1.0 - p) / draws as f64).sqrt();
    for h in hits {
        assert!((h as f64 / draws as f64 - p).abs() < 3.0 * sd);
    }
}

#[test]
fn member_and_outsider_degrees_agree() {
    let (n, p) = (50, 0.3);
    let sampler = Sampler::new(ModelParams::new(n, p, 8, 25.0).unwrap()).unwrap();
    let (mut inside, mut outside) = (Vec::new(), Vec::new());
    let mut t = 0;
    while inside.len() < 10_000 || outside.len() < 10_000 {
        let s = sampler.planted(&mut Seed(15).stream(t));
        t += 1;
        if let Some(v) = s.community.iter().position(|&c| c) {
            if inside.len() < 10_000 {
                inside.push(s.graph.degree(v));
            }
        }
        if let Some(v) = s.community.iter().position(|&c| !c) {
            if outside.len() < 10_000 {
                outside.push(s.graph.degree(v));
            }
        }
    }
    let cdf = |xs: &[usize], x: usize| xs.iter().filter(|&&y| y <= x).count() as f64 / xs.len() as f64;
    let ks = (0..n).map(|x| (cdf(&inside, x) - cdf(&outside, x)).abs()).fold(0.0, f64::max);
    assert!(ks <= 0.02, "KS distance {ks}");
}

#[test]
fn vertex_degree_is_exactly_binomial() {
    // Given a member's latent, its cap has mass p and the other latents are
    // independent, so the degree law is Binomial(n − 1, p) in every model.
    let (n, p) = (50, 0.3);
    let sampler = Sampler::new(ModelParams::new(n, p, 8, 30.0).unwrap()).unwrap();
    let draws = 10_000;
    let mut counts = vec![0usize; n];
    for t in 0..draws {
        counts[sampler.planted(&mut Seed(10).stream(t)).graph.degree(0)] += 1;
    }
    let expected: Vec<f64> = (0..n).map(|s| draws as f64 * binomial_pmf(n - 1, p, s)).collect();
    let (stat, df) = chi_square(&counts, &expected);
    assert!(stat < chi_square_critical(df), "χ² = {stat} on {df} df");
}

#[test]
fn fixed_community_places_geometry_on_the_given_set() {
    let params = ModelParams::new(16, 0.25, 6, 8.0).unwrap();
    let sampler = Sampler::new(params).unwrap();
    let community = [1usize, 4, 5, 9, 13];
    let s = sampler.planted_with_community(&community, &mut Seed(12).stream(0)).unwrap();
    assert_eq!(s.members(), &community);
    assert!(sampler.planted_with_community(&[3, 3], &mut Seed(12).stream(0)).is_err());
    assert!(sampler.planted_with_community(&[16], &mut Seed(12).stream(0)).is_err());
    let fixed = sampler.planted_fixed_size(7, &mut Seed(12).stream(1)).unwrap();
    assert_eq!(fixed.community_size(), 7);
    assert!(sampler.planted_fixed_size(17, &mut Seed(12).stream(1)).is_err());
}

#[test]
fn fixed_community_mixture_reproduces_planted_triangle_mean() {
    // E_P f = Σ_s P(|S| = s) E_{P_s} f with f depending on S only through |S|.
    let (n, p, d, k) = (12, 0.5, 4, 6.0);
    let params = ModelParams::new(n, p, d, k).unwrap();
    let sampler = Sampler::new(params).unwrap();
    let trials = 20_000;
    let direct: f64 =
        (0..trials).map(|t| signed_triangle_count(&sampler.planted(&mut Seed(13).stream(t)).graph, p)).sum::<f64>()
            / trials as f64;
    let mut mixture = 0.0;
    let per = 2000;
    for s in 3..=n {
        let w = binomial_pmf(n, k / n as f64, s);
        let m: f64 = (0..per)
            .map(|t| {
                signed_triangle_count(
                    &sampler.planted_fixed_size(s, &mut Seed(14 + s as u64).stream(t)).unwrap().graph,
                    p,
                )
            })
            .sum::<f64>()
            / per as f64;
        mixture += w * m;
    }
    let var = 220.0 * (p * (1.0 - p)).powi(3);
    let se = (var / trials as f64 + var / per as f64).sqrt();
    assert!((direct - mixture).abs() < 4.0 * se, "{direct} vs {mixture}");
    assert!(direct > 0.0);
}

#[test]
fn streams_are_reproducible_and_distinct() {
    let sampler = Sampler::new(ModelParams::new(30, 0.4, 7, 12.0).unwrap()).unwrap();
    let a = sampler.planted(&mut Seed(99).stream(4)).graph;
    let b = sampler.planted(&mut Seed(99).stream(4)).graph;
    let c = sampler.planted(&mut Seed(99).stream(5)).graph;
    let e = sampler.planted(&mut Seed(100).stream(4)).graph;
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_ne!(a, e);
    assert_ne!(Seed(99).derive(1), Seed(99).derive(2));
}

#[test]
fn sampler_rejects_bad_parameters() {
    assert!(ModelParams::new(0, 0.3, 5, 0.0).is_err());
    assert!(ModelParams::new(10, 0.0, 5, 1.0).is_err());
    assert!(ModelParams::new(10, 1.5, 5, 1.0).is_err());
    assert!(ModelParams::new(10, 0.3, 5, 11.0).is_err());
    assert!(ModelParams::new(10, 0.3, 5, -1.0).is_err());
    assert!(Sampler::new(ModelParams::new(10, 0.3, 2, 5.0).unwrap()).is_err());
}

#[test]
fn density_one_gives_complete_graph() {
    let sampler = Sampler::new(ModelParams::new(9, 1.0, 5, 4.0).unwrap()).unwrap();
    let g = sampler.planted(&mut Seed(1).stream(0)).graph;
    assert_eq!(g, Graph::complete(9));
}

#[test]
fn k_bounds() {
    let params = ModelParams::new(100, 0.5, 8, 50.0).unwrap();
    assert_eq!(params.k_minus(), 45);
    assert_eq!(params.k_plus(), 55);
    let params = ModelParams::new(20, 0.5, 8, 7.0).unwrap();
    assert_eq!(params.k_minus(), 6);
    assert_eq!(params.k_plus(), 8);
}

#[test]
fn malformed_edge_lists_are_rejected() {
    for bad in [
        "",
        "3",
        "3\n1\n0 0\n",
        "3\n1\n0 3\n",
        "3\n2\n0 1\n0 1\n",
        "3\n1\n1 0\n",
        "3\n1\n0 1\n1 2\n",
        "3\n1\n0 1 2\n",
        "x\n0\n",
    ] {
        assert!(Graph::from_edge_list(bad).is_err(), "{bad:?}");
    }
    assert_eq!(Graph::from_edge_list("3\n1\n\n0 2\n").unwrap(), Graph::from_edges(3, [(0, 2)]).unwrap());
}

#[test]
fn malformed_binary_is_rejected() {
    let g = Graph::from_edges(5, [(0, 1), (3, 4)]).unwrap();
    let mut bytes = g.to_bytes();
    assert_eq!(bytes.len(), 8 + 2);
    assert!(Graph::from_bytes(&bytes[..9]).is_err());
    assert!(Graph::from_bytes(&bytes[..5]).is_err());
    bytes[9] |= 0x80;
    assert!(Graph::from_bytes(&bytes).is_err());
}

fn arb_graph() -> impl Strategy<Value = Graph> {
    (0usize..40).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), pair_count(n)).prop_map(move |bits| {
            let mut it = bits.into_iter();
            Graph::from_fn(n, |_, _| it.next().unwrap())
        })
    })
}

proptest! {
    #[test]
    fn pair_index_is_a_bijection(n in 2usize..200, a in 0usize..200, b in 0usize..200) {
        let (i, j) = (a % n, b % n);
        prop_assume!(i != j);
        let (i, j) = (i.min(j), i.max(j));
        let idx = pair_index(n, i, j);
        prop_assert!(idx < pair_count(n));
        let i2 = (0..n).find(|&r| pair_index(n, r, r + 1) <= idx && (r + 2 > n - 1 || pair_index(n, r + 1, r + 2) > idx)).unwrap();
        prop_assert_eq!(i2, i);
        prop_assert_eq!(idx - pair_index(n, i, i + 1) + i + 1, j);
    }

    #[test]
    fn edge_list_round_trip(g in arb_graph()) {
        prop_assert_eq!(Graph::from_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn binary_round_trip(g in arb_graph()) {
        let bytes = g.to_bytes();
        prop_assert_eq!(bytes.len(), 8 + pair_count(g.n()).div_ceil(8));
        prop_assert_eq!(Graph::from_bytes(&bytes).unwrap(), g);
    }

    #[test]
    fn permutation_preserves_degrees(g in arb_graph(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut Seed(seed).stream(0));
        let h = g.permuted(&perm);
        prop_assert_eq!(h.edge_count(), g.edge_count());
        for v in 0..g.n() {
            prop_assert_eq!(h.degree(perm[v]), g.degree(v));
        }
    }
}
