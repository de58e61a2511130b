use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use qcap_core::algebra_fp::{
    check_fits, frankl_wilson_q, haemers_matrix, multilinearize, rank_fp, FpMatrix, SignVector,
};
use qcap_core::alpha::{max_independent_set, verify_independent, Budget};
use qcap_core::bitgraph::{hamming_distance, strong_product, BitGraph, BitVertex, Graph, ProductVertex};
use qcap_core::channel::{canonical_channel, confusability_graph, partial_trace_first, SharedState};
use qcap_core::entcert::{cert_from_packing, classical_embedding, verify, IntMatrix};
use qcap_core::geometry::{clique_from_hadamard_h, ortho_rep_h, pack_cliques, PackOptions};
use qcap_core::hadamard::{find_hadamard, normalize, paley_one, sylvester};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_graph() -> impl Strategy<Value = BitGraph> {
    (1usize..=7).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |mask| {
            let edges: Vec<_> = pairs.iter().zip(&mask).filter(|(_, &m)| m).map(|(&e, _)| e).collect();
            BitGraph::from_edges(n, &edges, "R").unwrap()
        })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn strong_product_matches_definition(a in small_graph(), b in small_graph()) {
        let (na, nb) = (a.vertex_count(), b.vertex_count());
        let p = strong_product(Arc::new(a.clone()), Arc::new(b.clone())).unwrap();
        prop_assert_eq!(p.vertex_count(), na * nb);
        for u in 0..p.vertex_count() {
            let pu = p.vertex(u);
            prop_assert_eq!(p.index(&pu).unwrap(), u);
            for v in 0..p.vertex_count() {
                let pv = p.vertex(v);
                let close = |g: &BitGraph, x: usize, y: usize| x == y || g.is_adjacent(x, y);
                let want = u != v && close(&a, pu.parts[0], pv.parts[0]) && close(&b, pu.parts[1], pv.parts[1]);
                prop_assert_eq!(p.is_adjacent(u, v), want);
            }
        }
        let outside = ProductVertex { parts: vec![na, 0] };
        prop_assert!(p.index(&outside).is_err());
    }

    #[test]
    fn coordinate_permutations_are_automorphisms(perm in permutation(9), seed in any::<u64>()) {
        for g in [BitGraph::build_g(9).unwrap(), BitGraph::build_h(9).unwrap()] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..50 {
                let u = rand::Rng::random_range(&mut rng, 0..g.vertex_count());
                let v = rand::Rng::random_range(&mut rng, 0..g.vertex_count());
                let (x, y) = (g.vertex(u), g.vertex(v));
                let (px, py) = (x.permute(&perm), y.permute(&perm));
                let (pu, pv) = (g.index_of(&px).unwrap(), g.index_of(&py).unwrap());
                prop_assert_eq!(g.is_adjacent(u, v), g.is_adjacent(pu, pv));
            }
        }
    }

    #[test]
    fn even_translations_preserve_h(z in (0u64..1 << 9).prop_filter("even", |z| z.count_ones() % 2 == 0)) {
        let g = BitGraph::build_h(9).unwrap();
        let z = BitVertex::new(z, 9).unwrap();
        for u in (0..g.vertex_count()).step_by(7) {
            for v in (0..g.vertex_count()).step_by(11) {
                let tu = g.index_of(&g.vertex(u).translate(&z).unwrap()).unwrap();
                let tv = g.index_of(&g.vertex(v).translate(&z).unwrap()).unwrap();
                prop_assert_eq!(g.is_adjacent(u, v), g.is_adjacent(tu, tv));
            }
        }
    }

    #[test]
    fn distance_graph_invariants(n in prop::sample::select(vec![3usize, 5, 7, 9])) {
        let g = BitGraph::build_g(n).unwrap();
        let half = n.div_ceil(2) as u32;
        prop_assert!(g.vertices().windows(2).all(|w| w[0].bits() < w[1].bits()));
        for u in 0..g.vertex_count() {
            prop_assert_eq!(g.vertex(u).weight(), half);
            prop_assert!(!g.is_adjacent(u, u));
            for v in 0..g.vertex_count() {
                let d = hamming_distance(&g.vertex(u), &g.vertex(v)).unwrap();
                prop_assert_eq!(g.is_adjacent(u, v), d == half);
                prop_assert_eq!(g.is_adjacent(u, v), g.is_adjacent(v, u));
            }
        }
    }

    #[test]
    fn rank_is_bounded_by_shape(rows in 1usize..15, cols in 1usize..15, p in prop::sample::select(vec![3u32, 5, 7]), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = FpMatrix::random(p, rows, cols, &mut rng).unwrap();
        let r = rank_fp(&m);
        prop_assert!(r <= rows.min(cols));
        prop_assert_eq!(r, rank_fp(&m.transpose()));
    }

    #[test]
    fn rank_of_product_is_submultiplicative(v in 1usize..14, k in 1usize..8, p in prop::sample::select(vec![3u32, 5]), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = FpMatrix::random(p, v, k, &mut rng).unwrap();
        let t = FpMatrix::random(p, v, k, &mut rng).unwrap();
        let a = s.mul_transpose(&t).unwrap();
        prop_assert!(rank_fp(&a) <= rank_fp(&s).min(rank_fp(&t)));
    }

    #[test]
    fn rank_of_kronecker_square(n in 1usize..=12, p in prop::sample::select(vec![3u32, 5]), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rand::Rng::random_range(&mut rng, 1..=n);
        let a = FpMatrix::random(p, n, k, &mut rng).unwrap()
            .mul_transpose(&FpMatrix::random(p, n, k, &mut rng).unwrap()).unwrap();
        let r = rank_fp(&a);
        prop_assert_eq!(rank_fp(&a.kron(&a).unwrap()), r * r);
    }

    #[test]
    fn multilinear_form_agrees(seed in any::<u64>(), p in prop::sample::select(vec![3u32, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4 * p as usize - 1;
        let u = SignVector::random(n, &mut rng).unwrap();
        let q = frankl_wilson_q(u, p).unwrap();
        let poly = multilinearize(&q);
        prop_assert!(poly.degree() < p as usize);
        prop_assert!(poly.terms.values().all(|&c| c != 0 && c < p));
        prop_assert_eq!(poly.evaluate(&u), p - 1);
        for _ in 0..200 {
            let v = SignVector::random(n, &mut rng).unwrap();
            prop_assert_eq!(poly.evaluate(&v), q.evaluate(&v).unwrap());
        }
    }

    #[test]
    fn supermultiplicativity(g in small_graph()) {
        let a = max_independent_set(&g, Budget::unlimited(), None).unwrap();
        let p = strong_product(Arc::new(g.clone()), Arc::new(g.clone())).unwrap();
        let a2 = max_independent_set(&p, Budget::unlimited(), None).unwrap();
        prop_assert!(a2.exact && a.exact);
        prop_assert!(a2.lower >= a.lower * a.lower);
        prop_assert!(verify_independent(&p, &a2.witness).0);
        // Tiling the witness gives an explicit independent set of size α².
        let p = &p;
        let tiled: Vec<usize> = a.witness.iter()
            .flat_map(|&x| a.witness.iter().map(move |&y| p.index(&ProductVertex { parts: vec![x, y] }).unwrap()))
            .collect();
        prop_assert!(verify_independent(p, &tiled).0);
    }

    #[test]
    fn canonical_channel_roundtrip(g in small_graph()) {
        let c = canonical_channel(&g).unwrap();
        prop_assert_eq!(confusability_graph(&c).unwrap().edges(), g.edges());
    }

    #[test]
    fn classical_certificates_verify(g in small_graph()) {
        let a = max_independent_set(&g, Budget::unlimited(), None).unwrap();
        let (cert, report) = classical_embedding(&g, &a.witness).unwrap();
        prop_assert!(report.passed);
        prop_assert_eq!(cert.m, a.lower);
    }

    #[test]
    fn partial_trace_identities(dx in 1usize..4, dy in 1usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rand_mat = |r: usize| DMatrix::from_fn(r, r, |_, _| rand::Rng::random_range(&mut rng, -1.0..1.0));
        let a = rand_mat(dx);
        let b = rand_mat(dy);
        let m = rand_mat(dx * dy);
        let pt = partial_trace_first(&m, dx, dy).unwrap();
        prop_assert!((pt.trace() - m.trace()).abs() < 1e-12);
        let pk = partial_trace_first(&a.kronecker(&b), dx, dy).unwrap();
        prop_assert!((pk - &b * a.trace()).abs().max() < 1e-12);
    }

    #[test]
    fn entangled_state_identity(d in 1usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rand_sym = || {
            let m = DMatrix::from_fn(d, d, |_, _| rand::Rng::random_range(&mut rng, -1.0..1.0));
            &m * m.transpose()
        };
        let (a, b) = (rand_sym(), rand_sym());
        let explicit = SharedState::explicit(d).unwrap();
        let symbolic = SharedState::MaximallyEntangled(d);
        prop_assert!((explicit.joint(&a, &b) - symbolic.joint(&a, &b)).abs() < 1e-10);
    }

    #[test]
    fn hadamard_closure(k in 0u32..4, q in prop::sample::select(vec![3u64, 7, 11, 19, 23])) {
        let h = sylvester(k).unwrap().kronecker(&paley_one(q).unwrap());
        prop_assert!(h.verify());
        let n = normalize(&h);
        prop_assert!(n.is_normalized() && n.verify());
        prop_assert_eq!(normalize(&n), n);
    }
}

#[test]
fn fitting_matrix_matches_direct_evaluation() {
    let g = BitGraph::build_g(11).unwrap();
    let (a, fits, _) = haemers_matrix(&g, 3).unwrap();
    assert!(fits.fits);
    assert_eq!(fits.diagonal_values, vec![2]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let x = rand::Rng::random_range(&mut rng, 0..g.vertex_count());
        let y = rand::Rng::random_range(&mut rng, 0..g.vertex_count());
        let q = frankl_wilson_q(SignVector::from_vertex(&g.vertex(x)), 3).unwrap();
        assert_eq!(a.get(x, y), q.evaluate(&SignVector::from_vertex(&g.vertex(y))).unwrap());
    }
}

#[test]
fn independent_sets_respect_the_rank_bound() {
    let g = BitGraph::build_g(11).unwrap();
    let (a, _, _) = haemers_matrix(&g, 3).unwrap();
    let rank = rank_fp(&a);
    let r = max_independent_set(&g, Budget::nodes(20_000), None).unwrap();
    assert!(r.lower <= rank);
    assert!(r.upper >= r.lower);
    // The principal submatrix on an independent set is diagonal and nonzero.
    let idx = &r.witness;
    for &x in idx {
        for &y in idx {
            assert_eq!(a.get(x, y) != 0, x == y);
        }
    }
}

#[test]
fn fits_check_detects_wrong_graph() {
    let g = BitGraph::build_g(11).unwrap();
    let (a, _, _) = haemers_matrix(&g, 3).unwrap();
    let empty = BitGraph::from_edges(g.vertex_count(), &[], "empty").unwrap();
    let r = check_fits(&a, &empty).unwrap();
    assert!(!r.fits && r.diagonal_nonzero && !r.nonadjacent_zero);
}

#[test]
fn tampered_certificates_fail() {
    let h = BitGraph::build_h(7).unwrap();
    let seed = clique_from_hadamard_h(&find_hadamard(8).unwrap()).unwrap().vertices().unwrap();
    let pack = pack_cliques(&h, &seed, PackOptions::default()).unwrap();
    let (cert, report) = cert_from_packing(&ortho_rep_h(&h).unwrap(), &pack, &h).unwrap();
    assert!(report.passed);

    let mut bad = cert.clone();
    bad.rho.set(0, 0, bad.rho.get(0, 0) + 1);
    let r = verify(&bad, &h);
    assert!(!r.trace.passed && !r.condition1.passed);

    let mut bad = cert.clone();
    let key = *bad.ops.keys().next().unwrap();
    let mut m = IntMatrix::zeros(bad.dim);
    m.set(0, 1, 1);
    m.set(1, 0, 1);
    bad.ops.insert(key, m);
    assert!(!verify(&bad, &h).psd.passed);

    let mut bad = cert;
    bad.denominator += 1;
    assert!(!verify(&bad, &h).trace.passed);
}
