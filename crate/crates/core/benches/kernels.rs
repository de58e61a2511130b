//! Parallel against sequential timings of the data-parallel kernels.
//!
//! With the default `parallel` feature each kernel runs inside a one-thread
//! rayon pool and inside the default pool. Building with
//! `--no-default-features` runs the plain sequential code path instead.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qcap_core::algebra_fp::{build_st, rank_fp, FpMatrix};
use qcap_core::bitgraph::BitGraph;
use qcap_core::channel::{canonical_channel, protocol_from_cert};
use qcap_core::entcert::{cert_from_packing, verify, EntCert};
use qcap_core::geometry::{clique_from_hadamard_h, ortho_rep_h, pack_cliques, PackOptions};
use qcap_core::hadamard::{find_hadamard, paley_one};

/// `(label, pool)` pairs to time each kernel under.
#[cfg(feature = "parallel")]
fn modes() -> Vec<(String, rayon::ThreadPool)> {
    let default = rayon::current_num_threads();
    let build = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    vec![("threads-1".into(), build(1)), (format!("threads-{default}"), build(default))]
}

#[cfg(feature = "parallel")]
fn in_modes<F: Fn() + Sync>(c: &mut Criterion, group: &str, f: F) {
    let mut g = c.benchmark_group(group);
    for (label, pool) in modes() {
        g.bench_function(BenchmarkId::from_parameter(label), |b| b.iter(|| pool.install(&f)));
    }
    g.finish();
}

#[cfg(not(feature = "parallel"))]
fn in_modes<F: Fn() + Sync>(c: &mut Criterion, group: &str, f: F) {
    let mut g = c.benchmark_group(group);
    g.bench_function(BenchmarkId::from_parameter("sequential"), |b| b.iter(&f));
    g.finish();
}

fn h11_cert() -> (BitGraph, EntCert) {
    let h = BitGraph::build_h(11).unwrap();
    let seed = clique_from_hadamard_h(&find_hadamard(12).unwrap()).unwrap().vertices().unwrap();
    let pack = pack_cliques(&h, &seed, PackOptions::default()).unwrap();
    let (cert, _) = cert_from_packing(&ortho_rep_h(&h).unwrap(), &pack, &h).unwrap();
    (h, cert)
}

fn bench_algebra(c: &mut Criterion) {
    let h = BitGraph::build_h(11).unwrap();
    let st = build_st(&h, 3).unwrap();
    in_modes(c, "build_st_h11", || {
        black_box(build_st(&h, 3).unwrap());
    });
    in_modes(c, "fitting_product_h11", || {
        black_box(st.s.mul_transpose(&st.t).unwrap());
    });
    let a = st.s.mul_transpose(&st.t).unwrap();
    in_modes(c, "rank_fp_h11", || {
        black_box(rank_fp(&a));
    });
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
    let dense = FpMatrix::random(3, 400, 400, &mut rng).unwrap();
    in_modes(c, "rank_fp_dense_400", || {
        black_box(rank_fp(&dense));
    });
}

fn bench_geometry(c: &mut Criterion) {
    let h = BitGraph::build_h(11).unwrap();
    let seed = clique_from_hadamard_h(&find_hadamard(12).unwrap()).unwrap().vertices().unwrap();
    in_modes(c, "pack_h11", || {
        black_box(pack_cliques(&h, &seed, PackOptions::default()).unwrap());
    });
    let p = paley_one(163).unwrap();
    in_modes(c, "hadamard_verify_164", || {
        black_box(p.verify());
    });
}

fn bench_certificates(c: &mut Criterion) {
    let (h, cert) = h11_cert();
    in_modes(c, "verify_cert_h11", || {
        black_box(verify(&cert, &h));
    });
    let channel = canonical_channel(&h).unwrap();
    in_modes(c, "protocol_h11", || {
        black_box(protocol_from_cert(&cert, &channel).unwrap());
    });
}

criterion_group! {
    name = kernels;
    config = Criterion::default().sample_size(10);
    targets = bench_algebra, bench_geometry, bench_certificates
}
criterion_main!(kernels);
