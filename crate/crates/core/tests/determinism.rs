//! Results must not depend on the number of worker threads.
#![cfg(feature = "parallel")]

use qcap_core::algebra_fp::{haemers_matrix, rank_fp};
use qcap_core::bitgraph::BitGraph;
use qcap_core::channel::{canonical_channel, protocol_from_cert, simulate_transmission};
use qcap_core::entcert::cert_from_packing;
use qcap_core::geometry::{clique_from_hadamard_g, ortho_rep_g, pack_cliques, PackOptions};
use qcap_core::hadamard::find_hadamard;

#[derive(Debug, PartialEq)]
struct Snapshot {
    cliques: Vec<Vec<usize>>,
    a_bytes: Vec<u8>,
    rank: usize,
    cert_ops: usize,
    decoded: Vec<(usize, usize, usize)>,
}

fn run() -> Snapshot {
    let g = BitGraph::build_g(11).unwrap();
    let seed = clique_from_hadamard_g(&find_hadamard(12).unwrap()).unwrap().vertices().unwrap();
    let opts = PackOptions { stop_at_target: false, budget: 2_000, ..PackOptions::default() };
    let pack = pack_cliques(&g, &seed, opts).unwrap();
    let (a, _, _) = haemers_matrix(&g, 3).unwrap();
    let (rep, _) = ortho_rep_g(&g).unwrap();
    let (cert, _) = cert_from_packing(&rep, &pack, &g).unwrap();
    let channel = canonical_channel(&g).unwrap();
    let (protocol, _) = protocol_from_cert(&cert, &channel).unwrap();
    let decoded = (0..20)
        .map(|k| {
            let t = simulate_transmission(&protocol, &channel, k % cert.m, k as u64).unwrap();
            (t.sender_outcome, t.output, t.decoded)
        })
        .collect();
    Snapshot { cliques: pack.cliques, a_bytes: a.to_bytes(), rank: rank_fp(&a), cert_ops: cert.ops.len(), decoded }
}

#[test]
fn one_thread_and_many_threads_agree() {
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let single = pool(1).install(run);
    let many = pool(4).install(run);
    assert_eq!(single, many);
}
