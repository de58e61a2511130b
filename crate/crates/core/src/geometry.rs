//! Orthonormal representations of `G_n` / `H_n`, Hadamard-seeded cliques,
//! automorphism-driven disjoint clique packings, and the restricted
//! independent sets of `G_n`.
//!
//! Vectors are kept in exact integer form: vertex `x` maps to the sign vector
//! `u[x] = ((-1)^{x_1}, ..., (-1)^{x_n})` with a trailing `1` appended, and the
//! unit vector is that integer vector divided by `sqrt(n + 1)`.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binom::binomial_u128;
use crate::bitgraph::{clique_witness, words_of_weight, BitGraph, BitVertex, Family, Graph, MAX_BITS};
use crate::bitset::BitSet;
use crate::error::{invalid, limit, Error, Result};
use crate::hadamard::{normalize, HadamardMatrix};
use crate::par;

/// Vertex counts up to this are checked exhaustively; larger graphs are sampled.
pub const EXHAUSTIVE_CHECK_CAP: usize = 1 << 14;
/// Largest restricted independent set verified pair by pair.
pub const MAX_RESTRICTED_SET: usize = 20_000;
/// Default permutation budget for packing `G_n`.
pub const DEFAULT_PACKING_BUDGET: u64 = 1_000_000;

/// `(u[x] ⊕ 1)` as `i8` entries.
pub fn lifted_sign_vector(x: &BitVertex) -> Vec<i8> {
    let mut v: Vec<i8> = (0..x.len()).map(|i| if x.coord(i) { -1 } else { 1 }).collect();
    v.push(1);
    v
}

/// Orthonormal representation stored as integer vectors over a common
/// normalizer: `f(x) = vectors[x] / sqrt(normalizer)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthoRep {
    pub graph: String,
    pub dim: usize,
    pub normalizer: i64,
    pub labels: Vec<String>,
    pub vectors: Vec<Vec<i8>>,
}

/// Result of checking that every vector of a `G_n` representation is
/// orthogonal to the all-ones vector of length `n + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneCheck {
    pub all_orthogonal: bool,
    pub witness: Option<usize>,
}

impl OrthoRep {
    fn for_graph(g: &BitGraph) -> Self {
        let n = g.n();
        OrthoRep {
            graph: g.name(),
            dim: n + 1,
            normalizer: (n + 1) as i64,
            labels: g.vertices().iter().map(|x| x.to_string()).collect(),
            vectors: par::map_slice(g.vertices(), lifted_sign_vector),
        }
    }

    pub fn integer_dot(&self, u: usize, v: usize) -> i64 {
        self.vectors[u]
            .iter()
            .zip(&self.vectors[v])
            .map(|(&a, &b)| (a as i64) * (b as i64))
            .sum()
    }

    /// Unit norms and orthogonality across edges, in exact arithmetic.
    /// Exhaustive below [`EXHAUSTIVE_CHECK_CAP`] vertices, otherwise `samples`
    /// random pairs from a seeded stream.
    pub fn verify(&self, g: &dyn Graph, samples: usize, seed: u64) -> Result<()> {
        let n = g.vertex_count();
        if n != self.vectors.len() {
            return Err(invalid("representation and graph have different vertex counts"));
        }
        if let Some(u) = par::find_first(n, |u| self.integer_dot(u, u) != self.normalizer) {
            return Err(Error::Construction(format!("vector {u} is not a unit vector")));
        }
        let bad_edge = |u: usize, v: usize| g.is_adjacent(u, v) && self.integer_dot(u, v) != 0;
        if n <= EXHAUSTIVE_CHECK_CAP {
            if let Some(u) = par::find_first(n, |u| ((u + 1)..n).any(|v| bad_edge(u, v))) {
                let v = ((u + 1)..n).find(|&v| bad_edge(u, v)).unwrap_or(u);
                return Err(Error::Construction(format!("edge ({u},{v}) is not orthogonal")));
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let u = rand::Rng::random_range(&mut rng, 0..n);
                let v = rand::Rng::random_range(&mut rng, 0..n);
                if bad_edge(u, v) {
                    return Err(Error::Construction(format!("edge ({u},{v}) is not orthogonal")));
                }
            }
        }
        Ok(())
    }

    /// Checks `f(x) · (1 ⊕ 1) = 0` for every vertex.
    pub fn hyperplane_check(&self) -> HyperplaneCheck {
        let witness = par::find_first(self.vectors.len(), |u| {
            self.vectors[u].iter().map(|&a| a as i64).sum::<i64>() != 0
        });
        HyperplaneCheck { all_orthogonal: witness.is_none(), witness }
    }

    /// Coordinates in an orthonormal basis of the hyperplane orthogonal to the
    /// all-ones vector, giving `dim - 1` floats per vertex.
    ///
    /// Uses the Helmert basis `e_k = (1, ..., 1, -k, 0, ..., 0) / sqrt(k(k+1))`,
    /// `k = 1..dim-1`, with `k` leading ones.
    pub fn reduced_coordinates(&self) -> Result<Vec<Vec<f64>>> {
        let check = self.hyperplane_check();
        if !check.all_orthogonal {
            return Err(invalid(format!(
                "vector {} is not in the all-ones hyperplane",
                check.witness.unwrap_or_default()
            )));
        }
        let d = self.dim;
        let scale = (self.normalizer as f64).sqrt();
        Ok(par::map_slice(&self.vectors, |v| {
            let mut prefix = 0f64;
            let mut out = Vec::with_capacity(d - 1);
            for k in 1..d {
                prefix += v[k - 1] as f64;
                let kf = k as f64;
                out.push((prefix - kf * v[k] as f64) / (kf * (kf + 1.0)).sqrt() / scale);
            }
            out
        }))
    }
}

fn require_family(g: &BitGraph, family: Family) -> Result<()> {
    if g.family() != family {
        return Err(invalid(format!("expected a graph of family {family:?}, got {}", g.name())));
    }
    Ok(())
}

/// The `(n+1)`-dimensional representation of `H_n`, verified.
pub fn ortho_rep_h(g: &BitGraph) -> Result<OrthoRep> {
    require_family(g, Family::H)?;
    let rep = OrthoRep::for_graph(g);
    rep.verify(g, 100_000, 0)?;
    Ok(rep)
}

/// The ambient `(n+1)`-dimensional representation of `G_n`, verified, plus the
/// check that all vectors lie in an `n`-dimensional hyperplane.
pub fn ortho_rep_g(g: &BitGraph) -> Result<(OrthoRep, HyperplaneCheck)> {
    require_family(g, Family::G)?;
    let rep = OrthoRep::for_graph(g);
    rep.verify(g, 100_000, 0)?;
    let check = rep.hyperplane_check();
    if !check.all_orthogonal {
        return Err(Error::Construction(format!(
            "vector {:?} leaves the all-ones hyperplane",
            check.witness
        )));
    }
    Ok((rep, check))
}

/// Bitstring of arbitrary length, coordinate `j` stored at bit `j % 64` of
/// word `j / 64`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WideBits {
    words: Vec<u64>,
    len: usize,
}

impl WideBits {
    fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    fn set(&mut self, j: usize) {
        self.words[j / 64] |= 1 << (j % 64);
    }

    pub fn coord(&self, j: usize) -> bool {
        (self.words[j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn distance(&self, other: &WideBits) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }

    pub fn to_vertex(&self) -> Result<BitVertex> {
        if self.len > MAX_BITS {
            return Err(limit(format!("string of length {} does not fit a vertex word", self.len)));
        }
        let mut bits = 0u64;
        for j in 0..self.len {
            if self.coord(j) {
                bits |= 1 << (self.len - 1 - j);
            }
        }
        BitVertex::new(bits, self.len)
    }
}

impl std::fmt::Display for WideBits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for j in 0..self.len {
            f.write_str(if self.coord(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A clique of `G_n` (or `H_n` with the zero string added) read off a
/// normalized Hadamard matrix, checked without materializing the graph.
#[derive(Clone, Debug)]
pub struct HadamardClique {
    pub n: usize,
    pub family: Family,
    pub members: Vec<WideBits>,
}

impl HadamardClique {
    /// Members of `G_n` have weight `(n+1)/2` (members of `H_n` may also be
    /// the zero string) and every pair is at distance `(n+1)/2`.
    pub fn verify(&self) -> Result<()> {
        let half = self.n.div_ceil(2);
        for (i, m) in self.members.iter().enumerate() {
            let w = m.weight();
            let ok = match self.family {
                Family::G => w == half,
                _ => w == half || w == 0,
            };
            if !ok || m.len() != self.n {
                return Err(Error::Construction(format!("member {i} has weight {w}, expected {half}")));
            }
        }
        let k = self.members.len();
        if let Some(i) = par::find_first(k, |i| ((i + 1)..k).any(|j| self.members[i].distance(&self.members[j]) != half)) {
            return Err(Error::Construction(format!("member {i} is not at distance {half} from a later member")));
        }
        Ok(())
    }

    pub fn vertices(&self) -> Result<Vec<BitVertex>> {
        self.members.iter().map(WideBits::to_vertex).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn hadamard_rows_as_strings(h: &HadamardMatrix) -> Result<(usize, Vec<WideBits>)> {
    let m = h.size();
    if m < 4 || m % 2 == 1 {
        return Err(invalid(format!("Hadamard size {m} does not give an odd n >= 3")));
    }
    if !h.verify() {
        return Err(Error::Construction("input is not a Hadamard matrix".into()));
    }
    let n = m - 1;
    let norm = normalize(h);
    let members = (1..m)
        .map(|i| {
            let mut s = WideBits::zeros(n);
            for j in 1..m {
                if norm.entry(i, j) < 0 {
                    s.set(j - 1);
                }
            }
            s
        })
        .collect();
    Ok((n, members))
}

/// Normalize, drop the first row and column, read `-1` as bit `1`: the `n`
/// remaining rows form a clique of `G_n`.
pub fn clique_from_hadamard_g(h: &HadamardMatrix) -> Result<HadamardClique> {
    let (n, members) = hadamard_rows_as_strings(h)?;
    let c = HadamardClique { n, family: Family::G, members };
    c.verify()?;
    Ok(c)
}

/// The `G_n` clique plus the all-zeros string: an `(n+1)`-clique of `H_n`.
pub fn clique_from_hadamard_h(h: &HadamardMatrix) -> Result<HadamardClique> {
    let (n, mut members) = hadamard_rows_as_strings(h)?;
    members.insert(0, WideBits::zeros(n));
    let c = HadamardClique { n, family: Family::H, members };
    c.verify()?;
    Ok(c)
}

/// Pairwise-disjoint cliques of a common size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliquePacking {
    pub graph: String,
    pub clique_size: usize,
    pub cliques: Vec<Vec<usize>>,
    pub target: usize,
    pub target_met: bool,
    pub candidates_tried: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingExport {
    pub graph: String,
    pub clique_size: usize,
    pub count: usize,
    pub target: usize,
    pub target_met: bool,
    pub cliques: Vec<Vec<String>>,
}

impl CliquePacking {
    pub fn count(&self) -> usize {
        self.cliques.len()
    }

    /// Every set is a `clique_size`-clique and the sets are pairwise disjoint.
    pub fn verify(&self, g: &dyn Graph) -> Result<()> {
        let mut used = BitSet::new(g.vertex_count());
        for (i, c) in self.cliques.iter().enumerate() {
            if c.len() != self.clique_size {
                return Err(Error::Construction(format!("clique {i} has size {}", c.len())));
            }
            if let Some((u, v)) = clique_witness(g, c) {
                return Err(Error::Construction(format!("clique {i}: vertices {u},{v} not adjacent")));
            }
            for &u in c {
                if u >= g.vertex_count() || used.contains(u) {
                    return Err(Error::Construction(format!("clique {i} reuses vertex {u}")));
                }
                used.insert(u);
            }
        }
        Ok(())
    }

    pub fn export(&self, g: &dyn Graph) -> PackingExport {
        PackingExport {
            graph: self.graph.clone(),
            clique_size: self.clique_size,
            count: self.cliques.len(),
            target: self.target,
            target_met: self.target_met,
            cliques: self
                .cliques
                .iter()
                .map(|c| c.iter().map(|&u| g.vertex_label(u)).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PackOptions {
    /// Maximum number of automorphism images examined.
    pub budget: u64,
    /// Seed of the permutation stream for `G_n`.
    pub seed: u64,
    /// Stop as soon as `ceil(|V| / d^2)` cliques are packed.
    pub stop_at_target: bool,
}

impl Default for PackOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_PACKING_BUDGET, seed: 0, stop_at_target: true }
    }
}

const PACK_BLOCK: usize = 256;

/// Greedy disjoint packing by images of `seed` under a vertex-transitive
/// automorphism family: coordinate permutations for `G_n` (seeded stream,
/// identity first) and translations by even-weight strings for `H_n`
/// (increasing order).
///
/// Candidates are imaged in parallel blocks but committed strictly in stream
/// order, so the result depends only on `(graph, seed, options)`.
pub fn pack_cliques(g: &BitGraph, seed: &[BitVertex], opts: PackOptions) -> Result<CliquePacking> {
    if !matches!(g.family(), Family::G | Family::H) {
        return Err(invalid(format!("packing needs G_n or H_n, got {}", g.name())));
    }
    let seed_idx = seed
        .iter()
        .map(|x| g.index_of(x).ok_or_else(|| invalid(format!("seed vertex {x} not in {}", g.name()))))
        .collect::<Result<Vec<_>>>()?;
    if seed_idx.is_empty() {
        return Err(invalid("empty seed clique"));
    }
    if let Some((u, v)) = clique_witness(g, &seed_idx) {
        return Err(invalid(format!("seed is not a clique: {} and {} not adjacent", g.vertex(u), g.vertex(v))));
    }
    let d = seed_idx.len();
    let nv = g.vertex_count();
    let target = nv.div_ceil(d * d);
    let n = g.n();
    let lookup: HashMap<u64, usize> = g.vertices().iter().enumerate().map(|(i, x)| (x.bits(), i)).collect();
    let image = |f: &dyn Fn(&BitVertex) -> BitVertex| -> Option<Vec<usize>> {
        seed.iter().map(|x| lookup.get(&f(x).bits()).copied()).collect()
    };

    let mut used = BitSet::new(nv);
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let mut tried: u64 = 0;
    let commit = |cands: Vec<Option<Vec<usize>>>, used: &mut BitSet, cliques: &mut Vec<Vec<usize>>, tried: &mut u64| -> bool {
        for c in cands {
            *tried += 1;
            if let Some(c) = c {
                if c.iter().all(|&u| !used.contains(u)) {
                    for &u in &c {
                        used.insert(u);
                    }
                    cliques.push(c);
                    if opts.stop_at_target && cliques.len() >= target {
                        return true;
                    }
                }
            }
        }
        false
    };

    match g.family() {
        Family::H => {
            let limit = (opts.budget.min(nv as u64)) as usize;
            let mut start = 0;
            while start < limit {
                let end = (start + PACK_BLOCK).min(limit);
                let zs = &g.vertices()[start..end];
                let cands = par::map_slice(zs, |z| image(&|x: &BitVertex| BitVertex::new(x.bits() ^ z.bits(), n).unwrap()));
                if commit(cands, &mut used, &mut cliques, &mut tried) {
                    break;
                }
                start = end;
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut remaining = opts.budget;
            let mut first = true;
            while remaining > 0 {
                let block = (remaining as usize).min(PACK_BLOCK);
                let perms: Vec<Vec<usize>> = (0..block)
                    .map(|_| {
                        let mut p: Vec<usize> = (0..n).collect();
                        if !first {
                            p.shuffle(&mut rng);
                        }
                        first = false;
                        p
                    })
                    .collect();
                remaining -= block as u64;
                let cands = par::map_slice(&perms, |p| image(&|x: &BitVertex| x.permute(p)));
                if commit(cands, &mut used, &mut cliques, &mut tried) {
                    break;
                }
            }
        }
    }

    let packing = CliquePacking {
        graph: g.name(),
        clique_size: d,
        target_met: cliques.len() >= target,
        cliques,
        target,
        candidates_tried: tried,
    };
    packing
        .verify(g)
        .map_err(|e| Error::Internal(format!("packing failed re-verification: {e}")))?;
    Ok(packing)
}

/// Trailing-zero count that makes the restricted set provably independent:
/// `ceil((n+1)/4)`.
pub fn default_restriction(n: usize) -> usize {
    (n + 1).div_ceil(4)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictedSet {
    pub n: usize,
    pub k: usize,
    pub vertices: Vec<BitVertex>,
    pub verified: bool,
    pub witness: Option<(BitVertex, BitVertex)>,
}

/// Weight-`(n+1)/2` strings of length `n` whose last `k` coordinates are zero,
/// with an exhaustive independence check in `G_n`.
pub fn restricted_independent_set(n: usize, k: Option<usize>) -> Result<RestrictedSet> {
    if n.is_multiple_of(2) || !(3..=MAX_BITS).contains(&n) {
        return Err(invalid(format!("n must be odd with 3 <= n <= {MAX_BITS}, got {n}")));
    }
    let k = k.unwrap_or_else(|| default_restriction(n));
    if k >= n {
        return Err(invalid(format!("k = {k} must be below n = {n}")));
    }
    let w = n.div_ceil(2);
    let size = binomial_u128((n - k) as u64, w as u64);
    if size > MAX_RESTRICTED_SET as u128 {
        return Err(limit(format!("restricted set has {size} members (cap {MAX_RESTRICTED_SET})")));
    }
    let vertices = words_of_weight(n - k, w)
        .into_iter()
        .map(|b| BitVertex::new(b << k, n))
        .collect::<Result<Vec<_>>>()?;
    let half = w as u32;
    let m = vertices.len();
    let adjacent = |i: usize, j: usize| (vertices[i].bits() ^ vertices[j].bits()).count_ones() == half;
    let witness = par::find_first(m, |i| ((i + 1)..m).any(|j| adjacent(i, j))).map(|i| {
        let j = ((i + 1)..m).find(|&j| adjacent(i, j)).unwrap_or(i);
        (vertices[i], vertices[j])
    });
    Ok(RestrictedSet { n, k, verified: witness.is_none(), witness, vertices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::{paley_one, sylvester};

    #[test]
    fn h3_representation() {
        let h3 = BitGraph::build_h(3).unwrap();
        let rep = ortho_rep_h(&h3).unwrap();
        assert_eq!(rep.vectors[0], vec![1, 1, 1, 1]);
        assert_eq!(rep.integer_dot(0, 0), 4);
        // 000 vs 011
        assert_eq!(rep.integer_dot(0, 1), 0);
    }

    #[test]
    fn g_representation_lies_in_hyperplane() {
        let g3 = BitGraph::build_g(3).unwrap();
        let (rep, check) = ortho_rep_g(&g3).unwrap();
        assert!(check.all_orthogonal);
        // 011 -> (+1, -1, -1), sum -1
        assert_eq!(rep.vectors[0][..3].iter().map(|&a| a as i32).sum::<i32>(), -1);
        assert!(ortho_rep_h(&g3).is_err());
    }

    #[test]
    fn reduced_coordinates_preserve_dots() {
        let g = BitGraph::build_g(7).unwrap();
        let (rep, _) = ortho_rep_g(&g).unwrap();
        let red = rep.reduced_coordinates().unwrap();
        assert_eq!(red[0].len(), 7);
        for u in 0..g.vertex_count() {
            for v in 0..g.vertex_count() {
                let dot: f64 = red[u].iter().zip(&red[v]).map(|(a, b)| a * b).sum();
                let exact = rep.integer_dot(u, v) as f64 / rep.normalizer as f64;
                assert!((dot - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sylvester4_clique_is_all_of_g3() {
        let c = clique_from_hadamard_g(&sylvester(2).unwrap()).unwrap();
        let mut labels: Vec<String> = c.members.iter().map(|m| m.to_string()).collect();
        labels.sort();
        assert_eq!(labels, vec!["011", "101", "110"]);
        let ch = clique_from_hadamard_h(&sylvester(2).unwrap()).unwrap();
        assert_eq!(ch.len(), 4);
        assert_eq!(ch.members[0].to_string(), "000");
    }

    #[test]
    fn clique_rejects_small_or_odd() {
        assert!(clique_from_hadamard_g(&sylvester(1).unwrap()).is_err());
        assert!(clique_from_hadamard_g(&sylvester(0).unwrap()).is_err());
    }

    #[test]
    fn wide_clique_163() {
        let c = clique_from_hadamard_g(&paley_one(163).unwrap()).unwrap();
        assert_eq!(c.len(), 163);
        assert!(c.members.iter().all(|m| m.weight() == 82));
        assert!(c.vertices().is_err());
    }

    #[test]
    fn g3_packing_is_whole_graph() {
        let g = BitGraph::build_g(3).unwrap();
        let seed = clique_from_hadamard_g(&sylvester(2).unwrap()).unwrap().vertices().unwrap();
        let p = pack_cliques(&g, &seed, PackOptions::default()).unwrap();
        assert_eq!(p.count(), 1);
        assert_eq!(p.target, 1);
        assert!(p.target_met);
    }

    #[test]
    fn packing_rejects_non_clique_seed() {
        let g = BitGraph::build_g(7).unwrap();
        let seed: Vec<BitVertex> = g.vertices()[..3].to_vec();
        assert!(pack_cliques(&g, &seed, PackOptions::default()).is_err());
    }

    #[test]
    fn restricted_set_examples() {
        let s = restricted_independent_set(11, Some(3)).unwrap();
        assert_eq!(s.vertices.len(), 28);
        assert!(s.verified);
        assert_eq!(default_restriction(11), 3);
        let full = restricted_independent_set(11, Some(0)).unwrap();
        assert_eq!(full.vertices.len(), 462);
        assert!(!full.verified);
        let (a, b) = full.witness.unwrap();
        assert_eq!(crate::bitgraph::hamming_distance(&a, &b).unwrap(), 6);
        // Only 110 has weight 2 with a zero in the last coordinate.
        let tiny = restricted_independent_set(3, Some(1)).unwrap();
        assert_eq!(tiny.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>(), vec!["110"]);
        assert!(tiny.verified);
        assert!(restricted_independent_set(11, Some(11)).is_err());
    }
}
