//! Bitstring-vertex graphs, the distance-defined families built on them, and
//! strong graph products.
//!
//! A vertex is a binary string of length `n <= 63` packed into a `u64`.
//! Coordinate 0 is the leftmost character of the printed string and lives in
//! bit `n - 1` of the word, so "the last `k` coordinates" are the low `k` bits.

use std::collections::BTreeSet;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::binom::binomial_u128;
use crate::bitset::BitSet;
use crate::error::{invalid, limit, Error, Result};
use crate::par;

/// Longest bitstring a [`BitVertex`] can hold.
pub const MAX_BITS: usize = 63;
/// Largest vertex set a graph may materialize.
pub const MAX_VERTICES: usize = 10_000_000;
/// Largest vertex count for which full adjacency rows are stored.
pub const ADJACENCY_ROW_CAP: usize = 1 << 15;
/// Largest orthogonality-graph string length accepted.
pub const MAX_ORTHOGONALITY_BITS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVertex {
    bits: u64,
    len: u8,
}

impl BitVertex {
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_BITS {
            return Err(invalid(format!("bit length {len} outside 1..={MAX_BITS}")));
        }
        if bits >> len != 0 {
            return Err(invalid(format!("word {bits:#x} has bits above length {len}")));
        }
        Ok(Self { bits, len: len as u8 })
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Value of coordinate `i` (0 = leftmost character).
    #[inline]
    pub fn coord(&self, i: usize) -> bool {
        (self.bits >> (self.len() - 1 - i)) & 1 == 1
    }

    /// `(x_{perm[0]}, ..., x_{perm[n-1]})`: coordinate `i` of the result is
    /// coordinate `perm[i]` of `self`. Weight and pairwise distances are
    /// preserved.
    pub fn permute(&self, perm: &[usize]) -> BitVertex {
        debug_assert_eq!(perm.len(), self.len());
        let n = self.len();
        let mut out = 0u64;
        for (i, &src) in perm.iter().enumerate() {
            if self.coord(src) {
                out |= 1 << (n - 1 - i);
            }
        }
        BitVertex { bits: out, len: self.len }
    }

    /// Coordinate-wise XOR (translation by `z`).
    pub fn translate(&self, z: &BitVertex) -> Result<BitVertex> {
        if z.len != self.len {
            return Err(invalid("translation by a string of different length"));
        }
        Ok(BitVertex { bits: self.bits ^ z.bits, len: self.len })
    }
}

impl fmt::Display for BitVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.coord(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        if s.is_empty() || s.len() > MAX_BITS {
            return Err(invalid(format!("bitstring length {} outside 1..={MAX_BITS}", s.len())));
        }
        for c in s.chars() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                other => return Err(invalid(format!("unexpected character {other:?} in bitstring"))),
            }
        }
        BitVertex::new(bits, s.len())
    }
}

impl Serialize for BitVertex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitVertex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Hamming distance between equal-length strings.
pub fn hamming_distance(x: &BitVertex, y: &BitVertex) -> Result<u32> {
    if x.len != y.len {
        return Err(invalid(format!(
            "hamming distance of strings with lengths {} and {}",
            x.len, y.len
        )));
    }
    Ok((x.bits ^ y.bits).count_ones())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "G")]
    G,
    #[serde(rename = "H")]
    H,
    #[serde(rename = "O")]
    Orthogonality,
    #[serde(rename = "C")]
    Cycle,
    #[serde(rename = "explicit")]
    Explicit,
    #[serde(rename = "product")]
    Product,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDescriptor {
    pub family: Family,
    pub n: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
}

/// Read-only adjacency oracle shared by every graph representation.
pub trait Graph: Send + Sync {
    fn vertex_count(&self) -> usize;

    fn is_adjacent(&self, u: usize, v: usize) -> bool;

    /// Short identifier such as `G_11` or `C_5*C_5`.
    fn name(&self) -> String;

    fn vertex_label(&self, i: usize) -> String {
        i.to_string()
    }

    fn family(&self) -> Family;

    /// Family parameter: string length for bitstring families, factor count
    /// for products, vertex count otherwise.
    fn parameter(&self) -> usize {
        self.vertex_count()
    }

    fn neighbors(&self, u: usize) -> BitSet {
        let n = self.vertex_count();
        let mut row = BitSet::new(n);
        for v in 0..n {
            if v != u && self.is_adjacent(u, v) {
                row.insert(v);
            }
        }
        row
    }

    fn edge_count(&self) -> usize {
        let n = self.vertex_count();
        par::sum_range(n, |u| ((u + 1)..n).filter(|&v| self.is_adjacent(u, v)).count() as u64) as usize
    }

    fn descriptor(&self) -> GraphDescriptor {
        GraphDescriptor {
            family: self.family(),
            n: self.parameter(),
            vertex_count: self.vertex_count(),
            edge_count: self.edge_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdjacencyRule {
    DistanceEquals(u32),
    Explicit,
}

/// A simple undirected graph whose vertices are sorted bitstrings.
#[derive(Clone, Debug)]
pub struct BitGraph {
    family: Family,
    n: usize,
    name: String,
    vertices: Vec<BitVertex>,
    rule: AdjacencyRule,
    rows: Option<Vec<BitSet>>,
}

fn check_odd_family(n: usize) -> Result<()> {
    if n.is_multiple_of(2) || !(3..=MAX_BITS).contains(&n) {
        return Err(invalid(format!("n must be odd with 3 <= n <= {MAX_BITS}, got {n}")));
    }
    Ok(())
}

/// All `n`-bit words of weight `w`, increasing.
pub(crate) fn words_of_weight(n: usize, w: usize) -> Vec<u64> {
    if w > n {
        return Vec::new();
    }
    if w == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut x: u64 = (1u64 << w) - 1;
    let end = 1u64 << n;
    while x < end {
        out.push(x);
        // Gosper's hack: next word with the same popcount.
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

impl BitGraph {
    fn from_distance_rule(family: Family, n: usize, words: Vec<u64>, k: u32) -> Result<Self> {
        let vertices = words
            .into_iter()
            .map(|b| BitVertex::new(b, n))
            .collect::<Result<Vec<_>>>()?;
        let name = match family {
            Family::G => format!("G_{n}"),
            Family::H => format!("H_{n}"),
            Family::Orthogonality => format!("O_{n}"),
            _ => format!("D_{n}"),
        };
        Ok(Self { family, n, name, vertices, rule: AdjacencyRule::DistanceEquals(k), rows: None })
    }

    /// Strings of odd length `n` and weight `(n+1)/2`, adjacent at distance `(n+1)/2`.
    pub fn build_g(n: usize) -> Result<Self> {
        check_odd_family(n)?;
        let w = n.div_ceil(2);
        let count = binomial_u128(n as u64, w as u64);
        if count > MAX_VERTICES as u128 {
            return Err(limit(format!("G_{n} has {count} vertices (cap {MAX_VERTICES})")));
        }
        Self::from_distance_rule(Family::G, n, words_of_weight(n, w), w as u32)
    }

    /// Even-weight strings of odd length `n`, adjacent at distance `(n+1)/2`.
    pub fn build_h(n: usize) -> Result<Self> {
        check_odd_family(n)?;
        let count = 1u128 << (n - 1);
        if count > MAX_VERTICES as u128 {
            return Err(limit(format!("H_{n} has {count} vertices (cap {MAX_VERTICES})")));
        }
        let words = (0..(1u64 << n)).filter(|w| w.count_ones() % 2 == 0).collect();
        Self::from_distance_rule(Family::H, n, words, n.div_ceil(2) as u32)
    }

    /// All strings of even length `n`, adjacent at distance `n/2`.
    pub fn build_orthogonality(n: usize) -> Result<Self> {
        if n % 2 == 1 || !(2..=MAX_ORTHOGONALITY_BITS).contains(&n) {
            return Err(invalid(format!(
                "orthogonality graph needs even n with 2 <= n <= {MAX_ORTHOGONALITY_BITS}, got {n}"
            )));
        }
        if (1usize << n) > MAX_VERTICES {
            return Err(limit(format!("O_{n} has {} vertices (cap {MAX_VERTICES})", 1usize << n)));
        }
        Self::from_distance_rule(Family::Orthogonality, n, (0..(1u64 << n)).collect(), (n / 2) as u32)
    }

    /// The cycle `C_n` on vertices `0..n`.
    pub fn build_cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid(format!("cycle needs n >= 3, got {n}")));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let mut g = Self::from_edges(n, &edges, format!("C_{n}"))?;
        g.family = Family::Cycle;
        g.n = n;
        Ok(g)
    }

    /// Complete graph `K_n` as an explicit graph.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Self::from_edges(n, &edges, format!("K_{n}"))
    }

    /// Explicit graph on `0..vertex_count`. Vertex `i` carries the word `i`.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)], name: impl Into<String>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(invalid("explicit graph needs at least one vertex"));
        }
        if vertex_count > ADJACENCY_ROW_CAP {
            return Err(limit(format!(
                "explicit graph with {vertex_count} vertices exceeds row cap {ADJACENCY_ROW_CAP}"
            )));
        }
        let width = (usize::BITS - (vertex_count - 1).leading_zeros()).max(1) as usize;
        let vertices = (0..vertex_count)
            .map(|i| BitVertex::new(i as u64, width))
            .collect::<Result<Vec<_>>>()?;
        let mut rows = vec![BitSet::new(vertex_count); vertex_count];
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(invalid(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(invalid(format!("self-loop at {u}")));
            }
            rows[u].insert(v);
            rows[v].insert(u);
        }
        Ok(Self {
            family: Family::Explicit,
            n: vertex_count,
            name: name.into(),
            vertices,
            rule: AdjacencyRule::Explicit,
            rows: Some(rows),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Family parameter (string length, or vertex count for explicit graphs).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[BitVertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> BitVertex {
        self.vertices[i]
    }

    pub fn rule(&self) -> &AdjacencyRule {
        &self.rule
    }

    /// Position of `x` in the sorted vertex list.
    pub fn index_of(&self, x: &BitVertex) -> Option<usize> {
        if self.rule == AdjacencyRule::Explicit {
            let i = x.bits() as usize;
            return (i < self.vertices.len()).then_some(i);
        }
        if x.len() != self.n {
            return None;
        }
        self.vertices.binary_search(x).ok()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertices.len();
        let rows: Vec<Vec<(usize, usize)>> = par::map_range(n, |u| {
            ((u + 1)..n).filter(|&v| self.is_adjacent(u, v)).map(|v| (u, v)).collect()
        });
        rows.into_iter().flatten().collect()
    }

    /// Subgraph induced on `indices` (kept in the given order), as an explicit graph.
    pub fn induced(&self, indices: &[usize], name: impl Into<String>) -> Result<BitGraph> {
        let mut edges = Vec::new();
        for (a, &u) in indices.iter().enumerate() {
            for (b, &v) in indices.iter().enumerate().skip(a + 1) {
                if self.is_adjacent(u, v) {
                    edges.push((a, b));
                }
            }
        }
        BitGraph::from_edges(indices.len(), &edges, name)
    }

    /// DIMACS-style edge list with vertex labels as comments.
    pub fn to_dimacs(&self) -> String {
        let edges = self.edges();
        let mut out = String::new();
        out.push_str(&format!("c graph {}\n", self.name));
        out.push_str(&format!("p edge {} {}\n", self.vertices.len(), edges.len()));
        for i in 0..self.vertices.len() {
            out.push_str(&format!("c v {} {}\n", i + 1, self.vertex_label(i)));
        }
        for (u, v) in edges {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        out
    }

    /// Parse a DIMACS edge list into an explicit graph. Label comments are ignored.
    pub fn from_dimacs<R: BufRead>(reader: R, name: impl Into<String>) -> Result<BitGraph> {
        let mut count = None;
        let mut edges = Vec::new();
        for line in reader.lines() {
            let line = line.map_err(|e| invalid(format!("reading DIMACS input: {e}")))?;
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("p") => {
                    let _kind = parts.next();
                    let n: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| invalid(format!("malformed header {line:?}")))?;
                    count = Some(n);
                }
                Some("e") => {
                    let mut nums = parts.map(|s| s.parse::<usize>());
                    match (nums.next(), nums.next()) {
                        (Some(Ok(u)), Some(Ok(v))) if u >= 1 && v >= 1 => edges.push((u - 1, v - 1)),
                        _ => return Err(invalid(format!("malformed edge line {line:?}"))),
                    }
                }
                _ => {}
            }
        }
        let n = count.ok_or_else(|| invalid("DIMACS input has no `p` header"))?;
        BitGraph::from_edges(n, &edges, name)
    }

    /// Number of neighbours of every vertex, for the vertex-transitive distance families.
    fn regular_degree(&self) -> Option<u128> {
        let n = self.n as u64;
        match (self.family, &self.rule) {
            (Family::G, AdjacencyRule::DistanceEquals(_)) => {
                let w = n.div_ceil(2);
                // Two weight-w strings at distance w share w/2 ones.
                if w % 2 == 1 {
                    Some(0)
                } else {
                    Some(binomial_u128(w, w / 2) * binomial_u128(n - w, w / 2))
                }
            }
            (Family::H, AdjacencyRule::DistanceEquals(k)) => {
                // Translation by an even-weight z of weight k.
                if k % 2 == 1 {
                    Some(0)
                } else {
                    Some(binomial_u128(n, *k as u64))
                }
            }
            (Family::Orthogonality, AdjacencyRule::DistanceEquals(k)) => Some(binomial_u128(n, *k as u64)),
            _ => None,
        }
    }
}

impl Graph for BitGraph {
    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    fn is_adjacent(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        match &self.rule {
            AdjacencyRule::DistanceEquals(k) => {
                (self.vertices[u].bits() ^ self.vertices[v].bits()).count_ones() == *k
            }
            AdjacencyRule::Explicit => self.rows.as_ref().is_some_and(|r| r[u].contains(v)),
        }
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn vertex_label(&self, i: usize) -> String {
        match self.rule {
            AdjacencyRule::DistanceEquals(_) => self.vertices[i].to_string(),
            AdjacencyRule::Explicit => i.to_string(),
        }
    }

    fn family(&self) -> Family {
        self.family
    }

    fn parameter(&self) -> usize {
        self.n
    }

    fn neighbors(&self, u: usize) -> BitSet {
        if let Some(rows) = &self.rows {
            return rows[u].clone();
        }
        let n = self.vertices.len();
        let mut row = BitSet::new(n);
        for v in 0..n {
            if self.is_adjacent(u, v) {
                row.insert(v);
            }
        }
        row
    }

    fn edge_count(&self) -> usize {
        if let Some(deg) = self.regular_degree() {
            return (deg * self.vertices.len() as u128 / 2) as usize;
        }
        if let Some(rows) = &self.rows {
            return rows.iter().map(BitSet::count).sum::<usize>() / 2;
        }
        let n = self.vertices.len();
        par::sum_range(n, |u| ((u + 1)..n).filter(|&v| self.is_adjacent(u, v)).count() as u64) as usize
    }
}

/// A vertex of a strong product: one index per factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductVertex {
    pub parts: Vec<usize>,
}

/// Strong product of any number of factors, answered by an adjacency oracle.
///
/// Product index is mixed-radix with the first factor most significant, so for
/// two factors `(u, v)` has index `u * |V(h)| + v`.
pub struct ProductGraph {
    factors: Vec<Arc<dyn Graph>>,
    sizes: Vec<usize>,
    total: usize,
    rows: OnceLock<Vec<BitSet>>,
}

impl ProductGraph {
    pub fn new(factors: Vec<Arc<dyn Graph>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(invalid("strong product needs at least one factor"));
        }
        let sizes: Vec<usize> = factors.iter().map(|f| f.vertex_count()).collect();
        let mut total: usize = 1;
        for &s in &sizes {
            total = total
                .checked_mul(s)
                .filter(|&t| t <= MAX_VERTICES)
                .ok_or_else(|| limit(format!("strong product exceeds {MAX_VERTICES} vertices")))?;
        }
        Ok(Self { factors, sizes, total, rows: OnceLock::new() })
    }

    pub fn factors(&self) -> &[Arc<dyn Graph>] {
        &self.factors
    }

    pub fn vertex(&self, mut idx: usize) -> ProductVertex {
        let mut parts = vec![0; self.sizes.len()];
        for (slot, &s) in parts.iter_mut().zip(&self.sizes).rev() {
            *slot = idx % s;
            idx /= s;
        }
        ProductVertex { parts }
    }

    pub fn index(&self, v: &ProductVertex) -> Result<usize> {
        if v.parts.len() != self.sizes.len() {
            return Err(invalid("product vertex arity mismatch"));
        }
        let mut idx = 0;
        for (&p, &s) in v.parts.iter().zip(&self.sizes) {
            if p >= s {
                return Err(invalid(format!("factor index {p} out of range {s}")));
            }
            idx = idx * s + p;
        }
        Ok(idx)
    }

    /// Materialized adjacency rows; only available below [`ADJACENCY_ROW_CAP`].
    pub fn rows(&self) -> Option<&[BitSet]> {
        if self.total > ADJACENCY_ROW_CAP {
            return None;
        }
        Some(self.rows.get_or_init(|| {
            par::map_range(self.total, |u| {
                let mut row = BitSet::new(self.total);
                for v in 0..self.total {
                    if self.oracle(u, v) {
                        row.insert(v);
                    }
                }
                row
            })
        }))
    }

    fn oracle(&self, mut u: usize, mut v: usize) -> bool {
        if u == v {
            return false;
        }
        for (f, &s) in self.factors.iter().zip(&self.sizes).rev() {
            let (a, b) = (u % s, v % s);
            if a != b && !f.is_adjacent(a, b) {
                return false;
            }
            u /= s;
            v /= s;
        }
        true
    }
}

impl Graph for ProductGraph {
    fn vertex_count(&self) -> usize {
        self.total
    }

    fn is_adjacent(&self, u: usize, v: usize) -> bool {
        if let Some(rows) = self.rows.get() {
            return rows[u].contains(v);
        }
        self.oracle(u, v)
    }

    fn name(&self) -> String {
        self.factors.iter().map(|f| f.name()).collect::<Vec<_>>().join("*")
    }

    fn vertex_label(&self, i: usize) -> String {
        let pv = self.vertex(i);
        let labels: Vec<String> = pv
            .parts
            .iter()
            .zip(&self.factors)
            .map(|(&p, f)| f.vertex_label(p))
            .collect();
        format!("({})", labels.join(","))
    }

    fn family(&self) -> Family {
        Family::Product
    }

    fn parameter(&self) -> usize {
        self.factors.len()
    }

    fn neighbors(&self, u: usize) -> BitSet {
        if let Some(rows) = self.rows() {
            return rows[u].clone();
        }
        let mut row = BitSet::new(self.total);
        for v in 0..self.total {
            if self.oracle(u, v) {
                row.insert(v);
            }
        }
        row
    }
}

/// `g ⊠ h`.
pub fn strong_product(g: Arc<dyn Graph>, h: Arc<dyn Graph>) -> Result<ProductGraph> {
    ProductGraph::new(vec![g, h])
}

/// `g^{⊠k}`.
pub fn strong_power(g: Arc<dyn Graph>, k: usize) -> Result<ProductGraph> {
    if k == 0 {
        return Err(invalid("strong power needs k >= 1"));
    }
    ProductGraph::new(vec![g; k])
}

/// Checks that `set` is a clique of `g`; returns the first non-adjacent pair otherwise.
pub fn clique_witness(g: &dyn Graph, set: &[usize]) -> Option<(usize, usize)> {
    for (a, &u) in set.iter().enumerate() {
        for &v in &set[a + 1..] {
            if !g.is_adjacent(u, v) {
                return Some((u, v));
            }
        }
    }
    None
}

/// True when the listed indices are pairwise distinct.
pub fn all_distinct(set: &[usize]) -> bool {
    set.iter().collect::<BTreeSet<_>>().len() == set.len()
}
