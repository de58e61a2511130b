//! Operator-system certificates for lower bounds on the entangled
//! independence number.
//!
//! A certificate is a trace-one PSD operator `rho` together with PSD operators
//! `rho(u)_i` (vertex `u`, message `i`) such that
//!
//! 1. `Σ_u rho(u)_i = rho` for every message `i`,
//! 2. `rho(u)_i · rho(u)_j = 0` for `i ≠ j`,
//! 3. `rho(u)_i · rho(v)_j = 0` for every edge `{u, v}` and `i ≠ j`.
//!
//! All matrices are integer matrices over one shared denominator, so every
//! check here is exact.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitgraph::{strong_product, Graph, ProductGraph, ADJACENCY_ROW_CAP};
use crate::error::{invalid, limit, Error, Result};
use crate::geometry::{CliquePacking, OrthoRep};
use crate::par;

/// Products with at most this many vertices are verified in full.
pub const FULL_VERIFY_VERTEX_CAP: usize = 10_000;
/// Condition-3 instances drawn when a product is too large for full checks.
pub const DEFAULT_SAMPLES: usize = 100_000;
/// Largest total number of stored integer entries a tensored certificate may hold.
pub const MAX_CERT_ENTRIES: usize = 1 << 26;

/// Dense square integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    dim: usize,
    data: Vec<i64>,
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(invalid("matrix is not square"));
        }
        Ok(IntMatrix { dim, data: rows.into_iter().flatten().collect() })
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        if m.dim == 0 {
            return Vec::new();
        }
        m.data.chunks(m.dim).map(<[i64]>::to_vec).collect()
    }
}

impl IntMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0; dim * dim] }
    }

    pub fn scaled_identity(dim: usize, s: i64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = s;
        }
        m
    }

    /// `v vᵀ`.
    pub fn outer(v: &[i64]) -> Self {
        let dim = v.len();
        let mut data = Vec::with_capacity(dim * dim);
        for &a in v {
            for &b in v {
                data.push(a * b);
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn trace(&self) -> i64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn add_assign(&mut self, other: &IntMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
    }

    /// First differing entry, if any.
    pub fn first_difference(&self, other: &IntMatrix) -> Option<(usize, usize)> {
        if self.dim != other.dim {
            return Some((0, 0));
        }
        let k = self.data.iter().zip(&other.data).position(|(a, b)| a != b)?;
        Some((k / self.dim, k % self.dim))
    }

    pub fn kron(&self, other: &IntMatrix) -> IntMatrix {
        let (a, b) = (self.dim, other.dim);
        let dim = a * b;
        let mut out = IntMatrix::zeros(dim);
        for i1 in 0..a {
            for j1 in 0..a {
                let s = self.get(i1, j1);
                if s == 0 {
                    continue;
                }
                for i2 in 0..b {
                    let row = (i1 * b + i2) * dim + j1 * b;
                    for j2 in 0..b {
                        out.data[row + j2] = s * other.get(i2, j2);
                    }
                }
            }
        }
        out
    }

    /// First nonzero entry of `self · other`, computed exactly in `i128`.
    pub fn product_nonzero_entry(&self, other: &IntMatrix) -> Option<(usize, usize)> {
        let d = self.dim;
        for i in 0..d {
            let row = &self.data[i * d..(i + 1) * d];
            for j in 0..d {
                let mut acc: i128 = 0;
                for (k, &a) in row.iter().enumerate() {
                    if a != 0 {
                        acc += a as i128 * other.data[k * d + j] as i128;
                    }
                }
                if acc != 0 {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// `self · (other · r)` for an integer vector `r`.
    fn product_times_vector(&self, other: &IntMatrix, r: &[i64]) -> Vec<i128> {
        let d = self.dim;
        let mv = |m: &IntMatrix, v: &[i128]| -> Vec<i128> {
            (0..d)
                .map(|i| m.data[i * d..(i + 1) * d].iter().zip(v).map(|(&a, &b)| a as i128 * b).sum())
                .collect()
        };
        let rv: Vec<i128> = r.iter().map(|&x| x as i128).collect();
        mv(self, &mv(other, &rv))
    }

    /// PSD test: symmetric with nonnegative diagonal, then either a rank-one
    /// pattern check or exact symmetric elimination over the rationals.
    pub fn is_psd(&self) -> bool {
        if !self.is_symmetric() || (0..self.dim).any(|i| self.get(i, i) < 0) {
            return false;
        }
        self.is_rank_one_psd() || self.is_psd_exact()
    }

    /// `M = v vᵀ / M_pp` for the first positive diagonal pivot `p`.
    fn is_rank_one_psd(&self) -> bool {
        let d = self.dim;
        let Some(p) = (0..d).find(|&i| self.get(i, i) > 0) else {
            return self.is_zero();
        };
        let mpp = self.get(p, p) as i128;
        (0..d).all(|i| {
            (0..d).all(|j| self.get(i, j) as i128 * mpp == self.get(i, p) as i128 * self.get(p, j) as i128)
        })
    }

    /// Symmetric Gaussian elimination with diagonal pivoting over `Q`.
    fn is_psd_exact(&self) -> bool {
        let d = self.dim;
        let mut a: Vec<Vec<BigRational>> = (0..d)
            .map(|i| (0..d).map(|j| BigRational::from_integer(BigInt::from(self.get(i, j)))).collect())
            .collect();
        let mut alive: Vec<bool> = vec![true; d];
        for _ in 0..d {
            if let Some(i) = (0..d).find(|&i| alive[i] && a[i][i].is_negative()) {
                let _ = i;
                return false;
            }
            let Some(p) = (0..d).find(|&i| alive[i] && a[i][i].is_positive()) else {
                // All remaining pivots are zero: the remaining block must vanish.
                return (0..d).all(|i| !alive[i] || (0..d).all(|j| !alive[j] || a[i][j].is_zero()));
            };
            alive[p] = false;
            let pivot = a[p][p].clone();
            let prow = a[p].clone();
            for i in 0..d {
                if !alive[i] || a[i][p].is_zero() {
                    continue;
                }
                let f = &a[i][p] / &pivot;
                for j in 0..d {
                    if alive[j] && !prow[j].is_zero() {
                        let delta = &f * &prow[j];
                        a[i][j] -= delta;
                    }
                }
            }
        }
        true
    }
}

/// A certificate `(rho, {rho(u)_i})` with a shared denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntCert {
    pub graph: String,
    pub m: usize,
    pub dim: usize,
    pub denominator: i64,
    pub rho: IntMatrix,
    /// Nonzero operators keyed by `(vertex, message)`; absent keys are zero.
    pub ops: BTreeMap<(usize, usize), IntMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Full,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub passed: bool,
    pub checked: u64,
    pub witness: Option<String>,
}

impl ConditionOutcome {
    fn ok(checked: u64) -> Self {
        Self { passed: true, checked, witness: None }
    }

    fn fail(checked: u64, witness: String) -> Self {
        Self { passed: false, checked, witness: Some(witness) }
    }
}

/// Per-condition verification result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub passed: bool,
    pub structure: ConditionOutcome,
    pub trace: ConditionOutcome,
    pub psd: ConditionOutcome,
    pub condition1: ConditionOutcome,
    pub condition2: ConditionOutcome,
    pub condition3: ConditionOutcome,
    pub witnesses: Vec<String>,
}

impl VerifyReport {
    fn assemble(
        mode: VerifyMode,
        structure: ConditionOutcome,
        trace: ConditionOutcome,
        psd: ConditionOutcome,
        condition1: ConditionOutcome,
        condition2: ConditionOutcome,
        condition3: ConditionOutcome,
    ) -> Self {
        let all = [&structure, &trace, &psd, &condition1, &condition2, &condition3];
        let passed = all.iter().all(|c| c.passed);
        let witnesses = all.iter().filter_map(|c| c.witness.clone()).collect();
        Self { mode, passed, structure, trace, psd, condition1, condition2, condition3, witnesses }
    }

    /// Name and witness of the first failing condition.
    pub fn first_failure(&self) -> Option<(&'static str, String)> {
        [
            ("structure", &self.structure),
            ("trace", &self.trace),
            ("psd", &self.psd),
            ("condition1", &self.condition1),
            ("condition2", &self.condition2),
            ("condition3", &self.condition3),
        ]
        .into_iter()
        .find(|(_, c)| !c.passed)
        .map(|(n, c)| (n, c.witness.clone().unwrap_or_default()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpEntry {
    pub vertex: usize,
    pub label: String,
    pub i: usize,
    pub matrix: IntMatrix,
}

/// JSON form of a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertExport {
    pub graph: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub dim: usize,
    pub denominator: i64,
    pub rho: IntMatrix,
    pub ops: Vec<OpEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verification: Option<VerifyReport>,
}

impl EntCert {
    pub fn export(&self, g: &dyn Graph, verification: Option<VerifyReport>) -> CertExport {
        CertExport {
            graph: self.graph.clone(),
            m: self.m,
            dim: self.dim,
            denominator: self.denominator,
            rho: self.rho.clone(),
            ops: self
                .ops
                .iter()
                .map(|(&(vertex, i), matrix)| OpEntry {
                    vertex,
                    label: if vertex < g.vertex_count() { g.vertex_label(vertex) } else { String::new() },
                    i,
                    matrix: matrix.clone(),
                })
                .collect(),
            verification,
        }
    }

    pub fn from_export(e: &CertExport) -> Result<Self> {
        let mut ops = BTreeMap::new();
        for op in &e.ops {
            if ops.insert((op.vertex, op.i), op.matrix.clone()).is_some() {
                return Err(invalid(format!("duplicate operator for vertex {} message {}", op.vertex, op.i)));
            }
        }
        Ok(EntCert {
            graph: e.graph.clone(),
            m: e.m,
            dim: e.dim,
            denominator: e.denominator,
            rho: e.rho.clone(),
            ops,
        })
    }

    /// Operators of message `i`.
    pub fn ops_for_message(&self, i: usize) -> impl Iterator<Item = (usize, &IntMatrix)> {
        self.ops.iter().filter(move |((_, j), _)| *j == i).map(|(&(u, _), m)| (u, m))
    }

    fn check_structure(&self, g: &dyn Graph) -> ConditionOutcome {
        if self.m == 0 {
            return ConditionOutcome::fail(0, "M = 0".into());
        }
        if self.denominator <= 0 {
            return ConditionOutcome::fail(0, format!("denominator {} not positive", self.denominator));
        }
        if self.rho.dim() != self.dim {
            return ConditionOutcome::fail(0, "rho has the wrong dimension".into());
        }
        for (&(u, i), op) in &self.ops {
            if u >= g.vertex_count() || i >= self.m || op.dim() != self.dim {
                return ConditionOutcome::fail(0, format!("operator ({u},{i}) out of range or wrong size"));
            }
        }
        ConditionOutcome::ok(self.ops.len() as u64)
    }

    fn check_trace(&self) -> ConditionOutcome {
        let t = self.rho.trace();
        if t == self.denominator {
            ConditionOutcome::ok(1)
        } else {
            ConditionOutcome::fail(1, format!("trace(rho) = {t}/{}", self.denominator))
        }
    }

    fn check_psd(&self) -> ConditionOutcome {
        if !self.rho.is_psd() {
            return ConditionOutcome::fail(1, "rho is not PSD".into());
        }
        let keys: Vec<&(usize, usize)> = self.ops.keys().collect();
        match par::find_first(keys.len(), |k| !self.ops[keys[k]].is_psd()) {
            None => ConditionOutcome::ok(1 + keys.len() as u64),
            Some(k) => ConditionOutcome::fail(1 + k as u64, format!("operator {:?} is not PSD", keys[k])),
        }
    }

    fn check_condition1(&self) -> ConditionOutcome {
        let sums = par::map_range(self.m, |i| {
            let mut s = IntMatrix::zeros(self.dim);
            for (_, op) in self.ops_for_message(i) {
                s.add_assign(op);
            }
            s.first_difference(&self.rho)
        });
        match sums.iter().enumerate().find_map(|(i, d)| d.map(|rc| (i, rc))) {
            None => ConditionOutcome::ok(self.m as u64),
            Some((i, (r, c))) => ConditionOutcome::fail(
                self.m as u64,
                format!("message i={i}: sum of operators differs from rho at entry ({r},{c})"),
            ),
        }
    }

    fn check_condition2(&self) -> ConditionOutcome {
        let mut by_vertex: BTreeMap<usize, Vec<(usize, &IntMatrix)>> = BTreeMap::new();
        for (&(u, i), op) in &self.ops {
            by_vertex.entry(u).or_default().push((i, op));
        }
        let mut checked = 0;
        for (u, list) in by_vertex {
            for a in 0..list.len() {
                for b in (a + 1)..list.len() {
                    checked += 1;
                    if let Some((r, c)) = list[a].1.product_nonzero_entry(list[b].1) {
                        return ConditionOutcome::fail(
                            checked,
                            format!("vertex {u}, messages {} and {}: product nonzero at ({r},{c})", list[a].0, list[b].0),
                        );
                    }
                }
            }
        }
        ConditionOutcome::ok(checked)
    }

    fn check_condition3_full(&self, g: &dyn Graph) -> ConditionOutcome {
        let keys: Vec<(usize, usize)> = self.ops.keys().copied().collect();
        let k = keys.len();
        let bad = |a: usize, b: usize| -> Option<(usize, usize)> {
            let ((u, i), (v, j)) = (keys[a], keys[b]);
            if i == j || !g.is_adjacent(u, v) {
                return None;
            }
            self.ops[&keys[a]].product_nonzero_entry(&self.ops[&keys[b]])
        };
        let checked = par::sum_range(k, |a| {
            ((a + 1)..k).filter(|&b| keys[a].1 != keys[b].1 && g.is_adjacent(keys[a].0, keys[b].0)).count() as u64
        });
        match par::find_first(k, |a| ((a + 1)..k).any(|b| bad(a, b).is_some())) {
            None => ConditionOutcome::ok(checked),
            Some(a) => {
                let b = ((a + 1)..k).find(|&b| bad(a, b).is_some()).unwrap_or(a);
                let (r, c) = bad(a, b).unwrap_or_default();
                ConditionOutcome::fail(
                    checked,
                    format!(
                        "edge {{{},{}}}, messages {} and {}: product nonzero at ({r},{c})",
                        keys[a].0, keys[b].0, keys[a].1, keys[b].1
                    ),
                )
            }
        }
    }

    /// Condition 3 on `samples` random operator pairs; each product is tested
    /// against three random `±1` vectors.
    fn check_condition3_sampled(&self, g: &dyn Graph, samples: usize, seed: u64) -> ConditionOutcome {
        let keys: Vec<(usize, usize)> = self.ops.keys().copied().collect();
        if keys.is_empty() {
            return ConditionOutcome::ok(0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: Vec<(usize, usize, Vec<Vec<i64>>)> = (0..samples)
            .map(|_| {
                let a = rng.random_range(0..keys.len());
                let b = rng.random_range(0..keys.len());
                let probes = (0..3)
                    .map(|_| (0..self.dim).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
                    .collect();
                (a, b, probes)
            })
            .collect();
        let results = par::map_slice(&draws, |(a, b, probes)| {
            let ((u, i), (v, j)) = (keys[*a], keys[*b]);
            if i == j || !g.is_adjacent(u, v) {
                return (false, false);
            }
            let (x, y) = (&self.ops[&keys[*a]], &self.ops[&keys[*b]]);
            let nonzero = probes.iter().any(|r| x.product_times_vector(y, r).iter().any(|&e| e != 0));
            (true, nonzero)
        });
        let checked = results.iter().filter(|r| r.0).count() as u64;
        match results.iter().position(|r| r.1) {
            None => ConditionOutcome::ok(checked),
            Some(s) => {
                let (a, b, _) = &draws[s];
                ConditionOutcome::fail(
                    checked,
                    format!("edge {{{},{}}}, messages {} and {}: product nonzero", keys[*a].0, keys[*b].0, keys[*a].1, keys[*b].1),
                )
            }
        }
    }

    fn verify_with(&self, g: &dyn Graph, mode: VerifyMode, samples: usize, seed: u64) -> VerifyReport {
        let structure = self.check_structure(g);
        if !structure.passed {
            let skipped = ConditionOutcome::fail(0, "skipped: malformed certificate".into());
            return VerifyReport::assemble(mode, structure, skipped.clone(), skipped.clone(), skipped.clone(), skipped.clone(), skipped);
        }
        let condition3 = match mode {
            VerifyMode::Full => self.check_condition3_full(g),
            VerifyMode::Sampled => self.check_condition3_sampled(g, samples, seed),
        };
        VerifyReport::assemble(
            mode,
            structure,
            self.check_trace(),
            self.check_psd(),
            self.check_condition1(),
            self.check_condition2(),
            condition3,
        )
    }
}

/// Re-checks every certificate condition exactly against `g`.
pub fn verify(cert: &EntCert, g: &dyn Graph) -> VerifyReport {
    cert.verify_with(g, VerifyMode::Full, 0, 0)
}

/// As [`verify`], but condition 3 is checked on `samples` random operator pairs.
pub fn verify_sampled(cert: &EntCert, g: &dyn Graph, samples: usize, seed: u64) -> VerifyReport {
    cert.verify_with(g, VerifyMode::Sampled, samples, seed)
}

fn into_result(cert: EntCert, report: VerifyReport) -> Result<(EntCert, VerifyReport)> {
    match report.first_failure() {
        None => Ok((cert, report)),
        Some((condition, witness)) => Err(Error::Certificate { condition: condition.into(), witness }),
    }
}

/// Certificate from an orthonormal representation and a packing of disjoint
/// `d`-cliques: `rho(u)_i = f(u) f(u)ᵀ / d` on clique `i`, `rho` the sum over
/// the first clique.
///
/// The representation may have dimension `d` (each clique is an orthonormal
/// basis) or `d + 1` with all vectors in the all-ones hyperplane (each clique
/// is an orthonormal basis of that hyperplane).
pub fn cert_from_packing(rep: &OrthoRep, packing: &CliquePacking, g: &dyn Graph) -> Result<(EntCert, VerifyReport)> {
    if rep.vectors.len() != g.vertex_count() {
        return Err(invalid("representation does not match the graph"));
    }
    if packing.cliques.is_empty() {
        return Err(invalid("packing has no cliques"));
    }
    let d = packing.clique_size;
    let fits = d == rep.dim || (d + 1 == rep.dim && rep.hyperplane_check().all_orthogonal);
    if !fits {
        return Err(invalid(format!(
            "clique size {d} does not span the {}-dimensional representation",
            rep.dim
        )));
    }
    let denominator = d as i64 * rep.normalizer;
    let mut ops = BTreeMap::new();
    for (i, clique) in packing.cliques.iter().enumerate() {
        for &u in clique {
            let v: Vec<i64> = rep.vectors[u].iter().map(|&x| x as i64).collect();
            ops.insert((u, i), IntMatrix::outer(&v));
        }
    }
    let mut rho = IntMatrix::zeros(rep.dim);
    for &u in &packing.cliques[0] {
        rho.add_assign(&ops[&(u, 0)]);
    }
    let cert = EntCert { graph: g.name(), m: packing.cliques.len(), dim: rep.dim, denominator, rho, ops };
    let report = verify(&cert, g);
    into_result(cert, report)
}

/// One-dimensional certificate from an independent set: vertex `set[i]`
/// carries message `i`.
pub fn classical_embedding(g: &dyn Graph, set: &[usize]) -> Result<(EntCert, VerifyReport)> {
    if set.is_empty() {
        return Err(invalid("independent set is empty; a certificate needs M >= 1"));
    }
    for (a, &u) in set.iter().enumerate() {
        if u >= g.vertex_count() {
            return Err(invalid(format!("vertex {u} out of range")));
        }
        for &v in &set[a + 1..] {
            if u == v || g.is_adjacent(u, v) {
                return Err(invalid(format!("set is not independent: witness edge {{{u},{v}}}")));
            }
        }
    }
    let one = IntMatrix::scaled_identity(1, 1);
    let ops = set.iter().enumerate().map(|(i, &u)| ((u, i), one.clone())).collect();
    let cert = EntCert { graph: g.name(), m: set.len(), dim: 1, denominator: 1, rho: one, ops };
    let report = verify(&cert, g);
    into_result(cert, report)
}

/// Tensor product of verified certificates of `ga` and `gb`, giving a
/// certificate on `ga ⊠ gb` with `M_a · M_b` messages.
///
/// Fully verified when the product has at most [`FULL_VERIFY_VERTEX_CAP`]
/// vertices, otherwise sample-verified; the report records which.
pub fn tensor(
    a: &EntCert,
    ga: Arc<dyn Graph>,
    b: &EntCert,
    gb: Arc<dyn Graph>,
) -> Result<(EntCert, ProductGraph, VerifyReport)> {
    for (c, g) in [(a, &ga), (b, &gb)] {
        let r = verify(c, g.as_ref());
        if let Some((cond, w)) = r.first_failure() {
            return Err(invalid(format!("factor certificate on {} fails {cond}: {w}", g.name())));
        }
    }
    let dim = a.dim.checked_mul(b.dim).ok_or_else(|| limit("tensor dimension overflow"))?;
    let entries = (a.ops.len() * b.ops.len() + 1).saturating_mul(dim * dim);
    if entries > MAX_CERT_ENTRIES {
        return Err(limit(format!("tensored certificate would store {entries} entries (cap {MAX_CERT_ENTRIES})")));
    }
    let denominator = a
        .denominator
        .checked_mul(b.denominator)
        .ok_or_else(|| limit("tensor denominator overflow"))?;
    let nb = gb.vertex_count();
    let product = strong_product(ga, gb)?;
    let mut ops = BTreeMap::new();
    for (&(u, i), x) in &a.ops {
        for (&(v, j), y) in &b.ops {
            ops.insert((u * nb + v, i * b.m + j), x.kron(y));
        }
    }
    let cert = EntCert {
        graph: product.name(),
        m: a.m * b.m,
        dim,
        denominator,
        rho: a.rho.kron(&b.rho),
        ops,
    };
    let report = if product.vertex_count() <= FULL_VERIFY_VERTEX_CAP.min(ADJACENCY_ROW_CAP) {
        let _ = product.rows();
        verify(&cert, &product)
    } else {
        verify_sampled(&cert, &product, DEFAULT_SAMPLES, 0)
    };
    if let Some((condition, witness)) = report.first_failure() {
        return Err(Error::Certificate { condition: condition.into(), witness });
    }
    Ok((cert, product, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitgraph::BitGraph;
    use crate::geometry::{clique_from_hadamard_h, ortho_rep_h, pack_cliques, PackOptions};
    use crate::hadamard::sylvester;

    fn h3_cert() -> (EntCert, BitGraph) {
        let g = BitGraph::build_h(3).unwrap();
        let rep = ortho_rep_h(&g).unwrap();
        let seed = clique_from_hadamard_h(&sylvester(2).unwrap()).unwrap().vertices().unwrap();
        let packing = pack_cliques(&g, &seed, PackOptions::default()).unwrap();
        let (cert, report) = cert_from_packing(&rep, &packing, &g).unwrap();
        assert!(report.passed);
        (cert, g)
    }

    #[test]
    fn h3_cert_is_identity_over_four() {
        let (cert, _) = h3_cert();
        assert_eq!(cert.m, 1);
        assert_eq!(cert.denominator, 16);
        assert_eq!(cert.rho, IntMatrix::scaled_identity(4, 4));
    }

    #[test]
    fn zeroed_operator_breaks_condition1() {
        let (mut cert, g) = h3_cert();
        let key = *cert.ops.keys().next().unwrap();
        cert.ops.insert(key, IntMatrix::zeros(4));
        let r = verify(&cert, &g);
        assert!(!r.condition1.passed);
        assert!(r.condition1.witness.unwrap().contains("i=0"));
    }

    #[test]
    fn classical_cert_on_c5() {
        let c5 = BitGraph::build_cycle(5).unwrap();
        let (cert, r) = classical_embedding(&c5, &[0, 2]).unwrap();
        assert_eq!(cert.m, 2);
        assert!(r.passed);
        assert!(classical_embedding(&c5, &[0, 1]).is_err());
        assert!(classical_embedding(&c5, &[]).is_err());
        assert!(classical_embedding(&c5, &[2, 2]).is_err());
    }

    #[test]
    fn wrong_graph_breaks_condition3() {
        let c5 = BitGraph::build_cycle(5).unwrap();
        let (cert, _) = classical_embedding(&c5, &[0, 2]).unwrap();
        let k5 = BitGraph::complete(5).unwrap();
        let r = verify(&cert, &k5);
        assert!(!r.condition3.passed);
        assert!(r.condition1.passed);
    }

    #[test]
    fn psd_checks() {
        let m = IntMatrix::try_from(vec![vec![2, 1], vec![1, 2]]).unwrap();
        assert!(m.is_psd());
        let m = IntMatrix::try_from(vec![vec![1, 2], vec![2, 1]]).unwrap();
        assert!(!m.is_psd());
        let m = IntMatrix::try_from(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(!m.is_psd());
        let m = IntMatrix::try_from(vec![vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 0]]).unwrap();
        assert!(m.is_psd());
        assert!(IntMatrix::try_from(vec![vec![1, 2]]).is_err());
    }

    #[test]
    fn identity_tensor() {
        let (cert, g) = h3_cert();
        let k1 = BitGraph::complete(1).unwrap();
        let (one, _) = classical_embedding(&k1, &[0]).unwrap();
        let (t, p, r) = tensor(&cert, Arc::new(g), &one, Arc::new(k1)).unwrap();
        assert!(r.passed);
        assert_eq!(r.mode, VerifyMode::Full);
        assert_eq!(p.vertex_count(), 4);
        assert_eq!(t.rho, cert.rho);
        assert_eq!(t.ops, cert.ops);
    }
}
