//! Classical channels, confusability graphs, and simulation of the
//! entanglement-assisted one-shot protocol built from a certificate.
//!
//! Sender and receiver share a maximally entangled state of local dimension
//! `d`. To send message `i` the sender measures `{A_i^s}`, feeds the outcome
//! `s` into the channel, and the receiver measures `{B_t^j}` on output `t`.
//! For the maximally entangled state `Tr((A ⊗ B) ρ) = Tr(A Bᵀ) / d`, which
//! is used whenever `d > 8`; smaller dimensions can use the explicit
//! `d² × d²` density matrix.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitgraph::{BitGraph, Graph};
use crate::entcert::EntCert;
use crate::error::{invalid, limit, Error, Result};
use crate::par;

/// Row sums and similar construction checks.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Completeness of measurements.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Zero-error trace conditions.
pub const ZERO_ERROR_TOL: f64 = 1e-9;
/// Largest local dimension for which the explicit shared state is formed.
pub const EXPLICIT_STATE_MAX_DIM: usize = 8;
/// Largest dense JSON export, in matrix cells.
pub const MAX_DENSE_EXPORT: usize = 10_000_000;

/// Classical channel with sparse rows `P(· | x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    inputs: Vec<String>,
    outputs: Vec<String>,
    rows: Vec<Vec<(usize, f64)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelExport {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Channel {
    /// Validates and stores a channel; zero entries are dropped.
    pub fn new(inputs: Vec<String>, outputs: Vec<String>, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        if rows.len() != inputs.len() {
            return Err(invalid("one row per input is required"));
        }
        let mut clean = Vec::with_capacity(rows.len());
        for (x, row) in rows.into_iter().enumerate() {
            let mut sum = 0.0;
            let mut seen = BTreeSet::new();
            let mut kept = Vec::new();
            for (a, pr) in row {
                if a >= outputs.len() || !seen.insert(a) {
                    return Err(invalid(format!("row {x}: bad or repeated output index {a}")));
                }
                if !pr.is_finite() || pr < 0.0 {
                    return Err(invalid(format!("row {x}: probability {pr} is not a nonnegative number")));
                }
                sum += pr;
                if pr > 0.0 {
                    kept.push((a, pr));
                }
            }
            if (sum - 1.0).abs() > CONSTRUCTION_TOL {
                return Err(invalid(format!("row {x} sums to {sum}")));
            }
            kept.sort_by_key(|e| e.0);
            clean.push(kept);
        }
        Ok(Self { inputs, outputs, rows: clean })
    }

    pub fn from_dense(inputs: Vec<String>, outputs: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != outputs.len()) {
            return Err(invalid("dense rows must have one entry per output"));
        }
        let sparse = rows.iter().map(|r| r.iter().copied().enumerate().collect()).collect();
        Self::new(inputs, outputs, sparse)
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn prob(&self, x: usize, a: usize) -> f64 {
        self.rows[x].iter().find(|e| e.0 == a).map_or(0.0, |e| e.1)
    }

    /// Outputs with positive probability on input `x`, ascending.
    pub fn support(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[x].iter().map(|e| e.0)
    }

    pub fn row(&self, x: usize) -> &[(usize, f64)] {
        &self.rows[x]
    }

    /// For every output, the inputs that reach it.
    pub fn columns(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.outputs.len()];
        for (x, row) in self.rows.iter().enumerate() {
            for &(a, _) in row {
                cols[a].push(x);
            }
        }
        cols
    }

    pub fn export(&self) -> Result<ChannelExport> {
        let cells = self.inputs.len() * self.outputs.len();
        if cells > MAX_DENSE_EXPORT {
            return Err(limit(format!("dense channel export would have {cells} cells")));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut dense = vec![0.0; self.outputs.len()];
                for &(a, p) in r {
                    dense[a] = p;
                }
                dense
            })
            .collect();
        Ok(ChannelExport { inputs: self.inputs.clone(), outputs: self.outputs.clone(), rows })
    }

    pub fn from_export(e: &ChannelExport) -> Result<Self> {
        Self::from_dense(e.inputs.clone(), e.outputs.clone(), &e.rows)
    }
}

/// Five inputs `0..4`, five outputs `a..e`; input `x` yields `x` or `x + 1 mod 5`.
pub fn pentagon_channel() -> Channel {
    let inputs = (0..5).map(|x| x.to_string()).collect();
    let outputs = ["a", "b", "c", "d", "e"].map(String::from).to_vec();
    let rows = (0..5).map(|x| vec![(x, 0.5), ((x + 1) % 5, 0.5)]).collect();
    Channel::new(inputs, outputs, rows).expect("pentagon channel is valid")
}

/// Inputs are adjacent when some output is reachable from both.
pub fn confusability_graph(c: &Channel) -> Result<BitGraph> {
    let mut edges = BTreeSet::new();
    for col in c.columns() {
        for (k, &x) in col.iter().enumerate() {
            for &y in &col[k + 1..] {
                edges.insert((x.min(y), x.max(y)));
            }
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    BitGraph::from_edges(c.inputs.len(), &edges, "confusability")
}

/// Channel whose confusability graph is `g`: outputs are the vertices and the
/// edges, and each input is sent uniformly to itself or one of its edges.
pub fn canonical_channel(g: &dyn Graph) -> Result<Channel> {
    let n = g.vertex_count();
    let labels: Vec<String> = (0..n).map(|v| g.vertex_label(v)).collect();
    let mut outputs: Vec<String> = labels.iter().map(|l| format!("v:{l}")).collect();
    let neighbors: Vec<Vec<usize>> = par::map_range(n, |u| g.neighbors(u).iter().collect());
    let mut rows: Vec<Vec<(usize, f64)>> = (0..n).map(|u| vec![(u, 0.0)]).collect();
    for u in 0..n {
        for &v in &neighbors[u] {
            if u < v {
                let idx = outputs.len();
                outputs.push(format!("e:{}-{}", labels[u], labels[v]));
                rows[u].push((idx, 0.0));
                rows[v].push((idx, 0.0));
            }
        }
    }
    for row in &mut rows {
        let w = 1.0 / row.len() as f64;
        for e in row.iter_mut() {
            e.1 = w;
        }
    }
    Channel::new(labels, outputs, rows)
}

/// Result of a zero-error code check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeCheck {
    pub zero_error: bool,
    /// Two confusable words and a common output for each coordinate.
    pub witness: Option<(usize, usize, Vec<usize>)>,
}

/// Checks that every two words differ in some coordinate whose output
/// supports are disjoint.
pub fn check_zero_error_code(c: &Channel, words: &[Vec<usize>]) -> Result<CodeCheck> {
    let k = words.first().map_or(0, Vec::len);
    if words.iter().any(|w| w.len() != k) {
        return Err(invalid("code words have different lengths"));
    }
    if words.iter().flatten().any(|&x| x >= c.inputs.len()) {
        return Err(invalid("code word uses an unknown input"));
    }
    let common = |x: usize, y: usize| -> Option<usize> {
        let ys: BTreeSet<usize> = c.support(y).collect();
        c.support(x).find(|a| ys.contains(a))
    };
    for a in 0..words.len() {
        for b in (a + 1)..words.len() {
            let shared: Option<Vec<usize>> = (0..k).map(|i| common(words[a][i], words[b][i])).collect();
            if let Some(outputs) = shared {
                return Ok(CodeCheck { zero_error: false, witness: Some((a, b, outputs)) });
            }
        }
    }
    Ok(CodeCheck { zero_error: true, witness: None })
}

/// Partial trace over the first factor of `X ⊗ Y`.
pub fn partial_trace_first(m: &DMatrix<f64>, dx: usize, dy: usize) -> Result<DMatrix<f64>> {
    if m.nrows() != dx * dy || m.ncols() != dx * dy {
        return Err(invalid("matrix size does not match dx * dy"));
    }
    Ok(DMatrix::from_fn(dy, dy, |a, b| (0..dx).map(|k| m[(k * dy + a, k * dy + b)]).sum()))
}

/// `|ψ⟩ = Σ_k e_k ⊗ e_k / √d`.
pub fn maximally_entangled_vector(d: usize) -> DVector<f64> {
    let mut v = DVector::zeros(d * d);
    let s = 1.0 / (d as f64).sqrt();
    for k in 0..d {
        v[k * d + k] = s;
    }
    v
}

#[derive(Clone, Debug, PartialEq)]
pub enum SharedState {
    MaximallyEntangled(usize),
    Explicit(DMatrix<f64>),
}

impl SharedState {
    pub fn local_dim(&self) -> usize {
        match self {
            SharedState::MaximallyEntangled(d) => *d,
            SharedState::Explicit(m) => (m.nrows() as f64).sqrt().round() as usize,
        }
    }

    /// Explicit density matrix of the maximally entangled state.
    pub fn explicit(d: usize) -> Result<Self> {
        if d > EXPLICIT_STATE_MAX_DIM {
            return Err(limit(format!("explicit state only for d <= {EXPLICIT_STATE_MAX_DIM}")));
        }
        let psi = maximally_entangled_vector(d);
        Ok(SharedState::Explicit(&psi * psi.transpose()))
    }

    /// `Tr((A ⊗ B) ρ)`.
    pub fn joint(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        match self {
            SharedState::MaximallyEntangled(d) => a.component_mul(b).sum() / *d as f64,
            SharedState::Explicit(rho) => (a.kronecker(b) * rho).trace(),
        }
    }

    /// Receiver state after sender outcome `A`, unnormalized: `Tr_X((A ⊗ I) ρ)`.
    pub fn receiver_state(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            SharedState::MaximallyEntangled(d) => a.transpose() / *d as f64,
            SharedState::Explicit(rho) => {
                let d = self.local_dim();
                let lifted = a.kronecker(&DMatrix::<f64>::identity(d, d)) * rho;
                partial_trace_first(&lifted, d, d).expect("square state")
            }
        }
    }
}

/// Entanglement-assisted protocol for a channel.
#[derive(Clone, Debug)]
pub struct Protocol {
    pub dim: usize,
    pub messages: usize,
    /// `sender[i]`: the nonzero `A_i^s` as `(s, matrix)`.
    pub sender: Vec<Vec<(usize, DMatrix<f64>)>>,
    pub state: SharedState,
    /// For every input, the messages `j` with `A_j^u ≠ 0` and the matrix index.
    by_input: Vec<Vec<(usize, usize)>>,
    /// Inputs reaching each output.
    columns: Vec<Vec<usize>>,
}

/// Receiver measurement on one output: outcome `0` carries the completion.
#[derive(Clone, Debug)]
pub struct ReceiverMeasurement {
    pub outcomes: Vec<(usize, DMatrix<f64>)>,
}

impl ReceiverMeasurement {
    pub fn operator(&self, j: usize) -> Option<&DMatrix<f64>> {
        self.outcomes.iter().find(|e| e.0 == j).map(|e| &e.1)
    }
}

fn is_projector(m: &DMatrix<f64>) -> bool {
    (m * m - m).abs().max() <= CONSTRUCTION_TOL
}

/// Orthogonal projector onto the range of a PSD matrix.
fn range_projector(s: &DMatrix<f64>) -> DMatrix<f64> {
    if is_projector(s) {
        return s.clone();
    }
    let eig = s.clone().symmetric_eigen();
    let d = s.nrows();
    let mut p = DMatrix::zeros(d, d);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l > 1e-9 {
            let v = eig.eigenvectors.column(k);
            p += v * v.transpose();
        }
    }
    p
}

impl Protocol {
    /// Receiver measurement for output `t`: `B_t^j` projects onto the span of
    /// the sender operators of message `j` on inputs reaching `t`.
    pub fn receiver(&self, t: usize) -> Result<ReceiverMeasurement> {
        let d = self.dim;
        let mut sums: Vec<(usize, DMatrix<f64>)> = Vec::new();
        for &u in &self.columns[t] {
            for &(j, k) in &self.by_input[u] {
                let a = &self.sender[j][k].1;
                match sums.iter_mut().find(|e| e.0 == j) {
                    Some(e) => e.1 += a,
                    None => sums.push((j, a.clone())),
                }
            }
        }
        let mut outcomes: Vec<(usize, DMatrix<f64>)> = sums.into_iter().map(|(j, s)| (j, range_projector(&s))).collect();
        let mut total = DMatrix::<f64>::zeros(d, d);
        for (_, b) in &outcomes {
            total += b;
        }
        let completion = DMatrix::<f64>::identity(d, d) - &total;
        if !is_projector(&completion) {
            let min = completion.clone().symmetric_eigen().eigenvalues.min();
            if min < -COMPLETENESS_TOL {
                return Err(Error::Protocol(format!(
                    "receiver operators on output {t} exceed the identity (eigenvalue {min:e})"
                )));
            }
        }
        match outcomes.iter_mut().find(|e| e.0 == 0) {
            Some(e) => e.1 += &completion,
            None => outcomes.push((0, completion)),
        }
        outcomes.sort_by_key(|e| e.0);
        Ok(ReceiverMeasurement { outcomes })
    }

    /// Checks completeness of every sender measurement and the zero-error
    /// condition over every `(i, s, t, j)` with `j ≠ i` and `P(t|s) > 0`.
    pub fn verify(&self, c: &Channel) -> Result<ProtocolCheck> {
        let d = self.dim;
        let mut completeness = 0.0f64;
        for (i, ops) in self.sender.iter().enumerate() {
            let mut sum = DMatrix::<f64>::zeros(d, d);
            for (_, a) in ops {
                sum += a;
            }
            let dev = (sum - DMatrix::<f64>::identity(d, d)).abs().max();
            if dev > COMPLETENESS_TOL {
                return Err(Error::Protocol(format!("sender measurement for message {i} is incomplete (deviation {dev:e})")));
            }
            completeness = completeness.max(dev);
        }
        let jobs: Vec<(usize, usize)> =
            (0..self.messages).flat_map(|i| (0..self.sender[i].len()).map(move |k| (i, k))).collect();
        let results = par::map_slice(&jobs, |&(i, k)| -> Result<(f64, u64, Option<Violation>)> {
            let (s, a) = &self.sender[i][k];
            let (mut worst, mut checked, mut witness) = (0.0f64, 0u64, None);
            for t in c.support(*s) {
                let r = self.receiver(t)?;
                for (j, b) in &r.outcomes {
                    if *j == i {
                        continue;
                    }
                    checked += 1;
                    let v = self.state.joint(a, b).abs();
                    if v > worst {
                        worst = v;
                        if v > ZERO_ERROR_TOL {
                            witness = Some((i, *s, t, *j));
                        }
                    }
                }
            }
            Ok((worst, checked, witness))
        });
        let mut check = ProtocolCheck { checked: 0, max_violation: 0.0, completeness_deviation: completeness };
        for r in results {
            let (worst, checked, witness) = r?;
            if let Some((i, s, t, j)) = witness {
                return Err(Error::Protocol(format!(
                    "message {i}, sender outcome {s}, output {t} gives receiver outcome {j} with probability {worst:e}"
                )));
            }
            check.checked += checked;
            check.max_violation = check.max_violation.max(worst);
        }
        Ok(check)
    }
}

/// `(message, sender outcome, output, receiver outcome)`.
type Violation = (usize, usize, usize, usize);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolCheck {
    pub checked: u64,
    pub max_violation: f64,
    pub completeness_deviation: f64,
}

/// Protocol from a certificate whose graph is the confusability graph of `c`.
///
/// The shared state lives on the range of `rho`, which must be a multiple of
/// a projector of rank `r`; the sender operators are `r · ρ(u)_i` restricted
/// to that range. The protocol is verified before it is returned.
pub fn protocol_from_cert(cert: &EntCert, c: &Channel) -> Result<(Protocol, ProtocolCheck)> {
    let n = c.inputs.len();
    if cert.ops.keys().any(|&(u, _)| u >= n) {
        return Err(invalid("certificate vertices exceed the channel inputs"));
    }
    let den = cert.denominator as f64;
    let dim = cert.dim;
    let to_float = |m: &crate::entcert::IntMatrix| DMatrix::from_fn(dim, dim, |i, j| m.get(i, j) as f64 / den);
    let rho = to_float(&cert.rho);
    let eig = rho.clone().symmetric_eigen();
    let keep: Vec<usize> = (0..dim).filter(|&k| eig.eigenvalues[k] > 1e-9).collect();
    let r = keep.len();
    if r == 0 {
        return Err(Error::Protocol("rho is zero".into()));
    }
    if let Some(&k) = keep.iter().find(|&&k| (eig.eigenvalues[k] - 1.0 / r as f64).abs() > COMPLETENESS_TOL) {
        return Err(Error::Protocol(format!(
            "rho has eigenvalue {} on its support, not 1/{r}",
            eig.eigenvalues[k]
        )));
    }
    let basis = DMatrix::from_fn(dim, r, |i, c| eig.eigenvectors[(i, keep[c])]);
    let mut sender: Vec<Vec<(usize, DMatrix<f64>)>> = vec![Vec::new(); cert.m];
    let mut by_input: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (&(u, i), m) in &cert.ops {
        let a = basis.transpose() * to_float(m) * &basis * r as f64;
        let a = (&a + a.transpose()) * 0.5;
        by_input[u].push((i, sender[i].len()));
        sender[i].push((u, a));
    }
    let protocol = Protocol {
        dim: r,
        messages: cert.m,
        sender,
        state: SharedState::MaximallyEntangled(r),
        by_input,
        columns: c.columns(),
    };
    let check = protocol.verify(c)?;
    Ok((protocol, check))
}

/// One simulated use of the protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub message: usize,
    pub sender_outcome: usize,
    pub output: usize,
    /// Receiver outcome distribution as `(j, probability)`.
    pub distribution: Vec<(usize, f64)>,
    pub decoded: usize,
}

/// Sends message `i` once: samples `s` with probability `Tr((A_i^s ⊗ I)ρ)`,
/// passes it through the channel, and decodes by the most likely receiver
/// outcome on the post-measurement state.
pub fn simulate_transmission(p: &Protocol, c: &Channel, i: usize, seed: u64) -> Result<Transcript> {
    if i >= p.messages {
        return Err(invalid(format!("message {i} out of range (M = {})", p.messages)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ops = &p.sender[i];
    let identity = DMatrix::<f64>::identity(p.dim, p.dim);
    let weights: Vec<f64> = ops.iter().map(|(_, a)| p.state.joint(a, &identity).max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > COMPLETENESS_TOL {
        return Err(Error::Protocol(format!("sender outcome probabilities sum to {total}")));
    }
    let pick = WeightedIndex::new(&weights).map_err(|e| Error::Protocol(e.to_string()))?;
    let (s, a) = &ops[pick.sample(&mut rng)];
    let row = c.row(*s);
    let out = WeightedIndex::new(row.iter().map(|e| e.1)).map_err(|e| Error::Protocol(e.to_string()))?;
    let t = row[out.sample(&mut rng)].0;
    let state = p.state.receiver_state(a);
    let state = &state / state.trace();
    let r = p.receiver(t)?;
    let distribution: Vec<(usize, f64)> = r.outcomes.iter().map(|(j, b)| (*j, (b * &state).trace())).collect();
    let decoded = distribution
        .iter()
        .fold((0, f64::NEG_INFINITY), |best, &(j, q)| if q > best.1 { (j, q) } else { best })
        .0;
    Ok(Transcript { message: i, sender_outcome: *s, output: t, distribution, decoded })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub failures: usize,
    pub min_success_probability: f64,
}

/// Runs `trials` transmissions, cycling through the messages; trial `k` uses
/// seed `seed + k`.
pub fn run_trials(p: &Protocol, c: &Channel, trials: usize, seed: u64) -> Result<TrialSummary> {
    let results = par::map_range(trials, |k| simulate_transmission(p, c, k % p.messages, seed.wrapping_add(k as u64)));
    let mut summary = TrialSummary { trials, failures: 0, min_success_probability: 1.0 };
    for t in results {
        let t = t?;
        if t.decoded != t.message {
            summary.failures += 1;
        }
        let q = t.distribution.iter().find(|e| e.0 == t.message).map_or(0.0, |e| e.1);
        summary.min_success_probability = summary.min_success_probability.min(q);
    }
    Ok(summary)
}
