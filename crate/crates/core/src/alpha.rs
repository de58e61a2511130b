//! Maximum independent sets by branch and bound.
//!
//! Independent sets of `G` are cliques of the complement, which is searched
//! with greedy-coloring bounds in the style of MCQ. Vertices are relabelled in
//! a fixed order (complement degree descending, then index) so every run is
//! deterministic. A node or time budget turns the search into an anytime
//! procedure that always returns valid lower and upper bounds.

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bitgraph::{strong_power, Graph};
use crate::bitset::BitSet;
use crate::error::{invalid, limit, Result};
use crate::par;

/// Largest graph the solver materializes adjacency for.
pub const MAX_SOLVER_VERTICES: usize = 20_000;

/// Search limits; `None` means unlimited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn nodes(n: u64) -> Self {
        Self { max_nodes: Some(n), max_time: None }
    }

    pub fn millis(ms: u64) -> Self {
        Self { max_nodes: None, max_time: Some(Duration::from_millis(ms)) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaResult {
    pub graph: String,
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    /// Vertex indices of an independent set of size `lower`.
    pub witness: Vec<usize>,
    pub nodes: u64,
    pub seconds: f64,
}

/// JSON form with vertex labels in place of indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaExport {
    pub graph: String,
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    pub witness: Vec<String>,
    pub nodes: u64,
    pub seconds: f64,
}

impl AlphaResult {
    pub fn export(&self, g: &dyn Graph) -> AlphaExport {
        AlphaExport {
            graph: self.graph.clone(),
            lower: self.lower,
            upper: self.upper,
            exact: self.exact,
            witness: self.witness.iter().map(|&v| g.vertex_label(v)).collect(),
            nodes: self.nodes,
            seconds: self.seconds,
        }
    }
}

/// Exhaustive pair check. On failure returns the offending pair, which is an
/// edge or a repeated vertex.
pub fn verify_independent(g: &dyn Graph, set: &[usize]) -> (bool, Option<(usize, usize)>) {
    for (a, &u) in set.iter().enumerate() {
        for &v in &set[a + 1..] {
            if u == v || g.is_adjacent(u, v) {
                return (false, Some((u, v)));
            }
        }
    }
    (true, None)
}

struct Search<'a> {
    /// Complement adjacency in relabelled order.
    adj: &'a [BitSet],
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    budget: Budget,
    start: Instant,
    aborted: bool,
}

impl Search<'_> {
    fn out_of_budget(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if self.budget.max_nodes.is_some_and(|m| self.nodes >= m) {
            self.aborted = true;
        } else if let Some(t) = self.budget.max_time {
            if self.nodes.is_multiple_of(256) && self.start.elapsed() >= t {
                self.aborted = true;
            }
        }
        self.aborted
    }

    /// Greedy sequential coloring of `cands` in index order. Returns vertices
    /// sorted by nondecreasing color, with their colors.
    fn color(&self, cands: &BitSet) -> (Vec<usize>, Vec<usize>) {
        let mut uncolored = cands.clone();
        let (mut order, mut colors) = (Vec::new(), Vec::new());
        let mut k = 0;
        while !uncolored.is_empty() {
            k += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                uncolored.remove(v);
                q.difference_with(&self.adj[v]);
                order.push(v);
                colors.push(k);
            }
        }
        (order, colors)
    }

    fn expand(&mut self, mut cands: BitSet) {
        let (order, colors) = self.color(&cands);
        for idx in (0..order.len()).rev() {
            if self.current.len() + colors[idx] <= self.best.len() {
                return;
            }
            self.nodes += 1;
            if self.out_of_budget() {
                return;
            }
            let v = order[idx];
            self.current.push(v);
            let next = cands.intersection(&self.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            if self.aborted {
                return;
            }
            cands.remove(v);
        }
    }
}

/// Greedy independent set: repeatedly take a vertex of least remaining degree.
pub fn greedy_independent_set(g: &dyn Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let rows: Vec<BitSet> = par::map_range(n, |u| g.neighbors(u));
    let mut alive = BitSet::full(n);
    let mut out = Vec::new();
    while !alive.is_empty() {
        let v = alive
            .iter()
            .min_by_key(|&v| (rows[v].intersection(&alive).count(), v))
            .expect("nonempty");
        out.push(v);
        alive.remove(v);
        alive.difference_with(&rows[v]);
    }
    out.sort_unstable();
    out
}

/// Maximum independent set within `budget`, optionally seeded with a known
/// independent set.
pub fn max_independent_set(g: &dyn Graph, budget: Budget, initial: Option<&[usize]>) -> Result<AlphaResult> {
    let start = Instant::now();
    let n = g.vertex_count();
    if n > MAX_SOLVER_VERTICES {
        return Err(limit(format!("{n} vertices exceeds the solver cap {MAX_SOLVER_VERTICES}")));
    }
    if let Some(set) = initial {
        if let (false, Some((u, v))) = verify_independent(g, set) {
            return Err(invalid(format!("initial set is not independent: witness {{{u},{v}}}")));
        }
    }
    if n == 0 {
        return Ok(AlphaResult {
            graph: g.name(),
            lower: 0,
            upper: 0,
            exact: true,
            witness: Vec::new(),
            nodes: 0,
            seconds: start.elapsed().as_secs_f64(),
        });
    }

    let comp: Vec<BitSet> = par::map_range(n, |u| {
        let mut row = g.neighbors(u).complement();
        row.remove(u);
        row
    });
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(comp[v].count()), v));
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let adj: Vec<BitSet> = par::map_range(n, |i| {
        let mut row = BitSet::new(n);
        for w in comp[order[i]].iter() {
            row.insert(pos[w]);
        }
        row
    });

    let greedy = greedy_independent_set(g);
    let seed = match initial {
        Some(s) if s.len() > greedy.len() => s.to_vec(),
        _ => greedy,
    };
    let mut search = Search {
        adj: &adj,
        best: seed.iter().map(|&v| pos[v]).collect(),
        current: Vec::new(),
        nodes: 0,
        budget,
        start,
        aborted: false,
    };

    // Top level inlined so an aborted search can report the coloring bound of
    // the vertices not yet fully explored.
    let mut cands = BitSet::full(n);
    let (top, colors) = search.color(&cands);
    let mut upper = None;
    for idx in (0..top.len()).rev() {
        if colors[idx] <= search.best.len() {
            break;
        }
        search.nodes += 1;
        if search.out_of_budget() {
            upper = Some(colors[idx]);
            break;
        }
        let v = top[idx];
        search.current.push(v);
        let next = cands.intersection(&adj[v]);
        if next.is_empty() {
            if search.best.is_empty() {
                search.best = vec![v];
            }
        } else {
            search.expand(next);
        }
        search.current.pop();
        if search.aborted {
            upper = Some(colors[idx]);
            break;
        }
        cands.remove(v);
    }

    let mut witness: Vec<usize> = search.best.iter().map(|&i| order[i]).collect();
    witness.sort_unstable();
    let lower = witness.len();
    let upper = upper.map_or(lower, |u| u.max(lower));
    debug_assert!(verify_independent(g, &witness).0);
    Ok(AlphaResult {
        graph: g.name(),
        lower,
        upper,
        exact: lower == upper,
        witness,
        nodes: search.nodes,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// `α(G^{⊠k})^{1/k}` as the pair `(α, k)`, from the best set found.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerBound {
    pub k: usize,
    pub value: usize,
    pub exact: bool,
    pub result: AlphaResult,
}

impl PowerBound {
    /// Numerical value of `value^{1/k}`.
    pub fn rate(&self) -> f64 {
        (self.value as f64).powf(1.0 / self.k as f64)
    }
}

/// Capacity lower bound from an independent set of the `k`-th strong power.
pub fn alpha_lower_via_power(g: Arc<dyn Graph>, k: usize, budget: Budget) -> Result<(PowerBound, Arc<dyn Graph>)> {
    if k == 0 {
        return Err(invalid("power must be at least 1"));
    }
    let size = (g.vertex_count() as u128).checked_pow(k as u32);
    if size.is_none_or(|s| s > MAX_SOLVER_VERTICES as u128) {
        return Err(limit(format!(
            "{}^{k} vertices exceeds the solver cap {MAX_SOLVER_VERTICES}",
            g.vertex_count()
        )));
    }
    let power: Arc<dyn Graph> = if k == 1 { g } else { Arc::new(strong_power(g, k)?) };
    let result = max_independent_set(power.as_ref(), budget, None)?;
    Ok((PowerBound { k, value: result.lower, exact: result.exact, result }, power))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitgraph::BitGraph;

    #[test]
    fn c5_and_triangle() {
        let c5 = BitGraph::build_cycle(5).unwrap();
        let r = max_independent_set(&c5, Budget::unlimited(), None).unwrap();
        assert_eq!((r.lower, r.upper, r.exact), (2, 2, true));
        let g3 = BitGraph::build_g(3).unwrap();
        let r = max_independent_set(&g3, Budget::unlimited(), None).unwrap();
        assert_eq!((r.lower, r.exact), (1, true));
    }

    #[test]
    fn c5_squared_is_five() {
        let c5: Arc<dyn Graph> = Arc::new(BitGraph::build_cycle(5).unwrap());
        let (pb, power) = alpha_lower_via_power(c5, 2, Budget::unlimited()).unwrap();
        assert_eq!((pb.value, pb.exact), (5, true));
        assert!(verify_independent(power.as_ref(), &pb.result.witness).0);
        assert!((pb.rate() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn k3_squared_is_complete() {
        let g3: Arc<dyn Graph> = Arc::new(BitGraph::build_g(3).unwrap());
        let (pb, _) = alpha_lower_via_power(g3, 2, Budget::unlimited()).unwrap();
        assert_eq!(pb.value, 1);
    }

    #[test]
    fn verify_independent_cases() {
        let k4 = BitGraph::complete(4).unwrap();
        assert_eq!(verify_independent(&k4, &[]), (true, None));
        assert_eq!(verify_independent(&k4, &[1, 3]), (false, Some((1, 3))));
        let e = BitGraph::from_edges(3, &[], "E3").unwrap();
        assert_eq!(verify_independent(&e, &[0, 0]), (false, Some((0, 0))));
    }

    #[test]
    fn tiny_budget_keeps_honest_bounds() {
        let g = BitGraph::build_g(11).unwrap();
        let r = max_independent_set(&g, Budget::nodes(10), None).unwrap();
        assert!(r.lower <= r.upper);
        assert!(verify_independent(&g, &r.witness).0);
        assert_eq!(r.witness.len(), r.lower);
    }

    #[test]
    fn power_cap() {
        let g: Arc<dyn Graph> = Arc::new(BitGraph::build_g(11).unwrap());
        assert!(alpha_lower_via_power(g, 2, Budget::unlimited()).is_err());
    }
}
