//! Exact comparison of the entangled lower bound `|V| / (n+1)^2` with the
//! Shannon upper bound `Σ_{i<p} C(n, i)` for `n = 4p - 1`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::binom::{binomial, binomial_prefix_sum};
use crate::bitgraph::Family;
use crate::error::{invalid, Result};
use crate::geometry::{clique_from_hadamard_g, clique_from_hadamard_h};
use crate::hadamard::{find_hadamard, is_prime};

/// Largest `p` accepted by [`capacity_report`].
pub const MAX_REPORT_PRIME: u64 = 100_000;
/// Hadamard matrices and cliques up to this size are built and verified.
pub const MAX_CERTIFIED_HADAMARD: usize = 1024;
/// Exponent quoted with the asymptotic separation.
pub const STATED_EXPONENT: f64 = 0.752;

/// `-t log2 t - (1-t) log2 (1-t)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(t: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    h(t) + h(1.0 - t)
}

/// `4 (1 - H(1/4))`.
pub fn derived_exponent() -> f64 {
    4.0 * (1.0 - binary_entropy(0.25))
}

/// `log2` of a big integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.to_f64().expect("finite").log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.log2() + shift as f64
}

/// `log2` of `2^{n H(p/n)}`.
pub fn entropy_estimate_log2(n: u64, p: u64) -> Result<f64> {
    if p == 0 || p >= n {
        return Err(invalid(format!("entropy estimate needs 0 < p < n (got p = {p}, n = {n})")));
    }
    Ok(n as f64 * binary_entropy(p as f64 / n as f64))
}

/// `2^{n H(p/n)}`, checked to dominate `Σ_{i<p} C(n, i)`.
pub fn entropy_estimate(n: u64, p: u64) -> Result<f64> {
    let e = entropy_estimate_log2(n, p)?;
    let sum = log2_big(&binomial_prefix_sum(n, p));
    if sum > e + 1e-9 {
        return Err(invalid(format!("estimate 2^{e} falls below the binomial sum 2^{sum}")));
    }
    Ok(e.exp2())
}

/// `C(n, (n+1)/2) >= 2^n / (2 √n)`, checked exactly as `4 n C^2 >= 4^n`.
pub fn vertex_count_estimate_check(n: u64) -> Result<bool> {
    if n.is_multiple_of(2) {
        return Err(invalid(format!("n = {n} must be odd")));
    }
    let c = binomial(n, n.div_ceil(2));
    Ok(BigUint::from(4u32) * n * &c * &c >= BigUint::one() << (2 * n))
}

/// `|V|` of `G_n` or `H_n`.
pub fn vertex_count(family: Family, n: u64) -> Result<BigUint> {
    match family {
        Family::G => Ok(binomial(n, n.div_ceil(2))),
        Family::H => Ok(BigUint::one() << (n - 1)),
        other => Err(invalid(format!("family {other:?} has no capacity report"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HadamardRef {
    pub size: usize,
    pub construction: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalBound {
    pub num: String,
    pub den: String,
    pub log2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegerBound {
    pub value: String,
    pub log2: f64,
}

/// Where each number comes from: `"formula"`, `"certified"` (recomputed
/// from a verified artifact) or `"unavailable"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub hadamard: String,
    pub clique: String,
    pub theta_q_lower: String,
    pub theta_upper: String,
    pub artifacts: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub family: Family,
    pub n: u64,
    pub p: u64,
    pub hadamard: Option<HadamardRef>,
    pub theta_q_lower: RationalBound,
    pub theta_upper: IntegerBound,
    pub entropy_upper_log2: f64,
    pub ratio_log2: f64,
    pub separation: bool,
    pub stated_exponent: f64,
    pub derived_exponent: f64,
    pub evidence: Evidence,
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Bound comparison for `G_n` or `H_n` with `n = 4p - 1`.
///
/// All comparisons are exact. When a Hadamard matrix of size `4p` is covered
/// by the implemented constructions and small enough, it is built and
/// verified together with the clique it induces.
pub fn capacity_report(family: Family, p: u64) -> Result<CapacityReport> {
    if p < 3 || !is_prime(p) {
        return Err(invalid(format!("p = {p} is not an odd prime")));
    }
    if p > MAX_REPORT_PRIME {
        return Err(invalid(format!("p = {p} exceeds {MAX_REPORT_PRIME}")));
    }
    let n = 4 * p - 1;
    let v = vertex_count(family, n)?;
    let den = BigUint::from((n + 1) * (n + 1));
    let upper = binomial_prefix_sum(n, p);
    let separation = v > (&upper * &den);
    let lower_log2 = log2_big(&v) - log2_big(&den);
    let upper_log2 = log2_big(&upper);

    let size = 4 * p as usize;
    let (hadamard, hadamard_evidence, clique_evidence) = match (size <= MAX_CERTIFIED_HADAMARD)
        .then(|| find_hadamard(size))
        .flatten()
    {
        Some(h) => {
            let ok = h.verify();
            let clique = match family {
                Family::G => clique_from_hadamard_g(&h),
                _ => clique_from_hadamard_h(&h),
            };
            let tag = |b: bool| if b { "certified" } else { "failed" }.to_string();
            (
                Some(HadamardRef { size, construction: h.construction().to_string() }),
                tag(ok),
                tag(clique.is_ok()),
            )
        }
        None if size > MAX_CERTIFIED_HADAMARD => (None, "not-built".into(), "not-built".into()),
        None => (None, "hadamard-unavailable".into(), "hadamard-unavailable".into()),
    };

    Ok(CapacityReport {
        family,
        n,
        p,
        hadamard,
        theta_q_lower: RationalBound { num: v.to_string(), den: den.to_string(), log2: lower_log2 },
        theta_upper: IntegerBound { value: upper.to_string(), log2: upper_log2 },
        entropy_upper_log2: entropy_estimate_log2(n, p)?,
        ratio_log2: round3(lower_log2 - upper_log2),
        separation,
        stated_exponent: STATED_EXPONENT,
        derived_exponent: derived_exponent(),
        evidence: Evidence {
            hadamard: hadamard_evidence,
            clique: clique_evidence,
            theta_q_lower: "formula".into(),
            theta_upper: "formula".into(),
            artifacts: Vec::new(),
        },
    })
}

/// Numbers recomputed from explicit artifacts at a materializable `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactNumbers {
    pub vertex_count: usize,
    pub clique_size: usize,
    pub certified_messages: usize,
    pub rank: usize,
    pub monomial_count: usize,
}

/// Marks the bounds of `report` as certified when they agree with the
/// artifact-derived numbers; returns the list of mismatches otherwise.
pub fn attach_artifacts(report: &mut CapacityReport, a: &ArtifactNumbers, refs: Vec<String>) -> Vec<String> {
    let mut mismatches = Vec::new();
    if report.theta_q_lower.num != a.vertex_count.to_string() {
        mismatches.push(format!("|V| = {} but the graph has {}", report.theta_q_lower.num, a.vertex_count));
    }
    let n = report.n as usize;
    if a.clique_size != n && a.clique_size != n + 1 {
        mismatches.push(format!("clique size {} does not match n = {n}", a.clique_size));
    }
    if report.theta_upper.value != a.monomial_count.to_string() {
        mismatches.push(format!("bound {} but the monomial basis has {}", report.theta_upper.value, a.monomial_count));
    }
    if a.rank > a.monomial_count {
        mismatches.push(format!("rank {} exceeds the monomial count {}", a.rank, a.monomial_count));
    }
    if mismatches.is_empty() {
        report.evidence.theta_q_lower = "certified".into();
        report.evidence.theta_upper = "certified".into();
        report.evidence.artifacts = refs;
    }
    mismatches
}

/// Smallest odd prime `p <= max_p` with a separation for `family`.
pub fn first_separating_prime(family: Family, max_p: u64) -> Result<Option<u64>> {
    for p in (3..=max_p).filter(|&p| is_prime(p)) {
        if capacity_report_arith(family, p)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

fn capacity_report_arith(family: Family, p: u64) -> Result<bool> {
    let n = 4 * p - 1;
    let v = vertex_count(family, n)?;
    Ok(v > binomial_prefix_sum(n, p) * BigUint::from((n + 1) * (n + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_basics() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert!(entropy_estimate(11, 3).unwrap() >= 67.0);
        assert!(entropy_estimate(11, 0).is_err());
        assert!(entropy_estimate(11, 11).is_err());
        assert!((derived_exponent() - 0.7549).abs() < 1e-3);
    }

    #[test]
    fn vertex_estimates() {
        for n in [3, 11, 999] {
            assert!(vertex_count_estimate_check(n).unwrap());
        }
        assert!(vertex_count_estimate_check(10).is_err());
    }

    #[test]
    fn p3_reports() {
        let g = capacity_report(Family::G, 3).unwrap();
        assert_eq!((g.theta_q_lower.num.as_str(), g.theta_q_lower.den.as_str()), ("462", "144"));
        assert_eq!(g.theta_upper.value, "67");
        assert!(!g.separation);
        assert_eq!(g.hadamard.as_ref().unwrap().construction, "paley(11)");
        let h = capacity_report(Family::H, 3).unwrap();
        assert_eq!(h.theta_q_lower.num, "1024");
        assert!(!h.separation);
        assert!(capacity_report(Family::G, 9).is_err());
        assert!(capacity_report(Family::G, 2).is_err());
    }

    #[test]
    fn log2_of_large_values() {
        let x = BigUint::one() << 2000u32;
        assert_eq!(log2_big(&x), 2000.0);
        let y = BigUint::from(3u32) << 1500u32;
        assert!((log2_big(&y) - (1500.0 + 3f64.log2())).abs() < 1e-9);
    }
}
