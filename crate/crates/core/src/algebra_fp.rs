//! Arithmetic over `F_p`, Frankl–Wilson polynomials and the Haemers rank bound.
//!
//! For a vertex `x` of `G_n` or `H_n` with `n = 4p - 1`, the sign vector
//! `u[x] = ((-1)^{x_1}, ..., (-1)^{x_n})` defines
//! `Q_x(v) = Π_{i=1}^{p-1} (⟨u[x], v⟩ + 1 - i)`, whose multilinear reduction
//! `P_x` has degree at most `p - 1`. The matrix `A(x, y) = P_x(u[y])` fits the
//! graph and factors through the monomial space, so its rank is at most
//! `Σ_{i<p} C(n, i)`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::binom::binomial_u128;
use crate::bitgraph::{words_of_weight, BitGraph, BitVertex, Family, Graph};
use crate::error::{invalid, limit, Error, Result};
use crate::hadamard::is_prime;
use crate::par;

/// Largest supported modulus; entries live in one byte.
pub const MAX_MODULUS: u32 = 251;
/// Combined byte budget for the `S` and `T` factors.
pub const ST_MEMORY_CAP: usize = 2 << 30;
/// Byte budget for a materialized fitting matrix.
pub const A_MEMORY_CAP: usize = 2 << 30;

const DUMP_MAGIC: &[u8; 8] = b"QCAPFPM1";

fn check_modulus(p: u32) -> Result<()> {
    if !(2..=MAX_MODULUS).contains(&p) || !is_prime(p as u64) {
        return Err(invalid(format!("modulus {p} must be a prime below {}", MAX_MODULUS + 1)));
    }
    Ok(())
}

fn check_odd_prime(p: u32) -> Result<()> {
    check_modulus(p)?;
    if p == 2 {
        return Err(invalid("p must be an odd prime"));
    }
    Ok(())
}

fn pow_mod(b: u32, mut e: u32, p: u32) -> u32 {
    let p = p as u64;
    let (mut r, mut b) = (1u64, b as u64 % p);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r as u32
}

/// Multiplicative inverse of a nonzero residue.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    pow_mod(a, p - 2, p)
}

/// `a mod p` for a signed integer, in `[0, p)`.
pub fn reduce(a: i64, p: u32) -> u32 {
    a.rem_euclid(p as i64) as u32
}

/// Dense row-major matrix over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Result<Self> {
        check_modulus(p)?;
        Ok(Self { p, rows, cols, data: vec![0; rows * cols] })
    }

    pub fn identity(p: u32, n: usize) -> Result<Self> {
        let mut m = Self::zeros(p, n, n)?;
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        Ok(m)
    }

    /// Builds a matrix from signed integer rows, reducing every entry.
    pub fn from_rows(p: u32, rows: &[Vec<i64>]) -> Result<Self> {
        check_modulus(p)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(invalid("ragged rows"));
        }
        let data = rows.iter().flatten().map(|&a| reduce(a, p) as u8).collect();
        Ok(Self { p, rows: rows.len(), cols, data })
    }

    pub fn random<R: Rng>(p: u32, rows: usize, cols: usize, rng: &mut R) -> Result<Self> {
        check_modulus(p)?;
        let data = (0..rows * cols).map(|_| rng.random_range(0..p) as u8).collect();
        Ok(Self { p, rows, cols, data })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j] as u32
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = (v % self.p) as u8;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|&x| x as u32).collect()).collect()
    }

    /// `self · otherᵀ`; dot products accumulate in `u64` and reduce once.
    pub fn mul_transpose(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.p != other.p || self.cols != other.cols {
            return Err(invalid("shape or modulus mismatch in product"));
        }
        let (p, n, m) = (self.p as u64, other.rows, self.cols);
        let mut out = FpMatrix::zeros(self.p, self.rows, n)?;
        par::for_each_row_mut(&mut out.data, n.max(1), |i, row| {
            let a = &self.data[i * m..(i + 1) * m];
            for (j, cell) in row.iter_mut().enumerate() {
                let b = &other.data[j * m..(j + 1) * m];
                let acc: u64 = a.iter().zip(b).map(|(&x, &y)| x as u64 * y as u64).sum();
                *cell = (acc % p) as u8;
            }
        });
        Ok(out)
    }

    /// Ordinary product `self · other`.
    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.p != other.p || self.cols != other.rows {
            return Err(invalid("shape or modulus mismatch in product"));
        }
        self.mul_transpose(&other.transpose())
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut data = vec![0u8; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        FpMatrix { p: self.p, rows: self.cols, cols: self.rows, data }
    }

    pub fn kron(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.p != other.p {
            return Err(invalid("modulus mismatch in Kronecker product"));
        }
        let (rows, cols) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = FpMatrix::zeros(self.p, rows, cols)?;
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        let v = a * other.get(i2, j2) % self.p;
                        out.data[(i1 * other.rows + i2) * cols + j1 * other.cols + j2] = v as u8;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Binary dump: magic, `p` (u32 LE), rows and cols (u64 LE), row-major bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(28 + self.data.len());
        out.extend_from_slice(DUMP_MAGIC);
        out.extend_from_slice(&self.p.to_le_bytes());
        out.extend_from_slice(&(self.rows as u64).to_le_bytes());
        out.extend_from_slice(&(self.cols as u64).to_le_bytes());
        out.extend_from_slice(&self.data);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 28 || &bytes[..8] != DUMP_MAGIC {
            return Err(invalid("not an F_p matrix dump"));
        }
        let word = |r: std::ops::Range<usize>| -> u64 {
            let mut b = [0u8; 8];
            b[..r.len()].copy_from_slice(&bytes[r]);
            u64::from_le_bytes(b)
        };
        let p = word(8..12) as u32;
        let (rows, cols) = (word(12..20) as usize, word(20..28) as usize);
        check_modulus(p)?;
        let data = bytes[28..].to_vec();
        if rows.checked_mul(cols) != Some(data.len()) || data.iter().any(|&x| x as u32 >= p) {
            return Err(invalid("dump payload does not match its header"));
        }
        Ok(Self { p, rows, cols, data })
    }
}

/// Exact rank by forward elimination, pivoting on the first nonzero entry
/// of each column.
pub fn rank_fp(m: &FpMatrix) -> usize {
    let (p, cols) = (m.p, m.cols);
    let mut data = m.data.clone();
    let mut rank = 0;
    for c in 0..cols {
        if rank == m.rows {
            break;
        }
        let Some(piv) = (rank..m.rows).find(|&r| data[r * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for j in 0..cols {
                data.swap(piv * cols + j, rank * cols + j);
            }
        }
        let inv = inv_mod(data[rank * cols + c] as u32, p);
        for j in c..cols {
            data[rank * cols + j] = (data[rank * cols + j] as u32 * inv % p) as u8;
        }
        let (head, tail) = data.split_at_mut((rank + 1) * cols);
        let pivot_row = &head[rank * cols..];
        par::for_each_row_mut(tail, cols, |_, row| {
            let f = row[c] as u32;
            if f == 0 {
                return;
            }
            let g = p - f;
            for j in c..cols {
                row[j] = ((row[j] as u32 + g * pivot_row[j] as u32) % p) as u8;
            }
        });
        rank += 1;
    }
    rank
}

/// A point of `{±1}^n` over `F_p`, stored as the set of negative coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignVector {
    n: usize,
    neg: u64,
}

impl SignVector {
    pub fn new(n: usize, neg: u64) -> Result<Self> {
        if n == 0 || n > 63 || (neg >> n) != 0 {
            return Err(invalid(format!("sign vector of length {n} with mask {neg:#x}")));
        }
        Ok(Self { n, neg })
    }

    /// `u[x]_i = (-1)^{x_i}`.
    pub fn from_vertex(x: &BitVertex) -> Self {
        let neg = (0..x.len()).filter(|&i| x.coord(i)).fold(0u64, |m, i| m | (1 << i));
        Self { n: x.len(), neg }
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Result<Self> {
        let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        Self::new(n, rng.random::<u64>() & mask)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Entry `i` as `±1`.
    pub fn entry(&self, i: usize) -> i64 {
        if self.neg >> i & 1 == 1 { -1 } else { 1 }
    }

    /// Entries reduced mod `p` (`-1 ↦ p - 1`).
    pub fn residues(&self, p: u32) -> Vec<u32> {
        (0..self.n).map(|i| reduce(self.entry(i), p)).collect()
    }

    /// Value of the monomial `Π_{i ∈ mask} v_i`.
    pub fn monomial(&self, mask: u64) -> i64 {
        if (mask & self.neg).count_ones() % 2 == 1 { -1 } else { 1 }
    }

    /// `⟨self, other⟩ mod p`, summed coordinate by coordinate.
    pub fn dot_mod(&self, other: &SignVector, p: u32) -> Result<u32> {
        if self.n != other.n {
            return Err(invalid("sign vectors of different lengths"));
        }
        let (a, b) = (self.residues(p), other.residues(p));
        Ok((a.iter().zip(&b).map(|(&x, &y)| x as u64 * y as u64).sum::<u64>() % p as u64) as u32)
    }
}

fn check_length(n: usize, p: u32) -> Result<()> {
    if !(n as u64 + 1).is_multiple_of(p as u64) {
        return Err(invalid(format!("n = {n} is not ≡ -1 (mod {p})")));
    }
    Ok(())
}

/// `⟨u[x], u[y]⟩ mod p`, checked against `-2 d(x, y) - 1 mod p`.
pub fn inner_product_identity_check(x: &BitVertex, y: &BitVertex, p: u32) -> Result<u32> {
    check_odd_prime(p)?;
    if x.len() != y.len() {
        return Err(invalid("vertices of different lengths"));
    }
    check_length(x.len(), p)?;
    let dot = SignVector::from_vertex(x).dot_mod(&SignVector::from_vertex(y), p)?;
    let d = (x.bits() ^ y.bits()).count_ones() as i64;
    let expected = reduce(-2 * d - 1, p);
    if dot != expected {
        return Err(Error::Internal(format!("⟨u[{x}],u[{y}]⟩ = {dot} but -2d-1 = {expected} (mod {p})")));
    }
    Ok(dot)
}

/// Product-form evaluator of `Q_u(v) = Π_{i=1}^{p-1} (⟨u, v⟩ + 1 - i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FranklWilsonQ {
    pub p: u32,
    pub u: SignVector,
}

impl FranklWilsonQ {
    pub fn evaluate(&self, v: &SignVector) -> Result<u32> {
        let s = self.u.dot_mod(v, self.p)? as u64;
        let p = self.p as u64;
        Ok((1..p).fold(1u64, |acc, i| acc * ((s + 1 + p - i) % p) % p) as u32)
    }

    /// Coefficients of `Q` as a polynomial in `s = ⟨u, v⟩`, lowest first,
    /// by convolving the `p - 1` linear factors.
    pub fn univariate_coefficients(&self) -> Vec<u32> {
        let p = self.p;
        let mut c = vec![1u32];
        for i in 1..p {
            let root = reduce(1 - i as i64, p);
            let mut next = vec![0u32; c.len() + 1];
            for (k, &a) in c.iter().enumerate() {
                next[k] = (next[k] + a * root) % p;
                next[k + 1] = (next[k + 1] + a) % p;
            }
            c = next;
        }
        c
    }
}

/// `Q_u` for the sign vector `u`; requires `n ≡ -1 (mod p)`.
pub fn frankl_wilson_q(u: SignVector, p: u32) -> Result<FranklWilsonQ> {
    check_odd_prime(p)?;
    check_length(u.len(), p)?;
    Ok(FranklWilsonQ { p, u })
}

/// Multilinear polynomial over `F_p`: bitmask of variables → nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultilinearPoly {
    pub p: u32,
    pub n: usize,
    pub terms: BTreeMap<u64, u32>,
}

impl MultilinearPoly {
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn coefficient(&self, mask: u64) -> u32 {
        self.terms.get(&mask).copied().unwrap_or(0)
    }

    pub fn evaluate(&self, v: &SignVector) -> u32 {
        let p = self.p as u64;
        let acc = self.terms.iter().fold(0u64, |acc, (&m, &c)| {
            let c = c as u64;
            if v.monomial(m) == 1 { (acc + c) % p } else { (acc + p - c) % p }
        });
        acc as u32
    }
}

/// Expands `Q_u` into monomials, replacing every `v_i^2` by 1.
///
/// The powers `⟨u, v⟩^k` are built one linear factor at a time; multiplying a
/// monomial by `v_j` toggles bit `j`, which is exactly the exponent reduction
/// mod 2.
pub fn multilinearize(q: &FranklWilsonQ) -> MultilinearPoly {
    let (p, n) = (q.p, q.u.len());
    let coeffs = q.univariate_coefficients();
    let u = q.u.residues(p);
    let mut power: BTreeMap<u64, u32> = BTreeMap::from([(0, 1)]);
    let mut total: BTreeMap<u64, u32> = BTreeMap::new();
    for (k, &ck) in coeffs.iter().enumerate() {
        if k > 0 {
            let mut next: BTreeMap<u64, u32> = BTreeMap::new();
            for (&m, &c) in &power {
                for (j, &uj) in u.iter().enumerate() {
                    let e = next.entry(m ^ (1 << j)).or_insert(0);
                    *e = (*e + c * uj) % p;
                }
            }
            next.retain(|_, c| *c != 0);
            power = next;
        }
        if ck == 0 {
            continue;
        }
        for (&m, &c) in &power {
            let e = total.entry(m).or_insert(0);
            *e = (*e + ck * c) % p;
        }
    }
    total.retain(|_, c| *c != 0);
    MultilinearPoly { p, n, terms: total }
}

/// Monomials of degree `< p` in `n` variables, ordered by degree then mask.
pub fn monomial_basis(n: usize, p: u32) -> Vec<u64> {
    (0..(p as usize).min(n + 1)).flat_map(|w| words_of_weight(n, w)).collect()
}

/// `Σ_{i<p} C(n, i)`, the size of [`monomial_basis`].
pub fn monomial_count(n: usize, p: u32) -> u128 {
    (0..(p as u64).min(n as u64 + 1)).map(|i| binomial_u128(n as u64, i)).sum()
}

/// Coefficient and evaluation factors with `A = S · Tᵀ`.
#[derive(Clone, Debug)]
pub struct StFactors {
    pub p: u32,
    pub n: usize,
    pub monomials: Vec<u64>,
    /// Row `x`: coefficients of `P_x` in the monomial basis.
    pub s: FpMatrix,
    /// Row `y`: monomial values at `u[y]`.
    pub t: FpMatrix,
}

fn check_haemers_input(g: &BitGraph, p: u32) -> Result<()> {
    check_odd_prime(p)?;
    if !matches!(g.family(), Family::G | Family::H) {
        return Err(invalid(format!("{} is not a G_n or H_n graph", g.name())));
    }
    if g.n() as u64 != 4 * p as u64 - 1 {
        return Err(invalid(format!("n = {} but the construction needs n = 4p - 1 = {}", g.n(), 4 * p - 1)));
    }
    Ok(())
}

/// Builds `S` and `T` for `G_n` or `H_n` with `n = 4p - 1`.
///
/// `P_x` is obtained from the expansion for the all-ones sign vector: the
/// coefficient of monomial `m` in `P_x` is that coefficient times
/// `Π_{i ∈ m} u[x]_i`.
pub fn build_st(g: &BitGraph, p: u32) -> Result<StFactors> {
    check_haemers_input(g, p)?;
    let n = g.n();
    let count = monomial_count(n, p);
    let v = g.vertex_count() as u128;
    let bytes = 2 * v * count;
    if bytes > ST_MEMORY_CAP as u128 {
        return Err(limit(format!("S and T would need {bytes} bytes (cap {ST_MEMORY_CAP})")));
    }
    let monomials = monomial_basis(n, p);
    let template = multilinearize(&frankl_wilson_q(SignVector::new(n, 0)?, p)?);
    let base: Vec<u32> = monomials.iter().map(|&m| template.coefficient(m)).collect();
    let m = monomials.len();
    let signs: Vec<SignVector> = g.vertices().iter().map(SignVector::from_vertex).collect();
    let mut s = FpMatrix::zeros(p, signs.len(), m)?;
    let mut t = FpMatrix::zeros(p, signs.len(), m)?;
    par::for_each_row_mut(&mut s.data, m, |x, row| {
        for (k, cell) in row.iter_mut().enumerate() {
            let c = base[k];
            *cell = if signs[x].monomial(monomials[k]) == 1 || c == 0 { c } else { p - c } as u8;
        }
    });
    par::for_each_row_mut(&mut t.data, m, |y, row| {
        for (k, cell) in row.iter_mut().enumerate() {
            *cell = if signs[y].monomial(monomials[k]) == 1 { 1 } else { p - 1 } as u8;
        }
    });
    Ok(StFactors { p, n, monomials, s, t })
}

/// Outcome of the exhaustive "fits" check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitsReport {
    pub fits: bool,
    pub diagonal_nonzero: bool,
    pub nonadjacent_zero: bool,
    pub entries_checked: u64,
    pub diagonal_values: Vec<u32>,
    pub witness: Option<(usize, usize)>,
}

/// Checks `A(x, x) ≠ 0` and `A(x, y) = 0` for non-adjacent `x ≠ y`.
pub fn check_fits(a: &FpMatrix, g: &dyn Graph) -> Result<FitsReport> {
    let v = g.vertex_count();
    if a.rows() != v || a.cols() != v {
        return Err(invalid("matrix shape does not match the graph"));
    }
    let bad_diag = (0..v).find(|&x| a.get(x, x) == 0);
    let bad_off = par::map_range(v, |x| (0..v).find(|&y| y != x && a.get(x, y) != 0 && !g.is_adjacent(x, y)));
    let bad_off = bad_off.iter().enumerate().find_map(|(x, y)| y.map(|y| (x, y)));
    let mut diagonal_values: Vec<u32> = (0..v).map(|x| a.get(x, x)).collect();
    diagonal_values.sort_unstable();
    diagonal_values.dedup();
    Ok(FitsReport {
        fits: bad_diag.is_none() && bad_off.is_none(),
        diagonal_nonzero: bad_diag.is_none(),
        nonadjacent_zero: bad_off.is_none(),
        entries_checked: (v * v) as u64,
        diagonal_values,
        witness: bad_diag.map(|x| (x, x)).or(bad_off),
    })
}

/// `A = S · Tᵀ` together with its exhaustive fits check.
///
/// A failed check is reported as an internal error: the construction always
/// fits when `n = 4p - 1`.
pub fn haemers_matrix(g: &BitGraph, p: u32) -> Result<(FpMatrix, FitsReport, StFactors)> {
    check_haemers_input(g, p)?;
    let v = g.vertex_count();
    if v * v > A_MEMORY_CAP {
        return Err(limit(format!("A would need {} bytes (cap {A_MEMORY_CAP})", v * v)));
    }
    let st = build_st(g, p)?;
    let a = st.s.mul_transpose(&st.t)?;
    let report = check_fits(&a, g)?;
    if !report.fits {
        return Err(Error::Internal(format!("fitting matrix fails at {:?}", report.witness)));
    }
    Ok((a, report, st))
}

/// JSON summary of a Haemers rank computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub p: u32,
    pub n: usize,
    pub matrix: String,
    pub rank: usize,
    pub bound: u128,
    pub fits: bool,
}

/// Builds `A`, checks it fits, and computes its rank.
pub fn haemers_rank(g: &BitGraph, p: u32) -> Result<(RankReport, FpMatrix)> {
    let (a, fits, st) = haemers_matrix(g, p)?;
    let rank = rank_fp(&a);
    let report = RankReport {
        p,
        n: g.n(),
        matrix: "A".into(),
        rank,
        bound: st.monomials.len() as u128,
        fits: fits.fits,
    };
    Ok((report, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rank_trivial_cases() {
        assert_eq!(rank_fp(&FpMatrix::identity(3, 5).unwrap()), 5);
        assert_eq!(rank_fp(&FpMatrix::zeros(3, 4, 6).unwrap()), 0);
        let m = FpMatrix::from_rows(3, &[vec![1, 2], vec![2, 1]]).unwrap();
        // (2, 1) = 2·(1, 2) mod 3.
        assert_eq!(rank_fp(&m), 1);
        let m = FpMatrix::from_rows(5, &[vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(rank_fp(&m), 2);
        assert!(FpMatrix::zeros(4, 1, 1).is_err());
    }

    #[test]
    fn dump_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = FpMatrix::random(5, 3, 7, &mut rng).unwrap();
        assert_eq!(FpMatrix::from_bytes(&m.to_bytes()).unwrap(), m);
        assert!(FpMatrix::from_bytes(b"garbage").is_err());
    }

    #[test]
    fn identity_examples() {
        let x: BitVertex = "11111100000".parse().unwrap();
        assert_eq!(inner_product_identity_check(&x, &x, 3).unwrap(), 2);
        let y: BitVertex = "00000011111".parse().unwrap();
        let y6: BitVertex = "11100011100".parse().unwrap();
        assert_eq!((x.bits() ^ y.bits()).count_ones(), 11);
        assert_eq!((x.bits() ^ y6.bits()).count_ones(), 6);
        assert_eq!(inner_product_identity_check(&x, &y6, 3).unwrap(), 2);
        let y4: BitVertex = "11110011000".parse().unwrap();
        assert_eq!((x.bits() ^ y4.bits()).count_ones(), 4);
        assert_eq!(inner_product_identity_check(&x, &y4, 3).unwrap(), 0);
        let short: BitVertex = "1010".parse().unwrap();
        assert!(inner_product_identity_check(&short, &short, 3).is_err());
    }

    #[test]
    fn q_at_own_vector_is_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [3u32, 5, 7] {
            let n = 4 * p as usize - 1;
            let u = SignVector::random(n, &mut rng).unwrap();
            let q = frankl_wilson_q(u, p).unwrap();
            assert_eq!(q.evaluate(&u).unwrap(), p - 1);
        }
    }

    #[test]
    fn univariate_coefficients_for_p3() {
        // (s)(s - 1) = s^2 - s.
        let q = frankl_wilson_q(SignVector::new(11, 0).unwrap(), 3).unwrap();
        assert_eq!(q.univariate_coefficients(), vec![0, 2, 1]);
    }

    #[test]
    fn multilinear_agrees_with_product_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [3u32, 5] {
            let n = 2 * p as usize - 1;
            let u = SignVector::random(n, &mut rng).unwrap();
            let q = frankl_wilson_q(u, p).unwrap();
            let poly = multilinearize(&q);
            assert!(poly.degree() < p as usize);
            for v in 0..(1u64 << n) {
                let v = SignVector::new(n, v).unwrap();
                assert_eq!(poly.evaluate(&v), q.evaluate(&v).unwrap());
            }
        }
    }

    #[test]
    fn basis_size_and_order() {
        let b = monomial_basis(11, 3);
        assert_eq!(b.len(), 67);
        assert_eq!(monomial_count(11, 3), 67);
        assert_eq!(b[0], 0);
        assert!(b.windows(2).all(|w| (w[0].count_ones(), w[0]) < (w[1].count_ones(), w[1])));
    }

    #[test]
    fn haemers_g11() {
        let g = BitGraph::build_g(11).unwrap();
        let (report, _) = haemers_rank(&g, 3).unwrap();
        assert!(report.fits);
        assert_eq!(report.bound, 67);
        assert!(report.rank <= 67);
    }

    #[test]
    fn haemers_rejects_wrong_n() {
        let g = BitGraph::build_g(7).unwrap();
        assert!(matches!(build_st(&g, 3), Err(Error::InvalidParameter(_))));
        let c = BitGraph::build_cycle(11).unwrap();
        assert!(build_st(&c, 3).is_err());
    }
}
