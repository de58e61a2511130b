//! Hadamard matrices: Sylvester doubling, Paley's first construction over
//! prime fields, normalization, and exact verification.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::par;

/// Largest Sylvester exponent accepted.
pub const MAX_SYLVESTER_EXPONENT: u32 = 12;
/// Largest prime accepted by [`paley_one`].
pub const MAX_PALEY_PRIME: u64 = 10_000;

/// Square `±1` matrix with mutually orthogonal rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HadamardMatrix {
    size: usize,
    entries: Vec<i8>,
    construction: String,
}

/// Export form: `{size, rows: ["++-+", ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HadamardExport {
    pub size: usize,
    pub rows: Vec<String>,
}

impl HadamardMatrix {
    /// Builds from explicit `±1` rows and verifies the Hadamard property.
    pub fn from_rows(rows: &[Vec<i8>], construction: impl Into<String>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(invalid("empty matrix"));
        }
        let mut entries = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(invalid(format!("row {i} has length {} in a {size}x{size} matrix", row.len())));
            }
            if let Some(bad) = row.iter().find(|&&e| e != 1 && e != -1) {
                return Err(invalid(format!("entry {bad} in row {i} is not ±1")));
            }
            entries.extend_from_slice(row);
        }
        let h = Self { size, entries, construction: construction.into() };
        h.checked()
    }

    fn checked(self) -> Result<Self> {
        if let Some((i, j)) = self.orthogonality_witness() {
            return Err(Error::Construction(format!(
                "{}: rows {i} and {j} are not orthogonal",
                self.construction
            )));
        }
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn construction(&self) -> &str {
        &self.construction
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    /// Exact check of `H·Hᵀ = m·I`.
    pub fn verify(&self) -> bool {
        self.orthogonality_witness().is_none()
    }

    /// First pair of rows `(i, j)` with nonzero inner product, if any.
    ///
    /// Rows are packed as bitmasks of their `-1` positions, so the integer
    /// inner product is `m - 2·popcount(a xor b)`.
    pub fn orthogonality_witness(&self) -> Option<(usize, usize)> {
        let m = self.size;
        let words = m.div_ceil(64);
        let packed: Vec<Vec<u64>> = par::map_range(m, |i| {
            let mut w = vec![0u64; words];
            for (j, &e) in self.row(i).iter().enumerate() {
                if e < 0 {
                    w[j / 64] |= 1 << (j % 64);
                }
            }
            w
        });
        let bad_row = par::find_first(m, |i| {
            ((i + 1)..m).any(|j| {
                let diff: u32 = packed[i].iter().zip(&packed[j]).map(|(a, b)| (a ^ b).count_ones()).sum();
                2 * diff as usize != m
            })
        })?;
        let j = ((bad_row + 1)..m).find(|&j| {
            let dot: i64 = self
                .row(bad_row)
                .iter()
                .zip(self.row(j))
                .map(|(&a, &b)| (a as i64) * (b as i64))
                .sum();
            dot != 0
        })?;
        Some((bad_row, j))
    }

    /// First row and first column are all `+1`.
    pub fn is_normalized(&self) -> bool {
        (0..self.size).all(|k| self.entry(0, k) == 1 && self.entry(k, 0) == 1)
    }

    /// `self ⊗ other`.
    pub fn kronecker(&self, other: &HadamardMatrix) -> HadamardMatrix {
        let (a, b) = (self.size, other.size);
        let m = a * b;
        let mut entries = vec![0i8; m * m];
        for i1 in 0..a {
            for j1 in 0..a {
                let s = self.entry(i1, j1);
                for i2 in 0..b {
                    let base = (i1 * b + i2) * m + j1 * b;
                    for j2 in 0..b {
                        entries[base + j2] = s * other.entry(i2, j2);
                    }
                }
            }
        }
        HadamardMatrix {
            size: m,
            entries,
            construction: format!("{}⊗{}", self.construction, other.construction),
        }
    }

    /// Rows of `+`/`-` characters, one per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.size * (self.size + 1));
        for i in 0..self.size {
            for &e in self.row(i) {
                out.push(if e > 0 { '+' } else { '-' });
            }
            out.push('\n');
        }
        out
    }

    /// Parses `+`/`-` rows (blank lines ignored) and verifies the result.
    pub fn from_text(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.chars()
                    .map(|c| match c {
                        '+' => Ok(1i8),
                        '-' => Ok(-1i8),
                        other => Err(invalid(format!("unexpected character {other:?}"))),
                    })
                    .collect::<Result<Vec<i8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows, "text")
    }

    pub fn export(&self) -> HadamardExport {
        HadamardExport {
            size: self.size,
            rows: self.to_text().lines().map(str::to_owned).collect(),
        }
    }
}

/// `[[1,1],[1,-1]]^{⊗k}`, i.e. the doubling rule applied `k` times to `[[1]]`.
pub fn sylvester(k: u32) -> Result<HadamardMatrix> {
    if k > MAX_SYLVESTER_EXPONENT {
        return Err(invalid(format!("sylvester exponent {k} exceeds {MAX_SYLVESTER_EXPONENT}")));
    }
    let mut size = 1usize;
    let mut entries = vec![1i8];
    for _ in 0..k {
        let m = size * 2;
        let mut next = vec![0i8; m * m];
        for i in 0..size {
            for j in 0..size {
                let e = entries[i * size + j];
                next[i * m + j] = e;
                next[i * m + j + size] = e;
                next[(i + size) * m + j] = e;
                next[(i + size) * m + j + size] = -e;
            }
        }
        entries = next;
        size = m;
    }
    Ok(HadamardMatrix { size, entries, construction: format!("sylvester({k})") })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Quadratic character mod prime `q` as a lookup table: `+1` on nonzero
/// squares, `-1` on non-squares, `0` at zero.
pub fn quadratic_character_table(q: u64) -> Vec<i8> {
    let mut chi = vec![-1i8; q as usize];
    chi[0] = 0;
    for x in 1..q {
        chi[((x * x) % q) as usize] = 1;
    }
    chi
}

/// Paley's first construction for a prime `q ≡ 3 (mod 4)`: `I + C` with
/// `C = [[0, 1ᵀ], [-1, Q]]` and Jacobsthal matrix `Q_ij = χ(j - i)`.
pub fn paley_one(q: u64) -> Result<HadamardMatrix> {
    if q > MAX_PALEY_PRIME {
        return Err(invalid(format!("q = {q} exceeds {MAX_PALEY_PRIME}")));
    }
    if !is_prime(q) {
        return Err(invalid(format!("q = {q} is not prime")));
    }
    if q % 4 != 3 {
        return Err(invalid(format!("q = {q} is not 3 mod 4")));
    }
    let chi = quadratic_character_table(q);
    let m = q as usize + 1;
    let mut entries = vec![0i8; m * m];
    for i in 0..m {
        for j in 0..m {
            let c = match (i, j) {
                (0, 0) => 0,
                (0, _) => 1,
                (_, 0) => -1,
                _ => chi[(j as u64 + q - i as u64) as usize % q as usize],
            };
            entries[i * m + j] = if i == j { 1 + c } else { c };
        }
    }
    HadamardMatrix { size: m, entries, construction: format!("paley({q})") }.checked()
}

/// Negates rows, then columns, so that the first row and column are all `+1`.
pub fn normalize(h: &HadamardMatrix) -> HadamardMatrix {
    let m = h.size;
    let mut entries = h.entries.clone();
    for i in 0..m {
        if entries[i * m] < 0 {
            for e in &mut entries[i * m..(i + 1) * m] {
                *e = -*e;
            }
        }
    }
    for j in 0..m {
        if entries[j] < 0 {
            for i in 0..m {
                entries[i * m + j] = -entries[i * m + j];
            }
        }
    }
    let construction = if h.construction.starts_with("normalized(") {
        h.construction.clone()
    } else {
        format!("normalized({})", h.construction)
    };
    HadamardMatrix { size: m, entries, construction }
}

/// Tries, in order: Sylvester for powers of two, Paley for `m - 1` prime
/// `≡ 3 (mod 4)`, then Sylvester doubling of a Paley matrix of size `m / 2^j`.
pub fn find_hadamard(m: usize) -> Option<HadamardMatrix> {
    if m == 0 {
        return None;
    }
    if m.is_power_of_two() {
        return sylvester(m.trailing_zeros()).ok();
    }
    let paley_ok = |size: usize| {
        let q = size as u64 - 1;
        q % 4 == 3 && q <= MAX_PALEY_PRIME && is_prime(q)
    };
    if paley_ok(m) {
        return paley_one(m as u64 - 1).ok();
    }
    let mut j = 1;
    while m.is_multiple_of(1 << j) {
        let base = m >> j;
        if base >= 4 && paley_ok(base) {
            let p = paley_one(base as u64 - 1).ok()?;
            return Some(sylvester(j).ok()?.kronecker(&p));
        }
        j += 1;
    }
    None
}
