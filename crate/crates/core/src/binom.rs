//! Exact binomial coefficients.

use num_bigint::BigUint;
use num_traits::One;

/// `C(n, k)` in `u128`; saturates at `u128::MAX` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// `C(n, k)` as a big integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n,0) + C(n,1) + ... + C(n,m-1)`.
pub fn binomial_prefix_sum(n: u64, m: u64) -> BigUint {
    let mut total = BigUint::default();
    let mut term = BigUint::one();
    for i in 0..m.min(n + 1) {
        total += &term;
        term *= n - i;
        term /= i + 1;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binomial_u128(11, 6), 462);
        assert_eq!(binomial_u128(3, 5), 0);
        assert_eq!(binomial(19, 10), BigUint::from(92378u32));
        assert_eq!(binomial_prefix_sum(11, 3), BigUint::from(67u32));
        assert_eq!(binomial_prefix_sum(19, 5), BigUint::from(5036u32));
    }

    #[test]
    fn pascal_triangle_agrees_up_to_200() {
        let mut row = vec![BigUint::one()];
        for n in 1..=200u64 {
            let mut next = vec![BigUint::one(); n as usize + 1];
            for k in 1..n as usize {
                next[k] = &row[k - 1] + &row[k];
            }
            row = next;
            for (k, v) in row.iter().enumerate() {
                assert_eq!(&binomial(n, k as u64), v, "C({n},{k})");
            }
        }
    }
}
