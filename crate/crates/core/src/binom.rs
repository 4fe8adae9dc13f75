//! Exact binomial coefficients.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `C(n, k)` as an arbitrary-precision integer; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1) at this point.
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` rounded once to the nearest `f64`.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    binomial(n, k).to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pascal_rows_agree() {
        let mut row = vec![BigUint::one()];
        for n in 1..=120u64 {
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

    #[test]
    fn large_values() {
        assert_eq!(binomial(7, 3), BigUint::from(35u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        // C(211,105) is far beyond u64 but well inside f64 range.
        let big = binomial(211, 105);
        assert!(big.bits() > 200);
        let f = binomial_f64(211, 105);
        assert!(f.is_finite() && f > 1e61 && f < 1e63);
        assert_eq!(binomial(211, 105), binomial(211, 106));
    }
}
