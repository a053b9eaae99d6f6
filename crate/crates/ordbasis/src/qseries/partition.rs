//! Partition numbers via the pentagonal number recurrence.

use num::BigInt;
use num::{One, Zero};

/// Table of `p(0), ..., p(n)`.
pub fn partition_numbers(n: usize) -> Vec<BigInt> {
    let mut table = vec![BigInt::zero(); n + 1];
    table[0] = BigInt::one();
    for i in 1..=n {
        let mut sum = BigInt::zero();
        let mut k: i64 = 1;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > i {
                break;
            }
            let positive = k % 2 == 1;
            if positive {
                sum += &table[i - g1];
            } else {
                sum -= &table[i - g1];
            }
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= i {
                if positive {
                    sum += &table[i - g2];
                } else {
                    sum -= &table[i - g2];
                }
            }
            k += 1;
        }
        table[i] = sum;
    }
    table
}

pub fn partition_number(n: usize) -> BigInt {
    partition_numbers(n).pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: enumerate partitions with parts ≤ max.
    fn brute(n: usize, max: usize) -> u64 {
        if n == 0 {
            return 1;
        }
        (1..=max.min(n)).map(|k| brute(n - k, k)).sum()
    }

    #[test]
    fn matches_brute_force() {
        let table = partition_numbers(25);
        for n in 0..=25 {
            assert_eq!(table[n], BigInt::from(brute(n, n.max(1))));
        }
    }

    #[test]
    fn known_values() {
        // p(6) = 11 (the 11 partitions of 6), p(5) = 7
        assert_eq!(partition_number(6), BigInt::from(11));
        assert_eq!(partition_number(5), BigInt::from(7));
        assert_eq!(partition_number(100), "190569292".parse::<BigInt>().unwrap());
    }
}
