//! Exact integer combinatorics on 128-bit integers.

use crate::error::{Error, Result};

/// Falling factorial (n)_i = n(n-1)...(n-i+1), with (n)_0 = 1 and
/// (n)_i = 0 for i > n.
pub fn falling_factorial(n: u64, i: u64) -> Result<i128> {
    if i > n {
        return Ok(0);
    }
    let mut acc: i128 = 1;
    for k in 0..i {
        acc = acc
            .checked_mul((n - k) as i128)
            .ok_or(Error::Overflow {
                context: "falling factorial",
            })?;
    }
    Ok(acc)
}

/// Binomial coefficient C(n, k), exact.
pub fn binomial(n: u64, k: u64) -> Result<i128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for j in 0..k {
        acc = acc.checked_mul((n - j) as i128).ok_or(Error::Overflow {
            context: "binomial",
        })?;
        acc /= (j + 1) as i128; // exact: C(n, j+1) is an integer
    }
    Ok(acc)
}

/// n!, exact.
pub fn factorial(n: u64) -> Result<i128> {
    falling_factorial(n, n)
}
