//! Exact binomial arithmetic and the closed-form counts of distinct
//! intersections for `A_t` and for complete sunflowers.
//!
//! Every sum `Σ_{j=0}^{m}` with `m < 0` is empty and contributes zero.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{invalid, Result};

/// Arbitrary-precision non-negative integer used for every count.
pub type ExactNat = BigUint;

/// `C(n, r)`, zero when `r < 0` or `r > n`.
pub fn binom(n: u64, r: i64) -> ExactNat {
    if r < 0 || r as u64 > n {
        return BigUint::zero();
    }
    let r = (r as u64).min(n - r as u64);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `Σ_{j=0}^{upto} C(m, j)`, computed along one row.
pub fn binom_prefix_sum(m: u64, upto: i64) -> ExactNat {
    let mut sum = BigUint::zero();
    if upto < 0 {
        return sum;
    }
    let upto = (upto as u64).min(m);
    let mut term = BigUint::one();
    sum += &term;
    for j in 1..=upto {
        term *= m - j + 1;
        term /= j;
        sum += &term;
    }
    sum
}

fn check_sunflower_params(n: u64, k: u64, t: u64) -> Result<()> {
    if t < 1 || t > k || k > n {
        return Err(invalid(format!(
            "need 1 <= t <= k <= n, got n={n} k={k} t={t}"
        )));
    }
    Ok(())
}

/// `|I(A_t)|` via the three-term closed form
/// `C(t+2,t)·Σ_{j<=k-t-1} C(n-t-2,j) + C(t+2,t+1)·Σ_{j<=k-t-2} C(n-t-2,j)
///  + Σ_{j<=k-t-3} C(n-t-2,j)`.
///
/// Only claimed for `n >= 2k - t`: below that, some candidate intersections
/// cannot be realised by two distinct members.
pub fn count_i_at(n: u64, k: u64, t: u64) -> Result<ExactNat> {
    if t < 1 || k < t + 1 || n + t < 2 * k || n < k {
        return Err(invalid(format!(
            "count_I_At needs t >= 1, k >= t+1, n >= max(k, 2k-t); got n={n} k={k} t={t}"
        )));
    }
    count_i_at_formula(n, k, t)
}

/// The closed form evaluated without the `n >= 2k - t` validity check, for
/// probing the boundary below it.
pub fn count_i_at_formula(n: u64, k: u64, t: u64) -> Result<ExactNat> {
    if t < 1 || k < t + 1 || n < t + 2 {
        return Err(invalid(format!(
            "formula needs t >= 1, k >= t+1, n >= t+2; got n={n} k={k} t={t}"
        )));
    }
    let m = n - t - 2;
    let d = (k - t) as i64;
    Ok(binom(t + 2, t as i64) * binom_prefix_sum(m, d - 1)
        + binom(t + 2, t as i64 + 1) * binom_prefix_sum(m, d - 2)
        + binom_prefix_sum(m, d - 3))
}

/// `|I(S_X)| = Σ_{j=0}^{k-t-1} C(n-t, j)` for any `t`-set `X`.
pub fn count_i_sunflower(n: u64, k: u64, t: u64) -> Result<ExactNat> {
    check_sunflower_params(n, k, t)?;
    Ok(binom_prefix_sum(n - t, k as i64 - t as i64 - 1))
}

/// The four forms of the sunflower count, in order:
///
/// 1. `Σ_{j<=k-t-1} C(n-t, j)`
/// 2. `2·Σ_{j<=k-t-1} C(n-t-1, j) - C(n-t-1, k-t-1)`
/// 3. `4·Σ_{j<=k-t-1} C(n-t-2, j) - 2·C(n-t-2, k-t-1) - C(n-t-1, k-t-1)`
/// 4. `2·C(n-t-2, k-t-1) + 4·Σ_{j<=k-t-2} C(n-t-2, j) - C(n-t-1, k-t-1)`
pub fn sunflower_chain_forms(n: u64, k: u64, t: u64) -> Result<[BigInt; 4]> {
    check_sunflower_params(n, k, t)?;
    if n < t + 2 {
        return Err(invalid(format!("chain needs n >= t+2, got n={n} t={t}")));
    }
    let d = k as i64 - t as i64 - 1;
    let big = |x: ExactNat| BigInt::from(x);
    let top = big(binom(n - t - 1, d));
    let form1 = big(binom_prefix_sum(n - t, d));
    let form2 = 2 * big(binom_prefix_sum(n - t - 1, d)) - &top;
    let form3 = 4 * big(binom_prefix_sum(n - t - 2, d)) - 2 * big(binom(n - t - 2, d)) - &top;
    let form4 = 2 * big(binom(n - t - 2, d)) + 4 * big(binom_prefix_sum(n - t - 2, d - 1)) - &top;
    Ok([form1, form2, form3, form4])
}

/// True iff all four forms of the sunflower chain agree and are non-negative.
pub fn sunflower_chain_check(n: u64, k: u64, t: u64) -> Result<bool> {
    let forms = sunflower_chain_forms(n, k, t)?;
    Ok(forms.iter().all(|f| f == &forms[0]) && forms[0].sign() != num_bigint::Sign::Minus)
}

/// The Erdős–Ko–Rado bound `C(n-t, k-t)`.
pub fn ekr_bound(n: u64, k: u64, t: u64) -> Result<ExactNat> {
    check_sunflower_params(n, k, t)?;
    Ok(binom(n - t, (k - t) as i64))
}
