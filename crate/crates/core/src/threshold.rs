//! The threshold inequality comparing the layer tail against the surplus
//! of `|I(A_t)|` over the sunflower count, the search for the least `n`
//! at which it holds, and empirical growth exponents of that threshold.
//!
//! For fixed `(k, t)` both sides are polynomials in `n` once `n >= t+2`
//! (every binomial top is then non-negative), so the scan walks
//! `D(n) = rhs(n) - lhs(n)` with an exact forward-difference table.

use num_bigint::{BigInt, Sign};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::count::{binom, binom_prefix_sum, ExactNat};
use crate::decomposition::eval_layer_tail;
use crate::error::{invalid, Error, Result};

/// Default confirmation window for [`f_min`].
pub const DEFAULT_WINDOW: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdVerdict {
    pub n: u64,
    pub k: u64,
    pub t: u64,
    #[serde(with = "crate::report::decimal")]
    pub lhs: ExactNat,
    #[serde(with = "crate::report::decimal")]
    pub rhs: ExactNat,
    pub holds: bool,
}

fn check_sides_params(n: u64, k: u64, t: u64) -> Result<()> {
    if t < 1 || k < t + 2 || n < t + 2 {
        return Err(invalid(format!(
            "threshold needs t >= 1, k >= t+2, n >= t+2; got n={n} k={k} t={t}"
        )));
    }
    Ok(())
}

/// `((t+2)(t+1) - 4) / 2` and `((t+3)(t+2) - 8) / 2`; both numerators are even.
pub fn rhs_coefficients(t: u64) -> (u64, u64) {
    ((t + 2) * (t + 1) / 2 - 2, (t + 3) * (t + 2) / 2 - 4)
}

/// Exact left and right sides of the threshold inequality:
///
/// `lhs = Σ_{l=t+2}^{k} l²(k-t+1)^(l-t-1) Σ_{i=t}^{l} C(l,i) Σ_{j=0}^{k-l} C(n,j)`
///
/// `rhs = C(n-t-1,k-t-1) + c1·C(n-t-2,k-t-1) + c2·Σ_{j<=k-t-2} C(n-t-2,j)
///        + Σ_{j<=k-t-3} C(n-t-2,j)` with `(c1, c2)` from [`rhs_coefficients`].
pub fn eval_threshold_sides(n: u64, k: u64, t: u64) -> Result<(ExactNat, ExactNat)> {
    check_sides_params(n, k, t)?;
    let lhs = eval_layer_tail(n, k, t, t + 2)?;
    let (c1, c2) = rhs_coefficients(t);
    let d = (k - t - 1) as i64;
    let m = n - t - 2;
    let rhs = binom(n - t - 1, d)
        + c1 * binom(m, d)
        + c2 * binom_prefix_sum(m, d - 1)
        + binom_prefix_sum(m, d - 2);
    Ok((lhs, rhs))
}

pub fn threshold_verdict(n: u64, k: u64, t: u64) -> Result<ThresholdVerdict> {
    let (lhs, rhs) = eval_threshold_sides(n, k, t)?;
    Ok(ThresholdVerdict {
        n,
        k,
        t,
        holds: lhs <= rhs,
        lhs,
        rhs,
    })
}

/// Steps `D(n) = rhs(n) - lhs(n)` through consecutive `n` with one big-integer
/// addition per polynomial degree.
#[derive(Debug, Clone)]
pub struct ThresholdScanner {
    n: u64,
    // diffs[i] = Δ^i D(n)
    diffs: Vec<BigInt>,
}

impl ThresholdScanner {
    pub fn new(k: u64, t: u64, start: u64) -> Result<Self> {
        check_sides_params(start, k, t)?;
        let degree = (k - t - 1) as usize;
        let mut diffs: Vec<BigInt> = (0..=degree as u64)
            .map(|i| {
                let (lhs, rhs) = eval_threshold_sides(start + i, k, t)?;
                Ok(BigInt::from(rhs) - BigInt::from(lhs))
            })
            .collect::<Result<_>>()?;
        // in-place forward differences: diffs[i] becomes Δ^i D(start)
        for order in 1..=degree {
            for j in (order..=degree).rev() {
                let prev = diffs[j - 1].clone();
                diffs[j] -= prev;
            }
        }
        Ok(ThresholdScanner { n: start, diffs })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `rhs(n) - lhs(n)` at the current `n`.
    pub fn margin(&self) -> &BigInt {
        &self.diffs[0]
    }

    pub fn holds(&self) -> bool {
        self.diffs[0].sign() != Sign::Minus
    }

    pub fn advance(&mut self) {
        for i in 0..self.diffs.len() - 1 {
            let (lo, hi) = self.diffs.split_at_mut(i + 1);
            lo[i] += &hi[0];
        }
        self.n += 1;
    }
}

/// Least `n >= k` such that the inequality holds at `n` and at every
/// `n' ∈ (n, n + window]`. A violation inside the window restarts the
/// search just past it.
pub fn f_min(k: u64, t: u64, window: u64) -> Result<u64> {
    let mut scan = ThresholdScanner::new(k, t, k)?;
    let mut candidate: Option<u64> = None;
    loop {
        if scan.holds() {
            let c = *candidate.get_or_insert(scan.n());
            if scan.n() - c == window {
                return Ok(c);
            }
        } else {
            candidate = None;
        }
        scan.advance();
    }
}

/// [`f_min`] evaluated with a full [`eval_threshold_sides`] call per `n`.
pub fn f_min_direct(k: u64, t: u64, window: u64) -> Result<u64> {
    check_sides_params(k, k, t)?;
    let mut n = k;
    'outer: loop {
        let (lhs, rhs) = eval_threshold_sides(n, k, t)?;
        if lhs <= rhs {
            for m in n + 1..=n + window {
                let (lhs, rhs) = eval_threshold_sides(m, k, t)?;
                if lhs > rhs {
                    n = m + 1;
                    continue 'outer;
                }
            }
            return Ok(n);
        }
        n += 1;
    }
}

/// `ε = (10 + t) / (2(k - t - 2))`, defined for `k >= t+3`.
pub fn epsilon_of(k: u64, t: u64) -> Result<Ratio<u64>> {
    if k < t + 3 {
        return Err(invalid(format!(
            "ε needs k >= t+3 (denominator 2(k-t-2) > 0); got k={k} t={t}"
        )));
    }
    Ok(Ratio::new(10 + t, 2 * (k - t - 2)))
}

/// How `t` scales with `k` in a growth experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum RegimeKind {
    /// `t` fixed.
    ConstantT(u64),
    /// `t ≈ k^ε'`.
    PowerT(f64),
    /// `t ≈ c·k`.
    LinearT(f64),
}

impl RegimeKind {
    /// The `t` used at `k`. Power and linear regimes round to the nearest
    /// integer and clamp into `[1, k-3]`.
    pub fn t_for(&self, k: u64) -> Result<u64> {
        if k < 4 {
            return Err(invalid(format!("regime points need k >= 4, got {k}")));
        }
        let clamp = |x: f64| (x.round() as u64).clamp(1, k - 3);
        match *self {
            RegimeKind::ConstantT(t) => {
                if t < 1 || k < t + 3 {
                    Err(invalid(format!(
                        "constant t = {t} needs k >= t+3, got k={k}"
                    )))
                } else {
                    Ok(t)
                }
            }
            RegimeKind::PowerT(e) => Ok(clamp((k as f64).powf(e))),
            RegimeKind::LinearT(c) => Ok(clamp(c * k as f64)),
        }
    }

    /// Growth exponents predicted for `f(k, t)` at this `k`. At `ε' = 1/4`
    /// both power-regime candidates are reported.
    pub fn expected_exponents(&self, k: u64, t: u64) -> Vec<f64> {
        match *self {
            RegimeKind::ConstantT(_) => epsilon_of(k, t)
                .map(|e| vec![1.5 + *e.numer() as f64 / *e.denom() as f64])
                .unwrap_or_default(),
            RegimeKind::PowerT(e) if e < 0.25 => vec![1.5 + e],
            RegimeKind::PowerT(e) if e > 0.25 => vec![1.0 + 2.0 * e],
            RegimeKind::PowerT(e) => vec![1.5 + e, 1.0 + 2.0 * e],
            RegimeKind::LinearT(_) => vec![3.0],
        }
    }

    /// Parses `const`, `const:T`, `power:E` or `linear:C`; `default_t`
    /// fills in a bare `const`.
    pub fn parse(text: &str, default_t: u64) -> Result<Self> {
        let (kind, arg) = match text.split_once(':') {
            Some((kind, arg)) => (kind, Some(arg)),
            None => (text, None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            let a = a.ok_or_else(|| invalid(format!("regime {kind:?} needs a value")))?;
            let v = match a.split_once('/') {
                Some((p, q)) => {
                    let p: f64 = p
                        .trim()
                        .parse()
                        .map_err(|_| invalid(format!("bad number {a:?}")))?;
                    let q: f64 = q
                        .trim()
                        .parse()
                        .map_err(|_| invalid(format!("bad number {a:?}")))?;
                    p / q
                }
                None => a
                    .trim()
                    .parse()
                    .map_err(|_| invalid(format!("bad number {a:?}")))?,
            };
            if !v.is_finite() || v <= 0.0 {
                return Err(invalid(format!("regime value must be positive, got {a:?}")));
            }
            Ok(v)
        };
        match kind {
            "const" => {
                let t = match arg {
                    Some(a) => a.parse().map_err(|_| invalid(format!("bad t {a:?}")))?,
                    None => default_t,
                };
                Ok(RegimeKind::ConstantT(t))
            }
            "power" => Ok(RegimeKind::PowerT(number(arg)?)),
            "linear" => Ok(RegimeKind::LinearT(number(arg)?)),
            other => Err(invalid(format!("unknown regime {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimePoint {
    pub k: u64,
    pub t: Option<u64>,
    pub f_min: Option<u64>,
    pub expected: Vec<f64>,
    pub error: Option<String>,
}

/// `Δ log f_min / Δ log k` between two consecutive successful points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalExponent {
    pub k_from: u64,
    pub k_to: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeFit {
    pub regime: RegimeKind,
    pub window: u64,
    pub points: Vec<RegimePoint>,
    pub local_exponents: Vec<LocalExponent>,
}

pub fn local_exponent(k0: u64, f0: u64, k1: u64, f1: u64) -> f64 {
    ((f1 as f64).ln() - (f0 as f64).ln()) / ((k1 as f64).ln() - (k0 as f64).ln())
}

/// Computes `f_min(k, t(k))` for each `k` (in parallel) and the local growth
/// exponents between neighbours. Nothing is asserted here; failures are
/// recorded per point.
pub fn fit_regime_exponent(regime: RegimeKind, k_values: &[u64], window: u64) -> RegimeFit {
    let points: Vec<RegimePoint> = k_values
        .par_iter()
        .map(|&k| {
            let attempt = regime
                .t_for(k)
                .and_then(|t| f_min(k, t, window).map(|f| (t, f)));
            match attempt {
                Ok((t, f)) => RegimePoint {
                    k,
                    t: Some(t),
                    f_min: Some(f),
                    expected: regime.expected_exponents(k, t),
                    error: None,
                },
                Err(e) => RegimePoint {
                    k,
                    t: regime.t_for(k).ok(),
                    f_min: None,
                    expected: Vec::new(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let good: Vec<(u64, u64)> = points
        .iter()
        .filter_map(|p| Some((p.k, p.f_min?)))
        .collect();
    let local_exponents = good
        .windows(2)
        .map(|w| LocalExponent {
            k_from: w[0].0,
            k_to: w[1].0,
            value: local_exponent(w[0].0, w[0].1, w[1].0, w[1].1),
        })
        .collect();
    RegimeFit {
        regime,
        window,
        points,
        local_exponents,
    }
}

/// Parses `A..B` (inclusive) into a list of `k` values.
pub fn parse_k_range(text: &str) -> Result<Vec<u64>> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| invalid(format!("expected A..B, got {text:?}")))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let parse = |s: &str| -> Result<u64> {
        s.trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("bad bound {s:?} in {text:?}")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if a > b {
        return Err(invalid(format!("empty range {text:?}")));
    }
    Ok((a..=b).collect())
}
