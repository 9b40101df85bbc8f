//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Oracles here are coded independently of the library.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use isetlab_core::constructions::classify_level_family;
use isetlab_core::count::{count_i_at, count_i_sunflower, sunflower_chain_check};
use isetlab_core::harness::{audit_family, enumerate_maximal_families, extremal_report};
use isetlab_core::sets::distinct_intersections;
use isetlab_core::threshold::{
    eval_threshold_sides, f_min, fit_regime_exponent, threshold_verdict, DEFAULT_WINDOW,
};
use isetlab_core::{Family, FamilyKind, RegimeKind, ReportOptions, Subset};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

// ---- bitmask oracles -------------------------------------------------------

fn k_masks(n: u32, k: u32) -> Vec<u32> {
    (0u32..1 << n).filter(|m| m.count_ones() == k).collect()
}

fn brute_i(members: &[u32]) -> usize {
    let mut seen = HashSet::new();
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            seen.insert(a & b);
        }
    }
    seen.len()
}

fn brute_a_t(n: u32, k: u32, t: u32) -> Vec<u32> {
    let head = (1u32 << (t + 2)) - 1;
    k_masks(n, k)
        .into_iter()
        .filter(|a| (a & head).count_ones() > t)
        .collect()
}

fn brute_sunflower(n: u32, k: u32, core: u32) -> Vec<u32> {
    k_masks(n, k)
        .into_iter()
        .filter(|a| a & core == core)
        .collect()
}

fn grid() -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for t in 1..=3 {
        for k in t + 1..=t + 4 {
            for n in (2 * k - t).max(k)..=14 {
                out.push((n, k, t));
            }
        }
    }
    out
}

// ---- second threshold evaluator -------------------------------------------

fn choose(n: u64, r: i64) -> BigUint {
    if r < 0 || r as u64 > n {
        return BigUint::ZERO;
    }
    let r = r as u64;
    let r = r.min(n - r);
    let mut acc = BigUint::from(1u32);
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn prefix_desc(m: u64, upto: i64) -> BigUint {
    let mut acc = BigUint::ZERO;
    let mut j = upto;
    while j >= 0 {
        acc += choose(m, j);
        j -= 1;
    }
    acc
}

/// Both sides with the outer sums run top-down and the right side taken as
/// the count of `A_t` minus the sunflower part of the total bound.
fn sides_second(n: u64, k: u64, t: u64) -> (BigUint, BigUint) {
    let mut lhs = BigUint::ZERO;
    for l in (t + 2..=k).rev() {
        let mut traces = BigUint::ZERO;
        for i in (t..=l).rev() {
            traces += choose(l, i as i64);
        }
        let weight = BigUint::from(l * l) * BigUint::from(k - t + 1).pow((l - t - 1) as u32);
        lhs += weight * traces * prefix_desc(n, (k - l) as i64);
    }
    let m = n - t - 2;
    let d = (k - t - 1) as i64;
    let at = choose(t + 2, 2) * prefix_desc(m, d)
        + BigUint::from(t + 2) * prefix_desc(m, d - 1)
        + prefix_desc(m, d - 2);
    let plus = at + choose(n - t - 1, d);
    let minus = BigUint::from(2u32) * choose(m, d) + BigUint::from(4u32) * prefix_desc(m, d - 1);
    (lhs, plus - minus)
}

// ---- criteria ----------------------------------------------------------------

fn formula_vs_oracle() -> Outcome {
    let mut checked = 0;
    let mut points = grid();
    points.push((20, 4, 1));
    for &(n, k, t) in &points {
        let want = brute_i(&brute_a_t(n, k, t));
        let got = count_i_at(n as u64, k as u64, t as u64).map_err(|e| e.to_string())?;
        if got != BigUint::from(want) {
            return Err(format!(
                "(n,k,t)=({n},{k},{t}): formula {got}, brute force {want}"
            ));
        }
        checked += 1;
    }
    for (n, k, t, want) in [(5, 2, 1, 3u32), (6, 3, 1, 15), (20, 4, 1, 517)] {
        if count_i_at(n, k, t).map_err(|e| e.to_string())? != BigUint::from(want) {
            return Err(format!("spot value ({n},{k},{t}) != {want}"));
        }
    }
    // below the validity domain the closed form is refused; record how the
    // brute-force count compares there
    let mut boundary = Vec::new();
    for t in 1..=3u32 {
        for k in t + 2..=t + 4 {
            let n = 2 * k - t - 1;
            if n < k || n > 14 {
                continue;
            }
            boundary.push(format!("({n},{k},{t})={}", brute_i(&brute_a_t(n, k, t))));
        }
    }
    Ok(format!(
        "{checked} grid points exact; n=2k-t-1 brute force: {}",
        boundary.join(" ")
    ))
}

fn sunflower_count() -> Outcome {
    let mut checked = 0;
    for (n, k, t) in grid() {
        let want = count_i_sunflower(n as u64, k as u64, t as u64).map_err(|e| e.to_string())?;
        let first = (1u32 << t) - 1;
        let last = first << (n - t);
        for core in [first, last] {
            let got = brute_i(&brute_sunflower(n, k, core));
            if want != BigUint::from(got) {
                return Err(format!(
                    "({n},{k},{t}) core {core:b}: formula {want}, brute force {got}"
                ));
            }
        }
        checked += 1;
    }
    let mut chains = 0;
    for t in 1..=10u64 {
        for k in t..=40 {
            let bad: Vec<u64> = (k.max(t + 2)..=400)
                .into_par_iter()
                .filter(|&n| !sunflower_chain_check(n, k, t).unwrap_or(false))
                .collect();
            if let Some(n) = bad.first() {
                return Err(format!("chain check fails at (n,k,t)=({n},{k},{t})"));
            }
            chains += 400 - k.max(t + 2) + 1;
        }
    }
    Ok(format!(
        "{checked} grid points x 2 cores exact; {chains} chain checks"
    ))
}

fn strict_domination() -> Outcome {
    let mut checked = 0;
    for (n, k, t) in grid() {
        let (n, k, t) = (n as u64, k as u64, t as u64);
        let s = count_i_sunflower(n, k, t).map_err(|e| e.to_string())?;
        let a = count_i_at(n, k, t).map_err(|e| e.to_string())?;
        if s >= a {
            return Err(format!("({n},{k},{t}): sunflower {s} >= A_t {a}"));
        }
        checked += 1;
    }
    Ok(format!("{checked} grid points strict"))
}

fn threshold_exactness() -> Outcome {
    let f = f_min(4, 1, DEFAULT_WINDOW).map_err(|e| e.to_string())?;
    if f != 272 {
        return Err(format!("f_min(4,1) = {f}, expected 272"));
    }
    let below = threshold_verdict(271, 4, 1).map_err(|e| e.to_string())?;
    let at = threshold_verdict(272, 4, 1).map_err(|e| e.to_string())?;
    if below.holds || !at.holds {
        return Err(format!("verdicts at 271/272: {}/{}", below.holds, at.holds));
    }
    for n in [4u64, 100, 271, 272, 1000] {
        let (lhs, rhs) = eval_threshold_sides(n, 4, 1).map_err(|e| e.to_string())?;
        if lhs != BigUint::from(252 * n + 4092) || rhs != BigUint::from(n * n - 4 * n + 6) {
            return Err(format!("hand expansion mismatch at n={n}"));
        }
    }
    let mut checked = 0;
    for t in [1u64, 2, 3, 5] {
        for k in t + 2..=t + 12 {
            for n in [k, 2 * k, 10 * k, 100 * k] {
                if n < t + 2 {
                    continue;
                }
                let lib = eval_threshold_sides(n, k, t).map_err(|e| e.to_string())?;
                if lib != sides_second(n, k, t) {
                    return Err(format!("evaluators disagree at (n,k,t)=({n},{k},{t})"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!(
        "f_min(4,1)=272, 271 fails, 272 holds; {checked} dual-evaluator points bit-exact"
    ))
}

fn improvement_claim() -> Outcome {
    let results: Vec<(u64, Result<u64, String>)> = (4..=64u64)
        .into_par_iter()
        .map(|k| (k, f_min(k, 1, DEFAULT_WINDOW).map_err(|e| e.to_string())))
        .collect();
    let mut worst = 0.0f64;
    for (k, r) in results {
        let f = r?;
        if f >= 50 * k * k {
            return Err(format!("f_min({k},1) = {f} >= 50k^2 = {}", 50 * k * k));
        }
        worst = worst.max(f as f64 / (k * k) as f64);
    }
    Ok(format!("k in [4,64]: max f_min/k^2 = {worst:.2} < 50"))
}

fn regime_trend() -> Outcome {
    let mut lines = Vec::new();
    let mut failed = false;
    let runs = [
        (
            RegimeKind::ConstantT(1),
            vec![16u64, 32, 64, 128],
            (1.3, 2.1),
        ),
        (RegimeKind::LinearT(0.25), vec![16u64, 24, 32], (2.3, 3.7)),
    ];
    for (regime, ks, (lo, hi)) in runs {
        let fit = fit_regime_exponent(regime, &ks, DEFAULT_WINDOW);
        if let Some(p) = fit.points.iter().find(|p| p.error.is_some()) {
            return Err(format!("k={}: {}", p.k, p.error.as_deref().unwrap_or("")));
        }
        for e in &fit.local_exponents {
            let ok = (lo..=hi).contains(&e.value);
            failed |= !ok;
            lines.push(format!(
                "{}->{}: {:.4}{}",
                e.k_from,
                e.k_to,
                e.value,
                if ok { "" } else { " OUT OF BAND" }
            ));
        }
        let f: Vec<String> = fit
            .points
            .iter()
            .map(|p| format!("f({},{})={}", p.k, p.t.unwrap_or(0), p.f_min.unwrap_or(0)))
            .collect();
        lines.push(format!("[{lo},{hi}] {}", f.join(" ")));
    }
    let detail = lines.join("; ");
    if failed {
        Err(detail)
    } else {
        Ok(detail)
    }
}

fn lemma_audits() -> Outcome {
    let params = [
        (4, 2, 1),
        (5, 2, 1),
        (6, 2, 1),
        (6, 3, 1),
        (7, 3, 1),
        (6, 3, 2),
        (7, 3, 2),
    ];
    let mut summary = Vec::new();
    for (n, k, t) in params {
        let fams = enumerate_maximal_families(n, k, t, u128::MAX).map_err(|e| e.to_string())?;
        let audits = fams
            .par_iter()
            .enumerate()
            .map(|(i, f)| audit_family(i, f, t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("({n},{k},{t}): {e}"))?;
        let mut common_core = 0;
        for a in &audits {
            let checks = [
                ("generator antichain", a.generators_antichain),
                ("up-closure", a.generators_close_up),
                ("no k+1 sunflower", a.generators_sunflower_free),
                ("layer cover", a.layer_cover_ok),
                ("level bound", a.level_bound_ok != Some(false)),
                ("layer bound", a.layer_bound_ok != Some(false)),
                ("low layers", a.low_layers_ok != Some(false)),
                ("total bound", a.total_ok != Some(false)),
            ];
            if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
                return Err(format!(
                    "({n},{k},{t}) family #{}: {name} fails",
                    a.family_id
                ));
            }
            common_core += usize::from(a.common_core_sunflower);
        }
        summary.push(format!(
            "({n},{k},{t}):{} [{common_core} common-core]",
            fams.len()
        ));
    }
    Ok(summary.join(" "))
}

fn desk_extremality() -> Outcome {
    for (n, k, t) in [(5usize, 2usize, 1usize), (4, 2, 1)] {
        let r = extremal_report(n, k, t, ReportOptions::default()).map_err(|e| e.to_string())?;
        if r.max_i != 3 || r.count_i_at != Some(BigUint::from(3u32)) || r.at_is_max != Some(true) {
            return Err(format!(
                "({n},{k},{t}): max_i={} count={:?} at_is_max={:?}",
                r.max_i, r.count_i_at, r.at_is_max
            ));
        }
    }
    let fams = enumerate_maximal_families(5, 2, 1, 5000).map_err(|e| e.to_string())?;
    let (mut triangles, mut stars) = (0, 0);
    for f in &fams {
        match classify_level_family(f, 1).map_err(|e| e.to_string())? {
            FamilyKind::Triangle { .. } => triangles += 1,
            FamilyKind::Sunflower { .. } => stars += 1,
            FamilyKind::Other => {}
        }
    }
    if (fams.len(), triangles, stars) != (15, 10, 5) {
        return Err(format!(
            "{} families: {triangles} triangles, {stars} stars",
            fams.len()
        ));
    }
    Ok("max_I = |I(A_1)| = 3 at (5,2,1) and (4,2,1); (5,2,1): 15 = 10 triangles + 5 stars".into())
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x15e7);
    for trial in 0..1000 {
        let n = rng.gen_range(2..=12);
        let k = rng.gen_range(1..=n);
        let pick = |rng: &mut ChaCha8Rng| {
            let mut elems: Vec<usize> = (1..=n).collect();
            for i in 0..k {
                let j = rng.gen_range(i..n);
                elems.swap(i, j);
            }
            Subset::from_elements(n, elems[..k].iter().copied()).expect("in range")
        };
        let size = rng.gen_range(0..=12);
        let members: Vec<Subset> = (0..size).map(|_| pick(&mut rng)).collect();
        let f = Family::new(n, members).map_err(|e| e.to_string())?;
        let mut g = f.clone();
        g.insert(pick(&mut rng)).map_err(|e| e.to_string())?;
        if !distinct_intersections(&f).is_subfamily_of(&distinct_intersections(&g)) {
            return Err(format!(
                "trial {trial}: I(F) not inside I(F + H) for F = {:?}",
                f.to_lists()
            ));
        }
    }
    Ok("1000 random pairs".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("formula vs brute-force |I(A_t)|", formula_vs_oracle),
        ("sunflower count and chain identities", sunflower_count),
        ("sunflower strictly below A_t", strict_domination),
        ("threshold exactness", threshold_exactness),
        ("f_min(k,1) < 50k^2", improvement_claim),
        ("regime growth exponents", regime_trend),
        ("generator and bound audits", lemma_audits),
        ("desk-scale extremality", desk_extremality),
        ("intersection monotonicity", monotonicity),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.1}s) {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL {name} ({secs:.1}s) {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
