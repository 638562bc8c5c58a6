//! Brute-force oracles shared by the integration tests. They scan every
//! pair of points instead of relying on enumeration order.

#![allow(dead_code)]

use porosity::{ExactRational, Extended};

/// Longest open interval inside `(0, h)` that misses `points`, found by
/// checking every pair of endpoints drawn from `points ∩ (0, h)`, `h`, and
/// `0` when `include_zero` is set.
pub fn brute_lambda(points: &[ExactRational], h: &ExactRational, include_zero: bool) -> ExactRational {
    let mut ends: Vec<ExactRational> = points.iter().filter(|p| *p < h).cloned().collect();
    ends.push(h.clone());
    if include_zero {
        ends.push(ExactRational::zero());
    }
    let mut best = ExactRational::zero();
    for a in &ends {
        for b in &ends {
            if a >= b {
                continue;
            }
            if points.iter().any(|p| p > a && p < b) {
                continue;
            }
            let len = b.checked_sub(a).expect("a < b");
            if len > best {
                best = len;
            }
        }
    }
    best
}

/// Every open interval `(a, b)` between points of `points` that contains no
/// point and has `a <= epsilon * b`.
pub fn brute_admissible(points: &[ExactRational], epsilon: &ExactRational) -> Vec<(ExactRational, ExactRational)> {
    let mut out = Vec::new();
    for a in points {
        for b in points {
            if a < b && points.iter().all(|p| !(p > a && p < b)) && *a <= epsilon * b {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// Exhaustive search over chains: each deep-half `τ_n` gets an admissible
/// interval with left end `a_n >= τ_n`, with `a_n` nonincreasing in `n`. The
/// result minimizes the largest `a_n / τ_n`.
pub fn brute_c_tau(points: &[ExactRational], tau: &[ExactRational], epsilon: &ExactRational) -> Extended {
    let mut lefts: Vec<ExactRational> = brute_admissible(points, epsilon).into_iter().map(|g| g.0).collect();
    // Ascending order lets the bound cut each branch early.
    lefts.sort();
    lefts.dedup();
    let deep = &tau[tau.len() / 2..];
    let mut best: Option<ExactRational> = None;
    search(deep, &lefts, None, ExactRational::zero(), &mut best);
    best.map_or(Extended::Infinite, Extended::Finite)
}

fn search(
    tau: &[ExactRational],
    lefts: &[ExactRational],
    prev: Option<&ExactRational>,
    worst: ExactRational,
    best: &mut Option<ExactRational>,
) {
    if best.as_ref().is_some_and(|b| worst >= *b) {
        return;
    }
    let Some((t, rest)) = tau.split_first() else {
        *best = Some(worst);
        return;
    };
    for a in lefts {
        if prev.is_some_and(|p| a > p) {
            break;
        }
        if a >= t {
            let r = a / t;
            if best.as_ref().is_some_and(|b| r >= *b) {
                break;
            }
            let w = if r > worst { r } else { worst.clone() };
            search(rest, lefts, Some(a), w, best);
        }
    }
}

/// `d(a, c) <= d(a, b) + d(b, c)` for every triple of a square matrix.
pub fn triangle_ok(d: &[Vec<ExactRational>]) -> bool {
    let n = d.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if d[a][c] > &d[a][b] + &d[b][c] {
                    return false;
                }
            }
        }
    }
    true
}
