use super::{Family, LeonardPair};
use crate::error::{invalid, Result};

fn check_degree(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid("N", format!("N = {n} must be at least 2")));
    }
    Ok(())
}

/// Krawtchouk pair on `{0..N}` with parameter `p`; the family is self-dual.
///
/// Off-diagonals are negative so that every `φ_n(λ_0)` is positive, which
/// makes the duality between the two bases hold without sign corrections.
pub fn make_krawtchouk(n: usize, p: f64) -> Result<LeonardPair> {
    check_degree(n)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid("p", format!("p = {p} must lie in (0, 1)")));
    }
    let nf = n as f64;
    let grid: Vec<f64> = (0..=n).map(|k| k as f64).collect();
    let b: Vec<f64> = grid.iter().map(|&k| p * (nf - k) + k * (1.0 - p)).collect();
    let a: Vec<f64> = (1..=n)
        .map(|k| {
            let k = k as f64;
            -(k * p * (1.0 - p) * (nf - k + 1.0)).sqrt()
        })
        .collect();
    LeonardPair::new(Family::Krawtchouk { p }, grid.clone(), a.clone(), b.clone(), grid, a, b)
}

/// Hahn pair: `λ_s = s` and dual grid `μ_n = n(n + α + β + 1)`.
///
/// `L` in the d-basis is the Hahn recurrence and `Z` in the e-basis the
/// dual Hahn recurrence, both with negative off-diagonals.
pub fn make_hahn(n: usize, alpha: f64, beta: f64) -> Result<LeonardPair> {
    check_degree(n)?;
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v.is_finite() && v > -1.0) {
            return Err(invalid(name, format!("{name} = {v} must exceed -1")));
        }
    }
    let nf = n as f64;
    let s = alpha + beta;
    let up = |k: f64| {
        if k == 0.0 {
            // (s + 1) cancels between numerator and denominator.
            (alpha + 1.0) * nf / (s + 2.0)
        } else {
            (k + s + 1.0) * (k + alpha + 1.0) * (nf - k) / ((2.0 * k + s + 1.0) * (2.0 * k + s + 2.0))
        }
    };
    let down = |k: f64| {
        if k == 0.0 {
            0.0
        } else {
            k * (k + s + nf + 1.0) * (k + beta) / ((2.0 * k + s) * (2.0 * k + s + 1.0))
        }
    };
    let b: Vec<f64> = (0..=n).map(|k| up(k as f64) + down(k as f64)).collect();
    let a: Vec<f64> = (1..=n).map(|k| -(up(k as f64 - 1.0) * down(k as f64)).sqrt()).collect();
    let eta: Vec<f64> = (0..=n)
        .map(|k| {
            let k = k as f64;
            (k + alpha + 1.0) * (nf - k) + k * (nf + beta + 1.0 - k)
        })
        .collect();
    let xi: Vec<f64> = (1..=n)
        .map(|k| {
            let k = k as f64;
            -(k * (k + alpha) * (nf - k + 1.0) * (nf + beta + 1.0 - k)).sqrt()
        })
        .collect();
    let lambda: Vec<f64> = (0..=n).map(|k| k as f64).collect();
    let mu: Vec<f64> = (0..=n).map(|k| (k * k) as f64 + k as f64 * (s + 1.0)).collect();
    LeonardPair::new(Family::Hahn { alpha, beta }, lambda, xi, eta, mu, a, b)
}

/// Grid `x_n = (−1)ⁿ(n + 1/2)` of the anti-Krawtchouk polynomials.
pub fn anti_krawtchouk_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|k| sign(k) * (k as f64 + 0.5)).collect()
}

/// Off-diagonal magnitudes `√(((N+1)² − n²)/4)`, `n = 1..N`.
pub fn anti_krawtchouk_offdiag(n: usize) -> Vec<f64> {
    let np1 = (n + 1) as f64;
    (1..=n).map(|k| ((np1 * np1 - (k * k) as f64) / 4.0).sqrt()).collect()
}

/// Diagonal `b_0 = (−1)ᴺ(N+1)/2`, `b_n = 0` otherwise.
pub fn anti_krawtchouk_diag(n: usize) -> Vec<f64> {
    let mut b = vec![0.0; n + 1];
    b[0] = sign(n) * (n + 1) as f64 / 2.0;
    b
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Self-dual anti-Krawtchouk pair for even `N`.
///
/// The off-diagonal signs alternate, `a_n = (−1)ⁿ|a_n|`, which is the
/// gauge making `φ_n(λ_0) > 0`.
pub fn make_anti_krawtchouk(n: usize) -> Result<LeonardPair> {
    check_degree(n)?;
    if !n.is_multiple_of(2) {
        return Err(invalid("N", format!("N = {n} must be even")));
    }
    let grid = anti_krawtchouk_grid(n);
    let a: Vec<f64> = anti_krawtchouk_offdiag(n)
        .into_iter()
        .enumerate()
        .map(|(k, v)| sign(k + 1) * v)
        .collect();
    let b = anti_krawtchouk_diag(n);
    LeonardPair::new(Family::AntiKrawtchouk, grid.clone(), a.clone(), b.clone(), grid, a, b)
}
