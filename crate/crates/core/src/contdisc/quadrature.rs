use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::ClassicalFamily;
use crate::error::{invalid, Error, Result};
use crate::leonard::Recurrence;
use crate::linalg::SymmetricMatrix;

/// Nodes per Gauss–Legendre panel.
pub const PANEL_NODES: usize = 32;

/// Target for the summed coarse-versus-refined differences, entrywise.
pub const CAUCHY_TOL: f64 = 1e-11;

/// Bound on the integrand tail beyond a truncated infinite end.
pub const TAIL_TOL: f64 = 1e-16;

const MAX_PANELS: usize = 20_000;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes ascending, by
/// Newton iteration on `P_n` from Chebyshev-like starting points.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// `(P_n(x), P_n′(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

/// `∫ ρ p_i p_j` over a range, with the adaptive bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrixQ {
    pub matrix: SymmetricMatrix,
    /// Sum over panels of the largest coarse-versus-refined difference.
    pub error_estimate: f64,
    pub panels: usize,
    /// Lower integration limit actually used (finite).
    pub lower: f64,
    pub upper: f64,
}

/// Packed lower triangle of `Σ_k w_k ρ(x_k) p(x_k) p(x_k)ᵀ` on `[lo, hi]`.
fn panel(family: &ClassicalFamily, rec: &Recurrence, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let size = rec.size();
    let mut acc = vec![0.0; size * (size + 1) / 2];
    let (nodes, weights) = panel_rule();
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    for (t, w) in nodes.iter().zip(weights) {
        let x = mid + half * t;
        let rw = w * half * family.weight(x);
        if rw == 0.0 {
            continue;
        }
        let p = rec.eval(x, size - 1)?;
        let mut k = 0;
        for i in 0..size {
            for j in 0..=i {
                acc[k] += rw * p[i] * p[j];
                k += 1;
            }
        }
    }
    Ok(acc)
}

struct Panel {
    lo: f64,
    hi: f64,
    error: f64,
    refined: Vec<f64>,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties go to the leftmost panel.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn evaluate(family: &ClassicalFamily, rec: &Recurrence, lo: f64, hi: f64) -> Result<Panel> {
    let mid = 0.5 * (lo + hi);
    let coarse = panel(family, rec, lo, hi)?;
    let left = panel(family, rec, lo, mid)?;
    let right = panel(family, rec, mid, hi)?;
    let refined: Vec<f64> = left.iter().zip(&right).map(|(a, b)| a + b).collect();
    let error = coarse
        .iter()
        .zip(&refined)
        .map(|(c, r)| (c - r).abs())
        .fold(0.0, f64::max);
    Ok(Panel { lo, hi, error, refined })
}

/// Gram matrix of the first `size` orthonormal polynomials on `[lo, hi]`.
///
/// The panel with the largest coarse-versus-refined difference is bisected
/// until the summed differences fall below [`CAUCHY_TOL`]; endpoint
/// singularities of the weight end up with a geometrically graded mesh.
pub fn gram_matrix(family: &ClassicalFamily, size: usize, lo: f64, hi: f64) -> Result<KernelMatrixQ> {
    if size == 0 {
        return Err(invalid("N", "need at least one polynomial"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid("interval", format!("[{lo}, {hi}] must be finite and nonempty")));
    }
    let rec = family.recurrence(size)?;
    let initial = 8;
    let mut heap = BinaryHeap::new();
    for k in 0..initial {
        let a = lo + (hi - lo) * k as f64 / initial as f64;
        let b = if k + 1 == initial {
            hi
        } else {
            lo + (hi - lo) * (k + 1) as f64 / initial as f64
        };
        heap.push(evaluate(family, &rec, a, b)?);
    }
    let exact_total = |heap: &BinaryHeap<Panel>| heap.iter().map(|p| p.error).sum::<f64>();
    let mut total = exact_total(&heap);
    loop {
        if total < CAUCHY_TOL {
            // The running total drifts; confirm before stopping.
            total = exact_total(&heap);
            if total < CAUCHY_TOL {
                break;
            }
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::QuadratureNotConverged {
                achieved: total,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            return Err(Error::QuadratureNotConverged {
                achieved: total,
                panels: heap.len() + 1,
            });
        }
        let (left, right) = (
            evaluate(family, &rec, worst.lo, mid)?,
            evaluate(family, &rec, mid, worst.hi)?,
        );
        total += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut packed = vec![0.0; size * (size + 1) / 2];
    for p in &panels {
        for (acc, v) in packed.iter_mut().zip(&p.refined) {
            *acc += v;
        }
    }
    let matrix = SymmetricMatrix::from_lower_fn(size, |i, j| packed[i * (i + 1) / 2 + j])?;
    Ok(KernelMatrixQ {
        matrix,
        error_estimate: total,
        panels: panels.len(),
        lower: lo,
        upper: hi,
    })
}

/// Finite stand-in for an infinite end: steps outward from beyond the
/// largest zero until the tail bound of every `ρ p_i²` is below
/// [`TAIL_TOL`].
fn truncate(family: &ClassicalFamily, size: usize, direction: f64) -> Result<f64> {
    let rec = family.recurrence(size)?;
    let n = size as f64;
    let (start, hermite) = match family.kind() {
        super::FamilyKind::Hermite => (direction * ((2.0 * n + 1.0).sqrt() + 1.0), true),
        _ => (4.0 * n + 10.0, false),
    };
    let mut s = start;
    for _ in 0..10_000 {
        let p = rec.eval(s, size - 1)?;
        let peak = p.iter().map(|v| v * v).fold(0.0, f64::max) * family.weight(s);
        // Gaussian tails decay like ρ/(2|s|); exponential ones like ρ.
        let bound = if hermite { peak / (2.0 * s.abs()) } else { peak };
        if bound < TAIL_TOL {
            return Ok(s);
        }
        s += direction * 0.5;
    }
    Err(Error::QuadratureNotConverged {
        achieved: f64::NAN,
        panels: 0,
    })
}

/// `K_{ij} = ∫_s^W ρ p_i p_j` with `s` the left end of the support.
pub fn kernel_matrix_quadrature(family: &ClassicalFamily, n: usize, w: f64) -> Result<KernelMatrixQ> {
    let (lo, hi) = family.support();
    let inside = w > lo && (w < hi || (hi.is_finite() && w == hi));
    if !w.is_finite() || !inside {
        return Err(invalid("W", format!("W = {w} must lie in the support ({lo}, {hi}]")));
    }
    let left = if lo.is_finite() {
        lo
    } else {
        truncate(family, n + 1, -1.0)?.min(w - 1.0)
    };
    gram_matrix(family, n + 1, left, w)
}

/// `max |G − I|` for the Gram matrix over the whole support.
pub fn orthogonality_residual(family: &ClassicalFamily, n: usize) -> Result<f64> {
    let (lo, hi) = family.support();
    let left = if lo.is_finite() {
        lo
    } else {
        truncate(family, n + 1, -1.0)?
    };
    let right = if hi.is_finite() {
        hi
    } else {
        truncate(family, n + 1, 1.0)?
    };
    let g = gram_matrix(family, n + 1, left, right)?;
    let mut worst = 0.0f64;
    for i in 0..=n {
        for j in 0..=i {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g.matrix.get(i, j) - want).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(PANEL_NODES);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for k in [2, 10, 40, 62] {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            assert!((got - 2.0 / (k as f64 + 1.0)).abs() < 1e-14, "k={k}");
        }
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn small_rule_nodes() {
        let (x, w) = gauss_legendre(2);
        let r = 1.0 / 3f64.sqrt();
        assert!((x[0] + r).abs() < 1e-15 && (x[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
    }
}
