//! Finite Leonard pairs, orthonormal polynomial evaluation, grid weights,
//! duality and spectral degeneracy checks.

mod families;
mod pair;
mod recurrence;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use families::{
    anti_krawtchouk_diag, anti_krawtchouk_grid, anti_krawtchouk_offdiag, make_anti_krawtchouk, make_hahn,
    make_krawtchouk,
};
pub use pair::{duality_residual, Family, LeonardPair};
pub use recurrence::{eval_orthonormal, grid_weights, GridWeights, Recurrence};

use crate::error::{invalid, Result};

/// Whether the consecutive sums `λ_n + λ_{n+1}` determine the cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Identifiability {
    /// All consecutive sums are distinct.
    Identifiable,
    /// `λ_i + λ_{i+1} = λ_j + λ_{j+1}` for the first colliding pair `i < j`.
    Degenerate { first: usize, second: usize, sum: f64 },
}

impl Identifiability {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Self::Degenerate { .. })
    }
}

/// Significant digits kept when comparing consecutive sums.
const SUM_DIGITS: usize = 12;

/// Tests injectivity of `n ↦ λ_n + λ_{n+1}`.
///
/// Sums are rounded to twelve significant digits before an exact
/// comparison so that float noise neither creates nor hides a collision;
/// sums below `1e-12` of the largest one count as zero.
pub fn perline_degeneracy_check(spectrum: &[f64]) -> Result<Identifiability> {
    if spectrum.len() < 3 {
        return Err(invalid("spectrum", "need at least three values"));
    }
    let sums: Vec<f64> = spectrum.windows(2).map(|w| w[0] + w[1]).collect();
    let scale = sums.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut seen: BTreeMap<u64, usize> = BTreeMap::new();
    for (i, &s) in sums.iter().enumerate() {
        let key = round_significant(if s.abs() <= 1e-12 * scale { 0.0 } else { s });
        if let Some(&first) = seen.get(&key.to_bits()) {
            return Ok(Identifiability::Degenerate {
                first,
                second: i,
                sum: s,
            });
        }
        seen.insert(key.to_bits(), i);
    }
    Ok(Identifiability::Identifiable)
}

fn round_significant(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    format!("{v:.prec$e}", prec = SUM_DIGITS - 1)
        .parse()
        .expect("formatted float parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_spectrum_identifiable() {
        let lam: Vec<f64> = (0..10).map(f64::from).collect();
        assert_eq!(perline_degeneracy_check(&lam).unwrap(), Identifiability::Identifiable);
    }

    #[test]
    fn anti_krawtchouk_sums_collide() {
        let r = perline_degeneracy_check(&anti_krawtchouk_grid(8)).unwrap();
        assert!(matches!(
            r,
            Identifiability::Degenerate {
                first: 0,
                second: 2,
                ..
            }
        ));
    }

    #[test]
    fn bannai_ito_sequence_degenerate() {
        // 0, −d−2, 1, −d−3, 2, … with d = 1: sums −3, −2, −3, −2, …
        let d = 1.0;
        let seq: Vec<f64> = (0..8)
            .map(|k| {
                let m = (k / 2) as f64;
                if k % 2 == 0 {
                    m
                } else {
                    -d - 2.0 - m
                }
            })
            .collect();
        let r = perline_degeneracy_check(&seq).unwrap();
        assert!(matches!(r, Identifiability::Degenerate { sum, .. } if sum == -3.0));
    }

    #[test]
    fn rounding_absorbs_float_noise() {
        let r = perline_degeneracy_check(&[0.1, 0.2, 0.1 + 1e-17, 0.2]).unwrap();
        assert!(r.is_degenerate());
        let r = perline_degeneracy_check(&[0.0, 1.0, 2.0 + 1e-9]).unwrap();
        assert!(!r.is_degenerate());
    }

    #[test]
    fn short_spectrum_rejected() {
        assert!(perline_degeneracy_check(&[1.0, 2.0]).is_err());
    }
}
