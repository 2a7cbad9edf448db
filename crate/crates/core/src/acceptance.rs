//! The eight acceptance criteria at their pinned tolerances.
//!
//! Each criterion runs its configurations and records every measured
//! quantity; a criterion passes only when all of its checks pass.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::antikraw::{analyze_antikraw, condition_residuals, make_antispin, solve_penta_coeffs, Ansatz};
use crate::contdisc::{
    analyze_contdisc, bessel_boundary, make_family, prolate_boundary, verify_bessel_identity, verify_prolate_identity,
    verify_tilde_d, FamilyKind,
};
use crate::error::Result;
use crate::heun::{heun_ode_params, HeunCoefficients};
use crate::leonard::{
    duality_residual, eval_orthonormal, make_anti_krawtchouk, make_hahn, make_krawtchouk, LeonardPair,
};
use crate::limiting::{analyze_discrete, kernel_matrix_cd, kernel_matrix_dual, kernel_matrix_sum};
use crate::linalg::Matrix;

/// Seed of the random probes, fixed so that runs are reproducible.
pub const PROBE_SEED: u64 = 0x5eed_4e75;

pub const CRITERIA: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    /// Worst value of every measured quantity, keyed by name.
    pub metrics: BTreeMap<String, f64>,
    /// One line per failed check.
    pub failures: Vec<String>,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("criterion {}: {verdict} — {}", self.id, self.title);
        if !self.failures.is_empty() {
            s.push_str(&format!(" [{}]", self.failures.join("; ")));
        }
        s
    }
}

#[derive(Default)]
struct Checker {
    metrics: BTreeMap<String, f64>,
    failures: Vec<String>,
}

impl Checker {
    /// Records `value` under `name` (keeping the worst one, judged by
    /// `upper`) and fails unless `value < bound` (or `> bound` for lower
    /// bounds).
    fn bound(&mut self, name: &str, value: f64, bound: f64, upper: bool) {
        let ok = if upper { value < bound } else { value > bound };
        let slot = self.metrics.entry(name.to_string()).or_insert(value);
        if (upper && value > *slot) || (!upper && value < *slot) || value.is_nan() {
            *slot = value;
        }
        if !ok {
            let op = if upper { "<" } else { ">" };
            self.failures
                .push(format!("{name} = {value:.3e}, need {op} {bound:.0e}"));
        }
    }

    fn below(&mut self, name: &str, value: f64, bound: f64) {
        self.bound(name, value, bound, true);
    }

    fn above(&mut self, name: &str, value: f64, bound: f64) {
        self.bound(name, value, bound, false);
    }

    fn close(&mut self, name: &str, value: f64, want: f64, tol: f64) {
        self.metrics.insert(name.to_string(), value);
        let within = (value - want).abs() <= tol;
        if !within {
            self.failures.push(format!("{name} = {value}, want {want} ± {tol:.0e}"));
        }
    }

    fn require(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failures.push(format!("{name} failed"));
        }
    }

    fn finish(self, id: u8, title: &str) -> CriterionOutcome {
        CriterionOutcome {
            id,
            title: title.to_string(),
            passed: self.failures.is_empty(),
            metrics: self.metrics,
            failures: self.failures,
        }
    }
}

fn title(id: u8) -> &'static str {
    match id {
        1 => "discrete pipeline commutation and eigenvalue agreement",
        2 => "kernel matrix cross-forms",
        3 => "Leonard duality and Christoffel-Darboux identity",
        4 => "anti-spin algebra and Casimir",
        5 => "bilinear operator degenerate for anti-Krawtchouk",
        6 => "pentadiagonal commuting operator",
        7 => "continuous-discrete commuting matrix",
        8 => "symbolic operator identities",
        _ => "unknown criterion",
    }
}

/// The two discrete configurations shared by criteria 1 and 2.
pub fn discrete_configs() -> Result<Vec<(String, LeonardPair, usize, usize)>> {
    Ok(vec![
        ("krawtchouk".into(), make_krawtchouk(20, 0.3)?, 7, 11),
        ("hahn".into(), make_hahn(12, 0.5, 1.5)?, 4, 8),
    ])
}

fn criterion_1(c: &mut Checker) -> Result<()> {
    for (name, pair, j1, j2) in discrete_configs()? {
        let r = analyze_discrete(&pair, j1, j2)?;
        c.below(&format!("{name}.m_pi1"), r.m_pi1.dense_residual, 1e-12);
        c.below(&format!("{name}.m_pi2"), r.m_pi2.dense_residual, 1e-12);
        c.below(&format!("{name}.m_v1"), r.m_v1, 1e-10);
        c.below(&format!("{name}.m_v2"), r.m_v2, 1e-10);
        c.above(
            &format!("{name}.gap_ratio"),
            r.restricted_gap_ratio().unwrap_or(0.0),
            1e-6,
        );
        match &r.diagonalization {
            Some(d) => c.below(&format!("{name}.rayleigh_vs_direct"), d.multiset_deviation, 1e-8),
            None => c.require(&format!("{name}.diagonalization"), false),
        }
    }
    Ok(())
}

fn criterion_2(c: &mut Checker) -> Result<()> {
    for (name, pair, j1, j2) in discrete_configs()? {
        let r = analyze_discrete(&pair, j1, j2)?;
        c.below(&format!("{name}.cross_forms"), r.kernel_cross_deviation, 1e-10);
        let n = pair.degree();
        let id = Matrix::identity(j1 + 1);
        for (form, k) in [
            ("sum", kernel_matrix_sum(&pair, j1, n)?),
            ("dual", kernel_matrix_dual(&pair, j1, n)?),
            ("cd", kernel_matrix_cd(&pair, j1, n)?),
        ] {
            c.below(
                &format!("{name}.full_band_{form}"),
                (&k.to_dense() - &id).max_abs(),
                1e-10,
            );
        }
    }
    Ok(())
}

fn cd_residual(pair: &LeonardPair, x: f64, y: f64, n: usize) -> Result<f64> {
    let rec = pair.l_recurrence();
    let px = eval_orthonormal(&rec, x, n)?;
    let py = eval_orthonormal(&rec, y, n)?;
    let direct: f64 = px.iter().zip(&py).map(|(a, b)| a * b).sum();
    let scale = px.iter().zip(&py).map(|(a, b)| (a * b).abs()).sum::<f64>().max(1.0);
    Ok((direct - rec.christoffel_darboux(x, y, n)?).abs() / scale)
}

fn criterion_3(c: &mut Checker) -> Result<()> {
    for n in 2..=30 {
        for p in [0.3, 0.5] {
            c.below("krawtchouk.duality", duality_residual(&make_krawtchouk(n, p)?)?, 1e-10);
        }
    }
    for n in 2..=20 {
        for (a, b) in [(0.5, 1.5), (0.0, 0.0), (2.0, 3.0)] {
            c.below("hahn.duality", duality_residual(&make_hahn(n, a, b)?)?, 1e-10);
        }
    }
    for n in (2..=20).step_by(2) {
        c.below(
            "anti_krawtchouk.duality",
            duality_residual(&make_anti_krawtchouk(n)?)?,
            1e-10,
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let families = [
        ("krawtchouk", make_krawtchouk(20, 0.3)?),
        ("hahn", make_hahn(12, 0.5, 1.5)?),
        ("anti_krawtchouk", make_anti_krawtchouk(8)?),
    ];
    for (name, pair) in &families {
        let lo = pair.lambda().iter().copied().fold(f64::INFINITY, f64::min);
        let hi = pair.lambda().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for _ in 0..100 {
            let x = rng.random_range(lo..hi);
            let y = rng.random_range(lo..hi);
            let n = rng.random_range(0..pair.degree());
            c.below(
                &format!("{name}.christoffel_darboux"),
                cd_residual(pair, x, y, n)?,
                1e-10,
            );
        }
    }
    Ok(())
}

fn criterion_4(c: &mut Checker) -> Result<()> {
    for n in (0..=40).step_by(2) {
        let rep = make_antispin(n)?;
        c.below("casimir", rep.casimir_residual(), 1e-10);
        for (k, v) in rep.anticommutator_residuals().into_iter().enumerate() {
            c.below(&format!("anticommutator_{}", k + 1), v, 1e-10);
        }
    }
    c.close("casimir_value_n8", make_antispin(8)?.casimir_value(), 80.75, 0.0);
    Ok(())
}

/// Every `(J1, J2)` with `2 ≤ J1 < N`, `0 ≤ J2 < N` for `N = 8`. A block
/// with `J1 = 1` has two eigenvalues with distinct sums and is not
/// degenerate, so it is left out.
fn criterion_5(c: &mut Checker) -> Result<()> {
    let pair = make_anti_krawtchouk(8)?;
    for j1 in 2..8 {
        for j2 in 0..8 {
            let r = analyze_discrete(&pair, j1, j2)?;
            c.below("m_v1", r.m_v1, 1e-10);
            c.below("m_v2", r.m_v2, 1e-10);
            c.below(
                "restricted_min_gap",
                r.restricted_min_gap.unwrap_or(f64::INFINITY),
                1e-10,
            );
            let refused = r
                .refusal
                .as_deref()
                .is_some_and(|m| m.contains("degenerate restricted spectrum"));
            c.require(
                &format!("refusal (J1={j1}, J2={j2})"),
                refused && r.diagonalization.is_none(),
            );
        }
    }
    Ok(())
}

fn criterion_6(c: &mut Checker) -> Result<()> {
    let rep = make_antispin(8)?;
    let coeffs = solve_penta_coeffs(&rep, 3, 5)?;
    let [a1, a2, a3, a4, a5, a6] = coeffs.alpha;
    c.close("kappa1", coeffs.kappa1, 32.5, 0.0);
    c.close("kappa2", coeffs.kappa2, 72.5, 0.0);
    c.close("alpha3", a3, -33.5, 1e-12);
    c.close("alpha4", a4, -73.5, 1e-12);
    c.close("abs_alpha1", a1.abs(), 1.0, 1e-12);
    c.close("abs_alpha2", a2.abs(), 1.0, 1e-12);
    c.close("abs_alpha5", a5.abs(), coeffs.kappa1, 1e-12);
    c.close("abs_alpha6", a6.abs(), coeffs.kappa2, 1e-12);
    for v in condition_residuals(&rep, 3, 5, &coeffs)? {
        c.below("conditions", v, 1e-12);
    }
    for (name, ansatz) in [("penta", Ansatz::Pentadiagonal), ("alternative", Ansatz::Alternative)] {
        let (_, r) = analyze_antikraw(8, 3, 5, ansatz)?;
        c.below(&format!("{name}.comm_pi1"), r.comm_e, 1e-10);
        c.below(&format!("{name}.comm_pi2"), r.comm_d, 1e-10);
        c.below(&format!("{name}.comm_pi2_conjugated"), r.comm_d_conjugated, 1e-10);
        c.above(&format!("{name}.gap_ratio_e"), r.gap_ratio_e.unwrap_or(0.0), 1e-8);
        c.above(&format!("{name}.gap_ratio_d"), r.gap_ratio_d.unwrap_or(0.0), 1e-8);
    }
    Ok(())
}

/// The three desk configurations of the continuous-discrete check.
pub fn contdisc_configs() -> [(&'static str, FamilyKind, usize, f64, f64); 3] {
    [
        ("jacobi", FamilyKind::Jacobi { alpha: 0.0, beta: 0.0 }, 10, 0.3, 121.0),
        ("hermite", FamilyKind::Hermite, 10, 0.5, 21.0),
        ("laguerre", FamilyKind::Laguerre { alpha: 0.0 }, 10, 2.0, 10.5),
    ]
}

fn criterion_7(c: &mut Checker) -> Result<()> {
    for (name, kind, n, w, sigma) in contdisc_configs() {
        let r = analyze_contdisc(&make_family(kind)?, n, w)?;
        c.close(&format!("{name}.sigma"), r.sigma, sigma, 0.0);
        c.below(&format!("{name}.commutator"), r.commutator_residual, 1e-8);
        match r.sigma_fit {
            Some(f) => c.close(&format!("{name}.sigma_fit"), f.fitted, sigma, 1e-6),
            None => c.require(&format!("{name}.sigma_fit"), false),
        }
        c.below(&format!("{name}.offdiag"), r.offdiag_in_t_basis, 1e-7);
    }
    Ok(())
}

fn criterion_8(c: &mut Checker) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED ^ 8);
    for _ in 0..5 {
        let (t, w) = (rng.random_range(0.2..3.0), rng.random_range(0.2..3.0));
        c.below("prolate.defect", verify_prolate_identity(t, w)?.defect, 1e-12);
        c.require("prolate.boundary", prolate_boundary(t, w)?.iter().all(|b| b.holds()));
        let (g, t, nu) = (
            rng.random_range(0.2..3.0),
            rng.random_range(0.2..3.0),
            rng.random_range(0.0..3.0),
        );
        c.below("bessel.defect", verify_bessel_identity(g, t, nu)?.defect, 1e-12);
        c.require("bessel.boundary", bessel_boundary(g, t, nu)?.iter().all(|b| b.holds()));
    }
    for (name, kind, n, w, _) in contdisc_configs() {
        let r = verify_tilde_d(&make_family(kind)?, n, w)?;
        c.require(&format!("{name}.tilde_d_boundary"), r.boundary_at_w);
    }
    let h = verify_tilde_d(&make_family(FamilyKind::Hermite)?, 5, 0.7)?;
    c.below("hermite.expansion_defect", h.divergence_defect, 1e-12);
    c.close("hermite.a_n", h.a_constant, 10.0, 0.0);
    for (t3, t4) in [(0.0, 0.0), (1.5, -2.0), (-3.0, 0.25)] {
        let tau = HeunCoefficients::new(0.0, 0.5, 0.5, t3, t4)?;
        c.close(
            "heun_epsilon",
            heun_ode_params(0.3, 1.7, &tau, 2.0)?.epsilon,
            1.0,
            1e-15,
        );
    }
    Ok(())
}

/// Runs one criterion; an error inside a computation fails the criterion.
pub fn run_criterion(id: u8) -> CriterionOutcome {
    let mut c = Checker::default();
    let run = match id {
        1 => criterion_1(&mut c),
        2 => criterion_2(&mut c),
        3 => criterion_3(&mut c),
        4 => criterion_4(&mut c),
        5 => criterion_5(&mut c),
        6 => criterion_6(&mut c),
        7 => criterion_7(&mut c),
        8 => criterion_8(&mut c),
        _ => {
            c.require("known criterion id", false);
            Ok(())
        }
    };
    if let Err(e) = run {
        c.failures.push(format!("error: {e}"));
    }
    c.finish(id, title(id))
}

pub fn run_all() -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|&id| run_criterion(id)).collect()
}
