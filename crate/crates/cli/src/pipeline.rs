//! Runs one validated configuration and turns the measured quantities into
//! a report with a verdict.

use std::collections::BTreeMap;

use heunband::acceptance::{run_criterion, CriterionOutcome, CRITERIA};
use heunband::antikraw::{analyze_antikraw, condition_residuals, make_antispin, Ansatz};
use heunband::contdisc::{
    analyze_contdisc, bessel_boundary, make_family, prolate_boundary, verify_bessel_identity, verify_prolate_identity,
    verify_tilde_d,
};
use heunband::heun::{assemble_heun_matrix, assemble_heun_matrix_dual, solve_perline_discrete};
use heunband::leonard::make_anti_krawtchouk;
use heunband::limiting::{analyze_discrete, kernel_matrix_sum, restriction_operators};
use heunband::linalg::sym_eigen;
use heunband::{BandedOperator, Error, Matrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Bound, Identity, Pipeline, RunConfig, ValidConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub passed: bool,
    /// Names of the residuals that missed their tolerance or could not be
    /// measured.
    pub failed: Vec<String>,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub config_echo: RunConfig,
    pub residuals: BTreeMap<String, f64>,
    pub spectra: BTreeMap<String, Vec<f64>>,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Passed,
    Failed,
    /// The configuration was rejected by the computation itself.
    Invalid,
}

/// A finished run: its report plus, on request, the matrices it built.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub name: String,
    pub status: Status,
    pub report: Report,
    pub matrices: Vec<(String, Matrix)>,
}

struct Collector<'a> {
    tolerances: &'a BTreeMap<String, (Bound, f64)>,
    residuals: BTreeMap<String, f64>,
    spectra: BTreeMap<String, Vec<f64>>,
    failed: Vec<String>,
    diagnostics: Vec<String>,
    matrices: Vec<(String, Matrix)>,
}

impl Collector<'_> {
    fn check(&mut self, name: &str, value: f64) {
        let (bound, tol) = self.tolerances[name];
        let ok = match bound {
            Bound::AtMost => value <= tol,
            Bound::AtLeast => value >= tol,
        };
        self.residuals.insert(name.to_string(), value);
        if !ok {
            let rel = match bound {
                Bound::AtMost => "exceeds",
                Bound::AtLeast => "falls below",
            };
            self.failed.push(name.to_string());
            self.diagnostics.push(format!(
                "failing residual `{name}` = {value:.6e} {rel} tolerance {tol:.3e}"
            ));
        }
    }

    fn missing(&mut self, name: &str, why: &str) {
        self.failed.push(name.to_string());
        self.diagnostics.push(format!("failing residual `{name}`: {why}"));
    }

    fn spectrum(&mut self, name: &str, values: Vec<f64>) {
        self.spectra.insert(name.to_string(), values);
    }
}

/// Runs one configuration; `with_matrices` keeps the operators for export.
pub fn run_config(config: &ValidConfig, with_matrices: bool) -> Outcome {
    if config.config.pipeline == Pipeline::VerifyAll {
        return verify_all(config).0;
    }
    let mut c = Collector {
        tolerances: &config.tolerances,
        residuals: BTreeMap::new(),
        spectra: BTreeMap::new(),
        failed: Vec::new(),
        diagnostics: Vec::new(),
        matrices: Vec::new(),
    };
    let cfg = &config.config;
    let run = match cfg.pipeline {
        Pipeline::Discrete => discrete(cfg, &mut c, with_matrices),
        Pipeline::Antikraw => antikraw(cfg, &mut c, with_matrices),
        Pipeline::Contdisc => contdisc(cfg, &mut c, with_matrices),
        Pipeline::Symbolic => symbolic(cfg, &mut c),
        Pipeline::VerifyAll => unreachable!("handled above"),
    };
    let mut status = Status::Passed;
    if let Err(e) = run {
        status = match e {
            Error::InvalidParameter { .. } | Error::SizeMismatch { .. } => Status::Invalid,
            _ => Status::Failed,
        };
        c.diagnostics.push(format!("error: {e}"));
    }
    if status == Status::Passed && !c.failed.is_empty() {
        status = Status::Failed;
    }
    Outcome {
        name: config.name.clone(),
        status,
        report: Report {
            config_echo: config.echo(),
            residuals: c.residuals,
            spectra: c.spectra,
            verdict: Verdict {
                passed: status == Status::Passed,
                failed: c.failed,
                diagnostics: c.diagnostics,
            },
        },
        matrices: c.matrices,
    }
}

fn required<T: Copy>(v: Option<T>) -> T {
    v.expect("validated configuration")
}

fn discrete(cfg: &RunConfig, c: &mut Collector, with_matrices: bool) -> heunband::Result<()> {
    let (n, j1, j2) = (required(cfg.n), required(cfg.j1), required(cfg.j2));
    let pair = required(cfg.family).leonard_pair(n)?.expect("discrete family");
    let r = analyze_discrete(&pair, j1, j2)?;
    c.check("m_pi1", r.m_pi1.dense_residual);
    c.check("m_pi2", r.m_pi2.dense_residual);
    c.check("m_v1", r.m_v1);
    c.check("m_v2", r.m_v2);
    c.check("kernel_cross_forms", r.kernel_cross_deviation);
    c.check("kernel_vs_v1", r.kernel_vs_v1);
    c.check("v1_v2_spectra", r.v1_v2_spectral_deviation);
    match r.restricted_gap_ratio() {
        Some(g) => c.check("restricted_gap_ratio", g),
        None => c.missing("restricted_gap_ratio", "restricted block has no gap to measure"),
    }
    match &r.diagonalization {
        Some(d) => {
            c.check("rayleigh_vs_direct", d.multiset_deviation);
            c.spectrum("rayleigh", d.rayleigh.clone());
            c.spectrum("direct", d.direct.clone());
        }
        None => {
            let why = r.refusal.as_deref().unwrap_or("diagonalization unavailable");
            c.missing("rayleigh_vs_direct", why);
        }
    }
    c.spectrum("concentration", r.concentration.clone());
    c.spectrum("restricted", r.restricted_values.clone());
    if with_matrices {
        let tau = solve_perline_discrete(&pair, j1, j2)?.tau;
        let z_e = BandedOperator::symmetric_tridiagonal(pair.xi(), pair.eta())?;
        let l_d = BandedOperator::symmetric_tridiagonal(pair.a(), pair.b())?;
        let v = restriction_operators(&pair, j1, j2)?;
        c.matrices = vec![
            ("kernel".into(), kernel_matrix_sum(&pair, j1, j2)?.to_dense()),
            (
                "m_e".into(),
                assemble_heun_matrix(pair.lambda(), &z_e, &tau)?.to_dense(),
            ),
            (
                "m_d".into(),
                assemble_heun_matrix_dual(&l_d, pair.mu(), &tau)?.to_dense(),
            ),
            ("v1".into(), v.v1.to_dense()),
            ("v2".into(), v.v2.to_dense()),
        ];
    }
    Ok(())
}

fn antikraw(cfg: &RunConfig, c: &mut Collector, with_matrices: bool) -> heunband::Result<()> {
    let (n, n1, n2) = (required(cfg.n), required(cfg.n1), required(cfg.n2));
    let ansatz = cfg.ansatz.unwrap_or(Ansatz::Pentadiagonal);
    let (op, r) = analyze_antikraw(n, n1, n2, ansatz)?;
    c.check("comm_pi1", r.comm_e);
    c.check("comm_pi2", r.comm_d);
    c.check("comm_pi2_conjugated", r.comm_d_conjugated);
    c.check("outside_band", r.outside_band);
    c.check("asymmetry", r.asymmetry);
    let why = r
        .refusal
        .clone()
        .unwrap_or_else(|| "restricted block has no gap to measure".into());
    match r.gap_ratio_e {
        Some(g) => c.check("gap_ratio_e", g),
        None => c.missing("gap_ratio_e", &why),
    }
    match r.gap_ratio_d {
        Some(g) => c.check("gap_ratio_d", g),
        None => c.missing("gap_ratio_d", &why),
    }
    if let Some(refusal) = &r.refusal {
        if r.gap_ratio_e.is_some() && r.gap_ratio_d.is_some() {
            c.diagnostics.push(refusal.clone());
        }
    }
    if let Some(coeffs) = &op.coefficients {
        let rep = make_antispin(n)?;
        let worst = condition_residuals(&rep, n1, n2, coeffs)?
            .into_iter()
            .fold(0.0f64, f64::max);
        c.check("penta_conditions", worst);
    }
    let pair = make_anti_krawtchouk(n)?;
    let kernel = kernel_matrix_sum(&pair, n1, n2)?;
    c.spectrum("concentration", sym_eigen(&kernel)?.values().to_vec());
    c.spectrum("restricted_e", r.restricted_e.clone());
    c.spectrum("restricted_d", r.restricted_d.clone());
    if with_matrices {
        c.matrices = vec![
            ("kernel".into(), kernel.to_dense()),
            ("m_e".into(), op.e.clone()),
            ("m_d".into(), op.d.clone()),
        ];
    }
    Ok(())
}

fn contdisc(cfg: &RunConfig, c: &mut Collector, with_matrices: bool) -> heunband::Result<()> {
    let kind = required(cfg.family).continuous().expect("continuous family");
    let family = make_family(kind)?;
    let r = analyze_contdisc(&family, required(cfg.n), required(cfg.w))?;
    c.check("commutator", r.commutator_residual);
    c.check("offdiag_in_t_basis", r.offdiag_in_t_basis);
    c.check("quadrature_error", r.kernel.error_estimate);
    match r.sigma_fit {
        Some(f) => c.check("sigma_fit_deviation", (f.fitted - r.sigma).abs()),
        None => c.missing("sigma_fit_deviation", "[L, K] vanishes, so sigma cannot be fitted"),
    }
    c.spectrum("concentration", r.kernel_eigenvalues.clone());
    c.spectrum("commuting", r.commuting_eigenvalues.clone());
    if with_matrices {
        c.matrices = vec![
            ("kernel".into(), r.kernel.matrix.to_dense()),
            ("commuting".into(), r.commuting.to_dense()),
        ];
    }
    Ok(())
}

fn symbolic(cfg: &RunConfig, c: &mut Collector) -> heunband::Result<()> {
    match required(cfg.identity) {
        Identity::Prolate => {
            let (t, w) = (required(cfg.t), required(cfg.w));
            c.check("identity_defect", verify_prolate_identity(t, w)?.defect);
            let bad = prolate_boundary(t, w)?.iter().filter(|b| !b.holds()).count();
            c.check("boundary_violations", bad as f64);
        }
        Identity::Bessel => {
            let (g, t, nu) = (required(cfg.g), required(cfg.t), required(cfg.nu));
            c.check("identity_defect", verify_bessel_identity(g, t, nu)?.defect);
            let bad = bessel_boundary(g, t, nu)?.iter().filter(|b| !b.holds()).count();
            c.check("boundary_violations", bad as f64);
        }
        Identity::TildeD => {
            let kind = required(cfg.family).continuous().expect("continuous family");
            let r = verify_tilde_d(&make_family(kind)?, required(cfg.n), required(cfg.w))?;
            c.check("identity_defect", r.divergence_defect);
            c.check("leading_at_w", r.leading_at_w.abs());
            c.check("boundary_violations", if r.boundary_at_w { 0.0 } else { 1.0 });
        }
    }
    Ok(())
}

/// Runs every acceptance criterion (in parallel on the current pool) and
/// returns the report with the per-criterion outcomes in order.
pub fn verify_all(config: &ValidConfig) -> (Outcome, Vec<CriterionOutcome>) {
    let outcomes: Vec<CriterionOutcome> = CRITERIA.par_iter().map(|&id| run_criterion(id)).collect();
    let mut residuals = BTreeMap::new();
    let mut failed = Vec::new();
    let mut diagnostics = Vec::new();
    for o in &outcomes {
        for (k, &v) in &o.metrics {
            residuals.insert(format!("criterion{}.{k}", o.id), v);
        }
        if !o.passed {
            failed.push(format!("criterion{}", o.id));
            diagnostics.push(o.line());
        }
    }
    let passed = failed.is_empty();
    let outcome = Outcome {
        name: config.name.clone(),
        status: if passed { Status::Passed } else { Status::Failed },
        report: Report {
            config_echo: config.echo(),
            residuals,
            spectra: BTreeMap::new(),
            verdict: Verdict {
                passed,
                failed,
                diagnostics,
            },
        },
        matrices: Vec::new(),
    };
    (outcome, outcomes)
}
