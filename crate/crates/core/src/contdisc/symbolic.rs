use serde::{Deserialize, Serialize};

use super::ClassicalFamily;
use crate::diffops::{boundary_commutation_check, BoundaryCheck, DiffOperator, Polynomial, RationalCoefficient};
use crate::error::Result;

/// Coefficient-level tolerance for exact operator identities.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub holds: bool,
    /// Largest relative cross-multiplied coefficient defect.
    pub defect: f64,
}

impl IdentityCheck {
    fn from_defect(defect: f64) -> Self {
        Self {
            holds: defect <= IDENTITY_TOL,
            defect,
        }
    }
}

fn x_squared() -> DiffOperator {
    DiffOperator::multiplication(Polynomial::monomial(1.0, 2))
}

fn minus_d2() -> DiffOperator {
    DiffOperator::term(2, -1.0).expect("order 2")
}

/// `s₁{L, ω} + s₂L + s₃ω + s₄` for given `L` and `ω = x²`.
fn combination(l: &DiffOperator, s: [f64; 4]) -> Result<DiffOperator> {
    let omega = x_squared();
    Ok(l.anticommutator(&omega)?
        .scale(s[0])
        .add(&l.scale(s[1]))
        .add(&omega.scale(s[2]))
        .add(&DiffOperator::identity().scale(s[3])))
}

/// `∂(T² − x²)∂ − W²x²`.
pub fn prolate_operator(t: f64, w: f64) -> DiffOperator {
    let a = Polynomial::new(vec![t * t, 0.0, -1.0]);
    DiffOperator::from_polynomials(&[Polynomial::monomial(-w * w, 2), a.derivative(), a]).expect("order 2")
}

/// Defect of `s₁{L, x²} + s₂L + s₃x² + s₄ = ∂(T² − x²)∂ − W²x²` with
/// `L = −∂²`.
pub fn prolate_defect(t: f64, w: f64, s: [f64; 4]) -> Result<f64> {
    Ok(combination(&minus_d2(), s)?.max_defect(&prolate_operator(t, w)))
}

/// The prolate decomposition with `s = (1/2, −T², −W², 1)`.
pub fn verify_prolate_identity(t: f64, w: f64) -> Result<IdentityCheck> {
    prolate_defect(t, w, [0.5, -t * t, -w * w, 1.0]).map(IdentityCheck::from_defect)
}

/// `L = −∂² + (ν² − 1/4)/x²`.
pub fn bessel_l(nu: f64) -> DiffOperator {
    minus_d2().add(&DiffOperator::multiplication(RationalCoefficient::laurent(
        nu * nu - 0.25,
        0,
        2,
    )))
}

/// `−∂(G² − x²)∂ + T²x² + G²(ν² − 1/4)/x²`.
pub fn bessel_operator(g: f64, t: f64, nu: f64) -> DiffOperator {
    let a = Polynomial::new(vec![-g * g, 0.0, 1.0]);
    let zeroth = RationalCoefficient::from(Polynomial::monomial(t * t, 2)).add(&RationalCoefficient::laurent(
        g * g * (nu * nu - 0.25),
        0,
        2,
    ));
    DiffOperator::term(2, a.clone())
        .expect("order 2")
        .add(&DiffOperator::term(1, a.derivative()).expect("order 1"))
        .add(&DiffOperator::multiplication(zeroth))
}

pub fn bessel_defect(g: f64, t: f64, nu: f64, s: [f64; 4]) -> Result<f64> {
    Ok(combination(&bessel_l(nu), s)?.max_defect(&bessel_operator(g, t, nu)))
}

/// The Bessel decomposition with `s = (−1/2, G², T², ν² − 5/4)`.
pub fn verify_bessel_identity(g: f64, t: f64, nu: f64) -> Result<IdentityCheck> {
    bessel_defect(g, t, nu, [-0.5, g * g, t * t, nu * nu - 1.25]).map(IdentityCheck::from_defect)
}

pub fn prolate_boundary(t: f64, w: f64) -> Result<Vec<BoundaryCheck>> {
    boundary_commutation_check(&prolate_operator(t, w), &[-t, t])
}

pub fn bessel_boundary(g: f64, t: f64, nu: f64) -> Result<Vec<BoundaryCheck>> {
    boundary_commutation_check(&bessel_operator(g, t, nu), &[-g, g])
}

/// Perline form `½{D, X} − WD + σ_N X + c I` of the local operator.
pub fn tilde_d_operator(family: &ClassicalFamily, n: usize, w: f64) -> Result<DiffOperator> {
    let d = family.operator_d();
    let x = DiffOperator::multiplication(Polynomial::monomial(1.0, 1));
    Ok(d.anticommutator(&x)?
        .scale(0.5)
        .sub(&d.scale(w))
        .add(&x.scale(family.sigma(n)))
        .add(&DiffOperator::identity().scale(family.identity_shift())))
}

/// Divergence form `(1/ρ)∂((x − W)qρ∂) + A_N x` with `q = p/ρ`.
pub fn divergence_form_operator(family: &ClassicalFamily, n: usize, w: f64) -> Result<DiffOperator> {
    let flux = family.flux_factor().mul(&Polynomial::linear_factor(w));
    let first = RationalCoefficient::from(flux.derivative())
        .add(&RationalCoefficient::from(flux.clone()).mul(&family.weight_log_derivative()));
    Ok(DiffOperator::term(2, flux)?
        .add(&DiffOperator::term(1, first)?)
        .add(&DiffOperator::multiplication(Polynomial::monomial(
            family.a_constant(n),
            1,
        ))))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TildeDReport {
    pub family: String,
    pub n: usize,
    pub w: f64,
    pub sigma: f64,
    pub a_constant: f64,
    pub identity_shift: f64,
    /// Second-order coefficient at `x = W`.
    pub leading_at_w: f64,
    /// `A(W) = 0` and `B(W) = A′(W)`.
    pub boundary_at_w: bool,
    /// Constant `c` in Perline form `=` divergence form `+ c I`.
    pub divergence_offset: f64,
    /// Defect of Perline form `= divergence form + c I`.
    pub divergence_defect: f64,
}

/// Builds the local operator and checks the boundary condition at `W` and
/// its agreement with the divergence form up to a multiple of the
/// identity (exact equality for Hermite and Jacobi).
pub fn verify_tilde_d(family: &ClassicalFamily, n: usize, w: f64) -> Result<TildeDReport> {
    let perline = tilde_d_operator(family, n, w)?;
    let divergence = divergence_form_operator(family, n, w)?;
    let zeroth = perline.sub(&divergence).coefficient(0);
    let offset = if zeroth.pole_orders() == [0, 0, 0] {
        zeroth.numerator().coeffs().first().copied().unwrap_or(0.0)
    } else {
        0.0
    };
    let shifted = divergence.add(&DiffOperator::identity().scale(offset));
    let checks = boundary_commutation_check(&perline, &[w])?;
    Ok(TildeDReport {
        family: family.name().to_string(),
        n,
        w,
        sigma: family.sigma(n),
        a_constant: family.a_constant(n),
        identity_shift: family.identity_shift(),
        leading_at_w: perline.coefficient(2).eval(w).unwrap_or(f64::NAN),
        boundary_at_w: checks.iter().all(BoundaryCheck::holds),
        divergence_offset: offset,
        divergence_defect: perline.max_defect(&shifted),
    })
}
