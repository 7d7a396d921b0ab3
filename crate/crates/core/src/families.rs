//! The two explicit families of non-Sasakian (κ, μ, υ = const)-contact metric
//! manifolds with ξ(I_M) = 0, and D_α-homothetic deformations.
//!
//! On the chart (x, y, z), with f, r, s arbitrary functions of z (r > 0) and
//! a constant υ ≠ 0, both families have ξ = ∂x, η = dx − a dz, λ = r e^{υx},
//! κ = 1 − λ² and metric
//!
//! ```text
//!     | 1   0   −a        |
//! g = | 0   1   −b        |
//!     | −a  −b  1 + a² + b² |
//! ```
//!
//! Family I: a = 2y + f, b = −(y²/2)υ − y f υ/2 − (y/2) r′/r + (2/υ) r e^{υx} + s, μ = 2(1 + λ).
//! Family II: a = −2y + f, b = (y²/2)υ − y f υ/2 − (y/2) r′/r + (2/υ) r e^{υx} + s, μ = 2(1 − λ),
//! with φ and h the negatives of the family I matrices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contact::{self, Box3, ClosedForms, ContactError, ContactMetricStructure, Domain};
use crate::jet::{self, Dual, Vec3};
use crate::residuals::PointResiduals;
use crate::scalar_field::{Axis, FieldError, Point, ScalarField};
use crate::tensor_calc::{self, CurvatureBundle, MetricField, OneForm, TensorError, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// μ = 2(1 + √(1 − κ))
    I,
    /// μ = 2(1 − √(1 − κ))
    II,
}

impl Variant {
    /// +1 for family I, −1 for family II.
    pub fn sign(self) -> f64 {
        match self {
            Variant::I => 1.0,
            Variant::II => -1.0,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::I => "I",
            Variant::II => "II",
        })
    }
}

impl FromStr for Variant {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "I" | "1" | "i" => Ok(Variant::I),
            "II" | "2" | "ii" => Ok(Variant::II),
            other => Err(FamilyError::UnknownVariant(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FamilyError {
    #[error("upsilon must be a nonzero constant (got {0})")]
    ZeroUpsilon(f64),
    #[error("r(z) must be positive on the domain, but r({z}) = {value}")]
    NonPositiveR { z: f64, value: f64 },
    #[error("{name} must depend on z only")]
    NotAFunctionOfZ { name: &'static str },
    #[error("domain box is empty or not finite")]
    InvalidBox,
    #[error("deformation parameter alpha must be positive (got {0})")]
    NonPositiveAlpha(f64),
    #[error("unknown family variant '{0}' (expected I or II)")]
    UnknownVariant(String),
    #[error("operation needs a family {expected} structure")]
    VariantMismatch { expected: Variant },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Parameters of one member of a family.
#[derive(Clone, Debug)]
pub struct FamilyParams {
    pub variant: Variant,
    pub f: ScalarField,
    pub r: ScalarField,
    pub s: ScalarField,
    pub upsilon: f64,
    pub bounds: Box3,
}

impl FamilyParams {
    pub fn new(
        variant: Variant,
        f: ScalarField,
        r: ScalarField,
        s: ScalarField,
        upsilon: f64,
        bounds: Box3,
    ) -> Self {
        FamilyParams {
            variant,
            f,
            r,
            s,
            upsilon,
            bounds,
        }
    }

    /// f = s = 0, r = 1 on [−1, 1]³.
    pub fn simple(variant: Variant, upsilon: f64) -> Self {
        FamilyParams::new(
            variant,
            ScalarField::zero(),
            ScalarField::one(),
            ScalarField::zero(),
            upsilon,
            Box3::cube(1.0),
        )
    }

    fn check(&self) -> Result<(), FamilyError> {
        if self.upsilon == 0.0 || !self.upsilon.is_finite() {
            return Err(FamilyError::ZeroUpsilon(self.upsilon));
        }
        if !self.bounds.is_valid() {
            return Err(FamilyError::InvalidBox);
        }
        for (name, field) in [("f", &self.f), ("r", &self.r), ("s", &self.s)] {
            if field.depends_on(Axis::X) || field.depends_on(Axis::Y) {
                return Err(FamilyError::NotAFunctionOfZ { name });
            }
        }
        self.check_r_positive()
    }

    fn check_r_positive(&self) -> Result<(), FamilyError> {
        if let Some(c) = self.r.as_constant() {
            return if c > 0.0 {
                Ok(())
            } else {
                Err(FamilyError::NonPositiveR {
                    z: self.bounds.z[0],
                    value: c,
                })
            };
        }
        const GRID: usize = 1024;
        let [lo, hi] = self.bounds.z;
        for k in 0..=GRID {
            let z = lo + (hi - lo) * k as f64 / GRID as f64;
            let value = self.r.eval(&Point::new(0.0, 0.0, z)).unwrap_or(f64::NAN);
            if !(value > 0.0) {
                return Err(FamilyError::NonPositiveR { z, value });
            }
        }
        Ok(())
    }
}

/// The closed-form scalar fields a, b, λ of a family member.
#[derive(Clone, Debug)]
pub struct FamilyFields {
    pub a: ScalarField,
    pub b: ScalarField,
    pub lambda: ScalarField,
}

/// a, b and λ for the given parameters (no validation).
pub fn family_fields(p: &FamilyParams) -> FamilyFields {
    let (x, y) = (ScalarField::x(), ScalarField::y());
    let u = p.upsilon;
    let growth = (u * &x).exp();
    let lambda = &p.r * &growth;
    let r_prime = p.r.partial(Axis::Z);
    let r_log_slope = &r_prime / &p.r;
    let exp_term = (2.0 / u) * (&p.r * &growth);
    let (a, b) = match p.variant {
        Variant::I => {
            let a = 2.0 * &y + &p.f;
            let b = -(y.powi(2) / 2.0 * u) - (&y * &p.f / 2.0 * u) - (&y / 2.0 * &r_log_slope)
                + exp_term
                + &p.s;
            (a, b)
        }
        Variant::II => {
            let a = -2.0 * &y + &p.f;
            let b = y.powi(2) / 2.0 * u - (&y * &p.f / 2.0 * u) - (&y / 2.0 * &r_log_slope)
                + exp_term
                + &p.s;
            (a, b)
        }
    };
    FamilyFields { a, b, lambda }
}

/// The metric template shared by both families.
pub fn metric_from(a: &ScalarField, b: &ScalarField) -> Result<MetricField, TensorError> {
    let g13 = -a;
    let g23 = -b;
    let g33 = 1.0 + a.powi(2) + b.powi(2);
    MetricField::new([
        [ScalarField::one(), ScalarField::zero(), g13.clone()],
        [ScalarField::zero(), ScalarField::one(), g23.clone()],
        [g13, g23, g33],
    ])
}

/// φ for the given variant.
pub fn phi_from(variant: Variant, a: &ScalarField, b: &ScalarField) -> [[ScalarField; 3]; 3] {
    let z = ScalarField::zero;
    let m = [
        [z(), a.clone(), -(a * b)],
        [z(), b.clone(), -1.0 - b.powi(2)],
        [z(), ScalarField::one(), -b],
    ];
    match variant {
        Variant::I => m,
        Variant::II => m.map(|row| row.map(|e| if e.is_zero() { e } else { -e })),
    }
}

/// h as displayed for the given variant.
pub fn h_from(
    variant: Variant,
    a: &ScalarField,
    b: &ScalarField,
    lambda: &ScalarField,
) -> [[ScalarField; 3]; 3] {
    let z = ScalarField::zero;
    let m = [
        [z(), z(), -(a * lambda)],
        [z(), lambda.clone(), -(2.0 * lambda * b)],
        [z(), z(), -lambda],
    ];
    match variant {
        Variant::I => m,
        Variant::II => m.map(|row| row.map(|e| if e.is_zero() { e } else { -e })),
    }
}

pub fn eta_from(a: &ScalarField) -> OneForm {
    OneForm::new([ScalarField::one(), ScalarField::zero(), -a])
}

/// Builds the structure with its closed-form κ = 1 − λ², μ = 2(1 ± λ), υ and h.
pub fn build_family(p: &FamilyParams) -> Result<ContactMetricStructure, FamilyError> {
    p.check()?;
    let FamilyFields { a, b, lambda } = family_fields(p);
    let g = metric_from(&a, &b)?;
    let phi = phi_from(p.variant, &a, &b);
    let h = h_from(p.variant, &a, &b, &lambda);
    let kappa = 1.0 - lambda.powi(2);
    let mu = 2.0 * (1.0 + p.variant.sign() * &lambda);
    let domain = Domain::new(p.bounds).with_positive(p.r.clone());
    let s = ContactMetricStructure::new(
        eta_from(&a),
        VectorField::coordinate(Axis::X),
        phi,
        g,
        domain,
    );
    Ok(s.with_closed_forms(ClosedForms {
        lambda,
        kappa,
        mu,
        upsilon: p.upsilon,
        h: Some(h),
    }))
}

/// Positive deformation constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformParams {
    pub alpha: f64,
}

impl DeformParams {
    pub fn new(alpha: f64) -> Result<Self, FamilyError> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(DeformParams { alpha })
        } else {
            Err(FamilyError::NonPositiveAlpha(alpha))
        }
    }
}

/// (κ̄, μ̄, ῡ) = ((κ + α² − 1)/α², (μ + 2(α − 1))/α, υ/α).
pub fn predicted_deformed_kmv(kappa: f64, mu: f64, upsilon: f64, alpha: f64) -> (f64, f64, f64) {
    (
        1.0 - (1.0 - kappa) / (alpha * alpha),
        (mu + 2.0 * (alpha - 1.0)) / alpha,
        upsilon / alpha,
    )
}

/// η̄ = αη, ξ̄ = ξ/α, φ̄ = φ, ḡ = αg + α(α − 1) η⊗η.
///
/// Closed forms, when present, are carried over as λ̄ = λ/α, h̄ = h/α and the
/// deformed nullity functions.
pub fn d_homothetic_deform(
    s: &ContactMetricStructure,
    d: DeformParams,
) -> Result<ContactMetricStructure, FamilyError> {
    let alpha = DeformParams::new(d.alpha)?.alpha;
    let shear = alpha * (alpha - 1.0);
    let e = &s.eta.components;
    let g_bar: [[ScalarField; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (i, j) = (i.min(j), i.max(j));
            alpha * s.g.component(i, j) + shear * (&e[i] * &e[j])
        })
    });
    let g_bar = MetricField::new(g_bar)?;
    let eta_bar = OneForm::new(e.clone().map(|c| alpha * c));
    let xi_bar = VectorField::new(s.xi.components.clone().map(|c| c / alpha));
    let out = ContactMetricStructure::new(eta_bar, xi_bar, s.phi.clone(), g_bar, s.domain.clone());
    Ok(match s.closed_forms() {
        Some(cf) => out.with_closed_forms(ClosedForms {
            lambda: &cf.lambda / alpha,
            kappa: 1.0 - (1.0 - &cf.kappa) / (alpha * alpha),
            mu: (&cf.mu + 2.0 * (alpha - 1.0)) / alpha,
            upsilon: cf.upsilon / alpha,
            h: cf
                .h
                .as_ref()
                .map(|h| h.clone().map(|row| row.map(|e| e / alpha))),
        }),
        None => out.assume_constant_upsilon(s.upsilon_constant()),
    })
}

/// Largest entry of |h_computed − h_closed| at `p`.
pub fn closed_h_mismatch(
    s: &ContactMetricStructure,
    p: &Point,
) -> Result<Option<f64>, ContactError> {
    let Some(h_closed) = s.closed_forms().and_then(|cf| cf.h.as_ref()) else {
        return Ok(None);
    };
    let computed = contact::compute_h(s, p)?;
    let closed = contact::eval_matrix(h_closed, p)?;
    let mut diff = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            diff[i][j] = computed[i][j] - closed[i][j];
        }
    }
    Ok(Some(jet::max_abs_mat(&diff)))
}

/// The explicit frame (ξ₁, X₁, Y₁) = (∂x, ∂y, a∂x + b∂y + ∂z) of family I
/// and, for family II, (ξ₂, X₂, Y₂) = (∂x, a∂x + b∂y + ∂z, ∂y).
pub fn explicit_frame(p: &FamilyParams) -> [VectorField; 3] {
    let FamilyFields { a, b, .. } = family_fields(p);
    let slanted = VectorField::new([a, b, ScalarField::one()]);
    let vertical = VectorField::coordinate(Axis::Y);
    match p.variant {
        Variant::I => [VectorField::coordinate(Axis::X), vertical, slanted],
        Variant::II => [VectorField::coordinate(Axis::X), slanted, vertical],
    }
}

/// The closed-form B/(2λ) = ((2y + f)υ + r′/r)/2 appearing in the family I
/// bracket and connection relations.
pub fn family_one_b_over_two_lambda(p: &FamilyParams) -> ScalarField {
    let y = ScalarField::y();
    ((2.0 * y + &p.f) * p.upsilon + p.r.partial(Axis::Z) / &p.r) / 2.0
}

/// Residuals of the bracket relations and Levi-Civita connection table of
/// the explicit family I frame (ξ₁, X₁, Y₁) = (∂x, ∂y, a∂x + b∂y + ∂z),
/// with β = B/(2λ):
///
/// ```text
/// [ξ₁, X₁] = 0              [ξ₁, Y₁] = 2λX₁          [X₁, Y₁] = −βX₁ + 2ξ₁
/// ∇_{X₁}ξ₁ = −(λ + 1)Y₁     ∇_{Y₁}ξ₁ = (1 − λ)X₁     ∇_{ξ₁}ξ₁ = 0
/// ∇_{ξ₁}X₁ = −(1 + λ)Y₁     ∇_{ξ₁}Y₁ = (1 + λ)X₁
/// ∇_{X₁}X₁ = βY₁            ∇_{Y₁}Y₁ = 0
/// ∇_{Y₁}X₁ = (λ − 1)ξ₁      ∇_{X₁}Y₁ = −βX₁ + (λ + 1)ξ₁
/// ```
///
/// Each residual is the largest coordinate component of the difference.
pub fn family_one_frame_table(
    p: &FamilyParams,
    point: &Point,
) -> Result<PointResiduals, FamilyError> {
    if p.variant != Variant::I {
        return Err(FamilyError::VariantMismatch {
            expected: Variant::I,
        });
    }
    let FamilyFields { a, b, lambda } = family_fields(p);
    let g = metric_from(&a, &b)?;
    let bundle = CurvatureBundle::new(&g, point)?;
    let [xi, x, y] = explicit_frame(p);
    let xi_j = xi.eval_jet(point)?;
    let x_j = x.eval_jet(point)?;
    let y_j = y.eval_jet(point)?;
    let (xi_v, x_v, y_v) = (jet::values(&xi_j), jet::values(&x_j), jet::values(&y_j));
    let lam = lambda.eval(point)?;
    let beta = family_one_b_over_two_lambda(p).eval(point)?;

    let combo = |terms: &[(f64, &[f64; 3])]| {
        let mut out = [0.0; 3];
        for (k, v) in terms {
            for i in 0..3 {
                out[i] += k * v[i];
            }
        }
        out
    };
    let gap = |lhs: [f64; 3], rhs: [f64; 3]| jet::max_abs(&jet::sub_vec(&lhs, &rhs));
    let nabla = |v: &[f64; 3], w: &Vec3<Dual>| bundle.covariant(v, w);

    let mut out = PointResiduals::at(*point);
    out.insert(
        "bracket_xi_x",
        gap(tensor_calc::bracket_at(&xi_j, &x_j), [0.0; 3]),
    );
    out.insert(
        "bracket_xi_y",
        gap(
            tensor_calc::bracket_at(&xi_j, &y_j),
            combo(&[(2.0 * lam, &x_v)]),
        ),
    );
    out.insert(
        "bracket_x_y",
        gap(
            tensor_calc::bracket_at(&x_j, &y_j),
            combo(&[(-beta, &x_v), (2.0, &xi_v)]),
        ),
    );
    out.insert(
        "nabla_x_xi",
        gap(nabla(&x_v, &xi_j), combo(&[(-(lam + 1.0), &y_v)])),
    );
    out.insert(
        "nabla_y_xi",
        gap(nabla(&y_v, &xi_j), combo(&[(1.0 - lam, &x_v)])),
    );
    out.insert("nabla_xi_xi", gap(nabla(&xi_v, &xi_j), [0.0; 3]));
    out.insert(
        "nabla_xi_x",
        gap(nabla(&xi_v, &x_j), combo(&[(-(1.0 + lam), &y_v)])),
    );
    out.insert(
        "nabla_xi_y",
        gap(nabla(&xi_v, &y_j), combo(&[(1.0 + lam, &x_v)])),
    );
    out.insert("nabla_x_x", gap(nabla(&x_v, &x_j), combo(&[(beta, &y_v)])));
    out.insert("nabla_y_y", gap(nabla(&y_v, &y_j), [0.0; 3]));
    out.insert(
        "nabla_y_x",
        gap(nabla(&y_v, &x_j), combo(&[(lam - 1.0, &xi_v)])),
    );
    out.insert(
        "nabla_x_y",
        gap(
            nabla(&x_v, &y_j),
            combo(&[(-beta, &x_v), (lam + 1.0, &xi_v)]),
        ),
    );
    Ok(out)
}
