//! Extraction of (κ, μ, υ) from curvature and the identity residuals of
//! (κ, μ, υ)-contact metric manifolds.
//!
//! Everything is measured in the h-frame (ξ, X, φX): vector residuals are
//! reported as the largest g-component along the frame, operator residuals
//! as the largest frame matrix entry. Structures that carry closed forms use
//! them for κ, μ, υ, λ and their derivatives; other structures use values
//! extracted from curvature, differentiated by central differences
//! ([`FD_STEP`]), and are checked at the looser [`FD_TOL`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contact::{self, ContactError, ContactMetricStructure, FrameJet, HFrame};
use crate::jet::{self, Dual, Mat3, Real, Vec3};
use crate::residuals::{IdentityReport, PointResiduals};
use crate::scalar_field::{Axis, FieldError, Point};
use crate::tensor_calc::{self, CurvatureBundle, SecondJet, TensorError};

/// Tolerance for identities evaluated from closed forms.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Tolerance for identities that differentiate extracted values numerically.
pub const FD_TOL: f64 = 1e-5;
/// Central-difference step for extracted fields.
pub const FD_STEP: f64 = 1e-5;
/// Branch decision tolerance for the μ = 2(1 ± √(1−κ)) dichotomy.
pub const BRANCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KmvError {
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("Boeckx invariant needs kappa < 1 (got {0})")]
    KappaNotBelowOne(f64),
    #[error("identity requires constant upsilon, but the structure does not declare it")]
    UpsilonNotConstant,
}

/// (κ, μ, υ) solved from R(·, ξ)ξ in the h-frame, with the nullity residual
/// of the full re-substitution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullityTriple {
    pub kappa: f64,
    pub mu: f64,
    pub upsilon: f64,
    pub residual: f64,
}

/// Pointwise data the nullity condition is checked against.
#[derive(Clone, Copy, Debug)]
pub struct NullityInputs {
    pub eta: [f64; 3],
    pub phi: [[f64; 3]; 3],
    pub h: [[f64; 3]; 3],
}

impl NullityInputs {
    pub fn at(s: &ContactMetricStructure, p: &Point) -> Result<Self, KmvError> {
        Ok(NullityInputs {
            eta: s.eta.eval(p)?,
            phi: s.phi_at(p)?,
            h: contact::compute_h(s, p)?,
        })
    }
}

/// Largest frame component of R(V,W)ξ − [κ(η(W)V − η(V)W) + μ(η(W)hV − η(V)hW)
/// + υ(η(W)φhV − η(V)φhW)] over all pairs of frame vectors.
pub fn nullity_residual(
    bundle: &CurvatureBundle,
    frame: &HFrame,
    inputs: &NullityInputs,
    kappa: f64,
    mu: f64,
    upsilon: f64,
) -> f64 {
    let e = frame.vectors();
    let phi_h = jet::mat_mul(&inputs.phi, &inputs.h);
    let mut worst = 0.0_f64;
    for v in &e {
        for w in &e {
            let lhs = bundle.curvature(v, w, &frame.xi);
            let ev = jet::dot(&inputs.eta, v);
            let ew = jet::dot(&inputs.eta, w);
            let hv = jet::mat_vec(&inputs.h, v);
            let hw = jet::mat_vec(&inputs.h, w);
            let fv = jet::mat_vec(&phi_h, v);
            let fw = jet::mat_vec(&phi_h, w);
            let mut diff = [0.0; 3];
            for k in 0..3 {
                let rhs = kappa * (ew * v[k] - ev * w[k])
                    + mu * (ew * hv[k] - ev * hw[k])
                    + upsilon * (ew * fv[k] - ev * fw[k]);
                diff[k] = lhs[k] - rhs;
            }
            for c in &e {
                worst = nan_max(worst, bundle.inner(&diff, c).abs());
            }
        }
    }
    worst
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Solves (κ, μ, υ) from R(X,ξ)ξ = (κ+μλ)X + υλφX and
/// R(φX,ξ)ξ = (κ−μλ)φX + υλX.
pub fn extract_with_frame(
    bundle: &CurvatureBundle,
    frame: &HFrame,
    inputs: &NullityInputs,
) -> NullityTriple {
    let rx = bundle.curvature(&frame.x, &frame.xi, &frame.xi);
    let ry = bundle.curvature(&frame.phi_x, &frame.xi, &frame.xi);
    let gxx = bundle.inner(&rx, &frame.x);
    let gyy = bundle.inner(&ry, &frame.phi_x);
    let kappa = 0.5 * (gxx + gyy);
    let mu = (gxx - gyy) / (2.0 * frame.lambda);
    let upsilon = bundle.inner(&rx, &frame.phi_x) / frame.lambda;
    let residual = nullity_residual(bundle, frame, inputs, kappa, mu, upsilon);
    NullityTriple {
        kappa,
        mu,
        upsilon,
        residual,
    }
}

/// (κ, μ, υ) at `p` from the curvature of the structure's metric.
pub fn extract_kmv(s: &ContactMetricStructure, p: &Point) -> Result<NullityTriple, KmvError> {
    let bundle = CurvatureBundle::new(&s.g, p)?;
    let frame = contact::h_frame(s, p)?;
    Ok(extract_with_frame(
        &bundle,
        &frame,
        &NullityInputs::at(s, p)?,
    ))
}

/// I_M = (1 − μ/2)/√(1 − κ).
pub fn boeckx_invariant(kappa: f64, mu: f64) -> Result<f64, KmvError> {
    if !(kappa < 1.0) {
        return Err(KmvError::KappaNotBelowOne(kappa));
    }
    Ok((1.0 - mu / 2.0) / (1.0 - kappa).sqrt())
}

/// Where κ, μ, υ, λ came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldSource {
    ClosedForm,
    Extracted,
}

/// κ, μ, υ with gradients and λ with its Hessian at a point.
#[derive(Clone, Copy, Debug)]
pub struct NullityJets {
    pub kappa: Dual,
    pub mu: Dual,
    pub upsilon: Dual,
    pub lambda: SecondJet,
    pub source: FieldSource,
}

impl NullityJets {
    pub fn at(s: &ContactMetricStructure, p: &Point) -> Result<Self, KmvError> {
        match s.closed_forms() {
            Some(cf) => Ok(NullityJets {
                kappa: cf.kappa.eval_dual(p)?,
                mu: cf.mu.eval_dual(p)?,
                upsilon: Dual::constant(cf.upsilon),
                lambda: SecondJet::of(&cf.lambda, p)?,
                source: FieldSource::ClosedForm,
            }),
            None => Self::extracted(s, p),
        }
    }

    fn extracted(s: &ContactMetricStructure, p: &Point) -> Result<Self, KmvError> {
        let center = extract_kmv(s, p)?;
        let lam = contact::h_frame_jet(s, p)?.lambda;
        let mut kappa = Dual::constant(center.kappa);
        let mut mu = Dual::constant(center.mu);
        let mut upsilon = Dual::constant(center.upsilon);
        let mut hessian = [[0.0; 3]; 3];
        for axis in Axis::ALL {
            let i = axis.index();
            let fwd = p.shifted(axis, FD_STEP);
            let bwd = p.shifted(axis, -FD_STEP);
            let tf = extract_kmv(s, &fwd)?;
            let tb = extract_kmv(s, &bwd)?;
            kappa.d[i] = (tf.kappa - tb.kappa) / (2.0 * FD_STEP);
            mu.d[i] = (tf.mu - tb.mu) / (2.0 * FD_STEP);
            if !s.upsilon_constant() {
                upsilon.d[i] = (tf.upsilon - tb.upsilon) / (2.0 * FD_STEP);
            }
            let lf = contact::h_frame_jet(s, &fwd)?.lambda;
            let lb = contact::h_frame_jet(s, &bwd)?.lambda;
            for j in 0..3 {
                hessian[j][i] = (lf.d[j] - lb.d[j]) / (2.0 * FD_STEP);
            }
        }
        // Symmetrize the difference-quotient Hessian.
        for i in 0..3 {
            for j in (i + 1)..3 {
                let m = 0.5 * (hessian[i][j] + hessian[j][i]);
                hessian[i][j] = m;
                hessian[j][i] = m;
            }
        }
        Ok(NullityJets {
            kappa,
            mu,
            upsilon,
            lambda: SecondJet {
                value: lam.v,
                gradient: lam.d,
                hessian,
            },
            source: FieldSource::Extracted,
        })
    }

    pub fn tolerance(&self) -> f64 {
        match self.source {
            FieldSource::ClosedForm => IDENTITY_TOL,
            FieldSource::Extracted => FD_TOL,
        }
    }
}

/// All pointwise objects the identity checks consume, computed once.
pub struct PointAnalysis<'a> {
    pub structure: &'a ContactMetricStructure,
    pub point: Point,
    pub bundle: CurvatureBundle,
    pub inputs: NullityInputs,
    pub phi_jet: Mat3<Dual>,
    pub frame_jet: FrameJet,
    pub frame: HFrame,
    pub fields: NullityJets,
}

impl<'a> PointAnalysis<'a> {
    pub fn new(s: &'a ContactMetricStructure, p: &Point) -> Result<Self, KmvError> {
        let bundle = CurvatureBundle::new(&s.g, p)?;
        let frame_jet = contact::h_frame_jet(s, p)?;
        let fields = NullityJets::at(s, p)?;
        let x = jet::values(&frame_jet.x);
        let phi_x = jet::values(&frame_jet.phi_x);
        let grad_lambda = fields.lambda.gradient;
        let frame = HFrame {
            point: *p,
            xi: jet::values(&frame_jet.xi),
            x,
            phi_x,
            lambda: frame_jet.lambda.v,
            a: jet::dot(&x, &grad_lambda),
            b: jet::dot(&phi_x, &grad_lambda),
            c: fields.upsilon.directional(&x),
            d: fields.upsilon.directional(&phi_x),
        };
        Ok(PointAnalysis {
            structure: s,
            point: *p,
            bundle,
            inputs: NullityInputs::at(s, p)?,
            phi_jet: s.phi_jet(p)?,
            frame_jet,
            frame,
            fields,
        })
    }

    pub fn tolerance(&self) -> f64 {
        self.fields.tolerance()
    }

    pub fn extract(&self) -> NullityTriple {
        extract_with_frame(&self.bundle, &self.frame, &self.inputs)
    }

    /// Nullity residual with the structure's own κ, μ, υ.
    pub fn nullity(&self) -> f64 {
        nullity_residual(
            &self.bundle,
            &self.frame,
            &self.inputs,
            self.fields.kappa.v,
            self.fields.mu.v,
            self.fields.upsilon.v,
        )
    }

    fn lambda(&self) -> f64 {
        self.fields.lambda.value
    }

    /// Largest frame component of a vector.
    fn vmax(&self, v: &[f64; 3]) -> f64 {
        self.frame.vectors().iter().fold(0.0_f64, |acc, e| {
            nan_max(acc, self.bundle.inner(v, e).abs())
        })
    }

    /// Largest frame matrix entry g(E_a, M E_b) of an operator.
    fn op_max(&self, m: &[[f64; 3]; 3]) -> f64 {
        let e = self.frame.vectors();
        let mut worst = 0.0_f64;
        for a in &e {
            for b in &e {
                worst = nan_max(worst, self.bundle.inner(a, &jet::mat_vec(m, b)).abs());
            }
        }
        worst
    }

    fn combo(terms: &[(f64, &[f64; 3])]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, v) in terms {
            for i in 0..3 {
                out[i] += k * v[i];
            }
        }
        out
    }

    fn nabla(&self, v: &[f64; 3], w: &Vec3<Dual>) -> [f64; 3] {
        self.bundle.covariant(v, w)
    }

    /// A = Xλ and B = φXλ as jets.
    fn ab_jets(&self) -> (Dual, Dual) {
        let dl = self.fields.lambda.gradient_jet();
        let a = (0..3).fold(Dual::constant(0.0), |acc, i| {
            acc + self.frame_jet.x[i] * dl[i]
        });
        let b = (0..3).fold(Dual::constant(0.0), |acc, i| {
            acc + self.frame_jet.phi_x[i] * dl[i]
        });
        (a, b)
    }

    fn raise(&self, d: &[f64; 3]) -> [f64; 3] {
        self.bundle.raise(d)
    }

    /// Identities every contact metric structure satisfies: the algebra of h
    /// and ∇ξ = −φ − φh.
    pub fn structure_residuals(&self) -> PointResiduals {
        let h = &self.inputs.h;
        let phi = &self.inputs.phi;
        let xi = &self.frame.xi;
        let hphi = jet::mat_mul(h, phi);
        let phih = jet::mat_mul(phi, h);
        let mut anti = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                anti[i][j] = hphi[i][j] + phih[i][j];
            }
        }
        let mut out = PointResiduals::at(self.point);
        out.insert("trace_h", (h[0][0] + h[1][1] + h[2][2]).abs());
        out.insert("trace_phi_h", (phih[0][0] + phih[1][1] + phih[2][2]).abs());
        out.insert("h_anticommutes_phi", self.op_max(&anti));
        out.insert("h_xi", self.vmax(&jet::mat_vec(h, xi)));
        let eta_h: Vec<f64> = (0..3)
            .map(|j| (0..3).map(|i| self.inputs.eta[i] * h[i][j]).sum())
            .collect();
        out.insert("eta_h", jet::max_abs(&eta_h));
        // h symmetric with respect to g
        let gh = jet::mat_mul(&self.bundle.metric, h);
        let mut sym = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                sym[i][j] = gh[i][j] - gh[j][i];
            }
        }
        out.insert("h_symmetric", jet::max_abs_mat(&sym));
        let mut nabla_xi = 0.0_f64;
        for v in self.frame.vectors() {
            let lhs = self.nabla(&v, &self.frame_jet.xi);
            let pv = jet::mat_vec(phi, &v);
            let phv = jet::mat_vec(&phih, &v);
            nabla_xi = nan_max(
                nabla_xi,
                self.vmax(&Self::combo(&[(1.0, &lhs), (1.0, &pv), (1.0, &phv)])),
            );
        }
        out.insert("nabla_xi", nabla_xi);
        out
    }

    /// h² = (κ−1)φ², ξ(κ) = 2υ(κ−1), Qξ = 2κξ and
    /// Q = (τ/2−κ)I + (−τ/2+3κ)η⊗ξ + μh + υφh.
    pub fn lemma1(&self) -> PointResiduals {
        let kappa = self.fields.kappa.v;
        let mu = self.fields.mu.v;
        let ups = self.fields.upsilon.v;
        let h = &self.inputs.h;
        let phi = &self.inputs.phi;
        let eta = &self.inputs.eta;
        let xi = &self.frame.xi;
        let q = &self.bundle.ricci_operator;
        let tau = self.bundle.scalar;

        let h2 = jet::mat_mul(h, h);
        let phi2 = jet::mat_mul(phi, phi);
        let phih = jet::mat_mul(phi, h);
        let mut hsq = [[0.0; 3]; 3];
        let mut ricci_q = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                hsq[i][j] = h2[i][j] - (kappa - 1.0) * phi2[i][j];
                let id = if i == j { 1.0 } else { 0.0 };
                let model = (tau / 2.0 - kappa) * id
                    + (-tau / 2.0 + 3.0 * kappa) * xi[i] * eta[j]
                    + mu * h[i][j]
                    + ups * phih[i][j];
                ricci_q[i][j] = q[i][j] - model;
            }
        }
        let q_xi = jet::mat_vec(q, xi);
        let mut out = PointResiduals::at(self.point);
        out.insert("hsq", self.op_max(&hsq));
        out.insert(
            "zetak",
            (self.fields.kappa.directional(xi) - 2.0 * ups * (kappa - 1.0)).abs(),
        );
        out.insert(
            "ricci_xi",
            self.vmax(&Self::combo(&[(1.0, &q_xi), (-2.0 * kappa, xi)])),
        );
        out.insert("ricci_q", self.op_max(&ricci_q));
        out
    }

    /// Connection, bracket and derivative relations of the h-frame.
    pub fn lemma2(&self) -> PointResiduals {
        let lam = self.frame.lambda;
        let mu = self.fields.mu.v;
        let ups = self.fields.upsilon.v;
        let HFrame { a, b, c, d, .. } = self.frame;
        let (xi, x, y) = (&self.frame.xi, &self.frame.x, &self.frame.phi_x);
        let fj = &self.frame_jet;
        let mut out = PointResiduals::at(self.point);

        let n = |v: &[f64; 3], w: &Vec3<Dual>| self.nabla(v, w);
        let r = |name: &str, v: [f64; 3], out: &mut PointResiduals| out.insert(name, self.vmax(&v));

        r(
            "eq1_x",
            Self::combo(&[(1.0, &n(x, &fj.xi)), (lam + 1.0, y)]),
            &mut out,
        );
        r(
            "eq1_phix",
            Self::combo(&[(1.0, &n(y, &fj.xi)), (-(1.0 - lam), x)]),
            &mut out,
        );
        r(
            "eq2_x",
            Self::combo(&[(1.0, &n(xi, &fj.x)), (mu / 2.0, y)]),
            &mut out,
        );
        r(
            "eq2_phix",
            Self::combo(&[(1.0, &n(xi, &fj.phi_x)), (-mu / 2.0, x)]),
            &mut out,
        );
        r(
            "eq3_x",
            Self::combo(&[(1.0, &n(x, &fj.x)), (-b / (2.0 * lam), y)]),
            &mut out,
        );
        r(
            "eq3_phix",
            Self::combo(&[(1.0, &n(y, &fj.phi_x)), (-a / (2.0 * lam), x)]),
            &mut out,
        );
        r(
            "eq4_phix_x",
            Self::combo(&[
                (1.0, &n(y, &fj.x)),
                (a / (2.0 * lam), y),
                (-(lam - 1.0), xi),
            ]),
            &mut out,
        );
        r(
            "eq4_x_phix",
            Self::combo(&[
                (1.0, &n(x, &fj.phi_x)),
                (b / (2.0 * lam), x),
                (-(lam + 1.0), xi),
            ]),
            &mut out,
        );
        let bxi_x = tensor_calc::bracket_at(&fj.xi, &fj.x);
        let bxi_y = tensor_calc::bracket_at(&fj.xi, &fj.phi_x);
        let bx_y = tensor_calc::bracket_at(&fj.x, &fj.phi_x);
        r(
            "eq5_x",
            Self::combo(&[(1.0, &bxi_x), (-(1.0 + lam - mu / 2.0), y)]),
            &mut out,
        );
        r(
            "eq5_phix",
            Self::combo(&[(1.0, &bxi_y), (-(lam - 1.0 + mu / 2.0), x)]),
            &mut out,
        );
        r(
            "eq6",
            Self::combo(&[
                (1.0, &bx_y),
                (b / (2.0 * lam), x),
                (-a / (2.0 * lam), y),
                (-2.0, xi),
            ]),
            &mut out,
        );

        let grad_mu = self.raise(&self.fields.mu.d);
        let grad_ups = self.raise(&self.fields.upsilon.d);
        let grad_kappa = self.raise(&self.fields.kappa.d);
        let h_gmu = jet::mat_vec(&self.inputs.h, &grad_mu);
        let phih_gups = jet::mat_vec(&jet::mat_mul(&self.inputs.phi, &self.inputs.h), &grad_ups);
        let xi_kappa = self.fields.kappa.directional(xi);
        r(
            "eq7",
            Self::combo(&[
                (1.0, &h_gmu),
                (1.0, &phih_gups),
                (-1.0, &grad_kappa),
                (xi_kappa, xi),
            ]),
            &mut out,
        );
        out.insert("eq8", (self.fields.mu.directional(x) + 2.0 * a + d).abs());
        out.insert("eq9", (self.fields.mu.directional(y) - 2.0 * b - c).abs());
        let (aj, bj) = self.ab_jets();
        out.insert(
            "eq10",
            (aj.directional(xi) - (1.0 + lam - mu / 2.0) * b - ups * a - lam * c).abs(),
        );
        out.insert(
            "eq11",
            (bj.directional(xi) - (lam - 1.0 + mu / 2.0) * a - ups * b - lam * d).abs(),
        );
        out
    }

    /// Relations specific to constant υ, including [ξ, φ grad λ] = υ(AφX − BX).
    pub fn lemma3(&self) -> Result<PointResiduals, KmvError> {
        if !self.structure.upsilon_constant() {
            return Err(KmvError::UpsilonNotConstant);
        }
        let lam = self.lambda();
        let mu = self.fields.mu.v;
        let ups = self.fields.upsilon.v;
        let HFrame { a, b, .. } = self.frame;
        let (xi, x, y) = (&self.frame.xi, &self.frame.x, &self.frame.phi_x);
        let (aj, bj) = self.ab_jets();
        let mut out = PointResiduals::at(self.point);
        out.insert(
            "zeta_a",
            (aj.directional(xi) - (1.0 + lam - mu / 2.0) * b - ups * a).abs(),
        );
        out.insert(
            "zeta_b",
            (bj.directional(xi) - (lam - 1.0 + mu / 2.0) * a - ups * b).abs(),
        );
        out.insert("x_mu", (self.fields.mu.directional(x) + 2.0 * a).abs());
        out.insert("phix_mu", (self.fields.mu.directional(y) - 2.0 * b).abs());

        let grad = self.raise(&self.fields.lambda.gradient);
        out.insert(
            "grad_lambda",
            self.vmax(&Self::combo(&[
                (1.0, &grad),
                (-a, x),
                (-b, y),
                (-ups * lam, xi),
            ])),
        );
        let phi_grad = match self.phi_grad_lambda_jet() {
            Ok(v) => v,
            Err(_) => {
                out.insert("figrad", f64::NAN);
                return Ok(out);
            }
        };
        let bracket = tensor_calc::bracket_at(&self.frame_jet.xi, &phi_grad);
        out.insert(
            "figrad",
            self.vmax(&Self::combo(&[
                (1.0, &bracket),
                (-ups * a, y),
                (ups * b, x),
            ])),
        );
        Ok(out)
    }

    fn phi_grad_lambda_jet(&self) -> Result<Vec3<Dual>, KmvError> {
        let gj = self.structure.g.eval_jet(&self.point)?;
        let inv = jet::inverse(&gj).ok_or(TensorError::SingularMetric(self.point))?;
        let grad = jet::mat_vec(&inv, &self.fields.lambda.gradient_jet());
        Ok(jet::mat_vec(&self.phi_jet, &grad))
    }

    /// (ξ(I_M), ξ(μ) − υ(μ − 2)).
    pub fn xi_invariant(&self) -> (f64, f64) {
        let one = Dual::constant(1.0);
        let k = self.fields.kappa;
        let m = self.fields.mu;
        let inv = (one - m.scale(0.5)) / (one - k).sqrt();
        let xi = &self.frame.xi;
        let ups = self.fields.upsilon.v;
        (inv.directional(xi), m.directional(xi) - ups * (m.v - 2.0))
    }

    /// Both sides of the scalar-curvature and Laplacian formulas.
    pub fn scalar_curvature_terms(&self) -> ScalarCurvatureTerms {
        let lam = self.lambda();
        let ups = self.fields.upsilon.v;
        let kappa = self.fields.kappa.v;
        let mu = self.fields.mu.v;
        let laplacian = self.bundle.laplacian_of(&self.fields.lambda);
        let grad = self.raise(&self.fields.lambda.gradient);
        let grad_sq = jet::dot(&grad, &self.fields.lambda.gradient);
        let (aj, bj) = self.ab_jets();
        let (a, b) = (aj.v, bj.v);
        let horizontal_sq = a * a + b * b;
        ScalarCurvatureTerms {
            tau: self.bundle.scalar,
            tau_formula: (laplacian - ups * ups * lam) / lam - horizontal_sq / (lam * lam)
                + 2.0 * (kappa - mu),
            tau_full_gradient: (laplacian - ups * ups * lam) / lam - grad_sq / (lam * lam)
                + 2.0 * (kappa - mu),
            laplacian,
            laplacian_frame: aj.directional(&self.frame.x)
                + bj.directional(&self.frame.phi_x)
                + ups * ups * lam
                - horizontal_sq / (2.0 * lam),
            upsilon: ups,
        }
    }

    /// (|τ − τ_formula|, |Δλ − Δλ_frame|), see [`ScalarCurvatureTerms`].
    pub fn scalar_curvature(&self) -> (f64, f64) {
        let t = self.scalar_curvature_terms();
        (
            (t.tau - t.tau_formula).abs(),
            (t.laplacian - t.laplacian_frame).abs(),
        )
    }
}

/// Scalar curvature of a constant-υ structure against its λ-formula.
///
/// With grad λ = AX + BφX + υλξ the formula reads
/// τ = (Δλ − υ²λ)/λ − (A² + B²)/λ² + 2(κ − μ) = Δλ/λ − ‖grad λ‖²/λ² + 2(κ − μ).
/// Putting the full ‖grad λ‖² in place of A² + B² in the first form
/// (`tau_full_gradient`) undercounts τ by exactly υ².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarCurvatureTerms {
    pub tau: f64,
    pub tau_formula: f64,
    pub tau_full_gradient: f64,
    /// Δλ from the Levi-Civita connection.
    pub laplacian: f64,
    /// X(A) + φX(B) + υ²λ − (A² + B²)/(2λ).
    pub laplacian_frame: f64,
    pub upsilon: f64,
}

/// h², ξ(κ), Qξ and Q identity residuals at one point.
pub fn lemma1_residuals(s: &ContactMetricStructure, p: &Point) -> Result<IdentityReport, KmvError> {
    let pa = PointAnalysis::new(s, p)?;
    Ok(IdentityReport::from_samples(pa.tolerance(), &[pa.lemma1()]))
}

/// Frame connection and bracket identity residuals at one point.
pub fn lemma2_residuals(s: &ContactMetricStructure, p: &Point) -> Result<IdentityReport, KmvError> {
    let pa = PointAnalysis::new(s, p)?;
    Ok(IdentityReport::from_samples(pa.tolerance(), &[pa.lemma2()]))
}

/// Constant-υ gradient relation residuals at one point.
pub fn lemma3_residuals(s: &ContactMetricStructure, p: &Point) -> Result<IdentityReport, KmvError> {
    if !s.upsilon_constant() {
        return Err(KmvError::UpsilonNotConstant);
    }
    let pa = PointAnalysis::new(s, p)?;
    Ok(IdentityReport::from_samples(
        pa.tolerance(),
        &[pa.lemma3()?],
    ))
}

/// (ξ(I_M), ξ(μ) − υ(μ − 2)) at `p`.
pub fn xi_invariant_residual(
    s: &ContactMetricStructure,
    p: &Point,
) -> Result<(f64, f64), KmvError> {
    Ok(PointAnalysis::new(s, p)?.xi_invariant())
}

/// (|τ − τ_formula|, |Δλ − Δλ_frame|) at `p`.
pub fn scalar_curvature_identity(
    s: &ContactMetricStructure,
    p: &Point,
) -> Result<(f64, f64), KmvError> {
    if !s.upsilon_constant() {
        return Err(KmvError::UpsilonNotConstant);
    }
    Ok(PointAnalysis::new(s, p)?.scalar_curvature())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// μ = 2(1 + √(1 − κ))
    #[serde(rename = "+")]
    Plus,
    /// μ = 2(1 − √(1 − κ))
    #[serde(rename = "-")]
    Minus,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

/// Outcome of [`dichotomy_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyVerdict {
    pub branch: Option<Branch>,
    pub plus_points: usize,
    pub minus_points: usize,
    /// Points matching neither relation.
    pub neither_points: usize,
    /// Points matching both (only possible as λ → 0).
    pub both_points: usize,
    /// Points dropped because no h-frame exists there.
    pub excluded_points: usize,
    /// Largest distance of μ from the chosen branch.
    pub max_branch_deviation: f64,
    pub passed: bool,
}

/// Classifies every point by which of μ = 2(1 ± √(1−κ)) holds for the
/// extracted (κ, μ) and requires one branch throughout.
pub fn dichotomy_check(
    s: &ContactMetricStructure,
    points: &[Point],
    tol: f64,
) -> Result<DichotomyVerdict, KmvError> {
    let mut triples = Vec::with_capacity(points.len());
    let mut excluded = 0;
    for p in points {
        match extract_kmv(s, p) {
            Ok(t) => triples.push(t),
            Err(KmvError::Contact(ContactError::DegenerateFrame { .. })) => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(classify(&triples, excluded, tol))
}

pub(crate) fn classify(triples: &[NullityTriple], excluded: usize, tol: f64) -> DichotomyVerdict {
    let (mut plus, mut minus, mut neither, mut both) = (0, 0, 0, 0);
    let mut dev_plus = 0.0_f64;
    let mut dev_minus = 0.0_f64;
    for t in triples {
        if !(t.kappa < 1.0) {
            neither += 1;
            continue;
        }
        let root = (1.0 - t.kappa).sqrt();
        let dp = (t.mu - 2.0 * (1.0 + root)).abs();
        let dm = (t.mu - 2.0 * (1.0 - root)).abs();
        dev_plus = nan_max(dev_plus, dp);
        dev_minus = nan_max(dev_minus, dm);
        match (dp < tol, dm < tol) {
            (true, true) => both += 1,
            (true, false) => plus += 1,
            (false, true) => minus += 1,
            (false, false) => neither += 1,
        }
    }
    let branch = match (plus > 0, minus > 0) {
        (true, false) => Some(Branch::Plus),
        (false, true) => Some(Branch::Minus),
        _ => None,
    };
    let max_branch_deviation = match branch {
        Some(Branch::Plus) => dev_plus,
        Some(Branch::Minus) => dev_minus,
        None => f64::NAN,
    };
    DichotomyVerdict {
        branch,
        plus_points: plus,
        minus_points: minus,
        neither_points: neither,
        both_points: both,
        excluded_points: excluded,
        max_branch_deviation,
        passed: branch.is_some() && neither == 0 && both == 0,
    }
}

/// Outcome of [`mu_two_exclusion`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuTwoVerdict {
    /// Smallest |μ − 2| seen.
    pub min_margin: f64,
    /// Largest ||μ − 2| − 2λ|.
    pub max_deviation: f64,
    pub passed: bool,
}

/// Checks |μ − 2| = 2λ > tol at every sample point (extracted μ, h-eigenvalue λ).
pub fn mu_two_exclusion(
    s: &ContactMetricStructure,
    points: &[Point],
    tol: f64,
) -> Result<MuTwoVerdict, KmvError> {
    let mut pairs = Vec::with_capacity(points.len());
    for p in points {
        let frame = contact::h_frame(s, p)?;
        let t = extract_kmv(s, p)?;
        pairs.push((t.mu, frame.lambda));
    }
    Ok(mu_two_from(&pairs, tol))
}

pub(crate) fn mu_two_from(pairs: &[(f64, f64)], tol: f64) -> MuTwoVerdict {
    let mut min_margin = f64::INFINITY;
    let mut max_deviation = 0.0_f64;
    for &(mu, lambda) in pairs {
        let margin = (mu - 2.0).abs();
        min_margin = min_margin.min(margin);
        max_deviation = nan_max(max_deviation, (margin - 2.0 * lambda).abs());
    }
    MuTwoVerdict {
        min_margin,
        max_deviation,
        passed: min_margin > tol && max_deviation < tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boeckx_examples() {
        assert_eq!(boeckx_invariant(0.0, 0.0).unwrap(), 1.0);
        // Tangent sphere bundles over constant curvature c: κ = c(2−c), μ = −2c.
        let tsb = |c: f64| boeckx_invariant(c * (2.0 - c), -2.0 * c).unwrap();
        assert_eq!(tsb(-1.0), 0.0);
        assert_eq!(tsb(0.5), 3.0);
        assert_eq!(tsb(3.0), 2.0);
        assert!(matches!(
            boeckx_invariant(1.0, 0.0),
            Err(KmvError::KappaNotBelowOne(_))
        ));
        assert!(boeckx_invariant(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn classify_rejects_branch_mixing() {
        let t = |kappa: f64, mu: f64| NullityTriple {
            kappa,
            mu,
            upsilon: 1.0,
            residual: 0.0,
        };
        let plus = classify(&[t(0.0, 4.0), t(0.75, 3.0)], 0, 1e-6);
        assert_eq!(plus.branch, Some(Branch::Plus));
        assert!(plus.passed);
        let mixed = classify(&[t(0.0, 4.0), t(0.0, 0.0)], 0, 1e-6);
        assert_eq!(mixed.branch, None);
        assert!(!mixed.passed);
        let off = classify(&[t(0.0, 1.0)], 0, 1e-6);
        assert_eq!(off.neither_points, 1);
        assert!(!off.passed);
    }

    #[test]
    fn mu_two_margin() {
        assert!(mu_two_from(&[(4.0, 1.0), (0.0, 1.0)], 1e-6).passed);
        assert!(!mu_two_from(&[(2.0, 0.0)], 1e-6).passed);
        assert!(!mu_two_from(&[(3.0, 1.0)], 1e-6).passed);
    }
}
