//! Contact metric structures (η, ξ, φ, g) on a chart, their compatibility
//! axioms, the operator h = ½ L_ξ φ and h-frames.
//!
//! The contact pairing uses `dη(V,W) = ½(V η(W) − W η(V) − η([V,W]))`, so
//! the compatibility axiom reads `g(V, φW) = ½(∂_V η_W − ∂_W η_V)` in
//! coordinates. The volume check `η∧dη ≠ 0` uses the raw coefficient from
//! [`crate::tensor_calc::contact_volume`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::{self, Dual, Mat3, Real, Vec3};
use crate::residuals::{IdentityReport, PointResiduals};
use crate::scalar_field::{Axis, FieldError, Point, ScalarField};
use crate::tensor_calc::{self, MetricField, OneForm, TensorError, VectorField};

/// Eigenvalues of h below this are treated as the Sasakian locus.
pub const TOL_DEGENERATE: f64 = 1e-7;

/// Contact volumes below this in absolute value count as vanishing.
pub const MIN_CONTACT_VOLUME: f64 = 1e-6;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ContactError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("point {0} lies outside the structure's domain")]
    OutsideDomain(Point),
    #[error("degenerate h-frame at {point}: largest eigenvalue of h on ker η is {lambda:e} (Sasakian locus)")]
    DegenerateFrame { point: Point, lambda: f64 },
}

/// Closed interval per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Box3 {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
}

impl Box3 {
    pub fn cube(half_width: f64) -> Self {
        let r = [-half_width, half_width];
        Box3 { x: r, y: r, z: r }
    }

    pub fn range(&self, axis: Axis) -> [f64; 2] {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    pub fn is_valid(&self) -> bool {
        Axis::ALL.iter().all(|&a| {
            let [lo, hi] = self.range(a);
            lo.is_finite() && hi.is_finite() && lo < hi
        })
    }

    pub fn contains(&self, p: &Point) -> bool {
        Axis::ALL.iter().all(|&a| {
            let [lo, hi] = self.range(a);
            let c = p.coord(a);
            lo <= c && c <= hi
        })
    }
}

/// Box constraints plus fields that must be strictly positive.
#[derive(Clone, Debug)]
pub struct Domain {
    pub bounds: Box3,
    pub positive: Vec<ScalarField>,
}

impl Domain {
    pub fn new(bounds: Box3) -> Self {
        Domain {
            bounds,
            positive: Vec::new(),
        }
    }

    pub fn with_positive(mut self, f: ScalarField) -> Self {
        self.positive.push(f);
        self
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.bounds.contains(p)
            && self
                .positive
                .iter()
                .all(|f| f.eval(p).is_ok_and(|v| v > 0.0))
    }
}

/// Closed-form companion fields of a structure whose nullity functions are
/// known, e.g. one built by [`crate::families`].
#[derive(Clone, Debug)]
pub struct ClosedForms {
    /// Positive eigenvalue of h, λ = √(1 − κ).
    pub lambda: ScalarField,
    pub kappa: ScalarField,
    pub mu: ScalarField,
    pub upsilon: f64,
    /// h as displayed in closed form, when available.
    pub h: Option<[[ScalarField; 3]; 3]>,
}

/// A contact metric structure on a chart domain.
#[derive(Clone, Debug)]
pub struct ContactMetricStructure {
    pub eta: OneForm,
    pub xi: VectorField,
    /// `phi[i][j]` is the ∂_i-component of φ(∂_j).
    pub phi: [[ScalarField; 3]; 3],
    pub g: MetricField,
    pub domain: Domain,
    h: [[ScalarField; 3]; 3],
    closed_forms: Option<ClosedForms>,
    upsilon_constant: bool,
}

impl ContactMetricStructure {
    pub fn new(
        eta: OneForm,
        xi: VectorField,
        phi: [[ScalarField; 3]; 3],
        g: MetricField,
        domain: Domain,
    ) -> Self {
        let h = half_lie_derivative(&xi, &phi);
        ContactMetricStructure {
            eta,
            xi,
            phi,
            g,
            domain,
            h,
            closed_forms: None,
            upsilon_constant: false,
        }
    }

    /// Attaches closed-form κ, μ, υ, λ; υ is then constant by construction.
    pub fn with_closed_forms(mut self, forms: ClosedForms) -> Self {
        self.closed_forms = Some(forms);
        self.upsilon_constant = true;
        self
    }

    pub fn without_closed_forms(mut self) -> Self {
        self.closed_forms = None;
        self
    }

    /// Declares υ constant for a structure without closed forms.
    pub fn assume_constant_upsilon(mut self, constant: bool) -> Self {
        self.upsilon_constant = constant;
        self
    }

    pub fn closed_forms(&self) -> Option<&ClosedForms> {
        self.closed_forms.as_ref()
    }

    pub fn upsilon_constant(&self) -> bool {
        self.upsilon_constant
    }

    /// h = ½ L_ξ φ as fields.
    pub fn h_field(&self) -> &[[ScalarField; 3]; 3] {
        &self.h
    }

    pub fn phi_at(&self, p: &Point) -> Result<[[f64; 3]; 3], FieldError> {
        eval_matrix(&self.phi, p)
    }

    pub fn phi_jet(&self, p: &Point) -> Result<Mat3<Dual>, FieldError> {
        eval_matrix_jet(&self.phi, p)
    }

    fn ensure_inside(&self, p: &Point) -> Result<(), ContactError> {
        if self.domain.contains(p) {
            Ok(())
        } else {
            Err(ContactError::OutsideDomain(*p))
        }
    }
}

pub(crate) fn eval_matrix(
    m: &[[ScalarField; 3]; 3],
    p: &Point,
) -> Result<[[f64; 3]; 3], FieldError> {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[i][j].eval(p)?;
        }
    }
    Ok(out)
}

pub(crate) fn eval_matrix_jet(
    m: &[[ScalarField; 3]; 3],
    p: &Point,
) -> Result<Mat3<Dual>, FieldError> {
    let mut out = jet::zero_mat();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[i][j].eval_dual(p)?;
        }
    }
    Ok(out)
}

/// `½ (L_ξ φ)^i_j = ½ (ξ(φ^i_j) − φ^k_j ∂_k ξ^i + φ^i_k ∂_j ξ^k)`.
fn half_lie_derivative(xi: &VectorField, phi: &[[ScalarField; 3]; 3]) -> [[ScalarField; 3]; 3] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut terms = Vec::new();
            let t1 = xi.apply(&phi[i][j]);
            if !t1.is_zero() {
                terms.push(t1);
            }
            let column = VectorField::new(std::array::from_fn(|k| phi[k][j].clone()));
            let t2 = column.apply(&xi.components[i]);
            if !t2.is_zero() {
                terms.push(-t2);
            }
            for k in 0..3 {
                let d = xi.components[k].partial(Axis::from_index(j));
                if !d.is_zero() && !phi[i][k].is_zero() {
                    terms.push(&phi[i][k] * d);
                }
            }
            match terms.into_iter().reduce(|a, b| a + b) {
                None => ScalarField::zero(),
                Some(t) => 0.5 * t,
            }
        })
    })
}

/// h = ½ L_ξ φ evaluated at `p`.
pub fn compute_h(s: &ContactMetricStructure, p: &Point) -> Result<[[f64; 3]; 3], ContactError> {
    s.ensure_inside(p)?;
    Ok(eval_matrix(&s.h, p)?)
}

/// Compatibility residuals at one point, without the domain check.
pub fn axiom_residuals(
    s: &ContactMetricStructure,
    p: &Point,
) -> Result<PointResiduals, ContactError> {
    let eta = s.eta.eval(p)?;
    let xi = s.xi.eval(p)?;
    let phi = s.phi_at(p)?;
    let g = s.g.eval(p)?;
    let eta_jet = s.eta.eval_jet(p)?;

    let mut out = PointResiduals::at(*p);
    out.insert("eta_xi", (jet::dot(&eta, &xi) - 1.0).abs());
    out.insert("phi_xi", jet::max_abs(&jet::mat_vec(&phi, &xi)));

    let phi2 = jet::mat_mul(&phi, &phi);
    let mut sq = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { 1.0 } else { 0.0 };
            sq[i][j] = phi2[i][j] + id - xi[i] * eta[j];
        }
    }
    out.insert("phi_squared", jet::max_abs_mat(&sq));

    let g_xi = jet::mat_vec(&g, &xi);
    out.insert("eta_metric_dual", jet::max_abs(&jet::sub_vec(&eta, &g_xi)));

    let compat = jet::mat_mul(&jet::transpose(&phi), &jet::mat_mul(&g, &phi));
    let mut mc = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            mc[i][j] = compat[i][j] - g[i][j] + eta[i] * eta[j];
        }
    }
    out.insert("phi_metric", jet::max_abs_mat(&mc));

    let g_phi = jet::mat_mul(&g, &phi);
    let mut pairing = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let d_eta = 0.5 * (eta_jet[j].d[i] - eta_jet[i].d[j]);
            pairing[i][j] = d_eta - g_phi[i][j];
        }
    }
    out.insert("deta_pairing", jet::max_abs_mat(&pairing));
    Ok(out)
}

/// Result of [`validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub axioms: IdentityReport,
    pub min_contact_volume: f64,
    pub passed: bool,
}

/// Checks the contact metric axioms at every sample point.
pub fn validate(
    s: &ContactMetricStructure,
    points: &[Point],
    tol: f64,
) -> Result<CheckReport, ContactError> {
    let mut samples = Vec::with_capacity(points.len());
    let mut min_volume = f64::INFINITY;
    for p in points {
        s.ensure_inside(p)?;
        samples.push(axiom_residuals(s, p)?);
        min_volume = min_volume.min(tensor_calc::contact_volume(&s.eta, p)?.abs());
    }
    let axioms = IdentityReport::from_samples(tol, &samples);
    let passed = axioms.passed && min_volume > MIN_CONTACT_VOLUME;
    Ok(CheckReport {
        axioms,
        min_contact_volume: min_volume,
        passed,
    })
}

/// An h-frame (ξ, X, φX) at a point with the eigenvalue λ of h on X and the
/// directional derivatives A = Xλ, B = φXλ, C = Xυ, D = φXυ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HFrame {
    pub point: Point,
    pub xi: [f64; 3],
    pub x: [f64; 3],
    pub phi_x: [f64; 3],
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl HFrame {
    /// The same frame with X replaced by −X.
    pub fn flipped(&self) -> HFrame {
        HFrame {
            x: self.x.map(|c| -c),
            phi_x: self.phi_x.map(|c| -c),
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
            ..*self
        }
    }

    pub fn vectors(&self) -> [[f64; 3]; 3] {
        [self.xi, self.x, self.phi_x]
    }
}

/// Frame vectors together with their first derivatives, so that the frame
/// can be differentiated as a local vector field.
#[derive(Clone, Copy, Debug)]
pub struct FrameJet {
    pub xi: Vec3<Dual>,
    pub x: Vec3<Dual>,
    pub phi_x: Vec3<Dual>,
    /// Eigenvalue of h on X, with its gradient.
    pub lambda: Dual,
}

impl FrameJet {
    pub fn flipped(&self) -> FrameJet {
        FrameJet {
            x: self.x.map(|c| -c),
            phi_x: self.phi_x.map(|c| -c),
            ..*self
        }
    }
}

/// Unit eigenvector of h on ker η for its positive eigenvalue, computed
/// through a g-orthonormal basis of ker η and the closed-form 2×2 symmetric
/// eigenproblem. Generic so that it can run on jets.
pub(crate) fn frame_vector<T: Real>(
    g: &Mat3<T>,
    eta: &Vec3<T>,
    xi: &Vec3<T>,
    h: &Mat3<T>,
) -> Option<(Vec3<T>, T)> {
    // Projections of the coordinate vectors onto ker η along ξ.
    let proj: [Vec3<T>; 3] = std::array::from_fn(|k| {
        let mut e = jet::zero_vec::<T>();
        e[k] = T::one();
        jet::sub_vec(&e, &jet::scale_vec(xi, eta[k]))
    });
    let norm = |v: &Vec3<T>| jet::inner(g, v, v).value().max(0.0).sqrt();
    let k1 = (0..3).max_by(|&a, &b| norm(&proj[a]).total_cmp(&norm(&proj[b])))?;
    let n1 = jet::inner(g, &proj[k1], &proj[k1]).sqrt();
    if !(n1.value() > 0.0) {
        return None;
    }
    let e1 = jet::scale_vec(&proj[k1], T::one() / n1);
    let rest: Vec<Vec3<T>> = (0..3)
        .filter(|&k| k != k1)
        .map(|k| {
            let c = jet::inner(g, &proj[k], &e1);
            jet::sub_vec(&proj[k], &jet::scale_vec(&e1, c))
        })
        .collect();
    let w = if norm(&rest[0]) >= norm(&rest[1]) {
        rest[0]
    } else {
        rest[1]
    };
    let n2 = jet::inner(g, &w, &w).sqrt();
    if !(n2.value() > 0.0) {
        return None;
    }
    let e2 = jet::scale_vec(&w, T::one() / n2);

    let he1 = jet::mat_vec(h, &e1);
    let he2 = jet::mat_vec(h, &e2);
    let s11 = jet::inner(g, &e1, &he1);
    let s22 = jet::inner(g, &e2, &he2);
    let s12 = (jet::inner(g, &e1, &he2) + jet::inner(g, &e2, &he1)).scale(0.5);
    let half = (s11 - s22).scale(0.5);
    let disc = (half * half + s12 * s12).sqrt();
    let lambda = (s11 + s22).scale(0.5) + disc;
    let (v1, v2) = if half.value() >= 0.0 {
        (half + disc, s12)
    } else {
        (s12, disc - half)
    };
    let x = jet::add_vec(&jet::scale_vec(&e1, v1), &jet::scale_vec(&e2, v2));
    let nx = jet::inner(g, &x, &x).sqrt();
    if !(nx.value() > 0.0) {
        return None;
    }
    let mut x = jet::scale_vec(&x, T::one() / nx);
    // Orientation: the first non-negligible component of X is positive.
    if let Some(c) = x.iter().find(|c| c.value().abs() > 1e-12) {
        if c.value() < 0.0 {
            x = x.map(|c| -c);
        }
    }
    Some((x, lambda))
}

/// The h-frame with its first derivatives at `p`.
pub fn h_frame_jet(s: &ContactMetricStructure, p: &Point) -> Result<FrameJet, ContactError> {
    s.ensure_inside(p)?;
    let g = s.g.eval_jet(p)?;
    let eta = s.eta.eval_jet(p)?;
    let xi = s.xi.eval_jet(p)?;
    let h = eval_matrix_jet(&s.h, p)?;
    let phi = s.phi_jet(p)?;
    let degenerate = |lambda: f64| ContactError::DegenerateFrame { point: *p, lambda };
    let (x, lambda) = frame_vector(&g, &eta, &xi, &h).ok_or_else(|| degenerate(0.0))?;
    if !(lambda.v > TOL_DEGENERATE) {
        return Err(degenerate(lambda.v));
    }
    let phi_x = jet::mat_vec(&phi, &x);
    Ok(FrameJet {
        xi,
        x,
        phi_x,
        lambda,
    })
}

/// The h-frame at `p`.
///
/// A and B differentiate the closed-form λ when the structure carries one and
/// the eigenvalue field of h otherwise. C and D are zero when υ is known to be
/// constant; [`crate::kmv_analysis`] fills them in from the extracted υ for
/// other structures.
pub fn h_frame(s: &ContactMetricStructure, p: &Point) -> Result<HFrame, ContactError> {
    let fj = h_frame_jet(s, p)?;
    let x = jet::values(&fj.x);
    let phi_x = jet::values(&fj.phi_x);
    let grad_lambda = match s.closed_forms() {
        Some(cf) => cf.lambda.eval_dual(p)?.d,
        None => fj.lambda.d,
    };
    Ok(HFrame {
        point: *p,
        xi: jet::values(&fj.xi),
        x,
        phi_x,
        lambda: fj.lambda.v,
        a: jet::dot(&x, &grad_lambda),
        b: jet::dot(&phi_x, &grad_lambda),
        c: 0.0,
        d: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_field::parse_field;

    fn f(s: &str) -> ScalarField {
        parse_field(s).unwrap()
    }

    /// Left-invariant Sasakian structure on the Heisenberg group.
    fn heisenberg() -> ContactMetricStructure {
        let eta = OneForm::new([f("-y/2"), f("0"), f("0.5")]);
        let xi = VectorField::new([f("0"), f("0"), f("2")]);
        let phi = [["0", "1", "0"], ["-1", "0", "0"], ["0", "y", "0"]].map(|r| r.map(f));
        let gyz = f("-y/4");
        let g = MetricField::new([
            [f("(1 + y^2)/4"), f("0"), gyz.clone()],
            [f("0"), f("0.25"), f("0")],
            [gyz, f("0"), f("0.25")],
        ])
        .unwrap();
        ContactMetricStructure::new(eta, xi, phi, g, Domain::new(Box3::cube(2.0)))
    }

    #[test]
    fn sasakian_structure_is_contact_metric_with_vanishing_h() {
        let s = heisenberg();
        let pts = [
            Point::ORIGIN,
            Point::new(0.5, -1.2, 0.3),
            Point::new(-1.0, 1.9, 1.0),
        ];
        let rep = validate(&s, &pts, 1e-12).unwrap();
        assert!(rep.passed, "{:?}", rep);
        for p in &pts {
            assert_eq!(compute_h(&s, p).unwrap(), [[0.0; 3]; 3]);
        }
    }

    #[test]
    fn sasakian_point_has_no_h_frame() {
        let s = heisenberg();
        assert!(matches!(
            h_frame(&s, &Point::new(0.1, 0.2, 0.3)),
            Err(ContactError::DegenerateFrame { .. })
        ));
    }

    #[test]
    fn points_outside_domain_are_rejected() {
        let s = heisenberg();
        let far = Point::new(3.0, 0.0, 0.0);
        assert!(matches!(
            validate(&s, &[far], 1e-9),
            Err(ContactError::OutsideDomain(_))
        ));
        assert!(matches!(
            compute_h(&s, &far),
            Err(ContactError::OutsideDomain(_))
        ));
    }

    #[test]
    fn frame_vector_diagonalizes_symmetric_operator() {
        // Euclidean metric, ξ = ∂z, h = diag-like operator on the xy-plane.
        let g = jet::identity::<f64>();
        let eta = [0.0, 0.0, 1.0];
        let xi = [0.0, 0.0, 1.0];
        let h = [[0.6, 0.8, 0.0], [0.8, -0.6, 0.0], [0.0, 0.0, 0.0]];
        let (x, lambda) = frame_vector(&g, &eta, &xi, &h).unwrap();
        assert!((lambda - 1.0).abs() < 1e-15);
        let hx = jet::mat_vec(&h, &x);
        for i in 0..3 {
            assert!((hx[i] - lambda * x[i]).abs() < 1e-15);
        }
        assert!(x[0] > 0.0);
    }
}
