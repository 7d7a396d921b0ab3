//! Coordinate tensor calculus on a 3-chart.
//!
//! Conventions, fixed throughout the crate:
//!
//! * `Γ[k][i][j] = Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`
//! * `R(U,V)W = ∇_U∇_V W − ∇_V∇_U W − ∇_{[U,V]}W`, stored as
//!   `R[l][k][i][j] = R^l_{kij}` with `R(∂_i,∂_j)∂_k = R^l_{kij} ∂_l`
//! * `Ric(V,W) = trace(Z ↦ R(Z,V)W)`, `Q = g⁻¹ Ric`, `τ = trace Q`
//!
//! Field-valued objects (vector fields, one-forms, metrics) are trees of
//! [`ScalarField`]s; pointwise objects (Christoffel symbols, curvature) are
//! plain arrays computed on demand at one point.

use thiserror::Error;

use crate::jet::{self, Dual, Mat3, Vec3};
use crate::scalar_field::{Axis, FieldError, Point, ScalarField};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TensorError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("metric is singular at {0}")]
    SingularMetric(Point),
    #[error("metric is not positive definite at {0}")]
    NotPositiveDefinite(Point),
    #[error("metric components ({0},{1}) and ({1},{0}) differ")]
    NotSymmetric(usize, usize),
}

/// Vector field in the coordinate basis (∂x, ∂y, ∂z).
#[derive(Clone, Debug)]
pub struct VectorField {
    pub components: [ScalarField; 3],
}

impl VectorField {
    pub fn new(components: [ScalarField; 3]) -> Self {
        VectorField { components }
    }

    /// The coordinate vector field ∂_axis.
    pub fn coordinate(axis: Axis) -> Self {
        let mut c = [
            ScalarField::zero(),
            ScalarField::zero(),
            ScalarField::zero(),
        ];
        c[axis.index()] = ScalarField::one();
        VectorField::new(c)
    }

    pub fn zero() -> Self {
        VectorField::new([
            ScalarField::zero(),
            ScalarField::zero(),
            ScalarField::zero(),
        ])
    }

    pub fn eval(&self, p: &Point) -> Result<[f64; 3], FieldError> {
        Ok([
            self.components[0].eval(p)?,
            self.components[1].eval(p)?,
            self.components[2].eval(p)?,
        ])
    }

    /// Components with their first derivatives at `p`.
    pub fn eval_jet(&self, p: &Point) -> Result<Vec3<Dual>, FieldError> {
        Ok([
            self.components[0].eval_dual(p)?,
            self.components[1].eval_dual(p)?,
            self.components[2].eval_dual(p)?,
        ])
    }

    /// The directional derivative V(f) as a field.
    pub fn apply(&self, f: &ScalarField) -> ScalarField {
        let terms: Vec<ScalarField> = Axis::ALL
            .iter()
            .filter(|a| !self.components[a.index()].is_zero())
            .map(|&a| {
                let df = f.partial(a);
                let c = &self.components[a.index()];
                if c.as_constant() == Some(1.0) {
                    df
                } else {
                    c * df
                }
            })
            .filter(|t| !t.is_zero())
            .collect();
        sum_fields(terms)
    }

    pub fn scaled(&self, k: &ScalarField) -> VectorField {
        VectorField::new(self.components.clone().map(|c| k * c))
    }
}

fn sum_fields(terms: Vec<ScalarField>) -> ScalarField {
    terms
        .into_iter()
        .reduce(|a, b| a + b)
        .unwrap_or_else(ScalarField::zero)
}

/// One-form in the coordinate coframe (dx, dy, dz).
#[derive(Clone, Debug)]
pub struct OneForm {
    pub components: [ScalarField; 3],
}

impl OneForm {
    pub fn new(components: [ScalarField; 3]) -> Self {
        OneForm { components }
    }

    pub fn eval(&self, p: &Point) -> Result<[f64; 3], FieldError> {
        Ok([
            self.components[0].eval(p)?,
            self.components[1].eval(p)?,
            self.components[2].eval(p)?,
        ])
    }

    pub fn eval_jet(&self, p: &Point) -> Result<Vec3<Dual>, FieldError> {
        Ok([
            self.components[0].eval_dual(p)?,
            self.components[1].eval_dual(p)?,
            self.components[2].eval_dual(p)?,
        ])
    }

    /// ω(V) as a field.
    pub fn apply(&self, v: &VectorField) -> ScalarField {
        let terms = (0..3)
            .filter(|&i| !self.components[i].is_zero() && !v.components[i].is_zero())
            .map(|i| &self.components[i] * &v.components[i])
            .collect();
        sum_fields(terms)
    }

    /// The differential df.
    pub fn differential(f: &ScalarField) -> OneForm {
        OneForm::new(Axis::ALL.map(|a| f.partial(a)))
    }
}

/// Antisymmetric coefficients of a 2-form, `ω = Σ_{i<j} ω_ij dx^i ∧ dx^j`.
#[derive(Clone, Debug)]
pub struct TwoForm {
    components: [[ScalarField; 3]; 3],
}

impl TwoForm {
    /// Coefficient `ω_ij` (antisymmetric in i, j).
    pub fn component(&self, i: Axis, j: Axis) -> &ScalarField {
        &self.components[i.index()][j.index()]
    }

    pub fn eval(&self, p: &Point) -> Result<[[f64; 3]; 3], FieldError> {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.components[i][j].eval(p)?;
            }
        }
        Ok(out)
    }
}

/// Raw exterior derivative: `(dω)_ij = ∂_i ω_j − ∂_j ω_i`.
pub fn exterior_derivative(omega: &OneForm) -> TwoForm {
    let components = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if i == j {
                ScalarField::zero()
            } else {
                let a = omega.components[j].partial(Axis::from_index(i));
                let b = omega.components[i].partial(Axis::from_index(j));
                match (a.is_zero(), b.is_zero()) {
                    (true, true) => ScalarField::zero(),
                    (false, true) => a,
                    (true, false) => -b,
                    (false, false) => a - b,
                }
            }
        })
    });
    TwoForm { components }
}

/// Coefficient of dx∧dy∧dz in η∧dη at `p`.
pub fn contact_volume(eta: &OneForm, p: &Point) -> Result<f64, FieldError> {
    let e = eta.eval(p)?;
    let de = exterior_derivative(eta).eval(p)?;
    Ok(e[0] * de[1][2] - e[1] * de[0][2] + e[2] * de[0][1])
}

/// Riemannian metric with precomputed first-derivative trees.
#[derive(Clone, Debug)]
pub struct MetricField {
    components: [[ScalarField; 3]; 3],
    // d[m][i][j] = ∂_m g_ij
    derivatives: [[[ScalarField; 3]; 3]; 3],
}

impl MetricField {
    /// Builds a metric from a symmetric matrix of fields. Off-diagonal pairs
    /// must be the same tree (or print identically).
    pub fn new(components: [[ScalarField; 3]; 3]) -> Result<Self, TensorError> {
        for i in 0..3 {
            for j in (i + 1)..3 {
                if components[i][j].to_string() != components[j][i].to_string() {
                    return Err(TensorError::NotSymmetric(i, j));
                }
            }
        }
        let derivatives = Axis::ALL.map(|a| {
            std::array::from_fn(|i| {
                std::array::from_fn(|j| components[i.min(j)][i.max(j)].partial(a))
            })
        });
        Ok(MetricField {
            components,
            derivatives,
        })
    }

    pub fn euclidean() -> Self {
        let c = std::array::from_fn(|i| {
            std::array::from_fn(|j| ScalarField::constant(if i == j { 1.0 } else { 0.0 }))
        });
        MetricField::new(c).expect("identity is symmetric")
    }

    pub fn component(&self, i: usize, j: usize) -> &ScalarField {
        &self.components[i][j]
    }

    pub fn components(&self) -> &[[ScalarField; 3]; 3] {
        &self.components
    }

    pub fn eval(&self, p: &Point) -> Result<[[f64; 3]; 3], FieldError> {
        let mut g = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                g[i][j] = self.components[i][j].eval(p)?;
                g[j][i] = g[i][j];
            }
        }
        Ok(g)
    }

    pub fn eval_jet(&self, p: &Point) -> Result<Mat3<Dual>, FieldError> {
        let mut g = jet::zero_mat();
        for i in 0..3 {
            for j in i..3 {
                g[i][j] = self.components[i][j].eval_dual(p)?;
                g[j][i] = g[i][j];
            }
        }
        Ok(g)
    }

    /// g(V, W) as a field.
    pub fn apply(&self, v: &VectorField, w: &VectorField) -> ScalarField {
        let mut terms = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if !self.components[i][j].is_zero()
                    && !v.components[i].is_zero()
                    && !w.components[j].is_zero()
                {
                    terms.push(&self.components[i][j] * &v.components[i] * &w.components[j]);
                }
            }
        }
        sum_fields(terms)
    }

    /// Inverse at `p` after checking positive definiteness through the
    /// leading principal minors.
    pub fn inverse_at(&self, p: &Point) -> Result<[[f64; 3]; 3], TensorError> {
        let g = self.eval(p)?;
        check_positive_definite(&g, p)?;
        jet::inverse(&g).ok_or(TensorError::SingularMetric(*p))
    }

    /// g and its first and second derivatives at `p`.
    fn second_jet(&self, p: &Point) -> Result<MetricJet, TensorError> {
        let g = self.eval(p)?;
        check_positive_definite(&g, p)?;
        let inv = jet::inverse(&g).ok_or(TensorError::SingularMetric(*p))?;
        let mut dg = [[[0.0; 3]; 3]; 3];
        let mut ddg = [[[[0.0; 3]; 3]; 3]; 3];
        for m in 0..3 {
            for i in 0..3 {
                for j in i..3 {
                    let d = self.derivatives[m][i][j].eval_dual(p)?;
                    dg[m][i][j] = d.v;
                    dg[m][j][i] = d.v;
                    for n in 0..3 {
                        ddg[n][m][i][j] = d.d[n];
                        ddg[n][m][j][i] = d.d[n];
                    }
                }
            }
        }
        Ok(MetricJet { g, inv, dg, ddg })
    }
}

fn check_positive_definite(g: &[[f64; 3]; 3], p: &Point) -> Result<(), TensorError> {
    let m1 = g[0][0];
    let m2 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let m3 = jet::det(g);
    if m1 > 0.0 && m2 > 0.0 && m3 > 0.0 {
        Ok(())
    } else if m3 == 0.0 {
        Err(TensorError::SingularMetric(*p))
    } else {
        Err(TensorError::NotPositiveDefinite(*p))
    }
}

struct MetricJet {
    g: [[f64; 3]; 3],
    inv: [[f64; 3]; 3],
    dg: [[[f64; 3]; 3]; 3],
    // ddg[n][m][i][j] = ∂_n ∂_m g_ij
    ddg: [[[[f64; 3]; 3]; 3]; 3],
}

pub type Christoffel = [[[f64; 3]; 3]; 3];
pub type Riemann = [[[[f64; 3]; 3]; 3]; 3];

/// Levi-Civita connection and curvature of a metric at one point.
#[derive(Clone, Debug)]
pub struct CurvatureBundle {
    pub point: Point,
    pub metric: [[f64; 3]; 3],
    pub inverse: [[f64; 3]; 3],
    /// `christoffel[k][i][j] = Γ^k_{ij}`.
    pub christoffel: Christoffel,
    /// `riemann[l][k][i][j] = R^l_{kij}`.
    pub riemann: Riemann,
    /// `ricci[v][w] = Ric(∂_v, ∂_w)`.
    pub ricci: [[f64; 3]; 3],
    /// Ricci operator Q (index raised with g⁻¹).
    pub ricci_operator: [[f64; 3]; 3],
    pub scalar: f64,
}

impl CurvatureBundle {
    pub fn new(g: &MetricField, p: &Point) -> Result<Self, TensorError> {
        let MetricJet {
            g: gm,
            inv,
            dg,
            ddg,
        } = g.second_jet(p)?;

        // s[i][j][l] = ∂_i g_jl + ∂_j g_il − ∂_l g_ij and its derivatives.
        let mut s = [[[0.0; 3]; 3]; 3];
        let mut ds = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    s[i][j][l] = dg[i][j][l] + dg[j][i][l] - dg[l][i][j];
                    for m in 0..3 {
                        ds[m][i][j][l] = ddg[m][i][j][l] + ddg[m][j][i][l] - ddg[m][l][i][j];
                    }
                }
            }
        }
        // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
        let mut dinv = [[[0.0; 3]; 3]; 3];
        for m in 0..3 {
            let t = jet::mat_mul(&jet::mat_mul(&inv, &dg[m]), &inv);
            for k in 0..3 {
                for l in 0..3 {
                    dinv[m][k][l] = -t[k][l];
                }
            }
        }
        let mut gamma = [[[0.0; 3]; 3]; 3];
        let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut acc = 0.0;
                    for l in 0..3 {
                        acc += inv[k][l] * s[i][j][l];
                    }
                    gamma[k][i][j] = 0.5 * acc;
                    for m in 0..3 {
                        let mut dacc = 0.0;
                        for l in 0..3 {
                            dacc += dinv[m][k][l] * s[i][j][l] + inv[k][l] * ds[m][i][j][l];
                        }
                        dgamma[m][k][i][j] = 0.5 * dacc;
                    }
                }
            }
        }
        let mut riemann = [[[[0.0; 3]; 3]; 3]; 3];
        for l in 0..3 {
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let mut r = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                        for m in 0..3 {
                            r += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                        }
                        riemann[l][k][i][j] = r;
                    }
                }
            }
        }
        let mut ricci = [[0.0; 3]; 3];
        for v in 0..3 {
            for w in 0..3 {
                ricci[v][w] = (0..3).map(|i| riemann[i][w][i][v]).sum();
            }
        }
        let ricci_operator = jet::mat_mul(&inv, &ricci);
        let scalar = (0..3).map(|i| ricci_operator[i][i]).sum();
        Ok(CurvatureBundle {
            point: *p,
            metric: gm,
            inverse: inv,
            christoffel: gamma,
            riemann,
            ricci,
            ricci_operator,
            scalar,
        })
    }

    pub fn inner(&self, u: &[f64; 3], v: &[f64; 3]) -> f64 {
        jet::inner(&self.metric, u, v)
    }

    pub fn norm(&self, u: &[f64; 3]) -> f64 {
        self.inner(u, u).max(0.0).sqrt()
    }

    /// `R(u, v)w` at the point.
    pub fn curvature(&self, u: &[f64; 3], v: &[f64; 3], w: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (l, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..3 {
                if w[k] == 0.0 {
                    continue;
                }
                for i in 0..3 {
                    for j in 0..3 {
                        acc += self.riemann[l][k][i][j] * u[i] * v[j] * w[k];
                    }
                }
            }
            *o = acc;
        }
        out
    }

    /// `(∇_v W)` at the point, where `w` carries W's components and their
    /// first derivatives.
    pub fn covariant(&self, v: &[f64; 3], w: &Vec3<Dual>) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = w[k].directional(v);
            for i in 0..3 {
                for j in 0..3 {
                    acc += self.christoffel[k][i][j] * v[i] * w[j].v;
                }
            }
            *o = acc;
        }
        out
    }

    /// `g⁻¹ df` for a covector given by its components.
    pub fn raise(&self, df: &[f64; 3]) -> [f64; 3] {
        jet::mat_vec(&self.inverse, df)
    }

    /// `g^{ij}(∂_i∂_j f − Γ^k_{ij} ∂_k f)` from a second jet of f.
    pub fn laplacian_of(&self, f: &SecondJet) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let mut t = f.hessian[i][j];
                for k in 0..3 {
                    t -= self.christoffel[k][i][j] * f.gradient[k];
                }
                acc += self.inverse[i][j] * t;
            }
        }
        acc
    }
}

/// Value, gradient and Hessian of a scalar at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondJet {
    pub value: f64,
    pub gradient: [f64; 3],
    pub hessian: [[f64; 3]; 3],
}

impl SecondJet {
    pub fn of(f: &ScalarField, p: &Point) -> Result<Self, FieldError> {
        let value = f.eval(p)?;
        let mut gradient = [0.0; 3];
        let mut hessian = [[0.0; 3]; 3];
        for a in Axis::ALL {
            let d = f.partial(a).eval_dual(p)?;
            gradient[a.index()] = d.v;
            hessian[a.index()] = d.d;
        }
        Ok(SecondJet {
            value,
            gradient,
            hessian,
        })
    }

    /// The gradient as a vector of first jets (∂_i f with its derivatives).
    pub fn gradient_jet(&self) -> Vec3<Dual> {
        std::array::from_fn(|i| Dual {
            v: self.gradient[i],
            d: self.hessian[i],
        })
    }

    pub fn as_dual(&self) -> Dual {
        Dual {
            v: self.value,
            d: self.gradient,
        }
    }
}

pub fn christoffel(g: &MetricField, p: &Point) -> Result<Christoffel, TensorError> {
    Ok(CurvatureBundle::new(g, p)?.christoffel)
}

pub fn riemann(g: &MetricField, p: &Point) -> Result<Riemann, TensorError> {
    Ok(CurvatureBundle::new(g, p)?.riemann)
}

/// Ricci operator Q and scalar curvature τ at `p`.
pub fn ricci_and_scalar(g: &MetricField, p: &Point) -> Result<([[f64; 3]; 3], f64), TensorError> {
    let b = CurvatureBundle::new(g, p)?;
    Ok((b.ricci_operator, b.scalar))
}

/// `[V, W]^k = V^i ∂_i W^k − W^i ∂_i V^k`.
pub fn lie_bracket(v: &VectorField, w: &VectorField) -> VectorField {
    VectorField::new(std::array::from_fn(|k| {
        let a = v.apply(&w.components[k]);
        let b = w.apply(&v.components[k]);
        match (a.is_zero(), b.is_zero()) {
            (true, true) => ScalarField::zero(),
            (false, true) => a,
            (true, false) => -b,
            (false, false) => a - b,
        }
    }))
}

/// Lie bracket at a point from first jets of both fields.
pub fn bracket_at(v: &Vec3<Dual>, w: &Vec3<Dual>) -> [f64; 3] {
    let vv = jet::values(v);
    let wv = jet::values(w);
    std::array::from_fn(|k| w[k].directional(&vv) - v[k].directional(&wv))
}

pub fn covariant_derivative(
    g: &MetricField,
    v: &VectorField,
    w: &VectorField,
    p: &Point,
) -> Result<[f64; 3], TensorError> {
    let b = CurvatureBundle::new(g, p)?;
    Ok(b.covariant(&v.eval(p)?, &w.eval_jet(p)?))
}

pub fn gradient(g: &MetricField, f: &ScalarField, p: &Point) -> Result<[f64; 3], TensorError> {
    let inv = g.inverse_at(p)?;
    let df = f.eval_dual(p)?.d;
    Ok(jet::mat_vec(&inv, &df))
}

/// The gradient as a jet (components and their first derivatives).
pub fn gradient_jet(g: &MetricField, f: &SecondJet, p: &Point) -> Result<Vec3<Dual>, TensorError> {
    g.inverse_at(p)?;
    let gj = g.eval_jet(p)?;
    let inv = jet::inverse(&gj).ok_or(TensorError::SingularMetric(*p))?;
    Ok(jet::mat_vec(&inv, &f.gradient_jet()))
}

pub fn laplacian(g: &MetricField, f: &ScalarField, p: &Point) -> Result<f64, TensorError> {
    let b = CurvatureBundle::new(g, p)?;
    Ok(b.laplacian_of(&SecondJet::of(f, p)?))
}

/// Riemannian divergence `∂_i V^i + V^i ∂_i ln √det g`, computed from the
/// metric derivatives directly (no Christoffel symbols).
pub fn divergence(g: &MetricField, v: &Vec3<Dual>, p: &Point) -> Result<f64, TensorError> {
    let gj = g.eval_jet(p)?;
    let d = jet::det(&gj);
    if d.v <= 0.0 {
        return Err(TensorError::NotPositiveDefinite(*p));
    }
    let mut acc = 0.0;
    for i in 0..3 {
        acc += v[i].d[i] + v[i].v * 0.5 * d.d[i] / d.v;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_field::parse_field;

    fn metric(entries: [[&str; 3]; 3]) -> MetricField {
        MetricField::new(entries.map(|r| r.map(|e| parse_field(e).unwrap()))).unwrap()
    }

    fn hyperbolic() -> MetricField {
        metric([
            ["exp(2*z)", "0", "0"],
            ["0", "exp(2*z)", "0"],
            ["0", "0", "1"],
        ])
    }

    #[test]
    fn flat_metric_has_no_connection_or_curvature() {
        let b =
            CurvatureBundle::new(&MetricField::euclidean(), &Point::new(0.3, -1.0, 2.0)).unwrap();
        assert!(b.christoffel.iter().flatten().flatten().all(|&c| c == 0.0));
        assert!(b
            .riemann
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .all(|&c| c == 0.0));
        assert_eq!(b.scalar, 0.0);
    }

    #[test]
    fn warped_metric_christoffel_by_hand() {
        // g = diag(1, 1, e^{2x}): Γ^z_{xz} = 1, Γ^x_{zz} = −e^{2x}.
        let g = metric([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "exp(2*x)"]]);
        for p in [Point::ORIGIN, Point::new(0.7, 2.0, -1.0)] {
            let gamma = christoffel(&g, &p).unwrap();
            assert!((gamma[2][0][2] - 1.0).abs() < 1e-14);
            assert!((gamma[2][2][0] - 1.0).abs() < 1e-14);
            assert!((gamma[0][2][2] + (2.0 * p.x).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_space_has_constant_curvature_minus_one() {
        let g = hyperbolic();
        let p = Point::new(0.1, 0.2, -0.4);
        let b = CurvatureBundle::new(&g, &p).unwrap();
        let e: [[f64; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }));
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let r = b.curvature(&e[i], &e[j], &e[j]);
                let k = b.inner(&r, &e[i]) / (b.inner(&e[i], &e[i]) * b.inner(&e[j], &e[j]));
                assert!((k + 1.0).abs() < 1e-12, "K({i},{j}) = {k}");
            }
        }
        assert!((b.scalar + 6.0).abs() < 1e-12);
    }

    #[test]
    fn bracket_examples() {
        let b = lie_bracket(
            &VectorField::coordinate(Axis::X),
            &VectorField::coordinate(Axis::Y),
        );
        assert!(b.components.iter().all(ScalarField::is_zero));
        // [∂x, x ∂y] = ∂y
        let v = VectorField::new([ScalarField::zero(), ScalarField::x(), ScalarField::zero()]);
        let b = lie_bracket(&VectorField::coordinate(Axis::X), &v);
        assert_eq!(b.eval(&Point::new(3.0, 1.0, 1.0)).unwrap(), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn covariant_derivative_of_constant_field_in_flat_space() {
        let w = VectorField::new([1.0.into(), 2.0.into(), (-3.0).into()]);
        let d = covariant_derivative(
            &MetricField::euclidean(),
            &VectorField::coordinate(Axis::X),
            &w,
            &Point::ORIGIN,
        )
        .unwrap();
        assert_eq!(d, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn gradient_and_laplacian_examples() {
        let flat = MetricField::euclidean();
        let g = gradient(
            &flat,
            &parse_field("x^2").unwrap(),
            &Point::new(1.0, 0.0, 0.0),
        )
        .unwrap();
        assert_eq!(g, [2.0, 0.0, 0.0]);
        let c = gradient(
            &hyperbolic(),
            &ScalarField::constant(4.0),
            &Point::new(1.0, 1.0, 1.0),
        )
        .unwrap();
        assert_eq!(c, [0.0, 0.0, 0.0]);
        let p = Point::new(0.4, -0.1, 2.0);
        assert_eq!(
            laplacian(&flat, &parse_field("x^2 + y^2 + z^2").unwrap(), &p).unwrap(),
            6.0
        );
        assert_eq!(
            laplacian(&flat, &parse_field("x*y").unwrap(), &p).unwrap(),
            0.0
        );
    }

    #[test]
    fn exterior_derivative_examples() {
        let f = parse_field("sin(x*y) + z^3*exp(x)").unwrap();
        let d2 = exterior_derivative(&OneForm::differential(&f));
        let vals = d2.eval(&Point::new(0.2, 0.5, -1.3)).unwrap();
        assert!(jet::max_abs_mat(&vals) < 1e-14);

        let omega = OneForm::new([ScalarField::zero(), ScalarField::x(), ScalarField::zero()]);
        let d = exterior_derivative(&omega);
        assert_eq!(
            d.component(Axis::X, Axis::Y).eval(&Point::ORIGIN).unwrap(),
            1.0
        );
        assert_eq!(
            d.component(Axis::Y, Axis::X).eval(&Point::ORIGIN).unwrap(),
            -1.0
        );

        let eta = OneForm::new([
            1.0.into(),
            ScalarField::zero(),
            parse_field("-(2*y + sin(z))").unwrap(),
        ]);
        for p in [Point::ORIGIN, Point::new(1.0, -2.0, 0.5)] {
            assert_eq!(contact_volume(&eta, &p).unwrap(), -2.0);
        }
    }

    #[test]
    fn asymmetric_metric_rejected() {
        let r = MetricField::new(
            [["1", "x", "0"], ["0", "1", "0"], ["0", "0", "1"]]
                .map(|r| r.map(|e| parse_field(e).unwrap())),
        );
        assert!(matches!(r, Err(TensorError::NotSymmetric(0, 1))));
    }

    #[test]
    fn indefinite_metric_rejected() {
        let g = metric([["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1"]]);
        assert!(matches!(
            CurvatureBundle::new(&g, &Point::ORIGIN),
            Err(TensorError::NotPositiveDefinite(_))
        ));
        let s = metric([["1", "0", "0"], ["0", "x", "0"], ["0", "0", "1"]]);
        assert!(matches!(
            gradient(&s, &ScalarField::x(), &Point::ORIGIN),
            Err(TensorError::SingularMetric(_))
        ));
    }
}
