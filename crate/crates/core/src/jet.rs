//! First-order jets (forward-mode dual numbers over the three chart
//! coordinates) and the small generic 3×3 linear algebra shared by the
//! pointwise geometry code.
//!
//! Every pointwise routine that later needs derivatives of its output
//! (h-frames, gradients raised by the metric, the Boeckx invariant) is written
//! once against [`Real`] and run either on plain `f64` or on [`Dual`].

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Scalar type the generic pointwise code is written against.
pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    fn from_f64(v: f64) -> Self;
    /// Underlying value with any derivative part discarded.
    fn value(self) -> f64;
    fn sqrt(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn scale(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn value(self) -> f64 {
        self
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// A value together with its gradient with respect to (x, y, z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: [f64; 3],
}

impl Dual {
    pub const fn constant(v: f64) -> Self {
        Dual { v, d: [0.0; 3] }
    }

    /// The coordinate function `axis` evaluated at `v`.
    pub fn variable(v: f64, axis: usize) -> Self {
        let mut d = [0.0; 3];
        d[axis] = 1.0;
        Dual { v, d }
    }

    /// Derivative along a coordinate-basis vector.
    pub fn directional(&self, dir: &[f64; 3]) -> f64 {
        self.d[0] * dir[0] + self.d[1] * dir[1] + self.d[2] * dir[2]
    }

    /// Chain rule for a scalar function with value `f` and slope `df` at `self.v`.
    pub fn chain(&self, f: f64, df: f64) -> Dual {
        Dual {
            v: f,
            d: [df * self.d[0], df * self.d[1], df * self.d[2]],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d.iter().all(|c| c.is_finite())
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            d: [self.d[0] + o.d[0], self.d[1] + o.d[1], self.d[2] + o.d[2]],
        }
    }
}

impl AddAssign for Dual {
    fn add_assign(&mut self, o: Dual) {
        *self = *self + o;
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual {
            v: self.v - o.v,
            d: [self.d[0] - o.d[0], self.d[1] - o.d[1], self.d[2] - o.d[2]],
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: [
                self.d[0] * o.v + self.v * o.d[0],
                self.d[1] * o.v + self.v * o.d[1],
                self.d[2] * o.v + self.v * o.d[2],
            ],
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let q = self.v / o.v;
        Dual {
            v: q,
            d: [
                (self.d[0] - q * o.d[0]) / o.v,
                (self.d[1] - q * o.d[1]) / o.v,
                (self.d[2] - q * o.d[2]) / o.v,
            ],
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            v: -self.v,
            d: [-self.d[0], -self.d[1], -self.d[2]],
        }
    }
}

impl Real for Dual {
    fn from_f64(v: f64) -> Self {
        Dual::constant(v)
    }

    fn value(self) -> f64 {
        self.v
    }

    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s)
    }
}

pub type Vec3<T> = [T; 3];
pub type Mat3<T> = [[T; 3]; 3];

pub fn zero_vec<T: Real>() -> Vec3<T> {
    [T::zero(); 3]
}

pub fn zero_mat<T: Real>() -> Mat3<T> {
    [[T::zero(); 3]; 3]
}

pub fn identity<T: Real>() -> Mat3<T> {
    let mut m = zero_mat();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub fn mat_vec<T: Real>(m: &Mat3<T>, v: &Vec3<T>) -> Vec3<T> {
    let mut out = zero_vec();
    for i in 0..3 {
        for j in 0..3 {
            out[i] += m[i][j] * v[j];
        }
    }
    out
}

pub fn mat_mul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = zero_mat();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn transpose<T: Real>(m: &Mat3<T>) -> Mat3<T> {
    let mut out = *m;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[j][i];
        }
    }
    out
}

pub fn dot<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// g(u, v) for a bilinear form given by its coordinate matrix.
pub fn inner<T: Real>(g: &Mat3<T>, u: &Vec3<T>, v: &Vec3<T>) -> T {
    dot(u, &mat_vec(g, v))
}

pub fn det<T: Real>(m: &Mat3<T>) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Inverse via the adjugate. `None` when the determinant is not safely
/// nonzero relative to the entry scale.
pub fn inverse<T: Real>(m: &Mat3<T>) -> Option<Mat3<T>> {
    let d = det(m);
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |acc, e| acc.max(e.value().abs()));
    if !(d.value().abs() > 1e-14 * scale.powi(3)) || !d.value().is_finite() {
        return None;
    }
    let c =
        |r0: usize, c0: usize, r1: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [c(1, 1, 2, 2), -c(0, 1, 2, 2), c(0, 1, 1, 2)],
        [-c(1, 0, 2, 2), c(0, 0, 2, 2), -c(0, 0, 1, 2)],
        [c(1, 0, 2, 1), -c(0, 0, 2, 1), c(0, 0, 1, 1)],
    ];
    let mut inv = zero_mat();
    for i in 0..3 {
        for j in 0..3 {
            inv[i][j] = adj[i][j] / d;
        }
    }
    Some(inv)
}

pub fn scale_vec<T: Real>(v: &Vec3<T>, k: T) -> Vec3<T> {
    [v[0] * k, v[1] * k, v[2] * k]
}

pub fn add_vec<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub_vec<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Plain values of a vector of jets.
pub fn values(v: &Vec3<Dual>) -> [f64; 3] {
    [v[0].v, v[1].v, v[2].v]
}

pub fn mat_values(m: &Mat3<Dual>) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[i][j].v;
        }
    }
    out
}

/// Jacobian `J[k][i] = ∂_i v^k` of a jet vector.
pub fn jacobian(v: &Vec3<Dual>) -> [[f64; 3]; 3] {
    [v[0].d, v[1].d, v[2].d]
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()))
}

pub fn max_abs_mat(m: &[[f64; 3]; 3]) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |acc, c| acc.max(c.abs()))
}
