//! Smooth functions on a 3-dimensional chart as immutable expression trees.
//!
//! Fields are differentiated symbolically ([`ScalarField::partial`]) so that
//! curvature, which needs second derivatives of the metric, carries only
//! rounding error. Subtrees are shared through `Arc`, so derivative trees are
//! DAGs over the original expression and cloning a field is cheap.
//!
//! Text form (used by configs and the CLI):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := ('-')? atom ('^' integer)?
//! atom   := number | 'x' | 'y' | 'z' | func '(' expr ')' | '(' expr ')'
//! func   := 'exp' | 'sin' | 'cos' | 'ln'
//! ```

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::Dual;

/// Chart coordinate axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    fn name(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// A point of the chart, in coordinates (x, y, z).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const ORIGIN: Point = Point {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    pub fn coord(&self, axis: Axis) -> f64 {
        self.to_array()[axis.index()]
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Point::new(a[0], a[1], a[2])
    }

    /// The point moved by `h` along `axis`.
    pub fn shifted(&self, axis: Axis, h: f64) -> Point {
        let mut a = self.to_array();
        a[axis.index()] += h;
        Point::from_array(a)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FieldError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier '{name}' at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("domain error in `{expr}` at {point}: {reason}")]
    Domain {
        expr: String,
        point: Point,
        reason: String,
    },
}

#[derive(Debug)]
enum Node {
    Const(f64),
    Coord(Axis),
    Add(ScalarField, ScalarField),
    Sub(ScalarField, ScalarField),
    Mul(ScalarField, ScalarField),
    Div(ScalarField, ScalarField),
    Neg(ScalarField),
    Pow(ScalarField, i32),
    Exp(ScalarField),
    Sin(ScalarField),
    Cos(ScalarField),
    Ln(ScalarField),
}

/// Closed-form smooth function of (x, y, z).
#[derive(Clone, Debug)]
pub struct ScalarField(Arc<Node>);

impl ScalarField {
    fn node(n: Node) -> Self {
        ScalarField(Arc::new(n))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn coord(axis: Axis) -> Self {
        Self::node(Node::Coord(axis))
    }

    pub fn x() -> Self {
        Self::coord(Axis::X)
    }

    pub fn y() -> Self {
        Self::coord(Axis::Y)
    }

    pub fn z() -> Self {
        Self::coord(Axis::Z)
    }

    pub fn exp(&self) -> Self {
        Self::node(Node::Exp(self.clone()))
    }

    pub fn sin(&self) -> Self {
        Self::node(Node::Sin(self.clone()))
    }

    pub fn cos(&self) -> Self {
        Self::node(Node::Cos(self.clone()))
    }

    pub fn ln(&self) -> Self {
        Self::node(Node::Ln(self.clone()))
    }

    pub fn powi(&self, n: i32) -> Self {
        Self::node(Node::Pow(self.clone(), n))
    }

    /// The literal value if this node is a constant.
    pub fn as_constant(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    /// Whether the coordinate `axis` occurs anywhere in the tree.
    pub fn depends_on(&self, axis: Axis) -> bool {
        match &*self.0 {
            Node::Const(_) => false,
            Node::Coord(a) => *a == axis,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.depends_on(axis) || b.depends_on(axis)
            }
            Node::Neg(a)
            | Node::Pow(a, _)
            | Node::Exp(a)
            | Node::Sin(a)
            | Node::Cos(a)
            | Node::Ln(a) => a.depends_on(axis),
        }
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        match &*self.0 {
            Node::Const(_) | Node::Coord(_) => 1,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.size() + b.size()
            }
            Node::Neg(a)
            | Node::Pow(a, _)
            | Node::Exp(a)
            | Node::Sin(a)
            | Node::Cos(a)
            | Node::Ln(a) => 1 + a.size(),
        }
    }

    fn domain_error(&self, p: &Point, reason: &str) -> FieldError {
        let mut expr = self.to_string();
        if expr.len() > 160 {
            let cut = (0..=160)
                .rev()
                .find(|&i| expr.is_char_boundary(i))
                .unwrap_or(0);
            expr.truncate(cut);
            expr.push_str("...");
        }
        FieldError::Domain {
            expr,
            point: *p,
            reason: reason.to_string(),
        }
    }

    /// Evaluates the tree at `p`. Division by zero, logarithms of
    /// non-positive numbers and any non-finite intermediate are reported as
    /// [`FieldError::Domain`] naming the offending subexpression.
    pub fn eval(&self, p: &Point) -> Result<f64, FieldError> {
        let v = match &*self.0 {
            Node::Const(c) => *c,
            Node::Coord(a) => p.coord(*a),
            Node::Add(a, b) => a.eval(p)? + b.eval(p)?,
            Node::Sub(a, b) => a.eval(p)? - b.eval(p)?,
            Node::Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Node::Div(a, b) => {
                let num = a.eval(p)?;
                let den = b.eval(p)?;
                if den == 0.0 {
                    return Err(self.domain_error(p, "division by zero"));
                }
                num / den
            }
            Node::Neg(a) => -a.eval(p)?,
            Node::Pow(a, n) => {
                let base = a.eval(p)?;
                if base == 0.0 && *n < 0 {
                    return Err(self.domain_error(p, "negative power of zero"));
                }
                base.powi(*n)
            }
            Node::Exp(a) => a.eval(p)?.exp(),
            Node::Sin(a) => a.eval(p)?.sin(),
            Node::Cos(a) => a.eval(p)?.cos(),
            Node::Ln(a) => {
                let arg = a.eval(p)?;
                if arg <= 0.0 {
                    return Err(self.domain_error(p, "logarithm of a non-positive number"));
                }
                arg.ln()
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.domain_error(p, "non-finite value"))
        }
    }

    /// Value and exact gradient at `p` by forward-mode propagation.
    pub fn eval_dual(&self, p: &Point) -> Result<Dual, FieldError> {
        let v = match &*self.0 {
            Node::Const(c) => Dual::constant(*c),
            Node::Coord(a) => Dual::variable(p.coord(*a), a.index()),
            Node::Add(a, b) => a.eval_dual(p)? + b.eval_dual(p)?,
            Node::Sub(a, b) => a.eval_dual(p)? - b.eval_dual(p)?,
            Node::Mul(a, b) => a.eval_dual(p)? * b.eval_dual(p)?,
            Node::Div(a, b) => {
                let num = a.eval_dual(p)?;
                let den = b.eval_dual(p)?;
                if den.v == 0.0 {
                    return Err(self.domain_error(p, "division by zero"));
                }
                num / den
            }
            Node::Neg(a) => -a.eval_dual(p)?,
            Node::Pow(a, n) => {
                let u = a.eval_dual(p)?;
                if u.v == 0.0 && *n < 0 {
                    return Err(self.domain_error(p, "negative power of zero"));
                }
                let slope = if *n == 0 {
                    0.0
                } else {
                    f64::from(*n) * u.v.powi(n - 1)
                };
                u.chain(u.v.powi(*n), slope)
            }
            Node::Exp(a) => {
                let u = a.eval_dual(p)?;
                let e = u.v.exp();
                u.chain(e, e)
            }
            Node::Sin(a) => {
                let u = a.eval_dual(p)?;
                u.chain(u.v.sin(), u.v.cos())
            }
            Node::Cos(a) => {
                let u = a.eval_dual(p)?;
                u.chain(u.v.cos(), -u.v.sin())
            }
            Node::Ln(a) => {
                let u = a.eval_dual(p)?;
                if u.v <= 0.0 {
                    return Err(self.domain_error(p, "logarithm of a non-positive number"));
                }
                u.chain(u.v.ln(), 1.0 / u.v)
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.domain_error(p, "non-finite value"))
        }
    }

    /// Exact partial derivative along `axis`, as a new tree.
    ///
    /// Structural zeros are folded while building (a derivative of a
    /// constant is the literal `0`), nothing else is simplified.
    pub fn partial(&self, axis: Axis) -> ScalarField {
        match &*self.0 {
            Node::Const(_) => ScalarField::zero(),
            Node::Coord(a) => ScalarField::constant(if *a == axis { 1.0 } else { 0.0 }),
            Node::Add(a, b) => s_add(&a.partial(axis), &b.partial(axis)),
            Node::Sub(a, b) => s_sub(&a.partial(axis), &b.partial(axis)),
            Node::Mul(a, b) => s_add(&s_mul(&a.partial(axis), b), &s_mul(a, &b.partial(axis))),
            Node::Div(a, b) => {
                let da = a.partial(axis);
                let db = b.partial(axis);
                if db.is_zero() {
                    s_div(&da, b)
                } else {
                    let num = s_sub(&s_mul(&da, b), &s_mul(a, &db));
                    s_div(&num, &b.powi(2))
                }
            }
            Node::Neg(a) => s_neg(&a.partial(axis)),
            Node::Pow(a, n) => {
                let da = a.partial(axis);
                match *n {
                    0 => ScalarField::zero(),
                    1 => da,
                    _ => s_mul(
                        &s_mul(&ScalarField::constant(f64::from(*n)), &a.powi(n - 1)),
                        &da,
                    ),
                }
            }
            Node::Exp(a) => s_mul(self, &a.partial(axis)),
            Node::Sin(a) => s_mul(&a.cos(), &a.partial(axis)),
            Node::Cos(a) => s_neg(&s_mul(&a.sin(), &a.partial(axis))),
            Node::Ln(a) => s_div(&a.partial(axis), a),
        }
    }

    /// Partial derivatives along several axes in order.
    pub fn partials(&self, axes: &[Axis]) -> ScalarField {
        axes.iter().fold(self.clone(), |f, &a| f.partial(a))
    }
}

/// Folds two constants when the result is finite, so that domain errors
/// stay attached to the expression that raises them.
fn fold(a: &ScalarField, b: &ScalarField, op: fn(f64, f64) -> f64) -> Option<ScalarField> {
    let v = op(a.as_constant()?, b.as_constant()?);
    v.is_finite().then(|| ScalarField::constant(v))
}

fn s_add(a: &ScalarField, b: &ScalarField) -> ScalarField {
    if let Some(c) = fold(a, b, |x, y| x + y) {
        c
    } else if a.is_zero() {
        b.clone()
    } else if b.is_zero() {
        a.clone()
    } else {
        ScalarField::node(Node::Add(a.clone(), b.clone()))
    }
}

fn s_sub(a: &ScalarField, b: &ScalarField) -> ScalarField {
    if let Some(c) = fold(a, b, |x, y| x - y) {
        c
    } else if b.is_zero() {
        a.clone()
    } else if a.is_zero() {
        s_neg(b)
    } else {
        ScalarField::node(Node::Sub(a.clone(), b.clone()))
    }
}

fn s_mul(a: &ScalarField, b: &ScalarField) -> ScalarField {
    if let Some(c) = fold(a, b, |x, y| x * y) {
        c
    } else if a.is_zero() || b.is_zero() {
        ScalarField::zero()
    } else if a.as_constant() == Some(1.0) {
        b.clone()
    } else if b.as_constant() == Some(1.0) {
        a.clone()
    } else {
        ScalarField::node(Node::Mul(a.clone(), b.clone()))
    }
}

fn s_div(a: &ScalarField, b: &ScalarField) -> ScalarField {
    if let Some(c) = fold(a, b, |x, y| x / y) {
        c
    } else if a.is_zero() && !b.is_zero() {
        ScalarField::zero()
    } else if b.as_constant() == Some(1.0) {
        a.clone()
    } else {
        ScalarField::node(Node::Div(a.clone(), b.clone()))
    }
}

fn s_neg(a: &ScalarField) -> ScalarField {
    if let Some(c) = a.as_constant() {
        ScalarField::constant(-c)
    } else {
        ScalarField::node(Node::Neg(a.clone()))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $build:ident) => {
        impl $tr<ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                $build(&self, &rhs)
            }
        }
        impl $tr<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                $build(self, rhs)
            }
        }
        impl $tr<&ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                $build(&self, rhs)
            }
        }
        impl $tr<ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                $build(self, &rhs)
            }
        }
        impl $tr<f64> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: f64) -> ScalarField {
                $build(&self, &ScalarField::constant(rhs))
            }
        }
        impl $tr<f64> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: f64) -> ScalarField {
                $build(self, &ScalarField::constant(rhs))
            }
        }
        impl $tr<ScalarField> for f64 {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                $build(&ScalarField::constant(self), &rhs)
            }
        }
        impl $tr<&ScalarField> for f64 {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                $build(&ScalarField::constant(self), rhs)
            }
        }
    };
}

binop!(Add, add, s_add);
binop!(Sub, sub, s_sub);
binop!(Mul, mul, s_mul);
binop!(Div, div, s_div);

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        s_neg(&self)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        s_neg(self)
    }
}

impl From<f64> for ScalarField {
    fn from(c: f64) -> Self {
        ScalarField::constant(c)
    }
}

// Printing is fully parenthesized so that the output always re-parses to the
// same tree.
impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "(-{})", -c)
            }
            Node::Const(c) => write!(f, "{}", c),
            Node::Coord(a) => write!(f, "{}", a.name()),
            Node::Add(a, b) => write!(f, "({} + {})", a, b),
            Node::Sub(a, b) => write!(f, "({} - {})", a, b),
            Node::Mul(a, b) => write!(f, "({} * {})", a, b),
            Node::Div(a, b) => write!(f, "({} / {})", a, b),
            Node::Neg(a) => write!(f, "(-({}))", a),
            Node::Pow(a, n) => write!(f, "(({})^{})", a, n),
            Node::Exp(a) => write!(f, "exp({})", a),
            Node::Sin(a) => write!(f, "sin({})", a),
            Node::Cos(a) => write!(f, "cos({})", a),
            Node::Ln(a) => write!(f, "ln({})", a),
        }
    }
}

impl FromStr for ScalarField {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_field(s)
    }
}

impl Serialize for ScalarField {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ScalarField {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_field(&text).map_err(serde::de::Error::custom)
    }
}

/// Parses the expression grammar documented at module level.
pub fn parse_field(text: &str) -> Result<ScalarField, FieldError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.syntax("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, message: &str) -> FieldError {
        FieldError::Syntax {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), FieldError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<ScalarField, FieldError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ScalarField, FieldError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc * self.factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = acc / self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ScalarField, FieldError> {
        let negate = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.integer()?;
            base = base.powi(n);
        }
        Ok(if negate { -base } else { base })
    }

    fn integer(&mut self) -> Result<i32, FieldError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        digits.parse::<i32>().map_err(|_| FieldError::Syntax {
            pos: start,
            message: "expected an integer exponent".to_string(),
        })
    }

    fn atom(&mut self) -> Result<ScalarField, FieldError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match name {
                    "x" => Ok(ScalarField::x()),
                    "y" => Ok(ScalarField::y()),
                    "z" => Ok(ScalarField::z()),
                    "exp" | "sin" | "cos" | "ln" => {
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Ok(match name {
                            "exp" => arg.exp(),
                            "sin" => arg.sin(),
                            "cos" => arg.cos(),
                            _ => arg.ln(),
                        })
                    }
                    _ => Err(FieldError::UnknownIdentifier {
                        pos: start,
                        name: name.to_string(),
                    }),
                }
            }
            Some(c) => Err(self.syntax(&format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<ScalarField, FieldError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                digits(self);
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(ScalarField::constant(v)),
            _ => Err(FieldError::Syntax {
                pos: start,
                message: format!("invalid number '{}'", text),
            }),
        }
    }
}
