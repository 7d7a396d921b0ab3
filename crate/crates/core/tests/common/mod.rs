#![allow(dead_code)]

use kmv::families::{build_family, FamilyParams, Variant};
use kmv::scalar_field::{parse_field, ScalarField};
use kmv::tensor_calc::MetricField;
use kmv::ContactMetricStructure;
use rand::Rng;

/// (f, r, s, υ) per parameter set.
pub const PARAMETER_SETS: [(&str, &str, &str, f64); 5] = [
    ("0", "1", "0", 1.0),
    ("z", "1 + z^2/4", "z", -2.0),
    ("sin(z)", "exp(z/2)", "0", 3.0),
    ("0", "1 + z^2/4", "z", -0.5),
    ("z", "exp(z/2)", "z", 1.0),
];

pub fn params(variant: Variant, set: (&str, &str, &str, f64)) -> FamilyParams {
    let (f, r, s, upsilon) = set;
    let mut p = FamilyParams::simple(variant, upsilon);
    p.f = parse_field(f).unwrap();
    p.r = parse_field(r).unwrap();
    p.s = parse_field(s).unwrap();
    p
}

/// Every (variant, set) pair with its built structure.
pub fn all_families() -> Vec<(Variant, usize, FamilyParams, ContactMetricStructure)> {
    let mut out = Vec::new();
    for variant in [Variant::I, Variant::II] {
        for (i, set) in PARAMETER_SETS.iter().enumerate() {
            let p = params(variant, *set);
            let s = build_family(&p).unwrap();
            out.push((variant, i, p, s));
        }
    }
    out
}

/// A random expression from the field grammar, bounded on [−1, 1]³ and
/// defined everywhere there.
pub fn random_expression<R: Rng>(rng: &mut R, depth: u32) -> String {
    let leaf = |rng: &mut R| -> String {
        match rng.gen_range(0..4) {
            0 => format!("{:.3}", rng.gen_range(-1.0..1.0)),
            1 => "x".into(),
            2 => "y".into(),
            _ => "z".into(),
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    let a = random_expression(rng, depth - 1);
    let b = random_expression(rng, depth - 1);
    match rng.gen_range(0..8) {
        0 => format!("({a} + {b})"),
        1 => format!("({a} - {b})"),
        2 => format!("({a} * {b})"),
        3 => format!("({a}) / (2 + cos({b}))"),
        4 => format!("sin({a})"),
        5 => format!("cos({a})"),
        6 => format!("exp(sin({a}))"),
        _ => format!("-({a})^2"),
    }
}

/// A random metric I + ε S with S built from bounded random expressions;
/// |S_ij| ≤ 1 keeps it positive definite for ε < 1/3.
pub fn random_metric<R: Rng>(rng: &mut R, depth: u32) -> MetricField {
    let eps = 0.25;
    let mut entries: Vec<ScalarField> = Vec::new();
    for _ in 0..6 {
        let e = random_expression(rng, depth);
        entries.push(parse_field(&format!("{eps} * sin({e})")).unwrap());
    }
    let idx = |i: usize, j: usize| {
        let (i, j) = (i.min(j), i.max(j));
        [[0, 1, 2], [1, 3, 4], [2, 4, 5]][i][j]
    };
    let comps: [[ScalarField; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let e = entries[idx(i, j)].clone();
            if i == j {
                1.0 + e
            } else {
                e
            }
        })
    });
    MetricField::new(comps).unwrap()
}
