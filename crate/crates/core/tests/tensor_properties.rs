#![allow(clippy::needless_range_loop)]

mod common;

use kmv::jet::Dual;
use kmv::scalar_field::{parse_field, Axis, Point};
use kmv::tensor_calc::{self, CurvatureBundle, SecondJet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point() -> impl Strategy<Value = Point> {
    (-0.9..0.9f64, -0.9..0.9f64, -0.9..0.9f64).prop_map(|(x, y, z)| Point::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn connection_is_metric_and_torsion_free(seed in any::<u64>(), p in point()) {
        let g = common::random_metric(&mut ChaCha8Rng::seed_from_u64(seed), 2);
        let c = CurvatureBundle::new(&g, &p).unwrap();
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!((c.christoffel[k][i][j] - c.christoffel[k][j][i]).abs() < 1e-12);
                    // ∂_k g_ij = Γ^l_ki g_lj + Γ^l_kj g_il
                    let dg = g.component(i, j).partial(Axis::from_index(k)).eval(&p).unwrap();
                    let rhs: f64 = (0..3)
                        .map(|l| c.christoffel[l][k][i] * c.metric[l][j] + c.christoffel[l][k][j] * c.metric[i][l])
                        .sum();
                    prop_assert!((dg - rhs).abs() < 1e-10, "∇g ≠ 0: {} vs {}", dg, rhs);
                }
            }
        }
    }

    #[test]
    fn curvature_symmetries(seed in any::<u64>(), p in point()) {
        let g = common::random_metric(&mut ChaCha8Rng::seed_from_u64(seed), 2);
        let c = CurvatureBundle::new(&g, &p).unwrap();
        let r = &c.riemann;
        let lowered = |a: usize, b: usize, i: usize, j: usize| -> f64 {
            (0..3).map(|m| c.metric[a][m] * r[m][b][i][j]).sum()
        };
        let scale = 1.0 + r.iter().flatten().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-10 * scale;
        for l in 0..3 {
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        prop_assert!((r[l][k][i][j] + r[l][k][j][i]).abs() < tol);
                        let bianchi = r[l][k][i][j] + r[l][i][j][k] + r[l][j][k][i];
                        prop_assert!(bianchi.abs() < tol, "first Bianchi {}", bianchi);
                        prop_assert!((lowered(l, k, i, j) + lowered(k, l, i, j)).abs() < tol);
                        prop_assert!((lowered(l, k, i, j) - lowered(i, j, l, k)).abs() < tol);
                    }
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((c.ricci[i][j] - c.ricci[j][i]).abs() < tol);
            }
        }
        let trace: f64 = (0..3).map(|i| c.ricci_operator[i][i]).sum();
        prop_assert!((trace - c.scalar).abs() < tol);
    }

    #[test]
    fn laplacian_is_divergence_of_gradient(seed in any::<u64>(), p in point()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_metric(&mut rng, 1);
        let f = parse_field(&common::random_expression(&mut rng, 2)).unwrap();
        let lap = tensor_calc::laplacian(&g, &f, &p).unwrap();
        let grad = tensor_calc::gradient_jet(&g, &SecondJet::of(&f, &p).unwrap(), &p).unwrap();
        let div = tensor_calc::divergence(&g, &grad, &p).unwrap();
        prop_assert!((lap - div).abs() < 1e-9 * (1.0 + lap.abs()), "{} vs {}", lap, div);
    }

    #[test]
    fn bracket_is_antisymmetric_and_matches_symbolic(seed in any::<u64>(), p in point()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut field = || {
            tensor_calc::VectorField::new(std::array::from_fn(|_| parse_field(&common::random_expression(&mut rng, 2)).unwrap()))
        };
        let v = field();
        let w = field();
        let symbolic = tensor_calc::lie_bracket(&v, &w).eval(&p).unwrap();
        let vj = v.eval_jet(&p).unwrap();
        let wj = w.eval_jet(&p).unwrap();
        let numeric = tensor_calc::bracket_at(&vj, &wj);
        let reversed = tensor_calc::bracket_at(&wj, &vj);
        for k in 0..3 {
            prop_assert!((symbolic[k] - numeric[k]).abs() < 1e-11);
            prop_assert_eq!(numeric[k], -reversed[k]);
        }
    }
}

#[test]
fn covariant_derivative_of_gradient_is_symmetric() {
    // g(∇_V grad f, W) = Hess f(V, W) is symmetric in V and W.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = common::random_metric(&mut rng, 2);
    let f = parse_field("sin(x*y) + z^3").unwrap();
    let p = Point::new(0.2, -0.3, 0.5);
    let c = CurvatureBundle::new(&g, &p).unwrap();
    let grad: [Dual; 3] =
        tensor_calc::gradient_jet(&g, &SecondJet::of(&f, &p).unwrap(), &p).unwrap();
    let e = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for a in &e {
        for b in &e {
            let hab = c.inner(&c.covariant(a, &grad), b);
            let hba = c.inner(&c.covariant(b, &grad), a);
            assert!((hab - hba).abs() < 1e-12);
        }
    }
}

#[test]
fn generator_produces_curved_metrics() {
    let g = common::random_metric(&mut ChaCha8Rng::seed_from_u64(1), 2);
    let c = CurvatureBundle::new(&g, &Point::new(0.1, 0.2, 0.3)).unwrap();
    let size = g.component(0, 1).size();
    assert!(size > 5, "{}", g.component(0, 1));
    assert!(c
        .riemann
        .iter()
        .flatten()
        .flatten()
        .flatten()
        .any(|v| v.abs() > 1e-3));
}
