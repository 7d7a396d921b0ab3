mod common;

use kmv::scalar_field::{parse_field, Axis, Point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn expression() -> impl Strategy<Value = String> {
    (any::<u64>(), 1u32..4).prop_map(|(seed, depth)| {
        common::random_expression(&mut ChaCha8Rng::seed_from_u64(seed), depth)
    })
}

fn point() -> impl Strategy<Value = Point> {
    (-0.9..0.9f64, -0.9..0.9f64, -0.9..0.9f64).prop_map(|(x, y, z)| Point::new(x, y, z))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mixed_partials_commute(e in expression(), p in point()) {
        let f = parse_field(&e).unwrap();
        for (a, b) in [(Axis::X, Axis::Y), (Axis::X, Axis::Z), (Axis::Y, Axis::Z)] {
            let ab = f.partials(&[a, b]).eval(&p).unwrap();
            let ba = f.partials(&[b, a]).eval(&p).unwrap();
            prop_assert!(close(ab, ba, 1e-12), "{}: {} vs {}", e, ab, ba);
        }
    }

    #[test]
    fn partial_matches_central_difference(e in expression(), p in point()) {
        let f = parse_field(&e).unwrap();
        let h = 1e-5;
        for axis in Axis::ALL {
            let exact = f.partial(axis).eval(&p).unwrap();
            let fd = (f.eval(&p.shifted(axis, h)).unwrap() - f.eval(&p.shifted(axis, -h)).unwrap()) / (2.0 * h);
            prop_assert!(close(exact, fd, 1e-6), "{} along {:?}: {} vs {}", e, axis, exact, fd);
        }
    }

    #[test]
    fn forward_mode_matches_symbolic(e in expression(), p in point()) {
        let f = parse_field(&e).unwrap();
        let d = f.eval_dual(&p).unwrap();
        prop_assert_eq!(d.v, f.eval(&p).unwrap());
        for axis in Axis::ALL {
            prop_assert!(close(d.d[axis.index()], f.partial(axis).eval(&p).unwrap(), 1e-13));
        }
    }

    #[test]
    fn printing_round_trips(e in expression(), p in point()) {
        let f = parse_field(&e).unwrap();
        let g = parse_field(&f.to_string()).unwrap();
        prop_assert_eq!(f.eval(&p).unwrap(), g.eval(&p).unwrap());
        prop_assert_eq!(f.to_string(), g.to_string());
    }
}
