//! Structures supplied directly as fields rather than built from a family:
//! a Sasakian one (h = 0, so no h-frame exists), and a family structure
//! stripped of its closed forms so that κ, μ, υ are extracted from
//! curvature and differentiated numerically.

use kmv::contact::{self, Box3, ContactError, ContactMetricStructure, Domain};
use kmv::families::{build_family, FamilyParams, Variant};
use kmv::report::{sample_points, verify_structure};
use kmv::scalar_field::{parse_field, Point};
use kmv::tensor_calc::{MetricField, OneForm, VectorField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = |t: &str| parse_field(t).expect("valid expression");
    let eta = OneForm::new([f("-y/2"), f("0"), f("0.5")]);
    let xi = VectorField::new([f("0"), f("0"), f("2")]);
    let phi = [["0", "1", "0"], ["-1", "0", "0"], ["0", "y", "0"]].map(|r| r.map(f));
    let g = MetricField::new([
        [f("(1 + y^2)/4"), f("0"), f("-y/4")],
        [f("0"), f("0.25"), f("0")],
        [f("-y/4"), f("0"), f("0.25")],
    ])?;
    let sasakian = ContactMetricStructure::new(eta, xi, phi, g, Domain::new(Box3::cube(1.0)));
    let pts = sample_points(&Box3::cube(1.0), 20, 5);
    let check = contact::validate(&sasakian, &pts, 1e-12)?;
    println!("Sasakian axioms pass: {}", check.passed);
    match contact::h_frame(&sasakian, &Point::new(0.1, 0.2, 0.3)) {
        Err(e @ ContactError::DegenerateFrame { .. }) => println!("{e}"),
        other => println!("unexpected: {other:?}"),
    }

    let mut params = FamilyParams::simple(Variant::II, 1.0);
    params.s = parse_field("z")?;
    let bare = build_family(&params)?.without_closed_forms();
    let rep = verify_structure(&bare, &pts, 1e-8)?;
    for (name, suite) in &rep.suites {
        println!(
            "{name:<18} worst {:.2e}  tol {:.0e}",
            suite.worst(),
            suite.tolerance
        );
    }
    println!("passed: {}", rep.passed);
    Ok(())
}
