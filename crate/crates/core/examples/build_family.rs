//! Building both explicit families from chart functions f, r, s and a
//! constant υ, and checking the contact metric axioms on sample points.

use kmv::contact;
use kmv::families::{build_family, FamilyParams, Variant};
use kmv::report::sample_points;
use kmv::scalar_field::{parse_field, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for variant in [Variant::I, Variant::II] {
        let mut params = FamilyParams::simple(variant, -0.5);
        params.f = parse_field("sin(z)")?;
        params.r = parse_field("1 + z^2/4")?;
        params.s = parse_field("z")?;
        let s = build_family(&params)?;

        let p = Point::new(0.1, 0.4, -0.3);
        println!("family {variant} at {p}");
        println!("  g = {:?}", s.g.eval(&p)?);
        println!("  φ = {:?}", s.phi_at(&p)?);
        println!("  h = {:?}", contact::compute_h(&s, &p)?);
        let cf = s.closed_forms().expect("built families carry closed forms");
        println!(
            "  λ = {:.6}, κ = {:.6}, μ = {:.6}, υ = {}",
            cf.lambda.eval(&p)?,
            cf.kappa.eval(&p)?,
            cf.mu.eval(&p)?,
            cf.upsilon
        );

        let pts = sample_points(&params.bounds, 200, 11);
        let check = contact::validate(&s, &pts, 1e-9)?;
        println!(
            "  axioms over {} points: worst {:.2e}, min |η∧dη| {:.3}, passed {}",
            pts.len(),
            check.axioms.worst(),
            check.min_contact_volume,
            check.passed
        );
    }

    let mut bad = FamilyParams::simple(Variant::I, 0.0);
    bad.r = parse_field("z")?;
    if let Err(e) = build_family(&bad) {
        println!("rejected: {e}");
    }
    Ok(())
}
