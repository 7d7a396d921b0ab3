//! The h-frame (ξ, X, φX) and the (κ, μ, υ) triple solved from curvature,
//! compared with the closed forms and the Boeckx invariant.

use kmv::contact;
use kmv::families::{build_family, FamilyParams, Variant};
use kmv::kmv_analysis::{boeckx_invariant, extract_kmv};
use kmv::scalar_field::{parse_field, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut params = FamilyParams::simple(Variant::II, 1.0);
    params.f = parse_field("z")?;
    params.r = parse_field("exp(z/2)")?;
    let s = build_family(&params)?;
    let cf = s.closed_forms().expect("closed forms");

    for p in [
        Point::ORIGIN,
        Point::new(0.5, -0.2, 0.8),
        Point::new(-0.7, 0.9, -0.4),
    ] {
        let frame = contact::h_frame(&s, &p)?;
        let t = extract_kmv(&s, &p)?;
        println!("at {p}");
        println!(
            "  X = {:?}, φX = {:?}, λ = {:.9}",
            frame.x, frame.phi_x, frame.lambda
        );
        println!("  A = Xλ = {:.3e}, B = φXλ = {:.6}", frame.a, frame.b);
        println!(
            "  extracted κ = {:.12}, μ = {:.12}, υ = {:.12} (residual {:.1e})",
            t.kappa, t.mu, t.upsilon, t.residual
        );
        println!(
            "  closed    κ = {:.12}, μ = {:.12}",
            cf.kappa.eval(&p)?,
            cf.mu.eval(&p)?
        );
        println!(
            "  Boeckx invariant = {:.12}",
            boeckx_invariant(t.kappa, t.mu)?
        );
    }
    Ok(())
}
