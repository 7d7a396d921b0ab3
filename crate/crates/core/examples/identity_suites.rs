//! Every identity of a (κ, μ, υ = const) structure evaluated at one point:
//! the h-algebra, Ricci operator, connection and bracket tables, the
//! constant-υ relations and the scalar-curvature formula.

use kmv::families::{build_family, FamilyParams, Variant};
use kmv::kmv_analysis::PointAnalysis;
use kmv::scalar_field::{parse_field, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut params = FamilyParams::simple(Variant::I, 3.0);
    params.f = parse_field("sin(z)")?;
    params.r = parse_field("exp(z/2)")?;
    let s = build_family(&params)?;
    let p = Point::new(0.25, -0.6, 0.4);
    let pa = PointAnalysis::new(&s, &p)?;

    for (name, r) in [
        ("structure", pa.structure_residuals()),
        ("lemma 1", pa.lemma1()),
        ("lemma 2", pa.lemma2()),
        ("lemma 3", pa.lemma3()?),
    ] {
        println!("{name}:");
        for (k, v) in &r.values {
            println!("  {k:<20} {v:.2e}");
        }
    }

    let (xi_i, xi_mu) = pa.xi_invariant();
    println!("ξ(I_M) = {xi_i:.2e}, ξ(μ) − υ(μ − 2) = {xi_mu:.2e}");

    let t = pa.scalar_curvature_terms();
    println!("τ from curvature       {:.10}", t.tau);
    println!("τ from λ               {:.10}", t.tau_formula);
    println!(
        "full-‖grad λ‖² variant {:.10}  (gap {:.10} = υ²)",
        t.tau_full_gradient,
        t.tau - t.tau_full_gradient
    );
    println!(
        "Δλ connection / frame  {:.10} / {:.10}",
        t.laplacian, t.laplacian_frame
    );
    Ok(())
}
