//! Christoffel symbols, Riemann and Ricci tensors and scalar curvature of a
//! coordinate metric; here the hyperbolic metric e^{2z}(dx² + dy²) + dz².

use kmv::scalar_field::{parse_field, Point};
use kmv::tensor_calc::{self, CurvatureBundle, MetricField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = parse_field("exp(2*z)")?;
    let zero = parse_field("0")?;
    let one = parse_field("1")?;
    let g = MetricField::new([
        [e.clone(), zero.clone(), zero.clone()],
        [zero.clone(), e, zero.clone()],
        [zero.clone(), zero, one],
    ])?;
    let p = Point::new(0.2, -0.4, 0.7);
    let c = CurvatureBundle::new(&g, &p)?;

    println!(
        "Γ^z_xx = {:.12}  (−e^{{2z}} = {:.12})",
        c.christoffel[2][0][0],
        -(1.4_f64).exp()
    );
    println!("Γ^x_xz = {:.12}", c.christoffel[0][0][2]);
    let ex = [1.0, 0.0, 0.0];
    let ez = [0.0, 0.0, 1.0];
    let r = c.curvature(&ex, &ez, &ez);
    let k = c.inner(&r, &ex) / (c.inner(&ex, &ex) * c.inner(&ez, &ez));
    println!("sectional curvature K(∂x, ∂z) = {k:.12}");
    println!(
        "Ricci operator diagonal = {:?}",
        [
            c.ricci_operator[0][0],
            c.ricci_operator[1][1],
            c.ricci_operator[2][2]
        ]
    );
    println!("scalar curvature τ = {:.12}", c.scalar);

    let f = parse_field("x*y + z^2")?;
    println!("grad f = {:?}", tensor_calc::gradient(&g, &f, &p)?);
    println!("Δf     = {:.12}", tensor_calc::laplacian(&g, &f, &p)?);
    Ok(())
}
