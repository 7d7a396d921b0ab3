//! Parsing, evaluating and differentiating chart functions.

use kmv::scalar_field::{parse_field, Axis, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse_field("exp(2*x) * sin(z) + y^3 / (1 + z^2)")?;
    let p = Point::new(0.3, -0.5, 1.2);
    println!("f          = {f}");
    println!("f(p)       = {:.12}", f.eval(&p)?);

    for axis in Axis::ALL {
        let d = f.partial(axis);
        println!(
            "∂f/∂{axis:?}     = {:.12}    ({} nodes)",
            d.eval(&p)?,
            d.size()
        );
    }
    let mixed = f.partials(&[Axis::X, Axis::Z]);
    println!("∂²f/∂x∂z   = {:.12}", mixed.eval(&p)?);

    // Forward mode gives the same gradient without building derivative trees.
    let jet = f.eval_dual(&p)?;
    println!("dual grad  = {:?}", jet.d);

    println!(
        "depends on y: {}, on x only through exp: {}",
        f.depends_on(Axis::Y),
        !f.partial(Axis::X).depends_on(Axis::Y)
    );

    match parse_field("ln(x)")?.eval(&Point::ORIGIN) {
        Ok(v) => println!("ln(0) = {v}"),
        Err(e) => println!("ln(0) rejected: {e}"),
    }
    match parse_field("2 * (x + ") {
        Ok(_) => unreachable!(),
        Err(e) => println!("syntax error: {e}"),
    }
    Ok(())
}
