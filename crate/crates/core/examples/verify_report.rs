//! A full seeded verification run written as a JSON report plus a CSV of
//! per-point residuals.

use kmv::families::Variant;
use kmv::report::{run_verify, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = RunConfig::new(Variant::II, -2.0);
    config.f = "z".into();
    config.r = "1 + z^2/4".into();
    config.s = "z".into();
    config.samples = 60;
    config.seed = 42;
    config.deform_alpha = Some(3.0);

    let report = run_verify(&config)?;
    for (name, suite) in &report.structure.suites {
        println!(
            "{name:<18} worst {:.2e}  tol {:.0e}  {}",
            suite.worst(),
            suite.tolerance,
            if suite.passed { "ok" } else { "FAIL" }
        );
    }
    println!(
        "branch {:?}, Boeckx mean {:.12} sd {:.1e}",
        report.structure.dichotomy.branch,
        report.structure.boeckx.mean,
        report.structure.boeckx.stddev
    );
    println!("verdict {:?}", report.verdict);

    let dir = std::env::temp_dir().join("kmv-example");
    let csv = report.write(&dir.join("report.json"))?;
    println!(
        "wrote {} and {}",
        dir.join("report.json").display(),
        csv.display()
    );
    Ok(())
}
