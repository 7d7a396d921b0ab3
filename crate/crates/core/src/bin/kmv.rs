use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use kmv::contact::{self, Box3};
use kmv::families::{self, DeformParams, FamilyParams, Variant};
use kmv::kmv_analysis;
use kmv::report::{self, ReportError, RunConfig, Verdict};
use kmv::tensor_calc;
use kmv::Point;

#[derive(Parser)]
#[command(
    name = "kmv",
    version,
    about = "Build and check 3-dimensional (κ, μ, υ)-contact metric families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print η, ξ, φ, g, h and the closed-form functions at a point.
    Construct {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_parser = parse_point, default_value = "0,0,0")]
        point: Point,
    },
    /// Run every check on seeded samples as described by a JSON config.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve (κ, μ, υ) from curvature at one or more points.
    Extract {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "point", value_parser = parse_point, default_value = "0,0,0")]
        points: Vec<Point>,
    },
    /// Deform by α and compare the extracted triple with the deformation law.
    Deform {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long = "point", value_parser = parse_point, default_value = "0,0,0")]
        points: Vec<Point>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Write the deformed structure's full report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, default_value = "I")]
    family: Variant,
    #[arg(long, default_value = "0")]
    f: String,
    #[arg(long, default_value = "1")]
    r: String,
    #[arg(long, default_value = "0")]
    s: String,
    #[arg(long, allow_hyphen_values = true)]
    upsilon: f64,
    /// Chart box as xlo,xhi,ylo,yhi,zlo,zhi.
    #[arg(long = "box", value_parser = parse_box, default_value = "-1,1,-1,1,-1,1")]
    bounds: Box3,
}

impl FamilyArgs {
    fn config(&self) -> RunConfig {
        let mut c = RunConfig::new(self.family, self.upsilon);
        c.f = self.f.clone();
        c.r = self.r.clone();
        c.s = self.s.clone();
        c.bounds = self.bounds;
        c
    }

    fn params(&self) -> Result<FamilyParams, ReportError> {
        self.config().family_params()
    }
}

fn parse_numbers<const N: usize>(text: &str) -> Result<[f64; N], String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

fn parse_point(text: &str) -> Result<Point, String> {
    parse_numbers::<3>(text).map(Point::from_array)
}

fn parse_box(text: &str) -> Result<Box3, String> {
    let v = parse_numbers::<6>(text)?;
    Ok(Box3 {
        x: [v[0], v[1]],
        y: [v[2], v[3]],
        z: [v[4], v[5]],
    })
}

type Failure = Box<dyn std::error::Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<bool, Failure> {
    match command {
        Command::Construct { family, point } => {
            let p = family.params()?;
            let s = families::build_family(&p)?;
            let cf = s.closed_forms().expect("families carry closed forms");
            let out = json!({
                "family": p.variant,
                "point": point,
                "eta": s.eta.eval(&point)?,
                "xi": s.xi.eval(&point)?,
                "g": s.g.eval(&point)?,
                "phi": s.phi_at(&point)?,
                "h": contact::compute_h(&s, &point)?,
                "lambda": cf.lambda.eval(&point)?,
                "kappa": cf.kappa.eval(&point)?,
                "mu": cf.mu.eval(&point)?,
                "upsilon": cf.upsilon,
                "contact_volume": tensor_calc::contact_volume(&s.eta, &point)?,
                "expressions": {
                    "a": families::family_fields(&p).a.to_string(),
                    "b": families::family_fields(&p).b.to_string(),
                    "lambda": cf.lambda.to_string(),
                },
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Command::Verify { config, out } => {
            let mut cfg = RunConfig::load(&config)?;
            if out.is_some() {
                cfg.out = out;
            }
            let rep = report::run_verify(&cfg)?;
            match &cfg.out {
                Some(path) => {
                    let csv = rep.write(path)?;
                    eprintln!("report: {}  residuals: {}", path.display(), csv.display());
                }
                None => println!("{}", rep.to_json()?),
            }
            eprintln!(
                "verdict: {}  worst residual {:.3e}",
                if rep.verdict == Verdict::Pass {
                    "pass"
                } else {
                    "fail"
                },
                rep.structure.worst()
            );
            Ok(rep.verdict == Verdict::Pass)
        }
        Command::Extract { family, points } => {
            let s = families::build_family(&family.params()?)?;
            let mut rows = Vec::new();
            for p in &points {
                let t = kmv_analysis::extract_kmv(&s, p)?;
                let frame = contact::h_frame(&s, p)?;
                rows.push(json!({
                    "point": p,
                    "kappa": t.kappa,
                    "mu": t.mu,
                    "upsilon": t.upsilon,
                    "residual": t.residual,
                    "lambda": frame.lambda,
                    "boeckx": kmv_analysis::boeckx_invariant(t.kappa, t.mu).ok(),
                }));
            }
            println!("{}", serde_json::to_string_pretty(&rows)?);
            Ok(true)
        }
        Command::Deform {
            family,
            alpha,
            points,
            samples,
            seed,
            tol,
            out,
        } => {
            let p = family.params()?;
            let s = families::build_family(&p)?;
            let deformed = families::d_homothetic_deform(&s, DeformParams::new(alpha)?)?;
            let mut rows = Vec::new();
            for q in &points {
                let base = kmv_analysis::extract_kmv(&s, q)?;
                let moved = kmv_analysis::extract_kmv(&deformed, q)?;
                let predicted =
                    families::predicted_deformed_kmv(base.kappa, base.mu, base.upsilon, alpha);
                rows.push(json!({
                    "point": q,
                    "original": base,
                    "predicted": {"kappa": predicted.0, "mu": predicted.1, "upsilon": predicted.2},
                    "extracted": moved,
                }));
            }
            let sample = report::sample_points(&p.bounds, samples.max(1), seed);
            let rep = report::verify_deformation(&s, &sample, alpha, tol)?;
            let summary = json!({
                "alpha": alpha,
                "points": rows,
                "law_max": rep.law.worst(),
                "tensors_max": rep.tensors.worst(),
                "passed": rep.passed,
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            if let Some(path) = out {
                std::fs::write(&path, serde_json::to_string_pretty(&rep)? + "\n")?;
            }
            Ok(rep.passed)
        }
    }
}
