//! Seeded verification runs: configuration, sampling, suite aggregation,
//! JSON report and CSV export.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contact::{self, Box3, CheckReport, ContactError, ContactMetricStructure};
use crate::families::{self, DeformParams, FamilyError, FamilyParams, Variant};
use crate::kmv_analysis::{
    self, Branch, DichotomyVerdict, KmvError, MuTwoVerdict, NullityTriple, PointAnalysis,
    BRANCH_TOL, FD_TOL,
};
use crate::residuals::{IdentityReport, PointResiduals};
use crate::scalar_field::{parse_field, FieldError, Point};

/// Fraction of each box side kept clear of sample points.
pub const SAMPLE_MARGIN: f64 = 0.05;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("config not found: {}", .0.display())]
    ConfigNotFound(PathBuf),
    #[error("invalid config {}: {source}", path.display())]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("field `{name}`: {source}")]
    ConfigField {
        name: &'static str,
        #[source]
        source: FieldError,
    },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Kmv(#[from] KmvError),
}

fn default_zero() -> String {
    "0".into()
}

fn default_one() -> String {
    "1".into()
}

fn default_box() -> Box3 {
    Box3::cube(1.0)
}

fn default_samples() -> usize {
    100
}

fn default_tol() -> f64 {
    1e-8
}

/// A verification run, as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub variant: Variant,
    #[serde(default = "default_zero")]
    pub f: String,
    #[serde(default = "default_one")]
    pub r: String,
    #[serde(default = "default_zero")]
    pub s: String,
    pub upsilon: f64,
    #[serde(rename = "box", default = "default_box")]
    pub bounds: Box3,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub deform_alpha: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(variant: Variant, upsilon: f64) -> Self {
        RunConfig {
            variant,
            f: default_zero(),
            r: default_one(),
            s: default_zero(),
            upsilon,
            bounds: default_box(),
            samples: default_samples(),
            seed: 0,
            tol: default_tol(),
            deform_alpha: None,
            out: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, ReportError> {
        if !path.is_file() {
            return Err(ReportError::ConfigNotFound(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ReportError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Rejects an empty sample, a non-positive tolerance or an empty box.
    pub fn check(&self) -> Result<(), ReportError> {
        if self.samples == 0 {
            return Err(ReportError::InvalidConfig(
                "samples must be at least 1".into(),
            ));
        }
        if !(self.tol > 0.0) {
            return Err(ReportError::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if !self.bounds.is_valid() {
            return Err(ReportError::InvalidConfig(
                "box must be nonempty on every axis".into(),
            ));
        }
        Ok(())
    }

    pub fn family_params(&self) -> Result<FamilyParams, ReportError> {
        let field = |name: &'static str, text: &str| {
            parse_field(text).map_err(|source| ReportError::ConfigField { name, source })
        };
        Ok(FamilyParams::new(
            self.variant,
            field("f", &self.f)?,
            field("r", &self.r)?,
            field("s", &self.s)?,
            self.upsilon,
            self.bounds,
        ))
    }
}

/// `n` points drawn uniformly from the box shrunk by [`SAMPLE_MARGIN`] on
/// every side; the same seed always yields the same points.
pub fn sample_points(bounds: &Box3, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coord = |[lo, hi]: [f64; 2]| {
        let u: f64 = rng.sample(Open01);
        let w = hi - lo;
        lo + w * SAMPLE_MARGIN + u * w * (1.0 - 2.0 * SAMPLE_MARGIN)
    };
    (0..n)
        .map(|_| {
            let x = coord(bounds.x);
            let y = coord(bounds.y);
            let z = coord(bounds.z);
            Point::new(x, y, z)
        })
        .collect()
}

/// Worker count from `KMV_THREADS`, defaulting to the available parallelism.
pub fn worker_count() -> usize {
    std::env::var("KMV_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn with_pool<T: Send>(work: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
    {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

/// min / max / mean / population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stddev: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Spread {
        if values.is_empty() {
            return Spread {
                min: f64::NAN,
                max: f64::NAN,
                mean: f64::NAN,
                stddev: f64::NAN,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Spread {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            stddev: var.sqrt(),
        }
    }
}

/// Extracted (κ, μ, υ) over the sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleStats {
    pub kappa: Spread,
    pub mu: Spread,
    pub upsilon: Spread,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub point: Point,
    pub message: String,
}

/// One CSV row: a point and every residual measured there.
#[derive(Clone, Debug, PartialEq)]
pub struct PointRow {
    pub point: Point,
    pub values: BTreeMap<String, f64>,
}

/// Every suite evaluated on one structure over a point sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureVerification {
    pub validation: CheckReport,
    pub suites: BTreeMap<String, IdentityReport>,
    pub triple: TripleStats,
    pub boeckx: Spread,
    /// Extraction with the frame (ξ, −X, −φX) reproduced every triple bit for bit.
    pub frame_flip_identical: bool,
    pub dichotomy: DichotomyVerdict,
    pub mu_two: MuTwoVerdict,
    pub failures: Vec<PointFailure>,
    pub passed: bool,
    #[serde(skip)]
    pub rows: Vec<PointRow>,
}

impl StructureVerification {
    /// Largest value of `suite.name`, if measured.
    pub fn max(&self, suite: &str, name: &str) -> Option<f64> {
        self.suites.get(suite).and_then(|r| r.max(name))
    }

    /// Largest residual over all suites and the axiom check.
    pub fn worst(&self) -> f64 {
        self.suites
            .values()
            .map(IdentityReport::worst)
            .chain(std::iter::once(self.validation.axioms.worst()))
            .fold(0.0_f64, |a, b| {
                if a.is_nan() || b.is_nan() {
                    f64::NAN
                } else {
                    a.max(b)
                }
            })
    }
}

struct PointOutcome {
    point: Point,
    suites: BTreeMap<&'static str, PointResiduals>,
    triple: NullityTriple,
    lambda: f64,
    boeckx: Option<f64>,
    flip_identical: bool,
}

fn analyze_point(s: &ContactMetricStructure, p: &Point) -> Result<PointOutcome, KmvError> {
    let pa = PointAnalysis::new(s, p)?;
    let triple = pa.extract();
    let flipped = kmv_analysis::extract_with_frame(&pa.bundle, &pa.frame.flipped(), &pa.inputs);
    let same = |a: f64, b: f64| a.to_bits() == b.to_bits();
    let flip_identical = same(triple.kappa, flipped.kappa)
        && same(triple.mu, flipped.mu)
        && same(triple.upsilon, flipped.upsilon)
        && same(triple.residual, flipped.residual);

    let mut suites = BTreeMap::new();
    let mut structure = pa.structure_residuals();
    if let Some(m) = families::closed_h_mismatch(s, p)? {
        structure.insert("h_closed_form", m);
    }
    suites.insert("structure", structure);

    let mut nullity = PointResiduals::at(*p);
    nullity.insert("own_fields", pa.nullity());
    nullity.insert("extracted", triple.residual);
    suites.insert("nullity", nullity);

    let mut extraction = PointResiduals::at(*p);
    extraction.insert("kappa", (triple.kappa - pa.fields.kappa.v).abs());
    extraction.insert("mu", (triple.mu - pa.fields.mu.v).abs());
    extraction.insert("upsilon", (triple.upsilon - pa.fields.upsilon.v).abs());
    extraction.insert("lambda", (pa.frame.lambda - pa.fields.lambda.value).abs());
    suites.insert("extraction", extraction);

    suites.insert("lemma1", pa.lemma1());
    suites.insert("lemma2", pa.lemma2());
    let (xi_i, xi_mu) = pa.xi_invariant();
    let mut xi = PointResiduals::at(*p);
    xi.insert("xi_boeckx", xi_i.abs());
    xi.insert("xi_mu", xi_mu.abs());
    suites.insert("xi_invariant", xi);

    if s.upsilon_constant() {
        suites.insert("lemma3", pa.lemma3()?);
        let t = pa.scalar_curvature_terms();
        let mut sc = PointResiduals::at(*p);
        sc.insert("tau", (t.tau - t.tau_formula).abs());
        sc.insert("laplacian", (t.laplacian - t.laplacian_frame).abs());
        // The variant with the full ‖grad λ‖² misses exactly υ².
        sc.insert(
            "full_gradient_gap",
            ((t.tau - t.tau_full_gradient) - t.upsilon * t.upsilon).abs(),
        );
        suites.insert("scalar_curvature", sc);
    }

    Ok(PointOutcome {
        point: *p,
        suites,
        triple,
        lambda: pa.frame.lambda,
        boeckx: kmv_analysis::boeckx_invariant(triple.kappa, triple.mu).ok(),
        flip_identical,
    })
}

/// Tolerance applied to each suite for a base tolerance `tol`.
pub fn suite_tolerance(suite: &str, tol: f64, closed_forms: bool) -> f64 {
    let identity = if closed_forms { tol } else { tol.max(FD_TOL) };
    match suite {
        "nullity" | "extraction" => tol,
        "scalar_curvature" => 10.0 * identity,
        _ => identity,
    }
}

/// Runs the axiom check and every identity suite of `s` over `points`.
///
/// Axioms are held to `tol / 10`; identity suites to `tol`, or to the
/// finite-difference tolerance when κ, μ, υ have no closed form; the
/// scalar-curvature suite to ten times that.
pub fn verify_structure(
    s: &ContactMetricStructure,
    points: &[Point],
    tol: f64,
) -> Result<StructureVerification, ReportError> {
    let validation = contact::validate(s, points, tol / 10.0)?;
    let results: Vec<(Point, Result<PointOutcome, KmvError>)> = points
        .par_iter()
        .map(|p| (*p, analyze_point(s, p)))
        .collect();

    let mut failures = Vec::new();
    let mut excluded = 0;
    let mut outcomes = Vec::with_capacity(points.len());
    for (p, r) in results {
        match r {
            Ok(o) => outcomes.push(o),
            Err(e) => failures.push({
                if matches!(e, KmvError::Contact(ContactError::DegenerateFrame { .. })) {
                    excluded += 1;
                }
                PointFailure {
                    point: p,
                    message: e.to_string(),
                }
            }),
        }
    }

    let closed = s.closed_forms().is_some();
    let mut per_suite: BTreeMap<&'static str, Vec<PointResiduals>> = BTreeMap::new();
    for o in &outcomes {
        for (name, r) in &o.suites {
            per_suite.entry(name).or_default().push(r.clone());
        }
    }
    let suites: BTreeMap<String, IdentityReport> = per_suite
        .into_iter()
        .map(|(name, samples)| {
            (
                name.to_string(),
                IdentityReport::from_samples(suite_tolerance(name, tol, closed), &samples),
            )
        })
        .collect();

    let triples: Vec<NullityTriple> = outcomes.iter().map(|o| o.triple).collect();
    let pick = |f: fn(&NullityTriple) -> f64| triples.iter().map(f).collect::<Vec<_>>();
    let triple = TripleStats {
        kappa: Spread::of(&pick(|t| t.kappa)),
        mu: Spread::of(&pick(|t| t.mu)),
        upsilon: Spread::of(&pick(|t| t.upsilon)),
        max_residual: triples.iter().fold(0.0_f64, |a, t| a.max(t.residual)),
    };
    let boeckx_values: Vec<f64> = outcomes.iter().filter_map(|o| o.boeckx).collect();
    let boeckx = if boeckx_values.len() == outcomes.len() {
        Spread::of(&boeckx_values)
    } else {
        Spread::of(&[])
    };
    let dichotomy = kmv_analysis::classify(&triples, excluded, BRANCH_TOL);
    let pairs: Vec<(f64, f64)> = outcomes.iter().map(|o| (o.triple.mu, o.lambda)).collect();
    let mu_two = kmv_analysis::mu_two_from(&pairs, BRANCH_TOL);
    let frame_flip_identical = outcomes.iter().all(|o| o.flip_identical);

    let rows = outcomes
        .iter()
        .map(|o| {
            let mut values = BTreeMap::new();
            values.insert("kappa".to_string(), o.triple.kappa);
            values.insert("mu".to_string(), o.triple.mu);
            values.insert("upsilon".to_string(), o.triple.upsilon);
            values.insert("lambda".to_string(), o.lambda);
            values.insert("boeckx".to_string(), o.boeckx.unwrap_or(f64::NAN));
            for (suite, r) in &o.suites {
                for (k, v) in &r.values {
                    values.insert(format!("{suite}.{k}"), *v);
                }
            }
            PointRow {
                point: o.point,
                values,
            }
        })
        .collect();

    let passed = validation.passed
        && failures.is_empty()
        && !outcomes.is_empty()
        && suites.values().all(|r| r.passed)
        && frame_flip_identical
        && dichotomy.passed
        && mu_two.passed;
    Ok(StructureVerification {
        validation,
        suites,
        triple,
        boeckx,
        frame_flip_identical,
        dichotomy,
        mu_two,
        failures,
        passed,
        rows,
    })
}

/// Predicted-versus-extracted comparison for a D-homothetic deformation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationReport {
    pub alpha: f64,
    /// Extracted deformed triple against the deformation law (tolerance `tol`),
    /// h̄ against h/α and the change of the Boeckx invariant (`tol / 10`).
    pub law: IdentityReport,
    pub tensors: IdentityReport,
    pub deformed: StructureVerification,
    pub passed: bool,
}

/// Deforms `s` by `alpha` and compares the result with the deformation law.
pub fn verify_deformation(
    s: &ContactMetricStructure,
    points: &[Point],
    alpha: f64,
    tol: f64,
) -> Result<DeformationReport, ReportError> {
    let params = DeformParams::new(alpha)?;
    let deformed = families::d_homothetic_deform(s, params)?;
    let compared: Vec<Result<(PointResiduals, PointResiduals), KmvError>> = points
        .par_iter()
        .map(|p| {
            let base = kmv_analysis::extract_kmv(s, p)?;
            let moved = kmv_analysis::extract_kmv(&deformed, p)?;
            let (k, m, u) =
                families::predicted_deformed_kmv(base.kappa, base.mu, base.upsilon, alpha);
            let mut law = PointResiduals::at(*p);
            law.insert("kappa", (moved.kappa - k).abs());
            law.insert("mu", (moved.mu - m).abs());
            law.insert("upsilon", (moved.upsilon - u).abs());
            let h = contact::compute_h(s, p)?;
            let h_bar = contact::compute_h(&deformed, p)?;
            let mut diff = 0.0_f64;
            for i in 0..3 {
                for j in 0..3 {
                    diff = diff.max((h_bar[i][j] - h[i][j] / alpha).abs());
                }
            }
            let mut tensors = PointResiduals::at(*p);
            tensors.insert("h_scaling", diff);
            let before = kmv_analysis::boeckx_invariant(base.kappa, base.mu)?;
            let after = kmv_analysis::boeckx_invariant(moved.kappa, moved.mu)?;
            tensors.insert("boeckx_change", (after - before).abs());
            Ok((law, tensors))
        })
        .collect();
    let mut law = Vec::new();
    let mut tensors = Vec::new();
    let mut failed = false;
    for c in compared {
        match c {
            Ok((l, t)) => {
                law.push(l);
                tensors.push(t);
            }
            Err(_) => failed = true,
        }
    }
    let law = IdentityReport::from_samples(tol, &law);
    let tensors = IdentityReport::from_samples(tol / 10.0, &tensors);
    let deformed = verify_structure(&deformed, points, tol)?;
    let passed = !failed && law.passed && tensors.passed && deformed.passed;
    Ok(DeformationReport {
        alpha,
        law,
        tensors,
        deformed,
        passed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Everything a `verify` run produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: RunConfig,
    pub points: usize,
    pub structure: StructureVerification,
    /// A = Xλ vanishes on family I and B = φXλ on family II.
    pub family: IdentityReport,
    /// Bracket relations and connection table of the explicit family I frame.
    pub frame_table: Option<IdentityReport>,
    pub expected_branch: Branch,
    pub branch_matches: bool,
    pub deformation: Option<DeformationReport>,
    /// Formula choices the checks depend on.
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

/// Conventions stated in every report.
pub fn report_notes() -> Vec<String> {
    vec![
        "kappa = 1 - lambda^2 with lambda = r(z) exp(upsilon x) for both families; reading kappa = lambda for \
         family II contradicts the curvature of the constructed metric"
            .into(),
        "scalar curvature is compared with (lap(lambda) - upsilon^2 lambda)/lambda - (A^2 + B^2)/lambda^2 \
         + 2(kappa - mu); substituting the full |grad lambda|^2 = A^2 + B^2 + upsilon^2 lambda^2 for A^2 + B^2 \
         is off by exactly upsilon^2 (suite entry full_gradient_gap)"
            .into(),
    ]
}

/// Builds the configured family and runs every check on seeded samples.
pub fn run_verify(config: &RunConfig) -> Result<VerificationReport, ReportError> {
    config.check()?;
    let params = config.family_params()?;
    let s = families::build_family(&params)?;
    let points = sample_points(&config.bounds, config.samples, config.seed);
    let tol = config.tol;
    with_pool(|| {
        let structure = verify_structure(&s, &points, tol)?;
        let family_samples: Vec<PointResiduals> = points
            .par_iter()
            .map(|p| {
                let mut r = PointResiduals::at(*p);
                match contact::h_frame(&s, p) {
                    Ok(f) => match config.variant {
                        Variant::I => r.insert("a", f.a.abs()),
                        Variant::II => r.insert("b", f.b.abs()),
                    },
                    Err(_) => r.insert("frame", f64::NAN),
                }
                r
            })
            .collect();
        let family = IdentityReport::from_samples(tol / 10.0, &family_samples);
        let frame_table = match config.variant {
            Variant::I => {
                let rows: Vec<PointResiduals> = points
                    .par_iter()
                    .map(|p| {
                        families::family_one_frame_table(&params, p).unwrap_or_else(|_| {
                            let mut r = PointResiduals::at(*p);
                            r.insert("evaluation", f64::NAN);
                            r
                        })
                    })
                    .collect();
                Some(IdentityReport::from_samples(tol, &rows))
            }
            Variant::II => None,
        };
        let expected_branch = match config.variant {
            Variant::I => Branch::Plus,
            Variant::II => Branch::Minus,
        };
        let branch_matches = structure.dichotomy.branch == Some(expected_branch);
        let deformation = match config.deform_alpha {
            Some(alpha) => Some(verify_deformation(&s, &points, alpha, tol)?),
            None => None,
        };
        let passed = structure.passed
            && family.passed
            && frame_table.as_ref().is_none_or(|t| t.passed)
            && branch_matches
            && deformation.as_ref().is_none_or(|d| d.passed);
        Ok(VerificationReport {
            config: config.clone(),
            points: points.len(),
            structure,
            family,
            frame_table,
            expected_branch,
            branch_matches,
            deformation,
            notes: report_notes(),
            verdict: if passed { Verdict::Pass } else { Verdict::Fail },
        })
    })
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String, ReportError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes the JSON report to `path` and the per-point CSV next to it.
    pub fn write(&self, path: &Path) -> Result<PathBuf, ReportError> {
        let io_err = |source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io_err)?;
        }
        std::fs::write(path, self.to_json()? + "\n").map_err(io_err)?;
        let csv_path = path.with_extension("csv");
        let file = std::fs::File::create(&csv_path).map_err(|source| ReportError::Io {
            path: csv_path.clone(),
            source,
        })?;
        write_csv(&self.structure.rows, file)?;
        Ok(csv_path)
    }
}

/// Per-point residual table: x, y, z, then one column per residual in
/// name order. Missing values are left empty.
pub fn write_csv<W: io::Write>(rows: &[PointRow], out: W) -> Result<(), ReportError> {
    let mut columns: Vec<&str> = rows
        .iter()
        .flat_map(|r| r.values.keys().map(String::as_str))
        .collect();
    columns.sort_unstable();
    columns.dedup();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["x", "y", "z"];
    header.extend(&columns);
    w.write_record(&header)?;
    for r in rows {
        let mut record = vec![
            r.point.x.to_string(),
            r.point.y.to_string(),
            r.point.z.to_string(),
        ];
        record.extend(
            columns
                .iter()
                .map(|c| r.values.get(*c).map_or_else(String::new, |v| v.to_string())),
        );
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| ReportError::Csv(e.into()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_seeded_and_stays_inside_margin() {
        let b = Box3::cube(1.0);
        let a = sample_points(&b, 50, 7);
        assert_eq!(a, sample_points(&b, 50, 7));
        assert_ne!(a, sample_points(&b, 50, 8));
        for p in &a {
            for c in p.to_array() {
                assert!(c > -0.9 && c < 0.9);
            }
        }
    }

    #[test]
    fn config_defaults_and_unknown_fields() {
        let c: RunConfig = serde_json::from_str(r#"{"variant": "II", "upsilon": 2.0}"#).unwrap();
        assert_eq!(c.variant, Variant::II);
        assert_eq!(c.samples, 100);
        assert_eq!(c.tol, 1e-8);
        assert_eq!(c.r, "1");
        assert!(
            serde_json::from_str::<RunConfig>(r#"{"variant": "I", "upsilon": 1, "bogus": 0}"#)
                .is_err()
        );
    }

    #[test]
    fn missing_config_is_reported() {
        let e = RunConfig::load(Path::new("/definitely/missing.json")).unwrap_err();
        assert!(e.to_string().starts_with("config not found"));
    }

    #[test]
    fn config_invariants() {
        let mut c = RunConfig::new(Variant::I, 1.0);
        c.samples = 0;
        assert!(matches!(run_verify(&c), Err(ReportError::InvalidConfig(_))));
        c.samples = 1;
        c.tol = 0.0;
        assert!(matches!(run_verify(&c), Err(ReportError::InvalidConfig(_))));
        let mut c = RunConfig::new(Variant::I, 0.0);
        c.samples = 1;
        let e = run_verify(&c).unwrap_err();
        assert!(e.to_string().contains("nonzero"), "{e}");
    }

    #[test]
    fn spread_of_constant_values() {
        let s = Spread::of(&[2.0, 2.0, 2.0]);
        assert_eq!((s.min, s.max, s.mean, s.stddev), (2.0, 2.0, 2.0, 0.0));
    }

    #[test]
    fn small_run_passes() {
        let mut c = RunConfig::new(Variant::I, 1.0);
        c.samples = 8;
        c.deform_alpha = Some(2.0);
        let r = run_verify(&c).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.to_json().unwrap());
        assert_eq!(r.structure.dichotomy.branch, Some(Branch::Plus));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let rows = vec![PointRow {
            point: Point::new(0.5, 0.0, -1.0),
            values: [("a.b".to_string(), 1e-9)].into_iter().collect(),
        }];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x,y,z,a.b\n0.5,0,-1,0.000000001\n");
    }
}
