//! Subcommand bodies. Each returns the full stdout text and exit code, or a
//! structured error.

use prym_core::curves::curve_system;
use prym_core::fibers::{excluded_by_hypothesis, glued_points, is_exceptional, sample_fiber, FiberError, FiberSample};
use prym_core::moduli::{ModuliError, ModuliPoint, SignVector};
use prym_core::numerics::ToleranceConfig;
use prym_core::prym::{prym_descriptor, PrymError};
use prym_core::verify::{run, Suite};
use serde::Serialize;
use serde_json::json;

use crate::parse;

pub struct Output {
    pub stdout: String,
    pub exit: u8,
}

impl Output {
    fn json(value: &impl Serialize, exit: u8) -> Self {
        let mut stdout = serde_json::to_string_pretty(value).expect("plain data serializes");
        stdout.push('\n');
        Output { stdout, exit }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit: u8,
}

impl CliError {
    pub fn parse(message: String) -> Self {
        CliError { code: "ParseError".into(), message, exit: 2 }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&json!({ "code": self.code, "message": self.message })).expect("strings serialize")
    }
}

impl From<ModuliError> for CliError {
    fn from(e: ModuliError) -> Self {
        CliError { code: e.code().into(), message: e.to_string(), exit: 2 }
    }
}

impl From<PrymError> for CliError {
    fn from(e: PrymError) -> Self {
        CliError { code: e.code().into(), message: e.to_string(), exit: 2 }
    }
}

impl From<FiberError> for CliError {
    fn from(e: FiberError) -> Self {
        let exit = if matches!(e, FiberError::InsufficientYield { .. }) { 3 } else { 2 };
        CliError { code: e.code().into(), message: e.to_string(), exit }
    }
}

fn point(text: &str, cfg: &ToleranceConfig) -> Result<ModuliPoint, CliError> {
    let [a, b, c] = parse::triple(text)?;
    Ok(ModuliPoint::validate(a, b, c, cfg)?)
}

pub fn invariants(t: &str, cfg: &ToleranceConfig) -> Result<Output, CliError> {
    let p = point(t, cfg)?;
    Ok(Output::json(&prym_descriptor(&p, cfg)?, 0))
}

pub fn curves(t: &str, signs: &str, cfg: &ToleranceConfig) -> Result<Output, CliError> {
    let p = point(t, cfg)?;
    let s = SignVector::parse(signs)?;
    Ok(Output::json(&curve_system(&p, s), 0))
}

fn pair(z: num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn fiber(l1: &str, l2: &str, count: usize, seed: u64, csv: bool, cfg: &ToleranceConfig) -> Result<Output, CliError> {
    let l1 = parse::complex(l1)?;
    let l2 = parse::complex(l2)?;
    let sample = sample_fiber(l1, l2, count, seed, cfg)?;
    let exceptional = is_exceptional(l1, l2, cfg);
    let hypothesis_excluded = excluded_by_hypothesis(l1, l2, cfg);
    // same seed and count, so these are drawn from the very same points
    let glued: Vec<serde_json::Value> = glued_points(l1, l2, count, seed, cfg)?
        .iter()
        .map(|g| json!({ "point": g.ordered.map(pair), "permutation": g.permutation }))
        .collect();
    if csv {
        return Ok(Output { stdout: fiber_csv(&sample, exceptional, hypothesis_excluded, glued.len()), exit: 0 });
    }
    let mut value = sample.to_json();
    let obj = value.as_object_mut().expect("fiber sample serializes to an object");
    obj.insert("exceptional".into(), json!(exceptional));
    obj.insert("hypothesis_excluded".into(), json!(hypothesis_excluded));
    obj.insert("glued".into(), json!(glued));
    Ok(Output::json(&value, 0))
}

fn fiber_csv(sample: &FiberSample, exceptional: bool, hypothesis_excluded: bool, glued: usize) -> String {
    let (c1, c2) = sample.lambda.canonical;
    let mut out = format!(
        "# lambda_canonical={},{};{},{}\n# exceptional={exceptional}\n# hypothesis_excluded={hypothesis_excluded}\n# glued={glued}\n# residual_max={}\n# draws={}\n",
        c1.re,
        c1.im,
        c2.re,
        c2.im,
        sample.residual_max(),
        sample.draws
    );
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(FiberSample::CSV_HEADER).expect("in-memory write");
    for row in sample.csv_rows() {
        w.write_record(&row).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output"));
    out
}

pub fn verify(suite: &str, seed: u64, samples: usize, cfg: &ToleranceConfig) -> Result<Output, CliError> {
    let suite = Suite::parse(suite).ok_or_else(|| CliError {
        code: "UnknownSuite".into(),
        message: format!("unknown suite {suite:?}; expected lattice, group, prym, fibers or all"),
        exit: 2,
    })?;
    eprintln!("running suite {} (seed {seed}, samples {samples})", suite.name());
    let out = run(suite, seed, samples, cfg);
    for r in &out.reports {
        for a in r.entries.failures() {
            eprintln!("FAIL [{}] {}: expected {}, computed {}", r.suite, a.assertion, a.expected, a.computed);
        }
    }
    Ok(Output::json(&out, if out.pass { 0 } else { 1 }))
}
