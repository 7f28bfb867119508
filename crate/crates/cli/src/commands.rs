use std::fs;
use std::path::{Path, PathBuf};

use hankel_spectra::assembly::assemble;
use hankel_spectra::clark::{clark_measure, inner_from_measure};
use hankel_spectra::hankel::{
    forward_extract, roundtrip_errors, synthesize, ExtractOptions, HankelMatrix, RoundTripErrors, Truncation, HANKEL_TOL,
    TAIL_TOL,
};
use hankel_spectra::sampling::{random_cyclic_data, random_multiplicity_data, SpectrumShape};
use hankel_spectra::schema::{
    self, BlaschkeDoc, BundleDoc, ForwardDoc, HankelDoc, MatrixDoc, MeasureDoc, BINARY_MAGIC,
};
use hankel_spectra::spectral_data::{CompactSpectralData, Mode};
use hankel_spectra::stability::stability_report;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::{Cli, Command, ModeArg, Options};

/// Caps the worker threads used by `roundtrip`.
pub const THREADS_ENV: &str = "HANKEL_SPECTRA_THREADS";

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<()> {
    let o = &cli.opts;
    for (name, v) in [("tol-pole", Some(o.tol_pole)), ("tol-gap", Some(o.tol_gap)), ("tol-tail", o.tol_tail)] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Schema(format!("--{name} must be positive, got {v}")));
            }
        }
    }
    match cli.command {
        Command::Synthesize => cmd_synthesize(o),
        Command::Analyze => cmd_analyze(o),
        Command::Roundtrip => cmd_roundtrip(o),
        Command::ConvertClark => cmd_convert_clark(o),
        Command::Stability => cmd_stability(o),
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn read_text(o: &Options) -> Result<String> {
    let path = require_input(o)?;
    String::from_utf8(read_bytes(path)?).map_err(|_| CliError::Schema(format!("{} is not UTF-8", path.display())))
}

fn require_input(o: &Options) -> Result<&PathBuf> {
    o.input.as_ref().ok_or_else(|| CliError::Schema("--input is required".into()))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_output(o: &Options, text: &str) -> Result<()> {
    match &o.output {
        Some(p) => write_file(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn mode(o: &Options) -> Option<Mode> {
    o.mode.map(|m| match m {
        ModeArg::Cyclic => Mode::Cyclic,
        ModeArg::Multiplicity => Mode::Multiplicity,
    })
}

/// Reads `spectrum.v1`, switching cyclic data to δ-measures when
/// `--mode multiplicity` asks for it.
fn read_data(o: &Options) -> Result<CompactSpectralData> {
    let doc = schema::parse_spectrum(&read_text(o)?)?;
    let d = doc.to_data_tol(o.tol_pole)?;
    Ok(match (mode(o), d.mode()) {
        (Some(Mode::Multiplicity), Mode::Cyclic) => d.to_multiplicity(),
        (Some(Mode::Cyclic), Mode::Multiplicity) => {
            return Err(CliError::Schema("multiplicity data cannot be read in cyclic mode".into()));
        }
        _ => d,
    })
}

fn truncation(o: &Options, rank: usize) -> Result<(Truncation, f64)> {
    let tail = o.tol_tail.unwrap_or(TAIL_TOL);
    if o.truncation == "auto" {
        return Ok((Truncation::Auto, tail));
    }
    let n: usize = o
        .truncation
        .parse()
        .map_err(|_| CliError::Schema(format!("--truncation must be `auto` or a size, got {:?}", o.truncation)))?;
    if n < rank {
        return Err(CliError::Schema(format!("truncation {n} is below the rank {rank}")));
    }
    Ok((if o.tol_tail.is_some() { Truncation::Certified(n) } else { Truncation::Fixed(n) }, tail))
}

#[derive(Serialize)]
struct SynthesisOutput {
    hankel: HankelDoc,
    bundle: BundleDoc,
    stability: schema::StabilityDoc,
}

fn cmd_synthesize(o: &Options) -> Result<()> {
    let d = read_data(o)?;
    let rank = assemble(&d)?.dim();
    let (t, tail) = truncation(o, rank)?;
    let syn = synthesize(&d, t, tail)?;
    let out = SynthesisOutput {
        hankel: HankelDoc::from_matrix(&syn.hankel),
        bundle: BundleDoc::from_bundle(&syn.bundle),
        stability: stability_report(&syn.bundle, o.steps),
    };
    match &o.output {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
            write_file(&dir.join("hankel.json"), schema::emit(&out.hankel).as_bytes())?;
            write_file(&dir.join("bundle.json"), schema::emit(&out.bundle).as_bytes())?;
            write_file(&dir.join("stability.json"), schema::emit(&out.stability).as_bytes())?;
            write_file(&dir.join("decay.csv"), schema::decay_profile_csv(&out.stability.decay_profile).as_bytes())
        }
        None => write_output(o, &schema::emit(&out)),
    }
}

/// Binary layout by magic, otherwise `hankel.v1` or a dense JSON matrix.
fn read_hankel(o: &Options) -> Result<HankelMatrix> {
    let bytes = read_bytes(require_input(o)?)?;
    if bytes.starts_with(BINARY_MAGIC) {
        return Ok(HankelMatrix::from_dense(&schema::decode_matrix(&bytes)?, HANKEL_TOL)?);
    }
    let text = String::from_utf8(bytes).map_err(|_| CliError::Schema("input is neither UTF-8 JSON nor a binary matrix".into()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("gamma").is_some() {
        Ok(serde_json::from_value::<HankelDoc>(value)?.to_matrix()?)
    } else if value.get("data").is_some() {
        let m = serde_json::from_value::<MatrixDoc>(value)?.to_matrix()?;
        Ok(HankelMatrix::from_dense(&m, HANKEL_TOL)?)
    } else {
        Err(CliError::Schema("expected a hankel.v1 document or a dense matrix".into()))
    }
}

fn extract_options(o: &Options) -> ExtractOptions {
    ExtractOptions { gap_tol: o.tol_gap, ..ExtractOptions::default() }
}

fn cmd_analyze(o: &Options) -> Result<()> {
    let h = read_hankel(o)?;
    let f = forward_extract(&h, &extract_options(o))?;
    if let Some(path) = &o.csv {
        let (sigma, _) = h.leading_svd(f64::EPSILON, f.residuals.rank);
        write_file(path, schema::singular_values_csv(&sigma).as_bytes())?;
    }
    write_output(o, &schema::emit(&ForwardDoc::from_forward(&f, mode(o))?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialReport {
    pub index: usize,
    pub levels: usize,
    pub truncation: Option<usize>,
    pub errors: Option<RoundTripErrors>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub seed: u64,
    pub trials: usize,
    pub failures: usize,
    pub max_lambda_error: f64,
    pub max_mu_error: f64,
    pub max_weight_error: f64,
    pub max_phase_error: f64,
    pub max_error: f64,
    pub per_trial: Vec<TrialReport>,
}

fn trial(index: usize, d: &CompactSpectralData, o: &Options) -> (TrialReport, Option<hankel_spectra::Error>) {
    let levels = d.spectrum().len();
    let run = || -> hankel_spectra::Result<(usize, RoundTripErrors)> {
        let tail = o.tol_tail.unwrap_or(TAIL_TOL);
        let t = match o.truncation.parse::<usize>() {
            Ok(n) if o.tol_tail.is_some() => Truncation::Certified(n),
            Ok(n) => Truncation::Fixed(n),
            Err(_) => Truncation::Auto,
        };
        let syn = synthesize(d, t, tail)?;
        let f = forward_extract(&syn.hankel, &extract_options(o))?;
        Ok((syn.hankel.size(), roundtrip_errors(d, &f)?))
    };
    match run() {
        Ok((n, e)) => (TrialReport { index, levels, truncation: Some(n), errors: Some(e), failure: None }, None),
        Err(e) => (TrialReport { index, levels, truncation: None, errors: None, failure: Some(e.kind().to_string()) }, Some(e)),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Schema(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Schema(e.to_string()))
}

/// Instance `i` of a seeded batch; each trial has its own generator so the
/// batch does not depend on scheduling.
fn random_instance(seed: u64, i: usize, o: &Options) -> CompactSpectralData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
    let shape = SpectrumShape { ratio: (0.5, 0.8), ..SpectrumShape::default() };
    let n = rng.random_range(1..=o.levels.max(1));
    match mode(o) {
        Some(Mode::Multiplicity) => random_multiplicity_data(&mut rng, n, 3, &shape),
        _ => random_cyclic_data(&mut rng, n, &shape),
    }
}

fn cmd_roundtrip(o: &Options) -> Result<()> {
    if o.truncation != "auto" && o.truncation.parse::<usize>().is_err() {
        return Err(CliError::Schema(format!("--truncation must be `auto` or a size, got {:?}", o.truncation)));
    }
    let instances: Vec<CompactSpectralData> = match &o.input {
        Some(_) => vec![read_data(o)?],
        None => (0..o.trials).map(|i| random_instance(o.seed, i, o)).collect(),
    };
    let results: Vec<_> = thread_pool()?.install(|| instances.par_iter().enumerate().map(|(i, d)| trial(i, d, o)).collect());
    let errs: Vec<&RoundTripErrors> = results.iter().filter_map(|(r, _)| r.errors.as_ref()).collect();
    let worst = |f: fn(&RoundTripErrors) -> f64| errs.iter().map(|e| f(e)).fold(0.0, f64::max);
    let report = RoundTripReport {
        seed: o.seed,
        trials: results.len(),
        failures: results.iter().filter(|(_, e)| e.is_some()).count(),
        max_lambda_error: worst(|e| e.lambda),
        max_mu_error: worst(|e| e.mu),
        max_weight_error: worst(|e| e.weights),
        max_phase_error: worst(|e| e.phases),
        max_error: worst(RoundTripErrors::max),
        per_trial: results.iter().map(|(r, _)| r.clone()).collect(),
    };
    write_output(o, &schema::emit(&report))?;
    match results.into_iter().find_map(|(_, e)| e) {
        Some(e) => Err(CliError::Numerical(e)),
        None => Ok(()),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ClarkList {
    Products(Vec<BlaschkeDoc>),
    Measures(Vec<MeasureDoc>),
}

fn cmd_convert_clark(o: &Options) -> Result<()> {
    let list: ClarkList = serde_json::from_str(&read_text(o)?)
        .map_err(|_| CliError::Schema("expected a list of blaschke.v1 or of measure.v1 documents".into()))?;
    let out = match list {
        ClarkList::Products(v) => ClarkList::Measures(
            v.iter()
                .map(|d| Ok(MeasureDoc::from_measure(&clark_measure(&d.to_product()?)?)))
                .collect::<Result<_>>()?,
        ),
        ClarkList::Measures(v) => ClarkList::Products(
            v.iter()
                .map(|d| Ok(BlaschkeDoc::from_product(&inner_from_measure(&d.to_measure()?)?)))
                .collect::<Result<_>>()?,
        ),
    };
    write_output(o, &schema::emit(&out))
}

fn cmd_stability(o: &Options) -> Result<()> {
    let b = assemble(&read_data(o)?)?;
    let report = stability_report(&b, o.steps);
    if let Some(path) = &o.csv {
        write_file(path, schema::decay_profile_csv(&report.decay_profile).as_bytes())?;
    }
    write_output(o, &schema::emit(&report))
}
