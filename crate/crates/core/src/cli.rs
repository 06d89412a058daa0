//! The `qcurves` command line.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::curve::{sample_curve, synthesize_on, CurveKind, CurveSpec, Differentiation, Dimension, SampledCurve};
use crate::error::{Error, Result};
use crate::frenet::{curvature_profile, frames_3d, frames_4d, CurvatureProfile, FrameConfig};
use crate::io::{self, SpecDocument};
use crate::mannheim::{
    construct_partner_3d, construct_partner_4d, mannheim_lambda_3d, mannheim_lambda_4d, verify_pair_3d, verify_pair_4d,
    CorrespondenceMap, MannheimEstimate, PairReport3, PairReport4, Partner,
};
use crate::quat::Quaternion;

const TOOL: &str = "qcurves";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Frenet frames and curvatures at every interior sample.
    Frame,
    /// Mannheim curvature test.
    Check,
    /// Mannheim partner construction and verification of the pair.
    Partner,
    /// Verification of a given pair along a given correspondence.
    Verify,
    /// Integration of the Frenet equations for prescribed curvatures.
    Synthesize,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Frame => "frame",
            Command::Check => "check",
            Command::Partner => "partner",
            Command::Verify => "verify",
            Command::Synthesize => "synthesize",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "qcurves", version, about = "Frenet frames and Mannheim pairs of curves in E3 and E4")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Curve-spec document.
    #[arg(long)]
    pub input: PathBuf,
    /// Second curve-spec document (verify).
    #[arg(long)]
    pub input2: Option<PathBuf>,
    /// Correspondence CSV with header `s,s_star` (verify).
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Offset of the partner (partner).
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        let usage = |m: &str| Err(Error::InvalidSpec(format!("{}: {m}", self.command.name())));
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return usage("--tol must be positive");
        }
        match self.command {
            Command::Partner if self.lambda.is_none() => usage("--lambda is required"),
            Command::Frame if self.lambda.is_some() => usage("--lambda is not accepted"),
            Command::Verify if self.input2.is_none() || self.map.is_none() => usage("--input2 and --map are required"),
            _ => Ok(()),
        }
    }
}

/// Process exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_correspondence() {
        4
    } else if err.is_geometric() {
        3
    } else if matches!(err, Error::Output { .. }) {
        1
    } else {
        2
    }
}

#[derive(Serialize)]
struct Grid {
    dimension: u8,
    samples: usize,
    start: f64,
    step: f64,
    length: f64,
    interior: (usize, usize),
    differentiation: Differentiation,
}

impl Grid {
    fn of(curve: &SampledCurve, cfg: &FrameConfig) -> Result<Self> {
        let interior = curve.derivatives(&cfg.differentiation)?.interior();
        Ok(Self {
            dimension: curve.dimension().get() as u8,
            samples: curve.len(),
            start: curve.start(),
            step: curve.step(),
            length: curve.length(),
            interior: (interior.start, interior.end),
            differentiation: cfg.differentiation,
        })
    }
}

#[derive(Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    input: &'a SpecDocument,
    tolerance: f64,
    grid: Grid,
}

struct Loaded {
    doc: SpecDocument,
    spec: CurveSpec,
    curve: SampledCurve,
}

fn load(path: &Path) -> Result<Loaded> {
    let (doc, spec) = io::load_spec(path)?;
    let curve = sample_curve(&spec)?;
    Ok(Loaded { doc, spec, curve })
}

/// Runs one command, writing its files into `config.out`.
pub fn run(config: &RunConfig) -> Result<()> {
    config.validate()?;
    let cfg = FrameConfig::default();
    let input = load(&config.input)?;
    fs::create_dir_all(&config.out)
        .map_err(|e| Error::Output { path: config.out.display().to_string(), message: e.to_string() })?;
    let header = |curve: &SampledCurve, doc| -> Result<Header> {
        Ok(Header {
            tool: TOOL,
            version: VERSION,
            command: config.command.name(),
            input: doc,
            tolerance: config.tol,
            grid: Grid::of(curve, &cfg)?,
        })
    };
    let out = |name: &str| config.out.join(name);
    match config.command {
        Command::Frame => cmd_frame(config, &input, &cfg, header(&input.curve, &input.doc)?),
        Command::Check => cmd_check(config, &input, &cfg, header(&input.curve, &input.doc)?),
        Command::Partner => {
            let lambda = config.lambda.expect("validated");
            let partner = match input.curve.dimension() {
                Dimension::Three => construct_partner_3d(&input.curve, lambda, &cfg)?,
                Dimension::Four => construct_partner_4d(&input.curve, lambda, &cfg)?,
            };
            io::write_curve_csv(&out("partner.csv"), &partner.beta)?;
            io::write_json(&out("partner_spec.json"), &SpecDocument::sampled(&partner.beta, "partner.csv"))?;
            io::write_map_csv(&out("correspondence.csv"), &partner.map)?;
            let pair = verify(config, &input.curve, &partner.beta, &partner.map, &cfg)?;
            let report = PartnerReport {
                header: header(&input.curve, &input.doc)?,
                lambda,
                partner: PartnerSummary::of(&partner),
                pair: &pair,
            };
            io::write_json(&out("partner_report.json"), &report)
        }
        Command::Verify => {
            let second = load(config.input2.as_deref().expect("validated"))?;
            let map = io::read_map_csv(config.map.as_deref().expect("validated"))?;
            let pair = verify(config, &input.curve, &second.curve, &map, &cfg)?;
            let report = VerifyReport {
                header: header(&input.curve, &input.doc)?,
                input2: &second.doc,
                grid2: Grid::of(&second.curve, &cfg)?,
                correspondence_rows: map.len(),
                pair: &pair,
            };
            io::write_json(&out("verify_report.json"), &report)
        }
        Command::Synthesize => cmd_synthesize(config, &input, &cfg, header(&input.curve, &input.doc)?),
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum PairReport {
    E3(PairReport3),
    E4(PairReport4),
}

fn verify(
    config: &RunConfig,
    alpha: &SampledCurve,
    beta: &SampledCurve,
    map: &CorrespondenceMap,
    cfg: &FrameConfig,
) -> Result<PairReport> {
    let report = match alpha.dimension() {
        Dimension::Three => {
            let r = verify_pair_3d(alpha, beta, map, config.tol, cfg)?;
            io::write_pair_profile_3d(&config.out.join("pair_profile.csv"), &r.samples)?;
            PairReport::E3(r)
        }
        Dimension::Four => {
            let r = verify_pair_4d(alpha, beta, map, config.tol, cfg)?;
            io::write_pair_profile_4d(&config.out.join("pair_profile.csv"), &r.samples)?;
            PairReport::E4(r)
        }
    };
    Ok(report)
}

fn cmd_frame(config: &RunConfig, input: &Loaded, cfg: &FrameConfig, header: Header) -> Result<()> {
    let curve = &input.curve;
    match (curve.dimension(), config.format) {
        (Dimension::Three, Format::Csv) => {
            let series = frames_3d(curve, cfg)?;
            series.require_complete()?;
            io::write_frames_3d(&config.out.join("frames.csv"), curve, &series)
        }
        (Dimension::Four, Format::Csv) => {
            let series = frames_4d(curve, cfg)?;
            series.require_complete()?;
            io::write_frames_4d(&config.out.join("frames.csv"), curve, &series)
        }
        (Dimension::Three, Format::Json) => {
            let series = frames_3d(curve, cfg)?;
            series.require_complete()?;
            io::write_json(&config.out.join("frames.json"), &FramesDoc { header, frames: &series.frames })
        }
        (Dimension::Four, Format::Json) => {
            let series = frames_4d(curve, cfg)?;
            series.require_complete()?;
            io::write_json(&config.out.join("frames.json"), &FramesDoc { header, frames: &series.frames })
        }
    }
}

#[derive(Serialize)]
struct FramesDoc<'a, F> {
    #[serde(flatten)]
    header: Header<'a>,
    frames: &'a [F],
}

fn complete_profile(curve: &SampledCurve, cfg: &FrameConfig) -> Result<CurvatureProfile> {
    let profile = curvature_profile(curve, cfg)?;
    if let Some(gap) = profile.gaps.first() {
        return Err(gap.to_error());
    }
    Ok(profile)
}

#[derive(Serialize)]
struct CheckReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    equality: &'static str,
    #[serde(flatten)]
    estimate: &'a MannheimEstimate,
}

fn cmd_check(config: &RunConfig, input: &Loaded, cfg: &FrameConfig, header: Header) -> Result<()> {
    let profile = complete_profile(&input.curve, cfg)?;
    let (estimate, equality) = match profile.dimension {
        Dimension::Three => (mannheim_lambda_3d(&profile, config.tol)?, "k = lambda (k^2 + r^2)"),
        Dimension::Four => (mannheim_lambda_4d(&profile, config.tol)?, "K = lambda (K^2 + k^2)"),
    };
    io::write_json(&config.out.join("check.json"), &CheckReport { header, equality, estimate: &estimate })?;
    if config.format == Format::Csv {
        io::write_lambda_csv(
            &config.out.join("lambda_profile.csv"),
            &profile.s,
            &estimate.per_sample,
            &estimate.residuals,
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PartnerSummary {
    samples: usize,
    step: f64,
    length: f64,
    correspondence_rows: usize,
    formula_speed_min: f64,
    formula_speed_max: f64,
    /// Max `|measured - formula|` partner speed.
    speed_discrepancy_max: f64,
}

impl PartnerSummary {
    fn of(p: &Partner) -> Self {
        let fold = |init: f64, f: fn(f64, f64) -> f64| p.formula_speed.iter().copied().fold(init, f);
        Self {
            samples: p.beta.len(),
            step: p.beta.step(),
            length: p.beta.length(),
            correspondence_rows: p.map.len(),
            formula_speed_min: fold(f64::INFINITY, f64::min),
            formula_speed_max: fold(0.0, f64::max),
            speed_discrepancy_max: p
                .formula_speed
                .iter()
                .zip(&p.measured_speed)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        }
    }
}

#[derive(Serialize)]
struct PartnerReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    lambda: f64,
    partner: PartnerSummary,
    pair: &'a PairReport,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    input2: &'a SpecDocument,
    grid2: Grid,
    correspondence_rows: usize,
    pair: &'a PairReport,
}

#[derive(Serialize)]
struct RoundTrip {
    names: [&'static str; 3],
    /// Max `|recovered - prescribed|` per curvature; bitorsion is absent in E3.
    max_error: [Option<f64>; 3],
    samples: usize,
}

#[derive(Serialize)]
struct SynthesizeReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    gram_drift: f64,
    gram_residual: f64,
    round_trip: RoundTrip,
}

fn cmd_synthesize(config: &RunConfig, input: &Loaded, cfg: &FrameConfig, header: Header) -> Result<()> {
    let CurveKind::FromCurvatures { profile, seed } = input.spec.kind() else {
        return Err(Error::InvalidSpec(format!(
            "synthesize needs a from_curvatures spec, got {}",
            input.spec.kind().name()
        )));
    };
    let seed: Vec<Quaternion> = match seed {
        Some(seed) => seed.clone(),
        None => (0..input.spec.dimension().get()).map(Quaternion::basis).collect(),
    };
    let synthesis = synthesize_on(profile, &seed, input.spec.domain(), input.spec.samples())?;
    let curve = &synthesis.curve;
    let recovered = complete_profile(curve, cfg)?;
    let mut max_error = [Some(0.0f64), Some(0.0), recovered.bitorsion.as_ref().map(|_| 0.0)];
    for (j, s) in recovered.s.iter().enumerate() {
        let want = profile.eval(*s)?;
        let got =
            [Some(recovered.curvature[j]), Some(recovered.torsion[j]), recovered.bitorsion.as_ref().map(|b| b[j])];
        for m in 0..3 {
            if let (Some(acc), Some(g)) = (max_error[m].as_mut(), got[m]) {
                *acc = acc.max((g - want[m]).abs());
            }
        }
    }
    let names = match curve.dimension() {
        Dimension::Three => ["k", "r", "bitorsion"],
        Dimension::Four => ["K", "k", "bitorsion"],
    };
    io::write_curve_csv(&config.out.join("curve.csv"), curve)?;
    io::write_json(&config.out.join("curve_spec.json"), &SpecDocument::sampled(curve, "curve.csv"))?;
    let report = SynthesizeReport {
        header,
        gram_drift: synthesis.gram_drift,
        gram_residual: synthesis.gram_residual,
        round_trip: RoundTrip { names, max_error, samples: recovered.len() },
    };
    io::write_json(&config.out.join("synthesize.json"), &report)
}
