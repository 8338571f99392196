//! Command line front end: precomputed coupling matrices, beam reports,
//! seeded scene simulation, and closed-form diffuseness sweeps.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sectorfield::beam::{AxisymmetricProfile, Beam, BeamKind};
use sectorfield::coupling::CouplingMatrices;
use sectorfield::energetics::PhysicalConstants;
use sectorfield::formats::{
    beam_from_json, beam_report_to_json, constants_from_json, estimate_to_json, frames_to_json,
    frames_to_shf, matrices_to_json, scene_from_json, sweep_to_csv, sweep_to_json, SweepRow,
};
use sectorfield::reference::{diffuseness_surface, doa_bias};
use sectorfield::scene::{estimate_frames, synthesize};
use sectorfield::sh::SphericalDirection;
use sectorfield::Error;

#[derive(Parser)]
#[command(
    name = "sectorfield",
    version,
    about = "Energetic analysis of sound fields through spherical-harmonic beams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the velocity coupling matrices for a beam order
    Matrices {
        /// Beam order the matrices act on
        #[arg(long)]
        order: u32,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report directivity factor, arrival moment, and pattern samples
    Beam {
        /// Beam file or inline preset (see --help for the syntax)
        #[arg(long, value_name = "FILE|preset:name[:order][@theta,phi]")]
        beam: String,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize a scene, run the estimator, and write the report
    Simulate {
        /// Scene description file
        #[arg(long)]
        scene: PathBuf,
        /// Beam file or inline preset
        #[arg(long, value_name = "FILE|preset:name[:order][@theta,phi]")]
        beam: String,
        /// Frame count, overriding the scene file
        #[arg(long)]
        frames: Option<u64>,
        /// RNG seed, overriding the scene file
        #[arg(long)]
        seed: Option<u64>,
        /// Physical constants file (speed of sound, air density)
        #[arg(long)]
        constants: Option<PathBuf>,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the synthesized frames (.shf binary, else JSON)
        #[arg(long)]
        dump_frames: Option<PathBuf>,
    },
    /// Sweep the closed-form diffuseness and bias over (gamma, alpha)
    Predict {
        /// Beam file or inline preset; must describe an axisymmetric profile
        #[arg(long, value_name = "FILE|preset:name[:order][@theta,phi]")]
        beam: String,
        /// Direct-to-diffuse ratios (inf allowed)
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 1.0, 4.0])]
        gammas: Vec<f64>,
        /// Arrival angles off the beam axis, in degrees
        #[arg(long, value_delimiter = ',')]
        alphas_deg: Option<Vec<f64>>,
        /// Output format
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

enum CliError {
    Domain(Error),
    Io { path: PathBuf, source: std::io::Error },
    Usage(String),
}

impl CliError {
    /// 2 for anything the caller wrote wrong, 3 for inputs that are valid
    /// but lead nowhere numerically, 4 for the filesystem.
    fn code(&self) -> u8 {
        match self {
            CliError::Domain(
                Error::ZeroPattern
                | Error::UndefinedDiffuseness
                | Error::UndefinedDoa
                | Error::UndefinedBias,
            ) => 3,
            CliError::Domain(_) | CliError::Usage(_) => 2,
            CliError::Io { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(err) => err.fmt(f),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Domain(err)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Matrices { order, out } => {
            let matrices = CouplingMatrices::for_order(order)?;
            write_text(out.as_deref(), &matrices_to_json(&matrices))
        }
        Command::Beam { beam, out } => {
            let beam = load_beam(&beam)?;
            write_text(out.as_deref(), &beam_report_to_json(&beam)?)
        }
        Command::Simulate {
            scene,
            beam,
            frames,
            seed,
            constants,
            out,
            dump_frames,
        } => {
            let spec = scene_from_json(&read_file(&scene)?, frames, seed)?;
            let beam = load_beam(&beam)?;
            let constants = load_constants(constants.as_deref())?;
            let set = synthesize(&spec);
            let estimate = estimate_frames(&set, &beam, &constants)?;
            write_text(out.as_deref(), &estimate_to_json(&estimate, spec.frames()))?;
            if let Some(path) = dump_frames {
                if path.extension().is_some_and(|e| e == "shf") {
                    write_bytes(&path, &frames_to_shf(&set))?;
                } else {
                    write_text(Some(&path), &frames_to_json(&set))?;
                }
            }
            Ok(())
        }
        Command::Predict {
            beam,
            gammas,
            alphas_deg,
            format,
            out,
        } => {
            let beam = load_beam(&beam)?;
            let profile = beam.profile().ok_or_else(|| {
                CliError::Usage(
                    "the sweep closed forms need an axisymmetric profile; \
                     free-form coefficient beams are not supported here"
                        .into(),
                )
            })?;
            let alphas = alphas_deg.unwrap_or_else(|| (0..=18).map(|k| 5.0 * k as f64).collect());
            let mut rows = Vec::with_capacity(gammas.len() * alphas.len());
            for &gamma in &gammas {
                for &alpha_deg in &alphas {
                    let alpha = alpha_deg.to_radians();
                    rows.push(SweepRow {
                        gamma,
                        alpha_deg,
                        diffuseness: diffuseness_surface(gamma, alpha, profile)?,
                        bias_deg: doa_bias(gamma, alpha, profile)?.to_degrees(),
                    });
                }
            }
            let text = match format {
                Format::Json => sweep_to_json(&rows),
                Format::Csv => sweep_to_csv(&rows),
            };
            write_text(out.as_deref(), &text)
        }
    }
}

/// Resolves a `--beam` argument: either a JSON file path or an inline
/// `preset:name[:order][@theta,phi]` description.
fn load_beam(spec: &str) -> Result<Beam, CliError> {
    match spec.strip_prefix("preset:") {
        Some(rest) => beam_from_preset(rest),
        None => Ok(beam_from_json(&read_file(Path::new(spec))?)?),
    }
}

fn beam_from_preset(rest: &str) -> Result<Beam, CliError> {
    let (head, steer) = match rest.split_once('@') {
        Some((head, dir)) => (head, Some(parse_direction(dir)?)),
        None => (rest, None),
    };
    let (name, order) = match head.split_once(':') {
        Some((name, order)) => {
            let order = order.parse::<u32>().map_err(|_| {
                CliError::Usage(format!("preset order '{order}' is not a whole number"))
            })?;
            (name, Some(order))
        }
        None => (head, None),
    };
    let kind = BeamKind::from_name(name)
        .ok_or_else(|| CliError::Usage(format!("unknown preset '{name}'")))?;
    let profile = AxisymmetricProfile::preset(kind, order.unwrap_or(kind.default_order()))?;
    Ok(Beam::from_profile(profile, steer)?)
}

fn parse_direction(text: &str) -> Result<SphericalDirection, CliError> {
    let (theta, phi) = text.split_once(',').ok_or_else(|| {
        CliError::Usage(format!("steer direction '{text}' must be theta,phi in radians"))
    })?;
    let parse = |part: &str| {
        part.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("'{part}' is not a number")))
    };
    Ok(SphericalDirection::new(parse(theta)?, parse(phi)?)?)
}

fn load_constants(path: Option<&Path>) -> Result<PhysicalConstants, CliError> {
    match path {
        Some(path) => Ok(constants_from_json(&read_file(path)?)?),
        None => Ok(PhysicalConstants::default()),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_bytes(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
