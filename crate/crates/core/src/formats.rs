//! On-disk representations: strict JSON schemas for inputs, deterministic
//! JSON/CSV emitters for outputs, and a packed binary frame format.
//!
//! Emitters build the text by hand with a fixed key order and floats at 17
//! significant digits, so identical inputs always produce identical bytes
//! and every double survives a round trip exactly. Readers reject unknown
//! fields outright; a tolerated typo in a config is a silent wrong answer
//! later.

use std::fmt::Write as _;

use ndarray::Array2;
use num_complex::Complex64;
use serde::Deserialize;

use crate::beam::{AxisymmetricProfile, Beam, BeamKind};
use crate::coupling::CouplingMatrices;
use crate::energetics::{EnergeticEstimate, PhysicalConstants};
use crate::error::{Error, Result};
use crate::reference::MixtureParams;
use crate::scene::{FrameSet, PlaneWaveSource, SceneSpec};
use crate::sh::{coefficient_count, ShVector, SphericalDirection};

/// Magic prefix of the binary frame format.
pub const SHF_MAGIC: &[u8; 4] = b"SHF1";

/// Lossless double formatting: 17 significant digits, exponent notation.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

fn push_float(out: &mut String, value: f64) {
    let _ = write!(out, "{value:.16e}");
}

fn push_complex_pair(out: &mut String, value: Complex64) {
    out.push('[');
    push_float(out, value.re);
    out.push(',');
    push_float(out, value.im);
    out.push(']');
}

fn push_direction(out: &mut String, dir: &SphericalDirection) {
    out.push_str("{\"theta\":");
    push_float(out, dir.theta());
    out.push_str(",\"phi\":");
    push_float(out, dir.phi());
    out.push('}');
}

// ---------------------------------------------------------------------------
// Coupling matrices

fn push_matrix(out: &mut String, matrix: &Array2<Complex64>) {
    out.push('[');
    for (i, value) in matrix.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_complex_pair(out, *value);
    }
    out.push(']');
}

/// Serializes the three coupling matrices, entries row-major.
pub fn matrices_to_json(matrices: &CouplingMatrices) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\"order\":{},\"ax\":", matrices.order());
    push_matrix(&mut out, matrices.ax());
    out.push_str(",\"ay\":");
    push_matrix(&mut out, matrices.ay());
    out.push_str(",\"az\":");
    push_matrix(&mut out, matrices.az());
    out.push_str("}\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatricesFile {
    order: u32,
    ax: Vec<[f64; 2]>,
    ay: Vec<[f64; 2]>,
    az: Vec<[f64; 2]>,
}

fn matrix_from_pairs(order: u32, pairs: &[[f64; 2]]) -> Result<Array2<Complex64>> {
    let rows = coefficient_count(order + 1);
    let cols = coefficient_count(order);
    if pairs.len() != rows * cols {
        return Err(Error::CoefficientCount {
            order,
            expected: rows * cols,
            actual: pairs.len(),
        });
    }
    let data: Vec<Complex64> = pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    Array2::from_shape_vec((rows, cols), data)
        .map_err(|e| Error::parse("matrices", e))
}

pub fn matrices_from_json(json: &str) -> Result<CouplingMatrices> {
    let file: MatricesFile =
        serde_json::from_str(json).map_err(|e| Error::parse("matrices", e))?;
    if file.order + 1 > crate::sh::MAX_ORDER {
        return Err(Error::OrderOverflow {
            order: file.order,
            max: crate::sh::MAX_ORDER - 1,
        });
    }
    CouplingMatrices::from_parts(
        file.order,
        matrix_from_pairs(file.order, &file.ax)?,
        matrix_from_pairs(file.order, &file.ay)?,
        matrix_from_pairs(file.order, &file.az)?,
    )
}

// ---------------------------------------------------------------------------
// Beam descriptions

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectionFile {
    theta: f64,
    phi: f64,
}

impl DirectionFile {
    fn build(&self) -> Result<SphericalDirection> {
        SphericalDirection::new(self.theta, self.phi)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BeamFile {
    kind: Option<String>,
    order: Option<u32>,
    steer: Option<DirectionFile>,
    coeffs: Option<Vec<[f64; 2]>>,
}

/// Builds a beam from its JSON description: either a named preset with an
/// optional order and steer direction, or a raw coefficient vector.
pub fn beam_from_json(json: &str) -> Result<Beam> {
    let file: BeamFile = serde_json::from_str(json).map_err(|e| Error::parse("beam", e))?;
    match (&file.kind, &file.coeffs) {
        (Some(_), Some(_)) | (None, None) => Err(Error::parse(
            "beam",
            "exactly one of \"kind\" and \"coeffs\" must be given",
        )),
        (Some(name), None) => {
            let kind = BeamKind::from_name(name)
                .ok_or_else(|| Error::parse("beam", format!("unknown kind \"{name}\"")))?;
            let order = file.order.unwrap_or_else(|| kind.default_order());
            let profile = AxisymmetricProfile::preset(kind, order)?;
            let steer = file.steer.as_ref().map(DirectionFile::build).transpose()?;
            Beam::from_profile(profile, steer)
        }
        (None, Some(pairs)) => {
            if file.steer.is_some() {
                return Err(Error::parse(
                    "beam",
                    "\"steer\" applies to preset kinds only; raw coefficients carry their own orientation",
                ));
            }
            let order = match file.order {
                Some(order) => order,
                None => infer_order(pairs.len())?,
            };
            let coeffs = pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
            Beam::from_pattern(ShVector::new(order, coeffs)?)
        }
    }
}

fn infer_order(count: usize) -> Result<u32> {
    let side = (count as f64).sqrt().round() as usize;
    if side == 0 || side * side != count {
        return Err(Error::parse(
            "beam",
            format!("coefficient count {count} is not a square number"),
        ));
    }
    Ok((side - 1) as u32)
}

/// Report of a beam's scalar characteristics plus, for axisymmetric
/// beams, the gain table over the off-axis angle in 5 degree steps.
pub fn beam_report_to_json(beam: &Beam) -> Result<String> {
    let q = beam.directivity_factor()?;
    let k = beam.doa_moment();
    let k_norm = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let mut out = String::new();
    out.push_str("{\"Q\":");
    push_float(&mut out, q);
    out.push_str(",\"k\":[");
    for (i, value) in k.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_float(&mut out, *value);
    }
    out.push_str("],\"K\":");
    push_float(&mut out, k_norm);
    out.push_str(",\"pattern\":");
    match beam.profile() {
        Some(profile) => {
            out.push('[');
            for (i, step) in (0..=36).enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let alpha_deg = (step * 5) as f64;
                let _ = write!(out, "{{\"alpha_deg\":{alpha_deg},\"value\":");
                push_float(&mut out, profile.value_at(alpha_deg.to_radians()));
                out.push('}');
            }
            out.push(']');
        }
        None => out.push_str("null"),
    }
    out.push_str("}\n");
    Ok(out)
}

// ---------------------------------------------------------------------------
// Scenes and constants

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WaveFile {
    doa: DirectionFile,
    psd: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    order: u32,
    #[serde(default)]
    waves: Vec<WaveFile>,
    #[serde(default)]
    diffuse_psd: f64,
    frames: Option<u64>,
    seed: Option<u64>,
}

/// Parses a scene description. Frame count and seed may come from the
/// file or the overrides; an override always wins.
pub fn scene_from_json(
    json: &str,
    frames_override: Option<u64>,
    seed_override: Option<u64>,
) -> Result<SceneSpec> {
    let file: SceneFile = serde_json::from_str(json).map_err(|e| Error::parse("scene", e))?;
    let frames = frames_override.or(file.frames).ok_or_else(|| {
        Error::parse("scene", "frame count given neither in the file nor as a flag")
    })?;
    let seed = seed_override
        .or(file.seed)
        .ok_or_else(|| Error::parse("scene", "seed given neither in the file nor as a flag"))?;
    let waves = file
        .waves
        .iter()
        .map(|w| {
            Ok(PlaneWaveSource {
                doa: w.doa.build()?,
                psd: w.psd,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SceneSpec::new(file.order, waves, file.diffuse_psd, frames, seed)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsFile {
    c: Option<f64>,
    rho0: Option<f64>,
}

/// Parses medium constants; missing fields fall back to the defaults.
pub fn constants_from_json(json: &str) -> Result<PhysicalConstants> {
    let file: ConstantsFile =
        serde_json::from_str(json).map_err(|e| Error::parse("constants", e))?;
    PhysicalConstants::new(
        file.c.unwrap_or(PhysicalConstants::DEFAULT_SPEED_OF_SOUND),
        file.rho0.unwrap_or(PhysicalConstants::DEFAULT_AIR_DENSITY),
    )
}

// ---------------------------------------------------------------------------
// Estimates

/// Serializes an estimate together with the frame count it came from.
pub fn estimate_to_json(estimate: &EnergeticEstimate, frames: u64) -> String {
    let mut out = String::new();
    out.push_str("{\"intensity\":[");
    for (i, value) in estimate.intensity.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_float(&mut out, *value);
    }
    out.push_str("],\"energy\":");
    push_float(&mut out, estimate.energy);
    out.push_str(",\"diffuseness\":");
    push_float(&mut out, estimate.diffuseness);
    out.push_str(",\"doa\":");
    match &estimate.doa {
        Some(dir) => push_direction(&mut out, dir),
        None => out.push_str("null"),
    }
    let _ = write!(out, ",\"frames\":{frames}}}");
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// Prediction sweeps

/// One evaluated point of the mixture sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    pub alpha_deg: f64,
    pub diffuseness: f64,
    pub bias_deg: f64,
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("gamma,alpha_deg,diffuseness,bias_deg\n");
    for row in rows {
        push_float(&mut out, row.gamma);
        out.push(',');
        push_float(&mut out, row.alpha_deg);
        out.push(',');
        push_float(&mut out, row.diffuseness);
        out.push(',');
        push_float(&mut out, row.bias_deg);
        out.push('\n');
    }
    out
}

pub fn sweep_to_json(rows: &[SweepRow]) -> String {
    let mut out = String::from("{\"rows\":[");
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("{\"gamma\":");
        push_float(&mut out, row.gamma);
        out.push_str(",\"alpha_deg\":");
        push_float(&mut out, row.alpha_deg);
        out.push_str(",\"diffuseness\":");
        push_float(&mut out, row.diffuseness);
        out.push_str(",\"bias_deg\":");
        push_float(&mut out, row.bias_deg);
        out.push('}');
    }
    out.push_str("]}\n");
    out
}

// ---------------------------------------------------------------------------
// Frame sets

/// Serializes a frame set with its header metadata; coefficients as
/// nested [re, im] arrays, one inner array per frame.
pub fn frames_to_json(set: &FrameSet) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\"order\":{},\"frames\":{},\"seed\":{},\"generator\":\"{}\",\"data\":[",
        set.order(),
        set.len(),
        set.seed(),
        set.generator()
    );
    for (i, frame) in set.frames().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for (j, value) in frame.coeffs().iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            push_complex_pair(&mut out, *value);
        }
        out.push(']');
    }
    out.push_str("]}\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FramesFile {
    order: u32,
    frames: u64,
    seed: u64,
    generator: String,
    data: Vec<Vec<[f64; 2]>>,
}

pub fn frames_from_json(json: &str) -> Result<FrameSet> {
    let file: FramesFile = serde_json::from_str(json).map_err(|e| Error::parse("frames", e))?;
    if file.data.len() as u64 != file.frames {
        return Err(Error::parse(
            "frames",
            format!(
                "header declares {} frames but data holds {}",
                file.frames,
                file.data.len()
            ),
        ));
    }
    let frames = file
        .data
        .iter()
        .map(|pairs| {
            let coeffs = pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
            ShVector::new(file.order, coeffs)
        })
        .collect::<Result<Vec<_>>>()?;
    FrameSet::from_parts(file.order, file.seed, file.generator, frames, None)
}

/// Packs a frame set into the binary layout: magic, little-endian header
/// (order u32, frame count u64, seed u64, generator length u16 + bytes),
/// then per frame the coefficients as little-endian re/im doubles.
pub fn frames_to_shf(set: &FrameSet) -> Vec<u8> {
    let per_frame = coefficient_count(set.order());
    let name = set.generator().as_bytes();
    let mut out = Vec::with_capacity(4 + 22 + name.len() + set.len() * per_frame * 16);
    out.extend_from_slice(SHF_MAGIC);
    out.extend_from_slice(&set.order().to_le_bytes());
    out.extend_from_slice(&(set.len() as u64).to_le_bytes());
    out.extend_from_slice(&set.seed().to_le_bytes());
    out.extend_from_slice(&(name.len() as u16).to_le_bytes());
    out.extend_from_slice(name);
    for frame in set.frames() {
        for value in frame.coeffs() {
            out.extend_from_slice(&value.re.to_le_bytes());
            out.extend_from_slice(&value.im.to_le_bytes());
        }
    }
    out
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.at.checked_add(len).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let slice = &self.bytes[self.at..end];
                self.at = end;
                Ok(slice)
            }
            None => Err(Error::parse("frames", "file truncated")),
        }
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn frames_from_shf(bytes: &[u8]) -> Result<FrameSet> {
    let mut reader = ByteReader { bytes, at: 0 };
    if reader.take(4)? != SHF_MAGIC {
        return Err(Error::parse("frames", "not a frame file (bad magic)"));
    }
    let order = reader.u32()?;
    if order > crate::sh::MAX_ORDER {
        return Err(Error::OrderOverflow {
            order,
            max: crate::sh::MAX_ORDER,
        });
    }
    let frame_count = reader.u64()?;
    let seed = reader.u64()?;
    let name_len = reader.u16()? as usize;
    let generator = std::str::from_utf8(reader.take(name_len)?)
        .map_err(|e| Error::parse("frames", e))?
        .to_string();
    let per_frame = coefficient_count(order);
    let expected = frame_count
        .checked_mul(per_frame as u64 * 16)
        .ok_or_else(|| Error::parse("frames", "frame count overflows"))?;
    if (bytes.len() - reader.at) as u64 != expected {
        return Err(Error::parse(
            "frames",
            format!(
                "payload holds {} bytes but the header implies {expected}",
                bytes.len() - reader.at
            ),
        ));
    }
    let mut frames = Vec::with_capacity(frame_count as usize);
    for _ in 0..frame_count {
        let mut coeffs = Vec::with_capacity(per_frame);
        for _ in 0..per_frame {
            let re = reader.f64()?;
            let im = reader.f64()?;
            coeffs.push(Complex64::new(re, im));
        }
        frames.push(ShVector::new(order, coeffs)?);
    }
    FrameSet::from_parts(order, seed, generator, frames, None)
}

// ---------------------------------------------------------------------------
// Mixture parameters

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureFile {
    p_pw: f64,
    p_df: f64,
    doa: DirectionFile,
}

pub fn mixture_from_json(json: &str) -> Result<MixtureParams> {
    let file: MixtureFile = serde_json::from_str(json).map_err(|e| Error::parse("mixture", e))?;
    MixtureParams::new(file.p_pw, file.p_df, file.doa.build()?)
}
