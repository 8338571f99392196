//! Weighted pressure/velocity extraction and the energetic quantities
//! built from them: active intensity, energy density, diffuseness, and the
//! arrival direction implied by the intensity vector.
//!
//! Two layers exist side by side: per-frame quantities from a single sample
//! and ensemble quantities from averaged spectral moments. Both share the
//! same formulas with products replaced by their expectations.

use num_complex::Complex64;

use crate::beam::Beam;
use crate::error::{Error, Result};
use crate::sh::{inner_product, ShVector, SphericalDirection};

/// Medium parameters. The impedance is derived once at construction so the
/// three fields can never drift apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    c: f64,
    rho0: f64,
    z0: f64,
}

impl PhysicalConstants {
    pub const DEFAULT_SPEED_OF_SOUND: f64 = 343.0;
    pub const DEFAULT_AIR_DENSITY: f64 = 1.2041;

    pub fn new(c: f64, rho0: f64) -> Result<Self> {
        if !(c.is_finite() && rho0.is_finite() && c > 0.0 && rho0 > 0.0) {
            return Err(Error::InvalidConstants);
        }
        Ok(Self {
            c,
            rho0,
            z0: c * rho0,
        })
    }

    pub fn speed_of_sound(&self) -> f64 {
        self.c
    }

    pub fn air_density(&self) -> f64 {
        self.rho0
    }

    pub fn impedance(&self) -> f64 {
        self.z0
    }
}

impl Default for PhysicalConstants {
    /// Air at roughly 20 degrees Celsius.
    fn default() -> Self {
        Self::new(Self::DEFAULT_SPEED_OF_SOUND, Self::DEFAULT_AIR_DENSITY)
            .expect("default constants are positive")
    }
}

/// One frame of beam-domain signals: pressure plus the three unnormalized
/// minus-velocity components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BFormatSample {
    pub pressure: Complex64,
    pub velocity: [Complex64; 3],
}

impl BFormatSample {
    /// Squared magnitude of the whole sample, `|p|^2 + v^H v`.
    fn total_power(&self) -> f64 {
        self.pressure.norm_sqr() + self.velocity.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// The pressure-velocity cross products `p* v`.
    fn cross(&self) -> [Complex64; 3] {
        self.velocity.map(|v| self.pressure.conj() * v)
    }
}

/// Averaged second-order statistics of a frame sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMoments {
    s_pp: f64,
    s_vv: f64,
    s_pv: [Complex64; 3],
    frames: u64,
}

impl SpectralMoments {
    pub fn from_values(s_pp: f64, s_vv: f64, s_pv: [Complex64; 3], frames: u64) -> Result<Self> {
        if frames == 0 {
            return Err(Error::EmptyFrames);
        }
        if !(s_pp.is_finite() && s_vv.is_finite() && s_pp >= 0.0 && s_vv >= 0.0) {
            return Err(Error::NonFiniteCoefficient);
        }
        Ok(Self {
            s_pp,
            s_vv,
            s_pv,
            frames,
        })
    }

    pub fn pressure_psd(&self) -> f64 {
        self.s_pp
    }

    pub fn velocity_psd(&self) -> f64 {
        self.s_vv
    }

    pub fn cross_spectrum(&self) -> [Complex64; 3] {
        self.s_pv
    }

    pub fn frames(&self) -> u64 {
        self.frames
    }

    /// Combines two partial averages into the average of the union,
    /// weighting each side by its frame count.
    pub fn merge(&self, other: &SpectralMoments) -> SpectralMoments {
        let total = self.frames + other.frames;
        let wa = self.frames as f64 / total as f64;
        let wb = other.frames as f64 / total as f64;
        let s_pv = std::array::from_fn(|axis| wa * self.s_pv[axis] + wb * other.s_pv[axis]);
        SpectralMoments {
            s_pp: wa * self.s_pp + wb * other.s_pp,
            s_vv: wa * self.s_vv + wb * other.s_vv,
            s_pv,
            frames: total,
        }
    }
}

/// Energetic summary of a field as seen through one beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergeticEstimate {
    /// Active intensity vector. Points opposite to the arrival direction.
    pub intensity: [f64; 3],
    /// Total energy density, always nonnegative.
    pub energy: f64,
    /// In [0, 1]: zero for a single propagating wave, one for no net flow.
    pub diffuseness: f64,
    /// Arrival direction, absent when the intensity vanishes.
    pub doa: Option<SphericalDirection>,
}

/// Projects one input frame onto a beam's pressure and velocity patterns.
/// The input must carry one order more than the beam because the velocity
/// patterns live there.
pub fn weighted_signals(beam: &Beam, input: &ShVector) -> Result<BFormatSample> {
    let expected = beam.order() + 1;
    if input.order() != expected {
        return Err(Error::OrderMismatch {
            expected,
            actual: input.order(),
        });
    }
    let pressure = inner_product(input, beam.pattern());
    let velocity_patterns = beam.velocity_patterns();
    let velocity = [
        inner_product(input, &velocity_patterns[0]),
        inner_product(input, &velocity_patterns[1]),
        inner_product(input, &velocity_patterns[2]),
    ];
    Ok(BFormatSample { pressure, velocity })
}

/// Energetics of a single frame.
pub fn instantaneous_energetics(
    sample: &BFormatSample,
    constants: &PhysicalConstants,
) -> Result<EnergeticEstimate> {
    energetics_from_products(sample.total_power(), &sample.cross(), constants)
}

/// Averages the second-order products of a frame sequence. Zero frames
/// contribute zeros; only the later diffuseness step rejects a silent total.
pub fn accumulate_moments(frames: &[BFormatSample]) -> Result<SpectralMoments> {
    if frames.is_empty() {
        return Err(Error::EmptyFrames);
    }
    let count = frames.len() as f64;
    let mut s_pp = 0.0;
    let mut s_vv = 0.0;
    let mut s_pv = [Complex64::ZERO; 3];
    for frame in frames {
        s_pp += frame.pressure.norm_sqr();
        s_vv += frame.velocity.iter().map(|v| v.norm_sqr()).sum::<f64>();
        for (acc, term) in s_pv.iter_mut().zip(frame.cross()) {
            *acc += term;
        }
    }
    Ok(SpectralMoments {
        s_pp: s_pp / count,
        s_vv: s_vv / count,
        s_pv: s_pv.map(|v| v / count),
        frames: frames.len() as u64,
    })
}

/// Energetics of an ensemble described by its moments.
pub fn statistical_energetics(
    moments: &SpectralMoments,
    constants: &PhysicalConstants,
) -> Result<EnergeticEstimate> {
    energetics_from_products(moments.s_pp + moments.s_vv, &moments.s_pv, constants)
}

/// Arrival direction implied by an intensity vector: the unit vector along
/// minus the intensity.
pub fn doa_from_intensity(intensity: &[f64; 3]) -> Result<SphericalDirection> {
    SphericalDirection::from_vector(intensity.map(|i| -i)).map_err(|_| Error::UndefinedDoa)
}

/// Shared by the instantaneous and statistical paths. `total` is
/// `|p|^2 + ||v||^2` (or its expectation), `cross` the `p* v` products.
fn energetics_from_products(
    total: f64,
    cross: &[Complex64; 3],
    constants: &PhysicalConstants,
) -> Result<EnergeticEstimate> {
    if total <= 0.0 {
        return Err(Error::UndefinedDiffuseness);
    }
    let half_impedance = 2.0 * constants.impedance();
    let intensity = cross.map(|c| -c.re / half_impedance);
    let energy = total / (4.0 * constants.air_density() * constants.speed_of_sound().powi(2));
    let flow: f64 = cross.iter().map(|c| c.re * c.re).sum::<f64>().sqrt();
    let diffuseness = (1.0 - 2.0 * flow / total).clamp(0.0, 1.0);
    let doa = doa_from_intensity(&intensity).ok();
    Ok(EnergeticEstimate {
        intensity,
        energy,
        diffuseness,
        doa,
    })
}
