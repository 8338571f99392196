//! Closed-form energetic predictions for the three reference fields: a
//! single plane wave, an isotropic diffuse field, and their mixture.
//!
//! These are the ground truth the Monte-Carlo estimators are checked
//! against. The mixture diffuseness also comes in a two-parameter form,
//! the surface over direct-to-diffuse ratio and arrival angle, together
//! with the arrival-bias angle it implies.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::beam::{AxisymmetricProfile, Beam};
use crate::energetics::{PhysicalConstants, SpectralMoments};
use crate::error::{Error, Result};
use crate::sh::SphericalDirection;

/// A plane wave plus isotropic diffuse field, described by their PSDs.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureParams {
    p_pw: f64,
    p_df: f64,
    doa: SphericalDirection,
}

impl MixtureParams {
    pub fn new(p_pw: f64, p_df: f64, doa: SphericalDirection) -> Result<Self> {
        for p in [p_pw, p_df] {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidPower { value: p });
            }
        }
        if p_pw == 0.0 && p_df == 0.0 {
            return Err(Error::NoPower);
        }
        Ok(Self { p_pw, p_df, doa })
    }

    pub fn plane_power(&self) -> f64 {
        self.p_pw
    }

    pub fn diffuse_power(&self) -> f64 {
        self.p_df
    }

    pub fn doa(&self) -> &SphericalDirection {
        &self.doa
    }

    /// Direct-to-diffuse ratio, infinite when no diffuse power is present.
    pub fn balance(&self) -> f64 {
        if self.p_df == 0.0 {
            f64::INFINITY
        } else {
            self.p_pw / self.p_df
        }
    }
}

/// Exact energetic quantities of a reference field seen through a beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePrediction {
    pub intensity: [f64; 3],
    pub energy: f64,
    pub diffuseness: f64,
    /// Angle between the intensity-implied arrival direction and the true
    /// plane-wave direction; absent when no plane wave or no net flow.
    pub bias: Option<f64>,
    /// Set when the weighted field carries no energy at all, in which case
    /// the reported diffuseness of zero is a convention, not a measurement.
    pub degenerate: bool,
}

impl ReferencePrediction {
    fn silent() -> Self {
        ReferencePrediction {
            intensity: [0.0; 3],
            energy: 0.0,
            diffuseness: 0.0,
            bias: None,
            degenerate: true,
        }
    }
}

/// Weighted and unweighted views of the same mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixturePrediction {
    pub weighted: ReferencePrediction,
    pub unweighted: ReferencePrediction,
}

/// A single plane wave of PSD `p_pw` arriving from `doa`, as seen through
/// `beam`: everything scales with the squared pattern gain and the field
/// stays perfectly directional.
pub fn predict_plane_wave(
    p_pw: f64,
    doa: &SphericalDirection,
    beam: &Beam,
    constants: &PhysicalConstants,
) -> Result<ReferencePrediction> {
    if !p_pw.is_finite() || p_pw < 0.0 {
        return Err(Error::InvalidPower { value: p_pw });
    }
    let gain_sq = beam.gain_at(doa).powi(2);
    let power = gain_sq * p_pw;
    if power == 0.0 {
        return Ok(ReferencePrediction::silent());
    }
    let n = doa.unit_vector();
    Ok(ReferencePrediction {
        intensity: n.map(|x| -power * x / (2.0 * constants.impedance())),
        energy: power / (2.0 * constants.air_density() * constants.speed_of_sound().powi(2)),
        diffuseness: 0.0,
        bias: Some(0.0),
        degenerate: false,
    })
}

/// An isotropic diffuse field of PSD `p_df` seen through `beam`. The beam
/// introduces a spurious intensity along minus its arrival moment and
/// pushes the diffuseness below one.
pub fn predict_diffuse(
    p_df: f64,
    beam: &Beam,
    constants: &PhysicalConstants,
) -> Result<ReferencePrediction> {
    if !p_df.is_finite() || p_df < 0.0 {
        return Err(Error::InvalidPower { value: p_df });
    }
    let q = beam.directivity_factor()?;
    if p_df == 0.0 {
        return Ok(ReferencePrediction::silent());
    }
    let k = beam.doa_moment();
    let k_norm = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    Ok(ReferencePrediction {
        intensity: k.map(|x| -p_df * x / (8.0 * PI * constants.impedance())),
        energy: p_df
            / (2.0 * constants.air_density() * constants.speed_of_sound().powi(2) * q),
        diffuseness: (1.0 - q * k_norm / (4.0 * PI)).clamp(0.0, 1.0),
        bias: None,
        degenerate: false,
    })
}

/// A plane wave plus diffuse field seen through `beam`, along with the
/// unweighted quantities of the same mixture.
pub fn predict_mixture(
    params: &MixtureParams,
    beam: &Beam,
    constants: &PhysicalConstants,
) -> Result<MixturePrediction> {
    let weighted = if params.p_df == 0.0 {
        predict_plane_wave(params.p_pw, &params.doa, beam, constants)?
    } else {
        let q = beam.directivity_factor()?;
        let gain_sq = beam.gain_at(&params.doa).powi(2);
        let n = params.doa.unit_vector();
        let k = beam.doa_moment();
        let direct = gain_sq * params.p_pw;
        let mut flow = [0.0; 3];
        for axis in 0..3 {
            flow[axis] = direct * n[axis] + params.p_df * k[axis] / (4.0 * PI);
        }
        let pressure_psd = direct + params.p_df / q;
        let flow_norm = (flow[0] * flow[0] + flow[1] * flow[1] + flow[2] * flow[2]).sqrt();
        let intensity = flow.map(|x| -x / (2.0 * constants.impedance()));
        let bias = if params.p_pw > 0.0 && flow_norm > 0.0 {
            Some(angle_between(&flow, &n))
        } else {
            None
        };
        ReferencePrediction {
            intensity,
            energy: pressure_psd
                / (2.0 * constants.air_density() * constants.speed_of_sound().powi(2)),
            diffuseness: (1.0 - flow_norm / pressure_psd).clamp(0.0, 1.0),
            bias,
            degenerate: false,
        }
    };
    let unweighted = unweighted_mixture(params, constants);
    Ok(MixturePrediction {
        weighted,
        unweighted,
    })
}

/// Exact second-order moments of the weighted mixture signals; feeding
/// these to the statistical estimator must reproduce `predict_mixture`.
pub fn mixture_moments(params: &MixtureParams, beam: &Beam) -> Result<SpectralMoments> {
    let q = beam.directivity_factor()?;
    let gain_sq = beam.gain_at(&params.doa).powi(2);
    let n = params.doa.unit_vector();
    let k = beam.doa_moment();
    let direct = gain_sq * params.p_pw;
    let s_pp = direct + params.p_df / q;
    let mut s_pv = [Complex64::ZERO; 3];
    for axis in 0..3 {
        s_pv[axis] = Complex64::new(
            direct * n[axis] + params.p_df * k[axis] / (4.0 * PI),
            0.0,
        );
    }
    SpectralMoments::from_values(s_pp, s_pp, s_pv, 1)
}

/// Angle between two nonzero vectors, stable near 0 and pi.
fn angle_between(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let cos = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    sin.atan2(cos)
}

fn unweighted_mixture(params: &MixtureParams, constants: &PhysicalConstants) -> ReferencePrediction {
    let total = params.p_pw + params.p_df;
    let n = params.doa.unit_vector();
    ReferencePrediction {
        intensity: n.map(|x| -params.p_pw * x / (2.0 * constants.impedance())),
        energy: total / (2.0 * constants.air_density() * constants.speed_of_sound().powi(2)),
        diffuseness: params.p_df / total,
        bias: if params.p_pw > 0.0 { Some(0.0) } else { None },
        degenerate: false,
    }
}

/// Scalar ingredients of the two-parameter closed forms: directivity
/// factor, arrival-moment magnitude, and squared gain at angle `alpha`.
fn surface_terms(profile: &AxisymmetricProfile, alpha: f64) -> Result<(f64, f64, f64)> {
    if !alpha.is_finite() {
        return Err(Error::NonFiniteAngle { value: alpha });
    }
    let q = profile.directivity_factor()?;
    let k_over_4pi = profile.doa_moment_magnitude()? / (4.0 * PI);
    let gain_sq = profile.value_at(alpha).powi(2);
    Ok((q, k_over_4pi, gain_sq))
}

fn check_balance(gamma: f64) -> Result<()> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::InvalidBalance { value: gamma });
    }
    Ok(())
}

/// Law-of-cosines magnitude of the mixture flow, in diffuse-power units.
fn flow_magnitude(gamma: f64, alpha: f64, gain_sq: f64, k_over_4pi: f64) -> f64 {
    let direct = gamma * gain_sq;
    (direct * direct + k_over_4pi * k_over_4pi + 2.0 * direct * k_over_4pi * alpha.cos())
        .max(0.0)
        .sqrt()
}

/// Mixture diffuseness as a function of the direct-to-diffuse ratio and
/// the angle between arrival direction and beam axis. `gamma` may be
/// infinite, meaning no diffuse field at all.
pub fn diffuseness_surface(
    gamma: f64,
    alpha: f64,
    profile: &AxisymmetricProfile,
) -> Result<f64> {
    check_balance(gamma)?;
    let (q, k_over_4pi, gain_sq) = surface_terms(profile, alpha)?;
    if gain_sq == 0.0 {
        // The arrival sits in a null: the ratio drops out entirely.
        return Ok((1.0 - q * k_over_4pi).clamp(0.0, 1.0));
    }
    if gamma.is_infinite() {
        return Ok(0.0);
    }
    let delta = flow_magnitude(gamma, alpha, gain_sq, k_over_4pi);
    Ok((1.0 - delta / (gamma * gain_sq + 1.0 / q)).clamp(0.0, 1.0))
}

/// Angle by which the intensity-implied arrival direction is pulled from
/// the true one toward the beam axis. Computed from the flow components
/// along and across the arrival direction, which matches the law-of-sines
/// arcsin form wherever that form's acute-angle assumption holds and
/// continues it correctly behind the beam.
pub fn doa_bias(gamma: f64, alpha: f64, profile: &AxisymmetricProfile) -> Result<f64> {
    check_balance(gamma)?;
    let (_, k_over_4pi, gain_sq) = surface_terms(profile, alpha)?;
    if gain_sq > 0.0 && gamma.is_infinite() {
        return Ok(0.0);
    }
    let direct = if gain_sq == 0.0 { 0.0 } else { gamma * gain_sq };
    let across = k_over_4pi * alpha.sin();
    let along = direct + k_over_4pi * alpha.cos();
    if across == 0.0 && along == 0.0 {
        return Err(Error::UndefinedBias);
    }
    Ok(across.atan2(along))
}
