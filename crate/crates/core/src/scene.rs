//! Monte-Carlo synthesis of coefficient frames realizing the statistical
//! field model: any number of plane waves with given PSDs plus an
//! isotropic diffuse component, all mutually independent.
//!
//! Every frame is drawn from its own counter-derived substream, so a
//! frame's content depends only on the scene and its index, never on how
//! many frames surround it or in what order they were produced.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::beam::Beam;
use crate::energetics::{
    accumulate_moments, statistical_energetics, weighted_signals, BFormatSample,
    EnergeticEstimate, PhysicalConstants,
};
use crate::error::{Error, Result};
use crate::sh::{coefficient_count, eval, ShVector, SphericalDirection, MAX_ORDER};

/// Algorithm name stamped into frame-set metadata so results can be
/// compared across implementations at the statistics level.
pub const GENERATOR: &str = "chacha12";

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveSource {
    pub doa: SphericalDirection,
    pub psd: f64,
}

/// Everything needed to reproduce a synthetic field: sources, diffuse
/// power, frame count, and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    order: u32,
    waves: Vec<PlaneWaveSource>,
    diffuse_psd: f64,
    frames: u64,
    seed: u64,
}

impl SceneSpec {
    pub fn new(
        order: u32,
        waves: Vec<PlaneWaveSource>,
        diffuse_psd: f64,
        frames: u64,
        seed: u64,
    ) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderOverflow {
                order,
                max: MAX_ORDER,
            });
        }
        if frames == 0 {
            return Err(Error::EmptyFrames);
        }
        for psd in waves.iter().map(|w| w.psd).chain([diffuse_psd]) {
            if !psd.is_finite() || psd < 0.0 {
                return Err(Error::InvalidPower { value: psd });
            }
        }
        let total: f64 = waves.iter().map(|w| w.psd).sum::<f64>() + diffuse_psd;
        if total == 0.0 {
            return Err(Error::SilentScene);
        }
        Ok(Self {
            order,
            waves,
            diffuse_psd,
            frames,
            seed,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn waves(&self) -> &[PlaneWaveSource] {
        &self.waves
    }

    pub fn diffuse_psd(&self) -> f64 {
        self.diffuse_psd
    }

    pub fn frames(&self) -> u64 {
        self.frames
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// A realized sequence of coefficient frames plus the metadata needed to
/// regenerate or identify it.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSet {
    order: u32,
    seed: u64,
    generator: String,
    frames: Vec<ShVector>,
    scene: Option<SceneSpec>,
}

impl FrameSet {
    /// Reassembles a frame set from stored parts, checking that every
    /// frame carries the declared order.
    pub fn from_parts(
        order: u32,
        seed: u64,
        generator: String,
        frames: Vec<ShVector>,
        scene: Option<SceneSpec>,
    ) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::EmptyFrames);
        }
        for frame in &frames {
            if frame.order() != order {
                return Err(Error::OrderMismatch {
                    expected: order,
                    actual: frame.order(),
                });
            }
        }
        Ok(Self {
            order,
            seed,
            generator,
            frames,
            scene,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn generator(&self) -> &str {
        &self.generator
    }

    pub fn frames(&self) -> &[ShVector] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn scene(&self) -> Option<&SceneSpec> {
        self.scene.as_ref()
    }
}

/// Unit-variance circular complex Gaussian draw.
fn draw_unit(rng: &mut ChaCha12Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Realizes the scene. Per frame, every plane wave contributes its basis
/// vector scaled by an independent Gaussian signal, and the diffuse field
/// contributes an independent Gaussian on every coefficient; this is the
/// exact coefficient-space image of an isotropic amplitude density under
/// orthonormality. Draws always happen in spec order, waves before
/// diffuse, even for zero-power components, so the stream layout depends
/// only on the scene shape.
pub fn synthesize(spec: &SceneSpec) -> FrameSet {
    let bases: Vec<(f64, ShVector)> = spec
        .waves
        .iter()
        .map(|wave| {
            let basis = ShVector::from_fn(spec.order, |n, m| {
                eval(n, m, &wave.doa).expect("|m| <= n").conj()
            })
            .expect("validated order");
            (wave.psd.sqrt(), basis)
        })
        .collect();
    let diffuse_scale = (spec.diffuse_psd / (4.0 * PI)).sqrt();
    let count = coefficient_count(spec.order);
    let frames = (0..spec.frames)
        .map(|index| {
            let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
            rng.set_stream(index);
            let mut coeffs = vec![Complex64::ZERO; count];
            for (amplitude, basis) in &bases {
                let signal = amplitude * draw_unit(&mut rng);
                for (c, b) in coeffs.iter_mut().zip(basis.coeffs()) {
                    *c += signal * b;
                }
            }
            for c in coeffs.iter_mut() {
                *c += diffuse_scale * draw_unit(&mut rng);
            }
            ShVector::new(spec.order, coeffs).expect("length matches order")
        })
        .collect();
    FrameSet {
        order: spec.order,
        seed: spec.seed,
        generator: GENERATOR.to_string(),
        frames,
        scene: Some(spec.clone()),
    }
}

/// Projects every frame through the beam and reduces to one estimate.
pub fn estimate_frames(
    set: &FrameSet,
    beam: &Beam,
    constants: &PhysicalConstants,
) -> Result<EnergeticEstimate> {
    let samples: Vec<BFormatSample> = set
        .frames
        .iter()
        .map(|frame| weighted_signals(beam, frame))
        .collect::<Result<_>>()?;
    let moments = accumulate_moments(&samples)?;
    statistical_energetics(&moments, constants)
}

/// Synthesize-and-estimate in one step. The scene must supply exactly one
/// order above the beam.
pub fn run_experiment(
    spec: &SceneSpec,
    beam: &Beam,
    constants: &PhysicalConstants,
) -> Result<EnergeticEstimate> {
    let expected = beam.order() + 1;
    if spec.order != expected {
        return Err(Error::OrderMismatch {
            expected,
            actual: spec.order,
        });
    }
    estimate_frames(&synthesize(spec), beam, constants)
}
