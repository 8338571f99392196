//! Axisymmetric beam profiles, steering, and the velocity companion
//! patterns every beam carries.
//!
//! A profile stores the m = 0 coefficients `c_n` of a real pattern aimed at
//! +z; steering rotates it to an arbitrary direction without changing its
//! energy. Presets are normalized to unit gain at the look direction.

use std::f64::consts::PI;
use std::fmt;

use crate::coupling::CouplingMatrices;
use crate::error::{Error, Result};
use crate::sh::{
    eval, inner_product, sample_on_grid, QuadratureGrid, ShVector, SphericalDirection, MAX_ORDER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamKind {
    Omni,
    Cardioid,
    Hypercardioid,
}

impl BeamKind {
    pub fn from_name(name: &str) -> Option<BeamKind> {
        match name {
            "omni" => Some(BeamKind::Omni),
            "cardioid" => Some(BeamKind::Cardioid),
            "hypercardioid" => Some(BeamKind::Hypercardioid),
            _ => None,
        }
    }

    /// Order used when a description names the kind without an order.
    pub fn default_order(&self) -> u32 {
        match self {
            BeamKind::Omni => 0,
            BeamKind::Cardioid | BeamKind::Hypercardioid => 1,
        }
    }
}

impl fmt::Display for BeamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BeamKind::Omni => "omni",
            BeamKind::Cardioid => "cardioid",
            BeamKind::Hypercardioid => "hypercardioid",
        })
    }
}

/// Real m = 0 coefficients of a rotationally symmetric pattern about +z.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymmetricProfile {
    coeffs: Vec<f64>,
}

impl AxisymmetricProfile {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyProfile);
        }
        let order = (coeffs.len() - 1) as u32;
        if order > MAX_ORDER {
            return Err(Error::OrderOverflow {
                order,
                max: MAX_ORDER,
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient);
        }
        Ok(Self { coeffs })
    }

    /// The built-in patterns. Omni exists at order 0 and cardioid at order 1
    /// only; hypercardioid (maximum directivity factor, unit look gain) is
    /// defined for any order >= 1.
    pub fn preset(kind: BeamKind, order: u32) -> Result<Self> {
        let unsupported = || Error::UnsupportedPreset {
            kind: kind.to_string(),
            order,
        };
        match (kind, order) {
            (BeamKind::Omni, 0) => Self::new(vec![(4.0 * PI).sqrt()]),
            (BeamKind::Cardioid, 1) => Self::new(vec![PI.sqrt(), (PI / 3.0).sqrt()]),
            (BeamKind::Hypercardioid, n) if n >= 1 => {
                if n > MAX_ORDER {
                    return Err(unsupported());
                }
                let scale = ((n + 1) * (n + 1)) as f64;
                let coeffs = (0..=n)
                    .map(|k| (4.0 * PI * (2 * k + 1) as f64).sqrt() / scale)
                    .collect();
                Self::new(coeffs)
            }
            _ => Err(unsupported()),
        }
    }

    pub fn order(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Pattern gain at angle `alpha` off the symmetry axis: the Legendre
    /// series `sum_n c_n sqrt((2n+1)/(4 pi)) P_n(cos alpha)`.
    pub fn value_at(&self, alpha: f64) -> f64 {
        let x = alpha.cos();
        let mut p0 = 1.0;
        let mut p1 = x;
        let mut total = 0.0;
        for (n, c) in self.coeffs.iter().enumerate() {
            let p = match n {
                0 => 1.0,
                1 => x,
                _ => {
                    let p2 = ((2 * n - 1) as f64 * x * p1 - (n - 1) as f64 * p0) / n as f64;
                    p0 = p1;
                    p1 = p2;
                    p2
                }
            };
            total += c * ((2 * n + 1) as f64 / (4.0 * PI)).sqrt() * p;
        }
        total
    }

    /// Gain along the axis the profile is aimed at.
    pub fn look_gain(&self) -> f64 {
        self.value_at(0.0)
    }

    pub fn is_max_unity(&self, tol: f64) -> bool {
        (self.look_gain() - 1.0).abs() <= tol
    }

    /// Rotates the profile to aim at `dir`:
    /// `w(n, m) = sqrt(4 pi / (2n+1)) c_n conj(Y(n, m)(dir))`.
    /// Preserves the coefficient energy and puts the look gain at `dir`.
    pub fn steer(&self, dir: &SphericalDirection) -> Result<ShVector> {
        let order = self.order();
        ShVector::from_fn(order, |n, m| {
            let c = self.coeffs[n as usize];
            let scale = (4.0 * PI / (2 * n + 1) as f64).sqrt();
            scale * c * eval(n, m, dir).expect("|m| <= n").conj()
        })
    }

    /// Directivity factor `Q = 4 pi / sum c_n^2` of the unit-look pattern.
    pub fn directivity_factor(&self) -> Result<f64> {
        let energy: f64 = self.coeffs.iter().map(|c| c * c).sum();
        if energy == 0.0 {
            return Err(Error::ZeroPattern);
        }
        Ok(4.0 * PI / energy)
    }

    /// Magnitude K of the squared pattern's mean arrival vector, from the
    /// axial dot product with the z velocity profile of the z-aimed beam.
    pub fn doa_moment_magnitude(&self) -> Result<f64> {
        let north = SphericalDirection::new(0.0, 0.0)?;
        let w = self.steer(&north)?;
        let matrices = CouplingMatrices::for_order(w.order())?;
        let [_, _, wz] = matrices.apply(&w)?;
        let mut k = 0.0;
        for (n, c) in self.coeffs.iter().enumerate() {
            k += c * wz.coeff(n as u32, 0)?.re;
        }
        Ok(k.abs())
    }
}

/// A steered (or free-form) real beam pattern bundled with its three
/// velocity companion patterns, one order higher.
#[derive(Debug, Clone)]
pub struct Beam {
    pattern: ShVector,
    velocity: [ShVector; 3],
    profile: Option<AxisymmetricProfile>,
    steer_dir: Option<SphericalDirection>,
}

impl Beam {
    /// Builds a beam from a profile aimed at `steer` (defaults to +z).
    pub fn from_profile(
        profile: AxisymmetricProfile,
        steer: Option<SphericalDirection>,
    ) -> Result<Beam> {
        let dir = match steer {
            Some(d) => d,
            None => SphericalDirection::new(0.0, 0.0)?,
        };
        let pattern = profile.steer(&dir)?;
        let velocity = velocity_patterns(&pattern)?;
        Ok(Beam {
            pattern,
            velocity,
            profile: Some(profile),
            steer_dir: Some(dir),
        })
    }

    /// Builds a beam from raw coefficients. The synthesized pattern must be
    /// real on the sphere; anything else has no energetic meaning here.
    pub fn from_pattern(pattern: ShVector) -> Result<Beam> {
        let grid = QuadratureGrid::with_degree(2 * pattern.order() + 1);
        let max_imag = sample_on_grid(&pattern, &grid)
            .iter()
            .map(|v| v.im.abs())
            .fold(0.0, f64::max);
        if max_imag >= 1e-10 {
            return Err(Error::NonRealPattern { max_imag });
        }
        let velocity = velocity_patterns(&pattern)?;
        Ok(Beam {
            pattern,
            velocity,
            profile: None,
            steer_dir: None,
        })
    }

    pub fn order(&self) -> u32 {
        self.pattern.order()
    }

    pub fn pattern(&self) -> &ShVector {
        &self.pattern
    }

    pub fn velocity_patterns(&self) -> &[ShVector; 3] {
        &self.velocity
    }

    pub fn profile(&self) -> Option<&AxisymmetricProfile> {
        self.profile.as_ref()
    }

    pub fn steer_dir(&self) -> Option<&SphericalDirection> {
        self.steer_dir.as_ref()
    }

    /// Real gain of the pattern toward a direction.
    pub fn gain_at(&self, dir: &SphericalDirection) -> f64 {
        self.pattern.evaluate(dir).re
    }

    pub fn directivity_factor(&self) -> Result<f64> {
        directivity_factor(&self.pattern)
    }

    /// Mean arrival vector of the squared pattern (the k vector): the
    /// projection of each velocity pattern onto the beam itself.
    pub fn doa_moment(&self) -> [f64; 3] {
        let padded = self
            .pattern
            .zero_padded(self.pattern.order() + 1)
            .expect("padding one order up stays in range");
        let mut k = [0.0; 3];
        for (axis, v) in self.velocity.iter().enumerate() {
            k[axis] = inner_product(v, &padded).re;
        }
        k
    }
}

/// The three velocity companion patterns of a filter, one order higher.
pub fn velocity_patterns(w: &ShVector) -> Result<[ShVector; 3]> {
    CouplingMatrices::for_order(w.order())?.apply(w)
}

/// Directivity factor `4 pi / (w^H w)` of a unit-look filter.
pub fn directivity_factor(w: &ShVector) -> Result<f64> {
    let energy = inner_product(w, w).re;
    if energy == 0.0 {
        return Err(Error::ZeroPattern);
    }
    Ok(4.0 * PI / energy)
}
