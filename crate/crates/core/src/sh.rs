//! Complex spherical harmonics, linear coefficient indexing, and spherical
//! quadrature.
//!
//! Directions use physics conventions: inclination `theta` measured from +z
//! in [0, pi], azimuth `phi` counterclockwise from +x, stored in [-pi, pi).
//! The harmonics are orthonormal over the sphere and carry the
//! Condon-Shortley phase inside the associated Legendre functions, so
//! `Y(n, -m) = (-1)^m conj(Y(n, m))`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on the order of coefficient vectors. Keeps every factorial-based
/// formula in the crate comfortably inside f64 range.
pub const MAX_ORDER: u32 = 10;

/// A direction on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalDirection {
    theta: f64,
    phi: f64,
}

impl SphericalDirection {
    /// Builds a direction, wrapping `phi` into [-pi, pi). The inclination is
    /// not wrapped: values outside [0, pi] are ambiguous and rejected.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidInclination { theta });
        }
        if !phi.is_finite() {
            return Err(Error::NonFiniteAngle { value: phi });
        }
        Ok(Self {
            theta,
            phi: wrap_azimuth(phi),
        })
    }

    /// Direction of a nonzero Cartesian vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidDirection);
        }
        let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
        let phi = if v[0] == 0.0 && v[1] == 0.0 {
            0.0
        } else {
            v[1].atan2(v[0])
        };
        Self::new(theta, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Cartesian unit vector `[sin t cos p, sin t sin p, cos t]`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = (self.theta.sin(), self.theta.cos());
        let (sp, cp) = (self.phi.sin(), self.phi.cos());
        [st * cp, st * sp, ct]
    }

    /// Great-circle angle to another direction, in [0, pi].
    pub fn angle_to(&self, other: &SphericalDirection) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        dot.clamp(-1.0, 1.0).acos()
    }
}

fn wrap_azimuth(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Linear index `q = n(n+1) + m` of the harmonic `(n, m)`.
pub fn linear_index(n: u32, m: i32) -> Result<usize> {
    if m.unsigned_abs() > n {
        return Err(Error::InvalidDegree { n, m });
    }
    Ok((n as i64 * (n as i64 + 1) + m as i64) as usize)
}

/// Inverse of [`linear_index`]: `n = floor(sqrt(q))`, `m = q - n(n+1)`.
pub fn degree_order(q: usize) -> (u32, i32) {
    let mut n = (q as f64).sqrt() as usize;
    while (n + 1) * (n + 1) <= q {
        n += 1;
    }
    while n * n > q {
        n -= 1;
    }
    let m = q as i64 - (n as i64) * (n as i64 + 1);
    (n as u32, m as i32)
}

/// Number of coefficients in an order-`n` expansion.
pub fn coefficient_count(order: u32) -> usize {
    ((order + 1) * (order + 1)) as usize
}

/// Evaluates the orthonormal complex spherical harmonic `Y(n, m)`.
pub fn eval(n: u32, m: i32, dir: &SphericalDirection) -> Result<Complex64> {
    if m.unsigned_abs() > n {
        return Err(Error::InvalidDegree { n, m });
    }
    let am = m.unsigned_abs();
    let x = dir.theta.cos();
    let p = associated_legendre(n, am, x);
    let value = normalization(n, am) * p * Complex64::from_polar(1.0, am as f64 * dir.phi);
    if m >= 0 {
        Ok(value)
    } else if am.is_multiple_of(2) {
        Ok(value.conj())
    } else {
        Ok(-value.conj())
    }
}

/// All harmonics up to `order` at one direction, in linear-index layout.
/// Shares its arithmetic with [`eval`], so the two agree bit for bit.
fn eval_all(order: u32, dir: &SphericalDirection) -> Vec<Complex64> {
    let x = dir.theta.cos();
    let mut out = vec![Complex64::ZERO; coefficient_count(order)];
    for am in 0..=order {
        let phase = Complex64::from_polar(1.0, am as f64 * dir.phi);
        let mut carry = [0.0f64; 2];
        for n in am..=order {
            let p = legendre_step(n, am, x, &mut carry);
            let value = normalization(n, am) * p * phase;
            out[(n * (n + 1) + am) as usize] = value;
            if am > 0 {
                let mirror = if am % 2 == 0 { value.conj() } else { -value.conj() };
                out[(n * (n + 1) - am) as usize] = mirror;
            }
        }
    }
    out
}

/// Associated Legendre function with the Condon-Shortley phase,
/// by the standard three-term recurrence in the degree.
fn associated_legendre(n: u32, m: u32, x: f64) -> f64 {
    let mut carry = [0.0f64; 2];
    let mut p = 0.0;
    for l in m..=n {
        p = legendre_step(l, m, x, &mut carry);
    }
    p
}

/// One degree-raising step of the Legendre recurrence for fixed `m`.
/// `carry` holds the two previous values and must start zeroed at `l = m`.
fn legendre_step(l: u32, m: u32, x: f64, carry: &mut [f64; 2]) -> f64 {
    let value = if l == m {
        let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
        let mut pmm = 1.0;
        let mut fact = 1.0;
        for _ in 0..m {
            pmm *= -fact * somx2;
            fact += 2.0;
        }
        pmm
    } else if l == m + 1 {
        x * (2 * m + 1) as f64 * carry[1]
    } else {
        (x * (2 * l - 1) as f64 * carry[1] - (l + m - 1) as f64 * carry[0]) / (l - m) as f64
    };
    carry[0] = carry[1];
    carry[1] = value;
    value
}

/// `sqrt((2n+1)/(4 pi) * (n-m)!/(n+m)!)` for `m >= 0`, using a running
/// product for the factorial ratio so nothing large is ever formed.
fn normalization(n: u32, am: u32) -> f64 {
    let mut ratio = 1.0;
    for k in (n - am + 1)..=(n + am) {
        ratio *= k as f64;
    }
    ((2 * n + 1) as f64 / (4.0 * PI) / ratio).sqrt()
}

/// Coefficients of a square-integrable function on the sphere, stored in
/// linear-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct ShVector {
    order: u32,
    coeffs: Vec<Complex64>,
}

impl ShVector {
    pub fn new(order: u32, coeffs: Vec<Complex64>) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderOverflow {
                order,
                max: MAX_ORDER,
            });
        }
        let expected = coefficient_count(order);
        if coeffs.len() != expected {
            return Err(Error::CoefficientCount {
                order,
                expected,
                actual: coeffs.len(),
            });
        }
        Ok(Self { order, coeffs })
    }

    pub fn zeros(order: u32) -> Result<Self> {
        Self::new(order, vec![Complex64::ZERO; coefficient_count(order)])
    }

    /// Builds a vector by evaluating `f(n, m)` for every index.
    pub fn from_fn(order: u32, mut f: impl FnMut(u32, i32) -> Complex64) -> Result<Self> {
        let coeffs = (0..coefficient_count(order))
            .map(|q| {
                let (n, m) = degree_order(q);
                f(n, m)
            })
            .collect();
        Self::new(order, coeffs)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: u32, m: i32) -> Result<Complex64> {
        let q = linear_index(n, m)?;
        if n > self.order {
            return Err(Error::OrderMismatch {
                expected: self.order,
                actual: n,
            });
        }
        Ok(self.coeffs[q])
    }

    /// Same coefficients viewed at a higher order; new entries are zero.
    pub fn zero_padded(&self, order: u32) -> Result<ShVector> {
        if order < self.order {
            return Err(Error::OrderMismatch {
                expected: self.order,
                actual: order,
            });
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(coefficient_count(order), Complex64::ZERO);
        ShVector::new(order, coeffs)
    }

    /// Synthesizes the function value `sum_q a_q Y_q(dir)`.
    pub fn evaluate(&self, dir: &SphericalDirection) -> Complex64 {
        let basis = eval_all(self.order, dir);
        self.coeffs
            .iter()
            .zip(basis.iter())
            .map(|(a, y)| a * y)
            .sum()
    }

    /// Largest deviation from the conjugate symmetry a real-valued pattern
    /// must satisfy: `a(n, -m) = (-1)^m conj(a(n, m))`.
    pub fn max_conjugate_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for q in 0..self.coeffs.len() {
            let (n, m) = degree_order(q);
            if m < 0 {
                continue;
            }
            let mirror = self.coeffs[(n as i64 * (n as i64 + 1) - m as i64) as usize];
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let dev = (mirror - sign * self.coeffs[q].conj()).norm();
            worst = worst.max(dev);
        }
        worst
    }
}

/// Hermitian inner product `g^H f`, zero-padding the shorter vector.
pub fn inner_product(f: &ShVector, g: &ShVector) -> Complex64 {
    f.coeffs
        .iter()
        .zip(g.coeffs.iter())
        .map(|(a, b)| a * b.conj())
        .sum()
}

/// Nodes and weights that integrate spherical polynomials exactly up to a
/// declared degree: Gauss-Legendre in cos(theta) crossed with a uniform
/// azimuth ring, weights summing to 4 pi.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    degree: u32,
    dirs: Vec<SphericalDirection>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn with_degree(degree: u32) -> Self {
        let n_theta = degree as usize / 2 + 1;
        let n_phi = degree as usize + 1;
        let (xs, ws) = gauss_legendre(n_theta);
        let phi_weight = 2.0 * PI / n_phi as f64;
        let mut dirs = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (x, w) in xs.iter().zip(ws.iter()) {
            let theta = x.clamp(-1.0, 1.0).acos();
            for j in 0..n_phi {
                let phi = -PI + 2.0 * PI * j as f64 / n_phi as f64;
                dirs.push(SphericalDirection::new(theta, phi).expect("grid node in range"));
                weights.push(w * phi_weight);
            }
        }
        Self {
            degree,
            dirs,
            weights,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn node_count(&self) -> usize {
        self.dirs.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&SphericalDirection, f64)> + '_ {
        self.dirs.iter().zip(self.weights.iter().copied())
    }

    /// Quadrature sum of `f` over the sphere.
    pub fn integrate(&self, mut f: impl FnMut(&SphericalDirection) -> Complex64) -> Complex64 {
        self.nodes().map(|(dir, w)| f(dir) * w).sum()
    }
}

/// Projects samples taken on `grid` onto harmonics up to `order`.
/// The grid must resolve products of two order-`order` expansions.
pub fn forward_transform(
    samples: &[Complex64],
    grid: &QuadratureGrid,
    order: u32,
) -> Result<ShVector> {
    if samples.len() != grid.node_count() {
        return Err(Error::SampleCount {
            expected: grid.node_count(),
            actual: samples.len(),
        });
    }
    if grid.degree < 2 * order {
        return Err(Error::GridTooCoarse {
            degree: grid.degree,
            order,
            required: 2 * order,
        });
    }
    let mut coeffs = vec![Complex64::ZERO; coefficient_count(order)];
    for ((dir, w), sample) in grid.nodes().zip(samples.iter()) {
        let basis = eval_all(order, dir);
        let scaled = sample * w;
        for (c, y) in coeffs.iter_mut().zip(basis.iter()) {
            *c += scaled * y.conj();
        }
    }
    ShVector::new(order, coeffs)
}

/// Samples a coefficient vector at every node of a grid.
pub fn sample_on_grid(w: &ShVector, grid: &QuadratureGrid) -> Vec<Complex64> {
    grid.dirs.iter().map(|dir| w.evaluate(dir)).collect()
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial. Nodes come out symmetric about zero.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = x;
        ws[i] = w;
        xs[n - 1 - i] = -x;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (p0, 0.0);
    }
    for l in 2..=n {
        let p2 = ((2 * l - 1) as f64 * x * p1 - (l - 1) as f64 * p0) / l as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
