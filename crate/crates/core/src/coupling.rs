//! Couplings between harmonics: Wigner 3j symbols, Gaunt coefficients, the
//! band-limited product expansion, and the dense matrices that map a spatial
//! filter onto its three Cartesian velocity companions.

use std::f64::consts::PI;

use ndarray::{Array2, ArrayView1};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sh::{coefficient_count, degree_order, linear_index, ShVector, MAX_ORDER};

/// Largest degree for which the Racah sum runs on plain factorials. Beyond
/// this the factors are accumulated in log space; below it the direct
/// products keep small symbols bit-reproducible.
const EXACT_DEGREE_LIMIT: u32 = 6;

/// Wigner 3j symbol for integer angular momenta. Selection-rule failures
/// (nonzero total projection, triangle violation, |m| > j) yield 0, which
/// is the symbol's value there, not an error.
pub fn wigner_3j(j1: u32, j2: u32, j3: u32, m1: i32, m2: i32, m3: i32) -> f64 {
    let exact = j1.max(j2).max(j3) <= EXACT_DEGREE_LIMIT;
    racah(
        j1 as i64, j2 as i64, j3 as i64, m1 as i64, m2 as i64, m3 as i64, exact,
    )
}

/// Racah's closed form. The two factorial strategies agree within rounding;
/// the split exists so small symbols do not depend on `exp`/`ln`.
fn racah(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64, exact: bool) -> f64 {
    if m1 + m2 + m3 != 0 {
        return 0.0;
    }
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    if j3 > j1 + j2 || j3 < (j1 - j2).abs() {
        return 0.0;
    }
    let t_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let t_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    if t_max < t_min {
        return 0.0;
    }
    let sign = if (j1 - j2 - m3).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let head = [
        j1 + m1,
        j1 - m1,
        j2 + m2,
        j2 - m2,
        j3 + m3,
        j3 - m3,
        j1 + j2 - j3,
        j1 - j2 + j3,
        -j1 + j2 + j3,
    ];
    let mut sum = 0.0;
    if exact {
        let mut front = 1.0;
        for f in head {
            front *= factorial(f);
        }
        front = (front / factorial(j1 + j2 + j3 + 1)).sqrt();
        for t in t_min..=t_max {
            let denom = factorial(t)
                * factorial(j1 + j2 - j3 - t)
                * factorial(j1 - m1 - t)
                * factorial(j2 + m2 - t)
                * factorial(j3 - j2 + m1 + t)
                * factorial(j3 - j1 - m2 + t);
            sum += if t % 2 == 0 { 1.0 / denom } else { -1.0 / denom };
        }
        sign * front * sum
    } else {
        let ln_front = head.iter().map(|&f| ln_factorial(f)).sum::<f64>() / 2.0
            - ln_factorial(j1 + j2 + j3 + 1) / 2.0;
        for t in t_min..=t_max {
            let ln_denom = ln_factorial(t)
                + ln_factorial(j1 + j2 - j3 - t)
                + ln_factorial(j1 - m1 - t)
                + ln_factorial(j2 + m2 - t)
                + ln_factorial(j3 - j2 + m1 + t)
                + ln_factorial(j3 - j1 - m2 + t);
            let term = (ln_front - ln_denom).exp();
            sum += if t % 2 == 0 { term } else { -term };
        }
        sign * sum
    }
}

fn factorial(n: i64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn ln_factorial(n: i64) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Gaunt coefficient: the integral of `Y_q1 Y_q2 conj(Y_q)` over the sphere.
/// Symmetric in its first two arguments (bit for bit, by canonicalizing the
/// evaluation), zero whenever the selection rules fail.
pub fn gaunt(q1: usize, q2: usize, q: usize) -> f64 {
    let (qa, qb) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
    let (na, ma) = degree_order(qa);
    let (nb, mb) = degree_order(qb);
    let (n, m) = degree_order(q);
    if ma + mb != m {
        return 0.0;
    }
    if n > na + nb || n < na.abs_diff(nb) {
        return 0.0;
    }
    if (na + nb + n) % 2 == 1 {
        return 0.0;
    }
    let w0 = wigner_3j(n, na, nb, 0, 0, 0);
    let wm = wigner_3j(n, na, nb, -m, ma, mb);
    let norm = (((2 * n + 1) * (2 * na + 1) * (2 * nb + 1)) as f64 / (4.0 * PI)).sqrt();
    let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * norm * w0 * wm
}

/// Coefficients of the pointwise product of two band-limited functions.
/// The result lives at the sum of the input orders.
pub fn product_expand(f: &ShVector, g: &ShVector) -> Result<ShVector> {
    let order = f.order() + g.order();
    if order > MAX_ORDER {
        return Err(Error::OrderOverflow {
            order,
            max: MAX_ORDER,
        });
    }
    let mut out = vec![Complex64::ZERO; coefficient_count(order)];
    for (qf, cf) in f.coeffs().iter().enumerate() {
        let (nf, mf) = degree_order(qf);
        for (qg, cg) in g.coeffs().iter().enumerate() {
            let prod = cf * cg;
            if prod == Complex64::ZERO {
                continue;
            }
            let (ng, mg) = degree_order(qg);
            let m = mf + mg;
            for n in nf.abs_diff(ng)..=(nf + ng) {
                if m.unsigned_abs() > n {
                    continue;
                }
                let q = linear_index(n, m).expect("|m| <= n by construction");
                out[q] += prod * gaunt(qf, qg, q);
            }
        }
    }
    ShVector::new(order, out)
}

/// Coefficients of the three Cartesian direction cosines x, y, z as
/// order-1 expansions; these are the only nonzero entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleCoefficients {
    pub x1: Complex64,
    pub x3: Complex64,
    pub y1: Complex64,
    pub y3: Complex64,
    pub z2: Complex64,
}

impl DipoleCoefficients {
    pub fn standard() -> Self {
        let r = (2.0 * PI / 3.0).sqrt();
        Self {
            x1: Complex64::new(r, 0.0),
            x3: Complex64::new(-r, 0.0),
            y1: Complex64::new(0.0, r),
            y3: Complex64::new(0.0, r),
            z2: Complex64::new((4.0 * PI / 3.0).sqrt(), 0.0),
        }
    }

    /// The x, y, z patterns as coefficient vectors `[a(1,-1), a(1,1), a(1,0)]`
    /// placed at their linear indices 1, 3, 2.
    pub fn component_vectors(&self) -> [ShVector; 3] {
        let zero = Complex64::ZERO;
        let make = |c1, c2, c3| ShVector::new(1, vec![zero, c1, c2, c3]).expect("4 coefficients");
        [
            make(self.x1, zero, self.x3),
            make(self.y1, zero, self.y3),
            make(zero, self.z2, zero),
        ]
    }
}

impl Default for DipoleCoefficients {
    fn default() -> Self {
        Self::standard()
    }
}

/// Dense matrices taking an order-N filter to its order-(N+1) velocity
/// filters along x, y, and z. `ax` and `az` are real, `ay` purely
/// imaginary; entries are nonzero only between adjacent degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices {
    order: u32,
    ax: Array2<Complex64>,
    ay: Array2<Complex64>,
    az: Array2<Complex64>,
}

impl CouplingMatrices {
    /// Builds the matrices for filters of the given order. Entry (i, j)
    /// couples filter index j through each dipole component into product
    /// index i.
    pub fn for_order(order: u32) -> Result<Self> {
        if order + 1 > MAX_ORDER {
            return Err(Error::OrderOverflow {
                order,
                max: MAX_ORDER - 1,
            });
        }
        let d = DipoleCoefficients::standard();
        let rows = coefficient_count(order + 1);
        let cols = coefficient_count(order);
        let mut ax = Array2::zeros((rows, cols));
        let mut ay = Array2::zeros((rows, cols));
        let mut az = Array2::zeros((rows, cols));
        for i in 0..rows {
            for j in 0..cols {
                let g1 = gaunt(j, 1, i);
                let g2 = gaunt(j, 2, i);
                let g3 = gaunt(j, 3, i);
                ax[[i, j]] = d.x1 * g1 + d.x3 * g3;
                ay[[i, j]] = d.y1 * g1 + d.y3 * g3;
                az[[i, j]] = d.z2 * g2;
            }
        }
        Ok(Self { order, ax, ay, az })
    }

    /// Reassembles matrices from stored parts, validating the shapes.
    pub fn from_parts(
        order: u32,
        ax: Array2<Complex64>,
        ay: Array2<Complex64>,
        az: Array2<Complex64>,
    ) -> Result<Self> {
        if order + 1 > MAX_ORDER {
            return Err(Error::OrderOverflow {
                order,
                max: MAX_ORDER - 1,
            });
        }
        let rows = coefficient_count(order + 1);
        let cols = coefficient_count(order);
        for m in [&ax, &ay, &az] {
            if m.dim() != (rows, cols) {
                return Err(Error::CoefficientCount {
                    order,
                    expected: rows * cols,
                    actual: m.len(),
                });
            }
        }
        Ok(Self { order, ax, ay, az })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn rows(&self) -> usize {
        coefficient_count(self.order + 1)
    }

    pub fn cols(&self) -> usize {
        coefficient_count(self.order)
    }

    pub fn ax(&self) -> &Array2<Complex64> {
        &self.ax
    }

    pub fn ay(&self) -> &Array2<Complex64> {
        &self.ay
    }

    pub fn az(&self) -> &Array2<Complex64> {
        &self.az
    }

    /// Applies all three couplings to a filter of the matching order.
    pub fn apply(&self, w: &ShVector) -> Result<[ShVector; 3]> {
        if w.order() != self.order {
            return Err(Error::OrderMismatch {
                expected: self.order,
                actual: w.order(),
            });
        }
        let v = ArrayView1::from(w.coeffs());
        let out = [&self.ax, &self.ay, &self.az].map(|m| m.dot(&v));
        let [x, y, z] = out;
        Ok([
            ShVector::new(self.order + 1, x.to_vec())?,
            ShVector::new(self.order + 1, y.to_vec())?,
            ShVector::new(self.order + 1, z.to_vec())?,
        ])
    }
}
