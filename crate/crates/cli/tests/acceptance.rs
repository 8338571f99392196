//! Acceptance gate: every release-blocking property in one place, one
//! verdict line per criterion. Run with `--nocapture` to see the lines
//! for passing criteria too.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use sectorfield::beam::{velocity_patterns, AxisymmetricProfile, Beam, BeamKind};
use sectorfield::coupling::{gaunt, product_expand, CouplingMatrices, DipoleCoefficients};
use sectorfield::energetics::{instantaneous_energetics, weighted_signals, PhysicalConstants};
use sectorfield::formats::{matrices_from_json, matrices_to_json};
use sectorfield::num_complex::Complex64;
use sectorfield::reference::{diffuseness_surface, doa_bias, predict_mixture, MixtureParams};
use sectorfield::scene::{run_experiment, synthesize, PlaneWaveSource, SceneSpec};
use sectorfield::sh::{
    coefficient_count, degree_order, eval, linear_index, sample_on_grid, QuadratureGrid, ShVector,
    SphericalDirection,
};

fn verdict(criterion: u32, label: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion} ({label}): {status} [{detail}]");
    assert!(pass, "criterion {criterion} ({label}) failed: {detail}");
}

/// A pattern that is real on the sphere: the negative-m coefficient is
/// the parity-signed conjugate of the positive-m one.
fn random_real_pattern(order: u32, rng: &mut ChaCha12Rng) -> ShVector {
    let mut coeffs = vec![Complex64::ZERO; coefficient_count(order)];
    for n in 0..=order {
        for m in 0..=n as i32 {
            let re: f64 = rng.random_range(-1.0..1.0);
            let im: f64 = if m == 0 { 0.0 } else { rng.random_range(-1.0..1.0) };
            let c = Complex64::new(re, im);
            coeffs[linear_index(n, m).unwrap()] = c;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[linear_index(n, -m).unwrap()] = sign * c.conj();
        }
    }
    ShVector::new(order, coeffs).unwrap()
}

fn random_pattern(order: u32, rng: &mut ChaCha12Rng) -> ShVector {
    let coeffs = (0..coefficient_count(order))
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ShVector::new(order, coeffs).unwrap()
}

fn preset_beam(kind: BeamKind, order: u32, steer: Option<SphericalDirection>) -> Beam {
    let profile = AxisymmetricProfile::preset(kind, order).unwrap();
    Beam::from_profile(profile, steer).unwrap()
}

/// Criterion 1: the three velocity patterns split the filter's energy
/// exactly at every point of the sphere.
#[test]
fn criterion_1_velocity_energy_preservation() {
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    let mut worst = 0.0_f64;
    for order in 0..=6u32 {
        let grid = QuadratureGrid::with_degree(2 * (order + 1));
        for _ in 0..50 {
            let w = random_real_pattern(order, &mut rng);
            let padded = w.zero_padded(order + 1).unwrap();
            let velocity = velocity_patterns(&w).unwrap();
            let w_samples = sample_on_grid(&padded, &grid);
            let v_samples: Vec<Vec<Complex64>> =
                velocity.iter().map(|v| sample_on_grid(v, &grid)).collect();
            for (i, w_val) in w_samples.iter().enumerate() {
                let split: f64 = v_samples.iter().map(|v| v[i].norm_sqr()).sum();
                worst = worst.max((split - w_val.norm_sqr()).abs());
            }
        }
    }
    verdict(
        1,
        "velocity energy preservation",
        worst < 1e-10,
        &format!("max pointwise deviation {worst:.3e}, tolerance 1e-10"),
    );
}

/// Criterion 2: the factorial-formula Gaunt coefficients equal the
/// brute-force triple-product integrals; symmetry and selection-rule
/// zeros are exact.
#[test]
fn criterion_2_gaunt_oracle() {
    let count = coefficient_count(4);
    let grid = QuadratureGrid::with_degree(12);
    let basis: Vec<Vec<Complex64>> = grid
        .nodes()
        .map(|(dir, _)| {
            (0..count)
                .map(|q| {
                    let (n, m) = degree_order(q);
                    eval(n, m, dir).unwrap()
                })
                .collect()
        })
        .collect();
    let weights: Vec<f64> = grid.nodes().map(|(_, w)| w).collect();

    let mut worst = 0.0_f64;
    let mut symmetric = true;
    let mut rules_exact = true;
    for q1 in 0..count {
        for q2 in 0..count {
            for q in 0..count {
                let value = gaunt(q1, q2, q);
                let mut integral = Complex64::ZERO;
                for (row, &weight) in basis.iter().zip(&weights) {
                    integral += weight * row[q1] * row[q2] * row[q].conj();
                }
                worst = worst.max((integral - value).norm());
                if value.to_bits() != gaunt(q2, q1, q).to_bits() {
                    symmetric = false;
                }
                let (n1, m1) = degree_order(q1);
                let (n2, m2) = degree_order(q2);
                let (n, m) = degree_order(q);
                let selected = m1 + m2 == m
                    && n <= n1 + n2
                    && n >= n1.abs_diff(n2)
                    && (n1 + n2 + n) % 2 == 0;
                if !selected && value != 0.0 {
                    rules_exact = false;
                }
            }
        }
    }
    verdict(
        2,
        "Gaunt oracle",
        worst < 1e-10 && symmetric && rules_exact,
        &format!(
            "max |formula - quadrature| {worst:.3e} (tolerance 1e-10), \
             symmetry exact: {symmetric}, selection zeros exact: {rules_exact}"
        ),
    );
}

/// Criterion 3: multiplying by a coupling matrix equals expanding the
/// product with the dipole expansions directly.
#[test]
fn criterion_3_coupling_matrix_equivalence() {
    let mut rng = ChaCha12Rng::seed_from_u64(13);
    let dipoles = DipoleCoefficients::standard().component_vectors();
    let mut worst = 0.0_f64;
    for order in 0..=4u32 {
        let matrices = CouplingMatrices::for_order(order).unwrap();
        for _ in 0..20 {
            let w = random_pattern(order, &mut rng);
            let via_matrix = matrices.apply(&w).unwrap();
            for (axis, dipole) in dipoles.iter().enumerate() {
                let via_product = product_expand(&w, dipole).unwrap();
                for (a, b) in via_matrix[axis].coeffs().iter().zip(via_product.coeffs()) {
                    worst = worst.max((a - b).norm());
                }
            }
        }
    }
    verdict(
        3,
        "coupling matrix equivalence",
        worst < 1e-10,
        &format!("max coefficient deviation {worst:.3e}, tolerance 1e-10"),
    );
}

/// Criterion 4: a single plane wave is perfectly directional through any
/// preset beam that hears it, frame by frame with no averaging.
#[test]
fn criterion_4_plane_wave_invariance() {
    let constants = PhysicalConstants::default();
    let doa = SphericalDirection::new(1.1, -2.0).unwrap();
    let steer = SphericalDirection::new(0.4, 0.9).unwrap();
    let mut worst_psi = 0.0_f64;
    let mut worst_doa = 0.0_f64;
    let presets = [
        (BeamKind::Omni, 0u32),
        (BeamKind::Cardioid, 1),
        (BeamKind::Hypercardioid, 1),
        (BeamKind::Hypercardioid, 2),
        (BeamKind::Hypercardioid, 3),
    ];
    for (kind, order) in presets {
        let beam = preset_beam(kind, order, Some(steer));
        assert!(beam.gain_at(&doa).abs() > 1e-3, "arrival must be audible");
        let spec = SceneSpec::new(
            beam.order() + 1,
            vec![PlaneWaveSource {
                doa,
                psd: 1.0,
            }],
            0.0,
            20,
            99,
        )
        .unwrap();
        for frame in synthesize(&spec).frames() {
            let sample = weighted_signals(&beam, frame).unwrap();
            let estimate = instantaneous_energetics(&sample, &constants).unwrap();
            worst_psi = worst_psi.max(estimate.diffuseness);
            let recovered = estimate.doa.expect("directional frame");
            worst_doa = worst_doa.max(recovered.angle_to(&doa));
        }
    }
    verdict(
        4,
        "plane-wave invariance",
        worst_psi < 1e-10 && worst_doa < 1e-6,
        &format!(
            "max per-frame diffuseness {worst_psi:.3e} (tolerance 1e-10), \
             max DOA error {worst_doa:.3e} rad (tolerance 1e-6)"
        ),
    );
}

/// Criterion 5: the cardioid diffuse-field closed form, with its two
/// scalar ingredients re-derived by quadrature, reproduced by a long
/// Monte-Carlo run inside the time budget.
#[test]
fn criterion_5_diffuse_cardioid_closed_form() {
    let start = Instant::now();
    let constants = PhysicalConstants::default();
    let steer = SphericalDirection::new(1.0, 0.7).unwrap();
    let beam = preset_beam(BeamKind::Cardioid, 1, Some(steer));

    let grid = QuadratureGrid::with_degree(2 * beam.order() + 2);
    let samples = sample_on_grid(beam.pattern(), &grid);
    let mut energy = 0.0;
    let mut moment = [0.0_f64; 3];
    for ((dir, weight), value) in grid.nodes().zip(&samples) {
        energy += weight * value.norm_sqr();
        let n = dir.unit_vector();
        for axis in 0..3 {
            moment[axis] += weight * value.norm_sqr() * n[axis];
        }
    }
    let q_quad = 4.0 * PI / energy;
    let k_quad = moment.iter().map(|k| k * k).sum::<f64>().sqrt();
    let q_err = (q_quad - 3.0).abs();
    let k_err = (k_quad - 2.0 * PI / 3.0).abs();
    let psi_analytic = 1.0 - q_quad * k_quad / (4.0 * PI);

    let spec = SceneSpec::new(beam.order() + 1, Vec::new(), 1.0, 100_000, 31).unwrap();
    let estimate = run_experiment(&spec, &beam, &constants).unwrap();
    let psi_err = (estimate.diffuseness - 0.5).abs();
    // Energy flows away from the look direction, so the intensity vector
    // itself points anti-steer (and the apparent arrival sits at +steer).
    let anti_steer =
        SphericalDirection::from_vector(steer.unit_vector().map(|x| -x)).unwrap();
    let intensity_dir = SphericalDirection::from_vector(estimate.intensity).unwrap();
    let direction_err = intensity_dir.angle_to(&anti_steer);
    let elapsed = start.elapsed().as_secs_f64();

    verdict(
        5,
        "diffuse cardioid closed form",
        q_err < 1e-10
            && k_err < 1e-10
            && (psi_analytic - 0.5).abs() < 1e-10
            && psi_err <= 0.02
            && direction_err <= 3.0_f64.to_radians()
            && elapsed < 30.0,
        &format!(
            "quadrature: |Q-3| {q_err:.2e}, |K-2pi/3| {k_err:.2e} (tolerance 1e-10); \
             analytic diffuseness {psi_analytic}; Monte-Carlo deviation {psi_err:.4} \
             (tolerance 0.02), intensity direction error {:.2} deg (tolerance 3), \
             {elapsed:.1} s (budget 30)",
            direction_err.to_degrees()
        ),
    );
}

/// Criterion 6: the two-parameter mixture surface and bias law, checked
/// by Monte-Carlo on a 3x3 grid and by closed-form cross-validation.
#[test]
fn criterion_6_mixture_surface_and_bias() {
    let constants = PhysicalConstants::default();
    let beam = preset_beam(BeamKind::Cardioid, 1, None);
    let profile = beam.profile().unwrap().clone();
    let mut worst_psi = 0.0_f64;
    let mut worst_bias = 0.0_f64;
    let mut worst_consistency = 0.0_f64;
    let mut seed = 600;
    for gamma in [0.25, 1.0, 4.0] {
        for alpha in [0.0, PI / 4.0, PI / 2.0] {
            let doa = SphericalDirection::new(alpha, 0.6).unwrap();
            let psi_ref = diffuseness_surface(gamma, alpha, &profile).unwrap();
            let bias_ref = doa_bias(gamma, alpha, &profile).unwrap();
            let params = MixtureParams::new(gamma, 1.0, doa).unwrap();
            let predicted = predict_mixture(&params, &beam, &constants).unwrap();
            worst_consistency =
                worst_consistency.max((predicted.weighted.diffuseness - psi_ref).abs());
            worst_consistency =
                worst_consistency.max((predicted.weighted.bias.unwrap() - bias_ref).abs());

            seed += 1;
            let spec = SceneSpec::new(
                beam.order() + 1,
                vec![PlaneWaveSource {
                    doa,
                    psd: gamma,
                }],
                1.0,
                100_000,
                seed,
            )
            .unwrap();
            let estimate = run_experiment(&spec, &beam, &constants).unwrap();
            worst_psi = worst_psi.max((estimate.diffuseness - psi_ref).abs());
            let measured_bias = estimate.doa.expect("mixture flow is nonzero").angle_to(&doa);
            worst_bias = worst_bias.max((measured_bias - bias_ref).abs());
        }
    }
    verdict(
        6,
        "mixture surface and bias",
        worst_psi <= 0.02 && worst_bias <= 1.0_f64.to_radians() && worst_consistency < 1e-12,
        &format!(
            "Monte-Carlo: max diffuseness deviation {worst_psi:.4} (tolerance 0.02), \
             max bias deviation {:.3} deg (tolerance 1); closed-form cross-check \
             {worst_consistency:.2e} (tolerance 1e-12)",
            worst_bias.to_degrees()
        ),
    );
}

/// Criterion 7: the unweighted balanced mixture sits at one half, both in
/// closed form and through the omnidirectional estimator.
#[test]
fn criterion_7_unweighted_balanced_mixture() {
    let constants = PhysicalConstants::default();
    let beam = preset_beam(BeamKind::Omni, 0, None);
    let doa = SphericalDirection::new(1.2, 0.3).unwrap();
    let params = MixtureParams::new(1.0, 1.0, doa).unwrap();
    let predicted = predict_mixture(&params, &beam, &constants).unwrap();
    let exact = predicted.unweighted.diffuseness == 0.5;

    let spec = SceneSpec::new(
        1,
        vec![PlaneWaveSource { doa, psd: 1.0 }],
        1.0,
        100_000,
        700,
    )
    .unwrap();
    let estimate = run_experiment(&spec, &beam, &constants).unwrap();
    let deviation = (estimate.diffuseness - 0.5).abs();
    verdict(
        7,
        "unweighted balanced mixture",
        exact && deviation <= 0.02,
        &format!(
            "closed form exactly 0.5: {exact}; Monte-Carlo deviation {deviation:.4} \
             (tolerance 0.02)"
        ),
    );
}

/// Criterion 8: the harmonic foundation. Orthonormality and Parseval at
/// order 6, and the linear index bijection through order 10.
#[test]
fn criterion_8_harmonic_foundation() {
    let count = coefficient_count(6);
    let grid = QuadratureGrid::with_degree(12);
    let basis: Vec<Vec<Complex64>> = grid
        .nodes()
        .map(|(dir, _)| {
            (0..count)
                .map(|q| {
                    let (n, m) = degree_order(q);
                    eval(n, m, dir).unwrap()
                })
                .collect()
        })
        .collect();
    let weights: Vec<f64> = grid.nodes().map(|(_, w)| w).collect();
    let mut worst_ortho = 0.0_f64;
    for q1 in 0..count {
        for q2 in 0..count {
            let mut integral = Complex64::ZERO;
            for (row, &weight) in basis.iter().zip(&weights) {
                integral += weight * row[q1] * row[q2].conj();
            }
            let expected = if q1 == q2 { 1.0 } else { 0.0 };
            worst_ortho = worst_ortho.max((integral - expected).norm());
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(88);
    let mut worst_parseval = 0.0_f64;
    for _ in 0..20 {
        let f = random_pattern(6, &mut rng);
        let coefficient_energy: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
        let surface_energy: f64 = grid
            .nodes()
            .zip(sample_on_grid(&f, &grid))
            .map(|((_, w), v)| w * v.norm_sqr())
            .sum();
        worst_parseval = worst_parseval.max((surface_energy - coefficient_energy).abs());
    }

    let mut bijection = true;
    let mut expected_q = 0;
    for n in 0..=10u32 {
        for m in -(n as i32)..=(n as i32) {
            let q = linear_index(n, m).unwrap();
            if q != expected_q || degree_order(q) != (n, m) {
                bijection = false;
            }
            expected_q += 1;
        }
    }
    verdict(
        8,
        "harmonic foundation",
        worst_ortho < 1e-10 && worst_parseval < 1e-10 && bijection,
        &format!(
            "max orthonormality deviation {worst_ortho:.3e}, max Parseval deviation \
             {worst_parseval:.3e} (tolerance 1e-10); index bijection to order 10: {bijection}"
        ),
    );
}

/// Criterion 9: byte-level determinism of the command line tool, and
/// bit-exact round-tripping of the matrices file.
#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let scene_path = dir.path().join("scene.json");
    std::fs::write(
        &scene_path,
        r#"{"order": 2, "waves": [{"doa": {"theta": 0.8, "phi": -1.1}, "psd": 2.0}], "diffuse_psd": 1.0, "frames": 200, "seed": 42}"#,
    )
    .unwrap();

    let run = |tag: &str| {
        let out = dir.path().join(format!("estimate-{tag}.json"));
        let frames_json = dir.path().join(format!("frames-{tag}.json"));
        let frames_shf = dir.path().join(format!("frames-{tag}.shf"));
        for dump in [&frames_json, &frames_shf] {
            let status = Command::new(env!("CARGO_BIN_EXE_sectorfield"))
                .args(["simulate", "--scene"])
                .arg(&scene_path)
                .args(["--beam", "preset:cardioid@0.3,1.9"])
                .arg("--out")
                .arg(&out)
                .arg("--dump-frames")
                .arg(dump)
                .status()
                .unwrap();
            assert!(status.success());
        }
        (
            std::fs::read(&out).unwrap(),
            std::fs::read(&frames_json).unwrap(),
            std::fs::read(&frames_shf).unwrap(),
        )
    };
    let first = run("a");
    let second = run("b");
    let deterministic = first == second;

    let matrices_path = dir.path().join("matrices.json");
    let status = Command::new(env!("CARGO_BIN_EXE_sectorfield"))
        .args(["matrices", "--order", "3", "--out"])
        .arg(&matrices_path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&matrices_path).unwrap();
    let reloaded = matrices_from_json(&text).unwrap();
    let reference = CouplingMatrices::for_order(3).unwrap();
    let mut bit_exact = text == matrices_to_json(&reloaded);
    for (a, b) in [
        (reloaded.ax(), reference.ax()),
        (reloaded.ay(), reference.ay()),
        (reloaded.az(), reference.az()),
    ] {
        for (x, y) in a.iter().zip(b.iter()) {
            if x.re.to_bits() != y.re.to_bits() || x.im.to_bits() != y.im.to_bits() {
                bit_exact = false;
            }
        }
    }
    verdict(
        9,
        "determinism",
        deterministic && bit_exact,
        &format!(
            "repeated simulate byte-identical: {deterministic}; matrices file \
             round-trip bit-exact: {bit_exact}"
        ),
    );
}
