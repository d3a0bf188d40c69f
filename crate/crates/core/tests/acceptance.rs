//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `--nocapture`). Tolerances are pinned here, not configured.

use std::time::Instant;

use num::complex::Complex64;
use num::{One, Zero};
use rand::{Rng, SeedableRng};

use superwave::builtins::{
    half_shannon_wavelet, shannon_3band_wavelets, shannon_scaling, shannon_wavelet,
};
use superwave::characterization::{
    check_strong_disjointness, check_super_wavelet, check_wavelet_scalar, dimension_probe_points,
    gripenberg_weiss_residual, offset_set_check, oversample, verify_ntf_generators,
    wavelet_dimension_at, CheckOptions, WaveletSystem, WitnessIndex,
};
use superwave::fiber::{
    apply_multiplier, fiber_at, special_fiber, Fiber, FiberIndex, FiberOperator, VectorFunction,
};
use superwave::invariants::{
    dilation_check, dim_dilation_check, dimension_function, dual_gramian_matrix,
    extract_quasi_orthogonal, fiber_refinement, local_trace_vector,
    multiplicity_at, scaling_limit_probe, spectral_dilation_check, ShiftInvariantSpace,
    DEFAULT_RANK_TOL,
};
use superwave::rational::{Ratio, RationalPi};
use superwave::spectrum::{
    default_grid_offset, grid_points, subdivide_midpoints, PeriodicStep, StepSpectrum, Window,
};
use superwave::structure::AffineStructure;

fn classical() -> AffineStructure {
    AffineStructure::classical(2)
}

fn scaling_function() -> VectorFunction {
    VectorFunction::scalar("scaling", shannon_scaling())
}

fn verdict(criterion: &str, passed: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {criterion}: {detail}");
}

#[test]
fn criterion_01_shannon_verification() {
    let start = Instant::now();
    let report = check_wavelet_scalar(&[shannon_wavelet()], 2, &CheckOptions::exact()).unwrap();
    let elapsed = start.elapsed();
    let ok = report.passed
        && report.max_residual < 1e-12
        && report.cells_checked >= 1
        && report.cells_checked < 10_000
        && elapsed.as_secs_f64() < 1.0;
    verdict(
        "1 (Shannon verification)",
        ok,
        &format!(
            "residual {:.1e}, {} cells, {:?}",
            report.max_residual, report.cells_checked, elapsed
        ),
    );
}

#[test]
fn criterion_02_oversampling() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut ok = true;
    // (N, p) with a scale-N orthonormal MSF input in each case.
    let cases: Vec<(u32, u32, Vec<StepSpectrum>)> = vec![
        (2, 3, vec![shannon_wavelet()]),
        (2, 5, vec![shannon_wavelet()]),
        (3, 2, shannon_3band_wavelets()),
    ];
    for (scale, p, psis) in cases {
        let system = oversample(&psis, scale, p, None).unwrap();
        let report = check_super_wavelet(&system, &CheckOptions::exact()).unwrap();
        ok &= report.passed && report.max_residual < 1e-12;
        // The scalar eta family is itself a NTF wavelet (refined oversampling
        // statement), and norms are preserved exactly.
        let p_ratio = Ratio::from_integer((p as i64).into());
        let etas: Vec<StepSpectrum> = psis.iter().map(|s| s.dilate_arg(&p_ratio)).collect();
        let scalar = check_wavelet_scalar(&etas, scale, &CheckOptions::exact()).unwrap();
        ok &= scalar.passed && scalar.max_residual < 1e-12;
        for f in &system.psis {
            ok &= f.l2_norm_sq_exact() == Ratio::one();
        }
        detail.push_str(&format!(
            "(N={scale},p={p}): super {:.1e}, scalar {:.1e}; ",
            report.max_residual, scalar.max_residual
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 5.0;
    detail.push_str(&format!("{elapsed:?} total"));
    verdict("2 (oversampling)", ok, &detail);
}

#[test]
fn criterion_03_known_bad_witness() {
    // Super-wavelet side.
    let structure =
        AffineStructure::new(2, vec![1, 2], vec![RationalPi::zero(), RationalPi::zero()]).unwrap();
    let psi = VectorFunction::new("pair", vec![shannon_wavelet(), half_shannon_wavelet()]);
    let system = WaveletSystem::candidate(structure, vec![psi]).unwrap();
    let report = check_super_wavelet(&system, &CheckOptions::exact()).unwrap();
    let mut ok = !report.passed;
    let report_code = report.exit_code();
    let witness = report.witness.expect("witness on failure");
    ok &= witness.equation == "2.9_1_1" && witness.index == WitnessIndex::S(-1);
    let (left, right) = witness.cell.clone().expect("cell");
    ok &= left < RationalPi::new(3, 2) && right > RationalPi::pi();
    // Strong-disjointness side: same witness shape.
    let dis = check_strong_disjointness(
        &[shannon_wavelet()],
        &[half_shannon_wavelet()],
        2,
        &CheckOptions::exact(),
    )
    .unwrap();
    ok &= !dis.passed;
    let dis_code = dis.exit_code();
    let dw = dis.witness.expect("witness on failure");
    ok &= dw.equation == "2.9_1_1-cross" && dw.index == WitnessIndex::S(-1);
    let (dl, dr) = dw.cell.clone().expect("cell");
    ok &= dl < RationalPi::new(3, 2) && dr > RationalPi::pi();
    // Exit code 1 through the report mapping.
    ok &= report_code == 1 && dis_code == 1;
    verdict(
        "3 (known-bad witness)",
        ok,
        &format!("super witness {}, disjoint witness {}", witness.describe(), dw.describe()),
    );
}

#[test]
fn criterion_04_trace_invariance() {
    let a = classical();
    let phi = scaling_function();
    let left_half = PeriodicStep::new(StepSpectrum::indicator(
        RationalPi::zero(),
        RationalPi::pi(),
    ))
    .unwrap();
    let right_half = PeriodicStep::new(StepSpectrum::indicator(
        RationalPi::from_integer(-1),
        RationalPi::zero(),
    ))
    .unwrap();
    let split = vec![
        apply_multiplier(&left_half, &phi, &a),
        apply_multiplier(&right_half, &phi, &a),
    ];
    let (r1, v1) = verify_ntf_generators(vec![phi], &a, &CheckOptions::exact()).unwrap();
    let (r2, v2) = verify_ntf_generators(split, &a, &CheckOptions::exact()).unwrap();
    let mut ok = r1.passed && r2.passed;
    // 10 random finite fibers x 1000 midpoints.
    let window = Window::fundamental();
    let mut all_gens: Vec<VectorFunction> = v1.generators().to_vec();
    all_gens.extend_from_slice(v2.generators());
    let cells = fiber_refinement(&all_gens, &a, &window);
    let points = subdivide_midpoints(&cells, 1000);
    assert!(points.len() >= 1000);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let mut f = Fiber::zero();
        for _ in 0..3 {
            let k = rng.gen_range(-3i64..=3);
            f.set(
                FiberIndex::new(k, 1),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
        }
        for xi in &points {
            let t1 = local_trace_vector(&v1, &a, &f, xi);
            let t2 = local_trace_vector(&v2, &a, &f, xi);
            worst = worst.max((t1 - t2).abs());
        }
    }
    ok &= worst < 1e-12;
    // Entrywise-equal dual Gramians on |k| <= 3.
    let mut gram_equal = true;
    for cell in &cells {
        let g1 = dual_gramian_matrix(&v1, &a, &cell.mid, 3);
        let g2 = dual_gramian_matrix(&v2, &a, &cell.mid, 3);
        gram_equal &= g1 == g2;
    }
    ok &= gram_equal;
    verdict(
        "4 (trace invariance)",
        ok,
        &format!(
            "max trace diff {worst:.2e} over 10 fibers x {} midpoints; Gramians equal: {gram_equal}",
            points.len()
        ),
    );
}

#[test]
fn criterion_05_dilation_formulas() {
    let a = classical();
    let (report, space) =
        verify_ntf_generators(vec![scaling_function()], &a, &CheckOptions::exact()).unwrap();
    assert!(report.passed);
    let spectral = spectral_dilation_check(&space, &a);
    let dim = dim_dilation_check(&space, &a).unwrap();
    let grid = grid_points(&Window::fundamental(), 256, &default_grid_offset());
    let r_id = dilation_check(&space, &a, &FiberOperator::Identity, &grid);
    let r_rank = dilation_check(&space, &a, &FiberOperator::RankOne(Fiber::delta(0, 1)), &grid);
    let ok = spectral == 0.0 && dim == 0.0 && r_id < 1e-10 && r_rank < 1e-10;
    verdict(
        "5 (dilation formulas)",
        ok,
        &format!(
            "spectral {spectral:.1e}, dim {dim:.1e}, trace identity {r_id:.2e}, trace rank-one {r_rank:.2e} on 256-point grid"
        ),
    );
}

#[test]
fn criterion_06_gripenberg_weiss() {
    let system = WaveletSystem::candidate(
        classical(),
        vec![VectorFunction::scalar("shannon", shannon_wavelet())],
    )
    .unwrap();
    let eps = RationalPi::new(1, 1024);
    let window = Window::new(
        &RationalPi::from_integer(-1) + &eps,
        &RationalPi::pi() - &eps,
    );
    let report = gripenberg_weiss_residual(
        &system,
        &[scaling_function()],
        &window,
        &eps,
        &CheckOptions::exact(),
    )
    .unwrap();
    let ok = report.passed && report.max_residual == 0.0;
    verdict(
        "6 (Gripenberg-Weiss)",
        ok,
        &format!(
            "residual {:.1e} on {} cells",
            report.max_residual, report.cells_checked
        ),
    );
}

#[test]
fn criterion_07_dimension_equals_multiplicity() {
    // Shannon: 512 probe points, D = 1 and equals the Gramian rank.
    let shannon = WaveletSystem::candidate(
        classical(),
        vec![VectorFunction::scalar("shannon", shannon_wavelet())],
    )
    .unwrap();
    let mut ok = true;
    for point in dimension_probe_points(512, 42) {
        let (value, rank) = wavelet_dimension_at(&shannon, &point, true).unwrap();
        ok &= (value - 1.0).abs() < 1e-9 && rank == Some(1);
    }
    // p = 3 oversampled system at 128 points: integer values matching rank.
    let oversampled = oversample(&[shannon_wavelet()], 2, 3, None).unwrap();
    let mut max_int_dist = 0.0f64;
    for point in dimension_probe_points(128, 43) {
        let (value, rank) = wavelet_dimension_at(&oversampled, &point, true).unwrap();
        let nearest = value.round();
        max_int_dist = max_int_dist.max((value - nearest).abs());
        ok &= (value - nearest).abs() < 1e-9;
        ok &= nearest as usize == rank.unwrap();
    }
    verdict(
        "7 (dimension = multiplicity)",
        ok,
        &format!("512 + 128 probe points, max integer distance {max_int_dist:.2e}"),
    );
}

#[test]
fn criterion_08_limit_probe() {
    let a = classical();
    let space = ShiftInvariantSpace::new(vec![scaling_function()]);
    let probe = scaling_limit_probe(&space, &a, 1, &RationalPi::from_integer(100), 30).unwrap();
    let mut ok = probe.settled_at == Some(7);
    for (m, value) in probe.values.iter().enumerate() {
        if m >= 7 {
            ok &= (value - 1.0).abs() <= 1e-12;
        }
    }
    verdict(
        "8 (limit probe)",
        ok,
        &format!("xi = 100π settles at m = {:?} through m = 30", probe.settled_at),
    );
}

#[test]
fn criterion_09_structural_invariants() {
    let mut ok = true;
    let mut detail = String::new();

    // Trace periodicity.
    let start = Instant::now();
    let a = classical();
    let (_, space) =
        verify_ntf_generators(vec![scaling_function()], &a, &CheckOptions::exact()).unwrap();
    let cells = fiber_refinement(space.generators(), &a, &Window::fundamental());
    let f = special_fiber(2, 1, 1, Complex64::new(0.5, 0.5)).unwrap();
    for cell in &cells {
        for k in -3i64..=3 {
            let lhs =
                local_trace_vector(&space, &a, &f, &(&cell.mid + &RationalPi::from_integer(2 * k)));
            let rhs = local_trace_vector(&space, &a, &f.shift(k), &cell.mid);
            ok &= (lhs - rhs).abs() < 1e-14;
        }
    }
    detail.push_str(&format!("periodicity {:?}; ", start.elapsed()));
    assert!(start.elapsed().as_secs_f64() < 2.0);

    // Additivity over orthogonal summands with disjoint supports.
    let start = Instant::now();
    let v1 = ShiftInvariantSpace::new(vec![scaling_function()]);
    let high = VectorFunction::scalar(
        "band",
        StepSpectrum::indicator(RationalPi::pi(), RationalPi::from_integer(3)),
    );
    let v2 = ShiftInvariantSpace::new(vec![high.clone()]);
    let joint = ShiftInvariantSpace::new(vec![scaling_function(), high.clone()]);
    let probe_fibers: Vec<Fiber> = vec![
        Fiber::delta(0, 1),
        special_fiber(1, 1, 1, Complex64::I).unwrap(),
        special_fiber(-2, 1, 1, Complex64::ONE).unwrap(),
    ];
    let cells = fiber_refinement(joint.generators(), &a, &Window::fundamental());
    for cell in &cells {
        for f in &probe_fibers {
            let sum = local_trace_vector(&v1, &a, f, &cell.mid)
                + local_trace_vector(&v2, &a, f, &cell.mid);
            let total = local_trace_vector(&joint, &a, f, &cell.mid);
            ok &= (sum - total).abs() < 1e-12;
            // Monotony: V1 ⊂ V1 ⊕ V2.
            ok &= local_trace_vector(&v1, &a, f, &cell.mid) <= total + 1e-12;
        }
    }
    detail.push_str(&format!("additivity+monotony {:?}; ", start.elapsed()));
    assert!(start.elapsed().as_secs_f64() < 2.0);

    // Increasing dimension values along the inverse-dilation chain, realized
    // through the verified dilation recursion.
    let start = Instant::now();
    let dim0 = dimension_function(&space, &a).unwrap();
    let xi = RationalPi::new(3, 7);
    let mut values = Vec::new();
    let mut level: Vec<RationalPi> = vec![xi.clone()];
    for _ in 0..=6 {
        let value: f64 = level
            .iter()
            .map(|p| dim0.evaluate_periodic(p).re)
            .sum();
        values.push(value);
        // Next level: arguments (xi + 2 l pi)/2 of each current argument.
        level = level
            .iter()
            .flat_map(|p| {
                (0..2).map(move |l| {
                    (p + &RationalPi::from_integer(2 * l)).unscale(&Ratio::from_integer(2.into()))
                })
            })
            .collect();
    }
    ok &= values.windows(2).all(|w| w[0] <= w[1] + 1e-12);
    detail.push_str(&format!("chain dims {values:?}; ", ));
    assert!(start.elapsed().as_secs_f64() < 2.0);

    // Fiber periodicity and multiplier covariance spot checks.
    let start = Instant::now();
    let phi = scaling_function();
    let symbol = PeriodicStep::new(StepSpectrum::indicator(
        RationalPi::zero(),
        RationalPi::pi(),
    ))
    .unwrap();
    let mphi = apply_multiplier(&symbol, &phi, &a);
    for cell in fiber_refinement(&[phi.clone(), mphi.clone()], &a, &Window::fundamental()) {
        let scalar = symbol.evaluate_periodic(&cell.mid);
        ok &= fiber_at(&mphi, &a, &cell.mid) == fiber_at(&phi, &a, &cell.mid).scale(scalar);
        for s in -3i64..=3 {
            let shifted = &cell.mid + &RationalPi::from_integer(2 * s);
            ok &= fiber_at(&phi, &a, &shifted) == fiber_at(&phi, &a, &cell.mid).shift(-s);
        }
    }
    detail.push_str(&format!("fiber covariance {:?}; ", start.elapsed()));

    // Congruence-class embeddings resolve the identity.
    let start = Instant::now();
    for structure in [classical(), AffineStructure::oversampling(2, 3).unwrap()] {
        for k in -5i64..=5 {
            for comp in 1..=structure.n() {
                let e = Fiber::delta(k, comp);
                let mut acc = Fiber::zero();
                for l in 0..structure.scale() {
                    acc = acc.add(&structure.upsample(l, &structure.downsample(l, &e)));
                }
                ok &= acc == e;
            }
        }
    }
    detail.push_str(&format!("D_l partition {:?}; ", start.elapsed()));

    // Multiplicity equals the exact dimension value at midpoints.
    for cell in &cells {
        let dim_val = dimension_function(&joint, &a).unwrap().evaluate_periodic(&cell.mid);
        let rank = multiplicity_at(&joint, &a, &cell.mid, DEFAULT_RANK_TOL);
        ok &= (dim_val.re - rank as f64).abs() < 1e-9;
    }

    // Offset-set identities.
    let start = Instant::now();
    for (scale, p) in [(2u32, 3u32), (3, 5)] {
        let report = offset_set_check(scale, p, 50).unwrap();
        ok &= report.passed;
    }
    detail.push_str(&format!("offset sets {:?}", start.elapsed()));
    assert!(start.elapsed().as_secs_f64() < 2.0);

    verdict("9 (structural invariant suite)", ok, &detail);
}

#[test]
fn criterion_10_quasi_orthogonal_extraction() {
    let a = classical();
    // Rank 2 on [-pi, 0), rank 1 on [0, pi).
    let phi1 = scaling_function();
    let phi2 = VectorFunction::scalar(
        "mixed",
        StepSpectrum::from_pieces(vec![
            (
                RationalPi::from_integer(-1),
                RationalPi::zero(),
                Complex64::ONE,
                Ratio::zero(),
            ),
            (
                RationalPi::from_integer(-3),
                RationalPi::from_integer(-2),
                Complex64::ONE,
                Ratio::zero(),
            ),
        ])
        .unwrap(),
    );
    let space = ShiftInvariantSpace::new(vec![phi1, phi2]);
    let outputs = extract_quasi_orthogonal(&space, &a, DEFAULT_RANK_TOL).unwrap();
    let mut ok = outputs.len() == 2;
    // Orthonormality relations at every midpoint: <f_i, f_j> = delta_ij on
    // S_i, and S_2 is exactly the designed half-window.
    let cells = fiber_refinement(&outputs, &a, &Window::fundamental());
    let mut s2_matches = true;
    for cell in &cells {
        let fibers: Vec<Fiber> = outputs
            .iter()
            .map(|f| fiber_at(f, &a, &cell.mid))
            .collect();
        for (i, fi) in fibers.iter().enumerate() {
            for (j, fj) in fibers.iter().enumerate() {
                let inner = fi.inner(fj);
                let expected = if i == j {
                    // chi_{S_i}: 1 where the fiber is nonzero.
                    if fi.is_zero() {
                        Complex64::ZERO
                    } else {
                        Complex64::ONE
                    }
                } else {
                    Complex64::ZERO
                };
                ok &= (inner - expected).norm() < 1e-10;
            }
        }
        let in_s2 = cell.mid < RationalPi::zero();
        s2_matches &= fibers[1].is_zero() != in_s2;
    }
    ok &= s2_matches;
    verdict(
        "10 (quasi-orthogonal extraction)",
        ok,
        &format!(
            "{} outputs over {} cells; S2 = [-pi, 0): {s2_matches}",
            outputs.len(),
            cells.len()
        ),
    );
}

#[test]
fn criterion_11_determinism() {
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_superwave");
    let tmp = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    // The known-bad pair as a document for criterion 3's command.
    let bad_system = {
        let structure = AffineStructure::new(
            2,
            vec![1, 2],
            vec![RationalPi::zero(), RationalPi::zero()],
        )
        .unwrap();
        let psi = VectorFunction::new("pair", vec![shannon_wavelet(), half_shannon_wavelet()]);
        WaveletSystem::candidate(structure, vec![psi]).unwrap()
    };
    let bad_path = tmp.join("known_bad.json");
    std::fs::write(
        &bad_path,
        superwave::docs::serialize_document(&superwave::docs::Document::System(bad_system))
            .unwrap(),
    )
    .unwrap();
    let bad = bad_path.to_string_lossy().into_owned();
    // (args, expected exit code, write csv)
    let runs: Vec<(Vec<&str>, i32, bool)> = vec![
        (
            vec!["check-wavelet", "--builtin", "shannon", "--mode", "exact"],
            0,
            true,
        ),
        (
            vec!["oversample", "--builtin", "shannon", "--N", "2", "--p", "3"],
            0,
            false,
        ),
        (vec!["check-wavelet", &bad], 1, true),
        (
            vec![
                "check-disjoint",
                "--builtin",
                "shannon",
                "--builtin2",
                "half-shannon",
            ],
            1,
            true,
        ),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (idx, (args, expected_code, want_csv)) in runs.iter().enumerate() {
        let csv_a = tmp.join(format!("run{idx}_a.csv"));
        let csv_b = tmp.join(format!("run{idx}_b.csv"));
        let run = |csv: Option<&std::path::Path>| {
            let mut cmd = Command::new(bin);
            cmd.args(args);
            if let Some(csv) = csv {
                cmd.arg("--csv").arg(csv);
            }
            cmd.output().expect("binary runs")
        };
        let out_a = run(want_csv.then_some(csv_a.as_path()));
        let out_b = run(want_csv.then_some(csv_b.as_path()));
        ok &= out_a.stdout == out_b.stdout;
        ok &= out_a.status.code() == Some(*expected_code);
        ok &= out_b.status.code() == Some(*expected_code);
        if *want_csv {
            let a = std::fs::read(&csv_a).unwrap();
            let b = std::fs::read(&csv_b).unwrap();
            ok &= a == b && !a.is_empty();
        }
        detail.push_str(&format!("{}: code {:?}; ", args[0], out_a.status.code()));
    }
    verdict("11 (determinism)", ok, &detail);
}
