use efikit::clifford::SamplingMode;
use efikit::extractor::{
    apply_extractor, apply_extractor_leading, check_k_min, decoupling_error, decoupling_report,
    extractor_params, params_with_ell, write_decoupling_csv, DecouplingRow, ExtractorPlan,
};
use efikit::linalg;
use efikit::qstate::{haar_unitary, random_density, DensityOperator, RegisterLayout};
use efikit::rng::rng_from_seed;

fn two_qubits(diag: &[f64]) -> DensityOperator {
    DensityOperator::diagonal(RegisterLayout::new([("A", 1), ("B", 1)]).unwrap(), diag).unwrap()
}

#[test]
fn params_follow_output_length_formula() {
    assert_eq!(
        extractor_params(4, 0.0, 0.5).unwrap().params().unwrap().ell,
        1
    );
    assert_eq!(
        extractor_params(6, 6.0, 0.25)
            .unwrap()
            .params()
            .unwrap()
            .ell,
        4
    );
    assert!(matches!(
        extractor_params(2, -2.0, 0.5).unwrap(),
        ExtractorPlan::Infeasible { .. }
    ));
    // Never exceeds n.
    assert_eq!(
        extractor_params(3, 3.0, 0.99)
            .unwrap()
            .params()
            .unwrap()
            .ell,
        2
    );
    assert!(extractor_params(2, 0.0, 1.0).is_err());
    assert!(extractor_params(2, 3.0, 0.5).is_err());
    let p = params_with_ell(2, 2, 0.0, 0.5).unwrap();
    assert!(!p.feasible);
    assert!((p.delta_smooth - 0.5 / 12.0).abs() < 1e-15);
}

#[test]
fn maximally_mixed_input_is_a_fixed_point() {
    let layout = RegisterLayout::new([("A", 2), ("E", 1)]).unwrap();
    let rho_e = random_density(
        &RegisterLayout::single("E", 1).unwrap(),
        2,
        &mut rng_from_seed(3),
    )
    .unwrap();
    let rho = DensityOperator::maximally_mixed(RegisterLayout::single("A", 2).unwrap())
        .tensor(&rho_e)
        .unwrap();
    assert_eq!(rho.layout(), &layout);
    let out = apply_extractor_leading(&rho, &["A"], 1, SamplingMode::Full).unwrap();
    let ideal = out.ideal();
    for b in &out.branches {
        assert!(linalg::max_abs(&(&b.operator - &ideal)) < 1e-12);
    }
    assert!(decoupling_report(&out).error <= 1e-10);
}

#[test]
fn one_qubit_trivial_split_matches_twirl_residual() {
    let rho =
        DensityOperator::diagonal(RegisterLayout::single("A", 1).unwrap(), &[0.8, 0.2]).unwrap();
    let out = apply_extractor(&rho, &["A"], &["A"], SamplingMode::Full).unwrap();
    assert_eq!(out.branches.len(), 24);
    // Every branch is a rotation of diag(0.8, 0.2): distance 0.3 to I/2.
    for d in out.branch_distances() {
        assert!((d - 0.3).abs() < 1e-12);
    }
    // The average itself is the Clifford twirl, which is I/2.
    assert!(linalg::max_abs(&(out.average().matrix() - linalg::identity(2).scale(0.5))) < 1e-12);
}

#[test]
fn pure_two_qubit_input_regression_values() {
    // U|00⟩ runs over the 60 stabilizer states uniformly; 36 are product
    // states whose one-qubit marginal is pure (distance 1/2), the other 24
    // are maximally entangled (distance 0).
    let rho = two_qubits(&[1.0, 0.0, 0.0, 0.0]);
    let e1 = decoupling_error(&rho, &["A", "B"], &["A"], SamplingMode::Full).unwrap();
    assert!((e1 - 0.3).abs() < 1e-12, "{e1}");
    // ℓ = n: every branch is pure, distance to I/4 is 3/4.
    let e2 = decoupling_error(&rho, &["A", "B"], &["A", "B"], SamplingMode::Full).unwrap();
    assert!((e2 - 0.75).abs() < 1e-12, "{e2}");
}

#[test]
fn one_bit_of_min_entropy_meets_the_error_target() {
    let rho = DensityOperator::maximally_mixed(RegisterLayout::single("A", 1).unwrap())
        .tensor(&DensityOperator::basis(RegisterLayout::single("B", 1).unwrap(), 0).unwrap())
        .unwrap();
    let err = decoupling_error(&rho, &["A", "B"], &["A"], SamplingMode::Full).unwrap();
    assert!(err <= 0.5, "{err}");
}

#[test]
fn index_register_is_uniform_and_traces_are_consistent() {
    let layout = RegisterLayout::new([("A", 2), ("E", 1)]).unwrap();
    let rho = random_density(&layout, 3, &mut rng_from_seed(8)).unwrap();
    let out = apply_extractor_leading(&rho, &["A"], 1, SamplingMode::Full).unwrap();
    assert_eq!(out.branches.len(), 11520);
    assert_eq!(out.weight(), 1.0 / 11520.0);
    assert!(out.trace_residual() < 1e-9);
    let idx: Vec<u128> = out.branches.iter().map(|b| b.clifford_index).collect();
    assert_eq!(idx, (0..11520u128).collect::<Vec<_>>());
}

#[test]
fn cq_operator_is_block_diagonal() {
    let rho =
        DensityOperator::diagonal(RegisterLayout::single("A", 1).unwrap(), &[0.9, 0.1]).unwrap();
    let out = apply_extractor(&rho, &["A"], &["A"], SamplingMode::Full).unwrap();
    let cq = out.cq_operator().unwrap();
    assert_eq!(cq.nrows(), 48);
    assert!((cq.trace().re - 1.0).abs() < 1e-12);
    assert_eq!(cq[(0, 2)], linalg::ZERO);
}

#[test]
fn planted_min_entropy_instances_respect_the_bound() {
    let layout = RegisterLayout::single("A", 2).unwrap();
    let mut checked = 0;
    for t in 0..50u64 {
        let mut rng = rng_from_seed(1000 + t);
        let k = 1 + (t % 2) as usize;
        // I/2^k ⊗ |0⟩⟨0| on the rest, then a Haar rotation.
        let mut diag = vec![0.0; 4];
        for d in diag.iter_mut().take(1 << k) {
            *d = 1.0 / (1 << k) as f64;
        }
        let rho = DensityOperator::diagonal(layout.clone(), &diag)
            .unwrap()
            .apply_unitary(&haar_unitary(layout.clone(), &mut rng).unwrap(), &["A"])
            .unwrap();
        let eps = if k == 2 {
            0.5 + 0.4 * (t as f64 / 50.0)
        } else {
            0.75 + 0.2 * (t as f64 / 50.0)
        };
        let plan = extractor_params(2, k as f64, eps).unwrap();
        let Some(p) = plan.params() else { continue };
        let err = apply_extractor_leading(&rho, &["A"], p.ell, SamplingMode::Full)
            .map(|o| decoupling_report(&o).error)
            .unwrap();
        assert!(err <= eps + 1e-12, "t={t} k={k} eps={eps} err={err}");
        assert!(check_k_min(&rho, &["A"], k as f64, 0.0).unwrap().consistent);
        checked += 1;
    }
    assert_eq!(checked, 50);
}

#[test]
fn error_does_not_drop_when_output_grows_past_the_bound() {
    let layout = RegisterLayout::single("A", 2).unwrap();
    for t in 0..3u64 {
        let mut rng = rng_from_seed(70 + t);
        let rho = DensityOperator::diagonal(layout.clone(), &[0.5, 0.5, 0.0, 0.0])
            .unwrap()
            .apply_unitary(&haar_unitary(layout.clone(), &mut rng).unwrap(), &["A"])
            .unwrap();
        let e1 = apply_extractor_leading(&rho, &["A"], 1, SamplingMode::Full)
            .map(|o| decoupling_report(&o).error)
            .unwrap();
        let e2 = apply_extractor_leading(&rho, &["A"], 2, SamplingMode::Full)
            .map(|o| decoupling_report(&o).error)
            .unwrap();
        assert!(e2 >= e1 - 1e-12, "{e1} {e2}");
    }
}

#[test]
fn monte_carlo_agrees_with_full_enumeration() {
    let layout = RegisterLayout::single("A", 2).unwrap();
    let rho = random_density(&layout, 2, &mut rng_from_seed(4)).unwrap();
    let full = apply_extractor_leading(&rho, &["A"], 1, SamplingMode::Full)
        .map(|o| decoupling_report(&o).error)
        .unwrap();
    let mut within = 0;
    for trial in 0..20u64 {
        let mc = apply_extractor_leading(
            &rho,
            &["A"],
            1,
            SamplingMode::MonteCarlo {
                samples: 2000,
                seed: trial,
            },
        )
        .unwrap();
        let r = decoupling_report(&mc);
        if (r.error - full).abs() <= 3.0 * r.standard_error.unwrap() {
            within += 1;
        }
    }
    // 3σ coverage is ≈ 99.7%; allow one miss in 20.
    assert!(within >= 19, "{within}/20");
}

#[test]
fn monte_carlo_is_deterministic_per_seed() {
    let layout = RegisterLayout::single("A", 3).unwrap();
    let rho = random_density(&layout, 2, &mut rng_from_seed(9)).unwrap();
    let mode = SamplingMode::MonteCarlo {
        samples: 50,
        seed: 5,
    };
    let a = apply_extractor_leading(&rho, &["A"], 1, mode).unwrap();
    let b = apply_extractor_leading(&rho, &["A"], 1, mode).unwrap();
    assert_eq!(a, b);
    assert!(apply_extractor_leading(&rho, &["A"], 1, SamplingMode::Full).is_err());
    assert!(apply_extractor_leading(
        &rho,
        &["A"],
        1,
        SamplingMode::MonteCarlo {
            samples: 0,
            seed: 0
        }
    )
    .is_err());
}

#[test]
fn register_errors_are_reported() {
    let rho = two_qubits(&[1.0, 0.0, 0.0, 0.0]);
    assert!(apply_extractor(&rho, &["A"], &["B"], SamplingMode::Full).is_err());
    assert!(apply_extractor(&rho, &["Q"], &["Q"], SamplingMode::Full).is_err());
}

#[test]
fn csv_has_expected_columns() {
    let p = extractor_params(4, 0.0, 0.5)
        .unwrap()
        .params()
        .unwrap()
        .clone();
    let rho = two_qubits(&[0.25; 4]);
    let out = apply_extractor(&rho, &["A", "B"], &["A"], SamplingMode::Full).unwrap();
    let row = DecouplingRow::new(&p, &decoupling_report(&out), SamplingMode::Full);
    let mut buf = Vec::new();
    write_decoupling_csv(&[row], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("n,ell,k_min,eps,mode,samples,measured_error,bound,pass\n"));
}
