use efikit::clifford::{
    self, clifford_order, clifford_order_u128, enumerate_dense, otp_average, pauli_otp,
    two_design_moment_error, CliffordElement, PauliString, SamplingMode,
};
use efikit::linalg::{self, c, CMatrix};
use efikit::qstate::{gates, random_density, DensityOperator, PureState, RegisterLayout};
use efikit::rng::rng_from_seed;
use num_bigint::BigUint;
use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};

fn random_matrix(d: usize, seed: u64) -> CMatrix {
    let mut rng = rng_from_seed(seed);
    CMatrix::from_fn(d, d, |_, _| {
        c(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        )
    })
}

/// `|Tr(U†V)| = d` iff `U ∝ V`.
fn equal_up_to_phase(u: &CMatrix, v: &CMatrix) -> bool {
    ((u.adjoint() * v).trace().norm() - u.nrows() as f64).abs() < 1e-9
}

#[test]
fn orders_match_closed_form_and_divisibility() {
    assert_eq!(clifford_order(1), BigUint::from(24u32));
    assert_eq!(clifford_order(2), BigUint::from(11520u32));
    for n in 2..=3 {
        assert_eq!(
            clifford_order(n) % clifford_order(n - 1),
            BigUint::from(0u32)
        );
    }
    for n in 1..=7 {
        assert_eq!(
            BigUint::from(clifford_order_u128(n).unwrap()),
            clifford_order(n)
        );
    }
}

#[test]
fn one_qubit_elements_are_distinct_modulo_phase() {
    let group = enumerate_dense(1).unwrap();
    assert_eq!(group.len(), 24);
    for i in 0..24 {
        for j in i + 1..24 {
            assert!(
                (group[i].adjoint() * &group[j]).trace().norm() < 2.0 - 1e-9,
                "{i} {j}"
            );
        }
    }
}

#[test]
fn two_qubit_enumeration_has_no_duplicate_modulo_phase() {
    // Bucket by a phase-invariant fingerprint, then compare within buckets.
    let group = enumerate_dense(2).unwrap();
    let mut keys: Vec<(Vec<i64>, usize)> = group
        .iter()
        .enumerate()
        .map(|(i, u)| {
            (
                u.iter()
                    .map(|z| (z.norm_sqr() * 1e6).round() as i64)
                    .collect(),
                i,
            )
        })
        .collect();
    keys.sort();
    for w in keys.windows(2) {
        if w[0].0 == w[1].0 {
            assert!(
                !equal_up_to_phase(&group[w[0].1], &group[w[1].1]),
                "{} {}",
                w[0].1,
                w[1].1
            );
        }
    }
}

#[test]
fn index_round_trip_over_small_groups() {
    for n in 1..=2 {
        for idx in 0..clifford_order_u128(n).unwrap() {
            let e = CliffordElement::from_index(n, idx).unwrap();
            assert!(e.is_valid());
            let rebuilt = CliffordElement::from_images(n, e.images().to_vec()).unwrap();
            assert_eq!(rebuilt.index(), Some(idx));
        }
    }
    assert!(CliffordElement::from_index(1, 24).is_err());
}

#[test]
fn dense_conversion_matches_tableau() {
    for seed in 0..40u64 {
        let n = 1 + (seed % 4) as usize;
        let e = clifford::sample_clifford(n, seed).unwrap();
        let u = e.to_dense().unwrap();
        assert!(linalg::max_abs(&(u.adjoint() * &u - linalg::identity(1 << n))) < 1e-9);
        for j in 0..n {
            for gen in [PauliString::single_x(j), PauliString::single_z(j)] {
                let lhs = &u * gen.to_matrix(n) * u.adjoint();
                let rhs = e.conjugate(&gen).to_matrix(n);
                assert!(
                    linalg::max_abs(&(lhs - rhs)) < 1e-9,
                    "seed {seed} qubit {j}"
                );
            }
        }
    }
}

#[test]
fn named_gates_have_expected_dense_form() {
    assert!(
        linalg::max_abs(&(CliffordElement::identity(2).to_dense().unwrap() - linalg::identity(4)))
            < 1e-12
    );
    assert!(equal_up_to_phase(
        &CliffordElement::hadamard(1, 0).to_dense().unwrap(),
        &gates::h()
    ));
    assert!(equal_up_to_phase(
        &CliffordElement::phase(1, 0).to_dense().unwrap(),
        &gates::s()
    ));
    assert!(equal_up_to_phase(
        &CliffordElement::cnot(2, 0, 1).to_dense().unwrap(),
        &gates::cnot()
    ));
    // Canonical phase: first nonzero entry of column 0 is positive real.
    let h = CliffordElement::hadamard(1, 0).to_dense().unwrap();
    assert!(h[(0, 0)].im.abs() < 1e-12 && h[(0, 0)].re > 0.0);
}

#[test]
fn tableau_text_round_trip() {
    let e = clifford::sample_clifford(3, 11).unwrap();
    let text = e.to_text();
    assert!(text.lines().next().unwrap().starts_with("X0 -> "));
    assert_eq!(CliffordElement::from_text(&text).unwrap(), e);
    assert!(CliffordElement::from_text("X0 -> +X\nZ0 -> +X").is_err());
}

#[test]
fn sampling_is_deterministic() {
    assert_eq!(
        clifford::sample_clifford(4, 99).unwrap(),
        clifford::sample_clifford(4, 99).unwrap()
    );
}

#[test]
fn group_closure_and_homomorphism() {
    for t in 0..200u64 {
        let n = 1 + (t % 3) as usize;
        let a = clifford::sample_clifford(n, 2 * t).unwrap();
        let b = clifford::sample_clifford(n, 2 * t + 1).unwrap();
        let ab = a.compose(&b).unwrap();
        assert!(ab.is_valid());
        assert!(ab.index().unwrap() < clifford_order_u128(n).unwrap());
        let lhs = ab.to_dense().unwrap();
        let rhs = a.to_dense().unwrap() * b.to_dense().unwrap();
        let ratio = (lhs.adjoint() * &rhs).trace() / (1usize << n) as f64;
        assert!((ratio.norm() - 1.0).abs() < 1e-9, "trial {t}");
    }
    for t in 200..500u64 {
        let a = clifford::sample_clifford(3, 2 * t).unwrap();
        let b = clifford::sample_clifford(3, 2 * t + 1).unwrap();
        let ab = a.compose(&b).unwrap();
        assert!(ab.is_valid() && ab.index().unwrap() < clifford_order_u128(3).unwrap());
    }
}

#[test]
fn first_moment_is_exact_at_one_qubit() {
    for seed in 0..5 {
        let r = two_design_moment_error(1, &random_matrix(2, seed), SamplingMode::Full).unwrap();
        assert_eq!(r.t, 1);
        assert!(r.max_abs_error <= 1e-10);
    }
}

#[test]
fn swap_is_twirled_exactly() {
    // SWAP commutes with every U⊗U, so its twirl is itself.
    let swap = gates::swap(2);
    let twirl = clifford::haar_twirl(1, 2, &swap).unwrap();
    assert!(linalg::max_abs(&(twirl - &swap)) < 1e-12);
    let r = two_design_moment_error(1, &swap, SamplingMode::Full).unwrap();
    assert!(r.max_abs_error <= 1e-10);
}

#[test]
fn monte_carlo_second_moment_within_five_standard_errors() {
    let m = random_matrix(64, 5);
    let r = two_design_moment_error(
        3,
        &m,
        SamplingMode::MonteCarlo {
            samples: 5000,
            seed: 17,
        },
    )
    .unwrap();
    let se = r.standard_error.unwrap();
    assert!(
        r.max_abs_error <= 5.0 * se,
        "error {} se {}",
        r.max_abs_error,
        se
    );
}

#[test]
fn full_mode_rejects_three_qubits() {
    assert!(two_design_moment_error(3, &random_matrix(8, 1), SamplingMode::Full).is_err());
}

#[test]
fn one_time_pad_examples() {
    let layout = RegisterLayout::single("A", 1).unwrap();
    let zero = DensityOperator::basis(layout.clone(), 0).unwrap();
    assert!(
        linalg::max_abs(
            &(pauli_otp(&zero, &[false], &[false], &["A"])
                .unwrap()
                .matrix()
                - zero.matrix())
        ) < 1e-15
    );
    let avg = otp_average(&zero, &["A"]).unwrap();
    assert!(linalg::max_abs(&(avg.matrix() - linalg::identity(2).scale(0.5))) < 1e-15);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = PureState::new(
        layout.clone(),
        efikit::linalg::CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]),
    )
    .unwrap();
    let padded = DensityOperator::from_pure(&pauli_otp(&plus, &[true], &[true], &["A"]).unwrap());
    let minus = CMatrix::from_row_slice(
        2,
        2,
        &[c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)],
    );
    assert!(linalg::max_abs(&(padded.matrix() - minus)) < 1e-12);
    assert!(pauli_otp(&zero, &[true, false], &[false], &["A"]).is_err());
}

#[test]
fn one_time_pad_average_is_maximally_mixed_on_targets() {
    let layout = RegisterLayout::new([("A", 2), ("B", 1)]).unwrap();
    for seed in 0..5 {
        let rho = random_density(&layout, 8, &mut rng_from_seed(seed)).unwrap();
        let avg = otp_average(&rho, &["A"]).unwrap();
        let expected = DensityOperator::maximally_mixed(RegisterLayout::single("A", 2).unwrap())
            .tensor(&rho.partial_trace(&["B"]).unwrap())
            .unwrap();
        assert!(linalg::max_abs(&(avg.matrix() - expected.matrix())) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_round_trip_three_qubits(idx in 0u128..92_897_280u128) {
        let e = CliffordElement::from_index(3, idx).unwrap();
        let rebuilt = CliffordElement::from_images(3, e.images().to_vec()).unwrap();
        prop_assert_eq!(rebuilt.index(), Some(idx));
    }

    #[test]
    fn conjugation_preserves_commutation(seed in any::<u64>(), x in 0u64..16, z in 0u64..16, x2 in 0u64..16, z2 in 0u64..16) {
        let e = clifford::sample_clifford(4, seed).unwrap();
        let p = PauliString::hermitian(x, z, false);
        let q = PauliString::hermitian(x2, z2, false);
        prop_assert_eq!(p.commutes(&q), e.conjugate(&p).commutes(&e.conjugate(&q)));
    }
}
