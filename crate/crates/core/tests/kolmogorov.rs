use std::collections::HashSet;

use efikit::family::{FamilyKind, FamilySpec, Side};
use efikit::kolmogorov::*;
use efikit::linalg::{self, CMatrix, CVector, C64};
use efikit::metrics::Divergence;
use efikit::qstate::{random_density, sample_haar_state, PureState, RegisterLayout};
use efikit::rng::{rng_from_seed, substream};
use proptest::prelude::*;
use rand::Rng;

fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

fn all_strings(len: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << len).map(move |v| (0..len).rev().map(|k| (v >> k) & 1 == 1).collect())
}

fn basis(n: usize, j: usize) -> PureState {
    PureState::basis(RegisterLayout::single("A", n).unwrap(), j).unwrap()
}

#[test]
fn elias_gamma_and_width() {
    assert_eq!(elias_gamma(1), bits("1"));
    assert_eq!(elias_gamma(2), bits("010"));
    assert_eq!(elias_gamma(4), bits("00100"));
    assert_eq!(elias_gamma(5), bits("00101"));
    assert_eq!(codec::index_width(1), 0);
    assert_eq!(codec::index_width(2), 1);
    assert_eq!(codec::index_width(3), 2);
    assert_eq!(codec::index_width(4), 2);
    assert_eq!(codec::index_width(5), 3);
}

#[test]
fn canonical_codes_decode_to_expected_circuits() {
    let zero = canonical_empty_code(1);
    assert_eq!(zero.to_string(), "1100");
    match decode_program(zero.bits()) {
        DecodeOutcome::Program { program, consumed } => {
            assert_eq!(consumed, 4);
            assert!(program.gates.is_empty());
            assert!((program.run().unwrap().fidelity(&basis(1, 0)).unwrap() - 1.0).abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }
    let h = encode(&Program {
        n: 1,
        gates: vec![Gate::H(0)],
    })
    .unwrap();
    assert_eq!(h.to_string(), "1000100");
    let DecodeOutcome::Program { program, .. } = decode_program(h.bits()) else {
        panic!()
    };
    let plus = program.run().unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!(
        (plus.amplitudes()[0].re - s).abs() < 1e-12 && (plus.amplitudes()[1].re - s).abs() < 1e-12
    );
    assert_eq!(canonical_empty_code(2).len(), 6);
    assert_eq!(canonical_empty_code(4).len(), 8);
    let cx = encode(&Program {
        n: 2,
        gates: vec![Gate::H(0), Gate::Cnot(0, 1)],
    })
    .unwrap();
    assert_eq!(cx.to_string(), "010000001101100");
    let DecodeOutcome::Program { program, .. } = decode_program(cx.bits()) else {
        panic!()
    };
    let bell = program.run().unwrap();
    assert!(
        (bell.amplitudes()[0].re - s).abs() < 1e-12 && (bell.amplitudes()[3].re - s).abs() < 1e-12
    );
}

#[test]
fn malformed_codes_fail_as_values() {
    assert!(matches!(
        decode_program(&bits("110")),
        DecodeOutcome::Failure(DecodeFailure::Truncated { .. })
    ));
    assert!(matches!(
        decode_program(&bits("0000")),
        DecodeOutcome::Failure(DecodeFailure::Truncated { .. })
    ));
    assert!(matches!(
        decode_program(&bits("1101")),
        DecodeOutcome::Failure(DecodeFailure::BadOpcode { opcode: 5, .. })
    ));
    // CNOT at n=1 has equal control and target.
    assert!(matches!(
        decode_program(&bits("1011100")),
        DecodeOutcome::Failure(DecodeFailure::BadQubit { .. })
    ));
    // n=3: qubit index 3 is out of range.
    assert!(matches!(
        decode_program(&bits("01100011100")),
        DecodeOutcome::Failure(DecodeFailure::BadQubit { .. })
    ));
    // n=2 CNOT with control = target.
    assert!(matches!(
        decode_program(&bits("01001100100")),
        DecodeOutcome::Failure(DecodeFailure::BadQubit { .. })
    ));
    assert!(encode(&Program {
        n: 2,
        gates: vec![Gate::Cnot(1, 1)]
    })
    .is_err());
    assert!(encode(&Program {
        n: 2,
        gates: vec![Gate::H(2)]
    })
    .is_err());
}

#[test]
fn decodable_codes_are_prefix_free_exhaustively() {
    const L: usize = 14;
    let mut codes: HashSet<Vec<bool>> = HashSet::new();
    for len in 1..=L {
        for s in all_strings(len) {
            if let DecodeOutcome::Program { consumed, .. } = decode_program(&s) {
                assert!(consumed <= len);
                if consumed == len {
                    codes.insert(s);
                }
            }
        }
    }
    assert!(!codes.is_empty());
    for c in &codes {
        for k in 1..c.len() {
            assert!(!codes.contains(&c[..k]), "{c:?} has a decodable prefix");
        }
        // Extensions decode with the same consumed length.
        for ext in all_strings(L.saturating_sub(c.len()).min(4)) {
            let mut long = c.clone();
            long.extend(ext);
            match decode_program(&long) {
                DecodeOutcome::Program { consumed, .. } => assert_eq!(consumed, c.len()),
                other => panic!("{other:?}"),
            }
        }
    }
    // Kraft inequality over everything found.
    let kraft: f64 = codes.iter().map(|c| (-(c.len() as f64)).exp2()).sum();
    assert!(kraft <= 1.0);
}

#[test]
fn enumeration_matches_exhaustive_decoding() {
    const L: usize = 14;
    for n in 1..=3 {
        let mut expected: Vec<String> = Vec::new();
        for len in 1..=L {
            for s in all_strings(len) {
                if let DecodeOutcome::Program { program, consumed } = decode_program(&s) {
                    if consumed == len && program.n == n {
                        expected.push(ProgramCode::new(s).to_string());
                    }
                }
            }
        }
        let got: Vec<String> = enumerate_programs(n, L)
            .unwrap()
            .iter()
            .map(|(c, _)| c.to_string())
            .collect();
        let mut e = expected.clone();
        e.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        assert_eq!(got, e, "n={n}");
    }
    assert_eq!(enumerate_programs(2, 14).unwrap().len(), 45);
    assert!(enumerate_programs(2, 40).is_err());
}

#[test]
fn mixture_operator_matches_its_table() {
    let mu = build_universal_mixture(2, 14).unwrap();
    let mut m = CMatrix::zeros(4, 4);
    for e in mu.program_table() {
        assert_eq!(e.weight, (-(e.code.len() as f64)).exp2());
        let DecodeOutcome::Program { program, consumed } = decode_program(e.code.bits()) else {
            panic!()
        };
        assert_eq!(consumed, e.code.len());
        assert_eq!(program, e.program);
        m += linalg::outer(e.state.amplitudes()) * C64::from(e.weight);
    }
    m += linalg::identity(4) * C64::from(mu.tail_tau / 4.0);
    assert!(linalg::max_abs(&(m - mu.matrix())) < 1e-12);
    let man = mu.manifest();
    assert_eq!(man.program_count, 45);
    assert!(man.trace <= 1.0);
    assert_eq!(man.shortest_zero_code, "010100");
    let zero = basis(2, 0);
    assert!(mu.operator().expectation(&zero).unwrap() >= man.shortest_zero_weight);
    serde_json::to_string(&man).unwrap();
}

#[test]
fn mixture_below_shortest_code_is_pure_tail() {
    let mu = build_universal_mixture_with_tail(2, 5, 0.125).unwrap();
    assert!(mu.program_table().is_empty());
    assert!(linalg::max_abs(&(mu.matrix() - linalg::identity(4) * C64::from(0.125 / 4.0))) < 1e-15);
}

#[test]
fn kraft_audit_over_cap() {
    // With no tail the trace is the Kraft sum: it rises exactly at the
    // lengths where codes exist and never reaches one.
    let mut prev = 0.0;
    for l in 4..=18 {
        let mu = build_universal_mixture_with_tail(2, l, 0.0).unwrap();
        let count_at_l = mu
            .program_table()
            .iter()
            .filter(|e| e.code.len() == l)
            .count();
        let tr = mu.trace();
        assert!((tr - mu.kraft_sum()).abs() < 1e-12);
        if count_at_l > 0 {
            assert!(tr > prev, "L={l}");
        } else {
            assert_eq!(tr, prev, "L={l}");
        }
        assert!(tr < 1.0);
        prev = tr;
    }
}

#[test]
fn enlarging_the_cap_never_lowers_expectations() {
    let tail = 1e-6;
    let mus: Vec<_> = (6..=16)
        .map(|l| build_universal_mixture_with_tail(2, l, tail).unwrap())
        .collect();
    for seed in 0..30 {
        let psi = sample_haar_state(2, seed).unwrap();
        let vals: Vec<f64> = mus
            .iter()
            .map(|m| m.operator().expectation(&psi).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-15));
    }
}

#[test]
fn knet_examples() {
    let mu1 = build_universal_mixture(1, 12).unwrap();
    assert_eq!(knet(&mu1, &basis(1, 0), 0.0).unwrap(), Knet::Bits(4));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = PureState::new(
        RegisterLayout::single("A", 1).unwrap(),
        CVector::from_vec(vec![C64::from(s), C64::from(s)]),
    )
    .unwrap();
    assert_eq!(knet(&mu1, &plus, 0.0).unwrap(), Knet::Bits(7));
    let mu2 = build_universal_mixture(2, 14).unwrap();
    assert_eq!(knet(&mu2, &basis(2, 0), 0.0).unwrap(), Knet::Bits(6));
    let mut above = 0;
    for seed in 0..20 {
        if knet(&mu2, &sample_haar_state(2, seed).unwrap(), 1e-6).unwrap() == Knet::AboveCap(14) {
            above += 1;
        }
    }
    assert_eq!(above, 20);
}

#[test]
fn top_eigenvector_attains_smallest_hbar() {
    let mu = build_universal_mixture(2, 14).unwrap();
    let spec = mu.spectral();
    let top = PureState::normalized(
        RegisterLayout::single("A", 2).unwrap(),
        spec.eigenvectors.column(0).into_owned(),
    )
    .unwrap();
    let h = hbar(&mu, &top).unwrap();
    assert!((h + spec.eigenvalues[0].log2()).abs() < 1e-10);
    for seed in 0..50 {
        assert!(hbar(&mu, &sample_haar_state(2, seed).unwrap()).unwrap() >= h - 1e-10);
    }
}

#[test]
fn hbar_never_exceeds_umin() {
    let mu = build_universal_mixture(2, 14).unwrap();
    for seed in 0..200 {
        let psi = sample_haar_state(2, 1000 + seed).unwrap();
        let h = hbar(&mu, &psi).unwrap();
        let u = umin(&mu, &psi).unwrap().value();
        assert!(h <= u + 1e-9, "seed {seed}: {h} > {u}");
    }
}

#[test]
fn umin_bounded_by_code_length_on_every_program() {
    let mu = build_universal_mixture(2, 14).unwrap();
    for e in mu.program_table() {
        let u = umin(&mu, &e.state).unwrap().value();
        assert!(u <= e.code.len() as f64 + 1e-6, "{}: {u}", e.code);
        let k = knet(&mu, &e.state, 0.0).unwrap().bits().unwrap();
        assert!(k <= e.code.len());
        assert!(u <= k as f64 + 1e-6);
    }
}

fn planted(seed: u64, kappa: f64) -> (UniversalMixture, PureState) {
    let mut rng = substream(seed, 0);
    let layout = RegisterLayout::single("A", 2).unwrap();
    let base = random_density(&layout, 4, &mut rng).unwrap();
    let psi = sample_haar_state(2, seed ^ 0xabc).unwrap();
    let scale = rng.gen_range(0.05..0.5);
    let w = (-kappa).exp2();
    let m = base.matrix() * C64::from(scale * (1.0 - w))
        + linalg::outer(psi.amplitudes()) * C64::from(w);
    (UniversalMixture::from_operator(m).unwrap(), psi)
}

#[test]
fn planted_weight_bounds_umin() {
    for seed in 0..100 {
        let kappa = 1.0 + (seed % 17) as f64;
        let (mu, psi) = planted(seed, kappa);
        let u = umin(&mu, &psi).unwrap().value();
        assert!(u <= kappa + 1e-6, "seed {seed}: {u} > {kappa}");
    }
}

#[test]
fn pseudo_inverse_reports_leakage() {
    let mu = build_universal_mixture_with_tail(2, 6, 0.0).unwrap();
    assert_eq!(
        umin(&mu, &basis(2, 0)).unwrap(),
        Divergence::Finite { bits: 6.0 }
    );
    match umin(&mu, &basis(2, 3)).unwrap() {
        Divergence::Infinite { leakage } => assert!((leakage - 1.0).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}

#[test]
fn zero_radius_smoothing_is_exact() {
    let mu = build_universal_mixture(2, 14).unwrap();
    for seed in 0..20 {
        let psi = sample_haar_state(2, seed).unwrap();
        assert_eq!(
            hbar_smooth(&mu, &psi, 0.0).unwrap().bits,
            hbar(&mu, &psi).unwrap()
        );
        assert_eq!(
            umin_smooth(&mu, &psi, 0.0).unwrap().bits,
            umin(&mu, &psi).unwrap().value()
        );
    }
    assert!(hbar_smooth(&mu, &basis(2, 0), 1.0).is_err());
}

/// Best value of `⟨φ|M|φ⟩` found by sampling the ball `|⟨ψ|φ⟩|² ≥ c`:
/// a tenth of the draws are uniform, the rest perturb the incumbent with a
/// step size adapted to the success rate, alternating additive steps with
/// multiplicative ones in the eigenbasis of `M` (needed when `M` is badly
/// conditioned).
fn random_search(
    m: &CMatrix,
    psi: &CVector,
    c: f64,
    samples: usize,
    seed: u64,
    minimize: bool,
) -> f64 {
    let d = psi.len();
    let mut rng = rng_from_seed(seed);
    let eval = |v: &CVector| v.dotc(&(m * v)).re;
    let better = |a: f64, b: f64| if minimize { a < b } else { a > b };
    let gauss = |rng: &mut efikit::rng::Rng| {
        let u1: f64 = rng.gen::<f64>().max(1e-300);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    // Pushes a unit vector into the ball along the ψ direction.
    let into_ball = |w: &CVector| -> Option<CVector> {
        let w = w / C64::from(w.norm());
        let along = psi.dotc(&w);
        let o = along.norm_sqr();
        if o >= c {
            return Some(w);
        }
        let mut perp = &w - psi * along;
        let pn = perp.norm();
        if pn < 1e-300 {
            return None;
        }
        perp /= C64::from(pn);
        let phase = if along.norm() > 0.0 {
            along / along.norm()
        } else {
            C64::from(1.0)
        };
        Some(psi * (phase * c.sqrt()) + perp * C64::from((1.0 - c).sqrt()))
    };
    let (_, vecs) = linalg::hermitian_eigen(m);
    let mut best_v = psi.clone();
    let mut best = eval(psi);
    let mut sigma = 0.3;
    for i in 0..samples {
        let noise = CVector::from_fn(d, |_, _| C64::new(gauss(&mut rng), gauss(&mut rng)));
        let global = i < samples / 10;
        let w = if global {
            noise
        } else if i % 2 == 0 {
            &best_v + noise * C64::from(sigma / (2.0 * d as f64).sqrt())
        } else {
            let mut coords = vecs.adjoint() * &best_v;
            for (z, g) in coords.iter_mut().zip(noise.iter()) {
                *z *= C64::new(0.0, sigma * g.im).exp() * (sigma * g.re).exp();
            }
            &vecs * coords
        };
        let Some(v) = into_ball(&w) else { continue };
        let val = eval(&v);
        if better(val, best) {
            best = val;
            best_v = v;
            if !global {
                sigma = (sigma * 1.5).min(1.0);
            }
        } else if !global {
            sigma = (sigma * 0.9).max(1e-9);
        }
    }
    best
}

#[test]
fn smoothing_solver_agrees_with_random_search() {
    for inst in 0..50u64 {
        let mut rng = substream(77, inst);
        let layout = RegisterLayout::single("A", 2).unwrap();
        let rank = 4;
        let m = random_density(&layout, rank, &mut rng).unwrap().matrix()
            * C64::from(rng.gen_range(0.01..1.0));
        let mu = UniversalMixture::from_operator(m.clone()).unwrap();
        let psi = sample_haar_state(2, 5000 + inst).unwrap();
        let eps: f64 = rng.gen_range(0.05..0.95);
        let c = 1.0 - eps * eps;
        let hs = hbar_smooth(&mu, &psi, eps).unwrap();
        assert!(hs.kkt_residual <= 1e-8, "inst {inst}: {}", hs.kkt_residual);
        assert!(hs.overlap >= c - 1e-10);
        let oracle = -random_search(&m, psi.amplitudes(), c, 100_000, inst, true).log2();
        assert!(
            hs.bits >= oracle - 1e-9,
            "inst {inst}: solver {} below oracle {oracle}",
            hs.bits
        );
        assert!(
            hs.bits <= oracle + 0.05,
            "inst {inst}: solver {} far above oracle {oracle}",
            hs.bits
        );

        let inv = linalg::hermitian_fn(&m, |x| 1.0 / x);
        let us = umin_smooth(&mu, &psi, eps).unwrap();
        assert!(us.kkt_residual <= 1e-8, "inst {inst}: {}", us.kkt_residual);
        assert!(us.overlap >= c - 1e-10);
        let oracle = random_search(&inv, psi.amplitudes(), c, 100_000, inst + 999, true).log2();
        assert!(
            us.bits <= oracle + 1e-9,
            "inst {inst}: solver {} above oracle {oracle}",
            us.bits
        );
        assert!(
            us.bits >= oracle - 0.05,
            "inst {inst}: solver {} far below oracle {oracle}",
            us.bits
        );
    }
}

#[test]
fn hard_case_mixes_in_the_bottom_eigenspace() {
    // ψ is orthogonal to the lowest eigenvector.
    let m = CMatrix::from_diagonal(&CVector::from_vec(
        [0.01, 0.2, 0.3, 0.4]
            .iter()
            .map(|&x| C64::from(x))
            .collect(),
    ));
    let mu = UniversalMixture::from_operator(m).unwrap();
    let psi = PureState::normalized(
        RegisterLayout::single("A", 2).unwrap(),
        CVector::from_vec(vec![
            C64::from(0.0),
            C64::from(1.0),
            C64::from(1.0),
            C64::from(0.0),
        ]),
    )
    .unwrap();
    let eps = 0.99;
    let c = 1.0 - eps * eps;
    let r = hbar_smooth(&mu, &psi, eps).unwrap();
    assert_eq!(r.case, SmoothCase::Hard);
    assert!(r.kkt_residual <= 1e-8);
    assert!((r.overlap - c).abs() < 1e-9);
    // φ* ∝ (M − m₀)⁻¹ψ on the excited levels, scaled to overlap c, topped
    // up with the ground level.
    let star = [0.0, 1.0 / 0.19, 1.0 / 0.29, 0.0];
    let norm = star.iter().map(|x| x * x).sum::<f64>().sqrt();
    let f_star = ((star[1] + star[2]) / norm).powi(2) / 2.0;
    let alpha2 = c / f_star;
    let m_star = (0.2 * star[1] * star[1] + 0.3 * star[2] * star[2]) / (norm * norm);
    assert!((r.value - (alpha2 * m_star + (1.0 - alpha2) * 0.01)).abs() < 1e-12);
    let mm = CMatrix::from_diagonal(&CVector::from_vec(
        [0.01, 0.2, 0.3, 0.4]
            .iter()
            .map(|&x| C64::from(x))
            .collect(),
    ));
    let oracle = random_search(&mm, psi.amplitudes(), c, 20_000, 5, true);
    assert!(r.value <= oracle + 1e-12 && r.value >= oracle - 1e-4);
    // Large overlap budget: in the eigenspace.
    let r2 = hbar_smooth(&mu, &basis(2, 0), 0.5).unwrap();
    assert_eq!(r2.case, SmoothCase::Eigenspace);
    assert!((r2.bits + 0.01f64.log2()).abs() < 1e-12);
}

#[test]
fn smoothing_dualities_on_random_states() {
    let mu = build_universal_mixture(2, 14).unwrap();
    let mut rng = rng_from_seed(4242);
    for seed in 0..200 {
        let psi = sample_haar_state(2, 9000 + seed).unwrap();
        let eps: f64 = rng.gen_range(0.01..0.99);
        let h = hbar(&mu, &psi).unwrap();
        let u = umin(&mu, &psi).unwrap().value();
        let us = umin_smooth(&mu, &psi, 1.0 - eps).unwrap().bits;
        let hs = hbar_smooth(&mu, &psi, 1.0 - eps).unwrap().bits;
        assert!(us >= h + eps.log2() - 1e-9, "seed {seed}");
        assert!(hs <= u - eps.log2() + 1e-9, "seed {seed}");
    }
}

#[test]
fn smoothed_hbar_bounded_by_program_length() {
    let mu = build_universal_mixture(2, 14).unwrap();
    let table = mu.program_table();
    let mut rng = rng_from_seed(99);
    for _ in 0..200 {
        let e = &table[rng.gen_range(0..table.len())];
        let eps: f64 = rng.gen_range(0.01..0.99);
        let k = knet(&mu, &e.state, 0.0).unwrap().bits().unwrap() as f64;
        let hs = hbar_smooth(&mu, &e.state, 1.0 - eps).unwrap().bits;
        assert!(hs <= k - eps.log2() + 1e-9);
    }
}

#[test]
fn plain_span_examples() {
    let mu = build_universal_mixture(2, 14).unwrap();
    let empty = span_projector(&mu, 5).unwrap();
    assert_eq!(empty.rank, 0);
    assert_eq!(linalg::max_abs(&empty.projector()), 0.0);
    for r in 6..=14 {
        let p = span_projector(&mu, r).unwrap();
        let count = mu.entries_up_to(r).count();
        assert!(p.rank <= count && p.rank <= 1 << (r + 1));
        let pm = p.projector();
        assert!(linalg::max_abs(&(&pm * &pm - &pm)) < 1e-8);
        assert!(linalg::hermiticity_residual(&pm) < 1e-8);
        for e in mu.entries_up_to(r) {
            assert!((p.weight(&e.state).unwrap() - 1.0).abs() < 1e-9);
        }
    }
    assert_eq!(span_projector(&mu, 6).unwrap().rank, 1);
    assert!(span_projector(&mu, 15).is_err());
}

#[test]
fn robust_span_examples() {
    let layout = RegisterLayout::single("A", 1).unwrap();
    let zero = basis(1, 0);
    let p = robust_span_projector(1, &[zero.clone(), zero.clone()], 0.5).unwrap();
    assert_eq!(p.rank, 1);
    assert!((p.weight(&zero).unwrap() - 1.0).abs() < 1e-12);
    let tiny = (-100f64).exp2();
    let big = (1.0 - (-200f64).exp2()).sqrt();
    let near = PureState::new(
        layout,
        CVector::from_vec(vec![C64::from(big), C64::from(tiny)]),
    )
    .unwrap();
    let p = robust_span_projector(1, &[zero.clone(), near], 0.5).unwrap();
    assert_eq!(p.rank, 1);
    assert!(robust_span_projector(1, &[], 0.5).unwrap().rank == 0);
    assert!(robust_span_projector(1, &[zero], 0.0).is_err());
}

#[test]
fn classification_examples() {
    let mu = build_universal_mixture(2, 14).unwrap();
    let low_states: Vec<(PureState, Option<Side>)> = mu
        .entries_up_to(10)
        .map(|e| (e.state.clone(), Some(Side::Low)))
        .collect();
    let fam = FamilySpec::uniform("short programs", FamilyKind::Keyed, 2, low_states).unwrap();
    // All-low family: nothing high, promise violated.
    let rep = classify_instance(&fam, &mu, Notion::GapH, 20.0, 2.0, 0.1, None).unwrap();
    assert_eq!(rep.fraction_high, 0.0);
    assert!(!rep.promise_holds);
    assert!((rep.fraction_low + rep.fraction_high + rep.fraction_neither - 1.0).abs() < 1e-12);
    assert!(rep.advantage.is_none());
    // Span notion, family inside Π_r.
    let rep = classify_instance(&fam, &mu, Notion::Span, 10.0, 2.0, 0.1, None).unwrap();
    assert!(rep
        .members
        .iter()
        .all(|m| m.label == Label::Low && (m.low_statistic - 1.0).abs() < 1e-9));
}

#[test]
fn classification_separates_planted_halves() {
    let mu = build_universal_mixture(2, 14).unwrap();
    let mut members: Vec<(PureState, Option<Side>)> = vec![(basis(2, 0), Some(Side::Low)); 4];
    for seed in 0..4 {
        members.push((sample_haar_state(2, seed).unwrap(), Some(Side::High)));
    }
    let fam = FamilySpec::uniform("planted", FamilyKind::Keyed, 2, members).unwrap();
    for notion in [Notion::GapH, Notion::GapU, Notion::DGapH] {
        let rep = classify_instance(&fam, &mu, notion, 0.0, 1.0, 0.1, None).unwrap();
        let total = rep.fraction_low + rep.fraction_high + rep.fraction_neither;
        assert!((total - 1.0).abs() < 1e-12);
        // Each label agrees with its own statistics.
        for m in &rep.members {
            match m.label {
                Label::Low => assert!(m.low_statistic <= 0.0),
                Label::High => assert!(m.low_statistic > 0.0 && m.high_statistic >= 1.0),
                Label::Neither => assert!(m.low_statistic > 0.0 && m.high_statistic < 1.0),
            }
        }
    }
    assert!("dgap-h".parse::<Notion>().unwrap() == Notion::DGapH);
    assert!("nope".parse::<Notion>().is_err());
}

#[test]
fn helstrom_advantage_is_label_conditioned() {
    let mu = build_universal_mixture(2, 14).unwrap();
    let members = vec![(basis(2, 0), None), (basis(2, 3), None)];
    let fam = FamilySpec::uniform("two basis states", FamilyKind::Keyed, 2, members).unwrap();
    // |00⟩ has H̄ ≈ 6 and |11⟩ far higher; r = 7 separates them.
    let rep = classify_instance(&fam, &mu, Notion::GapH, 12.0, 1.0, 0.5, None).unwrap();
    assert_eq!(rep.members[0].label, Label::Low);
    assert_eq!(rep.members[1].label, Label::High);
    assert!(rep.promise_holds);
    assert!((rep.advantage.unwrap() - 1.0).abs() < 1e-12);
    // A supplied projector onto |00⟩ gives the same answer.
    let p = linalg::outer(basis(2, 0).amplitudes());
    let rep =
        classify_instance(&fam, &mu, Notion::GapH, 12.0, 1.0, 0.5, Some(("zero", &p))).unwrap();
    assert_eq!(rep.distinguisher, "zero");
    assert!((rep.advantage.unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn complexity_csv_has_expected_header() {
    let mu = build_universal_mixture(2, 14).unwrap();
    let fam = FamilySpec::uniform("one", FamilyKind::Keyed, 2, vec![(basis(2, 0), None)]).unwrap();
    let rows = complexity_rows(&mu, &fam, 0.1, 10, 0.5).unwrap();
    assert_eq!(rows[0].knet, Some(6));
    let mut buf = Vec::new();
    write_complexity_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with(
        "state_id,knet,hbar,hbar_eps,umin,umin_eps,span_overlap_r,robust_overlap_r_gamma\n"
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encode_decode_round_trip(n in 1usize..6, raw in proptest::collection::vec((0u8..4, 0usize..6, 0usize..6), 0..6)) {
        let gates: Vec<Gate> = raw
            .into_iter()
            .filter_map(|(op, a, b)| {
                let (a, b) = (a % n, b % n);
                match op {
                    0 => Some(Gate::H(a)),
                    1 => Some(Gate::S(a)),
                    2 => Some(Gate::T(a)),
                    _ if a != b => Some(Gate::Cnot(a, b)),
                    _ => None,
                }
            })
            .collect();
        let program = Program { n, gates };
        let code = encode(&program).unwrap();
        match decode_program(code.bits()) {
            DecodeOutcome::Program { program: p, consumed } => {
                prop_assert_eq!(p, program);
                prop_assert_eq!(consumed, code.len());
            }
            other => prop_assert!(false, "{:?}", other),
        }
        prop_assert_eq!(ProgramCode::parse(&code.to_string()).unwrap(), code);
    }

    #[test]
    fn smoothing_is_monotone_in_radius(seed in 0u64..1000, e1 in 0.0f64..0.98, de in 0.0f64..0.01) {
        let (mu, _) = planted(seed, 3.0);
        let psi = sample_haar_state(2, seed).unwrap();
        let a = hbar_smooth(&mu, &psi, e1).unwrap().bits;
        let b = hbar_smooth(&mu, &psi, e1 + de).unwrap().bits;
        prop_assert!(b >= a - 1e-9);
        let ua = umin_smooth(&mu, &psi, e1).unwrap().bits;
        let ub = umin_smooth(&mu, &psi, e1 + de).unwrap().bits;
        prop_assert!(ub <= ua + 1e-9);
    }
}
