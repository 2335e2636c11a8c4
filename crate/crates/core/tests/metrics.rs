use efikit::linalg::{c, CMatrix, CVector};
use efikit::metrics::entropy::{audenaert_bound, smooth_min_lb_with_budget, tensor_power_spectrum};
use efikit::metrics::{
    almost_orthogonal_witness, conditional_min_entropy, entropy, fidelity, helstrom,
    pure_trace_distance, purified_distance, relative_min_entropy, smooth_entropy_bound,
    trace_distance, von_neumann, Divergence, OrthogonalityWitness, PlainEntropy, SmoothBound,
};
use efikit::qstate::{
    random_density, random_mixed, tensor, DensityOperator, PureState, RegisterLayout,
};
use efikit::rng::rng_from_seed;
use efikit::Error;
use proptest::prelude::*;
use rand::Rng;

fn reg(n: usize) -> RegisterLayout {
    RegisterLayout::single("A", n).unwrap()
}

fn pure(amps: &[(f64, f64)]) -> PureState {
    let n = amps.len().trailing_zeros() as usize;
    PureState::normalized(
        reg(n),
        CVector::from_iterator(amps.len(), amps.iter().map(|&(r, i)| c(r, i))),
    )
    .unwrap()
}

fn dm(psi: &PureState) -> DensityOperator {
    DensityOperator::from_pure(psi)
}

fn random_pair(seed: u64) -> (DensityOperator, DensityOperator) {
    let mut rng = rng_from_seed(seed);
    let q = rng.gen_range(1..=4);
    let r0 = rng.gen_range(1..=1usize << q);
    let r1 = rng.gen_range(1..=1usize << q);
    (
        random_density(&reg(q), r0, &mut rng).unwrap(),
        random_density(&reg(q), r1, &mut rng).unwrap(),
    )
}

#[test]
fn distance_examples() {
    let zero = dm(&pure(&[(1.0, 0.0), (0.0, 0.0)]));
    let one = dm(&pure(&[(0.0, 0.0), (1.0, 0.0)]));
    let plus = dm(&pure(&[(1.0, 0.0), (1.0, 0.0)]));
    assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
    assert!((trace_distance(&zero, &plus).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    let rho = random_mixed(&reg(2), &mut rng_from_seed(4)).unwrap();
    assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
    assert!(purified_distance(&rho, &rho).unwrap() < 1e-6);
}

#[test]
fn pure_pair_trace_distance_formula() {
    for seed in 0..50 {
        let mut rng = rng_from_seed(seed);
        let a = efikit::qstate::haar::haar_state_with(&reg(2), &mut rng).unwrap();
        let b = efikit::qstate::haar::haar_state_with(&reg(2), &mut rng).unwrap();
        let overlap = a.inner(&b).unwrap().norm_sqr();
        let want = (1.0 - overlap).sqrt();
        assert!((trace_distance(&dm(&a), &dm(&b)).unwrap() - want).abs() < 1e-10);
        assert!((pure_trace_distance(&a, &b).unwrap() - want).abs() < 1e-10);
        // Root fidelity of pure states is |<a|b>|, so P = D.
        assert!((fidelity(&dm(&a), &dm(&b)).unwrap() - overlap.sqrt()).abs() < 1e-10);
    }
}

#[test]
fn subnormalized_distances_use_generalized_forms() {
    let (a, b, p, q) = (0.5, 0.2, 0.1, 0.3);
    let rho = DensityOperator::new_subnormalized(
        reg(1),
        CMatrix::from_diagonal(&CVector::from_vec(vec![c(a, 0.0), c(b, 0.0)])),
    )
    .unwrap();
    let sigma = DensityOperator::new_subnormalized(
        reg(1),
        CMatrix::from_diagonal(&CVector::from_vec(vec![c(p, 0.0), c(q, 0.0)])),
    )
    .unwrap();
    let d = 0.5 * ((a - p).abs() + (b - q).abs()) + 0.5 * ((a + b) - (p + q)).abs();
    assert!((trace_distance(&rho, &sigma).unwrap() - d).abs() < 1e-12);
    let f = (a * p).sqrt() + (b * q).sqrt() + ((1.0 - a - b) * (1.0 - p - q)).sqrt();
    assert!((fidelity(&rho, &sigma).unwrap() - f).abs() < 1e-12);
    assert!((purified_distance(&rho, &sigma).unwrap() - (1.0 - f * f).sqrt()).abs() < 1e-12);
}

#[test]
fn layout_mismatch_is_an_error() {
    let a = DensityOperator::maximally_mixed(reg(1));
    let b = DensityOperator::maximally_mixed(RegisterLayout::single("B", 1).unwrap());
    assert!(matches!(trace_distance(&a, &b), Err(Error::Layout(_))));
}

#[test]
fn plain_entropy_examples() {
    let mm = DensityOperator::maximally_mixed(reg(2));
    assert!((von_neumann(&mm) - 2.0).abs() < 1e-12);
    assert!((entropy(PlainEntropy::Min, &mm).value - 2.0).abs() < 1e-12);
    assert!((entropy(PlainEntropy::Max, &mm).value - 2.0).abs() < 1e-12);
    assert!(von_neumann(&dm(&pure(&[(0.3, 0.1), (0.2, -0.7)]))).abs() < 1e-12);
    let d = DensityOperator::diagonal(reg(1), &[0.75, 0.25]).unwrap();
    let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
    assert!((von_neumann(&d) - h).abs() < 1e-12);
    assert!((h - 0.81128).abs() < 1e-5);
}

#[test]
fn smooth_bound_examples() {
    let rho = DensityOperator::diagonal(reg(3), &[0.5, 0.125, 0.125, 0.125, 0.125, 0.0, 0.0, 0.0])
        .unwrap();
    assert!(
        (smooth_entropy_bound(SmoothBound::MinLb, &rho, 0.0)
            .unwrap()
            .value
            - 1.0)
            .abs()
            < 1e-12
    );
    let spec = rho.eigenvalues();
    assert!((smooth_min_lb_with_budget(&spec, 0.5, None).value - 2.0).abs() < 1e-12);
    let hmax = entropy(PlainEntropy::Max, &rho).value;
    assert!(
        (smooth_entropy_bound(SmoothBound::MaxUb, &rho, 0.0)
            .unwrap()
            .value
            - hmax)
            .abs()
            < 1e-12
    );
    assert!(matches!(
        smooth_entropy_bound(SmoothBound::MinLb, &rho, 0.6),
        Err(Error::OutOfRange(_))
    ));
}

/// Best certified value over every subset of removed eigenvalues.
fn min_lb_brute_force(spec: &[f64], budget: f64) -> f64 {
    let n = spec.len();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << n) {
        let removed: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| spec[i]).sum();
        if removed > budget + 1e-15 {
            continue;
        }
        let top = (0..n)
            .filter(|i| mask >> i & 1 == 0)
            .map(|i| spec[i])
            .fold(0.0, f64::max);
        if top > 0.0 {
            best = best.max(-(top / (1.0 - removed)).log2());
        }
    }
    best
}

#[test]
fn min_lb_matches_exhaustive_cut_search() {
    for seed in 0..40 {
        let rho = random_mixed(&reg(3), &mut rng_from_seed(seed)).unwrap();
        let spec = rho.eigenvalues();
        for budget in [0.0, 0.05, 0.2, 0.5] {
            let got = smooth_min_lb_with_budget(&spec, budget, None).value;
            assert!(
                (got - min_lb_brute_force(&spec, budget)).abs() < 1e-9,
                "seed {seed} budget {budget}"
            );
        }
    }
}

fn bell_density() -> DensityOperator {
    let s = 0.5f64.sqrt();
    let layout = RegisterLayout::new([("A", 1), ("B", 1)]).unwrap();
    let psi = PureState::new(
        layout,
        CVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]),
    )
    .unwrap();
    DensityOperator::from_pure(&psi)
}

#[test]
fn conditional_min_entropy_examples() {
    let bell = conditional_min_entropy(&bell_density(), &["A"], &["B"], 0.0).unwrap();
    assert!((bell.value + 1.0).abs() < 1e-3, "{}", bell.value);

    let mm = DensityOperator::maximally_mixed(RegisterLayout::new([("A", 1), ("B", 1)]).unwrap());
    assert!(
        (conditional_min_entropy(&mm, &["A"], &["B"], 0.0)
            .unwrap()
            .value
            - 1.0)
            .abs()
            < 1e-3
    );

    let mut rng = rng_from_seed(8);
    let a = random_mixed(&reg(1), &mut rng).unwrap();
    let b = random_mixed(&RegisterLayout::single("B", 1).unwrap(), &mut rng).unwrap();
    let prod = tensor(&a, &b).unwrap();
    let want = entropy(PlainEntropy::Min, &a).value;
    assert!(
        (conditional_min_entropy(&prod, &["A"], &["B"], 0.0)
            .unwrap()
            .value
            - want)
            .abs()
            < 1e-3
    );
}

#[test]
fn relative_min_entropy_examples() {
    let rho = random_mixed(&reg(2), &mut rng_from_seed(2)).unwrap();
    assert!(relative_min_entropy(&rho, &rho).unwrap().value().abs() < 1e-8);
    let zero = DensityOperator::basis(reg(1), 0).unwrap();
    let mm = DensityOperator::maximally_mixed(reg(1));
    assert!((relative_min_entropy(&zero, &mm).unwrap().value() - 1.0).abs() < 1e-12);
    let d = DensityOperator::diagonal(reg(1), &[0.75, 0.25]).unwrap();
    assert!(
        (relative_min_entropy(&zero, &d).unwrap().value() - (4.0f64 / 3.0).log2()).abs() < 1e-12
    );
    let one = DensityOperator::basis(reg(1), 1).unwrap();
    assert!(matches!(
        relative_min_entropy(&zero, &one).unwrap(),
        Divergence::Infinite { .. }
    ));
}

#[test]
fn helstrom_examples() {
    let zero = DensityOperator::basis(reg(1), 0).unwrap();
    let one = DensityOperator::basis(reg(1), 1).unwrap();
    let p = helstrom(&zero, &one).unwrap();
    assert!((p.advantage - 1.0).abs() < 1e-12);
    assert!((p.projector.clone() - zero.matrix())
        .iter()
        .all(|z| z.norm() < 1e-12));
    assert!(helstrom(&zero, &zero).unwrap().advantage.abs() < 1e-12);
    let plus = dm(&pure(&[(1.0, 0.0), (1.0, 0.0)]));
    let mm = DensityOperator::maximally_mixed(reg(1));
    assert!((helstrom(&plus, &mm).unwrap().advantage - 0.5).abs() < 1e-12);
}

#[test]
fn almost_orthogonal_witness_examples() {
    let zero = DensityOperator::basis(reg(1), 0).unwrap();
    let one = DensityOperator::basis(reg(1), 1).unwrap();
    match almost_orthogonal_witness(&zero, &one, 1e-6).unwrap() {
        OrthogonalityWitness::Witness {
            residual_rho,
            residual_sigma,
            ..
        } => {
            assert!(residual_rho < 1e-12 && residual_sigma < 1e-12)
        }
        other => panic!("{other:?}"),
    }
    let mm = DensityOperator::maximally_mixed(reg(1));
    assert!(matches!(
        almost_orthogonal_witness(&mm, &mm, 0.1).unwrap(),
        OrthogonalityWitness::Refusal { .. }
    ));

    // Pure states at trace distance 1 - 1e-9: overlap q = 1 - (1 - 1e-9)^2.
    let dist: f64 = 1.0 - 1e-9;
    let q = 1.0 - dist * dist;
    let a = dm(&pure(&[(1.0, 0.0), (0.0, 0.0)]));
    let b = dm(&pure(&[(q.sqrt(), 0.0), ((1.0 - q).sqrt(), 0.0)]));
    assert!((trace_distance(&a, &b).unwrap() - dist).abs() < 1e-12);
    match almost_orthogonal_witness(&a, &b, 1e-9).unwrap() {
        OrthogonalityWitness::Witness {
            residual_rho,
            residual_sigma,
            ..
        } => {
            assert!(residual_rho <= 1e-9 && residual_sigma <= 1e-9)
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn entropy_report_csv_row() {
    let rho = DensityOperator::diagonal(reg(1), &[0.75, 0.25]).unwrap();
    let row = smooth_entropy_bound(SmoothBound::MinLb, &rho, 0.5)
        .unwrap()
        .csv_row();
    assert_eq!(row[0], "smooth_min_lb");
    assert_eq!(row.len(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn fuchs_van_de_graaf_and_purified_dominate(seed in any::<u64>()) {
        let (a, b) = random_pair(seed);
        let d = trace_distance(&a, &b).unwrap();
        let f = fidelity(&a, &b).unwrap();
        prop_assert!(d >= 1.0 - f - 1e-9);
        prop_assert!(d <= (1.0 - f * f).sqrt() + 1e-9);
        prop_assert!(purified_distance(&a, &b).unwrap() >= d - 1e-9);
    }

    #[test]
    fn helstrom_advantage_is_trace_distance(seed in any::<u64>()) {
        let (a, b) = random_pair(seed);
        let p = helstrom(&a, &b).unwrap();
        prop_assert!((p.advantage - trace_distance(&a, &b).unwrap()).abs() < 1e-9);
        let sq = &p.projector * &p.projector - &p.projector;
        prop_assert!(sq.iter().all(|z| z.norm() < 1e-8));
    }

    #[test]
    fn trace_distance_is_jointly_convex(seed in any::<u64>(), w in 0.0f64..1.0) {
        let (a0, b0) = random_pair(seed);
        let mut rng = rng_from_seed(seed ^ 0x55);
        let a1 = random_mixed(a0.layout(), &mut rng).unwrap();
        let b1 = random_mixed(a0.layout(), &mut rng).unwrap();
        let lhs = trace_distance(
            &DensityOperator::mixture(&[(w, &a0), (1.0 - w, &a1)]).unwrap(),
            &DensityOperator::mixture(&[(w, &b0), (1.0 - w, &b1)]).unwrap(),
        ).unwrap();
        let rhs = w * trace_distance(&a0, &b0).unwrap() + (1.0 - w) * trace_distance(&a1, &b1).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn entropy_continuity_bound(seed in any::<u64>()) {
        let (a, b) = random_pair(seed);
        let t = trace_distance(&a, &b).unwrap();
        let dim = a.dim();
        prop_assume!(t <= 1.0 - 1.0 / dim as f64);
        prop_assert!((von_neumann(&a) - von_neumann(&b)).abs() <= audenaert_bound(t, dim) + 1e-9);
    }

    #[test]
    fn orthogonal_mixture_adds_one_bit(seed in any::<u64>()) {
        // rho on the |0> half, sigma on the |1> half of a 2-qubit space.
        let mut rng = rng_from_seed(seed);
        let x = random_mixed(&reg(1), &mut rng).unwrap();
        let y = random_mixed(&reg(1), &mut rng).unwrap();
        let lift = |s: &DensityOperator, bit: usize| {
            let flag = DensityOperator::basis(RegisterLayout::single("F", 1).unwrap(), bit).unwrap();
            tensor(&flag, s).unwrap()
        };
        let (r, s) = (lift(&x, 0), lift(&y, 1));
        let mix = DensityOperator::mixture(&[(0.5, &r), (0.5, &s)]).unwrap();
        let excess = von_neumann(&mix) - 0.5 * (von_neumann(&r) + von_neumann(&s));
        prop_assert!((excess - 1.0).abs() < 1e-9);
    }

    #[test]
    fn smoothing_moves_entropies_the_right_way(seed in any::<u64>(), m in 1usize..=4, eps in 0.01f64..0.5) {
        let rho = random_mixed(&reg(1), &mut rng_from_seed(seed)).unwrap();
        let power = rho.tensor_power(m).unwrap();
        let spec = tensor_power_spectrum(&rho.eigenvalues(), m);
        let mut direct = power.eigenvalues();
        let mut formula = spec.clone();
        direct.sort_by(|a, b| b.partial_cmp(a).unwrap());
        formula.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (x, y) in direct.iter().zip(&formula) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        let hmin = entropy(PlainEntropy::Min, &power).value;
        let hmax = entropy(PlainEntropy::Max, &power).value;
        prop_assert!(smooth_entropy_bound(SmoothBound::MinLb, &power, eps).unwrap().value >= hmin - 1e-9);
        prop_assert!(smooth_entropy_bound(SmoothBound::MaxUb, &power, eps).unwrap().value <= hmax + 1e-9);
        prop_assert!((hmin - m as f64 * entropy(PlainEntropy::Min, &rho).value).abs() < 1e-9);
    }
}
