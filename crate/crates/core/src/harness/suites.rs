//! Verification suites. Each part runs one group of invariants over a
//! seeded random corpus and returns its check records; parts tagged with an
//! acceptance criterion number are what the acceptance run executes.

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Suite};
use super::families::{planted_min_entropy, toy_family};
use super::oracle::ball_search;
use super::report::{Check, Worst};
use crate::clifford::{self, clifford_order_u128, two_design_moment_error, SamplingMode};
use crate::error::{Error, Result};
use crate::extractor::{apply_extractor_leading, decoupling_report, extractor_params};
use crate::family::{FamilyKind, FamilySpec, Side};
use crate::kolmogorov::{
    build_universal_mixture, classify_instance, hbar, hbar_smooth, knet, robust_span_projector,
    span_projector, umin, umin_smooth, Label, Notion, UniversalMixture,
};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::metrics::entropy::{
    smooth_max_ub_of, smooth_min_lb_of, tensor_power_spectrum, von_neumann_of,
};
use crate::metrics::{fidelity, helstrom, purified_distance, trace_distance, von_neumann};
use crate::pipeline::{
    advantage, entropic_efi, exact_advice, gaph_decider, one_prs_from_pms, pms_from_entropic,
    universal_efi_mixture, EfiPairSpec, GapHParams, GenOp, GeneratorSpec, PmsParams, StretchLedger,
};
use crate::qstate::haar::haar_state_with;
use crate::qstate::{
    haar_unitary, purify, random_density, random_mixed, sample_haar_state, DensityOperator,
    PureState, RegisterLayout,
};
use crate::rng::{substream, substream_seed, Rng};

pub struct Part {
    pub name: &'static str,
    pub suite: Suite,
    pub criterion: Option<u8>,
    pub run: fn(&ExperimentConfig) -> Result<Vec<Check>>,
}

pub struct Criterion {
    pub number: u8,
    pub title: &'static str,
    pub budget_seconds: f64,
}

pub const CRITERIA: [Criterion; 12] = [
    Criterion {
        number: 1,
        title: "metric inequalities",
        budget_seconds: 30.0,
    },
    Criterion {
        number: 2,
        title: "entropic EFI gap and formula",
        budget_seconds: 10.0,
    },
    Criterion {
        number: 3,
        title: "Clifford 2-design moments",
        budget_seconds: 120.0,
    },
    Criterion {
        number: 4,
        title: "extractor bound and Monte Carlo consistency",
        budget_seconds: 300.0,
    },
    Criterion {
        number: 5,
        title: "pseudo-mixed state margins",
        budget_seconds: 120.0,
    },
    Criterion {
        number: 6,
        title: "stretch ledger and one-time pad",
        budget_seconds: 60.0,
    },
    Criterion {
        number: 7,
        title: "Kolmogorov inequalities",
        budget_seconds: 300.0,
    },
    Criterion {
        number: 8,
        title: "smoothing solver against oracle",
        budget_seconds: 180.0,
    },
    Criterion {
        number: 9,
        title: "GapH decider on the toy family",
        budget_seconds: 180.0,
    },
    Criterion {
        number: 10,
        title: "span and robust span",
        budget_seconds: 180.0,
    },
    Criterion {
        number: 11,
        title: "AEP trend",
        budget_seconds: 120.0,
    },
    Criterion {
        number: 12,
        title: "universal EFI mixture",
        budget_seconds: 60.0,
    },
];

pub const PARTS: &[Part] = &[
    Part {
        name: "state-calculus",
        suite: Suite::Metrics,
        criterion: None,
        run: state_calculus,
    },
    Part {
        name: "metric-inequalities",
        suite: Suite::Metrics,
        criterion: Some(1),
        run: metric_inequalities,
    },
    Part {
        name: "entropy-addition",
        suite: Suite::Metrics,
        criterion: None,
        run: entropy_addition,
    },
    Part {
        name: "aep",
        suite: Suite::Metrics,
        criterion: Some(11),
        run: aep,
    },
    Part {
        name: "design",
        suite: Suite::Design,
        criterion: Some(3),
        run: design,
    },
    Part {
        name: "extractor-bound",
        suite: Suite::Extractor,
        criterion: Some(4),
        run: extractor_bound,
    },
    Part {
        name: "extractor-extras",
        suite: Suite::Extractor,
        criterion: None,
        run: extractor_extras,
    },
    Part {
        name: "entropic-efi",
        suite: Suite::Pipeline,
        criterion: Some(2),
        run: entropic,
    },
    Part {
        name: "pms",
        suite: Suite::Pipeline,
        criterion: Some(5),
        run: pms,
    },
    Part {
        name: "one-prs",
        suite: Suite::Pipeline,
        criterion: Some(6),
        run: one_prs,
    },
    Part {
        name: "gaph",
        suite: Suite::Pipeline,
        criterion: Some(9),
        run: gaph,
    },
    Part {
        name: "gaph-controls",
        suite: Suite::Pipeline,
        criterion: None,
        run: gaph_controls,
    },
    Part {
        name: "universal-mixture",
        suite: Suite::Pipeline,
        criterion: Some(12),
        run: universal,
    },
    Part {
        name: "kolmogorov-inequalities",
        suite: Suite::Kolmogorov,
        criterion: Some(7),
        run: kolmogorov_inequalities,
    },
    Part {
        name: "smoothing-oracle",
        suite: Suite::Kolmogorov,
        criterion: Some(8),
        run: smoothing_oracle,
    },
    Part {
        name: "span",
        suite: Suite::Kolmogorov,
        criterion: Some(10),
        run: span,
    },
    Part {
        name: "classification",
        suite: Suite::Kolmogorov,
        criterion: None,
        run: classification,
    },
];

pub fn parts_for(suite: Suite) -> impl Iterator<Item = &'static Part> {
    PARTS
        .iter()
        .filter(move |p| suite == Suite::All || p.suite == suite)
}

pub fn parts_for_criterion(number: u8) -> impl Iterator<Item = &'static Part> {
    PARTS.iter().filter(move |p| p.criterion == Some(number))
}

/// Generator for sample `i` of a part.
fn stream(cfg: &ExperimentConfig, part: u64, i: u64) -> Rng {
    substream(substream_seed(cfg.seed, part), i)
}

pub(crate) fn part_seed(cfg: &ExperimentConfig, part: u64, i: u64) -> u64 {
    substream_seed(substream_seed(cfg.seed, part), i)
}

fn reg(name: &str, n: usize) -> Result<RegisterLayout> {
    RegisterLayout::single(name, n)
}

fn random_rank_density(layout: &RegisterLayout, rng: &mut Rng) -> Result<DensityOperator> {
    let rank = rng.gen_range(1..=layout.dim());
    random_density(layout, rank, rng)
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn gaussian_matrix(d: usize, rng: &mut Rng) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

fn collect<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..n).into_par_iter().map(f).collect()
}

fn state_calculus(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let rows = collect(cfg.verify.states, |i| {
        let mut rng = stream(cfg, 1, i as u64);
        // Positivity on a purifying reference R catches maps that are
        // positive but not completely positive.
        let (na, nb) = [(1, 1), (1, 2), (2, 1)][i % 3];
        let layout = RegisterLayout::new([("R", 1), ("A", na), ("B", nb)])?;
        let rho = random_rank_density(&layout, &mut rng)?;
        let red = rho.partial_trace(&["R", "A"])?;
        let min_eig = linalg::hermitian_eigenvalues(red.matrix())
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let trace_dev = (red.matrix().trace().re - rho.matrix().trace().re).abs();

        let la = reg("A", 1 + i % 3)?;
        let sigma = random_rank_density(&la, &mut rng)?;
        let back = DensityOperator::from_pure(&purify(&sigma)?).partial_trace(&["A"])?;
        let purify_err = linalg::max_abs(&(back.matrix() - sigma.matrix()));

        let tau = random_mixed(&reg("B", 1 + (i / 3) % 2)?, &mut rng)?;
        let prod = sigma.tensor(&tau)?;
        let tensor_err = linalg::max_abs(&(prod.partial_trace(&["A"])?.matrix() - sigma.matrix()));

        let u = haar_unitary(la, &mut rng)?;
        let rotated = sigma.apply_unitary(&u, &["A"])?;
        let e0 = sorted_desc(linalg::hermitian_eigenvalues(sigma.matrix()));
        let e1 = sorted_desc(linalg::hermitian_eigenvalues(rotated.matrix()));
        let spectrum_err = e0
            .iter()
            .zip(&e1)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Ok([min_eig, trace_dev, purify_err, tensor_err, spectrum_err])
    })?;
    let mut positive = Worst::at_least(
        "partial trace output eigenvalues",
        "qstate.partial-trace-positivity",
        1e-9,
    );
    let mut trace = Worst::at_most(
        "partial trace trace deviation",
        "qstate.partial-trace-positivity",
        1e-12,
    );
    let mut purify_w = Worst::at_most("purify round trip error", "qstate.purify-round-trip", 1e-8);
    let mut tensor_w = Worst::at_most("tensor then trace error", "qstate.tensor-trace", 1e-12);
    let mut spectrum = Worst::at_most(
        "unitary spectrum deviation",
        "qstate.unitary-spectrum",
        1e-9,
    );
    for r in rows {
        positive.push(r[0], 0.0);
        trace.push(r[1], 0.0);
        purify_w.push(r[2], 0.0);
        tensor_w.push(r[3], 0.0);
        spectrum.push(r[4], 0.0);
    }
    Ok(vec![
        positive.finish(),
        trace.finish(),
        purify_w.finish(),
        tensor_w.finish(),
        spectrum.finish(),
    ])
}

fn metric_inequalities(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let pairs = collect(cfg.verify.pairs, |i| {
        let mut rng = stream(cfg, 2, i as u64);
        let layout = reg("A", 1 + i % 4)?;
        let r0 = random_rank_density(&layout, &mut rng)?;
        let r1 = random_rank_density(&layout, &mut rng)?;
        let d = trace_distance(&r0, &r1)?;
        Ok([
            d,
            fidelity(&r0, &r1)?,
            purified_distance(&r0, &r1)?,
            helstrom(&r0, &r1)?.advantage,
        ])
    })?;
    let mut fvdg = Worst::at_least(
        "trace distance vs 1 - fidelity",
        "metrics.fuchs-van-de-graaf",
        1e-9,
    );
    let mut pd = Worst::at_least(
        "purified vs trace distance",
        "metrics.purified-dominates-trace",
        1e-9,
    );
    let mut hel = Worst::at_most(
        "Helstrom advantage minus trace distance",
        "metrics.helstrom-optimality",
        1e-9,
    );
    for [d, f, p, adv] in pairs {
        fvdg.push(d, 1.0 - f);
        pd.push(p, d);
        hel.push((adv - d).abs(), 0.0);
    }
    let mixtures = collect(cfg.verify.pairs, |i| {
        let mut rng = stream(cfg, 3, i as u64);
        let layout = reg("A", 1 + i % 4)?;
        let k = 2 + i % 3;
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut left = Vec::with_capacity(k);
        let mut right = Vec::with_capacity(k);
        for _ in 0..k {
            left.push(random_rank_density(&layout, &mut rng)?);
            right.push(random_rank_density(&layout, &mut rng)?);
        }
        let worst = left
            .iter()
            .zip(&right)
            .map(|(a, b)| trace_distance(a, b))
            .collect::<Result<Vec<f64>>>()?;
        let worst = worst.into_iter().fold(0.0, f64::max);
        let mix = |v: &[DensityOperator]| {
            let parts: Vec<(f64, &DensityOperator)> =
                raw.iter().map(|w| w / total).zip(v).collect();
            DensityOperator::mixture(&parts)
        };
        Ok((trace_distance(&mix(&left)?, &mix(&right)?)?, worst))
    })?;
    let mut convex = Worst::at_most(
        "distance of mixtures vs largest component distance",
        "metrics.joint-convexity",
        1e-9,
    );
    for (lhs, rhs) in mixtures {
        convex.push(lhs, rhs);
    }
    Ok(vec![
        fvdg.finish(),
        pd.finish(),
        convex.finish(),
        hel.finish(),
    ])
}

/// `|0⟩⟨0| ⊗ a` and `|1⟩⟨1| ⊗ b` rotated by one Haar unitary.
fn orthogonal_pair(q: usize, rng: &mut Rng) -> Result<(DensityOperator, DensityOperator)> {
    let small = reg("S", q)?;
    let flag = reg("F", 1)?;
    let whole = reg("A", q + 1)?;
    let u = haar_unitary(whole.clone(), rng)?;
    let a = DensityOperator::basis(flag.clone(), 0)?.tensor(&random_rank_density(&small, rng)?)?;
    let b = DensityOperator::basis(flag, 1)?.tensor(&random_rank_density(&small, rng)?)?;
    let a = a.relabel(whole.clone())?.apply_unitary(&u, &["A"])?;
    let b = b.relabel(whole)?.apply_unitary(&u, &["A"])?;
    Ok((a, b))
}

fn holevo(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    let avg = DensityOperator::mixture(&[(0.5, a), (0.5, b)])?;
    Ok(von_neumann(&avg) - (von_neumann(a) + von_neumann(b)) / 2.0)
}

fn entropy_addition(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let count = cfg.verify.pairs.clamp(4, 100);
    let rows = collect(count, |i| {
        let mut rng = stream(cfg, 4, i as u64);
        let q = 1 + i % 2;
        let (a, b) = orthogonal_pair(q, &mut rng)?;
        let exact = holevo(&a, &b)?;
        let mix = 10f64.powi(-(1 + (i % 6) as i32));
        let b_near = DensityOperator::mixture(&[(1.0 - mix, &b), (mix, &a)])?;
        let delta = 1.0 - trace_distance(&a, &b_near)?;
        let chi = holevo(&a, &b_near)?;
        let c = (chi - 1.0).abs() / (delta * (1.0 + (q + 1) as f64));
        Ok((exact, chi, c))
    })?;
    let mut exact = Worst::at_most(
        "orthogonal pair entropy excess deviation from 1",
        "metrics.orthogonal-entropy-addition",
        1e-9,
    );
    let mut cap = Worst::at_most(
        "near-orthogonal entropy excess",
        "metrics.orthogonal-entropy-addition",
        1e-9,
    );
    let mut constant: f64 = 0.0;
    for (e, chi, c) in rows {
        exact.push((e - 1.0).abs(), 0.0);
        cap.push(chi, 1.0);
        constant = constant.max(c);
    }
    Ok(vec![
        exact.finish(),
        cap.finish(),
        Check::logged(
            "measured constant c in |excess - 1| <= c(delta + delta n)",
            "metrics.orthogonal-entropy-addition",
            constant,
        ),
    ])
}

pub const AEP_EPS: f64 = 0.1;

fn aep(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let copies = cfg.verify.aep_copies.max(1);
    let rows = collect(cfg.verify.aep_states, |i| {
        let mut rng = stream(cfg, 5, i as u64);
        let n = 1 + i % 2;
        let rho = random_mixed(&reg("A", n)?, &mut rng)?;
        let spec = rho.eigenvalues();
        let s = von_neumann_of(&spec);
        let mut out = Vec::with_capacity(copies);
        for m in 1..=copies {
            let sp = tensor_power_spectrum(&spec, m);
            let lb = smooth_min_lb_of(&sp, AEP_EPS)?.value / m as f64;
            let ub = smooth_max_ub_of(&sp, AEP_EPS)?.value / m as f64;
            let slack = 6.0 * n as f64 * ((1.0 / AEP_EPS).log2() / m as f64).sqrt();
            out.push((s, lb, ub, slack));
        }
        Ok(out)
    })?;
    let mut lower = Worst::at_least(
        "per-copy smooth min-entropy vs S - slack",
        "metrics.aep-direction",
        1e-9,
    );
    let mut upper = Worst::at_most(
        "per-copy smooth max-entropy vs S + slack",
        "metrics.aep-direction",
        1e-9,
    );
    let mut trend = Worst::at_most(
        "min-entropy deficit at the largest m vs m = 1",
        "metrics.aep-direction",
        1e-12,
    );
    for per_state in rows {
        for &(s, lb, ub, slack) in &per_state {
            lower.push(lb, s - slack);
            upper.push(ub, s + slack);
        }
        let (s, first, _, _) = per_state[0];
        let (_, last, _, _) = per_state[per_state.len() - 1];
        trend.push(s - last, s - first);
    }
    Ok(vec![lower.finish(), upper.finish(), trend.finish()])
}

fn design(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in 1..=2usize {
        let d = 1usize << (2 * n);
        let errors = collect(cfg.verify.design_matrices, |j| {
            let m = gaussian_matrix(d, &mut stream(cfg, 6, (n * 1000 + j) as u64));
            Ok(two_design_moment_error(n, &m, SamplingMode::Full)?.max_abs_error)
        })?;
        let name = format!("{n}-qubit full enumeration second-moment error");
        let mut w = Worst::at_most(&name, "clifford.two-design", 0.0);
        for e in errors {
            w.push(e, 1e-10);
        }
        checks.push(w.finish());
    }
    let closure = collect(cfg.verify.closure_trials, |t| {
        let n = 1 + t % 3;
        let a = clifford::sample_clifford(n, part_seed(cfg, 7, 2 * t as u64))?;
        let b = clifford::sample_clifford(n, part_seed(cfg, 7, 2 * t as u64 + 1))?;
        let ab = a.compose(&b)?;
        let order = clifford_order_u128(n)?;
        Ok(ab.is_valid() && ab.index().is_some_and(|x| x < order))
    })?;
    checks.push(
        Check::holds(
            "products have valid tableaux and indices",
            "clifford.closure",
            closure.iter().all(|&x| x),
        )
        .with_detail(format!("{} trials", closure.len())),
    );
    let hom = collect(cfg.verify.homomorphism_trials, |t| {
        let n = 1 + t % 3;
        let a = clifford::sample_clifford(n, part_seed(cfg, 8, 2 * t as u64))?;
        let b = clifford::sample_clifford(n, part_seed(cfg, 8, 2 * t as u64 + 1))?;
        let lhs = a.compose(&b)?.to_dense()?;
        let rhs = a.to_dense()? * b.to_dense()?;
        let ratio = (lhs.adjoint() * &rhs).trace() / (1usize << n) as f64;
        Ok((ratio.norm() - 1.0).abs())
    })?;
    let mut w = Worst::at_most(
        "dense(ab) vs dense(a)dense(b) phase modulus",
        "clifford.homomorphism",
        1e-9,
    );
    for x in hom {
        w.push(x, 0.0);
    }
    checks.push(w.finish());
    Ok(checks)
}

fn extractor_bound(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let order = clifford_order_u128(2)?;
    let rows = collect(cfg.verify.planted, |t| {
        let mut rng = stream(cfg, 9, t as u64);
        let k = t % 3;
        let eps = rng.gen_range(0.5..0.95);
        let rho = planted_min_entropy(2, k, &mut rng)?;
        let plan = extractor_params(2, k as f64, eps)?;
        let Some(p) = plan.params() else {
            return Ok(None);
        };
        let out = apply_extractor_leading(&rho, &["A"], p.ell, SamplingMode::Full)?;
        let mut seen: Vec<u128> = out.branches.iter().map(|b| b.clifford_index).collect();
        seen.sort_unstable();
        seen.dedup();
        let uniform = seen.len() as u128 == order && out.branches.len() as u128 == order;
        Ok(Some((
            decoupling_report(&out).error,
            eps,
            uniform,
            out.trace_residual(),
        )))
    })?;
    let mut bound = Worst::at_most(
        "n=2 planted decoupling error vs eps",
        "extractor.bound",
        1e-12,
    );
    let mut uniform = true;
    let mut residual = Worst::at_most("branch trace deviation", "extractor.strongness", 1e-12);
    let mut feasible = 0;
    for (err, eps, u, res) in rows.into_iter().flatten() {
        feasible += 1;
        bound.push(err, eps);
        uniform &= u;
        residual.push(res, 0.0);
    }
    let mut checks = vec![
        bound.finish(),
        Check::at_least(
            "feasible planted instances",
            "extractor.bound",
            feasible as f64,
            1.0,
            0.0,
        ),
        Check::holds(
            "every Clifford index appears once with weight 1/|L|",
            "extractor.strongness",
            uniform,
        ),
        residual.finish(),
    ];

    let mut rng = stream(cfg, 10, 0);
    let rho3 = planted_min_entropy(3, 2, &mut rng)?;
    let runs = collect(cfg.verify.mc_repeats, |rep| {
        let mode = SamplingMode::MonteCarlo {
            samples: cfg.verify.mc_samples,
            seed: part_seed(cfg, 10, 1 + rep as u64),
        };
        let r = decoupling_report(&apply_extractor_leading(&rho3, &["A"], 1, mode)?);
        Ok((r.error, r.standard_error.unwrap_or(f64::INFINITY)))
    })?;
    let mean = runs.iter().map(|r| r.0).sum::<f64>() / runs.len() as f64;
    let mut mc = Worst::at_most(
        "n=3 run deviation from repeated-run mean vs 3 SE",
        "extractor.monte-carlo-consistency",
        0.0,
    );
    for (e, se) in &runs {
        mc.push((e - mean).abs(), 3.0 * se);
    }
    checks.push(mc.finish());
    checks.push(Check::logged(
        "n=3 repeated-run mean decoupling error",
        "extractor.monte-carlo-consistency",
        mean,
    ));
    Ok(checks)
}

fn extractor_extras(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let layout = reg("A", 2)?;
    let mono = collect(3, |t| {
        let mut rng = stream(cfg, 11, t as u64);
        let rho = planted_min_entropy(2, 1, &mut rng)?;
        let e1 = decoupling_report(&apply_extractor_leading(
            &rho,
            &["A"],
            1,
            SamplingMode::Full,
        )?)
        .error;
        let e2 = decoupling_report(&apply_extractor_leading(
            &rho,
            &["A"],
            2,
            SamplingMode::Full,
        )?)
        .error;
        Ok((e2, e1))
    })?;
    let mut w = Worst::at_least("error at l=2 vs l=1", "extractor.monotonicity", 1e-12);
    for (e2, e1) in mono {
        w.push(e2, e1);
    }
    let rho = random_density(&layout, 2, &mut stream(cfg, 12, 0))?;
    let full = decoupling_report(&apply_extractor_leading(
        &rho,
        &["A"],
        1,
        SamplingMode::Full,
    )?)
    .error;
    let trials = cfg.verify.mc_trials;
    let hits = collect(trials, |t| {
        let mode = SamplingMode::MonteCarlo {
            samples: cfg.verify.mc_samples,
            seed: part_seed(cfg, 12, 1 + t as u64),
        };
        let r = decoupling_report(&apply_extractor_leading(&rho, &["A"], 1, mode)?);
        Ok((r.error - full).abs() <= 3.0 * r.standard_error.unwrap_or(f64::INFINITY))
    })?;
    let within = hits.iter().filter(|&&h| h).count() as f64;
    // 3σ coverage is about 99.7%: allow one miss per twenty trials, at least one.
    let allowed = (trials / 20).max(1) as f64;
    Ok(vec![
        w.finish(),
        Check::at_least(
            "n=2 Monte Carlo runs within 3 SE of enumeration",
            "extractor.monte-carlo-consistency",
            within,
            trials as f64 - allowed,
            0.0,
        ),
    ])
}

fn entropic(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let e = entropic_efi(&orthogonal_efi_pair()?)?;
    let mut checks = vec![Check::close(
        "orthogonal pair entropy gap",
        "pipeline.entropic-gap",
        e.gap,
        1.0,
        1e-9,
    )];
    let rows = collect(cfg.verify.entropic_pairs, |i| {
        let mut rng = stream(cfg, 13, i as u64);
        let layout = reg("A", 1 + i % 2)?;
        let r0 = random_rank_density(&layout, &mut rng)?;
        let r1 = random_rank_density(&layout, &mut rng)?;
        let e = entropic_efi(&EfiPairSpec::from_states("random", &r0, &r1)?)?;
        let (s0, s1) = e.pair.states()?;
        let formula = (von_neumann(&r0) + von_neumann(&r1)) / 2.0 + 1.0;
        let residual = (von_neumann(&s0) - formula).abs();
        // Hybrid through I/2 ⊗ ρ0 under a random rank-one measurement.
        let mid = DensityOperator::new(
            s0.layout().clone(),
            linalg::kron(&linalg::identity(2).scale(0.5), r0.matrix()),
        )?;
        let probe = haar_state_with(&reg("X", s0.n_qubits())?, &mut rng)?;
        let p = linalg::outer(probe.amplitudes());
        let direct = advantage(&s0, &s1, &p)?;
        let via = advantage(&s0, &mid, &p)? + advantage(&mid, &s1, &p)?;
        Ok((residual, direct, via))
    })?;
    let mut formula = Worst::at_most(
        "S(sigma0) vs (S(rho0)+S(rho1))/2 + 1",
        "pipeline.entropic-gap",
        1e-9,
    );
    let mut hybrid = Worst::at_most("direct advantage vs hybrid sum", "pipeline.hybrid", 1e-12);
    for (res, direct, via) in rows {
        formula.push(res, 0.0);
        hybrid.push(direct, via);
    }
    checks.push(formula.finish());
    checks.push(hybrid.finish());
    Ok(checks)
}

pub fn orthogonal_efi_pair() -> Result<EfiPairSpec> {
    let a = reg("A", 1)?;
    EfiPairSpec::from_states(
        "orthogonal",
        &DensityOperator::basis(a.clone(), 0)?,
        &DensityOperator::basis(a, 1)?,
    )
}

/// Seed of the sampled Clifford family behind `τ0`, shared with the
/// `pipeline` command.
pub(crate) fn pms_seed(cfg: &ExperimentConfig) -> u64 {
    part_seed(cfg, 14, 0)
}

fn pms(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let e = entropic_efi(&orthogonal_efi_pair()?)?;
    let m = 2;
    let eps = 0.25;
    let mode = SamplingMode::MonteCarlo {
        samples: cfg.verify.pms_samples,
        seed: pms_seed(cfg),
    };
    let (gen, rep) = pms_from_entropic(
        &e,
        PmsParams {
            m,
            eps,
            advice: exact_advice(&e, m),
            mode,
        },
    )?;
    let tau0 = gen.state()?;
    Ok(vec![
        Check::at_most(
            "S(tau0) strictly below output qubits",
            "pipeline.pms-margin",
            rep.s_tau0,
            rep.output_qubits,
            -1e-12,
        ),
        Check::close(
            "circuit entropy vs reported S(tau0)",
            "pipeline.pms-margin",
            von_neumann(&tau0),
            rep.s_tau0,
            1e-9,
        ),
        Check::at_most(
            "tau1 branch distance vs eps",
            "pipeline.pms-decoupling",
            rep.tau1_distance,
            eps,
            0.0,
        ),
        Check::at_most("input copies m", "plumbing", m as f64, 4.0, 0.0),
        Check::at_most(
            "input qubits m n",
            "plumbing",
            rep.n_total as f64,
            10.0,
            0.0,
        ),
    ])
}

/// `A(1) ⊗ B(2)`: an entangled A–B0 pair with B1 in `|+⟩`.
pub fn three_qubit_generator() -> Result<GeneratorSpec> {
    let layout = RegisterLayout::new([("A", 1), ("B", 2)])?;
    let ops = vec![
        GenOp::H { q: 1 },
        GenOp::Cnot {
            control: 1,
            target: 0,
        },
        GenOp::T { q: 0 },
        GenOp::H { q: 2 },
    ];
    GeneratorSpec::new(
        "three-qubit",
        layout,
        ops,
        vec!["A".into()],
        vec!["B".into()],
    )
}

fn one_prs(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let ledger = StretchLedger::new(1, 1, 2, 1);
    let stretch = ledger.exact_stretch().map_or(f64::NAN, |s| s as f64);
    let mut symbolic = true;
    for n in 1..4 {
        for extra in 0..4 {
            for m in 1..4 {
                for ell in 1..10 {
                    let l = StretchLedger::new(n, n + extra, m, ell);
                    symbolic &= l.stretch.log_l == 0 && l.exact_stretch() == Some(l.closed_form());
                }
            }
        }
    }
    let prs = one_prs_from_pms(&three_qubit_generator()?, 1)?;
    let order = clifford_order_u128(2)?;
    let residuals = collect(order as usize, |ci| prs.otp_identity_residual(ci as u128))?;
    let mut otp = Worst::at_most(
        "pad average vs Tr_B2 tensor I/|B2| over all Cliffords",
        "pipeline.one-time-pad",
        1e-10,
    );
    for r in residuals {
        otp.push(r, 0.0);
    }
    let mc = prs.monte_carlo_average(cfg.verify.prs_keys, part_seed(cfg, 15, 0))?;
    Ok(vec![
        Check::close(
            "stretch for n = n' = 1, m = 2, l = 1",
            "pipeline.stretch",
            stretch,
            2.0,
            0.0,
        ),
        Check::holds(
            "log|L| coefficient cancels exactly",
            "pipeline.stretch",
            symbolic,
        ),
        otp.finish(),
        Check::at_most(
            "sampled key average distance vs 3 SE",
            "pipeline.one-time-pad",
            mc.distance,
            3.0 * mc.standard_error,
            0.0,
        ),
    ])
}

fn gaph(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let family = toy_family(cfg.seed)?;
    let params = GapHParams {
        r: 13,
        delta: 2.0,
        eps: 0.005,
        mode: SamplingMode::MonteCarlo {
            samples: 16,
            seed: part_seed(cfg, 16, 0),
        },
    };
    let (_, rep) = gaph_decider(&family, params)?;
    let adv = rep.advantage.unwrap_or(f64::NAN);
    Ok(vec![
        Check::at_least(
            "extracted average distance to uniform",
            "pipeline.gaph-distance",
            rep.distance_to_uniform,
            0.25,
            -1e-12,
        ),
        Check::at_least(
            "Helstrom decider advantage",
            "pipeline.gaph-advantage",
            adv,
            0.1,
            0.0,
        ),
    ])
}

fn gaph_controls(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let states: Vec<(PureState, Option<Side>)> = (0..40)
        .map(|j| {
            let side = if j % 2 == 0 { Side::Low } else { Side::High };
            Ok((sample_haar_state(2, part_seed(cfg, 17, j))?, Some(side)))
        })
        .collect::<Result<_>>()?;
    let haar = FamilySpec::uniform("haar", FamilyKind::Samplable, 2, states)?;
    let (_, rep) = gaph_decider(
        &haar,
        GapHParams {
            r: 0,
            delta: 0.0,
            eps: 0.005,
            mode: SamplingMode::Full,
        },
    )?;
    let adv = rep.advantage.unwrap_or(f64::NAN);
    let se = rep.advantage_standard_error.unwrap_or(f64::NAN);
    let mut null = Vec::new();
    for j in 0..6 {
        let s = sample_haar_state(2, part_seed(cfg, 18, j))?;
        null.push((s.clone(), Some(Side::Low)));
        null.push((s, Some(Side::High)));
    }
    let null = FamilySpec::uniform("null", FamilyKind::Samplable, 2, null)?;
    let (_, nrep) = gaph_decider(
        &null,
        GapHParams {
            r: 1,
            delta: 0.0,
            eps: 0.005,
            mode: SamplingMode::Full,
        },
    )?;
    Ok(vec![
        Check::at_most(
            "all-Haar advantage vs 3 SE",
            "pipeline.gaph-advantage",
            adv,
            3.0 * se,
            0.0,
        ),
        Check::close(
            "identical halves advantage",
            "pipeline.gaph-advantage",
            nrep.advantage.unwrap_or(f64::NAN),
            0.0,
            1e-12,
        ),
    ])
}

fn universal(_: &ExperimentConfig) -> Result<Vec<Check>> {
    let n = 4;
    let mut rank = Worst::at_most(
        "rank of rho_r vs 2^(r+1)",
        "pipeline.universal-mixture",
        0.0,
    );
    let mut dist = Worst::at_least(
        "D(rho_r, I/2^n) vs 1 - 2^(r-n)",
        "pipeline.universal-mixture",
        1e-12,
    );
    for r in 2..=3usize {
        let u = universal_efi_mixture(n, r, 100)?;
        rank.push(u.rank() as f64, (1u64 << (r + 1)) as f64);
        dist.push(
            u.distance_to_uniform()?,
            1.0 - 2f64.powi(r as i32 - n as i32),
        );
    }
    Ok(vec![rank.finish(), dist.finish()])
}

fn kolmogorov_inequalities(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let mu = build_universal_mixture(2, 14)?;
    let table = mu.program_table();
    let rows = collect(table.len(), |i| {
        let e = &table[i];
        let k = knet(&mu, &e.state, 0.0)?
            .bits()
            .ok_or_else(|| Error::Solver("enumerated state above cap".into()))?;
        Ok((umin(&mu, &e.state)?.value(), k as f64))
    })?;
    let mut uk = Worst::at_most(
        "U_min vs Knet on every enumerated state",
        "kolmogorov.umin-knet",
        1e-6,
    );
    for (u, k) in rows {
        uk.push(u, k);
    }
    let count = cfg.verify.random_states;
    let smooth = collect(count, |i| {
        let mut rng = stream(cfg, 19, i as u64);
        let e = &table[rng.gen_range(0..table.len())];
        let eps: f64 = rng.gen_range(0.01..0.99);
        let k = knet(&mu, &e.state, 0.0)?.bits().unwrap_or(usize::MAX) as f64;
        Ok((hbar_smooth(&mu, &e.state, 1.0 - eps)?.bits, k - eps.log2()))
    })?;
    let mut hk = Worst::at_most(
        "smoothed hbar at 1-eps vs Knet + log(1/eps)",
        "kolmogorov.hbar-smooth-knet",
        1e-9,
    );
    for (h, b) in smooth {
        hk.push(h, b);
    }
    let duals = collect(count, |i| {
        let mut rng = stream(cfg, 20, i as u64);
        let psi = haar_state_with(&reg("A", 2)?, &mut rng)?;
        let eps: f64 = rng.gen_range(0.01..0.99);
        let h = hbar(&mu, &psi)?;
        let u = umin(&mu, &psi)?.value();
        let us = umin_smooth(&mu, &psi, 1.0 - eps)?.bits;
        let hs = hbar_smooth(&mu, &psi, 1.0 - eps)?.bits;
        Ok((us, h + eps.log2(), hs, u - eps.log2()))
    })?;
    let mut d1 = Worst::at_least(
        "smoothed U_min at 1-eps vs hbar + log eps",
        "kolmogorov.smoothing-duality",
        1e-9,
    );
    let mut d2 = Worst::at_most(
        "smoothed hbar at 1-eps vs U_min - log eps",
        "kolmogorov.smoothing-duality",
        1e-9,
    );
    for (us, b1, hs, b2) in duals {
        d1.push(us, b1);
        d2.push(hs, b2);
    }
    let planted = collect(cfg.verify.planted_weights, |i| {
        let mut rng = stream(cfg, 21, i as u64);
        let kappa = 1.0 + (i % 17) as f64;
        let base = random_density(&reg("A", 2)?, 4, &mut rng)?;
        let psi = haar_state_with(&reg("A", 2)?, &mut rng)?;
        let scale = rng.gen_range(0.05..0.5);
        let w = (-kappa).exp2();
        let m = base.matrix() * C64::from(scale * (1.0 - w))
            + linalg::outer(psi.amplitudes()) * C64::from(w);
        Ok((
            umin(&UniversalMixture::from_operator(m)?, &psi)?.value(),
            kappa,
        ))
    })?;
    let mut sm = Worst::at_most(
        "U_min vs planted weight exponent",
        "kolmogorov.sherman-morrison",
        1e-6,
    );
    for (u, k) in planted {
        sm.push(u, k);
    }
    Ok(vec![
        uk.finish(),
        Check::logged(
            "enumerated states",
            "kolmogorov.umin-knet",
            table.len() as f64,
        ),
        hk.finish(),
        d1.finish(),
        d2.finish(),
        sm.finish(),
    ])
}

fn smoothing_oracle(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let samples = cfg.verify.oracle_samples;
    let rows = collect(cfg.verify.smoothing_instances, |i| {
        let mut rng = stream(cfg, 22, i as u64);
        let layout = reg("A", 2)?;
        let m =
            random_density(&layout, 4, &mut rng)?.matrix() * C64::from(rng.gen_range(0.01..1.0));
        let mu = UniversalMixture::from_operator(m.clone())?;
        let psi = haar_state_with(&layout, &mut rng)?;
        let eps: f64 = rng.gen_range(0.05..0.95);
        let c = 1.0 - eps * eps;
        let hs = hbar_smooth(&mu, &psi, eps)?;
        let h_oracle = -ball_search(
            &m,
            psi.amplitudes(),
            c,
            samples,
            part_seed(cfg, 23, i as u64),
            true,
        )
        .log2();
        let inv = linalg::hermitian_fn(&m, |x| 1.0 / x);
        let us = umin_smooth(&mu, &psi, eps)?;
        let u_oracle = ball_search(
            &inv,
            psi.amplitudes(),
            c,
            samples,
            part_seed(cfg, 24, i as u64),
            true,
        )
        .log2();
        Ok((
            hs.bits,
            h_oracle,
            us.bits,
            u_oracle,
            hs.kkt_residual.max(us.kkt_residual),
        ))
    })?;
    let mut h_side = Worst::at_least(
        "smoothed hbar vs oracle (one-sided)",
        "kolmogorov.smoothing-solver",
        1e-9,
    );
    let mut h_gap = Worst::at_most(
        "smoothed hbar minus oracle",
        "kolmogorov.smoothing-solver",
        0.0,
    );
    let mut u_side = Worst::at_most(
        "smoothed U_min vs oracle (one-sided)",
        "kolmogorov.smoothing-solver",
        1e-9,
    );
    let mut u_gap = Worst::at_most(
        "oracle minus smoothed U_min",
        "kolmogorov.smoothing-solver",
        0.0,
    );
    let mut kkt = Worst::at_most("KKT residual", "kolmogorov.smoothing-solver", 0.0);
    for (hb, ho, ub, uo, res) in rows {
        h_side.push(hb, ho);
        h_gap.push(hb - ho, 0.05);
        u_side.push(ub, uo);
        u_gap.push(uo - ub, 0.05);
        kkt.push(res, 1e-8);
    }
    Ok(vec![
        h_side.finish(),
        h_gap.finish(),
        u_side.finish(),
        u_gap.finish(),
        kkt.finish(),
    ])
}

pub const SPAN_GAMMA: f64 = 0.1;

fn span(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let mu = build_universal_mixture(2, 14)?;
    let mut rank = Worst::at_most(
        "rank of span of codes up to r vs 2^(r+1)",
        "kolmogorov.span-rank",
        0.0,
    );
    for r in 0..=14 {
        rank.push(
            span_projector(&mu, r)?.rank as f64,
            (1u64 << (r + 1)) as f64,
        );
    }
    let zero = PureState::basis(reg("A", 1)?, 0)?;
    let tiny = (-100f64).exp2();
    let big = (1.0 - (-200f64).exp2()).sqrt();
    let near = PureState::new(
        reg("A", 1)?,
        CVector::from_vec(vec![C64::from(big), C64::from(tiny)]),
    )?;
    let stable = robust_span_projector(1, &[zero, near], 0.5)?;

    // Family of every program with code length at most r.
    let r = 10;
    let low: Vec<PureState> = mu.entries_up_to(r).map(|e| e.state.clone()).collect();
    let l = low.len() as f64;
    let robust = robust_span_projector(2, &low, SPAN_GAMMA)?;
    let avg = low
        .iter()
        .fold(CMatrix::zeros(4, 4), |a, s| {
            a + linalg::outer(s.amplitudes())
        })
        .scale(1.0 / l);
    let support = linalg::hermitian_eigenvalues(&avg)
        .iter()
        .filter(|&&x| x > 1e-12)
        .count();
    let mean_overlap = low.iter().map(|s| robust.weight(s)).sum::<Result<f64>>()? / l;
    // Discarded eigenvalues are below γ/L, so the mean loss is at most
    // (rank − kept)·γ/L.
    let low_bound = 1.0 - (support - robust.rank) as f64 * SPAN_GAMMA / l;
    let low_factor = if support > robust.rank {
        (1.0 - mean_overlap) * l / SPAN_GAMMA
    } else {
        0.0
    };
    // Π ≤ (L/γ)ρ ≤ 2^r μ/γ, so ⟨ψ|Π|ψ⟩ ≤ 2^{r − H̄(ψ)}/γ.
    let high = collect(cfg.verify.random_states, |i| {
        let psi = haar_state_with(&reg("A", 2)?, &mut stream(cfg, 25, i as u64))?;
        let bound = (r as f64 - hbar(&mu, &psi)?).exp2() / SPAN_GAMMA;
        Ok((robust.weight(&psi)?, bound))
    })?;
    let mut hi = Worst::at_most(
        "Haar overlap with robust span vs 2^(r - hbar)/gamma",
        "kolmogorov.high-complexity-span",
        1e-12,
    );
    let mut factor: f64 = 0.0;
    for (w, b) in high {
        hi.push(w, b);
        factor = factor.max(w / b);
    }
    Ok(vec![
        rank.finish(),
        Check::close(
            "robust span rank on the perturbation example",
            "kolmogorov.robust-span-stability",
            stable.rank as f64,
            1.0,
            0.0,
        ),
        Check::at_least(
            "mean overlap of short programs with robust span",
            "kolmogorov.low-complexity-span",
            mean_overlap,
            low_bound,
            1e-12,
        ),
        Check::logged(
            "measured low-side factor (1 - overlap) L / gamma",
            "kolmogorov.low-complexity-span",
            low_factor,
        ),
        hi.finish(),
        Check::logged(
            "measured high-side factor overlap / bound",
            "kolmogorov.high-complexity-span",
            factor,
        ),
    ])
}

fn classification(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let mu = build_universal_mixture(2, 14)?;
    let zero = PureState::basis(reg("A", 2)?, 0)?;
    let mut members: Vec<(PureState, Option<Side>)> = vec![(zero, Some(Side::Low)); 4];
    for j in 0..4 {
        members.push((
            sample_haar_state(2, part_seed(cfg, 26, j))?,
            Some(Side::High),
        ));
    }
    let fam = FamilySpec::uniform("planted", FamilyKind::Keyed, 2, members)?;
    let mut consistent = true;
    let mut total_dev: f64 = 0.0;
    for notion in [Notion::GapH, Notion::GapU, Notion::DGapH] {
        let rep = classify_instance(&fam, &mu, notion, 0.0, 1.0, 0.1, None)?;
        total_dev = total_dev
            .max((rep.fraction_low + rep.fraction_high + rep.fraction_neither - 1.0).abs());
        for m in &rep.members {
            consistent &= match m.label {
                Label::Low => m.low_statistic <= 0.0,
                Label::High => m.low_statistic > 0.0 && m.high_statistic >= 1.0,
                Label::Neither => m.low_statistic > 0.0 && m.high_statistic < 1.0,
            };
        }
    }
    Ok(vec![
        Check::at_most(
            "label fractions sum deviation",
            "kolmogorov.classification",
            total_dev,
            0.0,
            1e-12,
        ),
        Check::holds(
            "labels agree with their statistics",
            "kolmogorov.classification",
            consistent,
        ),
    ])
}
