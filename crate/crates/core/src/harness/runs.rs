//! The six commands. Each returns a report whose failing records carry the
//! reason; only configuration problems are returned as errors.

use rand::Rng as _;

use super::config::{ExperimentConfig, FamilyChoice, PairChoice, StateChoice};
use super::families::{
    haar_family, low_family, planted_min_entropy, toy_family, TOY_LOW_CAP, TOY_N,
};
use super::report::{Check, Report, Worst};
use super::suites::{parts_for, parts_for_criterion, pms_seed};
use crate::clifford::{self, two_design_moment_error, SamplingMode};
use crate::error::{Error, Result};
use crate::extractor::{
    apply_extractor_leading, check_k_min, decoupling_report, extractor_params, params_with_ell,
    write_decoupling_csv, DecouplingRow, ExtractorPlan, MAX_FULL_QUBITS,
};
use crate::kolmogorov::{
    build_universal_mixture, classify_instance, complexity_rows, write_complexity_csv, Notion,
};
use crate::kolmogorov::{codec::MAX_L_MAX, mixture::MAX_MIXTURE_QUBITS};
use crate::linalg::{CMatrix, CVector, C64};
use crate::metrics::{self, PlainEntropy, SmoothBound};
use crate::pipeline::{
    default_ell, entropic_efi, exact_advice, gaph_decider, one_prs_from_pms, pms_from_entropic,
    EfiPairSpec, GapHParams, PmsParams, StretchLedger,
};
use crate::qstate::haar::haar_state_with;
use crate::qstate::{
    max_qubits, random_density, random_mixed, DensityOperator, PureState, RegisterLayout,
};
use crate::rng::{substream, substream_seed};

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn mode_for(samples: usize, seed: u64) -> SamplingMode {
    if samples == 0 {
        SamplingMode::Full
    } else {
        SamplingMode::MonteCarlo { samples, seed }
    }
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn run_verify(cfg: &ExperimentConfig) -> Result<Report> {
    let suite = cfg.verify.suite;
    let mut rep = Report::new("verify", cfg);
    rep.param("suite", suite.name());
    rep.param("corpus", &cfg.verify);
    for part in parts_for(suite) {
        rep.stage(part.name, (part.run)(cfg).map(|cs| prefixed(part.name, cs)));
    }
    Ok(rep)
}

/// Runs the parts behind one acceptance criterion.
pub fn run_criterion(number: u8, cfg: &ExperimentConfig) -> Result<Report> {
    if !(1..=12).contains(&number) {
        return Err(Error::Config(format!("no acceptance criterion {number}")));
    }
    let mut rep = Report::new("verify", cfg);
    rep.param("criterion", number);
    for part in parts_for_criterion(number) {
        rep.stage(part.name, (part.run)(cfg).map(|cs| prefixed(part.name, cs)));
    }
    Ok(rep)
}

fn prefixed(part: &str, checks: Vec<Check>) -> Vec<Check> {
    checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{part}: {}", c.name);
            c
        })
        .collect()
}

fn make_pair(choice: PairChoice, seed: u64) -> Result<EfiPairSpec> {
    let a1 = RegisterLayout::single("A", 1)?;
    match choice {
        PairChoice::Orthogonal => EfiPairSpec::from_states(
            "orthogonal",
            &DensityOperator::basis(a1.clone(), 0)?,
            &DensityOperator::basis(a1, 1)?,
        ),
        PairChoice::Identical => {
            let z = DensityOperator::basis(a1, 0)?;
            EfiPairSpec::from_states("identical", &z, &z)
        }
        PairChoice::Random => {
            let mut rng = substream(seed, 0);
            let r0 = random_density(&a1, 2, &mut rng)?;
            let r1 = random_density(&a1, 2, &mut rng)?;
            EfiPairSpec::from_states("random", &r0, &r1)
        }
        PairChoice::NearOrthogonal => {
            // Pure two-qubit states at trace distance 1 − 10⁻⁶.
            let d: f64 = 1.0 - 1e-6;
            let s = (1.0 - d * d).sqrt();
            let a2 = RegisterLayout::single("A", 2)?;
            let mut u = CVector::from_element(4, C64::from(0.0));
            u[0] = C64::from(1.0);
            let mut v = CVector::from_element(4, C64::from(0.0));
            v[0] = C64::from(s);
            v[3] = C64::from((1.0 - s * s).sqrt());
            let r0 = DensityOperator::from_pure(&PureState::new(a2.clone(), u)?);
            let r1 = DensityOperator::from_pure(&PureState::new(a2, v)?);
            EfiPairSpec::from_states("near_orthogonal", &r0, &r1)
        }
    }
}

pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<Report> {
    let m = cfg.m_or(2);
    let eps = cfg.eps_or(0.25);
    let samples = cfg.params.samples.unwrap_or(8);
    let pair = make_pair(cfg.input.pair, cfg.seed).map_err(config_err)?;
    let mut rep = Report::new("pipeline", cfg);
    rep.param("pair", cfg.input.pair);
    rep.param("m", m);
    rep.param("eps", eps);
    rep.param("samples", samples);

    let e = match entropic_efi(&pair) {
        Ok(e) => e,
        Err(err) => {
            rep.push(Check::failed("entropic EFI", &err));
            return Ok(rep);
        }
    };
    rep.push(Check::logged(
        "entropy gap S(sigma1) - S(sigma0)",
        "pipeline.entropic-gap",
        e.gap,
    ));
    rep.push(Check::at_most(
        "block-diagonal entropy formula residual",
        "pipeline.entropic-gap",
        e.formula_residual,
        0.0,
        1e-9,
    ));
    rep.push(Check::holds(
        "entropy gap is non-degenerate",
        "pipeline.entropic-gap",
        !e.degenerate,
    ));

    let advice = cfg.params.advice.unwrap_or_else(|| exact_advice(&e, m));
    rep.param("advice", advice);
    let mode = mode_for(samples, pms_seed(cfg));
    let (gen, pms) = match pms_from_entropic(
        &e,
        PmsParams {
            m,
            eps,
            advice,
            mode,
        },
    ) {
        Ok(x) => x,
        Err(err) => {
            rep.push(Check::failed("pseudo-mixed state", &err));
            rep.notes.push("downstream stages skipped".into());
            return Ok(rep);
        }
    };
    rep.push(Check::at_most(
        "S(tau0) strictly below output qubits",
        "pipeline.pms-margin",
        pms.s_tau0,
        pms.output_qubits,
        -1e-12,
    ));
    rep.push(Check::at_most(
        "tau1 branch distance vs eps",
        "pipeline.pms-decoupling",
        pms.tau1_distance,
        eps,
        0.0,
    ));
    rep.push(Check::logged(
        "certified smooth min-entropy of sigma1 copies",
        "pipeline.pms-margin",
        pms.k_certified,
    ));

    let n = gen.output_qubits();
    let n_prime = (gen.n_qubits() - n).max(n);
    let ell = cfg.params.ell.unwrap_or_else(|| default_ell(n, n_prime, m));
    let ledger = StretchLedger::new(n, n_prime, m, ell);
    let stretch = ledger.exact_stretch();
    rep.push(Check::holds(
        "log|L| coefficient cancels exactly",
        "pipeline.stretch",
        stretch.is_some(),
    ));
    rep.push(Check::close(
        "stretch vs (n - n')m + 2l",
        "pipeline.stretch",
        stretch.map_or(f64::NAN, |s| s as f64),
        ledger.closed_form() as f64,
        0.0,
    ));
    match one_prs_from_pms(&gen, m) {
        Ok(prs) => {
            let mc = prs.monte_carlo_average(cfg.verify.prs_keys, substream_seed(cfg.seed, 2))?;
            rep.push(Check::at_most(
                "sampled key average distance vs 3 SE",
                "pipeline.one-time-pad",
                mc.distance,
                3.0 * mc.standard_error,
                0.0,
            ));
        }
        Err(err) => rep
            .notes
            .push(format!("dense single-copy PRS skipped: {err}")),
    }

    let row = vec![
        pair.label.clone(),
        m.to_string(),
        format!("{:e}", e.gap),
        advice.to_string(),
        format!("{:e}", pms.k),
        pms.ell.to_string(),
        format!("{:e}", pms.log_l),
        format!("{:e}", pms.s_tau0),
        format!("{:e}", pms.output_qubits),
        format!("{:e}", pms.margin),
        format!("{:e}", pms.tau1_distance),
        format!("{eps:e}"),
        pms.tau1_standard_error
            .map(|s| format!("{s:e}"))
            .unwrap_or_default(),
        stretch.map(|s| s.to_string()).unwrap_or_default(),
    ];
    let header = [
        "pair",
        "m",
        "gap",
        "advice",
        "k",
        "ell",
        "log_l",
        "s_tau0",
        "output_qubits",
        "margin",
        "tau1_distance",
        "tau1_bound",
        "tau1_standard_error",
        "stretch",
    ];
    rep.tables
        .insert("pipeline".into(), csv_bytes(&header, &[row])?);
    Ok(rep)
}

pub fn run_kolmo(cfg: &ExperimentConfig) -> Result<Report> {
    let choice = cfg.input.family;
    let toy = choice == FamilyChoice::Toy;
    let n = if toy { TOY_N } else { cfg.n_or(2) };
    if toy && cfg.params.n.is_some_and(|x| x != TOY_N) {
        return Err(Error::Config(format!(
            "the toy family lives on {TOY_N} qubits"
        )));
    }
    let l_max = cfg.params.l_max.unwrap_or(14);
    if l_max > MAX_L_MAX || n > MAX_MIXTURE_QUBITS {
        return Err(Error::Config(format!(
            "enumeration cap: l_max ≤ {MAX_L_MAX}, n ≤ {MAX_MIXTURE_QUBITS}"
        )));
    }
    let r = cfg.params.r.unwrap_or(TOY_LOW_CAP);
    let delta = cfg.params.delta.unwrap_or(2.0);
    let eps = cfg.eps_or(if toy { 0.005 } else { 0.1 });
    let gamma = cfg.params.gamma.unwrap_or(0.5);
    let samples = cfg.params.samples.unwrap_or(16);
    let mu = build_universal_mixture(n, l_max).map_err(config_err)?;
    let family = match choice {
        FamilyChoice::Toy => toy_family(cfg.seed),
        FamilyChoice::Haar => haar_family(n, 16, cfg.seed),
        FamilyChoice::Low => low_family(n, r.min(l_max)),
    }
    .map_err(config_err)?;

    let mut rep = Report::new("kolmo", cfg);
    rep.param("family", choice);
    rep.param("n", n);
    rep.param("l_max", l_max);
    rep.param("r", r);
    rep.param("delta", delta);
    rep.param("eps", eps);
    rep.param("gamma", gamma);
    rep.param("samples", samples);
    rep.param("members", family.members.len());
    rep.param("mixture", mu.manifest());

    let rows = complexity_rows(&mu, &family, eps, r.min(l_max), gamma)?;
    let mut buf = Vec::new();
    write_complexity_csv(&rows, &mut buf)?;
    rep.tables.insert("complexity".into(), buf);

    match classify_instance(&family, &mu, Notion::GapH, r as f64, delta, eps, None) {
        Ok(c) => {
            let total = c.fraction_low + c.fraction_high + c.fraction_neither;
            rep.push(Check::close(
                "label fractions sum",
                "kolmogorov.classification",
                total,
                1.0,
                1e-12,
            ));
            rep.push(Check::logged(
                "low fraction",
                "kolmogorov.classification",
                c.fraction_low,
            ));
            rep.push(Check::logged(
                "high fraction",
                "kolmogorov.classification",
                c.fraction_high,
            ));
            rep.push(Check::logged(
                "promise holds",
                "kolmogorov.classification",
                c.promise_holds as u8 as f64,
            ));
            let rows: Vec<Vec<String>> = c
                .members
                .iter()
                .map(|m| {
                    vec![
                        m.key.clone(),
                        format!("{:?}", m.label).to_lowercase(),
                        format!("{:e}", m.low_statistic),
                        format!("{:e}", m.high_statistic),
                        format!("{:e}", m.accept_low),
                    ]
                })
                .collect();
            let header = [
                "key",
                "label",
                "low_statistic",
                "high_statistic",
                "accept_low",
            ];
            rep.tables
                .insert("classification".into(), csv_bytes(&header, &rows)?);
        }
        Err(err) => rep.push(Check::failed("classification", &err)),
    }

    let mode = mode_for(samples, substream_seed(cfg.seed, 3));
    match gaph_decider(
        &family,
        GapHParams {
            r,
            delta,
            eps,
            mode,
        },
    ) {
        Ok((_, g)) => {
            rep.param("ell", g.ell);
            rep.push(Check::logged(
                "extracted average distance to uniform",
                "pipeline.gaph-distance",
                g.distance_to_uniform,
            ));
            match (choice, g.advantage, g.advantage_standard_error) {
                (FamilyChoice::Toy, Some(a), _) => {
                    rep.push(Check::at_least(
                        "extracted average distance vs 1/4",
                        "pipeline.gaph-distance",
                        g.distance_to_uniform,
                        0.25,
                        -1e-12,
                    ));
                    rep.push(Check::at_least(
                        "Helstrom decider advantage",
                        "pipeline.gaph-advantage",
                        a,
                        0.1,
                        0.0,
                    ));
                }
                (FamilyChoice::Haar, Some(a), Some(se)) => {
                    rep.push(Check::at_most(
                        "all-Haar advantage vs 3 SE",
                        "pipeline.gaph-advantage",
                        a,
                        3.0 * se,
                        0.0,
                    ));
                }
                (_, Some(a), _) => rep.push(Check::logged(
                    "Helstrom decider advantage",
                    "pipeline.gaph-advantage",
                    a,
                )),
                (_, None, _) => rep.notes.push("single-sided family: no advantage".into()),
            }
        }
        Err(err) => rep.push(Check::failed("gaph decider", &err)),
    }
    Ok(rep)
}

fn input_state(cfg: &ExperimentConfig, n: usize) -> Result<DensityOperator> {
    let layout = RegisterLayout::single("A", n).map_err(config_err)?;
    let mut rng = substream(cfg.seed, 0);
    match cfg.input.state {
        StateChoice::Random => random_mixed(&layout, &mut rng),
        StateChoice::Mixed => Ok(DensityOperator::maximally_mixed(layout)),
        StateChoice::Pure => Ok(DensityOperator::from_pure(&haar_state_with(
            &layout, &mut rng,
        )?)),
        StateChoice::Planted => planted_min_entropy(n, planted_k(cfg, n)?, &mut rng),
    }
}

fn planted_k(cfg: &ExperimentConfig, n: usize) -> Result<usize> {
    let k = cfg.params.k.unwrap_or(1.0);
    if k < 0.0 || k > n as f64 || k.fract() != 0.0 {
        return Err(Error::Config(format!(
            "planted min-entropy {k} must be an integer in 0..={n}"
        )));
    }
    Ok(k as usize)
}

pub fn run_entropy(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.n_or(2);
    let eps = cfg.eps_or(0.25);
    if n > max_qubits() || eps > 0.5 {
        return Err(Error::Config(
            "entropy needs n within the qubit cap and eps ≤ 1/2".into(),
        ));
    }
    let rho = input_state(cfg, n)?;
    let mut rep = Report::new("entropy", cfg);
    rep.param("n", n);
    rep.param("eps", eps);
    rep.param("state", cfg.input.state);
    let s = metrics::entropy(PlainEntropy::VonNeumann, &rho);
    let hmin = metrics::entropy(PlainEntropy::Min, &rho);
    let hmax = metrics::entropy(PlainEntropy::Max, &rho);
    let lb = metrics::smooth_entropy_bound(SmoothBound::MinLb, &rho, eps)?;
    let ub = metrics::smooth_entropy_bound(SmoothBound::MaxUb, &rho, eps)?;
    rep.push(Check::at_most(
        "H_min vs S",
        "metrics.aep-direction",
        hmin.value,
        s.value,
        1e-9,
    ));
    rep.push(Check::at_most(
        "S vs H_max",
        "metrics.aep-direction",
        s.value,
        hmax.value,
        1e-9,
    ));
    rep.push(Check::at_least(
        "smooth min lower bound vs H_min",
        "metrics.aep-direction",
        lb.value,
        hmin.value,
        1e-9,
    ));
    rep.push(Check::at_most(
        "smooth max upper bound vs H_max",
        "metrics.aep-direction",
        ub.value,
        hmax.value,
        1e-9,
    ));
    let rows: Vec<Vec<String>> = [&s, &hmin, &hmax, &lb, &ub]
        .iter()
        .map(|r| r.csv_row())
        .collect();
    rep.tables.insert(
        "entropy".into(),
        csv_bytes(&["kind", "value", "epsilon", "certificate"], &rows)?,
    );
    Ok(rep)
}

pub fn run_extract(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.n_or(2);
    let eps = cfg.eps_or(0.75);
    let k = planted_k(cfg, n)? as f64;
    let samples = cfg
        .params
        .samples
        .unwrap_or(if n <= MAX_FULL_QUBITS { 0 } else { 2000 });
    if samples == 0 && n > MAX_FULL_QUBITS {
        return Err(Error::Config(format!(
            "full enumeration needs n ≤ {MAX_FULL_QUBITS}; set samples"
        )));
    }
    let rho = input_state(cfg, n)?;
    let params = match cfg.params.ell {
        Some(ell) => params_with_ell(n, ell, k, eps).map_err(config_err)?,
        None => match extractor_params(n, k, eps).map_err(config_err)? {
            ExtractorPlan::Feasible(p) => p,
            ExtractorPlan::Infeasible { bound, .. } => {
                let mut rep = Report::new("extract", cfg);
                rep.push(
                    Check::at_least("feasible output length", "extractor.bound", bound, 1.0, 0.0)
                        .with_detail("no output length meets the error target"),
                );
                return Ok(rep);
            }
        },
    };
    let mut rep = Report::new("extract", cfg);
    rep.param("params", &params);
    rep.param("samples", samples);
    rep.param("state", cfg.input.state);
    let mode = mode_for(samples, substream_seed(cfg.seed, 4));
    let out = match apply_extractor_leading(&rho, &["A"], params.ell, mode) {
        Ok(o) => o,
        Err(err) => {
            rep.push(Check::failed("extractor", &err));
            return Ok(rep);
        }
    };
    let d = decoupling_report(&out);
    if params.feasible {
        let slack = 3.0 * d.standard_error.unwrap_or(0.0);
        rep.push(Check::at_most(
            "decoupling error vs eps",
            "extractor.bound",
            d.error,
            eps + slack,
            1e-12,
        ));
    } else {
        rep.push(Check::logged(
            "decoupling error past the bound",
            "extractor.monotonicity",
            d.error,
        ));
    }
    rep.push(Check::at_most(
        "branch trace deviation",
        "extractor.strongness",
        out.trace_residual(),
        0.0,
        1e-12,
    ));
    if cfg.input.state == StateChoice::Planted {
        let kc = check_k_min(&rho, &["A"], k, 0.0)?;
        rep.push(Check::at_least(
            "certified min-entropy vs assumed k",
            "extractor.bound",
            kc.certified,
            k,
            1e-9,
        ));
    }
    let mut buf = Vec::new();
    write_decoupling_csv(&[DecouplingRow::new(&params, &d, mode)], &mut buf)?;
    rep.tables.insert("decoupling".into(), buf);
    Ok(rep)
}

pub fn run_clifford(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.n_or(2);
    let samples = cfg.params.samples.unwrap_or(if n <= 2 { 0 } else { 2000 });
    if (samples == 0 && n > 2) || n > clifford::element::MAX_DENSE_QUBITS {
        return Err(Error::Config(
            "full enumeration needs n ≤ 2 and dense moments n ≤ 6".into(),
        ));
    }
    let matrices = cfg.verify.design_matrices;
    let mut rep = Report::new("clifford", cfg);
    rep.param("n", n);
    rep.param("samples", samples);
    rep.param("matrices", matrices);
    let d = 1usize << (2 * n);
    let mut rows = Vec::new();
    let mut w = Worst::at_most("second-moment error", "clifford.two-design", 0.0);
    for j in 0..matrices {
        let mut rng = substream(substream_seed(cfg.seed, 5), j as u64);
        let m = CMatrix::from_fn(d, d, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let mode = mode_for(samples, substream_seed(cfg.seed, 6 + j as u64));
        let r = two_design_moment_error(n, &m, mode)?;
        let bound = r.standard_error.map_or(1e-10, |se| 6.0 * se);
        w.push(r.max_abs_error, bound);
        rows.push(vec![
            n.to_string(),
            r.t.to_string(),
            if samples == 0 {
                "full".into()
            } else {
                "monte_carlo".into()
            },
            samples.to_string(),
            format!("{:e}", r.max_abs_error),
            r.standard_error
                .map(|s| format!("{s:e}"))
                .unwrap_or_default(),
        ]);
    }
    rep.push(w.finish());
    let mut closed = true;
    for t in 0..cfg.verify.closure_trials as u64 {
        let a = clifford::sample_clifford(n, substream_seed(cfg.seed, 2 * t + 100))?;
        let b = clifford::sample_clifford(n, substream_seed(cfg.seed, 2 * t + 101))?;
        closed &= a.compose(&b)?.is_valid();
    }
    rep.push(Check::holds(
        "products have valid tableaux",
        "clifford.closure",
        closed,
    ));
    rep.tables.insert(
        "moments".into(),
        csv_bytes(
            &[
                "n",
                "t",
                "mode",
                "samples",
                "max_abs_error",
                "standard_error",
            ],
            &rows,
        )?,
    );
    Ok(rep)
}
