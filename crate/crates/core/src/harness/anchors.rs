//! Registry of anchor tags. Every check names the invariant or operation it
//! exercises by one of these tags, or by [`PLUMBING`] when it only guards
//! the harness itself.

pub const PLUMBING: &str = "plumbing";

/// Modules an anchor may belong to.
pub const MODULES: [&str; 6] = [
    "qstate",
    "metrics",
    "clifford",
    "extractor",
    "pipeline",
    "kolmogorov",
];

/// `(tag, statement)`.
pub const ANCHORS: &[(&str, &str)] = &[
    (
        "qstate.partial-trace-positivity",
        "partial trace is trace preserving and completely positive",
    ),
    (
        "qstate.purify-round-trip",
        "tracing out the purifier returns the input",
    ),
    (
        "qstate.tensor-trace",
        "tracing out a tensor factor returns the other factor",
    ),
    (
        "qstate.unitary-spectrum",
        "unitary conjugation preserves the spectrum",
    ),
    (
        "metrics.fuchs-van-de-graaf",
        "trace distance at least one minus fidelity",
    ),
    (
        "metrics.purified-dominates-trace",
        "purified distance at least trace distance",
    ),
    (
        "metrics.joint-convexity",
        "trace distance of mixtures at most the largest component distance",
    ),
    (
        "metrics.orthogonal-entropy-addition",
        "entropy of an even mixture of almost orthogonal states",
    ),
    (
        "metrics.aep-direction",
        "per-copy smooth entropies approach the von Neumann entropy",
    ),
    (
        "metrics.helstrom-optimality",
        "Helstrom advantage equals trace distance",
    ),
    (
        "clifford.two-design",
        "Clifford average reproduces the Haar second moment",
    ),
    (
        "clifford.closure",
        "products of Clifford elements are valid elements",
    ),
    (
        "clifford.homomorphism",
        "dense conversion respects composition up to phase",
    ),
    (
        "extractor.bound",
        "decoupling error at most eps for feasible parameters",
    ),
    (
        "extractor.strongness",
        "index register of the aggregate is uniform",
    ),
    (
        "extractor.monotonicity",
        "error does not drop when the output grows past the bound",
    ),
    (
        "extractor.monte-carlo-consistency",
        "sampled aggregate agrees with enumeration within three standard errors",
    ),
    (
        "pipeline.entropic-gap",
        "entropic EFI gap and block-diagonal entropy formula",
    ),
    (
        "pipeline.hybrid",
        "hybrid advantages obey the triangle inequality",
    ),
    (
        "pipeline.pms-margin",
        "pseudo-mixed state entropy below its output width",
    ),
    (
        "pipeline.pms-decoupling",
        "tau1 branch close to maximally mixed",
    ),
    (
        "pipeline.stretch",
        "stretch ledger with exact log|L| cancellation",
    ),
    ("pipeline.one-time-pad", "one-time-pad averaging identity"),
    (
        "pipeline.gaph-distance",
        "extracted average far from uniform on the toy family",
    ),
    (
        "pipeline.gaph-advantage",
        "Helstrom decider advantage on the planted halves",
    ),
    (
        "pipeline.universal-mixture",
        "rank and distance bounds of the universal EFI mixture",
    ),
    (
        "kolmogorov.umin-knet",
        "U_min at most Knet on enumerated states",
    ),
    (
        "kolmogorov.hbar-smooth-knet",
        "smoothed Gacs complexity at most Knet plus log(1/eps)",
    ),
    (
        "kolmogorov.smoothing-duality",
        "dualities between smoothed and plain measures",
    ),
    (
        "kolmogorov.sherman-morrison",
        "U_min bounded by the planted weight",
    ),
    (
        "kolmogorov.smoothing-solver",
        "KKT bisection agrees with a random-search oracle",
    ),
    (
        "kolmogorov.span-rank",
        "span of short programs has rank at most 2^(r+1)",
    ),
    (
        "kolmogorov.robust-span-stability",
        "robust span ignores exponentially small perturbations",
    ),
    (
        "kolmogorov.low-complexity-span",
        "low-complexity members overlap the robust span",
    ),
    (
        "kolmogorov.high-complexity-span",
        "high-complexity states avoid the robust span",
    ),
    (
        "kolmogorov.classification",
        "promise fractions and labels of a gap instance",
    ),
];

pub fn is_registered(tag: &str) -> bool {
    tag == PLUMBING || ANCHORS.iter().any(|(t, _)| *t == tag)
}

pub fn statement(tag: &str) -> Option<&'static str> {
    ANCHORS.iter().find(|(t, _)| *t == tag).map(|(_, s)| *s)
}
