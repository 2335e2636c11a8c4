//! Distances, entropies, smoothing bounds and optimal distinguishers.

pub mod conditional;
pub mod distance;
pub mod distinguish;
pub mod entropy;

pub use conditional::conditional_min_entropy;
pub use distance::{
    fidelity, pure_trace_distance, purified_distance, state_distance, trace_distance, DistanceKind,
};
pub use distinguish::{
    advantage, almost_orthogonal_witness, helstrom, relative_min_entropy, DistinguisherProjector,
    Divergence, OrthogonalityWitness,
};
pub use entropy::{
    entropy, smooth_entropy_bound, von_neumann, Certificate, EntropyKind, EntropyReport,
    PlainEntropy, SmoothBound,
};
