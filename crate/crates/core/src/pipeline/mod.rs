//! The constructive chain EFI → entropic EFI → pseudo-mixed state →
//! single-copy pseudorandom state, the GapH decision procedure and the
//! universal EFI mixture.

pub mod efi;
pub mod gaph;
pub mod generator;
pub mod oneprs;
pub mod pms;
pub mod universal;

pub use crate::metrics::advantage;
pub use efi::{
    check_weak_efi, entropic_efi, weak_efi_from_pair, EntropicEfi, WeakEfiCheck, WeakEfiTolerances,
};
pub use gaph::{gaph_decider, gaph_ell, GapHDecider, GapHParams, GapHReport, MemberDecision};
pub use generator::{EfiPairSpec, GenOp, GeneratorSpec, PairMeasurements};
pub use oneprs::{
    default_ell, one_prs_from_pms, one_prs_with_ell, LinearBits, MonteCarloAverage, OnePrs, PrsKey,
    StretchLedger,
};
pub use pms::{exact_advice, pms_from_entropic, PmsParams, PmsReport};
pub use universal::{universal_efi_mixture, UniversalEfiMixture};
