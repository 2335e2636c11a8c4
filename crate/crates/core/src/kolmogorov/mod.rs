//! Resource-bounded stand-ins for quantum Kolmogorov complexity: a
//! prefix-free circuit codec, the truncated universal mixture over its
//! outputs, and the measures, spans and gap classifications built on it.

pub mod classify;
pub mod codec;
pub mod measures;
pub mod mixture;
pub mod span;
pub mod table;

pub use classify::{classify_instance, GapInstanceReport, Label, MemberLabel, Notion};
pub use codec::{
    canonical_empty_code, decode_program, elias_gamma, encode, enumerate_programs, DecodeFailure,
    DecodeOutcome, Gate, Program, ProgramCode,
};
pub use measures::{
    hbar, hbar_smooth, knet, minimize_diagonal, umin, umin_smooth, Knet, SmoothCase, SmoothResult,
};
pub use mixture::{
    build_universal_mixture, build_universal_mixture_with_tail, default_tail, MixtureManifest,
    ProgramEntry, UniversalMixture,
};
pub use span::{robust_span_projector, span_projector, SpanKind, SpanProjector};
pub use table::{complexity_rows, write_complexity_csv, ComplexityRow};
