//! Recurrence quantification analysis (RQA) of binary constant-length
//! substitution subshifts.
//!
//! The crate computes recurrence rate, determinism, average line length,
//! entropy of line lengths and correlation sums in two ways:
//!
//! * empirically, from bit-packed prefixes of a fixed point, by scanning the
//!   diagonals of the (never materialised) symbolic recurrence plot;
//! * exactly, from the self-similar densities of the sets `K_l` of starting
//!   points of inner diagonal lines, summed in closed form.
//!
//! The two routes are cross-validated by the test suites and by the
//! `verify-paper` subcommand of the `subrqa` binary.
//!
//! Each capability has a runnable program under `examples/`; start with
//! `cargo run --example quickstart`.

pub mod asymptotics;
pub mod bits;
pub mod cache;
pub mod cli;
pub mod densities;
pub mod error;
pub mod golden;
pub mod rational;
pub mod recognizability;
pub mod recplot;
pub mod report;
pub mod rqa;
pub mod substitution;

pub use bits::BitSequence;
pub use error::{Error, Result};
pub use rational::{ExtRational, Rational};
pub use substitution::{Classification, Letter, Substitution, SubstitutionKind};
