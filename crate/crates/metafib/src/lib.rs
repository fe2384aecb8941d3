//! A laboratory for nested recurrences.
//!
//! Sequences like Hofstadter's Q,
//!
//! ```text
//! Q(n) = Q(n - Q(n-1)) + Q(n - Q(n-2)),    Q(1) = Q(2) = 1,
//! ```
//!
//! feed their own earlier terms back into their argument positions. That
//! self-reference makes them wildly irregular, and it gives them a failure
//! mode ordinary recurrences don't have: an argument can step outside the
//! portion of the sequence defined so far, at which point the sequence
//! simply stops existing. This crate is a toolkit for experimenting with
//! such rules:
//!
//! - [`dsl`] — a small text format for recurrence rules, with parsing,
//!   pretty-printing, and semantic validation.
//! - [`eval`] — a compiler from validated rules to a stack-machine plan,
//!   plus a fast engine that runs plans over a growing term history, and a
//!   slow memoized reference evaluator to cross-check it.
//! - [`families`] — ready-made parameterized rule families (`q`, `hk:k`,
//!   `conway:i`, ...) with their thresholds and initial segments computed
//!   exactly.
//! - [`mortality`] — "how long until the rule dies": single measurements
//!   and parallel sweeps over a parameter range.
//! - [`genstats`] — deviation statistics S(n) = H(n) − n/2 over doubling
//!   generations, and the growth exponent α(t).
//! - [`csvio`] / [`plot`] — deterministic CSV tables and SVG scatterplots.
//!
//! # Quick start
//!
//! Run a rule from text until it dies, then ask where and how:
//!
//! ```
//! use metafib::dsl::{parse, validate};
//! use metafib::eval::{compile, run, RunConfig, RunStatus};
//!
//! let spec = validate(&parse(
//!     "A(n) = A(n - A(n-2)) + A(n - A(n-3)); init ceil(n/2); start 3",
//! ).unwrap()).unwrap();
//!
//! let (history, outcome) = run(&compile(&spec), spec.init(), &RunConfig::default());
//! assert_eq!(outcome.status, RunStatus::Died);
//! assert_eq!(history.len(), 53);       // the 54th term is never defined
//! assert_eq!(history.term(4), Some(4));
//! ```
//!
//! Presets do the same without writing rule text:
//!
//! ```
//! use metafib::families::Family;
//! use metafib::mortality::length_of;
//! use metafib::eval::RunConfig;
//!
//! let family: Family = "hk:6".parse().unwrap();
//! assert_eq!(family, Family::Hk { k: 6 });
//! let record = length_of(6, &RunConfig::default(), false).unwrap();
//! assert_eq!(record.l, Some(24));
//! ```
//!
//! # Exactness
//!
//! Anything that decides *which* integer a rule produces is computed
//! exactly: rule arithmetic runs in checked 64-bit integers, golden-ratio
//! coefficients live in ℚ(√5) (see [`quad`]), and statistical moments are
//! accumulated as 128-bit integer sums with floating point entering only at
//! the final division. Wherever the engine cannot represent a value, it
//! says so (overflow, budget) instead of silently wrapping.

pub mod csvio;
pub mod dsl;
pub mod eval;
pub mod families;
pub mod genstats;
pub mod mortality;
pub mod plot;
pub mod quad;
