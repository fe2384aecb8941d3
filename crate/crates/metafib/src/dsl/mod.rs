//! The rule language: a small DSL for nested recurrences.
//!
//! A definition has three parts — the rule, the initial conditions, and the
//! threshold after which the rule applies:
//!
//! ```text
//! A(n)=A(n-A(n-1))+A(n-A(n-2)); init ceil(n/2); start 2
//! ```
//!
//! [`parse`] turns the text into a [`RecurrenceSpec`]; [`validate`] checks
//! the semantic invariants and materializes the initial conditions, yielding
//! a [`ValidatedSpec`] ready for compilation.

mod ast;
mod parser;
mod validate;

pub use ast::{IndexExpr, InitPattern, RecurrenceSpec, Sign, Summand};
pub use parser::{parse, ParseError};
pub use validate::{validate, ValidateError, ValidatedSpec, MAX_MATERIALIZED_INIT};
