//! The evaluation engine: plan compilation, the postfix machine, budgeted
//! term storage, and a reference interpreter the machine is tested against.
//!
//! The lifecycle is [`compile`] → [`run`]:
//!
//! ```
//! use metafib::dsl::{parse, validate};
//! use metafib::eval::{compile, run, ElementWidth, RunConfig, RunStatus};
//!
//! let spec = validate(&parse(
//!     "A(n)=A(n-A(n-2))+A(n-A(n-3)); init ceil(n/2); start 3",
//! ).unwrap()).unwrap();
//! let config = RunConfig {
//!     cap_n: 1_000_000,
//!     budget_bytes: 1 << 20,
//!     width: ElementWidth::W64,
//! };
//! let (history, outcome) = run(&compile(&spec), spec.init(), &config);
//! // this rule's sequence is mortal: 53 terms, then a fatal argument
//! assert_eq!(outcome.status, RunStatus::Died);
//! assert_eq!(outcome.final_length, 53);
//! assert_eq!(history.len(), 53);
//! ```

mod history;
mod machine;
pub(crate) mod plan;
mod reference;

pub use history::{ElementWidth, History, PushError};
pub use machine::{run, step, Interruption, RunConfig, RunOutcome, RunStatus};
pub use plan::{compile, EvalPlan, Instr, LowerError, PlannedSummand};
pub use reference::{run_reference, RefEvaluator};
