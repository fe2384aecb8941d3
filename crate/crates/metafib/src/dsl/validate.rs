//! Semantic checks that turn a parsed [`RecurrenceSpec`] into a
//! [`ValidatedSpec`] with fully materialized initial conditions.

use std::fmt;

use super::ast::{IndexExpr, InitPattern, RecurrenceSpec, Summand};
use crate::eval::plan::lower_argument;
use crate::eval::LowerError;
use crate::quad::{Quad, QuadError, PHI};

/// Largest threshold whose initial conditions we are willing to materialize
/// into memory (the list costs 8 bytes per entry).
pub const MAX_MATERIALIZED_INIT: u64 = 1 << 24;

/// One validation diagnostic. [`validate`] reports every problem it finds,
/// not just the first.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidateError {
    #[error("rule has no summands")]
    EmptyRhs,
    #[error("threshold must be positive")]
    ZeroThreshold,
    #[error("threshold {threshold} exceeds the materialization limit {limit}")]
    ThresholdTooLarge { threshold: u64, limit: u64 },
    #[error("threshold {threshold} is smaller than literal offset n-{offset}")]
    ThresholdTooSmall { threshold: u64, offset: u64 },
    #[error("phi outside floor/ceil in {context}")]
    UnroundedPhi { context: String },
    #[error("self-call in initial-condition expression")]
    CallInInit,
    #[error("init list has {found} value(s) but threshold is {threshold}")]
    InitLengthMismatch { found: usize, threshold: u64 },
    #[error("init value at n={n} is not positive (got {value})")]
    NonPositiveInit { n: u64, value: i128 },
    #[error("init expression does not evaluate to an integer at n={n}")]
    NonIntegerInit { n: u64 },
    #[error("init value at n={n} does not fit in 64 bits")]
    InitOutOfRange { n: u64 },
    #[error("init evaluation failed at n={n}: {source}")]
    InitArithmetic { n: u64, source: QuadError },
    #[error("{context} cannot be compiled: {source}")]
    NotCompilable { context: String, source: LowerError },
}

/// A recurrence that passed every semantic check.
///
/// The sequence name is normalized to `A`; initial conditions are an explicit
/// list of positive values for indices `1..=start_after`. Instances can only
/// be produced by [`validate`], so holding one is proof the invariants hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedSpec {
    summands: Vec<Summand>,
    init: Vec<i64>,
    start_after: u64,
}

impl ValidatedSpec {
    /// Right-hand-side summands in source order; never empty.
    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    /// Materialized initial conditions for indices `1..=start_after`.
    pub fn init(&self) -> &[i64] {
        &self.init
    }

    /// The recurrence applies for `n > start_after`.
    pub fn start_after(&self) -> u64 {
        self.start_after
    }

    /// Rebuilds an equivalent parse-level spec (init as an explicit list).
    pub fn to_spec(&self) -> RecurrenceSpec {
        RecurrenceSpec {
            name: "A".into(),
            summands: self.summands.clone(),
            init: InitPattern::List(self.init.iter().map(|&v| v as u64).collect()),
            start_after: self.start_after,
        }
    }

    /// Canonical single-line rendering; parsing it back and validating yields
    /// a structurally identical spec.
    pub fn pretty(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ValidatedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_spec().fmt(f)
    }
}

/// Evaluation of a call-free expression at a fixed integer `n`.
fn eval_at(expr: &IndexExpr, n: i128) -> Result<Quad, EvalAtError> {
    Ok(match expr {
        IndexExpr::N => Quad::int(n),
        IndexExpr::Int(v) => Quad::int(*v as i128),
        IndexExpr::Phi => PHI,
        IndexExpr::Add(a, b) => eval_at(a, n)?.checked_add(&eval_at(b, n)?)?,
        IndexExpr::Sub(a, b) => eval_at(a, n)?.checked_sub(&eval_at(b, n)?)?,
        IndexExpr::Mul(a, b) => eval_at(a, n)?.checked_mul(&eval_at(b, n)?)?,
        IndexExpr::FloorDiv(a, b) => {
            let q = eval_at(a, n)?.checked_div(&eval_at(b, n)?)?;
            Quad::int(q.floor()?)
        }
        IndexExpr::CeilDiv(a, b) => {
            let q = eval_at(a, n)?.checked_div(&eval_at(b, n)?)?;
            Quad::int(q.ceil()?)
        }
        IndexExpr::Floor(a) => Quad::int(eval_at(a, n)?.floor()?),
        IndexExpr::Ceil(a) => Quad::int(eval_at(a, n)?.ceil()?),
        IndexExpr::Call(_) => return Err(EvalAtError::Call),
    })
}

enum EvalAtError {
    Arithmetic(QuadError),
    Call,
}

impl From<QuadError> for EvalAtError {
    fn from(e: QuadError) -> Self {
        EvalAtError::Arithmetic(e)
    }
}

/// Flags any φ node that is not enclosed by a floor/ceil within its own
/// evaluation unit. A self-call starts a fresh unit: its argument is an index
/// into integer history, so an enclosing floor outside the call cannot make
/// the argument integral.
fn check_phi_placement(
    expr: &IndexExpr,
    rounded: bool,
    context: &str,
    errors: &mut Vec<ValidateError>,
) {
    match expr {
        IndexExpr::Phi if !rounded => errors.push(ValidateError::UnroundedPhi {
            context: context.to_string(),
        }),
        IndexExpr::Phi | IndexExpr::N | IndexExpr::Int(_) => {}
        IndexExpr::Add(a, b) | IndexExpr::Sub(a, b) | IndexExpr::Mul(a, b) => {
            check_phi_placement(a, rounded, context, errors);
            check_phi_placement(b, rounded, context, errors);
        }
        IndexExpr::FloorDiv(a, b) | IndexExpr::CeilDiv(a, b) => {
            check_phi_placement(a, true, context, errors);
            check_phi_placement(b, true, context, errors);
        }
        IndexExpr::Floor(a) | IndexExpr::Ceil(a) => check_phi_placement(a, true, context, errors),
        IndexExpr::Call(a) => check_phi_placement(a, false, context, errors),
    }
}

/// Largest `c` over call arguments of the exact form `n - c`, covering both
/// the summand's own argument and nested self-calls.
fn max_literal_offset(summands: &[Summand]) -> u64 {
    fn offset_of(arg: &IndexExpr) -> u64 {
        if let IndexExpr::Sub(a, b) = arg {
            if let (IndexExpr::N, IndexExpr::Int(c)) = (&**a, &**b) {
                return *c;
            }
        }
        0
    }
    let mut max = 0;
    for s in summands {
        max = max.max(offset_of(&s.argument));
        s.argument.walk(&mut |e| {
            if let IndexExpr::Call(a) = e {
                max = max.max(offset_of(a));
            }
        });
    }
    max
}

/// Checks every invariant of `spec` and materializes its initial conditions.
///
/// On failure, returns the complete list of diagnostics.
///
/// # Examples
///
/// ```
/// use metafib::dsl::{parse, validate};
///
/// let spec = parse("A(n)=A(n-A(n-2))+A(n-A(n-3)); init ceil(n/2); start 3").unwrap();
/// let valid = validate(&spec).unwrap();
/// assert_eq!(valid.init(), [1, 1, 2]);
/// ```
pub fn validate(spec: &RecurrenceSpec) -> Result<ValidatedSpec, Vec<ValidateError>> {
    let mut errors = Vec::new();

    if spec.summands.is_empty() {
        errors.push(ValidateError::EmptyRhs);
    }
    if spec.start_after == 0 {
        errors.push(ValidateError::ZeroThreshold);
    }
    if spec.start_after > MAX_MATERIALIZED_INIT {
        errors.push(ValidateError::ThresholdTooLarge {
            threshold: spec.start_after,
            limit: MAX_MATERIALIZED_INIT,
        });
    }

    let offset = max_literal_offset(&spec.summands);
    if offset > spec.start_after {
        errors.push(ValidateError::ThresholdTooSmall {
            threshold: spec.start_after,
            offset,
        });
    }

    for s in &spec.summands {
        let context = format!("argument '{}'", s.argument);
        check_phi_placement(&s.argument, false, &context, &mut errors);
        if let Err(source) = lower_argument(&s.argument) {
            errors.push(ValidateError::NotCompilable { context, source });
        }
    }

    let init = match &spec.init {
        InitPattern::List(values) => {
            if values.len() as u64 != spec.start_after {
                errors.push(ValidateError::InitLengthMismatch {
                    found: values.len(),
                    threshold: spec.start_after,
                });
            }
            let mut init = Vec::with_capacity(values.len());
            for (i, &v) in values.iter().enumerate() {
                let n = i as u64 + 1;
                if v == 0 {
                    errors.push(ValidateError::NonPositiveInit { n, value: 0 });
                } else if v > i64::MAX as u64 {
                    errors.push(ValidateError::InitOutOfRange { n });
                } else {
                    init.push(v as i64);
                }
            }
            init
        }
        InitPattern::ClosedForm(expr) => {
            let mut init_errors = Vec::new();
            if expr.contains_call() {
                init_errors.push(ValidateError::CallInInit);
            }
            check_phi_placement(expr, false, "the init expression", &mut init_errors);
            let mut init = Vec::new();
            if init_errors.is_empty() && spec.start_after <= MAX_MATERIALIZED_INIT {
                init.reserve(spec.start_after as usize);
                for n in 1..=spec.start_after {
                    match eval_at(expr, n as i128) {
                        Ok(value) => match value.as_integer() {
                            Some(v) if v >= 1 && v <= i64::MAX as i128 => init.push(v as i64),
                            Some(v) if v < 1 => {
                                init_errors.push(ValidateError::NonPositiveInit { n, value: v })
                            }
                            Some(_) => init_errors.push(ValidateError::InitOutOfRange { n }),
                            None => init_errors.push(ValidateError::NonIntegerInit { n }),
                        },
                        Err(EvalAtError::Call) => {
                            init_errors.push(ValidateError::CallInInit);
                            break;
                        }
                        Err(EvalAtError::Arithmetic(source)) => {
                            init_errors.push(ValidateError::InitArithmetic { n, source })
                        }
                    }
                }
            }
            errors.extend(init_errors);
            init
        }
    };

    if errors.is_empty() {
        Ok(ValidatedSpec {
            summands: spec.summands.clone(),
            init,
            start_after: spec.start_after,
        })
    } else {
        Err(errors)
    }
}
