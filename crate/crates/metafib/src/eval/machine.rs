//! Execution of compiled plans over a growing history.

use std::fmt;

use crate::dsl::Sign;
use crate::eval::history::{ElementWidth, History, PushError};
use crate::eval::plan::{EvalPlan, Instr};
use crate::quad::Quad;

/// Why a single step could not produce a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interruption {
    /// A lookup index fell outside `1..=n-1`. Carries the first offending
    /// argument in evaluation order (summands left to right, arguments
    /// innermost-first).
    Death { offending: i64 },
    /// 64-bit checked arithmetic overflowed while computing an argument.
    Overflow,
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// A lookup argument left `1..=n-1`: the sequence is mortal.
    Died,
    /// Every term up to the cap was computed; the sequence is presumed
    /// alive beyond it.
    CapReached,
    /// The history's memory budget was exhausted.
    BudgetExceeded,
    /// Argument arithmetic or a term value exceeded the configured width.
    Overflow,
}

impl fmt::Display for RunStatus {
    /// The hyphenated forms used in CSV rows and JSON summaries.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Died => "died",
            RunStatus::CapReached => "cap-reached",
            RunStatus::BudgetExceeded => "budget-exceeded",
            RunStatus::Overflow => "overflow",
        })
    }
}

/// Outcome of [`run`]: how it ended and where.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOutcome {
    pub status: RunStatus,
    /// Number of terms actually defined (and stored in the History).
    pub final_length: u64,
    /// For `Died`: the index whose evaluation failed, `final_length + 1`.
    pub died_at: Option<u64>,
    /// For `Died`: the first out-of-range lookup argument.
    pub offending_argument: Option<i64>,
}

/// Limits for one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    /// Stop (status `CapReached`) once this many terms are defined.
    pub cap_n: u64,
    /// Byte budget for term storage.
    pub budget_bytes: usize,
    /// Storage width per term.
    pub width: ElementWidth,
}

impl Default for RunConfig {
    /// 2³¹−1 term cap (the "presumed infinite" threshold for mortality
    /// reports), 32-bit terms, and a 12 GiB budget to match.
    fn default() -> RunConfig {
        RunConfig {
            cap_n: (1 << 31) - 1,
            budget_bytes: 12 << 30,
            width: ElementWidth::W32,
        }
    }
}

fn div_floor(a: i64, b: i64) -> Option<i64> {
    let q = a.checked_div(b)?;
    let r = a % b;
    if r != 0 && ((r < 0) != (b < 0)) {
        q.checked_sub(1)
    } else {
        Some(q)
    }
}

fn div_ceil(a: i64, b: i64) -> Option<i64> {
    let q = a.checked_div(b)?;
    let r = a % b;
    if r != 0 && ((r < 0) == (b < 0)) {
        q.checked_add(1)
    } else {
        Some(q)
    }
}

/// `⌊x·c⌋` or `⌈x·c⌉` in exact arithmetic, refused if the result leaves i64.
fn phi_scale(x: i64, c: &Quad, ceil: bool) -> Option<i64> {
    let product = Quad::int(i128::from(x)).checked_mul(c).ok()?;
    let rounded = if ceil {
        product.ceil().ok()?
    } else {
        product.floor().ok()?
    };
    i64::try_from(rounded).ok()
}

/// Runs one summand's postfix program. The stack must arrive empty.
fn exec(
    code: &[Instr],
    stack: &mut Vec<i64>,
    history: &History,
    n: u64,
) -> Result<i64, Interruption> {
    use Interruption::Overflow;
    debug_assert!(stack.is_empty());
    for instr in code {
        match *instr {
            Instr::PushN => {
                let v = i64::try_from(n).map_err(|_| Overflow)?;
                stack.push(v);
            }
            Instr::PushInt(v) => stack.push(v),
            Instr::Add => {
                let b = stack.pop().expect("plan is stack-balanced");
                let a = stack.last_mut().expect("plan is stack-balanced");
                *a = a.checked_add(b).ok_or(Overflow)?;
            }
            Instr::Sub => {
                let b = stack.pop().expect("plan is stack-balanced");
                let a = stack.last_mut().expect("plan is stack-balanced");
                *a = a.checked_sub(b).ok_or(Overflow)?;
            }
            Instr::Mul => {
                let b = stack.pop().expect("plan is stack-balanced");
                let a = stack.last_mut().expect("plan is stack-balanced");
                *a = a.checked_mul(b).ok_or(Overflow)?;
            }
            Instr::FloorDivInt(k) => {
                let a = stack.last_mut().expect("plan is stack-balanced");
                *a = div_floor(*a, k).ok_or(Overflow)?;
            }
            Instr::CeilDivInt(k) => {
                let a = stack.last_mut().expect("plan is stack-balanced");
                *a = div_ceil(*a, k).ok_or(Overflow)?;
            }
            Instr::PhiFloorMul(c) => {
                let a = stack.last_mut().expect("plan is stack-balanced");
                *a = phi_scale(*a, &c, false).ok_or(Overflow)?;
            }
            Instr::PhiCeilMul(c) => {
                let a = stack.last_mut().expect("plan is stack-balanced");
                *a = phi_scale(*a, &c, true).ok_or(Overflow)?;
            }
            Instr::PhiFloorDiv(c) => {
                let recip = c.checked_recip().map_err(|_| Overflow)?;
                let a = stack.last_mut().expect("plan is stack-balanced");
                *a = phi_scale(*a, &recip, false).ok_or(Overflow)?;
            }
            Instr::PhiCeilDiv(c) => {
                let recip = c.checked_recip().map_err(|_| Overflow)?;
                let a = stack.last_mut().expect("plan is stack-balanced");
                *a = phi_scale(*a, &recip, true).ok_or(Overflow)?;
            }
            Instr::Lookup => {
                let a = stack.last_mut().expect("plan is stack-balanced");
                match history.lookup(*a) {
                    Some(v) => *a = v,
                    None => return Err(Interruption::Death { offending: *a }),
                }
            }
        }
    }
    debug_assert_eq!(stack.len(), 1);
    Ok(stack.pop().expect("plan leaves one value"))
}

fn step_with(
    plan: &EvalPlan,
    history: &History,
    n: u64,
    stack: &mut Vec<i64>,
) -> Result<i64, Interruption> {
    let mut total: i64 = 0;
    for s in plan.summands() {
        stack.clear();
        let v = exec(&plan.instrs()[s.code.clone()], stack, history, n)?;
        total = match s.sign {
            Sign::Plus => total.checked_add(v),
            Sign::Minus => total.checked_sub(v),
        }
        .ok_or(Interruption::Overflow)?;
    }
    Ok(total)
}

/// Evaluates the term at index `n` against a history holding terms
/// `1..=n-1`.
///
/// # Examples
///
/// ```
/// use metafib::dsl::{parse, validate};
/// use metafib::eval::{compile, step, ElementWidth, History};
///
/// // H with k=3: H(4) = H(4−H(2)) + H(4−H(1)) = H(3) + H(3) = 4
/// let spec = validate(&parse(
///     "A(n)=A(n-A(n-2))+A(n-A(n-3)); init ceil(n/2); start 3",
/// ).unwrap()).unwrap();
/// let plan = compile(&spec);
/// let mut history = History::new(ElementWidth::W64, 1 << 16);
/// for &v in spec.init() {
///     history.push(v).unwrap();
/// }
/// assert_eq!(step(&plan, &history, 4), Ok(4));
/// ```
pub fn step(plan: &EvalPlan, history: &History, n: u64) -> Result<i64, Interruption> {
    debug_assert_eq!(history.len(), n - 1, "history must hold terms 1..n-1");
    let mut stack = Vec::with_capacity(plan.max_stack());
    step_with(plan, history, n, &mut stack)
}

/// Appends terms until death, the cap, the budget, or an overflow stops the
/// run. Deterministic: identical inputs produce identical outcomes.
///
/// # Panics
///
/// Panics if `config.cap_n <= plan.start_after()` or if `init` does not hold
/// exactly `start_after` values — [`crate::dsl::validate`] output always
/// does.
pub fn run(plan: &EvalPlan, init: &[i64], config: &RunConfig) -> (History, RunOutcome) {
    assert!(
        config.cap_n > plan.start_after(),
        "cap {} must exceed the rule threshold {}",
        config.cap_n,
        plan.start_after()
    );
    assert_eq!(
        init.len() as u64,
        plan.start_after(),
        "init must define exactly start_after terms"
    );

    let mut history = History::new(config.width, config.budget_bytes);
    let mut stack = Vec::with_capacity(plan.max_stack());

    for &v in init {
        if let Err(e) = history.push(v) {
            return finish_push_error(history, e);
        }
    }

    for n in plan.start_after() + 1..=config.cap_n {
        match step_with(plan, &history, n, &mut stack) {
            Ok(v) => {
                if let Err(e) = history.push(v) {
                    return finish_push_error(history, e);
                }
            }
            Err(Interruption::Death { offending }) => {
                let final_length = history.len();
                debug_assert_eq!(final_length, n - 1);
                let outcome = RunOutcome {
                    status: RunStatus::Died,
                    final_length,
                    died_at: Some(n),
                    offending_argument: Some(offending),
                };
                return (history, outcome);
            }
            Err(Interruption::Overflow) => {
                let outcome = RunOutcome {
                    status: RunStatus::Overflow,
                    final_length: history.len(),
                    died_at: None,
                    offending_argument: None,
                };
                return (history, outcome);
            }
        }
    }

    let outcome = RunOutcome {
        status: RunStatus::CapReached,
        final_length: history.len(),
        died_at: None,
        offending_argument: None,
    };
    (history, outcome)
}

fn finish_push_error(history: History, e: PushError) -> (History, RunOutcome) {
    let status = match e {
        PushError::WidthOverflow { .. } => RunStatus::Overflow,
        PushError::BudgetExceeded { .. } => RunStatus::BudgetExceeded,
    };
    let outcome = RunOutcome {
        status,
        final_length: history.len(),
        died_at: None,
        offending_argument: None,
    };
    (history, outcome)
}
