//! Compilation of validated rules into postfix programs.
//!
//! Each summand's argument lowers to a flat instruction sequence followed by
//! a `Lookup`; running one summand's program leaves exactly one value on the
//! stack. Constant subexpressions fold at compile time in exact ℚ(√5)
//! arithmetic, so a φ-bearing form like `⌊(n+2)/(1+φ)⌋` becomes a single
//! division instruction with an exact coefficient.

use std::ops::Range;

use crate::dsl::{IndexExpr, Sign, ValidatedSpec};
use crate::quad::{Quad, QuadError, PHI};

/// One postfix instruction. Runtime values are checked 64-bit integers; the
/// φ-coefficient instructions carry exact constants and round their result
/// back to an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instr {
    /// Push the index `n` being evaluated.
    PushN,
    /// Push a constant.
    PushInt(i64),
    /// Pop `b`, pop `a`, push `a+b`.
    Add,
    /// Pop `b`, pop `a`, push `a-b`.
    Sub,
    /// Pop `b`, pop `a`, push `a*b`.
    Mul,
    /// Pop `x`, push `⌊x/k⌋`; `k` is a nonzero constant.
    FloorDivInt(i64),
    /// Pop `x`, push `⌈x/k⌉`; `k` is a nonzero constant.
    CeilDivInt(i64),
    /// Pop `x`, push `⌊x·c⌋`, exactly.
    PhiFloorMul(Quad),
    /// Pop `x`, push `⌈x·c⌉`, exactly.
    PhiCeilMul(Quad),
    /// Pop `x`, push `⌊x/c⌋`, exactly; `c` is nonzero.
    PhiFloorDiv(Quad),
    /// Pop `x`, push `⌈x/c⌉`, exactly; `c` is nonzero.
    PhiCeilDiv(Quad),
    /// Pop an index `a`, push `History[a]`; death if `a ∉ 1..=n-1`.
    Lookup,
}

impl Instr {
    /// (values popped, values pushed).
    fn stack_effect(self) -> (usize, usize) {
        match self {
            Instr::PushN | Instr::PushInt(_) => (0, 1),
            Instr::Add | Instr::Sub | Instr::Mul => (2, 1),
            Instr::FloorDivInt(_)
            | Instr::CeilDivInt(_)
            | Instr::PhiFloorMul(_)
            | Instr::PhiCeilMul(_)
            | Instr::PhiFloorDiv(_)
            | Instr::PhiCeilDiv(_)
            | Instr::Lookup => (1, 1),
        }
    }
}

/// One compiled summand: a half-open range into the plan's instruction list
/// plus the sign it contributes to the total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedSummand {
    pub sign: Sign,
    pub code: Range<usize>,
}

/// Executable form of a validated rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPlan {
    instrs: Vec<Instr>,
    summands: Vec<PlannedSummand>,
    start_after: u64,
    max_stack: usize,
}

impl EvalPlan {
    pub fn instrs(&self) -> &[Instr] {
        &self.instrs
    }

    pub fn summands(&self) -> &[PlannedSummand] {
        &self.summands
    }

    /// The recurrence applies for `n > start_after`.
    pub fn start_after(&self) -> u64 {
        self.start_after
    }

    /// Deepest stack any single summand's program reaches.
    pub fn max_stack(&self) -> usize {
        self.max_stack
    }
}

/// Why an argument expression cannot be lowered to the instruction set.
/// Validation surfaces these, so [`compile`] itself cannot fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum LowerError {
    #[error("floor/ceil divisor must be a nonzero constant")]
    NonConstDivisor,
    #[error("division by a zero constant")]
    DivisionByZero,
    #[error("phi-scaled subexpression is not immediately rounded by floor/ceil")]
    UnsupportedPhi,
    #[error("constant does not fit in 64 bits")]
    ConstOverflow,
}

impl From<QuadError> for LowerError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::Overflow => LowerError::ConstOverflow,
            QuadError::DivisionByZero => LowerError::DivisionByZero,
        }
    }
}

/// Partially lowered expression. `Scaled` defers a pending multiplication by
/// an exact non-integer constant; only an enclosing floor/ceil can discharge
/// it back to an integer.
enum Lowered {
    /// Known at compile time; no code emitted yet.
    Const(Quad),
    /// Code computing an integer runtime value.
    Int(Vec<Instr>),
    /// Code computing an integer `x`; the value is `x·coeff`.
    Scaled { code: Vec<Instr>, coeff: Quad },
}

fn materialize_int(v: Lowered) -> Result<Vec<Instr>, LowerError> {
    match v {
        Lowered::Int(code) => Ok(code),
        Lowered::Const(q) => {
            let i = q.as_integer().ok_or(LowerError::UnsupportedPhi)?;
            let i = i64::try_from(i).map_err(|_| LowerError::ConstOverflow)?;
            Ok(vec![Instr::PushInt(i)])
        }
        Lowered::Scaled { .. } => Err(LowerError::UnsupportedPhi),
    }
}

/// Applies `x·c` to an already-lowered `x`.
fn scale(v: Lowered, c: Quad) -> Result<Lowered, LowerError> {
    match v {
        Lowered::Const(q) => Ok(Lowered::Const(q.checked_mul(&c)?)),
        Lowered::Int(code) => match c.as_integer() {
            Some(k) => {
                let k = i64::try_from(k).map_err(|_| LowerError::ConstOverflow)?;
                let mut code = code;
                code.push(Instr::PushInt(k));
                code.push(Instr::Mul);
                Ok(Lowered::Int(code))
            }
            None => Ok(Lowered::Scaled { code, coeff: c }),
        },
        Lowered::Scaled { code, coeff } => {
            let coeff = coeff.checked_mul(&c)?;
            match coeff.as_integer() {
                // the φ parts cancelled; fold the product back to integer code
                Some(k) => {
                    let k = i64::try_from(k).map_err(|_| LowerError::ConstOverflow)?;
                    let mut code = code;
                    code.push(Instr::PushInt(k));
                    code.push(Instr::Mul);
                    Ok(Lowered::Int(code))
                }
                None => Ok(Lowered::Scaled { code, coeff }),
            }
        }
    }
}

/// Lowers `a op b` for `op ∈ {+,-,*}` where at least one side is runtime.
fn combine(op: Instr, a: Lowered, b: Lowered) -> Result<Lowered, LowerError> {
    let mut code = materialize_int(a)?;
    code.extend(materialize_int(b)?);
    code.push(op);
    Ok(Lowered::Int(code))
}

/// Lowers a floor/ceil node. `divisor` is `None` for the unary forms.
fn lower_rounding(
    ceil: bool,
    operand: &IndexExpr,
    divisor: Option<&IndexExpr>,
) -> Result<Lowered, LowerError> {
    let c = match divisor {
        Some(d) => match lower(d)? {
            Lowered::Const(c) if c.is_zero() => return Err(LowerError::DivisionByZero),
            Lowered::Const(c) => Some(c),
            _ => return Err(LowerError::NonConstDivisor),
        },
        None => None,
    };
    match lower(operand)? {
        Lowered::Const(q) => {
            let q = match c {
                Some(c) => q.checked_div(&c)?,
                None => q,
            };
            let r = if ceil { q.ceil()? } else { q.floor()? };
            Ok(Lowered::Const(Quad::int(r)))
        }
        Lowered::Int(mut code) => {
            match c {
                // rounding an integer is the identity
                None => {}
                Some(c) => match c.as_integer() {
                    Some(k) => {
                        let k = i64::try_from(k).map_err(|_| LowerError::ConstOverflow)?;
                        code.push(if ceil {
                            Instr::CeilDivInt(k)
                        } else {
                            Instr::FloorDivInt(k)
                        });
                    }
                    None => code.push(if ceil {
                        Instr::PhiCeilDiv(c)
                    } else {
                        Instr::PhiFloorDiv(c)
                    }),
                },
            }
            Ok(Lowered::Int(code))
        }
        Lowered::Scaled { mut code, coeff } => {
            // ⌊x·s/c⌋ = ⌊x·(s/c)⌋: fold the divisor into the coefficient
            let coeff = match c {
                Some(c) => coeff.checked_div(&c)?,
                None => coeff,
            };
            code.push(if ceil {
                Instr::PhiCeilMul(coeff)
            } else {
                Instr::PhiFloorMul(coeff)
            });
            Ok(Lowered::Int(code))
        }
    }
}

fn lower(expr: &IndexExpr) -> Result<Lowered, LowerError> {
    match expr {
        IndexExpr::N => Ok(Lowered::Int(vec![Instr::PushN])),
        IndexExpr::Int(v) => Ok(Lowered::Const(Quad::int(*v as i128))),
        IndexExpr::Phi => Ok(Lowered::Const(PHI)),
        IndexExpr::Add(a, b) => match (lower(a)?, lower(b)?) {
            (Lowered::Const(x), Lowered::Const(y)) => Ok(Lowered::Const(x.checked_add(&y)?)),
            (a, b) => combine(Instr::Add, a, b),
        },
        IndexExpr::Sub(a, b) => match (lower(a)?, lower(b)?) {
            (Lowered::Const(x), Lowered::Const(y)) => Ok(Lowered::Const(x.checked_sub(&y)?)),
            (a, b) => combine(Instr::Sub, a, b),
        },
        IndexExpr::Mul(a, b) => match (lower(a)?, lower(b)?) {
            (Lowered::Const(x), Lowered::Const(y)) => Ok(Lowered::Const(x.checked_mul(&y)?)),
            (Lowered::Const(c), v) | (v, Lowered::Const(c)) => scale(v, c),
            (a, b) => combine(Instr::Mul, a, b),
        },
        IndexExpr::FloorDiv(a, b) => lower_rounding(false, a, Some(b)),
        IndexExpr::CeilDiv(a, b) => lower_rounding(true, a, Some(b)),
        IndexExpr::Floor(a) => lower_rounding(false, a, None),
        IndexExpr::Ceil(a) => lower_rounding(true, a, None),
        IndexExpr::Call(a) => {
            let mut code = materialize_int(lower(a)?)?;
            code.push(Instr::Lookup);
            Ok(Lowered::Int(code))
        }
    }
}

/// Lowers one summand argument to instructions computing the index to look
/// up. Exposed to validation so every [`ValidatedSpec`] is guaranteed
/// compilable.
pub(crate) fn lower_argument(expr: &IndexExpr) -> Result<Vec<Instr>, LowerError> {
    materialize_int(lower(expr)?)
}

/// Compiles a validated rule. Cannot fail: validation already checked that
/// every summand argument lowers.
///
/// # Examples
///
/// ```
/// use metafib::dsl::{parse, validate};
/// use metafib::eval::compile;
///
/// let spec = validate(&parse(
///     "A(n)=A(n-A(n-1))+A(n-A(n-2)); init ceil(n/2); start 2",
/// ).unwrap()).unwrap();
/// let plan = compile(&spec);
/// assert_eq!(plan.summands().len(), 2);
/// ```
pub fn compile(spec: &ValidatedSpec) -> EvalPlan {
    let mut instrs = Vec::new();
    let mut summands = Vec::with_capacity(spec.summands().len());
    for s in spec.summands() {
        let start = instrs.len();
        let code = lower_argument(&s.argument)
            .expect("validation guarantees every summand argument lowers");
        instrs.extend(code);
        instrs.push(Instr::Lookup);
        summands.push(PlannedSummand {
            sign: s.sign,
            code: start..instrs.len(),
        });
    }

    let mut max_stack = 0usize;
    for s in &summands {
        let mut depth = 0usize;
        for instr in &instrs[s.code.clone()] {
            let (pops, pushes) = instr.stack_effect();
            debug_assert!(depth >= pops, "stack-balanced by construction");
            depth = depth - pops + pushes;
            max_stack = max_stack.max(depth);
        }
        debug_assert_eq!(depth, 1, "one value per summand");
    }

    EvalPlan {
        instrs,
        summands,
        start_after: spec.start_after(),
        max_stack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse, validate};

    fn plan_for(src: &str) -> EvalPlan {
        compile(&validate(&parse(src).unwrap()).unwrap())
    }

    #[test]
    fn nested_value_argument_compiles_to_expected_program() {
        use Instr::*;
        let plan = plan_for("A(n)=A(n-A(n-1))+A(n-A(n-2)); init ceil(n/2); start 2");
        let expected_first = [PushN, PushN, PushInt(1), Sub, Lookup, Sub, Lookup];
        let expected_second = [PushN, PushN, PushInt(2), Sub, Lookup, Sub, Lookup];
        assert_eq!(
            &plan.instrs()[plan.summands()[0].code.clone()],
            expected_first
        );
        assert_eq!(
            &plan.instrs()[plan.summands()[1].code.clone()],
            expected_second
        );
        assert_eq!(plan.max_stack(), 3);
    }

    #[test]
    fn value_nested_call_compiles_to_double_lookup() {
        use Instr::*;
        let plan = plan_for("A(n)=A(A(n-1))+A(n-A(n-1)); init ceil(n/2); start 4");
        assert_eq!(
            &plan.instrs()[plan.summands()[0].code.clone()],
            [PushN, PushInt(1), Sub, Lookup, Lookup]
        );
        // the second summand ends with lookup, sub, lookup
        let second = &plan.instrs()[plan.summands()[1].code.clone()];
        assert_eq!(&second[second.len() - 3..], [Lookup, Sub, Lookup]);
    }

    #[test]
    fn integer_divisor_folds_to_div_const() {
        use Instr::*;
        let plan = plan_for("A(n)=A(ceil(n/2))+A(floor((n-1)/3)); init list 1; start 1");
        assert_eq!(
            &plan.instrs()[plan.summands()[0].code.clone()],
            [PushN, CeilDivInt(2), Lookup]
        );
        assert_eq!(
            &plan.instrs()[plan.summands()[1].code.clone()],
            [PushN, PushInt(1), Sub, FloorDivInt(3), Lookup]
        );
    }

    #[test]
    fn phi_divisor_folds_to_exact_coefficient() {
        use Instr::*;
        let plan = plan_for("A(n)=A(floor((n+2)/(1+phi))); init list 1; start 1");
        let one_plus_phi = Quad::new(3, 1, 2).unwrap();
        assert_eq!(
            &plan.instrs()[plan.summands()[0].code.clone()],
            [PushN, PushInt(2), Add, PhiFloorDiv(one_plus_phi), Lookup]
        );
    }

    #[test]
    fn phi_scale_compiles_to_floor_mul() {
        use Instr::*;
        let plan = plan_for("A(n)=A(floor(A(n-1)*phi)); init list 1; start 1");
        assert_eq!(
            &plan.instrs()[plan.summands()[0].code.clone()],
            [PushN, PushInt(1), Sub, Lookup, PhiFloorMul(PHI), Lookup]
        );
    }

    #[test]
    fn constant_arguments_fold_completely() {
        use Instr::*;
        let plan = plan_for("A(n)=A(2*3+floor(7/2)); init list 1,2,3,4,5,6,7,8,9; start 9");
        assert_eq!(
            &plan.instrs()[plan.summands()[0].code.clone()],
            [PushInt(9), Lookup]
        );
    }

    #[test]
    fn rounding_an_integer_expression_is_identity() {
        use Instr::*;
        let plan = plan_for("A(n)=A(floor(n-1)); init list 1; start 1");
        assert_eq!(
            &plan.instrs()[plan.summands()[0].code.clone()],
            [PushN, PushInt(1), Sub, Lookup]
        );
    }

    #[test]
    fn cancelling_phi_product_returns_to_integer_code() {
        use Instr::*;
        // (2φ−1)² = 5, so the pending coefficient collapses to an integer
        let expr = IndexExpr::n()
            .mul(
                IndexExpr::int(2)
                    .mul(IndexExpr::phi())
                    .sub(IndexExpr::int(1)),
            )
            .mul(
                IndexExpr::int(2)
                    .mul(IndexExpr::phi())
                    .sub(IndexExpr::int(1)),
            );
        let code = lower_argument(&expr).unwrap();
        assert_eq!(code, [PushN, PushInt(5), Mul]);
    }

    #[test]
    fn runtime_divisor_is_rejected() {
        let arg = IndexExpr::n().floor_div(IndexExpr::n().sub(IndexExpr::int(1)).call());
        assert_eq!(lower_argument(&arg), Err(LowerError::NonConstDivisor));
    }

    #[test]
    fn zero_divisor_is_rejected() {
        let arg = IndexExpr::n().floor_div(IndexExpr::int(0));
        assert_eq!(lower_argument(&arg), Err(LowerError::DivisionByZero));
    }

    #[test]
    fn unrounded_scale_is_rejected() {
        let arg = IndexExpr::n().mul(IndexExpr::phi()).add(IndexExpr::int(1));
        assert_eq!(lower_argument(&arg), Err(LowerError::UnsupportedPhi));
    }

    #[test]
    fn oversized_constant_is_rejected() {
        let arg = IndexExpr::int(u64::MAX);
        assert_eq!(lower_argument(&arg), Err(LowerError::ConstOverflow));
    }
}
