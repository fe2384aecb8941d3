//! A direct memoized interpreter over the AST, used as the oracle the
//! compiled machine is tested against.
//!
//! Arithmetic runs in exact ℚ(√5) values throughout; whenever a non-constant
//! node produces an integer, the result must fit in 64 bits or the evaluator
//! signals overflow. That rule makes its failure points coincide with the
//! machine's, which keeps runtime values in checked 64-bit integers and
//! defers φ-scaled constants exactly: on both sides an overflow fires exactly
//! when an integer intermediate leaves the 64-bit range (constant folding, in
//! contrast, is exact on both sides). Results are therefore comparable
//! value-for-value, death-for-death — at 64-bit element width.

use crate::dsl::{IndexExpr, Sign, ValidatedSpec};
use crate::eval::machine::{Interruption, RunOutcome, RunStatus};
use crate::quad::{Quad, PHI};

/// Memoizing AST interpreter for one rule.
pub struct RefEvaluator<'s> {
    spec: &'s ValidatedSpec,
    memo: Vec<i64>,
}

impl<'s> RefEvaluator<'s> {
    pub fn new(spec: &'s ValidatedSpec) -> RefEvaluator<'s> {
        RefEvaluator {
            spec,
            memo: spec.init().to_vec(),
        }
    }

    /// Number of terms computed so far.
    pub fn len(&self) -> u64 {
        self.memo.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    /// The term at 1-based index `n`, computing and memoizing every earlier
    /// term first. An error reports the first failure at or below `n`; terms
    /// computed before the failure stay memoized.
    pub fn term(&mut self, n: u64) -> Result<i64, Interruption> {
        assert!(n >= 1, "terms are indexed from 1");
        while (self.memo.len() as u64) < n {
            let next = self.memo.len() as u64 + 1;
            let v = self.rhs(next)?;
            self.memo.push(v);
        }
        Ok(self.memo[(n - 1) as usize])
    }

    fn rhs(&self, n: u64) -> Result<i64, Interruption> {
        debug_assert_eq!(self.memo.len() as u64, n - 1);
        let mut total: i64 = 0;
        for s in self.spec.summands() {
            let (arg, _) = self.eval(&s.argument, n)?;
            let v = self.lookup(arg, n)?;
            total = match s.sign {
                Sign::Plus => total.checked_add(v),
                Sign::Minus => total.checked_sub(v),
            }
            .ok_or(Interruption::Overflow)?;
        }
        Ok(total)
    }

    fn lookup(&self, argument: Quad, n: u64) -> Result<i64, Interruption> {
        let a = argument
            .as_integer()
            .expect("validation guarantees integer call arguments");
        let offending = i64::try_from(a).map_err(|_| Interruption::Overflow)?;
        if a < 1 || a >= i128::from(n) {
            return Err(Interruption::Death { offending });
        }
        Ok(self.memo[(a - 1) as usize])
    }

    /// Evaluates an index expression at `n`. The flag reports whether the
    /// subtree is constant (no `n`, no self-call); constant values stay
    /// exact, non-constant integer values are checked against i64.
    fn eval(&self, e: &IndexExpr, n: u64) -> Result<(Quad, bool), Interruption> {
        use Interruption::Overflow;
        let (value, konst) = match e {
            IndexExpr::N => {
                let v = i64::try_from(n).map_err(|_| Overflow)?;
                (Quad::int(i128::from(v)), false)
            }
            IndexExpr::Int(v) => (Quad::int(i128::from(*v)), true),
            IndexExpr::Phi => (PHI, true),
            IndexExpr::Add(a, b) => {
                let (va, ca) = self.eval(a, n)?;
                let (vb, cb) = self.eval(b, n)?;
                (va.checked_add(&vb).map_err(|_| Overflow)?, ca && cb)
            }
            IndexExpr::Sub(a, b) => {
                let (va, ca) = self.eval(a, n)?;
                let (vb, cb) = self.eval(b, n)?;
                (va.checked_sub(&vb).map_err(|_| Overflow)?, ca && cb)
            }
            IndexExpr::Mul(a, b) => {
                let (va, ca) = self.eval(a, n)?;
                let (vb, cb) = self.eval(b, n)?;
                (va.checked_mul(&vb).map_err(|_| Overflow)?, ca && cb)
            }
            IndexExpr::FloorDiv(a, b) => {
                let (va, ca) = self.eval(a, n)?;
                let (vb, cb) = self.eval(b, n)?;
                let q = va.checked_div(&vb).map_err(|_| Overflow)?;
                (Quad::int(q.floor().map_err(|_| Overflow)?), ca && cb)
            }
            IndexExpr::CeilDiv(a, b) => {
                let (va, ca) = self.eval(a, n)?;
                let (vb, cb) = self.eval(b, n)?;
                let q = va.checked_div(&vb).map_err(|_| Overflow)?;
                (Quad::int(q.ceil().map_err(|_| Overflow)?), ca && cb)
            }
            IndexExpr::Floor(a) => {
                let (va, ca) = self.eval(a, n)?;
                (Quad::int(va.floor().map_err(|_| Overflow)?), ca)
            }
            IndexExpr::Ceil(a) => {
                let (va, ca) = self.eval(a, n)?;
                (Quad::int(va.ceil().map_err(|_| Overflow)?), ca)
            }
            IndexExpr::Call(a) => {
                let (va, _) = self.eval(a, n)?;
                let v = self.lookup(va, n)?;
                (Quad::int(i128::from(v)), false)
            }
        };
        if !konst {
            if let Some(i) = value.as_integer() {
                if i64::try_from(i).is_err() {
                    return Err(Overflow);
                }
            }
        }
        Ok((value, konst))
    }
}

/// Runs the reference evaluator like [`run`](crate::eval::run) at 64-bit
/// width and without a memory budget: terms until death, overflow, or the
/// cap.
pub fn run_reference(spec: &ValidatedSpec, cap_n: u64) -> (Vec<i64>, RunOutcome) {
    assert!(cap_n > spec.start_after());
    let mut eval = RefEvaluator::new(spec);
    match eval.term(cap_n) {
        Ok(_) => {
            let outcome = RunOutcome {
                status: RunStatus::CapReached,
                final_length: eval.len(),
                died_at: None,
                offending_argument: None,
            };
            (eval.memo, outcome)
        }
        Err(Interruption::Death { offending }) => {
            let final_length = eval.len();
            let outcome = RunOutcome {
                status: RunStatus::Died,
                final_length,
                died_at: Some(final_length + 1),
                offending_argument: Some(offending),
            };
            (eval.memo, outcome)
        }
        Err(Interruption::Overflow) => {
            let outcome = RunOutcome {
                status: RunStatus::Overflow,
                final_length: eval.len(),
                died_at: None,
                offending_argument: None,
            };
            (eval.memo, outcome)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse, validate};

    fn spec(src: &str) -> ValidatedSpec {
        validate(&parse(src).unwrap()).unwrap()
    }

    #[test]
    fn q_opening_terms() {
        let s = spec("A(n)=A(n-A(n-1))+A(n-A(n-2)); init list 1,1; start 2");
        let mut eval = RefEvaluator::new(&s);
        let terms: Vec<i64> = (1..=10).map(|n| eval.term(n).unwrap()).collect();
        assert_eq!(terms, [1, 1, 2, 3, 3, 4, 5, 5, 6, 6]);
    }

    #[test]
    fn conway_opening_terms() {
        let s = spec("A(n)=A(A(n-1))+A(n-A(n-1)); init ceil(n/2); start 4");
        let mut eval = RefEvaluator::new(&s);
        let terms: Vec<i64> = (1..=10).map(|n| eval.term(n).unwrap()).collect();
        assert_eq!(terms, [1, 1, 2, 2, 3, 4, 4, 4, 5, 6]);
    }

    #[test]
    fn h3_dies_at_54() {
        let s = spec("A(n)=A(n-A(n-2))+A(n-A(n-3)); init ceil(n/2); start 3");
        let (terms, outcome) = run_reference(&s, 1_000_000);
        assert_eq!(outcome.status, RunStatus::Died);
        assert_eq!(outcome.final_length, 53);
        assert_eq!(outcome.died_at, Some(54));
        assert_eq!(terms.len(), 53);

        let mut eval = RefEvaluator::new(&s);
        assert!(matches!(eval.term(54), Err(Interruption::Death { .. })));
        // everything below the death point is still well-defined
        assert_eq!(eval.term(53).unwrap(), terms[52]);
    }

    #[test]
    fn death_point_is_minimal() {
        // terms 1..=53 computed without any out-of-range lookup
        let s = spec("A(n)=A(n-A(n-2))+A(n-A(n-3)); init ceil(n/2); start 3");
        let mut eval = RefEvaluator::new(&s);
        for n in 1..=53 {
            assert!(eval.term(n).is_ok(), "term {n} should exist");
        }
    }
}
