//! Built-in recurrence families and their parameterizations.
//!
//! Each preset builds the same [`ValidatedSpec`] the equivalent rule text
//! would produce, with thresholds and initial conditions computed exactly
//! (the `aij` threshold needs ⌊φ·i⌋, which is done in ℚ(√5) arithmetic, not
//! floating point).

use std::fmt;
use std::str::FromStr;

use crate::dsl::MAX_MATERIALIZED_INIT;
use crate::dsl::{validate, IndexExpr, InitPattern, RecurrenceSpec, Sign, Summand, ValidatedSpec};
use crate::quad::{Quad, PHI};

/// A named family with its parameters.
///
/// The `Display`/`FromStr` forms are the preset strings the command line
/// accepts: `q`, `qdl:d,l`, `conway:i`, `aij:i,j`, `hk:k`, `vc`, `qrs:r,s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Q(n) = Q(n−Q(n−1)) + Q(n−Q(n−2)), Q(1)=Q(2)=1.
    Q,
    /// ℓ-summand generalization: A(n) = Σᵢ A(n−A(n−i)) for n > d·ℓ,
    /// init ⌈n(ℓ−1)/ℓ⌉. Requires d ≥ 1, ℓ ≥ 2.
    Qdl { d: u64, l: u64 },
    /// Conway-style c(n) = c(c(n−1)) + c(n−c(n−1)) for n > 4i, init ⌈n/2⌉.
    Conway { i: u64 },
    /// a(n) = a(a(n−j)) + a(n−a(n−1)) for n > 2(i−1)+3⌊φi⌋,
    /// init ⌊(n+2)/(1+φ)⌋. Requires i ≥ 1, j ∈ {1, 2}.
    Aij { i: u64, j: u64 },
    /// H(n) = H(n−H(n−2)) + H(n−H(n−3)) for n > k, init ⌈n/2⌉. Requires
    /// k ≥ 3 so the first recurrent term reads indices ≥ 1.
    Hk { k: u64 },
    /// V(n) = V(n−V(n−1)) + V(n−V(n−4)) for n > 6, init (3,4,5,4,5,6).
    Vc,
    /// Two-offset family A(n) = A(n−A(n−r)) + A(n−A(n−s)) for
    /// n > max(r,s), init ⌈n/2⌉. Requires r,s ≥ 1 and r ≠ s.
    Qrs { r: u64, s: u64 },
}

/// Why a preset string or parameter set was refused.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error(
        "unknown preset '{name}' (expected q, qdl:d,l, conway:i, aij:i,j, hk:k, vc, or qrs:r,s)"
    )]
    UnknownPreset { name: String },
    #[error("preset '{preset}': {problem}")]
    BadParameter { preset: String, problem: String },
}

/// `n − A(n−offset)`, the workhorse argument shape.
fn sub_call(offset: u64) -> IndexExpr {
    IndexExpr::n().sub(IndexExpr::n().sub(IndexExpr::int(offset)).call())
}

fn plus(argument: IndexExpr) -> Summand {
    Summand {
        sign: Sign::Plus,
        argument,
    }
}

/// `⌈n/2⌉` as an init pattern.
fn ceil_half() -> InitPattern {
    InitPattern::ClosedForm(IndexExpr::n().ceil_div(IndexExpr::int(2)))
}

impl Family {
    /// Builds the family's validated spec.
    ///
    /// # Examples
    ///
    /// ```
    /// use metafib::families::Family;
    ///
    /// let spec = Family::Hk { k: 114 }.spec().unwrap();
    /// assert_eq!(spec.start_after(), 114);
    /// assert_eq!(&spec.init()[111..], [56, 57, 57]);
    /// ```
    pub fn spec(self) -> Result<ValidatedSpec, FamilyError> {
        let (summands, init, start_after) = match self {
            Family::Q => (
                vec![plus(sub_call(1)), plus(sub_call(2))],
                InitPattern::List(vec![1, 1]),
                2,
            ),
            Family::Qdl { d, l } => {
                self.require(d >= 1, "d must be at least 1")?;
                self.require(l >= 2, "l must be at least 2")?;
                let start = d
                    .checked_mul(l)
                    .filter(|&s| s <= MAX_MATERIALIZED_INIT)
                    .ok_or_else(|| self.too_large())?;
                let init = IndexExpr::n()
                    .mul(IndexExpr::int(l - 1))
                    .ceil_div(IndexExpr::int(l));
                (
                    (1..=l).map(|i| plus(sub_call(i))).collect(),
                    InitPattern::ClosedForm(init),
                    start,
                )
            }
            Family::Conway { i } => {
                self.require(i >= 1, "i must be at least 1")?;
                let start = i
                    .checked_mul(4)
                    .filter(|&s| s <= MAX_MATERIALIZED_INIT)
                    .ok_or_else(|| self.too_large())?;
                let nested = IndexExpr::n().sub(IndexExpr::int(1)).call();
                (vec![plus(nested), plus(sub_call(1))], ceil_half(), start)
            }
            Family::Aij { i, j } => {
                self.require(i >= 1, "i must be at least 1")?;
                self.require(j == 1 || j == 2, "j must be 1 or 2")?;
                let start = aij_threshold(i)
                    .filter(|&s| s <= MAX_MATERIALIZED_INIT)
                    .ok_or_else(|| self.too_large())?;
                let nested = IndexExpr::n().sub(IndexExpr::int(j)).call();
                let init = IndexExpr::n()
                    .add(IndexExpr::int(2))
                    .floor_div(IndexExpr::int(1).add(IndexExpr::phi()));
                (
                    vec![plus(nested), plus(sub_call(1))],
                    InitPattern::ClosedForm(init),
                    start,
                )
            }
            Family::Hk { k } => {
                self.require(k >= 3, "k must be at least 3")?;
                self.require(k <= MAX_MATERIALIZED_INIT, "k exceeds the init limit")?;
                (vec![plus(sub_call(2)), plus(sub_call(3))], ceil_half(), k)
            }
            Family::Vc => (
                vec![plus(sub_call(1)), plus(sub_call(4))],
                InitPattern::List(vec![3, 4, 5, 4, 5, 6]),
                6,
            ),
            Family::Qrs { r, s } => {
                self.require(r >= 1 && s >= 1, "r and s must be at least 1")?;
                self.require(r != s, "r and s must differ")?;
                let start = r.max(s);
                self.require(
                    start <= MAX_MATERIALIZED_INIT,
                    "max(r,s) exceeds the init limit",
                )?;
                (
                    vec![plus(sub_call(r)), plus(sub_call(s))],
                    ceil_half(),
                    start,
                )
            }
        };
        let spec = RecurrenceSpec {
            name: "A".into(),
            summands,
            init,
            start_after,
        };
        Ok(validate(&spec).expect("in-range presets validate cleanly"))
    }

    fn require(self, ok: bool, problem: &str) -> Result<(), FamilyError> {
        if ok {
            Ok(())
        } else {
            Err(FamilyError::BadParameter {
                preset: self.to_string(),
                problem: problem.to_string(),
            })
        }
    }

    fn too_large(self) -> FamilyError {
        FamilyError::BadParameter {
            preset: self.to_string(),
            problem: format!("threshold exceeds the init limit {MAX_MATERIALIZED_INIT}"),
        }
    }
}

/// Def. 3 threshold `2(i−1) + 3⌊φ·i⌋`, exactly.
fn aij_threshold(i: u64) -> Option<u64> {
    let phi_i = PHI.checked_mul(&Quad::int(i as i128)).ok()?.floor().ok()?;
    let t = 2u64
        .checked_mul(i - 1)?
        .checked_add(3u64.checked_mul(u64::try_from(phi_i).ok()?)?)?;
    Some(t)
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Q => write!(f, "q"),
            Family::Qdl { d, l } => write!(f, "qdl:{d},{l}"),
            Family::Conway { i } => write!(f, "conway:{i}"),
            Family::Aij { i, j } => write!(f, "aij:{i},{j}"),
            Family::Hk { k } => write!(f, "hk:{k}"),
            Family::Vc => write!(f, "vc"),
            Family::Qrs { r, s } => write!(f, "qrs:{r},{s}"),
        }
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Family, FamilyError> {
        let (name, args) = match s.split_once(':') {
            Some((name, args)) => (name, Some(args)),
            None => (s, None),
        };
        let unknown = || FamilyError::UnknownPreset {
            name: s.to_string(),
        };
        let params = |expected: usize| -> Result<Vec<u64>, FamilyError> {
            let raw = args.ok_or_else(unknown)?;
            let values: Vec<u64> = raw
                .split(',')
                .map(|p| p.trim().parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|_| FamilyError::BadParameter {
                    preset: s.to_string(),
                    problem: "parameters must be nonnegative integers".to_string(),
                })?;
            if values.len() != expected {
                return Err(FamilyError::BadParameter {
                    preset: s.to_string(),
                    problem: format!("expected {expected} parameter(s), got {}", values.len()),
                });
            }
            Ok(values)
        };
        match name {
            "q" if args.is_none() => Ok(Family::Q),
            "vc" if args.is_none() => Ok(Family::Vc),
            "qdl" => {
                let p = params(2)?;
                Ok(Family::Qdl { d: p[0], l: p[1] })
            }
            "conway" => {
                let p = params(1)?;
                Ok(Family::Conway { i: p[0] })
            }
            "aij" => {
                let p = params(2)?;
                Ok(Family::Aij { i: p[0], j: p[1] })
            }
            "hk" => {
                let p = params(1)?;
                Ok(Family::Hk { k: p[0] })
            }
            "qrs" => {
                let p = params(2)?;
                Ok(Family::Qrs { r: p[0], s: p[1] })
            }
            _ => Err(unknown()),
        }
    }
}

/// Error for a Fibonacci index outside the supported range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("fibonacci index {0} outside 1..=90")]
pub struct FibonacciIndexError(pub u32);

/// The m-th Fibonacci number, F(1) = F(2) = 1, for 1 ≤ m ≤ 90 (the largest
/// index whose value fits in 64 bits comfortably). Used for plot ranges.
pub fn fibonacci(m: u32) -> Result<i64, FibonacciIndexError> {
    if !(1..=90).contains(&m) {
        return Err(FibonacciIndexError(m));
    }
    let (mut a, mut b) = (1i64, 1i64);
    for _ in 2..m {
        (a, b) = (b, a + b);
    }
    Ok(b)
}
