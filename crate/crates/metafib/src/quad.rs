//! Exact arithmetic in the quadratic field Q(√5).
//!
//! Initial-condition patterns and start thresholds of several recurrence
//! families involve the golden ratio φ = (1+√5)/2, e.g. ⌊(n+2)/(1+φ)⌋ and
//! ⌊φ·i⌋. These must be bit-exact for every parameter, so all φ-bearing
//! values are carried as `(p + q·√5) / d` with integer components and are
//! floored/ceiled with integer arithmetic only. Floating point is never
//! consulted.

use std::fmt;

/// Arithmetic fault while operating on a [`Quad`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum QuadError {
    /// An intermediate exceeded the 128-bit working range.
    #[error("overflow in exact quadratic arithmetic")]
    Overflow,
    /// Division by the zero element.
    #[error("division by zero in exact quadratic arithmetic")]
    DivisionByZero,
}

/// An exact element of Q(√5): the value `(p + q·√5) / d`.
///
/// Kept normalized: `d > 0` and `gcd(p, q, d) = 1`, so structural equality
/// is value equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Quad {
    p: i128,
    q: i128,
    d: i128,
}

/// The golden ratio φ = (1 + √5) / 2.
pub const PHI: Quad = Quad { p: 1, q: 1, d: 2 };

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Floor division for i128 (round toward negative infinity). `b != 0`.
pub(crate) fn div_floor_i128(a: i128, b: i128) -> i128 {
    let q = a / b;
    if a % b != 0 && (a < 0) != (b < 0) {
        q - 1
    } else {
        q
    }
}

/// Exact ⌊q·√5⌋. Relies on √5 being irrational: `5q²` is a perfect square
/// only for q = 0.
fn floor_q_sqrt5(q: i128) -> Result<i128, QuadError> {
    if q == 0 {
        return Ok(0);
    }
    let sq = q
        .unsigned_abs()
        .checked_mul(q.unsigned_abs())
        .and_then(|s| s.checked_mul(5))
        .ok_or(QuadError::Overflow)?;
    let root = sq.isqrt() as i128;
    Ok(if q > 0 { root } else { -root - 1 })
}

impl Quad {
    /// The integer `v` as a quadratic element.
    pub fn int(v: i128) -> Quad {
        Quad { p: v, q: 0, d: 1 }
    }

    /// Builds `(p + q·√5) / d`, normalizing signs and common factors.
    pub fn new(p: i128, q: i128, d: i128) -> Result<Quad, QuadError> {
        if d == 0 {
            return Err(QuadError::DivisionByZero);
        }
        let (p, q, d) = if d < 0 {
            (
                p.checked_neg().ok_or(QuadError::Overflow)?,
                q.checked_neg().ok_or(QuadError::Overflow)?,
                d.checked_neg().ok_or(QuadError::Overflow)?,
            )
        } else {
            (p, q, d)
        };
        let g = gcd(gcd(p.unsigned_abs(), q.unsigned_abs()), d.unsigned_abs());
        if g <= 1 {
            return Ok(Quad { p, q, d });
        }
        let g = g as i128;
        Ok(Quad {
            p: p / g,
            q: q / g,
            d: d / g,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0 && self.q == 0
    }

    /// `Some(v)` iff the element is exactly the integer `v`.
    pub fn as_integer(&self) -> Option<i128> {
        if self.q == 0 && self.d == 1 {
            Some(self.p)
        } else {
            None
        }
    }

    pub fn checked_add(&self, rhs: &Quad) -> Result<Quad, QuadError> {
        let p = self
            .p
            .checked_mul(rhs.d)
            .and_then(|a| rhs.p.checked_mul(self.d).and_then(|b| a.checked_add(b)))
            .ok_or(QuadError::Overflow)?;
        let q = self
            .q
            .checked_mul(rhs.d)
            .and_then(|a| rhs.q.checked_mul(self.d).and_then(|b| a.checked_add(b)))
            .ok_or(QuadError::Overflow)?;
        let d = self.d.checked_mul(rhs.d).ok_or(QuadError::Overflow)?;
        Quad::new(p, q, d)
    }

    pub fn checked_sub(&self, rhs: &Quad) -> Result<Quad, QuadError> {
        self.checked_add(&Quad {
            p: rhs.p.checked_neg().ok_or(QuadError::Overflow)?,
            q: rhs.q.checked_neg().ok_or(QuadError::Overflow)?,
            d: rhs.d,
        })
    }

    pub fn checked_mul(&self, rhs: &Quad) -> Result<Quad, QuadError> {
        // (p1 + q1√5)(p2 + q2√5) = (p1p2 + 5q1q2) + (p1q2 + q1p2)√5
        let pp = self.p.checked_mul(rhs.p).ok_or(QuadError::Overflow)?;
        let qq = self
            .q
            .checked_mul(rhs.q)
            .and_then(|v| v.checked_mul(5))
            .ok_or(QuadError::Overflow)?;
        let p = pp.checked_add(qq).ok_or(QuadError::Overflow)?;
        let cross1 = self.p.checked_mul(rhs.q).ok_or(QuadError::Overflow)?;
        let cross2 = self.q.checked_mul(rhs.p).ok_or(QuadError::Overflow)?;
        let q = cross1.checked_add(cross2).ok_or(QuadError::Overflow)?;
        let d = self.d.checked_mul(rhs.d).ok_or(QuadError::Overflow)?;
        Quad::new(p, q, d)
    }

    /// Multiplicative inverse. The norm `p² − 5q²` vanishes only at zero
    /// because 5 is not a perfect square.
    pub fn checked_recip(&self) -> Result<Quad, QuadError> {
        if self.is_zero() {
            return Err(QuadError::DivisionByZero);
        }
        // 1 / ((p + q√5)/d) = d(p − q√5) / (p² − 5q²)
        let norm = self
            .p
            .checked_mul(self.p)
            .and_then(|a| {
                self.q
                    .checked_mul(self.q)
                    .and_then(|b| b.checked_mul(5))
                    .and_then(|b| a.checked_sub(b))
            })
            .ok_or(QuadError::Overflow)?;
        let p = self.d.checked_mul(self.p).ok_or(QuadError::Overflow)?;
        let q = self
            .d
            .checked_mul(self.q)
            .and_then(|v| v.checked_neg())
            .ok_or(QuadError::Overflow)?;
        Quad::new(p, q, norm)
    }

    pub fn checked_div(&self, rhs: &Quad) -> Result<Quad, QuadError> {
        self.checked_mul(&rhs.checked_recip()?)
    }

    /// Exact ⌊self⌋.
    pub fn floor(&self) -> Result<i128, QuadError> {
        // (p + q√5)/d with d > 0: since q√5 is irrational for q ≠ 0, no
        // integer boundary can fall strictly inside [p+⌊q√5⌋, p+q√5],
        // so flooring the integer part first is exact.
        let num = self
            .p
            .checked_add(floor_q_sqrt5(self.q)?)
            .ok_or(QuadError::Overflow)?;
        Ok(div_floor_i128(num, self.d))
    }

    /// Exact ⌈self⌉.
    pub fn ceil(&self) -> Result<i128, QuadError> {
        let neg = Quad {
            p: self.p.checked_neg().ok_or(QuadError::Overflow)?,
            q: self.q.checked_neg().ok_or(QuadError::Overflow)?,
            d: self.d,
        };
        Ok(-neg.floor()?)
    }

    /// Exact three-way comparison against the integer `m`.
    ///
    /// Decided by comparing `m·d − p` against `q·√5` via squaring; used by
    /// tests as an independent route to cross-check [`Quad::floor`].
    pub fn cmp_int(&self, m: i128) -> Result<std::cmp::Ordering, QuadError> {
        use std::cmp::Ordering;
        // self <=> m  ⇔  q√5 <=> m·d − p
        let l = m
            .checked_mul(self.d)
            .and_then(|v| v.checked_sub(self.p))
            .ok_or(QuadError::Overflow)?;
        let q = self.q;
        if q == 0 {
            return Ok(0.cmp(&l));
        }
        let q2 = q
            .unsigned_abs()
            .checked_mul(q.unsigned_abs())
            .and_then(|v| v.checked_mul(5))
            .ok_or(QuadError::Overflow)?;
        let l2 = l
            .unsigned_abs()
            .checked_mul(l.unsigned_abs())
            .ok_or(QuadError::Overflow)?;
        Ok(match (q > 0, l > 0) {
            (true, false) => Ordering::Greater,
            (true, true) => q2.cmp(&l2),
            (false, true) => Ordering::Less,
            (false, false) => {
                if l == 0 {
                    Ordering::Less
                } else {
                    l2.cmp(&q2)
                }
            }
        })
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 0 && self.d == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "({} + {}*sqrt5)/{}", self.p, self.q, self.d)
        }
    }
}
