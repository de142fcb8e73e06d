//! Packed difference bounds for DBM entries.
//!
//! A DBM entry constrains a clock difference `x - y ≺ m` where `≺` is either
//! `<` (strict) or `<=` (non-strict). Following the encoding popularized by
//! the UPPAAL DBM library (see Bengtsson & Yi, *Timed Automata: Semantics,
//! Algorithms and Tools*, 2004, §4.1), we pack the integer bound `m` and the
//! strictness into a single `i32`:
//!
//! ```text
//! raw = (m << 1) | strictness      strictness: 1 = non-strict, 0 = strict
//! ```
//!
//! With this layout the natural integer order coincides with the bound order
//! `(m, <) < (m, <=) < (m+1, <)`, so `min`/`max` and comparisons come for
//! free, and bound addition needs only one correction for strictness.

/// A packed difference bound: integer value plus strictness bit.
///
/// `Bound` is `Copy` and totally ordered; the order is the usual order on
/// bounds where a smaller bound denotes a tighter constraint.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bound(i32);

impl Bound {
    /// The unbounded entry `∞` (no constraint).
    pub const INF: Bound = Bound(i32::MAX);

    /// The bound `(0, <=)`, i.e. `x - y <= 0`. This is the diagonal value of
    /// every canonical non-empty DBM and the reference-row value of zones
    /// that contain only non-negative clocks.
    pub const LE_ZERO: Bound = Bound(1);

    /// The bound `(0, <)`.
    pub const LT_ZERO: Bound = Bound(0);

    /// A non-strict bound `(m, <=)`.
    #[inline]
    pub fn le(m: i64) -> Bound {
        Bound(((m as i32) << 1) | 1)
    }

    /// A strict bound `(m, <)`.
    #[inline]
    pub fn lt(m: i64) -> Bound {
        Bound((m as i32) << 1)
    }

    /// The integer part of the bound. Must not be called on `INF`.
    #[inline]
    pub fn value(self) -> i64 {
        debug_assert!(self != Bound::INF);
        (self.0 >> 1) as i64
    }

    /// True if the bound is non-strict (`<=`).
    #[inline]
    pub fn is_nonstrict(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn is_inf(self) -> bool {
        self == Bound::INF
    }

    /// Bound addition: the tightest bound implied by chaining
    /// `x - y ≺₁ m₁` and `y - z ≺₂ m₂`. Addition saturates at `∞`.
    #[inline]
    pub fn add(self, other: Bound) -> Bound {
        if self.is_inf() || other.is_inf() {
            Bound::INF
        } else {
            // Sum of values; the result is non-strict only if both are.
            Bound(self.0 + other.0 - ((self.0 | other.0) & 1))
        }
    }

    /// The complement of the constraint `x - y ≺ m` is `y - x ≺' -m` with
    /// flipped strictness. Must not be called on `INF` (the complement of
    /// "no constraint" is empty, which has no bound representation).
    #[inline]
    pub fn negated(self) -> Bound {
        debug_assert!(self != Bound::INF);
        Bound((-(self.0 >> 1) << 1) | (1 - (self.0 & 1)))
    }

    /// Does the concrete difference `d = x - y` satisfy this bound?
    #[inline]
    pub fn admits(self, d: i64) -> bool {
        if self.is_inf() {
            true
        } else if self.is_nonstrict() {
            d <= self.value()
        } else {
            d < self.value()
        }
    }
}

impl std::fmt::Debug for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_inf() {
            write!(f, "<inf")
        } else if self.is_nonstrict() {
            write!(f, "<={}", self.value())
        } else {
            write!(f, "<{}", self.value())
        }
    }
}
