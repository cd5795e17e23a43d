use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::ModelError;

/// An interval endpoint: a finite integer or `+∞`.
///
/// `Finite(_) < Infinite` under the derived ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Finite(i64),
    Infinite,
}

impl Bound {
    pub fn finite(self) -> Option<i64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    /// Compares against a finite value.
    pub fn cmp_value(self, v: i64) -> Ordering {
        match self {
            Bound::Finite(h) => h.cmp(&v),
            Bound::Infinite => Ordering::Greater,
        }
    }
}

impl From<i64> for Bound {
    fn from(v: i64) -> Self {
        Bound::Finite(v)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Bound {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infty" | "+inf" | "∞" => Ok(Bound::Infinite),
            t => t
                .parse::<i64>()
                .map(Bound::Finite)
                .map_err(|_| ModelError::Syntax(s.to_string())),
        }
    }
}

/// A bound pair `[lo, hi]` on a nonnegative integer quantity.
///
/// Invariant: `0 <= lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: i64,
    hi: Bound,
}

impl Interval {
    /// `[0, +∞)`: nothing known.
    pub const UNKNOWN: Interval = Interval {
        lo: 0,
        hi: Bound::Infinite,
    };

    pub fn new(lo: i64, hi: impl Into<Bound>) -> Result<Self, ModelError> {
        let hi = hi.into();
        if lo < 0 {
            return Err(ModelError::NegativeBound(lo));
        }
        if hi.cmp_value(lo) == Ordering::Less {
            return Err(ModelError::Empty { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn exact(v: i64) -> Result<Self, ModelError> {
        Interval::new(v, v)
    }

    pub fn at_least(lo: i64) -> Result<Self, ModelError> {
        Interval::new(lo, Bound::Infinite)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> Bound {
        self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.hi == Bound::Finite(self.lo)
    }

    /// The single value when the interval is exact.
    pub fn value(&self) -> Option<i64> {
        self.is_exact().then_some(self.lo)
    }

    pub fn is_unknown(&self) -> bool {
        *self == Interval::UNKNOWN
    }

    pub fn contains(&self, v: i64) -> bool {
        v >= self.lo && self.hi.cmp_value(v) != Ordering::Less
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        self.lo >= other.lo && self.hi <= other.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl FromStr for Interval {
    type Err = ModelError;

    /// Parses the `lo:hi` cell format (`4:4`, `0:inf`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| ModelError::Syntax(s.to_string()))?;
        let lo = lo
            .trim()
            .parse::<i64>()
            .map_err(|_| ModelError::Syntax(s.to_string()))?;
        Interval::new(lo, hi.parse::<Bound>()?)
    }
}

/// Intersection of two intervals.
pub fn meet(a: Interval, b: Interval) -> Result<Interval, ModelError> {
    let lo = a.lo.max(b.lo);
    let hi = a.hi.min(b.hi);
    if hi.cmp_value(lo) == Ordering::Less {
        return Err(ModelError::Contradiction { a, b });
    }
    Ok(Interval { lo, hi })
}

/// A raw bound pair in invariant units, before the vertex transform.
///
/// Unlike [`Interval`] the lower end may be negative (signed invariants such as
/// the signature).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RawInterval {
    lo: i64,
    hi: Bound,
}

impl RawInterval {
    pub fn new(lo: i64, hi: impl Into<Bound>) -> Result<Self, ModelError> {
        let hi = hi.into();
        if hi.cmp_value(lo) == Ordering::Less {
            return Err(ModelError::Empty { lo, hi });
        }
        Ok(RawInterval { lo, hi })
    }

    pub fn exact(v: i64) -> Self {
        RawInterval {
            lo: v,
            hi: Bound::Finite(v),
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> Bound {
        self.hi
    }
}

impl fmt::Display for RawInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(lo: i64, hi: i64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn meet_examples() {
        assert_eq!(meet(Interval::UNKNOWN, iv(4, 6)).unwrap(), iv(4, 6));
        assert_eq!(meet(iv(3, 8), iv(5, 10)).unwrap(), iv(5, 8));
        assert!(matches!(
            meet(iv(0, 2), iv(5, 7)),
            Err(ModelError::Contradiction { .. })
        ));
    }

    #[test]
    fn constructor_rejects_bad_pairs() {
        assert!(matches!(Interval::new(-1, 3), Err(ModelError::NegativeBound(-1))));
        assert!(matches!(Interval::new(4, 3), Err(ModelError::Empty { .. })));
        assert!(Interval::new(4, Bound::Infinite).is_ok());
    }

    #[test]
    fn cell_format() {
        assert_eq!(iv(4, 4).to_string(), "4:4");
        assert_eq!(Interval::UNKNOWN.to_string(), "0:inf");
        assert_eq!("0:inf".parse::<Interval>().unwrap(), Interval::UNKNOWN);
        assert_eq!("2:6".parse::<Interval>().unwrap(), iv(2, 6));
        assert!("2-6".parse::<Interval>().is_err());
        assert!("6:2".parse::<Interval>().is_err());
    }

    pub(crate) fn arb_interval() -> impl Strategy<Value = Interval> {
        (0i64..40, prop::option::of(0i64..40)).prop_map(|(lo, w)| match w {
            Some(w) => Interval::new(lo, lo + w).unwrap(),
            None => Interval::at_least(lo).unwrap(),
        })
    }

    proptest! {
        #[test]
        fn meet_is_commutative(a in arb_interval(), b in arb_interval()) {
            prop_assert_eq!(meet(a, b).ok(), meet(b, a).ok());
        }

        #[test]
        fn meet_is_associative(a in arb_interval(), b in arb_interval(), c in arb_interval()) {
            let left = meet(a, b).and_then(|ab| meet(ab, c)).ok();
            let right = meet(b, c).and_then(|bc| meet(a, bc)).ok();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn meet_is_idempotent_with_unknown_identity(a in arb_interval()) {
            prop_assert_eq!(meet(a, a).unwrap(), a);
            prop_assert_eq!(meet(a, Interval::UNKNOWN).unwrap(), a);
            prop_assert_eq!(meet(Interval::UNKNOWN, a).unwrap(), a);
        }

        #[test]
        fn cell_format_round_trips(a in arb_interval()) {
            prop_assert_eq!(a.to_string().parse::<Interval>().unwrap(), a);
        }
    }
}
