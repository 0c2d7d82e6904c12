// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

use core::cmp::Ordering;

/// One end of an interval. Absent bounds mean unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub inclusive: bool,
}

impl Bound {
    pub fn inclusive(value: f64) -> Self {
        Self {
            value,
            inclusive: true,
        }
    }

    pub fn exclusive(value: f64) -> Self {
        Self {
            value,
            inclusive: false,
        }
    }
}

/// A (possibly unbounded) interval of the real line with exact inclusivity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Interval {
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
}

impl Interval {
    pub const FULL: Interval = Interval {
        lower: None,
        upper: None,
    };

    pub fn new(lower: Option<Bound>, upper: Option<Bound>) -> Self {
        Self { lower, upper }
    }

    /// `[lo, hi]`
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(Some(Bound::inclusive(lo)), Some(Bound::inclusive(hi)))
    }

    /// `(lo, hi]`
    pub fn left_open(lo: f64, hi: f64) -> Self {
        Self::new(Some(Bound::exclusive(lo)), Some(Bound::inclusive(hi)))
    }

    pub fn point(v: f64) -> Self {
        Self::closed(v, v)
    }

    pub fn at_most(hi: f64) -> Self {
        Self::new(None, Some(Bound::inclusive(hi)))
    }

    pub fn less_than(hi: f64) -> Self {
        Self::new(None, Some(Bound::exclusive(hi)))
    }

    pub fn at_least(lo: f64) -> Self {
        Self::new(Some(Bound::inclusive(lo)), None)
    }

    pub fn greater_than(lo: f64) -> Self {
        Self::new(Some(Bound::exclusive(lo)), None)
    }

    pub fn is_full(&self) -> bool {
        self.lower.is_none() && self.upper.is_none()
    }

    #[inline]
    pub fn contains_value(&self, v: f64) -> bool {
        if let Some(b) = self.lower {
            if v < b.value || (v == b.value && !b.inclusive) {
                return false;
            }
        }
        if let Some(b) = self.upper {
            if v > b.value || (v == b.value && !b.inclusive) {
                return false;
            }
        }
        !v.is_nan()
    }

    pub fn is_empty(&self) -> bool {
        match (self.lower, self.upper) {
            (Some(l), Some(u)) => match l.value.partial_cmp(&u.value) {
                Some(Ordering::Less) => false,
                Some(Ordering::Equal) => !(l.inclusive && u.inclusive),
                _ => true,
            },
            _ => false,
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lower: tighter_lower(self.lower, other.lower),
            upper: tighter_upper(self.upper, other.upper),
        }
    }

    /// True iff `inner ⊆ self`. The empty interval is contained in anything.
    pub fn contains(&self, inner: &Interval) -> bool {
        if inner.is_empty() {
            return true;
        }
        let lower_ok = match (self.lower, inner.lower) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(s), Some(i)) => {
                i.value > s.value || (i.value == s.value && (s.inclusive || !i.inclusive))
            }
        };
        let upper_ok = match (self.upper, inner.upper) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(s), Some(i)) => {
                i.value < s.value || (i.value == s.value && (s.inclusive || !i.inclusive))
            }
        };
        lower_ok && upper_ok
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        !self.intersect(other).is_empty()
    }
}

fn tighter_lower(a: Option<Bound>, b: Option<Bound>) -> Option<Bound> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(if a.value > b.value {
            a
        } else if b.value > a.value {
            b
        } else {
            Bound {
                value: a.value,
                inclusive: a.inclusive && b.inclusive,
            }
        }),
    }
}

fn tighter_upper(a: Option<Bound>, b: Option<Bound>) -> Option<Bound> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(if a.value < b.value {
            a
        } else if b.value < a.value {
            b
        } else {
            Bound {
                value: a.value,
                inclusive: a.inclusive && b.inclusive,
            }
        }),
    }
}
