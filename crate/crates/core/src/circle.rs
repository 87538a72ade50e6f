//! Arithmetic on the circle S¹ = ℝ/ℤ: wrapping, circular distance, and
//! counterclockwise arcs.
//!
//! Everything here treats the circle as the unit interval with identified
//! end points. Arcs follow a half-open `[start, end)` convention so that
//! partitions of the circle by fixed points are exact.

use serde::Serialize;

/// A point on the circle, stored as a position in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct CirclePoint(f64);

impl CirclePoint {
    /// Wraps an arbitrary finite real into `[0, 1)`.
    pub fn new(x: f64) -> Self {
        wrap(x)
    }

    pub fn position(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Reduces x modulo 1 into `[0, 1)`.
///
/// ```
/// use phaseline::circle::wrap;
///
/// assert_eq!(wrap(1.25).position(), 0.25);
/// assert_eq!(wrap(-0.25).position(), 0.75);
/// assert_eq!(wrap(3.0).position(), 0.0);
/// ```
pub fn wrap(x: f64) -> CirclePoint {
    debug_assert!(x.is_finite(), "wrap requires a finite input, got {x}");
    let mut f = x - x.floor();
    // x slightly below an integer can round up to exactly 1.0.
    if f >= 1.0 {
        f = 0.0;
    }
    CirclePoint(f)
}

/// Wraps a displacement into `(-0.5, 0.5]`; the signed offset from `b` to `a`
/// along the shorter way around.
pub fn signed_offset(a: f64, b: f64) -> f64 {
    let d = wrap(a - b + 0.5).position() - 0.5;
    if d == -0.5 {
        0.5
    } else {
        d
    }
}

/// Circular distance: `min(|a-b|, 1-|a-b|)`, always in `[0, 0.5]`.
pub fn circ_dist(a: CirclePoint, b: CirclePoint) -> f64 {
    let d = (a.position() - b.position()).abs();
    d.min(1.0 - d)
}

/// Counterclockwise gap from `from` to `to`, in `[0, 1)`.
pub fn ccw_gap(from: CirclePoint, to: CirclePoint) -> f64 {
    wrap(to.position() - from.position()).position()
}

/// A counterclockwise arc `[start, end)`. `start == end` denotes either the
/// whole circle (when `full_circle` is set) or the empty arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub start: CirclePoint,
    pub end: CirclePoint,
    pub full_circle: bool,
}

impl Arc {
    pub fn new(start: CirclePoint, end: CirclePoint) -> Self {
        Arc {
            start,
            end,
            full_circle: false,
        }
    }

    /// Arc from raw coordinates; both are wrapped.
    pub fn from_raw(start: f64, end: f64) -> Self {
        Arc::new(wrap(start), wrap(end))
    }

    pub fn full() -> Self {
        Arc {
            start: CirclePoint(0.0),
            end: CirclePoint(0.0),
            full_circle: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.full_circle && self.start == self.end
    }

    /// Counterclockwise length of the arc.
    pub fn length(&self) -> f64 {
        if self.full_circle {
            1.0
        } else {
            ccw_gap(self.start, self.end)
        }
    }

    /// Membership under counterclockwise traversal: start inclusive, end
    /// exclusive.
    pub fn contains(&self, p: CirclePoint) -> bool {
        if self.full_circle {
            return true;
        }
        if self.start == self.end {
            return false;
        }
        let s = self.start.position();
        let e = self.end.position();
        let x = p.position();
        if s < e {
            s <= x && x < e
        } else {
            x >= s || x < e
        }
    }

    /// Point halfway along the arc.
    pub fn midpoint(&self) -> CirclePoint {
        if self.full_circle {
            return CirclePoint(0.5);
        }
        wrap(self.start.position() + 0.5 * self.length())
    }
}

impl std::fmt::Display for Arc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.full_circle {
            write!(f, "[0, 1) (full circle)")
        } else {
            write!(f, "[{}, {})", self.start, self.end)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wrap_basics() {
        assert_eq!(wrap(1.25).position(), 0.25);
        assert_eq!(wrap(-0.25).position(), 0.75);
        assert_eq!(wrap(1.0).position(), 0.0);
        assert_eq!(wrap(0.0).position(), 0.0);
        assert_eq!(wrap(-3.0).position(), 0.0);
        // Values that round up to 1.0 after subtraction must clamp to 0.
        assert_eq!(wrap(-1e-18).position(), 0.0);
    }

    #[test]
    fn circ_dist_examples() {
        assert!((circ_dist(wrap(0.1), wrap(0.9)) - 0.2).abs() < 1e-15);
        assert_eq!(circ_dist(wrap(0.3), wrap(0.3)), 0.0);
        assert!((circ_dist(wrap(0.25), wrap(0.75)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn arc_membership() {
        let a = Arc::from_raw(0.9, 0.2);
        assert!(a.contains(wrap(0.05)));
        assert!(a.contains(wrap(0.9)));
        assert!(!a.contains(wrap(0.2)));
        assert!(!a.contains(wrap(0.5)));
        assert!(Arc::full().contains(wrap(0.123)));
        let empty = Arc::from_raw(0.4, 0.4);
        assert!(empty.is_empty());
        assert!(!empty.contains(wrap(0.4)));
    }

    #[test]
    fn arc_geometry() {
        let a = Arc::from_raw(0.9, 0.2);
        assert!((a.length() - 0.3).abs() < 1e-15);
        assert!((a.midpoint().position() - 0.05).abs() < 1e-15);
        assert_eq!(Arc::full().length(), 1.0);
    }

    proptest! {
        #[test]
        fn wrap_is_idempotent(x in -50.0f64..50.0) {
            let w = wrap(x);
            prop_assert_eq!(wrap(w.position()).position(), w.position());
            prop_assert!(w.position() >= 0.0 && w.position() < 1.0);
        }

        #[test]
        fn circ_dist_is_a_metric(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
            let (pa, pb, pc) = (wrap(a), wrap(b), wrap(c));
            prop_assert!((circ_dist(pa, pb) - circ_dist(pb, pa)).abs() < 1e-15);
            prop_assert!(circ_dist(pa, pb) <= 0.5 + 1e-15);
            prop_assert!(circ_dist(pa, pc) <= circ_dist(pa, pb) + circ_dist(pb, pc) + 1e-12);
        }

        #[test]
        fn arc_contains_start_not_end(s in 0.0f64..1.0, e in 0.0f64..1.0) {
            prop_assume!(s != e);
            let arc = Arc::from_raw(s, e);
            prop_assert!(arc.contains(arc.start));
            prop_assert!(!arc.contains(arc.end));
        }
    }
}
