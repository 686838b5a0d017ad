//! Exact-sign orientation and in-circle predicates.
//!
//! Both are adaptive: a floating-point filter answers most queries and
//! expansion arithmetic takes over when the filter cannot certify the sign.
//! Only the sign of the returned value is meaningful.

use robust::Coord;

#[inline]
fn c(p: [f64; 2]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

/// Positive if `a, b, p` turn counterclockwise, negative if clockwise, zero
/// if collinear.
#[inline]
pub fn orient(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    robust::orient2d(c(a), c(b), c(p))
}

/// For counterclockwise `a, b, c`: positive if `d` is strictly inside their
/// circumcircle, negative if strictly outside, zero if co-circular.
#[inline]
pub fn incircle(a: [f64; 2], b: [f64; 2], c_: [f64; 2], d: [f64; 2]) -> f64 {
    robust::incircle(c(a), c(b), c(c_), c(d))
}

/// Lexicographic strict order on coordinates.
#[inline]
pub(crate) fn lex_less(a: [f64; 2], b: [f64; 2]) -> bool {
    a[0] < b[0] || (a[0] == b[0] && a[1] < b[1])
}

/// For a point `p` known to be collinear with `u` and `v`: whether it lies
/// strictly between them.
#[inline]
pub(crate) fn strictly_between(u: [f64; 2], v: [f64; 2], p: [f64; 2]) -> bool {
    (lex_less(u, p) && lex_less(p, v)) || (lex_less(v, p) && lex_less(p, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs() {
        assert!(orient([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]) > 0.0);
        assert!(orient([0.0, 0.0], [0.0, 1.0], [1.0, 0.0]) < 0.0);
        assert_eq!(orient([0.0, 0.0], [1.0, 1.0], [3.0, 3.0]), 0.0);
        let (a, b, c) = ([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]);
        assert!(incircle(a, b, c, [0.5, 0.5]) > 0.0);
        assert!(incircle(a, b, c, [2.0, 2.0]) < 0.0);
        assert_eq!(incircle(a, b, c, [1.0, 1.0]), 0.0);
    }

    #[test]
    fn near_degenerate_orientation_is_exact() {
        // Points nearly on the line y = x, offset by one ulp.
        let a = [0.5, 0.5];
        let b = [12.0, 12.0];
        let p = [24.0, f64::from_bits(24f64.to_bits() + 1)];
        assert!(orient(a, b, p) > 0.0);
        assert_eq!(orient(a, b, [24.0, 24.0]), 0.0);
    }

    #[test]
    fn betweenness() {
        assert!(strictly_between([0.0, 0.0], [2.0, 2.0], [1.0, 1.0]));
        assert!(!strictly_between([0.0, 0.0], [2.0, 2.0], [3.0, 3.0]));
        assert!(!strictly_between([0.0, 0.0], [2.0, 2.0], [2.0, 2.0]));
    }
}
