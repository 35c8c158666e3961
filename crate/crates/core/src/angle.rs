//! Oriented-angle arithmetic and line-side predicates.
//!
//! **Orientation convention.** Angles are measured *clockwise-positive*:
//! `oriented_angle(u, v)` is the clockwise rotation taking the direction of
//! `u` onto the direction of `v`, normalized to `(-pi, pi]`. Consequently
//! `oriented_angle(u, v) > 0` exactly when `det[u; v] < 0`, and the turn
//! angle at a polyline vertex is positive for a left (counterclockwise)
//! turn. Most geometry libraries use the opposite sign; every inequality in
//! this crate relies on this one.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point (or free vector) in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[T; 2]", into = "[T; 2]")]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de> + Copy"))]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

/// Vectors and points share one representation.
pub type Vector<T> = Point<T>;

impl<T> From<[T; 2]> for Point<T> {
    fn from([x, y]: [T; 2]) -> Self {
        Point { x, y }
    }
}

impl<T> From<Point<T>> for [T; 2] {
    fn from(p: Point<T>) -> Self {
        [p.x, p.y]
    }
}

impl<T: Scalar> Point<T> {
    pub const fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn zero() -> Self {
        Point::new(T::zero(), T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    /// `det[self; other] = x1*y2 - y1*x2`.
    pub fn det(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    /// Euclidean length `|self|`.
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    /// Max-norm `||self|| = max(|x|, |y|)`.
    pub fn sup_norm(self) -> T {
        self.x.abs().max(self.y.abs())
    }

    pub fn dist(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn sup_dist(self, other: Self) -> T {
        (self - other).sup_norm()
    }

    pub fn is_zero(&self) -> bool {
        self.x == T::zero() && self.y == T::zero()
    }

    /// Lexicographic total order on `(x, y)`.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        let c = self.x.partial_cmp(&other.x).unwrap_or(std::cmp::Ordering::Equal);
        c.then(self.y.partial_cmp(&other.y).unwrap_or(std::cmp::Ordering::Equal))
    }

    pub fn midpoint(self, other: Self) -> Self {
        (self + other) * T::lit(0.5)
    }

    pub fn lerp(self, other: Self, t: T) -> Self {
        self + (other - self) * t
    }
}

impl<T: Scalar> Add for Point<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Point<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Point::new(self.x * s, self.y * s)
    }
}

impl<T: Scalar> Neg for Point<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Point::new(-self.x, -self.y)
    }
}

/// An angle normalized to `(-pi, pi]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrientedAngle<T>(T);

impl<T: Scalar> OrientedAngle<T> {
    pub fn zero() -> Self {
        OrientedAngle(T::zero())
    }

    pub fn pi() -> Self {
        OrientedAngle(T::PI())
    }

    /// Reduces an arbitrary finite real into `(-pi, pi]`.
    pub fn new(radians: T) -> Result<Self> {
        reduce_2pi(radians)
    }

    pub fn radians(self) -> T {
        self.0
    }

    pub fn abs(self) -> T {
        self.0.abs()
    }
}

impl<T: Scalar> Add for OrientedAngle<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        angle_add(self, o)
    }
}

fn reduce_finite<T: Scalar>(x: T) -> T {
    let pi = T::PI();
    let two_pi = pi + pi;
    let mut r = x - two_pi * ((x - pi) / two_pi).ceil();
    // ceil can land one period off after rounding
    if r <= -pi {
        r = r + two_pi;
    }
    if r > pi {
        r = r - two_pi;
    }
    if r <= -pi {
        r = pi;
    }
    r
}

/// `[x]_{2pi}`: the unique representative of `x` in `(-pi, pi]`.
pub fn reduce_2pi<T: Scalar>(x: T) -> Result<OrientedAngle<T>> {
    if !x.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    Ok(OrientedAngle(reduce_finite(x)))
}

/// Angle addition followed by reduction, `a (+) b = [a + b]_{2pi}`.
pub fn angle_add<T: Scalar>(a: OrientedAngle<T>, b: OrientedAngle<T>) -> OrientedAngle<T> {
    OrientedAngle(reduce_finite(a.0 + b.0))
}

/// Clockwise-positive angle from `u` to `v` in `(-pi, pi]`.
///
/// A zero vector on either side yields `0`. Opposite vectors yield `pi`.
pub fn oriented_angle<T: Scalar>(u: Vector<T>, v: Vector<T>) -> Result<OrientedAngle<T>> {
    if !u.is_finite() || !v.is_finite() {
        return Err(Error::NonFinite("vector"));
    }
    if u.is_zero() || v.is_zero() {
        return Ok(OrientedAngle::zero());
    }
    // atan2 of (|sin|, cos) carries the arccos magnitude without its
    // precision loss near 0 and pi; the sign is that of -det[u; v].
    let a = (-u.det(v)).atan2(u.dot(v));
    Ok(OrientedAngle(if a <= -T::PI() { T::PI() } else { a }))
}

/// Turn angle at `cur`: `oriented_angle(next - cur, cur - prev)`.
pub fn turn_angle<T: Scalar>(prev: Point<T>, cur: Point<T>, next: Point<T>) -> Result<OrientedAngle<T>> {
    if prev == cur || cur == next {
        return Err(Error::DegenerateEdge);
    }
    oriented_angle(next - cur, cur - prev)
}

/// Position of a point relative to a directed line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LineSide {
    StrictRight,
    StrictLeft,
    OnLine,
}

/// Classifies `c` against the directed line `a -> b`.
///
/// `det[b - a; c - a]` within `tol * max(1, |b - a| |c - a|)` counts as
/// collinear.
pub fn side_of_line_tol<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, tol: T) -> Result<LineSide> {
    if !a.is_finite() || !b.is_finite() || !c.is_finite() {
        return Err(Error::NonFinite("point"));
    }
    if a == b {
        return Err(Error::DegenerateLine);
    }
    let ab = b - a;
    let ac = c - a;
    let det = ab.det(ac);
    let scale = T::one().max(ab.norm() * ac.norm());
    Ok(if det.abs() <= tol * scale {
        LineSide::OnLine
    } else if det < T::zero() {
        LineSide::StrictRight
    } else {
        LineSide::StrictLeft
    })
}

/// [`side_of_line_tol`] with the default side tolerance.
pub fn side_of_line<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> Result<LineSide> {
    side_of_line_tol(a, b, c, T::default_side_tol())
}

/// Intersection of line `a, e` with line `b, d` by Cramer's rule.
pub fn line_intersection<T: Scalar>(a: Point<T>, e: Point<T>, b: Point<T>, d: Point<T>) -> Result<Point<T>> {
    if !(a.is_finite() && e.is_finite() && b.is_finite() && d.is_finite()) {
        return Err(Error::NonFinite("point"));
    }
    // a + u (e - a) = b + v (d - b)  <=>  u (e - a) + v (b - d) = b - a
    let c1 = e - a;
    let c2 = b - d;
    let rhs = b - a;
    let delta = c1.det(c2);
    let scale = c1.norm() * c2.norm();
    if scale == T::zero() || delta.abs() <= T::default_side_tol() * scale {
        return Err(Error::ParallelLines);
    }
    let delta1 = rhs.det(c2);
    Ok(a + c1 * (delta1 / delta))
}

/// Closed-triangle membership: `d` lies right of or on each of the directed
/// edges `a -> b`, `b -> c`, `c -> a`.
///
/// The triangle is expected with `c` strictly right of `a -> b`; a
/// triangle given in the opposite orientation is reoriented first.
pub fn in_triangle<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> Result<bool> {
    in_triangle_tol(a, b, c, d, T::default_side_tol())
}

pub fn in_triangle_tol<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>, tol: T) -> Result<bool> {
    let (a, b) = match side_of_line_tol(a, b, c, tol) {
        Ok(LineSide::StrictRight) => (a, b),
        Ok(LineSide::StrictLeft) => (b, a),
        Ok(LineSide::OnLine) | Err(Error::DegenerateLine) => return Err(Error::DegenerateTriangle),
        Err(e) => return Err(e),
    };
    for (p, q) in [(a, b), (b, c), (c, a)] {
        if side_of_line_tol(p, q, d, tol)? == LineSide::StrictLeft {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cumulative turning bounds over `alpha_{j+1}, ..., alpha_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleBounds<T> {
    /// Minimum over the prefix sums, `0` included.
    pub mu_lo: T,
    /// Maximum over the prefix sums, `0` included.
    pub mu_hi: T,
    /// Sum of absolute values.
    pub sigma: T,
}

/// Bounds `(mu_lo, mu_hi, sigma)` for `1 <= i <= n`, `0 <= j <= i - 1`,
/// where `alphas[k - 1]` holds `alpha_k`.
pub fn cumulative_bounds<T: Scalar>(alphas: &[T], i: usize, j: usize) -> Result<AngleBounds<T>> {
    let n = alphas.len();
    if i < 1 || i > n || j >= i {
        return Err(Error::IndexOutOfRange(format!("i = {i}, j = {j}, n = {n}")));
    }
    let mut sum = T::zero();
    let mut bounds = AngleBounds {
        mu_lo: T::zero(),
        mu_hi: T::zero(),
        sigma: T::zero(),
    };
    for &a in &alphas[j..i] {
        sum = sum + a;
        bounds.mu_lo = bounds.mu_lo.min(sum);
        bounds.mu_hi = bounds.mu_hi.max(sum);
        bounds.sigma = bounds.sigma + a.abs();
    }
    Ok(bounds)
}

/// Whether `value` lies in `[lo - tol, hi + tol]`.
pub(crate) fn within<T: Scalar>(value: T, lo: T, hi: T, tol: T) -> bool {
    value >= lo - tol && value <= hi + tol
}

/// Convenience constructor used throughout the tests and the CLI.
pub fn pt<T: Scalar>(x: T, y: T) -> Point<T> {
    Point::new(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    #[test]
    fn example_angles() {
        assert_eq!(oriented_angle(p(0.0, 1.0), p(1.0, 0.0)).unwrap().radians(), FRAC_PI_2);
        assert_eq!(oriented_angle(p(1.0, 0.0), p(0.0, 1.0)).unwrap().radians(), -FRAC_PI_2);
        assert_eq!(oriented_angle(p(1.0, 0.0), p(-1.0, 0.0)).unwrap().radians(), PI);
        assert_eq!(oriented_angle(p(-1.0, 0.0), p(1.0, 0.0)).unwrap().radians(), PI);
        assert!(oriented_angle(p(-1.0, 3.0), p(-5.0, 2.0)).unwrap().radians() < 0.0);
        assert_eq!(oriented_angle(p(2.0, 4.0), p(1.0, 2.0)).unwrap().radians(), 0.0);
    }

    #[test]
    fn zero_vector_is_zero_angle() {
        assert_eq!(oriented_angle(p(0.0, 0.0), p(1.0, 2.0)).unwrap().radians(), 0.0);
        assert_eq!(oriented_angle(p(3.0, -1.0), p(0.0, 0.0)).unwrap().radians(), 0.0);
    }

    #[test]
    fn non_finite_rejected() {
        assert_eq!(
            oriented_angle(p(f64::NAN, 0.0), p(1.0, 0.0)),
            Err(Error::NonFinite("vector"))
        );
        assert!(reduce_2pi(f64::INFINITY).is_err());
    }

    #[test]
    fn reduction_examples() {
        assert!((reduce_2pi(1.5 * PI).unwrap().radians() + FRAC_PI_2).abs() < 1e-15);
        assert_eq!(reduce_2pi(-5.0 * PI).unwrap().radians(), PI);
        assert_eq!(reduce_2pi(0.3).unwrap().radians(), 0.3);
        assert_eq!(reduce_2pi(-PI).unwrap().radians(), PI);
        assert_eq!(reduce_2pi(PI).unwrap().radians(), PI);
    }

    #[test]
    fn addition_rules() {
        let pi = OrientedAngle::<f64>::pi();
        assert_eq!(angle_add(pi, pi).radians(), 0.0);
        let a = reduce_2pi(1.0).unwrap();
        assert!((angle_add(pi, a).radians() - (1.0 - PI)).abs() < 1e-15);
        assert_eq!(angle_add(OrientedAngle::zero(), a), a);
    }

    #[test]
    fn turn_angles() {
        let t = |a, b, c| turn_angle(a, b, c).unwrap().radians();
        assert_eq!(t(p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)), 0.0);
        assert_eq!(t(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)), FRAC_PI_2);
        assert_eq!(t(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 0.0)), PI);
        assert_eq!(
            turn_angle(p(0.0, 0.0), p(0.0, 0.0), p(1.0, 0.0)),
            Err(Error::DegenerateEdge)
        );
    }

    #[test]
    fn sides() {
        let a = p(0.0, -1.0);
        let b = p(0.0, 1.0);
        assert_eq!(side_of_line(a, b, p(1.0, 0.0)).unwrap(), LineSide::StrictRight);
        assert_eq!(side_of_line(a, b, p(-1.0, 0.0)).unwrap(), LineSide::StrictLeft);
        assert_eq!(side_of_line(a, b, p(0.0, 0.25)).unwrap(), LineSide::OnLine);
        assert_eq!(side_of_line(a, a, p(1.0, 0.0)), Err(Error::DegenerateLine));
    }

    #[test]
    fn intersections() {
        let c = line_intersection(p(0.0, 0.0), p(1.0, 1.0), p(2.0, 0.0), p(1.0, 1.0)).unwrap();
        assert!((c - p(1.0, 1.0)).norm() < 1e-15);
        assert_eq!(
            line_intersection(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(1.0, 1.0)),
            Err(Error::ParallelLines)
        );
    }

    #[test]
    fn triangle() {
        let (a, b, c) = (p(0.0, -1.0), p(0.0, 1.0), p(1.0, 0.0));
        for v in [a, b, c] {
            assert!(in_triangle(a, b, c, v).unwrap());
        }
        assert!(in_triangle(a, b, c, p(1.0 / 3.0, 0.0)).unwrap());
        assert!(!in_triangle(a, b, c, p(10.0, 10.0)).unwrap());
        // reoriented triangle gives the same answer
        assert!(in_triangle(b, a, c, p(1.0 / 3.0, 0.0)).unwrap());
        assert_eq!(
            in_triangle(a, b, p(0.0, 3.0), p(0.0, 0.0)),
            Err(Error::DegenerateTriangle)
        );
    }

    #[test]
    fn bounds_example() {
        let alphas = [-1.0, 1.0, 1.0];
        assert_eq!(cumulative_bounds(&alphas, 3, 1).unwrap().mu_hi, 2.0);
        assert_eq!(cumulative_bounds(&alphas, 3, 0).unwrap().mu_hi, 1.0);
        let b = cumulative_bounds(&alphas, 3, 0).unwrap();
        assert_eq!((b.mu_lo, b.sigma), (-1.0, 3.0));
        let z = cumulative_bounds(&[0.0; 4], 4, 2).unwrap();
        assert_eq!((z.mu_lo, z.mu_hi, z.sigma), (0.0, 0.0, 0.0));
        assert!(cumulative_bounds(&alphas, 4, 0).is_err());
        assert!(cumulative_bounds(&alphas, 2, 2).is_err());
        assert!(cumulative_bounds(&alphas, 0, 0).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let a = oriented_angle(Point::<f32>::new(0.0, 1.0), Point::new(1.0, 0.0)).unwrap();
        assert!((a.radians() - std::f32::consts::FRAC_PI_2).abs() < 1e-6);
    }
}
