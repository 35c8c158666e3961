//! Closed-form construction of admissible polylines.
//!
//! [`construct_polyline`] produces, for any feasible first turn point, a
//! path `A = B(0), B(1), ..., B(n), B(n+1) = B` whose turns all lie in
//! `[-phi, phi]`. Off the chord it splits one total rotation into `n`
//! equal turns with [`solve_problem_o`]; on the chord it zigzags.

use serde::{Deserialize, Serialize};

use crate::angle::{oriented_angle, side_of_line, turn_angle, within, LineSide, Point, Vector};
use crate::error::{Error, Result};
use crate::region::{region_contains, Closure, TurnRegion};
use crate::scalar::Scalar;

/// Ordered vertices `B(0) = A, ..., B(n+1) = B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de> + Copy"))]
pub struct Polyline<T> {
    pub vertices: Vec<Point<T>>,
}

impl<T: Scalar> Polyline<T> {
    pub fn new(vertices: Vec<Point<T>>) -> Self {
        Polyline { vertices }
    }

    /// Builds `A, interior..., B`.
    pub fn from_interior(a: Point<T>, interior: &[Point<T>], b: Point<T>) -> Self {
        let mut vertices = Vec::with_capacity(interior.len() + 2);
        vertices.push(a);
        vertices.extend_from_slice(interior);
        vertices.push(b);
        Polyline { vertices }
    }

    pub fn start(&self) -> Point<T> {
        self.vertices[0]
    }

    pub fn end(&self) -> Point<T> {
        *self.vertices.last().expect("nonempty polyline")
    }

    /// `B(1), ..., B(n)`.
    pub fn interior(&self) -> &[Point<T>] {
        let len = self.vertices.len();
        if len < 2 {
            &[]
        } else {
            &self.vertices[1..len - 1]
        }
    }

    pub fn turn_count(&self) -> usize {
        self.vertices.len().saturating_sub(2)
    }

    pub fn length(&self) -> T {
        self.vertices.windows(2).fold(T::zero(), |acc, w| acc + w[0].dist(w[1]))
    }

    /// Turn angles at every interior vertex.
    pub fn turn_angles(&self) -> Result<Vec<T>> {
        self.vertices
            .windows(3)
            .map(|w| turn_angle(w[0], w[1], w[2]).map(|a| a.radians()))
            .collect()
    }
}

/// Counterclockwise rotation by `theta`.
pub fn rotation_matrix<T: Scalar>(theta: T) -> [[T; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

pub fn rotate<T: Scalar>(m: &[[T; 2]; 2], v: Vector<T>) -> Vector<T> {
    Vector::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y)
}

/// Inputs of the equal-turn splitting problem: starting at `C = A + t (G - A)`,
/// reach the segment `[B, G]` in `n` equal turns of `Psi / n` where
/// `Psi = angle(B - G, G - A)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de> + Copy"))]
pub struct ProblemOInput<T> {
    pub a: Point<T>,
    pub b: Point<T>,
    pub g: Point<T>,
    pub t: T,
    pub n: usize,
}

/// Closed-form solution of [`ProblemOInput`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemOSolution<T> {
    /// `B(1) = C` followed by `B(2), ..., B(n)`.
    pub points: Vec<Point<T>>,
    /// Total rotation `Psi`.
    pub psi: T,
    /// Per-vertex turn `Psi / n`.
    pub alpha: T,
    /// Segment scale relative to `|G - A|`.
    pub lambda: T,
    /// Common length `lambda |G - A|` of the `n - 1` inner segments.
    pub segment: T,
}

/// `B(k) = C + lambda |U| sum_{j=1}^{k-1} R(j alpha) U / |U|` with
/// `U = G - A`, `alpha = Psi / n` and
/// `lambda = 2 (1 - t) cos(Psi / 2) sin(alpha / 2) / sin((Psi - alpha) / 2)`.
pub fn solve_problem_o<T: Scalar>(input: &ProblemOInput<T>) -> Result<ProblemOSolution<T>> {
    let ProblemOInput { a, b, g, t, n } = *input;
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "equal-turn split needs n >= 2, got {n}"
        )));
    }
    if !(a.is_finite() && b.is_finite() && g.is_finite() && t.is_finite()) {
        return Err(Error::NonFinite("problem input"));
    }
    if a == b || a == g || b == g {
        return Err(Error::Infeasible("A, B, G must be pairwise distinct".into()));
    }
    if !(t > T::zero() && t < T::one()) {
        return Err(Error::Infeasible(format!("t = {t} outside (0, 1)")));
    }
    let psi = oriented_angle(b - g, g - a)?.radians();
    if !(psi > T::zero() && psi < T::PI()) {
        return Err(Error::Infeasible(format!("total rotation {psi} outside (0, pi)")));
    }
    let u = g - a;
    let c = a + u * t;
    if !(b.dist(g) > c.dist(g)) {
        return Err(Error::Infeasible("|B - G| must exceed |C - G|".into()));
    }
    let l_a = u.norm();
    let u_hat = u * (T::one() / l_a);
    let half = T::lit(0.5);
    let alpha = psi / T::lit(n as f64);
    let lambda =
        T::lit(2.0) * (T::one() - t) * (psi * half).cos() * (alpha * half).sin() / ((psi - alpha) * half).sin();
    let segment = lambda * l_a;

    let mut points = Vec::with_capacity(n);
    points.push(c);
    let mut acc = Vector::zero();
    for k in 2..=n {
        let j = T::lit((k - 1) as f64);
        acc = acc + rotate(&rotation_matrix(j * alpha), u_hat);
        points.push(c + acc * segment);
    }
    Ok(ProblemOSolution {
        points,
        psi,
        alpha,
        lambda,
        segment,
    })
}

/// Turn-by-turn admissibility summary of a polyline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport<T> {
    pub turn_angles: Vec<T>,
    pub max_abs_turn: T,
    pub min_pair_separation: T,
    /// 1-based vertex indices whose turn is zero within tolerance.
    pub zero_turn_indices: Vec<usize>,
    /// 0-based indices `i` where `B(i) == B(i+1)`.
    pub degenerate_edges: Vec<usize>,
    pub ok: bool,
}

/// Measures every turn and separation; `ok` iff all turns lie in
/// `[-phi - tol, phi + tol]` and consecutive vertices are distinct.
pub fn validate_polyline<T: Scalar>(p: &Polyline<T>, phi: T, tol: T) -> ValidationReport<T> {
    let v = &p.vertices;
    let degenerate_edges: Vec<usize> = v
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] == w[1])
        .map(|(i, _)| i)
        .collect();
    let mut turn_angles = Vec::with_capacity(p.turn_count());
    let mut zero_turn_indices = Vec::new();
    let mut turns_ok = true;
    for (i, w) in v.windows(3).enumerate() {
        let angle = turn_angle(w[0], w[1], w[2]).map(|a| a.radians());
        let angle = match angle {
            Ok(a) => a,
            Err(_) => {
                turns_ok = false;
                T::zero()
            }
        };
        if angle.abs() <= tol {
            zero_turn_indices.push(i + 1);
        }
        if !within(angle, -phi, phi, tol) {
            turns_ok = false;
        }
        turn_angles.push(angle);
    }
    let max_abs_turn = turn_angles.iter().fold(T::zero(), |m, a| m.max(a.abs()));
    let mut min_pair_separation = T::infinity();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            min_pair_separation = min_pair_separation.min(v[i].dist(v[j]));
        }
    }
    ValidationReport {
        turn_angles,
        max_abs_turn,
        min_pair_separation,
        zero_turn_indices,
        ok: turns_ok && degenerate_edges.is_empty() && v.len() >= 2,
        degenerate_edges,
    }
}

/// Every interior vertex lies in `S(A, B, n phi)` (`cl S(A, B, phi)` with
/// `tol` when `n = 1`) and all vertices are pairwise distinct.
pub fn vertex_region_check<T: Scalar>(p: &Polyline<T>, phi: T, tol: T) -> bool {
    let v = &p.vertices;
    let n = p.turn_count();
    if n == 0 {
        return false;
    }
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] == v[j] {
                return false;
            }
        }
    }
    let (span, closure, tol) = if n == 1 {
        (phi, Closure::Closed, tol)
    } else {
        (phi * T::lit(n as f64), Closure::Open, T::zero())
    };
    let region = match TurnRegion::new(p.start(), p.end(), span) {
        Ok(r) => r,
        Err(_) => return false,
    };
    p.interior().iter().all(|&c| region_contains(&region, c, closure, tol))
}

/// Maximum number of halvings of the extension parameter before giving up.
pub const MAX_SHRINK_STEPS: usize = 60;

/// An admissible `n`-turn polyline from `a` to `b` whose first turn point
/// is exactly `b1`.
///
/// Requires `n phi < pi`, and `b1` in `S(A, B, n phi)` for `n >= 2` or in
/// `cl S(A, B, phi) \ {A, B}` (within `tol`) for `n = 1`.
pub fn construct_polyline<T: Scalar>(
    a: Point<T>,
    b: Point<T>,
    n: usize,
    phi: T,
    b1: Point<T>,
    tol: T,
) -> Result<Polyline<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(phi > T::zero()) {
        return Err(Error::InvalidParameter(format!("phi must be positive, got {phi}")));
    }
    let span = phi * T::lit(n as f64);
    if span >= T::PI() {
        return Err(Error::UnsupportedRegime(span.to_f64().unwrap_or(f64::NAN)));
    }
    if n == 1 {
        let region = TurnRegion::new(a, b, phi)?;
        if !region_contains(&region, b1, Closure::Closed, tol) {
            return Err(Error::InfeasibleStart("B1 not in cl S(A, B, phi) \\ {A, B}".into()));
        }
        return Ok(Polyline::new(vec![a, b1, b]));
    }
    let region = TurnRegion::new(a, b, span)?;
    if !region_contains(&region, b1, Closure::Open, T::zero()) {
        return Err(Error::InfeasibleStart("B1 not in S(A, B, n phi)".into()));
    }
    match side_of_line(a, b, b1)? {
        LineSide::OnLine => Ok(zigzag_from_chord(a, b, n, phi, b1)),
        LineSide::StrictRight => off_chord(a, b, n, span, b1),
        LineSide::StrictLeft => {
            let mirror = |p: Point<T>| reflect(a, b, p);
            let path = off_chord(a, b, n, span, mirror(b1))?;
            let mut vertices: Vec<Point<T>> = path.vertices.into_iter().map(mirror).collect();
            let last = vertices.len() - 1;
            vertices[0] = a;
            vertices[1] = b1;
            vertices[last] = b;
            Ok(Polyline::new(vertices))
        }
    }
}

/// Mirror image of `p` in the line through `a` and `b`.
fn reflect<T: Scalar>(a: Point<T>, b: Point<T>, p: Point<T>) -> Point<T> {
    let d = b - a;
    let e = d * (T::one() / d.norm());
    let v = p - a;
    let along = e * e.dot(v);
    a + along * T::lit(2.0) - v
}

/// The equal-turn instance behind an off-chord first turn point.
///
/// For `b1` strictly left of `a -> b` the instance is built for the mirror
/// image of `b1` in the line `a, b`, and the flag is `true`.
pub fn off_chord_instance<T: Scalar>(
    a: Point<T>,
    b: Point<T>,
    n: usize,
    phi: T,
    b1: Point<T>,
) -> Result<(ProblemOInput<T>, bool)> {
    let span = phi * T::lit(n as f64);
    match side_of_line(a, b, b1)? {
        LineSide::OnLine => Err(Error::InfeasibleStart("B1 lies on the line A, B".into())),
        LineSide::StrictRight => Ok((extension(a, b, n, span, b1)?, false)),
        LineSide::StrictLeft => Ok((extension(a, b, n, span, reflect(a, b, b1))?, true)),
    }
}

/// `b1` strictly right of `a -> b`: extend past `b1` to `G` until the total
/// rotation at `G` stays below `span`.
fn extension<T: Scalar>(a: Point<T>, b: Point<T>, n: usize, span: T, b1: Point<T>) -> Result<ProblemOInput<T>> {
    let s = b1.dist(b).min(b1.dist(a));
    let out = b1 - a;
    let mut ext = s / (T::lit(4.0) * out.norm());
    for _ in 0..=MAX_SHRINK_STEPS {
        let g = b1 + out * ext;
        let rotation = oriented_angle(b - g, g - a)?.radians();
        if g.dist(b1) < s * T::lit(0.5) && rotation > T::zero() && rotation < span {
            return Ok(ProblemOInput {
                a,
                b,
                g,
                t: T::one() / (T::one() + ext),
                n,
            });
        }
        ext = ext * T::lit(0.5);
    }
    Err(Error::InfeasibleStart(format!(
        "no extension point found after {MAX_SHRINK_STEPS} halvings"
    )))
}

/// Splits the rotation at the extension point into equal turns.
fn off_chord<T: Scalar>(a: Point<T>, b: Point<T>, n: usize, span: T, b1: Point<T>) -> Result<Polyline<T>> {
    let sol = solve_problem_o(&extension(a, b, n, span, b1)?)?;
    let mut vertices = Vec::with_capacity(n + 2);
    vertices.push(a);
    vertices.push(b1);
    vertices.extend_from_slice(&sol.points[1..]);
    vertices.push(b);
    Ok(Polyline::new(vertices))
}

/// `b1` on the open chord: leave `b1` at heading `+phi/2`, then alternate
/// headings `-phi/2`, `+phi/2`, ... so that every turn after the first is
/// `+-phi`. Segment lengths cancel the lateral drift and land on `b`.
fn zigzag_from_chord<T: Scalar>(_a: Point<T>, b: Point<T>, n: usize, phi: T, b1: Point<T>) -> Polyline<T> {
    let to_b = b - b1;
    let dist = to_b.norm();
    let e = to_b * (T::one() / dist);
    let left = Vector::new(-e.y, e.x);
    let half = phi * T::lit(0.5);
    let (sin_h, cos_h) = half.sin_cos();
    let up = e * cos_h + left * sin_h;
    let down = e * cos_h - left * sin_h;
    let (len_up, len_down) = if n.is_multiple_of(2) {
        let l = dist / (T::lit(n as f64) * cos_h);
        (l, l)
    } else {
        (
            dist / (T::lit((n + 1) as f64) * cos_h),
            dist / (T::lit((n - 1) as f64) * cos_h),
        )
    };
    let mut vertices = Vec::with_capacity(n + 2);
    vertices.push(_a);
    vertices.push(b1);
    let mut cur = b1;
    for i in 1..n {
        cur = if i % 2 == 1 {
            cur + up * len_up
        } else {
            cur + down * len_down
        };
        vertices.push(cur);
    }
    vertices.push(b);
    Polyline::new(vertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    #[test]
    fn rotations() {
        let id = rotation_matrix(0.0);
        assert_eq!(id, [[1.0, -0.0], [0.0, 1.0]]);
        let q = rotate(&rotation_matrix(FRAC_PI_2), p(1.0, 0.0));
        assert!(q.dist(p(0.0, 1.0)) < 1e-15);
    }

    #[test]
    fn problem_o_reference_instance() {
        let g = p(2.0, 0.0);
        let b = g + p(FRAC_PI_3.cos(), FRAC_PI_3.sin()) * 2.0;
        let input = ProblemOInput {
            a: p(0.0, 0.0),
            b,
            g,
            t: 0.5,
            n: 3,
        };
        let sol = solve_problem_o(&input).unwrap();
        assert!((sol.psi - FRAC_PI_3).abs() < 1e-12);
        let last = *sol.points.last().unwrap();
        assert!((last.dist(g) - 1.0).abs() < 1e-9);
        let path = Polyline::from_interior(input.a, &sol.points, b);
        for t in path.turn_angles().unwrap() {
            assert!((t - FRAC_PI_3 / 3.0).abs() < 1e-9);
        }
        let seg: Vec<f64> = sol.points.windows(2).map(|w| w[0].dist(w[1])).collect();
        assert!(seg.iter().all(|l| (l - sol.segment).abs() < 1e-9));
        // lambda <= 2 (1 - t) / (n - 1), tight as Psi -> 0
        assert!(sol.lambda <= 2.0 * 0.5 / 2.0 && sol.lambda > 2.0 * 0.5 / 3.0);
    }

    #[test]
    fn problem_o_rejects_bad_input() {
        let base = ProblemOInput {
            a: p(0.0, 0.0),
            b: p(3.0, 2.0),
            g: p(2.0, 0.0),
            t: 0.5,
            n: 3,
        };
        assert!(solve_problem_o(&base).is_ok());
        assert!(solve_problem_o(&ProblemOInput { n: 1, ..base }).is_err());
        assert!(solve_problem_o(&ProblemOInput { t: 1.0, ..base }).is_err());
        assert!(solve_problem_o(&ProblemOInput { g: base.a, ..base }).is_err());
        // clockwise total rotation
        assert!(solve_problem_o(&ProblemOInput {
            b: p(3.0, -2.0),
            ..base
        })
        .is_err());
        // B too close to G
        assert!(solve_problem_o(&ProblemOInput {
            b: p(2.1, 0.3),
            t: 0.1,
            ..base
        })
        .is_err());
    }

    #[test]
    fn single_turn_paths() {
        let (a, b) = (p(0.0, -1.0), p(0.0, 1.0));
        let path = construct_polyline(a, b, 1, FRAC_PI_2, p(1.0, 0.0), 1e-9).unwrap();
        assert_eq!(path.vertices, vec![a, p(1.0, 0.0), b]);
        assert!(validate_polyline(&path, FRAC_PI_2, 1e-9).ok);
        assert!(construct_polyline(a, b, 1, FRAC_PI_2, a, 1e-9).is_err());
        assert!(construct_polyline(a, b, 1, FRAC_PI_2, p(2.0, 0.0), 1e-9).is_err());
        // on the chord: straight, zero turn flagged
        let straight = construct_polyline(a, b, 1, 0.3, p(0.0, 0.0), 1e-9).unwrap();
        let report = validate_polyline(&straight, 0.3, 1e-9);
        assert!(report.ok);
        assert_eq!(report.zero_turn_indices, vec![1]);
    }

    #[test]
    fn three_turns_off_chord() {
        let (a, b) = (p(0.0, -1.0), p(0.0, 1.0));
        let phi = FRAC_PI_6;
        for b1 in [p(0.5, 0.0), p(-0.3, 0.6), p(0.01, -0.9), p(-0.7, -0.1)] {
            let path = construct_polyline(a, b, 3, phi, b1, 1e-9).unwrap();
            assert_eq!(path.vertices[1], b1);
            let report = validate_polyline(&path, phi, 1e-9);
            assert!(report.ok, "{report:?}");
            assert!(report.zero_turn_indices.is_empty());
            assert!(vertex_region_check(&path, phi, 1e-9));
            let side = side_of_line(a, b, b1).unwrap();
            for &v in path.interior() {
                assert_eq!(side_of_line(a, b, v).unwrap(), side);
            }
        }
    }

    #[test]
    fn off_chord_instance_reproduces_path() {
        let (a, b) = (p(0.0, -1.0), p(0.0, 1.0));
        let phi = FRAC_PI_6;
        for b1 in [p(0.4, 0.2), p(-0.4, 0.2)] {
            let (input, mirrored) = off_chord_instance(a, b, 3, phi, b1).unwrap();
            assert_eq!(mirrored, b1.x < 0.0);
            let sol = solve_problem_o(&input).unwrap();
            assert!(sol.points[0].dist(p(0.4, 0.2)) < 1e-12);
            let path = construct_polyline(a, b, 3, phi, b1, 1e-9).unwrap();
            let sign = if mirrored { -1.0 } else { 1.0 };
            for (q, v) in sol.points.iter().zip(&path.vertices[1..]).skip(1) {
                assert!(q.dist(p(sign * v.x, v.y)) < 1e-12);
            }
        }
        assert!(off_chord_instance(a, b, 3, phi, p(0.0, 0.5)).is_err());
    }

    #[test]
    fn chord_zigzag() {
        let (a, b) = (p(1.0, 1.0), p(4.0, 5.0));
        let phi = 0.3;
        for n in 2..=8 {
            let b1 = a.lerp(b, 0.37);
            let path = construct_polyline(a, b, n, phi, b1, 1e-9).unwrap();
            assert_eq!(path.turn_count(), n);
            let report = validate_polyline(&path, phi, 1e-9);
            assert!(report.ok, "n = {n}: {report:?}");
            assert!(report.zero_turn_indices.is_empty());
            assert!(vertex_region_check(&path, phi, 1e-9), "n = {n}");
        }
        let two = construct_polyline(a, b, 2, phi, a.lerp(b, 0.5), 1e-9).unwrap();
        let turns = two.turn_angles().unwrap();
        assert!((turns[0] - phi / 2.0).abs() < 1e-9 && (turns[1] + phi).abs() < 1e-9);
    }

    #[test]
    fn construct_rejects() {
        let (a, b) = (p(0.0, -1.0), p(0.0, 1.0));
        assert!(matches!(
            construct_polyline(a, b, 4, 0.8, p(0.1, 0.0), 1e-9),
            Err(Error::UnsupportedRegime(_))
        ));
        assert!(matches!(
            construct_polyline(a, b, 2, 0.4, p(3.0, 0.0), 1e-9),
            Err(Error::InfeasibleStart(_))
        ));
        assert!(matches!(
            construct_polyline(a, b, 2, 0.4, p(0.0, 2.0), 1e-9),
            Err(Error::InfeasibleStart(_))
        ));
    }

    #[test]
    fn validation_flags() {
        let straight = Polyline::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)]);
        let r = validate_polyline(&straight, 0.1, 1e-9);
        assert!(r.ok && r.zero_turn_indices == vec![1]);
        let sharp = Polyline::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0 + 0.6f64.cos(), 0.6f64.sin())]);
        assert!(!validate_polyline(&sharp, 0.5, 1e-9).ok);
        let dup = Polyline::new(vec![p(0.0, 0.0), p(0.0, 0.0), p(1.0, 0.0)]);
        let r = validate_polyline(&dup, 1.0, 1e-9);
        assert!(!r.ok && r.degenerate_edges == vec![0]);
    }

    #[test]
    fn region_check_rejects_outside_vertex() {
        let bad = Polyline::new(vec![p(0.0, -1.0), p(3.0, 0.0), p(2.0, 0.5), p(0.0, 1.0)]);
        assert!(!vertex_region_check(&bad, 0.3, 1e-9));
        let good = Polyline::new(vec![p(0.0, -1.0), p(0.1, -0.5), p(0.1, 0.5), p(0.0, 1.0)]);
        let phi = validate_polyline(&good, 1.0, 0.0).max_abs_turn;
        assert!(vertex_region_check(&good, phi, 1e-9));
    }
}
