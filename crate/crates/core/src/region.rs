//! Turn-feasibility regions `S(A, B, phi)` and direction cones.
//!
//! Every general-position membership test goes through the similarity
//! transform sending `A -> (0, -1)` and `B -> (0, 1)`, where the angle
//! `angle(B - C, C - A)` reduces to the scalar function [`psi`].

use serde::{Deserialize, Serialize};

use crate::angle::{oriented_angle, side_of_line_tol, LineSide, OrientedAngle, Point, Vector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Open (`S`) or closed (`cl S`) variant of a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Closure {
    Open,
    Closed,
}

/// Right (`c1 >= 0` in the canonical frame) or left part of a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    Right,
    Left,
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de> + Copy"))]
pub struct Rect<T> {
    pub min: Point<T>,
    pub max: Point<T>,
}

impl<T: Scalar> Rect<T> {
    pub fn contains(&self, p: Point<T>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn expand(&self, margin: T) -> Self {
        let m = Point::new(margin, margin);
        Rect {
            min: self.min - m,
            max: self.max + m,
        }
    }

    pub fn diagonal(&self) -> T {
        self.min.dist(self.max)
    }

    fn hull(points: impl IntoIterator<Item = Point<T>>) -> Self {
        let mut it = points.into_iter();
        let first = it.next().expect("hull of at least one point");
        it.fold(Rect { min: first, max: first }, |r, p| Rect {
            min: Point::new(r.min.x.min(p.x), r.min.y.min(p.y)),
            max: Point::new(r.max.x.max(p.x), r.max.y.max(p.y)),
        })
    }
}

/// Similarity transform `C = scale * W * C_bar + midpoint`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalFrame<T> {
    /// Columns are `E1` (right normal of `A -> B`) and `E2` (unit `A -> B`).
    pub rotation: [[T; 2]; 2],
    pub midpoint: Point<T>,
    pub scale: T,
}

impl<T: Scalar> CanonicalFrame<T> {
    pub fn new(a: Point<T>, b: Point<T>) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite("point"));
        }
        if a == b {
            return Err(Error::DegenerateLine);
        }
        let d = b - a;
        let len = d.norm();
        let e2 = d * (T::one() / len);
        let e1 = Vector::new(e2.y, -e2.x);
        Ok(CanonicalFrame {
            rotation: [[e1.x, e2.x], [e1.y, e2.y]],
            midpoint: a.midpoint(b),
            scale: len * T::lit(0.5),
        })
    }

    fn e1(&self) -> Vector<T> {
        Vector::new(self.rotation[0][0], self.rotation[1][0])
    }

    fn e2(&self) -> Vector<T> {
        Vector::new(self.rotation[0][1], self.rotation[1][1])
    }

    /// `C_bar = (1 / scale) W^T (C - midpoint)`.
    pub fn to_canonical(&self, c: Point<T>) -> Point<T> {
        let v = c - self.midpoint;
        Point::new(self.e1().dot(v), self.e2().dot(v)) * (T::one() / self.scale)
    }

    pub fn from_canonical(&self, c: Point<T>) -> Point<T> {
        (self.e1() * c.x + self.e2() * c.y) * self.scale + self.midpoint
    }
}

/// Canonical image of `c` in the frame of the chord `a -> b`.
pub fn to_canonical<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> Result<Point<T>> {
    Ok(CanonicalFrame::new(a, b)?.to_canonical(c))
}

fn canonical_endpoint_distance<T: Scalar>(c: Point<T>) -> T {
    let lo = Point::new(T::zero(), -T::one());
    let hi = Point::new(T::zero(), T::one());
    c.dist(lo).min(c.dist(hi))
}

/// `u(C) = cos Psi(C) = (1 - c1^2 - c2^2) / sqrt((1 + c1^2 + c2^2)^2 - 4 c2^2)`.
pub fn psi_cosine<T: Scalar>(c: Point<T>) -> Result<T> {
    let r2 = c.x * c.x + c.y * c.y;
    let one = T::one();
    let den2 = (one + r2) * (one + r2) - T::lit(4.0) * c.y * c.y;
    if canonical_endpoint_distance(c) <= T::default_side_tol() || den2 <= T::zero() {
        return Err(Error::SingularPoint);
    }
    Ok(((one - r2) / den2.sqrt()).max(-one).min(one))
}

/// `Psi(C) = angle((0, 1) - C, C - (0, -1))` in the canonical frame.
///
/// Evaluated as `sign(c1) * atan2(2|c1|, 1 - c1^2 - c2^2)`, which equals
/// `sign(c1) * arccos u(C)` with `sign(0) = 1`.
pub fn psi<T: Scalar>(c: Point<T>) -> Result<OrientedAngle<T>> {
    if !c.is_finite() {
        return Err(Error::NonFinite("point"));
    }
    if canonical_endpoint_distance(c) <= T::default_side_tol() {
        return Err(Error::SingularPoint);
    }
    let r2 = c.x * c.x + c.y * c.y;
    let mag = (T::lit(2.0) * c.x.abs()).atan2(T::one() - r2);
    let signed = if c.x >= T::zero() { mag } else { -mag };
    OrientedAngle::new(signed)
}

/// `(dPsi/dc1, dPsi/dc2)` by the closed formulas.
pub fn psi_gradient<T: Scalar>(c: Point<T>) -> Result<(T, T)> {
    if !c.is_finite() {
        return Err(Error::NonFinite("point"));
    }
    let (c1, c2) = (c.x, c.y);
    let r2 = c1 * c1 + c2 * c2;
    let one = T::one();
    let den = (one + r2) * (one + r2) - T::lit(4.0) * c2 * c2;
    if den <= T::default_side_tol() {
        return Err(Error::SingularPoint);
    }
    let g1 = T::lit(2.0) * (one + c1 * c1 - c2 * c2) / den;
    let g2 = T::lit(4.0) * c1 * c2 / den;
    Ok((g1, g2))
}

/// The set `S(A, B, phi)` of points `C` with `angle(B - C, C - A)` in
/// `(-phi, phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de> + Copy"))]
pub struct TurnRegion<T> {
    pub a: Point<T>,
    pub b: Point<T>,
    pub phi: T,
}

impl<T: Scalar> TurnRegion<T> {
    pub fn new(a: Point<T>, b: Point<T>, phi: T) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite("region"));
        }
        if a == b {
            return Err(Error::DegenerateLine);
        }
        if phi <= T::zero() {
            return Err(Error::InvalidParameter(format!("phi must be positive, got {phi}")));
        }
        Ok(TurnRegion { a, b, phi })
    }

    pub fn frame(&self) -> CanonicalFrame<T> {
        CanonicalFrame::new(self.a, self.b).expect("validated region")
    }

    pub fn contains(&self, c: Point<T>, closure: Closure, tol: T) -> bool {
        region_contains(self, c, closure, tol)
    }
}

/// Membership of `c` in `S(A, B, phi)` (open) or `cl S(A, B, phi) \ {A, B}`
/// (closed). `tol` widens the closed test and narrows the open one.
pub fn region_contains<T: Scalar>(region: &TurnRegion<T>, c: Point<T>, closure: Closure, tol: T) -> bool {
    if !c.is_finite() || c == region.a || c == region.b {
        return false;
    }
    let pi = T::PI();
    if region.phi > pi {
        return true;
    }
    if region.phi == pi {
        return match closure {
            Closure::Closed => true,
            Closure::Open => !on_outer_rays(region.a, region.b, c),
        };
    }
    let cbar = region.frame().to_canonical(c);
    let angle = match psi(cbar) {
        Ok(a) => a.abs(),
        // numerically indistinguishable from an endpoint
        Err(_) => return false,
    };
    match closure {
        Closure::Open => angle < region.phi - tol,
        Closure::Closed => angle <= region.phi + tol,
    }
}

/// `c` on `(A(-inf), A)` or `[B, A(+inf))`.
fn on_outer_rays<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> bool {
    if side_of_line_tol(a, b, c, T::default_side_tol()) != Ok(LineSide::OnLine) {
        return false;
    }
    let d = b - a;
    let t = d.dot(c - a) / d.dot(d);
    t < T::zero() || t >= T::one()
}

/// Samples the boundary arc of one part of a bounded region, from `A` to `B`.
///
/// In the canonical frame the right arc lies on the circle
/// `(x + cot phi)^2 + y^2 = 1 / sin^2 phi` with `0 <= x <= tan(phi / 2)`;
/// the left arc is its mirror image.
pub fn region_boundary<T: Scalar>(region: &TurnRegion<T>, part: Part, samples: usize) -> Result<Vec<Point<T>>> {
    if region.phi >= T::PI() {
        return Err(Error::UnboundedRegion);
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("at least two boundary samples".into()));
    }
    let frame = region.frame();
    let phi = region.phi;
    let radius = T::one() / phi.sin();
    let center = phi.cos() / phi.sin();
    let mirror = match part {
        Part::Right => T::one(),
        Part::Left => -T::one(),
    };
    let last = samples - 1;
    let step = (phi + phi) / T::lit(last as f64);
    let mut out = Vec::with_capacity(samples);
    out.push(region.a);
    for k in 1..last {
        let theta = -phi + step * T::lit(k as f64);
        let x = -center + radius * theta.cos();
        let y = radius * theta.sin();
        out.push(frame.from_canonical(Point::new(mirror * x, y)));
    }
    out.push(region.b);
    Ok(out)
}

/// Axis-aligned box containing `cl S(A, B, phi)`.
///
/// Canonically the region spans `|x| <= tan(phi / 2)` and `|y| <= 1`, or
/// `|y| <= 1 / sin(phi)` once `phi > pi / 2` and the arcs bulge past the
/// chord endpoints.
pub fn region_bounding_box<T: Scalar>(region: &TurnRegion<T>) -> Result<Rect<T>> {
    if region.phi >= T::PI() {
        return Err(Error::UnboundedRegion);
    }
    let phi = region.phi;
    let hx = (phi * T::lit(0.5)).tan();
    let hy = if phi <= T::FRAC_PI_2() {
        T::one()
    } else {
        T::one() / phi.sin()
    };
    let frame = region.frame();
    let corners = [(-hx, -hy), (hx, -hy), (hx, hy), (-hx, hy)].map(|(x, y)| frame.from_canonical(Point::new(x, y)));
    Ok(Rect::hull(corners))
}

/// Euclidean diameter bound for `S(A, B, phi)`: the diagonal of its bounding box.
pub fn region_diameter_bound<T: Scalar>(region: &TurnRegion<T>) -> Result<T> {
    Ok(region_bounding_box(region)?.diagonal())
}

/// `apex + C(axis, half_angle)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de> + Copy"))]
pub struct Cone<T> {
    pub apex: Point<T>,
    pub axis: Vector<T>,
    pub half_angle: T,
}

impl<T: Scalar> Cone<T> {
    pub fn new(apex: Point<T>, axis: Vector<T>, half_angle: T) -> Result<Self> {
        if axis.is_zero() {
            return Err(Error::InvalidParameter("cone axis must be nonzero".into()));
        }
        if !(half_angle > T::zero() && half_angle < T::PI()) {
            return Err(Error::InvalidParameter(format!(
                "cone half angle {half_angle} outside (0, pi)"
            )));
        }
        Ok(Cone { apex, axis, half_angle })
    }
}

/// `|angle(c - apex, axis)| <= half_angle + tol`; the apex is always a member.
pub fn cone_contains<T: Scalar>(cone: &Cone<T>, c: Point<T>, tol: T) -> bool {
    match oriented_angle(c - cone.apex, cone.axis) {
        Ok(a) => a.abs() <= cone.half_angle + tol,
        Err(_) => false,
    }
}

/// Default grid resolution of [`lipschitz_estimate`].
pub const LIPSCHITZ_GRID: usize = 400;

/// Sampled `max |dPsi/dc1| + |dPsi/dc2|` over the canonical truncated set
/// `{ |Psi| <= phi, |C - A| >= s, |C - B| >= s }`.
///
/// The sample set (a `samples x samples` grid over the bounding box plus
/// both boundary arcs) does not depend on `s`, so the estimate is
/// nondecreasing as `s` shrinks.
pub fn lipschitz_estimate<T: Scalar>(phi: T, s: T, samples: usize) -> Result<T> {
    if !(s > T::zero()) {
        return Err(Error::InvalidParameter(format!("s must be positive, got {s}")));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("at least two samples per axis".into()));
    }
    let a = Point::new(T::zero(), -T::one());
    let b = Point::new(T::zero(), T::one());
    let region = TurnRegion::new(a, b, phi)?;
    let bbox = region_bounding_box(&region)?;
    let tol = T::default_angle_tol();

    let mut best: Option<T> = None;
    let mut consider = |c: Point<T>| {
        if c.dist(a) < s || c.dist(b) < s {
            return;
        }
        let inside = psi(c).map(|v| v.abs() <= phi + tol).unwrap_or(false);
        if !inside {
            return;
        }
        if let Ok((g1, g2)) = psi_gradient(c) {
            let g = g1.abs() + g2.abs();
            best = Some(best.map_or(g, |m: T| m.max(g)));
        }
    };

    let last = T::lit((samples - 1) as f64);
    for i in 0..samples {
        let x = bbox.min.x + (bbox.max.x - bbox.min.x) * T::lit(i as f64) / last;
        for j in 0..samples {
            let y = bbox.min.y + (bbox.max.y - bbox.min.y) * T::lit(j as f64) / last;
            consider(Point::new(x, y));
        }
    }
    for part in [Part::Right, Part::Left] {
        for c in region_boundary(&region, part, samples * 4)? {
            consider(c);
        }
    }
    best.ok_or(Error::EmptySet)
}
