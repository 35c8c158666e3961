//! Lattice discretization and exhaustive enumeration of admissible turn
//! sequences, plus the vertex-sliding shrink map.
//!
//! Enumeration is a depth-first product over levels: the `(i+1)`-th point
//! is drawn from `S(B(i), B, (n-i) phi)` intersected with the turn cone at
//! `B(i)`. The region factor only prunes; every turn is checked exactly as
//! [`sequence_is_admissible`] does, so the output is exactly the filtered
//! product of the lattice.

use std::cmp::Ordering;
use std::ops::Range;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{turn_angle, within, Point};
use crate::error::{Error, Result};
use crate::region::{
    cone_contains, psi, region_bounding_box, region_contains, CanonicalFrame, Closure, Cone, Rect, TurnRegion,
};
use crate::scalar::Scalar;

/// Upper bound on lattice size accepted by [`GridSpec::new`].
pub const MAX_LATTICE_POINTS: usize = 1 << 24;

/// The rectangle `[q, p]` and its lattice `q + j tau`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de> + Copy"))]
pub struct GridSpec<T> {
    pub q: Point<T>,
    pub p: Point<T>,
    pub tau: T,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(q: Point<T>, p: Point<T>, tau: T) -> Result<Self> {
        let g = GridSpec { q, p, tau };
        g.validate()?;
        Ok(g)
    }

    /// Smallest grid on the `tau` lattice anchored at `rect.min - tau` that
    /// covers `rect` padded by one `tau`.
    pub fn covering(rect: &Rect<T>, tau: T) -> Result<Self> {
        let r = rect.expand(tau);
        GridSpec::new(r.min, r.max, tau)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q.is_finite() && self.p.is_finite() && self.tau.is_finite()) {
            return Err(Error::NonFinite("grid"));
        }
        if !(self.q.x < self.p.x && self.q.y < self.p.y) {
            return Err(Error::InvalidParameter("grid needs q < p componentwise".into()));
        }
        if !(self.tau > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        let (w, h) = (self.p.x - self.q.x, self.p.y - self.q.y);
        if self.tau > w.min(h) {
            return Err(Error::InvalidParameter(format!(
                "tau = {} exceeds the grid side {}",
                self.tau,
                w.min(h)
            )));
        }
        let nx = (w / self.tau).to_f64().unwrap_or(f64::INFINITY) + 1.0;
        let ny = (h / self.tau).to_f64().unwrap_or(f64::INFINITY) + 1.0;
        if nx * ny > MAX_LATTICE_POINTS as f64 {
            return Err(Error::InvalidParameter(format!(
                "lattice of about {:.0} points exceeds the limit {MAX_LATTICE_POINTS}",
                nx * ny
            )));
        }
        Ok(())
    }

    pub fn rect(&self) -> Rect<T> {
        Rect {
            min: self.q,
            max: self.p,
        }
    }

    /// The same rectangle with half the spacing; its lattice contains this one.
    pub fn refined(&self) -> Self {
        GridSpec {
            tau: self.tau * T::lit(0.5),
            ..*self
        }
    }
}

/// Coordinates `lo + j tau <= hi` (with a relative slack of `1e-9 tau`).
fn axis<T: Scalar>(lo: T, hi: T, tau: T) -> Vec<T> {
    let slack = tau * T::lit(1e-9);
    let mut out = Vec::new();
    let mut j = 0usize;
    loop {
        let x = lo + T::lit(j as f64) * tau;
        if x > hi + slack {
            break;
        }
        out.push(x);
        j += 1;
    }
    out
}

/// Precomputed lattice; point index is `ix * ny + iy`, which is the
/// lexicographic `(x, y)` order.
#[derive(Clone, Debug)]
pub struct Lattice<T> {
    pub xs: Vec<T>,
    pub ys: Vec<T>,
}

impl<T: Scalar> Lattice<T> {
    pub fn new(grid: &GridSpec<T>) -> Result<Self> {
        grid.validate()?;
        let xs = axis(grid.q.x, grid.p.x, grid.tau);
        let ys = axis(grid.q.y, grid.p.y, grid.tau);
        if xs.is_empty() || ys.is_empty() {
            return Err(Error::EmptyLattice);
        }
        Ok(Lattice { xs, ys })
    }

    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, index: usize) -> Point<T> {
        let ny = self.ys.len();
        Point::new(self.xs[index / ny], self.ys[index % ny])
    }

    pub fn points(&self) -> Vec<Point<T>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    fn x_range(&self, lo: T, hi: T) -> Range<usize> {
        self.xs.partition_point(|&x| x < lo)..self.xs.partition_point(|&x| x <= hi)
    }

    fn y_range(&self, lo: T, hi: T) -> Range<usize> {
        self.ys.partition_point(|&y| y < lo)..self.ys.partition_point(|&y| y <= hi)
    }
}

/// All lattice points of `grid` in lexicographic `(x, y)` order.
pub fn grid_points<T: Scalar>(grid: &GridSpec<T>) -> Result<Vec<Point<T>>> {
    Ok(Lattice::new(grid)?.points())
}

/// Interior turn points `(B(1), ..., B(n))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de> + Copy"))]
pub struct TurnSequence<T> {
    pub points: Vec<Point<T>>,
}

impl<T> TurnSequence<T> {
    pub fn new(points: Vec<Point<T>>) -> Self {
        TurnSequence { points }
    }
}

/// Lexicographic order on point tuples.
pub fn sequence_cmp<T: Scalar>(x: &[Point<T>], y: &[Point<T>]) -> Ordering {
    for (p, q) in x.iter().zip(y) {
        match p.lex_cmp(q) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    x.len().cmp(&y.len())
}

/// A canonically ordered set of `n`-point sequences, stored flat.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSequenceSet<T> {
    pub a: Point<T>,
    pub b: Point<T>,
    pub n: usize,
    pub phi: T,
    pub grid: GridSpec<T>,
    points: Vec<Point<T>>,
}

impl<T: Scalar> DiscreteSequenceSet<T> {
    /// Builds a set from arbitrary sequences of length `n`, sorting them and
    /// dropping duplicates.
    pub fn from_sequences(
        a: Point<T>,
        b: Point<T>,
        n: usize,
        phi: T,
        grid: GridSpec<T>,
        mut seqs: Vec<Vec<Point<T>>>,
    ) -> Result<Self> {
        if n == 0 || seqs.iter().any(|s| s.len() != n) {
            return Err(Error::InvalidParameter(format!(
                "every sequence must have {n} > 0 points"
            )));
        }
        seqs.sort_by(|x, y| sequence_cmp(x, y));
        seqs.dedup();
        Ok(DiscreteSequenceSet {
            a,
            b,
            n,
            phi,
            grid,
            points: seqs.into_iter().flatten().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len().checked_div(self.n).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, k: usize) -> &[Point<T>] {
        &self.points[k * self.n..(k + 1) * self.n]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, Point<T>> {
        self.points.chunks_exact(self.n.max(1))
    }

    /// Flat storage, `n` points per sequence.
    pub fn as_flat(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn contains(&self, seq: &[Point<T>]) -> bool {
        if seq.len() != self.n {
            return false;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match sequence_cmp(self.get(mid), seq) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return true,
            }
        }
        false
    }

    /// Whether every member of `self` belongs to `other`.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    pub fn to_sequences(&self) -> Vec<TurnSequence<T>> {
        self.iter().map(|s| TurnSequence::new(s.to_vec())).collect()
    }
}

fn turn_ok<T: Scalar>(prev: Point<T>, cur: Point<T>, next: Point<T>, phi: T, tol: T, strict: bool) -> bool {
    match turn_angle(prev, cur, next) {
        Ok(a) => {
            let a = a.radians();
            within(a, -phi, phi, tol) && !(strict && a.abs() <= tol)
        }
        Err(_) => false,
    }
}

fn admissible<T: Scalar>(seq: &[Point<T>], a: Point<T>, b: Point<T>, phi: T, tol: T, strict: bool) -> bool {
    let n = seq.len();
    let at = |i: usize| {
        if i == 0 {
            a
        } else if i == n + 1 {
            b
        } else {
            seq[i - 1]
        }
    };
    (0..=n).all(|i| at(i) != at(i + 1)) && (1..=n).all(|i| turn_ok(at(i - 1), at(i), at(i + 1), phi, tol, strict))
}

/// Whether `A, seq..., B` has every turn in `[-phi - tol, phi + tol]` and
/// distinct consecutive vertices.
pub fn sequence_is_admissible<T: Scalar>(seq: &[Point<T>], a: Point<T>, b: Point<T>, phi: T, tol: T) -> bool {
    admissible(seq, a, b, phi, tol, false)
}

/// [`sequence_is_admissible`] that additionally rejects zero turns
/// (`|alpha| <= tol`).
pub fn sequence_is_admissible_strict<T: Scalar>(seq: &[Point<T>], a: Point<T>, b: Point<T>, phi: T, tol: T) -> bool {
    admissible(seq, a, b, phi, tol, true)
}

/// The set from which `B(i+1)` is drawn once `B(i-1) = prev2`, `B(i) = prev1`
/// are fixed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NextRegion<T> {
    pub region: TurnRegion<T>,
    pub closure: Closure,
    pub cone: Cone<T>,
    pub a: Point<T>,
    pub b: Point<T>,
}

impl<T: Scalar> NextRegion<T> {
    pub fn contains(&self, c: Point<T>, tol: T) -> bool {
        c != self.a
            && c != self.b
            && region_contains(&self.region, c, self.closure, tol)
            && cone_contains(&self.cone, c, tol)
    }
}

/// `S(prev1, B, (n - i) phi) ∩ [prev1 + C(prev1 - prev2, phi)]`, with the
/// closed region minus `{A, B}` at the last step `i = n - 1`.
pub fn admissible_next_region<T: Scalar>(
    i: usize,
    a: Point<T>,
    b: Point<T>,
    n: usize,
    phi: T,
    prev2: Option<Point<T>>,
    prev1: Point<T>,
) -> Result<NextRegion<T>> {
    if i < 1 || i + 1 > n {
        return Err(Error::IndexOutOfRange(format!(
            "i = {i} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    let prev2 = prev2.unwrap_or(a);
    let region = TurnRegion::new(prev1, b, phi * T::lit((n - i) as f64))?;
    let cone = Cone::new(prev1, prev1 - prev2, phi)?;
    let closure = if i == n - 1 { Closure::Closed } else { Closure::Open };
    Ok(NextRegion {
        region,
        closure,
        cone,
        a,
        b,
    })
}

/// Minimum pairwise distance over `A, seq..., B`.
pub fn separation<T: Scalar>(seq: &[Point<T>], a: Point<T>, b: Point<T>) -> T {
    let mut all = Vec::with_capacity(seq.len() + 2);
    all.push(a);
    all.extend_from_slice(seq);
    all.push(b);
    let mut best = T::infinity();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            best = best.min(all[i].dist(all[j]));
        }
    }
    best
}

/// Tuning of [`enumerate_sequences_with`].
#[derive(Clone, Copy)]
pub struct EnumerateOptions<'a, T> {
    /// Angular slack of the turn test.
    pub tol: T,
    /// Reject zero turns.
    pub strict_turns: bool,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Abort with [`Error::CapExceeded`] past this many sequences.
    pub max_sequences: Option<usize>,
    /// Extra membership test for the feasible domain, e.g. a convex polygon
    /// inside the grid rectangle.
    pub membership: Option<&'a (dyn Fn(Point<T>) -> bool + Sync)>,
}

impl<T: Scalar> Default for EnumerateOptions<'_, T> {
    fn default() -> Self {
        EnumerateOptions {
            tol: T::default_angle_tol(),
            strict_turns: false,
            workers: None,
            max_sequences: None,
            membership: None,
        }
    }
}

impl<T> std::fmt::Debug for EnumerateOptions<'_, T>
where
    T: std::fmt::Debug,
{
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EnumerateOptions")
            .field("tol", &self.tol)
            .field("strict_turns", &self.strict_turns)
            .field("workers", &self.workers)
            .field("max_sequences", &self.max_sequences)
            .field("membership", &self.membership.is_some())
            .finish()
    }
}

/// Runs `f` on a pool of `workers` threads, or on the global pool.
pub(crate) fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

// Extra angular slack of the pruning test; it only has to dominate the
// rounding of the canonical-frame evaluation.
const PRUNE_SLACK: f64 = 1e-7;

struct Window<T> {
    frame: CanonicalFrame<T>,
    span: T,
    near: T,
    xr: Range<usize>,
    yr: Range<usize>,
}

/// Shared, read-only state of one enumeration.
pub(crate) struct Search<'a, T> {
    pub a: Point<T>,
    pub b: Point<T>,
    pub n: usize,
    pub phi: T,
    pub tol: T,
    pub strict: bool,
    pub lattice: &'a Lattice<T>,
    pub membership: Option<&'a (dyn Fn(Point<T>) -> bool + Sync)>,
}

impl<T: Scalar> Search<'_, T> {
    /// A necessary condition for `c` to be followed by `remaining - 1` more
    /// turns into `B`: `c` in `cl S(from, B, remaining (phi + tol))`, widened.
    fn window(&self, from: Point<T>, remaining: usize) -> Option<Window<T>> {
        let span = (self.phi + self.tol) * T::lit(remaining as f64) + T::lit(PRUNE_SLACK);
        if span >= T::PI() - T::lit(1e-6) || from == self.b {
            return None;
        }
        let region = TurnRegion::new(from, self.b, span).ok()?;
        let rect = region_bounding_box(&region).ok()?;
        let rect = rect.expand(rect.diagonal() * T::lit(1e-7));
        Some(Window {
            frame: region.frame(),
            span,
            near: from.dist(self.b) * T::lit(1e-6),
            xr: self.lattice.x_range(rect.min.x, rect.max.x),
            yr: self.lattice.y_range(rect.min.y, rect.max.y),
        })
    }

    fn window_keeps(&self, w: &Window<T>, from: Point<T>, c: Point<T>) -> bool {
        // near-singular evaluations are never trusted to prune
        if c.dist(from) < w.near || c.dist(self.b) < w.near {
            return true;
        }
        match psi(w.frame.to_canonical(c)) {
            Ok(angle) => angle.abs() <= w.span,
            Err(_) => true,
        }
    }

    fn accept(&self, level: usize, prev2: Point<T>, prev1: Point<T>, c: Point<T>) -> bool {
        if c == prev1 {
            return false;
        }
        if let Some(m) = self.membership {
            if !m(c) {
                return false;
            }
        }
        if level >= 2 && !turn_ok(prev2, prev1, c, self.phi, self.tol, self.strict) {
            return false;
        }
        if level == self.n && (c == self.b || !turn_ok(prev1, c, self.b, self.phi, self.tol, self.strict)) {
            return false;
        }
        true
    }

    /// Lattice indices admissible as `B(level)` after `prev2, prev1`.
    pub fn candidates(&self, level: usize, prev2: Point<T>, prev1: Point<T>, out: &mut Vec<u32>) {
        out.clear();
        let ny = self.lattice.ys.len();
        let window = self.window(prev1, self.n - level + 1);
        let (xr, yr) = match &window {
            Some(w) => (w.xr.clone(), w.yr.clone()),
            None => (0..self.lattice.xs.len(), 0..ny),
        };
        for ix in xr {
            let x = self.lattice.xs[ix];
            for iy in yr.clone() {
                let c = Point::new(x, self.lattice.ys[iy]);
                if let Some(w) = &window {
                    if !self.window_keeps(w, prev1, c) {
                        continue;
                    }
                }
                if self.accept(level, prev2, prev1, c) {
                    out.push((ix * ny + iy) as u32);
                }
            }
        }
    }

    /// Lattice indices admissible as `B(1)`.
    pub fn first_level(&self, out: &mut Vec<u32>) {
        self.candidates(1, self.a, self.a, out);
    }

    fn extend(
        &self,
        level: usize,
        prev2: Point<T>,
        prev1: Point<T>,
        stack: &mut Vec<u32>,
        out: &mut Vec<u32>,
        ctl: &Control,
    ) {
        let mut cands = Vec::new();
        self.candidates(level, prev2, prev1, &mut cands);
        for c in cands {
            if ctl.aborted() {
                return;
            }
            stack.push(c);
            if level == self.n {
                out.extend_from_slice(stack);
                ctl.record(1);
            } else {
                self.extend(level + 1, prev1, self.lattice.point(c as usize), stack, out, ctl);
            }
            stack.pop();
        }
    }
}

struct Control {
    cap: Option<usize>,
    count: AtomicUsize,
    abort: AtomicBool,
}

impl Control {
    fn aborted(&self) -> bool {
        self.abort.load(AtomicOrdering::Relaxed)
    }

    fn record(&self, k: usize) {
        if let Some(cap) = self.cap {
            if self.count.fetch_add(k, AtomicOrdering::Relaxed) + k > cap {
                self.abort.store(true, AtomicOrdering::Relaxed);
            }
        }
    }
}

pub(crate) fn check_problem<T: Scalar>(a: Point<T>, b: Point<T>, n: usize, phi: T) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && phi.is_finite()) {
        return Err(Error::NonFinite("problem"));
    }
    if a == b {
        return Err(Error::DegenerateLine);
    }
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
    Ok(())
}

/// All lattice `n`-tuples passing [`sequence_is_admissible`] with the
/// default angular tolerance.
pub fn enumerate_sequences<T: Scalar>(
    a: Point<T>,
    b: Point<T>,
    n: usize,
    phi: T,
    grid: &GridSpec<T>,
) -> Result<DiscreteSequenceSet<T>> {
    enumerate_sequences_with(a, b, n, phi, grid, &EnumerateOptions::default())
}

/// [`enumerate_sequences`] with explicit options. The result is
/// lexicographically ordered and independent of the worker count.
pub fn enumerate_sequences_with<T: Scalar>(
    a: Point<T>,
    b: Point<T>,
    n: usize,
    phi: T,
    grid: &GridSpec<T>,
    opts: &EnumerateOptions<'_, T>,
) -> Result<DiscreteSequenceSet<T>> {
    check_problem(a, b, n, phi)?;
    let lattice = Lattice::new(grid)?;
    if lattice.len() > u32::MAX as usize {
        return Err(Error::InvalidParameter("lattice too large".into()));
    }
    let search = Search {
        a,
        b,
        n,
        phi,
        tol: opts.tol,
        strict: opts.strict_turns,
        lattice: &lattice,
        membership: opts.membership,
    };
    let ctl = Control {
        cap: opts.max_sequences,
        count: AtomicUsize::new(0),
        abort: AtomicBool::new(false),
    };
    let mut first = Vec::new();
    search.first_level(&mut first);
    let chunks: Vec<Vec<u32>> = with_workers(opts.workers, || {
        first
            .par_iter()
            .map(|&c| {
                let mut out = Vec::new();
                let mut stack = vec![c];
                if n == 1 {
                    out.push(c);
                    ctl.record(1);
                } else {
                    search.extend(2, a, lattice.point(c as usize), &mut stack, &mut out, &ctl);
                }
                out
            })
            .collect()
    })?;
    if ctl.aborted() {
        return Err(Error::CapExceeded(opts.max_sequences.unwrap_or(0)));
    }
    let points: Vec<Point<T>> = chunks
        .into_iter()
        .flatten()
        .map(|i| lattice.point(i as usize))
        .collect();
    Ok(DiscreteSequenceSet {
        a,
        b,
        n,
        phi,
        grid: *grid,
        points,
    })
}

/// Constants of the shrink map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkParams<T> {
    pub s: T,
    pub d: T,
    pub kappa: T,
    pub omega: T,
    pub theta: T,
}

/// `kappa = d / s`,
/// `omega = sin(phi) / max{2.02 (n + kappa)^2, 8.32 kappa (kappa + 1)}`,
/// `theta = max{5, 3 (n + kappa), kappa / 0.17}`.
pub fn shrink_constants<T: Scalar>(s: T, d: T, phi: T, n: usize) -> Result<ShrinkParams<T>> {
    if !(s > T::zero() && d >= s && d.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need d >= s > 0, got s = {s}, d = {d}"
        )));
    }
    if !(phi > T::zero() && phi < T::FRAC_PI_2()) {
        return Err(Error::InvalidParameter(format!("phi = {phi} outside (0, pi/2)")));
    }
    let kappa = d / s;
    let nk = T::lit(n as f64) + kappa;
    let denom = (T::lit(2.02) * nk * nk).max(T::lit(8.32) * kappa * (kappa + T::one()));
    let theta = T::lit(5.0).max(T::lit(3.0) * nk).max(kappa / T::lit(0.17));
    Ok(ShrinkParams {
        s,
        d,
        kappa,
        omega: phi.sin() / denom,
        theta,
    })
}

/// How the sliding weights are chained along the polyline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShrinkRule {
    /// One weight chain `omega_0 = 1, omega_i = k_{i+1} omega_{i-1} / (omega_{i-1} + k_i)`.
    #[default]
    Continuous,
    /// Restart the chain at `B(i+1)` whenever `|alpha_i|` already has the
    /// margin `phi - omega t` and `|alpha_{i+1}|` does not.
    Restart,
}

/// Slides each `B(i)` towards `B(i+1)` by `t omega_{i-1}`.
pub fn shrink_map<T: Scalar>(
    w: &[Point<T>],
    a: Point<T>,
    b: Point<T>,
    t: T,
    params: &ShrinkParams<T>,
    phi: T,
    n: usize,
) -> Result<Vec<Point<T>>> {
    shrink_map_with(w, a, b, t, params, phi, n, ShrinkRule::Continuous)
}

/// The sliding weights `omega_{i-1}` applied at `B(1), ..., B(n)`.
pub fn shrink_weights<T: Scalar>(
    w: &[Point<T>],
    a: Point<T>,
    b: Point<T>,
    t: T,
    params: &ShrinkParams<T>,
    phi: T,
    rule: ShrinkRule,
) -> Result<Vec<T>> {
    let n = w.len();
    let v = |i: usize| {
        if i == 0 {
            a
        } else if i == n + 1 {
            b
        } else {
            w[i - 1]
        }
    };
    let k = |i: usize| v(i).dist(v(i - 1)) / params.s;
    let margin = phi - params.omega * t;
    let alphas: Vec<T> = (1..=n)
        .map(|i| turn_angle(v(i - 1), v(i), v(i + 1)).map(|x| x.radians().abs()))
        .collect::<Result<_>>()?;
    let mut weights = Vec::with_capacity(n);
    for i in 1..=n {
        let restart = rule == ShrinkRule::Restart && i >= 2 && alphas[i - 2] <= margin && alphas[i - 1] > margin;
        let wi = if i == 1 || restart {
            T::one()
        } else {
            let prev = weights[i - 2];
            k(i) * prev / (prev + k(i - 1))
        };
        weights.push(wi);
    }
    Ok(weights)
}

/// [`shrink_map`] with an explicit weight rule.
#[allow(clippy::too_many_arguments)]
pub fn shrink_map_with<T: Scalar>(
    w: &[Point<T>],
    a: Point<T>,
    b: Point<T>,
    t: T,
    params: &ShrinkParams<T>,
    phi: T,
    n: usize,
    rule: ShrinkRule,
) -> Result<Vec<Point<T>>> {
    if w.len() != n || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "expected {n} > 0 points, got {}",
            w.len()
        )));
    }
    let slack = T::one() + T::lit(1e-12);
    if !(t > T::zero() && t <= params.s / params.theta * slack) {
        return Err(Error::InvalidParameter(format!("t = {t} outside (0, s / theta]")));
    }
    if !(phi > T::zero() && phi < T::FRAC_PI_2()) {
        return Err(Error::InvalidParameter(format!("phi = {phi} outside (0, pi/2)")));
    }
    if separation(w, a, b) * slack < params.s {
        return Err(Error::Infeasible("sequence is not s-separated".into()));
    }
    if !sequence_is_admissible(w, a, b, phi, T::default_angle_tol()) {
        return Err(Error::Infeasible("sequence is not admissible".into()));
    }
    let weights = shrink_weights(w, a, b, t, params, phi, rule)?;
    let next = |i: usize| if i + 1 < n { w[i + 1] } else { b };
    Ok((0..n)
        .map(|i| {
            let dir = next(i) - w[i];
            w[i] + dir * (t * weights[i] / dir.norm())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    fn unit_grid(tau: f64) -> GridSpec<f64> {
        GridSpec::new(p(0.0, 0.0), p(1.0, 1.0), tau).unwrap()
    }

    #[test]
    fn grid_counts() {
        assert_eq!(grid_points(&unit_grid(0.5)).unwrap().len(), 9);
        let corners = grid_points(&unit_grid(1.0)).unwrap();
        assert_eq!(corners, vec![p(0.0, 0.0), p(0.0, 1.0), p(1.0, 0.0), p(1.0, 1.0)]);
        assert!(GridSpec::new(p(0.0, 0.0), p(1.0, 1.0), 1.5).is_err());
        assert!(GridSpec::new(p(0.0, 0.0), p(0.0, 1.0), 0.1).is_err());
        assert!(GridSpec::new(p(0.0, 0.0), p(1.0, 1.0), 0.0).is_err());
        // 0.1 is not exact, the endpoint still belongs
        assert_eq!(grid_points(&unit_grid(0.1)).unwrap().len(), 121);
    }

    #[test]
    fn grid_order_and_nesting() {
        let g = GridSpec::new(p(-1.3, -0.7), p(1.1, 2.0), 0.3).unwrap();
        let coarse = grid_points(&g).unwrap();
        assert!(coarse.windows(2).all(|w| w[0].lex_cmp(&w[1]) == Ordering::Less));
        let fine = grid_points(&g.refined()).unwrap();
        assert!(coarse.iter().all(|c| fine.contains(c)));
    }

    #[test]
    fn predicate_examples() {
        let (a, b) = (p(0.0, -1.0), p(0.0, 1.0));
        let tol = 1e-9;
        // boundary point of cl S(A, B, pi/2)
        assert!(sequence_is_admissible(&[p(1.0, 0.0)], a, b, FRAC_PI_2, tol));
        assert!(!sequence_is_admissible(&[p(1.0, 0.0)], a, b, FRAC_PI_2 - 1e-3, tol));
        assert!(!sequence_is_admissible(&[a], a, b, 3.0, tol));
        // 3 phi turn at B1
        let phi: f64 = 0.2;
        let b1 = p(0.0, 0.0);
        let b2 = b1 + p((3.0 * phi).sin(), (3.0 * phi).cos());
        assert!(!sequence_is_admissible(&[b1, b2], a, b, phi, tol));
        // collinear: admissible but not strictly
        let straight = [p(0.0, -0.5), p(0.0, 0.5)];
        assert!(sequence_is_admissible(&straight, a, b, phi, tol));
        assert!(!sequence_is_admissible_strict(&straight, a, b, phi, tol));
    }

    #[test]
    fn separation_examples() {
        let (a, b) = (p(0.0, -1.0), p(0.0, 1.0));
        assert!((separation(&[p(1.0, 0.0)], a, b) - SQRT_2).abs() < 1e-15);
        assert_eq!(separation(&[p(1.0, 0.0), p(1.0, 0.0)], a, b), 0.0);
    }

    #[test]
    fn next_region() {
        let (a, b) = (p(0.0, -1.0), p(0.0, 1.0));
        let phi = 0.4;
        let b1 = p(0.2, -0.3);
        let r = admissible_next_region(1, a, b, 3, phi, None, b1).unwrap();
        assert_eq!(r.closure, Closure::Open);
        for c in [p(0.3, 0.0), p(0.0, 0.0), p(0.25, 0.5), p(1.0, 1.0)] {
            let expected = region_contains(&TurnRegion::new(b1, b, 2.0 * phi).unwrap(), c, Closure::Open, 1e-9)
                && cone_contains(&Cone::new(b1, b1 - a, phi).unwrap(), c, 1e-9);
            assert_eq!(r.contains(c, 1e-9), expected);
        }
        // reverse direction
        assert!(!r.contains(b1 - (b1 - a), 1e-9));
        assert_eq!(
            admissible_next_region(2, a, b, 3, phi, Some(b1), p(0.2, 0.0))
                .unwrap()
                .closure,
            Closure::Closed
        );
        assert!(admissible_next_region(0, a, b, 3, phi, None, b1).is_err());
        assert!(admissible_next_region(3, a, b, 3, phi, None, b1).is_err());
    }

    fn brute(
        a: Point<f64>,
        b: Point<f64>,
        n: usize,
        phi: f64,
        grid: &GridSpec<f64>,
        strict: bool,
    ) -> Vec<Vec<Point<f64>>> {
        let pts = grid_points(grid).unwrap();
        let mut out = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let seq: Vec<Point<f64>> = idx.iter().map(|&i| pts[i]).collect();
            if admissible(&seq, a, b, phi, 1e-9, strict) {
                out.push(seq);
            }
            let mut k = n;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < pts.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    #[test]
    fn single_turn_matches_brute_force() {
        let (a, b) = (p(0.0, -1.0), p(0.0, 1.0));
        let region = TurnRegion::new(a, b, FRAC_PI_2).unwrap();
        let grid = GridSpec::covering(&region_bounding_box(&region).unwrap(), 0.25).unwrap();
        let set = enumerate_sequences(a, b, 1, FRAC_PI_2, &grid).unwrap();
        let expected = brute(a, b, 1, FRAC_PI_2, &grid, false);
        assert_eq!(
            set.to_sequences().into_iter().map(|s| s.points).collect::<Vec<_>>(),
            expected
        );
        // boundary lattice points are kept
        assert!(set.contains(&[p(1.0, 0.0)]));
    }

    #[test]
    fn two_and_three_turns_match_brute_force() {
        let (a, b) = (p(0.1, -0.9), p(-0.2, 1.05));
        let grid = GridSpec::new(p(-1.2, -1.2), p(1.2, 1.2), 0.2).unwrap();
        for (n, phi) in [(2, 0.7), (3, 0.5), (2, FRAC_PI_4)] {
            for strict in [false, true] {
                let opts = EnumerateOptions {
                    strict_turns: strict,
                    ..Default::default()
                };
                let set = enumerate_sequences_with(a, b, n, phi, &grid, &opts).unwrap();
                let expected = brute(a, b, n, phi, &grid, strict);
                assert!(!expected.is_empty());
                let got: Vec<Vec<Point<f64>>> = set.iter().map(|s| s.to_vec()).collect();
                assert_eq!(got, expected, "n = {n}, phi = {phi}, strict = {strict}");
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let (a, b) = (p(0.0, -1.0), p(0.0, 1.0));
        let grid = GridSpec::new(p(-1.0, -1.0), p(1.0, 1.0), 0.125).unwrap();
        let one = enumerate_sequences_with(
            a,
            b,
            2,
            0.6,
            &grid,
            &EnumerateOptions {
                workers: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        let four = enumerate_sequences_with(
            a,
            b,
            2,
            0.6,
            &grid,
            &EnumerateOptions {
                workers: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(one, four);
        assert!(one
            .iter()
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| sequence_cmp(w[0], w[1]) == Ordering::Less));
    }

    #[test]
    fn cap_and_coarse_grid() {
        let (a, b) = (p(0.0, -1.0), p(0.0, 1.0));
        let grid = GridSpec::new(p(-1.0, -1.0), p(1.0, 1.0), 0.125).unwrap();
        let opts = EnumerateOptions {
            max_sequences: Some(10),
            ..Default::default()
        };
        assert_eq!(
            enumerate_sequences_with(a, b, 2, 0.6, &grid, &opts),
            Err(Error::CapExceeded(10))
        );
        let coarse = GridSpec::new(p(-3.0, -3.0), p(3.0, 3.0), 6.0).unwrap();
        assert!(enumerate_sequences(a, b, 2, 0.3, &coarse).unwrap().is_empty());
        assert!(matches!(
            enumerate_sequences(a, b, 4, 0.8, &grid),
            Err(Error::UnsupportedRegime(_))
        ));
    }

    #[test]
    fn shrink_constants_examples() {
        let c = shrink_constants(1.0f64, 1.0, 0.5, 1).unwrap();
        assert_eq!(c.kappa, 1.0);
        assert!((c.theta - 6.0).abs() < 1e-15);
        assert!((c.omega - 0.5f64.sin() / 16.64).abs() < 1e-15);
        let wider = shrink_constants(1.0, 3.0, 0.5, 1).unwrap();
        assert!(wider.omega < c.omega && wider.omega > 0.0);
        assert!(shrink_constants(2.0, 1.0, 0.5, 1).is_err());
        assert!(shrink_constants(1.0, 2.0, 1.7, 1).is_err());
    }

    #[test]
    fn shrink_map_basic_contract() {
        let (a, b) = (p(0.0, -1.0), p(0.0, 1.0));
        let phi = 0.5;
        let w = [p(0.3, -0.4), p(0.3, 0.3)];
        let s = separation(&w, a, b);
        let d = crate::region::region_diameter_bound(&TurnRegion::new(a, b, 2.0 * phi).unwrap()).unwrap();
        let prm = shrink_constants(s, d, phi, 2).unwrap();
        let turns0: Vec<f64> = [a, w[0], w[1], b]
            .windows(3)
            .map(|v| turn_angle(v[0], v[1], v[2]).unwrap().radians())
            .collect();
        assert!(turns0.iter().all(|t| t.abs() <= phi));
        for t in [prm.s / prm.theta, prm.s / (2.0 * prm.theta)] {
            let out = shrink_map(&w, a, b, t, &prm, phi, 2).unwrap();
            let disp = w.iter().zip(&out).map(|(x, y)| x.sup_dist(*y)).fold(0.0, f64::max);
            assert!(disp <= t * prm.kappa / 2.0 + 1e-12);
            assert!(separation(&out, a, b) >= s - t * prm.kappa - 1e-9);
            assert!(sequence_is_admissible(&out, a, b, phi - prm.omega * t, 1e-9));
        }
        assert!(shrink_map(&w, a, b, 2.0 * prm.s / prm.theta, &prm, phi, 2).is_err());
        assert!(shrink_map(&w, a, b, 0.0, &prm, phi, 2).is_err());
        let tight = shrink_constants(2.0 * s, d.max(2.0 * s), phi, 2).unwrap();
        assert!(shrink_map(&w, a, b, tight.s / tight.theta, &tight, phi, 2).is_err());
    }
}
