//! Path costs, discrete minimization over the enumerated set, sequence-set
//! distances and the nested-grid convergence sweep.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{turn_angle, Point};
use crate::enumerate::{
    check_problem, enumerate_sequences_with, with_workers, DiscreteSequenceSet, EnumerateOptions, GridSpec, Lattice,
    Search, TurnSequence,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Cost of a turn as a function of its magnitude.
#[derive(Clone)]
pub enum TurnCost<T> {
    /// `weight * |alpha|`.
    Linear(T),
    Custom(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Scalar> TurnCost<T> {
    pub fn eval(&self, magnitude: T) -> T {
        match self {
            TurnCost::Linear(w) => *w * magnitude,
            TurnCost::Custom(f) => f(magnitude),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for TurnCost<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TurnCost::Linear(w) => f.debug_tuple("Linear").field(w).finish(),
            TurnCost::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Cost of a whole interior sequence.
pub type Coupling<T> = Arc<dyn Fn(&[Point<T>]) -> T + Send + Sync>;

/// `length_weight * sum |segments| + sum turn_cost(|alpha_i|) + sum surcharge(B(i))`,
/// plus an optional term coupling the whole sequence.
#[derive(Clone)]
pub struct CostModel<T> {
    pub length_weight: T,
    pub turn_cost: TurnCost<T>,
    pub surcharge: Option<Arc<dyn Fn(Point<T>) -> T + Send + Sync>>,
    /// Non-separable extra cost; forces exhaustive minimization.
    pub coupling: Option<Coupling<T>>,
}

impl<T: Scalar> CostModel<T> {
    pub fn new(length_weight: T, turn_weight: T) -> Self {
        CostModel {
            length_weight,
            turn_cost: TurnCost::Linear(turn_weight),
            surcharge: None,
            coupling: None,
        }
    }

    pub fn pure_length() -> Self {
        Self::new(T::one(), T::zero())
    }

    /// Whether the cost splits into per-edge and per-turn terms.
    pub fn is_separable(&self) -> bool {
        self.coupling.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_weight >= T::zero() && self.length_weight.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "length weight {} must be finite and >= 0",
                self.length_weight
            )));
        }
        if let TurnCost::Linear(w) = self.turn_cost {
            if !(w >= T::zero() && w.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "turn weight {w} must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }

    fn edge(&self, from: Point<T>, to: Point<T>) -> T {
        self.length_weight * from.dist(to)
    }

    /// Adds the terms charged at vertex `cur`: surcharge, then turn.
    fn at_vertex(&self, acc: T, prev: Point<T>, cur: Point<T>, next: Point<T>) -> Result<T> {
        let mut acc = acc;
        if let Some(s) = &self.surcharge {
            acc = acc + s(cur);
        }
        Ok(acc + self.turn_cost.eval(turn_angle(prev, cur, next)?.abs()))
    }
}

impl<T: fmt::Debug> fmt::Debug for CostModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CostModel")
            .field("length_weight", &self.length_weight)
            .field("turn_cost", &self.turn_cost)
            .field("surcharge", &self.surcharge.is_some())
            .field("coupling", &self.coupling.is_some())
            .finish()
    }
}

/// Cost of the path `A, seq..., B`.
///
/// Terms are accumulated in path order: the first edge, then for each
/// vertex its surcharge, its turn and its outgoing edge. The dynamic
/// program reproduces this order, so both agree bit for bit.
pub fn objective<T: Scalar>(cost: &CostModel<T>, a: Point<T>, b: Point<T>, seq: &[Point<T>]) -> Result<T> {
    let n = seq.len();
    let v = |i: usize| {
        if i == 0 {
            a
        } else if i == n + 1 {
            b
        } else {
            seq[i - 1]
        }
    };
    if (0..=n).any(|i| v(i) == v(i + 1)) {
        return Err(Error::DegenerateEdge);
    }
    let mut f = cost.edge(v(0), v(1));
    for i in 1..=n {
        f = cost.at_vertex(f, v(i - 1), v(i), v(i + 1))?;
        f = f + cost.edge(v(i), v(i + 1));
    }
    if let Some(c) = &cost.coupling {
        f = f + c(seq);
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Candidate extensions generated across all levels.
    pub candidates_examined: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Minimizer over the enumerated set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de> + Copy"))]
pub struct Solution<T> {
    pub sequence: TurnSequence<T>,
    pub objective: T,
    pub tau: T,
    pub stats: SolveStats,
}

/// Minimizes `cost` over the admissible lattice sequences; `Ok(None)` when
/// the set is empty.
pub fn solve_discrete<T: Scalar>(
    a: Point<T>,
    b: Point<T>,
    n: usize,
    phi: T,
    grid: &GridSpec<T>,
    cost: &CostModel<T>,
) -> Result<Option<Solution<T>>> {
    solve_discrete_with(a, b, n, phi, grid, cost, &EnumerateOptions::default())
}

/// [`solve_discrete`] with explicit options. Separable costs use a forward
/// dynamic program over `(B(i-1), B(i))` states; otherwise the set is
/// enumerated and scanned. Ties go to the lexicographically smallest
/// sequence.
pub fn solve_discrete_with<T: Scalar>(
    a: Point<T>,
    b: Point<T>,
    n: usize,
    phi: T,
    grid: &GridSpec<T>,
    cost: &CostModel<T>,
    opts: &EnumerateOptions<'_, T>,
) -> Result<Option<Solution<T>>> {
    cost.validate()?;
    if cost.is_separable() {
        solve_dp(a, b, n, phi, grid, cost, opts)
    } else {
        solve_exhaustive(a, b, n, phi, grid, cost, opts)
    }
}

/// Minimization by scanning the full enumerated set.
pub fn solve_exhaustive<T: Scalar>(
    a: Point<T>,
    b: Point<T>,
    n: usize,
    phi: T,
    grid: &GridSpec<T>,
    cost: &CostModel<T>,
    opts: &EnumerateOptions<'_, T>,
) -> Result<Option<Solution<T>>> {
    let start = Instant::now();
    let set = enumerate_sequences_with(a, b, n, phi, grid, opts)?;
    let best = with_workers(opts.workers, || set_minimum(&set, cost))??;
    Ok(best.map(|(k, value)| Solution {
        sequence: TurnSequence::new(set.get(k).to_vec()),
        objective: value,
        tau: grid.tau,
        stats: SolveStats {
            candidates_examined: set.len() as u64,
            wall_time: start.elapsed(),
        },
    }))
}

/// Index and value of the first minimizer of `cost` over `set`.
pub fn set_minimum<T: Scalar>(set: &DiscreteSequenceSet<T>, cost: &CostModel<T>) -> Result<Option<(usize, T)>> {
    let values: Vec<T> = (0..set.len())
        .into_par_iter()
        .map(|k| objective(cost, set.a, set.b, set.get(k)))
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, T)> = None;
    for (k, v) in values.into_iter().enumerate() {
        if best.is_none_or(|(_, bv)| v < bv) {
            best = Some((k, v));
        }
    }
    Ok(best)
}

const NO_PARENT: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct State<T> {
    cur: u32,
    cost: T,
    parent: u32,
}

fn prefix(levels: &[Vec<State<impl Copy>>], level: usize, mut idx: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(level + 1);
    for l in (0..=level).rev() {
        let s = &levels[l][idx as usize];
        out.push(s.cur);
        idx = s.parent;
    }
    out.reverse();
    out
}

fn solve_dp<T: Scalar>(
    a: Point<T>,
    b: Point<T>,
    n: usize,
    phi: T,
    grid: &GridSpec<T>,
    cost: &CostModel<T>,
    opts: &EnumerateOptions<'_, T>,
) -> Result<Option<Solution<T>>> {
    let start = Instant::now();
    check_problem(a, b, n, phi)?;
    let lattice = Lattice::new(grid)?;
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
    let pt = |i: u32| lattice.point(i as usize);
    let mut examined = 0u64;

    let mut first = Vec::new();
    search.first_level(&mut first);
    examined += first.len() as u64;
    let mut levels: Vec<Vec<State<T>>> = vec![first
        .iter()
        .map(|&c| State {
            cur: c,
            cost: cost.edge(a, pt(c)),
            parent: NO_PARENT,
        })
        .collect()];

    for level in 2..=n {
        let prev = &levels[level - 2];
        let prev_of = |s: &State<T>| -> Point<T> {
            if s.parent == NO_PARENT {
                a
            } else {
                pt(levels[level - 3][s.parent as usize].cur)
            }
        };
        let expansions: Vec<Vec<(u32, T)>> = with_workers(opts.workers, || {
            prev.par_iter()
                .map(|s| {
                    let (p2, p1) = (prev_of(s), pt(s.cur));
                    let mut cands = Vec::new();
                    search.candidates(level, p2, p1, &mut cands);
                    cands
                        .into_iter()
                        .map(|c| {
                            let next = pt(c);
                            let v =
                                cost.at_vertex(s.cost, p2, p1, next).expect("distinct vertices") + cost.edge(p1, next);
                            (c, v)
                        })
                        .collect()
                })
                .collect()
        })?;
        let mut slots: HashMap<(u32, u32), usize> = HashMap::new();
        let mut next_level: Vec<State<T>> = Vec::new();
        for (si, exp) in expansions.into_iter().enumerate() {
            examined += exp.len() as u64;
            let from = prev[si].cur;
            for (c, v) in exp {
                let cand = State {
                    cur: c,
                    cost: v,
                    parent: si as u32,
                };
                match slots.get(&(from, c)) {
                    None => {
                        slots.insert((from, c), next_level.len());
                        next_level.push(cand);
                    }
                    Some(&k) => {
                        let old = next_level[k];
                        let better = v < old.cost
                            || (v == old.cost
                                && prefix(&levels, level - 2, si as u32) < prefix(&levels, level - 2, old.parent));
                        if better {
                            next_level[k] = cand;
                        }
                    }
                }
            }
        }
        // the key (from, c) already fixes the two last points, so the only
        // remaining freedom is the parent chain resolved above
        levels.push(next_level);
    }

    let last = &levels[n - 1];
    let mut best: Option<(u32, T)> = None;
    for (k, s) in last.iter().enumerate() {
        let p2 = if s.parent == NO_PARENT {
            a
        } else {
            pt(levels[n - 2][s.parent as usize].cur)
        };
        let p1 = pt(s.cur);
        let total = cost.at_vertex(s.cost, p2, p1, b)? + cost.edge(p1, b);
        let better = match best {
            None => true,
            Some((bk, bv)) => {
                total < bv || (total == bv && prefix(&levels, n - 1, k as u32) < prefix(&levels, n - 1, bk))
            }
        };
        if better {
            best = Some((k as u32, total));
        }
    }
    Ok(best.map(|(k, value)| Solution {
        sequence: TurnSequence::new(prefix(&levels, n - 1, k).into_iter().map(pt).collect()),
        objective: value,
        tau: grid.tau,
        stats: SolveStats {
            candidates_examined: examined,
            wall_time: start.elapsed(),
        },
    }))
}

/// `max_i ||x_i - y_i||_inf`.
pub fn sequence_distance<T: Scalar>(x: &[Point<T>], y: &[Point<T>]) -> T {
    x.iter().zip(y).fold(T::zero(), |m, (p, q)| m.max(p.sup_dist(*q)))
}

/// `min_{V in S} ||W - V||` under the sequence sup-norm.
pub fn point_to_set_distance<T: Scalar>(w: &[Point<T>], set: &DiscreteSequenceSet<T>) -> Result<T> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if w.len() != set.n {
        return Err(Error::InvalidParameter(format!(
            "sequence length {} differs from set length {}",
            w.len(),
            set.n
        )));
    }
    Ok(set.iter().fold(T::infinity(), |m, v| m.min(sequence_distance(w, v))))
}

/// Exact nearest-neighbour index under the sup-norm over flat rows.
struct SupNormTree<'a, T> {
    rows: &'a [Point<T>],
    dim: usize,
    order: Vec<u32>,
}

impl<'a, T: Scalar> SupNormTree<'a, T> {
    fn new(rows: &'a [Point<T>], n: usize) -> Self {
        let count = rows.len() / n;
        let mut tree = SupNormTree {
            rows,
            dim: 2 * n,
            order: (0..count as u32).collect(),
        };
        let mut order = std::mem::take(&mut tree.order);
        tree.build(&mut order, 0);
        tree.order = order;
        tree
    }

    fn coord(&self, row: u32, axis: usize) -> T {
        let p = self.rows[row as usize * self.dim / 2 + axis / 2];
        if axis.is_multiple_of(2) {
            p.x
        } else {
            p.y
        }
    }

    fn build(&self, slice: &mut [u32], depth: usize) {
        if slice.len() <= 1 {
            return;
        }
        let axis = depth % self.dim;
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |&i, &j| {
            self.coord(i, axis)
                .partial_cmp(&self.coord(j, axis))
                .unwrap_or(Ordering::Equal)
        });
        let (left, right) = slice.split_at_mut(mid);
        self.build(left, depth + 1);
        self.build(&mut right[1..], depth + 1);
    }

    fn row(&self, row: u32) -> &[Point<T>] {
        let n = self.dim / 2;
        &self.rows[row as usize * n..(row as usize + 1) * n]
    }

    fn nearest(&self, q: &[Point<T>]) -> T {
        let mut best = T::infinity();
        self.search(0, self.order.len(), 0, q, &mut best);
        best
    }

    fn search(&self, lo: usize, hi: usize, depth: usize, q: &[Point<T>], best: &mut T) {
        if lo >= hi || *best == T::zero() {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let node = self.order[mid];
        *best = best.min(sequence_distance(q, self.row(node)));
        let axis = depth % self.dim;
        let qa = if axis.is_multiple_of(2) {
            q[axis / 2].x
        } else {
            q[axis / 2].y
        };
        let diff = qa - self.coord(node, axis);
        let (near, far) = if diff < T::zero() {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(near.0, near.1, depth + 1, q, best);
        if diff.abs() <= *best {
            self.search(far.0, far.1, depth + 1, q, best);
        }
    }
}

/// `sup_{W in X} min_{V in Y} ||W - V||`.
pub fn directed_hausdorff<T: Scalar>(x: &DiscreteSequenceSet<T>, y: &DiscreteSequenceSet<T>) -> Result<T> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    if x.n != y.n {
        return Err(Error::InvalidParameter(format!(
            "sequence lengths differ: {} vs {}",
            x.n, y.n
        )));
    }
    let tree = SupNormTree::new(y.as_flat(), y.n);
    Ok((0..x.len())
        .into_par_iter()
        .map(|k| tree.nearest(x.get(k)))
        .reduce(|| T::zero(), |p, q| p.max(q)))
}

/// Hausdorff distance under the sequence sup-norm.
pub fn hausdorff<T: Scalar>(x: &DiscreteSequenceSet<T>, y: &DiscreteSequenceSet<T>) -> Result<T> {
    Ok(directed_hausdorff(x, y)?.max(directed_hausdorff(y, x)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de> + Copy"))]
pub struct ConvergenceRow<T> {
    pub tau: T,
    pub set_size: usize,
    /// `None` flags an empty level.
    pub min_objective: Option<T>,
    pub hausdorff_to_reference: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de> + Copy"))]
pub struct ConvergenceReport<T> {
    pub rows: Vec<ConvergenceRow<T>>,
}

impl<T: Scalar> ConvergenceReport<T> {
    /// Whether at least one level produced a nonempty set.
    pub fn any_solved(&self) -> bool {
        self.rows.iter().any(|r| r.min_objective.is_some())
    }
}

/// Enumerates and minimizes on the nested grids `[grid.q, grid.p]` with the
/// spacings `taus` (each half the previous), measuring the Hausdorff
/// distance of every level to the finest one.
#[allow(clippy::too_many_arguments)]
pub fn convergence_study<T: Scalar>(
    a: Point<T>,
    b: Point<T>,
    n: usize,
    phi: T,
    cost: &CostModel<T>,
    grid: &GridSpec<T>,
    taus: &[T],
    opts: &EnumerateOptions<'_, T>,
) -> Result<ConvergenceReport<T>> {
    if taus.is_empty() {
        return Err(Error::InvalidParameter("no grid spacings".into()));
    }
    for w in taus.windows(2) {
        if w[1] != w[0] * T::lit(0.5) {
            return Err(Error::InvalidParameter(format!(
                "spacings {} -> {} are not nested halvings",
                w[0], w[1]
            )));
        }
    }
    cost.validate()?;
    let mut sets = Vec::with_capacity(taus.len());
    for &tau in taus {
        let g = GridSpec::new(grid.q, grid.p, tau)?;
        sets.push(enumerate_sequences_with(a, b, n, phi, &g, opts)?);
    }
    let reference = sets.last().expect("nonempty sweep");
    let mut rows = Vec::with_capacity(taus.len());
    for (k, set) in sets.iter().enumerate() {
        let min_objective = with_workers(opts.workers, || set_minimum(set, cost))??.map(|(_, v)| v);
        let hausdorff_to_reference = if set.is_empty() || reference.is_empty() {
            None
        } else if k + 1 == sets.len() {
            Some(T::zero())
        } else {
            Some(with_workers(opts.workers, || hausdorff(set, reference))??)
        };
        rows.push(ConvergenceRow {
            tau: taus[k],
            set_size: set.len(),
            min_objective,
            hausdorff_to_reference,
        });
    }
    Ok(ConvergenceReport { rows })
}
