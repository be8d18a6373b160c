//! Best-first branch and bound over integer columns.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::simplex::{Basis, LpModel, LpRun, LpStatus};
use crate::error::SolveError;
use crate::model::MilpInstance;
use crate::scalar::Scalar;

/// Relative gap at which a search counts as proven optimal.
pub const OPTIMAL_GAP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MilpLimits {
    pub time_limit: Option<Duration>,
    /// Relative gap target; the search stops once it is reached.
    pub gap: f64,
    pub node_limit: Option<usize>,
}

impl Default for MilpLimits {
    fn default() -> Self {
        Self { time_limit: None, gap: OPTIMAL_GAP, node_limit: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MilpStatus {
    Optimal,
    /// Incumbent found, search stopped at the reported gap.
    Feasible { gap: f64 },
    Infeasible,
    /// A limit was hit before any integer solution was found.
    NoIncumbent,
}

#[derive(Clone, Debug)]
pub struct MilpSolution<S> {
    pub status: MilpStatus,
    pub x: Vec<S>,
    pub objective: S,
    /// Best proven lower bound.
    pub bound: S,
    pub gap: S,
    pub nodes: usize,
    /// Whether a time or node limit ended the search.
    pub limit_reached: bool,
}

/// `(incumbent - bound) / max(1, |incumbent|)`.
pub fn relative_gap<S: Scalar>(incumbent: S, bound: S) -> S {
    if !incumbent.is_finite() {
        return S::infinity();
    }
    ((incumbent - bound) / incumbent.abs().max(S::one())).max(S::zero())
}

struct Node<S> {
    id: usize,
    depth: usize,
    bound: S,
    /// Bound changes relative to the root: (column, lower, upper).
    fixes: Vec<(usize, S, S)>,
    basis: Option<Basis>,
}

impl<S: Scalar> PartialEq for Node<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<S: Scalar> Eq for Node<S> {}
impl<S: Scalar> PartialOrd for Node<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for Node<S> {
    /// Max-heap order: smallest bound first, then oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Search<'a, S: Scalar> {
    inst: &'a MilpInstance<S>,
    lp: LpModel<S>,
    int_cols: Vec<usize>,
    incumbent: Option<(S, Vec<S>)>,
    lp_solves: usize,
    deadline: Option<Instant>,
}

impl<'a, S: Scalar> Search<'a, S> {
    fn bounds_with(&self, fixes: &[(usize, S, S)]) -> (Vec<S>, Vec<S>) {
        let mut lo = self.inst.lower.clone();
        let mut hi = self.inst.upper.clone();
        for &(j, l, u) in fixes {
            lo[j] = l;
            hi[j] = u;
        }
        (lo, hi)
    }

    fn solve(&mut self, fixes: &[(usize, S, S)], warm: Option<&Basis>) -> Result<LpRun<S>, SolveError> {
        let (lo, hi) = self.bounds_with(fixes);
        self.lp_solves += 1;
        self.lp.solve(&lo, &hi, warm)
    }

    /// Most fractional integer column, ties to the lowest index.
    fn branching_col(&self, x: &[S]) -> Option<(usize, S)> {
        let half = S::of(0.5);
        let mut best: Option<(usize, S, S)> = None;
        for &j in &self.int_cols {
            let frac = x[j] - x[j].floor();
            if frac <= S::int_tol() || frac >= S::one() - S::int_tol() {
                continue;
            }
            let score = (frac - half).abs();
            if best.is_none_or(|(_, _, s)| score < s) {
                best = Some((j, x[j], score));
            }
        }
        best.map(|(j, v, _)| (j, v))
    }

    /// Fix integers at their rounded values and re-solve so continuous columns
    /// are exactly feasible for the snapped assignment.
    fn polish(&mut self, fixes: &[(usize, S, S)], run: &LpRun<S>) -> Result<Option<(S, Vec<S>)>, SolveError> {
        let mut all = fixes.to_vec();
        for &j in &self.int_cols {
            let v = run.x[j].round();
            all.push((j, v, v));
        }
        let polished = self.solve(&all, Some(&run.basis))?;
        if polished.status != LpStatus::Optimal {
            return Ok(None);
        }
        let mut x = polished.x;
        x.truncate(self.inst.num_cols());
        for &j in &self.int_cols {
            x[j] = x[j].round();
        }
        Ok(Some((polished.objective, x)))
    }

    /// Reduced-cost fixing. A nonbasic integer column whose unit move away
    /// from its bound would lift the node bound to `cutoff` or beyond is
    /// fixed at that bound. Returns the tightened fixes and the smallest
    /// bound of the regions cut off.
    fn reduced_cost_fixes(&self, fixes: &[(usize, S, S)], run: &LpRun<S>, cutoff: S) -> (Vec<(usize, S, S)>, S) {
        let mut out = fixes.to_vec();
        let mut removed = S::infinity();
        let (lo, hi) = self.bounds_with(fixes);
        for &j in &self.int_cols {
            if lo[j] == hi[j] {
                continue;
            }
            let d = self.lp.reduced_cost(j, &run.duals);
            let (at_lo, at_hi) = (run.x[j] == lo[j], run.x[j] == hi[j]);
            let (value, lifted) = if at_lo && d > S::zero() {
                (lo[j], run.objective + d)
            } else if at_hi && d < S::zero() {
                (hi[j], run.objective - d)
            } else {
                continue;
            };
            if lifted < cutoff {
                continue;
            }
            removed = removed.min(lifted);
            match out.iter_mut().find(|f| f.0 == j) {
                Some(f) => {
                    f.1 = value;
                    f.2 = value;
                }
                None => out.push((j, value, value)),
            }
        }
        (out, removed)
    }

    fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Relaxation-induced neighbourhood search: integer columns on which the
    /// node LP and the incumbent agree are fixed, and the rest is searched
    /// with a small node budget.
    fn rins(&mut self, fixes: &[(usize, S, S)], run: &LpRun<S>, node_budget: usize, gap: f64) -> Result<(), SolveError> {
        let Some((_, inc)) = &self.incumbent else {
            return Ok(());
        };
        let (mut lo, mut hi) = self.bounds_with(fixes);
        let mut fixed = 0;
        for &j in &self.int_cols {
            if (run.x[j] - inc[j]).abs() <= S::int_tol() && lo[j] <= inc[j] && inc[j] <= hi[j] {
                lo[j] = inc[j];
                hi[j] = inc[j];
                fixed += 1;
            }
        }
        if fixed * 2 < self.int_cols.len() || fixed == self.int_cols.len() {
            return Ok(());
        }
        let mut sub = self.inst.clone();
        sub.lower = lo;
        sub.upper = hi;
        let limits = MilpLimits {
            time_limit: self.deadline.map(|d| d.saturating_duration_since(Instant::now())),
            gap,
            node_limit: Some(node_budget),
        };
        let found = search(&sub, &limits, None, false)?;
        if !found.x.is_empty() {
            self.offer(Some((found.objective, found.x)));
        }
        Ok(())
    }

    fn offer(&mut self, candidate: Option<(S, Vec<S>)>) -> bool {
        match candidate {
            Some((obj, x)) if self.incumbent.as_ref().is_none_or(|(best, _)| obj < *best) => {
                self.incumbent = Some((obj, x));
                true
            }
            _ => false,
        }
    }

    /// Depth-first dive: repeatedly fix the integer column nearest to
    /// integrality at its rounded value; on infeasibility try the other side
    /// once, then give up.
    fn dive(&mut self, fixes: &[(usize, S, S)], run: &LpRun<S>, budget: usize) -> Result<(), SolveError> {
        let mut fixes = fixes.to_vec();
        let mut current = LpRun {
            status: run.status,
            x: run.x.clone(),
            objective: run.objective,
            duals: Vec::new(),
            basis: run.basis.clone(),
            iterations: 0,
        };
        for _ in 0..budget {
            if self.out_of_time() {
                return Ok(());
            }
            if let Some((inc, _)) = &self.incumbent {
                if current.objective >= *inc {
                    return Ok(());
                }
            }
            let mut pick: Option<(usize, S, S)> = None;
            for &j in &self.int_cols {
                let v = current.x[j];
                let dist = (v - v.round()).abs();
                if dist <= S::int_tol() {
                    continue;
                }
                if pick.is_none_or(|(_, _, d)| dist < d) {
                    pick = Some((j, v.round(), dist));
                }
            }
            let Some((j, target, _)) = pick else {
                let candidate = self.polish(&fixes, &current)?;
                self.offer(candidate);
                return Ok(());
            };
            let other = if target > current.x[j] { target - S::one() } else { target + S::one() };
            let mut next = None;
            for value in [target, other] {
                if value < self.inst.lower[j] || value > self.inst.upper[j] {
                    continue;
                }
                fixes.push((j, value, value));
                let r = self.solve(&fixes, Some(&current.basis))?;
                if r.status == LpStatus::Optimal {
                    next = Some(r);
                    break;
                }
                fixes.pop();
            }
            match next {
                Some(r) => current = r,
                None => return Ok(()),
            }
        }
        Ok(())
    }
}

/// Solve `instance` to the requested gap.
///
/// Nodes are explored in order of their parent's LP bound (ties by creation
/// order). A dive from the root supplies the first incumbent; further dives
/// run periodically while none is known. The optional `log` receives one
/// `node,depth,bound,incumbent,gap` line per processed node.
pub fn solve_milp<S: Scalar>(
    instance: &MilpInstance<S>,
    limits: &MilpLimits,
    log: Option<&mut dyn Write>,
) -> Result<MilpSolution<S>, SolveError> {
    search(instance, limits, log, true)
}

/// Nodes between neighbourhood searches, and the node budget of each.
const RINS_EVERY: usize = 100;
const RINS_NODES: usize = 200;

fn search<S: Scalar>(
    instance: &MilpInstance<S>,
    limits: &MilpLimits,
    mut log: Option<&mut dyn Write>,
    heuristics: bool,
) -> Result<MilpSolution<S>, SolveError> {
    let start = Instant::now();
    let n = instance.num_cols();
    let mut search = Search {
        inst: instance,
        lp: LpModel::new(instance),
        int_cols: (0..n).filter(|&j| instance.integer[j]).collect(),
        incumbent: None,
        lp_solves: 0,
        deadline: limits.time_limit.map(|t| start + t),
    };
    let gap_target = S::of(limits.gap.max(0.0));
    let optimal_gap = S::of(OPTIMAL_GAP);

    let mut heap = BinaryHeap::new();
    heap.push(Node { id: 0, depth: 0, bound: S::neg_infinity(), fixes: Vec::new(), basis: None });
    let mut next_id = 1;
    let mut nodes = 0usize;
    let mut global_bound = S::neg_infinity();
    // Smallest LP bound among nodes discarded because they could not beat the incumbent.
    let mut pruned_bound = S::infinity();
    let mut limit_reached = false;
    let mut dived_at_root = false;

    while let Some(node) = heap.pop() {
        if let Some((inc, _)) = &search.incumbent {
            let inc = *inc;
            global_bound = global_bound.max(node.bound.min(inc));
            if relative_gap(inc, node.bound) <= gap_target {
                pruned_bound = pruned_bound.min(node.bound);
                // Everything left is at least as bad.
                for rest in heap.drain() {
                    pruned_bound = pruned_bound.min(rest.bound);
                }
                break;
            }
        } else {
            global_bound = global_bound.max(node.bound);
        }
        let out_of_time = limits.time_limit.is_some_and(|t| start.elapsed() >= t);
        let out_of_nodes = limits.node_limit.is_some_and(|cap| nodes >= cap);
        if out_of_time || out_of_nodes {
            limit_reached = true;
            heap.push(node);
            break;
        }

        nodes += 1;
        let run = search.solve(&node.fixes, node.basis.as_ref())?;
        let status = run.status;
        if status == LpStatus::Unbounded {
            return Err(SolveError::Numerical("LP relaxation is unbounded".into()));
        }
        if status == LpStatus::Optimal {
            let obj = run.objective;
            let beaten = search
                .incumbent
                .as_ref()
                .is_some_and(|(inc, _)| relative_gap(*inc, obj) <= gap_target || obj >= *inc);
            if beaten {
                pruned_bound = pruned_bound.min(obj);
            } else {
                if !dived_at_root || (search.incumbent.is_none() && nodes % 64 == 0) {
                    dived_at_root = true;
                    search.dive(&node.fixes, &run, search.int_cols.len() + 1)?;
                } else if heuristics && nodes % RINS_EVERY == 0 {
                    search.rins(&node.fixes, &run, RINS_NODES, limits.gap)?;
                }
                match search.branching_col(&run.x) {
                    None => {
                        let candidate = search.polish(&node.fixes, &run)?;
                        search.offer(candidate);
                    }
                    Some((j, v)) => {
                        let beaten = search
                            .incumbent
                            .as_ref()
                            .is_some_and(|(inc, _)| relative_gap(*inc, obj) <= gap_target || obj >= *inc);
                        if beaten {
                            pruned_bound = pruned_bound.min(obj);
                        } else {
                            let base = match &search.incumbent {
                                Some((inc, _)) => {
                                    let cutoff = *inc - gap_target * inc.abs().max(S::one());
                                    let (tightened, removed) = search.reduced_cost_fixes(&node.fixes, &run, cutoff);
                                    pruned_bound = pruned_bound.min(removed);
                                    tightened
                                }
                                None => node.fixes.clone(),
                            };
                            for (l, u) in [(instance.lower[j], v.floor()), (v.ceil(), instance.upper[j])] {
                                let mut fixes = base.clone();
                                match fixes.iter_mut().find(|f| f.0 == j) {
                                    Some(f) => {
                                        f.1 = f.1.max(l);
                                        f.2 = f.2.min(u);
                                    }
                                    None => fixes.push((j, l, u)),
                                }
                                heap.push(Node {
                                    id: next_id,
                                    depth: node.depth + 1,
                                    bound: obj,
                                    fixes,
                                    basis: Some(run.basis.clone()),
                                });
                                next_id += 1;
                            }
                        }
                    }
                }
            }
        }
        if let Some(w) = log.as_deref_mut() {
            let inc = search.incumbent.as_ref().map(|(v, _)| *v).unwrap_or(S::infinity());
            let shown = global_bound.min(inc);
            let _ = writeln!(w, "{},{},{},{},{}", nodes, node.depth, shown, inc, relative_gap(inc, shown));
        }
    }

    let open_bound = heap.iter().map(|n| n.bound).fold(S::infinity(), S::min);
    match search.incumbent.take() {
        Some((obj, x)) => {
            let bound = open_bound.min(pruned_bound).min(obj).max(global_bound.min(obj));
            let gap = relative_gap(obj, bound);
            let status = if gap <= optimal_gap { MilpStatus::Optimal } else { MilpStatus::Feasible { gap: gap.as_f64() } };
            Ok(MilpSolution { status, x, objective: obj, bound, gap, nodes, limit_reached })
        }
        None => {
            let status = if limit_reached { MilpStatus::NoIncumbent } else { MilpStatus::Infeasible };
            Ok(MilpSolution {
                status,
                x: Vec::new(),
                objective: S::infinity(),
                bound: if limit_reached { global_bound } else { S::infinity() },
                gap: S::infinity(),
                nodes,
                limit_reached,
            })
        }
    }
}
