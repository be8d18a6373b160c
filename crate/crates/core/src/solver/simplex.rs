//! Bounded-variable revised primal simplex.
//!
//! Each row `i` gets a logical variable `r_i = a_i · x` whose bounds encode the
//! row sense, giving the equality system `[A | -I] (x, r) = 0`. Every variable
//! then carries its own bounds and nonbasic variables sit at one of them.
//! Phase 1 minimises the sum of bound violations of the basic variables and
//! hands over to phase 2 as soon as the basis is feasible. Pricing is
//! Dantzig's rule with a two-pass (Harris) ratio test; after a run of
//! degenerate pivots the solver switches to Bland's rule until the objective
//! moves again.
//!
//! A warm start whose basis is dual feasible (the usual case after a bound
//! change in branch and bound) first runs a dual simplex phase, which restores
//! primal feasibility in a handful of pivots; the primal loop then confirms
//! optimality.

use serde::{Deserialize, Serialize};

use super::lu::{BasisFactor, SparseVec};
use crate::error::SolveError;
use crate::model::{MilpInstance, Sense};
use crate::scalar::Scalar;

const REFACTOR_EVERY: usize = 64;
const DEGENERATE_RUN: usize = 40;
const STALL_TOL: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    /// Structural column values (meaningful when optimal).
    pub x: Vec<S>,
    pub objective: S,
    /// Row multipliers of the final basis.
    pub duals: Vec<S>,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum VarState {
    Basic(u32),
    Lower,
    Upper,
}

/// Warm-start information: which variable occupies each basis position and
/// where every nonbasic variable rests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Basis {
    pub basic: Vec<u32>,
    pub state: Vec<VarState>,
}

impl Basis {
    fn slack(n: usize, m: usize) -> Self {
        let mut state = vec![VarState::Lower; n + m];
        for i in 0..m {
            state[n + i] = VarState::Basic(i as u32);
        }
        Self { basic: (n..n + m).map(|j| j as u32).collect(), state }
    }
}

pub(crate) struct LpRun<S> {
    pub status: LpStatus,
    /// Structural and logical values.
    pub x: Vec<S>,
    pub objective: S,
    pub duals: Vec<S>,
    pub basis: Basis,
    pub iterations: usize,
}

/// Column-major copy of an instance's constraint matrix plus logical columns.
pub(crate) struct LpModel<S> {
    pub n: usize,
    pub m: usize,
    cols: Vec<SparseVec<S>>,
    cost: Vec<S>,
    row_lo: Vec<S>,
    row_hi: Vec<S>,
}

impl<S: Scalar> LpModel<S> {
    pub fn new(inst: &MilpInstance<S>) -> Self {
        let n = inst.num_cols();
        let m = inst.num_rows();
        let mut cols = vec![SparseVec::new(); n + m];
        let mut row_lo = Vec::with_capacity(m);
        let mut row_hi = Vec::with_capacity(m);
        for (i, r) in inst.rows.iter().enumerate() {
            for &(j, a) in &r.coeffs {
                if a != S::zero() {
                    cols[j].push(i, a);
                }
            }
            cols[n + i].push(i, -S::one());
            let (lo, hi) = match r.sense {
                Sense::Le => (S::neg_infinity(), r.rhs),
                Sense::Ge => (r.rhs, S::infinity()),
                Sense::Eq => (r.rhs, r.rhs),
            };
            row_lo.push(lo);
            row_hi.push(hi);
        }
        let mut cost = inst.objective.clone();
        cost.resize(n + m, S::zero());
        Self { n, m, cols, cost, row_lo, row_hi }
    }

    /// Full bound vectors (structural followed by logical).
    fn full_bounds(&self, lower: &[S], upper: &[S]) -> (Vec<S>, Vec<S>) {
        let mut lo = lower.to_vec();
        let mut hi = upper.to_vec();
        lo.extend_from_slice(&self.row_lo);
        hi.extend_from_slice(&self.row_hi);
        (lo, hi)
    }

    fn factorize(&self, basis: &mut Basis, x: &mut [S], lo: &[S], hi: &[S]) -> Result<BasisFactor<S>, SolveError> {
        for _ in 0..4 {
            let cols: Vec<&SparseVec<S>> = basis.basic.iter().map(|&j| &self.cols[j as usize]).collect();
            match BasisFactor::factor(self.m, &cols) {
                Ok(f) => return Ok(f),
                Err(singular) => {
                    // Swap the dependent columns for logicals of the unpivoted rows.
                    for (&pos, &row) in singular.positions.iter().zip(&singular.rows) {
                        let out = basis.basic[pos] as usize;
                        let (state, value) = rest_at_bound(lo[out], hi[out], VarState::Lower);
                        basis.state[out] = state;
                        x[out] = value;
                        let logical = self.n + row;
                        basis.basic[pos] = logical as u32;
                        basis.state[logical] = VarState::Basic(pos as u32);
                    }
                }
            }
        }
        Err(SolveError::Numerical("basis stays singular after repair".into()))
    }

    fn compute_basic(&self, factor: &mut BasisFactor<S>, basis: &Basis, x: &mut [S]) {
        let mut rhs = vec![S::zero(); self.m];
        for (j, st) in basis.state.iter().enumerate() {
            if !matches!(st, VarState::Basic(_)) && x[j] != S::zero() {
                for (i, a) in self.cols[j].iter() {
                    rhs[i] -= a * x[j];
                }
            }
        }
        factor.ftran(&mut rhs);
        for (p, &j) in basis.basic.iter().enumerate() {
            x[j as usize] = rhs[p];
        }
    }

    fn dot_col(&self, j: usize, y: &[S]) -> S {
        let mut s = S::zero();
        for (i, a) in self.cols[j].iter() {
            s += a * y[i];
        }
        s
    }

    /// `c_j - yᵀ a_j` for structural column `j`.
    pub fn reduced_cost(&self, j: usize, y: &[S]) -> S {
        self.cost[j] - self.dot_col(j, y)
    }

    /// Solve with structural bounds `lower`/`upper`, optionally from a basis.
    pub fn solve(&self, lower: &[S], upper: &[S], warm: Option<&Basis>) -> Result<LpRun<S>, SolveError> {
        let (n, m) = (self.n, self.m);
        let (lo, hi) = self.full_bounds(lower, upper);
        if (0..n + m).any(|j| lo[j] > hi[j]) {
            return Ok(LpRun {
                status: LpStatus::Infeasible,
                x: vec![S::zero(); n + m],
                objective: S::zero(),
                duals: vec![S::zero(); m],
                basis: warm.cloned().unwrap_or_else(|| Basis::slack(n, m)),
                iterations: 0,
            });
        }
        let mut basis = match warm {
            Some(b) if b.basic.len() == m && b.state.len() == n + m => b.clone(),
            _ => Basis::slack(n, m),
        };
        let mut x = vec![S::zero(); n + m];
        for j in 0..n + m {
            if !matches!(basis.state[j], VarState::Basic(_)) {
                let (state, value) = rest_at_bound(lo[j], hi[j], basis.state[j]);
                basis.state[j] = state;
                x[j] = value;
            }
        }
        let mut factor = self.factorize(&mut basis, &mut x, &lo, &hi)?;
        self.compute_basic(&mut factor, &basis, &mut x);
        let mut iterations = 0;
        if warm.is_some() {
            let outcome = self.dual_phase(&mut basis, &mut x, &mut factor, &lo, &hi, &mut iterations)?;
            if outcome == DualOutcome::Infeasible {
                let y = vec![S::zero(); m];
                return Ok(self.finish(LpStatus::Infeasible, x, y, basis, iterations));
            }
        }

        let feas = S::feas_tol();
        let opt = S::opt_tol();
        let htol = S::harris_tol();
        let max_iter = 50 * (n + m) + 1000;
        let mut y = vec![S::zero(); m];
        let mut alpha = vec![S::zero(); m];
        let mut degenerate = 0;
        let mut bland = false;
        let mut recheck = 0;

        loop {
            if iterations >= max_iter {
                return Err(SolveError::Numerical(format!("no convergence after {iterations} iterations")));
            }
            if factor.num_updates() >= REFACTOR_EVERY {
                factor = self.factorize(&mut basis, &mut x, &lo, &hi)?;
                self.compute_basic(&mut factor, &basis, &mut x);
            }

            let phase1 = basis.basic.iter().any(|&j| {
                let j = j as usize;
                x[j] < lo[j] - feas || x[j] > hi[j] + feas
            });
            for (p, &j) in basis.basic.iter().enumerate() {
                let j = j as usize;
                y[p] = if phase1 {
                    if x[j] < lo[j] - feas {
                        -S::one()
                    } else if x[j] > hi[j] + feas {
                        S::one()
                    } else {
                        S::zero()
                    }
                } else {
                    self.cost[j]
                };
            }
            factor.btran(&mut y);

            // Pricing.
            let mut entering: Option<(usize, S, S)> = None;
            for j in 0..n + m {
                let st = basis.state[j];
                if matches!(st, VarState::Basic(_)) || lo[j] == hi[j] {
                    continue;
                }
                let cj = if phase1 { S::zero() } else { self.cost[j] };
                let dj = cj - self.dot_col(j, &y);
                let dir = match st {
                    VarState::Lower if dj < -opt => S::one(),
                    VarState::Upper if dj > opt => -S::one(),
                    _ => continue,
                };
                if bland {
                    entering = Some((j, dir, dj));
                    break;
                }
                if entering.is_none_or(|(_, _, best)| dj.abs() > best.abs()) {
                    entering = Some((j, dir, dj));
                }
            }

            let Some((q, dir, dq)) = entering else {
                if phase1 {
                    return Ok(self.finish(LpStatus::Infeasible, x, y, basis, iterations));
                }
                // Confirm optimality on a fresh factorisation before reporting.
                if factor.num_updates() > 0 && recheck < 3 {
                    recheck += 1;
                    factor = self.factorize(&mut basis, &mut x, &lo, &hi)?;
                    self.compute_basic(&mut factor, &basis, &mut x);
                    continue;
                }
                return Ok(self.finish(LpStatus::Optimal, x, y, basis, iterations));
            };
            iterations += 1;

            alpha.iter_mut().for_each(|a| *a = S::zero());
            for (i, a) in self.cols[q].iter() {
                alpha[i] = a;
            }
            factor.ftran(&mut alpha);

            // Ratio test. `rate` is dx_j/dθ for the basic variable at position p.
            let limit = |p: usize, relax: S| -> Option<(S, VarState)> {
                let a = alpha[p];
                if a.abs() <= S::pivot_tol() {
                    return None;
                }
                let j = basis.basic[p] as usize;
                let rate = -dir * a;
                let (xj, l, u) = (x[j], lo[j], hi[j]);
                if phase1 && xj < l - feas {
                    return (rate > S::zero()).then(|| ((l - xj + relax) / rate, VarState::Lower));
                }
                if phase1 && xj > u + feas {
                    return (rate < S::zero()).then(|| ((xj - u + relax) / -rate, VarState::Upper));
                }
                if rate < S::zero() && l.is_finite() {
                    Some((((xj - l).max(S::zero()) + relax) / -rate, VarState::Lower))
                } else if rate > S::zero() && u.is_finite() {
                    Some((((u - xj).max(S::zero()) + relax) / rate, VarState::Upper))
                } else {
                    None
                }
            };

            let flip = hi[q] - lo[q];
            let mut leave: Option<(usize, S, VarState)> = None;
            if bland {
                let mut best: Option<(usize, S, VarState)> = None;
                for p in 0..m {
                    if let Some((t, side)) = limit(p, S::zero()) {
                        let better = match best {
                            None => true,
                            Some((bp, bt, _)) => {
                                t < bt - S::drop_tol()
                                    || (t <= bt + S::drop_tol() && basis.basic[p] < basis.basic[bp])
                            }
                        };
                        if better {
                            best = Some((p, t, side));
                        }
                    }
                }
                leave = best;
            } else {
                let mut theta_max = S::infinity();
                for p in 0..m {
                    if let Some((t, _)) = limit(p, htol) {
                        theta_max = theta_max.min(t);
                    }
                }
                if theta_max.is_finite() {
                    let mut best_abs = S::zero();
                    for p in 0..m {
                        if let Some((t, side)) = limit(p, S::zero()) {
                            if t <= theta_max && alpha[p].abs() > best_abs {
                                best_abs = alpha[p].abs();
                                leave = Some((p, t, side));
                            }
                        }
                    }
                }
            }

            let blocking = leave.map(|(_, t, _)| t).unwrap_or(S::infinity());
            if flip <= blocking {
                if !flip.is_finite() {
                    if phase1 {
                        return Err(SolveError::Numerical("unbounded phase-1 direction".into()));
                    }
                    return Ok(self.finish(LpStatus::Unbounded, x, y, basis, iterations));
                }
                for p in 0..m {
                    let j = basis.basic[p] as usize;
                    x[j] -= dir * alpha[p] * flip;
                }
                let (state, value) = if dir > S::zero() { (VarState::Upper, hi[q]) } else { (VarState::Lower, lo[q]) };
                basis.state[q] = state;
                x[q] = value;
                if (dq * flip).abs() > S::of(STALL_TOL) {
                    degenerate = 0;
                    bland = false;
                }
                continue;
            }

            let (r, theta, side) = leave.expect("finite blocking step");
            let theta = theta.max(S::zero());
            for p in 0..m {
                let j = basis.basic[p] as usize;
                x[j] -= dir * alpha[p] * theta;
            }
            let out = basis.basic[r] as usize;
            x[out] = if side == VarState::Lower { lo[out] } else { hi[out] };
            basis.state[out] = side;
            x[q] += dir * theta;
            basis.basic[r] = q as u32;
            basis.state[q] = VarState::Basic(r as u32);
            factor.update(r, &alpha);

            // Steps that barely move the objective count as degenerate, so a
            // stall of tiny Harris steps still triggers Bland's rule.
            if (dq * theta).abs() <= S::of(STALL_TOL) {
                degenerate += 1;
                if degenerate >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }
        }
    }

    /// Dual simplex from a dual-feasible basis. Boxed nonbasic variables with
    /// the wrong reduced-cost sign are moved to their other bound first; if
    /// any remaining dual infeasibility cannot be repaired that way the phase
    /// hands back to the primal loop untouched.
    fn dual_phase(
        &self,
        basis: &mut Basis,
        x: &mut [S],
        factor: &mut BasisFactor<S>,
        lo: &[S],
        hi: &[S],
        iterations: &mut usize,
    ) -> Result<DualOutcome, SolveError> {
        let (n, m) = (self.n, self.m);
        let feas = S::feas_tol();
        let opt = S::opt_tol();
        let htol = S::harris_tol();
        let mut y = vec![S::zero(); m];
        let mut d = vec![S::zero(); n + m];
        let mut rho = vec![S::zero(); m];
        let mut alpha_r = vec![S::zero(); n + m];
        let mut alpha = vec![S::zero(); m];
        let mut flipped = false;
        let budget = 4 * m + 100;
        let mut verified_infeasible = false;

        for step in 0..=budget {
            if factor.num_updates() >= REFACTOR_EVERY {
                *factor = self.factorize(basis, x, lo, hi)?;
                self.compute_basic(factor, basis, x);
            }
            for (p, &j) in basis.basic.iter().enumerate() {
                y[p] = self.cost[j as usize];
            }
            factor.btran(&mut y);
            for j in 0..n + m {
                let st = basis.state[j];
                if matches!(st, VarState::Basic(_)) {
                    d[j] = S::zero();
                    continue;
                }
                d[j] = self.cost[j] - self.dot_col(j, &y);
                if lo[j] == hi[j] {
                    continue;
                }
                let wrong = match st {
                    VarState::Lower => d[j] < -opt,
                    VarState::Upper => d[j] > opt,
                    VarState::Basic(_) => false,
                };
                if wrong {
                    if step > 0 || !(lo[j].is_finite() && hi[j].is_finite()) {
                        return Ok(DualOutcome::Handover);
                    }
                    let (state, value) = match st {
                        VarState::Lower => (VarState::Upper, hi[j]),
                        _ => (VarState::Lower, lo[j]),
                    };
                    basis.state[j] = state;
                    x[j] = value;
                    flipped = true;
                }
            }
            if flipped {
                flipped = false;
                self.compute_basic(factor, basis, x);
            }
            if step == budget {
                return Ok(DualOutcome::Handover);
            }

            // Leaving variable: largest bound violation.
            let mut leave: Option<(usize, S, S)> = None;
            for (p, &j) in basis.basic.iter().enumerate() {
                let j = j as usize;
                let viol = if x[j] < lo[j] - feas {
                    lo[j] - x[j]
                } else if x[j] > hi[j] + feas {
                    x[j] - hi[j]
                } else {
                    continue;
                };
                if leave.is_none_or(|(_, v, _)| viol > v) {
                    leave = Some((p, viol, if x[j] < lo[j] { S::one() } else { -S::one() }));
                }
            }
            let Some((r, _, sign)) = leave else {
                return Ok(DualOutcome::Feasible);
            };

            rho.iter_mut().for_each(|v| *v = S::zero());
            rho[r] = S::one();
            factor.btran(&mut rho);
            let eligible = |j: usize, a: S| -> bool {
                if a.abs() <= S::pivot_tol() || lo[j] == hi[j] {
                    return false;
                }
                match basis.state[j] {
                    VarState::Basic(_) => false,
                    VarState::Lower if hi[j] == S::infinity() && lo[j] == S::neg_infinity() => true,
                    VarState::Lower => sign * a < S::zero(),
                    VarState::Upper => sign * a > S::zero(),
                }
            };
            let mut theta_max = S::infinity();
            for j in 0..n + m {
                alpha_r[j] = if matches!(basis.state[j], VarState::Basic(_)) { S::zero() } else { self.dot_col(j, &rho) };
                if eligible(j, alpha_r[j]) {
                    theta_max = theta_max.min((d[j].abs() + htol) / alpha_r[j].abs());
                }
            }
            if !theta_max.is_finite() {
                // No entering candidate: the row proves infeasibility. Confirm once
                // on a fresh factorisation.
                if verified_infeasible {
                    return Ok(DualOutcome::Infeasible);
                }
                verified_infeasible = true;
                *factor = self.factorize(basis, x, lo, hi)?;
                self.compute_basic(factor, basis, x);
                continue;
            }
            verified_infeasible = false;
            let mut q = usize::MAX;
            let mut best = S::zero();
            for j in 0..n + m {
                if eligible(j, alpha_r[j]) && d[j].abs() / alpha_r[j].abs() <= theta_max && alpha_r[j].abs() > best {
                    best = alpha_r[j].abs();
                    q = j;
                }
            }
            *iterations += 1;

            alpha.iter_mut().for_each(|a| *a = S::zero());
            for (i, a) in self.cols[q].iter() {
                alpha[i] = a;
            }
            factor.ftran(&mut alpha);
            if alpha[r].abs() <= S::pivot_tol() {
                return Ok(DualOutcome::Handover);
            }
            let out = basis.basic[r] as usize;
            let target = if sign > S::zero() { lo[out] } else { hi[out] };
            // x_B = -B⁻¹ N x_N, so moving x_q by `delta` moves x_B by -alpha·delta.
            let delta = (x[out] - target) / alpha[r];
            for p in 0..m {
                let j = basis.basic[p] as usize;
                x[j] -= alpha[p] * delta;
            }
            x[q] += delta;
            x[out] = target;
            basis.state[out] = if sign > S::zero() { VarState::Lower } else { VarState::Upper };
            basis.basic[r] = q as u32;
            basis.state[q] = VarState::Basic(r as u32);
            factor.update(r, &alpha);
        }
        Ok(DualOutcome::Handover)
    }

    fn finish(&self, status: LpStatus, x: Vec<S>, y: Vec<S>, basis: Basis, iterations: usize) -> LpRun<S> {
        let objective = (0..self.n).map(|j| self.cost[j] * x[j]).sum();
        LpRun { status, x, objective, duals: y, basis, iterations }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DualOutcome {
    Feasible,
    Infeasible,
    Handover,
}

/// Where a nonbasic variable rests: its preferred side if finite, else the other.
fn rest_at_bound<S: Scalar>(lo: S, hi: S, prefer: VarState) -> (VarState, S) {
    match prefer {
        VarState::Upper if hi.is_finite() => (VarState::Upper, hi),
        _ if lo.is_finite() => (VarState::Lower, lo),
        _ if hi.is_finite() => (VarState::Upper, hi),
        _ => (VarState::Lower, S::zero()),
    }
}

/// Solve the LP relaxation of `instance` (integrality ignored).
pub fn solve_lp<S: Scalar>(instance: &MilpInstance<S>) -> Result<LpSolution<S>, SolveError> {
    let model = LpModel::new(instance);
    let run = model.solve(&instance.lower, &instance.upper, None)?;
    Ok(run.into_solution(model.n))
}

impl<S: Scalar> LpRun<S> {
    pub fn into_solution(mut self, n: usize) -> LpSolution<S> {
        self.x.truncate(n);
        LpSolution {
            status: self.status,
            x: self.x,
            objective: self.objective,
            duals: self.duals,
            iterations: self.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(cols: &[(f64, f64, f64)], rows: &[(&[(usize, f64)], Sense, f64)]) -> MilpInstance<f64> {
        let mut m = MilpInstance::new("t");
        for (j, &(lo, hi, c)) in cols.iter().enumerate() {
            m.add_col(format!("x{j}"), lo, hi, c, false);
        }
        for (i, (coeffs, sense, rhs)) in rows.iter().enumerate() {
            m.add_row(format!("r{i}"), coeffs.to_vec(), *sense, *rhs);
        }
        m
    }

    #[test]
    fn one_dimensional() {
        // min x  s.t. x >= 3, x <= 5
        let m = lp(&[(-100.0, 100.0, 1.0)], &[(&[(0, 1.0)], Sense::Ge, 3.0), (&[(0, 1.0)], Sense::Le, 5.0)]);
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 3.0).abs() < 1e-9);
        assert!((s.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_pair() {
        let m = lp(&[(-100.0, 100.0, 1.0)], &[(&[(0, 1.0)], Sense::Le, 1.0), (&[(0, 1.0)], Sense::Ge, 2.0)]);
        assert_eq!(solve_lp(&m).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_through_a_logical() {
        // min -x - y with x free of rows, y only bounded through x - y >= -inf... use a Ge row with no upper.
        let mut m = lp(&[(0.0, 1.0, 0.0)], &[]);
        m.add_col("y", 0.0, f64::INFINITY, -1.0, false);
        m.add_row("r", vec![(0, 1.0), (1, -1.0)], Sense::Le, 1.0);
        assert_eq!(solve_lp(&m).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn textbook_two_variable() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  => (2, 6), 36.
        let m = lp(
            &[(0.0, 100.0, -3.0), (0.0, 100.0, -5.0)],
            &[
                (&[(0, 1.0)], Sense::Le, 4.0),
                (&[(1, 2.0)], Sense::Le, 12.0),
                (&[(0, 3.0), (1, 2.0)], Sense::Le, 18.0),
            ],
        );
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_bound_flip() {
        // min x0 - x1 with x0 + x1 = 3, x in [0, 2]^2  => x = (1, 2), obj -1.
        let m = lp(&[(0.0, 2.0, 1.0), (0.0, 2.0, -1.0)], &[(&[(0, 1.0), (1, 1.0)], Sense::Eq, 3.0)]);
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-9);
    }

    #[test]
    fn duals_price_binding_rows() {
        // min -x s.t. 2x <= 4 : y = -0.5 on the row (dObj/drhs).
        let m = lp(&[(0.0, 10.0, -1.0)], &[(&[(0, 2.0)], Sense::Le, 4.0)]);
        let s = solve_lp(&m).unwrap();
        assert!((s.duals[0] + 0.5).abs() < 1e-9, "{:?}", s.duals);
    }

    #[test]
    fn runs_in_single_precision() {
        let m = lp(
            &[(0.0, 100.0, -3.0), (0.0, 100.0, -5.0)],
            &[
                (&[(0, 1.0)], Sense::Le, 4.0),
                (&[(1, 2.0)], Sense::Le, 12.0),
                (&[(0, 3.0), (1, 2.0)], Sense::Le, 18.0),
            ],
        )
        .cast::<f32>();
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 36.0).abs() < 1e-3);
    }
}
