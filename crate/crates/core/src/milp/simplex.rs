//! Bounded-variable primal revised simplex.
//!
//! Every row `a x <rel> b` gets a logical variable `s` with `a x - s = 0`, so
//! row senses become bounds on `s` and the all-logical basis is always a
//! valid start. Phase 1 minimizes the sum of bound violations of the basic
//! variables, phase 2 the (scaled) objective. Pricing is Dantzig's rule with
//! a Harris two-pass ratio test; long runs of degenerate pivots switch to
//! Bland's rule until progress resumes. Fixed variables never enter, which
//! removes them from the problem without rebuilding it.

use std::time::Instant;

use super::lu::BasisFactor;
use super::problem::{MilpProblem, Relation, SolveStatus};

const REFACTOR_EVERY: usize = 80;
const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const DEGENERATE_SWITCH: usize = 60;
const MAX_VERIFY_FAILURES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable sitting at zero.
    AtZero,
}

/// Snapshot of a basis, used to warm start related LPs.
#[derive(Debug, Clone)]
pub struct Basis {
    status: Vec<VarStatus>,
    basic: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: SolveStatus,
    /// Structural variable values (unscaled); empty unless optimal.
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

enum Step {
    Flip(f64),
    Pivot { pos: usize, theta: f64, to_upper: bool },
    Unbounded,
}

/// LP in the internal `[A | -I]` form, with a persistent basis so that
/// bound changes can be re-optimized from the previous optimum.
#[derive(Debug, Clone)]
pub struct LpSolver {
    m: usize,
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    cost_scale: f64,
    objective_constant: f64,
    feas_tol: f64,
    status: Vec<VarStatus>,
    basic: Vec<usize>,
    x: Vec<f64>,
    factor: Option<BasisFactor>,
}

impl LpSolver {
    /// Build the LP relaxation of `problem` (integrality is ignored).
    pub fn new(problem: &MilpProblem, feas_tol: f64) -> Self {
        let n = problem.variables.len();
        let m = problem.constraints.len();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut lower = Vec::with_capacity(n + m);
        let mut upper = Vec::with_capacity(n + m);
        for v in &problem.variables {
            lower.push(v.lower);
            upper.push(v.upper);
        }
        for (i, c) in problem.constraints.iter().enumerate() {
            for &(v, a) in &c.coeffs {
                cols[v.0].push((i, a));
            }
            let (lo, hi) = match c.relation {
                Relation::LessEq => (f64::NEG_INFINITY, c.rhs),
                Relation::GreaterEq => (c.rhs, f64::INFINITY),
                Relation::Equal => (c.rhs, c.rhs),
            };
            lower.push(lo);
            upper.push(hi);
        }
        let max_cost = problem
            .variables
            .iter()
            .map(|v| v.cost.abs())
            .fold(0.0, f64::max);
        let cost_scale = if max_cost > 0.0 { 1.0 / max_cost } else { 1.0 };
        let mut cost: Vec<f64> = problem.variables.iter().map(|v| v.cost * cost_scale).collect();
        cost.resize(n + m, 0.0);

        let mut s = LpSolver {
            m,
            n,
            cols,
            lower,
            upper,
            cost,
            cost_scale,
            objective_constant: problem.objective_constant,
            feas_tol,
            status: vec![VarStatus::AtLower; n + m],
            basic: (n..n + m).collect(),
            x: vec![0.0; n + m],
            factor: None,
        };
        for j in 0..n {
            s.place_nonbasic(j);
        }
        for i in 0..m {
            s.status[n + i] = VarStatus::Basic;
        }
        s
    }

    pub fn num_structural(&self) -> usize {
        self.n
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    /// Change the bounds of structural variable `j`, keeping the basis.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
        if self.status[j] != VarStatus::Basic {
            self.place_nonbasic(j);
        }
    }

    pub fn basis(&self) -> Basis {
        Basis {
            status: self.status.clone(),
            basic: self.basic.clone(),
        }
    }

    pub fn set_basis(&mut self, basis: &Basis) {
        debug_assert_eq!(basis.basic.len(), self.m);
        self.status.clone_from(&basis.status);
        self.basic.clone_from(&basis.basic);
        for j in 0..self.n + self.m {
            if self.status[j] != VarStatus::Basic {
                self.place_nonbasic(j);
            }
        }
        self.factor = None;
    }

    fn place_nonbasic(&mut self, j: usize) {
        let (lo, hi) = (self.lower[j], self.upper[j]);
        let st = match self.status[j] {
            VarStatus::AtUpper if hi.is_finite() => VarStatus::AtUpper,
            _ if lo.is_finite() => VarStatus::AtLower,
            _ if hi.is_finite() => VarStatus::AtUpper,
            _ => VarStatus::AtZero,
        };
        self.status[j] = st;
        self.x[j] = match st {
            VarStatus::AtLower => lo,
            VarStatus::AtUpper => hi,
            _ => 0.0,
        };
    }

    fn column(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            self.cols[j].clone()
        } else {
            vec![(j - self.n, -1.0)]
        }
    }

    fn refactor(&mut self) {
        let columns: Vec<Vec<(usize, f64)>> = self.basic.iter().map(|&j| self.column(j)).collect();
        let (factor, replacements) = BasisFactor::factor(self.m, &columns);
        for r in replacements {
            let old = self.basic[r.pos];
            let logical = self.n + r.row;
            self.status[old] = VarStatus::AtLower;
            self.place_nonbasic(old);
            self.basic[r.pos] = logical;
            self.status[logical] = VarStatus::Basic;
        }
        self.factor = Some(factor);
        self.recompute_basics();
    }

    fn recompute_basics(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for j in 0..self.n + self.m {
            if self.status[j] == VarStatus::Basic {
                continue;
            }
            let xj = self.x[j];
            if xj == 0.0 {
                continue;
            }
            if j < self.n {
                for &(i, a) in &self.cols[j] {
                    rhs[i] -= a * xj;
                }
            } else {
                rhs[j - self.n] += xj;
            }
        }
        let mut xb = vec![0.0; self.m];
        self.factor
            .as_ref()
            .expect("factor present")
            .ftran(&mut rhs, &mut xb);
        for (p, &j) in self.basic.iter().enumerate() {
            self.x[j] = xb[p];
        }
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lower[j] - self.feas_tol {
            self.lower[j] - v
        } else if v > self.upper[j] + self.feas_tol {
            v - self.upper[j]
        } else {
            0.0
        }
    }

    fn reduced_cost(&self, j: usize, y: &[f64], phase_one: bool) -> f64 {
        let c = if phase_one { 0.0 } else { self.cost[j] };
        if j < self.n {
            c - self.cols[j].iter().map(|&(i, a)| a * y[i]).sum::<f64>()
        } else {
            c + y[j - self.n]
        }
    }

    fn price(&self, y: &[f64], phase_one: bool, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.n + self.m {
            let st = self.status[j];
            if st == VarStatus::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let d = self.reduced_cost(j, y, phase_one);
            let eligible = match st {
                VarStatus::AtLower => d < -DUAL_TOL,
                VarStatus::AtUpper => d > DUAL_TOL,
                VarStatus::AtZero => d.abs() > DUAL_TOL,
                VarStatus::Basic => false,
            };
            if !eligible {
                continue;
            }
            if bland {
                return Some((j, d));
            }
            match best {
                Some((_, bd)) if bd.abs() >= d.abs() => {}
                _ => best = Some((j, d)),
            }
        }
        best
    }

    fn ratio_test(&self, q: usize, dir: f64, alpha: &[f64], bland: bool) -> Step {
        let tol = self.feas_tol;
        // (position, exact ratio, |rate|, moves to upper)
        let mut cands: Vec<(usize, f64, f64, bool)> = Vec::new();
        let mut theta_max = f64::INFINITY;
        for (p, &a) in alpha.iter().enumerate() {
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basic[p];
            let rate = -dir * a;
            let xj = self.x[j];
            let (lo, hi) = (self.lower[j], self.upper[j]);
            let target = if rate < 0.0 {
                if xj > hi + tol {
                    Some((hi, true))
                } else if xj < lo - tol {
                    None
                } else if lo.is_finite() {
                    Some((lo, false))
                } else {
                    None
                }
            } else if xj < lo - tol {
                Some((lo, false))
            } else if xj > hi + tol {
                None
            } else if hi.is_finite() {
                Some((hi, true))
            } else {
                None
            };
            if let Some((bound, to_upper)) = target {
                let exact = (bound - xj) / rate;
                let relaxed = exact + tol / rate.abs();
                theta_max = theta_max.min(relaxed);
                cands.push((p, exact, rate.abs(), to_upper));
            }
        }
        let range = self.upper[q] - self.lower[q];
        if theta_max.is_infinite() && !range.is_finite() {
            return Step::Unbounded;
        }
        if range.is_finite() && range <= theta_max {
            return Step::Flip(range);
        }
        let chosen = if bland {
            let min_ratio = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            cands
                .iter()
                .filter(|c| c.1 <= min_ratio + 1e-12)
                .min_by_key(|c| self.basic[c.0])
                .copied()
        } else {
            cands
                .iter()
                .filter(|c| c.1 <= theta_max)
                .max_by(|a, b| {
                    a.2.partial_cmp(&b.2)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then_with(|| self.basic[b.0].cmp(&self.basic[a.0]))
                })
                .copied()
        };
        match chosen {
            Some((pos, exact, _, to_upper)) => Step::Pivot {
                pos,
                theta: exact.max(0.0),
                to_upper,
            },
            None => Step::Unbounded,
        }
    }

    /// Run the simplex method from the current basis.
    pub fn solve(&mut self, iteration_limit: usize, deadline: Option<Instant>) -> LpOutcome {
        let mut iterations = 0usize;
        let mut fresh = false;
        let mut degenerate_run = 0usize;
        let mut bland = false;
        let mut verify_failures = 0usize;
        let m = self.m;
        let mut cb = vec![0.0; m];
        let mut y = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        let mut work = vec![0.0; m];

        loop {
            if self.factor.as_ref().is_none_or(|f| f.num_updates() >= REFACTOR_EVERY) {
                self.refactor();
                fresh = true;
            }
            let phase_one = self.basic.iter().any(|&j| self.infeasibility(j) > 0.0);
            for (p, &j) in self.basic.iter().enumerate() {
                cb[p] = if phase_one {
                    let v = self.x[j];
                    if v < self.lower[j] - self.feas_tol {
                        -1.0
                    } else if v > self.upper[j] + self.feas_tol {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    self.cost[j]
                };
            }
            let factor = self.factor.as_ref().expect("factor present");
            work.copy_from_slice(&cb);
            factor.btran(&mut work, &mut y);

            let Some((q, d)) = self.price(&y, phase_one, bland) else {
                if !fresh {
                    self.factor = None;
                    verify_failures += 1;
                    if verify_failures > MAX_VERIFY_FAILURES {
                        return self.finish(SolveStatus::NumericalFailure, iterations);
                    }
                    continue;
                }
                let status = if phase_one {
                    SolveStatus::Infeasible
                } else {
                    SolveStatus::Optimal
                };
                return self.finish(status, iterations);
            };

            iterations += 1;
            if iterations > iteration_limit {
                return self.finish(SolveStatus::Limit, iterations);
            }
            if iterations.is_multiple_of(64) {
                if let Some(dl) = deadline {
                    if Instant::now() >= dl {
                        return self.finish(SolveStatus::Limit, iterations);
                    }
                }
            }

            let dir = if d < 0.0 { 1.0 } else { -1.0 };
            work.iter_mut().for_each(|w| *w = 0.0);
            if q < self.n {
                for &(i, a) in &self.cols[q] {
                    work[i] = a;
                }
            } else {
                work[q - self.n] = -1.0;
            }
            factor.ftran(&mut work, &mut alpha);

            let step = self.ratio_test(q, dir, &alpha, bland);
            let theta = match step {
                Step::Unbounded => {
                    if phase_one || !fresh {
                        // should not happen in phase 1; retry on a clean factor
                        self.factor = None;
                        verify_failures += 1;
                        if verify_failures > MAX_VERIFY_FAILURES {
                            return self.finish(SolveStatus::NumericalFailure, iterations);
                        }
                        continue;
                    }
                    return self.finish(SolveStatus::Unbounded, iterations);
                }
                Step::Flip(t) => t,
                Step::Pivot { theta, .. } => theta,
            };

            if theta != 0.0 {
                self.x[q] += dir * theta;
                for (p, &a) in alpha.iter().enumerate() {
                    if a != 0.0 {
                        let j = self.basic[p];
                        self.x[j] -= dir * theta * a;
                    }
                }
            }
            match step {
                Step::Flip(_) => {
                    self.status[q] = if dir > 0.0 {
                        self.x[q] = self.upper[q];
                        VarStatus::AtUpper
                    } else {
                        self.x[q] = self.lower[q];
                        VarStatus::AtLower
                    };
                }
                Step::Pivot { pos, to_upper, .. } => {
                    let leaving = self.basic[pos];
                    if to_upper {
                        self.x[leaving] = self.upper[leaving];
                        self.status[leaving] = VarStatus::AtUpper;
                    } else {
                        self.x[leaving] = self.lower[leaving];
                        self.status[leaving] = VarStatus::AtLower;
                    }
                    self.basic[pos] = q;
                    self.status[q] = VarStatus::Basic;
                    self.factor
                        .as_mut()
                        .expect("factor present")
                        .update(pos, &alpha);
                }
                Step::Unbounded => unreachable!(),
            }
            fresh = false;

            if theta * d.abs() < 1e-12 {
                degenerate_run += 1;
                if degenerate_run > DEGENERATE_SWITCH {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

    fn finish(&mut self, status: SolveStatus, iterations: usize) -> LpOutcome {
        if status != SolveStatus::Optimal {
            return LpOutcome {
                status,
                values: Vec::new(),
                objective: f64::NAN,
                iterations,
            };
        }
        let values: Vec<f64> = self.x[..self.n].to_vec();
        let objective = self.objective_constant
            + values
                .iter()
                .zip(&self.cost)
                .map(|(x, c)| x * c)
                .sum::<f64>()
                / self.cost_scale;
        LpOutcome {
            status,
            values,
            objective,
            iterations,
        }
    }
}

/// Solve the LP relaxation of `problem` from the all-logical basis.
pub fn solve_relaxation(
    problem: &MilpProblem,
    feas_tol: f64,
    iteration_limit: usize,
    deadline: Option<Instant>,
) -> LpOutcome {
    let mut lp = LpSolver::new(problem, feas_tol);
    lp.solve(iteration_limit, deadline)
}
