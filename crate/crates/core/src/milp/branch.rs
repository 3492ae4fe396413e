//! Best-bound branch-and-bound over binary variables.
//!
//! Nodes are kept in a priority queue ordered by their parent's LP bound;
//! among equal bounds the most recently created node is explored first.
//! The branching variable is the most fractional binary, lowest index on
//! ties, and each node re-optimizes from its parent's final basis.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use super::problem::{MilpProblem, MilpSolution, SolveStatus, SolverConfig, VarKind};
use super::simplex::{Basis, LpSolver};

struct Node {
    bound: f64,
    id: usize,
    fixes: Vec<(usize, f64)>,
    basis: Option<Rc<Basis>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: "greater" means explored first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| self.id.cmp(&other.id))
    }
}

struct Incumbent {
    objective: f64,
    values: Vec<f64>,
}

fn gap_tolerance(config: &SolverConfig, objective: f64) -> f64 {
    config.relative_gap * objective.abs().max(1.0)
}

pub(crate) fn branch_and_bound(problem: &MilpProblem, config: &SolverConfig) -> MilpSolution {
    let start = Instant::now();
    let deadline = config
        .time_limit
        .map(|t| start + Duration::from_secs_f64(t));
    let binaries: Vec<usize> = problem
        .variables
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(j, _)| j)
        .collect();
    let root_bounds: Vec<(f64, f64)> = binaries
        .iter()
        .map(|&j| (problem.variables[j].lower, problem.variables[j].upper))
        .collect();

    let mut lp = LpSolver::new(problem, config.feasibility_tol);
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        id: 0,
        fixes: Vec::new(),
        basis: None,
    });
    let mut next_id = 1usize;
    let mut nodes = 0usize;
    let mut iterations = 0usize;
    let mut incumbent: Option<Incumbent> = None;
    let mut numerical_trouble = false;
    let mut hit_limit = false;
    let mut root_status = None;

    while let Some(node) = heap.pop() {
        if let Some(inc) = &incumbent {
            if node.bound >= inc.objective - gap_tolerance(config, inc.objective) {
                // every remaining node is at least as bad
                heap.clear();
                break;
            }
        }
        if nodes >= config.node_limit || deadline.is_some_and(|d| Instant::now() >= d) {
            heap.push(node);
            hit_limit = true;
            break;
        }
        nodes += 1;

        for (k, &j) in binaries.iter().enumerate() {
            let (lo, hi) = root_bounds[k];
            lp.set_bounds(j, lo, hi);
        }
        for &(j, v) in &node.fixes {
            lp.set_bounds(j, v, v);
        }
        if let Some(b) = &node.basis {
            lp.set_basis(b);
        }
        let out = lp.solve(config.iteration_limit, deadline);
        iterations += out.iterations;
        if root_status.is_none() {
            root_status = Some(out.status);
        }
        match out.status {
            SolveStatus::Optimal => {}
            SolveStatus::Infeasible => continue,
            SolveStatus::Unbounded => {
                if nodes == 1 {
                    return MilpSolution::without_values(SolveStatus::Unbounded, nodes, iterations);
                }
                numerical_trouble = true;
                continue;
            }
            SolveStatus::Limit => {
                heap.push(node);
                hit_limit = true;
                break;
            }
            SolveStatus::NumericalFailure => {
                numerical_trouble = true;
                continue;
            }
        }
        let bound = out.objective;
        if let Some(inc) = &incumbent {
            if bound >= inc.objective - gap_tolerance(config, inc.objective) {
                continue;
            }
        }

        let mut branch_var: Option<(usize, f64)> = None;
        for &j in &binaries {
            let x = out.values[j];
            let frac = (x - x.round()).abs();
            if frac > config.integrality_tol {
                match branch_var {
                    Some((_, f)) if f >= frac => {}
                    _ => branch_var = Some((j, frac)),
                }
            }
        }

        match branch_var {
            None => {
                let candidate = polish(&mut lp, &binaries, &out.values, config, deadline, &mut iterations)
                    .unwrap_or_else(|| {
                        let mut v = out.values.clone();
                        for &j in &binaries {
                            v[j] = v[j].round();
                        }
                        Incumbent {
                            objective: problem.objective_value(&v),
                            values: v,
                        }
                    });
                if incumbent
                    .as_ref()
                    .is_none_or(|inc| candidate.objective < inc.objective)
                {
                    incumbent = Some(candidate);
                }
            }
            Some((j, _)) => {
                let basis = Rc::new(lp.basis());
                for v in [0.0, 1.0] {
                    let mut fixes = node.fixes.clone();
                    fixes.push((j, v));
                    heap.push(Node {
                        bound,
                        id: next_id,
                        fixes,
                        basis: Some(Rc::clone(&basis)),
                    });
                    next_id += 1;
                }
            }
        }
    }

    let open_bound = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    match incumbent {
        Some(inc) => {
            let bound = open_bound.min(inc.objective);
            let status = if hit_limit {
                SolveStatus::Limit
            } else if numerical_trouble {
                SolveStatus::NumericalFailure
            } else {
                SolveStatus::Optimal
            };
            MilpSolution {
                status,
                objective: inc.objective,
                values: inc.values,
                bound,
                nodes,
                lp_iterations: iterations,
            }
        }
        None => {
            let status = if hit_limit {
                SolveStatus::Limit
            } else if numerical_trouble {
                SolveStatus::NumericalFailure
            } else {
                SolveStatus::Infeasible
            };
            let mut s = MilpSolution::without_values(status, nodes, iterations);
            if hit_limit {
                s.bound = open_bound;
            }
            s
        }
    }
}

/// Re-solve with every binary fixed to its rounded value so the continuous
/// part is consistent with exactly integral binaries.
fn polish(
    lp: &mut LpSolver,
    binaries: &[usize],
    values: &[f64],
    config: &SolverConfig,
    deadline: Option<Instant>,
    iterations: &mut usize,
) -> Option<Incumbent> {
    let saved: Vec<(f64, f64)> = binaries.iter().map(|&j| lp.bounds(j)).collect();
    let basis = lp.basis();
    for &j in binaries {
        let v = values[j].round();
        lp.set_bounds(j, v, v);
    }
    let out = lp.solve(config.iteration_limit, deadline);
    *iterations += out.iterations;
    for (&j, &(lo, hi)) in binaries.iter().zip(&saved) {
        lp.set_bounds(j, lo, hi);
    }
    lp.set_basis(&basis);
    if out.status != SolveStatus::Optimal {
        return None;
    }
    let mut v = out.values;
    for &j in binaries {
        v[j] = v[j].round();
    }
    Some(Incumbent {
        objective: out.objective,
        values: v,
    })
}
