//! LP/MILP kernel: a bounded-variable revised simplex, best-bound
//! branch-and-bound over binaries, and free-format MPS import/export.

mod branch;
mod lu;
pub mod mps;
mod problem;
mod simplex;

use std::time::{Duration, Instant};

use thiserror::Error;

pub use problem::{
    Constraint, MilpProblem, MilpSolution, Relation, SolveStatus, SolverConfig, VarId, VarKind,
    Variable,
};
pub use simplex::{Basis, LpOutcome, LpSolver, VarStatus};

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("MPS line {line}: {message}")]
    Mps { line: usize, message: String },
    #[error("unsupported MPS section {0}")]
    UnsupportedSection(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Solve the LP relaxation of `problem` (binaries treated as `[0, 1]`).
pub fn solve_lp(problem: &MilpProblem, config: &SolverConfig) -> Result<MilpSolution, MilpError> {
    problem.validate()?;
    config.validate()?;
    let deadline = config
        .time_limit
        .map(|t| Instant::now() + Duration::from_secs_f64(t));
    let out = simplex::solve_relaxation(problem, config.feasibility_tol, config.iteration_limit, deadline);
    Ok(match out.status {
        SolveStatus::Optimal => MilpSolution {
            status: SolveStatus::Optimal,
            objective: out.objective,
            bound: out.objective,
            values: out.values,
            nodes: 0,
            lp_iterations: out.iterations,
        },
        status => MilpSolution::without_values(status, 0, out.iterations),
    })
}

/// Solve `problem` to proven optimality (within the configured gap) by
/// branch-and-bound. Problems without binaries are solved as a single LP.
pub fn solve_milp(problem: &MilpProblem, config: &SolverConfig) -> Result<MilpSolution, MilpError> {
    problem.validate()?;
    config.validate()?;
    if !problem.has_integers() {
        return solve_lp(problem, config);
    }
    Ok(branch::branch_and_bound(problem, config))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn single_bound_lp() {
        let mut p = MilpProblem::new("t");
        let x = p.add_continuous("x", 0.0, 10.0, 1.0);
        p.add_constraint("c", vec![(x, 1.0)], Relation::GreaterEq, 3.0);
        let s = solve_lp(&p, &cfg()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.values[0] - 3.0).abs() < 1e-9);
        assert!((s.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn two_variable_vertex() {
        let mut p = MilpProblem::new("t");
        let x = p.add_continuous("x", 0.0, f64::INFINITY, -1.0);
        let y = p.add_continuous("y", 0.0, f64::INFINITY, -1.0);
        p.add_constraint("c1", vec![(x, 1.0), (y, 2.0)], Relation::LessEq, 4.0);
        p.add_constraint("c2", vec![(x, 3.0), (y, 1.0)], Relation::LessEq, 6.0);
        let s = solve_lp(&p, &cfg()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.values[0] - 1.6).abs() < 1e-9);
        assert!((s.values[1] - 1.2).abs() < 1e-9);
        assert!((s.objective + 2.8).abs() < 1e-9);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut p = MilpProblem::new("t");
        let x = p.add_continuous("x", f64::NEG_INFINITY, f64::INFINITY, 1.0);
        p.add_constraint("lo", vec![(x, 1.0)], Relation::GreaterEq, 3.0);
        p.add_constraint("hi", vec![(x, 1.0)], Relation::LessEq, 2.0);
        assert_eq!(solve_lp(&p, &cfg()).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_lp() {
        let mut p = MilpProblem::new("t");
        let x = p.add_continuous("x", 0.0, f64::INFINITY, -1.0);
        let y = p.add_continuous("y", 0.0, f64::INFINITY, 0.0);
        p.add_constraint("c", vec![(x, 1.0), (y, -1.0)], Relation::LessEq, 1.0);
        assert_eq!(solve_lp(&p, &cfg()).unwrap().status, SolveStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min |x - 2| style: x free, t >= x - 2, t >= 2 - x
        let mut p = MilpProblem::new("t");
        let x = p.add_continuous("x", f64::NEG_INFINITY, f64::INFINITY, 0.0);
        let t = p.add_continuous("t", f64::NEG_INFINITY, f64::INFINITY, 1.0);
        let z = p.add_continuous("z", f64::NEG_INFINITY, f64::INFINITY, 0.0);
        p.add_constraint("a", vec![(t, 1.0), (x, -1.0)], Relation::GreaterEq, -2.0);
        p.add_constraint("b", vec![(t, 1.0), (x, 1.0)], Relation::GreaterEq, 2.0);
        p.add_constraint("e", vec![(z, 1.0), (x, 1.0)], Relation::Equal, 5.0);
        let s = solve_lp(&p, &cfg()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!(s.objective.abs() < 1e-9);
        assert!((s.values[0] + s.values[2] - 5.0).abs() < 1e-9);
    }

    #[test]
    fn small_binary_knapsack() {
        let mut p = MilpProblem::new("t");
        let x1 = p.add_binary("x1", -1.0);
        let x2 = p.add_binary("x2", -2.0);
        p.add_constraint("c", vec![(x1, 1.0), (x2, 1.0)], Relation::LessEq, 1.5);
        let s = solve_milp(&p, &cfg()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.values, vec![0.0, 1.0]);
        assert!((s.objective + 2.0).abs() < 1e-9);
    }

    #[test]
    fn integral_relaxation_solves_at_root() {
        let mut p = MilpProblem::new("t");
        let x1 = p.add_binary("x1", -1.0);
        let x2 = p.add_binary("x2", -1.0);
        p.add_constraint("c", vec![(x1, 1.0), (x2, 1.0)], Relation::LessEq, 2.0);
        let s = solve_milp(&p, &cfg()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.nodes, 1);
    }

    #[test]
    fn continuous_milp_equals_lp() {
        let mut p = MilpProblem::new("t");
        let x = p.add_continuous("x", 0.0, 4.0, -3.0);
        let y = p.add_continuous("y", 0.0, 4.0, -2.0);
        p.add_constraint("c", vec![(x, 2.0), (y, 1.0)], Relation::LessEq, 6.0);
        let a = solve_milp(&p, &cfg()).unwrap();
        let b = solve_lp(&p, &cfg()).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.objective, b.objective);
    }

    #[test]
    fn infeasible_milp() {
        let mut p = MilpProblem::new("t");
        let x1 = p.add_binary("x1", 1.0);
        let x2 = p.add_binary("x2", 1.0);
        p.add_constraint("c", vec![(x1, 1.0), (x2, 1.0)], Relation::Equal, 1.5);
        assert_eq!(solve_milp(&p, &cfg()).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn rejects_invalid_problems() {
        let mut p = MilpProblem::new("t");
        p.add_continuous("x", 2.0, 1.0, 0.0);
        assert!(matches!(solve_lp(&p, &cfg()), Err(MilpError::Invalid(_))));
        let mut p = MilpProblem::new("t");
        p.add_continuous("x", 0.0, 1.0, 0.0);
        p.add_continuous("x", 0.0, 1.0, 0.0);
        assert!(p.validate().is_err());
    }
}
