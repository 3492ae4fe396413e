use super::{build_scuc, ScucError, ScucInstance, ScucModel};
use crate::milp::{solve_milp, MilpSolution, SolveStatus, SolverConfig};

const RESIDUAL_TOL: f64 = 1e-6;

/// Commitment and dispatch of one day. Power quantities are MW, rows follow
/// the instance view order with one value per interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ScucSolution {
    pub status: SolveStatus,
    pub commitment: Vec<Vec<bool>>,
    pub startup: Vec<Vec<f64>>,
    pub dispatch: Vec<Vec<f64>>,
    pub reserve: Vec<Vec<f64>>,
    pub flows: Vec<Vec<f64>>,
    pub angles: Vec<Vec<f64>>,
    pub shed: Vec<Vec<f64>>,
    pub curtail: Vec<Vec<f64>>,
    /// Fuel, online and startup cost, $.
    pub operating_cost: f64,
    /// Shedding penalty, $.
    pub penalty: f64,
    pub objective: f64,
}

impl ScucSolution {
    pub fn total_shed_mwh(&self, interval_hours: f64) -> f64 {
        self.shed.iter().flatten().sum::<f64>() * interval_hours
    }

    pub fn total_generation_mwh(&self, interval_hours: f64) -> f64 {
        self.dispatch.iter().flatten().sum::<f64>() * interval_hours
    }
}

pub fn extract_scuc_solution(sol: &MilpSolution, model: &ScucModel, inst: &ScucInstance) -> Result<ScucSolution, ScucError> {
    if sol.status != SolveStatus::Optimal {
        return Err(ScucError::Status(sol.status));
    }
    let x = &sol.values;
    let viol = model.problem.max_violation(x);
    if viol > RESIDUAL_TOL {
        return Err(ScucError::Internal(format!("constraint residual {viol:e} exceeds {RESIDUAL_TOL:e}")));
    }
    let view = &inst.view;
    let base = view.base_mva;
    let dt = view.interval_hours;
    let nt = inst.intervals;
    let map = &model.map;
    let grab = |rows: &[Vec<crate::milp::VarId>], scale: f64| -> Vec<Vec<f64>> {
        rows.iter().map(|r| r.iter().map(|v| x[v.0] * scale).collect()).collect()
    };
    let commitment: Vec<Vec<bool>> = map.u.iter().map(|r| r.iter().map(|v| x[v.0] > 0.5).collect()).collect();
    let startup = grab(&map.v, 1.0);
    let dispatch = grab(&map.p, base);
    let reserve = grab(&map.r, base);
    let flows = grab(&map.flow, base);
    let angles = grab(&map.theta, 1.0);
    let nb = view.buses.len();
    let mut shed = vec![vec![0.0; nt]; nb];
    let mut curtail = vec![vec![0.0; nt]; nb];
    for (&(n, t), v) in &map.shed {
        shed[n][t] = x[v.0] * base;
    }
    for (&(n, t), v) in &map.curtail {
        curtail[n][t] = x[v.0] * base;
    }

    for (n, t) in (0..nb).flat_map(|n| (0..nt).map(move |t| (n, t))) {
        if shed[n][t] > 1e-9 && curtail[n][t] > 1e-9 {
            return Err(ScucError::Internal(format!("bus {} interval {t} both sheds and curtails", view.buses[n].id)));
        }
    }
    // The printed reserve rule and the form without the unit's own reserve
    // must agree.
    if inst.reserve_required {
        for t in 0..nt {
            let total: f64 = reserve.iter().map(|r| r[t]).sum();
            for g in 0..reserve.len() {
                let printed = total - dispatch[g][t] - reserve[g][t];
                let others: f64 = (0..reserve.len()).filter(|&m| m != g).map(|m| reserve[m][t]).sum::<f64>() - dispatch[g][t];
                if (printed - others).abs() > 1e-6 || (printed >= -1e-6) != (others >= -1e-6) {
                    return Err(ScucError::Internal(format!("reserve forms disagree for unit {} at {t}", view.generators[g].id)));
                }
            }
        }
    }

    let mut operating_cost = 0.0;
    for (g, gen) in view.generators.iter().enumerate() {
        for t in 0..nt {
            operating_cost += gen.marginal_cost * dispatch[g][t] * dt
                + gen.online_cost * if commitment[g][t] { 1.0 } else { 0.0 }
                + gen.startup_cost * startup[g][t];
        }
    }
    let penalty = inst.shed_penalty * shed.iter().flatten().sum::<f64>() * dt;
    let objective = operating_cost + penalty;
    if (objective - sol.objective).abs() > 1e-6 * objective.abs().max(sol.objective.abs()).max(1.0) {
        return Err(ScucError::Internal(format!(
            "recomputed cost {objective} differs from solver objective {}",
            sol.objective
        )));
    }
    Ok(ScucSolution {
        status: sol.status,
        commitment,
        startup,
        dispatch,
        reserve,
        flows,
        angles,
        shed,
        curtail,
        operating_cost,
        penalty,
        objective,
    })
}

pub fn solve_scuc(inst: &ScucInstance, config: &SolverConfig) -> Result<ScucSolution, ScucError> {
    let model = build_scuc(inst)?;
    let sol = solve_milp(&model.problem, config)?;
    extract_scuc_solution(&sol, &model, inst)
}

#[cfg(test)]
mod tests {
    use super::super::tests::single_bus;
    use super::*;

    #[test]
    fn single_unit_day_costs_hand_sum() {
        let s = solve_scuc(&single_bus(100.0, 60.0), &SolverConfig::default()).unwrap();
        assert_eq!(s.commitment, vec![vec![true, true]]);
        assert!(s.dispatch[0].iter().all(|p| (p - 60.0).abs() < 1e-9));
        assert!((s.objective - 7400.0).abs() < 1e-6);
        assert_eq!(s.penalty, 0.0);
        assert!(s.shed.iter().flatten().all(|x| *x == 0.0));
    }

    #[test]
    fn short_unit_sheds_remainder() {
        let inst = single_bus(40.0, 60.0);
        let s = solve_scuc(&inst, &SolverConfig::default()).unwrap();
        assert!((s.total_shed_mwh(3.0) - 120.0).abs() < 1e-6);
        assert!((s.penalty - 20.0 * 3.0 * 2.0 * inst.shed_penalty).abs() < 1e-4);
    }

    #[test]
    fn empty_system_stays_off() {
        let s = solve_scuc(&single_bus(100.0, 0.0), &SolverConfig::default()).unwrap();
        assert_eq!(s.commitment, vec![vec![false, false]]);
        assert_eq!(s.objective, 0.0);
    }

    #[test]
    fn initially_on_unit_skips_startup() {
        let mut inst = single_bus(100.0, 60.0);
        inst.u0 = vec![true];
        let s = solve_scuc(&inst, &SolverConfig::default()).unwrap();
        assert!((s.objective - 7300.0).abs() < 1e-6);
    }

    #[test]
    fn forced_infeasibility_is_propagated() {
        // Minimum output above the load with curtailment impossible.
        let inst = single_bus(100.0, 5.0);
        let mut m = build_scuc(&inst).unwrap();
        for u in &m.map.u[0] {
            m.problem.var_mut(*u).lower = 1.0;
        }
        let sol = solve_milp(&m.problem, &SolverConfig::default()).unwrap();
        assert!(matches!(extract_scuc_solution(&sol, &m, &inst), Err(ScucError::Status(SolveStatus::Infeasible))));
    }

    #[test]
    fn reserve_rule_needs_a_second_unit() {
        let mut inst = single_bus(100.0, 60.0);
        inst.reserve_required = true;
        // A lone unit cannot cover its own loss, so all load is shed.
        let s = solve_scuc(&inst, &SolverConfig::default()).unwrap();
        assert!((s.total_shed_mwh(3.0) - 360.0).abs() < 1e-6);
        let mut two = inst.clone();
        two.view.generators.push(super::super::tests::unit("h", "1", 0.0, 100.0, 30.0, 0.0, 0.0));
        two.u0.push(false);
        let s = solve_scuc(&two, &SolverConfig::default()).unwrap();
        assert_eq!(s.total_shed_mwh(3.0), 0.0);
        for t in 0..2 {
            for g in 0..2 {
                let others: f64 = (0..2).filter(|&m| m != g).map(|m| s.reserve[m][t]).sum();
                assert!(others >= s.dispatch[g][t] - 1e-6);
            }
        }
    }
}
