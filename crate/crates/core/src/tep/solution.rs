use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{assemble, fix_plan, scenarios, traditional_profiles};
use super::{build_tep, build_tep_ci, capital_cost, operation_cost, Dispatch, TepError, TepInstance, TepModel, Variant};
use crate::grid::{BuildPlan, DayType, LineBuild};
use crate::milp::{solve_milp, MilpSolution, SolveStatus, SolverConfig};
use crate::util::write_atomic;

/// Residual allowed on re-evaluated constraints, per unit.
const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TepSolution {
    pub status: SolveStatus,
    pub plan: BuildPlan,
    /// `(line, epoch)` for candidates: first in service in that epoch.
    pub built: BTreeMap<(String, usize), bool>,
    /// `(line, epoch)` for candidates: in service during that epoch.
    pub operational: BTreeMap<(String, usize), bool>,
    pub thermal: Dispatch,
    pub renewable: Dispatch,
    /// MW, positive from the line's from-bus to its to-bus.
    pub flows: Dispatch,
    /// rad
    pub angles: Dispatch,
    pub shed: Dispatch,
    pub op_cost: f64,
    pub cap_cost: f64,
    pub shed_cost: f64,
    pub total: f64,
    pub bound: f64,
    pub nodes: usize,
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Interpret a solver result as an investment plan and re-check it.
pub fn extract_tep_solution(sol: &MilpSolution, model: &TepModel, inst: &TepInstance) -> Result<TepSolution, TepError> {
    let ok = sol.status == SolveStatus::Optimal || (sol.status == SolveStatus::Limit && sol.has_values());
    if !ok {
        return Err(TepError::Status(sol.status));
    }
    let grid = &inst.grid;
    let h = &grid.horizon;
    let base = grid.base_mva;
    let map = &model.map;
    let x = &sol.values;
    let viol = model.problem.max_violation(x);
    if viol > RESIDUAL_TOL {
        return Err(TepError::Internal(format!("constraint residual {viol:e} exceeds {RESIDUAL_TOL:e}")));
    }

    let mut built = BTreeMap::new();
    let mut operational = BTreeMap::new();
    let mut plan = BuildPlan::default();
    for (k, l) in grid.lines.iter().enumerate().filter(|(_, l)| l.candidate) {
        let mut first = None;
        let mut prev = false;
        let mut n_built = 0;
        for p in 1..=h.num_epochs {
            let u = x[map.u[&(k, p)].0] > 0.5;
            let v = x[map.v[&(k, p)].0] > 0.5;
            if prev && !u {
                return Err(TepError::Internal(format!("line {} leaves service in epoch {p}", l.id)));
            }
            if u && !prev {
                first = Some(p);
                if !v {
                    return Err(TepError::Internal(format!("line {} in service without a build", l.id)));
                }
            }
            if v && !(u && !prev) {
                return Err(TepError::Internal(format!("line {} built in epoch {p} but not first used", l.id)));
            }
            n_built += v as usize;
            built.insert((l.id.clone(), p), v);
            operational.insert((l.id.clone(), p), u);
            prev = u;
        }
        if n_built > 1 {
            return Err(TepError::Internal(format!("line {} built more than once", l.id)));
        }
        if let Some(p) = first {
            plan.lines.push(LineBuild {
                line_id: l.id.clone(),
                construction_epoch: p,
            });
        }
    }

    let t_count = map.intervals;
    let mut thermal = Dispatch::new();
    let mut renewable = Dispatch::new();
    let mut flows = Dispatch::new();
    let mut angles = Dispatch::new();
    let mut shed = Dispatch::new();
    let collect = |out: &mut Dispatch,
                   vars: &std::collections::HashMap<(usize, usize, usize), crate::milp::VarId>,
                   ids: &[&str],
                   scale: f64| {
        for (s, &(p, q, d)) in map.scenarios.iter().enumerate() {
            for (e, id) in ids.iter().enumerate() {
                if !vars.contains_key(&(s, 0, e)) {
                    continue;
                }
                let v: Vec<f64> = (0..t_count).map(|t| x[vars[&(s, t, e)].0] * scale).collect();
                out.insert((id.to_string(), p, q, d), v);
            }
        }
    };
    let gens: Vec<&str> = grid.generators.iter().map(|g| g.id.as_str()).collect();
    let plants: Vec<&str> = grid.renewables.iter().map(|r| r.id.as_str()).collect();
    let lines: Vec<&str> = grid.lines.iter().map(|l| l.id.as_str()).collect();
    let buses: Vec<&str> = grid.buses.iter().map(|b| b.id.as_str()).collect();
    collect(&mut thermal, &map.pg, &gens, base);
    collect(&mut renewable, &map.pr, &plants, base);
    collect(&mut flows, &map.flow, &lines, base);
    collect(&mut angles, &map.theta, &buses, 1.0);
    collect(&mut shed, &map.shed, &buses, base);

    let op_cost = operation_cost(&thermal, grid);
    let cap_cost = capital_cost(&plan, grid);
    let mut shed_cost = 0.0;
    for ((_, _, _, d), v) in &shed {
        let energy: f64 = v.iter().map(|s| s * h.interval_hours).sum();
        shed_cost += h.years_per_epoch as f64 * h.day_weight(*d) * energy * inst.shed_penalty;
    }
    let total = op_cost + cap_cost + shed_cost;
    if !rel_close(total, sol.objective, 1e-6) {
        return Err(TepError::Internal(format!(
            "recomputed cost {total} differs from solver objective {}",
            sol.objective
        )));
    }
    Ok(TepSolution {
        status: sol.status,
        plan,
        built,
        operational,
        thermal,
        renewable,
        flows,
        angles,
        shed,
        op_cost,
        cap_cost,
        shed_cost,
        total,
        bound: sol.bound,
        nodes: sol.nodes,
    })
}

fn solve_model(model: &TepModel, inst: &TepInstance, config: &SolverConfig) -> Result<TepSolution, TepError> {
    let sol = solve_milp(&model.problem, config)?;
    extract_tep_solution(&sol, model, inst)
}

/// Build, solve and extract the planning model for the instance's variant.
pub fn solve_tep(inst: &TepInstance, config: &SolverConfig) -> Result<TepSolution, TepError> {
    let model = build_tep(inst)?;
    solve_model(&model, inst, config)
}

/// Dispatch cost of a fixed build plan under the instance's time-varying
/// profiles.
pub fn evaluate_plan(inst: &TepInstance, plan: &BuildPlan, config: &SolverConfig) -> Result<TepSolution, TepError> {
    let mut model = build_tep_ci(inst)?;
    fix_plan(&mut model, &inst.grid, plan)?;
    solve_model(&model, inst, config)
}

/// First typical day that cannot be served even with every candidate line
/// in service from epoch 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Uncovered {
    pub epoch: usize,
    pub quarter: usize,
    pub day: DayType,
}

pub fn diagnose_infeasibility(inst: &TepInstance, config: &SolverConfig) -> Result<Option<Uncovered>, TepError> {
    let profiles = match inst.variant {
        Variant::Ci => inst.profiles.clone(),
        Variant::Traditional => traditional_profiles(&inst.profiles),
    };
    let all_built = BuildPlan {
        lines: inst
            .grid
            .candidates()
            .map(|l| LineBuild {
                line_id: l.id.clone(),
                construction_epoch: 1,
            })
            .collect(),
    };
    for s in scenarios(&inst.grid, &profiles)? {
        let mut model = assemble(inst, &profiles, Some(&[s]))?;
        fix_plan(&mut model, &inst.grid, &all_built)?;
        let sol = solve_milp(&model.problem, config)?;
        match sol.status {
            SolveStatus::Infeasible => {
                return Ok(Some(Uncovered {
                    epoch: s.0,
                    quarter: s.1,
                    day: s.2,
                }))
            }
            SolveStatus::Optimal => {}
            other => return Err(TepError::Status(other)),
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanCosts {
    pub generation_cost: f64,
    pub transmission_investment_cost: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub load_shedding_cost: f64,
    pub total: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

/// Plan output: built lines with their construction epoch and a cost block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub variant: Variant,
    pub lines: Vec<LineBuild>,
    pub costs: PlanCosts,
}

impl PlanFile {
    pub fn from_solution(sol: &TepSolution, variant: Variant) -> Self {
        PlanFile {
            variant,
            lines: sol.plan.lines.clone(),
            costs: PlanCosts {
                generation_cost: sol.op_cost,
                transmission_investment_cost: sol.cap_cost,
                load_shedding_cost: sol.shed_cost,
                total: sol.total,
            },
        }
    }

    pub fn build_plan(&self) -> BuildPlan {
        BuildPlan {
            lines: self.lines.clone(),
        }
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("plan serializes") + "\n";
        write_atomic(path, text.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self, TepError> {
        let text = crate::grid::read_text(path)?;
        serde_json::from_str(&text).map_err(|e| {
            TepError::Grid(crate::grid::GridError::Parse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })
        })
    }
}
