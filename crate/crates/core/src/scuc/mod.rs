//! Daily security-constrained unit commitment with last-resort load
//! shedding and surplus-only renewable curtailment.

mod batch;
mod solution;

use std::collections::HashMap;

use thiserror::Error;

use crate::grid::{DayType, EpochView};
use crate::milp::{MilpError, MilpProblem, Relation, SolveStatus, VarId};
use crate::profiles::ProfileSet;

pub use batch::{run_batch, write_batch_results, BatchKey, BatchResults, DAY_FILE_SUFFIX, INTERVAL_FILE_SUFFIX};
pub use solution::{extract_scuc_solution, solve_scuc, ScucSolution};

/// $/MWh
pub const DEFAULT_SHED_PENALTY: f64 = 10_000.0;

#[derive(Debug, Error)]
pub enum ScucError {
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error("unit commitment is {0}")]
    Status(SolveStatus),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScucOptions {
    pub shed_penalty: f64,
    pub reserve_required: bool,
    /// Units listed here start the day committed; all others start off.
    pub initially_on: Vec<String>,
}

impl Default for ScucOptions {
    fn default() -> Self {
        ScucOptions {
            shed_penalty: DEFAULT_SHED_PENALTY,
            reserve_required: false,
            initially_on: Vec::new(),
        }
    }
}

/// One typical day of one epoch. Profile slices are in MW / MVA and follow
/// the order of the view's lines, renewables and buses.
#[derive(Debug, Clone, PartialEq)]
pub struct ScucInstance {
    pub view: EpochView,
    pub quarter: usize,
    pub day: DayType,
    pub intervals: usize,
    pub ratings: Vec<Vec<f64>>,
    pub renewable: Vec<Vec<f64>>,
    pub load: Vec<Vec<f64>>,
    pub shed_penalty: f64,
    pub reserve_required: bool,
    /// Commitment before the first interval, per generator of the view.
    pub u0: Vec<bool>,
}

impl ScucInstance {
    /// Slice `profiles` for `(view.epoch, quarter, day)`.
    pub fn from_profiles(
        view: &EpochView,
        profiles: &ProfileSet,
        quarter: usize,
        day: DayType,
        opts: &ScucOptions,
    ) -> Result<Self, ScucError> {
        let p = view.epoch;
        let missing = |what: &str, id: &str| ScucError::Invalid(format!("no {what} profile for {id} in epoch {p} quarter {quarter}"));
        let ratings = view
            .lines
            .iter()
            .map(|l| profiles.rating(&l.id, p, quarter).map(<[f64]>::to_vec).ok_or_else(|| missing("rating", &l.id)))
            .collect::<Result<_, _>>()?;
        let renewable = view
            .renewables
            .iter()
            .map(|r| profiles.renewable(&r.id, p, quarter).map(<[f64]>::to_vec).ok_or_else(|| missing("renewable", &r.id)))
            .collect::<Result<_, _>>()?;
        let load = view
            .buses
            .iter()
            .map(|b| {
                profiles
                    .bus_load(&b.id, p, quarter, day)
                    .map(<[f64]>::to_vec)
                    .ok_or_else(|| missing(&format!("{day} load"), &b.id))
            })
            .collect::<Result<_, _>>()?;
        for id in &opts.initially_on {
            if !view.generators.iter().any(|g| &g.id == id) {
                log::warn!("initially committed unit {id} is not in service in epoch {p}");
            }
        }
        let inst = ScucInstance {
            view: view.clone(),
            quarter,
            day,
            intervals: profiles.intervals,
            ratings,
            renewable,
            load,
            shed_penalty: opts.shed_penalty,
            reserve_required: opts.reserve_required,
            u0: view.generators.iter().map(|g| opts.initially_on.contains(&g.id)).collect(),
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), ScucError> {
        let t = self.intervals;
        let v = &self.view;
        let shape = |name: &str, rows: &[Vec<f64>], n: usize| {
            if rows.len() != n || rows.iter().any(|r| r.len() != t) {
                Err(ScucError::Invalid(format!("{name} slices must be {n} x {t}")))
            } else {
                Ok(())
            }
        };
        shape("rating", &self.ratings, v.lines.len())?;
        shape("renewable", &self.renewable, v.renewables.len())?;
        shape("load", &self.load, v.buses.len())?;
        if self.u0.len() != v.generators.len() {
            return Err(ScucError::Invalid("initial commitment must list every unit".into()));
        }
        let all = self.ratings.iter().chain(&self.renewable).chain(&self.load).flatten();
        if all.clone().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(ScucError::Invalid("profile values must be finite and nonnegative".into()));
        }
        if self.ratings.iter().flatten().any(|x| *x <= 0.0) {
            return Err(ScucError::Invalid("line ratings must be positive".into()));
        }
        let max_cost = v.generators.iter().map(|g| g.marginal_cost).fold(0.0, f64::max);
        if !(self.shed_penalty >= 10.0 * max_cost) || !(self.shed_penalty > 0.0) {
            return Err(ScucError::Invalid(format!(
                "shed penalty {} must be at least 10x the highest marginal cost {max_cost}",
                self.shed_penalty
            )));
        }
        Ok(())
    }

    /// Renewable availability per bus and interval, MW.
    pub fn bus_renewable(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.intervals]; self.view.buses.len()];
        for (r, plant) in self.view.renewables.iter().enumerate() {
            let n = self.view.buses.iter().position(|b| b.id == plant.bus).expect("validated grid");
            for t in 0..self.intervals {
                out[n][t] += self.renewable[r][t];
            }
        }
        out
    }
}

/// `true` marks ST1 (demand at least local renewable availability: shedding
/// allowed, no curtailment); `false` marks ST2 (surplus: curtailment only).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurtailmentPartition {
    pub deficit: Vec<Vec<bool>>,
}

impl CurtailmentPartition {
    pub fn is_st1(&self, bus: usize, t: usize) -> bool {
        self.deficit[bus][t]
    }
}

pub fn classify_buses(inst: &ScucInstance) -> CurtailmentPartition {
    let avail = inst.bus_renewable();
    CurtailmentPartition {
        deficit: inst
            .load
            .iter()
            .zip(&avail)
            .map(|(d, a)| d.iter().zip(a).map(|(d, a)| d - a >= 0.0).collect())
            .collect(),
    }
}

/// Variable indices, `[entity][t]` in the order of the instance view.
#[derive(Debug, Clone, Default)]
pub struct ScucMap {
    pub u: Vec<Vec<VarId>>,
    pub v: Vec<Vec<VarId>>,
    pub p: Vec<Vec<VarId>>,
    pub r: Vec<Vec<VarId>>,
    pub flow: Vec<Vec<VarId>>,
    pub theta: Vec<Vec<VarId>>,
    /// Only on ST1 pairs with a positive deficit.
    pub shed: HashMap<(usize, usize), VarId>,
    /// Only on ST2 pairs.
    pub curtail: HashMap<(usize, usize), VarId>,
}

#[derive(Debug, Clone)]
pub struct ScucModel {
    pub problem: MilpProblem,
    pub map: ScucMap,
    pub partition: CurtailmentPartition,
}

pub fn build_scuc(inst: &ScucInstance) -> Result<ScucModel, ScucError> {
    inst.validate()?;
    let view = &inst.view;
    let base = view.base_mva;
    let dt = view.interval_hours;
    let nt = inst.intervals;
    let tag = format!("{}_{}_{}", view.epoch, inst.quarter, inst.day.code());
    let mut prob = MilpProblem::new(format!("scuc_{tag}"));
    let mut map = ScucMap::default();
    let partition = classify_buses(inst);
    let avail = inst.bus_renewable();
    let bus_idx: HashMap<&str, usize> = view.buses.iter().enumerate().map(|(i, b)| (b.id.as_str(), i)).collect();

    for g in &view.generators {
        let row = |prefix: &str| (0..nt).map(|t| format!("{prefix}_{}_{t}", g.id)).collect::<Vec<_>>();
        map.u.push(row("u").into_iter().map(|n| prob.add_binary(n, g.online_cost)).collect());
        map.v.push(row("v").into_iter().map(|n| prob.add_continuous(n, 0.0, 1.0, g.startup_cost)).collect());
        map.p.push(
            row("p")
                .into_iter()
                .map(|n| prob.add_continuous(n, 0.0, g.p_max_mw / base, g.marginal_cost * base * dt))
                .collect(),
        );
        let r_hi = if inst.reserve_required { g.reserve_ramp() / base } else { 0.0 };
        map.r.push(row("r").into_iter().map(|n| prob.add_continuous(n, 0.0, r_hi, 0.0)).collect());
    }
    for b in &view.buses {
        let fixed = b.id == view.reference_bus;
        map.theta.push(
            (0..nt)
                .map(|t| {
                    let (lo, hi) = if fixed { (0.0, 0.0) } else { (f64::NEG_INFINITY, f64::INFINITY) };
                    prob.add_continuous(format!("th_{}_{t}", b.id), lo, hi, 0.0)
                })
                .collect(),
        );
    }
    for (k, l) in view.lines.iter().enumerate() {
        map.flow.push(
            (0..nt)
                .map(|t| {
                    let cap = inst.ratings[k][t] / base;
                    prob.add_continuous(format!("f_{}_{t}", l.id), -cap, cap, 0.0)
                })
                .collect(),
        );
    }
    for (n, b) in view.buses.iter().enumerate() {
        for t in 0..nt {
            let gap = inst.load[n][t] - avail[n][t];
            if partition.is_st1(n, t) {
                if gap > 0.0 {
                    let s = prob.add_continuous(format!("sh_{}_{t}", b.id), 0.0, gap / base, inst.shed_penalty * base * dt);
                    map.shed.insert((n, t), s);
                }
            } else {
                let c = prob.add_continuous(format!("rc_{}_{t}", b.id), 0.0, -gap / base, 0.0);
                map.curtail.insert((n, t), c);
            }
        }
    }

    for (g, gen) in view.generators.iter().enumerate() {
        let ramp = gen.ramp_mw_per_h.map(|r| r * dt / base);
        for t in 0..nt {
            let (u, v, p, r) = (map.u[g][t], map.v[g][t], map.p[g][t], map.r[g][t]);
            let s = format!("{}_{t}", gen.id);
            prob.add_constraint(format!("pmin_{s}"), vec![(p, 1.0), (u, -gen.p_min_mw / base)], Relation::GreaterEq, 0.0);
            prob.add_constraint(format!("pmax_{s}"), vec![(p, 1.0), (r, 1.0), (u, -gen.p_max_mw / base)], Relation::LessEq, 0.0);
            if inst.reserve_required {
                prob.add_constraint(format!("rlim_{s}"), vec![(r, 1.0), (u, -gen.reserve_ramp() / base)], Relation::LessEq, 0.0);
                // Printed form: all reserve covers this unit's output plus its own reserve.
                let mut coeffs: Vec<(VarId, f64)> = map.r.iter().map(|rm| (rm[t], 1.0)).collect();
                coeffs.push((p, -1.0));
                coeffs.push((r, -1.0));
                prob.add_constraint(format!("res_{s}"), coeffs, Relation::GreaterEq, 0.0);
            }
            if t == 0 {
                let u0 = if inst.u0[g] { 1.0 } else { 0.0 };
                prob.add_constraint(format!("su_{s}"), vec![(v, 1.0), (u, -1.0)], Relation::GreaterEq, -u0);
            } else {
                let up = map.u[g][t - 1];
                prob.add_constraint(format!("su_{s}"), vec![(v, 1.0), (u, -1.0), (up, 1.0)], Relation::GreaterEq, 0.0);
                if let Some(rr) = ramp {
                    let pp = map.p[g][t - 1];
                    prob.add_constraint(format!("rup_{s}"), vec![(p, 1.0), (pp, -1.0)], Relation::LessEq, rr);
                    prob.add_constraint(format!("rdn_{s}"), vec![(p, 1.0), (pp, -1.0)], Relation::GreaterEq, -rr);
                }
            }
        }
    }
    for t in 0..nt {
        let mut balance: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); view.buses.len()];
        for (g, gen) in view.generators.iter().enumerate() {
            balance[bus_idx[gen.bus.as_str()]].push((map.p[g][t], 1.0));
        }
        for (k, l) in view.lines.iter().enumerate() {
            let (nf, nto) = (bus_idx[l.from_bus.as_str()], bus_idx[l.to_bus.as_str()]);
            let f = map.flow[k][t];
            let b = 1.0 / l.reactance;
            prob.add_constraint(
                format!("fd_{}_{t}", l.id),
                vec![(f, 1.0), (map.theta[nf][t], -b), (map.theta[nto][t], b)],
                Relation::Equal,
                0.0,
            );
            balance[nf].push((f, -1.0));
            balance[nto].push((f, 1.0));
        }
        for (n, b) in view.buses.iter().enumerate() {
            let mut coeffs = std::mem::take(&mut balance[n]);
            if let Some(&s) = map.shed.get(&(n, t)) {
                coeffs.push((s, 1.0));
            }
            if let Some(&c) = map.curtail.get(&(n, t)) {
                coeffs.push((c, -1.0));
            }
            let rhs = (inst.load[n][t] - avail[n][t]) / base;
            prob.add_constraint(format!("bal_{}_{t}", b.id), coeffs, Relation::Equal, rhs);
        }
    }
    prob.validate()?;
    Ok(ScucModel {
        problem: prob,
        map,
        partition,
    })
}
