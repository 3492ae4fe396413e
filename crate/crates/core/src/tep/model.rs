use std::collections::HashMap;

use log::warn;

use super::{capital_factor, TepError, TepInstance, Variant};
use crate::grid::{BuildPlan, DayType, GridModel};
use crate::milp::{MilpProblem, Relation, VarId};
use crate::profiles::ProfileSet;

/// Indices of the planning variables. Entity indices refer to the vectors
/// of the instance grid; `s` indexes [`TepMap::scenarios`].
#[derive(Debug, Clone, Default)]
pub struct TepMap {
    pub scenarios: Vec<(usize, usize, DayType)>,
    pub intervals: usize,
    pub pg: HashMap<(usize, usize, usize), VarId>,
    pub pr: HashMap<(usize, usize, usize), VarId>,
    pub flow: HashMap<(usize, usize, usize), VarId>,
    pub theta: HashMap<(usize, usize, usize), VarId>,
    pub shed: HashMap<(usize, usize, usize), VarId>,
    /// `(line, epoch)` for candidates.
    pub u: HashMap<(usize, usize), VarId>,
    pub v: HashMap<(usize, usize), VarId>,
}

#[derive(Debug, Clone)]
pub struct TepModel {
    pub problem: MilpProblem,
    pub map: TepMap,
    /// Profiles the model was built from (transformed for the baseline).
    pub profiles: ProfileSet,
}

/// Replace ratings by their daily minimum and renewables by their daily
/// mean, per epoch and quarter. Loads are unchanged.
pub fn traditional_profiles(set: &ProfileSet) -> ProfileSet {
    let mut out = set.clone();
    for v in out.line_rating.values_mut() {
        let m = v.iter().copied().fold(f64::INFINITY, f64::min);
        v.iter_mut().for_each(|x| *x = m);
    }
    for v in out.renewable_max.values_mut() {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = (v.iter().sum::<f64>() / v.len() as f64).clamp(lo, hi);
        v.iter_mut().for_each(|x| *x = mean);
    }
    out
}

/// Scenarios present in `profiles`, checked for completeness against `grid`.
pub(crate) fn scenarios(grid: &GridModel, profiles: &ProfileSet) -> Result<Vec<(usize, usize, DayType)>, TepError> {
    let t = grid.horizon.intervals_per_day;
    if profiles.intervals != t {
        return Err(TepError::Invalid(format!(
            "profiles have {} intervals per day, grid has {t}",
            profiles.intervals
        )));
    }
    let mut out = Vec::new();
    let mut gaps = Vec::new();
    for (p, q) in profiles.slabs() {
        if p > grid.horizon.num_epochs {
            return Err(TepError::Invalid(format!("profiles contain epoch {p} beyond the horizon")));
        }
        for l in &grid.lines {
            if profiles.rating(&l.id, p, q).is_none() {
                gaps.push(format!("rating {} epoch {p} quarter {q}", l.id));
            }
        }
        for r in &grid.renewables {
            if profiles.renewable(&r.id, p, q).is_none() {
                gaps.push(format!("renewable {} epoch {p} quarter {q}", r.id));
            }
        }
        for d in DayType::ALL {
            let have: Vec<bool> = grid
                .buses
                .iter()
                .map(|b| profiles.bus_load(&b.id, p, q, d).is_some())
                .collect();
            if have.iter().all(|h| *h) {
                out.push((p, q, d));
            } else if have.iter().any(|h| *h) {
                gaps.push(format!("load epoch {p} quarter {q} {d} incomplete"));
            }
        }
    }
    if !gaps.is_empty() {
        return Err(TepError::Profile(crate::profiles::ProfileError::Coverage(gaps)));
    }
    Ok(out)
}

pub(crate) fn assemble(
    inst: &TepInstance,
    profiles: &ProfileSet,
    only: Option<&[(usize, usize, DayType)]>,
) -> Result<TepModel, TepError> {
    let grid = &inst.grid;
    grid.validate()?;
    if !(inst.theta_bound > 0.0) {
        return Err(TepError::Invalid("theta_bound must be positive".into()));
    }
    if inst.shed_allowed && !(inst.shed_penalty > 0.0) {
        return Err(TepError::Invalid("shed penalty must be positive".into()));
    }
    let h = &grid.horizon;
    let base = grid.base_mva;
    let dt = h.interval_hours;
    let ny = h.years_per_epoch as f64;
    let all = scenarios(grid, profiles)?;
    let scen: Vec<(usize, usize, DayType)> = match only {
        Some(sel) => all.into_iter().filter(|s| sel.contains(s)).collect(),
        None => all,
    };
    let bus_idx = grid.bus_index();
    let reference = grid.reference_bus();
    let mut prob = MilpProblem::new(format!("tep_{}", if grid.name.is_empty() { "grid" } else { &grid.name }));
    let mut map = TepMap {
        scenarios: scen.clone(),
        intervals: h.intervals_per_day,
        ..Default::default()
    };

    // Build-decision variables and logic.
    for (k, l) in grid.lines.iter().enumerate().filter(|(_, l)| l.candidate) {
        for p in 1..=h.num_epochs {
            let u = prob.add_binary(format!("u_{}_{p}", l.id), 0.0);
            let v = prob.add_binary(format!("v_{}_{p}", l.id), l.construction_cost_usd() * capital_factor(grid, p));
            map.u.insert((k, p), u);
            map.v.insert((k, p), v);
        }
        for p in 1..=h.num_epochs {
            let (u, v) = (map.u[&(k, p)], map.v[&(k, p)]);
            if p == 1 {
                prob.add_constraint(format!("first_{}_{p}", l.id), vec![(v, 1.0), (u, -1.0)], Relation::Equal, 0.0);
            } else {
                let prev = map.u[&(k, p - 1)];
                prob.add_constraint(format!("mono_{}_{p}", l.id), vec![(prev, 1.0), (u, -1.0)], Relation::LessEq, 0.0);
                prob.add_constraint(
                    format!("start_{}_{p}", l.id),
                    vec![(v, 1.0), (u, -1.0), (prev, 1.0)],
                    Relation::GreaterEq,
                    0.0,
                );
            }
        }
        let once = (1..=h.num_epochs).map(|p| (map.v[&(k, p)], 1.0)).collect();
        prob.add_constraint(format!("once_{}", l.id), once, Relation::LessEq, 1.0);
        let m = l.big_m_pu(inst.theta_bound);
        if m * l.reactance < 2.0 * inst.theta_bound - 1e-12 {
            warn!("line {}: big-M {m} is below the angle-difference bound", l.id);
        }
    }

    for (s, &(p, q, d)) in scen.iter().enumerate() {
        let weight = ny * h.day_weight(d);
        let tag = format!("{p}_{q}_{}", d.code());
        let load: Vec<&[f64]> = grid
            .buses
            .iter()
            .map(|b| profiles.bus_load(&b.id, p, q, d).expect("scenario checked"))
            .collect();
        for t in 0..h.intervals_per_day {
            let st = format!("{tag}_{t}");
            let mut balance: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); grid.buses.len()];
            for (n, b) in grid.buses.iter().enumerate() {
                let (lo, hi) = if b.id == reference { (0.0, 0.0) } else { (-inst.theta_bound, inst.theta_bound) };
                let th = prob.add_continuous(format!("th_{}_{st}", b.id), lo, hi, 0.0);
                map.theta.insert((s, t, n), th);
                if inst.shed_allowed {
                    let cap = load[n][t] / base;
                    let sh = prob.add_continuous(format!("sh_{}_{st}", b.id), 0.0, cap, base * dt * inst.shed_penalty * weight);
                    map.shed.insert((s, t, n), sh);
                    balance[n].push((sh, 1.0));
                }
            }
            for (g, gen) in grid.generators.iter().enumerate().filter(|(_, g)| g.online_in(p)) {
                let x = prob.add_continuous(
                    format!("pg_{}_{st}", gen.id),
                    gen.p_min_at(p) / base,
                    gen.p_max_at(p) / base,
                    base * dt * gen.marginal_cost * weight,
                );
                map.pg.insert((s, t, g), x);
                balance[bus_idx[gen.bus.as_str()]].push((x, 1.0));
            }
            for (r, plant) in grid.renewables.iter().enumerate().filter(|(_, r)| r.online_in(p)) {
                let avail = profiles.renewable(&plant.id, p, q).expect("scenario checked")[t] / base;
                let x = prob.add_continuous(format!("pr_{}_{st}", plant.id), (plant.p_min_mw / base).min(avail), avail, 0.0);
                map.pr.insert((s, t, r), x);
                balance[bus_idx[plant.bus.as_str()]].push((x, 1.0));
            }
            for (k, l) in grid.lines.iter().enumerate() {
                let rating = profiles.rating(&l.id, p, q).expect("scenario checked")[t] / base;
                let (nf, nt) = (bus_idx[l.from_bus.as_str()], bus_idx[l.to_bus.as_str()]);
                let (thf, tht) = (map.theta[&(s, t, nf)], map.theta[&(s, t, nt)]);
                let f = prob.add_continuous(format!("f_{}_{st}", l.id), -rating, rating, 0.0);
                map.flow.insert((s, t, k), f);
                balance[nf].push((f, -1.0));
                balance[nt].push((f, 1.0));
                let b = 1.0 / l.reactance;
                if !l.candidate {
                    prob.add_constraint(format!("fd_{}_{st}", l.id), vec![(f, 1.0), (thf, -b), (tht, b)], Relation::Equal, 0.0);
                } else {
                    let u = map.u[&(k, p)];
                    let m = l.big_m_pu(inst.theta_bound);
                    prob.add_constraint(
                        format!("bmu_{}_{st}", l.id),
                        vec![(f, 1.0), (thf, -b), (tht, b), (u, m)],
                        Relation::LessEq,
                        m,
                    );
                    prob.add_constraint(
                        format!("bml_{}_{st}", l.id),
                        vec![(f, 1.0), (thf, -b), (tht, b), (u, -m)],
                        Relation::GreaterEq,
                        -m,
                    );
                    prob.add_constraint(format!("cu_{}_{st}", l.id), vec![(f, 1.0), (u, -rating)], Relation::LessEq, 0.0);
                    prob.add_constraint(format!("cl_{}_{st}", l.id), vec![(f, 1.0), (u, rating)], Relation::GreaterEq, 0.0);
                }
            }
            for (n, b) in grid.buses.iter().enumerate() {
                let coeffs = std::mem::take(&mut balance[n]);
                prob.add_constraint(format!("bal_{}_{st}", b.id), coeffs, Relation::Equal, load[n][t] / base);
            }
        }
    }
    prob.validate()?;
    Ok(TepModel {
        problem: prob,
        map,
        profiles: profiles.clone(),
    })
}

/// Planning model with the instance's time-varying profiles.
pub fn build_tep_ci(inst: &TepInstance) -> Result<TepModel, TepError> {
    assemble(inst, &inst.profiles, None)
}

/// Planning model with static per-quarter ratings and renewables.
pub fn build_tep_traditional(inst: &TepInstance) -> Result<TepModel, TepError> {
    assemble(inst, &traditional_profiles(&inst.profiles), None)
}

pub fn build_tep(inst: &TepInstance) -> Result<TepModel, TepError> {
    match inst.variant {
        Variant::Ci => build_tep_ci(inst),
        Variant::Traditional => build_tep_traditional(inst),
    }
}

/// Fix every build decision to `plan`, leaving a dispatch-only problem.
pub fn fix_plan(model: &mut TepModel, grid: &GridModel, plan: &BuildPlan) -> Result<(), TepError> {
    for b in &plan.lines {
        if !grid.lines.iter().any(|l| l.candidate && l.id == b.line_id) {
            return Err(TepError::Invalid(format!("plan builds unknown candidate {}", b.line_id)));
        }
    }
    for (&(k, p), &u) in &model.map.u {
        let id = &grid.lines[k].id;
        let on = if plan.built_by(id, p) { 1.0 } else { 0.0 };
        let first = plan.lines.iter().any(|b| &b.line_id == id && b.construction_epoch == p);
        let var = model.problem.var_mut(u);
        var.lower = on;
        var.upper = on;
        let var = model.problem.var_mut(model.map.v[&(k, p)]);
        let s = if first { 1.0 } else { 0.0 };
        var.lower = s;
        var.upper = s;
    }
    Ok(())
}
