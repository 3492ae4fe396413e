// Shared fixtures for the integration tests. Each test target uses a subset.
#![allow(dead_code)]

use gridplan::grid::{parse_grid, BuildPlan, DayType, GridModel, LineBuild};
use gridplan::milp::{solve_milp, SolveStatus, SolverConfig};
use gridplan::profiles::ProfileSet;
use gridplan::tep::{build_tep_ci, fix_plan, TepInstance};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;

fn round(x: f64, step: f64) -> f64 {
    (x / step).round() * step
}

/// Small random planning instance: a spanning tree of existing lines, up to
/// four candidates, one quarter, both day types.
pub fn random_tep(seed: u64) -> TepInstance {
    let mut rng = StdRng::seed_from_u64(seed);
    let nb = rng.gen_range(2..=5usize);
    let np = rng.gen_range(1..=2usize);
    let nt = [2usize, 3, 4][rng.gen_range(0..3)];
    let buses: Vec<_> = (1..=nb)
        .map(|i| json!({"id": format!("b{i}"), "latitude": 30.0, "longitude": -97.0 + i as f64}))
        .collect();
    let mut lines = Vec::new();
    for i in 2..=nb {
        let j = rng.gen_range(1..i);
        lines.push(json!({
            "id": format!("e{i}"), "from_bus": format!("b{j}"), "to_bus": format!("b{i}"),
            "reactance": round(rng.gen_range(0.05..0.3), 0.01),
            "static_rating_mva": round(rng.gen_range(20.0..80.0), 1.0),
        }));
    }
    let nc = rng.gen_range(1..=4usize);
    for c in 1..=nc {
        let a = rng.gen_range(1..=nb);
        let mut b = rng.gen_range(1..=nb);
        if b == a {
            b = a % nb + 1;
        }
        lines.push(json!({
            "id": format!("c{c}"), "from_bus": format!("b{a}"), "to_bus": format!("b{b}"),
            "reactance": round(rng.gen_range(0.05..0.3), 0.01),
            "static_rating_mva": round(rng.gen_range(30.0..100.0), 1.0),
            "candidate": true,
            "construction_cost_musd": round(rng.gen_range(0.05..3.0), 0.01),
        }));
    }
    let ng = rng.gen_range(1..=3usize);
    let mut cap = 0.0;
    let mut gens = Vec::new();
    for g in 1..=ng {
        let pmax = round(rng.gen_range(60.0..160.0), 1.0);
        cap += pmax;
        gens.push(json!({
            "id": format!("g{g}"), "bus": format!("b{}", rng.gen_range(1..=nb)),
            "p_min_mw": 0.0, "p_max_mw": pmax,
            "marginal_cost": round(rng.gen_range(10.0..80.0), 0.5),
        }));
    }
    let mut renew = Vec::new();
    if rng.gen_bool(0.5) {
        renew.push(json!({"id": "w1", "bus": format!("b{}", rng.gen_range(1..=nb)), "kind": "wind", "capacity_mw": 60.0}));
    }
    let grid: GridModel = parse_grid(
        &json!({
            "name": format!("rand{seed}"),
            "base_mva": 100.0,
            "horizon": {
                "num_epochs": np, "years_per_epoch": rng.gen_range(1..=5), "weekdays_per_quarter": 65,
                "weekend_days_per_quarter": 26, "intervals_per_day": nt, "interval_hours": 24.0 / nt as f64,
                "maintenance_ratio": 0.02,
            },
            "buses": buses, "lines": lines, "generators": gens, "renewables": renew,
        })
        .to_string(),
    )
    .expect("random grid is valid");

    let mut prof = ProfileSet {
        intervals: nt,
        ..Default::default()
    };
    for p in 1..=np {
        for l in &grid.lines {
            let v = (0..nt).map(|_| round(l.static_rating_mva * rng.gen_range(0.6..1.2), 0.5)).collect();
            prof.line_rating.insert((l.id.clone(), p, 1), v);
        }
        for r in &grid.renewables {
            let v = (0..nt).map(|_| round(rng.gen_range(0.0..r.capacity_mw), 0.5)).collect();
            prof.renewable_max.insert((r.id.clone(), p, 1), v);
        }
        // Peak system load stays below 85% of thermal capacity.
        let per_bus = 0.85 * cap / nb as f64;
        for b in &grid.buses {
            for d in DayType::ALL {
                let v = (0..nt).map(|_| round(rng.gen_range(0.0..per_bus), 0.5)).collect();
                prof.load.insert((b.id.clone(), p, 1, d), v);
            }
        }
    }
    TepInstance::new(grid, prof)
}

/// Every monotone schedule: each candidate is never built or first in
/// service in one epoch.
pub fn monotone_schedules(grid: &GridModel) -> Vec<BuildPlan> {
    let ids: Vec<&str> = grid.candidates().map(|l| l.id.as_str()).collect();
    let np = grid.horizon.num_epochs;
    let mut out = vec![BuildPlan::default()];
    for id in ids {
        let mut next = Vec::new();
        for plan in &out {
            next.push(plan.clone());
            for e in 1..=np {
                let mut p = plan.clone();
                p.lines.push(LineBuild {
                    line_id: id.to_string(),
                    construction_epoch: e,
                });
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Minimum over monotone schedules of the dispatch LP plus capital cost,
/// or `None` if every schedule is infeasible.
pub fn tep_by_enumeration(inst: &TepInstance) -> Option<f64> {
    let base = build_tep_ci(inst).expect("model builds");
    let mut best: Option<f64> = None;
    for plan in monotone_schedules(&inst.grid) {
        let mut m = base.clone();
        fix_plan(&mut m, &inst.grid, &plan).unwrap();
        let sol = solve_milp(&m.problem, &SolverConfig::default()).unwrap();
        match sol.status {
            SolveStatus::Optimal => best = Some(best.map_or(sol.objective, |b: f64| b.min(sol.objective))),
            SolveStatus::Infeasible => {}
            s => panic!("schedule LP ended with {s:?}"),
        }
    }
    best
}

/// Random day for the commitment oracle: 1-2 buses, 1-3 units, 2-4
/// intervals, optional wind, ramps and reserves.
pub fn random_scuc(seed: u64) -> gridplan::scuc::ScucInstance {
    use gridplan::grid::{Bus, EpochView, Line, RenewableKind, RenewablePlant, ThermalGenerator};
    let mut rng = StdRng::seed_from_u64(seed);
    let nb = rng.gen_range(1..=2usize);
    let ng = rng.gen_range(1..=3usize);
    let nt = rng.gen_range(2..=4usize);
    let dt = 24.0 / nt as f64;
    let buses: Vec<Bus> = (1..=nb)
        .map(|i| Bus {
            id: i.to_string(),
            latitude: 30.0,
            longitude: -97.0,
            load_profile: None,
            load_growth: None,
        })
        .collect();
    let lines: Vec<Line> = if nb == 2 {
        vec![Line {
            id: "l".into(),
            from_bus: "1".into(),
            to_bus: "2".into(),
            reactance: round(rng.gen_range(0.05..0.3), 0.01),
            static_rating_mva: 60.0,
            candidate: false,
            construction_cost_musd: 0.0,
            big_m: None,
            theta_bound: None,
            dlr: None,
        }]
    } else {
        vec![]
    };
    let reserve_required = rng.gen_bool(0.3);
    let generators: Vec<ThermalGenerator> = (1..=ng)
        .map(|g| {
            let pmax = round(rng.gen_range(30.0..120.0), 1.0);
            ThermalGenerator {
                id: format!("g{g}"),
                bus: rng.gen_range(1..=nb).to_string(),
                p_min_mw: round(pmax * rng.gen_range(0.0..0.5), 1.0),
                p_max_mw: pmax,
                marginal_cost: round(rng.gen_range(10.0..80.0), 0.5),
                online_cost: round(rng.gen_range(0.0..500.0), 1.0),
                startup_cost: round(rng.gen_range(0.0..2000.0), 1.0),
                ramp_mw_per_h: rng.gen_bool(0.4).then(|| round(rng.gen_range(3.0..20.0), 0.5)),
                reserve_ramp_mw: rng.gen_bool(0.5).then(|| round(pmax * rng.gen_range(0.2..1.0), 1.0)),
                commission_epoch: None,
                p_min_by_epoch: vec![],
                p_max_by_epoch: vec![],
            }
        })
        .collect();
    let renewables: Vec<RenewablePlant> = if rng.gen_bool(0.5) {
        vec![RenewablePlant::new("w", &rng.gen_range(1..=nb).to_string(), RenewableKind::Wind, 80.0)]
    } else {
        vec![]
    };
    let cap: f64 = generators.iter().map(|g| g.p_max_mw).sum();
    let ratings = lines.iter().map(|_| (0..nt).map(|_| round(rng.gen_range(10.0..80.0), 0.5)).collect()).collect();
    let renewable = renewables.iter().map(|_| (0..nt).map(|_| round(rng.gen_range(0.0..80.0), 0.5)).collect()).collect();
    let load = (0..nb)
        .map(|_| (0..nt).map(|_| round(rng.gen_range(0.0..0.9 * cap / nb as f64), 0.5)).collect())
        .collect();
    let u0 = (0..ng).map(|_| rng.gen_bool(0.3)).collect();
    gridplan::scuc::ScucInstance {
        view: EpochView {
            epoch: 1,
            base_mva: 100.0,
            interval_hours: dt,
            reference_bus: "1".into(),
            buses,
            lines,
            generators,
            renewables,
        },
        quarter: 1,
        day: DayType::Weekday,
        intervals: nt,
        ratings,
        renewable,
        load,
        shed_penalty: gridplan::scuc::DEFAULT_SHED_PENALTY,
        reserve_required,
        u0,
    }
}

/// Minimum over every commitment pattern of the remaining LP.
pub fn scuc_by_enumeration(inst: &gridplan::scuc::ScucInstance) -> Option<f64> {
    let model = gridplan::scuc::build_scuc(inst).expect("model builds");
    let us: Vec<_> = model.map.u.iter().flatten().copied().collect();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << us.len()) {
        let mut p = model.problem.clone();
        for (i, u) in us.iter().enumerate() {
            let on = f64::from((mask >> i) & 1);
            let v = p.var_mut(*u);
            v.lower = on;
            v.upper = on;
        }
        let sol = gridplan::milp::solve_lp(&p, &SolverConfig::default()).unwrap();
        match sol.status {
            SolveStatus::Optimal => best = Some(best.map_or(sol.objective, |b: f64| b.min(sol.objective))),
            SolveStatus::Infeasible => {}
            s => panic!("commitment LP ended with {s:?}"),
        }
    }
    best
}
