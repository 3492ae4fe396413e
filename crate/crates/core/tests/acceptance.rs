// Acceptance run: one line per criterion, non-zero exit if any fails.
// Runs as a plain binary (`harness = false`) so the report stays readable.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chrono::{Datelike, NaiveDateTime, Weekday};
use gridplan::cli::{plan, simulate, synth, Overrides, Study, VariantChoice};
use gridplan::grid::{BuildPlan, Case, DayType, LineBuild, PlanningHorizon};
use gridplan::milp::mps::{parse_mps, to_mps_string};
use gridplan::milp::{solve_milp, SolveStatus, SolverConfig};
use gridplan::profiles::{
    build_representative, extrapolate_wind_speed, line_rating_at, renewable_output_at, LoadSeries, WeatherSeries,
};
use gridplan::reliability::{eue, lole, lolp, records_from_batch, Demand, SheddingRecord};
use gridplan::scuc::{build_scuc, run_batch, ScucInstance};
use gridplan::tep::{build_tep_ci, capital_cost, solve_tep, TepError, TepInstance, Variant};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).join("study.toml")
}

/// Fixture study writing into `out`.
fn open(name: &str, out: &Path) -> Study {
    let o = Overrides {
        output: Some(out.to_path_buf()),
        ..Default::default()
    };
    Study::open(&fixture(name), &o).expect("fixture study opens")
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        return Err(format!("took {:.1}s, limit {:.0}s", t.as_secs_f64(), limit.as_secs_f64()));
    }
    Ok(())
}

fn wind_extrapolation() -> Outcome {
    let start = Instant::now();
    let v = extrapolate_wind_speed(5.0, 10.0, 80.0, 0.03).map_err(|e| e.to_string())?;
    ensure!((v - 6.790).abs() <= 1e-3, "5 m/s at 10 m gives {v} at 80 m");
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..1000 {
        let z0 = rng.gen_range(0.001..1.0);
        let h_ref = rng.gen_range(z0 * 2.0..50.0);
        let h_hub = rng.gen_range(z0 * 2.0..200.0);
        let v = rng.gen_range(0.0..30.0);
        let a = rng.gen_range(0.0..5.0);
        let f = |x| extrapolate_wind_speed(x, h_ref, h_hub, z0).unwrap();
        ensure!(rel_close(f(a * v), a * f(v), 1e-12), "not linear at v={v} a={a}");
        let same = extrapolate_wind_speed(v, h_ref, h_ref, z0).unwrap();
        ensure!(rel_close(same, v, 1e-12), "equal heights change {v} to {same}");
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("v_hub = {v:.4} m/s, 1000 draws"))
}

fn capital_costs() -> Outcome {
    let grid = gridplan::grid::parse_grid(
        r#"{"name": "cap", "base_mva": 100,
            "horizon": {"num_epochs": 3, "years_per_epoch": 5, "weekdays_per_quarter": 65,
                        "weekend_days_per_quarter": 26, "intervals_per_day": 8, "interval_hours": 3,
                        "maintenance_ratio": 0.02},
            "buses": [{"id": "1", "latitude": 0, "longitude": 0}, {"id": "2", "latitude": 0, "longitude": 1}],
            "lines": [{"id": "l1", "from_bus": "1", "to_bus": "2", "reactance": 0.1, "static_rating_mva": 100},
                      {"id": "c1", "from_bus": "1", "to_bus": "2", "reactance": 0.1, "static_rating_mva": 100,
                       "candidate": true, "construction_cost_musd": 10}],
            "generators": [{"id": "g1", "bus": "1", "p_min_mw": 0, "p_max_mw": 100, "marginal_cost": 20}]}"#,
    )
    .map_err(|e| e.to_string())?;
    let at = |e| BuildPlan {
        lines: vec![LineBuild {
            line_id: "c1".into(),
            construction_epoch: e,
        }],
    };
    let (first, last, none) = (capital_cost(&at(1), &grid), capital_cost(&at(3), &grid), capital_cost(&BuildPlan::default(), &grid));
    ensure!(first == 13e6, "epoch-1 build costs {first}");
    ensure!(last == 11e6, "epoch-3 build costs {last}");
    ensure!(none == 0.0, "empty plan costs {none}");
    Ok("13 M$, 11 M$, 0".into())
}

fn tep_oracle() -> Outcome {
    let start = Instant::now();
    let (mut agree, mut builds) = (0, 0);
    for seed in 0..30 {
        let inst = common::random_tep(seed);
        ensure!(inst.grid.buses.len() <= 5 && inst.grid.candidates().count() <= 4, "seed {seed} too large");
        let oracle = common::tep_by_enumeration(&inst);
        match (solve_tep(&inst, &SolverConfig::default()), oracle) {
            (Ok(sol), Some(best)) => {
                ensure!(rel_close(sol.total, best, 1e-6), "seed {seed}: milp {} vs enumeration {best}", sol.total);
                agree += 1;
                builds += !sol.plan.lines.is_empty() as usize;
            }
            (Err(TepError::Status(SolveStatus::Infeasible)), None) => {}
            (got, want) => return Err(format!("seed {seed}: milp {got:?} vs enumeration {want:?}")),
        }
    }
    ensure!(agree >= 20, "only {agree} feasible instances");
    within(Duration::from_secs(120), start)?;
    Ok(format!("{agree} instances agree, {builds} build lines"))
}

fn scuc_oracle() -> Outcome {
    let start = Instant::now();
    let mut n = 0;
    for seed in 0..30 {
        let inst = common::random_scuc(seed);
        ensure!(inst.view.generators.len() <= 3 && inst.intervals <= 4, "seed {seed} too large");
        let best = common::scuc_by_enumeration(&inst).ok_or(format!("seed {seed}: no commitment is feasible"))?;
        let sol = gridplan::scuc::solve_scuc(&inst, &SolverConfig::default()).map_err(|e| e.to_string())?;
        ensure!(rel_close(sol.objective, best, 1e-6), "seed {seed}: milp {} vs enumeration {best}", sol.objective);
        n += 1;
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!("{n} instances agree"))
}

/// Total shed energy over the horizon of each case's batch.
fn batch_shed(study: &Study, penalty: f64) -> Result<Vec<(Case, f64)>, String> {
    let profiles = study.profiles().map_err(|e| e.to_string())?;
    let mut opts = study.config.scuc.options();
    opts.shed_penalty = penalty;
    let cfg = study.config.scuc.solver.to_config();
    let h = &study.grid.horizon;
    let mut out = Vec::new();
    for &case in &study.config.cases {
        let views = study.views(case).map_err(|e| e.to_string())?;
        let res = run_batch(&views, &profiles, &opts, &cfg);
        let (recs, _) = records_from_batch(&res).map_err(|e| format!("{case}: {e}"))?;
        let total = (1..=h.num_epochs).fold(0.0, |a, p| a + eue(&recs, h, p));
        out.push((case, total));
    }
    Ok(out)
}

/// Shed energy, MWh over the horizon, of a plan that may shed.
fn tep_shed(study: &Study, case: Case, penalty: f64) -> Result<f64, String> {
    let inst = TepInstance {
        grid: study.planning_grid(case).map_err(|e| e.to_string())?,
        profiles: study.profiles().map_err(|e| e.to_string())?,
        variant: Variant::Ci,
        theta_bound: study.config.tep.theta_bound,
        shed_allowed: true,
        shed_penalty: penalty,
    };
    let sol = solve_tep(&inst, &study.config.tep.solver.to_config()).map_err(|e| format!("{case} plan: {e}"))?;
    let h = &inst.grid.horizon;
    Ok(sol.shed.iter().fold(0.0, |a, ((_, _, _, d), v)| {
        a + v.iter().sum::<f64>() * h.interval_hours * h.day_weight(*d) * h.years_per_epoch as f64
    }))
}

fn shed_last_resort() -> Outcome {
    let mut notes = Vec::new();
    for name in ["tutorial", "growth", "two_bus"] {
        let dir = tempfile::tempdir().unwrap();
        let study = open(name, dir.path());
        synth(&study).map_err(|e| format!("{name}: {e}"))?;
        plan(&study, VariantChoice::Ci, Case::FGI).map_err(|e| format!("{name}: {e}"))?;
        let p = study.config.scuc.shed_penalty;
        let base = batch_shed(&study, p)?;
        let high = batch_shed(&study, 10.0 * p)?;
        for ((case, a), (_, b)) in base.iter().zip(&high) {
            ensure!((a - b).abs() < 1e-6, "{name} {case}: shed {a} MWh at x1, {b} MWh at x10");
        }
        let mut tep_totals = Vec::new();
        for case in [Case::FR, Case::FGI] {
            let a = tep_shed(&study, case, p)?;
            let b = tep_shed(&study, case, 10.0 * p)?;
            ensure!((a - b).abs() < 1e-6, "{name} {case} planning: shed {a} MWh at x1, {b} MWh at x10");
            tep_totals.push(a);
        }
        let shown: Vec<String> = base.iter().map(|(c, s)| format!("{c} {s:.1}")).collect();
        notes.push(format!("{name} [{}; plan FR {:.1}]", shown.join(", "), tep_totals[0]));
    }
    Ok(format!("shed MWh unchanged: {}", notes.join(" ")))
}

fn rec(epoch: usize, day: DayType, bus: &str, t: usize, mw: f64) -> SheddingRecord {
    SheddingRecord {
        epoch,
        quarter: 1,
        day,
        bus: bus.into(),
        interval: t,
        shed_mw: mw,
    }
}

fn horizon(years: usize) -> PlanningHorizon {
    PlanningHorizon {
        num_epochs: 1,
        years_per_epoch: years,
        weekdays_per_quarter: 65,
        weekend_days_per_quarter: 26,
        intervals_per_day: 8,
        interval_hours: 3.0,
        maintenance_ratio: 0.0,
        start_year: 2021,
        load_growth: vec![],
    }
}

fn reliability_formulas() -> Outcome {
    let h = horizon(1);
    let mut demand = Demand::new();
    for d in DayType::ALL {
        demand.insert(("1".into(), 1, 1, d), vec![100.0; 8]);
    }
    let one = [rec(1, DayType::Weekday, "1", 0, 10.0)];
    let e = eue(&one, &h, 1);
    ensure!(e == 1950.0, "eue {e}");
    let p = lolp(&one, &demand, &h, 1).map_err(|e| e.to_string())?;
    ensure!(p == 1950.0 / 218_400.0 && (p - 0.00893).abs() < 5e-6, "lolp {p}");
    let two = [rec(1, DayType::Weekday, "3", 2, 4.0), rec(1, DayType::Weekday, "3", 5, 1e-3)];
    let l = lole(&two, &h, 1, 5);
    ensure!(l == 78.0, "lole {l}");

    // Invariants over random shedding no larger than demand.
    let mut rng = StdRng::seed_from_u64(7);
    let buses = ["a", "b", "c"];
    for draw in 0..200 {
        let mut demand = Demand::new();
        let mut recs = Vec::new();
        for b in buses {
            for d in DayType::ALL {
                let v: Vec<f64> = (0..8).map(|_| rng.gen_range(1.0..200.0)).collect();
                for (t, x) in v.iter().enumerate() {
                    let s = if rng.gen_bool(0.3) { x * rng.gen_range(0.01..1.0) } else { 0.0 };
                    recs.push(rec(1, d, b, t, s));
                }
                demand.insert((b.to_string(), 1, 1, d), v);
            }
        }
        let years = rng.gen_range(1..6);
        let h = horizon(years);
        let a = rng.gen_range(0.01..1.0);
        let scaled: Vec<_> = recs.iter().map(|r| SheddingRecord { shed_mw: r.shed_mw * a, ..r.clone() }).collect();
        let e = eue(&recs, &h, 1);
        let p = lolp(&recs, &demand, &h, 1).unwrap();
        ensure!(rel_close(eue(&scaled, &h, 1), a * e, 1e-12), "draw {draw}: eue not linear");
        ensure!(rel_close(lolp(&scaled, &demand, &h, 1).unwrap(), a * p, 1e-12), "draw {draw}: lolp not linear");
        ensure!(lole(&scaled, &h, 1, 3) == lole(&recs, &h, 1, 3), "draw {draw}: lole depends on depth");
        ensure!(rel_close(lole(&recs, &horizon(1), 1, 3), years as f64 * lole(&recs, &h, 1, 3), 1e-12), "draw {draw}: lole not per year");
        let k = rng.gen_range(0..recs.len());
        let (x, y) = recs.split_at(k);
        ensure!(rel_close(eue(x, &h, 1) + eue(y, &h, 1), e, 1e-12), "draw {draw}: eue not additive");
        let zero = e == 0.0;
        ensure!(zero == (p == 0.0) && zero == (lole(&recs, &h, 1, 3) == 0.0), "draw {draw}: zero indices disagree");
        ensure!((0.0..=1.0).contains(&p), "draw {draw}: lolp {p}");
    }
    Ok(format!("eue {e}, lolp {p:.5}, lole {l}; 200 invariant draws"))
}

fn tutorial_direction() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let study = open("tutorial", dir.path());
    synth(&study).map_err(|e| e.to_string())?;
    let r = plan(&study, VariantChoice::Both, Case::FGI).map_err(|e| e.to_string())?;
    let c = r.comparison.ok_or("no comparison")?;
    let tg = c.traditional_generation.ok_or("traditional plan cannot serve the climate-varying profiles")?;
    ensure!(c.ci_investment >= c.traditional_investment, "investment ci {} < traditional {}", c.ci_investment, c.traditional_investment);
    ensure!(c.ci_generation <= tg, "generation ci {} > traditional {tg}", c.ci_generation);
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "investment {:.3} vs {:.3} M$, generation {:.3} vs {:.3} M$",
        c.ci_investment / 1e6,
        c.traditional_investment / 1e6,
        c.ci_generation / 1e6,
        tg / 1e6
    ))
}

fn growth_direction() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let study = open("growth", dir.path());
    synth(&study).map_err(|e| e.to_string())?;
    plan(&study, VariantChoice::Ci, Case::FGI).map_err(|e| e.to_string())?;
    simulate(&study, &Case::ALL).map_err(|e| e.to_string())?.into_result().map_err(|e| e.to_string())?;
    let out = gridplan::cli::evaluate(&study, &Case::ALL).map_err(|e| e.to_string())?;
    let by_case: BTreeMap<&str, _> = out.reports.iter().map(|r| (r.case.as_str(), &r.epochs)).collect();
    let (fr, fgi, fgti) = (by_case["FR"], by_case["FGI"], by_case["FGTI"]);
    ensure!(fr.len() == study.grid.horizon.num_epochs, "FR covers {} epochs", fr.len());
    let ge = |a: f64, b: f64| a >= b - 1e-9 * a.abs().max(1.0);
    for ((a, b), c) in fr.iter().zip(fgi).zip(fgti) {
        for (name, x, y, z) in [
            ("eue", a.eue_mwh, b.eue_mwh, c.eue_mwh),
            ("lolp", a.lolp, b.lolp, c.lolp),
            ("lole", a.lole_hours_per_bus, b.lole_hours_per_bus, c.lole_hours_per_bus),
        ] {
            ensure!(ge(x, y) && ge(y, z), "epoch {} {name}: FR {x}, FGI {y}, FGTI {z}", a.epoch);
        }
    }
    let last = fr.last().unwrap();
    ensure!(last.eue_mwh > 0.0 && last.lolp > 0.0 && last.lole_hours_per_bus > 0.0, "FR does not shed in the final epoch");
    within(Duration::from_secs(300), start)?;
    let (b, c) = (fgi.last().unwrap(), fgti.last().unwrap());
    Ok(format!(
        "final epoch eue {:.0}/{:.0}/{:.0} MWh, lolp {:.4}/{:.4}/{:.4}, lole {:.1}/{:.1}/{:.1} h",
        last.eue_mwh, b.eue_mwh, c.eue_mwh, last.lolp, b.lolp, c.lolp, last.lole_hours_per_bus, b.lole_hours_per_bus,
        c.lole_hours_per_bus
    ))
}

/// Objective from an external solver, when one is on PATH.
fn external_objective(mps: &Path) -> Option<f64> {
    let out = std::process::Command::new("highs").arg(mps).output().ok()?;
    let text = String::from_utf8_lossy(&out.stdout);
    text.lines()
        .find(|l| l.trim_start().starts_with("Objective value"))
        .and_then(|l| l.rsplit(':').next())
        .and_then(|v| v.trim().parse().ok())
}

fn mps_round_trip() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let study = open("tutorial", dir.path());
    synth(&study).map_err(|e| e.to_string())?;
    let profiles = study.profiles().map_err(|e| e.to_string())?;
    let tep = build_tep_ci(&TepInstance {
        grid: study.planning_grid(Case::FGI).map_err(|e| e.to_string())?,
        profiles: profiles.clone(),
        variant: Variant::Ci,
        theta_bound: study.config.tep.theta_bound,
        shed_allowed: false,
        shed_penalty: study.config.tep.shed_penalty,
    })
    .map_err(|e| e.to_string())?;
    let views = study.views(Case::FGI).map_err(|e| e.to_string())?;
    let last = views.last().unwrap();
    let q3 = ScucInstance::from_profiles(last, &profiles, 3, DayType::Weekday, &study.config.scuc.options())
        .map_err(|e| e.to_string())?;
    let scuc = build_scuc(&q3).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for (name, p) in [("tep", &tep.problem), ("scuc", &scuc.problem)] {
        let text = to_mps_string(p);
        let back = parse_mps(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure!(&back == p, "{name}: problem changed through MPS");
        let path = dir.path().join(format!("{name}.mps"));
        std::fs::write(&path, &text).unwrap();
        match external_objective(&path) {
            Some(ext) => {
                let own = solve_milp(p, &SolverConfig::default()).map_err(|e| e.to_string())?;
                ensure!(rel_close(own.objective, ext, 1e-6), "{name}: embedded {} vs external {ext}", own.objective);
                notes.push(format!("{name} {} vars, external solver agrees", p.num_vars()));
            }
            None => notes.push(format!("{name} {} vars x {} rows", p.num_vars(), p.num_constraints())),
        }
    }
    Ok(notes.join("; "))
}

fn parse_ts(s: &str) -> NaiveDateTime {
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%SZ").expect("fixture timestamp")
}

/// Mean over days of each interval, in date order.
fn mean_by_interval(days: &BTreeMap<chrono::NaiveDate, Vec<f64>>) -> Vec<f64> {
    let t = days.values().next().map_or(0, Vec::len);
    let n = days.len() as f64;
    (0..t)
        .map(|k| {
            let mut s = 0.0;
            for v in days.values() {
                s += v[k];
            }
            s / n
        })
        .collect()
}

fn representative_oracle() -> Outcome {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/two_bus");
    let grid = gridplan::grid::load_grid(&root.join("grid.json")).map_err(|e| e.to_string())?;
    let weather = WeatherSeries::from_csv(&root.join("weather.csv")).map_err(|e| e.to_string())?;
    let load = LoadSeries::from_csv(&root.join("load.csv")).map_err(|e| e.to_string())?;
    let opts = gridplan::profiles::BuildOptions {
        require_full_coverage: false,
        ..Default::default()
    };
    let got = build_representative(&weather, &load, &grid, &opts).map_err(|e| e.to_string())?;
    let h = &grid.horizon;
    let per_day = h.intervals_per_day;
    let slot = |t: NaiveDateTime| (t.date(), (t.time().signed_duration_since(chrono::NaiveTime::MIN).num_minutes() as f64 / 60.0 / h.interval_hours) as usize);

    // Raw weather rows define which instants exist.
    let mut stamps: BTreeMap<chrono::NaiveDate, Vec<NaiveDateTime>> = BTreeMap::new();
    for row in std::fs::read_to_string(root.join("weather.csv")).unwrap().lines().skip(1) {
        let t = parse_ts(row.split(',').next().unwrap());
        let e = stamps.entry(t.date()).or_default();
        if !e.contains(&t) {
            e.push(t);
        }
    }
    let mut raw_load: BTreeMap<(String, chrono::NaiveDate), Vec<f64>> = BTreeMap::new();
    for row in std::fs::read_to_string(root.join("load.csv")).unwrap().lines().skip(1) {
        let f: Vec<&str> = row.split(',').collect();
        let (d, k) = slot(parse_ts(f[0]));
        let v = raw_load.entry((f[1].to_string(), d)).or_insert_with(|| vec![f64::NAN; per_day]);
        v[k] = f[2].parse().unwrap();
    }
    let complete: Vec<chrono::NaiveDate> = stamps.iter().filter(|(_, v)| v.len() == per_day).map(|(d, _)| *d).collect();
    ensure!(complete.len() == 4, "fixture should hold four whole days, found {}", complete.len());
    ensure!(complete.iter().all(|d| (d.month0() / 3 + 1) == 1 && d.year() == h.start_year), "days outside quarter 1");

    let mut checked = 0;
    let mut compare = |what: String, want: Vec<f64>, have: Option<&[f64]>| -> Result<(), String> {
        let have = have.ok_or(format!("{what} missing"))?;
        ensure!(have == want.as_slice(), "{what}: built {have:?}, scripted {want:?}");
        checked += want.len();
        Ok(())
    };
    for l in &grid.lines {
        let days = complete
            .iter()
            .map(|d| (*d, stamps[d].iter().map(|t| line_rating_at(l, &weather, *t, opts.policy).unwrap()).collect()))
            .collect();
        compare(format!("rating {}", l.id), mean_by_interval(&days), got.rating(&l.id, 1, 1))?;
    }
    for r in &grid.renewables {
        let days = complete
            .iter()
            .map(|d| (*d, stamps[d].iter().map(|t| renewable_output_at(r, &weather, *t).unwrap()).collect()))
            .collect();
        compare(format!("renewable {}", r.id), mean_by_interval(&days), got.renewable(&r.id, 1, 1))?;
    }
    for b in &grid.buses {
        for dt in DayType::ALL {
            let days: BTreeMap<_, _> = complete
                .iter()
                .filter(|d| matches!(d.weekday(), Weekday::Sat | Weekday::Sun) == (dt == DayType::Weekend))
                .map(|d| (*d, raw_load[&(b.id.clone(), *d)].clone()))
                .collect();
            ensure!(days.len() == 2, "expected two {dt} days");
            compare(format!("load {} {dt}", b.id), mean_by_interval(&days), got.bus_load(&b.id, 1, 1, dt))?;
        }
    }
    ensure!(got.slabs() == vec![(1, 1)], "slabs without data were built: {:?}", got.slabs());
    let entries = got.line_rating.len() + got.renewable_max.len() + got.load.len();
    ensure!(entries == grid.lines.len() + grid.renewables.len() + 2 * grid.buses.len(), "unexpected extra profiles");
    Ok(format!("{checked} values equal, partial coverage leaves only quarter 1"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("wind speed extrapolation", wind_extrapolation),
        ("capital cost", capital_costs),
        ("planning oracle", tep_oracle),
        ("commitment oracle", scuc_oracle),
        ("shedding is a last resort", shed_last_resort),
        ("reliability formulas", reliability_formulas),
        ("tutorial: climate-aware vs traditional plan", tutorial_direction),
        ("growth: FR >= FGI >= FGTI", growth_direction),
        ("MPS round trip", mps_round_trip),
        ("representative profile oracle", representative_oracle),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
