//! C interface to the gridplan toolkit.
//!
//! Every fallible function returns a [`GpStatus`]. On failure the reason is
//! available from [`gp_last_error`] on the same thread until the next call.
//! Handles are opaque, created by a `*_open`/`*_load`/`*_parse` function
//! and released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use gridplan::cli::{self, CliError, Overrides, Study, VariantChoice};
use gridplan::grid::{BuildPlan, DayType, GridModel, LineBuild};
use gridplan::milp::mps::{parse_mps, read_mps, write_mps};
use gridplan::milp::{solve_milp, MilpProblem, SolveStatus, SolverConfig};
use gridplan::profiles::{
    dynamic_rating, extrapolate_wind_speed, solar_power, wind_power, DlrParams, EffectiveWeather, SolarPanel,
    WindCurve,
};
use gridplan::reliability::{report, Demand, SheddingRecord};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad argument, configuration or input data.
    InvalidArgument = 2,
    /// No feasible solution, or the solver failed.
    Infeasible = 3,
    /// Input series do not cover the study horizon.
    Coverage = 4,
    Io = 5,
    /// A bug: the library panicked. The handle involved should be freed.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpSolveStatus {
    Optimal = 0,
    Infeasible = 1,
    Unbounded = 2,
    /// Node, iteration or time limit reached.
    Limit = 3,
    NumericalFailure = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpDayType {
    Weekday = 0,
    Weekend = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpVariant {
    /// Time-varying ratings and renewable availability.
    Ci = 0,
    Traditional = 1,
    /// Both, compared; the first is the plan later stages use.
    Both = 2,
}

/// One bus-interval value of a typical day: shed or demanded MW.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GpBusValue {
    pub epoch: usize,
    pub quarter: usize,
    pub day: GpDayType,
    /// Position of the bus in the grid's bus list.
    pub bus: usize,
    pub interval: usize,
    pub mw: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GpReliability {
    /// Unserved energy, MWh per year.
    pub eue_mwh: f64,
    pub lolp: f64,
    /// Outage hours per bus per year.
    pub lole_hours_per_bus: f64,
}

/// Costs of a solved expansion plan, $.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GpPlanCosts {
    pub transmission_investment: f64,
    pub generation: f64,
    pub built_lines: usize,
}

pub struct GpGrid(GridModel);
pub struct GpProblem(MilpProblem);
pub struct GpStudy(Study);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Failure = (GpStatus, String);

fn fail<T>(status: GpStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err((status, msg.into()))
}

fn invalid(e: impl ToString) -> Failure {
    (GpStatus::InvalidArgument, e.to_string())
}

fn from_cli(e: CliError) -> Failure {
    let status = match e.exit_code() {
        1 => GpStatus::Io,
        3 => GpStatus::Infeasible,
        4 => GpStatus::Coverage,
        _ => GpStatus::InvalidArgument,
    };
    (status, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GpStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            set_error(format!("internal error: {msg}"));
            GpStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or((GpStatus::NullPointer, "output pointer is null".into()))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or((GpStatus::NullPointer, format!("{what} handle is null")))
}

unsafe fn string(p: *const c_char, what: &str) -> Result<String, Failure> {
    if p.is_null() {
        return fail(GpStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_string)
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn path(p: *const c_char, what: &str) -> Result<PathBuf, Failure> {
    string(p, what).map(PathBuf::from)
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(GpStatus::NullPointer, format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

fn boxed<T>(v: T, dst: &mut *mut T) {
    *dst = Box::into_raw(Box::new(v));
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn gp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null. Valid until the
/// next call into the library from this thread.
#[no_mangle]
pub extern "C" fn gp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Log-law wind speed at `h_hub` from a reading `v_ref` at `h_ref`.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_extrapolate_wind_speed(v_ref: f64, h_ref: f64, h_hub: f64, z0: f64, result: *mut f64) -> GpStatus {
    guard(|| {
        *out(result)? = extrapolate_wind_speed(v_ref, h_ref, h_hub, z0).map_err(invalid)?;
        Ok(())
    })
}

/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_wind_power(
    v_hub: f64,
    cut_in: f64,
    rated: f64,
    cut_out: f64,
    capacity_mw: f64,
    result: *mut f64,
) -> GpStatus {
    guard(|| {
        let curve = WindCurve {
            cut_in,
            rated,
            cut_out,
            capacity: capacity_mw,
        };
        *out(result)? = wind_power(v_hub, &curve).map_err(invalid)?;
        Ok(())
    })
}

/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_solar_power(
    shortwave: f64,
    longwave: f64,
    capacity_mw: f64,
    f_sw: f64,
    f_lw: f64,
    g_ref: f64,
    result: *mut f64,
) -> GpStatus {
    guard(|| {
        let panel = SolarPanel {
            capacity: capacity_mw,
            f_sw,
            f_lw,
            g_ref,
        };
        *out(result)? = solar_power(shortwave, longwave, &panel).map_err(invalid)?;
        Ok(())
    })
}

/// Dynamic rating with the default coefficients.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_dynamic_rating(
    base_rating_mva: f64,
    temperature_c: f64,
    wind_speed_mps: f64,
    solar_wm2: f64,
    result: *mut f64,
) -> GpStatus {
    guard(|| {
        let w = EffectiveWeather {
            temperature: temperature_c,
            wind_speed: wind_speed_mps,
            solar: solar_wm2,
        };
        *out(result)? = dynamic_rating(&w, &DlrParams::new(base_rating_mva)).map_err(invalid)?;
        Ok(())
    })
}

/// # Safety
/// `file` must be a nul-terminated string; `grid` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_grid_load(file: *const c_char, grid: *mut *mut GpGrid) -> GpStatus {
    guard(|| {
        let dst = out(grid)?;
        let p = path(file, "path")?;
        let g = gridplan::grid::load_grid(&p).map_err(|e| {
            let s = if p.is_file() { GpStatus::InvalidArgument } else { GpStatus::Io };
            (s, e.to_string())
        })?;
        boxed(GpGrid(g), dst);
        Ok(())
    })
}

/// # Safety
/// `json` must be a nul-terminated string; `grid` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_grid_parse(json: *const c_char, grid: *mut *mut GpGrid) -> GpStatus {
    guard(|| {
        let dst = out(grid)?;
        let g = gridplan::grid::parse_grid(&string(json, "json")?).map_err(invalid)?;
        boxed(GpGrid(g), dst);
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gp_grid_free(grid: *mut GpGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Bus, line (including candidates) and candidate-line counts. Any output
/// pointer may be null.
///
/// # Safety
/// `grid` must be a live handle; non-null outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_grid_counts(
    grid: *const GpGrid,
    buses: *mut usize,
    lines: *mut usize,
    candidates: *mut usize,
) -> GpStatus {
    guard(|| {
        let g = &handle(grid, "grid")?.0;
        for (p, v) in [(buses, g.buses.len()), (lines, g.lines.len()), (candidates, g.candidates().count())] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Construction plus maintenance cost, $, of building `line_ids[i]` in
/// `epochs[i]` for each of the `n` entries.
///
/// # Safety
/// `grid` must be a live handle; `line_ids` and `epochs` must hold `n`
/// entries; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_grid_capital_cost(
    grid: *const GpGrid,
    line_ids: *const *const c_char,
    epochs: *const usize,
    n: usize,
    result: *mut f64,
) -> GpStatus {
    guard(|| {
        let g = &handle(grid, "grid")?.0;
        let ids = slice(line_ids, n, "line_ids")?;
        let eps = slice(epochs, n, "epochs")?;
        let mut plan = BuildPlan::default();
        for (id, &e) in ids.iter().zip(eps) {
            let id = string(*id, "line id")?;
            if !g.candidates().any(|l| l.id == id) {
                return fail(GpStatus::InvalidArgument, format!("{id} is not a candidate line"));
            }
            if e < 1 || e > g.horizon.num_epochs {
                return fail(GpStatus::InvalidArgument, format!("epoch {e} outside 1..={}", g.horizon.num_epochs));
            }
            plan.lines.push(LineBuild {
                line_id: id,
                construction_epoch: e,
            });
        }
        *out(result)? = gridplan::tep::capital_cost(&plan, g);
        Ok(())
    })
}

fn day(d: GpDayType) -> DayType {
    match d {
        GpDayType::Weekday => DayType::Weekday,
        GpDayType::Weekend => DayType::Weekend,
    }
}

/// Reliability indices of one epoch from shed values and the demand they
/// were cut from. Demand entries absent from `demand` count as zero.
///
/// # Safety
/// `grid` must be a live handle; `shed` and `demand` must hold `n_shed` and
/// `n_demand` entries; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_reliability(
    grid: *const GpGrid,
    shed: *const GpBusValue,
    n_shed: usize,
    demand: *const GpBusValue,
    n_demand: usize,
    epoch: usize,
    result: *mut GpReliability,
) -> GpStatus {
    guard(|| {
        let g = &handle(grid, "grid")?.0;
        let h = &g.horizon;
        let bus = |v: &GpBusValue| -> Result<String, Failure> {
            if v.interval >= h.intervals_per_day || !(1..=4).contains(&v.quarter) {
                return Err(invalid(format!("interval {} or quarter {} out of range", v.interval, v.quarter)));
            }
            g.buses.get(v.bus).map(|b| b.id.clone()).ok_or_else(|| invalid(format!("no bus at index {}", v.bus)))
        };
        let mut records = Vec::with_capacity(n_shed);
        for v in slice(shed, n_shed, "shed")? {
            records.push(SheddingRecord {
                epoch: v.epoch,
                quarter: v.quarter,
                day: day(v.day),
                bus: bus(v)?,
                interval: v.interval,
                shed_mw: v.mw,
            });
        }
        let mut dem = Demand::new();
        for v in slice(demand, n_demand, "demand")? {
            let row = dem
                .entry((bus(v)?, v.epoch, v.quarter, day(v.day)))
                .or_insert_with(|| vec![0.0; h.intervals_per_day]);
            row[v.interval] += v.mw;
        }
        let r = report("c", &records, &dem, h, g.buses.len()).map_err(invalid)?;
        let e = r
            .epochs
            .iter()
            .find(|e| e.epoch == epoch)
            .ok_or_else(|| invalid(format!("no demand in epoch {epoch}")))?;
        *out(result)? = GpReliability {
            eue_mwh: e.eue_mwh,
            lolp: e.lolp,
            lole_hours_per_bus: e.lole_hours_per_bus,
        };
        Ok(())
    })
}

/// # Safety
/// `file` must be a nul-terminated string; `problem` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_problem_read_mps(file: *const c_char, problem: *mut *mut GpProblem) -> GpStatus {
    guard(|| {
        let dst = out(problem)?;
        let p = path(file, "path")?;
        if !p.is_file() {
            return fail(GpStatus::Io, format!("cannot read {}", p.display()));
        }
        boxed(GpProblem(read_mps(&p).map_err(invalid)?), dst);
        Ok(())
    })
}

/// # Safety
/// `text` must be a nul-terminated string; `problem` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_problem_parse_mps(text: *const c_char, problem: *mut *mut GpProblem) -> GpStatus {
    guard(|| {
        let dst = out(problem)?;
        boxed(GpProblem(parse_mps(&string(text, "text")?).map_err(invalid)?), dst);
        Ok(())
    })
}

/// # Safety
/// `problem` must be a live handle; `file` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gp_problem_write_mps(problem: *const GpProblem, file: *const c_char) -> GpStatus {
    guard(|| {
        let p = &handle(problem, "problem")?.0;
        let f = path(file, "path")?;
        write_mps(p, &f).map_err(|e| (GpStatus::Io, e.to_string()))
    })
}

/// # Safety
/// `problem` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gp_problem_free(problem: *mut GpProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// # Safety
/// `problem` must be a live handle; non-null outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_problem_size(problem: *const GpProblem, variables: *mut usize, constraints: *mut usize) -> GpStatus {
    guard(|| {
        let p = &handle(problem, "problem")?.0;
        if let Some(v) = variables.as_mut() {
            *v = p.num_vars();
        }
        if let Some(c) = constraints.as_mut() {
            *c = p.num_constraints();
        }
        Ok(())
    })
}

/// Solve with the embedded branch and bound. Returns `GP_STATUS_OK` whenever
/// the solver ran; `status` says how it ended and `objective` is NaN when no
/// feasible point is known. `relative_gap` of zero or less keeps the default.
///
/// # Safety
/// `problem` must be a live handle; `status` and `objective` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_problem_solve(
    problem: *const GpProblem,
    relative_gap: f64,
    status: *mut GpSolveStatus,
    objective: *mut f64,
) -> GpStatus {
    guard(|| {
        let p = &handle(problem, "problem")?.0;
        let (st, obj) = (out(status)?, out(objective)?);
        let mut cfg = SolverConfig::default();
        if relative_gap > 0.0 {
            cfg.relative_gap = relative_gap;
        }
        let sol = solve_milp(p, &cfg).map_err(invalid)?;
        *st = match sol.status {
            SolveStatus::Optimal => GpSolveStatus::Optimal,
            SolveStatus::Infeasible => GpSolveStatus::Infeasible,
            SolveStatus::Unbounded => GpSolveStatus::Unbounded,
            SolveStatus::Limit => GpSolveStatus::Limit,
            SolveStatus::NumericalFailure => GpSolveStatus::NumericalFailure,
        };
        *obj = if sol.has_values() { sol.objective } else { f64::NAN };
        Ok(())
    })
}

/// Open a study file. `output_dir` may be null to keep the configured one.
///
/// # Safety
/// `config` must be a nul-terminated string, `output_dir` null or one;
/// `study` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_study_open(config: *const c_char, output_dir: *const c_char, study: *mut *mut GpStudy) -> GpStatus {
    guard(|| {
        let dst = out(study)?;
        let cfg = path(config, "config")?;
        let overrides = Overrides {
            output: if output_dir.is_null() { None } else { Some(path(output_dir, "output_dir")?) },
            ..Default::default()
        };
        boxed(GpStudy(Study::open(&cfg, &overrides).map_err(from_cli)?), dst);
        Ok(())
    })
}

/// # Safety
/// `study` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gp_study_free(study: *mut GpStudy) {
    if !study.is_null() {
        drop(Box::from_raw(study));
    }
}

/// Build and write the representative profiles.
///
/// # Safety
/// `study` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gp_study_synth(study: *const GpStudy) -> GpStatus {
    guard(|| {
        cli::synth(&handle(study, "study")?.0).map_err(from_cli)?;
        Ok(())
    })
}

/// Solve and write the expansion plan for the configured fleet. `costs`
/// may be null; otherwise it receives the first variant's costs.
///
/// # Safety
/// `study` must be a live handle; `costs` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_study_plan(study: *const GpStudy, variant: GpVariant, costs: *mut GpPlanCosts) -> GpStatus {
    guard(|| {
        let s = &handle(study, "study")?.0;
        let choice = match variant {
            GpVariant::Ci => VariantChoice::Ci,
            GpVariant::Traditional => VariantChoice::Traditional,
            GpVariant::Both => VariantChoice::Both,
        };
        let r = cli::plan(s, choice, s.config.tep.case).map_err(from_cli)?;
        if let Some(c) = costs.as_mut() {
            let sol = &r.outcomes[0].solution;
            *c = GpPlanCosts {
                transmission_investment: sol.cap_cost,
                generation: sol.op_cost,
                built_lines: sol.plan.lines.len(),
            };
        }
        Ok(())
    })
}

/// Commitment on every typical day of every configured case.
///
/// # Safety
/// `study` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gp_study_simulate(study: *const GpStudy) -> GpStatus {
    guard(|| {
        let s = &handle(study, "study")?.0;
        cli::simulate(s, &s.config.cases).map_err(from_cli)?.into_result().map_err(from_cli)
    })
}

/// Reliability reports for every configured case from the simulation files.
/// `result`, if not null, receives the indices of `cases[case_index]` in
/// `epoch`.
///
/// # Safety
/// `study` must be a live handle; `result` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gp_study_evaluate(
    study: *const GpStudy,
    case_index: usize,
    epoch: usize,
    result: *mut GpReliability,
) -> GpStatus {
    guard(|| {
        let s = &handle(study, "study")?.0;
        let r = cli::evaluate(s, &s.config.cases).map_err(from_cli)?;
        if let Some(dst) = result.as_mut() {
            let rep = r.reports.get(case_index).ok_or_else(|| invalid(format!("no case at index {case_index}")))?;
            let e = rep
                .epochs
                .iter()
                .find(|e| e.epoch == epoch)
                .ok_or_else(|| invalid(format!("no epoch {epoch} for {}", rep.case)))?;
            *dst = GpReliability {
                eue_mwh: e.eue_mwh,
                lolp: e.lolp,
                lole_hours_per_bus: e.lole_hours_per_bus,
            };
        }
        Ok(())
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_a_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, GpStatus::Panic);
        let msg = unsafe { CStr::from_ptr(gp_last_error()) }.to_str().unwrap();
        assert!(msg.contains("boom"), "{msg}");
    }

    #[test]
    fn cli_errors_keep_their_class() {
        assert_eq!(from_cli(CliError::Io("x".into())).0, GpStatus::Io);
        assert_eq!(from_cli(CliError::Usage("x".into())).0, GpStatus::InvalidArgument);
        assert_eq!(from_cli(CliError::Infeasible("x".into())).0, GpStatus::Infeasible);
        assert_eq!(from_cli(CliError::Coverage("x".into())).0, GpStatus::Coverage);
    }

    #[test]
    fn interior_nul_does_not_lose_the_message() {
        set_error("a\0b".into());
        let msg = unsafe { CStr::from_ptr(gp_last_error()) }.to_str().unwrap();
        assert_eq!(msg, "a b");
    }
}
