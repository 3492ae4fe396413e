use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use super::config::{StudyConfig, VariantChoice};
use super::{CliError, ModelKind, Overrides};
use crate::grid::{
    case_views, load_grid, with_generation, BuildPlan, Case, DayType, EpochView, GenerationPlan, GridError,
    GridModel, LineBuild,
};
use crate::milp::mps::to_mps_string;
use crate::milp::{MilpError, SolveStatus};
use crate::profiles::{
    build_representative, export_profiles, import_profiles_with, LoadSeries, ProfileError, ProfileSet, WeatherSeries,
};
use crate::reliability::{
    check_record_coverage, compare_cases, read_shedding_records, report, write_reports, Comparison, Demand,
    ReliabilityError, ReliabilityReport,
};
use crate::scuc::{
    build_scuc, run_batch, write_batch_results, BatchResults, ScucError, ScucInstance, DAY_FILE_SUFFIX,
    INTERVAL_FILE_SUFFIX,
};
use crate::tep::{
    build_tep, capital_cost, diagnose_infeasibility, evaluate_plan, solve_tep, PlanFile, TepError, TepInstance,
    TepSolution, Variant,
};
use crate::util::{fmt_f64, write_atomic};

pub const PLAN_FILE: &str = "plan.json";
pub const COMPARISON_PLAN_FILE: &str = "plan_comparison.csv";
const PROFILE_DIR: &str = "profiles";

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::Coverage(_) => CliError::Coverage(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<TepError> for CliError {
    fn from(e: TepError) -> Self {
        match e {
            TepError::Grid(g) => g.into(),
            TepError::Profile(p) => p.into(),
            TepError::Invalid(_) => CliError::Usage(e.to_string()),
            TepError::Milp(MilpError::Io(_)) => CliError::Io(e.to_string()),
            TepError::Milp(_) | TepError::Status(_) | TepError::Internal(_) => CliError::Infeasible(e.to_string()),
        }
    }
}

impl From<ScucError> for CliError {
    fn from(e: ScucError) -> Self {
        match e {
            ScucError::Invalid(_) => CliError::Usage(e.to_string()),
            _ => CliError::Infeasible(e.to_string()),
        }
    }
}

impl From<ReliabilityError> for CliError {
    fn from(e: ReliabilityError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("cannot write {}: {e}", path.display()))
}

/// A loaded study: configuration with overrides applied, the base grid
/// and the generation-investment plan.
#[derive(Debug, Clone)]
pub struct Study {
    pub config: StudyConfig,
    pub grid: GridModel,
    pub gen_plan: GenerationPlan,
}

impl Study {
    pub fn open(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = StudyConfig::from_file(path)?;
        let o = overrides;
        let p = &mut cfg.paths;
        for (dst, src) in [(&mut p.weather, &o.weather), (&mut p.load, &o.load), (&mut p.generation, &o.generation)] {
            if let Some(s) = src {
                *dst = Some(s.clone());
            }
        }
        if let Some(g) = &o.grid {
            p.grid = g.clone();
        }
        if let Some(out) = &o.output {
            p.output = out.clone();
        }
        if let Some(pol) = o.policy {
            cfg.profiles.policy = pol;
        }
        if let Some(t) = o.theta_bound {
            cfg.tep.theta_bound = t;
        }
        if let Some(s) = o.shed_penalty {
            cfg.scuc.shed_penalty = s;
        }
        if let Some(r) = o.reserve_required {
            cfg.scuc.reserve_required = r;
        }
        for s in [&mut cfg.tep.solver, &mut cfg.scuc.solver] {
            if o.time_limit.is_some() {
                s.time_limit = o.time_limit;
            }
            if o.node_limit.is_some() {
                s.node_limit = o.node_limit;
            }
        }
        Study::from_config(cfg)
    }

    pub fn from_config(config: StudyConfig) -> Result<Self, CliError> {
        let problems = config.problems();
        if !problems.is_empty() {
            return Err(CliError::Usage(format!("invalid configuration:\n  {}", problems.join("\n  "))));
        }
        let mut grid = load_grid(&config.paths.grid)?;
        config.profiles.apply(&mut grid);
        grid.validate()?;
        let gen_plan = match &config.paths.generation {
            Some(p) => GenerationPlan::load(p)?,
            None => GenerationPlan::default(),
        };
        let study = Study {
            config,
            grid,
            gen_plan,
        };
        let full = study.full_grid()?;
        for id in &study.config.scuc.initially_on {
            if !full.generators.iter().any(|g| &g.id == id) {
                return Err(CliError::Usage(format!("scuc.initially_on names unknown unit {id}")));
            }
        }
        Ok(study)
    }

    pub fn output(&self) -> &Path {
        &self.config.paths.output
    }

    pub fn profile_dir(&self) -> PathBuf {
        self.output().join(PROFILE_DIR)
    }

    pub fn plan_path(&self) -> PathBuf {
        self.output().join(PLAN_FILE)
    }

    /// Grid with every generation investment added.
    pub fn full_grid(&self) -> Result<GridModel, CliError> {
        Ok(with_generation(&self.grid, &self.gen_plan)?)
    }

    /// Fleet the planning model sees for `case`.
    pub fn planning_grid(&self, case: Case) -> Result<GridModel, CliError> {
        match case {
            Case::FR => Ok(self.grid.clone()),
            Case::FGI => self.full_grid(),
            Case::FGTI => Err(CliError::Usage("plans are made for the FR or FGI fleet".into())),
        }
    }

    pub fn profiles(&self) -> Result<ProfileSet, CliError> {
        let dir = self.profile_dir();
        if !dir.is_dir() {
            return Err(CliError::Usage(format!("no profiles in {}; run synth first", dir.display())));
        }
        Ok(import_profiles_with(&dir, &self.grid.horizon, self.config.profiles.require_full_coverage)?)
    }

    pub fn load_plan(&self) -> Result<BuildPlan, CliError> {
        let p = self.plan_path();
        if !p.is_file() {
            return Err(CliError::Usage(format!("FGTI needs a plan file; {} is missing (run plan first)", p.display())));
        }
        PlanFile::load(&p).map(|f| f.build_plan()).map_err(CliError::from)
    }

    pub fn views(&self, case: Case) -> Result<Vec<EpochView>, CliError> {
        let plan = if case == Case::FGTI { Some(self.load_plan()?) } else { None };
        Ok(case_views(&self.grid, case, &self.gen_plan, plan.as_ref())?)
    }

    fn tep_instance(&self, grid: GridModel, profiles: ProfileSet, variant: Variant) -> TepInstance {
        let t = &self.config.tep;
        TepInstance {
            grid,
            profiles,
            variant,
            theta_bound: t.theta_bound,
            shed_allowed: t.shed_allowed,
            shed_penalty: t.shed_penalty,
        }
    }
}

pub fn case_prefix(case: Case) -> String {
    format!("scuc_{}", case.as_str().to_ascii_lowercase())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSummary {
    pub lines: usize,
    pub renewables: usize,
    pub buses: usize,
    pub epochs: usize,
    pub quarters: usize,
    pub dir: PathBuf,
}

impl fmt::Display for SynthSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "profiles: {} line ratings, {} renewable outputs, {} bus loads x {} epochs x {} quarters -> {}",
            self.lines,
            self.renewables,
            self.buses,
            self.epochs,
            self.quarters,
            self.dir.display()
        )
    }
}

/// Representative profiles for the full fleet, so that new plants have
/// availability series for every case.
pub fn synth(study: &Study) -> Result<SynthSummary, CliError> {
    let paths = &study.config.paths;
    let need = |p: &Option<PathBuf>, key: &str| {
        p.clone().ok_or_else(|| CliError::Usage(format!("paths.{key} is required for synth")))
    };
    let weather = WeatherSeries::from_csv(&need(&paths.weather, "weather")?)?;
    let load = LoadSeries::from_csv(&need(&paths.load, "load")?)?;
    let grid = study.full_grid()?;
    let set = build_representative(&weather, &load, &grid, &study.config.profiles.build_options())?;
    let dir = study.profile_dir();
    export_profiles(&set, &dir)?;
    let slabs = set.slabs();
    let distinct = |f: fn(&(usize, usize)) -> usize| slabs.iter().map(f).collect::<BTreeSet<_>>().len();
    Ok(SynthSummary {
        lines: set.line_rating.keys().map(|k| &k.0).collect::<BTreeSet<_>>().len(),
        renewables: set.renewable_max.keys().map(|k| &k.0).collect::<BTreeSet<_>>().len(),
        buses: set.load.keys().map(|k| &k.0).collect::<BTreeSet<_>>().len(),
        epochs: distinct(|s| s.0),
        quarters: distinct(|s| s.1),
        dir,
    })
}

#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub variant: Variant,
    pub solution: TepSolution,
    pub file: PlanFile,
    /// Built lines with their construction-plus-maintenance cost, $.
    pub line_costs: Vec<(LineBuild, f64)>,
}

/// Traditional plan against the climate-impacted plan, both priced on the
/// climate-impacted profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanComparison {
    pub ci_investment: f64,
    pub traditional_investment: f64,
    pub ci_generation: f64,
    /// `None` when the traditional plan cannot serve the time-varying
    /// conditions.
    pub traditional_generation: Option<f64>,
    /// Generation cost reported by the traditional model itself.
    pub traditional_model_generation: f64,
}

#[derive(Debug, Clone)]
pub struct PlanReport {
    pub case: Case,
    pub outcomes: Vec<PlanOutcome>,
    pub comparison: Option<PlanComparison>,
    pub files: Vec<PathBuf>,
}

fn money(v: f64) -> String {
    format!("{:.2}", v + 0.0)
}

impl fmt::Display for PlanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            writeln!(f, "plan ({} fleet, {} model)", self.case, o.variant.as_str())?;
            if o.line_costs.is_empty() {
                writeln!(f, "  built lines: none")?;
            } else {
                writeln!(f, "  built lines:")?;
                for (b, c) in &o.line_costs {
                    writeln!(f, "    {:<8} epoch {:<3} {:>16} $", b.line_id, b.construction_epoch, money(*c))?;
                }
            }
            let c = &o.file.costs;
            writeln!(f, "  generation cost          {:>18} $", money(c.generation_cost))?;
            writeln!(f, "  transmission investment  {:>18} $", money(c.transmission_investment_cost))?;
            if c.load_shedding_cost > 0.0 {
                writeln!(f, "  load shedding cost       {:>18} $", money(c.load_shedding_cost))?;
            }
            writeln!(f, "  total                    {:>18} $", money(c.total))?;
        }
        if let Some(c) = &self.comparison {
            writeln!(f, "comparison on climate-impacted conditions (ci minus traditional)")?;
            writeln!(
                f,
                "  transmission investment  ci {} $, traditional {} $, delta {} $",
                money(c.ci_investment),
                money(c.traditional_investment),
                money(c.ci_investment - c.traditional_investment)
            )?;
            match c.traditional_generation {
                Some(t) => writeln!(
                    f,
                    "  generation cost          ci {} $, traditional {} $, delta {} $",
                    money(c.ci_generation),
                    money(t),
                    money(c.ci_generation - t)
                )?,
                None => writeln!(
                    f,
                    "  generation cost          ci {} $, traditional plan cannot serve the time-varying conditions",
                    money(c.ci_generation)
                )?,
            }
        }
        for p in &self.files {
            writeln!(f, "wrote {}", p.display())?;
        }
        Ok(())
    }
}

fn comparison_csv(c: &PlanComparison) -> String {
    let opt = |v: Option<f64>| v.map_or_else(String::new, fmt_f64);
    let mut s = String::from("metric,ci,traditional,ci_minus_traditional\n");
    s += &format!(
        "transmission_investment_cost,{},{},{}\n",
        fmt_f64(c.ci_investment),
        fmt_f64(c.traditional_investment),
        fmt_f64(c.ci_investment - c.traditional_investment)
    );
    s += &format!(
        "generation_cost,{},{},{}\n",
        fmt_f64(c.ci_generation),
        opt(c.traditional_generation),
        opt(c.traditional_generation.map(|t| c.ci_generation - t))
    );
    s += &format!(
        "generation_cost_planning_model,{},{},{}\n",
        fmt_f64(c.ci_generation),
        fmt_f64(c.traditional_model_generation),
        fmt_f64(c.ci_generation - c.traditional_model_generation)
    );
    s
}

fn plan_one(study: &Study, grid: &GridModel, profiles: &ProfileSet, variant: Variant, case: Case) -> Result<PlanOutcome, CliError> {
    let inst = study.tep_instance(grid.clone(), profiles.clone(), variant);
    let cfg = study.config.tep.solver.to_config();
    let sol = match solve_tep(&inst, &cfg) {
        Ok(s) => s,
        Err(TepError::Status(SolveStatus::Infeasible)) => {
            let msg = match diagnose_infeasibility(&inst, &cfg)? {
                Some(u) => format!(
                    "no feasible {} plan for the {case} fleet: epoch {} quarter {} ({}) cannot be served even with every candidate line built",
                    variant.as_str(),
                    u.epoch,
                    u.quarter,
                    u.day
                ),
                None => format!("no feasible {} plan for the {case} fleet", variant.as_str()),
            };
            return Err(CliError::Infeasible(msg));
        }
        Err(e) => return Err(e.into()),
    };
    let line_costs = sol
        .plan
        .lines
        .iter()
        .map(|b| (b.clone(), capital_cost(&BuildPlan { lines: vec![b.clone()] }, grid)))
        .collect();
    Ok(PlanOutcome {
        variant,
        file: PlanFile::from_solution(&sol, variant),
        solution: sol,
        line_costs,
    })
}

/// Solve the requested variants. The first one is written as the plan the
/// later stages use; each also goes to `plan_<variant>.json`.
pub fn plan(study: &Study, choice: VariantChoice, case: Case) -> Result<PlanReport, CliError> {
    let grid = study.planning_grid(case)?;
    let profiles = study.profiles()?;
    let mut outcomes = Vec::new();
    for v in choice.variants() {
        outcomes.push(plan_one(study, &grid, &profiles, v, case)?);
    }
    let comparison = if choice == VariantChoice::Both {
        let ci = &outcomes[0];
        let tr = &outcomes[1];
        let inst = study.tep_instance(grid.clone(), profiles.clone(), Variant::Ci);
        let realised = match evaluate_plan(&inst, &tr.solution.plan, &study.config.tep.solver.to_config()) {
            Ok(s) => Some(s.op_cost),
            Err(TepError::Status(SolveStatus::Infeasible)) => None,
            Err(e) => return Err(e.into()),
        };
        Some(PlanComparison {
            ci_investment: ci.solution.cap_cost,
            traditional_investment: tr.solution.cap_cost,
            ci_generation: ci.solution.op_cost,
            traditional_generation: realised,
            traditional_model_generation: tr.solution.op_cost,
        })
    } else {
        None
    };
    let mut files = Vec::new();
    let mut save = |path: PathBuf, f: &PlanFile| -> Result<(), CliError> {
        f.save(&path).map_err(|e| io_err(&path, e))?;
        files.push(path);
        Ok(())
    };
    save(study.plan_path(), &outcomes[0].file)?;
    for o in &outcomes {
        save(study.output().join(format!("plan_{}.json", o.variant.as_str())), &o.file)?;
    }
    if let Some(c) = &comparison {
        let p = study.output().join(COMPARISON_PLAN_FILE);
        write_atomic(&p, comparison_csv(c).as_bytes()).map_err(|e| io_err(&p, e))?;
        files.push(p);
    }
    Ok(PlanReport {
        case,
        outcomes,
        comparison,
        files,
    })
}

#[derive(Debug)]
pub struct SimulateOutcome {
    pub results: Vec<(Case, BatchResults)>,
    pub files: Vec<PathBuf>,
}

impl SimulateOutcome {
    pub fn failures(&self) -> Vec<String> {
        self.results
            .iter()
            .flat_map(|(c, r)| r.failures().map(move |(k, e)| format!("{c} epoch {} quarter {} {}: {e}", k.0, k.1, k.2)))
            .collect()
    }

    pub fn into_result(self) -> Result<(), CliError> {
        let f = self.failures();
        if f.is_empty() {
            Ok(())
        } else {
            Err(CliError::Infeasible(format!("{} typical day(s) failed:\n  {}", f.len(), f.join("\n  "))))
        }
    }

    /// Shed energy per epoch of one case, MWh per simulated typical-day set.
    pub fn shed_by_epoch(&self, case: Case) -> Vec<(usize, f64)> {
        let Some((_, r)) = self.results.iter().find(|(c, _)| *c == case) else {
            return Vec::new();
        };
        let mut out: Vec<(usize, f64)> = Vec::new();
        for (&(p, _, _), d) in &r.days {
            let shed = d.outcome.as_ref().map_or(0.0, |s| s.total_shed_mwh(r.interval_hours));
            match out.last_mut() {
                Some((q, v)) if *q == p => *v += shed,
                _ => out.push((p, shed)),
            }
        }
        out
    }
}

impl fmt::Display for SimulateOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (case, r) in &self.results {
            writeln!(f, "{case}: {} typical days", r.days.len())?;
            writeln!(f, "  epoch  solved  operating cost $   shed MWh")?;
            let epochs: BTreeSet<usize> = r.days.keys().map(|k| k.0).collect();
            for p in epochs {
                let days: Vec<_> = r.days.iter().filter(|(k, _)| k.0 == p).collect();
                let ok: Vec<_> = days.iter().filter_map(|(_, d)| d.outcome.as_ref().ok()).collect();
                let cost: f64 = ok.iter().map(|s| s.operating_cost).fold(0.0, |a, x| a + x);
                let shed: f64 = ok.iter().map(|s| s.total_shed_mwh(r.interval_hours)).fold(0.0, |a, x| a + x);
                writeln!(f, "  {p:<5}  {:>2}/{:<3}  {:>16}  {:>9.3}", ok.len(), days.len(), money(cost), shed + 0.0)?;
            }
        }
        for fl in self.failures() {
            writeln!(f, "failed: {fl}")?;
        }
        for p in &self.files {
            writeln!(f, "wrote {}", p.display())?;
        }
        Ok(())
    }
}

/// Unit commitment on every typical day for each case. All days are
/// attempted; failures are reported by [`SimulateOutcome::into_result`].
pub fn simulate(study: &Study, cases: &[Case]) -> Result<SimulateOutcome, CliError> {
    // Resolve every case first so a missing plan fails before any solve.
    let views: Vec<(Case, Vec<EpochView>)> = cases.iter().map(|&c| Ok((c, study.views(c)?))).collect::<Result<_, CliError>>()?;
    let profiles = study.profiles()?;
    let opts = study.config.scuc.options();
    let cfg = study.config.scuc.solver.to_config();
    let mut results = Vec::new();
    let mut files = Vec::new();
    for (case, v) in views {
        let r = run_batch(&v, &profiles, &opts, &cfg);
        let prefix = case_prefix(case);
        let stale = study.output().join(format!("{prefix}_failures.csv"));
        if stale.exists() {
            std::fs::remove_file(&stale).map_err(|e| io_err(&stale, e))?;
        }
        files.extend(write_batch_results(&r, study.output(), &prefix).map_err(|e| io_err(study.output(), e))?);
        results.push((case, r));
    }
    Ok(SimulateOutcome { results, files })
}

#[derive(Debug, Clone)]
pub struct EvaluateOutcome {
    pub reports: Vec<ReliabilityReport>,
    pub comparison: Comparison,
    pub files: Vec<PathBuf>,
}

impl fmt::Display for EvaluateOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<6} {:<20}", "epoch", "metric")?;
        for c in &self.comparison.cases {
            write!(f, " {c:>14}")?;
        }
        writeln!(f)?;
        for row in &self.comparison.rows {
            write!(f, "{:<6} {:<20}", row.epoch, row.metric)?;
            for v in &row.values {
                write!(f, " {:>14.6}", v + 0.0)?;
            }
            writeln!(f)?;
        }
        for p in &self.files {
            writeln!(f, "wrote {}", p.display())?;
        }
        Ok(())
    }
}

/// Reliability indices from the interval result files of each case.
pub fn evaluate(study: &Study, cases: &[Case]) -> Result<EvaluateOutcome, CliError> {
    let profiles = study.profiles()?;
    let h = &study.grid.horizon;
    let nb = study.grid.buses.len();
    let mut reports = Vec::new();
    for &case in cases {
        let prefix = case_prefix(case);
        let path = study.output().join(format!("{prefix}{INTERVAL_FILE_SUFFIX}"));
        if !path.is_file() {
            return Err(CliError::Usage(format!("{} is missing; run simulate for {case} first", path.display())));
        }
        let failed = study.output().join(format!("{prefix}_failures.csv"));
        if failed.is_file() {
            return Err(CliError::Usage(format!(
                "{case} results are incomplete (see {}); re-run simulate",
                failed.display()
            )));
        }
        let records = read_shedding_records(&path)?;
        let epochs: BTreeSet<usize> = records.iter().map(|r| r.epoch).collect();
        if let Some(p) = epochs.iter().find(|p| **p == 0 || **p > h.num_epochs) {
            return Err(CliError::Usage(format!("{} has epoch {p} outside the study horizon", path.display())));
        }
        let demand: Demand = profiles
            .load
            .iter()
            .filter(|(k, _)| epochs.contains(&k.1))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        check_record_coverage(case.as_str(), &records, &demand)?;
        reports.push(report(case.as_str(), &records, &demand, h, nb)?);
    }
    let comparison = compare_cases(&reports)?;
    let files = write_reports(&reports, &comparison, study.output()).map_err(|e| io_err(study.output(), e))?;
    Ok(EvaluateOutcome {
        reports,
        comparison,
        files,
    })
}

/// Day-level summary rows `(epoch, quarter, day, total_shed_mwh)` of one case.
pub(crate) fn read_day_shed(study: &Study, case: Case) -> Result<Vec<(usize, usize, DayType, f64)>, CliError> {
    let path = study.output().join(format!("{}{DAY_FILE_SUFFIX}", case_prefix(case)));
    let mut rdr = csv::Reader::from_path(&path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}; run simulate for {case} first", path.display())))?;
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let bad = |m: String| CliError::Usage(format!("{} row {}: {m}", path.display(), i + 2));
        let row = row.map_err(|e| bad(e.to_string()))?;
        if row.len() != 6 {
            return Err(bad(format!("expected 6 fields, found {}", row.len())));
        }
        let p = row[0].parse().map_err(|_| bad(format!("bad epoch {:?}", &row[0])))?;
        let q = row[1].parse().map_err(|_| bad(format!("bad quarter {:?}", &row[1])))?;
        let d: DayType = row[2].parse().map_err(bad)?;
        let shed: f64 = row[5].parse().map_err(|_| bad(format!("bad shed {:?}", &row[5])))?;
        out.push((p, q, d, shed));
    }
    Ok(out)
}

pub(crate) fn mps_export(
    study: &Study,
    model: ModelKind,
    variant: Option<VariantChoice>,
    case: Option<Case>,
    day: (usize, usize, DayType),
    out: Option<PathBuf>,
) -> Result<Vec<PathBuf>, CliError> {
    let profiles = study.profiles()?;
    let mut jobs: Vec<(PathBuf, crate::milp::MilpProblem)> = Vec::new();
    let dir = study.output().join("mps");
    match model {
        ModelKind::Tep => {
            let case = case.unwrap_or(study.config.tep.case);
            let grid = study.planning_grid(case)?;
            let variants = variant.unwrap_or(study.config.tep.variant).variants();
            if out.is_some() && variants.len() > 1 {
                return Err(CliError::Usage("--out takes one model; pick --variant ci or traditional".into()));
            }
            for v in variants {
                let m = build_tep(&study.tep_instance(grid.clone(), profiles.clone(), v))?;
                let path = out.clone().unwrap_or_else(|| dir.join(format!("tep_{}_{}.mps", case.as_str().to_lowercase(), v.as_str())));
                jobs.push((path, m.problem));
            }
        }
        ModelKind::Scuc => {
            let case = case.unwrap_or(study.config.cases[0]);
            let (p, q, d) = day;
            let views = study.views(case)?;
            let view = views
                .iter()
                .find(|v| v.epoch == p)
                .ok_or_else(|| CliError::Usage(format!("epoch {p} is outside the horizon")))?;
            let inst = ScucInstance::from_profiles(view, &profiles, q, d, &study.config.scuc.options())?;
            let m = build_scuc(&inst)?;
            let path = out.unwrap_or_else(|| dir.join(format!("{}_e{p}_q{q}_{d}.mps", case_prefix(case))));
            jobs.push((path, m.problem));
        }
    }
    let mut written = Vec::new();
    for (path, problem) in jobs {
        problem.validate().map_err(|e| CliError::Infeasible(e.to_string()))?;
        write_atomic(&path, to_mps_string(&problem).as_bytes()).map_err(|e| io_err(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_coverage_maps_to_exit_4() {
        let e: CliError = ProfileError::Coverage(vec!["weather location 1: 2021-01-01".into()]).into();
        assert_eq!(e.exit_code(), 4);
        let e: CliError = ProfileError::Invalid("x".into()).into();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn solve_failures_map_to_exit_3() {
        let e: CliError = TepError::Status(SolveStatus::Infeasible).into();
        assert_eq!(e.exit_code(), 3);
        let e: CliError = ScucError::Status(SolveStatus::Limit).into();
        assert_eq!(e.exit_code(), 3);
        let e: CliError = ReliabilityError::HorizonMismatch("a".into()).into();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn comparison_rows_and_blank_for_unservable_plan() {
        let c = PlanComparison {
            ci_investment: 3.0,
            traditional_investment: 1.0,
            ci_generation: 10.0,
            traditional_generation: None,
            traditional_model_generation: 8.0,
        };
        let s = comparison_csv(&c);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[1], "transmission_investment_cost,3,1,2");
        assert_eq!(lines[2], "generation_cost,10,,");
        assert_eq!(lines[3], "generation_cost_planning_model,10,8,2");
    }
}
