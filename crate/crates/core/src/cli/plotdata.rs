//! Tidy `x,series,value` tables behind the study figures.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use chrono::Datelike;

use super::commands::{read_day_shed, Study};
use super::CliError;
use crate::grid::{Case, DayType, RenewableKind};
use crate::profiles::{line_rating_at, WeatherSeries};
use crate::util::{fmt_f64, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// Monthly-mean dynamic rating per line.
    Ratings,
    /// Representative wind output per plant, epoch and quarter.
    Wind,
    Solar,
    /// Representative load, system total or one bus.
    Load,
    /// Largest daily shed energy per epoch and quarter.
    Shedding,
}

impl Figure {
    pub const ALL: [Figure; 5] = [Figure::Ratings, Figure::Wind, Figure::Solar, Figure::Load, Figure::Shedding];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Ratings => "ratings",
            Figure::Wind => "wind",
            Figure::Solar => "solar",
            Figure::Load => "load",
            Figure::Shedding => "shedding",
        }
    }

    pub fn from_name(s: &str) -> Result<Self, CliError> {
        Figure::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Figure::ALL.iter().map(|f| f.name()).collect();
            CliError::Usage(format!("unknown figure {s:?}; valid figures: {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct PlotOptions {
    pub line: Option<String>,
    pub plant: Option<String>,
    pub bus: Option<String>,
    pub cases: Vec<Case>,
}

struct Table {
    text: String,
    rows: usize,
}

impl Table {
    fn new() -> Self {
        Table {
            text: String::from("x,series,value\n"),
            rows: 0,
        }
    }

    fn push(&mut self, x: &str, series: &str, v: f64) {
        let _ = writeln!(self.text, "{x},{series},{}", fmt_f64(v));
        self.rows += 1;
    }
}

fn hour(t: usize, dt: f64) -> String {
    fmt_f64(t as f64 * dt)
}

fn ratings(study: &Study, opts: &PlotOptions, t: &mut Table) -> Result<(), CliError> {
    let grid = study.full_grid()?;
    let lines: Vec<_> = match &opts.line {
        Some(id) => {
            let l = grid
                .lines
                .iter()
                .find(|l| &l.id == id)
                .ok_or_else(|| CliError::Usage(format!("unknown line {id}")))?;
            vec![l]
        }
        None => grid.lines.iter().collect(),
    };
    let path = study
        .config
        .paths
        .weather
        .as_ref()
        .ok_or_else(|| CliError::Usage("paths.weather is required for the ratings figure".into()))?;
    let weather = WeatherSeries::from_csv(path)?;
    let h = &grid.horizon;
    let years = h.start_year..h.start_year + (h.num_epochs * h.years_per_epoch) as i32;
    let policy = study.config.profiles.policy;
    for l in lines {
        let mut months: BTreeMap<(i32, u32), (f64, usize)> = BTreeMap::new();
        for s in weather.samples(&l.from_bus) {
            let ts = s.timestamp;
            if !years.contains(&ts.year()) || weather.get(&l.to_bus, ts).is_none() {
                continue;
            }
            let r = line_rating_at(l, &weather, ts, policy)?;
            let e = months.entry((ts.year(), ts.month())).or_insert((0.0, 0));
            e.0 += r;
            e.1 += 1;
        }
        for ((y, m), (sum, n)) in months {
            t.push(&format!("{y}-{m:02}"), &l.id, sum / n as f64);
        }
    }
    Ok(())
}

fn renewables(study: &Study, kind: RenewableKind, opts: &PlotOptions, t: &mut Table) -> Result<(), CliError> {
    let grid = study.full_grid()?;
    let profiles = study.profiles()?;
    let dt = grid.horizon.interval_hours;
    let plants: Vec<_> = grid
        .renewables
        .iter()
        .filter(|r| r.kind == kind && opts.plant.as_ref().is_none_or(|p| p == &r.id))
        .collect();
    if let Some(p) = &opts.plant {
        if plants.is_empty() {
            return Err(CliError::Usage(format!("no {kind:?} plant named {p}").to_lowercase()));
        }
    }
    for r in plants {
        for ((id, p, q), v) in profiles.renewable_max.range((r.id.clone(), 0, 0)..) {
            if id != &r.id {
                break;
            }
            for (k, x) in v.iter().enumerate() {
                t.push(&hour(k, dt), &format!("{id} E{p} Q{q}"), *x);
            }
        }
    }
    Ok(())
}

fn load(study: &Study, opts: &PlotOptions, t: &mut Table) -> Result<(), CliError> {
    let profiles = study.profiles()?;
    let dt = study.grid.horizon.interval_hours;
    if let Some(b) = &opts.bus {
        if !study.grid.buses.iter().any(|x| &x.id == b) {
            return Err(CliError::Usage(format!("unknown bus {b}")));
        }
    }
    let mut total: BTreeMap<(usize, usize, DayType), Vec<f64>> = BTreeMap::new();
    for ((bus, p, q, d), v) in &profiles.load {
        if opts.bus.as_ref().is_some_and(|b| b != bus) {
            continue;
        }
        let acc = total.entry((*p, *q, *d)).or_insert_with(|| vec![0.0; v.len()]);
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    let label = opts.bus.as_ref().map_or_else(|| "system".to_string(), |b| format!("bus {b}"));
    for ((p, q, d), v) in total {
        for (k, x) in v.iter().enumerate() {
            t.push(&hour(k, dt), &format!("{label} E{p} Q{q} {d}"), *x);
        }
    }
    Ok(())
}

fn shedding(study: &Study, opts: &PlotOptions, t: &mut Table) -> Result<(), CliError> {
    for &case in &opts.cases {
        let mut worst: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (p, q, _, shed) in read_day_shed(study, case)? {
            let e = worst.entry((p, q)).or_insert(0.0);
            *e = e.max(shed);
        }
        for ((p, q), v) in worst {
            t.push(&format!("E{p} Q{q}"), case.as_str(), v);
        }
    }
    Ok(())
}

/// CSV text of one figure and its row count.
pub fn plot_data(study: &Study, figure: Figure, opts: &PlotOptions) -> Result<(String, usize), CliError> {
    let mut t = Table::new();
    match figure {
        Figure::Ratings => ratings(study, opts, &mut t)?,
        Figure::Wind => renewables(study, RenewableKind::Wind, opts, &mut t)?,
        Figure::Solar => renewables(study, RenewableKind::Solar, opts, &mut t)?,
        Figure::Load => load(study, opts, &mut t)?,
        Figure::Shedding => shedding(study, opts, &mut t)?,
    }
    Ok((t.text, t.rows))
}

pub(crate) fn write_plot(study: &Study, figure: Figure, opts: &PlotOptions, path: &Path) -> Result<usize, CliError> {
    let (text, n) = plot_data(study, figure, opts)?;
    write_atomic(path, text.as_bytes()).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(n)
}
