use std::collections::BTreeMap;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Weekday};
use rayon::prelude::*;

use super::physics::{
    dynamic_rating, extrapolate_wind_speed, solar_power, wind_power, DlrParams, SolarPanel, TerminalPolicy,
    WindCurve,
};
use super::series::{line_weather, LoadSeries, WeatherSeries};
use super::{ProfileError, ProfileSet, WEATHER_WIND_HEIGHT_M};
use crate::grid::{DayType, GridModel, Line, PlanningHorizon, RenewableKind, RenewablePlant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub policy: TerminalPolicy,
    /// When false, slabs are averaged over whatever complete days exist and
    /// slabs without any are left out instead of failing.
    pub require_full_coverage: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            policy: TerminalPolicy::Conservative,
            require_full_coverage: true,
        }
    }
}

pub fn day_timestamps(date: NaiveDate, horizon: &PlanningHorizon) -> Vec<NaiveDateTime> {
    let midnight = date.and_hms_opt(0, 0, 0).expect("midnight exists");
    let step_min = (horizon.interval_hours * 60.0).round() as i64;
    (0..horizon.intervals_per_day as i64)
        .map(|k| midnight + Duration::minutes(k * step_min))
        .collect()
}

fn quarter_dates(h: &PlanningHorizon, epoch: usize, quarter: usize) -> Vec<NaiveDate> {
    let mut out = Vec::new();
    for y in h.epoch_years(epoch) {
        for m in (3 * quarter as u32 - 2)..=(3 * quarter as u32) {
            let mut d = NaiveDate::from_ymd_opt(y, m, 1).expect("valid month start");
            while d.month() == m {
                out.push(d);
                d = d.succ_opt().expect("date in range");
            }
        }
    }
    out
}

fn day_type(d: NaiveDate) -> DayType {
    match d.weekday() {
        Weekday::Sat | Weekday::Sun => DayType::Weekend,
        _ => DayType::Weekday,
    }
}

/// Instantaneous dynamic rating (MVA) of `line` at `t`.
pub fn line_rating_at(
    line: &Line,
    weather: &WeatherSeries,
    t: NaiveDateTime,
    policy: TerminalPolicy,
) -> Result<f64, ProfileError> {
    let missing = |b: &str| ProfileError::Coverage(vec![format!("weather location {b} at {t}")]);
    let a = weather.get(&line.from_bus, t).ok_or_else(|| missing(&line.from_bus))?;
    let b = weather.get(&line.to_bus, t).ok_or_else(|| missing(&line.to_bus))?;
    let w = line_weather(a, b, policy)?;
    dynamic_rating(
        &w,
        &DlrParams {
            base_rating: line.static_rating_mva,
            coeffs: line.dlr(),
        },
    )
}

/// Instantaneous available output (MW) of `plant` at `t`.
pub fn renewable_output_at(plant: &RenewablePlant, weather: &WeatherSeries, t: NaiveDateTime) -> Result<f64, ProfileError> {
    let s = weather
        .get(&plant.bus, t)
        .ok_or_else(|| ProfileError::Coverage(vec![format!("weather location {} at {t}", plant.bus)]))?;
    match plant.kind {
        RenewableKind::Wind => {
            let v = extrapolate_wind_speed(s.wind_speed_10m, WEATHER_WIND_HEIGHT_M, plant.hub_height_m, plant.roughness_m)?;
            wind_power(
                v,
                &WindCurve {
                    cut_in: plant.cut_in_mps,
                    rated: plant.rated_mps,
                    cut_out: plant.cut_out_mps,
                    capacity: plant.capacity_mw,
                },
            )
        }
        RenewableKind::Solar => solar_power(
            s.shortwave,
            s.longwave,
            &SolarPanel {
                capacity: plant.capacity_mw,
                f_sw: plant.f_sw,
                f_lw: plant.f_lw,
                g_ref: plant.g_ref,
            },
        ),
    }
}

/// Running per-interval sum with the range of the summed values.
struct Acc {
    sum: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    n: usize,
}

impl Acc {
    fn new(t: usize) -> Self {
        Acc {
            sum: vec![0.0; t],
            lo: vec![f64::INFINITY; t],
            hi: vec![f64::NEG_INFINITY; t],
            n: 0,
        }
    }

    fn add_day(&mut self, values: &[f64]) {
        for (k, &v) in values.iter().enumerate() {
            self.sum[k] += v;
            self.lo[k] = self.lo[k].min(v);
            self.hi[k] = self.hi[k].max(v);
        }
        self.n += 1;
    }

    /// Mean clamped into the observed range (guards against rounding).
    fn finish(self) -> Option<Vec<f64>> {
        if self.n == 0 {
            return None;
        }
        let n = self.n as f64;
        Some(
            self.sum
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .map(|(s, (lo, hi))| (s / n).clamp(*lo, *hi))
                .collect(),
        )
    }
}

fn day_complete_weather(w: &WeatherSeries, loc: &str, ts: &[NaiveDateTime]) -> bool {
    ts.iter().all(|t| w.get(loc, *t).is_some())
}

fn day_complete_load(l: &LoadSeries, key: &str, ts: &[NaiveDateTime]) -> bool {
    ts.iter().all(|t| l.get(key, *t).is_some())
}

fn spans(dates: &[NaiveDate]) -> Vec<(NaiveDate, NaiveDate)> {
    let mut out: Vec<(NaiveDate, NaiveDate)> = Vec::new();
    for &d in dates {
        match out.last_mut() {
            Some((_, end)) if end.succ_opt() == Some(d) => *end = d,
            _ => out.push((d, d)),
        }
    }
    out
}

type SlabOut = (
    usize,
    usize,
    Vec<(String, Vec<f64>)>,
    Vec<(String, Vec<f64>)>,
    Vec<(String, DayType, Vec<f64>)>,
);

/// Average every model output over identical intervals of all days of each
/// quarter within each epoch. Loads are averaged separately for weekdays and
/// weekends; ratings and renewables use all days.
pub fn build_representative(
    weather: &WeatherSeries,
    load: &LoadSeries,
    grid: &GridModel,
    options: &BuildOptions,
) -> Result<ProfileSet, ProfileError> {
    let h = &grid.horizon;
    for (what, step) in [("weather", weather.step_hours), ("load", load.step_hours)] {
        if (step - h.interval_hours).abs() > 1e-9 {
            return Err(ProfileError::StepMismatch {
                what,
                expected: h.interval_hours,
                found: step,
            });
        }
    }
    let mut locations: Vec<&str> = grid
        .lines
        .iter()
        .flat_map(|l| [l.from_bus.as_str(), l.to_bus.as_str()])
        .chain(grid.renewables.iter().map(|r| r.bus.as_str()))
        .collect();
    locations.sort_unstable();
    locations.dedup();
    let mut load_keys: Vec<&str> = grid.buses.iter().map(|b| b.load_key()).collect();
    load_keys.sort_unstable();
    load_keys.dedup();

    let slabs: Vec<(usize, usize)> = (1..=h.num_epochs)
        .flat_map(|p| (1..=PlanningHorizon::QUARTERS).map(move |q| (p, q)))
        .collect();

    // Days usable per slab, plus named gaps.
    let mut usable: BTreeMap<(usize, usize), Vec<NaiveDate>> = BTreeMap::new();
    let mut missing: BTreeMap<String, Vec<NaiveDate>> = BTreeMap::new();
    for &(p, q) in &slabs {
        let mut days = Vec::new();
        for d in quarter_dates(h, p, q) {
            let ts = day_timestamps(d, h);
            let mut ok = true;
            for loc in &locations {
                if !day_complete_weather(weather, loc, &ts) {
                    missing.entry(format!("weather location {loc}")).or_default().push(d);
                    ok = false;
                }
            }
            for k in &load_keys {
                if !day_complete_load(load, k, &ts) {
                    missing.entry(format!("load bus {k}")).or_default().push(d);
                    ok = false;
                }
            }
            if ok {
                days.push(d);
            }
        }
        usable.insert((p, q), days);
    }
    if options.require_full_coverage && !missing.is_empty() {
        let mut gaps = Vec::new();
        for (what, mut dates) in missing {
            dates.sort_unstable();
            dates.dedup();
            for (a, b) in spans(&dates) {
                gaps.push(if a == b {
                    format!("{what}: {a}")
                } else {
                    format!("{what}: {a} to {b}")
                });
            }
        }
        return Err(ProfileError::Coverage(gaps));
    }

    let t_count = h.intervals_per_day;
    let results: Vec<Result<Option<SlabOut>, ProfileError>> = slabs
        .par_iter()
        .map(|&(p, q)| {
            let days = &usable[&(p, q)];
            if days.is_empty() {
                return Ok(None);
            }
            let stamps: Vec<Vec<NaiveDateTime>> = days.iter().map(|d| day_timestamps(*d, h)).collect();
            let mut ratings = Vec::with_capacity(grid.lines.len());
            for l in &grid.lines {
                let mut acc = Acc::new(t_count);
                for ts in &stamps {
                    let v: Result<Vec<f64>, _> =
                        ts.iter().map(|t| line_rating_at(l, weather, *t, options.policy)).collect();
                    acc.add_day(&v?);
                }
                ratings.push((l.id.clone(), acc.finish().expect("days nonempty")));
            }
            let mut ren = Vec::with_capacity(grid.renewables.len());
            for r in &grid.renewables {
                let mut acc = Acc::new(t_count);
                for ts in &stamps {
                    let v: Result<Vec<f64>, _> = ts.iter().map(|t| renewable_output_at(r, weather, *t)).collect();
                    acc.add_day(&v?);
                }
                ren.push((r.id.clone(), acc.finish().expect("days nonempty")));
            }
            let mut loads = Vec::new();
            for b in &grid.buses {
                let growth = grid.load_growth(b, p);
                for dt in DayType::ALL {
                    let mut acc = Acc::new(t_count);
                    for (d, ts) in days.iter().zip(&stamps) {
                        if day_type(*d) != dt {
                            continue;
                        }
                        let v: Vec<f64> = ts
                            .iter()
                            .map(|t| load.get(b.load_key(), *t).expect("coverage checked") * growth)
                            .collect();
                        acc.add_day(&v);
                    }
                    if let Some(v) = acc.finish() {
                        loads.push((b.id.clone(), dt, v));
                    }
                }
            }
            Ok(Some((p, q, ratings, ren, loads)))
        })
        .collect();

    let mut set = ProfileSet {
        intervals: t_count,
        ..Default::default()
    };
    for r in results {
        let Some((p, q, ratings, ren, loads)) = r? else {
            continue;
        };
        for (id, v) in ratings {
            set.line_rating.insert((id, p, q), v);
        }
        for (id, v) in ren {
            set.renewable_max.insert((id, p, q), v);
        }
        for (id, d, v) in loads {
            set.load.insert((id, p, q, d), v);
        }
    }
    Ok(set)
}
