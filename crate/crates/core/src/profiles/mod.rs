//! Weather-driven line ratings, renewable availability and load, reduced to
//! one representative day per epoch and quarter.

mod io;
mod physics;
mod representative;
mod series;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::grid::{DayType, GridModel, PlanningHorizon};

pub use io::{export_profiles, import_profiles, import_profiles_with, PROFILE_FILES};
pub use physics::{
    combine_terminals, dynamic_rating, extrapolate_wind_speed, solar_power, wind_power, DlrParams,
    EffectiveWeather, SolarPanel, TerminalPolicy, WindCurve,
};
pub use representative::{
    build_representative, day_timestamps, line_rating_at, renewable_output_at, BuildOptions,
};
pub use series::{format_timestamp, line_weather, LoadSeries, WeatherSample, WeatherSeries};

/// Height of the wind-speed measurement in the weather inputs.
pub const WEATHER_WIND_HEIGHT_M: f64 = 10.0;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path} row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },
    #[error("missing data coverage:\n  {}", .0.join("\n  "))]
    Coverage(Vec<String>),
    #[error("{what} step is {found} h but the horizon uses {expected} h intervals")]
    StepMismatch {
        what: &'static str,
        expected: f64,
        found: f64,
    },
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error("model input: {0}")]
    Model(String),
}

impl ProfileError {
    pub(crate) fn io(path: &Path, e: impl ToString) -> Self {
        ProfileError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    pub(crate) fn parse(path: &Path, row: usize, message: String) -> Self {
        ProfileError::Parse {
            path: path.to_path_buf(),
            row,
            message,
        }
    }
}

/// `(entity, epoch, quarter)`
pub type SlabKey = (String, usize, usize);

/// Representative-day profiles. Ratings (MVA) and renewable availability
/// (MW) have one day per epoch and quarter; loads (MW) are split by day type.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProfileSet {
    pub intervals: usize,
    pub line_rating: BTreeMap<SlabKey, Vec<f64>>,
    pub renewable_max: BTreeMap<SlabKey, Vec<f64>>,
    pub load: BTreeMap<(String, usize, usize, DayType), Vec<f64>>,
}

fn key(id: &str, epoch: usize, quarter: usize) -> SlabKey {
    (id.to_string(), epoch, quarter)
}

impl ProfileSet {
    pub fn rating(&self, line: &str, epoch: usize, quarter: usize) -> Option<&[f64]> {
        self.line_rating.get(&key(line, epoch, quarter)).map(Vec::as_slice)
    }

    pub fn renewable(&self, plant: &str, epoch: usize, quarter: usize) -> Option<&[f64]> {
        self.renewable_max.get(&key(plant, epoch, quarter)).map(Vec::as_slice)
    }

    pub fn bus_load(&self, bus: &str, epoch: usize, quarter: usize, day: DayType) -> Option<&[f64]> {
        self.load
            .get(&(bus.to_string(), epoch, quarter, day))
            .map(Vec::as_slice)
    }

    /// Every (epoch, quarter) slab for which all three quantities exist.
    pub fn slabs(&self) -> Vec<(usize, usize)> {
        let mut s: Vec<(usize, usize)> = self.load.keys().map(|k| (k.1, k.2)).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Check the set covers every line, plant and bus of `grid` for every
    /// epoch and quarter of its horizon.
    pub fn check_coverage(&self, grid: &GridModel) -> Result<(), ProfileError> {
        let h = &grid.horizon;
        let mut gaps = Vec::new();
        if self.intervals != h.intervals_per_day {
            gaps.push(format!(
                "profiles have {} intervals per day, horizon needs {}",
                self.intervals, h.intervals_per_day
            ));
        }
        for p in 1..=h.num_epochs {
            for q in 1..=PlanningHorizon::QUARTERS {
                for l in &grid.lines {
                    if self.rating(&l.id, p, q).is_none() {
                        gaps.push(format!("line_rating {} epoch {p} quarter {q}", l.id));
                    }
                }
                for r in &grid.renewables {
                    if self.renewable(&r.id, p, q).is_none() {
                        gaps.push(format!("renewable_max {} epoch {p} quarter {q}", r.id));
                    }
                }
                for b in &grid.buses {
                    for d in DayType::ALL {
                        if self.bus_load(&b.id, p, q, d).is_none() {
                            gaps.push(format!("load {} epoch {p} quarter {q} {d}", b.id));
                        }
                    }
                }
            }
        }
        if gaps.is_empty() {
            Ok(())
        } else {
            Err(ProfileError::Coverage(gaps))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_set_reports_gaps() {
        let g = crate::grid::parse_grid(
            r#"{"base_mva": 100,
                "horizon": {"num_epochs": 1, "years_per_epoch": 1, "weekdays_per_quarter": 65,
                            "weekend_days_per_quarter": 26, "intervals_per_day": 8, "interval_hours": 3},
                "buses": [{"id": "1", "latitude": 0, "longitude": 0}], "lines": []}"#,
        )
        .unwrap();
        match ProfileSet::default().check_coverage(&g) {
            Err(ProfileError::Coverage(v)) => assert!(v.iter().any(|s| s.contains("load 1 epoch 1 quarter 4 WE"))),
            other => panic!("{other:?}"),
        }
    }
}
