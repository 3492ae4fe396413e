//! Weather and load input series.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, Timelike};
use serde::Deserialize;

use super::physics::{combine_terminals, EffectiveWeather, TerminalPolicy};
use super::ProfileError;

pub(crate) fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.naive_utc());
    }
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

pub fn format_timestamp(t: NaiveDateTime) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSample {
    pub timestamp: NaiveDateTime,
    pub location_id: String,
    pub temperature: f64,
    pub wind_speed_10m: f64,
    pub shortwave: f64,
    pub longwave: f64,
}

impl WeatherSample {
    pub fn effective(&self) -> EffectiveWeather {
        EffectiveWeather {
            temperature: self.temperature,
            wind_speed: self.wind_speed_10m,
            solar: self.shortwave,
        }
    }

    fn check(&self) -> Result<(), String> {
        if !(self.wind_speed_10m >= 0.0) {
            return Err(format!("negative wind speed {}", self.wind_speed_10m));
        }
        if !(self.shortwave >= 0.0 && self.longwave >= 0.0) {
            return Err("negative radiation".into());
        }
        if !(-60.0..=60.0).contains(&self.temperature) {
            return Err(format!("temperature {} outside [-60, 60]", self.temperature));
        }
        Ok(())
    }
}

/// Weather seen by a line, from the samples at its two terminals.
pub fn line_weather(
    from: &WeatherSample,
    to: &WeatherSample,
    policy: TerminalPolicy,
) -> Result<EffectiveWeather, ProfileError> {
    if from.timestamp != to.timestamp {
        return Err(ProfileError::Model(format!(
            "terminal samples at different times ({} vs {})",
            format_timestamp(from.timestamp),
            format_timestamp(to.timestamp)
        )));
    }
    Ok(combine_terminals(from.effective(), to.effective(), policy))
}

/// Samples keyed by location and timestamp at a uniform step.
#[derive(Debug, Clone, Default)]
pub struct WeatherSeries {
    pub step_hours: f64,
    series: HashMap<String, BTreeMap<NaiveDateTime, WeatherSample>>,
}

#[derive(Deserialize)]
struct WeatherRow {
    timestamp: String,
    location_id: String,
    temperature_c: f64,
    wind_speed_10m_mps: f64,
    shortwave_wm2: f64,
    longwave_wm2: f64,
}

fn step_of<V>(map: &BTreeMap<NaiveDateTime, V>) -> Option<f64> {
    let mut it = map.keys();
    let a = *it.next()?;
    let b = *it.next()?;
    Some((b - a).num_seconds() as f64 / 3600.0)
}

fn check_uniform<V>(what: &str, key: &str, map: &BTreeMap<NaiveDateTime, V>, step: f64) -> Result<(), ProfileError> {
    let secs = (step * 3600.0).round() as i64;
    for t in map.keys() {
        let since = t.num_seconds_from_midnight() as i64;
        if secs == 0 || since % secs != 0 {
            return Err(ProfileError::Invalid(format!(
                "{what} {key}: timestamp {} is off the {step} h grid",
                format_timestamp(*t)
            )));
        }
    }
    Ok(())
}

impl WeatherSeries {
    pub fn from_samples(samples: Vec<WeatherSample>, step_hours: f64) -> Result<Self, ProfileError> {
        let mut series: HashMap<String, BTreeMap<NaiveDateTime, WeatherSample>> = HashMap::new();
        for s in samples {
            s.check().map_err(|m| ProfileError::Invalid(format!("location {}: {m}", s.location_id)))?;
            let loc = series.entry(s.location_id.clone()).or_default();
            if loc.insert(s.timestamp, s.clone()).is_some() {
                return Err(ProfileError::Invalid(format!(
                    "duplicate weather sample for {} at {}",
                    s.location_id,
                    format_timestamp(s.timestamp)
                )));
            }
        }
        for (k, m) in &series {
            check_uniform("weather location", k, m, step_hours)?;
        }
        Ok(WeatherSeries { step_hours, series })
    }

    /// Parse the weather CSV. The step is inferred from the first location
    /// and every sample must sit on that grid.
    pub fn from_csv(path: &Path) -> Result<Self, ProfileError> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| ProfileError::io(path, e))?;
        let mut samples = Vec::new();
        for (i, row) in rdr.deserialize::<WeatherRow>().enumerate() {
            let row_no = i + 2;
            let r = row.map_err(|e| ProfileError::parse(path, row_no, e.to_string()))?;
            let timestamp = parse_timestamp(&r.timestamp)
                .ok_or_else(|| ProfileError::parse(path, row_no, format!("bad timestamp {:?}", r.timestamp)))?;
            let s = WeatherSample {
                timestamp,
                location_id: r.location_id,
                temperature: r.temperature_c,
                wind_speed_10m: r.wind_speed_10m_mps,
                shortwave: r.shortwave_wm2,
                longwave: r.longwave_wm2,
            };
            s.check().map_err(|m| ProfileError::parse(path, row_no, m))?;
            samples.push(s);
        }
        let mut by_loc: HashMap<&str, BTreeMap<NaiveDateTime, ()>> = HashMap::new();
        for s in &samples {
            by_loc.entry(&s.location_id).or_default().insert(s.timestamp, ());
        }
        let step = by_loc
            .values()
            .filter_map(step_of)
            .fold(f64::INFINITY, f64::min);
        let step = if step.is_finite() { step } else { 3.0 };
        WeatherSeries::from_samples(samples, step)
    }

    pub fn get(&self, location: &str, t: NaiveDateTime) -> Option<&WeatherSample> {
        self.series.get(location)?.get(&t)
    }

    pub fn locations(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn samples(&self, location: &str) -> impl Iterator<Item = &WeatherSample> {
        self.series.get(location).into_iter().flat_map(|m| m.values())
    }
}

/// Per-bus load in MW. A series that lies within a single calendar year is a
/// base-year profile and is reused for every study year.
#[derive(Debug, Clone, Default)]
pub struct LoadSeries {
    pub step_hours: f64,
    series: HashMap<String, BTreeMap<NaiveDateTime, f64>>,
    base_year: Option<i32>,
}

#[derive(Deserialize)]
struct LoadRow {
    timestamp: String,
    bus_id: String,
    load_mw: f64,
}

impl LoadSeries {
    pub fn from_points(points: Vec<(String, NaiveDateTime, f64)>, step_hours: f64) -> Result<Self, ProfileError> {
        let mut series: HashMap<String, BTreeMap<NaiveDateTime, f64>> = HashMap::new();
        let mut years = std::collections::BTreeSet::new();
        for (bus, t, v) in points {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ProfileError::Invalid(format!("bus {bus}: negative load {v}")));
            }
            years.insert(t.year());
            if series.entry(bus.clone()).or_default().insert(t, v).is_some() {
                return Err(ProfileError::Invalid(format!(
                    "duplicate load for {bus} at {}",
                    format_timestamp(t)
                )));
            }
        }
        for (k, m) in &series {
            check_uniform("load bus", k, m, step_hours)?;
        }
        let base_year = if years.len() == 1 { years.first().copied() } else { None };
        Ok(LoadSeries {
            step_hours,
            series,
            base_year,
        })
    }

    pub fn from_csv(path: &Path) -> Result<Self, ProfileError> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| ProfileError::io(path, e))?;
        let mut points = Vec::new();
        for (i, row) in rdr.deserialize::<LoadRow>().enumerate() {
            let row_no = i + 2;
            let r = row.map_err(|e| ProfileError::parse(path, row_no, e.to_string()))?;
            let t = parse_timestamp(&r.timestamp)
                .ok_or_else(|| ProfileError::parse(path, row_no, format!("bad timestamp {:?}", r.timestamp)))?;
            if !(r.load_mw >= 0.0) {
                return Err(ProfileError::parse(path, row_no, format!("negative load {}", r.load_mw)));
            }
            points.push((r.bus_id, t, r.load_mw));
        }
        let step = points
            .iter()
            .fold(HashMap::<&str, BTreeMap<NaiveDateTime, ()>>::new(), |mut m, (b, t, _)| {
                m.entry(b.as_str()).or_default().insert(*t, ());
                m
            })
            .values()
            .filter_map(step_of)
            .fold(f64::INFINITY, f64::min);
        let step = if step.is_finite() { step } else { 3.0 };
        LoadSeries::from_points(points, step)
    }

    pub fn base_year(&self) -> Option<i32> {
        self.base_year
    }

    /// Load at `t`, mapping into the base year when there is one
    /// (29 February maps to 28 February).
    pub fn get(&self, bus_key: &str, t: NaiveDateTime) -> Option<f64> {
        let m = self.series.get(bus_key)?;
        match self.base_year {
            Some(y) if y != t.year() => {
                let d = t.date();
                let date = NaiveDate::from_ymd_opt(y, d.month(), d.day())
                    .or_else(|| NaiveDate::from_ymd_opt(y, d.month(), d.day() - 1))?;
                m.get(&date.and_time(t.time())).copied()
            }
            _ => m.get(&t).copied(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> NaiveDateTime {
        parse_timestamp(s).unwrap()
    }

    fn sample(loc: &str, t: &str, temp: f64, wind: f64, sw: f64) -> WeatherSample {
        WeatherSample {
            timestamp: ts(t),
            location_id: loc.into(),
            temperature: temp,
            wind_speed_10m: wind,
            shortwave: sw,
            longwave: 300.0,
        }
    }

    #[test]
    fn timestamps_parse_in_several_spellings() {
        let a = ts("2021-01-01T03:00:00Z");
        assert_eq!(a, ts("2021-01-01T03:00:00"));
        assert_eq!(a, ts("2021-01-01 03:00:00"));
        assert_eq!(format_timestamp(a), "2021-01-01T03:00:00Z");
    }

    #[test]
    fn line_weather_rejects_mismatched_times() {
        let a = sample("1", "2021-01-01T00:00:00Z", 30.0, 4.0, 800.0);
        let b = sample("2", "2021-01-01T03:00:00Z", 34.0, 2.0, 900.0);
        assert!(line_weather(&a, &b, TerminalPolicy::Conservative).is_err());
        let b = sample("2", "2021-01-01T00:00:00Z", 34.0, 2.0, 900.0);
        let w = line_weather(&a, &b, TerminalPolicy::Conservative).unwrap();
        assert_eq!((w.temperature, w.wind_speed, w.solar), (34.0, 2.0, 900.0));
    }

    #[test]
    fn duplicate_samples_are_rejected() {
        let a = sample("1", "2021-01-01T00:00:00Z", 30.0, 4.0, 800.0);
        assert!(WeatherSeries::from_samples(vec![a.clone(), a], 3.0).is_err());
    }

    #[test]
    fn off_grid_samples_are_rejected() {
        let a = sample("1", "2021-01-01T01:00:00Z", 30.0, 4.0, 800.0);
        assert!(WeatherSeries::from_samples(vec![a], 3.0).is_err());
    }

    #[test]
    fn base_year_load_is_reused() {
        let l = LoadSeries::from_points(
            vec![
                ("1".into(), ts("2021-02-28T00:00:00Z"), 5.0),
                ("1".into(), ts("2021-03-01T00:00:00Z"), 7.0),
            ],
            3.0,
        )
        .unwrap();
        assert_eq!(l.base_year(), Some(2021));
        assert_eq!(l.get("1", ts("2024-02-29T00:00:00Z")), Some(5.0));
        assert_eq!(l.get("1", ts("2030-03-01T00:00:00Z")), Some(7.0));
        assert_eq!(l.get("1", ts("2030-03-02T00:00:00Z")), None);
    }
}
