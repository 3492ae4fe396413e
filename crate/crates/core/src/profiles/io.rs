//! Profile CSV files: `epoch,quarter,day_type,interval,entity_id,value`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::{ProfileError, ProfileSet};
use crate::grid::{DayType, PlanningHorizon};
use crate::util::{fmt_f64, write_atomic};

pub const PROFILE_FILES: [&str; 3] = ["line_rating.csv", "renewable_max.csv", "load.csv"];
const HEADER: &str = "epoch,quarter,day_type,interval,entity_id,value\n";

fn rows_all(map: &BTreeMap<(String, usize, usize), Vec<f64>>) -> String {
    let mut rows: Vec<(usize, usize, usize, &str, f64)> = Vec::new();
    for ((id, p, q), v) in map {
        for (t, x) in v.iter().enumerate() {
            rows.push((*p, *q, t, id, *x));
        }
    }
    rows.sort_by(|a, b| (a.0, a.1, a.2, a.3).cmp(&(b.0, b.1, b.2, b.3)));
    let mut out = String::from(HEADER);
    for (p, q, t, id, x) in rows {
        out.push_str(&format!("{p},{q},ALL,{t},{id},{}\n", fmt_f64(x)));
    }
    out
}

fn rows_load(map: &BTreeMap<(String, usize, usize, DayType), Vec<f64>>) -> String {
    let mut rows: Vec<(usize, usize, DayType, usize, &str, f64)> = Vec::new();
    for ((id, p, q, d), v) in map {
        for (t, x) in v.iter().enumerate() {
            rows.push((*p, *q, *d, t, id, *x));
        }
    }
    rows.sort_by(|a, b| (a.0, a.1, a.2, a.3, a.4).cmp(&(b.0, b.1, b.2, b.3, b.4)));
    let mut out = String::from(HEADER);
    for (p, q, d, t, id, x) in rows {
        out.push_str(&format!("{p},{q},{d},{t},{id},{}\n", fmt_f64(x)));
    }
    out
}

/// Write the three profile files into `dir`.
pub fn export_profiles(set: &ProfileSet, dir: &Path) -> Result<(), ProfileError> {
    let bodies = [rows_all(&set.line_rating), rows_all(&set.renewable_max), rows_load(&set.load)];
    for (name, body) in PROFILE_FILES.iter().zip(bodies) {
        let path = dir.join(name);
        write_atomic(&path, body.as_bytes()).map_err(|e| ProfileError::io(&path, e))?;
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Quantity {
    Rating,
    Renewable,
    Load,
}

type RawRows = BTreeMap<(String, usize, usize, Option<DayType>), BTreeMap<usize, f64>>;

fn read_file(path: &Path, qty: Quantity, intervals: usize, num_epochs: usize) -> Result<RawRows, ProfileError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| ProfileError::io(path, e))?;
    let headers = rdr.headers().map_err(|e| ProfileError::parse(path, 1, e.to_string()))?.clone();
    let expected = ["epoch", "quarter", "day_type", "interval", "entity_id", "value"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(ProfileError::parse(path, 1, format!("header must be {}", expected.join(","))));
    }
    let mut out: RawRows = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| ProfileError::parse(path, row, e.to_string()))?;
        let bad = |m: String| ProfileError::parse(path, row, m);
        let int = |k: usize| -> Result<usize, ProfileError> {
            rec[k].trim().parse::<usize>().map_err(|_| bad(format!("invalid {} {:?}", expected[k], &rec[k])))
        };
        let (p, q, t) = (int(0)?, int(1)?, int(3)?);
        if p == 0 || p > num_epochs {
            return Err(bad(format!("epoch {p} outside 1..={num_epochs}")));
        }
        if q == 0 || q > PlanningHorizon::QUARTERS {
            return Err(bad(format!("quarter {q} outside 1..=4")));
        }
        if t >= intervals {
            return Err(bad(format!("interval {t} outside 0..{intervals}")));
        }
        let day = match (qty, rec[2].trim()) {
            (Quantity::Load, s) => Some(s.parse::<DayType>().map_err(bad)?),
            (_, "ALL") => None,
            (_, s) => return Err(bad(format!("day_type must be ALL, got {s:?}"))),
        };
        let v: f64 = rec[5].trim().parse().map_err(|_| bad(format!("invalid value {:?}", &rec[5])))?;
        match qty {
            Quantity::Rating if !(v > 0.0 && v.is_finite()) => return Err(bad(format!("nonpositive rating {v}"))),
            Quantity::Renewable | Quantity::Load if !(v >= 0.0 && v.is_finite()) => {
                return Err(bad(format!("negative value {v}")))
            }
            _ => {}
        }
        let id = rec[4].trim().to_string();
        if out.entry((id.clone(), p, q, day)).or_default().insert(t, v).is_some() {
            return Err(bad(format!("duplicate entry for {id} epoch {p} quarter {q} interval {t}")));
        }
    }
    Ok(out)
}

/// Read profiles back, checking that every entity has complete days for
/// every epoch and quarter of `horizon`.
pub fn import_profiles(dir: &Path, horizon: &PlanningHorizon) -> Result<ProfileSet, ProfileError> {
    import_profiles_with(dir, horizon, true)
}

/// As [`import_profiles`]; with `strict` false, absent slabs are skipped
/// (matching a partial-coverage build) while incomplete days still fail.
pub fn import_profiles_with(dir: &Path, horizon: &PlanningHorizon, strict: bool) -> Result<ProfileSet, ProfileError> {
    let t_count = horizon.intervals_per_day;
    let np = horizon.num_epochs;
    let mut set = ProfileSet {
        intervals: t_count,
        ..Default::default()
    };
    let mut gaps = Vec::new();
    for (name, qty) in PROFILE_FILES.iter().zip([Quantity::Rating, Quantity::Renewable, Quantity::Load]) {
        let path = dir.join(name);
        let raw = read_file(&path, qty, t_count, np)?;
        let entities: BTreeSet<String> = raw.keys().map(|k| k.0.clone()).collect();
        let days: &[Option<DayType>] = if qty == Quantity::Load {
            &[Some(DayType::Weekday), Some(DayType::Weekend)]
        } else {
            &[None]
        };
        for id in &entities {
            for p in 1..=np {
                for q in 1..=PlanningHorizon::QUARTERS {
                    for d in days {
                        let label = d.map_or(String::new(), |d| format!(" {d}"));
                        let key = (id.clone(), p, q, *d);
                        let Some(ts) = raw.get(&key) else {
                            if !strict {
                                continue;
                            }
                            gaps.push(format!("{name}: {id} epoch {p} quarter {q}{label} missing"));
                            continue;
                        };
                        if ts.len() != t_count {
                            gaps.push(format!("{name}: {id} epoch {p} quarter {q}{label} has {} of {t_count} intervals", ts.len()));
                            continue;
                        }
                        let v: Vec<f64> = ts.values().copied().collect();
                        match d {
                            Some(d) => {
                                set.load.insert((id.clone(), p, q, *d), v);
                            }
                            None if qty == Quantity::Rating => {
                                set.line_rating.insert((id.clone(), p, q), v);
                            }
                            None => {
                                set.renewable_max.insert((id.clone(), p, q), v);
                            }
                        }
                    }
                }
            }
        }
    }
    if gaps.is_empty() {
        Ok(set)
    } else {
        Err(ProfileError::Coverage(gaps))
    }
}
