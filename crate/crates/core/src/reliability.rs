//! Reliability indices from daily commitment results: expected unserved
//! energy, the unserved-to-demand energy ratio (LOLP) and per-bus outage
//! duration (LOLE).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::grid::{DayType, PlanningHorizon};
use crate::scuc::{BatchKey, BatchResults};
use crate::util::{fmt_f64, write_atomic};

/// Shedding above this many MW marks an outage interval.
pub const OUTAGE_EPS_MW: f64 = 1e-6;

/// Hours in a calendar year, for the percentage form of LOLE.
pub const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Debug, Error)]
pub enum ReliabilityError {
    #[error("total demand energy in epoch {0} is zero")]
    ZeroDemand(usize),
    #[error("cases cover different epochs: {0}")]
    HorizonMismatch(String),
    #[error("{path} row {row}: {message}")]
    Parse { path: PathBuf, row: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("incomplete results: {0}")]
    Incomplete(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SheddingRecord {
    pub epoch: usize,
    pub quarter: usize,
    pub day: DayType,
    pub bus: String,
    pub interval: usize,
    pub shed_mw: f64,
}

/// Representative demand, MW, keyed like profile loads.
pub type Demand = BTreeMap<(String, usize, usize, DayType), Vec<f64>>;

fn in_epoch(records: &[SheddingRecord], epoch: usize) -> impl Iterator<Item = &SheddingRecord> {
    records.iter().filter(move |r| r.epoch == epoch)
}

/// Unserved energy over the whole epoch (not annualized), MWh.
pub fn eue(records: &[SheddingRecord], horizon: &PlanningHorizon, epoch: usize) -> f64 {
    in_epoch(records, epoch)
        .map(|r| r.shed_mw * horizon.interval_hours * horizon.day_weight(r.day))
        .fold(0.0, |a, x| a + x)
}

/// Demand energy over the epoch, MWh.
pub fn demand_energy(demand: &Demand, horizon: &PlanningHorizon, epoch: usize) -> f64 {
    demand
        .iter()
        .filter(|(k, _)| k.1 == epoch)
        .map(|((_, _, _, d), v)| v.iter().sum::<f64>() * horizon.interval_hours * horizon.day_weight(*d))
        .fold(0.0, |a, x| a + x)
}

/// Ratio of unserved to demanded energy in the epoch. This is an energy
/// ratio rather than an event probability.
pub fn lolp(records: &[SheddingRecord], demand: &Demand, horizon: &PlanningHorizon, epoch: usize) -> Result<f64, ReliabilityError> {
    let total = demand_energy(demand, horizon, epoch);
    if !(total > 0.0) {
        return Err(ReliabilityError::ZeroDemand(epoch));
    }
    Ok(eue(records, horizon, epoch) / total)
}

/// Outage bus-hours over the epoch: intervals above the threshold, each
/// weighted by its length and the day count.
pub fn outage_bus_hours(records: &[SheddingRecord], horizon: &PlanningHorizon, epoch: usize) -> f64 {
    in_epoch(records, epoch)
        .filter(|r| r.shed_mw > OUTAGE_EPS_MW)
        .map(|r| horizon.interval_hours * horizon.day_weight(r.day))
        .fold(0.0, |a, x| a + x)
}

/// Average outage hours per bus per year.
pub fn lole(records: &[SheddingRecord], horizon: &PlanningHorizon, epoch: usize, num_buses: usize) -> f64 {
    if num_buses == 0 || horizon.years_per_epoch == 0 {
        return 0.0;
    }
    outage_bus_hours(records, horizon, epoch) / (num_buses as f64 * horizon.years_per_epoch as f64)
}

/// Hours per year represented by the typical days.
pub fn modeled_hours_per_year(horizon: &PlanningHorizon) -> f64 {
    PlanningHorizon::QUARTERS as f64
        * (horizon.weekdays_per_quarter + horizon.weekend_days_per_quarter) as f64
        * horizon.intervals_per_day as f64
        * horizon.interval_hours
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochIndices {
    pub epoch: usize,
    /// MWh per year.
    pub eue_mwh: f64,
    pub lolp: f64,
    /// Hours per bus per year.
    pub lole_hours_per_bus: f64,
    pub eue_epoch_mwh: f64,
    pub demand_epoch_mwh: f64,
    pub outage_bus_hours_epoch: f64,
    pub lole_pct_of_year: f64,
    pub lole_pct_of_modeled_hours: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityReport {
    pub case: String,
    pub epochs: Vec<EpochIndices>,
}

/// Indices for every epoch in which `demand` has entries.
pub fn report(
    case: &str,
    records: &[SheddingRecord],
    demand: &Demand,
    horizon: &PlanningHorizon,
    num_buses: usize,
) -> Result<ReliabilityReport, ReliabilityError> {
    let epochs: BTreeSet<usize> = demand.keys().map(|k| k.1).collect();
    let ny = horizon.years_per_epoch.max(1) as f64;
    let mut out = Vec::new();
    for p in epochs {
        let e = eue(records, horizon, p);
        let l = lole(records, horizon, p, num_buses);
        out.push(EpochIndices {
            epoch: p,
            eue_mwh: e / ny,
            lolp: lolp(records, demand, horizon, p)?,
            lole_hours_per_bus: l,
            eue_epoch_mwh: e,
            demand_epoch_mwh: demand_energy(demand, horizon, p),
            outage_bus_hours_epoch: outage_bus_hours(records, horizon, p),
            lole_pct_of_year: 100.0 * l / HOURS_PER_YEAR,
            lole_pct_of_modeled_hours: 100.0 * l / modeled_hours_per_year(horizon),
        });
    }
    Ok(ReliabilityReport {
        case: case.to_string(),
        epochs: out,
    })
}

/// Shedding records and served-day demand from an in-memory batch. Fails if
/// any day has no solution.
pub fn records_from_batch(results: &BatchResults) -> Result<(Vec<SheddingRecord>, Demand), ReliabilityError> {
    let failed: Vec<String> = results.failures().map(|(k, e)| format!("{} {} {}: {e}", k.0, k.1, k.2)).collect();
    if !failed.is_empty() {
        return Err(ReliabilityError::Incomplete(failed.join("; ")));
    }
    let mut recs = Vec::new();
    let mut demand = Demand::new();
    for (&(p, q, d), day) in &results.days {
        let sol = day.outcome.as_ref().expect("failures checked");
        for (n, bus) in results.bus_ids.iter().enumerate() {
            for (t, s) in sol.shed[n].iter().enumerate() {
                recs.push(SheddingRecord {
                    epoch: p,
                    quarter: q,
                    day: d,
                    bus: bus.clone(),
                    interval: t,
                    shed_mw: *s,
                });
            }
            demand.insert((bus.clone(), p, q, d), day.load[n].clone());
        }
    }
    Ok((recs, demand))
}

/// Read the per-interval batch file written by the commitment stage.
pub fn read_shedding_records(path: &Path) -> Result<Vec<SheddingRecord>, ReliabilityError> {
    let io = |e: &dyn std::fmt::Display| ReliabilityError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| io(&e))?;
    let expected = ["epoch", "quarter", "day_type", "interval", "bus_id", "shed_mw", "curtail_mw"];
    let headers = rdr.headers().map_err(|e| io(&e))?.clone();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(ReliabilityError::Parse {
            path: path.to_path_buf(),
            row: 1,
            message: format!("header must be {}", expected.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let bad = |message: String| ReliabilityError::Parse {
            path: path.to_path_buf(),
            row,
            message,
        };
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let int = |k: usize| rec[k].trim().parse::<usize>().map_err(|_| bad(format!("invalid {} {:?}", expected[k], &rec[k])));
        let shed: f64 = rec[5].trim().parse().map_err(|_| bad(format!("invalid shed {:?}", &rec[5])))?;
        if !(shed >= 0.0) {
            return Err(bad(format!("negative shed {shed}")));
        }
        out.push(SheddingRecord {
            epoch: int(0)?,
            quarter: int(1)?,
            day: rec[2].trim().parse().map_err(bad)?,
            interval: int(3)?,
            bus: rec[4].trim().to_string(),
            shed_mw: shed,
        });
    }
    Ok(out)
}

/// Every typical day with demand must appear in the records.
pub fn check_record_coverage(case: &str, records: &[SheddingRecord], demand: &Demand) -> Result<(), ReliabilityError> {
    let have: BTreeSet<BatchKey> = records.iter().map(|r| (r.epoch, r.quarter, r.day)).collect();
    let want: BTreeSet<BatchKey> = demand.keys().map(|k| (k.1, k.2, k.3)).collect();
    let missing: Vec<String> = want.difference(&have).map(|k| format!("epoch {} quarter {} {}", k.0, k.1, k.2)).collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(ReliabilityError::Incomplete(format!("case {case} has no results for {}", missing.join(", "))))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub epoch: usize,
    pub metric: &'static str,
    /// One value per case, in input order.
    pub values: Vec<f64>,
    /// `values[i+1] - values[i]`.
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub cases: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

pub const METRICS: [&str; 3] = ["eue_mwh", "lolp", "lole_hours_per_bus"];

pub fn compare_cases(reports: &[ReliabilityReport]) -> Result<Comparison, ReliabilityError> {
    let Some(first) = reports.first() else {
        return Ok(Comparison {
            cases: vec![],
            rows: vec![],
        });
    };
    let epochs: Vec<usize> = first.epochs.iter().map(|e| e.epoch).collect();
    for r in &reports[1..] {
        let other: Vec<usize> = r.epochs.iter().map(|e| e.epoch).collect();
        if other != epochs {
            return Err(ReliabilityError::HorizonMismatch(format!(
                "{} has {epochs:?}, {} has {other:?}",
                first.case, r.case
            )));
        }
    }
    let mut rows = Vec::new();
    for (i, &p) in epochs.iter().enumerate() {
        for metric in METRICS {
            let values: Vec<f64> = reports
                .iter()
                .map(|r| {
                    let e = &r.epochs[i];
                    match metric {
                        "eue_mwh" => e.eue_mwh,
                        "lolp" => e.lolp,
                        _ => e.lole_hours_per_bus,
                    }
                })
                .collect();
            let deltas = values.windows(2).map(|w| w[1] - w[0]).collect();
            rows.push(ComparisonRow {
                epoch: p,
                metric,
                values,
                deltas,
            });
        }
    }
    Ok(Comparison {
        cases: reports.iter().map(|r| r.case.clone()).collect(),
        rows,
    })
}

pub const REPORT_FILE: &str = "reliability.csv";
pub const DETAIL_FILE: &str = "reliability_detail.csv";
pub const COMPARISON_FILE: &str = "reliability_comparison.csv";

/// Write the report, detail and comparison files into `dir`.
pub fn write_reports(reports: &[ReliabilityReport], comparison: &Comparison, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut main = String::from("case,epoch,eue_mwh,lolp,lole_hours_per_bus\n");
    let mut detail = String::from(
        "case,epoch,eue_epoch_mwh,demand_epoch_mwh,outage_bus_hours_epoch,lole_pct_of_8760h,lole_pct_of_modeled_hours\n",
    );
    for r in reports {
        for e in &r.epochs {
            let _ = writeln!(
                main,
                "{},{},{},{},{}",
                r.case,
                e.epoch,
                fmt_f64(e.eue_mwh),
                fmt_f64(e.lolp),
                fmt_f64(e.lole_hours_per_bus)
            );
            let _ = writeln!(
                detail,
                "{},{},{},{},{},{},{}",
                r.case,
                e.epoch,
                fmt_f64(e.eue_epoch_mwh),
                fmt_f64(e.demand_epoch_mwh),
                fmt_f64(e.outage_bus_hours_epoch),
                fmt_f64(e.lole_pct_of_year),
                fmt_f64(e.lole_pct_of_modeled_hours)
            );
        }
    }
    let mut cmp = String::from("epoch,metric");
    for c in &comparison.cases {
        let _ = write!(cmp, ",{c}");
    }
    for w in comparison.cases.windows(2) {
        let _ = write!(cmp, ",{}_minus_{}", w[1], w[0]);
    }
    cmp.push('\n');
    for row in &comparison.rows {
        let _ = write!(cmp, "{},{}", row.epoch, row.metric);
        for v in row.values.iter().chain(&row.deltas) {
            let _ = write!(cmp, ",{}", fmt_f64(*v));
        }
        cmp.push('\n');
    }
    let mut out = Vec::new();
    for (name, body) in [(REPORT_FILE, main), (DETAIL_FILE, detail), (COMPARISON_FILE, cmp)] {
        let path = dir.join(name);
        write_atomic(&path, body.as_bytes())?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn horizon(years: usize) -> PlanningHorizon {
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

    fn rec(day: DayType, bus: &str, t: usize, mw: f64) -> SheddingRecord {
        SheddingRecord {
            epoch: 1,
            quarter: 1,
            day,
            bus: bus.into(),
            interval: t,
            shed_mw: mw,
        }
    }

    #[test]
    fn eue_hand_values() {
        let h = horizon(1);
        assert_eq!(eue(&[], &h, 1), 0.0);
        let mut r = vec![rec(DayType::Weekday, "1", 0, 10.0)];
        assert_eq!(eue(&r, &h, 1), 1950.0);
        r.push(rec(DayType::Weekend, "1", 0, 10.0));
        assert_eq!(eue(&r, &h, 1), 2730.0);
    }

    #[test]
    fn lolp_hand_values() {
        let h = horizon(1);
        let mut demand = Demand::new();
        for d in DayType::ALL {
            demand.insert(("1".into(), 1, 1, d), vec![100.0; 8]);
        }
        assert_eq!(lolp(&[], &demand, &h, 1).unwrap(), 0.0);
        let r = vec![rec(DayType::Weekday, "1", 0, 10.0)];
        let v = lolp(&r, &demand, &h, 1).unwrap();
        assert_eq!(v, 1950.0 / (100.0 * 3.0 * 8.0 * 91.0));
        assert!((v - 0.00893).abs() < 1e-5);
        let all: Vec<_> = DayType::ALL
            .into_iter()
            .flat_map(|d| (0..8).map(move |t| rec(d, "1", t, 100.0)))
            .collect();
        assert_eq!(lolp(&all, &demand, &h, 1).unwrap(), 1.0);
        assert!(matches!(lolp(&r, &Demand::new(), &h, 1), Err(ReliabilityError::ZeroDemand(1))));
    }

    #[test]
    fn lole_hand_values() {
        let r = vec![rec(DayType::Weekday, "3", 2, 4.0), rec(DayType::Weekday, "3", 5, 1e-3)];
        assert_eq!(lole(&[], &horizon(1), 1, 5), 0.0);
        assert_eq!(lole(&r, &horizon(1), 1, 5), 78.0);
        assert_eq!(lole(&r, &horizon(5), 1, 5), 15.6);
        // Solver noise below the threshold is not an outage.
        let noise = vec![rec(DayType::Weekday, "3", 2, 1e-7)];
        assert_eq!(lole(&noise, &horizon(1), 1, 5), 0.0);
    }

    fn report_of(case: &str, shed: f64) -> ReliabilityReport {
        let mut demand = Demand::new();
        for d in DayType::ALL {
            demand.insert(("1".into(), 1, 1, d), vec![100.0; 8]);
        }
        report(case, &[rec(DayType::Weekday, "1", 0, shed)], &demand, &horizon(5), 1).unwrap()
    }

    #[test]
    fn report_annualizes_and_keeps_raw_totals() {
        let r = report_of("FR", 10.0);
        let e = &r.epochs[0];
        assert_eq!(e.eue_epoch_mwh, 1950.0);
        assert_eq!(e.eue_mwh, 390.0);
        assert_eq!(e.lole_hours_per_bus, 3.0 * 65.0 / 5.0);
        assert!((e.lole_pct_of_year - 100.0 * 39.0 / 8760.0).abs() < 1e-12);
        assert!((e.lole_pct_of_modeled_hours - 100.0 * 39.0 / 8736.0).abs() < 1e-12);
    }

    #[test]
    fn comparison_shapes() {
        let a = report_of("FR", 10.0);
        let same = compare_cases(&[a.clone(), a.clone()]).unwrap();
        assert!(same.rows.iter().all(|r| r.deltas == vec![0.0]));
        let one = compare_cases(std::slice::from_ref(&a)).unwrap();
        assert_eq!(one.cases, vec!["FR"]);
        assert!(one.rows.iter().all(|r| r.values.len() == 1 && r.deltas.is_empty()));
        let mut b = report_of("FGI", 5.0);
        b.epochs[0].epoch = 2;
        assert!(matches!(compare_cases(&[a, b]), Err(ReliabilityError::HorizonMismatch(_))));
    }

    #[test]
    fn report_files_have_expected_columns() {
        let reports = [report_of("FR", 10.0), report_of("FGI", 4.0), report_of("FGTI", 0.0)];
        let cmp = compare_cases(&reports).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_reports(&reports, &cmp, dir.path()).unwrap();
        let c = std::fs::read_to_string(dir.path().join(COMPARISON_FILE)).unwrap();
        assert_eq!(c.lines().next().unwrap(), "epoch,metric,FR,FGI,FGTI,FGI_minus_FR,FGTI_minus_FGI");
        assert_eq!(c.lines().nth(1).unwrap(), "1,eue_mwh,390,156,0,-234,-156");
        let m = std::fs::read_to_string(dir.path().join(REPORT_FILE)).unwrap();
        assert_eq!(m.lines().count(), 4);
    }

    #[test]
    fn records_round_trip_through_interval_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x_intervals.csv");
        std::fs::write(&p, "epoch,quarter,day_type,interval,bus_id,shed_mw,curtail_mw\n1,2,WE,3,b1,2.5,0\n").unwrap();
        let r = read_shedding_records(&p).unwrap();
        assert_eq!(
            r,
            vec![SheddingRecord {
                epoch: 1,
                quarter: 2,
                day: DayType::Weekend,
                bus: "b1".into(),
                interval: 3,
                shed_mw: 2.5
            }]
        );
        std::fs::write(&p, "epoch,quarter,day_type,interval,bus_id,shed_mw,curtail_mw\n1,2,WE,3,b1,-1,0\n").unwrap();
        assert!(matches!(read_shedding_records(&p), Err(ReliabilityError::Parse { row: 2, .. })));
    }
}
