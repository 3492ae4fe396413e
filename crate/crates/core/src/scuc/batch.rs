use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{solve_scuc, ScucError, ScucInstance, ScucOptions, ScucSolution};
use crate::grid::{DayType, EpochView};
use crate::milp::SolverConfig;
use crate::profiles::ProfileSet;
use crate::util::{fmt_f64, write_atomic};

/// `(epoch, quarter, day type)`
pub type BatchKey = (usize, usize, DayType);

pub const INTERVAL_FILE_SUFFIX: &str = "_intervals.csv";
pub const DAY_FILE_SUFFIX: &str = "_days.csv";

#[derive(Debug)]
pub struct DayResult {
    /// MW per bus and interval, as given to the solver.
    pub load: Vec<Vec<f64>>,
    pub outcome: Result<ScucSolution, ScucError>,
}

#[derive(Debug)]
pub struct BatchResults {
    pub bus_ids: Vec<String>,
    pub interval_hours: f64,
    pub days: BTreeMap<BatchKey, DayResult>,
}

impl BatchResults {
    pub fn failures(&self) -> impl Iterator<Item = (&BatchKey, &ScucError)> {
        self.days.iter().filter_map(|(k, d)| d.outcome.as_ref().err().map(|e| (k, e)))
    }
}

/// Solve every typical day of every epoch view that the profiles cover.
/// Days are independent and solved in parallel; a failed day is recorded
/// under its key.
pub fn run_batch(views: &[EpochView], profiles: &ProfileSet, opts: &ScucOptions, config: &SolverConfig) -> BatchResults {
    let slabs = profiles.slabs();
    let jobs: Vec<(&EpochView, BatchKey)> = views
        .iter()
        .flat_map(|v| {
            slabs
                .iter()
                .filter(move |(p, _)| *p == v.epoch)
                .flat_map(move |&(p, q)| DayType::ALL.into_iter().map(move |d| (v, (p, q, d))))
        })
        .collect();
    let days: BTreeMap<BatchKey, DayResult> = jobs
        .into_par_iter()
        .map(|(view, key)| {
            let (_, q, d) = key;
            let day = match ScucInstance::from_profiles(view, profiles, q, d, opts) {
                Ok(inst) => DayResult {
                    load: inst.load.clone(),
                    outcome: solve_scuc(&inst, config),
                },
                Err(e) => DayResult {
                    load: Vec::new(),
                    outcome: Err(e),
                },
            };
            if let Err(e) = &day.outcome {
                log::warn!("epoch {} quarter {q} {d}: {e}", key.0);
            }
            (key, day)
        })
        .collect();
    BatchResults {
        bus_ids: views.first().map_or_else(Vec::new, |v| v.buses.iter().map(|b| b.id.clone()).collect()),
        interval_hours: views.first().map_or(0.0, |v| v.interval_hours),
        days,
    }
}

/// Write `<prefix>_intervals.csv`, `<prefix>_days.csv` and, if any day
/// failed, `<prefix>_failures.csv` into `dir`. Returns the paths written.
pub fn write_batch_results(results: &BatchResults, dir: &Path, prefix: &str) -> std::io::Result<Vec<PathBuf>> {
    let dt = results.interval_hours;
    let mut intervals = String::from("epoch,quarter,day_type,interval,bus_id,shed_mw,curtail_mw\n");
    let mut days = String::from("epoch,quarter,day_type,operating_cost_usd,total_generation_mwh,total_shed_mwh\n");
    let mut failures = String::from("epoch,quarter,day_type,error\n");
    let mut failed = false;
    for (&(p, q, d), day) in &results.days {
        match &day.outcome {
            Ok(s) => {
                let nt = s.shed.first().map_or(0, Vec::len);
                for t in 0..nt {
                    for (n, id) in results.bus_ids.iter().enumerate() {
                        let _ = writeln!(
                            intervals,
                            "{p},{q},{d},{t},{id},{},{}",
                            fmt_f64(s.shed[n][t]),
                            fmt_f64(s.curtail[n][t])
                        );
                    }
                }
                let _ = writeln!(
                    days,
                    "{p},{q},{d},{},{},{}",
                    fmt_f64(s.operating_cost),
                    fmt_f64(s.total_generation_mwh(dt)),
                    fmt_f64(s.total_shed_mwh(dt))
                );
            }
            Err(e) => {
                failed = true;
                let msg = e.to_string().replace('"', "'");
                let _ = writeln!(failures, "{p},{q},{d},\"{msg}\"");
            }
        }
    }
    let mut written = Vec::new();
    let mut put = |name: String, body: &str| -> std::io::Result<()> {
        let path = dir.join(name);
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
        Ok(())
    };
    put(format!("{prefix}{INTERVAL_FILE_SUFFIX}"), &intervals)?;
    put(format!("{prefix}{DAY_FILE_SUFFIX}"), &days)?;
    if failed {
        put(format!("{prefix}_failures.csv"), &failures)?;
    }
    Ok(written)
}
