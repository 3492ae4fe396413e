// Writes the bundled study fixtures under `fixtures/`. The output is a pure
// function of this file, so the files can be regenerated and diffed.
//
//     cargo run --example make_fixtures [-- <dir>]

#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::{Datelike, Duration, NaiveDate};
use serde_json::{json, Value};

const INTERVAL_HOURS: i64 = 6;
const INTERVALS: usize = 4;
const BUSES: [&str; 5] = ["1", "2", "3", "4", "5"];
const WINDY: [&str; 2] = ["4", "5"];

/// Uniform in [-1, 1], fixed per (stream, day, interval).
fn noise(stream: u64, day: i64, k: usize) -> f64 {
    let mut z = stream
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((day as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(k as u64 + 1);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn stream(name: &str, channel: u64) -> u64 {
    name.bytes().fold(channel.wrapping_mul(131), |h, b| h.wrapping_mul(257).wrapping_add(b as u64))
}

/// +1 in mid July, -1 in mid January.
fn season(d: NaiveDate) -> f64 {
    (2.0 * std::f64::consts::PI * (d.ordinal() as f64 - 200.0) / 365.0).cos()
}

fn dates(first: NaiveDate, last: NaiveDate) -> Vec<NaiveDate> {
    let mut out = Vec::new();
    let mut d = first;
    while d <= last {
        out.push(d);
        d = d.succ_opt().unwrap();
    }
    out
}

fn stamp(d: NaiveDate, k: usize) -> String {
    let t = d.and_hms_opt(0, 0, 0).unwrap() + Duration::hours(INTERVAL_HOURS * k as i64);
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

fn weather_csv(locations: &[&str], days: &[NaiveDate]) -> String {
    let epoch = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
    let mut out = String::from("timestamp,location_id,temperature_c,wind_speed_10m_mps,shortwave_wm2,longwave_wm2\n");
    for &d in days {
        let n = (d - epoch).num_days();
        let s = season(d);
        for k in 0..INTERVALS {
            for loc in locations {
                let windy = WINDY.contains(loc);
                let temp = 18.0 + 10.0 * s + [-4.0, -1.0, 5.0, 2.0][k] + 1.5 * noise(stream(loc, 1), n, k);
                let wind = if windy {
                    [9.0, 4.5, 3.0, 7.0][k] - 0.5 * s + 0.8 * noise(stream(loc, 2), n, k)
                } else {
                    [4.0, 3.0, 2.5, 3.5][k] + 0.5 * noise(stream(loc, 2), n, k)
                };
                let sw = [0.0, 350.0, 850.0, 120.0][k] * (0.75 + 0.25 * s) * (1.0 + 0.1 * noise(stream(loc, 3), n, k));
                let lw = 300.0 + 40.0 * s + 20.0 * noise(stream(loc, 4), n, k);
                let _ = writeln!(
                    out,
                    "{},{loc},{:.2},{:.2},{:.1},{:.1}",
                    stamp(d, k),
                    temp,
                    wind.max(0.0),
                    sw.max(0.0),
                    lw
                );
            }
        }
    }
    out
}

fn load_csv(base_mw: &[(&str, f64)], days: &[NaiveDate]) -> String {
    let epoch = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
    let mut out = String::from("timestamp,bus_id,load_mw\n");
    for &d in days {
        let n = (d - epoch).num_days();
        let weekend = d.weekday().number_from_monday() >= 6;
        let scale = (1.0 + 0.08 * season(d)) * if weekend { 0.9 } else { 1.0 };
        for k in 0..INTERVALS {
            for (bus, mw) in base_mw {
                let v = mw * scale * [0.78, 0.95, 1.1, 1.15][k] * (1.0 + 0.02 * noise(stream(bus, 5), n, k));
                let _ = writeln!(out, "{},{bus},{:.3}", stamp(d, k), v);
            }
        }
    }
    out
}

fn horizon(num_epochs: usize, growth: &[f64]) -> Value {
    let mut h = json!({
        "num_epochs": num_epochs,
        "years_per_epoch": 1,
        "weekdays_per_quarter": 65,
        "weekend_days_per_quarter": 26,
        "intervals_per_day": INTERVALS,
        "interval_hours": INTERVAL_HOURS as f64,
        "maintenance_ratio": 0.02,
        "start_year": 2021,
    });
    if !growth.is_empty() {
        h["load_growth"] = json!(growth);
    }
    h
}

fn buses() -> Value {
    let coords = [(30.27, -97.74), (29.76, -95.37), (32.78, -96.80), (33.58, -101.86), (34.18, -101.72)];
    BUSES
        .iter()
        .zip(coords)
        .map(|(id, (lat, lon))| json!({"id": id, "latitude": lat, "longitude": lon}))
        .collect()
}

fn line(id: &str, from: &str, to: &str, x: f64, mva: f64) -> Value {
    json!({"id": id, "from_bus": from, "to_bus": to, "reactance": x, "static_rating_mva": mva})
}

fn candidate(id: &str, from: &str, to: &str, x: f64, mva: f64, musd: f64) -> Value {
    let mut l = line(id, from, to, x, mva);
    l["candidate"] = json!(true);
    l["construction_cost_musd"] = json!(musd);
    l
}

fn thermal(id: &str, bus: &str, pmin: f64, pmax: f64, cost: f64, on: f64, su: f64) -> Value {
    json!({
        "id": id, "bus": bus, "p_min_mw": pmin, "p_max_mw": pmax, "marginal_cost": cost,
        "online_cost": on, "startup_cost": su,
    })
}

/// Five buses on a chain from the load centre (1) out to a remote wind
/// farm (5). The wind export corridor 4-5 is the planning question.
fn five_bus(name: &str, epochs: usize, growth: &[f64], export_mva: f64, g2_mw: f64) -> Value {
    json!({
        "name": name,
        "base_mva": 100.0,
        "horizon": horizon(epochs, growth),
        "buses": buses(),
        "lines": [
            line("l1", "1", "2", 0.1, 200.0),
            line("l2", "1", "3", 0.1, 250.0),
            line("l3", "3", "4", 0.1, 250.0),
            line("l4", "4", "5", 0.08, export_mva),
            candidate("c1", "4", "5", 0.08, export_mva, 2.0),
            candidate("c2", "2", "4", 0.1, 100.0, 4.0),
        ],
        "generators": [
            thermal("g1", "1", 0.0, 250.0, 55.0, 200.0, 800.0),
            thermal("g2", "2", 20.0, g2_mw, 25.0, 150.0, 600.0),
        ],
        "renewables": [
            {"id": "w5", "bus": "5", "kind": "wind", "capacity_mw": 240.0},
        ],
    })
}

const LOADS: [(&str, f64); 5] = [("1", 120.0), ("2", 70.0), ("3", 60.0), ("4", 20.0), ("5", 10.0)];

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    s
}

fn study(weather: &str, extra: &str) -> String {
    format!(
        r#"cases = ["FR", "FGI", "FGTI"]

[paths]
grid = "grid.json"
weather = "{weather}"
load = "load.csv"
generation = "gen_plan.json"
output = "out"

[profiles]
policy = "conservative"
{extra}
[tep]
variant = "ci"
case = "FGI"
theta_bound = 0.6

[scuc]
shed_penalty = 10000
reserve_required = false
initially_on = []
"#
    )
}

/// Every fixture file as (path relative to the fixture root, contents).
pub fn fixtures() -> Vec<(String, String)> {
    let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day).unwrap();
    let mut out = Vec::new();
    let mut put = |p: &str, s: String| out.push((p.to_string(), s));

    put("common/weather.csv", weather_csv(&BUSES, &dates(d(2021, 1, 1), d(2023, 12, 31))));

    put("tutorial/grid.json", pretty(&five_bus("tutorial", 2, &[], 120.0, 200.0)));
    put("tutorial/load.csv", load_csv(&LOADS, &dates(d(2021, 1, 1), d(2021, 12, 31))));
    put(
        "tutorial/gen_plan.json",
        pretty(&json!([
            {"asset_id": "s3", "kind": "solar", "bus": "3", "capacity_mw": 80.0, "commission_epoch": 2,
             "capital_cost_musd": 60.0},
            {"asset_id": "g6", "kind": "thermal", "bus": "1", "capacity_mw": 100.0, "commission_epoch": 2,
             "p_min_mw": 20.0, "marginal_cost": 40.0, "online_cost": 100.0, "startup_cost": 400.0,
             "capital_cost_musd": 90.0},
        ])),
    );
    put("tutorial/study.toml", study("../common/weather.csv", "require_full_coverage = true\n"));

    put("growth/grid.json", pretty(&five_bus("growth", 3, &[1.0, 1.1, 1.6], 100.0, 150.0)));
    put("growth/load.csv", load_csv(&LOADS, &dates(d(2021, 1, 1), d(2021, 12, 31))));
    put(
        "growth/gen_plan.json",
        pretty(&json!([
            {"asset_id": "g7", "kind": "thermal", "bus": "5", "capacity_mw": 150.0, "commission_epoch": 2,
             "p_min_mw": 20.0, "marginal_cost": 30.0, "online_cost": 100.0, "startup_cost": 400.0,
             "capital_cost_musd": 120.0},
        ])),
    );
    put("growth/study.toml", study("../common/weather.csv", "require_full_coverage = true\n"));

    // One quarter, four days (Friday to Monday), partial coverage.
    let days = dates(d(2021, 1, 8), d(2021, 1, 11));
    put(
        "two_bus/grid.json",
        pretty(&json!({
            "name": "two_bus",
            "base_mva": 100.0,
            "horizon": horizon(1, &[]),
            "buses": [
                {"id": "1", "latitude": 30.27, "longitude": -97.74},
                {"id": "5", "latitude": 34.18, "longitude": -101.72},
            ],
            "lines": [line("l1", "1", "5", 0.1, 80.0)],
            "generators": [thermal("g1", "1", 10.0, 150.0, 30.0, 50.0, 200.0)],
            "renewables": [
                {"id": "w5", "bus": "5", "kind": "wind", "capacity_mw": 60.0},
                {"id": "s1", "bus": "1", "kind": "solar", "capacity_mw": 30.0},
            ],
        })),
    );
    put("two_bus/weather.csv", weather_csv(&["1", "5"], &days));
    put("two_bus/load.csv", load_csv(&[("1", 90.0), ("5", 15.0)], &days));
    put("two_bus/gen_plan.json", "[]\n".to_string());
    put("two_bus/study.toml", study("weather.csv", "require_full_coverage = false\n"));
    out
}

pub fn default_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn main() -> std::io::Result<()> {
    let root = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(default_root);
    for (rel, body) in fixtures() {
        let path = root.join(rel);
        std::fs::create_dir_all(path.parent().unwrap())?;
        std::fs::write(&path, body)?;
        println!("{}", path.display());
    }
    Ok(())
}
