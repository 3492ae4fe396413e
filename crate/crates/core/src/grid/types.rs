use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Default angle bound (rad) used for big-M sizing and angle limits.
pub const DEFAULT_THETA_BOUND: f64 = 0.6;

fn default_start_year() -> i32 {
    2021
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanningHorizon {
    pub num_epochs: usize,
    pub years_per_epoch: usize,
    pub weekdays_per_quarter: usize,
    pub weekend_days_per_quarter: usize,
    pub intervals_per_day: usize,
    pub interval_hours: f64,
    #[serde(default)]
    pub maintenance_ratio: f64,
    /// First calendar year of epoch 1.
    #[serde(default = "default_start_year")]
    pub start_year: i32,
    /// Per-epoch multiplicative load growth; empty means no growth.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub load_growth: Vec<f64>,
}

impl PlanningHorizon {
    pub const QUARTERS: usize = 4;

    pub fn typical_days_per_year(&self) -> usize {
        Self::QUARTERS * 2
    }

    /// Calendar years covered by `epoch` (1-based).
    pub fn epoch_years(&self, epoch: usize) -> Range<i32> {
        let first = self.start_year + ((epoch - 1) * self.years_per_epoch) as i32;
        first..first + self.years_per_epoch as i32
    }

    pub fn growth(&self, epoch: usize) -> f64 {
        self.load_growth.get(epoch - 1).copied().unwrap_or(1.0)
    }

    /// Number of calendar days per quarter represented by one typical day.
    pub fn day_weight(&self, day: DayType) -> f64 {
        match day {
            DayType::Weekday => self.weekdays_per_quarter as f64,
            DayType::Weekend => self.weekend_days_per_quarter as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DayType {
    #[serde(rename = "WD")]
    Weekday,
    #[serde(rename = "WE")]
    Weekend,
}

impl DayType {
    pub const ALL: [DayType; 2] = [DayType::Weekday, DayType::Weekend];

    pub fn code(self) -> &'static str {
        match self {
            DayType::Weekday => "WD",
            DayType::Weekend => "WE",
        }
    }
}

impl fmt::Display for DayType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for DayType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "WD" => Ok(DayType::Weekday),
            "WE" => Ok(DayType::Weekend),
            other => Err(format!("unknown day type {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub id: String,
    pub latitude: f64,
    pub longitude: f64,
    /// Key into the load series; the bus id when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_profile: Option<String>,
    /// Per-epoch growth overriding the horizon factors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_growth: Option<Vec<f64>>,
}

impl Bus {
    pub fn load_key(&self) -> &str {
        self.load_profile.as_deref().unwrap_or(&self.id)
    }
}

/// Coefficients of the multiplicative dynamic rating model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DlrCoefficients {
    pub temp_coeff: f64,
    pub temp_ref: f64,
    pub wind_coeff: f64,
    pub wind_ref: f64,
    pub wind_cap: f64,
    pub solar_coeff: f64,
    pub solar_ref: f64,
    pub clip_lo: f64,
    pub clip_hi: f64,
}

impl Default for DlrCoefficients {
    fn default() -> Self {
        DlrCoefficients {
            temp_coeff: 0.005,
            temp_ref: 25.0,
            wind_coeff: 0.01,
            wind_ref: 0.6,
            wind_cap: 10.0,
            solar_coeff: 0.05,
            solar_ref: 1000.0,
            clip_lo: 0.5,
            clip_hi: 1.5,
        }
    }
}

impl DlrCoefficients {
    pub fn check(&self) -> Vec<String> {
        let mut e = Vec::new();
        let c = [self.temp_coeff, self.wind_coeff, self.solar_coeff, self.wind_cap];
        if c.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            e.push("DLR coefficients must be finite and nonnegative".into());
        }
        if !(self.temp_ref.is_finite() && self.wind_ref.is_finite() && self.solar_ref > 0.0) {
            e.push("DLR reference values must be finite, solar_ref positive".into());
        }
        if !(0.0 <= self.clip_lo && self.clip_lo <= 1.0 && 1.0 <= self.clip_hi && self.clip_hi.is_finite()) {
            e.push("DLR clip range must satisfy 0 <= lo <= 1 <= hi".into());
        }
        if self.clip_lo == 0.0 {
            e.push("DLR lower clip must be positive so ratings stay positive".into());
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Line {
    pub id: String,
    pub from_bus: String,
    pub to_bus: String,
    /// Per-unit on the system base.
    pub reactance: f64,
    pub static_rating_mva: f64,
    #[serde(default)]
    pub candidate: bool,
    #[serde(default)]
    pub construction_cost_musd: f64,
    /// Explicit big-M (per-unit flow); otherwise derived from the angle bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dlr: Option<DlrCoefficients>,
}

impl Line {
    pub fn construction_cost_usd(&self) -> f64 {
        self.construction_cost_musd * 1e6
    }

    /// `M_k = 2 θ_bound / x_k` unless overridden on the line.
    pub fn big_m_pu(&self, default_theta_bound: f64) -> f64 {
        self.big_m
            .unwrap_or_else(|| 2.0 * self.theta_bound.unwrap_or(default_theta_bound) / self.reactance)
    }

    pub fn dlr(&self) -> DlrCoefficients {
        self.dlr.clone().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalGenerator {
    pub id: String,
    pub bus: String,
    pub p_min_mw: f64,
    pub p_max_mw: f64,
    /// $/MWh
    pub marginal_cost: f64,
    /// $ per online interval
    #[serde(default)]
    pub online_cost: f64,
    #[serde(default)]
    pub startup_cost: f64,
    /// MW per hour; the per-interval limit is this times the interval length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_mw_per_h: Option<f64>,
    /// Spinning reserve deliverable within the reserve window, MW.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reserve_ramp_mw: Option<f64>,
    /// None for existing units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commission_epoch: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p_min_by_epoch: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p_max_by_epoch: Vec<f64>,
}

impl ThermalGenerator {
    pub fn online_in(&self, epoch: usize) -> bool {
        self.commission_epoch.is_none_or(|c| epoch >= c)
    }

    pub fn p_max_at(&self, epoch: usize) -> f64 {
        if !self.online_in(epoch) {
            return 0.0;
        }
        self.p_max_by_epoch.get(epoch - 1).copied().unwrap_or(self.p_max_mw)
    }

    pub fn p_min_at(&self, epoch: usize) -> f64 {
        if !self.online_in(epoch) {
            return 0.0;
        }
        self.p_min_by_epoch.get(epoch - 1).copied().unwrap_or(self.p_min_mw)
    }

    pub fn reserve_ramp(&self) -> f64 {
        self.reserve_ramp_mw.unwrap_or(self.p_max_mw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenewableKind {
    Wind,
    Solar,
}

fn d_hub() -> f64 {
    80.0
}
fn d_z0() -> f64 {
    0.03
}
fn d_cut_in() -> f64 {
    3.0
}
fn d_rated() -> f64 {
    12.0
}
fn d_cut_out() -> f64 {
    25.0
}
fn d_fsw() -> f64 {
    0.85
}
fn d_flw() -> f64 {
    0.05
}
fn d_gref() -> f64 {
    1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenewablePlant {
    pub id: String,
    pub bus: String,
    pub kind: RenewableKind,
    pub capacity_mw: f64,
    #[serde(default)]
    pub p_min_mw: f64,
    #[serde(default = "d_hub")]
    pub hub_height_m: f64,
    #[serde(default = "d_z0")]
    pub roughness_m: f64,
    #[serde(default = "d_cut_in")]
    pub cut_in_mps: f64,
    #[serde(default = "d_rated")]
    pub rated_mps: f64,
    #[serde(default = "d_cut_out")]
    pub cut_out_mps: f64,
    #[serde(default = "d_fsw")]
    pub f_sw: f64,
    #[serde(default = "d_flw")]
    pub f_lw: f64,
    #[serde(default = "d_gref")]
    pub g_ref: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commission_epoch: Option<usize>,
}

impl RenewablePlant {
    pub fn new(id: &str, bus: &str, kind: RenewableKind, capacity_mw: f64) -> Self {
        RenewablePlant {
            id: id.into(),
            bus: bus.into(),
            kind,
            capacity_mw,
            p_min_mw: 0.0,
            hub_height_m: d_hub(),
            roughness_m: d_z0(),
            cut_in_mps: d_cut_in(),
            rated_mps: d_rated(),
            cut_out_mps: d_cut_out(),
            f_sw: d_fsw(),
            f_lw: d_flw(),
            g_ref: d_gref(),
            commission_epoch: None,
        }
    }

    pub fn online_in(&self, epoch: usize) -> bool {
        self.commission_epoch.is_none_or(|c| epoch >= c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridModel {
    #[serde(default)]
    pub name: String,
    pub base_mva: f64,
    pub horizon: PlanningHorizon,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    #[serde(default)]
    pub generators: Vec<ThermalGenerator>,
    #[serde(default)]
    pub renewables: Vec<RenewablePlant>,
}
