//! Power system data model: buses, lines, thermal and renewable fleets, the
//! planning horizon, and the FR/FGI/FGTI investment cases.

mod case;
mod types;

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use case::{
    apply_investments, case_views, with_generation, BuildPlan, Case, EpochView, GenInvestment,
    GenerationPlan, InvestmentKind, LineBuild,
};
pub use types::{
    Bus, DayType, DlrCoefficients, GridModel, Line, PlanningHorizon, RenewableKind, RenewablePlant,
    ThermalGenerator, DEFAULT_THETA_BOUND,
};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid grid:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("plan references unknown asset {0}")]
    UnknownAsset(String),
    #[error("plan epoch {epoch} outside horizon 1..={num_epochs}")]
    EpochOutOfRange { epoch: usize, num_epochs: usize },
    #[error("per-unit base must be positive, got {0}")]
    NonpositiveBase(f64),
}

pub fn to_per_unit(value: f64, base: f64) -> Result<f64, GridError> {
    if !(base > 0.0) {
        return Err(GridError::NonpositiveBase(base));
    }
    Ok(value / base)
}

pub fn from_per_unit(value: f64, base: f64) -> Result<f64, GridError> {
    if !(base > 0.0) {
        return Err(GridError::NonpositiveBase(base));
    }
    Ok(value * base)
}

pub(crate) fn read_text(path: &Path) -> Result<String, GridError> {
    fs::read_to_string(path).map_err(|source| GridError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parse and validate a grid file.
pub fn load_grid(path: &Path) -> Result<GridModel, GridError> {
    let text = read_text(path)?;
    let grid = parse_grid(&text).map_err(|e| match e {
        GridError::Parse { message, .. } => GridError::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })?;
    Ok(grid)
}

pub fn parse_grid(text: &str) -> Result<GridModel, GridError> {
    let grid: GridModel = serde_json::from_str(text).map_err(|e| GridError::Parse {
        path: PathBuf::from("<grid>"),
        message: e.to_string(),
    })?;
    grid.validate()?;
    Ok(grid)
}

pub fn grid_to_string(grid: &GridModel) -> String {
    serde_json::to_string_pretty(grid).expect("grid model serializes")
}

pub fn save_grid(grid: &GridModel, path: &Path) -> Result<(), GridError> {
    fs::write(path, grid_to_string(grid) + "\n").map_err(|source| GridError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn check_id(kind: &str, id: &str, errors: &mut Vec<String>) {
    if id.is_empty() {
        errors.push(format!("{kind} with empty id"));
    } else if id.chars().any(|c| c.is_whitespace() || c == ',' || c == '"') {
        errors.push(format!("{kind} {id}: id must not contain whitespace, commas or quotes"));
    }
}

fn finite_nonneg(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

impl GridModel {
    /// Check every documented invariant, reporting all violations at once.
    pub fn validate(&self) -> Result<(), GridError> {
        let mut errors = Vec::new();
        let h = &self.horizon;
        let np = h.num_epochs;
        if !(self.base_mva > 0.0 && self.base_mva.is_finite()) {
            errors.push(format!("base_mva must be positive, got {}", self.base_mva));
        }
        if np == 0 {
            errors.push("horizon: num_epochs must be at least 1".into());
        }
        if h.years_per_epoch == 0 {
            errors.push("horizon: years_per_epoch must be at least 1".into());
        }
        if h.intervals_per_day == 0 || !(h.interval_hours > 0.0) {
            errors.push("horizon: intervals_per_day and interval_hours must be positive".into());
        } else if (h.interval_hours * h.intervals_per_day as f64 - 24.0).abs() > 1e-9 {
            errors.push(format!(
                "horizon: {} intervals of {} h do not cover 24 h",
                h.intervals_per_day, h.interval_hours
            ));
        }
        if h.weekdays_per_quarter + h.weekend_days_per_quarter > 92 {
            errors.push("horizon: weekdays plus weekend days exceed 92 per quarter".into());
        }
        if h.weekdays_per_quarter == 0 || h.weekend_days_per_quarter == 0 {
            errors.push("horizon: both weekday and weekend day counts must be positive".into());
        }
        if !(0.0..1.0).contains(&h.maintenance_ratio) {
            errors.push(format!("horizon: maintenance_ratio {} outside [0, 1)", h.maintenance_ratio));
        }
        if !h.load_growth.is_empty() && h.load_growth.len() != np {
            errors.push(format!("horizon: load_growth has {} entries for {np} epochs", h.load_growth.len()));
        }
        if h.load_growth.iter().any(|g| !finite_nonneg(*g)) {
            errors.push("horizon: load_growth factors must be finite and nonnegative".into());
        }

        let mut bus_ids = HashSet::new();
        for b in &self.buses {
            check_id("bus", &b.id, &mut errors);
            if !bus_ids.insert(b.id.as_str()) {
                errors.push(format!("duplicate bus id {}", b.id));
            }
            if !(b.latitude.is_finite() && b.longitude.is_finite())
                || b.latitude.abs() > 90.0
                || b.longitude.abs() > 180.0
            {
                errors.push(format!("bus {}: invalid coordinates", b.id));
            }
            if let Some(g) = &b.load_growth {
                if g.len() != np || g.iter().any(|x| !finite_nonneg(*x)) {
                    errors.push(format!("bus {}: load_growth needs {np} nonnegative factors", b.id));
                }
            }
        }
        if self.buses.is_empty() {
            errors.push("grid has no buses".into());
        }

        let mut line_ids = HashSet::new();
        for l in &self.lines {
            check_id("line", &l.id, &mut errors);
            if !line_ids.insert(l.id.as_str()) {
                errors.push(format!("duplicate line id {}", l.id));
            }
            for end in [&l.from_bus, &l.to_bus] {
                if !bus_ids.contains(end.as_str()) {
                    errors.push(format!("line {}: unknown bus {end}", l.id));
                }
            }
            if l.from_bus == l.to_bus {
                errors.push(format!("line {}: from and to bus are the same", l.id));
            }
            if !(l.reactance > 0.0 && l.reactance.is_finite()) {
                errors.push(format!("line {}: nonpositive reactance", l.id));
            }
            if !(l.static_rating_mva > 0.0 && l.static_rating_mva.is_finite()) {
                errors.push(format!("line {}: nonpositive static rating", l.id));
            }
            if l.candidate && !(l.construction_cost_musd > 0.0 && l.construction_cost_musd.is_finite()) {
                errors.push(format!("line {}: candidate lines need a positive construction cost", l.id));
            }
            if l.big_m.is_some_and(|m| !(m > 0.0 && m.is_finite())) {
                errors.push(format!("line {}: big_m must be positive", l.id));
            }
            if l.theta_bound.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
                errors.push(format!("line {}: theta_bound must be positive", l.id));
            }
            if let Some(d) = &l.dlr {
                errors.extend(d.check().into_iter().map(|e| format!("line {}: {e}", l.id)));
            }
        }

        let mut asset_ids = HashSet::new();
        for g in &self.generators {
            check_id("generator", &g.id, &mut errors);
            if !asset_ids.insert(g.id.as_str()) {
                errors.push(format!("duplicate generator id {}", g.id));
            }
            if !bus_ids.contains(g.bus.as_str()) {
                errors.push(format!("generator {}: unknown bus {}", g.id, g.bus));
            }
            if !(finite_nonneg(g.p_min_mw) && g.p_max_mw.is_finite() && g.p_min_mw <= g.p_max_mw) {
                errors.push(format!("generator {}: need 0 <= p_min <= p_max", g.id));
            }
            if ![g.marginal_cost, g.online_cost, g.startup_cost].iter().all(|c| finite_nonneg(*c)) {
                errors.push(format!("generator {}: costs must be nonnegative", g.id));
            }
            if g.ramp_mw_per_h.is_some_and(|r| !finite_nonneg(r))
                || g.reserve_ramp_mw.is_some_and(|r| !finite_nonneg(r))
            {
                errors.push(format!("generator {}: ramp limits must be nonnegative", g.id));
            }
            if let Some(c) = g.commission_epoch {
                if c == 0 || c > np {
                    errors.push(format!("generator {}: commission_epoch {c} outside 1..={np}", g.id));
                }
            }
            for (name, v) in [("p_min_by_epoch", &g.p_min_by_epoch), ("p_max_by_epoch", &g.p_max_by_epoch)] {
                if v.is_empty() {
                    continue;
                }
                if v.len() != np || v.iter().any(|x| !finite_nonneg(*x)) {
                    errors.push(format!("generator {}: {name} needs {np} nonnegative values", g.id));
                } else if let Some(c) = g.commission_epoch {
                    if v.iter().take(c.saturating_sub(1)).any(|&x| x != 0.0) {
                        errors.push(format!("generator {}: {name} nonzero before commissioning", g.id));
                    }
                }
            }
            for p in 1..=np {
                if g.p_min_at(p) > g.p_max_at(p) {
                    errors.push(format!("generator {}: p_min exceeds p_max in epoch {p}", g.id));
                }
            }
        }

        for r in &self.renewables {
            check_id("renewable", &r.id, &mut errors);
            if !asset_ids.insert(r.id.as_str()) {
                errors.push(format!("duplicate asset id {}", r.id));
            }
            if !bus_ids.contains(r.bus.as_str()) {
                errors.push(format!("renewable {}: unknown bus {}", r.id, r.bus));
            }
            if !(r.capacity_mw > 0.0 && r.capacity_mw.is_finite()) {
                errors.push(format!("renewable {}: nonpositive capacity", r.id));
            }
            if !(finite_nonneg(r.p_min_mw) && r.p_min_mw <= r.capacity_mw) {
                errors.push(format!("renewable {}: need 0 <= p_min <= capacity", r.id));
            }
            if let Some(c) = r.commission_epoch {
                if c == 0 || c > np {
                    errors.push(format!("renewable {}: commission_epoch {c} outside 1..={np}", r.id));
                }
            }
            match r.kind {
                RenewableKind::Wind => {
                    if !(r.roughness_m > 0.0 && r.roughness_m <= 2.0) {
                        errors.push(format!("renewable {}: roughness z0 outside (0, 2]", r.id));
                    }
                    if !(r.hub_height_m > r.roughness_m) {
                        errors.push(format!("renewable {}: hub height must exceed z0", r.id));
                    }
                    if !(0.0 < r.cut_in_mps && r.cut_in_mps < r.rated_mps && r.rated_mps < r.cut_out_mps) {
                        errors.push(format!("renewable {}: need 0 < cut-in < rated < cut-out", r.id));
                    }
                }
                RenewableKind::Solar => {
                    if !(finite_nonneg(r.f_sw) && finite_nonneg(r.f_lw) && r.g_ref > 0.0) {
                        errors.push(format!("renewable {}: invalid spectral fractions or g_ref", r.id));
                    }
                }
            }
        }

        if errors.is_empty() && !self.existing_network_connected() {
            errors.push("network over existing lines is not connected".into());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(GridError::Validation(errors))
        }
    }

    fn existing_network_connected(&self) -> bool {
        let index: HashMap<&str, usize> =
            self.buses.iter().enumerate().map(|(i, b)| (b.id.as_str(), i)).collect();
        let mut parent: Vec<usize> = (0..self.buses.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for l in self.lines.iter().filter(|l| !l.candidate) {
            let a = find(&mut parent, index[l.from_bus.as_str()]);
            let b = find(&mut parent, index[l.to_bus.as_str()]);
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..self.buses.len()).all(|i| find(&mut parent, i) == root)
    }

    pub fn bus_index(&self) -> HashMap<&str, usize> {
        self.buses.iter().enumerate().map(|(i, b)| (b.id.as_str(), i)).collect()
    }

    pub fn candidates(&self) -> impl Iterator<Item = &Line> {
        self.lines.iter().filter(|l| l.candidate)
    }

    /// Reference bus: the lowest bus id in lexicographic order.
    pub fn reference_bus(&self) -> &str {
        self.buses
            .iter()
            .map(|b| b.id.as_str())
            .min()
            .expect("validated grids have buses")
    }

    pub fn load_growth(&self, bus: &Bus, epoch: usize) -> f64 {
        match &bus.load_growth {
            Some(g) => g[epoch - 1],
            None => self.horizon.growth(epoch),
        }
    }
}
