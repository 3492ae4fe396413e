//! Multi-epoch transmission expansion planning with time-varying line
//! ratings and renewable availability, plus the static-profile baseline.

mod model;
mod solution;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{BuildPlan, DayType, GridError, GridModel, DEFAULT_THETA_BOUND};
use crate::milp::{MilpError, SolveStatus};
use crate::profiles::{ProfileError, ProfileSet};

pub use model::{build_tep, build_tep_ci, build_tep_traditional, fix_plan, traditional_profiles, TepMap, TepModel};
pub use solution::{
    diagnose_infeasibility, evaluate_plan, extract_tep_solution, solve_tep, PlanCosts, PlanFile, TepSolution,
    Uncovered,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Time-varying ratings and renewables.
    #[default]
    Ci,
    /// Per-quarter minimum ratings and mean renewables, constant over the day.
    Traditional,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Ci => "ci",
            Variant::Traditional => "traditional",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TepInstance {
    /// Grid with generation investments applied.
    pub grid: GridModel,
    pub profiles: ProfileSet,
    pub variant: Variant,
    pub theta_bound: f64,
    /// Adds penalized load shedding to the balance.
    pub shed_allowed: bool,
    /// $/MWh, used only with `shed_allowed`.
    pub shed_penalty: f64,
}

impl TepInstance {
    pub fn new(grid: GridModel, profiles: ProfileSet) -> Self {
        TepInstance {
            grid,
            profiles,
            variant: Variant::Ci,
            theta_bound: DEFAULT_THETA_BOUND,
            shed_allowed: false,
            shed_penalty: 10_000.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum TepError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error("planning model is {0}")]
    Status(SolveStatus),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
}

/// `Σ v_{k,p} C_k (1 + (N^P − p + 1) R^M N^Y)` in dollars.
pub fn capital_cost(plan: &BuildPlan, grid: &GridModel) -> f64 {
    plan.lines
        .iter()
        .map(|b| {
            let c = grid
                .lines
                .iter()
                .find(|l| l.id == b.line_id)
                .map_or(0.0, |l| l.construction_cost_usd());
            c * capital_factor(grid, b.construction_epoch)
        })
        .fold(0.0, |a, x| a + x)
}

/// Construction plus maintenance for the remaining horizon, per $ of
/// construction cost, for a line first in service in `epoch`.
pub(crate) fn capital_factor(grid: &GridModel, epoch: usize) -> f64 {
    let h = &grid.horizon;
    1.0 + (h.num_epochs - epoch + 1) as f64 * h.maintenance_ratio * h.years_per_epoch as f64
}

/// Thermal dispatch in MW keyed by `(generator, epoch, quarter, day type)`.
pub type Dispatch = BTreeMap<(String, usize, usize, DayType), Vec<f64>>;

/// Fuel cost of `dispatch` over the horizon: each typical day stands for
/// `N^D` or `N^E` days per quarter and each epoch for `N^Y` years.
pub fn operation_cost(dispatch: &Dispatch, grid: &GridModel) -> f64 {
    let h = &grid.horizon;
    let cost: BTreeMap<&str, f64> = grid.generators.iter().map(|g| (g.id.as_str(), g.marginal_cost)).collect();
    let mut total = 0.0;
    for ((g, _p, _q, d), mw) in dispatch {
        let c = cost.get(g.as_str()).copied().unwrap_or(0.0);
        let energy: f64 = mw.iter().map(|x| x * h.interval_hours).sum();
        total += h.years_per_epoch as f64 * h.day_weight(*d) * energy * c;
    }
    total
}
