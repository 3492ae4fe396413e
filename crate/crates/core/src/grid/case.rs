use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::types::{Bus, GridModel, Line, RenewableKind, RenewablePlant, ThermalGenerator};
use super::{read_text, GridError};

/// Study case: reference grid, with generation investment, or with generation
/// and transmission investment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Case {
    FR,
    FGI,
    FGTI,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::FR, Case::FGI, Case::FGTI];

    pub fn as_str(self) -> &'static str {
        match self {
            Case::FR => "FR",
            Case::FGI => "FGI",
            Case::FGTI => "FGTI",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Case {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "FR" => Ok(Case::FR),
            "FGI" => Ok(Case::FGI),
            "FGTI" => Ok(Case::FGTI),
            _ => Err(format!("unknown case {s:?} (expected FR, FGI or FGTI)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvestmentKind {
    Thermal,
    Wind,
    Solar,
}

/// One entry of a generation-investment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenInvestment {
    pub asset_id: String,
    pub kind: InvestmentKind,
    pub bus: String,
    pub capacity_mw: f64,
    pub commission_epoch: usize,
    #[serde(default)]
    pub marginal_cost: f64,
    #[serde(default)]
    pub online_cost: f64,
    #[serde(default)]
    pub startup_cost: f64,
    #[serde(default)]
    pub p_min_mw: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_mw_per_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reserve_ramp_mw: Option<f64>,
    /// Informational; generation capital is decided outside this toolkit.
    #[serde(default)]
    pub capital_cost_musd: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GenerationPlan {
    pub assets: Vec<GenInvestment>,
}

impl GenerationPlan {
    pub fn load(path: &Path) -> Result<Self, GridError> {
        let text = read_text(path)?;
        serde_json::from_str(&text).map_err(|e| GridError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineBuild {
    pub line_id: String,
    pub construction_epoch: usize,
}

/// Candidate lines and the epoch each is first in service.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildPlan {
    pub lines: Vec<LineBuild>,
}

impl BuildPlan {
    pub fn built_by(&self, line_id: &str, epoch: usize) -> bool {
        self.lines
            .iter()
            .any(|b| b.line_id == line_id && b.construction_epoch <= epoch)
    }
}

/// The system as operated in one epoch: commissioned units with that epoch's
/// limits, existing lines plus built candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochView {
    pub epoch: usize,
    pub base_mva: f64,
    pub interval_hours: f64,
    pub reference_bus: String,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<ThermalGenerator>,
    pub renewables: Vec<RenewablePlant>,
}

/// Add the generation investments to the fleet as new units.
pub fn with_generation(grid: &GridModel, plan: &GenerationPlan) -> Result<GridModel, GridError> {
    let np = grid.horizon.num_epochs;
    let buses: HashSet<&str> = grid.buses.iter().map(|b| b.id.as_str()).collect();
    let mut g = grid.clone();
    for a in &plan.assets {
        if !buses.contains(a.bus.as_str()) {
            return Err(GridError::UnknownAsset(format!("bus {} (asset {})", a.bus, a.asset_id)));
        }
        if a.commission_epoch == 0 || a.commission_epoch > np {
            return Err(GridError::EpochOutOfRange {
                epoch: a.commission_epoch,
                num_epochs: np,
            });
        }
        match a.kind {
            InvestmentKind::Thermal => g.generators.push(ThermalGenerator {
                id: a.asset_id.clone(),
                bus: a.bus.clone(),
                p_min_mw: a.p_min_mw,
                p_max_mw: a.capacity_mw,
                marginal_cost: a.marginal_cost,
                online_cost: a.online_cost,
                startup_cost: a.startup_cost,
                ramp_mw_per_h: a.ramp_mw_per_h,
                reserve_ramp_mw: a.reserve_ramp_mw,
                commission_epoch: Some(a.commission_epoch),
                p_min_by_epoch: Vec::new(),
                p_max_by_epoch: Vec::new(),
            }),
            InvestmentKind::Wind | InvestmentKind::Solar => {
                let kind = if a.kind == InvestmentKind::Wind {
                    RenewableKind::Wind
                } else {
                    RenewableKind::Solar
                };
                let mut r = RenewablePlant::new(&a.asset_id, &a.bus, kind, a.capacity_mw);
                r.p_min_mw = a.p_min_mw;
                r.commission_epoch = Some(a.commission_epoch);
                g.renewables.push(r);
            }
        }
    }
    g.validate()?;
    Ok(g)
}

fn epoch_views(grid: &GridModel, tep: &BuildPlan) -> Result<Vec<EpochView>, GridError> {
    let np = grid.horizon.num_epochs;
    for b in &tep.lines {
        if !grid.lines.iter().any(|l| l.candidate && l.id == b.line_id) {
            return Err(GridError::UnknownAsset(format!("candidate line {}", b.line_id)));
        }
        if b.construction_epoch == 0 || b.construction_epoch > np {
            return Err(GridError::EpochOutOfRange {
                epoch: b.construction_epoch,
                num_epochs: np,
            });
        }
    }
    Ok((1..=np)
        .map(|p| EpochView {
            epoch: p,
            base_mva: grid.base_mva,
            interval_hours: grid.horizon.interval_hours,
            reference_bus: grid.reference_bus().to_string(),
            buses: grid.buses.clone(),
            lines: grid
                .lines
                .iter()
                .filter(|l| !l.candidate || tep.built_by(&l.id, p))
                .map(|l| Line {
                    candidate: false,
                    ..l.clone()
                })
                .collect(),
            generators: grid
                .generators
                .iter()
                .filter(|g| g.online_in(p))
                .map(|g| ThermalGenerator {
                    p_min_mw: g.p_min_at(p),
                    p_max_mw: g.p_max_at(p),
                    p_min_by_epoch: Vec::new(),
                    p_max_by_epoch: Vec::new(),
                    ..g.clone()
                })
                .collect(),
            renewables: grid
                .renewables
                .iter()
                .filter(|r| r.online_in(p))
                .cloned()
                .collect(),
        })
        .collect())
}

/// Per-epoch views after applying a generation plan and an optional
/// transmission plan.
pub fn apply_investments(
    grid: &GridModel,
    gen_plan: &GenerationPlan,
    tep_plan: Option<&BuildPlan>,
) -> Result<Vec<EpochView>, GridError> {
    let g = with_generation(grid, gen_plan)?;
    epoch_views(&g, tep_plan.unwrap_or(&BuildPlan::default()))
}

/// Views for a named case. FR ignores both plans, FGI applies only the
/// generation plan and FGTI needs the transmission plan as well.
pub fn case_views(
    grid: &GridModel,
    case: Case,
    gen_plan: &GenerationPlan,
    tep_plan: Option<&BuildPlan>,
) -> Result<Vec<EpochView>, GridError> {
    match case {
        Case::FR => apply_investments(grid, &GenerationPlan::default(), None),
        Case::FGI => apply_investments(grid, gen_plan, None),
        Case::FGTI => {
            let plan = tep_plan.ok_or_else(|| GridError::Parse {
                path: PathBuf::from("<plan>"),
                message: "FGTI case needs a transmission plan".into(),
            })?;
            apply_investments(grid, gen_plan, Some(plan))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::parse_grid;

    fn grid() -> GridModel {
        parse_grid(
            r#"{
          "base_mva": 100,
          "horizon": {"num_epochs": 3, "years_per_epoch": 5, "weekdays_per_quarter": 65,
                      "weekend_days_per_quarter": 26, "intervals_per_day": 8, "interval_hours": 3},
          "buses": [{"id": "1", "latitude": 30, "longitude": -97},
                    {"id": "2", "latitude": 31, "longitude": -96}],
          "lines": [{"id": "l1", "from_bus": "1", "to_bus": "2", "reactance": 0.1, "static_rating_mva": 50},
                    {"id": "c1", "from_bus": "1", "to_bus": "2", "reactance": 0.1, "static_rating_mva": 50,
                     "candidate": true, "construction_cost_musd": 10}],
          "generators": [{"id": "g1", "bus": "1", "p_min_mw": 0, "p_max_mw": 100, "marginal_cost": 10}]
        }"#,
        )
        .unwrap()
    }

    fn wind_plan() -> GenerationPlan {
        serde_json::from_str(
            r#"[{"asset_id": "w_new", "kind": "wind", "bus": "2", "capacity_mw": 100, "commission_epoch": 2}]"#,
        )
        .unwrap()
    }

    #[test]
    fn empty_plans_are_identity() {
        let g = grid();
        let views = apply_investments(&g, &GenerationPlan::default(), None).unwrap();
        assert_eq!(views.len(), 3);
        for v in &views {
            assert_eq!(v.generators, g.generators);
            assert_eq!(v.renewables, g.renewables);
            assert_eq!(v.lines, vec![g.lines[0].clone()]);
        }
        assert_eq!(views, case_views(&g, Case::FR, &wind_plan(), None).unwrap());
    }

    #[test]
    fn commissioning_semantics() {
        let views = apply_investments(&grid(), &wind_plan(), None).unwrap();
        assert!(views[0].renewables.is_empty());
        assert_eq!(views[1].renewables[0].id, "w_new");
        assert_eq!(views[2].renewables[0].id, "w_new");
    }

    #[test]
    fn built_line_appears_as_existing() {
        let plan = BuildPlan {
            lines: vec![LineBuild {
                line_id: "c1".into(),
                construction_epoch: 1,
            }],
        };
        let views = apply_investments(&grid(), &wind_plan(), Some(&plan)).unwrap();
        for v in &views {
            let c1 = v.lines.iter().find(|l| l.id == "c1").unwrap();
            assert!(!c1.candidate);
        }
    }

    #[test]
    fn unknown_assets_are_rejected() {
        let plan = BuildPlan {
            lines: vec![LineBuild {
                line_id: "zz".into(),
                construction_epoch: 1,
            }],
        };
        assert!(matches!(
            apply_investments(&grid(), &GenerationPlan::default(), Some(&plan)),
            Err(GridError::UnknownAsset(_))
        ));
        let mut gp = wind_plan();
        gp.assets[0].bus = "9".into();
        assert!(matches!(apply_investments(&grid(), &gp, None), Err(GridError::UnknownAsset(_))));
        assert!(case_views(&grid(), Case::FGTI, &gp, None).is_err());
    }

    #[test]
    fn new_thermal_limits_gate_on_epoch() {
        let mut g = grid();
        g.generators[0].commission_epoch = Some(2);
        g.generators[0].p_max_by_epoch = vec![0.0, 80.0, 120.0];
        g.validate().unwrap();
        assert_eq!(g.generators[0].p_max_at(1), 0.0);
        assert_eq!(g.generators[0].p_max_at(2), 80.0);
        assert_eq!(g.generators[0].p_max_at(3), 120.0);
        g.generators[0].p_max_by_epoch = vec![5.0, 80.0, 120.0];
        assert!(g.validate().is_err());
    }
}
