//! Problem and solution containers shared by the LP and MILP solvers.

use std::collections::HashMap;

use super::MilpError;

/// Index of a variable inside a [`MilpProblem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    Equal,
    GreaterEq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
    /// Objective coefficient.
    pub cost: f64,
}

/// A linear row `sum(coeffs) <relation> rhs`.
///
/// Coefficients are kept sorted by variable index with duplicates merged and
/// exact zeros dropped, so two rows with the same content compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    /// Amount by which `values` violate this row (zero when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.relation {
            Relation::LessEq => (lhs - self.rhs).max(0.0),
            Relation::GreaterEq => (self.rhs - lhs).max(0.0),
            Relation::Equal => (lhs - self.rhs).abs(),
        }
    }
}

/// A minimization MILP over continuous and binary variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MilpProblem {
    pub name: String,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective_constant: f64,
}

pub(crate) fn normalize_coeffs(mut coeffs: Vec<(VarId, f64)>) -> Vec<(VarId, f64)> {
    coeffs.sort_by_key(|&(v, _)| v);
    let mut out: Vec<(VarId, f64)> = Vec::with_capacity(coeffs.len());
    for (v, a) in coeffs {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += a,
            _ => out.push((v, a)),
        }
    }
    out.retain(|&(_, a)| a != 0.0);
    out
}

impl MilpProblem {
    pub fn new(name: impl Into<String>) -> Self {
        MilpProblem {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        kind: VarKind,
        cost: f64,
    ) -> VarId {
        let id = VarId(self.variables.len());
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
            kind,
            cost,
        });
        id
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64, cost: f64) -> VarId {
        self.add_var(name, lower, upper, VarKind::Continuous, cost)
    }

    pub fn add_binary(&mut self, name: impl Into<String>, cost: f64) -> VarId {
        self.add_var(name, 0.0, 1.0, VarKind::Binary, cost)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> usize {
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs: normalize_coeffs(coeffs),
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn var_mut(&mut self, id: VarId) -> &mut Variable {
        &mut self.variables[id.0]
    }

    pub fn has_integers(&self) -> bool {
        self.variables.iter().any(|v| v.kind == VarKind::Binary)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective_constant
            + self
                .variables
                .iter()
                .zip(values)
                .map(|(v, x)| v.cost * x)
                .sum::<f64>()
    }

    /// Copy of the problem with every binary relaxed to a continuous variable.
    pub fn relaxed(&self) -> MilpProblem {
        let mut p = self.clone();
        for v in &mut p.variables {
            v.kind = VarKind::Continuous;
        }
        p
    }

    /// Largest bound or row violation of `values` (binaries are not checked
    /// for integrality here).
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let bounds = self
            .variables
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0));
        let rows = self.constraints.iter().map(|c| c.violation(values));
        bounds.chain(rows).fold(0.0, f64::max)
    }

    /// Checks the structural invariants: ordered bounds, binaries within
    /// `[0, 1]`, unique names, finite coefficients.
    pub fn validate(&self) -> Result<(), MilpError> {
        let mut seen = HashMap::with_capacity(self.variables.len());
        for (j, v) in self.variables.iter().enumerate() {
            if v.name.is_empty() || v.name.chars().any(char::is_whitespace) {
                return Err(MilpError::Invalid(format!("variable {j} has an invalid name {:?}", v.name)));
            }
            if seen.insert(v.name.as_str(), j).is_some() {
                return Err(MilpError::Invalid(format!("duplicate variable name {}", v.name)));
            }
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(MilpError::Invalid(format!(
                    "variable {} has bounds [{}, {}]",
                    v.name, v.lower, v.upper
                )));
            }
            if v.lower == f64::INFINITY || v.upper == f64::NEG_INFINITY {
                return Err(MilpError::Invalid(format!("variable {} has an empty domain", v.name)));
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(MilpError::Invalid(format!(
                    "binary variable {} has bounds outside [0, 1]",
                    v.name
                )));
            }
            if !v.cost.is_finite() {
                return Err(MilpError::Invalid(format!("variable {} has a non-finite cost", v.name)));
            }
        }
        let mut rows = HashMap::with_capacity(self.constraints.len());
        for c in &self.constraints {
            if c.name.is_empty() || c.name.chars().any(char::is_whitespace) {
                return Err(MilpError::Invalid(format!("constraint has an invalid name {:?}", c.name)));
            }
            if rows.insert(c.name.as_str(), ()).is_some() || seen.contains_key(c.name.as_str()) {
                return Err(MilpError::Invalid(format!("duplicate row name {}", c.name)));
            }
            if !c.rhs.is_finite() {
                return Err(MilpError::Invalid(format!("constraint {} has a non-finite rhs", c.name)));
            }
            for &(v, a) in &c.coeffs {
                if v.0 >= self.variables.len() {
                    return Err(MilpError::Invalid(format!(
                        "constraint {} references unknown variable {}",
                        c.name, v.0
                    )));
                }
                if !a.is_finite() {
                    return Err(MilpError::Invalid(format!(
                        "constraint {} has a non-finite coefficient",
                        c.name
                    )));
                }
            }
        }
        if !self.objective_constant.is_finite() {
            return Err(MilpError::Invalid("non-finite objective constant".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub feasibility_tol: f64,
    pub integrality_tol: f64,
    pub relative_gap: f64,
    pub node_limit: usize,
    /// Seconds; `None` means unlimited.
    pub time_limit: Option<f64>,
    /// Simplex iteration cap per LP solve.
    pub iteration_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feasibility_tol: 1e-7,
            integrality_tol: 1e-6,
            relative_gap: 1e-6,
            node_limit: 200_000,
            time_limit: None,
            iteration_limit: 1_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), MilpError> {
        for (name, v) in [
            ("feasibility_tol", self.feasibility_tol),
            ("integrality_tol", self.integrality_tol),
            ("relative_gap", self.relative_gap),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(MilpError::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(t) = self.time_limit {
            if !(t > 0.0) {
                return Err(MilpError::Invalid(format!("time_limit must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node, iteration or time limit reached; values hold the incumbent if any.
    Limit,
    /// The LP kernel lost numerical stability and gave up.
    NumericalFailure,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::Limit => "limit",
            SolveStatus::NumericalFailure => "numerical_failure",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: SolveStatus,
    /// Variable values; empty when no feasible point is known.
    pub values: Vec<f64>,
    pub objective: f64,
    /// Best proven lower bound.
    pub bound: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
}

impl MilpSolution {
    pub fn has_values(&self) -> bool {
        !self.values.is_empty()
    }

    pub(crate) fn without_values(status: SolveStatus, nodes: usize, iterations: usize) -> Self {
        MilpSolution {
            status,
            values: Vec::new(),
            objective: f64::NAN,
            bound: f64::NAN,
            nodes,
            lp_iterations: iterations,
        }
    }
}
