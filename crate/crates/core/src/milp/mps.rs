//! Free-format MPS reading and writing.
//!
//! Numbers are written with 17 significant digits so a round trip through a
//! file reproduces every coefficient bit for bit. The objective constant is
//! stored as the negated right-hand side of the objective row, the
//! convention used by the common commercial and open-source solvers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use log::warn;

use super::problem::{normalize_coeffs, Constraint, MilpProblem, Relation, VarKind, Variable};
use super::{MilpError, VarId};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render `problem` as free-format MPS text.
pub fn to_mps_string(problem: &MilpProblem) -> String {
    let mut obj_name = String::from("OBJ");
    let taken = |n: &str| {
        problem.constraints.iter().any(|c| c.name == n) || problem.variables.iter().any(|v| v.name == n)
    };
    let mut k = 1;
    while taken(&obj_name) {
        obj_name = format!("OBJ_{k}");
        k += 1;
    }

    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); problem.variables.len()];
    for (i, c) in problem.constraints.iter().enumerate() {
        for &(v, a) in &c.coeffs {
            columns[v.0].push((i, a));
        }
    }

    let mut out = String::new();
    let name = if problem.name.is_empty() { "problem" } else { problem.name.as_str() };
    let _ = writeln!(out, "NAME {name}");
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N {obj_name}");
    for c in &problem.constraints {
        let t = match c.relation {
            Relation::LessEq => 'L',
            Relation::GreaterEq => 'G',
            Relation::Equal => 'E',
        };
        let _ = writeln!(out, " {t} {}", c.name);
    }
    out.push_str("COLUMNS\n");
    let mut in_marker = false;
    let mut marker_count = 0;
    for (j, v) in problem.variables.iter().enumerate() {
        let is_int = v.kind == VarKind::Binary;
        if is_int != in_marker {
            let tag = if is_int { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, "    MARKER{marker_count} 'MARKER' {tag}");
            marker_count += 1;
            in_marker = is_int;
        }
        if v.cost != 0.0 || columns[j].is_empty() {
            let _ = writeln!(out, "    {} {obj_name} {}", v.name, num(v.cost));
        }
        for &(i, a) in &columns[j] {
            let _ = writeln!(out, "    {} {} {}", v.name, problem.constraints[i].name, num(a));
        }
    }
    if in_marker {
        let _ = writeln!(out, "    MARKER{marker_count} 'MARKER' 'INTEND'");
    }
    out.push_str("RHS\n");
    for c in &problem.constraints {
        if c.rhs != 0.0 {
            let _ = writeln!(out, "    RHS {} {}", c.name, num(c.rhs));
        }
    }
    if problem.objective_constant != 0.0 {
        let _ = writeln!(out, "    RHS {obj_name} {}", num(-problem.objective_constant));
    }
    out.push_str("BOUNDS\n");
    for v in &problem.variables {
        let (lo, hi) = (v.lower, v.upper);
        if v.kind == VarKind::Binary && lo == 0.0 && hi == 1.0 {
            let _ = writeln!(out, " BV BND {}", v.name);
        } else if lo == hi {
            let _ = writeln!(out, " FX BND {} {}", v.name, num(lo));
        } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            let _ = writeln!(out, " FR BND {}", v.name);
        } else {
            if lo == f64::NEG_INFINITY {
                let _ = writeln!(out, " MI BND {}", v.name);
            } else if lo != 0.0 || v.kind == VarKind::Binary {
                let _ = writeln!(out, " LO BND {} {}", v.name, num(lo));
            }
            if hi.is_finite() {
                let _ = writeln!(out, " UP BND {} {}", v.name, num(hi));
            } else if v.kind == VarKind::Binary {
                unreachable!("binary variables have finite bounds");
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

/// Write `problem` to `path`.
pub fn write_mps(problem: &MilpProblem, path: &Path) -> Result<(), MilpError> {
    problem.validate()?;
    let mut f = fs::File::create(path)?;
    f.write_all(to_mps_string(problem).as_bytes())?;
    Ok(())
}

/// Read a fixed- or free-format MPS file (names must not contain spaces).
pub fn read_mps(path: &Path) -> Result<MilpProblem, MilpError> {
    let text = fs::read_to_string(path)?;
    parse_mps(&text)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Name,
    Rows,
    Columns,
    Rhs,
    Bounds,
    ObjSense,
    End,
}

struct ColumnState {
    var: Variable,
    integer: bool,
    lower_set: bool,
}

pub fn parse_mps(text: &str) -> Result<MilpProblem, MilpError> {
    let err = |line: usize, message: String| MilpError::Mps { line, message };
    let mut section = Section::None;
    let mut name = String::new();
    let mut obj_row: Option<String> = None;
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut rows: Vec<(String, Relation, Vec<(VarId, f64)>, f64)> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut cols: Vec<ColumnState> = Vec::new();
    let mut in_integer = false;
    let mut constant = 0.0;
    let mut free_rows: Vec<String> = Vec::new();

    let parse_num = |s: &str, line: usize| -> Result<f64, MilpError> {
        s.parse::<f64>()
            .map_err(|_| err(line, format!("invalid number {s:?}")))
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        let is_header = !raw.starts_with(' ') && !raw.starts_with('\t');
        if is_header {
            section = match tokens[0] {
                "NAME" => {
                    name = tokens.get(1..).map(|t| t.join(" ")).unwrap_or_default();
                    Section::Name
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "OBJSENSE" => {
                    if let Some(sense) = tokens.get(1) {
                        check_sense(sense, line_no)?;
                    }
                    Section::ObjSense
                }
                "ENDATA" => Section::End,
                other => return Err(MilpError::UnsupportedSection(other.to_string())),
            };
            if section == Section::End {
                break;
            }
            continue;
        }
        match section {
            Section::None | Section::Name | Section::End => {
                return Err(err(line_no, "data line outside of a section".into()));
            }
            Section::ObjSense => check_sense(tokens[0], line_no)?,
            Section::Rows => {
                if tokens.len() != 2 {
                    return Err(err(line_no, "ROWS entries need a type and a name".into()));
                }
                let rel = match tokens[0] {
                    "N" => {
                        if obj_row.is_none() {
                            obj_row = Some(tokens[1].to_string());
                        } else {
                            free_rows.push(tokens[1].to_string());
                        }
                        continue;
                    }
                    "L" => Relation::LessEq,
                    "G" => Relation::GreaterEq,
                    "E" => Relation::Equal,
                    t => return Err(err(line_no, format!("unknown row type {t}"))),
                };
                if row_index.insert(tokens[1].to_string(), rows.len()).is_some() {
                    return Err(err(line_no, format!("duplicate row {}", tokens[1])));
                }
                rows.push((tokens[1].to_string(), rel, Vec::new(), 0.0));
            }
            Section::Columns => {
                if tokens.len() >= 3 && tokens[1] == "'MARKER'" {
                    match tokens[2] {
                        "'INTORG'" => in_integer = true,
                        "'INTEND'" => in_integer = false,
                        t => return Err(err(line_no, format!("unknown marker {t}"))),
                    }
                    continue;
                }
                if tokens.len() != 3 && tokens.len() != 5 {
                    return Err(err(line_no, "COLUMNS entries need a column and 1 or 2 row/value pairs".into()));
                }
                let col = match col_index.get(tokens[0]) {
                    Some(&c) => c,
                    None => {
                        col_index.insert(tokens[0].to_string(), cols.len());
                        cols.push(ColumnState {
                            var: Variable {
                                name: tokens[0].to_string(),
                                lower: 0.0,
                                upper: f64::INFINITY,
                                kind: VarKind::Continuous,
                                cost: 0.0,
                            },
                            integer: in_integer,
                            lower_set: false,
                        });
                        cols.len() - 1
                    }
                };
                for pair in tokens[1..].chunks(2) {
                    let value = parse_num(pair[1], line_no)?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        cols[col].var.cost += value;
                    } else if let Some(&r) = row_index.get(pair[0]) {
                        rows[r].2.push((VarId(col), value));
                    } else if free_rows.iter().any(|f| f == pair[0]) {
                        continue;
                    } else {
                        return Err(err(line_no, format!("unknown row {}", pair[0])));
                    }
                }
            }
            Section::Rhs => {
                let pairs = if tokens.len() % 2 == 1 { &tokens[1..] } else { &tokens[..] };
                if pairs.is_empty() {
                    return Err(err(line_no, "empty RHS entry".into()));
                }
                for pair in pairs.chunks(2) {
                    if pair.len() != 2 {
                        return Err(err(line_no, "RHS entries need row/value pairs".into()));
                    }
                    let value = parse_num(pair[1], line_no)?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        constant = -value;
                    } else if let Some(&r) = row_index.get(pair[0]) {
                        rows[r].3 = value;
                    } else if !free_rows.iter().any(|f| f == pair[0]) {
                        return Err(err(line_no, format!("unknown row {}", pair[0])));
                    }
                }
            }
            Section::Bounds => {
                let kind = tokens[0];
                let needs_value = matches!(kind, "UP" | "LO" | "FX" | "LI" | "UI");
                let (col_name, value) = match (needs_value, tokens.len()) {
                    (true, 4) => (tokens[2], Some(parse_num(tokens[3], line_no)?)),
                    (true, 3) => (tokens[1], Some(parse_num(tokens[2], line_no)?)),
                    (false, 3) => (tokens[2], None),
                    (false, 2) => (tokens[1], None),
                    _ => return Err(err(line_no, format!("malformed {kind} bound"))),
                };
                let &c = col_index
                    .get(col_name)
                    .ok_or_else(|| err(line_no, format!("bound on unknown column {col_name}")))?;
                let st = &mut cols[c];
                let v = &mut st.var;
                match (kind, value) {
                    ("UP", Some(u)) | ("UI", Some(u)) => {
                        if u < 0.0 && v.lower == 0.0 && !st.lower_set {
                            warn!("column {col_name}: negative upper bound with default lower bound; lower set to -inf");
                            v.lower = f64::NEG_INFINITY;
                        }
                        v.upper = u;
                        st.integer |= kind == "UI";
                    }
                    ("LO", Some(l)) | ("LI", Some(l)) => {
                        v.lower = l;
                        st.lower_set = true;
                        st.integer |= kind == "LI";
                    }
                    ("FX", Some(x)) => {
                        v.lower = x;
                        v.upper = x;
                        st.lower_set = true;
                    }
                    ("FR", None) => {
                        v.lower = f64::NEG_INFINITY;
                        v.upper = f64::INFINITY;
                    }
                    ("MI", None) => {
                        v.lower = f64::NEG_INFINITY;
                        st.lower_set = true;
                    }
                    ("PL", None) => v.upper = f64::INFINITY,
                    ("BV", None) => {
                        v.lower = 0.0;
                        v.upper = 1.0;
                        st.integer = true;
                    }
                    (other, _) => return Err(err(line_no, format!("unsupported bound type {other}"))),
                }
            }
        }
    }
    if section != Section::End {
        return Err(err(text.lines().count(), "missing ENDATA".into()));
    }

    let mut problem = MilpProblem::new(name);
    problem.objective_constant = constant;
    for st in cols {
        let mut v = st.var;
        if st.integer {
            if v.lower < 0.0 || v.upper > 1.0 {
                return Err(MilpError::Invalid(format!(
                    "integer column {} has bounds [{}, {}]; only binaries are supported",
                    v.name, v.lower, v.upper
                )));
            }
            v.kind = VarKind::Binary;
        }
        problem.variables.push(v);
    }
    for (name, relation, coeffs, rhs) in rows {
        problem.constraints.push(Constraint {
            name,
            coeffs: normalize_coeffs(coeffs),
            relation,
            rhs,
        });
    }
    problem.validate()?;
    Ok(problem)
}

fn check_sense(token: &str, line: usize) -> Result<(), MilpError> {
    match token {
        "MIN" | "MINIMIZE" => Ok(()),
        "MAX" | "MAXIMIZE" => Err(MilpError::UnsupportedSection("OBJSENSE MAX".into())),
        other => Err(MilpError::Mps {
            line,
            message: format!("unknown objective sense {other}"),
        }),
    }
}
