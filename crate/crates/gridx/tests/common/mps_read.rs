//! Minimal independent free-format MPS reader used as a round-trip
//! oracle. Deliberately written against the format description, not
//! against the production writer, so shared bugs can't cancel out.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Obj,
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Default)]
pub struct ParsedLp {
    pub name: String,
    pub row_names: Vec<String>,
    pub row_kinds: Vec<RowKind>,
    pub col_names: Vec<String>,
    /// (row index, col index) -> coefficient, duplicates summed.
    pub coeffs: HashMap<(usize, usize), f64>,
    pub rhs: HashMap<usize, f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ParsedLp {
    pub fn objective(&self, x: &[f64]) -> f64 {
        let obj_row = self.row_kinds.iter().position(|&k| k == RowKind::Obj).unwrap();
        self.coeffs
            .iter()
            .filter(|((r, _), _)| *r == obj_row)
            .map(|((_, c), v)| v * x[*c])
            .sum()
    }
}

pub fn parse(text: &str) -> Result<ParsedLp, String> {
    let mut lp = ParsedLp::default();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('*') {
            continue;
        }
        let starts_field = !line.starts_with(' ') && !line.starts_with('\t');
        let fields: Vec<&str> = line.split_whitespace().collect();
        if starts_field {
            match fields[0] {
                "NAME" => {
                    lp.name = fields.get(1).unwrap_or(&"").to_string();
                    section = "NAME".into();
                }
                s @ ("ROWS" | "COLUMNS" | "RHS" | "RANGES" | "BOUNDS" | "ENDATA") => {
                    section = s.into();
                }
                other => return Err(format!("line {}: unknown section {other}", lineno + 1)),
            }
            continue;
        }
        match section.as_str() {
            "ROWS" => {
                let kind = match fields[0] {
                    "N" => RowKind::Obj,
                    "L" => RowKind::Le,
                    "G" => RowKind::Ge,
                    "E" => RowKind::Eq,
                    k => return Err(format!("line {}: bad row kind {k}", lineno + 1)),
                };
                let name = fields[1].to_string();
                row_index.insert(name.clone(), lp.row_names.len());
                lp.row_names.push(name);
                lp.row_kinds.push(kind);
            }
            "COLUMNS" => {
                let col = *col_index.entry(fields[0].to_string()).or_insert_with(|| {
                    lp.col_names.push(fields[0].to_string());
                    lp.lower.push(0.0);
                    lp.upper.push(f64::INFINITY);
                    lp.col_names.len() - 1
                });
                let mut i = 1;
                while i + 1 < fields.len() {
                    let row = *row_index
                        .get(fields[i])
                        .ok_or_else(|| format!("line {}: unknown row {}", lineno + 1, fields[i]))?;
                    let val: f64 = fields[i + 1]
                        .parse()
                        .map_err(|e| format!("line {}: {e}", lineno + 1))?;
                    *lp.coeffs.entry((row, col)).or_insert(0.0) += val;
                    i += 2;
                }
            }
            "RHS" => {
                let mut i = 1;
                while i + 1 < fields.len() {
                    let row = *row_index
                        .get(fields[i])
                        .ok_or_else(|| format!("line {}: unknown row {}", lineno + 1, fields[i]))?;
                    let val: f64 = fields[i + 1]
                        .parse()
                        .map_err(|e| format!("line {}: {e}", lineno + 1))?;
                    lp.rhs.insert(row, val);
                    i += 2;
                }
            }
            "BOUNDS" => {
                let kind = fields[0];
                let col = *col_index
                    .get(fields[2])
                    .ok_or_else(|| format!("line {}: unknown column {}", lineno + 1, fields[2]))?;
                let val = || -> Result<f64, String> {
                    fields
                        .get(3)
                        .ok_or_else(|| format!("line {}: missing bound value", lineno + 1))?
                        .parse()
                        .map_err(|e| format!("line {}: {e}", lineno + 1))
                };
                match kind {
                    "UP" => lp.upper[col] = val()?,
                    "LO" => lp.lower[col] = val()?,
                    "FX" => {
                        let v = val()?;
                        lp.lower[col] = v;
                        lp.upper[col] = v;
                    }
                    "FR" => {
                        lp.lower[col] = f64::NEG_INFINITY;
                        lp.upper[col] = f64::INFINITY;
                    }
                    "MI" => lp.lower[col] = f64::NEG_INFINITY,
                    "PL" => lp.upper[col] = f64::INFINITY,
                    k => return Err(format!("line {}: bound kind {k} unsupported", lineno + 1)),
                }
            }
            "NAME" | "ENDATA" | "RANGES" => {}
            _ => return Err(format!("line {}: data before any section", lineno + 1)),
        }
    }
    if section != "ENDATA" {
        return Err("missing ENDATA".into());
    }
    Ok(lp)
}
