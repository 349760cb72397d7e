//! Free-format MPS emission.
//!
//! Sections: NAME, ROWS, COLUMNS, RHS, BOUNDS, ENDATA. Floats are written
//! with 17 significant decimal digits so values round-trip exactly.
//! Output ordering follows model column/row order and is deterministic.

use std::io::Write;

use super::{LpError, LpModel, Sense};

/// 17-significant-digit scientific notation, round-trip exact for f64.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v)
}

pub fn write_mps<W: Write>(model: &LpModel, w: &mut W) -> Result<(), LpError> {
    if !model.is_finalized() {
        return Err(LpError::NotFinalized);
    }
    writeln!(w, "NAME gridx")?;
    writeln!(w, "ROWS")?;
    writeln!(w, " N obj")?;
    for row in &model.rows {
        let tag = match row.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        writeln!(w, " {} {}", tag, row.name)?;
    }
    writeln!(w, "COLUMNS")?;
    // Triplets are sorted by (col, row) after finalize.
    let mut next = 0usize;
    for (c, col) in model.columns.iter().enumerate() {
        if col.objective != 0.0 {
            writeln!(w, " {} obj {}", col.name, fmt_f64(col.objective))?;
        }
        while next < model.triplets.len() && model.triplets[next].1 == c {
            let (r, _, v) = model.triplets[next];
            writeln!(w, " {} {} {}", col.name, model.rows[r].name, fmt_f64(v))?;
            next += 1;
        }
    }
    writeln!(w, "RHS")?;
    for row in &model.rows {
        if row.rhs != 0.0 {
            writeln!(w, " rhs {} {}", row.name, fmt_f64(row.rhs))?;
        }
    }
    writeln!(w, "BOUNDS")?;
    for col in &model.columns {
        let (lo, up) = (col.lower, col.upper);
        if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            writeln!(w, " FR bnd {}", col.name)?;
            continue;
        }
        if lo == up {
            writeln!(w, " FX bnd {} {}", col.name, fmt_f64(lo))?;
            continue;
        }
        if lo == f64::NEG_INFINITY {
            writeln!(w, " MI bnd {}", col.name)?;
        } else if lo != 0.0 || up < 0.0 {
            writeln!(w, " LO bnd {} {}", col.name, fmt_f64(lo))?;
        }
        if up != f64::INFINITY {
            writeln!(w, " UP bnd {} {}", col.name, fmt_f64(up))?;
        }
    }
    writeln!(w, "ENDATA")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::INF;

    #[test]
    fn free_variable_gets_fr_record() {
        let mut m = LpModel::new();
        m.add_col("x", -INF, INF, 1.0);
        m.finalize().unwrap();
        let mut out = Vec::new();
        write_mps(&m, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains(" FR bnd x"), "{text}");
    }

    #[test]
    fn float_format_is_17_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        let v = std::f64::consts::PI;
        assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
    }
}
