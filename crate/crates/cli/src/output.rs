//! CSV with a one-line JSON header comment.

use std::io::Write;

use serde_json::Value;

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e-4, 1e6)` so tiny values stay short.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".to_owned()
    } else if !x.is_finite() || (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Finished rows in output order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Points whose numerics did not converge; they are emitted with `NaN`.
    pub failures: usize,
}

pub fn write_table(out: &mut impl Write, header: &Value, table: &Table) -> std::io::Result<()> {
    writeln!(out, "# {header}")?;
    writeln!(out, "{}", table.columns.join(","))?;
    for row in &table.rows {
        debug_assert_eq!(row.len(), table.columns.len());
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(-1.5e-7), "-1.5e-7");
        assert_eq!(num(f64::NAN), "NaN");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(2.0e7), "2e7");
        let x = 0.1 + 0.2;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn layout() {
        let table = Table { columns: vec!["a".into(), "b".into()], rows: vec![vec!["1".into(), "2".into()]], failures: 0 };
        let mut buf = Vec::new();
        write_table(&mut buf, &serde_json::json!({"k": 1}), &table).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# {\"k\":1}\na,b\n1,2\n");
    }
}
