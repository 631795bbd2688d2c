//! CSV assembly: one fixed column schema for every scenario, deterministic
//! row ordering, and numeric formatting that parses back to the exact value.

/// Column schema shared by all scenarios. Cells that do not apply to a
/// scenario are left empty. The `bounds` scenario reports each calculator
/// value in the `slope` column (the row label names the calculator).
pub const CSV_HEADER: &str =
    "scenario,label,n,f_count,image,incidence,log_scale,coarse_dim,slope,residual";

/// One output row; `None` renders as an empty cell.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvRow {
    pub scenario: String,
    pub label: String,
    pub n: Option<u128>,
    pub f_count: Option<u64>,
    pub image: Option<u128>,
    pub incidence: Option<u64>,
    pub log_scale: Option<f64>,
    pub coarse_dim: Option<f64>,
    pub slope: Option<f64>,
    pub residual: Option<f64>,
}

/// Report under assembly. `finalize` establishes the canonical ordering;
/// `to_csv` renders header plus rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvReport {
    rows: Vec<CsvRow>,
}

impl CsvReport {
    pub fn new() -> Self {
        CsvReport::default()
    }

    pub fn push(&mut self, row: CsvRow) {
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[CsvRow] {
        &self.rows
    }

    pub fn rows_mut(&mut self) -> &mut [CsvRow] {
        &mut self.rows
    }

    /// Sorts rows by (label, n), empty n first; equal keys keep insertion
    /// order (the sort is stable), so output is deterministic.
    pub fn finalize(&mut self) {
        self.rows
            .sort_by(|a, b| (a.label.as_str(), a.n).cmp(&(b.label.as_str(), b.n)));
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.scenario);
            out.push(',');
            out.push_str(&r.label);
            for cell in [
                opt_int(r.n.as_ref()),
                opt_int(r.f_count.as_ref()),
                opt_int(r.image.as_ref()),
                opt_int(r.incidence.as_ref()),
                opt_f64(r.log_scale.as_ref()),
                opt_f64(r.coarse_dim.as_ref()),
                opt_f64(r.slope.as_ref()),
                opt_f64(r.residual.as_ref()),
            ] {
                out.push(',');
                out.push_str(&cell);
            }
            out.push('\n');
        }
        out
    }
}

fn opt_int<T: std::fmt::Display>(v: Option<&T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<&f64>) -> String {
    v.map(|x| fmt_f64(*x)).unwrap_or_default()
}

/// Shortest decimal form that round-trips: `str::parse::<f64>` on the output
/// returns the identical bit pattern (guaranteed by the standard formatter).
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_has_ten_columns() {
        assert_eq!(CSV_HEADER.split(',').count(), 10);
    }

    #[test]
    fn rows_sort_by_label_then_n_with_blanks_first() {
        let mut rep = CsvReport::new();
        let mk = |label: &str, n: Option<u128>| CsvRow {
            scenario: "t".into(),
            label: label.into(),
            n,
            ..CsvRow::default()
        };
        rep.push(mk("b", Some(1)));
        rep.push(mk("a", Some(2)));
        rep.push(mk("a", None));
        rep.push(mk("a", Some(1)));
        rep.finalize();
        let key: Vec<(String, Option<u128>)> =
            rep.rows().iter().map(|r| (r.label.clone(), r.n)).collect();
        assert_eq!(
            key,
            vec![
                ("a".into(), None),
                ("a".into(), Some(1)),
                ("a".into(), Some(2)),
                ("b".into(), Some(1)),
            ]
        );
    }

    #[test]
    fn float_cells_round_trip_exactly() {
        for x in [0.5, 1.9174933795227331_f64, 1.0 / 3.0, 2f64.powi(-38)] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn empty_cells_render_empty() {
        let mut rep = CsvReport::new();
        rep.push(CsvRow {
            scenario: "bounds".into(),
            label: "x".into(),
            slope: Some(0.5),
            ..CsvRow::default()
        });
        let csv = rep.to_csv();
        let line = csv.lines().nth(1).unwrap();
        assert_eq!(line, "bounds,x,,,,,,,0.5,");
    }
}
