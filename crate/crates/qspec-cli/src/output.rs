//! Flat-record serialization: CSV with a header row, or a JSON array of
//! objects. Floats are printed with 17 significant digits so that parsing
//! a record back recovers the exact bit pattern.

/// Output stream format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One cell of an output record.
pub enum Field {
    Int(usize),
    Num(f64),
    Text(&'static str),
    Flag(bool),
}

/// A rectangular result set: column names plus rows of fields.
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Serializes the table in the requested format. The output depends only
/// on the table contents, so identical runs produce identical bytes.
pub fn emit(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => csv(table),
        Format::Json => json(table),
    }
}

/// 17 significant digits: enough to round-trip any finite f64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|f| match f {
                Field::Int(v) => v.to_string(),
                Field::Num(v) => num(*v),
                Field::Text(v) => (*v).to_string(),
                Field::Flag(v) => v.to_string(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn json(table: &Table) -> String {
    if table.rows.is_empty() {
        return "[]\n".to_string();
    }
    let mut records = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let pairs: Vec<String> = table
            .columns
            .iter()
            .zip(row.iter())
            .map(|(name, f)| {
                let value = match f {
                    Field::Int(v) => v.to_string(),
                    Field::Num(v) => num(*v),
                    Field::Text(v) => format!("\"{v}\""),
                    Field::Flag(v) => v.to_string(),
                };
                format!("\"{name}\": {value}")
            })
            .collect();
        records.push(format!("  {{{}}}", pairs.join(", ")));
    }
    format!("[\n{}\n]\n", records.join(",\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["n", "xi", "route", "ok"]);
        t.push(vec![
            Field::Int(1),
            Field::Num(0.5),
            Field::Text("series"),
            Field::Flag(true),
        ]);
        t.push(vec![
            Field::Int(2),
            Field::Num(-1.25e-3),
            Field::Text("hypergeom"),
            Field::Flag(false),
        ]);
        t
    }

    #[test]
    fn csv_has_header_and_one_line_per_row() {
        let text = emit(&sample(), Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "n,xi,route,ok");
        assert_eq!(lines[1], "1,5.0000000000000000e-1,series,true");
        assert_eq!(lines[2], "2,-1.2500000000000000e-3,hypergeom,false");
    }

    #[test]
    fn json_is_an_array_of_flat_objects() {
        let text = emit(&sample(), Format::Json);
        assert!(text.starts_with("[\n"));
        assert!(text.ends_with("\n]\n"));
        assert!(text.contains("\"n\": 1"));
        assert!(text.contains("\"xi\": 5.0000000000000000e-1"));
        assert!(text.contains("\"route\": \"series\""));
        assert!(text.contains("\"ok\": false"));
    }

    #[test]
    fn empty_table_is_an_empty_array() {
        let t = Table::new(&["a"]);
        assert_eq!(emit(&t, Format::Json), "[]\n");
        assert_eq!(emit(&t, Format::Csv), "a\n");
    }

    #[test]
    fn float_format_round_trips() {
        for &x in &[0.1, -2.0 / 3.0, std::f64::consts::PI, 3.837e-6, 1e300] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
