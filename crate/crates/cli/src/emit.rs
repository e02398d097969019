//! Tabular output as CSV or JSON.
//!
//! Floats are written with 17 significant digits in CSV and as shortest
//! round-trip numbers in JSON, so parsing either form recovers the exact
//! bits.

use clap::ValueEnum;
use serde_json::{Map, Number, Value};
use wavemix_core::multiphoton::MomentumDistribution;
use wavemix_core::PeakSpectrum;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) => Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Prepends a constant column, used to label sweep points.
    pub fn with_leading(mut self, name: &str, value: f64) -> Self {
        self.columns.insert(0, name.to_string());
        for row in &mut self.rows {
            row.insert(0, Cell::Float(value));
        }
        self
    }

    /// Concatenates tables with identical columns.
    pub fn concat(tables: Vec<Table>) -> Option<Table> {
        let mut iter = tables.into_iter();
        let mut first = iter.next()?;
        for t in iter {
            debug_assert_eq!(t.columns, first.columns);
            first.rows.extend(t.rows);
        }
        Some(first)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(map)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&Value::Array(rows)).expect("JSON values serialize");
        out.push('\n');
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

pub trait ToTable {
    fn to_table(&self) -> Table;
}

pub const PEAK_COLUMNS: [&str; 6] = ["p", "side", "frequency", "re_amp", "im_amp", "intensity"];

impl ToTable for PeakSpectrum {
    fn to_table(&self) -> Table {
        let mut t = Table::new(&PEAK_COLUMNS);
        for r in self.records() {
            t.push(vec![
                Cell::Int(i64::from(r.p)),
                Cell::Text(r.side.as_str().into()),
                Cell::Float(r.frequency),
                Cell::Float(r.amplitude.re),
                Cell::Float(r.amplitude.im),
                Cell::Float(r.intensity),
            ]);
        }
        t
    }
}

impl ToTable for MomentumDistribution {
    fn to_table(&self) -> Table {
        let mut t = Table::new(&["k", "intensity"]);
        for (k, i) in self.k_grid.iter().zip(&self.intensity) {
            t.push(vec![Cell::Float(*k), Cell::Float(*i)]);
        }
        t
    }
}

/// Serialized bytes of a spectrum: trailing newline, UTF-8.
pub fn emit_spectrum<T: ToTable>(spectrum: &T, format: Format) -> Vec<u8> {
    spectrum.to_table().render(format).into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use wavemix_core::{PeakRecord, Side};

    #[test]
    fn empty_spectrum_is_header_only() {
        let csv = String::from_utf8(emit_spectrum(&PeakSpectrum::default(), Format::Csv)).unwrap();
        assert_eq!(csv, "p,side,frequency,re_amp,im_amp,intensity\n");
        let json = String::from_utf8(emit_spectrum(&PeakSpectrum::default(), Format::Json)).unwrap();
        assert_eq!(json, "[]\n");
    }

    #[test]
    fn csv_floats_round_trip() {
        let amp = Complex64::new(0.1 + 0.2, -1.0 / 3.0);
        let spec = PeakSpectrum::new([PeakRecord::new(2, Side::Left, 10.0, 0.01, amp)]);
        let csv = String::from_utf8(emit_spectrum(&spec, Format::Csv)).unwrap();
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "2");
        assert_eq!(row[1], "left");
        assert_eq!(row[3].parse::<f64>().unwrap().to_bits(), amp.re.to_bits());
        assert_eq!(row[4].parse::<f64>().unwrap().to_bits(), amp.im.to_bits());
    }

    #[test]
    fn json_keeps_column_order_and_bits() {
        let amp = Complex64::new(std::f64::consts::PI, 1e-300);
        let spec = PeakSpectrum::new([PeakRecord::new(0, Side::Right, 10.0, 0.01, amp)]);
        let json = String::from_utf8(emit_spectrum(&spec, Format::Json)).unwrap();
        let keys: Vec<usize> = PEAK_COLUMNS.iter().map(|c| json.find(&format!("\"{c}\"")).unwrap()).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v[0]["re_amp"].as_f64().unwrap().to_bits(), amp.re.to_bits());
        assert_eq!(v[0]["im_amp"].as_f64().unwrap().to_bits(), amp.im.to_bits());
    }

    #[test]
    fn leading_column_labels_every_row() {
        let mut t = Table::new(&["x"]);
        t.push(vec![Cell::Int(1)]);
        t.push(vec![Cell::Int(2)]);
        let t = t.with_leading("delta", 0.5);
        assert_eq!(t.to_csv(), "delta,x\n5.0000000000000000e-1,1\n5.0000000000000000e-1,2\n");
    }
}
