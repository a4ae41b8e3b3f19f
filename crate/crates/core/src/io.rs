//! Measurement CSV ingestion and deterministic number formatting.
//!
//! # Measurement files
//!
//! Comma separated, UTF-8, one header row, `.` as decimal point. Required
//! columns (any order): `label, probe_db, conjugate_db, squeezed_db,
//! antisqueezed_db, v_p, v_c`. Optional: `electronic_floor_db`,
//! `shot_noise_db` (empty cells mean "absent").
//!
//! All dB columns share one scale on which the shot noise sits at
//! `shot_noise_db` (default 0). The electronic floor is removed in linear
//! units from both the measured noise and the shot-noise reference, and the
//! result renormalized so vacuum stays at 1:
//!
//! ```text
//! corrected = (noise - floor) / (shot - floor)
//! ```
//!
//! A floor at or above any measured noise (or the shot noise) is an error.

use std::collections::HashMap;
use std::fs::File;
use std::path::Path;

use thiserror::Error;

use crate::estimator::MeasurementPoint;

pub const REQUIRED_COLUMNS: [&str; 7] =
    ["label", "probe_db", "conjugate_db", "squeezed_db", "antisqueezed_db", "v_p", "v_c"];
pub const OPTIONAL_COLUMNS: [&str; 2] = ["electronic_floor_db", "shot_noise_db"];

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{column}: electronic floor {floor} is not below the {what} {value} (linear)")]
pub struct FloorError {
    pub column: &'static str,
    pub what: &'static str,
    pub floor: f64,
    pub value: f64,
}

/// Removes an electronic floor from a linear, shot-noise-normalized noise.
pub fn remove_floor(column: &'static str, noise: f64, floor: Option<f64>) -> Result<f64, FloorError> {
    let Some(floor) = floor else {
        return Ok(noise);
    };
    if floor >= 1.0 {
        return Err(FloorError { column, what: "shot noise", floor, value: 1.0 });
    }
    if noise <= floor {
        return Err(FloorError { column, what: "measured noise", floor, value: noise });
    }
    Ok((noise - floor) / (1.0 - floor))
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {source}")]
    Csv { line: u64, source: csv::Error },
    #[error("missing required column `{0}`")]
    MissingColumn(&'static str),
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("line {line}: column `{column}`: `{value}` is not a number")]
    NotNumeric { line: u64, column: String, value: String },
    #[error("line {line}: {message}")]
    InvalidValue { line: u64, message: String },
    #[error("line {line}: {source}")]
    Floor { line: u64, source: FloorError },
    #[error("no data rows")]
    Empty,
}

fn number(line: u64, column: &str, cell: &str) -> Result<f64, LoadError> {
    let bad = || LoadError::NotNumeric { line, column: column.to_string(), value: cell.to_string() };
    let t = cell.trim();
    if t.is_empty() || !t.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E')) {
        return Err(bad());
    }
    t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad)
}

/// Parses measurement CSV text from any reader.
pub fn read_measurements<R: std::io::Read>(reader: R) -> Result<Vec<MeasurementPoint>, LoadError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|source| LoadError::Csv { line: 1, source })?.clone();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        if index.insert(h, i).is_some() {
            return Err(LoadError::DuplicateColumn(h.to_string()));
        }
    }
    for col in REQUIRED_COLUMNS {
        if !index.contains_key(col) {
            return Err(LoadError::MissingColumn(col));
        }
    }

    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|source| {
            let line = source.position().map_or(0, |p| p.line());
            LoadError::Csv { line, source }
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let cell = |col: &str| rec.get(index[col]).unwrap_or("");
        let req = |col: &str| number(line, col, cell(col));
        let opt = |col: &str| -> Result<Option<f64>, LoadError> {
            match index.get(col).map(|&i| rec.get(i).unwrap_or("")) {
                None | Some("") => Ok(None),
                Some(c) => number(line, col, c).map(Some),
            }
        };

        let shot = opt("shot_noise_db")?.unwrap_or(0.0);
        let point = MeasurementPoint {
            label: cell("label").to_string(),
            probe_db: req("probe_db")? - shot,
            conjugate_db: req("conjugate_db")? - shot,
            squeezed_db: req("squeezed_db")? - shot,
            antisqueezed_db: req("antisqueezed_db")? - shot,
            v_p: req("v_p")?,
            v_c: req("v_c")?,
            electronic_floor_db: opt("electronic_floor_db")?.map(|f| f - shot),
        };
        for (name, v) in [("v_p", point.v_p), ("v_c", point.v_c)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(LoadError::InvalidValue { line, message: format!("{name} = {v} outside [0, 1]") });
            }
        }
        point.linear_noises().map_err(|source| LoadError::Floor { line, source })?;
        points.push(point);
    }
    if points.is_empty() {
        return Err(LoadError::Empty);
    }
    Ok(points)
}

/// Reads and validates a measurement CSV file.
pub fn load_measurements(path: impl AsRef<Path>) -> Result<Vec<MeasurementPoint>, LoadError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    read_measurements(file)
}

/// Formats with 9 significant digits, `%g` style, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 9;
    if !x.is_finite() {
        return x.to_string().to_lowercase();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to the value [`fmt_sig`] prints.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_sig(x).parse().expect("fmt_sig output parses")
    } else {
        x
    }
}

/// Renders rows as CSV with a header; floats go through [`fmt_sig`].
pub fn csv_table(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_sig(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str = "label,probe_db,conjugate_db,squeezed_db,antisqueezed_db,v_p,v_c";

    #[test]
    fn floor_absent_passes_through() {
        let pts = read_measurements(format!("{HEADER}\na,6.02,6.2,-3.5,9.1,0.98,0.986\n").as_bytes()).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].probe_db, 6.02);
        assert_eq!(pts[0].electronic_floor_db, None);
        let q = pts[0].linear_noises().unwrap();
        assert!((q.probe - 10f64.powf(0.602)).abs() < 1e-15);
    }

    #[test]
    fn floor_subtraction_renormalizes() {
        let text = format!("{HEADER},electronic_floor_db\na,6.02,6.2,-3.5,9.1,0.98,0.986,-10\n");
        let q = read_measurements(text.as_bytes()).unwrap()[0].linear_noises().unwrap();
        // (10^0.602 - 0.1) / (1 - 0.1); 10^0.602 ~= 4.0
        let want = (10f64.powf(0.602) - 0.1) / 0.9;
        assert!((q.probe - want).abs() < 1e-14);
        assert!((q.probe - 4.333).abs() < 1e-3);
    }

    #[test]
    fn shot_reference_shifts_scale() {
        let a = read_measurements(format!("{HEADER},electronic_floor_db\na,6.02,6.2,-3.5,9.1,0.98,0.986,-10\n").as_bytes()).unwrap();
        let b = read_measurements(
            format!("{HEADER},electronic_floor_db,shot_noise_db\na,-43.98,-43.8,-53.5,-40.9,0.98,0.986,-60,-50\n").as_bytes(),
        )
        .unwrap();
        let (qa, qb) = (a[0].linear_noises().unwrap(), b[0].linear_noises().unwrap());
        assert!((qa.probe - qb.probe).abs() < 1e-12);
        assert!((qa.squeezed - qb.squeezed).abs() < 1e-12);
    }

    #[test]
    fn floor_equal_to_noise_is_an_error() {
        let text = format!("{HEADER},electronic_floor_db\na,6.02,6.2,-3.5,9.1,0.98,0.986,-10\nb,6.02,6.2,-3.5,9.1,0.98,0.986,6.02\n");
        match read_measurements(text.as_bytes()) {
            Err(LoadError::Floor { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        let text = format!("{HEADER},electronic_floor_db\na,6.02,6.2,-3.5,9.1,0.98,0.986,-3\n");
        assert!(matches!(read_measurements(text.as_bytes()), Err(LoadError::Floor { line: 2, .. })));
    }

    #[test]
    fn empty_optional_cells_are_absent() {
        let text = format!("{HEADER},electronic_floor_db,shot_noise_db\na,6.02,6.2,-3.5,9.1,0.98,0.986,,\n");
        let p = &read_measurements(text.as_bytes()).unwrap()[0];
        assert_eq!(p.electronic_floor_db, None);
        assert_eq!(p.probe_db, 6.02);
    }

    #[test]
    fn header_and_cell_errors() {
        let no_vc = "label,probe_db,conjugate_db,squeezed_db,antisqueezed_db,v_p\na,1,1,1,1,1\n";
        assert!(matches!(read_measurements(no_vc.as_bytes()), Err(LoadError::MissingColumn("v_c"))));
        let bad = format!("{HEADER}\na,6.02,six,-3.5,9.1,0.98,0.986\n");
        match read_measurements(bad.as_bytes()) {
            Err(LoadError::NotNumeric { line: 2, column, value }) => {
                assert_eq!(column, "conjugate_db");
                assert_eq!(value, "six");
            }
            other => panic!("{other:?}"),
        }
        let vis = format!("{HEADER}\na,6.02,6.2,-3.5,9.1,1.2,0.986\n");
        assert!(matches!(read_measurements(vis.as_bytes()), Err(LoadError::InvalidValue { line: 2, .. })));
        assert!(matches!(read_measurements(format!("{HEADER}\n").as_bytes()), Err(LoadError::Empty)));
        assert!(matches!(read_measurements("".as_bytes()), Err(LoadError::MissingColumn(_))));
        let short = format!("{HEADER}\na,6.02,6.2\n");
        assert!(matches!(read_measurements(short.as_bytes()), Err(LoadError::Csv { line: 2, .. })));
        let dup = format!("{HEADER},v_c\n");
        assert!(matches!(read_measurements(dup.as_bytes()), Err(LoadError::DuplicateColumn(_))));
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(3.02), "3.02");
        assert_eq!(fmt_sig(-3.794114443884), "-3.79411444");
        assert_eq!(fmt_sig(0.41743470757), "0.417434708");
        assert_eq!(fmt_sig(123456789.4), "123456789");
        assert_eq!(fmt_sig(1234567890.0), "1.23456789e9");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(0.0001), "0.0001");
        assert_eq!(fmt_sig(9.9999999999), "10");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(f64::NAN), "nan");
        assert_eq!(round_sig(0.41743470757), 0.417434708);
    }

    #[test]
    fn table_quotes_labels() {
        let t = csv_table(&["label", "x"], &[vec!["a,b".into(), 1.5.into()], vec![Cell::Empty, 2.0.into()]]);
        assert_eq!(t, "label,x\n\"a,b\",1.5\n,2\n");
    }

    proptest! {
        #[test]
        fn sig_formatting_keeps_nine_digits(x in prop::num::f64::NORMAL) {
            let s = fmt_sig(x);
            let back: f64 = s.parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-9 * x.abs());
            let digits = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect::<String>();
            prop_assert!(digits.trim_start_matches('0').len() <= 9);
            prop_assert_eq!(fmt_sig(back), s);
        }
    }
}
