//! Tabular output: CSV with a header row and 9-significant-digit floats, or
//! a JSON array of the same rows at full precision.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidInput(format!("unknown output format `{other}`"))),
        }
    }
}

/// A row that can be written as CSV.
pub trait Record: Serialize {
    fn header() -> &'static [&'static str];

    fn fields(&self) -> Vec<String>;
}

/// Formats like C's `%.9g`.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

pub fn write_table<R: Record, W: Write>(rows: &[R], format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(R::header())?;
            for row in rows {
                w.write_record(row.fields())?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn table_string<R: Record>(rows: &[R], format: Format) -> Result<String> {
    let mut buf = Vec::new();
    write_table(rows, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("utf-8 table"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        name: String,
        value: f64,
    }

    impl Record for Row {
        fn header() -> &'static [&'static str] {
            &["name", "value"]
        }

        fn fields(&self) -> Vec<String> {
            vec![self.name.clone(), fmt_sig(self.value)]
        }
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.1), "0.1");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig(2857.142857142857), "2857.14286");
        assert_eq!(fmt_sig(3.5e-4), "0.00035");
        assert_eq!(fmt_sig(1.23456789123e-5), "1.23456789e-05");
        assert_eq!(fmt_sig(-2.5e10), "-2.5e+10");
        assert_eq!(fmt_sig(123456789.4), "123456789");
        assert_eq!(fmt_sig(999999999.6), "1e+09");
        assert_eq!(fmt_sig(f64::NAN), "NaN");
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn csv_and_json() {
        let rows = vec![
            Row { name: "a,b".into(), value: 0.5 },
            Row { name: "c".into(), value: 1e-7 },
        ];
        let csv = table_string(&rows, Format::Csv).unwrap();
        assert_eq!(csv, "name,value\n\"a,b\",0.5\nc,1e-07\n");
        let json: serde_json::Value = serde_json::from_str(&table_string(&rows, Format::Json).unwrap()).unwrap();
        assert_eq!(json[1]["value"], 1e-7);
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
