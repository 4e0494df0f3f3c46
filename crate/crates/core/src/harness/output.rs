//! CSV and JSON writers that print every float with 17 significant digits.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};

/// Formats `x` as `d.dddddddddddddddde±x`; non-finite values become `NaN`,
/// `inf`, `-inf`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

struct F17;

impl serde_json::ser::Formatter for F17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Pretty-ish JSON (one value per call) with 17-digit floats. Non-finite
/// floats are written as `null`.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, F17);
    value.serialize(&mut ser).map_err(|e| Error::Input(format!("json encoding: {e}")))?;
    String::from_utf8(buf).map_err(|e| Error::Input(format!("json encoding: {e}")))
}

/// A record that can be written as one CSV row under a fixed header.
pub trait CsvRecord {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub fn opt17(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

pub fn write_csv<R: CsvRecord, W: Write>(rows: &[R], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| Error::Input(format!("csv output: {e}"));
    w.write_record(R::HEADER).map_err(io_err)?;
    for r in rows {
        w.write_record(r.fields()).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Input(format!("csv output: {e}")))?;
    Ok(())
}

pub fn csv_string<R: CsvRecord>(rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Input(format!("csv output: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt17(1.0), "1.0000000000000000e0");
        let s = to_json_string(&(0.1, 3, f64::NAN)).unwrap();
        assert_eq!(s, "[1.0000000000000001e-1,3,null]");
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back[0].as_f64(), Some(0.1));
    }
}
