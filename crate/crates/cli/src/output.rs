//! Serialization of reports, matrices and plot data.
//!
//! Every float is written with 17 significant digits so that a report
//! round-trips exactly and identical runs give byte-identical files.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use heunband::Matrix;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::{tolerance_bound, Bound};
use crate::pipeline::Report;

/// Pretty JSON with floats in `{:.16e}` form.
struct Sig17<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", fmt_f64(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// A float with 17 significant digits, e.g. `2.9999999999999999e-1`.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// Serializes `value` as pretty JSON followed by a newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

fn csv_bytes(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("writing to memory cannot fail");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv writes UTF-8")
}

/// `run,name,value,tolerance,bound,passed` for each measured residual.
pub fn residuals_csv<'a>(reports: impl IntoIterator<Item = (&'a str, &'a Report)>) -> String {
    let header = ["run", "name", "value", "tolerance", "bound", "passed"]
        .map(String::from)
        .to_vec();
    let mut rows = vec![header];
    for (run, r) in reports {
        for (name, &value) in &r.residuals {
            let tol = r.config_echo.tolerances.get(name);
            let bound = tolerance_bound(r.config_echo.pipeline, name);
            rows.push(vec![
                run.to_string(),
                name.clone(),
                fmt_f64(value),
                tol.map(|&t| fmt_f64(t)).unwrap_or_default(),
                match bound {
                    Some(Bound::AtMost) => "at-most".into(),
                    Some(Bound::AtLeast) => "at-least".into(),
                    None => String::new(),
                },
                (!r.verdict.failed.contains(name)).to_string(),
            ]);
        }
    }
    csv_bytes(rows)
}

/// `run,spectrum,index,value` for each spectral value.
pub fn spectra_csv<'a>(reports: impl IntoIterator<Item = (&'a str, &'a Report)>) -> String {
    let header = ["run", "spectrum", "index", "value"].map(String::from).to_vec();
    let mut rows = vec![header];
    for (run, r) in reports {
        for (name, values) in &r.spectra {
            for (i, &v) in values.iter().enumerate() {
                rows.push(vec![run.to_string(), name.clone(), i.to_string(), fmt_f64(v)]);
            }
        }
    }
    csv_bytes(rows)
}

/// One row per matrix row, no header.
pub fn matrix_csv(m: &Matrix) -> String {
    csv_bytes((0..m.rows()).map(|i| m.row(i).iter().map(|&v| fmt_f64(v)).collect()))
}

/// Two whitespace-separated columns: index and value.
pub fn plot_data(values: &[f64]) -> String {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| format!("{i} {}\n", fmt_f64(v)))
        .collect()
}

/// Writes `contents` to `dir/file`, creating `dir` if needed.
pub fn write_file(dir: &Path, file: &str, contents: &str) -> io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(file);
    std::fs::write(&path, contents)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(fmt_f64(0.3), "2.9999999999999999e-1");
        assert_eq!(fmt_f64(121.0), "1.2100000000000000e2");
        assert_eq!(fmt_f64(0.3).parse::<f64>().unwrap(), 0.3);
        let x = std::f64::consts::PI;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn json_uses_the_float_format() {
        let s = to_json(&serde_json::json!({"a": [1.5, -0.25], "b": 3, "c": f64::NAN}));
        assert!(s.contains("1.5000000000000000e0"), "{s}");
        assert!(s.contains("-2.5000000000000000e-1"), "{s}");
        assert!(s.contains("\"b\": 3"), "{s}");
        assert!(s.contains("\"c\": null"), "{s}");
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"][1].as_f64(), Some(-0.25));
    }

    #[test]
    fn plot_and_matrix_text() {
        assert_eq!(
            plot_data(&[0.5, 1.0]),
            "0 5.0000000000000000e-1\n1 1.0000000000000000e0\n"
        );
        let m = Matrix::identity(2);
        assert_eq!(
            matrix_csv(&m),
            "1.0000000000000000e0,0.0000000000000000e0\n0.0000000000000000e0,1.0000000000000000e0\n"
        );
    }
}
