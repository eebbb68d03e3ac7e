//! CSV emission and parse-back for sweep results.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::sweep::SweepResult;

pub const SWEEP_HEADER: [&str; 6] = ["axis_value", "mean_plays", "std_plays", "success_rate", "theory_ub", "theory_lb"];

/// One parsed data row of a sweep CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub axis_value: f64,
    pub mean_plays: f64,
    pub std_plays: f64,
    pub success_rate: f64,
    pub theory_ub: f64,
    pub theory_lb: f64,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Format { path: path.to_path_buf(), message: e.to_string() }
}

/// Writes the header and one row per grid point. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in &result.rows {
        w.write_record(
            [r.axis_value, r.mean_plays, r.std_plays, r.success_rate, r.theory_ub, r.theory_lb].map(|x| x.to_string()),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `axis_value,item,mean_plays`, one row per item and grid point.
pub fn write_survival_csv<W: Write>(result: &SweepResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["axis_value", "item", "mean_plays"])?;
    for r in &result.rows {
        for (item, c) in r.mean_survival.iter().enumerate() {
            w.write_record([r.axis_value.to_string(), item.to_string(), c.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn emit_with(path: &Path, f: impl FnOnce(BufWriter<File>) -> csv::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    f(BufWriter::new(file)).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => io_err(path, source),
        other => Error::Format { path: path.to_path_buf(), message: format!("{other:?}") },
    })
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    emit_with(path, |w| write_sweep_csv(result, w))
}

pub fn emit_survival_csv(result: &SweepResult, path: &Path) -> Result<()> {
    emit_with(path, |w| write_survival_csv(result, w))
}

/// Reads a sweep CSV written by [`write_sweep_csv`]. `path` only labels errors.
pub fn parse_sweep_csv<R: Read>(input: R, path: &Path) -> Result<Vec<CsvRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(|e| csv_err(path, e))?;
    if header.iter().ne(SWEEP_HEADER) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let mut v = [0.0; 6];
        for (slot, field) in v.iter_mut().zip(record.iter()) {
            *slot = field.parse().map_err(|_| Error::Format {
                path: path.to_path_buf(),
                message: format!("bad number '{field}'"),
            })?;
        }
        rows.push(CsvRow {
            axis_value: v[0],
            mean_plays: v[1],
            std_plays: v[2],
            success_rate: v[3],
            theory_ub: v[4],
            theory_lb: v[5],
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    parse_sweep_csv(file, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::sweep::{Algorithm, SweepRow};

    fn result() -> SweepResult {
        SweepResult {
            axis: "eps",
            algo: Algorithm::PacWrapper,
            rows: vec![
                SweepRow {
                    axis_value: 0.1,
                    mean_plays: 12345.678901234567,
                    std_plays: 1.0 / 3.0,
                    success_rate: 0.98,
                    theory_ub: 26.645_123_456_789,
                    theory_lb: 15.350567286626973,
                    mean_survival: vec![3.5, 1.25],
                },
                SweepRow {
                    axis_value: 0.05,
                    mean_plays: 2e20,
                    std_plays: 0.0,
                    success_rate: 1.0,
                    theory_ub: 1e-300,
                    theory_lb: 7.0,
                    mean_survival: vec![0.0, 2.0],
                },
            ],
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let res = result();
        let mut buf = Vec::new();
        write_sweep_csv(&res, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("axis_value,mean_plays,std_plays,success_rate,theory_ub,theory_lb\n"));
        assert!(text.ends_with('\n') && !text.contains('\r'));
        let rows = parse_sweep_csv(buf.as_slice(), Path::new("mem")).unwrap();
        assert_eq!(rows.len(), 2);
        for (row, orig) in rows.iter().zip(&res.rows) {
            assert_eq!(row.axis_value, orig.axis_value);
            assert_eq!(row.mean_plays, orig.mean_plays);
            assert_eq!(row.std_plays, orig.std_plays);
            assert_eq!(row.success_rate, orig.success_rate);
            assert_eq!(row.theory_ub, orig.theory_ub);
            assert_eq!(row.theory_lb, orig.theory_lb);
        }
    }

    #[test]
    fn survival_rows() {
        let mut buf = Vec::new();
        write_survival_csv(&result(), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "axis_value,item,mean_plays\n0.1,0,3.5\n0.1,1,1.25\n0.05,0,0\n0.05,1,2\n"
        );
    }

    #[test]
    fn io_errors_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("out.csv");
        let err = emit_csv(&result(), &path).unwrap_err();
        assert!(err.to_string().contains("out.csv"));
        assert!(read_csv(&dir.path().join("nope.csv")).is_err());
    }

    #[test]
    fn rejects_foreign_header() {
        let err = parse_sweep_csv("a,b\n1,2\n".as_bytes(), Path::new("x.csv")).unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
    }
}
