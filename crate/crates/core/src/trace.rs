//! Per-iteration trace records and their CSV form.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "iter,f,gap,omega,lambda,A,disp,wall_s";

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub f_value: f64,
    pub gap_vs_ref: Option<f64>,
    pub omega: f64,
    pub lambda: f64,
    pub a_total: f64,
    pub displacement: f64,
    pub wall_seconds: f64,
}

impl TraceRecord {
    /// One CSV row. Floats use the shortest exponent form that round-trips.
    pub fn csv_row(&self) -> String {
        let gap = self.gap_vs_ref.map(|g| format!("{g:e}")).unwrap_or_default();
        format!(
            "{},{:e},{},{:e},{:e},{:e},{:e},{:e}",
            self.iter,
            self.f_value,
            gap,
            self.omega,
            self.lambda,
            self.a_total,
            self.displacement,
            self.wall_seconds
        )
    }
}

pub fn write_csv<W: Write>(records: &[TraceRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<TraceRecord>> {
    let mut records = Vec::new();
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim() == CSV_HEADER => {}
        Some((_, Ok(h))) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("unexpected header {h:?}"),
            })
        }
        Some((_, Err(e))) => {
            return Err(Error::Parse {
                line: 1,
                message: e.to_string(),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "missing header".into(),
            })
        }
    }
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 8 fields, got {}", fields.len()),
            });
        }
        let num = |i: usize| -> Result<f64> {
            fields[i].trim().parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("non-numeric field {:?}", fields[i]),
            })
        };
        let iter = fields[0].trim().parse::<usize>().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("non-integer iteration {:?}", fields[0]),
        })?;
        let gap = if fields[2].trim().is_empty() {
            None
        } else {
            Some(num(2)?)
        };
        records.push(TraceRecord {
            iter,
            f_value: num(1)?,
            gap_vs_ref: gap,
            omega: num(3)?,
            lambda: num(4)?,
            a_total: num(5)?,
            displacement: num(6)?,
            wall_seconds: num(7)?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let recs = vec![
            TraceRecord {
                iter: 1,
                f_value: 0.1,
                gap_vs_ref: Some(1e-3),
                omega: 1.0,
                lambda: 0.5,
                a_total: 0.25,
                displacement: 0.3,
                wall_seconds: 0.0,
            },
            TraceRecord {
                iter: 2,
                f_value: -1.5e-17,
                gap_vs_ref: None,
                omega: 0.67,
                lambda: 1.0 / 3.0,
                a_total: 2.0,
                displacement: 0.0,
                wall_seconds: 0.01,
            },
        ];
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("iter,f,gap,omega,lambda,A,disp,wall_s\n"));
        assert!(text.contains("2,-1.5e-17,,"));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, recs);
    }

    #[test]
    fn csv_rejects_wrong_header() {
        assert!(read_csv("a,b\n".as_bytes()).is_err());
    }

    #[test]
    fn csv_reports_bad_line() {
        let text = format!("{CSV_HEADER}\n1,2,,3,4,5,6,7\n2,x,,3,4,5,6,7\n");
        match read_csv(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
