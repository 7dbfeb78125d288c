//! Text formats for matrices and tabulated kernels.
//!
//! CSV: one row per line, comma-separated reals, no header. JSON matrices are
//! `{"data": [[..], ..]}`; JSON kernels are `{"nodes": [..], "values": [[..], ..]}`.
//! Numbers are written in the shortest form that parses back to the same bits.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::kernel::TabulatedKernel;
use crate::matrix::DenseMatrix;

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// Parses CSV rows of reals. Rows must all have the same length.
pub fn parse_rows_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("csv: {e}")))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().map_err(|_| {
                    Error::Format(format!(
                        "row {}, column {}: not a number: {field:?}",
                        line + 1,
                        col + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Format(format!(
                    "ragged input: row {} has {} entries, expected {}",
                    line + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format("empty input".into()));
    }
    Ok(rows)
}

pub fn parse_matrix_csv(text: &str) -> Result<DenseMatrix> {
    DenseMatrix::from_rows(&parse_rows_csv(text)?)
}

pub fn parse_matrix_json(text: &str) -> Result<DenseMatrix> {
    #[derive(Deserialize)]
    struct Repr {
        data: Vec<Vec<f64>>,
    }
    let repr: Repr = serde_json::from_str(text).map_err(|e| Error::Format(format!("json: {e}")))?;
    if repr.data.is_empty() {
        return Err(Error::Format("empty input".into()));
    }
    DenseMatrix::from_rows(&repr.data)
}

/// Chooses JSON when the first non-blank character is `{`, CSV otherwise.
pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    if looks_like_json(text) {
        parse_matrix_json(text)
    } else {
        parse_matrix_csv(text)
    }
}

/// Tabulated kernel from CSV (uniform midpoint nodes) or JSON with explicit nodes.
pub fn parse_tabulated(text: &str) -> Result<TabulatedKernel> {
    if looks_like_json(text) {
        #[derive(Deserialize)]
        struct Repr {
            nodes: Vec<f64>,
            values: Vec<Vec<f64>>,
        }
        let repr: Repr =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("json: {e}")))?;
        TabulatedKernel::new(repr.nodes, repr.values)
    } else {
        TabulatedKernel::uniform(parse_rows_csv(text)?)
    }
}

/// Shortest decimal that round-trips to the same `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:?}")
}

pub fn matrix_to_csv(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.n() {
        let row: Vec<String> = m.row(i).iter().map(|&x| format_real(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_agree() {
        let a = parse_matrix("1, 2\n3,4.5\n").unwrap();
        let b = parse_matrix(r#" {"data": [[1, 2], [3, 4.5]]}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.get(1, 1), 4.5);
    }

    #[test]
    fn blank_lines_are_skipped() {
        let m = parse_matrix("\n1,0\n\n0,1\n\n").unwrap();
        assert_eq!(m, DenseMatrix::identity(2));
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(parse_matrix(""), Err(Error::Format(_))));
        assert!(matches!(parse_matrix("  \n"), Err(Error::Format(_))));
        assert!(matches!(parse_matrix("1,2\n3\n"), Err(Error::Format(_))));
        assert!(matches!(parse_matrix("1,x\n3,4\n"), Err(Error::Format(_))));
        assert!(matches!(
            parse_matrix(r#"{"data": []}"#),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            parse_matrix(r#"{"rows": [[1]]}"#),
            Err(Error::Format(_))
        ));
        // rectangular but not ragged
        assert!(matches!(
            parse_matrix("1,2,3\n4,5,6\n"),
            Err(Error::Validation(_))
        ));
        assert!(parse_matrix("1,NaN\n0,1\n").is_err());
    }

    #[test]
    fn csv_round_trip_is_bitwise() {
        let vals = [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            -0.0,
            7.0,
        ];
        let data: Vec<f64> = (0..9)
            .map(|k| vals[k % vals.len()] * (k as f64 + 1.0))
            .collect();
        let m = DenseMatrix::new(3, data).unwrap();
        let back = parse_matrix(&matrix_to_csv(&m)).unwrap();
        for (x, y) in m.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn tabulated_formats() {
        let t = parse_tabulated("1,1\n1,1\n").unwrap();
        assert_eq!(t.nodes(), &[0.25, 0.75]);
        let j = parse_tabulated(r#"{"nodes": [0.1, 0.9], "values": [[1, 2], [2, 1]]}"#).unwrap();
        assert_eq!(j.nodes(), &[0.1, 0.9]);
        assert!(parse_tabulated(r#"{"nodes": [0.1], "values": [[1, 2], [2, 1]]}"#).is_err());
    }
}
