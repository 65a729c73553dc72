use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2, Axis};

use crate::dataset::{Dataset, Task};
use crate::error::{invalid, Result, SglError};

/// How the response column is read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelCoding {
    /// Real-valued regression response.
    Real,
    /// Numeric class labels, each `-1` or `+1`.
    PlusMinusOne,
    /// Exactly two distinct strings; `positive` maps to `+1`, the other to `-1`.
    Named { positive: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    /// Header name of the response column; every other column is a variable.
    pub response: String,
    pub labels: LabelCoding,
}

impl CsvSchema {
    pub fn regression(response: impl Into<String>) -> Self {
        Self {
            response: response.into(),
            labels: LabelCoding::Real,
        }
    }

    pub fn classification(response: impl Into<String>) -> Self {
        Self {
            response: response.into(),
            labels: LabelCoding::PlusMinusOne,
        }
    }
}

fn load_err(row: usize, column: &str, message: impl Into<String>) -> SglError {
    SglError::Load {
        row,
        column: column.to_string(),
        message: message.into(),
    }
}

/// Loads a header-first CSV file. Row numbers in errors are file line numbers.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<(Dataset<f64>, Vec<String>)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    read_csv(file, schema)
}

/// Returns the dataset and the variable names in column order.
pub fn read_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<(Dataset<f64>, Vec<String>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| load_err(1, "", e.to_string()))?
        .clone();
    let resp_idx = headers
        .iter()
        .position(|h| h.trim() == schema.response)
        .ok_or_else(|| load_err(1, &schema.response, "response column missing from header"))?;
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != resp_idx)
        .map(|(_, h)| h.trim().to_string())
        .collect();

    let mut values: Vec<f64> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut rows = 0usize;
    for (r, rec) in rdr.records().enumerate() {
        let line = r + 2;
        let rec = rec.map_err(|e| load_err(line, "", e.to_string()))?;
        if rec.len() != headers.len() {
            return Err(load_err(
                line,
                "",
                format!("expected {} fields, found {}", headers.len(), rec.len()),
            ));
        }
        for (k, cell) in rec.iter().enumerate() {
            let cell = cell.trim();
            if k == resp_idx {
                if cell.is_empty() {
                    return Err(load_err(line, &schema.response, "missing response"));
                }
                raw_labels.push(cell.to_string());
            } else {
                let v: f64 = cell.parse().map_err(|_| {
                    load_err(line, &headers[k], format!("non-numeric cell {cell:?}"))
                })?;
                if !v.is_finite() {
                    return Err(load_err(line, &headers[k], "non-finite value"));
                }
                values.push(v);
            }
        }
        rows += 1;
    }
    let p = names.len();
    let x = Array2::from_shape_vec((rows, p), values)
        .map_err(|e| SglError::InvalidInput(e.to_string()))?;

    let (y, task) = match &schema.labels {
        LabelCoding::Real | LabelCoding::PlusMinusOne => {
            let mut y = Vec::with_capacity(rows);
            for (r, s) in raw_labels.iter().enumerate() {
                let v: f64 = s.parse().map_err(|_| {
                    load_err(
                        r + 2,
                        &schema.response,
                        format!("non-numeric response {s:?}"),
                    )
                })?;
                y.push(v);
            }
            let task = if schema.labels == LabelCoding::Real {
                Task::Regression
            } else {
                Task::Classification
            };
            (Array1::from(y), task)
        }
        LabelCoding::Named { positive } => {
            let mut distinct: Vec<&str> = raw_labels.iter().map(String::as_str).collect();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() != 2 || !distinct.contains(&positive.as_str()) {
                return invalid(format!(
                    "response must take exactly two values including {positive:?}, found {distinct:?}"
                ));
            }
            let y = raw_labels
                .iter()
                .map(|s| if s == positive { 1.0 } else { -1.0 })
                .collect();
            (y, Task::Classification)
        }
    };
    Ok((Dataset::new(x, y, task)?, names))
}

/// Writes variables then the response column `y`, every value with 17
/// significant digits so reloading is bit-exact.
pub fn write_csv<W: Write>(writer: W, data: &Dataset<f64>, names: Option<&[String]>) -> Result<()> {
    let p = data.n_vars();
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = match names {
        Some(n) if n.len() == p => n.to_vec(),
        Some(_) => return invalid("variable name count differs from p"),
        None => (1..=p).map(|j| format!("x{j}")).collect(),
    };
    header.push("y".into());
    let io = |e: csv::Error| SglError::Io(std::io::Error::other(e));
    w.write_record(&header).map_err(io)?;
    for i in 0..data.n_samples() {
        let mut rec: Vec<String> = data.sample(i).iter().map(|v| format!("{v:.16e}")).collect();
        rec.push(format!("{:.16e}", data.y()[i]));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Training statistics used to normalize a split.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub means: Array1<f64>,
    /// Euclidean length of each centred training column; 1 for constant columns.
    pub scales: Array1<f64>,
    /// Variables constant over the training samples (scaled by 1, not dropped).
    pub constant: Vec<usize>,
}

/// Centres every variable on its training mean and scales it to unit
/// Euclidean length over the training samples. The test set is transformed
/// with the training statistics only.
pub fn normalize_split(
    train: &Dataset<f64>,
    test: &Dataset<f64>,
) -> Result<(Dataset<f64>, Dataset<f64>, Normalization)> {
    if train.n_vars() != test.n_vars() {
        return invalid("train and test have different variable counts");
    }
    let means = train.x().mean_axis(Axis(0)).expect("n >= 2");
    let centred = &train.x() - &means;
    let mut constant = Vec::new();
    let scales: Array1<f64> = centred
        .columns()
        .into_iter()
        .enumerate()
        .map(|(j, c)| {
            let len = c.dot(&c).sqrt();
            if len == 0.0 {
                constant.push(j);
                1.0
            } else {
                len
            }
        })
        .collect();
    let tx = centred / &scales;
    let sx = (&test.x() - &means) / &scales;
    Ok((
        Dataset::new(tx, train.y().to_owned(), train.task())?,
        Dataset::new(sx, test.y().to_owned(), test.task())?,
        Normalization {
            means,
            scales,
            constant,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn two_value_column_normalizes() {
        let train = Dataset::regression(array![[1.0, 5.0], [-1.0, 5.0]], array![0.0, 1.0]).unwrap();
        let (t, s, info) = normalize_split(&train, &train).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((t.x()[[0, 0]] - r).abs() < 1e-15 && (t.x()[[1, 0]] + r).abs() < 1e-15);
        assert_eq!(t.x().column(1).to_vec(), vec![0.0, 0.0]);
        assert_eq!(info.constant, vec![1]);
        assert_eq!(s.x(), t.x());
    }

    #[test]
    fn test_uses_training_statistics() {
        let train = Dataset::regression(array![[0.0], [2.0]], array![0.0, 1.0]).unwrap();
        let test = Dataset::regression(array![[4.0], [1.0]], array![0.0, 1.0]).unwrap();
        let (_, s, _) = normalize_split(&train, &test).unwrap();
        let len = 2f64.sqrt();
        assert!((s.x()[[0, 0]] - 3.0 / len).abs() < 1e-15);
        assert_eq!(s.x()[[1, 0]], 0.0);
    }

    #[test]
    fn load_errors_carry_location() {
        let text = "a,b,y\n1,2,3\n4,oops,5\n";
        let err = read_csv(text.as_bytes(), &CsvSchema::regression("y")).unwrap_err();
        match err {
            SglError::Load { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column, "b");
            }
            e => panic!("unexpected {e}"),
        }
        let err = read_csv("a,y\n1,\n2,3\n".as_bytes(), &CsvSchema::regression("y")).unwrap_err();
        assert!(err.to_string().contains("missing response"));
        assert!(read_csv("a,b\n1,2\n".as_bytes(), &CsvSchema::regression("y")).is_err());
    }

    #[test]
    fn named_labels() {
        let text = "g1,type\n0.5,ALL\n0.1,AML\n0.2,ALL\n";
        let schema = CsvSchema {
            response: "type".into(),
            labels: LabelCoding::Named {
                positive: "ALL".into(),
            },
        };
        let (d, names) = read_csv(text.as_bytes(), &schema).unwrap();
        assert_eq!(d.y().to_vec(), vec![1.0, -1.0, 1.0]);
        assert_eq!(names, vec!["g1".to_string()]);
        assert_eq!(d.task(), Task::Classification);
    }

    proptest! {
        #[test]
        fn write_then_read_is_bit_exact(vals in proptest::collection::vec(-1e6f64..1e6, 9), ys in proptest::collection::vec(-1e3f64..1e3, 3)) {
            let d = Dataset::regression(Array2::from_shape_vec((3, 3), vals).unwrap(), Array1::from(ys)).unwrap();
            let mut buf = Vec::new();
            write_csv(&mut buf, &d, None).unwrap();
            let (back, names) = read_csv(buf.as_slice(), &CsvSchema::regression("y")).unwrap();
            prop_assert_eq!(names, vec!["x1".to_string(), "x2".into(), "x3".into()]);
            prop_assert_eq!(back, d);
        }
    }
}
