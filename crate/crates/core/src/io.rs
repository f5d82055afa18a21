//! CSV and JSON interchange for trajectories, matrices and result tables.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::Trajectory;

/// Writes `t,z1..zp` (plus `e1..eq` for an exogenous block), one row per
/// observation.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let p = traj.p();
    let q = traj.exo().map_or(0, |e| e.ncols());
    let mut header = vec!["t".to_string()];
    header.extend((1..=p).map(|j| format!("z{j}")));
    header.extend((1..=q).map(|j| format!("e{j}")));
    w.write_record(&header)?;
    for t in 0..=traj.horizon() {
        let mut rec = vec![t.to_string()];
        rec.extend(traj.data().row(t).iter().map(|v| v.to_string()));
        if let Some(e) = traj.exo() {
            rec.extend(e.row(t).iter().map(|v| v.to_string()));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Trajectory> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.get(0) != Some("t") {
        return Err(Error::Config("trajectory CSV must start with a 't' column".into()));
    }
    let endo: Vec<usize> = (1..header.len()).filter(|&i| header[i].starts_with('z')).collect();
    let exo: Vec<usize> = (1..header.len()).filter(|&i| header[i].starts_with('e')).collect();
    if endo.is_empty() || endo.len() + exo.len() + 1 != header.len() {
        return Err(Error::Config("trajectory CSV columns must be t, z1..zp, e1..eq".into()));
    }
    let mut z = Vec::new();
    let mut e = Vec::new();
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|err| Error::Config(format!("bad number '{}': {err}", &rec[i])))
        };
        for &i in &endo {
            z.push(parse(i)?);
        }
        for &i in &exo {
            e.push(parse(i)?);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Config("trajectory CSV has no rows".into()));
    }
    let data = Matrix::from_row_slice(rows, endo.len(), &z);
    if exo.is_empty() {
        Trajectory::new(data)
    } else {
        Trajectory::with_exo(data, Matrix::from_row_slice(rows, exo.len(), &e))
    }
}

/// Matrix as CSV with header `c1..cm`.
pub fn write_matrix_csv<W: Write>(m: &Matrix, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record((1..=m.ncols()).map(|j| format!("c{j}")))?;
    for row in m.row_iter() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_csv<R: Read>(input: R) -> Result<Matrix> {
    let mut r = csv::Reader::from_reader(input);
    let cols = r.headers()?.len();
    let mut vals = Vec::new();
    let mut rows = 0;
    for rec in r.records() {
        for field in rec?.iter() {
            vals.push(
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("bad number '{field}': {e}")))?,
            );
        }
        rows += 1;
    }
    Ok(Matrix::from_row_slice(rows, cols, &vals))
}

/// Typed rows as CSV; the header comes from the row struct's field names.
pub fn write_rows_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows_csv<T: DeserializeOwned, R: Read>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Lowercase hex SHA-256 of the canonical JSON encoding of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
