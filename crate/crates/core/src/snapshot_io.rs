//! Snapshot file I/O.
//!
//! Binary format `RSPK1`: magic bytes `RSPK`, little-endian `u32` version
//! (=1), `u64` N, `u64` n, then `N·n` complex entries column-major as
//! little-endian IEEE-754 `f64` pairs `(re, im)`.
//!
//! CSV alternative: header `re_0,im_0,…,re_{N-1},im_{N-1}`, then one line per
//! snapshot column with `2N` fields.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use faer::{c64, Mat};
use thiserror::Error;

use crate::datagen::SnapshotMatrix;

const MAGIC: &[u8; 4] = b"RSPK";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotIoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic at byte 0: expected \"RSPK\", found {found:?}")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported version {0} (expected 1)")]
    BadVersion(u32),
    #[error("truncated file: expected {expected} bytes for an N={n_antennas}, n={n_samples} matrix, got {actual}")]
    Truncated {
        expected: u64,
        actual: u64,
        n_antennas: u64,
        n_samples: u64,
    },
    #[error("invalid dimensions N={n_antennas}, n={n_samples}")]
    BadDimensions { n_antennas: u64, n_samples: u64 },
    #[error("csv parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },
}

/// Total RSPK1 file size for an `N×n` matrix.
pub fn rspk1_size(n_antennas: u64, n_samples: u64) -> u64 {
    4 + 4 + 8 + 8 + 16 * n_antennas * n_samples
}

/// Write a complex matrix in the RSPK1 container.
pub fn write_rspk1(path: &Path, m: &Mat<c64>) -> Result<(), SnapshotIoError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a complex matrix from an RSPK1 container.
pub fn read_rspk1(path: &Path) -> Result<Mat<c64>, SnapshotIoError> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 4 {
        return Err(SnapshotIoError::Truncated {
            expected: 24,
            actual: bytes.len() as u64,
            n_antennas: 0,
            n_samples: 0,
        });
    }
    if &bytes[0..4] != MAGIC {
        let mut found = [0u8; 4];
        found.copy_from_slice(&bytes[0..4]);
        return Err(SnapshotIoError::BadMagic { found });
    }
    if bytes.len() < 24 {
        return Err(SnapshotIoError::Truncated {
            expected: 24,
            actual: bytes.len() as u64,
            n_antennas: 0,
            n_samples: 0,
        });
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(SnapshotIoError::BadVersion(version));
    }
    let n_antennas = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let n_samples = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
    if n_antennas == 0 || n_samples == 0 || n_antennas.saturating_mul(n_samples) > (1 << 32) {
        return Err(SnapshotIoError::BadDimensions {
            n_antennas,
            n_samples,
        });
    }
    let expected = rspk1_size(n_antennas, n_samples);
    if (bytes.len() as u64) < expected {
        return Err(SnapshotIoError::Truncated {
            expected,
            actual: bytes.len() as u64,
            n_antennas,
            n_samples,
        });
    }
    let (rows, cols) = (n_antennas as usize, n_samples as usize);
    let mut m = Mat::zeros(rows, cols);
    let mut off = 24usize;
    for j in 0..cols {
        for i in 0..rows {
            let re = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
            let im = f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap());
            m[(i, j)] = c64::new(re, im);
            off += 16;
        }
    }
    Ok(m)
}

/// Write snapshots as CSV: one line per column.
pub fn write_csv(path: &Path, m: &Mat<c64>) -> Result<(), SnapshotIoError> {
    let mut w = BufWriter::new(File::create(path)?);
    let header: Vec<String> = (0..m.nrows())
        .flat_map(|i| [format!("re_{i}"), format!("im_{i}")])
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for j in 0..m.ncols() {
        let mut fields = Vec::with_capacity(2 * m.nrows());
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            fields.push(format!("{:.17e}", z.re));
            fields.push(format!("{:.17e}", z.im));
        }
        writeln!(w, "{}", fields.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Read snapshots from the CSV layout written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<Mat<c64>, SnapshotIoError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| SnapshotIoError::CsvParse {
            line: 1,
            message: "empty file".into(),
        })??;
    let n_fields = header.split(',').count();
    if n_fields == 0 || n_fields % 2 != 0 {
        return Err(SnapshotIoError::CsvParse {
            line: 1,
            message: format!("header must have an even number of fields, got {n_fields}"),
        });
    }
    let rows = n_fields / 2;
    let mut cols: Vec<Vec<c64>> = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n_fields {
            return Err(SnapshotIoError::CsvParse {
                line: k + 2,
                message: format!("expected {n_fields} fields, got {}", fields.len()),
            });
        }
        let mut col = Vec::with_capacity(rows);
        for i in 0..rows {
            let parse = |s: &str| -> Result<f64, SnapshotIoError> {
                s.trim().parse::<f64>().map_err(|e| SnapshotIoError::CsvParse {
                    line: k + 2,
                    message: format!("bad float {s:?}: {e}"),
                })
            };
            col.push(c64::new(parse(fields[2 * i])?, parse(fields[2 * i + 1])?));
        }
        cols.push(col);
    }
    if cols.is_empty() {
        return Err(SnapshotIoError::CsvParse {
            line: 2,
            message: "no data rows".into(),
        });
    }
    Ok(Mat::from_fn(rows, cols.len(), |i, j| cols[j][i]))
}

/// Load a snapshot file, detecting RSPK1 by magic and falling back to CSV.
pub fn load_snapshots(path: &Path) -> Result<SnapshotMatrix, SnapshotIoError> {
    let mut head = [0u8; 4];
    let n = File::open(path)?.read(&mut head)?;
    let m = if n == 4 && &head == MAGIC {
        read_rspk1(path)?
    } else {
        read_csv(path)?
    };
    Ok(SnapshotMatrix::new(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{role, standard_complex, stream};

    fn sample_matrix(rows: usize, cols: usize) -> Mat<c64> {
        let mut rng = stream(11, 0, role::NOISE);
        Mat::from_fn(rows, cols, |_, _| standard_complex(&mut rng))
    }

    #[test]
    fn rspk1_round_trip() {
        let dir = std::env::temp_dir();
        let path = dir.join("rgmusic_io_test.rspk");
        let m = sample_matrix(7, 13);
        write_rspk1(&path, &m).unwrap();
        let back = read_rspk1(&path).unwrap();
        assert_eq!(back.nrows(), 7);
        assert_eq!(back.ncols(), 13);
        for j in 0..13 {
            for i in 0..7 {
                assert_eq!(m[(i, j)], back[(i, j)]);
            }
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn truncated_file_reports_expected_length() {
        let dir = std::env::temp_dir();
        let path = dir.join("rgmusic_io_trunc.rspk");
        let m = sample_matrix(4, 6);
        write_rspk1(&path, &m).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 10]).unwrap();
        match read_rspk1(&path) {
            Err(SnapshotIoError::Truncated { expected, actual, .. }) => {
                assert_eq!(expected, rspk1_size(4, 6));
                assert_eq!(actual, rspk1_size(4, 6) - 10);
            }
            other => panic!("expected Truncated, got {other:?}"),
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn bad_magic_is_rejected_with_offset_zero() {
        let dir = std::env::temp_dir();
        let path = dir.join("rgmusic_io_magic.rspk");
        std::fs::write(&path, b"NOPE____________________").unwrap();
        assert!(matches!(
            read_rspk1(&path),
            Err(SnapshotIoError::BadMagic { .. })
        ));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn csv_round_trip_and_sniffing() {
        let dir = std::env::temp_dir();
        let path = dir.join("rgmusic_io_test.csv");
        let m = sample_matrix(3, 5);
        write_csv(&path, &m).unwrap();
        let back = load_snapshots(&path).unwrap();
        assert_eq!(back.n_antennas(), 3);
        assert_eq!(back.n_samples(), 5);
        for j in 0..5 {
            for i in 0..3 {
                assert!((m[(i, j)] - back.data()[(i, j)]).norm() < 1e-15);
            }
        }
        std::fs::remove_file(&path).ok();
    }
}
