//! Matrix Market coordinate files, CSV tables, JSON-lines reports and
//! whitespace-separated data files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::assembly::SparseOperator;
use crate::error::{Error, Result};
use crate::experiments::SweepResult;
use crate::sparse::CsrMatrix;

const MM_HEADER: &str = "%%MatrixMarket matrix coordinate real general";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

/// Writes `a` in coordinate real general format, entries sorted by
/// `(row, col)` with 1-based indices. Values use the shortest round-trip
/// representation.
pub fn write_matrix_market(a: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let body = (|| -> std::io::Result<()> {
        writeln!(w, "{MM_HEADER}")?;
        writeln!(w, "{} {} {}", a.dim(), a.dim(), a.nnz())?;
        for (i, j, v) in a.triplets() {
            writeln!(w, "{} {} {:?}", i + 1, j + 1, v)?;
        }
        w.flush()
    })();
    body.map_err(io_err(path))
}

/// Reads a square coordinate real general file. The result carries no grid
/// metadata.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseOperator> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    let parse = |line: usize, message: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        message,
    };

    let mut lines = reader.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (n0, header) = lines.next().ok_or_else(|| parse(1, "empty file".into()))?;
    let header = header.map_err(io_err(path))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields != ["%%matrixmarket", "matrix", "coordinate", "real", "general"] {
        return Err(parse(n0, format!("unsupported header {header:?}")));
    }

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    for (ln, line) in lines {
        let line = line.map_err(io_err(path))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let tok: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                let [r, c, nnz] = tok[..] else {
                    return Err(parse(ln, format!("expected `rows cols nnz`, got {t:?}")));
                };
                let num = |s: &str| s.parse::<usize>().map_err(|e| parse(ln, format!("{s:?}: {e}")));
                let (r, c, nnz) = (num(r)?, num(c)?, num(nnz)?);
                if r != c {
                    return Err(parse(ln, format!("matrix is {r} x {c}, expected square")));
                }
                size = Some((r, nnz));
                triplets.reserve(nnz);
            }
            Some((n, nnz)) => {
                let [i, j, v] = tok[..] else {
                    return Err(parse(ln, format!("expected `row col value`, got {t:?}")));
                };
                let idx = |s: &str| match s.parse::<usize>() {
                    Ok(k) if (1..=n).contains(&k) => Ok(k - 1),
                    Ok(k) => Err(parse(ln, format!("index {k} outside 1..={n}"))),
                    Err(e) => Err(parse(ln, format!("{s:?}: {e}"))),
                };
                let v: f64 = v.parse().map_err(|e| parse(ln, format!("{v:?}: {e}")))?;
                if triplets.len() == nnz {
                    return Err(parse(ln, format!("more than the declared {nnz} entries")));
                }
                triplets.push((idx(i)?, idx(j)?, v));
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| parse(n0 + 1, "missing size line".into()))?;
    if triplets.len() != nnz {
        return Err(parse(n0, format!("declared {nnz} entries, found {}", triplets.len())));
    }
    Ok(SparseOperator::from_matrix(CsrMatrix::from_triplets(n, triplets)))
}

/// Writes one CSV record per row, with a header from the field names.
pub fn write_csv<T: Serialize>(rows: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))
}

/// Appends one JSON object per line.
pub fn write_json_line<T: Serialize, W: Write>(out: &mut W, item: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, item)?;
    out.write_all(b"\n").map_err(|source| Error::Io {
        path: PathBuf::from("<stream>"),
        source,
    })
}

pub fn write_json_lines<T: Serialize>(items: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for it in items {
        serde_json::to_writer(&mut w, it)?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Whitespace-separated columns `ratio min_bar min_interior`, readable by
/// gnuplot.
pub fn write_sweep_data(sweep: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let body = (|| -> std::io::Result<()> {
        writeln!(w, "# mesh {}x{}", sweep.mesh.0, sweep.mesh.1)?;
        writeln!(w, "# ratio min_bar min_interior")?;
        for p in &sweep.points {
            writeln!(w, "{:.6e} {:.6e} {:.6e}", p.ratio, p.min_bar, p.min_interior)?;
        }
        w.flush()
    })();
    body.map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_1d_laplacian, assemble_2d_laplacian};
    use crate::grid::{Grid1D, Grid2D};

    #[test]
    fn one_point_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.mtx");
        let a = assemble_1d_laplacian(&Grid1D::unit(1).unwrap()).into_matrix();
        write_matrix_market(&a, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], MM_HEADER);
        assert_eq!(lines[1], "3 3 5");
        assert_eq!(lines[2], "1 1 1.0");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn round_trip_2d() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.mtx");
        let g = Grid2D::new(7, 7, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let a = assemble_2d_laplacian(&g).scale_boundary_rows().unwrap().into_matrix();
        write_matrix_market(&a, &p).unwrap();
        let b = read_matrix_market(&p).unwrap();
        assert_eq!(b.matrix(), &a);
        assert!(b.layout().is_none());
    }

    #[test]
    fn unwritable_path_is_named() {
        let e = write_matrix_market(&CsrMatrix::identity(2), "/nonexistent-dir/x.mtx").unwrap_err();
        assert!(e.to_string().contains("/nonexistent-dir/x.mtx"), "{e}");
    }

    #[test]
    fn parse_errors_carry_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.mtx");
        let cases = [
            ("%%MatrixMarket matrix array real general\n", 1),
            (&format!("{MM_HEADER}\n% c\n2 2 1\n1 x 1.0\n")[..], 4),
            (&format!("{MM_HEADER}\n2 2 1\n3 1 1.0\n")[..], 3),
            (&format!("{MM_HEADER}\n2 3 1\n")[..], 2),
        ];
        for (text, line) in cases {
            std::fs::write(&p, text).unwrap();
            match read_matrix_market(&p) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn csv_and_json_lines() {
        #[derive(Serialize)]
        struct Row {
            mesh: String,
            v: f64,
        }
        let dir = tempfile::tempdir().unwrap();
        let rows = [
            Row {
                mesh: "2x4".into(),
                v: -1.5,
            },
            Row {
                mesh: "a,b".into(),
                v: 0.0,
            },
        ];
        write_csv(&rows, dir.path().join("t.csv")).unwrap();
        let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(text, "mesh,v\n2x4,-1.5\n\"a,b\",0.0\n");
        write_json_lines(&rows, dir.path().join("t.jsonl")).unwrap();
        let text = std::fs::read_to_string(dir.path().join("t.jsonl")).unwrap();
        assert_eq!(text.lines().count(), 2);
        let mut buf = Vec::new();
        write_json_line(&mut buf, &rows[0]).unwrap();
        assert_eq!(buf, b"{\"mesh\":\"2x4\",\"v\":-1.5}\n");
    }
}
