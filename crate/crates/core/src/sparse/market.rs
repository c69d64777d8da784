//! Matrix Market coordinate format (`real general`) export and import.

use super::csr::{SparseMatrix, TripletBuilder};
use std::io::{self, BufRead, Write};

const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

/// Writes the matrix with one-based indices and round-trip float formatting.
pub fn write_matrix_market<W: Write>(matrix: &SparseMatrix, mut out: W) -> io::Result<()> {
    writeln!(out, "{HEADER}")?;
    writeln!(out, "{} {} {}", matrix.dim(), matrix.dim(), matrix.nnz())?;
    for (r, c, v) in matrix.iter() {
        writeln!(out, "{} {} {:e}", r + 1, c + 1, v)?;
    }
    Ok(())
}

pub fn read_matrix_market<R: BufRead>(input: R) -> io::Result<SparseMatrix> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))??;
    if !header.trim().eq_ignore_ascii_case(HEADER) {
        return Err(bad(format!("unsupported header: {header}")));
    }
    let mut size_line = None;
    for line in lines.by_ref() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        size_line = Some(t.to_owned());
        break;
    }
    let size_line = size_line.ok_or_else(|| bad("missing size line".into()))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|s| s.parse().map_err(|e| bad(format!("size line: {e}"))))
        .collect::<io::Result<_>>()?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(bad(format!("size line needs three integers: {size_line}")));
    };
    if rows != cols {
        return Err(bad(format!("only square matrices are supported, got {rows}x{cols}")));
    }
    let mut builder = TripletBuilder::with_capacity(rows, nnz);
    let mut seen = 0;
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut parts = t.split_whitespace();
        let mut field = |name: &str| parts.next().ok_or_else(|| bad(format!("missing {name} in `{t}`")));
        let r: usize = field("row")?.parse().map_err(|e| bad(format!("row: {e}")))?;
        let c: usize = field("col")?.parse().map_err(|e| bad(format!("col: {e}")))?;
        let v: f64 = field("value")?.parse().map_err(|e| bad(format!("value: {e}")))?;
        if r == 0 || c == 0 || r > rows || c > cols {
            return Err(bad(format!("index ({r}, {c}) out of range")));
        }
        builder.push(r - 1, c - 1, v);
        seen += 1;
    }
    if seen != nnz {
        return Err(bad(format!("expected {nnz} entries, found {seen}")));
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_one_based_indices() {
        let mut b = TripletBuilder::new(2);
        b.push(0, 0, 1.5);
        b.push(1, 0, -0.25);
        let mut buf = Vec::new();
        write_matrix_market(&b.build(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], HEADER);
        assert_eq!(lines[1], "2 2 2");
        assert_eq!(lines[2], "1 1 1.5e0");
        assert_eq!(lines[3], "2 1 -2.5e-1");
    }

    #[test]
    fn rejects_wrong_entry_count() {
        let text = format!("{HEADER}\n2 2 2\n1 1 1.0\n");
        assert!(read_matrix_market(text.as_bytes()).is_err());
    }

    #[test]
    fn skips_comments() {
        let text = format!("{HEADER}\n% comment\n2 2 1\n% another\n2 2 3.0\n");
        let m = read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(m.get(1, 1), 3.0);
    }

    proptest::proptest! {
        #[test]
        fn round_trip(entries in proptest::collection::vec((0usize..7, 0usize..7, -1e6f64..1e6), 0..30)) {
            let mut b = TripletBuilder::new(7);
            for (r, c, v) in entries {
                b.push(r, c, v);
            }
            let m = b.build();
            let mut buf = Vec::new();
            write_matrix_market(&m, &mut buf).unwrap();
            let back = read_matrix_market(buf.as_slice()).unwrap();
            proptest::prop_assert_eq!(back, m);
        }
    }
}
