//! Matrix file formats: Matrix Market coordinate files and plain edge lists.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::sparse::SparseMatrix;

/// Index base of a text format. Matrix Market is 1-based by convention;
/// edge lists in the wild come in both flavors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexBase {
    Zero,
    One,
}

impl IndexBase {
    fn offset(self) -> usize {
        match self {
            IndexBase::Zero => 0,
            IndexBase::One => 1,
        }
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn parse_index(path: &Path, line_no: usize, tok: &str, base: IndexBase, n: usize) -> Result<usize> {
    let raw: usize = tok
        .parse()
        .map_err(|_| parse_err(path, line_no, format!("invalid index '{tok}'")))?;
    let off = base.offset();
    if raw < off {
        return Err(parse_err(
            path,
            line_no,
            format!("index {raw} below base {off}"),
        ));
    }
    let idx = raw - off;
    if idx >= n {
        return Err(parse_err(
            path,
            line_no,
            format!("index {raw} out of range for dimension {n}"),
        ));
    }
    Ok(idx)
}

/// Read a real Matrix Market coordinate file.
///
/// Supported header variants: field `real`, `integer` or `pattern`; symmetry
/// `general` or `symmetric`. Symmetric files are expanded (off-diagonal
/// entries mirrored), pattern files get unit values, duplicate entries are
/// summed. `base` selects the index base; standard files use
/// [`IndexBase::One`].
pub fn read_matrix_market(path: &Path, base: IndexBase) -> Result<SparseMatrix<f64>> {
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let toks: Vec<String> = header.split_whitespace().map(|t| t.to_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(parse_err(path, 1, "missing '%%MatrixMarket matrix' header"));
    }
    if toks[2] != "coordinate" {
        return Err(Error::unsupported(format!(
            "matrix market format '{}' (only 'coordinate' is supported)",
            toks[2]
        )));
    }
    let field = toks[3].as_str();
    if !matches!(field, "real" | "integer" | "pattern") {
        return Err(Error::unsupported(format!(
            "matrix market field '{field}' (only real, integer, pattern)"
        )));
    }
    let symmetric = match toks[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(Error::unsupported(format!(
                "matrix market symmetry '{other}' (only general, symmetric)"
            )))
        }
    };

    // size line: first non-comment line after the header
    let mut size: Option<(usize, usize, usize, usize)> = None;
    for (idx, line) in lines.by_ref() {
        let line_no = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(path, line_no, "size line must be 'rows cols nnz'"));
        }
        let nums: Vec<usize> = parts
            .iter()
            .map(|p| {
                p.parse()
                    .map_err(|_| parse_err(path, line_no, format!("invalid size '{p}'")))
            })
            .collect::<Result<_>>()?;
        size = Some((nums[0], nums[1], nums[2], line_no));
        break;
    }
    let (n_rows, n_cols, nnz, size_line) =
        size.ok_or_else(|| parse_err(path, 1, "missing size line"))?;

    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(nnz);
    let mut seen = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        let expected = if field == "pattern" { 2 } else { 3 };
        if parts.len() != expected {
            return Err(parse_err(
                path,
                line_no,
                format!("expected {expected} fields, found {}", parts.len()),
            ));
        }
        let i = parse_index(path, line_no, parts[0], base, n_rows)?;
        let j = parse_index(path, line_no, parts[1], base, n_cols)?;
        let v = if field == "pattern" {
            1.0
        } else {
            parts[2]
                .parse::<f64>()
                .map_err(|_| parse_err(path, line_no, format!("invalid value '{}'", parts[2])))?
        };
        triplets.push((i, j, v));
        if symmetric && i != j {
            triplets.push((j, i, v));
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(parse_err(
            path,
            size_line,
            format!("size line declares {nnz} entries, file has {seen}"),
        ));
    }
    SparseMatrix::from_triplets(n_rows, n_cols, &triplets)
}

/// Write a matrix as a general real Matrix Market coordinate file (1-based),
/// with enough digits for an exact f64 round trip.
pub fn write_matrix_market(path: &Path, m: &SparseMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    out.push_str(&format!("{} {} {}\n", m.n_rows(), m.n_cols(), m.nnz()));
    for (i, j, v) in m.triplets() {
        out.push_str(&format!("{} {} {:.16e}\n", i + 1, j + 1, v));
    }
    let mut f = fs::File::create(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    f.write_all(out.as_bytes()).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Read a whitespace-separated edge list into a unit-weight adjacency matrix.
///
/// Each data line is `u v`; lines starting with `#` or `%` and blank lines
/// are skipped. Node count is inferred from the largest index. Undirected
/// graphs store both orientations; duplicate edges (including the mirrored
/// copy of an undirected edge listed both ways) clamp to weight 1 rather
/// than accumulating.
pub fn read_edge_list(path: &Path, directed: bool, base: IndexBase) -> Result<SparseMatrix<f64>> {
    let text = read_to_string(path)?;
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut max_idx = 0usize;
    let off = base.offset();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 'u v', found {} fields", parts.len()),
            ));
        }
        let mut uv = [0usize; 2];
        for (slot, tok) in uv.iter_mut().zip(&parts) {
            let raw: usize = tok
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("invalid node id '{tok}'")))?;
            if raw < off {
                return Err(parse_err(
                    path,
                    line_no,
                    format!("node id {raw} below base {off}"),
                ));
            }
            *slot = raw - off;
        }
        let (u, v) = (uv[0], uv[1]);
        max_idx = max_idx.max(u).max(v);
        edges.insert((u, v));
        if !directed {
            edges.insert((v, u));
        }
    }
    if edges.is_empty() {
        return Err(parse_err(path, 1, "edge list contains no edges"));
    }
    let n = max_idx + 1;
    let triplets: Vec<(usize, usize, f64)> =
        edges.into_iter().map(|(u, v)| (u, v, 1.0)).collect();
    SparseMatrix::from_triplets(n, n, &triplets)
}
