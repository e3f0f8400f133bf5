//! Matrix files: decimal csv, and structured text with exact entries.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mixed_mops::{Matrix, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

/// Header of a structured-text file.
#[derive(Clone, Debug)]
pub struct Meta {
    pub fixture: String,
    pub matrix: String,
    pub n: usize,
    pub backend: String,
    /// Leading rows and columns whose entries are exact.
    pub window: (usize, usize),
}

pub fn render_csv<T: Scalar>(m: &Matrix<T>, digits: usize) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| v.to_fixed(digits)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn render_text<T: Scalar>(m: &Matrix<T>, meta: &Meta) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# fixture: {}", meta.fixture);
    let _ = writeln!(out, "# matrix: {}", meta.matrix);
    let _ = writeln!(out, "# N: {}", meta.n);
    let _ = writeln!(out, "# backend: {}", meta.backend);
    let _ = writeln!(out, "# window: {} x {}", meta.window.0, meta.window.1);
    let _ = writeln!(out, "# shape: {} x {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| v.to_exact_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn export_matrix<T: Scalar>(m: &Matrix<T>, dir: &Path, format: Format, digits: usize, meta: &Meta) -> Result<PathBuf> {
    let path = dir.join(format!("{}.{}", meta.matrix, format.extension()));
    let body = match format {
        Format::Csv => render_csv(m, digits),
        Format::Text => render_text(m, meta),
    };
    std::fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mixed_mops::scalar::ratio;
    use mixed_mops::Rational;

    #[test]
    fn identity_csv() {
        let id = Matrix::<Rational>::identity(2, ());
        assert_eq!(render_csv(&id, 0), "1,0\n0,1\n");
    }

    #[test]
    fn text_has_header_and_exact_entries() {
        let g = Matrix::from_rows(vec![vec![ratio(1, 1), ratio(1, 2)], vec![ratio(1, 2), ratio(1, 3)]]);
        let meta = Meta {
            fixture: "hilbert".into(),
            matrix: "g".into(),
            n: 2,
            backend: "rational".into(),
            window: (2, 2),
        };
        let t = render_text(&g, &meta);
        assert!(t.starts_with("# fixture: hilbert\n"));
        assert!(t.ends_with("1 1/2\n1/2 1/3\n"));
    }
}
