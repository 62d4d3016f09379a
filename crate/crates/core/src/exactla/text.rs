//! Plain-text matrix files.
//!
//! ```text
//! 3 3 F2
//! 0 1 0
//! 1 0 1
//! 0 1 0
//! ```
//!
//! The header is `m n field` with field `F2`, `Fp:<p>` or `Q`; each following
//! line holds one row of whitespace-separated entries. Rationals are written
//! `num/den`. Blank lines and lines starting with `#` are ignored.

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::field::FieldSpec;

impl Matrix {
    pub fn parse_text(text: &str) -> Result<Matrix> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::usage("empty matrix file"))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let [m, n, field] = parts[..] else {
            return Err(Error::usage(format!("bad matrix header `{header}`")));
        };
        let parse_dim = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::usage(format!("bad dimension `{s}`")))
        };
        let (m, n) = (parse_dim(m)?, parse_dim(n)?);
        let field: FieldSpec = field.parse()?;
        let mut out = Matrix::zeros(m, n, field);
        let mut row = 0;
        for line in lines {
            if row == m {
                return Err(Error::usage(format!("more than {m} rows")));
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != n {
                return Err(Error::usage(format!(
                    "row {} has {} entries, expected {n}",
                    row + 1,
                    tokens.len()
                )));
            }
            for (j, tok) in tokens.iter().enumerate() {
                out.set(row, j, &field.parse_element(tok)?)?;
            }
            row += 1;
        }
        if row != m {
            return Err(Error::usage(format!("expected {m} rows, found {row}")));
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        format!("{} {} {}\n{}", self.rows(), self.cols(), self.field(), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_and_rows() {
        let m = Matrix::parse_text("# path\n3 3 F2\n0 1 0\n1 0 1\n0 1 0\n").unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(Matrix::parse_text(&m.to_text()).unwrap(), m);
        let q = Matrix::parse_text("1 2 Q\n1/2 -3\n").unwrap();
        assert_eq!(q.get(0, 0).to_string(), "1/2");
        assert_eq!(Matrix::parse_text(&q.to_text()).unwrap(), q);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Matrix::parse_text("").is_err());
        assert!(Matrix::parse_text("2 2 F2\n0 1\n").is_err());
        assert!(Matrix::parse_text("1 2 F2\n0 1 1\n").is_err());
        assert!(Matrix::parse_text("1 1 Fp:4\n1\n").is_err());
        assert!(Matrix::parse_text("1 1 R\n1\n").is_err());
    }
}
