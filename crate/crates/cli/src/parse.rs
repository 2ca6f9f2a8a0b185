//! Literal grammars for command-line values.
//!
//! Vectors are comma separated. Matrices use `;` between rows and `,`
//! between entries; a single row of four entries means a diagonal matrix.
//! Any value starting with `@` is read from the named file.

use std::fs;

use nalgebra::Matrix4;

use crate::CliError;

/// Expands `@path` into the trimmed file contents.
pub fn resolve(raw: &str) -> Result<String, CliError> {
    match raw.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map(|s| s.trim().to_string())
            .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}"))),
        None => Ok(raw.trim().to_string()),
    }
}

pub fn floats(raw: &str) -> Result<Vec<f64>, CliError> {
    let text = resolve(raw)?;
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Usage(format!("not a finite number: {s:?}")))
        })
        .collect()
}

pub fn floats_n<const N: usize>(raw: &str, what: &str) -> Result<[f64; N], CliError> {
    let v = floats(raw)?;
    v.clone()
        .try_into()
        .map_err(|_| CliError::Usage(format!("{what} needs {N} comma-separated values, got {}", v.len())))
}

pub fn ints_n<const N: usize>(raw: &str, what: &str) -> Result<[i64; N], CliError> {
    let text = resolve(raw)?;
    let v: Vec<i64> = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<i64>().map_err(|_| CliError::Usage(format!("not an integer: {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    let n = v.len();
    v.try_into()
        .map_err(|_| CliError::Usage(format!("{what} needs {N} comma-separated integers, got {n}")))
}

pub fn matrix4(raw: &str) -> Result<Matrix4<f64>, CliError> {
    let text = resolve(raw)?;
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .filter(|r| !r.trim().is_empty())
        .map(floats)
        .collect::<Result<_, _>>()?;
    match rows.as_slice() {
        [diag] if diag.len() == 4 => Ok(Matrix4::from_diagonal(&nalgebra::Vector4::from_column_slice(diag))),
        rows if rows.len() == 4 && rows.iter().all(|r| r.len() == 4) => {
            Ok(Matrix4::from_fn(|i, j| rows[i][j]))
        }
        _ => Err(CliError::Usage(format!(
            "matrix {text:?}: expected 4 rows of 4 entries (rows separated by ';') or one diagonal row"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_grammar() {
        let m = matrix4("1,0,0,0;0,-1,0,0;0,0,2,0;0,0,0,-2").unwrap();
        assert_eq!(m[(2, 2)], 2.0);
        assert_eq!(matrix4("1,-1,2,-2").unwrap(), m);
        assert!(matrix4("1,2;3,4").is_err());
        assert!(matrix4("1,2,x,4").is_err());
    }

    #[test]
    fn vectors() {
        assert_eq!(floats_n::<3>("1, 2.5,-3", "v").unwrap(), [1.0, 2.5, -3.0]);
        assert!(floats_n::<3>("1,2", "v").is_err());
        assert!(floats("nan").is_err());
        assert_eq!(ints_n::<4>("1,4,-4,-1", "p").unwrap(), [1, 4, -4, -1]);
        assert!(ints_n::<4>("1,4,-4,0.5", "p").is_err());
    }

    #[test]
    fn file_values() {
        let dir = std::env::temp_dir().join(format!("g2cli-parse-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.txt");
        fs::write(&path, "1,1,-1,-1\n").unwrap();
        let m = matrix4(&format!("@{}", path.display())).unwrap();
        assert_eq!(m[(3, 3)], -1.0);
        assert!(resolve("@/nonexistent/file").is_err());
    }
}
