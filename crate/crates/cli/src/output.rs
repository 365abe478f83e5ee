use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use commlab::numkit::io::{format_matrix, parse_matrix};
use commlab::{ComplexMatrix, SolveReport};
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

fn out_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Output {
        path: path.to_path_buf(),
        source,
    }
}

fn parent_of(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Creates `dir` if needed and proves it writable with a throwaway file.
pub fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| out_err(dir, e))?;
    NamedTempFile::new_in(dir).map_err(|e| out_err(dir, e))?;
    Ok(())
}

pub fn ensure_parent_writable(path: &Path) -> Result<()> {
    ensure_writable(&parent_of(path))
}

/// Writes through a temp file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = NamedTempFile::new_in(parent_of(path)).map_err(|e| out_err(path, e))?;
    tmp.write_all(bytes).map_err(|e| out_err(path, e))?;
    tmp.as_file().sync_all().map_err(|e| out_err(path, e))?;
    tmp.persist(path).map_err(|e| out_err(path, e.error))?;
    Ok(())
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    write_atomic(path, format_matrix(m).as_bytes())
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_matrix(&text).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Serialises `rows` under `header` and writes the result atomically.
pub fn write_csv<R>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<()>
where
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| out_err(path, std::io::Error::other(e));
    if !header.is_empty() {
        w.write_record(header).map_err(csv_err)?;
    }
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| out_err(path, std::io::Error::other(e.to_string())))?;
    write_atomic(path, &bytes)
}

/// Reads one real per line; `#` starts a comment.
pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let input_err = |message: String| CliError::Input {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| input_err(e.to_string()))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| input_err(format!("line {}: invalid number `{line}`", i + 1)))?;
        out.push(v);
    }
    Ok(out)
}

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_report(path: &Path, report: &SolveReport) -> Result<()> {
    write_csv(
        path,
        &["check_name", "value", "tolerance", "pass"],
        report.checks.iter().map(|c| {
            [
                c.name.clone(),
                format_real(c.measured),
                format_real(c.tolerance),
                c.pass.to_string(),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn values_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.csv");
        let vals = [0.1, -1.0 / 3.0, 1e-300];
        write_csv(&p, &[], vals.iter().map(|v| [format_real(*v)])).unwrap();
        assert_eq!(read_values(&p).unwrap(), vals);
    }

    #[test]
    fn bad_value_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.csv");
        fs::write(&p, "1.0\n# note\nabc\n").unwrap();
        let err = read_values(&p).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }
}
