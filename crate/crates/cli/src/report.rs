//! CSV emission: header row first, fixed float precision, written to a
//! temporary file beside the target and renamed over it.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

/// Fixed 10-digit rendering so reruns are byte-identical.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let s = format!("{x:.10}");
        if s == "-0.0000000000" { "0.0000000000".into() } else { s }
    }
}

pub fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

pub struct Csv {
    header: &'static [&'static str],
    body: String,
}

impl Csv {
    pub fn new(header: &'static [&'static str]) -> Self {
        let mut body = header.join(",");
        body.push('\n');
        Self { header, body }
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let cells: Vec<String> = cells.into_iter().collect();
        debug_assert_eq!(cells.len(), self.header.len());
        let _ = writeln!(self.body, "{}", cells.join(","));
    }

    pub fn as_str(&self) -> &str {
        &self.body
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf, CliError> {
        write_atomic(dir, name, self.body.as_bytes())
    }
}

pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let target = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir).map_err(io(dir))?;
    tmp.write_all(bytes).map_err(io(&target))?;
    tmp.as_file().sync_all().map_err(io(&target))?;
    tmp.persist(&target).map_err(|e| CliError::Io {
        path: target.clone(),
        source: e.error,
    })?;
    Ok(target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_are_fixed_width() {
        assert_eq!(real(1.0 / 3.0), "0.3333333333");
        assert_eq!(real(-0.0), "0.0000000000");
        assert_eq!(real(f64::INFINITY), "inf");
        assert_eq!(opt_real(None), "");
    }

    #[test]
    fn overwrite_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Csv::new(&["x"]);
        a.row(["1".to_string()]);
        a.row(["2".to_string()]);
        let path = a.write(dir.path(), "t.csv").unwrap();
        let mut b = Csv::new(&["x"]);
        b.row(["3".to_string()]);
        b.write(dir.path(), "t.csv").unwrap();
        assert_eq!(std::fs::read_to_string(path).unwrap(), "x\n3\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
