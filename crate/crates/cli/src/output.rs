//! CSV emission: one header row, `%.6f` floats, `\n` line endings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub fn fmt_f(x: f64) -> String {
    format!("{x:.6}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    /// Fields must not contain commas.
    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        let mut first = true;
        for f in fields {
            let f = f.as_ref();
            debug_assert!(!f.contains(','), "comma in CSV field {f:?}");
            if !first {
                self.text.push(',');
            }
            first = false;
            let _ = write!(self.text, "{f}");
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
