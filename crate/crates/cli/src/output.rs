//! Rendering of results as text, CSV or JSON.

use std::fs::File;
use std::io::{self, Write};

use serde::Serialize;
use sphere_approx::export::write_csv;

use crate::args::{Format, GlobalOpts};
use crate::CliError;

/// Renders `rows` in the selected format; `text` supplies the plain form.
pub fn render<R: Serialize>(fmt: Format, rows: &[R], text: impl FnOnce() -> String) -> Result<String, CliError> {
    match fmt {
        Format::Text => Ok(text()),
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&mut buf, rows)?;
            Ok(String::from_utf8(buf).expect("csv output is utf-8"))
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).map_err(|e| CliError::Failed(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Writes to `--out` when given, otherwise to stdout.
pub fn emit(opts: &GlobalOpts, body: &str) -> Result<(), CliError> {
    match &opts.out {
        Some(path) => File::create(path)?.write_all(body.as_bytes())?,
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

/// Joins lines with a trailing newline.
pub fn lines(items: impl IntoIterator<Item = String>) -> String {
    let mut s = String::new();
    for l in items {
        s.push_str(&l);
        s.push('\n');
    }
    s
}
