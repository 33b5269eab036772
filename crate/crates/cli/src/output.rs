use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bpre_core::ratefn::ExtReal;

use crate::CliError;

/// Shortest round-trip representation; `inf`/`nan` spelled out.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x}")
    }
}

pub fn ext(x: ExtReal) -> String {
    match x {
        ExtReal::Finite(v) => num(v),
        ExtReal::PosInf => "inf".into(),
    }
}

/// CSV with a fixed header; values are written verbatim.
pub struct Csv {
    text: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: format!("{}\n", header.join(",")),
            width: header.len(),
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        debug_assert_eq!(cells.len(), self.width);
        let line: Vec<&str> = cells.iter().map(|c| c.as_ref()).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Flat JSON-like block of key/value pairs in insertion order.
#[derive(Default)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn text(&mut self, key: &str, value: &str) -> &mut Self {
        self.entries.push((key.into(), format!("\"{value}\"")));
        self
    }

    pub fn number(&mut self, key: &str, value: f64) -> &mut Self {
        let v = if value.is_finite() {
            num(value)
        } else {
            format!("\"{}\"", num(value))
        };
        self.entries.push((key.into(), v));
        self
    }

    pub fn ext(&mut self, key: &str, value: ExtReal) -> &mut Self {
        self.number(key, value.into_f64())
    }

    pub fn render(&self) -> String {
        let mut s = String::from("{\n");
        for (i, (k, v)) in self.entries.iter().enumerate() {
            let sep = if i + 1 < self.entries.len() { "," } else { "" };
            let _ = writeln!(s, "  \"{k}\": {v}{sep}");
        }
        s.push_str("}\n");
        s
    }
}

trait IntoF64 {
    fn into_f64(self) -> f64;
}

impl IntoF64 for ExtReal {
    fn into_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }
}

/// Writes every file only after all contents are ready.
pub fn write_all(dir: &Path, files: &[(&str, String)]) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
    for (name, content) in files {
        let path = dir.join(name);
        fs::write(&path, content)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
