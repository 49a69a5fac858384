//! Report assembly for the two output formats: `text` for reading, `records`
//! with one tab-separated record per line for scripts.

use clap::ValueEnum;
use std::fmt::Display;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Records,
}

pub struct Report {
    format: Format,
    buf: String,
    /// False once any check fails.
    pub ok: bool,
}

impl Report {
    pub fn new(format: Format) -> Self {
        Report { format, buf: String::new(), ok: true }
    }

    /// `key: value` or `key\tvalue`.
    pub fn kv(&mut self, key: &str, value: impl Display) {
        match self.format {
            Format::Text => self.buf.push_str(&format!("{key}: {value}\n")),
            Format::Records => self.buf.push_str(&format!("{key}\t{value}\n")),
        }
    }

    /// Free text, text format only.
    pub fn text(&mut self, s: impl AsRef<str>) {
        if self.format == Format::Text {
            self.buf.push_str(s.as_ref());
            if !s.as_ref().ends_with('\n') {
                self.buf.push('\n');
            }
        }
    }

    /// A record, records format only.
    pub fn record(&mut self, fields: &[&dyn Display]) {
        if self.format == Format::Records {
            let f: Vec<String> = fields.iter().map(|x| x.to_string()).collect();
            self.buf.push_str(&f.join("\t"));
            self.buf.push('\n');
        }
    }

    /// Records a named check; a failing check fails the report.
    pub fn check(&mut self, name: &str, passed: bool) {
        self.ok &= passed;
        self.kv(name, if passed { "PASS" } else { "FAIL" });
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn finish(mut self) -> (String, bool) {
        let verdict = if self.ok { "PASS" } else { "FAIL" };
        self.kv("result", verdict);
        (self.buf, self.ok)
    }
}
