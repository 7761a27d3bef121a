//! Result sink for `--out` and `--format`.

use std::io::Write;

use serde_json::Value;

use crate::{Format, Global};

pub struct Sink {
    format: Format,
    buf: String,
}

impl Sink {
    pub fn new(global: &Global) -> Sink {
        Sink {
            format: global.format,
            buf: String::new(),
        }
    }

    /// Appends `text` in text mode and `record` in json-lines mode.
    pub fn emit(&mut self, text: impl FnOnce() -> String, record: impl FnOnce() -> Value) {
        match self.format {
            Format::Text => {
                let t = text();
                self.buf.push_str(&t);
                if !t.ends_with('\n') {
                    self.buf.push('\n');
                }
            }
            Format::JsonLines => {
                self.buf.push_str(&record().to_string());
                self.buf.push('\n');
            }
        }
    }

    pub fn finish(self, global: &Global) -> std::io::Result<()> {
        match &global.out {
            Some(path) => std::fs::write(path, self.buf),
            None => std::io::stdout().write_all(self.buf.as_bytes()),
        }
    }
}
