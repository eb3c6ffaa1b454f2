//! Line-oriented run reports.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::format::InputFile;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `key = value` lines in insertion order, matrix blocks, then the duration.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    command: String,
    mode: String,
    inputs: Vec<(String, String)>,
    entries: Vec<(String, String)>,
    blocks: Vec<(String, String)>,
    duration_ms: Option<u128>,
}

impl RunReport {
    pub fn new(command: &str, mode: &str) -> Self {
        Self {
            command: command.into(),
            mode: mode.into(),
            ..Self::default()
        }
    }

    pub fn input(&mut self, file: &InputFile) {
        self.inputs.push((file.path.clone(), digest(&file.bytes)));
    }

    pub fn inputs<'a>(&mut self, files: impl IntoIterator<Item = &'a InputFile>) {
        for f in files {
            self.input(f);
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// A named block of text lines, rendered between `begin`/`end` markers.
    pub fn block(&mut self, name: &str, body: impl Into<String>) {
        self.blocks.push((name.into(), body.into()));
    }

    pub fn set_duration_ms(&mut self, ms: u128) {
        self.duration_ms = Some(ms);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command = {}", self.command);
        let _ = writeln!(out, "version = {VERSION}");
        let _ = writeln!(out, "mode = {}", self.mode);
        for (i, (path, hash)) in self.inputs.iter().enumerate() {
            let _ = writeln!(out, "input.{i} = {path}");
            let _ = writeln!(out, "input.{i}.sha256 = {hash}");
        }
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        for (name, body) in &self.blocks {
            let _ = writeln!(out, "begin {name}");
            out.push_str(body);
            if !body.is_empty() && !body.ends_with('\n') {
                out.push('\n');
            }
            let _ = writeln!(out, "end {name}");
        }
        if let Some(ms) = self.duration_ms {
            let _ = writeln!(out, "duration_ms = {ms}");
        }
        out
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_in_order_with_duration_last() {
        let mut r = RunReport::new("lift", "rational");
        r.input(&InputFile {
            path: "a.space".into(),
            bytes: b"abc".to_vec(),
        });
        r.set("operator_norm", "1");
        r.block("matrix lifting", "1 0\n0 1");
        r.set_duration_ms(3);
        let text = r.render();
        let expected = "command = lift\nversion = 0.1.0\nmode = rational\ninput.0 = a.space\n\
input.0.sha256 = ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad\n\
operator_norm = 1\nbegin matrix lifting\n1 0\n0 1\nend matrix lifting\nduration_ms = 3\n";
        assert_eq!(text, expected);
        assert_eq!(r.get("operator_norm"), Some("1"));
    }
}
