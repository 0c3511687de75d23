//! Flat key/value text format with dotted sections.
//!
//! One `key = value` pair per line, `#` comments, blank lines ignored.
//! Keys are dotted paths (`problem.kind`, `optimizer.gamma_b0`, `run.iters`).
//! This is the single on-disk format for experiment configs and problem
//! descriptors; serialization preserves insertion order so round trips are
//! stable.

use crate::{Error, Result};
use std::collections::HashSet;
use std::fmt::Write as _;

/// An ordered list of `key = value` entries with unique keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvDoc {
    entries: Vec<(String, String)>,
}

impl KvDoc {
    pub fn new() -> Self {
        KvDoc::default()
    }

    pub fn parse(text: &str) -> Result<KvDoc> {
        let mut doc = KvDoc::new();
        let mut seen = HashSet::new();
        for (ix, raw) in text.lines().enumerate() {
            let lineno = ix + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(lineno, format!("expected 'key = value', got '{line}'")))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(Error::parse(lineno, "empty key"));
            }
            if !seen.insert(key.clone()) {
                return Err(Error::parse(lineno, format!("duplicate key '{key}'")));
            }
            doc.entries.push((key, value));
        }
        Ok(doc)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            writeln!(out, "{k} = {v}").expect("writing to String cannot fail");
        }
        out
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Insert or replace a key, preserving its position when it exists.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        if let Some(entry) = self.entries.iter_mut().find(|(k, _)| k == key) {
            entry.1 = value;
        } else {
            self.entries.push((key.to_string(), value));
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }
}

/// Typed reader that tracks which keys were consumed, so leftovers can be
/// rejected by name.
pub struct KvReader<'a> {
    doc: &'a KvDoc,
    consumed: HashSet<String>,
}

impl<'a> KvReader<'a> {
    pub fn new(doc: &'a KvDoc) -> Self {
        KvReader {
            doc,
            consumed: HashSet::new(),
        }
    }

    pub fn opt_str(&mut self, key: &str) -> Option<&'a str> {
        let v = self.doc.get(key);
        if v.is_some() {
            self.consumed.insert(key.to_string());
        }
        v
    }

    pub fn require_str(&mut self, key: &str) -> Result<&'a str> {
        self.opt_str(key)
            .ok_or_else(|| Error::config(format!("missing required key '{key}'")))
    }

    fn parse_as<T: std::str::FromStr>(key: &str, raw: &str, what: &str) -> Result<T> {
        raw.parse()
            .map_err(|_| Error::config(format!("key '{key}': expected {what}, got '{raw}'")))
    }

    pub fn opt_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.opt_str(key)
            .map(|raw| Self::parse_as(key, raw, "a real number"))
            .transpose()
    }

    pub fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    pub fn opt_u64(&mut self, key: &str) -> Result<Option<u64>> {
        self.opt_str(key)
            .map(|raw| Self::parse_as(key, raw, "a non-negative integer"))
            .transpose()
    }

    pub fn u64_or(&mut self, key: &str, default: u64) -> Result<u64> {
        Ok(self.opt_u64(key)?.unwrap_or(default))
    }

    pub fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    /// Error if any key in the document was never consumed.
    pub fn finish(self) -> Result<()> {
        for key in self.doc.keys() {
            if !self.consumed.contains(key) {
                return Err(Error::config(format!("unknown key '{key}'")));
            }
        }
        Ok(())
    }
}
