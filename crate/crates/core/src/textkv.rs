//! The flat `key = value` text format used by recipe and run-config files.
//!
//! Grammar: one entry per line; `#` starts a comment; blank lines are
//! skipped; `[section]` lines open a named section (entries before any
//! header carry no section). Keys and values are trimmed.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextKvError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    BadLine { line: usize, text: String },
    #[error("line {line}: empty key")]
    EmptyKey { line: usize },
    #[error("line {line}: unterminated section header `{text}`")]
    BadSection { line: usize, text: String },
}

/// One parsed `key = value` entry with its source location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KvEntry {
    pub section: Option<String>,
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parse the full text into ordered entries.
pub fn parse(text: &str) -> Result<Vec<KvEntry>, TextKvError> {
    let mut entries = Vec::new();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| TextKvError::BadSection {
                line,
                text: content.to_string(),
            })?;
            section = Some(name.trim().to_string());
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| TextKvError::BadLine {
            line,
            text: content.to_string(),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(TextKvError::EmptyKey { line });
        }
        entries.push(KvEntry {
            section: section.clone(),
            key: key.to_string(),
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(entries)
}

/// Look up the last value for `key` in `section` (None = before any header).
pub fn get<'a>(entries: &'a [KvEntry], section: Option<&str>, key: &str) -> Option<&'a KvEntry> {
    entries
        .iter()
        .rev()
        .find(|e| e.key == key && e.section.as_deref() == section)
}

/// Split a comma-separated value into trimmed, non-empty items.
pub fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}
