//! Journal title canonicalization and abbreviation expansion.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::diag::Warning;
use crate::error::Result;
use crate::tables;

const SOURCE: &str = "abbrev-map";

/// Characters replaced by a space before whitespace is collapsed.
pub const STRIP_SET: &[char] = &['.', ',', ';', ':', '(', ')', '[', ']', '&', '-'];

/// Lowercased, punctuation-free, single-spaced journal title key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CanonicalTitle(String);

impl CanonicalTitle {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CanonicalTitle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Lowercase, replace [`STRIP_SET`] characters by spaces, collapse runs of
/// whitespace, trim. Idempotent.
pub fn normalize_title(raw: &str) -> CanonicalTitle {
    let lowered: String = raw
        .to_lowercase()
        .chars()
        .map(|c| if STRIP_SET.contains(&c) { ' ' } else { c })
        .collect();
    CanonicalTitle(lowered.split_whitespace().collect::<Vec<_>>().join(" "))
}

/// Abbreviation to full-name table, both sides canonical.
#[derive(Debug, Clone, Default)]
pub struct AbbrevMap {
    entries: HashMap<CanonicalTitle, CanonicalTitle>,
}

#[derive(Debug)]
pub struct Loaded<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl AbbrevMap {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, abbrev: &CanonicalTitle) -> Option<&CanonicalTitle> {
        self.entries.get(abbrev)
    }

    /// Inserts a canonicalized pair. Returns `false` for self-maps, empty
    /// sides, and keys already present (the first value is kept).
    pub fn insert(&mut self, abbrev: &str, full: &str) -> bool {
        let key = normalize_title(abbrev);
        let value = normalize_title(full);
        if key.is_empty() || value.is_empty() || key == value || self.entries.contains_key(&key) {
            return false;
        }
        self.entries.insert(key, value);
        true
    }

    pub fn load(path: &Path, delimiter: u8) -> Result<Loaded<AbbrevMap>> {
        Self::from_reader(tables::open(path)?, path, delimiter)
    }

    /// Reads an `abbrev,full_name` table. Bad rows, duplicate keys, and
    /// chains (a full name that is itself an abbreviation key) are warnings.
    pub fn from_reader<R: Read>(input: R, origin: &Path, delimiter: u8) -> Result<Loaded<AbbrevMap>> {
        let rows = tables::read_table(input, origin, delimiter, &["abbrev", "full_name"])?;
        let mut map = AbbrevMap::default();
        let mut warnings = Vec::new();
        for row in rows {
            if row.fields.len() != 2 {
                warnings.push(Warning::at_line(
                    SOURCE,
                    row.line,
                    format!("expected 2 columns, found {}", row.fields.len()),
                ));
                continue;
            }
            let key = normalize_title(&row.fields[0]);
            let value = normalize_title(&row.fields[1]);
            if key.is_empty() || value.is_empty() {
                warnings.push(Warning::at_line(SOURCE, row.line, "empty abbreviation or full name"));
                continue;
            }
            if key == value {
                continue;
            }
            match map.entries.get(&key) {
                Some(existing) if *existing != value => warnings.push(Warning::at_line(
                    SOURCE,
                    row.line,
                    format!("duplicate key `{key}` ignored, keeping `{existing}`"),
                )),
                Some(_) => {}
                None => {
                    map.entries.insert(key, value);
                }
            }
        }
        let mut chained: Vec<_> = map
            .entries
            .iter()
            .filter(|(_, v)| map.entries.contains_key(*v))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        chained.sort();
        for (k, v) in chained {
            warnings.push(Warning::new(
                SOURCE,
                format!("`{k}` expands to `{v}`, which is itself an abbreviation; not followed"),
            ));
        }
        Ok(Loaded { value: map, warnings })
    }
}

/// Single-step lookup: the mapped full name, or the title unchanged.
pub fn expand(title: &CanonicalTitle, map: &AbbrevMap) -> CanonicalTitle {
    map.get(title).cloned().unwrap_or_else(|| title.clone())
}
