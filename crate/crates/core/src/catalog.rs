//! Journal-to-discipline catalog, per-record discipline assignment, and
//! full-counting discipline vectors.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::corpus::PublicationRecord;
use crate::diag::Warning;
use crate::discipline::{Discipline, DisciplineSet};
use crate::error::Result;
use crate::normalize::{expand, normalize_title, AbbrevMap, CanonicalTitle, Loaded};
use crate::tables;

const SOURCE: &str = "catalog";

#[derive(Debug, Clone, Default)]
pub struct DisciplineCatalog {
    entries: HashMap<CanonicalTitle, DisciplineSet>,
}

impl DisciplineCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, title: &CanonicalTitle) -> Option<DisciplineSet> {
        self.entries.get(title).copied()
    }

    /// Adds codes to a journal, merging with any existing entry. Empty sets
    /// and empty titles are ignored.
    pub fn insert(&mut self, title: &str, codes: DisciplineSet) {
        let key = normalize_title(title);
        if key.is_empty() || codes.is_empty() {
            return;
        }
        let slot = self.entries.entry(key).or_default();
        *slot = slot.union(codes);
    }

    pub fn load(path: &Path, delimiter: u8) -> Result<Loaded<DisciplineCatalog>> {
        Self::from_reader(tables::open(path)?, path, delimiter)
    }

    /// Reads a `journal_title,codes` table where codes are `;`-separated
    /// abbreviations. Unknown codes are dropped with a warning; rows left
    /// with no valid code are skipped; repeated titles are merged.
    pub fn from_reader<R: Read>(
        input: R,
        origin: &Path,
        delimiter: u8,
    ) -> Result<Loaded<DisciplineCatalog>> {
        let rows = tables::read_table(input, origin, delimiter, &["journal_title", "codes"])?;
        let mut catalog = DisciplineCatalog::default();
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
            if normalize_title(&row.fields[0]).is_empty() {
                warnings.push(Warning::at_line(SOURCE, row.line, "empty journal title"));
                continue;
            }
            let mut codes = DisciplineSet::empty();
            for code in row.fields[1].split(';').filter(|c| !c.trim().is_empty()) {
                match code.parse::<Discipline>() {
                    Ok(d) => {
                        codes.insert(d);
                    }
                    Err(e) => warnings.push(Warning::at_line(SOURCE, row.line, e.to_string())),
                }
            }
            if codes.is_empty() {
                warnings.push(Warning::at_line(
                    SOURCE,
                    row.line,
                    format!("no valid discipline code for `{}`, row skipped", row.fields[0]),
                ));
                continue;
            }
            catalog.insert(&row.fields[0], codes);
        }
        Ok(Loaded {
            value: catalog,
            warnings,
        })
    }

    /// Exact canonical hit first, then the abbreviation expansion.
    pub fn lookup(&self, raw_title: &str, abbrev: &AbbrevMap) -> Option<DisciplineSet> {
        let key = normalize_title(raw_title);
        if key.is_empty() {
            return None;
        }
        self.get(&key).or_else(|| self.get(&expand(&key, abbrev)))
    }
}

/// Disciplines of one citing record and each of its references. `None` marks
/// a journal that could not be identified.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisciplineAssignment {
    pub paper_id: String,
    pub citing: Option<DisciplineSet>,
    pub references: Vec<Option<DisciplineSet>>,
    /// Identified references over all references; 0 for reference-free records.
    pub coverage: f64,
}

impl DisciplineAssignment {
    pub fn identified(&self) -> usize {
        self.references.iter().filter(|r| r.is_some()).count()
    }

    pub fn is_reference_free(&self) -> bool {
        self.references.is_empty()
    }

    /// Union of all identified reference discipline sets.
    pub fn reference_union(&self) -> DisciplineSet {
        self.references
            .iter()
            .flatten()
            .fold(DisciplineSet::empty(), |acc, s| acc.union(*s))
    }
}

pub fn assign(
    record: &PublicationRecord,
    catalog: &DisciplineCatalog,
    abbrev: &AbbrevMap,
) -> DisciplineAssignment {
    let references: Vec<_> = record
        .references
        .iter()
        .map(|r| catalog.lookup(&r.journal_title, abbrev))
        .collect();
    let identified = references.iter().filter(|r| r.is_some()).count();
    let coverage = if references.is_empty() {
        0.0
    } else {
        identified as f64 / references.len() as f64
    };
    DisciplineAssignment {
        paper_id: record.id.clone(),
        citing: catalog.lookup(&record.journal_title, abbrev),
        references,
        coverage,
    }
}

/// Full-counting histogram over the 27 disciplines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DisciplineVector {
    counts: [u64; Discipline::COUNT],
}

impl DisciplineVector {
    pub fn from_counts(counts: [u64; Discipline::COUNT]) -> Self {
        DisciplineVector { counts }
    }

    pub fn from_pairs(pairs: &[(Discipline, u64)]) -> Self {
        let mut v = DisciplineVector::default();
        for &(d, c) in pairs {
            v.counts[d.index()] += c;
        }
        v
    }

    pub fn get(&self, d: Discipline) -> u64 {
        self.counts[d.index()]
    }

    pub fn add(&mut self, d: Discipline, n: u64) {
        self.counts[d.index()] += n;
    }

    pub fn counts(&self) -> &[u64; Discipline::COUNT] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (Discipline, u64)> + '_ {
        Discipline::ALL
            .iter()
            .map(|&d| (d, self.counts[d.index()]))
            .filter(|&(_, c)| c > 0)
    }
}

/// Every identified reference adds 1 to each of its disciplines.
pub fn discipline_vector(assignment: &DisciplineAssignment) -> DisciplineVector {
    let mut v = DisciplineVector::default();
    for set in assignment.references.iter().flatten() {
        for d in set.iter() {
            v.add(d, 1);
        }
    }
    v
}
