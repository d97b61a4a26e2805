//! Qualification thresholds, keyword subsetting, and stage statistics.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::catalog::DisciplineAssignment;
use crate::corpus::{Dated, DocType, PubDate, PublicationRecord};
use crate::error::{Error, Result};

/// A record paired with its discipline assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignedRecord {
    pub record: PublicationRecord,
    pub assignment: DisciplineAssignment,
}

impl Dated for AssignedRecord {
    fn record_id(&self) -> &str {
        &self.record.id
    }

    fn pub_date(&self) -> PubDate {
        self.record.pub_date
    }
}

impl AsRef<PublicationRecord> for AssignedRecord {
    fn as_ref(&self) -> &PublicationRecord {
        &self.record
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualificationPolicy {
    pub min_references: usize,
    pub min_coverage: f64,
    pub allowed_types: BTreeSet<DocType>,
}

impl Default for QualificationPolicy {
    fn default() -> Self {
        QualificationPolicy {
            min_references: 5,
            min_coverage: 0.80,
            allowed_types: [DocType::Article, DocType::Review].into(),
        }
    }
}

impl QualificationPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.min_references < 1 {
            return Err(Error::InvalidPolicy("min_references must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.min_coverage) {
            return Err(Error::InvalidPolicy(format!(
                "min_coverage {} outside [0, 1]",
                self.min_coverage
            )));
        }
        if self.allowed_types.is_empty() {
            return Err(Error::InvalidPolicy("allowed_types must be nonempty".into()));
        }
        Ok(())
    }

    /// First failing test in the order type, reference count, coverage.
    /// A record with no identified reference always fails on coverage.
    pub fn check(&self, record: &PublicationRecord, assignment: &DisciplineAssignment) -> Result<(), RejectReason> {
        if !self.allowed_types.contains(&record.doc_type) {
            return Err(RejectReason::Type);
        }
        if record.references.len() < self.min_references {
            return Err(RejectReason::RefCount);
        }
        if assignment.coverage < self.min_coverage || assignment.identified() == 0 {
            return Err(RejectReason::Coverage);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RejectReason {
    #[serde(rename = "type")]
    Type,
    #[serde(rename = "ref-count")]
    RefCount,
    #[serde(rename = "coverage")]
    Coverage,
}

impl RejectReason {
    pub fn code(self) -> &'static str {
        match self {
            RejectReason::Type => "type",
            RejectReason::RefCount => "ref-count",
            RejectReason::Coverage => "coverage",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub item: AssignedRecord,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Default)]
pub struct Qualification {
    pub qualified: Vec<AssignedRecord>,
    pub rejected: Vec<Rejection>,
}

pub fn qualify(items: Vec<AssignedRecord>, policy: &QualificationPolicy) -> Qualification {
    let mut out = Qualification::default();
    for item in items {
        match policy.check(&item.record, &item.assignment) {
            Ok(()) => out.qualified.push(item),
            Err(reason) => out.rejected.push(Rejection { item, reason }),
        }
    }
    out
}

/// Case-insensitive substring query over titles and abstracts; a record
/// matches when any term occurs.
#[derive(Debug, Clone)]
pub struct KeywordQuery {
    terms: Vec<String>,
}

impl KeywordQuery {
    pub fn new<S: AsRef<str>>(terms: &[S]) -> Result<Self> {
        let terms: Vec<String> = terms
            .iter()
            .map(|t| t.as_ref().to_lowercase())
            .filter(|t| !t.is_empty())
            .collect();
        if terms.is_empty() {
            return Err(Error::InvalidPolicy("keyword query needs at least one term".into()));
        }
        Ok(KeywordQuery { terms })
    }

    pub fn matches(&self, record: &PublicationRecord) -> bool {
        let title = record.title.to_lowercase();
        let abstract_text = record.abstract_text.as_deref().unwrap_or("").to_lowercase();
        self.terms
            .iter()
            .any(|t| title.contains(t.as_str()) || abstract_text.contains(t.as_str()))
    }
}

pub fn keyword_subset<T: AsRef<PublicationRecord>, S: AsRef<str>>(records: Vec<T>, terms: &[S]) -> Result<Vec<T>> {
    let query = KeywordQuery::new(terms)?;
    Ok(records.into_iter().filter(|r| query.matches(r.as_ref())).collect())
}

// ---------------------------------------------------------------------------
// Stage statistics

pub struct StageInput<'a> {
    pub name: &'a str,
    pub records: Vec<&'a PublicationRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageCount {
    pub stage: String,
    pub papers: usize,
    pub references: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub stages: Vec<StageCount>,
    pub rejections: BTreeMap<RejectReason, usize>,
}

/// Counts papers and references per stage; each stage must be a subset (by
/// id) of the one before it.
pub fn corpus_stats(stages: &[StageInput<'_>]) -> Result<CorpusStats> {
    let mut out = CorpusStats::default();
    let mut parent: Option<(&str, HashSet<&str>)> = None;
    for stage in stages {
        let ids: HashSet<&str> = stage.records.iter().map(|r| r.id.as_str()).collect();
        if let Some((parent_name, parent_ids)) = &parent {
            if let Some(stray) = stage.records.iter().find(|r| !parent_ids.contains(r.id.as_str())) {
                return Err(Error::StageNotSubset {
                    stage: stage.name.to_string(),
                    parent: parent_name.to_string(),
                    id: stray.id.clone(),
                });
            }
        }
        out.stages.push(StageCount {
            stage: stage.name.to_string(),
            papers: stage.records.len(),
            references: stage.records.iter().map(|r| r.references.len()).sum(),
        });
        parent = Some((stage.name, ids));
    }
    Ok(out)
}

impl CorpusStats {
    pub fn with_rejections(mut self, rejected: &[Rejection]) -> Self {
        for r in rejected {
            *self.rejections.entry(r.reason).or_default() += 1;
        }
        self
    }

    /// `stage,papers,references` table.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Stream(e.into());
        w.write_record(["stage", "papers", "references"]).map_err(csv_err)?;
        for s in &self.stages {
            w.write_record([s.stage.clone(), s.papers.to_string(), s.references.to_string()])
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `id,reason` table in input order.
pub fn write_rejections<W: Write>(rejected: &[Rejection], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Stream(e.into());
    w.write_record(["id", "reason"]).map_err(csv_err)?;
    for r in rejected {
        w.write_record([r.item.record.id.as_str(), r.reason.code()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
