//! Publication records, the line-delimited JSON input format, document-type
//! filtering, and time-period bucketing.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diag::Warning;
use crate::error::{Error, Result};

const SOURCE: &str = "records";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DocType {
    Article,
    Review,
    Other,
}

impl DocType {
    /// Case-insensitive; anything but `article` or `review` is [`DocType::Other`].
    pub fn from_label(label: &str) -> DocType {
        let label = label.trim();
        if label.eq_ignore_ascii_case("article") {
            DocType::Article
        } else if label.eq_ignore_ascii_case("review") {
            DocType::Review
        } else {
            DocType::Other
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DocType::Article => "Article",
            DocType::Review => "Review",
            DocType::Other => "Other",
        }
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for DocType {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(DocType::from_label(s))
    }
}

/// Publication date with mandatory year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PubDate {
    pub year: i32,
    pub month: Option<u8>,
    pub day: Option<u8>,
}

impl PubDate {
    pub fn year(year: i32) -> Self {
        PubDate {
            year,
            month: None,
            day: None,
        }
    }

    pub fn month(year: i32, month: u8) -> Self {
        PubDate {
            year,
            month: Some(month),
            day: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceRecord {
    pub ref_id: String,
    /// Raw, possibly abbreviated; empty titles are never identifiable.
    pub journal_title: String,
    pub year: Option<i32>,
    /// `None` when the source did not type the reference.
    pub doc_type: Option<DocType>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicationRecord {
    pub id: String,
    pub title: String,
    pub journal_title: String,
    pub pub_date: PubDate,
    pub doc_type: DocType,
    pub abstract_text: Option<String>,
    pub references: Vec<ReferenceRecord>,
}

impl AsRef<PublicationRecord> for PublicationRecord {
    fn as_ref(&self) -> &PublicationRecord {
        self
    }
}

/// Anything placed on the timeline by its publication date.
pub trait Dated {
    fn record_id(&self) -> &str;
    fn pub_date(&self) -> PubDate;
}

impl Dated for PublicationRecord {
    fn record_id(&self) -> &str {
        &self.id
    }

    fn pub_date(&self) -> PubDate {
        self.pub_date
    }
}

impl<T: Dated> Dated for &T {
    fn record_id(&self) -> &str {
        (**self).record_id()
    }

    fn pub_date(&self) -> PubDate {
        (**self).pub_date()
    }
}

// ---------------------------------------------------------------------------
// Wire format

#[derive(Debug, Serialize, Deserialize)]
struct WireRecord {
    id: String,
    title: String,
    journal: String,
    year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    month: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    day: Option<u8>,
    #[serde(rename = "type")]
    doc_type: String,
    #[serde(rename = "abstract", default, skip_serializing_if = "Option::is_none")]
    abstract_text: Option<String>,
    #[serde(default)]
    references: Vec<WireReference>,
}

#[derive(Debug, Serialize, Deserialize)]
struct WireReference {
    ref_id: String,
    #[serde(default)]
    journal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    year: Option<i32>,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    doc_type: Option<String>,
}

impl From<&PublicationRecord> for WireRecord {
    fn from(r: &PublicationRecord) -> Self {
        WireRecord {
            id: r.id.clone(),
            title: r.title.clone(),
            journal: r.journal_title.clone(),
            year: r.pub_date.year,
            month: r.pub_date.month,
            day: r.pub_date.day,
            doc_type: r.doc_type.label().to_string(),
            abstract_text: r.abstract_text.clone(),
            references: r
                .references
                .iter()
                .map(|x| WireReference {
                    ref_id: x.ref_id.clone(),
                    journal: x.journal_title.clone(),
                    year: x.year,
                    doc_type: x.doc_type.map(|t| t.label().to_string()),
                })
                .collect(),
        }
    }
}

/// Inclusive range of publication years accepted at parse time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YearRange {
    pub min: i32,
    pub max: i32,
}

impl Default for YearRange {
    fn default() -> Self {
        YearRange { min: 1900, max: 2100 }
    }
}

impl WireRecord {
    fn into_record(self, years: YearRange) -> std::result::Result<PublicationRecord, String> {
        if self.id.trim().is_empty() {
            return Err("empty id".into());
        }
        if self.year < years.min || self.year > years.max {
            return Err(format!(
                "year {} outside {}..={}",
                self.year, years.min, years.max
            ));
        }
        if let Some(m) = self.month {
            if !(1..=12).contains(&m) {
                return Err(format!("month {m} not in 1..12"));
            }
        }
        match (self.month, self.day) {
            (None, Some(_)) => return Err("day given without month".into()),
            (_, Some(d)) if !(1..=31).contains(&d) => return Err(format!("day {d} not in 1..31")),
            _ => {}
        }
        Ok(PublicationRecord {
            id: self.id,
            title: self.title,
            journal_title: self.journal,
            pub_date: PubDate {
                year: self.year,
                month: self.month,
                day: self.day,
            },
            doc_type: DocType::from_label(&self.doc_type),
            abstract_text: self.abstract_text,
            references: self
                .references
                .into_iter()
                .map(|x| ReferenceRecord {
                    ref_id: x.ref_id,
                    journal_title: x.journal,
                    year: x.year,
                    doc_type: x.doc_type.as_deref().map(DocType::from_label),
                })
                .collect(),
        })
    }
}

#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub records: Vec<PublicationRecord>,
    pub warnings: Vec<Warning>,
    /// Nonempty lines that did not yield a record (malformed or duplicate id).
    pub skipped: usize,
}

/// Reads one JSON record per line. Blank lines are ignored; malformed lines
/// and duplicate ids are skipped with a warning naming the line.
pub fn parse_records<R: BufRead>(mut input: R, years: YearRange) -> Result<ParseOutcome> {
    let mut out = ParseOutcome::default();
    let mut seen = HashSet::new();
    let mut buf = Vec::new();
    let mut line_no = 0usize;
    loop {
        buf.clear();
        if input.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let text = match std::str::from_utf8(&buf) {
            Ok(t) => t.trim(),
            Err(e) => {
                out.skipped += 1;
                out.warnings
                    .push(Warning::at_line(SOURCE, line_no, format!("invalid UTF-8: {e}")));
                continue;
            }
        };
        if text.is_empty() {
            continue;
        }
        let record = serde_json::from_str::<WireRecord>(text)
            .map_err(|e| format!("malformed record: {e}"))
            .and_then(|w| w.into_record(years));
        match record {
            Ok(r) => {
                if seen.insert(r.id.clone()) {
                    out.records.push(r);
                } else {
                    out.skipped += 1;
                    out.warnings.push(Warning::at_line(
                        SOURCE,
                        line_no,
                        format!("duplicate id `{}`, keeping first occurrence", r.id),
                    ));
                }
            }
            Err(msg) => {
                out.skipped += 1;
                out.warnings.push(Warning::at_line(SOURCE, line_no, msg));
            }
        }
    }
    Ok(out)
}

/// Writes records in the input format, one per line.
pub fn write_records<W: Write>(records: &[PublicationRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, &WireRecord::from(r))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Document types

/// Keeps only references whose declared type is allowed. Untyped references stay.
pub fn restrict_references(record: &mut PublicationRecord, allowed: &BTreeSet<DocType>) {
    record
        .references
        .retain(|r| r.doc_type.is_none_or(|t| allowed.contains(&t)));
}

/// Keeps the records whose type is allowed; with `filter_references`, each
/// surviving record's typed references go through the same test.
pub fn filter_doc_types(
    records: Vec<PublicationRecord>,
    allowed: &BTreeSet<DocType>,
    filter_references: bool,
) -> Result<Vec<PublicationRecord>> {
    if allowed.is_empty() {
        return Err(Error::InvalidPolicy("allowed document types must be nonempty".into()));
    }
    Ok(records
        .into_iter()
        .filter(|r| allowed.contains(&r.doc_type))
        .map(|mut r| {
            if filter_references {
                restrict_references(&mut r, allowed);
            }
            r
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Periods

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Year,
    Month,
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "year" => Ok(Granularity::Year),
            "month" => Ok(Granularity::Month),
            other => Err(format!("unknown granularity `{other}` (expected year|month)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Period {
    Year(i32),
    Month { year: i32, month: u8 },
}

impl Period {
    pub fn granularity(self) -> Granularity {
        match self {
            Period::Year(_) => Granularity::Year,
            Period::Month { .. } => Granularity::Month,
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::Year(y) => write!(f, "{y}"),
            Period::Month { year, month } => write!(f, "{year}-{month:02}"),
        }
    }
}

impl Serialize for Period {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `YEAR` or `YEAR-MM`, used for window bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YearMonth {
    pub year: i32,
    pub month: Option<u8>,
}

impl YearMonth {
    fn cmp_date(&self, date: PubDate) -> std::cmp::Ordering {
        match (self.month, date.month) {
            (Some(a), Some(b)) if self.year == date.year => a.cmp(&b),
            _ => self.year.cmp(&date.year),
        }
    }
}

impl FromStr for YearMonth {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let (y, m) = match s.split_once('-') {
            Some((y, m)) => (y, Some(m)),
            None => (s, None),
        };
        let year = y.parse::<i32>().map_err(|_| format!("bad year in `{s}`"))?;
        let month = match m {
            Some(m) => {
                let m = m.parse::<u8>().map_err(|_| format!("bad month in `{s}`"))?;
                if !(1..=12).contains(&m) {
                    return Err(format!("month out of range in `{s}`"));
                }
                Some(m)
            }
            None => None,
        };
        Ok(YearMonth { year, month })
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.month {
            Some(m) => write!(f, "{}-{:02}", self.year, m),
            None => write!(f, "{}", self.year),
        }
    }
}

/// Inclusive analysis window. When either side lacks a month, only years are compared.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DateWindow {
    pub from: Option<YearMonth>,
    pub to: Option<YearMonth>,
}

impl DateWindow {
    pub fn contains(&self, date: PubDate) -> bool {
        let after_start = self.from.is_none_or(|f| f.cmp_date(date).is_le());
        let before_end = self.to.is_none_or(|t| t.cmp_date(date).is_ge());
        after_start && before_end
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingMonthPolicy {
    #[default]
    Exclude,
    January,
}

impl FromStr for MissingMonthPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exclude" => Ok(MissingMonthPolicy::Exclude),
            "january" => Ok(MissingMonthPolicy::January),
            other => Err(format!("unknown missing-month policy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BucketOptions {
    pub window: DateWindow,
    pub missing_month: MissingMonthPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    OutsideWindow,
    MissingMonth,
}

impl BucketOptions {
    pub fn period_of(&self, date: PubDate, granularity: Granularity) -> Result<Period, Exclusion> {
        if !self.window.contains(date) {
            return Err(Exclusion::OutsideWindow);
        }
        match granularity {
            Granularity::Year => Ok(Period::Year(date.year)),
            Granularity::Month => match (date.month, self.missing_month) {
                (Some(month), _) => Ok(Period::Month {
                    year: date.year,
                    month,
                }),
                (None, MissingMonthPolicy::January) => Ok(Period::Month {
                    year: date.year,
                    month: 1,
                }),
                (None, MissingMonthPolicy::Exclude) => Err(Exclusion::MissingMonth),
            },
        }
    }
}

#[derive(Debug)]
pub struct Buckets<'a, T> {
    pub buckets: BTreeMap<Period, Vec<&'a T>>,
    pub warnings: Vec<Warning>,
}

impl<T> Buckets<'_, T> {
    pub fn retained(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }
}

/// Partitions items into chronologically keyed buckets. Items outside the
/// window, or lacking a month under monthly granularity (unless the policy
/// assigns them to January), are excluded with a warning.
pub fn bucket_by_period<'a, T: Dated>(
    items: &'a [T],
    granularity: Granularity,
    opts: &BucketOptions,
) -> Buckets<'a, T> {
    let mut buckets: BTreeMap<Period, Vec<&T>> = BTreeMap::new();
    let mut warnings = Vec::new();
    for item in items {
        match opts.period_of(item.pub_date(), granularity) {
            Ok(p) => buckets.entry(p).or_default().push(item),
            Err(Exclusion::OutsideWindow) => warnings.push(Warning::new(
                "periods",
                format!("record `{}` outside the analysis window, excluded", item.record_id()),
            )),
            Err(Exclusion::MissingMonth) => warnings.push(Warning::new(
                "periods",
                format!("record `{}` has no month, excluded from monthly series", item.record_id()),
            )),
        }
    }
    Buckets { buckets, warnings }
}
