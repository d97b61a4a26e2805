//! Seeded synthetic corpora with planted structure, for tests and fixtures.
//!
//! Every generator uses a fixed journal universe: one journal per discipline
//! (`Journal of <name>`, abbreviated `J <CODE>`) plus a few multi-discipline
//! journals. References cite by full title or by abbreviation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::DisciplineCatalog;
use crate::corpus::{DocType, PubDate, PublicationRecord, ReferenceRecord};
use crate::discipline::{Discipline, DisciplineSet};
use crate::normalize::AbbrevMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Journal {
    pub title: String,
    pub abbrev: Option<String>,
    pub codes: DisciplineSet,
}

fn journal_universe() -> Vec<Journal> {
    let mut js: Vec<Journal> = Discipline::ALL
        .iter()
        .map(|d| Journal {
            title: format!("Journal of {}", d.name()),
            abbrev: Some(format!("J {}", d.abbrev())),
            codes: [*d].into_iter().collect(),
        })
        .collect();
    let multi: [(&str, Option<&str>, &[Discipline]); 4] = [
        ("Cancer Cell", None, &[Discipline::Bioc, Discipline::Medi]),
        ("Vaccine", None, &[Discipline::Medi, Discipline::Immu, Discipline::Vete]),
        (
            "Proceedings of the National Academy of Sciences of the United States of America",
            Some("PNAS"),
            &[Discipline::Mult],
        ),
        ("Bioinformatics", None, &[Discipline::Bioc, Discipline::Cs, Discipline::Math]),
    ];
    js.extend(multi.iter().map(|(t, a, ds)| Journal {
        title: t.to_string(),
        abbrev: a.map(str::to_string),
        codes: ds.iter().copied().collect(),
    }));
    js
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub records: Vec<PublicationRecord>,
    pub journals: Vec<Journal>,
}

impl SyntheticCorpus {
    pub fn catalog(&self) -> DisciplineCatalog {
        let mut c = DisciplineCatalog::default();
        for j in &self.journals {
            c.insert(&j.title, j.codes);
        }
        c
    }

    pub fn abbrev_map(&self) -> AbbrevMap {
        let mut m = AbbrevMap::default();
        for j in &self.journals {
            if let Some(a) = &j.abbrev {
                m.insert(a, &j.title);
            }
        }
        m
    }

    /// Catalog file contents (`journal_title,codes`).
    pub fn catalog_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["journal_title", "codes"]).expect("in-memory write");
        for j in &self.journals {
            w.write_record([j.title.clone(), j.codes.to_codes()]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Abbreviation map file contents (`abbrev,full_name`).
    pub fn abbrev_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["abbrev", "full_name"]).expect("in-memory write");
        for j in &self.journals {
            if let Some(a) = &j.abbrev {
                w.write_record([a.as_str(), j.title.as_str()]).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// Picks the single-discipline journal for `d`, cited by abbreviation with
/// probability `abbrev_rate`.
fn cite(rng: &mut ChaCha8Rng, journals: &[Journal], d: Discipline, abbrev_rate: f64) -> String {
    let j = &journals[d.index()];
    match &j.abbrev {
        Some(a) if rng.gen_bool(abbrev_rate) => a.clone(),
        _ => j.title.clone(),
    }
}

fn paper(id: String, title: String, date: PubDate, journal: String, refs: Vec<String>) -> PublicationRecord {
    PublicationRecord {
        references: refs
            .into_iter()
            .enumerate()
            .map(|(i, j)| ReferenceRecord {
                ref_id: format!("{id}-r{i}"),
                journal_title: j,
                year: Some(date.year - 1),
                doc_type: Some(DocType::Article),
            })
            .collect(),
        id,
        title,
        journal_title: journal,
        pub_date: date,
        doc_type: DocType::Article,
        abstract_text: None,
    }
}

/// Period `t` draws every reference uniformly from the first
/// `start + t * step` disciplines, so the discipline spread grows over time.
pub fn spread_corpus(
    seed: u64,
    years: &[i32],
    papers_per_year: usize,
    refs_per_paper: usize,
    start: usize,
    step: usize,
) -> SyntheticCorpus {
    let journals = journal_universe();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for (t, &year) in years.iter().enumerate() {
        let k = (start + t * step).clamp(1, Discipline::COUNT);
        for i in 0..papers_per_year {
            let refs = (0..refs_per_paper)
                .map(|_| {
                    let d = Discipline::ALL[rng.gen_range(0..k)];
                    cite(&mut rng, &journals, d, 0.3)
                })
                .collect();
            records.push(paper(
                format!("spread-{year}-{i}"),
                format!("Synthetic study {i}"),
                PubDate::month(year, rng.gen_range(1..=12)),
                journals[0].title.clone(),
                refs,
            ));
        }
    }
    SyntheticCorpus { records, journals }
}

/// References come from six disciplines; in period `t` the first of them
/// (MEDI) takes share `shares[t]` and the rest split the remainder evenly.
pub fn dominance_corpus(
    seed: u64,
    years: &[i32],
    shares: &[f64],
    papers_per_year: usize,
    refs_per_paper: usize,
) -> SyntheticCorpus {
    assert_eq!(years.len(), shares.len());
    let journals = journal_universe();
    let pool = &Discipline::ALL[..6];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for (&year, &share) in years.iter().zip(shares) {
        for i in 0..papers_per_year {
            let refs = (0..refs_per_paper)
                .map(|_| {
                    let d = if rng.gen_bool(share) {
                        pool[0]
                    } else {
                        pool[rng.gen_range(1..pool.len())]
                    };
                    cite(&mut rng, &journals, d, 0.3)
                })
                .collect();
            records.push(paper(
                format!("dom-{year}-{i}"),
                format!("Synthetic study {i}"),
                PubDate::month(year, rng.gen_range(1..=12)),
                journals[0].title.clone(),
                refs,
            ));
        }
    }
    SyntheticCorpus { records, journals }
}

const CLUSTERS: [&[Discipline]; 3] = [
    &[Discipline::Medi, Discipline::Immu, Discipline::Bioc, Discipline::Pharm, Discipline::Vete],
    &[Discipline::Soci, Discipline::Psyc, Discipline::Econ, Discipline::Busi, Discipline::Decis],
    &[Discipline::Chem, Discipline::Cheme, Discipline::Mater, Discipline::Phys, Discipline::Envi],
];

/// Mixed corpus resembling a small field over 2016-2020: three discipline
/// clusters with occasional cross-cluster citation, growing cross-cluster
/// rates, COVID terms in most 2020 papers, a few non-article records, short
/// reference lists, unindexed journals, and empty journal titles.
pub fn fixture_corpus(seed: u64, n_records: usize) -> SyntheticCorpus {
    let journals = journal_universe();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let years = [2016, 2017, 2018, 2019, 2020];
    let mut records = Vec::with_capacity(n_records);
    for i in 0..n_records {
        let t = i * years.len() / n_records.max(1);
        let year = years[t];
        let home = [0usize, 0, 0, 1, 2][rng.gen_range(0..5)];
        let cross = 0.05 + 0.05 * t as f64;
        let n_refs = if rng.gen_bool(0.06) { rng.gen_range(1..=4) } else { rng.gen_range(6..=24) };
        let unknown_rate = if rng.gen_bool(0.1) { 0.4 } else { 0.03 };
        let refs = (0..n_refs)
            .map(|r| {
                if rng.gen_bool(unknown_rate) {
                    return if r % 2 == 0 { format!("Unindexed Bulletin {}", rng.gen_range(1..50)) } else { String::new() };
                }
                if rng.gen_bool(0.08) {
                    let j = &journals[Discipline::COUNT + rng.gen_range(0..4)];
                    return match &j.abbrev {
                        Some(a) if rng.gen_bool(0.5) => a.clone(),
                        _ => j.title.clone(),
                    };
                }
                let cluster = if rng.gen_bool(cross) { rng.gen_range(0..CLUSTERS.len()) } else { home };
                let pool = CLUSTERS[cluster];
                // the first discipline of each cluster is cited most
                let d = if rng.gen_bool(0.4) { pool[0] } else { pool[rng.gen_range(0..pool.len())] };
                cite(&mut rng, &journals, d, 0.3)
            })
            .collect();
        let covid = year == 2020 && rng.gen_bool(0.7);
        let title = match (covid, rng.gen_range(0..3)) {
            (true, 0) => format!("COVID-19 outcomes in cohort {i}"),
            (true, 1) => format!("Clinical features of 2019-nCoV infection, series {i}"),
            (true, _) => format!("Responses to the covid pandemic, study {i}"),
            (false, _) => format!("Coronavirus research note {i}"),
        };
        let own = CLUSTERS[home][rng.gen_range(0..5)];
        let citing = cite(&mut rng, &journals, own, 0.2);
        let mut rec = paper(
            format!("fx{i:04}"),
            title,
            PubDate::month(year, rng.gen_range(1..=12)),
            citing,
            refs,
        );
        if rng.gen_bool(0.05) {
            rec.doc_type = DocType::Other;
        } else if rng.gen_bool(0.15) {
            rec.doc_type = DocType::Review;
        }
        if rng.gen_bool(0.1) {
            rec.pub_date.month = None;
        }
        records.push(rec);
    }
    SyntheticCorpus { records, journals }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::assign;

    #[test]
    fn generators_are_seeded() {
        let a = fixture_corpus(7, 50);
        let b = fixture_corpus(7, 50);
        let c = fixture_corpus(8, 50);
        assert_eq!(a.records, b.records);
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn every_cited_journal_resolves() {
        let s = spread_corpus(1, &[2000, 2001], 5, 10, 3, 4);
        let (cat, abbrev) = (s.catalog(), s.abbrev_map());
        for r in &s.records {
            assert_eq!(assign(r, &cat, &abbrev).coverage, 1.0);
        }
    }

    #[test]
    fn catalog_csv_round_trips() {
        let s = fixture_corpus(1, 10);
        let loaded = DisciplineCatalog::from_reader(s.catalog_csv().as_bytes(), std::path::Path::new("c"), b',').unwrap();
        assert!(loaded.warnings.is_empty());
        assert_eq!(loaded.value.len(), s.journals.len());
        let m = AbbrevMap::from_reader(s.abbrev_csv().as_bytes(), std::path::Path::new("a"), b',').unwrap();
        assert!(m.warnings.is_empty());
        assert_eq!(m.value.len(), s.abbrev_map().len());
    }
}
