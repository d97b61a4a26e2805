//! Stage orchestration. Every stage renders its tables into memory; the
//! caller decides where they land.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use log::{debug, info};
use serde::Serialize;

use idrkit_core::catalog::{assign, discipline_vector, DisciplineAssignment, DisciplineCatalog};
use idrkit_core::cooccurrence::{analyze_period, build_cooccurrence, PeriodNetwork};
use idrkit_core::corpus::{bucket_by_period, parse_records, restrict_references, write_records, BucketOptions};
use idrkit_core::discipline::Discipline;
use idrkit_core::export::{export_graph, export_streams, ExportFormat};
use idrkit_core::metrics::{
    aggregate_series, cooccurrence_matrix, disparity_matrix, score_paper, DisparityMatrix, MetricSeries, PaperScores,
};
use idrkit_core::normalize::AbbrevMap;
use idrkit_core::qualifier::{
    corpus_stats, keyword_subset, qualify, write_rejections, AssignedRecord, CorpusStats, StageInput,
};
use idrkit_core::streams::{align_streams, PeriodSlice, StreamGraph};
use idrkit_core::{Period, PublicationRecord, Warning};

use crate::args::DisparityBasis;
use crate::config::RunConfig;

/// Which groups of outputs a subcommand produces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Selection {
    pub ingest: bool,
    pub qualify: bool,
    pub summary: bool,
    pub disparity: bool,
    pub scores: bool,
    pub networks: bool,
    pub streams: bool,
}

impl Selection {
    pub fn for_command(name: &str) -> Selection {
        let all = Selection {
            ingest: true,
            qualify: true,
            summary: true,
            disparity: true,
            scores: true,
            networks: true,
            streams: true,
        };
        let none = Selection::default();
        match name {
            "ingest" => Selection { ingest: true, ..none },
            "qualify" => Selection { ingest: true, qualify: true, summary: true, ..none },
            "metrics" => Selection { qualify: true, disparity: true, scores: true, summary: true, ..none },
            "disparity" => Selection { qualify: true, disparity: true, ..none },
            "cooccur" => Selection { qualify: true, networks: true, ..none },
            "streams" => Selection { qualify: true, networks: true, streams: true, ..none },
            "report" => Selection { qualify: true, summary: true, ..none },
            _ => all,
        }
    }

    fn needs_subset(&self) -> bool {
        self.summary || self.disparity || self.scores || self.networks || self.streams
    }
}

/// A rendered output file, path relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub path: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub stage: &'static str,
    pub millis: f64,
}

#[derive(Debug, Default)]
pub struct PipelineOutput {
    pub artifacts: Vec<Artifact>,
    pub stats: Option<CorpusStats>,
    pub warnings: Vec<Warning>,
    pub timings: Vec<Timing>,
    pub series: Option<MetricSeries>,
    pub streams: Option<StreamGraph>,
}

/// Data problems that should end the run with exit code 1.
#[derive(Debug)]
pub struct DataError(pub String);

impl std::fmt::Display for DataError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for DataError {}

struct Clock {
    start: Instant,
}

impl Clock {
    fn start() -> Clock {
        Clock { start: Instant::now() }
    }

    fn lap(&mut self, out: &mut PipelineOutput, stage: &'static str) {
        let millis = self.start.elapsed().as_secs_f64() * 1e3;
        debug!("{stage}: {millis:.1} ms");
        out.timings.push(Timing { stage, millis });
        self.start = Instant::now();
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

fn render(write: impl FnOnce(&mut Vec<u8>) -> idrkit_core::Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

fn f6(x: f64) -> String {
    // no "-0.000000"
    let x = if x.abs() < 5e-7 { 0.0 } else { x };
    format!("{x:.6}")
}

fn set_codes(s: Option<idrkit_core::DisciplineSet>) -> String {
    match s {
        Some(s) => s.to_codes(),
        None => "?".into(),
    }
}

fn assignments_table(items: &[AssignedRecord]) -> Result<Vec<u8>> {
    csv_bytes(
        &["paper_id", "citing", "references", "identified", "coverage", "reference_disciplines"],
        items.iter().map(|a| {
            let x = &a.assignment;
            vec![
                x.paper_id.clone(),
                set_codes(x.citing),
                x.references.len().to_string(),
                x.identified().to_string(),
                f6(x.coverage),
                x.references.iter().map(|r| set_codes(*r)).collect::<Vec<_>>().join("|"),
            ]
        }),
    )
}

fn distribution_table(papers: &[&DisciplineAssignment]) -> Result<Vec<u8>> {
    let mut refs = [0u64; Discipline::COUNT];
    let mut with = [0u64; Discipline::COUNT];
    for a in papers {
        let v = discipline_vector(a);
        for (d, n) in v.nonzero() {
            refs[d.index()] += n;
            with[d.index()] += 1;
        }
    }
    let total: u64 = refs.iter().sum();
    let mut order: Vec<Discipline> = Discipline::ALL.to_vec();
    order.sort_by(|a, b| refs[b.index()].cmp(&refs[a.index()]).then(a.index().cmp(&b.index())));
    csv_bytes(
        &["code", "name", "subject_area", "references", "papers", "share"],
        order.into_iter().map(|d| {
            let n = refs[d.index()];
            vec![
                d.abbrev().to_string(),
                d.name().to_string(),
                d.subject_area().name().to_string(),
                n.to_string(),
                with[d.index()].to_string(),
                f6(if total == 0 { 0.0 } else { n as f64 / total as f64 }),
            ]
        }),
    )
}

fn scores_table(scores: &[(Period, PaperScores)]) -> Result<Vec<u8>> {
    csv_bytes(
        &["period", "paper_id", "variety", "balance", "true_diversity", "td_mode"],
        scores.iter().map(|(p, s)| {
            vec![
                p.to_string(),
                s.paper_id.clone(),
                s.variety.to_string(),
                f6(s.balance),
                f6(s.true_diversity),
                s.mode.to_string(),
            ]
        }),
    )
}

fn network_tables(nets: &[PeriodNetwork]) -> Result<(Vec<u8>, Vec<u8>)> {
    let communities = csv_bytes(
        &["period", "community", "label", "size", "members"],
        nets.iter().flat_map(|n| {
            n.communities.iter().map(move |c| {
                vec![
                    n.graph.period.to_string(),
                    c.id.to_string(),
                    c.label.0.clone(),
                    c.size().to_string(),
                    c.members.iter().map(|(d, k)| format!("{d}:{k}")).collect::<Vec<_>>().join(";"),
                ]
            })
        }),
    )?;
    let summary = csv_bytes(
        &["period", "nodes", "edges", "communities", "modularity"],
        nets.iter().map(|n| {
            vec![
                n.graph.period.to_string(),
                n.graph.nodes.len().to_string(),
                n.graph.edges.len().to_string(),
                n.communities.len().to_string(),
                f6(n.partition.modularity),
            ]
        }),
    )?;
    Ok((communities, summary))
}

fn stage<'a>(name: &'a str, items: Vec<&'a AssignedRecord>) -> StageInput<'a> {
    StageInput {
        name,
        records: items.into_iter().map(|a| &a.record).collect(),
    }
}

pub struct Inputs {
    pub records: Vec<PublicationRecord>,
    pub skipped: usize,
    pub catalog: DisciplineCatalog,
    pub abbrev: AbbrevMap,
    pub warnings: Vec<Warning>,
}

pub fn load_inputs(cfg: &RunConfig) -> Result<Inputs> {
    let file = std::fs::File::open(&cfg.records).with_context(|| format!("opening {}", cfg.records.display()))?;
    let parsed = parse_records(std::io::BufReader::new(file), cfg.year_range())
        .with_context(|| format!("reading {}", cfg.records.display()))?;
    let mut warnings = parsed.warnings;
    let catalog = DisciplineCatalog::load(&cfg.catalog, cfg.delimiter)?;
    warnings.extend(catalog.warnings);
    let abbrev = match &cfg.abbrev_map {
        Some(p) => {
            let m = AbbrevMap::load(p, cfg.delimiter)?;
            warnings.extend(m.warnings);
            m.value
        }
        None => AbbrevMap::default(),
    };
    info!(
        "loaded {} records ({} skipped), {} catalog titles, {} abbreviations",
        parsed.records.len(),
        parsed.skipped,
        catalog.value.len(),
        abbrev.len()
    );
    Ok(Inputs {
        records: parsed.records,
        skipped: parsed.skipped,
        catalog: catalog.value,
        abbrev,
        warnings,
    })
}

fn disparity_for(
    basis: DisparityBasis,
    buckets: &BTreeMap<Period, Vec<&AssignedRecord>>,
) -> Result<(Option<DisparityMatrix>, BTreeMap<Period, DisparityMatrix>)> {
    match basis {
        DisparityBasis::Global => {
            let all = buckets.values().flatten().map(|a| &a.assignment);
            let c = cooccurrence_matrix(all);
            Ok((Some(disparity_matrix(&c, "global")?), BTreeMap::new()))
        }
        DisparityBasis::PerWindow => {
            let mut per = BTreeMap::new();
            for (p, items) in buckets {
                let c = cooccurrence_matrix(items.iter().map(|a| &a.assignment));
                per.insert(*p, disparity_matrix(&c, format!("window {p}"))?);
            }
            Ok((None, per))
        }
    }
}

/// Runs the selected stages on loaded inputs.
pub fn run_pipeline(cfg: &RunConfig, inputs: Inputs, sel: Selection) -> Result<PipelineOutput> {
    let mut out = PipelineOutput {
        warnings: inputs.warnings,
        ..Default::default()
    };
    let mut clock = Clock::start();
    let raw = inputs.records;
    if raw.is_empty() {
        bail!(DataError(format!("no valid records in {}", cfg.records.display())));
    }

    let assigned: Vec<AssignedRecord> = raw
        .iter()
        .cloned()
        .map(|mut record| {
            if cfg.filter_reference_types {
                restrict_references(&mut record, &cfg.policy.allowed_types);
            }
            let assignment = assign(&record, &inputs.catalog, &inputs.abbrev);
            AssignedRecord { record, assignment }
        })
        .collect();
    if sel.ingest {
        out.artifacts.push(Artifact {
            path: "records.jsonl".into(),
            bytes: render(|b| write_records(&raw, b))?,
        });
        out.artifacts.push(Artifact {
            path: "assignments.csv".into(),
            bytes: assignments_table(&assigned)?,
        });
    }
    clock.lap(&mut out, "ingest");
    if !(sel.qualify || sel.needs_subset()) {
        return Ok(out);
    }

    let typed: Vec<&AssignedRecord> = assigned
        .iter()
        .filter(|a| cfg.policy.allowed_types.contains(&a.record.doc_type))
        .collect();
    let identifiable: Vec<&AssignedRecord> = typed.iter().copied().filter(|a| a.assignment.identified() > 0).collect();
    let q = qualify(assigned.clone(), &cfg.policy);
    info!("{} of {} records qualified", q.qualified.len(), raw.len());
    if q.qualified.is_empty() {
        bail!(DataError("qualified corpus is empty".into()));
    }
    let matched = if cfg.query.is_empty() {
        q.qualified.clone()
    } else {
        keyword_subset(q.qualified.clone(), &cfg.query)?
    };
    let opts = BucketOptions {
        window: cfg.window,
        missing_month: cfg.missing_month,
    };
    let bucketed = bucket_by_period(&matched, cfg.granularity, &opts);
    out.warnings.extend(bucketed.warnings.iter().cloned());
    let buckets = bucketed.buckets;
    let subset: Vec<&AssignedRecord> = buckets.values().flatten().copied().collect();

    let stats = corpus_stats(&[
        StageInput {
            name: "raw",
            records: raw.iter().collect(),
        },
        stage("typed", typed),
        stage("identifiable", identifiable),
        stage("qualified", q.qualified.iter().collect()),
        stage("subset", subset.clone()),
    ])?
    .with_rejections(&q.rejected);
    if sel.qualify {
        let mut ids = String::new();
        for a in &q.qualified {
            ids.push_str(&a.record.id);
            ids.push('\n');
        }
        out.artifacts.push(Artifact {
            path: "qualified_ids.txt".into(),
            bytes: ids.into_bytes(),
        });
        out.artifacts.push(Artifact {
            path: "rejections.csv".into(),
            bytes: render(|b| write_rejections(&q.rejected, b))?,
        });
    }
    if sel.qualify || sel.summary {
        out.artifacts.push(Artifact {
            path: "corpus_stats.csv".into(),
            bytes: render(|b| stats.write_csv(b))?,
        });
    }
    out.stats = Some(stats);
    clock.lap(&mut out, "qualify");
    if !sel.needs_subset() {
        return Ok(out);
    }
    if subset.is_empty() {
        bail!(DataError("no qualified record matches the query and window".into()));
    }
    if sel.summary {
        let a: Vec<&DisciplineAssignment> = subset.iter().map(|a| &a.assignment).collect();
        out.artifacts.push(Artifact {
            path: "discipline_distribution.csv".into(),
            bytes: distribution_table(&a)?,
        });
    }

    if sel.disparity || sel.scores || sel.summary {
        let (global, per) = disparity_for(cfg.disparity_basis, &buckets)?;
        if sel.disparity {
            if let Some(d) = &global {
                out.artifacts.push(Artifact {
                    path: "disparity_matrix.csv".into(),
                    bytes: render(|b| d.matrix().write_csv(b))?,
                });
            }
            for (p, d) in &per {
                out.artifacts.push(Artifact {
                    path: format!("disparity/{p}.csv"),
                    bytes: render(|b| d.matrix().write_csv(b))?,
                });
            }
        }
        let mut scores = Vec::with_capacity(subset.len());
        for (p, items) in &buckets {
            let d = global.as_ref().unwrap_or_else(|| &per[p]);
            for a in items {
                let v = discipline_vector(&a.assignment);
                match score_paper(&a.record.id, &v, d, cfg.td_mode) {
                    Ok(s) => scores.push((*p, s)),
                    Err(e) => out.warnings.push(Warning::new(
                        "metrics",
                        format!("paper `{}` not scored: {e}", a.record.id),
                    )),
                }
            }
        }
        let series = aggregate_series(&scores);
        if sel.scores {
            out.artifacts.push(Artifact {
                path: "paper_scores.csv".into(),
                bytes: scores_table(&scores)?,
            });
        }
        if sel.scores || sel.summary {
            out.artifacts.push(Artifact {
                path: "metric_series.csv".into(),
                bytes: render(|b| series.write_csv(b))?,
            });
        }
        out.series = Some(series);
        clock.lap(&mut out, "metrics");
    }

    if sel.networks || sel.streams {
        let nets: Vec<PeriodNetwork> = buckets
            .iter()
            .map(|(p, items)| {
                let mut g = build_cooccurrence(items.iter().map(|a| &a.assignment), *p);
                if let Some(n) = cfg.max_nodes {
                    g = g.top_nodes(n);
                }
                analyze_period(g, cfg.seed, cfg.resolution)
            })
            .collect();
        if sel.networks {
            for n in &nets {
                for fmt in [ExportFormat::GraphMl, ExportFormat::Dot] {
                    out.artifacts.push(Artifact {
                        path: format!("networks/{}.{}", n.graph.period, fmt.extension()),
                        bytes: export_graph(&n.graph, &n.similarity, fmt)?.into_bytes(),
                    });
                }
            }
            let (communities, summary) = network_tables(&nets)?;
            out.artifacts.push(Artifact {
                path: "communities.csv".into(),
                bytes: communities,
            });
            out.artifacts.push(Artifact {
                path: "network_summary.csv".into(),
                bytes: summary,
            });
        }
        clock.lap(&mut out, "networks");
        if sel.streams {
            let slices: Vec<PeriodSlice> = nets
                .into_iter()
                .map(|n| PeriodSlice {
                    period: n.graph.period,
                    communities: n.communities,
                })
                .collect();
            let s = align_streams(&slices, cfg.overlap_threshold);
            for fmt in ExportFormat::ALL {
                out.artifacts.push(Artifact {
                    path: format!("streams.{}", fmt.extension()),
                    bytes: export_streams(&s, fmt)?.into_bytes(),
                });
            }
            out.streams = Some(s);
            clock.lap(&mut out, "streams");
        }
    }
    Ok(out)
}
