//! Run configuration: TOML file merged under command-line flags.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use idrkit_core::corpus::{DateWindow, MissingMonthPolicy, YearMonth, YearRange};
use idrkit_core::metrics::TdMode;
use idrkit_core::qualifier::QualificationPolicy;
use idrkit_core::streams::DEFAULT_OVERLAP_THRESHOLD;
use idrkit_core::{DocType, Granularity};

use crate::args::{DisparityBasis, Flags, GranularityArg, TdModeArg};

pub const DEFAULT_OUT: &str = "idrkit-out";
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_RESOLUTION: f64 = 1.0;

/// Invalid or unresolvable configuration; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub inputs: InputSection,
    #[serde(default)]
    pub policy: PolicySection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub records: Option<PathBuf>,
    pub catalog: Option<PathBuf>,
    pub abbrev_map: Option<PathBuf>,
    /// Single-byte field delimiter of the mapping files.
    pub delimiter: Option<String>,
    pub min_year: Option<i32>,
    pub max_year: Option<i32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub min_references: Option<usize>,
    pub min_coverage: Option<f64>,
    pub allowed_types: Option<Vec<String>>,
    pub filter_reference_types: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub granularity: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub query: Option<Vec<String>>,
    pub missing_month: Option<String>,
    pub td_mode: Option<String>,
    pub disparity_basis: Option<DisparityBasis>,
    pub seed: Option<u64>,
    pub resolution: Option<f64>,
    pub overlap_threshold: Option<f64>,
    /// Keep only the most frequent disciplines of each period's network.
    pub max_nodes: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read config file {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| bad(format!("invalid config file {}: {e}", path.display())))
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub records: PathBuf,
    pub catalog: PathBuf,
    pub abbrev_map: Option<PathBuf>,
    #[serde(serialize_with = "ser_delim")]
    pub delimiter: u8,
    pub min_year: i32,
    pub max_year: i32,
    pub policy: QualificationPolicy,
    pub filter_reference_types: bool,
    pub granularity: Granularity,
    #[serde(serialize_with = "ser_window")]
    pub window: DateWindow,
    pub missing_month: MissingMonthPolicy,
    pub query: Vec<String>,
    #[serde(serialize_with = "ser_display")]
    pub td_mode: TdMode,
    pub disparity_basis: DisparityBasis,
    pub seed: u64,
    pub resolution: f64,
    pub overlap_threshold: f64,
    pub max_nodes: Option<usize>,
    pub out: PathBuf,
}

fn ser_delim<S: serde::Serializer>(d: &u8, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&(*d as char).to_string())
}

fn ser_display<S: serde::Serializer, T: fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn ser_window<S: serde::Serializer>(w: &DateWindow, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(2))?;
    m.serialize_entry("from", &w.from.map(|x| x.to_string()))?;
    m.serialize_entry("to", &w.to.map(|x| x.to_string()))?;
    m.end()
}

impl RunConfig {
    pub fn year_range(&self) -> YearRange {
        YearRange {
            min: self.min_year,
            max: self.max_year,
        }
    }
}

fn rebase(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

fn parse_year_month(label: &str, s: &str) -> Result<YearMonth, ConfigError> {
    s.parse::<YearMonth>().map_err(|e| bad(format!("invalid {label}: {e}")))
}

fn parse_type(s: &str) -> Result<DocType, ConfigError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "article" => Ok(DocType::Article),
        "review" => Ok(DocType::Review),
        "other" => Ok(DocType::Other),
        x => Err(bad(format!("unknown document type `{x}` in allowed_types"))),
    }
}

/// Merges flags over the config file over built-in defaults, then validates.
pub fn resolve(flags: &Flags) -> Result<RunConfig, ConfigError> {
    let (file, base) = match &flags.config {
        Some(p) => {
            if !p.is_file() {
                return Err(bad(format!("config file not found: {}", p.display())));
            }
            let dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
            (FileConfig::load(p)?, dir)
        }
        None => (FileConfig::default(), PathBuf::new()),
    };
    let from_file = |p: Option<PathBuf>| p.map(|p| rebase(&base, p));

    let records = flags
        .records
        .clone()
        .or_else(|| from_file(file.inputs.records.clone()))
        .ok_or_else(|| bad("no records file given (use --records or inputs.records)"))?;
    let catalog = flags
        .catalog
        .clone()
        .or_else(|| from_file(file.inputs.catalog.clone()))
        .ok_or_else(|| bad("no catalog file given (use --catalog or inputs.catalog)"))?;
    let abbrev_map = flags.abbrev_map.clone().or_else(|| from_file(file.inputs.abbrev_map.clone()));
    for (what, p) in [("records", Some(&records)), ("catalog", Some(&catalog)), ("abbreviation map", abbrev_map.as_ref())] {
        if let Some(p) = p {
            if !p.is_file() {
                return Err(bad(format!("{what} file not found: {}", p.display())));
            }
        }
    }

    let delimiter = match file.inputs.delimiter.as_deref() {
        None => b',',
        Some("\\t") | Some("tab") => b'\t',
        Some(d) if d.len() == 1 => d.as_bytes()[0],
        Some(d) => return Err(bad(format!("delimiter must be a single byte, got `{d}`"))),
    };
    let years = YearRange::default();
    let min_year = file.inputs.min_year.unwrap_or(years.min);
    let max_year = file.inputs.max_year.unwrap_or(years.max);
    if min_year > max_year {
        return Err(bad(format!("min_year {min_year} exceeds max_year {max_year}")));
    }

    let defaults = QualificationPolicy::default();
    let allowed_types = match &file.policy.allowed_types {
        Some(ts) => ts.iter().map(|t| parse_type(t)).collect::<Result<BTreeSet<_>, _>>()?,
        None => defaults.allowed_types.clone(),
    };
    let policy = QualificationPolicy {
        min_references: flags.min_refs.or(file.policy.min_references).unwrap_or(defaults.min_references),
        min_coverage: flags.min_coverage.or(file.policy.min_coverage).unwrap_or(defaults.min_coverage),
        allowed_types,
    };
    policy.validate().map_err(|e| bad(e.to_string()))?;

    let granularity = match (flags.granularity, file.analysis.granularity.as_deref()) {
        (Some(GranularityArg::Year), _) => Granularity::Year,
        (Some(GranularityArg::Month), _) => Granularity::Month,
        (None, Some(g)) => g.parse().map_err(|e| bad(format!("invalid granularity: {e}")))?,
        (None, None) => Granularity::Year,
    };
    let from = flags.from.clone().or(file.analysis.from.clone());
    let to = flags.to.clone().or(file.analysis.to.clone());
    let window = DateWindow {
        from: from.as_deref().map(|s| parse_year_month("--from", s)).transpose()?,
        to: to.as_deref().map(|s| parse_year_month("--to", s)).transpose()?,
    };
    if let (Some(f), Some(t)) = (window.from, window.to) {
        let key = |x: YearMonth| (x.year, x.month.unwrap_or(0));
        if f.year > t.year || (f.month.is_some() && t.month.is_some() && key(f) > key(t)) {
            return Err(bad(format!("window start {f} is after its end {t}")));
        }
    }
    let missing_month = match file.analysis.missing_month.as_deref() {
        Some(m) => m.parse().map_err(|e| bad(format!("invalid missing_month: {e}")))?,
        None => MissingMonthPolicy::default(),
    };

    let query = if flags.query.is_empty() {
        file.analysis.query.clone().unwrap_or_default()
    } else {
        flags.query.clone()
    };
    if query.iter().any(|q| q.trim().is_empty()) {
        return Err(bad("query terms must be nonempty"));
    }

    let td_mode = match (flags.td_mode, file.analysis.td_mode.as_deref()) {
        (Some(TdModeArg::Canonical), _) => TdMode::Canonical,
        (Some(TdModeArg::PaperExample), _) => TdMode::PaperExample,
        (None, Some(m)) => m.parse().map_err(|e| bad(format!("invalid td_mode: {e}")))?,
        (None, None) => TdMode::default(),
    };
    let resolution = flags.resolution.or(file.analysis.resolution).unwrap_or(DEFAULT_RESOLUTION);
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(bad(format!("resolution must be a positive number, got {resolution}")));
    }
    let overlap_threshold = flags
        .overlap_threshold
        .or(file.analysis.overlap_threshold)
        .unwrap_or(DEFAULT_OVERLAP_THRESHOLD);
    if !(0.0..=1.0).contains(&overlap_threshold) {
        return Err(bad(format!("overlap_threshold {overlap_threshold} outside [0, 1]")));
    }

    if file.analysis.max_nodes == Some(0) {
        return Err(bad("max_nodes must be at least 1"));
    }

    Ok(RunConfig {
        records,
        catalog,
        abbrev_map,
        delimiter,
        min_year,
        max_year,
        policy,
        filter_reference_types: file.policy.filter_reference_types.unwrap_or(true),
        granularity,
        window,
        missing_month,
        query,
        td_mode,
        disparity_basis: flags.disparity_basis.or(file.analysis.disparity_basis).unwrap_or(DisparityBasis::Global),
        seed: flags.seed.or(file.analysis.seed).unwrap_or(DEFAULT_SEED),
        resolution,
        overlap_threshold,
        max_nodes: file.analysis.max_nodes,
        out: flags
            .out
            .clone()
            .or_else(|| from_file(file.output.dir.clone()))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn touch(dir: &Path, name: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::File::create(&p).unwrap();
        p
    }

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        let p = dir.join("run.toml");
        std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn defaults_apply_without_config() {
        let dir = tempfile::tempdir().unwrap();
        let flags = Flags {
            records: Some(touch(dir.path(), "r.jsonl")),
            catalog: Some(touch(dir.path(), "c.csv")),
            ..Default::default()
        };
        let c = resolve(&flags).unwrap();
        assert_eq!(c.policy, QualificationPolicy::default());
        assert_eq!(c.td_mode, TdMode::Canonical);
        assert_eq!(c.disparity_basis, DisparityBasis::Global);
        assert_eq!(c.granularity, Granularity::Year);
        assert_eq!(c.overlap_threshold, 0.5);
        assert_eq!(c.resolution, 1.0);
        assert!(c.filter_reference_types);
        assert_eq!(c.out, PathBuf::from(DEFAULT_OUT));
    }

    #[test]
    fn flags_override_config_override_defaults() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "r.jsonl");
        touch(dir.path(), "c.csv");
        let cfg = write_config(
            dir.path(),
            "[inputs]\nrecords = \"r.jsonl\"\ncatalog = \"c.csv\"\n[policy]\nmin_references = 3\nmin_coverage = 0.5\n\
             [analysis]\nseed = 9\ntd_mode = \"paper-example\"\nquery = [\"a\"]\n",
        );
        let flags = Flags {
            config: Some(cfg),
            min_refs: Some(7),
            query: vec!["b".into(), "c".into()],
            ..Default::default()
        };
        let c = resolve(&flags).unwrap();
        assert_eq!(c.records, dir.path().join("r.jsonl"));
        assert_eq!(c.policy.min_references, 7);
        assert_eq!(c.policy.min_coverage, 0.5);
        assert_eq!(c.seed, 9);
        assert_eq!(c.td_mode, TdMode::PaperExample);
        assert_eq!(c.query, vec!["b", "c"]);
    }

    #[test]
    fn missing_file_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let flags = Flags {
            records: Some(touch(dir.path(), "r.jsonl")),
            catalog: Some(dir.path().join("nope.csv")),
            ..Default::default()
        };
        let e = resolve(&flags).unwrap_err();
        assert!(e.0.contains("nope.csv"), "{e}");
    }

    #[test]
    fn out_of_range_values_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let base = Flags {
            records: Some(touch(dir.path(), "r.jsonl")),
            catalog: Some(touch(dir.path(), "c.csv")),
            ..Default::default()
        };
        for f in [
            Flags { min_coverage: Some(1.5), ..base.clone() },
            Flags { min_refs: Some(0), ..base.clone() },
            Flags { resolution: Some(0.0), ..base.clone() },
            Flags { overlap_threshold: Some(-0.1), ..base.clone() },
            Flags { from: Some("2020".into()), to: Some("2019".into()), ..base.clone() },
            Flags { from: Some("2020-13".into()), ..base.clone() },
        ] {
            assert!(resolve(&f).is_err(), "{f:?}");
        }
    }

    #[test]
    fn max_nodes_from_config() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "r.jsonl");
        touch(dir.path(), "c.csv");
        let head = "[inputs]\nrecords = \"r.jsonl\"\ncatalog = \"c.csv\"\n[analysis]\n";
        let cfg = write_config(dir.path(), &format!("{head}max_nodes = 12\n"));
        assert_eq!(resolve(&Flags { config: Some(cfg), ..Default::default() }).unwrap().max_nodes, Some(12));
        let cfg = write_config(dir.path(), &format!("{head}max_nodes = 0\n"));
        assert!(resolve(&Flags { config: Some(cfg), ..Default::default() }).is_err());
    }

    #[test]
    fn unknown_config_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "[analysis]\nsede = 1\n");
        let e = resolve(&Flags { config: Some(cfg), ..Default::default() }).unwrap_err();
        assert!(e.0.contains("invalid config"), "{e}");
    }
}
