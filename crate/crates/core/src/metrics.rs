//! Diversity indicators: Variety, Balance, the disparity matrix, True
//! Diversity, and per-period means with 95% confidence intervals.
//!
//! Disparity is `d_ij = 1 - cos(row_i, row_j)` over a discipline
//! co-occurrence matrix, using the usual dot-product numerator.
//!
//! True Diversity comes in two modes:
//!
//! - [`TdMode::Canonical`]: `1 / sum_i sum_j (1 - d_ij) p_i p_j` over all
//!   ordered pairs including `i = j`. Equals 1 for a single discipline.
//! - [`TdMode::PaperExample`]: `1 / sum_{i<j} d_ij p_i p_j` over distinct
//!   unordered pairs. Undefined for a single discipline.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::catalog::{DisciplineAssignment, DisciplineVector};
use crate::corpus::Period;
use crate::discipline::{Discipline, DisciplineSet};
use crate::error::{Error, Result};
use crate::similarity::cosine;

const N: usize = Discipline::COUNT;

/// z-value of the two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

pub fn variety(v: &DisciplineVector) -> Result<usize> {
    let n = v.nonzero().count();
    if n == 0 {
        return Err(Error::Domain("variety of an all-zero discipline vector".into()));
    }
    Ok(n)
}

/// `1 - Gini` of the nonzero counts, using the sorted-rank form
/// `G = sum_i (2i - V - 1) x_i / (V sum x)` with `x` ascending.
pub fn balance(v: &DisciplineVector) -> Result<f64> {
    let mut xs: Vec<u64> = v.nonzero().map(|(_, c)| c).collect();
    if xs.is_empty() {
        return Err(Error::Domain("balance of an all-zero discipline vector".into()));
    }
    xs.sort_unstable();
    let n = xs.len() as f64;
    let total: f64 = xs.iter().map(|&x| x as f64).sum();
    let weighted: f64 = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x as f64)
        .sum();
    Ok(1.0 - weighted / (n * total))
}

// ---------------------------------------------------------------------------
// Matrices

/// Dense 27x27 matrix indexed by discipline.
#[derive(Clone, PartialEq)]
pub struct DisciplineMatrix {
    values: Vec<f64>,
}

impl Default for DisciplineMatrix {
    fn default() -> Self {
        DisciplineMatrix {
            values: vec![0.0; N * N],
        }
    }
}

impl fmt::Debug for DisciplineMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.values.chunks(N)).finish()
    }
}

impl DisciplineMatrix {
    pub fn from_fn(mut f: impl FnMut(Discipline, Discipline) -> f64) -> Self {
        let mut m = DisciplineMatrix::default();
        for a in Discipline::ALL {
            for b in Discipline::ALL {
                m.set(a, b, f(a, b));
            }
        }
        m
    }

    pub fn get(&self, a: Discipline, b: Discipline) -> f64 {
        self.values[a.index() * N + b.index()]
    }

    pub fn set(&mut self, a: Discipline, b: Discipline, value: f64) {
        self.values[a.index() * N + b.index()] = value;
    }

    pub fn row(&self, a: Discipline) -> &[f64] {
        &self.values[a.index() * N..(a.index() + 1) * N]
    }

    pub fn is_symmetric(&self) -> bool {
        Discipline::ALL
            .iter()
            .all(|&a| Discipline::ALL.iter().all(|&b| self.get(a, b) == self.get(b, a)))
    }

    /// Delimited table with a `code` column followed by one column per discipline.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Stream(e.into());
        let mut header = vec!["code".to_string()];
        header.extend(Discipline::ALL.iter().map(|d| d.abbrev().to_string()));
        w.write_record(&header).map_err(csv_err)?;
        for a in Discipline::ALL {
            let mut row = vec![a.abbrev().to_string()];
            row.extend(self.row(a).iter().map(|x| format_value(*x)));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn format_value(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.6}")
    }
}

/// Discipline co-occurrence counts over papers: for each paper, the union of
/// its identified reference disciplines contributes 1 to every off-diagonal
/// pair and 1 to the diagonal of every member.
pub fn cooccurrence_matrix<'a, I>(papers: I) -> DisciplineMatrix
where
    I: IntoIterator<Item = &'a DisciplineAssignment>,
{
    let mut m = DisciplineMatrix::default();
    for paper in papers {
        let members: Vec<Discipline> = paper.reference_union().iter().collect();
        for &a in &members {
            for &b in &members {
                let v = m.get(a, b);
                m.set(a, b, v + 1.0);
            }
        }
    }
    m
}

/// `1 - cosine` between all row pairs, with zero diagonal. Rows that are
/// entirely zero sit at distance 1 from every other row. Returns the
/// distances and the indices of the zero rows.
pub fn cosine_disparity(rows: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<usize>) {
    let zero_rows: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.iter().all(|&x| x == 0.0))
        .map(|(i, _)| i)
        .collect();
    let d = rows
        .iter()
        .enumerate()
        .map(|(i, a)| {
            rows.iter()
                .enumerate()
                .map(|(j, b)| {
                    if i == j {
                        0.0
                    } else {
                        cosine(a, b).map_or(1.0, |s| 1.0 - s)
                    }
                })
                .collect()
        })
        .collect();
    (d, zero_rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMatrix {
    d: DisciplineMatrix,
    /// Disciplines whose co-occurrence row was all zero (distance 1 to all).
    pub zero_rows: DisciplineSet,
    /// Free-form description of the co-occurrence basis.
    pub provenance: String,
}

impl DisparityMatrix {
    pub fn get(&self, a: Discipline, b: Discipline) -> f64 {
        self.d.get(a, b)
    }

    pub fn matrix(&self) -> &DisciplineMatrix {
        &self.d
    }

    /// Builds directly from pairwise distances (diagonal forced to 0);
    /// every entry must be finite, symmetric, and within [0, 1].
    pub fn from_distances(d: DisciplineMatrix, provenance: impl Into<String>) -> Result<Self> {
        let mut d = d;
        for a in Discipline::ALL {
            d.set(a, a, 0.0);
        }
        for a in Discipline::ALL {
            for b in Discipline::ALL {
                let x = d.get(a, b);
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::InvalidMatrix(format!("distance {a}/{b} = {x} outside [0, 1]")));
                }
            }
        }
        if !d.is_symmetric() {
            return Err(Error::InvalidMatrix("distance matrix is not symmetric".into()));
        }
        Ok(DisparityMatrix {
            d,
            zero_rows: DisciplineSet::empty(),
            provenance: provenance.into(),
        })
    }
}

/// Disparity from a symmetric, nonnegative co-occurrence matrix.
pub fn disparity_matrix(c: &DisciplineMatrix, provenance: impl Into<String>) -> Result<DisparityMatrix> {
    for a in Discipline::ALL {
        for b in Discipline::ALL {
            let x = c.get(a, b);
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidMatrix(format!("entry {a}/{b} = {x} is negative or not finite")));
            }
        }
    }
    if !c.is_symmetric() {
        return Err(Error::InvalidMatrix("co-occurrence matrix is not symmetric".into()));
    }
    let rows: Vec<Vec<f64>> = Discipline::ALL.iter().map(|&a| c.row(a).to_vec()).collect();
    let (d, zero) = cosine_disparity(&rows);
    let mut out = DisciplineMatrix::default();
    for a in Discipline::ALL {
        for b in Discipline::ALL {
            out.set(a, b, d[a.index()][b.index()]);
        }
    }
    Ok(DisparityMatrix {
        d: out,
        zero_rows: zero.into_iter().filter_map(Discipline::from_index).collect(),
        provenance: provenance.into(),
    })
}

// ---------------------------------------------------------------------------
// True diversity

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TdMode {
    #[default]
    Canonical,
    PaperExample,
}

impl FromStr for TdMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "canonical" => Ok(TdMode::Canonical),
            "paper-example" | "paper_example" => Ok(TdMode::PaperExample),
            other => Err(format!("unknown td mode `{other}` (expected canonical|paper-example)")),
        }
    }
}

impl fmt::Display for TdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TdMode::Canonical => "canonical",
            TdMode::PaperExample => "paper-example",
        })
    }
}

pub fn true_diversity(v: &DisciplineVector, d: &DisparityMatrix, mode: TdMode) -> Result<f64> {
    let total = v.total();
    if total == 0 {
        return Err(Error::Domain("true diversity of an all-zero discipline vector".into()));
    }
    let p: Vec<(Discipline, f64)> = v.nonzero().map(|(k, c)| (k, c as f64 / total as f64)).collect();
    let denom = match mode {
        TdMode::Canonical => {
            let mut s = 0.0;
            for &(i, pi) in &p {
                for &(j, pj) in &p {
                    let sim = if i == j { 1.0 } else { 1.0 - d.get(i, j) };
                    s += sim * pi * pj;
                }
            }
            s
        }
        TdMode::PaperExample => {
            let mut s = 0.0;
            for (a, &(i, pi)) in p.iter().enumerate() {
                for &(j, pj) in &p[a + 1..] {
                    s += d.get(i, j) * pi * pj;
                }
            }
            s
        }
    };
    if denom <= 0.0 {
        return Err(Error::Domain(format!(
            "true diversity undefined in {mode} mode: zero denominator"
        )));
    }
    Ok(1.0 / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperScores {
    pub paper_id: String,
    pub variety: usize,
    pub balance: f64,
    pub true_diversity: f64,
    pub mode: TdMode,
}

pub fn score_paper(
    paper_id: &str,
    v: &DisciplineVector,
    d: &DisparityMatrix,
    mode: TdMode,
) -> Result<PaperScores> {
    Ok(PaperScores {
        paper_id: paper_id.to_string(),
        variety: variety(v)?,
        balance: balance(v)?,
        true_diversity: true_diversity(v, d, mode)?,
        mode,
    })
}

// ---------------------------------------------------------------------------
// Series

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `true` when `n = 1` and the interval has collapsed to the mean.
    pub degenerate: bool,
}

/// Mean with normal-approximation interval `mean +- 1.96 s / sqrt(n)`,
/// `s` the sample standard deviation. Empty input yields `None`.
pub fn summarize(values: &[f64]) -> Option<Summary> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Some(Summary {
            n,
            mean,
            ci_low: mean,
            ci_high: mean,
            degenerate: true,
        });
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let half = Z_95 * var.sqrt() / (n as f64).sqrt();
    Some(Summary {
        n,
        mean,
        ci_low: mean - half,
        ci_high: mean + half,
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodMetrics {
    pub variety: Summary,
    pub balance: Summary,
    pub true_diversity: Summary,
}

impl PeriodMetrics {
    pub fn n(&self) -> usize {
        self.variety.n
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricSeries {
    pub periods: BTreeMap<Period, PeriodMetrics>,
}

pub fn aggregate_series(scores: &[(Period, PaperScores)]) -> MetricSeries {
    let mut grouped: BTreeMap<Period, Vec<&PaperScores>> = BTreeMap::new();
    for (p, s) in scores {
        grouped.entry(*p).or_default().push(s);
    }
    let periods = grouped
        .into_iter()
        .filter_map(|(p, ss)| {
            let col = |f: fn(&PaperScores) -> f64| summarize(&ss.iter().map(|s| f(s)).collect::<Vec<_>>());
            Some((
                p,
                PeriodMetrics {
                    variety: col(|s| s.variety as f64)?,
                    balance: col(|s| s.balance)?,
                    true_diversity: col(|s| s.true_diversity)?,
                },
            ))
        })
        .collect();
    MetricSeries { periods }
}

impl MetricSeries {
    pub fn metric(&self, name: &str) -> Vec<(Period, Summary)> {
        self.periods
            .iter()
            .filter_map(|(p, m)| {
                let s = match name {
                    "variety" => m.variety,
                    "balance" => m.balance,
                    "true_diversity" => m.true_diversity,
                    _ => return None,
                };
                Some((*p, s))
            })
            .collect()
    }

    /// `period,metric,n,mean,ci_low,ci_high` table.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Stream(e.into());
        w.write_record(["period", "metric", "n", "mean", "ci_low", "ci_high"])
            .map_err(csv_err)?;
        for (p, m) in &self.periods {
            for (name, s) in [("variety", m.variety), ("balance", m.balance), ("true_diversity", m.true_diversity)] {
                w.write_record([
                    p.to_string(),
                    name.to_string(),
                    s.n.to_string(),
                    format!("{:.6}", s.mean),
                    format!("{:.6}", s.ci_low),
                    format!("{:.6}", s.ci_high),
                ])
                .map_err(csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use Discipline::*;

    fn v(pairs: &[(Discipline, u64)]) -> DisciplineVector {
        DisciplineVector::from_pairs(pairs)
    }

    /// Disparity with the given off-diagonal entries; all other pairs are 1.
    fn disparity(pairs: &[(Discipline, Discipline, f64)]) -> DisparityMatrix {
        let mut m = DisciplineMatrix::from_fn(|_, _| 1.0);
        for &(a, b, x) in pairs {
            m.set(a, b, x);
            m.set(b, a, x);
        }
        DisparityMatrix::from_distances(m, "test").unwrap()
    }

    #[test]
    fn variety_counts_nonzero() {
        assert_eq!(variety(&v(&[(Medi, 12)])).unwrap(), 1);
        assert_eq!(variety(&v(&[(Medi, 3), (Cs, 1), (Decis, 1)])).unwrap(), 3);
        let all = DisciplineVector::from_counts([1; 27]);
        assert_eq!(variety(&all).unwrap(), 27);
        assert!(variety(&DisciplineVector::default()).is_err());
    }

    #[test]
    fn balance_examples() {
        let b = balance(&v(&[(Medi, 10), (Immu, 22), (Bioc, 5)])).unwrap();
        assert_abs_diff_eq!(b, 0.694, epsilon = 0.0005);
        for c in [1, 7, 1000] {
            assert_eq!(balance(&v(&[(Medi, c), (Cs, c), (Soci, c)])).unwrap(), 1.0);
        }
        // pairwise-difference oracle: sum |xi-xj| = 4 over ordered pairs, / (2*3*4)
        assert_abs_diff_eq!(balance(&v(&[(Medi, 1), (Cs, 1), (Soci, 2)])).unwrap(), 1.0 - 4.0 / 24.0, epsilon = 1e-12);
        assert_eq!(balance(&v(&[(Medi, 9)])).unwrap(), 1.0);
        assert!(balance(&DisciplineVector::default()).is_err());
    }

    #[test]
    fn disparity_of_toy_rows() {
        let (d, zero) = cosine_disparity(&[vec![1.0, 0.0], vec![1.0, 1.0]]);
        assert_abs_diff_eq!(d[0][1], 1.0 - 1.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(d[0][1], 0.2929, epsilon = 1e-4);
        assert_eq!(d[0][0], 0.0);
        assert!(zero.is_empty());

        let (d, _) = cosine_disparity(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        assert_eq!(d[0][1], 1.0);
        let (d, _) = cosine_disparity(&[vec![2.0, 5.0], vec![2.0, 5.0]]);
        assert_eq!(d[0][1], 0.0);
    }

    #[test]
    fn zero_rows_are_maximally_disparate() {
        let mut c = DisciplineMatrix::default();
        c.set(Medi, Medi, 3.0);
        c.set(Medi, Immu, 2.0);
        c.set(Immu, Medi, 2.0);
        c.set(Immu, Immu, 2.0);
        let d = disparity_matrix(&c, "t").unwrap();
        assert_eq!(d.get(Cs, Medi), 1.0);
        assert_eq!(d.get(Cs, Cs), 0.0);
        assert!(d.zero_rows.contains(Cs));
        assert!(!d.zero_rows.contains(Medi));
        assert!(d.get(Medi, Immu) < 1.0);
    }

    #[test]
    fn rejects_bad_cooccurrence() {
        let mut c = DisciplineMatrix::default();
        c.set(Medi, Immu, 1.0);
        assert!(disparity_matrix(&c, "t").is_err());
        let mut c = DisciplineMatrix::default();
        c.set(Medi, Medi, -1.0);
        assert!(disparity_matrix(&c, "t").is_err());
    }

    #[test]
    fn true_diversity_examples() {
        let counts = v(&[(Medi, 1), (Immu, 4), (Bioc, 5)]);
        let d = disparity(&[(Medi, Immu, 0.4), (Medi, Bioc, 0.5), (Immu, Bioc, 0.6)]);
        let paper = true_diversity(&counts, &d, TdMode::PaperExample).unwrap();
        assert_abs_diff_eq!(paper, 6.211, epsilon = 0.001);
        let canon = true_diversity(&counts, &d, TdMode::Canonical).unwrap();
        assert_abs_diff_eq!(canon, 1.0 / 0.678, epsilon = 1e-9);

        let single = v(&[(Medi, 7)]);
        assert_eq!(true_diversity(&single, &d, TdMode::Canonical).unwrap(), 1.0);
        assert!(true_diversity(&single, &d, TdMode::PaperExample).is_err());
        let same = disparity(&[(Medi, Immu, 0.0)]);
        assert!(true_diversity(&v(&[(Medi, 1), (Immu, 1)]), &same, TdMode::PaperExample).is_err());
        assert!(true_diversity(&DisciplineVector::default(), &d, TdMode::Canonical).is_err());
    }

    #[test]
    fn cooccurrence_counts() {
        let set = |ds: &[Discipline]| Some(ds.iter().copied().collect::<DisciplineSet>());
        let paper = DisciplineAssignment {
            paper_id: "a".into(),
            citing: None,
            references: vec![set(&[Medi, Cs]), set(&[Medi, Decis]), None],
            coverage: 2.0 / 3.0,
        };
        let c = cooccurrence_matrix([&paper, &paper]);
        assert_eq!(c.get(Medi, Medi), 2.0);
        assert_eq!(c.get(Cs, Decis), 2.0);
        assert_eq!(c.get(Decis, Cs), 2.0);
        assert_eq!(c.get(Immu, Medi), 0.0);
        assert!(c.is_symmetric());
    }

    #[test]
    fn summaries() {
        let s = summarize(&[3.0, 3.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.ci_low, s.ci_high), (3.0, 3.0, 3.0));
        let s = summarize(&[5.0]).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.ci_high - s.ci_low, 0.0);
        let s = summarize(&[2.0, 4.0]).unwrap();
        assert_abs_diff_eq!(s.mean, 3.0);
        assert_abs_diff_eq!(s.ci_low, 1.04, epsilon = 1e-12);
        assert_abs_diff_eq!(s.ci_high, 4.96, epsilon = 1e-12);
        assert!(summarize(&[]).is_none());
    }

    #[test]
    fn ci_width_shrinks_with_replication() {
        let base = [1.0, 2.0, 3.0, 4.0];
        let width = |k: usize| {
            let vals: Vec<f64> = base.iter().cycle().take(base.len() * k).copied().collect();
            let s = summarize(&vals).unwrap();
            s.ci_high - s.ci_low
        };
        // the sample sd changes slightly with n; compare against the exact ratio
        let sd = |k: usize| {
            let n = (4 * k) as f64;
            let ss = 5.0 * k as f64; // sum of squared deviations from 2.5
            (ss / (n - 1.0)).sqrt()
        };
        for k in [1usize, 4, 16] {
            let expected = 2.0 * Z_95 * sd(k) / ((4 * k) as f64).sqrt();
            assert_abs_diff_eq!(width(k), expected, epsilon = 1e-12);
        }
        assert!(width(16) < width(4) && width(4) < width(1));
    }

    #[test]
    fn series_table() {
        let sc = |id: &str, var: usize| PaperScores {
            paper_id: id.into(),
            variety: var,
            balance: 0.5,
            true_diversity: 1.5,
            mode: TdMode::Canonical,
        };
        let series = aggregate_series(&[
            (Period::Year(2001), sc("a", 2)),
            (Period::Year(2000), sc("b", 2)),
            (Period::Year(2000), sc("c", 4)),
        ]);
        assert_eq!(series.periods.len(), 2);
        let mut buf = Vec::new();
        series.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "period,metric,n,mean,ci_low,ci_high");
        assert_eq!(lines[1], "2000,variety,2,3.000000,1.040000,4.960000");
        assert_eq!(lines[4], "2001,variety,1,2.000000,2.000000,2.000000");
        assert_eq!(lines.len(), 7);
    }
}
