//! Feature ranking against the binary label and Select-K-Best reduction.
//!
//! Two scorers are provided:
//!
//! * [`kendall_tau`]: `(C - D) / (C + D)` over concordant and discordant pairs.
//!   Pairs tied in either variable are counted in neither total (no tau-b
//!   correction). With labels encoded `Bee = 0`, `NoBee = 1`, a positive tau
//!   means the feature grows towards `NoBee`.
//! * [`anova_f`]: one-way ANOVA F for the two label groups,
//!   `(SS_between / (k - 1)) / (SS_within / (n - k))` with `k = 2`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{FeatureTable, N_MFCC};
use crate::label::Label;
use crate::util::fmt_sig9;

/// Size of the default reduced feature set.
pub const DEFAULT_K: usize = 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionMethod {
    KendallTau,
    AnovaF,
}

impl fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            SelectionMethod::KendallTau => "kendall",
            SelectionMethod::AnovaF => "anova",
        })
    }
}

impl FromStr for SelectionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kendall" | "kendall-tau" | "tau" => Ok(SelectionMethod::KendallTau),
            "anova" | "anova-f" | "f" => Ok(SelectionMethod::AnovaF),
            other => Err(Error::invalid(format!("unknown selection method {other:?}"))),
        }
    }
}

/// Kendall rank correlation in O(n log n) (Knight's merge-sort counting).
///
/// Errors when the lengths differ, `n < 2`, a value is not finite, or every
/// pair is tied (`C + D = 0`).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::invalid(format!(
            "series lengths differ: {} vs {}",
            n,
            y.len()
        )));
    }
    if n < 2 {
        return Err(Error::invalid("need at least two observations"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite value in series"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    let pairs = |t: u64| t * t.saturating_sub(1) / 2;
    let total = pairs(n as u64);
    let mut tied_x = 0u64;
    let mut tied_xy = 0u64;
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if x[a] == x[b] {
            run_x += 1;
            if y[a] == y[b] {
                run_xy += 1;
            } else {
                tied_xy += pairs(run_xy);
                run_xy = 1;
            }
        } else {
            tied_x += pairs(run_x);
            tied_xy += pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    tied_x += pairs(run_x);
    tied_xy += pairs(run_xy);

    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let discordant = count_inversions(&mut ys);

    let mut tied_y = 0u64;
    let mut run_y = 1u64;
    for w in ys.windows(2) {
        if w[0] == w[1] {
            run_y += 1;
        } else {
            tied_y += pairs(run_y);
            run_y = 1;
        }
    }
    tied_y += pairs(run_y);

    let untied = total + tied_xy - tied_x - tied_y;
    if untied == 0 {
        return Err(Error::degenerate(
            "every pair is tied; Kendall tau is undefined",
        ));
    }
    let concordant = untied - discordant;
    Ok((concordant as f64 - discordant as f64) / untied as f64)
}

/// Sorts `v` ascending and returns the number of strictly inverted pairs.
fn count_inversions(v: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mut buf = v.to_vec();
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid && j < end {
                if v[j] < v[i] {
                    buf[k] = v[j];
                    swaps += (mid - i) as u64;
                    j += 1;
                } else {
                    buf[k] = v[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - i)].copy_from_slice(&v[i..mid]);
            k += mid - i;
            buf[k..k + (end - j)].copy_from_slice(&v[j..end]);
            start = end;
        }
        v.copy_from_slice(&buf);
        width *= 2;
    }
    swaps
}

/// ANOVA F outcome; `PerfectSeparation` when both groups are constant but
/// their means differ (the ratio is infinite).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnovaF {
    Value(f64),
    PerfectSeparation,
}

impl AnovaF {
    pub fn as_f64(self) -> f64 {
        match self {
            AnovaF::Value(v) => v,
            AnovaF::PerfectSeparation => f64::INFINITY,
        }
    }
}

/// One-way ANOVA F of `values` grouped by `labels`.
pub fn anova_f(values: &[f64], labels: &[Label]) -> Result<AnovaF> {
    let n = values.len();
    if n != labels.len() {
        return Err(Error::invalid(format!(
            "{} values but {} labels",
            n,
            labels.len()
        )));
    }
    if n < 3 {
        return Err(Error::invalid("need at least three observations"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite value in series"));
    }
    let mut count = [0usize; 2];
    let mut sum = [0.0f64; 2];
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for (&v, &l) in values.iter().zip(labels) {
        let g = l.index();
        count[g] += 1;
        sum[g] += v;
        min[g] = min[g].min(v);
        max[g] = max[g].max(v);
    }
    if count.contains(&0) {
        return Err(Error::degenerate("both classes must be present"));
    }
    let means = [sum[0] / count[0] as f64, sum[1] / count[1] as f64];
    let grand = values.iter().sum::<f64>() / n as f64;
    let ss_between: f64 = (0..2)
        .map(|g| count[g] as f64 * (means[g] - grand).powi(2))
        .sum();
    let constant_groups = (0..2).all(|g| min[g] == max[g]);
    if constant_groups {
        return if min[0] == min[1] {
            Err(Error::degenerate(
                "zero variance within and between groups",
            ))
        } else {
            Ok(AnovaF::PerfectSeparation)
        };
    }
    let ss_within: f64 = values
        .iter()
        .zip(labels)
        .map(|(&v, &l)| (v - means[l.index()]).powi(2))
        .sum();
    let (df_between, df_within) = (1.0, (n - 2) as f64);
    Ok(AnovaF::Value((ss_between / df_between) / (ss_within / df_within)))
}

/// Per-feature outcome of a scorer.
#[derive(Clone, Debug, PartialEq)]
pub enum Score {
    Value(f64),
    PerfectSeparation,
    Failed(String),
}

impl Score {
    /// Sort key: perfect separation first, failures last.
    fn key(&self) -> f64 {
        match self {
            Score::Value(v) => *v,
            Score::PerfectSeparation => f64::INFINITY,
            Score::Failed(_) => f64::NEG_INFINITY,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Score::Value(v) => Some(*v),
            Score::PerfectSeparation => Some(f64::INFINITY),
            Score::Failed(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureScore {
    pub feature: String,
    pub score: Score,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionReport {
    pub method: SelectionMethod,
    /// In the table's column order.
    pub scores: Vec<FeatureScore>,
    /// Feature names, best first. Ties keep column order.
    pub ranking: Vec<String>,
}

impl SelectionReport {
    pub fn score(&self, feature: &str) -> Option<&Score> {
        self.scores
            .iter()
            .find(|s| s.feature == feature)
            .map(|s| &s.score)
    }

    /// 1-based rank.
    pub fn rank(&self, feature: &str) -> Option<usize> {
        self.ranking.iter().position(|f| f == feature).map(|p| p + 1)
    }

    pub fn top(&self, k: usize) -> &[String] {
        &self.ranking[..k.min(self.ranking.len())]
    }

    /// `feature,score,rank`, best first.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e| Error::io("<report>", e);
        writeln!(w, "feature,score,rank").map_err(io)?;
        for (i, name) in self.ranking.iter().enumerate() {
            let score = match self.score(name) {
                Some(Score::Value(v)) => fmt_sig9(*v),
                Some(Score::PerfectSeparation) => "inf".to_string(),
                _ => "NaN".to_string(),
            };
            writeln!(w, "{name},{score},{}", i + 1).map_err(io)?;
        }
        Ok(())
    }
}

/// Scores every column against the label. Scorer failures on individual
/// columns are recorded as [`Score::Failed`] rather than aborting.
pub fn rank_features(table: &FeatureTable, method: SelectionMethod) -> Result<SelectionReport> {
    if table.is_empty() {
        return Err(Error::invalid("empty feature table"));
    }
    let (bee, nobee) = table.class_counts();
    if bee == 0 || nobee == 0 {
        return Err(Error::degenerate("both classes must be present"));
    }
    let labels = table.labels();
    let encoded: Vec<f64> = labels.iter().map(|l| l.as_f64()).collect();
    let scores: Vec<FeatureScore> = (0..table.n_features())
        .into_par_iter()
        .map(|j| {
            let column = table.column(j);
            let score = match method {
                SelectionMethod::KendallTau => match kendall_tau(&column, &encoded) {
                    Ok(t) => Score::Value(t),
                    Err(e) => Score::Failed(e.to_string()),
                },
                SelectionMethod::AnovaF => match anova_f(&column, &labels) {
                    Ok(AnovaF::Value(f)) => Score::Value(f),
                    Ok(AnovaF::PerfectSeparation) => Score::PerfectSeparation,
                    Err(e) => Score::Failed(e.to_string()),
                },
            };
            FeatureScore {
                feature: table.feature_names()[j].clone(),
                score,
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].score.key().total_cmp(&scores[a].score.key()));
    let ranking = order.iter().map(|&i| scores[i].feature.clone()).collect();
    Ok(SelectionReport {
        method,
        scores,
        ranking,
    })
}

/// Keeps the top `k` columns of `report`, in the table's original column
/// order (so `k = n_features` returns the table unchanged).
pub fn select_from_report(
    table: &FeatureTable,
    report: &SelectionReport,
    k: usize,
) -> Result<FeatureTable> {
    check_k(k, table.n_features())?;
    let keep: std::collections::HashSet<&str> = report.top(k).iter().map(String::as_str).collect();
    let names: Vec<&str> = table
        .feature_names()
        .iter()
        .map(String::as_str)
        .filter(|n| keep.contains(n))
        .collect();
    table.select_columns(&names)
}

pub fn select_k_best(
    table: &FeatureTable,
    k: usize,
    method: SelectionMethod,
) -> Result<FeatureTable> {
    check_k(k, table.n_features())?;
    let report = rank_features(table, method)?;
    select_from_report(table, &report, k)
}

fn check_k(k: usize, available: usize) -> Result<()> {
    if k == 0 || k > available {
        return Err(Error::invalid(format!("k = {k} must be in 1..={available}")));
    }
    Ok(())
}

/// Fixed preference order behind the default 26-feature set: the five
/// spectral/energy summaries and chroma, then cepstral coefficients in index
/// order. Its first 26 entries are the default training features.
pub fn preferred_feature_order() -> Vec<String> {
    [
        "spectral_bandwidth",
        "spectral_centroid",
        "rolloff",
        "zero_crossing_rate",
        "rmse",
        "chroma_stft",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain((1..=N_MFCC).map(|i| format!("mfcc{i}")))
    .collect()
}

/// The first `k` entries of [`preferred_feature_order`] present in `table`.
pub fn select_preferred(table: &FeatureTable, k: usize) -> Result<FeatureTable> {
    check_k(k, table.n_features())?;
    let names: Vec<String> = preferred_feature_order()
        .into_iter()
        .filter(|n| table.column_index(n).is_some())
        .take(k)
        .collect();
    if names.len() < k {
        return Err(Error::invalid(format!(
            "table only has {} of the preferred features",
            names.len()
        )));
    }
    table.select_columns(&names)
}
