//! Feature vulnerability statistics: z-scored change under alteration,
//! F1 deltas, the importance regression, and Kruskal-Wallis ranking.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::features::{FeatureGroup, FeatureTable};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("feature tables do not match: {0}")]
    Mismatch(String),
    #[error("no usable {0} features")]
    EmptyGroup(FeatureGroup),
    #[error("degenerate regression design: {0}")]
    Degenerate(String),
    #[error("need at least {need} {what}, got {got}")]
    TooFew { what: &'static str, need: usize, got: usize },
}

/// How per-feature z values are combined into a group score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Mean of |z|.
    #[default]
    Absolute,
    Signed,
}

/// Order of averaging over features and documents.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AveragingOrder {
    /// Mean over the group's features within each document, then over
    /// documents.
    #[default]
    FeatureThenDocument,
    /// One mean over every (document, feature) value.
    Pooled,
}

/// What an altered value is compared with.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZReference {
    /// The same document's original value: `(x_altered − x_original) / σ`.
    /// Zero at level 0 for every document.
    #[default]
    OriginalDocument,
    /// The mean over the original table: `(x_altered − μ) / σ`.
    DatasetMean,
}

/// Settings for turning feature tables into group scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZOptions {
    pub reference: ZReference,
    pub aggregation: Aggregation,
    pub order: AveragingOrder,
}

/// Per-document, per-feature z values of an altered table against the
/// original one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureZScores {
    pub alteration_level: u8,
    pub feature_names: Vec<String>,
    pub groups: Vec<FeatureGroup>,
    pub doc_ids: Vec<String>,
    /// `z[doc][feature]`; absent when the altered value is absent.
    pub z: Vec<Vec<Option<f64>>>,
    /// Features left out because their original values have zero (or no)
    /// spread.
    pub excluded: Vec<String>,
}

fn population_moments(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mu = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n;
    Some((mu, var.sqrt()))
}

fn check_same_layout(a: &FeatureTable, b: &FeatureTable) -> Result<(), StatsError> {
    if a.feature_names != b.feature_names {
        return Err(StatsError::Mismatch("feature names differ".into()));
    }
    if a.doc_ids != b.doc_ids {
        return Err(StatsError::Mismatch("document ids differ".into()));
    }
    Ok(())
}

/// `z = (x_altered − μ_original) / σ_original`, with the population mean and
/// standard deviation of each feature over the whole original table.
pub fn feature_zscores(baseline: &FeatureTable, altered: &FeatureTable) -> Result<FeatureZScores, StatsError> {
    feature_zscores_with(baseline, altered, ZReference::DatasetMean)
}

/// Like [`feature_zscores`], with a choice of reference value. σ is always
/// the population standard deviation over the original table.
pub fn feature_zscores_with(
    baseline: &FeatureTable,
    altered: &FeatureTable,
    reference: ZReference,
) -> Result<FeatureZScores, StatsError> {
    check_same_layout(baseline, altered)?;
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for (j, name) in baseline.feature_names.iter().enumerate() {
        let values: Vec<f64> = baseline.column(j).flatten().collect();
        match population_moments(&values) {
            Some((mu, sd)) if sd > 0.0 => kept.push((j, mu, sd)),
            _ => excluded.push(name.clone()),
        }
    }
    if !excluded.is_empty() {
        log::debug!("z-scores: excluded {} feature(s) with zero spread", excluded.len());
    }
    Ok(FeatureZScores {
        alteration_level: altered.alteration_level,
        feature_names: kept.iter().map(|&(j, _, _)| baseline.feature_names[j].clone()).collect(),
        groups: kept.iter().map(|&(j, _, _)| baseline.groups[j]).collect(),
        doc_ids: altered.doc_ids.clone(),
        z: altered
            .rows
            .iter()
            .zip(&baseline.rows)
            .map(|(r, b)| {
                kept.iter()
                    .map(|&(j, mu, sd)| {
                        let centre = match reference {
                            ZReference::DatasetMean => Some(mu),
                            ZReference::OriginalDocument => b[j],
                        };
                        Some((r[j]? - centre?) / sd)
                    })
                    .collect()
            })
            .collect(),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupZ {
    pub alteration_level: u8,
    pub z_lexical: f64,
    pub z_syntactic: f64,
    /// Features that entered each group score.
    pub n_lexical: usize,
    pub n_syntactic: usize,
}

impl GroupZ {
    pub fn get(&self, group: FeatureGroup) -> f64 {
        match group {
            FeatureGroup::Lexical => self.z_lexical,
            FeatureGroup::Syntactic => self.z_syntactic,
        }
    }
}

fn group_score(z: &FeatureZScores, group: FeatureGroup, agg: Aggregation, order: AveragingOrder) -> Result<(f64, usize), StatsError> {
    let cols: Vec<usize> = (0..z.groups.len()).filter(|&j| z.groups[j] == group).collect();
    if cols.is_empty() {
        return Err(StatsError::EmptyGroup(group));
    }
    let f = |v: f64| match agg {
        Aggregation::Absolute => v.abs(),
        Aggregation::Signed => v,
    };
    let mean = |xs: &[f64]| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    let score = match order {
        AveragingOrder::FeatureThenDocument => {
            let per_doc: Vec<f64> = z
                .z
                .iter()
                .filter_map(|row| mean(&cols.iter().filter_map(|&j| row[j]).map(f).collect::<Vec<_>>()))
                .collect();
            mean(&per_doc)
        }
        AveragingOrder::Pooled => {
            let all: Vec<f64> = z.z.iter().flat_map(|row| cols.iter().filter_map(|&j| row[j]).map(f)).collect();
            mean(&all)
        }
    };
    Ok((score.ok_or(StatsError::EmptyGroup(group))?, cols.len()))
}

/// Lexical and syntactic group scores at one alteration level.
pub fn group_zscore(z: &FeatureZScores, agg: Aggregation, order: AveragingOrder) -> Result<GroupZ, StatsError> {
    let (z_lexical, n_lexical) = group_score(z, FeatureGroup::Lexical, agg, order)?;
    let (z_syntactic, n_syntactic) = group_score(z, FeatureGroup::Syntactic, agg, order)?;
    Ok(GroupZ {
        alteration_level: z.alteration_level,
        z_lexical,
        z_syntactic,
        n_lexical,
        n_syntactic,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScoreSummary {
    pub options: ZOptions,
    /// One row per level, starting with level 0.
    pub levels: Vec<GroupZ>,
    pub feature_z: Vec<FeatureZScores>,
}

impl ZScoreSummary {
    pub fn level(&self, level: u8) -> Option<&GroupZ> {
        self.levels.iter().find(|g| g.alteration_level == level)
    }
}

/// Group scores for the original table (level 0) and every altered one.
/// Level 0 is computed like the others: exactly 0 with the per-document
/// reference, the spread of the original data with the dataset mean and
/// absolute aggregation.
pub fn zscore_summary(
    baseline: &FeatureTable,
    altered: &BTreeMap<u8, FeatureTable>,
    options: ZOptions,
) -> Result<ZScoreSummary, StatsError> {
    let mut levels = Vec::new();
    let mut feature_z = Vec::new();
    let tables = std::iter::once(baseline).chain(altered.values().filter(|t| t.alteration_level != 0));
    for table in tables {
        let z = feature_zscores_with(baseline, table, options.reference)?;
        levels.push(group_zscore(&z, options.aggregation, options.order)?);
        if table.alteration_level != 0 {
            feature_z.push(z);
        }
    }
    Ok(ZScoreSummary {
        options,
        levels,
        feature_z,
    })
}

/// `F1_altered − F1_original`.
pub fn f1_delta(f1_altered: f64, f1_baseline: f64) -> f64 {
    f1_altered - f1_baseline
}

/// Least-squares fit of `ΔF1 = α·Z_syntactic + β·Z_lexical`, no intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceFit {
    pub alpha: f64,
    pub beta: f64,
    /// `α / β`; absent when β is 0.
    pub ratio: Option<f64>,
    pub levels: Vec<u8>,
    pub residuals: Vec<f64>,
    /// α and β have opposite signs, so the ratio is negative.
    pub sign_disagreement: bool,
}

/// Smallest accepted ratio of the design's eigenvalues.
const CONDITION_FLOOR: f64 = 1e-12;

/// Fits α and β from one point per altered level: `deltas[x]` against
/// `(Z_syntactic^x, Z_lexical^x)`. Level 0 is ignored.
pub fn fit_importance(deltas: &BTreeMap<u8, f64>, summary: &ZScoreSummary) -> Result<ImportanceFit, StatsError> {
    let mut levels = Vec::new();
    let mut pts = Vec::new();
    for (&level, &d) in deltas.iter().filter(|(&l, _)| l != 0) {
        let g = summary
            .level(level)
            .ok_or_else(|| StatsError::Mismatch(format!("no z summary for level {level}")))?;
        levels.push(level);
        pts.push((d, g.z_syntactic, g.z_lexical));
    }
    if pts.len() < 2 {
        return Err(StatsError::TooFew {
            what: "alteration levels",
            need: 2,
            got: pts.len(),
        });
    }
    let (mut ss, mut sl, mut ll, mut sd, mut ld) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(d, s, l) in &pts {
        ss += s * s;
        sl += s * l;
        ll += l * l;
        sd += s * d;
        ld += l * d;
    }
    // Eigenvalues of the symmetric 2×2 normal matrix.
    let tr = ss + ll;
    let det = ss * ll - sl * sl;
    let disc = ((ss - ll).powi(2) + 4.0 * sl * sl).sqrt();
    let (lmax, lmin) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
    if lmax <= 0.0 || lmin / lmax < CONDITION_FLOOR {
        return Err(StatsError::Degenerate(format!(
            "Z_syntactic and Z_lexical are collinear or zero across levels {levels:?}"
        )));
    }
    let alpha = (ll * sd - sl * ld) / det;
    let beta = (ss * ld - sl * sd) / det;
    let residuals = pts.iter().map(|&(d, s, l)| d - alpha * s - beta * l).collect();
    let sign_disagreement = alpha * beta < 0.0;
    if sign_disagreement {
        log::warn!("importance fit: alpha {alpha:.4} and beta {beta:.4} have opposite signs");
    }
    Ok(ImportanceFit {
        alpha,
        beta,
        ratio: (beta != 0.0).then(|| alpha / beta),
        levels,
        residuals,
        sign_disagreement,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallis {
    pub h: f64,
    pub p: f64,
}

/// Mid-ranks (1-based) of the values, ties sharing their average rank.
fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    (ranks, tie_term)
}

/// Kruskal-Wallis H with tie correction for two groups; p from the
/// chi-square distribution with one degree of freedom.
pub fn kruskal_wallis(a: &[f64], b: &[f64]) -> Result<KruskalWallis, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::TooFew {
            what: "values per group",
            need: 1,
            got: a.len().min(b.len()),
        });
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len() as f64;
    let (ranks, tie_term) = midranks(&pooled);
    let correction = 1.0 - tie_term / (n * n * n - n);
    if correction <= 0.0 {
        return Ok(KruskalWallis { h: 0.0, p: 1.0 });
    }
    let centre = (n + 1.0) / 2.0;
    let term = |r: &[f64]| {
        let m = r.len() as f64;
        m * (r.iter().sum::<f64>() / m - centre).powi(2)
    };
    let h = 12.0 / (n * (n + 1.0)) * (term(&ranks[..a.len()]) + term(&ranks[a.len()..])) / correction;
    let chi = ChiSquared::new(1.0).expect("one degree of freedom");
    Ok(KruskalWallis { h, p: chi.sf(h) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub feature: String,
    pub group: FeatureGroup,
    pub h: f64,
    pub p: f64,
    /// 1 is the smallest p.
    pub rank: usize,
    pub significant: bool,
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub alteration_level: u8,
    pub alpha: f64,
    /// In rank order.
    pub rows: Vec<RankRow>,
}

impl RankTable {
    pub fn row(&self, feature: &str) -> Option<&RankRow> {
        self.rows.iter().find(|r| r.feature == feature)
    }
}

/// Ranks every feature by the p-value of a Kruskal-Wallis test between the
/// two classes. Constant features get p = 1 and go last; ties are broken
/// by feature name.
pub fn rank_features(table: &FeatureTable, alpha: f64) -> Result<RankTable, StatsError> {
    let counts = table.labels.iter().fold([0usize; 2], |mut c, &l| {
        c[l.min(1)] += 1;
        c
    });
    if counts[0] < 2 || counts[1] < 2 {
        return Err(StatsError::TooFew {
            what: "documents per class",
            need: 2,
            got: counts[0].min(counts[1]),
        });
    }
    let mut rows: Vec<RankRow> = (0..table.n_features())
        .into_par_iter()
        .map(|j| {
            let mut groups: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
            for (v, &l) in table.column(j).zip(&table.labels) {
                if let Some(v) = v {
                    groups[l].push(v);
                }
            }
            let first = groups[0].first().or(groups[1].first()).copied();
            let constant = groups.iter().flatten().all(|&v| Some(v) == first);
            let kw = if constant {
                KruskalWallis { h: 0.0, p: 1.0 }
            } else {
                kruskal_wallis(&groups[0], &groups[1]).unwrap_or(KruskalWallis { h: 0.0, p: 1.0 })
            };
            RankRow {
                feature: table.feature_names[j].clone(),
                group: table.groups[j],
                h: kw.h,
                p: kw.p,
                rank: 0,
                significant: kw.p < alpha,
                constant,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.constant
            .cmp(&b.constant)
            .then(a.p.total_cmp(&b.p))
            .then_with(|| a.feature.cmp(&b.feature))
    });
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(RankTable {
        alteration_level: table.alteration_level,
        alpha,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDelta {
    pub feature: String,
    pub group: FeatureGroup,
    pub baseline_rank: usize,
    pub altered_rank: usize,
    /// `baseline_rank − altered_rank`; positive means the feature moved up.
    pub delta: i64,
    pub baseline_significant: bool,
    pub altered_significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRankSummary {
    pub group: FeatureGroup,
    /// Largest upward move among baseline-significant features.
    pub max_rank_increase: Option<i64>,
    /// Share of baseline-significant features that are no longer
    /// significant.
    pub became_insignificant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDeltas {
    pub alteration_level: u8,
    /// In baseline rank order.
    pub rows: Vec<RankDelta>,
    pub summary: Vec<GroupRankSummary>,
}

pub fn rank_deltas(baseline: &RankTable, altered: &RankTable) -> Result<RankDeltas, StatsError> {
    if baseline.rows.len() != altered.rows.len() {
        return Err(StatsError::Mismatch(format!(
            "{} baseline features vs {} altered",
            baseline.rows.len(),
            altered.rows.len()
        )));
    }
    let mut rows = Vec::with_capacity(baseline.rows.len());
    for b in &baseline.rows {
        let a = altered
            .row(&b.feature)
            .ok_or_else(|| StatsError::Mismatch(format!("feature {} missing from altered ranks", b.feature)))?;
        rows.push(RankDelta {
            feature: b.feature.clone(),
            group: b.group,
            baseline_rank: b.rank,
            altered_rank: a.rank,
            delta: b.rank as i64 - a.rank as i64,
            baseline_significant: b.significant,
            altered_significant: a.significant,
        });
    }
    let summary = [FeatureGroup::Lexical, FeatureGroup::Syntactic]
        .into_iter()
        .map(|group| {
            let sig: Vec<&RankDelta> = rows.iter().filter(|r| r.group == group && r.baseline_significant).collect();
            GroupRankSummary {
                group,
                max_rank_increase: sig.iter().map(|r| r.delta).max(),
                became_insignificant: (!sig.is_empty())
                    .then(|| sig.iter().filter(|r| !r.altered_significant).count() as f64 / sig.len() as f64),
            }
        })
        .collect();
    Ok(RankDeltas {
        alteration_level: altered.alteration_level,
        rows,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureVector;

    fn table(level: u8, rows: &[(f64, f64)]) -> FeatureTable {
        let docs = rows
            .iter()
            .enumerate()
            .map(|(i, &(lex, syn))| {
                let mut v = FeatureVector::new();
                v.push("lex", FeatureGroup::Lexical, Some(lex));
                v.push("syn", FeatureGroup::Syntactic, Some(syn));
                (format!("d{i}"), i % 2, v)
            })
            .collect();
        FeatureTable::from_vectors(level, docs).unwrap()
    }

    #[test]
    fn zscores_against_hand_table() {
        // lex: mean 2, population sd sqrt(2/3).
        let base = table(0, &[(1.0, 5.0), (2.0, 5.0), (3.0, 6.0)]);
        let alt = table(20, &[(2.0, 5.0), (2.0 + 2.0 * (2.0f64 / 3.0).sqrt(), 4.0), (0.0, 6.0)]);
        let z = feature_zscores(&base, &alt).unwrap();
        let sd = (2.0f64 / 3.0).sqrt();
        assert_eq!(z.z[0][0], Some(0.0));
        assert!((z.z[1][0].unwrap() - 2.0).abs() < 1e-12);
        assert!((z.z[2][0].unwrap() + 2.0 / sd).abs() < 1e-12);
        // syn: mean 16/3, sd sqrt(2/9).
        let (mu, sd) = (16.0 / 3.0, (2.0f64 / 9.0).sqrt());
        assert!((z.z[1][1].unwrap() - (4.0 - mu) / sd).abs() < 1e-12);
    }

    #[test]
    fn constant_feature_is_excluded() {
        let base = table(0, &[(1.0, 5.0), (2.0, 5.0)]);
        let z = feature_zscores(&base, &base).unwrap();
        assert_eq!(z.excluded, vec!["syn"]);
        assert!(matches!(
            group_zscore(&z, Aggregation::Absolute, AveragingOrder::default()),
            Err(StatsError::EmptyGroup(FeatureGroup::Syntactic))
        ));
    }

    #[test]
    fn group_means() {
        let z = FeatureZScores {
            alteration_level: 40,
            feature_names: vec!["a".into(), "b".into(), "c".into()],
            groups: vec![FeatureGroup::Lexical, FeatureGroup::Lexical, FeatureGroup::Syntactic],
            doc_ids: vec!["x".into(), "y".into()],
            z: vec![vec![Some(2.0), Some(-2.0), Some(1.0)], vec![Some(-2.0), Some(2.0), Some(-1.0)]],
            excluded: vec![],
        };
        let g = group_zscore(&z, Aggregation::Absolute, AveragingOrder::FeatureThenDocument).unwrap();
        assert_eq!((g.z_lexical, g.z_syntactic), (2.0, 1.0));
        let s = group_zscore(&z, Aggregation::Signed, AveragingOrder::Pooled).unwrap();
        assert_eq!((s.z_lexical, s.z_syntactic), (0.0, 0.0));
    }

    #[test]
    fn level_zero_is_zero() {
        let base = table(0, &[(1.0, 5.0), (2.0, 7.0), (4.0, 6.0)]);
        let mut alt = BTreeMap::new();
        alt.insert(20, table(20, &[(1.0, 4.0), (1.0, 7.0), (3.0, 6.0)]));
        let s = zscore_summary(&base, &alt, ZOptions::default()).unwrap();
        assert_eq!(s.levels[0].z_lexical, 0.0);
        assert_eq!(s.levels[0].z_syntactic, 0.0);
        assert!(s.level(20).unwrap().z_lexical > 0.0);
        // Against the dataset mean the original data keep their spread.
        let opts = ZOptions {
            reference: ZReference::DatasetMean,
            ..ZOptions::default()
        };
        let s = zscore_summary(&base, &alt, opts).unwrap();
        assert!(s.levels[0].z_lexical > 0.0);
        let signed = ZOptions {
            aggregation: Aggregation::Signed,
            ..opts
        };
        assert!(zscore_summary(&base, &alt, signed).unwrap().levels[0].z_lexical.abs() < 1e-12);
    }

    fn summary(points: &[(u8, f64, f64)]) -> ZScoreSummary {
        ZScoreSummary {
            options: ZOptions::default(),
            levels: points
                .iter()
                .map(|&(l, s, x)| GroupZ {
                    alteration_level: l,
                    z_lexical: x,
                    z_syntactic: s,
                    n_lexical: 1,
                    n_syntactic: 1,
                })
                .collect(),
            feature_z: vec![],
        }
    }

    #[test]
    fn collinear_design_is_refused() {
        let s = summary(&[(20, 0.1, 0.2), (40, 0.2, 0.4), (60, 0.3, 0.6)]);
        let d: BTreeMap<u8, f64> = [(20, -0.1), (40, -0.2), (60, -0.3)].into_iter().collect();
        assert!(matches!(fit_importance(&d, &s), Err(StatsError::Degenerate(_))));
        let zero = summary(&[(20, 0.1, 0.0), (40, 0.2, 0.0)]);
        assert!(fit_importance(&d, &zero).is_err());
    }

    #[test]
    fn kruskal_wallis_edge_cases() {
        let same = kruskal_wallis(&[2.0, 2.0], &[2.0]).unwrap();
        assert_eq!((same.h, same.p), (0.0, 1.0));
        assert!(kruskal_wallis(&[], &[1.0]).is_err());
        // Identical groups.
        let kw = kruskal_wallis(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!(kw.h.abs() < 1e-12 && (kw.p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ranks_break_ties_by_name() {
        let mut docs = Vec::new();
        for i in 0..8 {
            let mut v = FeatureVector::new();
            let l = i % 2;
            v.push("b_sep", FeatureGroup::Lexical, Some(l as f64 * 10.0 + i as f64 * 0.1));
            v.push("a_sep", FeatureGroup::Lexical, Some(l as f64 * 10.0 + i as f64 * 0.1));
            v.push("const", FeatureGroup::Syntactic, Some(1.0));
            docs.push((format!("d{i}"), l, v));
        }
        let t = FeatureTable::from_vectors(0, docs).unwrap();
        let r = rank_features(&t, 0.05).unwrap();
        let names: Vec<&str> = r.rows.iter().map(|r| r.feature.as_str()).collect();
        assert_eq!(names, vec!["a_sep", "b_sep", "const"]);
        assert!(r.rows[0].significant && !r.rows[2].significant);
        assert_eq!(r.rows[2].p, 1.0);
    }

    #[test]
    fn rank_delta_sign() {
        let row = |f: &str, rank, sig| RankRow {
            feature: f.into(),
            group: FeatureGroup::Lexical,
            h: 0.0,
            p: 0.0,
            rank,
            significant: sig,
            constant: false,
        };
        let base = RankTable { alteration_level: 0, alpha: 0.05, rows: vec![row("x", 10, true), row("y", 3, true)] };
        let alt = RankTable { alteration_level: 20, alpha: 0.05, rows: vec![row("x", 3, true), row("y", 10, false)] };
        let d = rank_deltas(&base, &alt).unwrap();
        assert_eq!(d.rows[0].delta, 7);
        assert_eq!(d.rows[1].delta, -7);
        assert_eq!(d.summary[0].max_rank_increase, Some(7));
        assert_eq!(d.summary[0].became_insignificant, Some(0.5));
        assert_eq!(d.summary[1].max_rank_increase, None);
        assert!(rank_deltas(&base, &base).unwrap().rows.iter().all(|r| r.delta == 0));
    }
}
