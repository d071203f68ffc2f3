//! The batch experiment: ingest, perturb, extract, evaluate, analyze,
//! report. Each stage reads and writes files under the output directory and
//! records their hashes in `manifest.json`, so stages can run one at a time.

mod config;
mod manifest;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{
    CorpusSection, LexicalSection, ModelsSection, PerturbSection, PipelineConfig, WORDLIST_ENV,
};
pub use manifest::{Manifest, Stage, StageRecord, MANIFEST_FILE};

use crate::corpus::{group_folds, load_corpus, profile_corpus, Corpus, DatasetProfile, Document, ProfileConfig};
use crate::features::{FeatureGroup, FeatureTable, FeatureVector};
use crate::lexfeat::{extract_lexical, LexicalConfig};
use crate::models::{cross_validate, CVResult, ModelKind};
use crate::perturb::perturb_corpus;
use crate::report::{self, ReportBundle};
use crate::stats::{
    f1_delta, fit_importance, rank_deltas, rank_features, zscore_summary, ImportanceFit, RankDeltas, RankTable,
    ZScoreSummary,
};
use crate::synfeat::{extract_syntactic, syntactic_feature_names};
use crate::util::sha256_hex;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("stage {stage} failed: {message}")]
    Stage { stage: Stage, message: String },
    #[error("stage {stage}: stale input {artifact}: {reason}")]
    Stale { stage: Stage, artifact: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn stage(stage: Stage, e: impl std::fmt::Display) -> Self {
        PipelineError::Stage {
            stage,
            message: e.to_string(),
        }
    }
}

pub fn corpus_artifact(level: u8) -> String {
    format!("corpus/level_{level:03}.json")
}

pub fn features_artifact(level: u8) -> String {
    format!("features/level_{level:03}.json")
}

pub const PROFILE_ARTIFACT: &str = "profile.json";
pub const FOLDS_ARTIFACT: &str = "folds.json";
pub const CV_ARTIFACT: &str = "cv_results.json";
pub const ANALYSIS_ARTIFACT: &str = "analysis.json";
pub const BUNDLE_ARTIFACT: &str = "bundle.json";

/// Lexical and syntactic features of one document. Syntactic features are
/// absent when the document has no trees.
pub fn extract_features(doc: &Document, lexical: &LexicalConfig) -> Result<FeatureVector, String> {
    let mut v = extract_lexical(doc, lexical).map_err(|e| e.to_string())?;
    if doc.trees.is_some() {
        v.extend(extract_syntactic(doc).map_err(|e| e.to_string())?);
    } else {
        for name in syntactic_feature_names() {
            v.push(name, FeatureGroup::Syntactic, None);
        }
    }
    Ok(v)
}

/// Feature table of a corpus, one row per document in corpus order.
pub fn extract_table(corpus: &Corpus, level: u8, lexical: &LexicalConfig) -> Result<FeatureTable, String> {
    let rows = corpus
        .documents
        .par_iter()
        .map(|d| extract_features(d, lexical).map(|v| (d.id.clone(), corpus.class_of(d), v)))
        .collect::<Result<Vec<_>, _>>()?;
    FeatureTable::from_vectors(level, rows).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F1DeltaRow {
    pub model: ModelKind,
    pub alteration_level: u8,
    pub f1: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub model: ModelKind,
    pub fit: Option<ImportanceFit>,
    /// Why no fit was produced.
    pub error: Option<String>,
}

/// Everything the analyze stage computes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub zscores: ZScoreSummary,
    pub f1_deltas: Vec<F1DeltaRow>,
    pub importance: Vec<ImportanceRow>,
    pub ranks: Vec<RankTable>,
    pub rank_deltas: Vec<RankDeltas>,
}

/// ΔF1 per model and level, and the importance fit per model.
pub fn f1_analysis(cv: &[CVResult], zscores: &ZScoreSummary) -> (Vec<F1DeltaRow>, Vec<ImportanceRow>) {
    let mut by_model: BTreeMap<ModelKind, BTreeMap<u8, Option<f64>>> = BTreeMap::new();
    for r in cv {
        by_model.entry(r.model.kind()).or_default().insert(r.alteration_level, r.mean_f1);
    }
    let mut deltas = Vec::new();
    let mut importance = Vec::new();
    for (model, levels) in by_model {
        let base = levels.get(&0).copied().flatten();
        let mut points = BTreeMap::new();
        for (&level, &f1) in &levels {
            let delta = match (f1, base) {
                (Some(a), Some(b)) => Some(f1_delta(a, b)),
                _ => None,
            };
            if let (Some(d), true) = (delta, level != 0) {
                points.insert(level, d);
            }
            deltas.push(F1DeltaRow {
                model,
                alteration_level: level,
                f1,
                delta,
            });
        }
        let row = match fit_importance(&points, zscores) {
            Ok(fit) => ImportanceRow {
                model,
                fit: Some(fit),
                error: None,
            },
            Err(e) => {
                log::warn!("importance fit for {model}: {e}");
                ImportanceRow {
                    model,
                    fit: None,
                    error: Some(e.to_string()),
                }
            }
        };
        importance.push(row);
    }
    (deltas, importance)
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<String, PipelineError> {
    let path = out.join(name);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    }
    let text = serde_json::to_string_pretty(value).expect("artifacts serialize") + "\n";
    std::fs::write(&path, &text).map_err(|e| PipelineError::io(&path, e))?;
    Ok(sha256_hex(text.as_bytes()))
}

fn read_json<T: DeserializeOwned>(out: &Path, name: &str, stage: Stage) -> Result<T, PipelineError> {
    let path = out.join(name);
    let text = std::fs::read_to_string(&path).map_err(|e| PipelineError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::stage(stage, format!("{name}: {e}")))
}

/// Runs stages against one output directory.
pub struct Runner {
    pub config: PipelineConfig,
    pub out: PathBuf,
}

impl Runner {
    pub fn new(config: PipelineConfig) -> Self {
        let out = config.out_dir();
        Runner { config, out }
    }

    fn config_sha(&self) -> String {
        sha256_hex(self.config.canonical().as_bytes())
    }

    fn levels(&self) -> Vec<u8> {
        std::iter::once(0).chain(self.config.perturb.levels.iter().copied()).collect()
    }

    /// The manifest of this run, checked against the current configuration.
    fn manifest_for(&self, stage: Stage) -> Result<Manifest, PipelineError> {
        let m = Manifest::load(&self.out)?.ok_or_else(|| PipelineError::Stale {
            stage,
            artifact: MANIFEST_FILE.into(),
            reason: "no manifest; run ingest first".into(),
        })?;
        if m.config_sha256 != self.config_sha() {
            return Err(PipelineError::Stale {
                stage,
                artifact: MANIFEST_FILE.into(),
                reason: "the configuration changed since ingest".into(),
            });
        }
        Ok(m)
    }

    fn decisions(&self) -> BTreeMap<String, String> {
        let c = &self.config;
        let z = c.zscore;
        let mut d = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            d.insert(k.to_string(), v);
        };
        put("deletion_count", "round half up of p*n/100, capped at n-1".into());
        put("deletion_seed", "per document from (seed, document id, level)".into());
        put("tree_strategy", c.perturb.tree_strategy.clone());
        put("lexicon_complexity", c.lexical.lexicon_complexity.clone());
        put("sophistication", "surface form outside the top-ranked word list entries, no lemmatization".into());
        put("z_reference", format!("{:?}", z.reference));
        put("z_aggregation", format!("{:?}", z.aggregation));
        put("z_order", format!("{:?}", z.order));
        put("z_sigma", "population".into());
        put("imputation", "absent values take the training-fold mean".into());
        put("standardization", "training-fold mean and population sd; svm and mlp only".into());
        put("smote_k", "min(5, minority - 1)".into());
        put(
            "svm_gamma",
            c.models
                .svm_gamma
                .map_or("1 / (features * mean feature variance)".into(), |g| g.to_string()),
        );
        put("mlp_batch", "full batch".into());
        put("skipped_folds", "excluded from the mean".into());
        put("significance_alpha", c.alpha.to_string());
        put("fold_assignment", "greedy by subject, smallest fold first".into());
        d
    }

    /// Reads and profiles the corpus and starts a new manifest.
    pub fn ingest(&self) -> Result<(), PipelineError> {
        let stage = Stage::Ingest;
        self.config.validate()?;
        std::fs::create_dir_all(&self.out).map_err(|e| PipelineError::io(&self.out, e))?;
        let path = self.config.corpus_path();
        let corpus_sha = manifest::file_sha(&path)?;
        let format = self.config.corpus_format()?;
        let mut corpus = load_corpus(&path, format).map_err(|e| PipelineError::stage(stage, e))?;
        corpus.name = self.config.corpus_name();
        let profile = profile_corpus(
            &corpus,
            &ProfileConfig {
                lexicon_complexity: self.config.lexicon_complexity()?,
            },
        )
        .map_err(|e| PipelineError::stage(stage, e))?;
        let folds = group_folds(&corpus, self.config.folds, self.config.seed).map_err(|e| PipelineError::stage(stage, e))?;

        let mut record = StageRecord::default();
        record.outputs.insert(corpus_artifact(0), write_json(&self.out, &corpus_artifact(0), &corpus)?);
        record.outputs.insert(PROFILE_ARTIFACT.into(), write_json(&self.out, PROFILE_ARTIFACT, &profile)?);
        record.outputs.insert(FOLDS_ARTIFACT.into(), write_json(&self.out, FOLDS_ARTIFACT, &folds)?);
        let mut m = Manifest {
            tool: "lexsyn".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_sha256: self.config_sha(),
            corpus_sha256: corpus_sha,
            seed: self.config.seed,
            decisions: self.decisions(),
            stages: BTreeMap::new(),
        };
        m.record(stage, record);
        m.save(&self.out)
    }

    pub fn perturb(&self) -> Result<(), PipelineError> {
        let stage = Stage::Perturb;
        let mut m = self.manifest_for(stage)?;
        let inputs = m.check_inputs(&self.out, stage, &[corpus_artifact(0)])?;
        let corpus: Corpus = read_json(&self.out, &corpus_artifact(0), stage)?;
        let altered = perturb_corpus(&corpus, &self.config.plan()?).map_err(|e| PipelineError::stage(stage, e))?;
        let mut record = StageRecord {
            inputs,
            ..StageRecord::default()
        };
        for (level, c) in &altered {
            let name = corpus_artifact(*level);
            record.outputs.insert(name.clone(), write_json(&self.out, &name, c)?);
        }
        m.record(stage, record);
        m.save(&self.out)
    }

    pub fn extract(&self) -> Result<(), PipelineError> {
        let stage = Stage::Extract;
        let mut m = self.manifest_for(stage)?;
        let names: Vec<String> = self.levels().into_iter().map(corpus_artifact).collect();
        let inputs = m.check_inputs(&self.out, stage, &names)?;
        let lexical = self.config.lexical_config()?;
        let mut record = StageRecord {
            inputs,
            ..StageRecord::default()
        };
        for level in self.levels() {
            let corpus: Corpus = read_json(&self.out, &corpus_artifact(level), stage)?;
            let table = extract_table(&corpus, level, &lexical).map_err(|e| PipelineError::stage(stage, e))?;
            let name = features_artifact(level);
            record.outputs.insert(name.clone(), write_json(&self.out, &name, &table)?);
        }
        m.record(stage, record);
        m.save(&self.out)
    }

    pub fn evaluate(&self) -> Result<(), PipelineError> {
        let stage = Stage::Evaluate;
        let mut m = self.manifest_for(stage)?;
        let mut names: Vec<String> = self.levels().into_iter().map(features_artifact).collect();
        names.push(FOLDS_ARTIFACT.into());
        let inputs = m.check_inputs(&self.out, stage, &names)?;
        let folds = read_json(&self.out, FOLDS_ARTIFACT, stage)?;
        let specs = self.config.model_specs()?;
        let mut results = Vec::new();
        for level in self.levels() {
            let table: FeatureTable = read_json(&self.out, &features_artifact(level), stage)?;
            for spec in &specs {
                log::info!("cross-validating {} at level {level}", spec.kind());
                let r = cross_validate(&table, &folds, spec).map_err(|e| PipelineError::stage(stage, format!("{} at level {level}: {e}", spec.kind())))?;
                results.push(r);
            }
        }
        let record = StageRecord {
            inputs,
            outputs: [(CV_ARTIFACT.to_string(), write_json(&self.out, CV_ARTIFACT, &results)?)].into(),
        };
        m.record(stage, record);
        m.save(&self.out)
    }

    pub fn analyze(&self) -> Result<(), PipelineError> {
        let stage = Stage::Analyze;
        let mut m = self.manifest_for(stage)?;
        let mut names: Vec<String> = self.levels().into_iter().map(features_artifact).collect();
        names.push(CV_ARTIFACT.into());
        let inputs = m.check_inputs(&self.out, stage, &names)?;
        let mut tables = BTreeMap::new();
        for level in self.levels() {
            let t: FeatureTable = read_json(&self.out, &features_artifact(level), stage)?;
            tables.insert(level, t);
        }
        let cv: Vec<CVResult> = read_json(&self.out, CV_ARTIFACT, stage)?;
        let baseline = &tables[&0];
        let zscores = zscore_summary(baseline, &tables, self.config.zscore).map_err(|e| PipelineError::stage(stage, e))?;
        let (f1_deltas, importance) = f1_analysis(&cv, &zscores);
        let ranks = tables
            .values()
            .map(|t| rank_features(t, self.config.alpha))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| PipelineError::stage(stage, e))?;
        let rank_deltas = ranks[1..]
            .iter()
            .map(|r| rank_deltas(&ranks[0], r))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| PipelineError::stage(stage, e))?;
        let analysis = Analysis {
            zscores,
            f1_deltas,
            importance,
            ranks,
            rank_deltas,
        };
        let record = StageRecord {
            inputs,
            outputs: [(ANALYSIS_ARTIFACT.to_string(), write_json(&self.out, ANALYSIS_ARTIFACT, &analysis)?)].into(),
        };
        m.record(stage, record);
        m.save(&self.out)
    }

    /// Writes the bundle, the CSV tables and the plots.
    pub fn report(&self) -> Result<ReportBundle, PipelineError> {
        let stage = Stage::Report;
        let mut m = self.manifest_for(stage)?;
        let names = vec![
            PROFILE_ARTIFACT.to_string(),
            CV_ARTIFACT.to_string(),
            ANALYSIS_ARTIFACT.to_string(),
        ];
        let inputs = m.check_inputs(&self.out, stage, &names)?;
        let profile: DatasetProfile = read_json(&self.out, PROFILE_ARTIFACT, stage)?;
        let cv: Vec<CVResult> = read_json(&self.out, CV_ARTIFACT, stage)?;
        let analysis: Analysis = read_json(&self.out, ANALYSIS_ARTIFACT, stage)?;
        // The bundle carries the manifest as it stood before this stage.
        m.stages.retain(|s, _| *s < stage);
        let bundle = ReportBundle::assemble(profile, cv, analysis, m.clone());
        let mut record = StageRecord {
            inputs,
            ..StageRecord::default()
        };
        record.outputs.insert(BUNDLE_ARTIFACT.into(), write_json(&self.out, BUNDLE_ARTIFACT, &bundle)?);
        for (name, hash) in report::write_tables(&bundle, &self.out).map_err(|e| PipelineError::stage(stage, e))? {
            record.outputs.insert(name, hash);
        }
        for (name, hash) in report::emit_plots(&bundle, &self.out.join("plots")).map_err(|e| PipelineError::stage(stage, e))? {
            record.outputs.insert(format!("plots/{name}"), hash);
        }
        m.record(stage, record);
        m.save(&self.out)?;
        Ok(bundle)
    }

    pub fn run_stage(&self, stage: Stage) -> Result<(), PipelineError> {
        match stage {
            Stage::Ingest => self.ingest(),
            Stage::Perturb => self.perturb(),
            Stage::Extract => self.extract(),
            Stage::Evaluate => self.evaluate(),
            Stage::Analyze => self.analyze(),
            Stage::Report => self.report().map(|_| ()),
        }
    }
}

/// Runs every stage in order. Artifacts of completed stages stay on disk
/// when a later stage fails.
pub fn run_pipeline(config: &PipelineConfig) -> Result<ReportBundle, PipelineError> {
    let runner = Runner::new(config.clone());
    for stage in &Stage::ALL[..5] {
        log::info!("stage {stage}");
        runner.run_stage(*stage)?;
    }
    log::info!("stage report");
    runner.report()
}
