use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::corpus::{CorpusFormat, LexiconComplexity};
use crate::lexfeat::{FrequencyList, LexicalConfig, DEFAULT_AUXILIARIES};
use crate::models::{ModelKind, ModelParams, ModelSpec};
use crate::perturb::{AlterationLevel, PerturbationPlan, TreeStrategy};
use crate::stats::ZOptions;

/// Environment variable that replaces the configured word list path.
pub const WORDLIST_ENV: &str = "LEXSYN_WORDLIST";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSection {
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: String,
    /// Defaults to the file stem.
    #[serde(default)]
    pub name: Option<String>,
}

fn default_format() -> String {
    "jsonl".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbSection {
    pub levels: Vec<u8>,
    /// "project" or "reparse".
    pub tree_strategy: String,
    /// Shell command for "reparse": text on stdin, one tree per line out.
    pub parser_command: Option<String>,
}

impl Default for PerturbSection {
    fn default() -> Self {
        PerturbSection {
            levels: AlterationLevel::DEFAULTS.to_vec(),
            tree_strategy: "project".into(),
            parser_command: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LexicalSection {
    pub wordlist: Option<PathBuf>,
    pub sophistication_cutoff: usize,
    pub segment_size: usize,
    pub random_samples: usize,
    pub lexical_tags: Vec<String>,
    pub verb_tags: Vec<String>,
    pub auxiliaries: Vec<String>,
    pub allow_untagged: bool,
    /// "mean_word_length" or "mean_syllables".
    pub lexicon_complexity: String,
}

impl Default for LexicalSection {
    fn default() -> Self {
        let d = LexicalConfig::default();
        LexicalSection {
            wordlist: None,
            sophistication_cutoff: d.sophistication_cutoff,
            segment_size: d.segment_size,
            random_samples: d.random_samples,
            lexical_tags: d.lexical_tags,
            verb_tags: d.verb_tags,
            auxiliaries: DEFAULT_AUXILIARIES.iter().map(|s| s.to_string()).collect(),
            allow_untagged: false,
            lexicon_complexity: LexiconComplexity::default().name().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelsSection {
    pub kinds: Vec<String>,
    /// Fixed RBF width; unset uses 1 / (features × mean feature variance).
    pub svm_gamma: Option<f64>,
    pub mlp_epochs: usize,
    pub rf_trees: usize,
    pub rf_max_depth: usize,
}

impl Default for ModelsSection {
    fn default() -> Self {
        ModelsSection {
            kinds: ModelKind::ALL.iter().map(|k| k.name().to_string()).collect(),
            svm_gamma: None,
            mlp_epochs: 200,
            rf_trees: 100,
            rf_max_depth: 5,
        }
    }
}

/// The experiment configuration, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    #[serde(default = "default_folds")]
    pub folds: usize,
    /// Significance threshold for the rank tables.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub corpus: CorpusSection,
    #[serde(default)]
    pub perturb: PerturbSection,
    #[serde(default)]
    pub lexical: LexicalSection,
    #[serde(default)]
    pub models: ModelsSection,
    #[serde(default)]
    pub zscore: ZOptions,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_folds() -> usize {
    10
}

fn default_alpha() -> f64 {
    0.05
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let mut c: PipelineConfig = toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        c.base_dir = base_dir.to_path_buf();
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn corpus_path(&self) -> PathBuf {
        self.resolve(&self.corpus.path)
    }

    pub fn corpus_format(&self) -> Result<CorpusFormat, PipelineError> {
        self.corpus.format.parse().map_err(PipelineError::Config)
    }

    pub fn corpus_name(&self) -> String {
        self.corpus.name.clone().unwrap_or_else(|| {
            self.corpus
                .path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "corpus".into())
        })
    }

    /// The word list path, with the environment override applied.
    pub fn wordlist_path(&self) -> Option<PathBuf> {
        match std::env::var_os(WORDLIST_ENV) {
            Some(p) if !p.is_empty() => Some(PathBuf::from(p)),
            _ => self.lexical.wordlist.as_deref().map(|p| self.resolve(p)),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.resolve(self.out.as_deref().unwrap_or(Path::new("out")))
    }

    pub fn plan(&self) -> Result<PerturbationPlan, PipelineError> {
        let mut plan = PerturbationPlan::new(&self.perturb.levels, self.seed).map_err(|e| PipelineError::Config(e.to_string()))?;
        plan.tree_strategy = match self.perturb.tree_strategy.as_str() {
            "project" => TreeStrategy::Project,
            "reparse" => TreeStrategy::Reparse {
                command: self
                    .perturb
                    .parser_command
                    .clone()
                    .ok_or_else(|| PipelineError::Config("tree_strategy \"reparse\" needs parser_command".into()))?,
            },
            other => return Err(PipelineError::Config(format!("unknown tree_strategy {other:?}"))),
        };
        Ok(plan)
    }

    pub fn lexicon_complexity(&self) -> Result<LexiconComplexity, PipelineError> {
        match self.lexical.lexicon_complexity.as_str() {
            "mean_word_length" => Ok(LexiconComplexity::MeanWordLength),
            "mean_syllables" => Ok(LexiconComplexity::MeanSyllables),
            other => Err(PipelineError::Config(format!("unknown lexicon_complexity {other:?}"))),
        }
    }

    /// Builds the lexical configuration, reading the word list.
    pub fn lexical_config(&self) -> Result<LexicalConfig, PipelineError> {
        let path = self
            .wordlist_path()
            .ok_or_else(|| PipelineError::Config(format!("lexical.wordlist is not set (or set {WORDLIST_ENV})")))?;
        let wordlist = FrequencyList::load(&path).map_err(|e| PipelineError::Config(e.to_string()))?;
        let l = &self.lexical;
        let config = LexicalConfig {
            wordlist,
            sophistication_cutoff: l.sophistication_cutoff,
            lexical_tags: l.lexical_tags.clone(),
            verb_tags: l.verb_tags.clone(),
            auxiliaries: l.auxiliaries.clone(),
            segment_size: l.segment_size,
            random_samples: l.random_samples,
            seed: self.seed,
            allow_untagged: l.allow_untagged,
        };
        config.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        Ok(config)
    }

    pub fn model_specs(&self) -> Result<Vec<ModelSpec>, PipelineError> {
        if self.models.kinds.is_empty() {
            return Err(PipelineError::Config("models.kinds is empty".into()));
        }
        let mut specs: Vec<ModelSpec> = Vec::new();
        for k in &self.models.kinds {
            let kind: ModelKind = k.parse().map_err(PipelineError::Config)?;
            if specs.iter().any(|s| s.kind() == kind) {
                return Err(PipelineError::Config(format!("model {kind} listed twice")));
            }
            let mut spec = ModelSpec::new(kind, self.seed);
            match &mut spec.params {
                ModelParams::Svm { gamma, .. } => *gamma = self.models.svm_gamma,
                ModelParams::Mlp { epochs, .. } => *epochs = self.models.mlp_epochs,
                ModelParams::Rf { n_trees, max_depth, .. } => {
                    *n_trees = self.models.rf_trees;
                    *max_depth = self.models.rf_max_depth;
                }
                ModelParams::Gnb { .. } => {}
            }
            specs.push(spec);
        }
        Ok(specs)
    }

    /// Checks everything that can be checked without running a stage,
    /// including that referenced files exist.
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.folds < 2 {
            return Err(PipelineError::Config(format!("folds must be at least 2, got {}", self.folds)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(PipelineError::Config(format!("alpha must be in (0, 1), got {}", self.alpha)));
        }
        let corpus = self.corpus_path();
        if !corpus.is_file() {
            return Err(PipelineError::Config(format!("corpus file {} does not exist", corpus.display())));
        }
        self.corpus_format()?;
        if self.perturb.levels.is_empty() || self.perturb.levels.contains(&0) {
            return Err(PipelineError::Config(format!(
                "perturb.levels must list altered levels above 0, got {:?}",
                self.perturb.levels
            )));
        }
        self.plan()?;
        self.lexicon_complexity()?;
        self.lexical_config()?;
        self.model_specs()?;
        if let Some(g) = self.models.svm_gamma {
            if g.is_nan() || g <= 0.0 {
                return Err(PipelineError::Config(format!("svm_gamma must be positive, got {g}")));
            }
        }
        Ok(())
    }

    /// TOML rendering with resolved paths removed, used for hashing: the
    /// output directory does not change results.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        toml::to_string(&c).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "seed = 3\n[corpus]\npath = \"c.jsonl\"\n";

    #[test]
    fn defaults_follow_the_experiment() {
        let c = PipelineConfig::from_toml(MINIMAL, Path::new("/tmp")).unwrap();
        assert_eq!(c.folds, 10);
        assert_eq!(c.perturb.levels, vec![20, 40, 60, 80]);
        assert_eq!(c.model_specs().unwrap().len(), 4);
        assert_eq!(c.corpus_name(), "c");
        assert_eq!(c.corpus_path(), Path::new("/tmp/c.jsonl"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = PipelineConfig::from_toml("seed = 1\ncolour = 2\n[corpus]\npath = \"x\"\n", Path::new("."));
        assert!(matches!(err, Err(PipelineError::Config(_))));
    }

    #[test]
    fn reparse_needs_a_command() {
        let c = PipelineConfig::from_toml(
            &format!("{MINIMAL}[perturb]\ntree_strategy = \"reparse\"\n"),
            Path::new("."),
        )
        .unwrap();
        assert!(c.plan().is_err());
    }

    #[test]
    fn out_dir_does_not_change_the_canonical_form() {
        let mut a = PipelineConfig::from_toml(MINIMAL, Path::new(".")).unwrap();
        let b = a.clone();
        a.out = Some("elsewhere".into());
        assert_eq!(a.canonical(), b.canonical());
    }
}
