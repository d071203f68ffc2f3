//! Seeded synthetic data: Gaussian blobs and a two-class annotated text
//! corpus. Used by the demo pipeline and the test suites.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::distributions::WeightedIndex;
use rand_distr::{Dirichlet, Distribution, Normal, StandardNormal, Zipf};

use crate::corpus::{tokens_from_trees, write_jsonl, Corpus, Document, Token};
use crate::features::{FeatureGroup, FeatureTable, FeatureVector};
use crate::lexfeat::FrequencyList;
use crate::models::Matrix;
use crate::treepat::parse_ptb;
use crate::util::rng_from;

fn blob_row(rng: &mut ChaCha8Rng, d: usize, class: usize, sep: f64) -> Vec<f64> {
    // Class 1 is shifted along the diagonal so the centres are `sep` apart.
    let shift = class as f64 * sep / (d as f64).sqrt();
    (0..d).map(|_| rng.sample::<f64, _>(StandardNormal) + shift).collect()
}

/// Two spherical unit-variance Gaussian classes whose centres are `sep`
/// apart. Rows are grouped by class.
pub fn blobs(counts: [usize; 2], d: usize, sep: f64, seed: u64) -> (Matrix, Vec<usize>) {
    let mut rng = rng_from(&[b"blobs", &seed.to_le_bytes()]);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (class, &n) in counts.iter().enumerate() {
        for _ in 0..n {
            x.push(blob_row(&mut rng, d, class, sep));
            y.push(class);
        }
    }
    (x, y)
}

/// A blob data set dressed as a corpus: subjects alternate between the
/// classes, each subject gets the same number of documents and a small
/// subject-level offset.
#[derive(Debug, Clone)]
pub struct BlobCorpus {
    pub corpus: Corpus,
    pub table: FeatureTable,
}

pub fn blob_corpus(n_docs: usize, n_subjects: usize, d: usize, sep: f64, seed: u64) -> BlobCorpus {
    assert!(n_subjects >= 2 && n_docs >= n_subjects, "need two subjects and a document per subject");
    let mut rng = rng_from(&[b"blob_corpus", &seed.to_le_bytes()]);
    let offset = Normal::new(0.0, 0.3).expect("valid sd");
    let mut docs = Vec::with_capacity(n_docs);
    let mut rows = Vec::with_capacity(n_docs);
    for s in 0..n_subjects {
        let class = s % 2;
        let bias: Vec<f64> = (0..d).map(|_| offset.sample(&mut rng)).collect();
        let n = n_docs / n_subjects + usize::from(s < n_docs % n_subjects);
        for k in 0..n {
            let id = format!("s{s:03}_d{k:02}");
            let row: Vec<f64> = blob_row(&mut rng, d, class, sep).iter().zip(&bias).map(|(a, b)| a + b).collect();
            let mut v = FeatureVector::new();
            for (j, value) in row.into_iter().enumerate() {
                v.push(format!("f{j}"), FeatureGroup::Lexical, Some(value));
            }
            rows.push((id.clone(), class, v));
            docs.push(Document {
                id,
                subject_id: format!("s{s:03}"),
                label: ["a", "b"][class].to_string(),
                tokens: vec![Token::new("blob", None)],
                trees: None,
                alteration_level: 0,
            });
        }
    }
    BlobCorpus {
        corpus: Corpus::new("blobs", docs).expect("both classes present"),
        table: FeatureTable::from_vectors(0, rows).expect("uniform layout"),
    }
}

/// Labels permuted under `seed`.
pub fn shuffled_labels(labels: &[usize], seed: u64) -> Vec<usize> {
    let mut out = labels.to_vec();
    out.shuffle(&mut rng_from(&[b"shuffle", &seed.to_le_bytes()]));
    out
}

/// Settings for [`text_corpus`].
#[derive(Debug, Clone)]
pub struct TextSpec {
    pub subjects_per_class: usize,
    pub docs_per_subject: usize,
    /// Inclusive range of sentences per document.
    pub sentences: (usize, usize),
    /// Content-word vocabulary size per part of speech, per class.
    pub vocabulary: [usize; 2],
    pub seed: u64,
}

impl Default for TextSpec {
    fn default() -> Self {
        TextSpec {
            subjects_per_class: 10,
            docs_per_subject: 1,
            sentences: (8, 16),
            vocabulary: [30, 90],
            seed: 0,
        }
    }
}

pub const TEXT_LABELS: [&str; 2] = ["plain", "rich"];

struct Vocabulary {
    nouns: Vec<String>,
    verbs: Vec<String>,
    adjectives: Vec<String>,
    adverbs: Vec<String>,
    zipf: Zipf<f64>,
}

impl Vocabulary {
    fn build(class: usize, size: usize) -> Self {
        // Disjoint consonant sets keep the two vocabularies apart.
        let consonants: &[u8] = if class == 0 { b"bdgkmn" } else { b"prstlvz" };
        let mut rng = rng_from(&[b"vocabulary", &(class as u64).to_le_bytes()]);
        let mut seen = BTreeSet::new();
        let mut word = |suffix: &str| loop {
            let syllables = rng.gen_range(2..=3);
            let mut w = String::new();
            for _ in 0..syllables {
                w.push(consonants[rng.gen_range(0..consonants.len())] as char);
                w.push(b"aeiou"[rng.gen_range(0..5)] as char);
            }
            w.push_str(suffix);
            if seen.insert(w.clone()) {
                return w;
            }
        };
        Vocabulary {
            nouns: (0..size).map(|_| word("")).collect(),
            verbs: (0..size).map(|_| word("n")).collect(),
            adjectives: (0..size).map(|_| word("ic")).collect(),
            adverbs: (0..size).map(|_| word("ly")).collect(),
            zipf: Zipf::new(size as u64, 1.0).expect("positive vocabulary"),
        }
    }

    fn pick<'a>(&self, words: &'a [String], rng: &mut ChaCha8Rng) -> &'a str {
        let rank = self.zipf.sample(rng) as usize;
        &words[rank.clamp(1, words.len()) - 1]
    }
}

/// Clause templates shared by both classes. Slots: `{n}` noun, `{vd}` past
/// verb, `{vz}` present third person, `{vb}` base form, `{a}` adjective,
/// `{r}` adverb.
const TEMPLATES: [&str; 10] = [
    "(S (NP (DT the) (NN {n})) (VP (VBD {vd}) (NP (DT a) (JJ {a}) (NN {n}))) (. .))",
    "(S (NP (NP (DT the) (NN {n})) (SBAR (WHNP (WDT that)) (S (VP (VBD {vd}) (NP (DT the) (NN {n})))))) (VP (VBZ {vz}) (ADVP (RB {r}))) (. .))",
    "(S (S (NP (PRP she)) (VP (VBD {vd}) (NP (DT the) (NN {n})))) (CC and) (S (NP (PRP he)) (VP (VBD {vd}) (ADVP (RB {r})))) (. .))",
    "(S (SBAR (IN because) (S (NP (DT the) (NN {n})) (VP (VBD {vd})))) (, ,) (NP (PRP they)) (VP (VBD {vd}) (NP (DT the) (JJ {a}) (NN {n}))) (. .))",
    "(S (NP (PRP we)) (VP (VBP want) (S (VP (TO to) (VP (VB {vb}) (NP (DT the) (NN {n})))))) (. .))",
    "(S (NP (DT the) (NN {n})) (VP (VP (VBD {vd}) (NP (DT the) (NN {n}))) (CC and) (VP (VBD {vd}) (ADVP (RB {r})))) (. .))",
    "(S (NP (PRP i)) (VP (VBP think) (SBAR (IN that) (S (NP (DT the) (NN {n})) (VP (VBZ {vz}) (ADJP (JJ {a})))))) (. .))",
    "(S (NP (PRP it)) (VP (VBD {vd})) (. .))",
    "(FRAG (NP (DT the) (JJ {a}) (NN {n})) (. .))",
    "(FRAG (INTJ (UH okay)) (. .))",
];

/// Concentration of the per-document template weights. Small values give
/// documents with a strong preference for a few templates.
const STYLE_CONCENTRATION: f64 = 0.7;

fn fill(template: &str, vocab: &Vocabulary, rng: &mut ChaCha8Rng) -> String {
    let mut out = String::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let end = start + rest[start..].find('}').expect("closed slot");
        let word = match &rest[start + 1..end] {
            "n" => vocab.pick(&vocab.nouns, rng).to_string(),
            "vd" => format!("{}ed", vocab.pick(&vocab.verbs, rng)),
            "vz" => format!("{}s", vocab.pick(&vocab.verbs, rng)),
            "vb" => vocab.pick(&vocab.verbs, rng).to_string(),
            "a" => vocab.pick(&vocab.adjectives, rng).to_string(),
            "r" => vocab.pick(&vocab.adverbs, rng).to_string(),
            other => unreachable!("unknown slot {other}"),
        };
        out.push_str(&word);
        rest = &rest[end + 1..];
    }
    out.push_str(rest);
    out
}

/// Two-class corpus with POS tags and parse trees. Both classes draw
/// sentences from the same clause templates; only the content vocabulary
/// differs (disjoint words, different sizes). Each document has its own
/// template weights, drawn from the same Dirichlet for both classes, so
/// sentence length and clause density vary between documents.
pub fn text_corpus(spec: &TextSpec) -> Corpus {
    let vocab = [Vocabulary::build(0, spec.vocabulary[0]), Vocabulary::build(1, spec.vocabulary[1])];
    let mut rng = rng_from(&[b"text_corpus", &spec.seed.to_le_bytes()]);
    let style = Dirichlet::new(&[STYLE_CONCENTRATION; TEMPLATES.len()]).expect("valid concentration");
    let mut docs = Vec::new();
    for s in 0..2 * spec.subjects_per_class {
        let class = s % 2;
        for k in 0..spec.docs_per_subject {
            let n = rng.gen_range(spec.sentences.0..=spec.sentences.1.max(spec.sentences.0));
            let weights = style.sample(&mut rng);
            let pick = WeightedIndex::new(&weights).expect("positive weights");
            let trees: Vec<String> = (0..n)
                .map(|_| {
                    let t = TEMPLATES[pick.sample(&mut rng)];
                    parse_ptb(&fill(t, &vocab[class], &mut rng)).expect("templates parse").render()
                })
                .collect();
            let parsed: Vec<_> = trees.iter().map(|t| parse_ptb(t).expect("rendered tree")).collect();
            docs.push(Document {
                id: format!("t{s:03}_{k}"),
                subject_id: format!("t{s:03}"),
                label: TEXT_LABELS[class].to_string(),
                tokens: tokens_from_trees(&parsed),
                trees: Some(trees),
                alteration_level: 0,
            });
        }
    }
    Corpus::new("synthetic-text", docs).expect("both classes present")
}

/// Frequency list for [`text_corpus`]: the function words followed by the
/// ten most frequent content words of each class, so that the rest count
/// as sophisticated.
pub fn text_wordlist() -> FrequencyList {
    let mut words: Vec<String> = ["the", "a", "she", "he", "they", "we", "i", "and", "that", "because", "to", "want", "think"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for class in 0..2 {
        let v = Vocabulary::build(class, TextSpec::default().vocabulary[class]);
        for i in 0..10.min(v.nouns.len()) {
            words.push(v.nouns[i].clone());
            words.push(format!("{}ed", v.verbs[i]));
            words.push(v.adjectives[i].clone());
        }
    }
    FrequencyList::from_words(words)
}

/// Files written by [`write_demo`].
#[derive(Debug, Clone)]
pub struct DemoFiles {
    pub config: PathBuf,
    pub corpus: PathBuf,
    pub wordlist: PathBuf,
}

/// Writes a runnable demo into `dir`: the synthetic text corpus as jsonl,
/// its word list and a config that points at both. The config sends output
/// to `dir/out`.
pub fn write_demo(dir: &Path, seed: u64, subjects_per_class: usize) -> std::io::Result<DemoFiles> {
    std::fs::create_dir_all(dir)?;
    let corpus = text_corpus(&TextSpec {
        subjects_per_class,
        seed,
        ..TextSpec::default()
    });
    let files = DemoFiles {
        config: dir.join("lexsyn.toml"),
        corpus: dir.join("corpus.jsonl"),
        wordlist: dir.join("wordlist.txt"),
    };
    write_jsonl(&corpus, &files.corpus).map_err(std::io::Error::other)?;
    let mut words = text_wordlist().words().join("\n");
    words.push('\n');
    std::fs::write(&files.wordlist, words)?;
    let folds = (2 * subjects_per_class).min(10);
    let config = format!(
        "seed = {seed}\nfolds = {folds}\nout = \"out\"\n\n[corpus]\npath = \"corpus.jsonl\"\nname = \"demo\"\n\n[lexical]\nwordlist = \"wordlist.txt\"\nsophistication_cutoff = 20\n"
    );
    std::fs::write(&files.config, config)?;
    Ok(files)
}
