//! Lexical density, sophistication and variation.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;

use super::{LexError, LexicalConfig};
use crate::corpus::Token;
use crate::features::{FeatureGroup, FeatureVector};
use crate::util::rng_from;

/// Names of the density/sophistication/variation features, in output order.
pub const LCA_FEATURES: [&str; 24] = [
    "wordtypes", "swordtypes", "lextypes", "slextypes", "wordtokens", "swordtokens", "lextokens",
    "slextokens", "ld", "ls1", "ls2", "vs1", "vs2", "cvs1", "ndw", "ndwz", "ndwerz", "ndwesz",
    "ttr", "msttr", "cttr", "rttr", "logttr", "uber",
];

/// Word list ranked by descending frequency.
#[derive(Debug, Clone, Default)]
pub struct FrequencyList {
    ranks: HashMap<String, usize>,
}

impl FrequencyList {
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut ranks = HashMap::new();
        for (i, w) in words.into_iter().enumerate() {
            let w = w.as_ref().trim().to_lowercase();
            if !w.is_empty() {
                ranks.entry(w).or_insert(i);
            }
        }
        FrequencyList { ranks }
    }

    /// One word per line; blank lines and `#` comments are skipped but keep
    /// their rank slot out of the count.
    pub fn load(path: &Path) -> Result<Self, LexError> {
        let text = fs::read_to_string(path).map_err(|source| LexError::Wordlist {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::from_words(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        ))
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Entries in rank order.
    pub fn words(&self) -> Vec<&str> {
        let mut w: Vec<(&str, usize)> = self.ranks.iter().map(|(k, &r)| (k.as_str(), r)).collect();
        w.sort_by_key(|&(_, r)| r);
        w.into_iter().map(|(k, _)| k).collect()
    }

    /// 0-based rank of a word, if listed.
    pub fn rank(&self, word: &str) -> Option<usize> {
        self.ranks.get(&word.to_lowercase()).copied()
    }

    /// A word is sophisticated when it is not among the `cutoff` most
    /// frequent entries.
    pub fn is_sophisticated(&self, word: &str, cutoff: usize) -> bool {
        self.rank(word).is_none_or(|r| r >= cutoff)
    }
}

fn has_prefix(pos: &str, prefixes: &[String]) -> bool {
    prefixes.iter().any(|p| pos.starts_with(p.as_str()))
}

fn distinct(words: &[String]) -> usize {
    words.iter().collect::<HashSet<_>>().len()
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

/// Computes the 24 density, sophistication and variation features. Every
/// token must carry a POS tag.
pub fn lca_features(tokens: &[Token], config: &LexicalConfig) -> Result<FeatureVector, LexError> {
    if let Some(i) = tokens.iter().position(|t| t.pos.is_none()) {
        return Err(LexError::TaggingRequired {
            what: format!("token {i} ({:?})", tokens[i].form),
        });
    }
    let mut v = FeatureVector::new();
    if tokens.is_empty() {
        for name in LCA_FEATURES {
            v.push(name, FeatureGroup::Lexical, None);
        }
        return Ok(v);
    }
    let words: Vec<String> = tokens.iter().map(|t| t.form.to_lowercase()).collect();
    let is_aux = |w: &str| config.auxiliaries.iter().any(|a| a == w);
    let soph = |w: &str| config.wordlist.is_sophisticated(w, config.sophistication_cutoff);

    let mut lex = Vec::new();
    let mut verbs = Vec::new();
    for (t, w) in tokens.iter().zip(&words) {
        let pos = t.pos.as_deref().unwrap_or_default();
        let verbal = has_prefix(pos, &config.verb_tags);
        if verbal && is_aux(w) {
            continue;
        }
        if has_prefix(pos, &config.lexical_tags) {
            lex.push(w.clone());
        }
        if verbal {
            verbs.push(w.clone());
        }
    }
    let sophisticated = |ws: &[String]| -> Vec<String> { ws.iter().filter(|w| soph(w)).cloned().collect() };
    let swords = sophisticated(&words);
    let slex = sophisticated(&lex);
    let sverbs = sophisticated(&verbs);

    let n = words.len() as f64;
    let t = distinct(&words) as f64;
    let lextokens = lex.len() as f64;
    let verbtokens = verbs.len() as f64;
    let sverbtypes = distinct(&sverbs) as f64;

    let seg = config.segment_size;
    let ndw_first = distinct(&words[..words.len().min(seg)]) as f64;
    let (ndwerz, ndwesz) = if words.len() >= seg {
        sampled_ndw(&words, seg, config.random_samples, config.seed)
    } else {
        (t, t)
    };
    let msttr = if words.len() >= seg {
        let segs: Vec<f64> = words.chunks_exact(seg).map(|c| distinct(c) as f64 / seg as f64).collect();
        segs.iter().sum::<f64>() / segs.len() as f64
    } else {
        t / n
    };
    let uber = if t < n && n > 1.0 {
        Some(n.ln().powi(2) / (n.ln() - t.ln()))
    } else {
        None
    };

    let g = FeatureGroup::Lexical;
    v.push("wordtypes", g, Some(t));
    v.push("swordtypes", g, Some(distinct(&swords) as f64));
    v.push("lextypes", g, Some(distinct(&lex) as f64));
    v.push("slextypes", g, Some(distinct(&slex) as f64));
    v.push("wordtokens", g, Some(n));
    v.push("swordtokens", g, Some(swords.len() as f64));
    v.push("lextokens", g, Some(lextokens));
    v.push("slextokens", g, Some(slex.len() as f64));
    v.push("ld", g, Some(lextokens / n));
    v.push("ls1", g, ratio(slex.len() as f64, lextokens));
    v.push("ls2", g, Some(distinct(&swords) as f64 / t));
    v.push("vs1", g, ratio(sverbtypes, verbtokens));
    v.push("vs2", g, ratio(sverbtypes * sverbtypes, verbtokens));
    v.push("cvs1", g, ratio(sverbtypes, (2.0 * verbtokens).sqrt()));
    v.push("ndw", g, Some(t));
    v.push("ndwz", g, Some(ndw_first));
    v.push("ndwerz", g, Some(ndwerz));
    v.push("ndwesz", g, Some(ndwesz));
    v.push("ttr", g, Some(t / n));
    v.push("msttr", g, Some(msttr));
    v.push("cttr", g, Some(t / (2.0 * n).sqrt()));
    v.push("rttr", g, Some(t / n.sqrt()));
    v.push("logttr", g, (n > 1.0).then(|| t.ln() / n.ln()));
    v.push("uber", g, uber);
    Ok(v)
}

/// Mean number of distinct words over `samples` random `size`-word draws
/// (without replacement) and over `samples` random contiguous windows.
fn sampled_ndw(words: &[String], size: usize, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = rng_from(&[b"ndw", &seed.to_le_bytes()]);
    let samples = samples.max(1);
    let mut random = 0.0;
    let mut sequence = 0.0;
    for _ in 0..samples {
        let picked: HashSet<&String> = sample(&mut rng, words.len(), size).into_iter().map(|i| &words[i]).collect();
        random += picked.len() as f64;
        let start = rng.gen_range(0..=words.len() - size);
        sequence += distinct(&words[start..start + size]) as f64;
    }
    (random / samples as f64, sequence / samples as f64)
}
