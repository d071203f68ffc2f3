//! Fallback tokenizer for records that carry only raw text.
//!
//! Lowercases, removes transcript annotations (`[...]` codes, `<` `>`
//! scoping brackets, `(.)` pauses), drops punctuation, and splits English
//! clitics the way Treebank tokenizers do (`he's` -> `he 's`,
//! `can't` -> `ca n't`). Filler tokens such as `&uh` are kept.

const CLITICS: &[&str] = &["n't", "'s", "'re", "'ve", "'m", "'ll", "'d"];

fn is_edge_punct(c: char) -> bool {
    matches!(
        c,
        '.' | ',' | '!' | '?' | ';' | ':' | '"' | '(' | ')' | '[' | ']' | '{' | '}' | '…' | '“' | '”'
    )
}

fn strip_annotations(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut depth = 0usize;
    for c in text.chars() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            '<' | '>' if depth == 0 => out.push(' '),
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

fn split_clitic(word: &str) -> Vec<String> {
    for clitic in CLITICS {
        if let Some(stem) = word.strip_suffix(clitic) {
            if !stem.is_empty() && stem != "'" {
                return vec![stem.to_string(), (*clitic).to_string()];
            }
        }
    }
    vec![word.to_string()]
}

pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = strip_annotations(&text.to_lowercase()).replace('’', "'");
    let mut out = Vec::new();
    for chunk in lowered.split_whitespace() {
        // Pause markers: (.), (..), (...)
        if chunk.starts_with('(') && chunk.ends_with(')') && chunk.trim_matches(|c| c == '(' || c == ')').chars().all(|c| c == '.') {
            continue;
        }
        let word = chunk.trim_matches(is_edge_punct);
        if word.is_empty() || word.chars().all(|c| !c.is_alphanumeric()) {
            continue;
        }
        out.extend(split_clitic(word));
    }
    out
}
