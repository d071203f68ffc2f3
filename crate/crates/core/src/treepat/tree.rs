//! Penn Treebank bracketed trees.

use std::fmt;

use super::TreeError;

/// Preterminal tags that do not count as words.
pub const NON_WORD_TAGS: &[&str] = &[
    ".", ",", ":", "``", "''", "-LRB-", "-RRB-", "-NONE-", "#", "$", "HYPH", "NFP",
];

/// A constituency tree node. Preterminals are leaves: they carry a tag as
/// their label, a surface form, and no children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    label: String,
    children: Vec<Tree>,
    form: Option<String>,
}

impl Tree {
    pub fn leaf(label: impl Into<String>, form: impl Into<String>) -> Self {
        Tree {
            label: label.into(),
            children: Vec::new(),
            form: Some(form.into()),
        }
    }

    /// Internal node. Panics when `children` is empty.
    pub fn node(label: impl Into<String>, children: Vec<Tree>) -> Self {
        assert!(!children.is_empty(), "internal tree nodes need at least one child");
        Tree {
            label: label.into(),
            children,
            form: None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    /// Surface form, leaves only.
    pub fn form(&self) -> Option<&str> {
        self.form.as_deref()
    }

    pub fn is_leaf(&self) -> bool {
        self.form.is_some()
    }

    /// Label with function tags and indices removed (`NP-SBJ-1` -> `NP`).
    /// Bracket-style labels such as `-LRB-` are returned untouched.
    pub fn category(&self) -> &str {
        base_category(&self.label)
    }

    /// True for leaves whose tag marks punctuation or an empty element.
    pub fn is_non_word(&self) -> bool {
        self.is_leaf() && NON_WORD_TAGS.contains(&self.category())
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&Tree> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Tree>) {
        if self.is_leaf() {
            out.push(self);
        } else {
            for child in &self.children {
                child.collect_leaves(out);
            }
        }
    }

    pub fn leaf_forms(&self) -> Vec<&str> {
        self.leaves().into_iter().filter_map(Tree::form).collect()
    }

    /// Leaves that count as words (punctuation and empty elements excluded).
    pub fn word_leaves(&self) -> Vec<&Tree> {
        self.leaves().into_iter().filter(|l| !l.is_non_word()).collect()
    }

    /// Number of nodes, leaves included.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    /// Canonical single-space bracketed rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out);
        out
    }

    fn render_into(&self, out: &mut String) {
        out.push('(');
        out.push_str(&self.label);
        if let Some(form) = &self.form {
            out.push(' ');
            out.push_str(form);
        } else {
            for child in &self.children {
                out.push(' ');
                child.render_into(out);
            }
        }
        out.push(')');
    }

    /// Wraps the tree in a `ROOT` node unless it already has one. An empty
    /// outer label, as found in treebank files, is renamed to `ROOT`.
    pub fn rooted(&self) -> Tree {
        match self.label.as_str() {
            "ROOT" => self.clone(),
            "" if !self.is_leaf() => Tree::node("ROOT", self.children.clone()),
            _ => Tree::node("ROOT", vec![self.clone()]),
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for Tree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ptb(s)
    }
}

pub(crate) fn base_category(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    let end = label
        .find(['-', '='])
        .filter(|&i| i > 0)
        .unwrap_or(label.len());
    &label[..end]
}

/// Parses one bracketed tree. Trailing non-whitespace input is an error.
pub fn parse_ptb(s: &str) -> Result<Tree, TreeError> {
    let mut parser = Parser { src: s.as_bytes(), pos: 0 };
    parser.skip_ws();
    parser.expect_open()?;
    let tree = parser.node()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("trailing input after tree"));
    }
    Ok(tree)
}

/// Parses every tree in a string holding several bracketed trees, such as a
/// treebank file. Blank space between trees is ignored.
pub fn parse_ptb_many(s: &str) -> Result<Vec<Tree>, TreeError> {
    let mut parser = Parser { src: s.as_bytes(), pos: 0 };
    let mut out = Vec::new();
    loop {
        parser.skip_ws();
        if parser.pos >= parser.src.len() {
            return Ok(out);
        }
        parser.expect_open()?;
        out.push(parser.node()?);
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> TreeError {
        TreeError::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect_open(&mut self) -> Result<(), TreeError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                Ok(())
            }
            None => Err(self.error("unexpected end of input, expected '('")),
            Some(_) => Err(self.error("expected '('")),
        }
    }

    fn atom(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if !c.is_ascii_whitespace() && c != b'(' && c != b')')
        {
            self.pos += 1;
        }
        // Delimiters are ASCII, so the slice always falls on char boundaries.
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    /// Parses the remainder of a node whose '(' was consumed.
    fn node(&mut self) -> Result<Tree, TreeError> {
        self.skip_ws();
        let label = self.atom();
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b')') => Err(self.error("empty constituent")),
            Some(b'(') => {
                let mut children = Vec::new();
                while self.peek() == Some(b'(') {
                    self.pos += 1;
                    children.push(self.node()?);
                    self.skip_ws();
                }
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        Ok(Tree::node(label, children))
                    }
                    None => Err(self.error("unexpected end of input")),
                    Some(_) => Err(self.error("bare word mixed with constituents")),
                }
            }
            Some(_) => {
                if label.is_empty() {
                    return Err(self.error("leaf without a tag"));
                }
                let form = self.atom();
                self.skip_ws();
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        Ok(Tree::leaf(label, form))
                    }
                    None => Err(self.error("unexpected end of input")),
                    Some(_) => Err(self.error("expected ')' after leaf form")),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANONICAL: &str = "(S (NP (DT the) (NN boy)) (VP (VBZ runs)))";

    #[test]
    fn single_leaf() {
        let t = parse_ptb("(NN dog)").unwrap();
        assert!(t.is_leaf());
        assert_eq!(t.label(), "NN");
        assert_eq!(t.form(), Some("dog"));
    }

    #[test]
    fn canonical_sentence() {
        let t = parse_ptb(CANONICAL).unwrap();
        assert_eq!(t.leaf_forms(), vec!["the", "boy", "runs"]);
        assert_eq!(t.render(), CANONICAL);
        assert_eq!(t.size(), 6);
    }

    #[test]
    fn unterminated_input_reports_offset() {
        match parse_ptb("((S") {
            Err(TreeError::Parse { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs() {
        for bad in ["()", "(S)", "(S (NP the (NN dog)))", "(S (NN a)) x", "", "NN dog", "( dog)"] {
            assert!(parse_ptb(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn whitespace_is_canonicalized() {
        let t = parse_ptb("  (S\n  (NP (DT the)\t(NN boy))\n (VP (VBZ runs)) ) ").unwrap();
        assert_eq!(t.render(), CANONICAL);
    }

    #[test]
    fn empty_root_label() {
        let t = parse_ptb("( (S (NN x)))").unwrap();
        assert_eq!(t.render(), "( (S (NN x)))");
        assert_eq!(t.rooted().render(), "(ROOT (S (NN x)))");
    }

    #[test]
    fn categories_and_punctuation() {
        let t = parse_ptb("(S (NP-SBJ-1 (NN x)) (. .) (-LRB- -LRB-))").unwrap();
        assert_eq!(t.children()[0].category(), "NP");
        assert!(t.children()[1].is_non_word());
        assert_eq!(t.children()[2].category(), "-LRB-");
        assert_eq!(t.word_leaves().len(), 1);
    }

    #[test]
    fn many_trees() {
        let ts = parse_ptb_many("(S (NN a))\n\n(S (NN b)) (X (Y c))").unwrap();
        assert_eq!(ts.len(), 3);
    }
}
