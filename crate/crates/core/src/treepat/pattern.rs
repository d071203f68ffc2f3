//! Relational tree patterns, a small subset of Tregex.
//!
//! Syntax:
//!
//! ```text
//! pattern    := node constraint*
//! node       := '(' pattern ')' | matcher ('=' NAME)?
//! matcher    := '!'? alt ('|' alt)*
//! alt        := '__' | TAG | TAG '*' | TAG ':' WORD
//! constraint := ('<' | '<<' | '<,' | '!<<') node
//! ```
//!
//! All constraints of a pattern apply to its root node, so `A < B < C` means
//! "an A with a B child and a C child", while `A < (B < C)` nests. `TAG*` is a
//! prefix wildcard, `TAG:word` additionally requires a leaf with that form, and
//! a leading `!` negates the whole alternation. Labels are compared on their
//! base category, so `NP` matches `NP-SBJ`.

use std::collections::BTreeSet;
use std::fmt;

use super::tree::Tree;
use super::PatternError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `<`: the target is a child.
    ImmediatelyDominates,
    /// `<<`: the target is a proper descendant.
    Dominates,
    /// `<,`: the target is the first child.
    HasLeftmostChild,
    /// `!<<`: no proper descendant matches the target.
    LacksDescendant,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::ImmediatelyDominates => "<",
            Relation::Dominates => "<<",
            Relation::HasLeftmostChild => "<,",
            Relation::LacksDescendant => "!<<",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum LabelAlt {
    Any,
    Exact(String),
    Prefix(String),
    WithForm(String, String),
}

impl LabelAlt {
    fn matches(&self, node: &Tree) -> bool {
        let cat = node.category();
        match self {
            LabelAlt::Any => true,
            LabelAlt::Exact(l) => cat == l,
            LabelAlt::Prefix(p) => cat.starts_with(p.as_str()),
            LabelAlt::WithForm(l, w) => {
                cat == l && node.form().is_some_and(|f| f.eq_ignore_ascii_case(w))
            }
        }
    }
}

impl fmt::Display for LabelAlt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelAlt::Any => f.write_str("__"),
            LabelAlt::Exact(l) => f.write_str(l),
            LabelAlt::Prefix(p) => write!(f, "{p}*"),
            LabelAlt::WithForm(l, w) => write!(f, "{l}:{w}"),
        }
    }
}

/// Node label test: an alternation of labels, optionally negated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMatcher {
    negated: bool,
    alternatives: Vec<LabelAlt>,
}

impl LabelMatcher {
    pub fn matches(&self, node: &Tree) -> bool {
        self.alternatives.iter().any(|a| a.matches(node)) != self.negated
    }
}

impl fmt::Display for LabelMatcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("!")?;
        }
        for (i, alt) in self.alternatives.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{alt}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    matcher: LabelMatcher,
    capture: Option<String>,
    constraints: Vec<(Relation, Pattern)>,
}

/// A node matched by a pattern, identified by its pre-order position.
#[derive(Debug, Clone, Copy)]
pub struct NodeMatch<'a> {
    pub index: usize,
    pub node: &'a Tree,
}

impl Pattern {
    pub fn parse(src: &str) -> Result<Pattern, PatternError> {
        let tokens = lex(src)?;
        let mut p = PatternParser { tokens, pos: 0 };
        let pattern = p.pattern()?;
        if p.pos != p.tokens.len() {
            return Err(PatternError::Syntax(format!(
                "unexpected token {:?} in {src:?}",
                p.tokens[p.pos]
            )));
        }
        Ok(pattern)
    }

    pub fn constraints(&self) -> &[(Relation, Pattern)] {
        &self.constraints
    }

    /// True if this pattern or any sub-pattern names a node.
    pub fn has_capture(&self) -> bool {
        self.capture.is_some() || self.constraints.iter().any(|(_, t)| t.has_capture())
    }

    /// Every node the pattern's root matches, in pre-order.
    pub fn find<'a>(&self, tree: &'a Tree) -> Vec<NodeMatch<'a>> {
        let flat = FlatTree::new(tree);
        (0..flat.len())
            .filter(|&i| flat.eval(self, i, &mut Vec::new()))
            .map(|i| NodeMatch {
                index: i,
                node: flat.nodes[i].tree,
            })
            .collect()
    }

    /// Pre-order indices of every node bound to a named capture in some
    /// satisfying match.
    pub fn captured(&self, tree: &Tree, name: &str) -> BTreeSet<usize> {
        let flat = FlatTree::new(tree);
        let mut out = BTreeSet::new();
        for i in 0..flat.len() {
            let mut caps = Vec::new();
            if flat.eval(self, i, &mut caps) {
                out.extend(caps.into_iter().filter(|(n, _)| n == name).map(|(_, j)| j));
            }
        }
        out
    }

    /// Nodes this pattern counts: captured nodes when the pattern names any,
    /// otherwise the matched roots.
    pub fn counted(&self, tree: &Tree) -> BTreeSet<usize> {
        let flat = FlatTree::new(tree);
        self.counted_in(&flat)
    }

    pub(crate) fn counted_in(&self, flat: &FlatTree<'_>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let capturing = self.has_capture();
        for i in 0..flat.len() {
            let mut caps = Vec::new();
            if flat.eval(self, i, &mut caps) {
                if capturing {
                    out.extend(caps.into_iter().map(|(_, j)| j));
                } else {
                    out.insert(i);
                }
            }
        }
        out
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.matcher)?;
        if let Some(name) = &self.capture {
            write!(f, "={name}")?;
        }
        for (rel, target) in &self.constraints {
            if target.constraints.is_empty() {
                write!(f, " {} {target}", rel.symbol())?;
            } else {
                write!(f, " {} ({target})", rel.symbol())?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Pattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pattern::parse(s)
    }
}

/// Returns every node matching `pattern` in pre-order.
pub fn match_pattern<'a>(pattern: &Pattern, tree: &'a Tree) -> Vec<&'a Tree> {
    pattern.find(tree).into_iter().map(|m| m.node).collect()
}

struct FlatNode<'a> {
    tree: &'a Tree,
    children: Vec<usize>,
    /// One past the last pre-order index in this subtree.
    end: usize,
}

/// Pre-order index over a tree.
pub(crate) struct FlatTree<'a> {
    nodes: Vec<FlatNode<'a>>,
}

impl<'a> FlatTree<'a> {
    pub(crate) fn new(tree: &'a Tree) -> Self {
        let mut flat = FlatTree { nodes: Vec::with_capacity(tree.size()) };
        flat.push(tree);
        flat
    }

    fn push(&mut self, tree: &'a Tree) -> usize {
        let id = self.nodes.len();
        self.nodes.push(FlatNode { tree, children: Vec::new(), end: 0 });
        for child in tree.children() {
            let c = self.push(child);
            self.nodes[id].children.push(c);
        }
        self.nodes[id].end = self.nodes.len();
        id
    }

    pub(crate) fn len(&self) -> usize {
        self.nodes.len()
    }

    fn eval(&self, p: &Pattern, id: usize, caps: &mut Vec<(String, usize)>) -> bool {
        let node = &self.nodes[id];
        if !p.matcher.matches(node.tree) {
            return false;
        }
        let mut local = Vec::new();
        for (rel, target) in &p.constraints {
            let ok = match rel {
                Relation::ImmediatelyDominates => {
                    self.any_of(target, node.children.iter().copied(), &mut local)
                }
                Relation::Dominates => self.any_of(target, id + 1..node.end, &mut local),
                Relation::HasLeftmostChild => {
                    self.any_of(target, node.children.first().copied(), &mut local)
                }
                Relation::LacksDescendant => {
                    !(id + 1..node.end).any(|d| self.eval(target, d, &mut Vec::new()))
                }
            };
            if !ok {
                return false;
            }
        }
        if let Some(name) = &p.capture {
            local.push((name.clone(), id));
        }
        caps.extend(local);
        true
    }

    /// Evaluates `target` on every candidate, keeping captures of all that
    /// match so that counting sees every possible binding.
    fn any_of(
        &self,
        target: &Pattern,
        candidates: impl IntoIterator<Item = usize>,
        caps: &mut Vec<(String, usize)>,
    ) -> bool {
        let mut any = false;
        for c in candidates {
            if self.eval(target, c, caps) {
                any = true;
            }
        }
        any
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Bar,
    Bang,
    Eq,
    Star,
    Colon,
    Rel(Relation),
    Ident(String),
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '$' | '_' | '-' | '.' | '\'' | '`' | '#' | '@')
}

fn lex(src: &str) -> Result<Vec<Tok>, PatternError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push(Tok::Open);
                i += 1;
            }
            ')' => {
                out.push(Tok::Close);
                i += 1;
            }
            '|' => {
                out.push(Tok::Bar);
                i += 1;
            }
            '=' => {
                out.push(Tok::Eq);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            ':' => {
                out.push(Tok::Colon);
                i += 1;
            }
            '<' => {
                if chars.get(i + 1) == Some(&'<') {
                    out.push(Tok::Rel(Relation::Dominates));
                    i += 2;
                } else if chars.get(i + 1) == Some(&',') {
                    out.push(Tok::Rel(Relation::HasLeftmostChild));
                    i += 2;
                } else {
                    out.push(Tok::Rel(Relation::ImmediatelyDominates));
                    i += 1;
                }
            }
            '!' => {
                if chars.get(i + 1) == Some(&'<') && chars.get(i + 2) == Some(&'<') {
                    out.push(Tok::Rel(Relation::LacksDescendant));
                    i += 3;
                } else {
                    out.push(Tok::Bang);
                    i += 1;
                }
            }
            c if is_ident_char(c) || c == ',' => {
                // A bare ',' is the comma tag; it only appears as a label.
                let start = i;
                if c == ',' {
                    i += 1;
                } else {
                    while i < chars.len() && is_ident_char(chars[i]) {
                        i += 1;
                    }
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(PatternError::Syntax(format!(
                    "unexpected character {other:?} at {i} in {src:?}"
                )))
            }
        }
    }
    Ok(out)
}

struct PatternParser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl PatternParser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn err<T>(&self, what: &str) -> Result<T, PatternError> {
        Err(PatternError::Syntax(format!(
            "{what} at token {} (found {:?})",
            self.pos,
            self.peek()
        )))
    }

    fn pattern(&mut self) -> Result<Pattern, PatternError> {
        let mut root = self.node()?;
        while let Some(Tok::Rel(rel)) = self.peek().cloned() {
            self.pos += 1;
            let target = self.node()?;
            root.constraints.push((rel, target));
        }
        Ok(root)
    }

    fn node(&mut self) -> Result<Pattern, PatternError> {
        if self.peek() == Some(&Tok::Open) {
            self.pos += 1;
            let inner = self.pattern()?;
            if self.next() != Some(Tok::Close) {
                return self.err("expected ')'");
            }
            return Ok(inner);
        }
        let negated = if self.peek() == Some(&Tok::Bang) {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut alternatives = vec![self.alt()?];
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            alternatives.push(self.alt()?);
        }
        let capture = if self.peek() == Some(&Tok::Eq) {
            self.pos += 1;
            match self.next() {
                Some(Tok::Ident(name)) => Some(name),
                _ => return self.err("expected capture name"),
            }
        } else {
            None
        };
        Ok(Pattern {
            matcher: LabelMatcher { negated, alternatives },
            capture,
            constraints: Vec::new(),
        })
    }

    fn alt(&mut self) -> Result<LabelAlt, PatternError> {
        let label = match self.next() {
            Some(Tok::Ident(l)) => l,
            _ => return self.err("expected label"),
        };
        if label == "__" {
            return Ok(LabelAlt::Any);
        }
        match self.peek() {
            Some(Tok::Star) => {
                self.pos += 1;
                Ok(LabelAlt::Prefix(label))
            }
            Some(Tok::Colon) => {
                self.pos += 1;
                match self.next() {
                    Some(Tok::Ident(w)) => Ok(LabelAlt::WithForm(label, w)),
                    _ => self.err("expected word after ':'"),
                }
            }
            _ => Ok(LabelAlt::Exact(label)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treepat::parse_ptb;

    fn canonical() -> Tree {
        parse_ptb("(S (NP (DT the) (NN boy)) (VP (VBZ runs)))").unwrap()
    }

    fn count(p: &str, t: &Tree) -> usize {
        match_pattern(&Pattern::parse(p).unwrap(), t).len()
    }

    #[test]
    fn label_match() {
        assert_eq!(count("VP", &canonical()), 1);
        assert_eq!(count("__", &canonical()), 6);
        assert_eq!(count("NP|VP", &canonical()), 2);
        assert_eq!(count("!NP|VP", &canonical()), 4);
    }

    #[test]
    fn immediate_dominance() {
        assert_eq!(count("NP < NN", &canonical()), 1);
    }

    #[test]
    fn dominates_vs_immediately_dominates() {
        assert_eq!(count("S << VBZ", &canonical()), 1);
        assert_eq!(count("S < VBZ", &canonical()), 0);
    }

    #[test]
    fn leftmost_child_and_lacks() {
        let t = canonical();
        assert_eq!(count("S <, NP", &t), 1);
        assert_eq!(count("S <, VP", &t), 0);
        assert_eq!(count("NP !<< VBZ", &t), 1);
        assert_eq!(count("S !<< VBZ", &t), 0);
    }

    #[test]
    fn prefix_and_form_matchers() {
        let t = parse_ptb("(S (NP (PRP she)) (VP (VBD said) (SBAR (IN that) (S (NP (PRP he)) (VP (VBZ runs))))))").unwrap();
        assert_eq!(count("VB*", &t), 2);
        assert_eq!(count("SBAR <, IN:that", &t), 1);
        assert_eq!(count("SBAR <, IN:because", &t), 0);
    }

    #[test]
    fn nested_and_conjoined_constraints() {
        let t = canonical();
        assert_eq!(count("S < (NP < DT < NN) < VP", &t), 1);
        assert_eq!(count("S < (NP < VBZ)", &t), 0);
    }

    #[test]
    fn captures_collect_every_binding() {
        let t = parse_ptb("(S (VP (VB a)) (VP (VB b)) (NP (NN c)))").unwrap();
        let p = Pattern::parse("S < VP=v").unwrap();
        assert_eq!(p.captured(&t, "v").len(), 2);
        assert_eq!(p.counted(&t).len(), 2);
        assert_eq!(Pattern::parse("S < VP").unwrap().counted(&t).len(), 1);
    }

    #[test]
    fn function_tags_are_ignored() {
        let t = parse_ptb("(S (NP-SBJ (NN x)) (VP (VBZ y)))").unwrap();
        assert_eq!(count("S < NP", &t), 1);
    }

    #[test]
    fn display_round_trips() {
        for src in ["S < (NP < DT < NN) < VP", "SBAR=d <, IN:that !<< VB*", "!NP < (NP=n << JJ|POS)"] {
            let p = Pattern::parse(src).unwrap();
            assert_eq!(Pattern::parse(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn syntax_errors() {
        for bad in ["", "S <", "(S", "S < )", "S = ", "S ~ NP"] {
            assert!(Pattern::parse(bad).is_err(), "{bad:?}");
        }
    }
}
