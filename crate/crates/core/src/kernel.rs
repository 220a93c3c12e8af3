//! Sorts, words, sorted variable sets, sort maps and signatures.

use std::fmt;
use std::sync::Arc;

use indexmap::{IndexMap, IndexSet};

use crate::error::{Error, Result};

/// A sort. Base sorts are plain names; the clone constructions produce
/// structured sorts whose canonical text is `(w s)` for Hall sorts and
/// `(u w)` for Bénabou sorts. Equality coincides with equality of the
/// canonical text.
#[derive(Clone)]
pub struct Sort(Arc<SortRepr>);

#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SortRepr {
    Base(Box<str>),
    Hall(Word, Sort),
    Benabou(Word, Word),
}

impl Sort {
    pub fn new(name: &str) -> Result<Sort> {
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || "()[];,".contains(c)) {
            return Err(Error::UnknownSort(name.to_string()));
        }
        Ok(Sort(Arc::new(SortRepr::Base(name.into()))))
    }

    /// Hall sort `(w, s)`: operations `A_w -> A_s`.
    pub fn hall(w: Word, s: Sort) -> Sort {
        Sort(Arc::new(SortRepr::Hall(w, s)))
    }

    /// Bénabou sort `(u, w)`: morphisms `u -> w`.
    pub fn benabou(u: Word, w: Word) -> Sort {
        Sort(Arc::new(SortRepr::Benabou(u, w)))
    }

    pub fn repr(&self) -> &SortRepr {
        &self.0
    }

    pub fn as_hall(&self) -> Option<(&Word, &Sort)> {
        match &*self.0 {
            SortRepr::Hall(w, s) => Some((w, s)),
            _ => None,
        }
    }

    pub fn as_benabou(&self) -> Option<(&Word, &Word)> {
        match &*self.0 {
            SortRepr::Benabou(u, w) => Some((u, w)),
            _ => None,
        }
    }

    /// Parses the canonical text of a sort.
    pub fn parse(text: &str) -> Result<Sort> {
        let item = parse_group_text(text)?;
        item_to_sort(&item).ok_or_else(|| Error::UnknownSort(text.to_string()))
    }
}

impl PartialEq for Sort {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for Sort {}

impl std::hash::Hash for Sort {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl PartialOrd for Sort {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Sort {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            SortRepr::Base(n) => f.write_str(n),
            SortRepr::Hall(w, s) => write!(f, "({w} {s})"),
            SortRepr::Benabou(u, w) => write!(f, "({u} {w})"),
        }
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sort({self})")
    }
}

#[derive(Debug)]
enum Item {
    Atom(String),
    Group(Vec<Item>),
}

fn parse_group_text(text: &str) -> Result<Item> {
    let mut tokens = Vec::new();
    let mut atom = String::new();
    for c in text.chars() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if !atom.is_empty() {
                tokens.push(std::mem::take(&mut atom));
            }
            if !c.is_whitespace() {
                tokens.push(c.to_string());
            }
        } else {
            atom.push(c);
        }
    }
    if !atom.is_empty() {
        tokens.push(atom);
    }
    let mut pos = 0;
    let item = parse_item(&tokens, &mut pos).ok_or_else(|| Error::UnknownSort(text.to_string()))?;
    if pos != tokens.len() {
        return Err(Error::UnknownSort(text.to_string()));
    }
    Ok(item)
}

fn parse_item(tokens: &[String], pos: &mut usize) -> Option<Item> {
    let tok = tokens.get(*pos)?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                if tokens.get(*pos)? == ")" {
                    *pos += 1;
                    return Some(Item::Group(items));
                }
                items.push(parse_item(tokens, pos)?);
            }
        }
        ")" => None,
        a => Some(Item::Atom(a.to_string())),
    }
}

fn item_to_sort(item: &Item) -> Option<Sort> {
    match item {
        Item::Atom(a) => Sort::new(a).ok(),
        Item::Group(items) if items.len() == 2 => {
            let w = item_to_word(&items[0])?;
            if let Some(s) = item_to_sort(&items[1]) {
                Some(Sort::hall(w, s))
            } else {
                item_to_word(&items[1]).map(|v| Sort::benabou(w, v))
            }
        }
        Item::Group(_) => None,
    }
}

fn item_to_word(item: &Item) -> Option<Word> {
    match item {
        Item::Atom(_) => None,
        Item::Group(items) => items.iter().map(item_to_sort).collect::<Option<Vec<_>>>().map(Word::from),
    }
}

/// A finite sequence of sorts.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Sort>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn singleton(s: Sort) -> Word {
        Word(vec![s])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Result<&Sort> {
        self.0.get(i).ok_or(Error::IndexOutOfRange { index: i, len: self.0.len() })
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sort> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Sort] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    pub fn concat_all<'a>(words: impl IntoIterator<Item = &'a Word>) -> Word {
        Word(words.into_iter().flat_map(|w| w.0.iter().cloned()).collect())
    }

    pub fn push(&mut self, s: Sort) {
        self.0.push(s)
    }

    /// Parses `(s t ...)`.
    pub fn parse(text: &str) -> Result<Word> {
        let item = parse_group_text(text)?;
        item_to_word(&item).ok_or_else(|| Error::UnknownSort(text.to_string()))
    }

    /// All words over `sorts` of length at most `bound`, shortest first, then
    /// lexicographic in the order of `sorts`.
    pub fn all_up_to(sorts: &[Sort], bound: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..bound {
            let mut next = Vec::new();
            for w in &layer {
                for s in sorts {
                    let mut v = w.clone();
                    v.push(s.clone());
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

impl From<Vec<Sort>> for Word {
    fn from(v: Vec<Sort>) -> Self {
        Word(v)
    }
}

impl FromIterator<Sort> for Word {
    fn from_iter<I: IntoIterator<Item = Sort>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Sort;
    type IntoIter = std::slice::Iter<'a, Sort>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl std::ops::Index<usize> for Word {
    type Output = Sort;
    fn index(&self, i: usize) -> &Sort {
        &self.0[i]
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word{self}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: Arc<str>,
    pub sort: Sort,
}

/// A finite sorted set of variables in a fixed global order.
/// Names are unique within each sort.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SortedSet {
    vars: Arc<Vec<Variable>>,
}

impl SortedSet {
    pub fn new(vars: Vec<Variable>) -> Result<SortedSet> {
        let mut seen = std::collections::HashSet::new();
        for v in &vars {
            if !seen.insert((v.name.clone(), v.sort.clone())) {
                return Err(Error::DuplicateName(format!("{}:{}", v.name, v.sort)));
            }
        }
        Ok(SortedSet { vars: Arc::new(vars) })
    }

    /// The canonical context `↓w`: variables `v0, v1, ...` with `v_i : w_i`.
    pub fn canonical(w: &Word) -> SortedSet {
        let vars = w
            .iter()
            .enumerate()
            .map(|(i, s)| Variable { name: format!("v{i}").into(), sort: s.clone() })
            .collect();
        SortedSet { vars: Arc::new(vars) }
    }

    pub fn empty() -> SortedSet {
        SortedSet { vars: Arc::new(Vec::new()) }
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn get(&self, i: usize) -> Result<&Variable> {
        self.vars.get(i).ok_or(Error::IndexOutOfRange { index: i, len: self.vars.len() })
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    /// The word of sorts in global order.
    pub fn sorts(&self) -> Word {
        self.vars.iter().map(|v| v.sort.clone()).collect()
    }

    /// Variables of sort `s`, in order.
    pub fn of_sort<'a>(&'a self, s: &'a Sort) -> impl Iterator<Item = (usize, &'a Variable)> + 'a {
        self.vars.iter().enumerate().filter(move |(_, v)| &v.sort == s)
    }

    pub fn position(&self, name: &str, sort: Option<&Sort>) -> Result<usize> {
        let mut hits = self
            .vars
            .iter()
            .enumerate()
            .filter(|(_, v)| &*v.name == name && sort.map_or(true, |s| &v.sort == s));
        match (hits.next(), hits.next()) {
            (Some((i, _)), None) => Ok(i),
            (Some(_), Some(_)) => Err(Error::UnknownVariable(format!("{name} is ambiguous; give its sort"))),
            _ => Err(Error::UnknownVariable(name.to_string())),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.vars.iter().enumerate().all(|(i, v)| *v.name == *format!("v{i}"))
    }

    /// The word `w` with `self == ↓w`.
    pub fn canonical_word(&self) -> Result<Word> {
        if self.is_canonical() {
            Ok(self.sorts())
        } else {
            Err(Error::NonCanonicalContext(format!("{self:?}")))
        }
    }
}

impl fmt::Debug for SortedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", v.name, v.sort)?;
        }
        f.write_str("}")
    }
}

/// A map `φ: S -> T*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortMap {
    images: IndexMap<Sort, Word>,
}

impl SortMap {
    pub fn new(images: IndexMap<Sort, Word>) -> SortMap {
        SortMap { images }
    }

    pub fn get(&self, s: &Sort) -> Result<&Word> {
        self.images.get(s).ok_or_else(|| Error::UnknownSort(s.to_string()))
    }

    pub fn images(&self) -> &IndexMap<Sort, Word> {
        &self.images
    }

    /// `φ♯(w) = φ(w_0) ... φ(w_{n-1})`.
    pub fn apply_sharp(&self, w: &Word) -> Result<Word> {
        let mut out = Word::empty();
        for s in w {
            for t in self.get(s)? {
                out.push(t.clone());
            }
        }
        Ok(out)
    }

    /// Offsets of each block of `φ♯(w)`; the last entry is the total length.
    pub fn block_offsets(&self, w: &Word) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(w.len() + 1);
        let mut acc = 0;
        out.push(0);
        for s in w {
            acc += self.get(s)?.len();
            out.push(acc);
        }
        Ok(out)
    }

    /// `∐†_φ X`: one variable `(x,s,i)` of sort `φ(s)_i` for each `x : s` in `X`
    /// and each `i < |φ(s)|`, ordered by `x` then `i`.
    pub fn coproduct_dagger(&self, x: &SortedSet) -> Result<SortedSet> {
        let mut vars = Vec::new();
        for v in x.vars() {
            for (i, t) in self.get(&v.sort)?.iter().enumerate() {
                vars.push(Variable { name: format!("({},{},{})", v.name, v.sort, i).into(), sort: t.clone() });
            }
        }
        SortedSet::new(vars)
    }

    /// `(ψ ∘ φ)(s) = ψ♯(φ(s))`.
    pub fn then(&self, psi: &SortMap) -> Result<SortMap> {
        let mut images = IndexMap::new();
        for (s, w) in &self.images {
            images.insert(s.clone(), psi.apply_sharp(w)?);
        }
        Ok(SortMap { images })
    }

    pub fn identity(sorts: &IndexSet<Sort>) -> SortMap {
        SortMap { images: sorts.iter().map(|s| (s.clone(), Word::singleton(s.clone()))).collect() }
    }
}

/// An operation symbol `σ : w -> s`.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct OperationSymbol {
    pub name: Arc<str>,
    pub arity: Word,
    pub coarity: Sort,
}

pub type Op = Arc<OperationSymbol>;

/// An S-sorted signature.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    sorts: IndexSet<Sort>,
    ops: IndexMap<Arc<str>, Op>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.sorts == other.sorts
            && self.ops.len() == other.ops.len()
            && self.ops.iter().all(|(k, v)| other.ops.get(k).is_some_and(|o| ops_equal(o, v)))
    }
}
impl Eq for Signature {}

pub fn ops_equal(a: &Op, b: &Op) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Signature {
    pub fn new(sorts: impl IntoIterator<Item = Sort>) -> Signature {
        Signature { sorts: sorts.into_iter().collect(), ops: IndexMap::new() }
    }

    pub fn add_sort(&mut self, s: Sort) -> Result<()> {
        if !self.sorts.insert(s.clone()) {
            return Err(Error::DuplicateName(s.to_string()));
        }
        Ok(())
    }

    pub fn add_op(&mut self, name: &str, arity: Word, coarity: Sort) -> Result<Op> {
        if !is_valid_op_name(name) {
            return Err(Error::TypingError(format!("invalid operation name `{name}`")));
        }
        for s in arity.iter().chain(std::iter::once(&coarity)) {
            self.check_sort(s)?;
        }
        if self.ops.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        let op = Arc::new(OperationSymbol { name: name.into(), arity, coarity });
        self.ops.insert(op.name.clone(), op.clone());
        Ok(op)
    }

    pub fn check_sort(&self, s: &Sort) -> Result<()> {
        if self.sorts.contains(s) {
            Ok(())
        } else {
            Err(Error::UnknownSort(s.to_string()))
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        w.iter().try_for_each(|s| self.check_sort(s))
    }

    pub fn sorts(&self) -> &IndexSet<Sort> {
        &self.sorts
    }

    pub fn ops(&self) -> impl Iterator<Item = &Op> {
        self.ops.values()
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    pub fn op(&self, name: &str) -> Result<&Op> {
        self.ops.get(name).ok_or_else(|| Error::UnresolvedName(name.to_string()))
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.get_index_of(name)
    }

    pub fn op_at(&self, i: usize) -> &Op {
        &self.ops[i]
    }

    /// Checks that `op` is a symbol of this signature with the same typing.
    pub fn contains_op(&self, op: &Op) -> bool {
        self.ops.get(&op.name).is_some_and(|o| ops_equal(o, op))
    }
}

/// Operation names: an identifier optionally followed by one bracketed suffix,
/// e.g. `add` or `xi[(s) (s s) s]`. Names of the form `v<digits>` are reserved
/// for variables.
pub fn is_valid_op_name(name: &str) -> bool {
    let (head, tail) = match name.find('[') {
        Some(i) => (&name[..i], Some(&name[i..])),
        None => (name, None),
    };
    let mut chars = head.chars();
    let ident_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    let reserved = head.len() > 1 && head.starts_with('v') && head[1..].chars().all(|c| c.is_ascii_digit());
    let tail_ok = tail.map_or(true, |t| {
        t.ends_with(']') && {
            let inner = &t[1..t.len() - 1];
            let mut depth = 0i32;
            inner.chars().all(|c| {
                match c {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    '[' | ']' | ';' | ',' | '{' | '}' => return false,
                    _ => {}
                }
                depth >= 0
            }) && depth == 0
        }
    });
    ident_ok && !reserved && tail_ok
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> Sort {
        Sort::new(n).unwrap()
    }

    #[test]
    fn sort_text_roundtrip() {
        let w = Word::from(vec![s("s"), s("t")]);
        let h = Sort::hall(w.clone(), s("s"));
        let b = Sort::benabou(Word::singleton(s("s")), w.clone());
        assert_eq!(h.to_string(), "((s t) s)");
        assert_eq!(b.to_string(), "((s) (s t))");
        assert_eq!(Sort::parse("((s t) s)").unwrap(), h);
        assert_eq!(Sort::parse("((s) (s t))").unwrap(), b);
        assert_eq!(Sort::parse("(() ())").unwrap(), Sort::benabou(Word::empty(), Word::empty()));
        assert_eq!(Sort::parse("(() s)").unwrap(), Sort::hall(Word::empty(), s("s")));
        let nested = Sort::hall(Word::singleton(h.clone()), b.clone());
        assert_eq!(Sort::parse(&nested.to_string()).unwrap(), nested);
        assert!(Sort::parse("(s t)").is_err());
    }

    #[test]
    fn sharp_and_dagger() {
        let mut images = IndexMap::new();
        images.insert(s("a"), Word::from(vec![s("x"), s("y")]));
        images.insert(s("b"), Word::empty());
        let phi = SortMap::new(images);
        let w = Word::from(vec![s("a"), s("b"), s("a")]);
        assert_eq!(phi.apply_sharp(&w).unwrap().to_string(), "(x y x y)");
        assert_eq!(phi.block_offsets(&w).unwrap(), vec![0, 2, 2, 4]);
        let ctx = SortedSet::canonical(&w);
        let d = phi.coproduct_dagger(&ctx).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(&*d.get(3).unwrap().name, "(v2,a,1)");
        assert_eq!(d.get(3).unwrap().sort, s("y"));
        assert!(matches!(phi.apply_sharp(&Word::singleton(s("c"))), Err(Error::UnknownSort(_))));
    }

    #[test]
    fn words_up_to_bound() {
        let ws = Word::all_up_to(&[s("s"), s("t")], 2);
        assert_eq!(ws.len(), 7);
        assert_eq!(ws[0], Word::empty());
        assert_eq!(ws[3].to_string(), "(s s)");
    }

    #[test]
    fn op_names() {
        assert!(is_valid_op_name("add"));
        assert!(is_valid_op_name("xi[(s) (s s) s]"));
        assert!(is_valid_op_name("pi_0[()]"));
        assert!(!is_valid_op_name("v3"));
        assert!(is_valid_op_name("v"));
        assert!(!is_valid_op_name("3x"));
        assert!(!is_valid_op_name("a[(]"));
    }

    #[test]
    fn signature_rejects_unknown_sorts() {
        let mut sig = Signature::new([s("s")]);
        assert!(sig.add_op("f", Word::singleton(s("s")), s("s")).is_ok());
        assert!(matches!(sig.add_op("g", Word::empty(), s("t")), Err(Error::UnknownSort(_))));
        assert!(matches!(sig.add_op("f", Word::empty(), s("s")), Err(Error::DuplicateName(_))));
    }
}
