//! Terms, term families, general terms and equations.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::kernel::{Op, Signature, Sort, SortedSet, Word};

/// Default limit on the depth of terms built through the checked constructors.
pub const DEFAULT_DEPTH_LIMIT: usize = 32;

/// A raw term tree. Variables are positions in an ambient context.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Tree {
    Var(usize),
    App(Op, Vec<Tree>),
}

impl Tree {
    pub fn app(op: &Op, args: Vec<Tree>) -> Tree {
        Tree::App(op.clone(), args)
    }

    /// Variables have depth 0, constants depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Tree::Var(_) => 0,
            Tree::App(_, args) => 1 + args.iter().map(Tree::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Tree::Var(_) => 1,
            Tree::App(_, args) => 1 + args.iter().map(Tree::size).sum::<usize>(),
        }
    }

    /// Simultaneous substitution of `images[i]` for variable `i`.
    pub fn substitute(&self, images: &[Tree]) -> Tree {
        match self {
            Tree::Var(i) => images[*i].clone(),
            Tree::App(op, args) => Tree::App(op.clone(), args.iter().map(|a| a.substitute(images)).collect()),
        }
    }

    pub fn map_vars(&self, f: &impl Fn(usize) -> usize) -> Tree {
        match self {
            Tree::Var(i) => Tree::Var(f(*i)),
            Tree::App(op, args) => Tree::App(op.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Tree::Var(i) => Some(*i),
            Tree::App(_, args) => args.iter().filter_map(Tree::max_var).max(),
        }
    }

    /// Sort of the tree over a context whose sorts are `ctx`, checking well-sortedness.
    pub fn sort_in(&self, ctx: &[Sort]) -> Result<Sort> {
        match self {
            Tree::Var(i) => ctx.get(*i).cloned().ok_or(Error::IndexOutOfRange { index: *i, len: ctx.len() }),
            Tree::App(op, args) => {
                if args.len() != op.arity.len() {
                    return Err(Error::ArityMismatch { op: op.name.to_string(), expected: op.arity.len(), got: args.len() });
                }
                for (a, expected) in args.iter().zip(op.arity.iter()) {
                    let got = a.sort_in(ctx)?;
                    if &got != expected {
                        return Err(Error::sort_mismatch(expected, got));
                    }
                }
                Ok(op.coarity.clone())
            }
        }
    }

    /// Checks that all operation symbols belong to `sig`.
    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        match self {
            Tree::Var(_) => Ok(()),
            Tree::App(op, args) => {
                if !sig.contains_op(op) {
                    return Err(Error::SignatureMismatch(format!("operation `{}` is not in the signature", op.name)));
                }
                args.iter().try_for_each(|a| a.check_signature(sig))
            }
        }
    }

    /// Renders the tree with the given variable names.
    pub fn render(&self, names: &dyn Fn(usize) -> String) -> String {
        let mut out = String::new();
        self.render_into(&mut out, names);
        out
    }

    fn render_into(&self, out: &mut String, names: &dyn Fn(usize) -> String) {
        match self {
            Tree::Var(i) => out.push_str(&names(*i)),
            Tree::App(op, args) => {
                out.push_str(&op.name);
                if !args.is_empty() {
                    out.push('(');
                    for (k, a) in args.iter().enumerate() {
                        if k > 0 {
                            out.push_str(", ");
                        }
                        a.render_into(out, names);
                    }
                    out.push(')');
                }
            }
        }
    }
}

pub fn positional_name(i: usize) -> String {
    format!("v{i}")
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&positional_name))
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A well-sorted term over a context.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term {
    context: SortedSet,
    sort: Sort,
    tree: Tree,
}

impl Term {
    pub fn var(context: &SortedSet, position: usize) -> Result<Term> {
        let v = context.get(position)?;
        Ok(Term { context: context.clone(), sort: v.sort.clone(), tree: Tree::Var(position) })
    }

    pub fn var_named(context: &SortedSet, name: &str, sort: Option<&Sort>) -> Result<Term> {
        Term::var(context, context.position(name, sort)?)
    }

    /// Applies `op` to `args`, all over `context`, with the default depth limit.
    pub fn app(context: &SortedSet, op: &Op, args: Vec<Term>) -> Result<Term> {
        Term::app_limited(context, op, args, DEFAULT_DEPTH_LIMIT)
    }

    pub fn app_limited(context: &SortedSet, op: &Op, args: Vec<Term>, limit: usize) -> Result<Term> {
        if args.len() != op.arity.len() {
            return Err(Error::ArityMismatch { op: op.name.to_string(), expected: op.arity.len(), got: args.len() });
        }
        let mut trees = Vec::with_capacity(args.len());
        for (a, expected) in args.into_iter().zip(op.arity.iter()) {
            if a.context != *context {
                return Err(Error::ContextMismatch(format!("argument of `{}` lives over {:?}", op.name, a.context)));
            }
            if &a.sort != expected {
                return Err(Error::sort_mismatch(expected, &a.sort));
            }
            trees.push(a.tree);
        }
        let tree = Tree::App(op.clone(), trees);
        if tree.depth() > limit {
            return Err(Error::DepthExceeded(limit));
        }
        Ok(Term { context: context.clone(), sort: op.coarity.clone(), tree })
    }

    /// Wraps a raw tree after checking it is well-sorted over `context`.
    pub fn from_tree(context: &SortedSet, tree: Tree) -> Result<Term> {
        let sort = tree.sort_in(context.sorts().as_slice())?;
        Ok(Term { context: context.clone(), sort, tree })
    }

    pub fn context(&self) -> &SortedSet {
        &self.context
    }

    pub fn sort(&self) -> &Sort {
        &self.sort
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn into_tree(self) -> Tree {
        self.tree
    }

    pub fn depth(&self) -> usize {
        self.tree.depth()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |i: usize| self.context.vars()[i].name.to_string();
        f.write_str(&self.tree.render(&names))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} ⊢ {} : {}", self.context, self, self.sort)
    }
}

/// A family `u -> w`: `|w|` terms over `↓u`, component `i` of sort `w_i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TermFamily {
    domain: Word,
    codomain: Word,
    components: Vec<Tree>,
}

impl TermFamily {
    pub fn new(domain: Word, codomain: Word, components: Vec<Tree>) -> Result<TermFamily> {
        if components.len() != codomain.len() {
            return Err(Error::DomainMismatch(format!(
                "family into {codomain} needs {} components, got {}",
                codomain.len(),
                components.len()
            )));
        }
        for (t, s) in components.iter().zip(codomain.iter()) {
            let got = t.sort_in(domain.as_slice())?;
            if &got != s {
                return Err(Error::sort_mismatch(s, got));
            }
        }
        Ok(TermFamily { domain, codomain, components })
    }

    pub(crate) fn new_unchecked(domain: Word, codomain: Word, components: Vec<Tree>) -> TermFamily {
        debug_assert_eq!(components.len(), codomain.len());
        TermFamily { domain, codomain, components }
    }

    /// Builds a family from terms over `↓u`.
    pub fn from_terms(domain: Word, terms: Vec<Term>) -> Result<TermFamily> {
        let ctx = SortedSet::canonical(&domain);
        let mut codomain = Word::empty();
        let mut components = Vec::with_capacity(terms.len());
        for t in terms {
            if t.context != ctx {
                return Err(Error::NonCanonicalContext(format!("component over {:?}, expected ↓{domain}", t.context)));
            }
            codomain.push(t.sort.clone());
            components.push(t.tree);
        }
        Ok(TermFamily { domain, codomain, components })
    }

    /// The identity family `(v0, ..., v_{|w|-1})`.
    pub fn identity(w: &Word) -> TermFamily {
        TermFamily { domain: w.clone(), codomain: w.clone(), components: (0..w.len()).map(Tree::Var).collect() }
    }

    pub fn domain(&self) -> &Word {
        &self.domain
    }

    pub fn codomain(&self) -> &Word {
        &self.codomain
    }

    pub fn components(&self) -> &[Tree] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Tree> {
        self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, i: usize) -> Result<Term> {
        let tree = self.components.get(i).ok_or(Error::IndexOutOfRange { index: i, len: self.components.len() })?;
        Ok(Term { context: SortedSet::canonical(&self.domain), sort: self.codomain[i].clone(), tree: tree.clone() })
    }

    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        sig.check_word(&self.domain)?;
        sig.check_word(&self.codomain)?;
        self.components.iter().try_for_each(|t| t.check_signature(sig))
    }
}

impl fmt::Display for TermFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, t) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for TermFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} -> {}", self, self.domain, self.codomain)
    }
}

/// Substitutes the components of `q : u -> w` for the variables of `p` over `↓w`.
pub fn substitute(p: &Term, q: &TermFamily) -> Result<Term> {
    if p.context != SortedSet::canonical(&q.codomain) {
        return Err(Error::ContextMismatch(format!("term over {:?} cannot take a family into {}", p.context, q.codomain)));
    }
    Ok(Term { context: SortedSet::canonical(&q.domain), sort: p.sort.clone(), tree: p.tree.substitute(&q.components) })
}

/// A general term `X -> Y`: one term over `X` for each variable of `Y`, of matching sort.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GeneralTerm {
    source: SortedSet,
    target: SortedSet,
    body: Vec<Tree>,
}

impl GeneralTerm {
    pub fn new(source: SortedSet, target: SortedSet, body: Vec<Tree>) -> Result<GeneralTerm> {
        if body.len() != target.len() {
            return Err(Error::DomainMismatch(format!("general term into {:?} needs {} terms", target, target.len())));
        }
        let ctx = source.sorts();
        for (t, y) in body.iter().zip(target.vars()) {
            let got = t.sort_in(ctx.as_slice())?;
            if got != y.sort {
                return Err(Error::sort_mismatch(&y.sort, got));
            }
        }
        Ok(GeneralTerm { source, target, body })
    }

    pub(crate) fn new_unchecked(source: SortedSet, target: SortedSet, body: Vec<Tree>) -> GeneralTerm {
        GeneralTerm { source, target, body }
    }

    /// The unit `η_X`.
    pub fn identity(x: &SortedSet) -> GeneralTerm {
        GeneralTerm { source: x.clone(), target: x.clone(), body: (0..x.len()).map(Tree::Var).collect() }
    }

    /// A general term with a single target variable `v0`.
    pub fn from_term(t: &Term) -> GeneralTerm {
        GeneralTerm {
            source: t.context.clone(),
            target: SortedSet::canonical(&Word::singleton(t.sort.clone())),
            body: vec![t.tree.clone()],
        }
    }

    pub fn source(&self) -> &SortedSet {
        &self.source
    }

    pub fn target(&self) -> &SortedSet {
        &self.target
    }

    pub fn body(&self) -> &[Tree] {
        &self.body
    }

    pub fn term(&self, i: usize) -> Result<Term> {
        let y = self.target.get(i)?;
        Ok(Term { context: self.source.clone(), sort: y.sort.clone(), tree: self.body[i].clone() })
    }

    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        sig.check_word(&self.source.sorts())?;
        sig.check_word(&self.target.sorts())?;
        self.body.iter().try_for_each(|t| t.check_signature(sig))
    }
}

impl fmt::Debug for GeneralTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |i: usize| self.source.vars()[i].name.to_string();
        write!(f, "{:?} -> {:?} [", self.source, self.target)?;
        for (i, t) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&t.render(&names))?;
        }
        f.write_str("]")
    }
}

/// Kleisli composition `q ◇ p` for `p : X -> Y` and `q : Y -> Z`.
pub fn kleisli_compose(q: &GeneralTerm, p: &GeneralTerm) -> Result<GeneralTerm> {
    if q.source != p.target {
        return Err(Error::ContextMismatch(format!("cannot compose {:?} after a term into {:?}", q.source, p.target)));
    }
    Ok(GeneralTerm {
        source: p.source.clone(),
        target: q.target.clone(),
        body: q.body.iter().map(|t| t.substitute(&p.body)).collect(),
    })
}

/// The general term `↓u -> ↓w` of a family.
pub fn general_from_family(p: &TermFamily) -> GeneralTerm {
    GeneralTerm {
        source: SortedSet::canonical(&p.domain),
        target: SortedSet::canonical(&p.codomain),
        body: p.components.clone(),
    }
}

/// The family of a general term between canonical contexts.
pub fn family_from_general(p: &GeneralTerm) -> Result<TermFamily> {
    let domain = p.source.canonical_word()?;
    let codomain = p.target.canonical_word()?;
    Ok(TermFamily { domain, codomain, components: p.body.clone() })
}

/// A pair of parallel general terms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Equation {
    lhs: GeneralTerm,
    rhs: GeneralTerm,
}

impl Equation {
    pub fn new(lhs: GeneralTerm, rhs: GeneralTerm) -> Result<Equation> {
        if lhs.source != rhs.source || lhs.target != rhs.target {
            return Err(Error::ContextMismatch("equation sides are not parallel".into()));
        }
        Ok(Equation { lhs, rhs })
    }

    pub fn from_terms(p: &Term, q: &Term) -> Result<Equation> {
        if p.context != q.context {
            return Err(Error::ContextMismatch("equation sides live over different contexts".into()));
        }
        if p.sort != q.sort {
            return Err(Error::sort_mismatch(&p.sort, &q.sort));
        }
        Equation::new(GeneralTerm::from_term(p), GeneralTerm::from_term(q))
    }

    pub fn lhs(&self) -> &GeneralTerm {
        &self.lhs
    }

    pub fn rhs(&self) -> &GeneralTerm {
        &self.rhs
    }

    pub fn context(&self) -> &SortedSet {
        &self.lhs.source
    }

    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        self.lhs.check_signature(sig)?;
        self.rhs.check_signature(sig)
    }
}

/// Which theory a specification presents. The generated clone theories carry
/// their parameters so that equality modulo them can be decided exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoryKind {
    Plain,
    Hall { sorts: Vec<Sort>, bound: usize },
    Benabou { sorts: Vec<Sort>, bound: usize },
}

/// A signature with named equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Specification {
    pub signature: Signature,
    pub equations: IndexMap<Arc<str>, Equation>,
    pub kind: TheoryKind,
}

impl Specification {
    pub fn new(signature: Signature) -> Specification {
        Specification { signature, equations: IndexMap::new(), kind: TheoryKind::Plain }
    }

    pub fn add_equation(&mut self, name: &str, eq: Equation) -> Result<()> {
        eq.check_signature(&self.signature)?;
        if self.equations.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        self.equations.insert(name.into(), eq);
        Ok(())
    }
}
