//! The clone of terms: family algebra, Hall and Bénabou operation symbols,
//! evaluation of clone terms and the word problem for the free theories.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{Op, OperationSymbol, Sort, SortedSet, Word};
use crate::terms::{Equation, Term, TermFamily, Tree};

/// `π_i^w = (v_i) : w -> (w_i)`.
pub fn family_project(w: &Word, i: usize) -> Result<TermFamily> {
    let s = w.get(i)?.clone();
    Ok(TermFamily::new_unchecked(w.clone(), Word::singleton(s), vec![Tree::Var(i)]))
}

/// Generalized tupling `⟨P_0, ..., P_{n-1}⟩ : u -> w_0 ... w_{n-1}` of families on a common domain.
pub fn family_tuple(u: &Word, parts: &[TermFamily]) -> Result<TermFamily> {
    let mut codomain = Word::empty();
    let mut components = Vec::new();
    for p in parts {
        if p.domain() != u {
            return Err(Error::DomainMismatch(format!("component on {} in a tuple on {u}", p.domain())));
        }
        codomain = codomain.concat(p.codomain());
        components.extend(p.components().iter().cloned());
    }
    Ok(TermFamily::new_unchecked(u.clone(), codomain, components))
}

/// `Q ∘ P` for `P : u -> v` and `Q : v -> w`.
pub fn family_compose(q: &TermFamily, p: &TermFamily) -> Result<TermFamily> {
    if q.domain() != p.codomain() {
        return Err(Error::DomainMismatch(format!("cannot compose a family on {} after one into {}", q.domain(), p.codomain())));
    }
    Ok(TermFamily::new_unchecked(
        p.domain().clone(),
        q.codomain().clone(),
        q.components().iter().map(|t| t.substitute(p.components())).collect(),
    ))
}

/// `P_0 ∧ ... ∧ P_{n-1} : u_0...u_{n-1} -> w_0...w_{n-1}`.
pub fn family_parallel(parts: &[TermFamily]) -> TermFamily {
    let mut domain = Word::empty();
    let mut codomain = Word::empty();
    let mut components = Vec::new();
    for p in parts {
        let offset = domain.len();
        components.extend(p.components().iter().map(|t| t.map_vars(&|i| i + offset)));
        domain = domain.concat(p.domain());
        codomain = codomain.concat(p.codomain());
    }
    TermFamily::new_unchecked(domain, codomain, components)
}

/// Operation symbols of the Hall signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HallSymbol {
    /// `π_i^w : λ -> (w, w_i)`.
    Project { word: Word, index: usize },
    /// `ξ_{u,w,s} : (w,s) (u,w_0) ... (u,w_{|w|-1}) -> (u,s)`.
    Substitute { u: Word, w: Word, s: Sort },
}

impl HallSymbol {
    pub fn name(&self) -> String {
        match self {
            HallSymbol::Project { word, index } => format!("pi_{index}[{word}]"),
            HallSymbol::Substitute { u, w, s } => format!("xi[{u} {w} {s}]"),
        }
    }

    pub fn arity(&self) -> Word {
        match self {
            HallSymbol::Project { .. } => Word::empty(),
            HallSymbol::Substitute { u, w, s } => {
                let mut a = Word::singleton(Sort::hall(w.clone(), s.clone()));
                for t in w {
                    a.push(Sort::hall(u.clone(), t.clone()));
                }
                a
            }
        }
    }

    pub fn coarity(&self) -> Sort {
        match self {
            HallSymbol::Project { word, index } => Sort::hall(word.clone(), word[*index].clone()),
            HallSymbol::Substitute { u, s, .. } => Sort::hall(u.clone(), s.clone()),
        }
    }

    pub fn to_op(&self) -> Op {
        Arc::new(OperationSymbol { name: self.name().into(), arity: self.arity(), coarity: self.coarity() })
    }

    /// Recognizes a generated Hall symbol.
    pub fn decode(op: &OperationSymbol) -> Option<HallSymbol> {
        let sym = if let Some(rest) = op.name.strip_prefix("pi_") {
            let index: usize = rest[..rest.find('[')?].parse().ok()?;
            let (word, _) = op.coarity.as_hall()?;
            if index >= word.len() {
                return None;
            }
            HallSymbol::Project { word: word.clone(), index }
        } else if op.name.starts_with("xi[") {
            let (u, s) = op.coarity.as_hall()?;
            let (w, _) = op.arity.as_slice().first()?.as_hall()?;
            HallSymbol::Substitute { u: u.clone(), w: w.clone(), s: s.clone() }
        } else {
            return None;
        };
        let ok = *op.name == *sym.name() && op.arity == sym.arity() && op.coarity == sym.coarity();
        ok.then_some(sym)
    }
}

/// Operation symbols of the Bénabou signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BenabouSymbol {
    /// `π_i^w : λ -> (w, (w_i))`.
    Project { word: Word, index: usize },
    /// `⟨⟩_{u,w} : (u,(w_0)) ... (u,(w_{|w|-1})) -> (u,w)`.
    Tuple { u: Word, w: Word },
    /// `∘_{u,x,w} : (u,x) (x,w) -> (u,w)`.
    Compose { u: Word, x: Word, w: Word },
}

impl BenabouSymbol {
    pub fn name(&self) -> String {
        match self {
            BenabouSymbol::Project { word, index } => format!("pi_{index}[{word}]"),
            BenabouSymbol::Tuple { u, w } => format!("tup[{u} {w}]"),
            BenabouSymbol::Compose { u, x, w } => format!("comp[{u} {x} {w}]"),
        }
    }

    pub fn arity(&self) -> Word {
        match self {
            BenabouSymbol::Project { .. } => Word::empty(),
            BenabouSymbol::Tuple { u, w } => w.iter().map(|t| Sort::benabou(u.clone(), Word::singleton(t.clone()))).collect(),
            BenabouSymbol::Compose { u, x, w } => {
                Word::from(vec![Sort::benabou(u.clone(), x.clone()), Sort::benabou(x.clone(), w.clone())])
            }
        }
    }

    pub fn coarity(&self) -> Sort {
        match self {
            BenabouSymbol::Project { word, index } => Sort::benabou(word.clone(), Word::singleton(word[*index].clone())),
            BenabouSymbol::Tuple { u, w } | BenabouSymbol::Compose { u, w, .. } => Sort::benabou(u.clone(), w.clone()),
        }
    }

    pub fn to_op(&self) -> Op {
        Arc::new(OperationSymbol { name: self.name().into(), arity: self.arity(), coarity: self.coarity() })
    }

    pub fn decode(op: &OperationSymbol) -> Option<BenabouSymbol> {
        let sym = if let Some(rest) = op.name.strip_prefix("pi_") {
            let index: usize = rest[..rest.find('[')?].parse().ok()?;
            let (word, _) = op.coarity.as_benabou()?;
            if index >= word.len() {
                return None;
            }
            BenabouSymbol::Project { word: word.clone(), index }
        } else if op.name.starts_with("tup[") {
            let (u, w) = op.coarity.as_benabou()?;
            BenabouSymbol::Tuple { u: u.clone(), w: w.clone() }
        } else if op.name.starts_with("comp[") {
            let (u, w) = op.coarity.as_benabou()?;
            let (_, x) = op.arity.as_slice().first()?.as_benabou()?;
            BenabouSymbol::Compose { u: u.clone(), x: x.clone(), w: w.clone() }
        } else {
            return None;
        };
        let ok = *op.name == *sym.name() && op.arity == sym.arity() && op.coarity == sym.coarity();
        ok.then_some(sym)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CloneFlavor {
    Hall,
    Benabou,
}

/// Type of the family interpreting a clone variable: `(w,s)` gives `w -> (s)`,
/// `(u,w)` gives `u -> w`.
pub fn family_type(flavor: CloneFlavor, sort: &Sort) -> Result<(Word, Word)> {
    match flavor {
        CloneFlavor::Hall => sort
            .as_hall()
            .map(|(w, s)| (w.clone(), Word::singleton(s.clone())))
            .ok_or_else(|| Error::TypingError(format!("`{sort}` is not a Hall sort"))),
        CloneFlavor::Benabou => sort
            .as_benabou()
            .map(|(u, w)| (u.clone(), w.clone()))
            .ok_or_else(|| Error::TypingError(format!("`{sort}` is not a Bénabou sort"))),
    }
}

/// Assignment of term families to the variables of a clone term's context, by position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CloneEnv {
    pub families: Vec<TermFamily>,
}

impl CloneEnv {
    pub fn new(families: Vec<TermFamily>) -> CloneEnv {
        CloneEnv { families }
    }

    fn check(&self, flavor: CloneFlavor, ctx: &SortedSet) -> Result<()> {
        for (i, v) in ctx.vars().iter().enumerate() {
            let f = self.families.get(i).ok_or(Error::UnboundCloneVariable(i))?;
            let (dom, cod) = family_type(flavor, &v.sort)?;
            if f.domain() != &dom || f.codomain() != &cod {
                return Err(Error::DomainMismatch(format!(
                    "variable {} : {} bound to a family {} -> {}",
                    v.name,
                    v.sort,
                    f.domain(),
                    f.codomain()
                )));
            }
        }
        Ok(())
    }
}

fn eval_tree(flavor: CloneFlavor, tree: &Tree, env: &[TermFamily]) -> Result<TermFamily> {
    match tree {
        Tree::Var(i) => env.get(*i).cloned().ok_or(Error::UnboundCloneVariable(*i)),
        Tree::App(op, args) => {
            let vals = args.iter().map(|a| eval_tree(flavor, a, env)).collect::<Result<Vec<_>>>()?;
            match flavor {
                CloneFlavor::Hall => match HallSymbol::decode(op) {
                    Some(HallSymbol::Project { word, index }) => family_project(&word, index),
                    Some(HallSymbol::Substitute { u, .. }) => family_compose(&vals[0], &family_tuple(&u, &vals[1..])?),
                    None => Err(Error::SignatureMismatch(format!("`{}` is not a Hall operation", op.name))),
                },
                CloneFlavor::Benabou => match BenabouSymbol::decode(op) {
                    Some(BenabouSymbol::Project { word, index }) => family_project(&word, index),
                    Some(BenabouSymbol::Tuple { u, .. }) => family_tuple(&u, &vals),
                    Some(BenabouSymbol::Compose { .. }) => family_compose(&vals[1], &vals[0]),
                    None => Err(Error::SignatureMismatch(format!("`{}` is not a Bénabou operation", op.name))),
                },
            }
        }
    }
}

/// Evaluates a term over the Hall signature in the Hall algebra of terms.
/// The result for a term of sort `(w,s)` is a family `w -> (s)`.
pub fn eval_hall(t: &Term, env: &CloneEnv) -> Result<TermFamily> {
    env.check(CloneFlavor::Hall, t.context())?;
    eval_tree(CloneFlavor::Hall, t.tree(), &env.families)
}

/// Evaluates a term over the Bénabou signature in the Bénabou algebra of terms.
pub fn eval_benabou(t: &Term, env: &CloneEnv) -> Result<TermFamily> {
    env.check(CloneFlavor::Benabou, t.context())?;
    eval_tree(CloneFlavor::Benabou, t.tree(), &env.families)
}

pub fn eval_clone(flavor: CloneFlavor, t: &Term, env: &CloneEnv) -> Result<TermFamily> {
    match flavor {
        CloneFlavor::Hall => eval_hall(t, env),
        CloneFlavor::Benabou => eval_benabou(t, env),
    }
}

/// The generic environment: each clone variable becomes a family built from
/// fresh generators applied to the canonical variables of its domain.
pub fn generic_env(flavor: CloneFlavor, ctx: &SortedSet) -> Result<CloneEnv> {
    let mut families = Vec::with_capacity(ctx.len());
    for (k, v) in ctx.vars().iter().enumerate() {
        let (dom, cod) = family_type(flavor, &v.sort)?;
        let args: Vec<Tree> = (0..dom.len()).map(Tree::Var).collect();
        let components = cod
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let name = match flavor {
                    CloneFlavor::Hall => format!("g{k}"),
                    CloneFlavor::Benabou => format!("g{k}_{i}"),
                };
                let op = Arc::new(OperationSymbol { name: name.into(), arity: dom.clone(), coarity: t.clone() });
                Tree::App(op, args.clone())
            })
            .collect();
        families.push(TermFamily::new_unchecked(dom, cod, components));
    }
    Ok(CloneEnv { families })
}

/// Decides `t1 = t2` in the free Hall (or Bénabou) algebra over the variables
/// of their common context.
pub fn equal_mod_free_theory(t1: &Term, t2: &Term, flavor: CloneFlavor) -> Result<bool> {
    if t1.context() != t2.context() {
        return Err(Error::ContextMismatch("clone terms over different contexts".into()));
    }
    if t1.sort() != t2.sort() {
        return Err(Error::sort_mismatch(t1.sort(), t2.sort()));
    }
    let env = generic_env(flavor, t1.context())?;
    Ok(eval_clone(flavor, t1, &env)? == eval_clone(flavor, t2, &env)?)
}

/// Decides an equation of clone terms componentwise.
pub fn equation_holds_freely(eq: &Equation, flavor: CloneFlavor) -> Result<bool> {
    let env = generic_env(flavor, eq.context())?;
    for i in 0..eq.lhs().target().len() {
        let l = eval_tree(flavor, &eq.lhs().body()[i], &env.families)?;
        let r = eval_tree(flavor, &eq.rhs().body()[i], &env.families)?;
        if l != r {
            return Ok(false);
        }
    }
    Ok(true)
}
