//! Polyderivators: term translation, composition, reducts and the
//! satisfaction condition.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::algebras::{checked_product, decode, encode, tuple_label, Compiled, FiniteAlgebra, TABLE_ROW_CAP};
use crate::clones::{equation_holds_freely, CloneFlavor};
use crate::error::{Error, Result};
use crate::kernel::{Signature, Sort, SortMap, SortedSet, Word};
use crate::terms::{Equation, GeneralTerm, Specification, Term, TermFamily, TheoryKind, Tree};

/// A polyderivator `(φ, d) : Σ -> Λ`: each sort goes to a word and each
/// operation `σ : w -> s` to a family `φ♯(w) -> φ(s)` of Λ-terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyderivator {
    source: Signature,
    target: Signature,
    sort_map: SortMap,
    images: IndexMap<Arc<str>, TermFamily>,
}

impl Polyderivator {
    pub fn new(
        source: Signature,
        target: Signature,
        sort_map: IndexMap<Sort, Word>,
        images: IndexMap<Arc<str>, TermFamily>,
    ) -> Result<Polyderivator> {
        for s in sort_map.keys() {
            source.check_sort(s)?;
        }
        for s in source.sorts() {
            let w = sort_map.get(s).ok_or_else(|| Error::TypingError(format!("sort `{s}` has no image")))?;
            target.check_word(w)?;
        }
        let sort_map = SortMap::new(source.sorts().iter().map(|s| (s.clone(), sort_map[s].clone())).collect());
        for name in images.keys() {
            source.op(name)?;
        }
        let mut ordered = IndexMap::new();
        for op in source.ops() {
            let img = images.get(&op.name).ok_or_else(|| Error::TypingError(format!("operation `{}` has no image", op.name)))?;
            let dom = sort_map.apply_sharp(&op.arity)?;
            let cod = sort_map.get(&op.coarity)?;
            if img.domain() != &dom || img.codomain() != cod {
                return Err(Error::TypingError(format!(
                    "image of `{}` is {} -> {}, expected {dom} -> {cod}",
                    op.name,
                    img.domain(),
                    img.codomain()
                )));
            }
            img.check_signature(&target)?;
            ordered.insert(op.name.clone(), img.clone());
        }
        Ok(Polyderivator { source, target, sort_map, images: ordered })
    }

    pub fn source(&self) -> &Signature {
        &self.source
    }

    pub fn target(&self) -> &Signature {
        &self.target
    }

    pub fn sort_map(&self) -> &SortMap {
        &self.sort_map
    }

    pub fn images(&self) -> &IndexMap<Arc<str>, TermFamily> {
        &self.images
    }

    pub fn image(&self, op: &str) -> Result<&TermFamily> {
        self.images.get(op).ok_or_else(|| Error::UnresolvedName(op.to_string()))
    }

    /// Translates a tree over a context with sorts `ctx` into the concatenated
    /// blocks over `φ♯(ctx)`.
    fn translate_tree(&self, tree: &Tree, offsets: &[usize]) -> Result<Vec<Tree>> {
        match tree {
            Tree::Var(a) => Ok((offsets[*a]..offsets[*a + 1]).map(Tree::Var).collect()),
            Tree::App(op, args) => {
                if !self.source.contains_op(op) {
                    return Err(Error::SignatureMismatch(format!("operation `{}` is not in the source signature", op.name)));
                }
                let mut flat = Vec::new();
                for a in args {
                    flat.extend(self.translate_tree(a, offsets)?);
                }
                Ok(self.images[&op.name].components().iter().map(|c| c.substitute(&flat)).collect())
            }
        }
    }

    /// `d♯(P) : φ♯(w) -> φ(s)` for a term `P` over `↓w` of sort `s`.
    pub fn translate_term(&self, term: &Term) -> Result<TermFamily> {
        let w = term.context().sorts();
        let offsets = self.sort_map.block_offsets(&w)?;
        let components = self.translate_tree(term.tree(), &offsets)?;
        Ok(TermFamily::new_unchecked(self.sort_map.apply_sharp(&w)?, self.sort_map.get(term.sort())?.clone(), components))
    }

    /// Translates every component of a family of source terms and concatenates.
    pub fn translate_family(&self, p: &TermFamily) -> Result<TermFamily> {
        let offsets = self.sort_map.block_offsets(p.domain())?;
        let mut components = Vec::new();
        for c in p.components() {
            components.extend(self.translate_tree(c, &offsets)?);
        }
        Ok(TermFamily::new_unchecked(
            self.sort_map.apply_sharp(p.domain())?,
            self.sort_map.apply_sharp(p.codomain())?,
            components,
        ))
    }

    /// `d♯(P) : ∐†X -> ∐†Y` for a general term `P : X -> Y`.
    pub fn translate_general(&self, p: &GeneralTerm) -> Result<GeneralTerm> {
        let offsets = self.sort_map.block_offsets(&p.source().sorts())?;
        let mut body = Vec::new();
        for t in p.body() {
            body.extend(self.translate_tree(t, &offsets)?);
        }
        Ok(GeneralTerm::new_unchecked(
            self.sort_map.coproduct_dagger(p.source())?,
            self.sort_map.coproduct_dagger(p.target())?,
            body,
        ))
    }

    pub fn translate_equation(&self, eq: &Equation) -> Result<Equation> {
        Equation::new(self.translate_general(eq.lhs())?, self.translate_general(eq.rhs())?)
    }
}

/// The identity polyderivator: `s ↦ (s)` and `σ ↦ (σ(v0, ..., v_{n-1}))`.
pub fn identity_polyderivator(sig: &Signature) -> Polyderivator {
    let sort_map = SortMap::identity(sig.sorts());
    let images = sig
        .ops()
        .map(|op| {
            let args = (0..op.arity.len()).map(Tree::Var).collect();
            let fam = TermFamily::new_unchecked(op.arity.clone(), Word::singleton(op.coarity.clone()), vec![Tree::App(op.clone(), args)]);
            (op.name.clone(), fam)
        })
        .collect();
    Polyderivator { source: sig.clone(), target: sig.clone(), sort_map, images }
}

/// `e ∘ d`.
pub fn compose_polyderivators(e: &Polyderivator, d: &Polyderivator) -> Result<Polyderivator> {
    if d.target != e.source {
        return Err(Error::EndpointMismatch("the second polyderivator does not start where the first ends".into()));
    }
    let sort_map = d.sort_map.then(&e.sort_map)?;
    let mut images = IndexMap::new();
    for (name, fam) in &d.images {
        images.insert(name.clone(), e.translate_family(fam)?);
    }
    Ok(Polyderivator { source: d.source.clone(), target: e.target.clone(), sort_map, images })
}

/// A signature morphism `(f, g)` sending sorts to sorts and operations to operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardMorphism {
    pub source: Signature,
    pub target: Signature,
    pub sort_map: IndexMap<Sort, Sort>,
    pub op_map: IndexMap<Arc<str>, Arc<str>>,
}

impl StandardMorphism {
    pub fn lift(&self) -> Result<Polyderivator> {
        let sort_map: IndexMap<Sort, Word> = self.sort_map.iter().map(|(s, t)| (s.clone(), Word::singleton(t.clone()))).collect();
        let mut images = IndexMap::new();
        for op in self.source.ops() {
            let name = self.op_map.get(&op.name).ok_or_else(|| Error::TypingError(format!("operation `{}` has no image", op.name)))?;
            let target_op = self.target.op(name)?;
            let args = (0..op.arity.len()).map(Tree::Var).collect();
            let dom = SortMap::new(sort_map.clone()).apply_sharp(&op.arity)?;
            let cod = Word::singleton(target_op.coarity.clone());
            images.insert(op.name.clone(), TermFamily::new(dom, cod, vec![Tree::App(target_op.clone(), args)])?);
        }
        Polyderivator::new(self.source.clone(), self.target.clone(), sort_map, images)
    }
}

/// A derivor: sorts go to sorts and operations to single derived terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivor {
    pub source: Signature,
    pub target: Signature,
    pub sort_map: IndexMap<Sort, Sort>,
    pub images: IndexMap<Arc<str>, Term>,
}

impl Derivor {
    pub fn lift(&self) -> Result<Polyderivator> {
        let sort_map: IndexMap<Sort, Word> = self.sort_map.iter().map(|(s, t)| (s.clone(), Word::singleton(t.clone()))).collect();
        let mut images = IndexMap::new();
        for (name, t) in &self.images {
            let domain = t.context().canonical_word()?;
            images.insert(name.clone(), TermFamily::from_terms(domain, vec![t.clone()])?);
        }
        Polyderivator::new(self.source.clone(), self.target.clone(), sort_map, images)
    }
}

/// The reduct `d*(B)`: the carrier at `s` is `B_{φ(s)}`, tuples labelled `(b0,b1,...)`,
/// encoded row-major, and `σ` acts by the realization of `d(σ)` after regrouping.
pub fn reduct_algebra(d: &Polyderivator, b: &FiniteAlgebra) -> Result<FiniteAlgebra> {
    if b.signature() != &d.target {
        return Err(Error::SignatureMismatch("algebra is not over the target signature".into()));
    }
    let mut carriers = IndexMap::new();
    for s in d.source.sorts() {
        let w = d.sort_map.get(s)?;
        let sizes = b.word_sizes(w)?;
        let n = checked_product(&sizes, TABLE_ROW_CAP)?;
        let mut digits = vec![0u32; sizes.len()];
        let mut labels = Vec::with_capacity(n);
        for idx in 0..n {
            decode(idx, &sizes, &mut digits);
            let parts: Vec<&str> = w.iter().zip(&digits).map(|(t, &x)| b.label(t, x).map(|l| &**l)).collect::<Result<_>>()?;
            labels.push(tuple_label(&parts));
        }
        carriers.insert(s.clone(), labels);
    }
    let mut plans: IndexMap<Arc<str>, (Vec<Vec<usize>>, Vec<Compiled>, Vec<usize>)> = IndexMap::new();
    for op in d.source.ops() {
        let arg_sizes = op.arity.iter().map(|s| b.word_sizes(d.sort_map.get(s)?)).collect::<Result<Vec<_>>>()?;
        let compiled = d.images[&op.name].components().iter().map(|c| b.compile(c)).collect::<Result<Vec<_>>>()?;
        let out_sizes = b.word_sizes(d.sort_map.get(&op.coarity)?)?;
        plans.insert(op.name.clone(), (arg_sizes, compiled, out_sizes));
    }
    let mut flat = Vec::new();
    let mut out = Vec::new();
    FiniteAlgebra::from_fn(d.source.clone(), carriers, |op, args| {
        let (arg_sizes, compiled, out_sizes) = &plans[&op.name];
        flat.clear();
        for (&a, sizes) in args.iter().zip(arg_sizes) {
            let start = flat.len();
            flat.resize(start + sizes.len(), 0);
            decode(a as usize, sizes, &mut flat[start..]);
        }
        out.clear();
        out.extend(compiled.iter().map(|c| b.eval(c, &flat)));
        Ok(encode(&out, out_sizes) as u32)
    })
}

/// Flattens a valuation of the reduct over `X` into a valuation of `B` over `∐†X`.
pub fn regroup(d: &Polyderivator, b: &FiniteAlgebra, ctx: &SortedSet, values: &[u32]) -> Result<Vec<u32>> {
    let mut flat = Vec::new();
    for (v, &a) in ctx.vars().iter().zip(values) {
        let sizes = b.word_sizes(d.sort_map.get(&v.sort)?)?;
        let start = flat.len();
        flat.resize(start + sizes.len(), 0);
        decode(a as usize, &sizes, &mut flat[start..]);
    }
    Ok(flat)
}

/// Returns `(d*(A) ⊨ eq, A ⊨ d♯(eq))`; the satisfaction condition says they agree.
pub fn satisfaction_condition(d: &Polyderivator, a: &FiniteAlgebra, eq: &Equation) -> Result<(bool, bool)> {
    let reduct = reduct_algebra(d, a)?;
    Ok((reduct.satisfies(eq)?, a.satisfies(&d.translate_equation(eq)?)?))
}

pub fn satisfaction_condition_check(d: &Polyderivator, a: &FiniteAlgebra, eq: &Equation) -> Result<bool> {
    let (l, r) = satisfaction_condition(d, a, eq)?;
    Ok(l == r)
}

/// Checks `P^{d*(B)}(a) = (d♯P)^B(regroup(a))` for every valuation `a`.
pub fn check_translation_soundness(d: &Polyderivator, b: &FiniteAlgebra, p: &Term) -> Result<bool> {
    let reduct = reduct_algebra(d, b)?;
    let fam = d.translate_term(p)?;
    let compiled = fam.components().iter().map(|c| b.compile(c)).collect::<Result<Vec<_>>>()?;
    let lhs = reduct.compile(p.tree())?;
    let out_sizes = b.word_sizes(fam.codomain())?;
    let mut odo = reduct.valuations(p.context())?;
    while let Some(vals) = odo.next() {
        let flat = regroup(d, b, p.context(), vals)?;
        let out: Vec<u32> = compiled.iter().map(|c| b.eval(c, &flat)).collect();
        if reduct.eval(&lhs, vals) as usize != encode(&out, &out_sizes) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of checking equations modulo a specification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Holds exactly: syntactically, or by the decision procedure of a generated clone theory.
    Proved,
    /// Holds in each of the given models; not a proof.
    VerifiedOnModels(usize),
    /// Fails; the witness names a model where it fails, if one is known.
    Refuted { item: String, witness: Option<String> },
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Proved => f.write_str("Proved"),
            Verdict::VerifiedOnModels(n) => write!(f, "VerifiedOnModels({n})"),
            Verdict::Refuted { item, witness: Some(m) } => write!(f, "Refuted({item}, {m})"),
            Verdict::Refuted { item, witness: None } => write!(f, "Refuted({item})"),
        }
    }
}

pub(crate) enum EqStatus {
    Proved,
    OnModels,
    Fails(Option<String>),
}

/// Checks that every model satisfies every axiom of `spec`.
pub(crate) fn check_models(spec: &Specification, models: &[(&str, &FiniteAlgebra)]) -> Result<()> {
    for (name, m) in models {
        if m.signature() != &spec.signature {
            return Err(Error::SignatureMismatch(format!("model `{name}` is not over the specification's signature")));
        }
        if let Some(axiom) = m.first_violation(&spec.equations)? {
            return Err(Error::ModelNotAModel { model: name.to_string(), axiom: axiom.to_string() });
        }
    }
    Ok(())
}

/// Decides an equation modulo `spec`: exactly for syntactic equality and the
/// generated clone theories, otherwise by evaluation in the models.
pub(crate) fn decide_equation(eq: &Equation, spec: &Specification, models: &[(&str, &FiniteAlgebra)]) -> Result<EqStatus> {
    if eq.lhs() == eq.rhs() {
        return Ok(EqStatus::Proved);
    }
    let flavor = match spec.kind {
        TheoryKind::Hall { .. } => Some(CloneFlavor::Hall),
        TheoryKind::Benabou { .. } => Some(CloneFlavor::Benabou),
        TheoryKind::Plain => None,
    };
    if let Some(flavor) = flavor {
        return Ok(if equation_holds_freely(eq, flavor)? { EqStatus::Proved } else { EqStatus::Fails(None) });
    }
    for (name, m) in models {
        if !m.satisfies(eq)? {
            return Ok(EqStatus::Fails(Some(name.to_string())));
        }
    }
    Ok(EqStatus::OnModels)
}

/// Checks that `d` sends every axiom of `source` into the consequences of `target`.
pub fn check_pd_spec_morphism(
    d: &Polyderivator,
    source: &Specification,
    target: &Specification,
    models: &[(&str, &FiniteAlgebra)],
) -> Result<Verdict> {
    if source.signature != d.source || target.signature != d.target {
        return Err(Error::EndpointMismatch("specifications do not match the polyderivator".into()));
    }
    check_models(target, models)?;
    let mut all_proved = true;
    for (name, eq) in &source.equations {
        match decide_equation(&d.translate_equation(eq)?, target, models)? {
            EqStatus::Proved => {}
            EqStatus::OnModels => all_proved = false,
            EqStatus::Fails(witness) => return Ok(Verdict::Refuted { item: name.to_string(), witness }),
        }
    }
    Ok(if all_proved { Verdict::Proved } else { Verdict::VerifiedOnModels(models.len()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::Label;

    fn s() -> Sort {
        Sort::new("s").unwrap()
    }

    fn w(n: usize) -> Word {
        (0..n).map(|_| s()).collect()
    }

    fn monoid_sig() -> Signature {
        let mut sig = Signature::new([s()]);
        sig.add_op("e", w(0), s()).unwrap();
        sig.add_op("m", w(2), s()).unwrap();
        sig
    }

    fn z4() -> FiniteAlgebra {
        let mut carriers = IndexMap::new();
        carriers.insert(s(), (0..4).map(|i| Label::from(i.to_string())).collect());
        FiniteAlgebra::from_fn(monoid_sig(), carriers, |op, a| Ok(if &*op.name == "m" { (a[0] + a[1]) % 4 } else { 0 })).unwrap()
    }

    /// Squares: s ↦ (s s), e ↦ (e, e), m ↦ (m(v0,v2), m(v1,v3)).
    fn square() -> Polyderivator {
        let sig = monoid_sig();
        let e = sig.op("e").unwrap().clone();
        let m = sig.op("m").unwrap().clone();
        let mut sm = IndexMap::new();
        sm.insert(s(), w(2));
        let mut images = IndexMap::new();
        images.insert(Arc::from("e"), TermFamily::new(w(0), w(2), vec![Tree::app(&e, vec![]), Tree::app(&e, vec![])]).unwrap());
        images.insert(
            Arc::from("m"),
            TermFamily::new(
                w(4),
                w(2),
                vec![Tree::app(&m, vec![Tree::Var(0), Tree::Var(2)]), Tree::app(&m, vec![Tree::Var(1), Tree::Var(3)])],
            )
            .unwrap(),
        );
        Polyderivator::new(sig.clone(), sig, sm, images).unwrap()
    }

    #[test]
    fn typing_is_checked() {
        let sig = monoid_sig();
        let mut sm = IndexMap::new();
        sm.insert(s(), w(2));
        let mut images = IndexMap::new();
        images.insert(Arc::from("e"), TermFamily::new(w(0), w(1), vec![Tree::app(sig.op("e").unwrap(), vec![])]).unwrap());
        images.insert(Arc::from("m"), TermFamily::identity(&w(2)));
        let err = Polyderivator::new(sig.clone(), sig.clone(), sm.clone(), images).unwrap_err();
        assert_eq!(err.kind(), "TypingError");
        let mut bad = IndexMap::new();
        bad.insert(Sort::new("t").unwrap(), w(1));
        assert_eq!(Polyderivator::new(sig.clone(), sig, bad, IndexMap::new()).unwrap_err().kind(), "UnknownSort");
    }

    #[test]
    fn translation_of_products() {
        let d = square();
        let m = d.source().op("m").unwrap().clone();
        let ctx = SortedSet::canonical(&w(3));
        let p = Term::from_tree(&ctx, Tree::app(&m, vec![Tree::Var(2), Tree::app(&m, vec![Tree::Var(0), Tree::Var(1)])])).unwrap();
        let t = d.translate_term(&p).unwrap();
        assert_eq!(t.to_string(), "(m(v4, m(v0, v2)), m(v5, m(v1, v3)))");
        assert_eq!(t.domain(), &w(6));
    }

    #[test]
    fn identity_and_composition() {
        let d = square();
        let id = identity_polyderivator(d.source());
        assert_eq!(compose_polyderivators(&id, &d).unwrap(), d);
        assert_eq!(compose_polyderivators(&d, &id).unwrap(), d);
        let dd = compose_polyderivators(&d, &d).unwrap();
        assert_eq!(dd.sort_map().get(&s()).unwrap(), &w(4));
        assert_eq!(dd.image("m").unwrap().components()[3].to_string(), "m(v3, v7)");
    }

    #[test]
    fn reduct_is_square_of_algebra() {
        let a = z4();
        let r = reduct_algebra(&square(), &a).unwrap();
        let p = a.product(&a).unwrap();
        assert!(r.same_tables(&p));
        assert_eq!(&**r.label(&s(), 6).unwrap(), "(1,2)");
        let id = reduct_algebra(&identity_polyderivator(a.signature()), &a).unwrap();
        assert!(id.same_tables(&a));
    }

    #[test]
    fn satisfaction_condition_on_commutativity() {
        let d = square();
        let a = z4();
        let m = a.signature().op("m").unwrap().clone();
        let ctx = SortedSet::canonical(&w(2));
        let l = Term::from_tree(&ctx, Tree::app(&m, vec![Tree::Var(0), Tree::Var(1)])).unwrap();
        let r = Term::from_tree(&ctx, Tree::app(&m, vec![Tree::Var(1), Tree::Var(0)])).unwrap();
        let eq = Equation::from_terms(&l, &r).unwrap();
        assert_eq!(satisfaction_condition(&d, &a, &eq).unwrap(), (true, true));
        let x = Term::var(&ctx, 0).unwrap();
        let eq2 = Equation::from_terms(&l, &x).unwrap();
        assert_eq!(satisfaction_condition(&d, &a, &eq2).unwrap(), (false, false));
        assert!(check_translation_soundness(&d, &a, &l).unwrap());
    }
}
