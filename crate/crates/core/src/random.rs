//! Seeded generators of small random instances: signatures, terms, finite
//! algebras, polyderivators, strictly natural transformations and
//! homomorphisms. Used by the property tests and the acceptance harness.

use std::sync::Arc;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebras::{check_homomorphism, FiniteAlgebra, Label, Odometer, SortedMapping};
use crate::error::{Error, Result};
use crate::kernel::{Signature, Sort, SortedSet, Word};
use crate::morphisms::Polyderivator;
use crate::terms::{Equation, Term, TermFamily, Tree};
use crate::transformations::Transformation;

pub fn sort_names(n: usize) -> Vec<Sort> {
    (0..n).map(|i| Sort::new(&format!("s{i}")).expect("valid name")).collect()
}

/// A signature on `n_sorts` sorts with one constant per sort and up to
/// `extra_ops` further operations of arity at most `max_arity`.
pub fn signature<R: Rng>(rng: &mut R, n_sorts: usize, extra_ops: usize, max_arity: usize, prefix: &str) -> Signature {
    let sorts = sort_names(n_sorts);
    let mut sig = Signature::new(sorts.clone());
    for (i, s) in sorts.iter().enumerate() {
        sig.add_op(&format!("{prefix}c{i}"), Word::empty(), s.clone()).expect("fresh op");
    }
    let n = rng.gen_range(1..=extra_ops.max(1));
    for k in 0..n {
        let arity: Word = (0..rng.gen_range(1..=max_arity.max(1))).map(|_| sorts.choose(rng).expect("sorts").clone()).collect();
        sig.add_op(&format!("{prefix}f{k}"), arity, sorts.choose(rng).expect("sorts").clone()).expect("fresh op");
    }
    sig
}

/// A signature with at most `n_ops` operations in total, without forced constants.
pub fn small_signature<R: Rng>(rng: &mut R, sorts: &[Sort], n_ops: usize, max_arity: usize) -> Signature {
    let mut sig = Signature::new(sorts.iter().cloned());
    for k in 0..rng.gen_range(1..=n_ops.max(1)) {
        let arity: Word = (0..rng.gen_range(0..=max_arity)).map(|_| sorts.choose(rng).expect("sorts").clone()).collect();
        sig.add_op(&format!("f{k}"), arity, sorts.choose(rng).expect("sorts").clone()).expect("fresh op");
    }
    sig
}

/// A random tree of sort `sort` over the context `ctx`, of depth at most
/// `depth`. `None` when no such tree exists within the depth.
pub fn tree<R: Rng>(rng: &mut R, sig: &Signature, ctx: &[Sort], sort: &Sort, depth: usize) -> Option<Tree> {
    let vars: Vec<usize> = (0..ctx.len()).filter(|&i| &ctx[i] == sort).collect();
    let ops: Vec<_> = sig.ops().filter(|o| &o.coarity == sort).cloned().collect();
    let leaves: Vec<_> = ops.iter().filter(|o| o.arity.is_empty()).cloned().collect();
    let branch = depth > 0 && ops.iter().any(|o| !o.arity.is_empty()) && rng.gen_bool(0.6);
    if branch {
        let inner: Vec<_> = ops.iter().filter(|o| !o.arity.is_empty()).collect();
        for _ in 0..4 {
            let op = inner.choose(rng).expect("nonempty");
            let args: Option<Vec<Tree>> = op.arity.iter().map(|s| tree(rng, sig, ctx, s, depth - 1)).collect();
            if let Some(args) = args {
                return Some(Tree::App((*op).clone(), args));
            }
        }
    }
    let n = vars.len() + leaves.len();
    if n > 0 {
        let k = rng.gen_range(0..n);
        return Some(if k < vars.len() { Tree::Var(vars[k]) } else { Tree::App(leaves[k - vars.len()].clone(), vec![]) });
    }
    if depth > 0 && !ops.is_empty() {
        let op = ops.choose(rng).expect("nonempty");
        let args: Option<Vec<Tree>> = op.arity.iter().map(|s| tree(rng, sig, ctx, s, depth - 1)).collect();
        return args.map(|a| Tree::App(op.clone(), a));
    }
    None
}

pub fn term<R: Rng>(rng: &mut R, sig: &Signature, ctx: &Word, sort: &Sort, depth: usize) -> Option<Term> {
    let t = tree(rng, sig, ctx.as_slice(), sort, depth)?;
    Some(Term::from_tree(&SortedSet::canonical(ctx), t).expect("well-sorted by construction"))
}

pub fn word<R: Rng>(rng: &mut R, sorts: &[Sort], min: usize, max: usize) -> Word {
    (0..rng.gen_range(min..=max)).map(|_| sorts.choose(rng).expect("sorts").clone()).collect()
}

/// A family `u -> w` of random trees, one per letter of `w`.
pub fn family<R: Rng>(rng: &mut R, sig: &Signature, u: &Word, w: &Word, depth: usize) -> Option<TermFamily> {
    let parts: Option<Vec<Tree>> = w.iter().map(|s| tree(rng, sig, u.as_slice(), s, depth)).collect();
    Some(TermFamily::new(u.clone(), w.clone(), parts?).expect("well-sorted by construction"))
}

/// An equation between two random terms over a random context.
pub fn equation<R: Rng>(rng: &mut R, sig: &Signature, max_ctx: usize, depth: usize) -> Option<Equation> {
    let sorts: Vec<Sort> = sig.sorts().iter().cloned().collect();
    let ctx = word(rng, &sorts, 0, max_ctx);
    let s = sorts.choose(rng)?.clone();
    let l = term(rng, sig, &ctx, &s, depth)?;
    let r = term(rng, sig, &ctx, &s, depth)?;
    Some(Equation::from_terms(&l, &r).expect("parallel by construction"))
}

/// A finite algebra with carriers of size `1..=max_carrier` and uniform random tables.
pub fn algebra<R: Rng>(rng: &mut R, sig: &Signature, max_carrier: usize) -> FiniteAlgebra {
    let carriers: IndexMap<Sort, Vec<Label>> = sig
        .sorts()
        .iter()
        .map(|s| (s.clone(), (0..rng.gen_range(1..=max_carrier)).map(|i| Label::from(i.to_string())).collect()))
        .collect();
    let sizes: IndexMap<Sort, u32> = carriers.iter().map(|(s, c)| (s.clone(), c.len() as u32)).collect();
    FiniteAlgebra::from_fn(sig.clone(), carriers, |op, _| Ok(rng.gen_range(0..sizes[&op.coarity]))).expect("small tables")
}

/// A polyderivator with random sort images of length `min_len..=max_len` and
/// random image families of depth at most `depth`.
pub fn polyderivator<R: Rng>(
    rng: &mut R,
    source: &Signature,
    target: &Signature,
    min_len: usize,
    max_len: usize,
    depth: usize,
) -> Option<Polyderivator> {
    let tsorts: Vec<Sort> = target.sorts().iter().cloned().collect();
    let sort_map: IndexMap<Sort, Word> = source.sorts().iter().map(|s| (s.clone(), word(rng, &tsorts, min_len, max_len))).collect();
    let mut images = IndexMap::new();
    for op in source.ops() {
        let dom = Word::concat_all(op.arity.iter().map(|s| &sort_map[s]));
        images.insert(op.name.clone(), family(rng, target, &dom, &sort_map[&op.coarity], depth)?);
    }
    Some(Polyderivator::new(source.clone(), target.clone(), sort_map, images).expect("well-typed by construction"))
}

/// Unary endo-terms `τ_t(v0)` of each sort of `sig`.
pub fn endo_terms<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> IndexMap<Sort, Tree> {
    sig.sorts()
        .iter()
        .map(|t| {
            let ctx = [t.clone()];
            let tau = tree(rng, sig, &ctx, t, depth).unwrap_or(Tree::Var(0));
            (t.clone(), tau)
        })
        .collect()
}

/// `τ^k` acting letterwise on `w`, as a family `w -> w`.
pub fn power_family(tau: &IndexMap<Sort, Tree>, w: &Word, k: usize) -> TermFamily {
    let parts = w
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut x = Tree::Var(i);
            for _ in 0..k {
                x = tau[t].substitute(&[x]);
            }
            x
        })
        .collect();
    TermFamily::new(w.clone(), w.clone(), parts).expect("well-sorted by construction")
}

/// A family of conjugated polyderivators `D_{a,b}(σ) = τ^a ∘ d(σ) ∘ τ^b`
/// sharing the sort map of `d`. For `k ≤ b`, `τ^k : D_{a,b} ⇝ D_{a+k,b-k}` is
/// strictly natural.
#[derive(Clone, Debug)]
pub struct Conjugates {
    pub base: Polyderivator,
    pub tau: IndexMap<Sort, Tree>,
}

impl Conjugates {
    pub fn new<R: Rng>(rng: &mut R, base: Polyderivator, depth: usize) -> Conjugates {
        let tau = endo_terms(rng, base.target(), depth);
        Conjugates { base, tau }
    }

    pub fn at(&self, a: usize, b: usize) -> Polyderivator {
        let d = &self.base;
        let mut images = IndexMap::new();
        for op in d.source().ops() {
            let img = d.image(&op.name).expect("total");
            let before = power_family(&self.tau, img.domain(), b);
            let after = power_family(&self.tau, img.codomain(), a);
            let f = crate::clones::family_compose(&after, &crate::clones::family_compose(img, &before).expect("typed"))
                .expect("typed");
            images.insert(op.name.clone(), f);
        }
        Polyderivator::new(d.source().clone(), d.target().clone(), d.sort_map().images().clone(), images).expect("typed")
    }

    /// `τ^k : D_{a,b} ⇝ D_{a+k,b-k}`.
    pub fn shift(&self, a: usize, b: usize, k: usize) -> Result<Transformation> {
        if k > b {
            return Err(Error::IndexOutOfRange { index: k, len: b + 1 });
        }
        let components = self
            .base
            .source()
            .sorts()
            .iter()
            .map(|s| (s.clone(), power_family(&self.tau, self.base.sort_map().get(s).expect("total"), k)))
            .collect();
        Transformation::new(self.at(a, b), self.at(a + k, b - k), components)
    }
}

/// The `n`-th direct power `s ↦ (s .. s)` of a single-sorted signature with
/// every operation acting coordinatewise.
pub fn direct_power(sig: &Signature, n: usize) -> Result<Polyderivator> {
    let sort_map: IndexMap<Sort, Word> = sig.sorts().iter().map(|s| (s.clone(), (0..n).map(|_| s.clone()).collect())).collect();
    let mut images = IndexMap::new();
    for op in sig.ops() {
        let dom = Word::concat_all(op.arity.iter().map(|s| &sort_map[s]));
        let parts = (0..n).map(|c| Tree::App(op.clone(), (0..op.arity.len()).map(|j| Tree::Var(j * n + c)).collect())).collect();
        images.insert(op.name.clone(), TermFamily::new(dom, sort_map[&op.coarity].clone(), parts)?);
    }
    Polyderivator::new(sig.clone(), sig.clone(), sort_map, images)
}

/// The coordinate selection `P_m ⇝ P_n` given by `sel : n -> m`.
pub fn selection(sig: &Signature, m: usize, sel: &[usize]) -> Result<Transformation> {
    let components = sig
        .sorts()
        .iter()
        .map(|s| {
            let dom: Word = (0..m).map(|_| s.clone()).collect();
            let cod: Word = sel.iter().map(|_| s.clone()).collect();
            Ok((s.clone(), TermFamily::new(dom, cod, sel.iter().map(|&i| Tree::Var(i)).collect())?))
        })
        .collect::<Result<IndexMap<_, _>>>()?;
    Transformation::new(direct_power(sig, m)?, direct_power(sig, sel.len())?, components)
}

/// A homomorphism `a -> b` found by exhaustive search over sorted maps, in a
/// random order of candidates; `None` when there is none or the search space
/// exceeds `limit` candidates.
pub fn homomorphism<R: Rng>(rng: &mut R, a: &FiniteAlgebra, b: &FiniteAlgebra, limit: usize) -> Result<Option<SortedMapping>> {
    let sig = a.signature();
    let sorts: Vec<Sort> = sig.sorts().iter().cloned().collect();
    let mut slots = Vec::new();
    for s in &sorts {
        for _ in 0..a.carrier_size(s)? {
            slots.push(b.carrier_size(s)?);
        }
    }
    let total = crate::algebras::checked_product(&slots, limit as u128).map_err(|_| Error::BoundTooLarge(limit))?;
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(rng);
    let mut digits = vec![0u32; slots.len()];
    for idx in order {
        crate::algebras::decode(idx, &slots, &mut digits);
        let mut map = IndexMap::new();
        let mut pos = 0;
        for s in &sorts {
            let n = a.carrier_size(s)?;
            map.insert(s.clone(), digits[pos..pos + n].to_vec());
            pos += n;
        }
        if check_homomorphism(&map, a, b)? {
            return Ok(Some(map));
        }
    }
    Ok(None)
}

/// The projection `a × b -> a` as a sorted mapping.
pub fn first_projection(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<SortedMapping> {
    let mut map = IndexMap::new();
    for s in a.signature().sorts() {
        let (n, m) = (a.carrier_size(s)?, b.carrier_size(s)?);
        map.insert(s.clone(), (0..n * m).map(|i| (i / m) as u32).collect());
    }
    Ok(map)
}

/// Every valuation of `ctx` in `a`, or `samples` random ones if there are more.
pub fn valuations<R: Rng>(rng: &mut R, a: &FiniteAlgebra, ctx: &Word, samples: usize) -> Result<Vec<Vec<u32>>> {
    let sizes = a.word_sizes(ctx)?;
    let total: u128 = sizes.iter().map(|&n| n as u128).product();
    if total <= samples as u128 {
        let mut odo = Odometer::new(&sizes);
        let mut out = Vec::new();
        while let Some(v) = odo.next() {
            out.push(v.to_vec());
        }
        return Ok(out);
    }
    Ok((0..samples).map(|_| sizes.iter().map(|&n| rng.gen_range(0..n as u32)).collect()).collect())
}

/// Names of the generated operations, for building assignments.
pub fn op_names(sig: &Signature) -> Vec<Arc<str>> {
    sig.ops().map(|o| o.name.clone()).collect()
}
