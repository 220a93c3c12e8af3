//! Hall and Bénabou specifications, their operation models, the functors
//! between Hall and Bénabou algebras, the category view, and the
//! polyderivators witnessing the equivalence of the two presentations.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use indexmap::IndexMap;

use crate::algebras::{checked_product, encode, tuple_label, FiniteAlgebra, Label, SortedMapping, TABLE_ROW_CAP};
use crate::clones::{equation_holds_freely, BenabouSymbol, CloneFlavor, HallSymbol};
use crate::error::{Error, Result};
use crate::kernel::{Op, Signature, Sort, SortedSet, Word};
use crate::morphisms::{check_pd_spec_morphism, compose_polyderivators, Polyderivator, Verdict};
use crate::terms::{general_from_family, Equation, Specification, Term, TermFamily, TheoryKind, Tree};
use crate::transformations::{check_transformation_mod, identity_transformation, vertical_compose, Transformation};

/// Cap on the number of generated equations.
pub const EQUATION_CAP: u128 = 2_000_000;

fn words(sorts: &[Sort], bound: usize) -> Result<Vec<Word>> {
    let k = sorts.len() as u128;
    let count: u128 = (0..=bound as u32).map(|l| k.saturating_pow(l)).sum();
    if count.saturating_pow(4) > EQUATION_CAP {
        return Err(Error::BoundTooLarge(bound));
    }
    Ok(Word::all_up_to(sorts, bound))
}

fn app(op: &Op, args: Vec<Tree>) -> Tree {
    Tree::App(op.clone(), args)
}

fn vars(range: std::ops::Range<usize>) -> Vec<Tree> {
    range.map(Tree::Var).collect()
}

fn eq_over(ctx: &[Sort], lhs: Tree, rhs: Tree) -> Result<Equation> {
    let ctx = SortedSet::canonical(&Word::from(ctx.to_vec()));
    Equation::from_terms(&Term::from_tree(&ctx, lhs)?, &Term::from_tree(&ctx, rhs)?)
}

/// The Hall signature over `sorts`, truncated to words of length at most `bound`.
pub fn hall_signature(sorts: &[Sort], bound: usize) -> Result<Signature> {
    let ws = words(sorts, bound)?;
    let mut sig = Signature::new(ws.iter().flat_map(|w| sorts.iter().map(move |s| Sort::hall(w.clone(), s.clone()))));
    for w in &ws {
        for i in 0..w.len() {
            let sym = HallSymbol::Project { word: w.clone(), index: i };
            sig.add_op(&sym.name(), sym.arity(), sym.coarity())?;
        }
    }
    for u in &ws {
        for w in &ws {
            for s in sorts {
                let sym = HallSymbol::Substitute { u: u.clone(), w: w.clone(), s: s.clone() };
                sig.add_op(&sym.name(), sym.arity(), sym.coarity())?;
            }
        }
    }
    Ok(sig)
}

/// The Hall specification: the signature with all instances of the three
/// Hall axioms fitting the bound, in lexicographic order.
pub fn hall_spec(sorts: &[Sort], bound: usize) -> Result<Specification> {
    let ws = words(sorts, bound)?;
    let mut spec = Specification::new(hall_signature(sorts, bound)?);
    spec.kind = TheoryKind::Hall { sorts: sorts.to_vec(), bound };
    let h = |s: &Sort, w: &Word| Sort::hall(w.clone(), s.clone());
    let xi = |u: &Word, w: &Word, s: &Sort| HallSymbol::Substitute { u: u.clone(), w: w.clone(), s: s.clone() }.to_op();
    let pi = |w: &Word, i: usize| HallSymbol::Project { word: w.clone(), index: i }.to_op();
    for u in &ws {
        for w in &ws {
            for i in 0..w.len() {
                let ctx: Vec<Sort> = w.iter().map(|t| h(t, u)).collect();
                let mut args = vec![app(&pi(w, i), vec![])];
                args.extend(vars(0..w.len()));
                let eq = eq_over(&ctx, app(&xi(u, w, &w[i]), args), Tree::Var(i))?;
                spec.add_equation(&format!("H1[{u} {w} {i}]"), eq)?;
            }
        }
    }
    for u in &ws {
        for j in 0..u.len() {
            let mut args = vec![Tree::Var(0)];
            args.extend((0..u.len()).map(|k| app(&pi(u, k), vec![])));
            let eq = eq_over(&[h(&u[j], u)], app(&xi(u, u, &u[j]), args), Tree::Var(0))?;
            spec.add_equation(&format!("H2[{u} {j}]"), eq)?;
        }
    }
    for u in &ws {
        for v in &ws {
            for w in &ws {
                for s in sorts {
                    let mut ctx = vec![h(s, w)];
                    ctx.extend(w.iter().map(|t| h(t, v)));
                    ctx.extend(v.iter().map(|t| h(t, u)));
                    let us = vars(1 + w.len()..1 + w.len() + v.len());
                    let mut inner = vec![Tree::Var(0)];
                    inner.extend(vars(1..1 + w.len()));
                    let mut largs = vec![app(&xi(v, w, s), inner)];
                    largs.extend(us.iter().cloned());
                    let lhs = app(&xi(u, v, s), largs);
                    let mut rargs = vec![Tree::Var(0)];
                    for (i, t) in w.iter().enumerate() {
                        let mut a = vec![Tree::Var(1 + i)];
                        a.extend(us.iter().cloned());
                        rargs.push(app(&xi(u, v, t), a));
                    }
                    let rhs = app(&xi(u, w, s), rargs);
                    spec.add_equation(&format!("H3[{u} {v} {w} {s}]"), eq_over(&ctx, lhs, rhs)?)?;
                }
            }
        }
    }
    Ok(spec)
}

/// The Bénabou signature over `sorts`, truncated to words of length at most `bound`.
pub fn benabou_signature(sorts: &[Sort], bound: usize) -> Result<Signature> {
    let ws = words(sorts, bound)?;
    let mut sig = Signature::new(ws.iter().flat_map(|u| ws.iter().map(move |w| Sort::benabou(u.clone(), w.clone()))));
    let mut add = |sym: BenabouSymbol| sig.add_op(&sym.name(), sym.arity(), sym.coarity()).map(|_| ());
    for w in &ws {
        for i in 0..w.len() {
            add(BenabouSymbol::Project { word: w.clone(), index: i })?;
        }
    }
    for u in &ws {
        for w in &ws {
            add(BenabouSymbol::Tuple { u: u.clone(), w: w.clone() })?;
        }
    }
    for u in &ws {
        for x in &ws {
            for w in &ws {
                add(BenabouSymbol::Compose { u: u.clone(), x: x.clone(), w: w.clone() })?;
            }
        }
    }
    Ok(sig)
}

/// The Bénabou specification with all instances of its five axioms fitting the bound.
pub fn benabou_spec(sorts: &[Sort], bound: usize) -> Result<Specification> {
    let ws = words(sorts, bound)?;
    let mut spec = Specification::new(benabou_signature(sorts, bound)?);
    spec.kind = TheoryKind::Benabou { sorts: sorts.to_vec(), bound };
    let b = |u: &Word, w: &Word| Sort::benabou(u.clone(), w.clone());
    let one = |s: &Sort| Word::singleton(s.clone());
    let pi = |w: &Word, i: usize| BenabouSymbol::Project { word: w.clone(), index: i }.to_op();
    let tup = |u: &Word, w: &Word| BenabouSymbol::Tuple { u: u.clone(), w: w.clone() }.to_op();
    let comp = |u: &Word, x: &Word, w: &Word| BenabouSymbol::Compose { u: u.clone(), x: x.clone(), w: w.clone() }.to_op();
    for u in &ws {
        for w in &ws {
            for i in 0..w.len() {
                let ctx: Vec<Sort> = w.iter().map(|t| b(u, &one(t))).collect();
                let lhs = app(&comp(u, w, &one(&w[i])), vec![app(&tup(u, w), vars(0..w.len())), app(&pi(w, i), vec![])]);
                spec.add_equation(&format!("B1[{u} {w} {i}]"), eq_over(&ctx, lhs, Tree::Var(i))?)?;
            }
        }
    }
    for u in &ws {
        for w in &ws {
            let ids = (0..u.len()).map(|k| app(&pi(u, k), vec![])).collect();
            let lhs = app(&comp(u, u, w), vec![app(&tup(u, u), ids), Tree::Var(0)]);
            spec.add_equation(&format!("B2[{u} {w}]"), eq_over(&[b(u, w)], lhs, Tree::Var(0))?)?;
        }
    }
    for u in &ws {
        for w in &ws {
            let parts = (0..w.len()).map(|i| app(&comp(u, w, &one(&w[i])), vec![Tree::Var(0), app(&pi(w, i), vec![])])).collect();
            let lhs = app(&tup(u, w), parts);
            spec.add_equation(&format!("B3[{u} {w}]"), eq_over(&[b(u, w)], lhs, Tree::Var(0))?)?;
        }
    }
    for w in ws.iter().filter(|w| !w.is_empty()) {
        let lhs = app(&tup(w, &one(&w[0])), vec![app(&pi(w, 0), vec![])]);
        spec.add_equation(&format!("B4[{w}]"), eq_over(&[], lhs, app(&pi(w, 0), vec![]))?)?;
    }
    for u in &ws {
        for x in &ws {
            for w in &ws {
                for y in &ws {
                    let ctx = [b(w, y), b(x, w), b(u, x)];
                    let lhs = app(&comp(u, w, y), vec![app(&comp(u, x, w), vec![Tree::Var(2), Tree::Var(1)]), Tree::Var(0)]);
                    let rhs = app(&comp(u, x, y), vec![Tree::Var(2), app(&comp(x, w, y), vec![Tree::Var(1), Tree::Var(0)])]);
                    spec.add_equation(&format!("B5[{u} {x} {w} {y}]"), eq_over(&ctx, lhs, rhs)?)?;
                }
            }
        }
    }
    Ok(spec)
}

/// A finite Hall or Bénabou algebra together with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CloneModel {
    pub flavor: CloneFlavor,
    pub sorts: Vec<Sort>,
    pub bound: usize,
    pub algebra: FiniteAlgebra,
}

impl CloneModel {
    fn expect(&self, flavor: CloneFlavor) -> Result<()> {
        if self.flavor == flavor {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(format!("expected a {flavor:?} model")))
        }
    }

    fn apply_sym(&self, name: &str, args: &[u32]) -> Result<u32> {
        self.algebra.apply(name, args)
    }
}

/// Labels of all maps `A_u -> A_w`, and their output tables.
struct FunctionSpace {
    rows: usize,
    base: usize,
    count: usize,
}

impl FunctionSpace {
    fn new(base_sizes: &IndexMap<Sort, Vec<Label>>, u: &Word, w: &Word) -> Result<FunctionSpace> {
        let sz = |x: &Word| -> Result<usize> {
            let sizes = x
                .iter()
                .map(|s| base_sizes.get(s).map(Vec::len).ok_or_else(|| Error::UnknownSort(s.to_string())))
                .collect::<Result<Vec<_>>>()?;
            checked_product(&sizes, TABLE_ROW_CAP)
        };
        let (rows, base) = (sz(u)?, sz(w)?);
        let count = (base as u128).checked_pow(rows as u32).filter(|&c| c <= TABLE_ROW_CAP).ok_or(Error::TableTooLarge(
            (base as u128).saturating_pow(rows.min(u32::MAX as usize) as u32),
        ))?;
        Ok(FunctionSpace { rows, base, count: count as usize })
    }

    fn table(&self, mut index: usize) -> Vec<u32> {
        let mut t = vec![0u32; self.rows];
        for r in (0..self.rows).rev() {
            t[r] = (index % self.base) as u32;
            index /= self.base;
        }
        t
    }

    fn index(&self, table: &[u32]) -> u32 {
        table.iter().fold(0usize, |acc, &v| acc * self.base + v as usize) as u32
    }

    fn labels(&self, base_sizes: &IndexMap<Sort, Vec<Label>>, w: &Word) -> Vec<Label> {
        let sizes: Vec<usize> = w.iter().map(|s| base_sizes[s].len()).collect();
        let out_labels: Vec<Label> = (0..self.base)
            .map(|v| {
                let d = crate::algebras::decode_vec(v, &sizes);
                let parts: Vec<&str> = w.iter().zip(&d).map(|(s, &x)| &*base_sizes[s][x as usize]).collect();
                if w.len() == 1 {
                    Label::from(parts[0])
                } else {
                    tuple_label(&parts)
                }
            })
            .collect();
        (0..self.count)
            .map(|i| {
                let t = self.table(i);
                let mut s = String::from("[");
                for (k, &v) in t.iter().enumerate() {
                    if k > 0 {
                        s.push(',');
                    }
                    s.push_str(&out_labels[v as usize]);
                }
                s.push(']');
                Label::from(s)
            })
            .collect()
    }
}

fn base_sorts(base: &IndexMap<Sort, Vec<Label>>) -> Vec<Sort> {
    base.keys().cloned().collect()
}

fn word_sizes(base: &IndexMap<Sort, Vec<Label>>, w: &Word) -> Vec<usize> {
    w.iter().map(|s| base[s].len()).collect()
}

/// The Hall algebra of all finitary operations on `base`: the carrier at
/// `(w,s)` is the set of maps `A_w -> A_s`, indexed by their tables.
pub fn hop_model(base: &IndexMap<Sort, Vec<Label>>, bound: usize) -> Result<CloneModel> {
    let sorts = base_sorts(base);
    let sig = hall_signature(&sorts, bound)?;
    let mut spaces = HashMap::new();
    let mut carriers = IndexMap::new();
    for hs in sig.sorts() {
        let (w, s) = hs.as_hall().expect("Hall sort");
        let fs = FunctionSpace::new(base, w, &Word::singleton(s.clone()))?;
        carriers.insert(hs.clone(), fs.labels(base, &Word::singleton(s.clone())));
        spaces.insert(hs.clone(), fs);
    }
    let mut decoded: HashMap<Sort, Vec<Vec<u32>>> = HashMap::new();
    for (hs, fs) in &spaces {
        decoded.insert(hs.clone(), (0..fs.count).map(|i| fs.table(i)).collect());
    }
    let mut cache: Option<(Arc<str>, Vec<usize>, Sort)> = None;
    let algebra = FiniteAlgebra::from_fn(sig, carriers, |op, args| {
        match HallSymbol::decode(op).expect("generated symbol") {
            HallSymbol::Project { word, index } => {
                let fs = &spaces[&op.coarity];
                let sizes = word_sizes(base, &word);
                let t: Vec<u32> = (0..fs.rows).map(|r| crate::algebras::decode_vec(r, &sizes)[index]).collect();
                Ok(fs.index(&t))
            }
            HallSymbol::Substitute { u, w, .. } => {
                if cache.as_ref().map_or(true, |c| c.0 != op.name) {
                    cache = Some((op.name.clone(), word_sizes(base, &w), op.coarity.clone()));
                }
                let (_, wsizes, coarity) = cache.as_ref().expect("set above");
                let f = &decoded[&op.arity[0]][args[0] as usize];
                let gs: Vec<&Vec<u32>> =
                    args[1..].iter().zip(op.arity.iter().skip(1)).map(|(&g, s)| &decoded[s][g as usize]).collect();
                let rows = checked_product(&word_sizes(base, &u), TABLE_ROW_CAP)?;
                let mut digits = vec![0u32; gs.len()];
                let t: Vec<u32> = (0..rows)
                    .map(|r| {
                        for (k, g) in gs.iter().enumerate() {
                            digits[k] = g[r];
                        }
                        f[encode(&digits, wsizes)]
                    })
                    .collect();
                Ok(spaces[coarity].index(&t))
            }
        }
    })?;
    Ok(CloneModel { flavor: CloneFlavor::Hall, sorts, bound, algebra })
}

/// The Bénabou algebra of all finitary operations on `base`: the carrier at
/// `(u,w)` is the set of maps `A_u -> A_w`.
pub fn bop_model(base: &IndexMap<Sort, Vec<Label>>, bound: usize) -> Result<CloneModel> {
    let sorts = base_sorts(base);
    let sig = benabou_signature(&sorts, bound)?;
    let mut spaces = HashMap::new();
    let mut carriers = IndexMap::new();
    for bs in sig.sorts() {
        let (u, w) = bs.as_benabou().expect("Bénabou sort");
        let fs = FunctionSpace::new(base, u, w)?;
        carriers.insert(bs.clone(), fs.labels(base, w));
        spaces.insert(bs.clone(), fs);
    }
    let mut decoded: HashMap<Sort, Vec<Vec<u32>>> = HashMap::new();
    for (bs, fs) in &spaces {
        decoded.insert(bs.clone(), (0..fs.count).map(|i| fs.table(i)).collect());
    }
    let algebra = FiniteAlgebra::from_fn(sig, carriers, |op, args| {
        let fs = &spaces[&op.coarity];
        let t: Vec<u32> = match BenabouSymbol::decode(op).expect("generated symbol") {
            BenabouSymbol::Project { word, index } => {
                let sizes = word_sizes(base, &word);
                (0..fs.rows).map(|r| crate::algebras::decode_vec(r, &sizes)[index]).collect()
            }
            BenabouSymbol::Tuple { w, .. } => {
                let parts: Vec<&Vec<u32>> = args.iter().zip(op.arity.iter()).map(|(&a, s)| &decoded[s][a as usize]).collect();
                let sizes = word_sizes(base, &w);
                let mut digits = vec![0u32; parts.len()];
                (0..fs.rows)
                    .map(|r| {
                        for (k, p) in parts.iter().enumerate() {
                            digits[k] = p[r];
                        }
                        encode(&digits, &sizes) as u32
                    })
                    .collect()
            }
            BenabouSymbol::Compose { .. } => {
                let p = &decoded[&op.arity[0]][args[0] as usize];
                let q = &decoded[&op.arity[1]][args[1] as usize];
                p.iter().map(|&r| q[r as usize]).collect()
            }
        };
        Ok(fs.index(&t))
    })?;
    Ok(CloneModel { flavor: CloneFlavor::Benabou, sorts, bound, algebra })
}

/// `F_hb`: the Bénabou algebra with `(u,w)`-carrier `∏_i A_{(u,w_i)}`.
pub fn f_hb(a: &CloneModel) -> Result<CloneModel> {
    a.expect(CloneFlavor::Hall)?;
    let (sorts, bound) = (a.sorts.clone(), a.bound);
    let sig = benabou_signature(&sorts, bound)?;
    let part_sorts = |u: &Word, w: &Word| -> Vec<Sort> { w.iter().map(|s| Sort::hall(u.clone(), s.clone())).collect() };
    let mut carriers = IndexMap::new();
    for bs in sig.sorts() {
        let (u, w) = bs.as_benabou().expect("Bénabou sort");
        let parts = part_sorts(u, w);
        let sizes = parts.iter().map(|s| a.algebra.carrier_size(s)).collect::<Result<Vec<_>>>()?;
        let n = checked_product(&sizes, TABLE_ROW_CAP)?;
        let mut labels = Vec::with_capacity(n);
        for idx in 0..n {
            let d = crate::algebras::decode_vec(idx, &sizes);
            let ls: Vec<&str> = parts.iter().zip(&d).map(|(s, &x)| &**a.algebra.label(s, x).expect("in range")).collect();
            labels.push(tuple_label(&ls));
        }
        carriers.insert(bs.clone(), labels);
    }
    let sizes_of = |u: &Word, w: &Word| -> Vec<usize> {
        part_sorts(u, w).iter().map(|s| a.algebra.carrier_size(s).expect("Hall sort")).collect()
    };
    let algebra = FiniteAlgebra::from_fn(sig, carriers, |op, args| match BenabouSymbol::decode(op).expect("generated symbol") {
        BenabouSymbol::Project { word, index } => {
            a.apply_sym(&HallSymbol::Project { word, index }.name(), &[])
        }
        BenabouSymbol::Tuple { u, w } => {
            let mut out = Vec::with_capacity(w.len());
            for i in 0..w.len() {
                let pi = a.apply_sym(&HallSymbol::Project { word: w.clone(), index: i }.name(), &[])?;
                let mut xs = vec![pi];
                xs.extend_from_slice(args);
                out.push(a.apply_sym(&HallSymbol::Substitute { u: u.clone(), w: w.clone(), s: w[i].clone() }.name(), &xs)?);
            }
            Ok(encode(&out, &sizes_of(&u, &w)) as u32)
        }
        BenabouSymbol::Compose { u, x, w } => {
            let first = crate::algebras::decode_vec(args[0] as usize, &sizes_of(&u, &x));
            let second = crate::algebras::decode_vec(args[1] as usize, &sizes_of(&x, &w));
            let mut out = Vec::with_capacity(w.len());
            for (i, &b) in second.iter().enumerate() {
                let mut xs = vec![b];
                xs.extend_from_slice(&first);
                out.push(a.apply_sym(&HallSymbol::Substitute { u: u.clone(), w: x.clone(), s: w[i].clone() }.name(), &xs)?);
            }
            Ok(encode(&out, &sizes_of(&u, &w)) as u32)
        }
    })?;
    Ok(CloneModel { flavor: CloneFlavor::Benabou, sorts, bound, algebra })
}

/// `F_bh`: the Hall algebra with `(w,s)`-carrier `B_{(w,(s))}` and
/// `ξ(a, a_0, ...) = a ∘ ⟨a_0, ...⟩`.
pub fn f_bh(b: &CloneModel) -> Result<CloneModel> {
    b.expect(CloneFlavor::Benabou)?;
    let (sorts, bound) = (b.sorts.clone(), b.bound);
    let sig = hall_signature(&sorts, bound)?;
    let mut carriers = IndexMap::new();
    for hs in sig.sorts() {
        let (w, s) = hs.as_hall().expect("Hall sort");
        carriers.insert(hs.clone(), b.algebra.carrier(&Sort::benabou(w.clone(), Word::singleton(s.clone())))?.to_vec());
    }
    let algebra = FiniteAlgebra::from_fn(sig, carriers, |op, args| match HallSymbol::decode(op).expect("generated symbol") {
        HallSymbol::Project { word, index } => b.apply_sym(&BenabouSymbol::Project { word, index }.name(), &[]),
        HallSymbol::Substitute { u, w, s } => {
            let t = b.apply_sym(&BenabouSymbol::Tuple { u: u.clone(), w: w.clone() }.name(), &args[1..])?;
            b.apply_sym(&BenabouSymbol::Compose { u, x: w, w: Word::singleton(s) }.name(), &[t, args[0]])
        }
    })?;
    Ok(CloneModel { flavor: CloneFlavor::Hall, sorts, bound, algebra })
}

/// `f : B -> F_hb(F_bh(B))`, `a ↦ (π_i^w ∘ a)_i`.
pub fn benabou_unit(b: &CloneModel) -> Result<SortedMapping> {
    b.expect(CloneFlavor::Benabou)?;
    let mut map = IndexMap::new();
    for bs in b.algebra.signature().sorts() {
        let (u, w) = bs.as_benabou().expect("Bénabou sort");
        let sizes = w
            .iter()
            .map(|s| b.algebra.carrier_size(&Sort::benabou(u.clone(), Word::singleton(s.clone()))))
            .collect::<Result<Vec<_>>>()?;
        let mut images = Vec::new();
        for a in 0..b.algebra.carrier_size(bs)? as u32 {
            let mut out = Vec::with_capacity(w.len());
            for i in 0..w.len() {
                let pi = b.apply_sym(&BenabouSymbol::Project { word: w.clone(), index: i }.name(), &[])?;
                let name = BenabouSymbol::Compose { u: u.clone(), x: w.clone(), w: Word::singleton(w[i].clone()) }.name();
                out.push(b.apply_sym(&name, &[a, pi])?);
            }
            images.push(encode(&out, &sizes) as u32);
        }
        map.insert(bs.clone(), images);
    }
    Ok(map)
}

/// `g : F_hb(F_bh(B)) -> B`, `(b_i) ↦ ⟨b_0, ...⟩`.
pub fn benabou_counit(b: &CloneModel) -> Result<SortedMapping> {
    b.expect(CloneFlavor::Benabou)?;
    let mut map = IndexMap::new();
    for bs in b.algebra.signature().sorts() {
        let (u, w) = bs.as_benabou().expect("Bénabou sort");
        let sizes = w
            .iter()
            .map(|s| b.algebra.carrier_size(&Sort::benabou(u.clone(), Word::singleton(s.clone()))))
            .collect::<Result<Vec<_>>>()?;
        let n = checked_product(&sizes, TABLE_ROW_CAP)?;
        let name = BenabouSymbol::Tuple { u: u.clone(), w: w.clone() }.name();
        let images = (0..n)
            .map(|t| b.apply_sym(&name, &crate::algebras::decode_vec(t, &sizes)))
            .collect::<Result<Vec<_>>>()?;
        map.insert(bs.clone(), images);
    }
    Ok(map)
}

/// The subalgebra of a Hall model generated by the given elements.
pub fn hall_submodel(a: &CloneModel, generators: &[(Sort, u32)]) -> Result<CloneModel> {
    a.expect(CloneFlavor::Hall)?;
    let sig = a.algebra.signature();
    let mut sets: IndexMap<Sort, BTreeSet<u32>> = sig.sorts().iter().map(|s| (s.clone(), BTreeSet::new())).collect();
    for (s, x) in generators {
        a.algebra.label(s, *x)?;
        sets[s].insert(*x);
    }
    loop {
        let mut changed = false;
        for op in sig.ops() {
            let pools: Vec<Vec<u32>> = op.arity.iter().map(|s| sets[s].iter().copied().collect()).collect();
            let sizes: Vec<usize> = pools.iter().map(Vec::len).collect();
            let mut odo = crate::algebras::Odometer::new(&sizes);
            let mut new = Vec::new();
            while let Some(idx) = odo.next() {
                let args: Vec<u32> = idx.iter().zip(&pools).map(|(&i, p)| p[i as usize]).collect();
                let y = a.algebra.apply(&op.name, &args)?;
                if !sets[&op.coarity].contains(&y) {
                    new.push(y);
                }
            }
            if !new.is_empty() {
                changed = true;
                sets[&op.coarity].extend(new);
            }
        }
        if !changed {
            break;
        }
    }
    let elems: IndexMap<Sort, Vec<u32>> = sets.iter().map(|(s, xs)| (s.clone(), xs.iter().copied().collect())).collect();
    let carriers = elems
        .iter()
        .map(|(s, xs)| Ok((s.clone(), xs.iter().map(|&x| a.algebra.label(s, x).cloned()).collect::<Result<Vec<_>>>()?)))
        .collect::<Result<IndexMap<_, _>>>()?;
    let algebra = FiniteAlgebra::from_fn(sig.clone(), carriers, |op, args| {
        let orig: Vec<u32> = args.iter().zip(op.arity.iter()).map(|(&i, s)| elems[s][i as usize]).collect();
        let y = a.algebra.apply(&op.name, &orig)?;
        Ok(elems[&op.coarity].binary_search(&y).expect("closed") as u32)
    })?;
    Ok(CloneModel { flavor: CloneFlavor::Hall, sorts: a.sorts.clone(), bound: a.bound, algebra })
}

/// A Bénabou algebra read as a category with chosen finite products:
/// objects are words, `Hom(u, w) = B_{(u,w)}`.
pub struct BenabouCategory<'a> {
    model: &'a CloneModel,
}

pub fn category_view(b: &CloneModel) -> Result<BenabouCategory<'_>> {
    b.expect(CloneFlavor::Benabou)?;
    Ok(BenabouCategory { model: b })
}

impl BenabouCategory<'_> {
    pub fn objects(&self) -> Vec<Word> {
        Word::all_up_to(&self.model.sorts, self.model.bound)
    }

    pub fn hom_size(&self, u: &Word, w: &Word) -> Result<usize> {
        self.model.algebra.carrier_size(&Sort::benabou(u.clone(), w.clone()))
    }

    /// `q ∘ p` for `p : u -> x` and `q : x -> w`.
    pub fn compose(&self, u: &Word, x: &Word, w: &Word, q: u32, p: u32) -> Result<u32> {
        self.model.apply_sym(&BenabouSymbol::Compose { u: u.clone(), x: x.clone(), w: w.clone() }.name(), &[p, q])
    }

    /// The chosen projection `w -> (w_i)`.
    pub fn projection(&self, w: &Word, i: usize) -> Result<u32> {
        self.model.apply_sym(&BenabouSymbol::Project { word: w.clone(), index: i }.name(), &[])
    }

    /// `1_w = ⟨π_0^w, ..., π_{|w|-1}^w⟩`.
    pub fn identity(&self, w: &Word) -> Result<u32> {
        let ps = (0..w.len()).map(|i| self.projection(w, i)).collect::<Result<Vec<_>>>()?;
        self.model.apply_sym(&BenabouSymbol::Tuple { u: w.clone(), w: w.clone() }.name(), &ps)
    }

    /// Unit and associativity laws over all morphisms.
    pub fn check_laws(&self) -> Result<bool> {
        let objs = self.objects();
        for u in &objs {
            for w in &objs {
                let (iu, iw) = (self.identity(u)?, self.identity(w)?);
                for f in 0..self.hom_size(u, w)? as u32 {
                    if self.compose(u, u, w, f, iu)? != f || self.compose(u, w, w, iw, f)? != f {
                        return Ok(false);
                    }
                }
            }
        }
        for u in &objs {
            for x in &objs {
                for w in &objs {
                    for y in &objs {
                        for f in 0..self.hom_size(u, x)? as u32 {
                            for g in 0..self.hom_size(x, w)? as u32 {
                                let gf = self.compose(u, x, w, g, f)?;
                                for h in 0..self.hom_size(w, y)? as u32 {
                                    let l = self.compose(u, w, y, h, gf)?;
                                    let r = self.compose(u, x, y, self.compose(x, w, y, h, g)?, f)?;
                                    if l != r {
                                        return Ok(false);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Rebuilds the Bénabou algebra from the category: tupling is recovered
    /// from the universal property of the chosen products by search.
    pub fn to_benabou(&self) -> Result<CloneModel> {
        let b = &self.model.algebra;
        let algebra = FiniteAlgebra::from_fn(b.signature().clone(), b.carriers(), |op, args| {
            match BenabouSymbol::decode(op).expect("generated symbol") {
                BenabouSymbol::Project { word, index } => self.projection(&word, index),
                BenabouSymbol::Compose { u, x, w } => self.compose(&u, &x, &w, args[1], args[0]),
                BenabouSymbol::Tuple { u, w } => {
                    let mut found = None;
                    for h in 0..self.hom_size(&u, &w)? as u32 {
                        let mut ok = true;
                        for (i, &fi) in args.iter().enumerate() {
                            let p = self.projection(&w, i)?;
                            if self.compose(&u, &w, &Word::singleton(w[i].clone()), p, h)? != fi {
                                ok = false;
                                break;
                            }
                        }
                        if ok {
                            if found.is_some() {
                                return Err(Error::TypingError(format!("products at {w} are not unique")));
                            }
                            found = Some(h);
                        }
                    }
                    found.ok_or_else(|| Error::TypingError(format!("no tupling into {w}")))
                }
            }
        })?;
        Ok(CloneModel { algebra, ..self.model.clone() })
    }
}

/// Assignment `f` of an element of the Hall model at `(w,s)` to each
/// operation `σ : w -> s`, and its unique extension `f̂` to terms.
pub struct FreeExtension<'a> {
    model: &'a CloneModel,
    assignment: IndexMap<Arc<str>, u32>,
}

impl<'a> FreeExtension<'a> {
    pub fn new(model: &'a CloneModel, sig: &Signature, assignment: IndexMap<Arc<str>, u32>) -> Result<FreeExtension<'a>> {
        model.expect(CloneFlavor::Hall)?;
        for op in sig.ops() {
            let x = assignment.get(&op.name).ok_or_else(|| Error::UnresolvedName(op.name.to_string()))?;
            model.algebra.label(&Sort::hall(op.arity.clone(), op.coarity.clone()), *x)?;
        }
        Ok(FreeExtension { model, assignment })
    }

    /// `f̂(P)` for `P` over `↓w`: variables go to projections and `σ(Q..)` to
    /// `ξ(f(σ), f̂(Q)..)`.
    pub fn extend(&self, p: &Term) -> Result<u32> {
        let w = p.context().canonical_word()?;
        self.extend_tree(p.tree(), &w)
    }

    fn extend_tree(&self, t: &Tree, w: &Word) -> Result<u32> {
        match t {
            Tree::Var(i) => self.model.apply_sym(&HallSymbol::Project { word: w.clone(), index: *i }.name(), &[]),
            Tree::App(op, args) => {
                let mut xs = vec![*self.assignment.get(&op.name).ok_or_else(|| Error::UnresolvedName(op.name.to_string()))?];
                for a in args {
                    xs.push(self.extend_tree(a, w)?);
                }
                let name = HallSymbol::Substitute { u: w.clone(), w: op.arity.clone(), s: op.coarity.clone() }.name();
                self.model.apply_sym(&name, &xs)
            }
        }
    }
}

/// `d : Σ^B -> Σ^H` with `φ(u,w) = ((u,w_0), ..., (u,w_{|w|-1}))`.
pub fn hb_polyderivator_d(sorts: &[Sort], bound: usize) -> Result<Polyderivator> {
    let bsig = benabou_signature(sorts, bound)?;
    let hsig = hall_signature(sorts, bound)?;
    let mut sort_map = IndexMap::new();
    for bs in bsig.sorts() {
        let (u, w) = bs.as_benabou().expect("Bénabou sort");
        sort_map.insert(bs.clone(), w.iter().map(|s| Sort::hall(u.clone(), s.clone())).collect::<Word>());
    }
    let mut images = IndexMap::new();
    for op in bsig.ops() {
        let sym = BenabouSymbol::decode(op).expect("generated symbol");
        let (comps, dom_len) = match &sym {
            BenabouSymbol::Project { word, index } => {
                (vec![app(&HallSymbol::Project { word: word.clone(), index: *index }.to_op(), vec![])], 0)
            }
            BenabouSymbol::Tuple { w, .. } => (vars(0..w.len()), w.len()),
            BenabouSymbol::Compose { u, x, w } => (
                (0..w.len())
                    .map(|i| {
                        let xi = HallSymbol::Substitute { u: u.clone(), w: x.clone(), s: w[i].clone() }.to_op();
                        let mut a = vec![Tree::Var(x.len() + i)];
                        a.extend(vars(0..x.len()));
                        app(&xi, a)
                    })
                    .collect(),
                x.len() + w.len(),
            ),
        };
        let dom: Word = op.arity.iter().flat_map(|s| sort_map[s].iter().cloned()).collect();
        debug_assert_eq!(dom.len(), dom_len);
        images.insert(op.name.clone(), TermFamily::new(dom, sort_map[&op.coarity].clone(), comps)?);
    }
    Polyderivator::new(bsig, hsig, sort_map, images)
}

/// `e : Σ^H -> Σ^B` with `ψ(w,s) = ((w,(s)))`.
pub fn hb_polyderivator_e(sorts: &[Sort], bound: usize) -> Result<Polyderivator> {
    let bsig = benabou_signature(sorts, bound)?;
    let hsig = hall_signature(sorts, bound)?;
    let mut sort_map = IndexMap::new();
    for hs in hsig.sorts() {
        let (w, s) = hs.as_hall().expect("Hall sort");
        sort_map.insert(hs.clone(), Word::singleton(Sort::benabou(w.clone(), Word::singleton(s.clone()))));
    }
    let mut images = IndexMap::new();
    for op in hsig.ops() {
        let comp = match HallSymbol::decode(op).expect("generated symbol") {
            HallSymbol::Project { word, index } => app(&BenabouSymbol::Project { word, index }.to_op(), vec![]),
            HallSymbol::Substitute { u, w, s } => {
                let t = app(&BenabouSymbol::Tuple { u: u.clone(), w: w.clone() }.to_op(), vars(1..1 + w.len()));
                app(&BenabouSymbol::Compose { u, x: w, w: Word::singleton(s) }.to_op(), vec![t, Tree::Var(0)])
            }
        };
        let dom: Word = op.arity.iter().flat_map(|s| sort_map[s].iter().cloned()).collect();
        images.insert(op.name.clone(), TermFamily::new(dom, sort_map[&op.coarity].clone(), vec![comp])?);
    }
    Polyderivator::new(hsig, bsig, sort_map, images)
}

/// The transformations witnessing the equivalence.
pub struct HbTransformations {
    /// `χ : 1 ⇝ e∘d` on the Bénabou side, `χ_{(u,w)} = (π_i^w ∘ v0)_i`.
    pub chi: Transformation,
    /// `ρ : e∘d ⇝ 1`, `ρ_{(u,w)} = (⟨v0, ..., v_{|w|-1}⟩)`.
    pub rho: Transformation,
    /// `1 ⇝ d∘e` on the Hall side.
    pub chi_hall: Transformation,
    /// `d∘e ⇝ 1` on the Hall side.
    pub rho_hall: Transformation,
}

pub fn hb_transformations(sorts: &[Sort], bound: usize) -> Result<HbTransformations> {
    let d = hb_polyderivator_d(sorts, bound)?;
    let e = hb_polyderivator_e(sorts, bound)?;
    let ed = compose_polyderivators(&e, &d)?;
    let de = compose_polyderivators(&d, &e)?;
    let id_b = crate::morphisms::identity_polyderivator(d.source());
    let id_h = crate::morphisms::identity_polyderivator(e.source());
    let mut chi = IndexMap::new();
    let mut rho = IndexMap::new();
    for bs in d.source().sorts() {
        let (u, w) = bs.as_benabou().expect("Bénabou sort");
        let comps = (0..w.len())
            .map(|i| {
                let c = BenabouSymbol::Compose { u: u.clone(), x: w.clone(), w: Word::singleton(w[i].clone()) }.to_op();
                app(&c, vec![Tree::Var(0), app(&BenabouSymbol::Project { word: w.clone(), index: i }.to_op(), vec![])])
            })
            .collect();
        let target = ed.sort_map().get(bs)?.clone();
        chi.insert(bs.clone(), TermFamily::new(Word::singleton(bs.clone()), target.clone(), comps)?);
        let t = app(&BenabouSymbol::Tuple { u: u.clone(), w: w.clone() }.to_op(), vars(0..w.len()));
        rho.insert(bs.clone(), TermFamily::new(target, Word::singleton(bs.clone()), vec![t])?);
    }
    let mut hall = IndexMap::new();
    for hs in e.source().sorts() {
        hall.insert(hs.clone(), TermFamily::identity(&Word::singleton(hs.clone())));
    }
    Ok(HbTransformations {
        chi: Transformation::new(id_b.clone(), ed.clone(), chi)?,
        rho: Transformation::new(ed, id_b, rho)?,
        chi_hall: Transformation::new(id_h.clone(), de.clone(), hall.clone())?,
        rho_hall: Transformation::new(de, id_h, hall)?,
    })
}

/// Decides componentwise equality of parallel transformations modulo a generated clone theory.
pub fn transformations_equal_mod(a: &Transformation, b: &Transformation, flavor: CloneFlavor) -> Result<bool> {
    if a.source() != b.source() || a.target() != b.target() {
        return Err(Error::EndpointMismatch("transformations are not parallel".into()));
    }
    for (s, c) in a.components() {
        let eq = Equation::new(general_from_family(c), general_from_family(b.component(s)?))?;
        if !equation_holds_freely(&eq, flavor)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of checking the equivalence of the two presentations at a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub d_verdict: Verdict,
    pub e_verdict: Verdict,
    pub chi: Verdict,
    pub rho: Verdict,
    pub chi_hall: Verdict,
    pub rho_hall: Verdict,
    pub rho_after_chi_is_identity: bool,
    pub chi_after_rho_is_identity: bool,
    pub hall_round_trips_are_identities: bool,
    pub benabou_equations: usize,
    pub hall_equations: usize,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        [&self.d_verdict, &self.e_verdict, &self.chi, &self.rho, &self.chi_hall, &self.rho_hall]
            .iter()
            .all(|v| **v == Verdict::Proved)
            && self.rho_after_chi_is_identity
            && self.chi_after_rho_is_identity
            && self.hall_round_trips_are_identities
    }
}

/// Checks that `d` and `e` preserve the axioms, that `χ`, `ρ` are transformations
/// modulo the theories, and that they are mutually inverse.
pub fn verify_equivalence(sorts: &[Sort], bound: usize) -> Result<EquivalenceReport> {
    let hs = hall_spec(sorts, bound)?;
    let bs = benabou_spec(sorts, bound)?;
    let d = hb_polyderivator_d(sorts, bound)?;
    let e = hb_polyderivator_e(sorts, bound)?;
    let t = hb_transformations(sorts, bound)?;
    let rc = vertical_compose(&t.rho, &t.chi)?;
    let cr = vertical_compose(&t.chi, &t.rho)?;
    let hall_rc = vertical_compose(&t.rho_hall, &t.chi_hall)?;
    let hall_cr = vertical_compose(&t.chi_hall, &t.rho_hall)?;
    Ok(EquivalenceReport {
        d_verdict: check_pd_spec_morphism(&d, &bs, &hs, &[])?,
        e_verdict: check_pd_spec_morphism(&e, &hs, &bs, &[])?,
        chi: check_transformation_mod(&t.chi, &bs, &[])?,
        rho: check_transformation_mod(&t.rho, &bs, &[])?,
        chi_hall: check_transformation_mod(&t.chi_hall, &hs, &[])?,
        rho_hall: check_transformation_mod(&t.rho_hall, &hs, &[])?,
        rho_after_chi_is_identity: transformations_equal_mod(&rc, &identity_transformation(rc.source()), CloneFlavor::Benabou)?,
        chi_after_rho_is_identity: transformations_equal_mod(&cr, &identity_transformation(cr.source()), CloneFlavor::Benabou)?,
        hall_round_trips_are_identities: transformations_equal_mod(&hall_rc, &identity_transformation(hall_rc.source()), CloneFlavor::Hall)?
            && transformations_equal_mod(&hall_cr, &identity_transformation(hall_cr.source()), CloneFlavor::Hall)?,
        benabou_equations: bs.equations.len(),
        hall_equations: hs.equations.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::check_homomorphism;

    fn s() -> Sort {
        Sort::new("s").unwrap()
    }

    fn base(n: usize) -> IndexMap<Sort, Vec<Label>> {
        let mut m = IndexMap::new();
        m.insert(s(), (0..n).map(|i| Label::from(i.to_string())).collect());
        m
    }

    #[test]
    fn operation_counts() {
        let h = hall_signature(&[s()], 2).unwrap();
        let pis = h.ops().filter(|o| o.name.starts_with("pi_")).count();
        let xis = h.ops().filter(|o| o.name.starts_with("xi[")).count();
        assert_eq!((pis, xis), (3, 9));
        let b = benabou_signature(&[s()], 1).unwrap();
        assert_eq!(b.ops().filter(|o| o.name.starts_with("comp[")).count(), 8);
        let hs = hall_spec(&[s()], 2).unwrap();
        assert_eq!(hs.equations.len(), 9 + 3 + 27);
        let bs = benabou_spec(&[s()], 2).unwrap();
        assert_eq!(bs.equations.len(), 9 + 9 + 9 + 2 + 81);
        assert!(matches!(hall_spec(&[s()], 40), Err(Error::BoundTooLarge(40))));
    }

    #[test]
    fn hop_carrier_size() {
        let m = hop_model(&base(2), 2).unwrap();
        let ss = Word::from(vec![s(), s()]);
        assert_eq!(m.algebra.carrier_size(&Sort::hall(ss, s())).unwrap(), 16);
        assert_eq!(&**m.algebra.label(&Sort::hall(Word::singleton(s()), s()), 1).unwrap(), "[0,1]");
    }

    #[test]
    fn hop_and_bop_satisfy_axioms() {
        let h = hop_model(&base(2), 2).unwrap();
        let hs = hall_spec(&[s()], 2).unwrap();
        assert_eq!(h.algebra.first_violation(&hs.equations).unwrap(), None);
        let b = bop_model(&base(2), 1).unwrap();
        let bs = benabou_spec(&[s()], 1).unwrap();
        assert_eq!(b.algebra.first_violation(&bs.equations).unwrap(), None);
    }

    #[test]
    fn functors_round_trip() {
        let h = hop_model(&base(2), 2).unwrap();
        let b = f_hb(&h).unwrap();
        assert!(f_bh(&b).unwrap().algebra.same_tables(&h.algebra));
        let bop = bop_model(&base(2), 2).unwrap();
        assert!(f_hb(&f_bh(&bop).unwrap()).unwrap().algebra.same_tables(&b.algebra));
        let f = benabou_unit(&bop).unwrap();
        let g = benabou_counit(&bop).unwrap();
        let round = f_hb(&f_bh(&bop).unwrap()).unwrap();
        assert!(check_homomorphism(&f, &bop.algebra, &round.algebra).unwrap());
        assert!(check_homomorphism(&g, &round.algebra, &bop.algebra).unwrap());
        for (sort, fs) in &f {
            for (a, &fa) in fs.iter().enumerate() {
                assert_eq!(g[sort][fa as usize] as usize, a);
            }
        }
    }

    #[test]
    fn category_round_trip() {
        let b = bop_model(&base(2), 1).unwrap();
        let cat = category_view(&b).unwrap();
        assert!(cat.check_laws().unwrap());
        assert_eq!(cat.to_benabou().unwrap(), b);
    }

    #[test]
    fn equivalence_small() {
        let r = verify_equivalence(&[s()], 2).unwrap();
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn submodel_is_closed() {
        let h = hop_model(&base(2), 2).unwrap();
        let ss = Word::from(vec![s(), s()]);
        let sub = hall_submodel(&h, &[(Sort::hall(ss.clone(), s()), 1)]).unwrap();
        let hs = hall_spec(&[s()], 2).unwrap();
        assert_eq!(sub.algebra.first_violation(&hs.equations).unwrap(), None);
        assert!(sub.algebra.carrier_size(&Sort::hall(ss, s())).unwrap() < 16);
        assert!(f_bh(&f_hb(&sub).unwrap()).unwrap().algebra.same_tables(&sub.algebra));
    }
}
