//! Finite many-sorted algebras, realization of terms, satisfaction and
//! homomorphisms, plus the finite operation sets behind the concrete clones.

use std::sync::Arc;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::kernel::{Op, Signature, Sort, SortedSet, Word};
use crate::terms::{Equation, GeneralTerm, Term, Tree};

pub type Label = Arc<str>;

/// Cap on the number of rows of any operation table.
pub const TABLE_ROW_CAP: u128 = 1_000_000;
/// Cap on the number of valuations enumerated by a satisfaction check.
pub const VALUATION_CAP: u128 = 100_000_000;

/// Row-major mixed-radix index of `digits`; the first digit is most significant.
pub fn encode(digits: &[u32], sizes: &[usize]) -> usize {
    digits.iter().zip(sizes).fold(0usize, |acc, (&d, &n)| acc * n + d as usize)
}

pub fn decode(mut index: usize, sizes: &[usize], out: &mut [u32]) {
    for k in (0..sizes.len()).rev() {
        let n = sizes[k];
        out[k] = (index % n) as u32;
        index /= n;
    }
}

pub fn decode_vec(index: usize, sizes: &[usize]) -> Vec<u32> {
    let mut out = vec![0; sizes.len()];
    decode(index, sizes, &mut out);
    out
}

/// Product of `sizes`, failing once it exceeds `cap`.
pub fn checked_product(sizes: &[usize], cap: u128) -> Result<usize> {
    let mut acc: u128 = 1;
    for &n in sizes {
        acc = acc.saturating_mul(n as u128);
        if acc > cap && sizes.iter().all(|&m| m > 0) {
            return Err(Error::TableTooLarge(acc));
        }
    }
    Ok(acc as usize)
}

/// Enumerates all tuples in row-major order, last position fastest.
pub struct Odometer {
    sizes: Vec<u32>,
    current: Vec<u32>,
    state: u8,
}

impl Odometer {
    pub fn new(sizes: &[usize]) -> Odometer {
        let empty = sizes.iter().any(|&n| n == 0);
        Odometer {
            sizes: sizes.iter().map(|&n| n as u32).collect(),
            current: vec![0; sizes.len()],
            state: if empty { 2 } else { 0 },
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&[u32]> {
        match self.state {
            0 => {
                self.state = 1;
                Some(&self.current)
            }
            1 => {
                for k in (0..self.current.len()).rev() {
                    self.current[k] += 1;
                    if self.current[k] < self.sizes[k] {
                        return Some(&self.current);
                    }
                    self.current[k] = 0;
                }
                self.state = 2;
                None
            }
            _ => None,
        }
    }
}

/// A dense operation table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    sizes: Vec<usize>,
    values: Vec<u32>,
}

impl Table {
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn get(&self, args: &[u32]) -> u32 {
        self.values[encode(args, &self.sizes)]
    }
}

/// A term compiled against the tables of one algebra.
#[derive(Clone, Debug)]
pub enum Compiled {
    Var(usize),
    App { table: usize, sizes: Vec<usize>, args: Vec<Compiled> },
}

/// A finite Σ-algebra. Elements are indices into the per-sort carriers.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    signature: Signature,
    carriers: Vec<Vec<Label>>,
    tables: Vec<Table>,
}

impl PartialEq for FiniteAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature
            && self.signature.sorts().iter().all(|s| self.carrier(s).ok() == other.carrier(s).ok())
            && self.signature.ops().all(|op| self.table(&op.name).ok() == other.table(&op.name).ok())
    }
}
impl Eq for FiniteAlgebra {}

impl FiniteAlgebra {
    /// Builds an algebra from carriers and explicit row-major tables.
    pub fn new(
        signature: Signature,
        carriers: IndexMap<Sort, Vec<Label>>,
        mut tables: IndexMap<Arc<str>, Vec<u32>>,
    ) -> Result<FiniteAlgebra> {
        let carriers = Self::arrange_carriers(&signature, carriers)?;
        let mut out = Vec::with_capacity(signature.op_count());
        for op in signature.ops() {
            let values = tables
                .swap_remove(&op.name)
                .ok_or_else(|| Error::TypingError(format!("missing table for `{}`", op.name)))?;
            out.push(Self::make_table(&signature, &carriers, op, values)?);
        }
        if let Some((name, _)) = tables.into_iter().next() {
            return Err(Error::UnresolvedName(name.to_string()));
        }
        Ok(FiniteAlgebra { signature, carriers, tables: out })
    }

    /// Builds an algebra whose operations are given by a function of the argument tuple.
    pub fn from_fn(
        signature: Signature,
        carriers: IndexMap<Sort, Vec<Label>>,
        mut f: impl FnMut(&Op, &[u32]) -> Result<u32>,
    ) -> Result<FiniteAlgebra> {
        let carriers = Self::arrange_carriers(&signature, carriers)?;
        let mut tables = Vec::with_capacity(signature.op_count());
        for op in signature.ops() {
            let sizes = Self::sizes_in(&signature, &carriers, &op.arity)?;
            let rows = checked_product(&sizes, TABLE_ROW_CAP)?;
            let mut values = Vec::with_capacity(rows);
            let mut odo = Odometer::new(&sizes);
            while let Some(args) = odo.next() {
                values.push(f(op, args)?);
            }
            tables.push(Self::make_table(&signature, &carriers, op, values)?);
        }
        Ok(FiniteAlgebra { signature, carriers, tables })
    }

    fn arrange_carriers(signature: &Signature, mut carriers: IndexMap<Sort, Vec<Label>>) -> Result<Vec<Vec<Label>>> {
        let mut out = Vec::with_capacity(signature.sorts().len());
        for s in signature.sorts() {
            let c = carriers.swap_remove(s).ok_or_else(|| Error::TypingError(format!("missing carrier for sort `{s}`")))?;
            let mut seen = std::collections::HashSet::new();
            for l in &c {
                if !seen.insert(l.clone()) {
                    return Err(Error::DuplicateName(format!("element `{l}` of sort `{s}`")));
                }
            }
            out.push(c);
        }
        if let Some((s, _)) = carriers.into_iter().next() {
            return Err(Error::UnknownSort(s.to_string()));
        }
        Ok(out)
    }

    fn sizes_in(signature: &Signature, carriers: &[Vec<Label>], w: &Word) -> Result<Vec<usize>> {
        w.iter()
            .map(|s| {
                signature.sorts().get_index_of(s).map(|i| carriers[i].len()).ok_or_else(|| Error::UnknownSort(s.to_string()))
            })
            .collect()
    }

    fn make_table(signature: &Signature, carriers: &[Vec<Label>], op: &Op, values: Vec<u32>) -> Result<Table> {
        let sizes = Self::sizes_in(signature, carriers, &op.arity)?;
        let rows = checked_product(&sizes, TABLE_ROW_CAP)?;
        if values.len() != rows {
            return Err(Error::TypingError(format!("table of `{}` has {} rows, expected {rows}", op.name, values.len())));
        }
        let target = carriers[signature.sorts().get_index_of(&op.coarity).expect("checked by signature")].len();
        if let Some(v) = values.iter().find(|&&v| v as usize >= target) {
            return Err(Error::IndexOutOfRange { index: *v as usize, len: target });
        }
        Ok(Table { sizes, values })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn sort_index(&self, s: &Sort) -> Result<usize> {
        self.signature.sorts().get_index_of(s).ok_or_else(|| Error::UnknownSort(s.to_string()))
    }

    pub fn carrier(&self, s: &Sort) -> Result<&[Label]> {
        Ok(&self.carriers[self.sort_index(s)?])
    }

    pub fn carrier_size(&self, s: &Sort) -> Result<usize> {
        Ok(self.carrier(s)?.len())
    }

    pub fn carriers(&self) -> IndexMap<Sort, Vec<Label>> {
        self.signature.sorts().iter().cloned().zip(self.carriers.iter().cloned()).collect()
    }

    pub fn label(&self, s: &Sort, e: u32) -> Result<&Label> {
        let c = self.carrier(s)?;
        c.get(e as usize).ok_or(Error::IndexOutOfRange { index: e as usize, len: c.len() })
    }

    pub fn element(&self, s: &Sort, label: &str) -> Result<u32> {
        self.carrier(s)?
            .iter()
            .position(|l| &**l == label)
            .map(|i| i as u32)
            .ok_or_else(|| Error::UnresolvedName(format!("element `{label}` of sort `{s}`")))
    }

    pub fn word_sizes(&self, w: &Word) -> Result<Vec<usize>> {
        Self::sizes_in(&self.signature, &self.carriers, w)
    }

    pub fn table(&self, op: &str) -> Result<&Table> {
        let i = self.signature.op_index(op).ok_or_else(|| Error::UnresolvedName(op.to_string()))?;
        Ok(&self.tables[i])
    }

    pub fn apply(&self, op: &str, args: &[u32]) -> Result<u32> {
        let t = self.table(op)?;
        if args.len() != t.sizes.len() {
            return Err(Error::ArityMismatch { op: op.to_string(), expected: t.sizes.len(), got: args.len() });
        }
        for (&a, &n) in args.iter().zip(&t.sizes) {
            if a as usize >= n {
                return Err(Error::IndexOutOfRange { index: a as usize, len: n });
            }
        }
        Ok(t.get(args))
    }

    /// Resolves the operation symbols of `tree` against this algebra.
    pub fn compile(&self, tree: &Tree) -> Result<Compiled> {
        match tree {
            Tree::Var(i) => Ok(Compiled::Var(*i)),
            Tree::App(op, args) => {
                if !self.signature.contains_op(op) {
                    return Err(Error::SignatureMismatch(format!("operation `{}` is not interpreted", op.name)));
                }
                let table = self.signature.op_index(&op.name).expect("contained");
                Ok(Compiled::App {
                    table,
                    sizes: self.tables[table].sizes.clone(),
                    args: args.iter().map(|a| self.compile(a)).collect::<Result<_>>()?,
                })
            }
        }
    }

    /// Evaluates a compiled term at a valuation given by positions.
    pub fn eval(&self, c: &Compiled, vals: &[u32]) -> u32 {
        match c {
            Compiled::Var(i) => vals[*i],
            Compiled::App { table, sizes, args } => {
                let mut idx = 0usize;
                for (a, &n) in args.iter().zip(sizes) {
                    idx = idx * n + self.eval(a, vals) as usize;
                }
                self.tables[*table].values[idx]
            }
        }
    }

    fn check_values(&self, ctx: &SortedSet, values: &[u32]) -> Result<()> {
        if values.len() != ctx.len() {
            return Err(Error::ContextMismatch(format!("valuation has {} values for {} variables", values.len(), ctx.len())));
        }
        for (v, &x) in ctx.vars().iter().zip(values) {
            let n = self.carrier_size(&v.sort)?;
            if x as usize >= n {
                return Err(Error::IndexOutOfRange { index: x as usize, len: n });
            }
        }
        Ok(())
    }

    /// `P^A(a)` for a term over `X` and `a ∈ A_X`.
    pub fn realize(&self, term: &Term, values: &[u32]) -> Result<u32> {
        self.check_values(term.context(), values)?;
        Ok(self.eval(&self.compile(term.tree())?, values))
    }

    /// `v♯(P)`: the canonical extension of a valuation, computed bottom-up
    /// through checked table lookups. Agrees with [`FiniteAlgebra::realize`].
    pub fn extend_valuation(&self, tree: &Tree, values: &[u32]) -> Result<u32> {
        match tree {
            Tree::Var(i) => values.get(*i).copied().ok_or(Error::IndexOutOfRange { index: *i, len: values.len() }),
            Tree::App(op, args) => {
                let vals = args.iter().map(|a| self.extend_valuation(a, values)).collect::<Result<Vec<_>>>()?;
                self.apply(&op.name, &vals)
            }
        }
    }

    pub fn realize_general(&self, p: &GeneralTerm, values: &[u32]) -> Result<Vec<u32>> {
        self.check_values(p.source(), values)?;
        let compiled = p.body().iter().map(|t| self.compile(t)).collect::<Result<Vec<_>>>()?;
        Ok(compiled.iter().map(|c| self.eval(c, values)).collect())
    }

    /// All valuations of a context, as an odometer over carrier indices.
    pub fn valuations(&self, ctx: &SortedSet) -> Result<Odometer> {
        let sizes = self.word_sizes(&ctx.sorts())?;
        checked_product(&sizes, VALUATION_CAP)?;
        Ok(Odometer::new(&sizes))
    }

    /// A valuation falsifying `eq`, if any.
    pub fn counterexample(&self, eq: &Equation) -> Result<Option<Vec<u32>>> {
        let lhs = eq.lhs().body().iter().map(|t| self.compile(t)).collect::<Result<Vec<_>>>()?;
        let rhs = eq.rhs().body().iter().map(|t| self.compile(t)).collect::<Result<Vec<_>>>()?;
        let mut odo = self.valuations(eq.context())?;
        while let Some(vals) = odo.next() {
            if lhs.iter().zip(&rhs).any(|(l, r)| self.eval(l, vals) != self.eval(r, vals)) {
                return Ok(Some(vals.to_vec()));
            }
        }
        Ok(None)
    }

    pub fn satisfies(&self, eq: &Equation) -> Result<bool> {
        Ok(self.counterexample(eq)?.is_none())
    }

    /// The first equation (by name) that fails, if any.
    pub fn first_violation<'a>(
        &self,
        eqs: impl IntoIterator<Item = (&'a Arc<str>, &'a Equation)>,
    ) -> Result<Option<Arc<str>>> {
        for (name, eq) in eqs {
            if !self.satisfies(eq)? {
                return Ok(Some(name.clone()));
            }
        }
        Ok(None)
    }

    /// The product algebra with tuple labels `(a,b)`.
    pub fn product(&self, other: &FiniteAlgebra) -> Result<FiniteAlgebra> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch("product of algebras over different signatures".into()));
        }
        let mut carriers = IndexMap::new();
        for s in self.signature.sorts() {
            let (a, b) = (self.carrier(s)?, other.carrier(s)?);
            let labels = a.iter().flat_map(|x| b.iter().map(move |y| tuple_label(&[x, y]))).collect();
            carriers.insert(s.clone(), labels);
        }
        FiniteAlgebra::from_fn(self.signature.clone(), carriers, |op, args| {
            let mut xs = Vec::with_capacity(args.len());
            let mut ys = Vec::with_capacity(args.len());
            for (k, &a) in args.iter().enumerate() {
                let nb = other.carrier_size(&op.arity[k])?;
                xs.push(a / nb as u32);
                ys.push(a % nb as u32);
            }
            let nb = other.carrier_size(&op.coarity)? as u32;
            Ok(self.apply(&op.name, &xs)? * nb + other.apply(&op.name, &ys)?)
        })
    }

    /// Same signature, carrier sizes and tables; labels are ignored.
    pub fn same_tables(&self, other: &FiniteAlgebra) -> bool {
        self.signature == other.signature
            && self.signature.sorts().iter().all(|s| self.carrier_size(s).ok() == other.carrier_size(s).ok())
            && self.signature.ops().all(|op| self.table(&op.name).ok() == other.table(&op.name).ok())
    }

    pub fn total_rows(&self) -> usize {
        self.tables.iter().map(|t| t.values.len()).sum()
    }
}

/// Label of a tuple of elements, `(a,b,...)`; 1-tuples are `(a)`.
pub fn tuple_label<L: AsRef<str>>(parts: &[L]) -> Label {
    let mut s = String::from("(");
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(p.as_ref());
    }
    s.push(')');
    s.into()
}

/// An S-sorted family of maps between carriers.
pub type SortedMapping = IndexMap<Sort, Vec<u32>>;

/// Decides whether `f` is a homomorphism `A -> B`.
pub fn check_homomorphism(f: &SortedMapping, a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<bool> {
    if a.signature != b.signature {
        return Err(Error::SignatureMismatch("homomorphism between algebras over different signatures".into()));
    }
    for s in a.signature.sorts() {
        let m = f.get(s).ok_or_else(|| Error::UnknownSort(s.to_string()))?;
        if m.len() != a.carrier_size(s)? {
            return Err(Error::DomainMismatch(format!("map at sort `{s}` has {} entries", m.len())));
        }
        let nb = b.carrier_size(s)?;
        if let Some(&x) = m.iter().find(|&&x| x as usize >= nb) {
            return Err(Error::IndexOutOfRange { index: x as usize, len: nb });
        }
    }
    for op in a.signature.ops() {
        let sizes = a.word_sizes(&op.arity)?;
        let maps: Vec<&Vec<u32>> = op.arity.iter().map(|s| &f[s]).collect();
        let out = &f[&op.coarity];
        let ta = a.table(&op.name)?;
        let tb = b.table(&op.name)?;
        let mut image = vec![0u32; sizes.len()];
        let mut odo = Odometer::new(&sizes);
        while let Some(args) = odo.next() {
            for k in 0..args.len() {
                image[k] = maps[k][args[k] as usize];
            }
            if out[ta.get(args) as usize] != tb.get(&image) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Sizes of an S-sorted finite set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Carriers {
    sizes: IndexMap<Sort, usize>,
}

impl Carriers {
    pub fn new(sizes: IndexMap<Sort, usize>) -> Carriers {
        Carriers { sizes }
    }

    pub fn of_algebra(a: &FiniteAlgebra) -> Carriers {
        Carriers { sizes: a.signature().sorts().iter().map(|s| (s.clone(), a.carrier_size(s).unwrap())).collect() }
    }

    pub fn size(&self, s: &Sort) -> Result<usize> {
        self.sizes.get(s).copied().ok_or_else(|| Error::UnknownSort(s.to_string()))
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Sort> {
        self.sizes.keys()
    }

    pub fn word_sizes(&self, w: &Word) -> Result<Vec<usize>> {
        w.iter().map(|s| self.size(s)).collect()
    }

    /// `|A_w|`.
    pub fn word_size(&self, w: &Word) -> Result<usize> {
        checked_product(&self.word_sizes(w)?, TABLE_ROW_CAP)
    }
}

/// A finitary operation `A_u -> A_w`, stored as the encoded output tuple for
/// each encoded input tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteOperation {
    domain: Word,
    codomain: Word,
    table: Vec<u32>,
}

impl FiniteOperation {
    pub fn new(carriers: &Carriers, domain: Word, codomain: Word, table: Vec<u32>) -> Result<FiniteOperation> {
        let rows = carriers.word_size(&domain)?;
        let out = carriers.word_size(&codomain)?;
        if table.len() != rows {
            return Err(Error::DomainMismatch(format!("operation on {domain} needs {rows} rows, got {}", table.len())));
        }
        if let Some(&v) = table.iter().find(|&&v| v as usize >= out) {
            return Err(Error::IndexOutOfRange { index: v as usize, len: out });
        }
        Ok(FiniteOperation { domain, codomain, table })
    }

    pub fn domain(&self) -> &Word {
        &self.domain
    }

    pub fn codomain(&self) -> &Word {
        &self.codomain
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// Index of this operation among all maps `A_u -> A_w`, reading the table
    /// as a base-`|A_w|` numeral with the first row most significant.
    pub fn index(&self, carriers: &Carriers) -> Result<usize> {
        let base = carriers.word_size(&self.codomain)?;
        Ok(self.table.iter().fold(0usize, |acc, &v| acc * base + v as usize))
    }

    pub fn from_index(carriers: &Carriers, domain: Word, codomain: Word, mut index: usize) -> Result<FiniteOperation> {
        let rows = carriers.word_size(&domain)?;
        let base = carriers.word_size(&codomain)?;
        let mut table = vec![0u32; rows];
        for r in (0..rows).rev() {
            table[r] = (index % base) as u32;
            index /= base;
        }
        Ok(FiniteOperation { domain, codomain, table })
    }
}

/// Operations of the Hall algebra of finitary operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HallOpKind {
    /// `π_i^w : A_w -> A_{w_i}`.
    Project { word: Word, index: usize },
    /// `ξ_{u,w,s}(f, g_0, ..., g_{|w|-1}) = f ∘ ⟨g_i⟩`.
    Substitute { u: Word },
}

/// Operations of the Bénabou algebra of finitary operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BenabouOpKind {
    Project { word: Word, index: usize },
    /// `⟨f_0, ..., f_{n-1}⟩ : A_u -> A_{w}` with `w` the concatenated codomains.
    Tuple { u: Word },
    /// `∘(p, q) = q ∘ p`.
    Compose,
}

fn projection(carriers: &Carriers, word: &Word, index: usize) -> Result<FiniteOperation> {
    let target = word.get(index)?.clone();
    let sizes = carriers.word_sizes(word)?;
    let rows = checked_product(&sizes, TABLE_ROW_CAP)?;
    let mut digits = vec![0u32; sizes.len()];
    let table = (0..rows)
        .map(|r| {
            decode(r, &sizes, &mut digits);
            digits[index]
        })
        .collect();
    Ok(FiniteOperation { domain: word.clone(), codomain: Word::singleton(target), table })
}

fn tuple(carriers: &Carriers, u: &Word, args: &[&FiniteOperation]) -> Result<FiniteOperation> {
    let rows = carriers.word_size(u)?;
    let mut codomain = Word::empty();
    let mut part_sizes = Vec::with_capacity(args.len());
    for f in args {
        if &f.domain != u {
            return Err(Error::DomainMismatch(format!("component on {} in a tuple on {u}", f.domain)));
        }
        codomain = codomain.concat(&f.codomain);
        part_sizes.push(carriers.word_size(&f.codomain)?);
    }
    carriers.word_size(&codomain)?;
    let table = (0..rows).map(|r| encode(&args.iter().map(|f| f.table[r]).collect::<Vec<_>>(), &part_sizes) as u32).collect();
    Ok(FiniteOperation { domain: u.clone(), codomain, table })
}

/// Applies an operation of the Hall algebra of operations.
pub fn hall_op_apply(carriers: &Carriers, kind: &HallOpKind, args: &[&FiniteOperation]) -> Result<FiniteOperation> {
    match kind {
        HallOpKind::Project { word, index } => {
            if !args.is_empty() {
                return Err(Error::ArityMismatch { op: "pi".into(), expected: 0, got: args.len() });
            }
            projection(carriers, word, *index)
        }
        HallOpKind::Substitute { u } => {
            let (f, gs) = args.split_first().ok_or(Error::ArityMismatch { op: "xi".into(), expected: 1, got: 0 })?;
            if f.codomain.len() != 1 {
                return Err(Error::DomainMismatch(format!("ξ needs a single-sorted operation, got codomain {}", f.codomain)));
            }
            if gs.len() != f.domain.len() {
                return Err(Error::ArityMismatch { op: "xi".into(), expected: f.domain.len() + 1, got: args.len() });
            }
            for (g, s) in gs.iter().zip(f.domain.iter()) {
                if g.codomain.len() != 1 || &g.codomain[0] != s {
                    return Err(Error::sort_mismatch(s, &g.codomain));
                }
            }
            let inner = tuple(carriers, u, gs)?;
            Ok(FiniteOperation {
                domain: u.clone(),
                codomain: f.codomain.clone(),
                table: inner.table.iter().map(|&r| f.table[r as usize]).collect(),
            })
        }
    }
}

/// Applies an operation of the Bénabou algebra of operations.
pub fn benabou_op_apply(carriers: &Carriers, kind: &BenabouOpKind, args: &[&FiniteOperation]) -> Result<FiniteOperation> {
    match kind {
        BenabouOpKind::Project { word, index } => {
            if !args.is_empty() {
                return Err(Error::ArityMismatch { op: "pi".into(), expected: 0, got: args.len() });
            }
            projection(carriers, word, *index)
        }
        BenabouOpKind::Tuple { u } => tuple(carriers, u, args),
        BenabouOpKind::Compose => {
            let [p, q] = args else {
                return Err(Error::ArityMismatch { op: "comp".into(), expected: 2, got: args.len() });
            };
            if p.codomain != q.domain {
                return Err(Error::DomainMismatch(format!("cannot compose {} -> {} after {} -> {}", q.domain, q.codomain, p.domain, p.codomain)));
            }
            Ok(FiniteOperation {
                domain: p.domain.clone(),
                codomain: q.codomain.clone(),
                table: p.table.iter().map(|&r| q.table[r as usize]).collect(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> Sort {
        Sort::new("s").unwrap()
    }

    fn labels(n: usize) -> Vec<Label> {
        (0..n).map(|i| Label::from(i.to_string())).collect()
    }

    fn z3() -> FiniteAlgebra {
        let mut sig = Signature::new([s()]);
        sig.add_op("add", Word::from(vec![s(), s()]), s()).unwrap();
        sig.add_op("zero", Word::empty(), s()).unwrap();
        let mut carriers = IndexMap::new();
        carriers.insert(s(), labels(3));
        FiniteAlgebra::from_fn(sig, carriers, |op, args| {
            Ok(if &*op.name == "add" { (args[0] + args[1]) % 3 } else { 0 })
        })
        .unwrap()
    }

    #[test]
    fn odometer_order() {
        let mut odo = Odometer::new(&[2, 3]);
        let mut seen = Vec::new();
        while let Some(t) = odo.next() {
            seen.push(encode(t, &[2, 3]));
        }
        assert_eq!(seen, (0..6).collect::<Vec<_>>());
        let mut empty = Odometer::new(&[]);
        assert!(empty.next().is_some());
        assert!(empty.next().is_none());
        assert!(Odometer::new(&[2, 0]).next().is_none());
    }

    #[test]
    fn missing_table_is_typing_error() {
        let a = z3();
        let mut tables = IndexMap::new();
        tables.insert(Arc::from("zero"), vec![0]);
        let err = FiniteAlgebra::new(a.signature().clone(), a.carriers(), tables).unwrap_err();
        assert_eq!(err.kind(), "TypingError");
        let mut tables = IndexMap::new();
        tables.insert(Arc::from("zero"), vec![0]);
        tables.insert(Arc::from("add"), vec![0; 8]);
        assert_eq!(FiniteAlgebra::new(a.signature().clone(), a.carriers(), tables).unwrap_err().kind(), "TypingError");
    }

    #[test]
    fn satisfaction_and_counterexample() {
        let a = z3();
        let add = a.signature().op("add").unwrap().clone();
        let ctx = SortedSet::canonical(&Word::from(vec![s(), s()]));
        let l = Term::from_tree(&ctx, Tree::app(&add, vec![Tree::Var(0), Tree::Var(1)])).unwrap();
        let r = Term::from_tree(&ctx, Tree::app(&add, vec![Tree::Var(1), Tree::Var(0)])).unwrap();
        assert!(a.satisfies(&Equation::from_terms(&l, &r).unwrap()).unwrap());
        let x = Term::var(&ctx, 0).unwrap();
        let cex = a.counterexample(&Equation::from_terms(&l, &x).unwrap()).unwrap();
        assert_eq!(cex, Some(vec![0, 1]));
        assert_eq!(a.realize(&l, &[2, 2]).unwrap(), 1);
        assert!(a.realize(&l, &[3, 0]).is_err());
    }

    #[test]
    fn homomorphism_check() {
        let a = z3();
        let mut doubling = IndexMap::new();
        doubling.insert(s(), vec![0, 2, 1]);
        assert!(check_homomorphism(&doubling, &a, &a).unwrap());
        let mut bad = IndexMap::new();
        bad.insert(s(), vec![0, 1, 1]);
        assert!(!check_homomorphism(&bad, &a, &a).unwrap());
    }

    #[test]
    fn product_algebra() {
        let a = z3();
        let p = a.product(&a).unwrap();
        assert_eq!(p.carrier_size(&s()).unwrap(), 9);
        assert_eq!(&**p.label(&s(), 5).unwrap(), "(1,2)");
        assert_eq!(p.apply("add", &[5, 5]).unwrap(), 2 * 3 + 1);
    }

    #[test]
    fn operation_algebra() {
        let mut sizes = IndexMap::new();
        sizes.insert(s(), 2);
        let c = Carriers::new(sizes);
        let ss = Word::from(vec![s(), s()]);
        let one = Word::singleton(s());
        let xor = FiniteOperation::new(&c, ss.clone(), one.clone(), vec![0, 1, 1, 0]).unwrap();
        assert_eq!(xor.index(&c).unwrap(), 0b0110);
        assert_eq!(FiniteOperation::from_index(&c, ss.clone(), one.clone(), 6).unwrap(), xor);
        let p0 = hall_op_apply(&c, &HallOpKind::Project { word: ss.clone(), index: 0 }, &[]).unwrap();
        assert_eq!(p0.table(), &[0, 0, 1, 1]);
        let p1 = hall_op_apply(&c, &HallOpKind::Project { word: ss.clone(), index: 1 }, &[]).unwrap();
        let swapped = hall_op_apply(&c, &HallOpKind::Substitute { u: ss.clone() }, &[&xor, &p1, &p1]).unwrap();
        assert_eq!(swapped.table(), &[0, 0, 0, 0]);
        let pair = benabou_op_apply(&c, &BenabouOpKind::Tuple { u: ss.clone() }, &[&p1, &p0]).unwrap();
        assert_eq!(pair.table(), &[0, 2, 1, 3]);
        let comp = benabou_op_apply(&c, &BenabouOpKind::Compose, &[&pair, &xor]).unwrap();
        assert_eq!(comp, xor);
        assert!(benabou_op_apply(&c, &BenabouOpKind::Compose, &[&xor, &xor]).is_err());
    }
}
