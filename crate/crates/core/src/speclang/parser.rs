use std::sync::Arc;

use indexmap::IndexMap;

use super::lexer::{lex, syntax, Tok, Token};
use super::{AlgebraEntry, EquationEntry, MorphismEntry, SpecEntry, TermEntry, TransformationEntry, Workspace};
use crate::algebras::{FiniteAlgebra, Label};
use crate::error::{Error, Result};
use crate::kernel::{Signature, Sort, SortedSet, Word};
use crate::morphisms::{compose_polyderivators, identity_polyderivator, Polyderivator};
use crate::terms::{Equation, Specification, Term, TermFamily, TheoryKind, Tree, DEFAULT_DEPTH_LIMIT};
use crate::transformations::Transformation;

/// Unresolved term syntax.
#[derive(Clone, Debug)]
enum Ast {
    Var(usize),
    App(String, Vec<Ast>),
}

impl Ast {
    fn depth(&self) -> usize {
        match self {
            Ast::Var(_) => 0,
            Ast::App(_, args) => 1 + args.iter().map(Ast::depth).max().unwrap_or(0),
        }
    }
}

fn var_index(name: &str) -> Option<usize> {
    name.strip_prefix('v').filter(|r| !r.is_empty() && r.chars().all(|c| c.is_ascii_digit())).and_then(|r| r.parse().ok())
}

fn resolve(ast: &Ast, sig: &Signature) -> Result<Tree> {
    match ast {
        Ast::Var(i) => Ok(Tree::Var(*i)),
        Ast::App(name, args) => {
            let op = sig.op(name)?;
            if args.len() != op.arity.len() {
                return Err(Error::ArityMismatch { op: name.clone(), expected: op.arity.len(), got: args.len() });
            }
            Ok(Tree::App(op.clone(), args.iter().map(|a| resolve(a, sig)).collect::<Result<_>>()?))
        }
    }
}

fn resolve_term(ast: &Ast, sig: &Signature, ctx: &Word) -> Result<Term> {
    if ast.depth() > DEFAULT_DEPTH_LIMIT {
        return Err(Error::DepthExceeded(DEFAULT_DEPTH_LIMIT));
    }
    sig.check_word(ctx)?;
    Term::from_tree(&SortedSet::canonical(ctx), resolve(ast, sig)?)
}

fn resolve_family(asts: &[Ast], sig: &Signature, domain: &Word) -> Result<TermFamily> {
    let terms = asts.iter().map(|a| resolve_term(a, sig, domain)).collect::<Result<Vec<_>>>()?;
    TermFamily::from_terms(domain.clone(), terms)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let t = self.peek();
        syntax(t.line, t.col, msg)
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.is_sym(c) {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn expect_tok(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.is_keyword(kw) {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    /// A plain identifier, without bracketed suffix.
    fn name(&mut self) -> Result<String> {
        let t = self.peek().clone();
        let s = self.ident()?;
        if s.contains('[') || s.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(syntax(t.line, t.col, format!("`{s}` is not a valid name")));
        }
        Ok(s)
    }

    /// Collects a balanced group starting at `(` (or `[`) as compact text.
    fn group_text(&mut self, spaced: bool) -> Result<String> {
        let mut depth = 0i32;
        let mut out = String::new();
        loop {
            let t = self.next();
            match t.tok {
                Tok::Sym(c @ ('(' | '[')) => {
                    if spaced && !out.is_empty() && !out.ends_with('(') {
                        out.push(' ');
                    }
                    depth += 1;
                    out.push(c);
                }
                Tok::Sym(c @ (')' | ']')) => {
                    depth -= 1;
                    out.push(c);
                }
                Tok::Sym(',') if !spaced => out.push(','),
                Tok::Ident(s) => {
                    if spaced && !out.is_empty() && !out.ends_with('(') {
                        out.push(' ');
                    }
                    out.push_str(&s);
                }
                _ => return Err(syntax(t.line, t.col, "unexpected token in group")),
            }
            if depth == 0 {
                return Ok(out);
            }
            if depth < 0 {
                return Err(syntax(t.line, t.col, "unbalanced group"));
            }
        }
    }

    fn sortref(&mut self) -> Result<Sort> {
        let t = self.peek().clone();
        if self.is_sym('(') {
            let text = self.group_text(true)?;
            Sort::parse(&text).map_err(|_| syntax(t.line, t.col, format!("`{text}` is not a sort")))
        } else {
            let s = self.name()?;
            Sort::new(&s)
        }
    }

    fn word(&mut self) -> Result<Word> {
        self.expect_sym('(')?;
        let mut w = Word::empty();
        while !self.is_sym(')') {
            w.push(self.sortref()?);
        }
        self.next();
        Ok(w)
    }

    fn label(&mut self) -> Result<Label> {
        if self.is_sym('(') || self.is_sym('[') {
            Ok(self.group_text(false)?.into())
        } else {
            Ok(self.ident()?.into())
        }
    }

    fn number(&mut self) -> Result<usize> {
        let t = self.peek().clone();
        self.ident()?.parse().map_err(|_| syntax(t.line, t.col, "expected a number"))
    }

    fn term(&mut self) -> Result<Ast> {
        let name = self.ident()?;
        if let Some(i) = var_index(&name) {
            return Ok(Ast::Var(i));
        }
        let mut args = Vec::new();
        if self.is_sym('(') {
            self.next();
            if !self.is_sym(')') {
                loop {
                    args.push(self.term()?);
                    if self.is_sym(',') {
                        self.next();
                    } else {
                        break;
                    }
                }
            }
            self.expect_sym(')')?;
        }
        Ok(Ast::App(name, args))
    }

    fn family(&mut self) -> Result<Vec<Ast>> {
        self.expect_sym('(')?;
        let mut out = Vec::new();
        if !self.is_sym(')') {
            loop {
                out.push(self.term()?);
                if self.is_sym(',') {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect_sym(')')?;
        Ok(out)
    }

    fn signature(&mut self, ws: &mut Workspace) -> Result<()> {
        let name = self.name()?;
        let mut sig = Signature::default();
        self.expect_sym('{')?;
        while !self.is_sym('}') {
            if self.is_keyword("sort") {
                self.next();
                let s = self.sortref()?;
                sig.add_sort(s)?;
            } else if self.is_keyword("op") {
                self.next();
                let op = self.ident()?;
                self.expect_sym(':')?;
                let mut arity = Word::empty();
                while self.peek().tok != Tok::Arrow {
                    arity.push(self.sortref()?);
                }
                self.next();
                let coarity = self.sortref()?;
                sig.add_op(&op, arity, coarity)?;
            } else {
                return Err(self.error("expected `sort` or `op`"));
            }
            self.expect_sym(';')?;
        }
        self.next();
        insert(&mut ws.signatures, name, sig)
    }

    fn equation_body(&mut self, sig: &Signature) -> Result<Equation> {
        self.expect_keyword("over")?;
        let ctx = self.word()?;
        self.expect_sym(':')?;
        let l = self.term()?;
        self.expect_sym('=')?;
        let r = self.term()?;
        self.expect_sym(';')?;
        Equation::from_terms(&resolve_term(&l, sig, &ctx)?, &resolve_term(&r, sig, &ctx)?)
    }

    fn spec(&mut self, ws: &mut Workspace) -> Result<()> {
        let name = self.name()?;
        self.expect_sym(':')?;
        let sig_name = self.name()?;
        let sig = ws.signature(&sig_name)?.clone();
        let mut spec = Specification::new(sig.clone());
        if self.is_keyword("hall") || self.is_keyword("benabou") {
            let hall = self.is_keyword("hall");
            self.next();
            let sorts = self.word()?.as_slice().to_vec();
            let bound = self.number()?;
            spec.kind = if hall { TheoryKind::Hall { sorts, bound } } else { TheoryKind::Benabou { sorts, bound } };
        }
        self.expect_sym('{')?;
        while !self.is_sym('}') {
            self.expect_keyword("eq")?;
            let eq_name = self.ident()?;
            let eq = self.equation_body(&sig)?;
            spec.add_equation(&eq_name, eq)?;
        }
        self.next();
        insert(&mut ws.specs, name, SpecEntry { signature: sig_name, spec })
    }

    fn equation(&mut self, ws: &mut Workspace) -> Result<()> {
        let name = self.ident()?;
        self.expect_sym(':')?;
        let sig_name = self.name()?;
        let sig = ws.signature(&sig_name)?.clone();
        let equation = self.equation_body(&sig)?;
        insert(&mut ws.equations, name, EquationEntry { signature: sig_name, equation })
    }

    fn term_item(&mut self, ws: &mut Workspace) -> Result<()> {
        let name = self.name()?;
        self.expect_sym(':')?;
        let sig_name = self.name()?;
        let sig = ws.signature(&sig_name)?.clone();
        self.expect_keyword("over")?;
        let ctx = self.word()?;
        self.expect_sym('=')?;
        let ast = self.term()?;
        self.expect_sym(';')?;
        let term = resolve_term(&ast, &sig, &ctx)?;
        insert(&mut ws.terms, name, TermEntry { signature: sig_name, term })
    }

    fn algebra(&mut self, ws: &mut Workspace) -> Result<()> {
        let name = self.name()?;
        self.expect_sym(':')?;
        let sig_name = self.name()?;
        let sig = ws.signature(&sig_name)?.clone();
        self.expect_sym('{')?;
        let mut carriers: IndexMap<Sort, Vec<Label>> = IndexMap::new();
        let mut rows: IndexMap<String, Vec<(Vec<Label>, Label)>> = IndexMap::new();
        while !self.is_sym('}') {
            if self.is_keyword("carrier") {
                self.next();
                let s = self.sortref()?;
                sig.check_sort(&s)?;
                self.expect_sym('=')?;
                let mut labels = Vec::new();
                while !self.is_sym(';') {
                    labels.push(self.label()?);
                }
                self.next();
                if carriers.insert(s.clone(), labels).is_some() {
                    return Err(Error::DuplicateName(format!("carrier of `{s}`")));
                }
            } else if self.is_keyword("table") {
                self.next();
                let op = self.ident()?;
                sig.op(&op)?;
                self.expect_sym('{')?;
                let mut entries = Vec::new();
                while !self.is_sym('}') {
                    self.expect_keyword("row")?;
                    let mut args = Vec::new();
                    while self.peek().tok != Tok::Arrow {
                        args.push(self.label()?);
                    }
                    self.next();
                    let value = self.label()?;
                    self.expect_sym(';')?;
                    entries.push((args, value));
                }
                self.next();
                if rows.insert(op.clone(), entries).is_some() {
                    return Err(Error::DuplicateName(format!("table of `{op}`")));
                }
            } else {
                return Err(self.error("expected `carrier` or `table`"));
            }
        }
        self.next();
        let algebra = build_algebra(&sig, carriers, rows)?;
        insert(&mut ws.algebras, name, AlgebraEntry { signature: sig_name, algebra })
    }

    fn morphism(&mut self, ws: &mut Workspace) -> Result<()> {
        let name = self.name()?;
        if self.is_sym('=') {
            self.next();
            let entry = if self.is_keyword("compose") {
                self.next();
                self.expect_sym('(')?;
                let second = self.name()?;
                self.expect_sym(',')?;
                let first = self.name()?;
                self.expect_sym(')')?;
                let (e, d) = (ws.morphism(&second)?, ws.morphism(&first)?);
                MorphismEntry {
                    source: d.source.clone(),
                    target: e.target.clone(),
                    morphism: compose_polyderivators(&e.morphism, &d.morphism)?,
                }
            } else if self.is_keyword("identity") {
                self.next();
                self.expect_sym('(')?;
                let sig_name = self.name()?;
                self.expect_sym(')')?;
                let morphism = identity_polyderivator(ws.signature(&sig_name)?);
                MorphismEntry { source: sig_name.clone(), target: sig_name, morphism }
            } else {
                return Err(self.error("expected `compose` or `identity`"));
            };
            self.expect_sym(';')?;
            return insert(&mut ws.morphisms, name, entry);
        }
        self.expect_sym(':')?;
        let source_name = self.name()?;
        self.expect_tok(Tok::Arrow, "`->`")?;
        let target_name = self.name()?;
        let source = ws.signature(&source_name)?.clone();
        let target = ws.signature(&target_name)?.clone();
        self.expect_sym('{')?;
        let mut sort_map = IndexMap::new();
        let mut images = Vec::new();
        while !self.is_sym('}') {
            if self.is_keyword("sort") {
                self.next();
                let s = self.sortref()?;
                self.expect_tok(Tok::Arrow, "`->`")?;
                let w = self.word()?;
                if sort_map.insert(s.clone(), w).is_some() {
                    return Err(Error::DuplicateName(format!("image of sort `{s}`")));
                }
            } else if self.is_keyword("op") {
                self.next();
                let op = self.ident()?;
                self.expect_tok(Tok::Arrow, "`->`")?;
                images.push((op, self.family()?));
            } else {
                return Err(self.error("expected `sort` or `op`"));
            }
            self.expect_sym(';')?;
        }
        self.next();
        let phi = crate::kernel::SortMap::new(sort_map.clone());
        let mut resolved = IndexMap::new();
        for (op, fam) in images {
            let sym = source.op(&op)?;
            let domain = phi.apply_sharp(&sym.arity).map_err(|_| Error::TypingError(format!("sorts of `{op}` have no image")))?;
            if resolved.insert(Arc::<str>::from(op.as_str()), resolve_family(&fam, &target, &domain)?).is_some() {
                return Err(Error::DuplicateName(format!("image of `{op}`")));
            }
        }
        let morphism = Polyderivator::new(source, target, sort_map, resolved)?;
        insert(&mut ws.morphisms, name, MorphismEntry { source: source_name, target: target_name, morphism })
    }

    fn transformation(&mut self, ws: &mut Workspace) -> Result<()> {
        let name = self.name()?;
        self.expect_sym(':')?;
        let source_name = self.name()?;
        self.expect_tok(Tok::DoubleArrow, "`=>`")?;
        let target_name = self.name()?;
        let spec = if self.is_keyword("mod") {
            self.next();
            let s = self.name()?;
            ws.spec(&s)?;
            Some(s)
        } else {
            None
        };
        let d = ws.morphism(&source_name)?.morphism.clone();
        let e = ws.morphism(&target_name)?.morphism.clone();
        self.expect_sym('{')?;
        let mut components = IndexMap::new();
        while !self.is_sym('}') {
            self.expect_keyword("sort")?;
            let s = self.sortref()?;
            self.expect_tok(Tok::Arrow, "`->`")?;
            let fam = self.family()?;
            self.expect_sym(';')?;
            let domain = d.sort_map().get(&s)?.clone();
            if components.insert(s.clone(), resolve_family(&fam, d.target(), &domain)?).is_some() {
                return Err(Error::DuplicateName(format!("component at `{s}`")));
            }
        }
        self.next();
        let transformation = Transformation::new(d, e, components)?;
        insert(
            &mut ws.transformations,
            name,
            TransformationEntry { source: source_name, target: target_name, spec, transformation },
        )
    }
}

fn insert<T>(map: &mut IndexMap<String, T>, name: String, value: T) -> Result<()> {
    if map.contains_key(&name) {
        return Err(Error::DuplicateName(name));
    }
    map.insert(name, value);
    Ok(())
}

fn build_algebra(
    sig: &Signature,
    carriers: IndexMap<Sort, Vec<Label>>,
    mut rows: IndexMap<String, Vec<(Vec<Label>, Label)>>,
) -> Result<FiniteAlgebra> {
    for s in sig.sorts() {
        if !carriers.contains_key(s) {
            return Err(Error::TypingError(format!("missing carrier for sort `{s}`")));
        }
    }
    let index = |s: &Sort, l: &Label| -> Result<u32> {
        carriers[s]
            .iter()
            .position(|x| x == l)
            .map(|i| i as u32)
            .ok_or_else(|| Error::UnresolvedName(format!("element `{l}` of sort `{s}`")))
    };
    let mut tables = IndexMap::new();
    for op in sig.ops() {
        let entries = rows.swap_remove(&*op.name).ok_or_else(|| Error::TypingError(format!("missing table for `{}`", op.name)))?;
        let sizes: Vec<usize> = op.arity.iter().map(|s| carriers[s].len()).collect();
        let n = crate::algebras::checked_product(&sizes, crate::algebras::TABLE_ROW_CAP)?;
        let mut values: Vec<Option<u32>> = vec![None; n];
        for (args, value) in entries {
            if args.len() != op.arity.len() {
                return Err(Error::ArityMismatch { op: op.name.to_string(), expected: op.arity.len(), got: args.len() });
            }
            let digits = args.iter().zip(op.arity.iter()).map(|(l, s)| index(s, l)).collect::<Result<Vec<_>>>()?;
            let slot = &mut values[crate::algebras::encode(&digits, &sizes)];
            if slot.is_some() {
                return Err(Error::TypingError(format!("duplicate row in table of `{}`", op.name)));
            }
            *slot = Some(index(&op.coarity, &value)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(r, v)| v.ok_or_else(|| Error::TypingError(format!("missing row {r} in table of `{}`", op.name))))
            .collect::<Result<Vec<_>>>()?;
        tables.insert(op.name.clone(), values);
    }
    FiniteAlgebra::new(sig.clone(), carriers, tables)
}

pub fn parse_workspace(src: &str) -> Result<Workspace> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let mut ws = Workspace::default();
    loop {
        let t = p.peek().clone();
        let kw = match &t.tok {
            Tok::Eof => return Ok(ws),
            Tok::Ident(s) => s.clone(),
            _ => return Err(p.error("expected a declaration")),
        };
        p.next();
        match kw.as_str() {
            "signature" => p.signature(&mut ws)?,
            "spec" => p.spec(&mut ws)?,
            "equation" => p.equation(&mut ws)?,
            "term" => p.term_item(&mut ws)?,
            "algebra" => p.algebra(&mut ws)?,
            "morphism" => p.morphism(&mut ws)?,
            "transformation" => p.transformation(&mut ws)?,
            other => return Err(syntax(t.line, t.col, format!("unknown declaration `{other}`"))),
        }
    }
}

/// Parses a single term over `↓ctx`.
pub fn parse_term(src: &str, sig: &Signature, ctx: &Word) -> Result<Term> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let ast = p.term()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.error("trailing input after term"));
    }
    resolve_term(&ast, sig, ctx)
}
