//! A small declaration language for signatures, specifications, terms,
//! finite algebras, polyderivators and transformations.
//!
//! ```text
//! signature BR { sort s; op add : s s -> s; op zero : -> s; }
//! term t : BR over (s s) = add(v0, v1);
//! ```

mod lexer;
mod parser;
mod printer;

pub mod cli;

use indexmap::IndexMap;

use crate::algebras::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::kernel::Signature;
use crate::morphisms::Polyderivator;
use crate::terms::{Equation, Specification, Term};
use crate::transformations::Transformation;

pub use parser::parse_term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecEntry {
    pub signature: String,
    pub spec: Specification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationEntry {
    pub signature: String,
    pub equation: Equation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermEntry {
    pub signature: String,
    pub term: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraEntry {
    pub signature: String,
    pub algebra: FiniteAlgebra,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismEntry {
    pub source: String,
    pub target: String,
    pub morphism: Polyderivator,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformationEntry {
    /// Names of the source and target morphisms.
    pub source: String,
    pub target: String,
    pub spec: Option<String>,
    pub transformation: Transformation,
}

/// Everything declared in one source file, by name and in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Workspace {
    pub signatures: IndexMap<String, Signature>,
    pub specs: IndexMap<String, SpecEntry>,
    pub equations: IndexMap<String, EquationEntry>,
    pub terms: IndexMap<String, TermEntry>,
    pub algebras: IndexMap<String, AlgebraEntry>,
    pub morphisms: IndexMap<String, MorphismEntry>,
    pub transformations: IndexMap<String, TransformationEntry>,
}

fn lookup<'a, T>(map: &'a IndexMap<String, T>, what: &str, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| Error::UnresolvedName(format!("{what} {name}")))
}

impl Workspace {
    pub fn parse(src: &str) -> Result<Workspace> {
        parser::parse_workspace(src)
    }

    /// Canonical source text; parsing it gives back an equal workspace.
    pub fn print(&self) -> String {
        printer::print_workspace(self)
    }

    pub fn signature(&self, name: &str) -> Result<&Signature> {
        lookup(&self.signatures, "signature", name)
    }

    pub fn spec(&self, name: &str) -> Result<&SpecEntry> {
        lookup(&self.specs, "spec", name)
    }

    pub fn term(&self, name: &str) -> Result<&TermEntry> {
        lookup(&self.terms, "term", name)
    }

    pub fn algebra(&self, name: &str) -> Result<&AlgebraEntry> {
        lookup(&self.algebras, "algebra", name)
    }

    pub fn morphism(&self, name: &str) -> Result<&MorphismEntry> {
        lookup(&self.morphisms, "morphism", name)
    }

    pub fn transformation(&self, name: &str) -> Result<&TransformationEntry> {
        lookup(&self.transformations, "transformation", name)
    }

    /// A top-level equation, `SPEC.EQ`, or an equation name unique among specs.
    pub fn equation(&self, name: &str) -> Result<(&str, &Equation)> {
        if let Some(e) = self.equations.get(name) {
            return Ok((&e.signature, &e.equation));
        }
        if let Some((spec, eq)) = name.split_once('.') {
            if let Some(entry) = self.specs.get(spec) {
                if let Some(e) = entry.spec.equations.get(eq) {
                    return Ok((&entry.signature, e));
                }
            }
        }
        let mut found = self
            .specs
            .values()
            .filter_map(|entry| entry.spec.equations.get(name).map(|e| (entry.signature.as_str(), e)));
        match (found.next(), found.next()) {
            (Some(hit), None) => Ok(hit),
            (Some(_), Some(_)) => Err(Error::UnresolvedName(format!("equation {name} (ambiguous)"))),
            _ => Err(Error::UnresolvedName(format!("equation {name}"))),
        }
    }

    /// Algebras declared over the named signature.
    pub fn algebras_over(&self, signature: &str) -> Vec<(&str, &FiniteAlgebra)> {
        self.algebras
            .iter()
            .filter(|(_, a)| a.signature == signature)
            .map(|(n, a)| (n.as_str(), &a.algebra))
            .collect()
    }
}
