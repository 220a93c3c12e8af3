//! Transformations between parallel polyderivators and their 2-categorical structure.

use indexmap::IndexMap;

use crate::algebras::{check_homomorphism, decode, encode, FiniteAlgebra, SortedMapping};
use crate::clones::{family_compose, family_parallel};
use crate::error::{Error, Result};
use crate::kernel::{Sort, SortedSet, Word};
use crate::morphisms::{
    check_models, compose_polyderivators, decide_equation, reduct_algebra, EqStatus, Polyderivator, Verdict,
};
use crate::terms::{general_from_family, Equation, GeneralTerm, Specification, TermFamily};

/// A transformation `ξ : d ⇝ e` between polyderivators `Σ -> Λ`, with one
/// family `ξ_s : φ(s) -> ψ(s)` of Λ-terms per sort of Σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transformation {
    source: Polyderivator,
    target: Polyderivator,
    components: IndexMap<Sort, TermFamily>,
}

impl Transformation {
    pub fn new(source: Polyderivator, target: Polyderivator, components: IndexMap<Sort, TermFamily>) -> Result<Transformation> {
        if source.source() != target.source() || source.target() != target.target() {
            return Err(Error::EndpointMismatch("a transformation needs parallel polyderivators".into()));
        }
        for s in components.keys() {
            source.source().check_sort(s)?;
        }
        let mut ordered = IndexMap::new();
        for s in source.source().sorts() {
            let c = components.get(s).ok_or_else(|| Error::TypingError(format!("sort `{s}` has no component")))?;
            let (dom, cod) = (source.sort_map().get(s)?, target.sort_map().get(s)?);
            if c.domain() != dom || c.codomain() != cod {
                return Err(Error::TypingError(format!(
                    "component at `{s}` is {} -> {}, expected {dom} -> {cod}",
                    c.domain(),
                    c.codomain()
                )));
            }
            c.check_signature(source.target())?;
            ordered.insert(s.clone(), c.clone());
        }
        Ok(Transformation { source, target, components: ordered })
    }

    pub fn source(&self) -> &Polyderivator {
        &self.source
    }

    pub fn target(&self) -> &Polyderivator {
        &self.target
    }

    pub fn components(&self) -> &IndexMap<Sort, TermFamily> {
        &self.components
    }

    pub fn component(&self, s: &Sort) -> Result<&TermFamily> {
        self.components.get(s).ok_or_else(|| Error::UnknownSort(s.to_string()))
    }

    /// `ξ_w = ξ_{w_0} ∧ ... ∧ ξ_{w_{n-1}}`.
    pub fn on_word(&self, w: &Word) -> Result<TermFamily> {
        let parts = w.iter().map(|s| self.component(s).cloned()).collect::<Result<Vec<_>>>()?;
        Ok(family_parallel(&parts))
    }

    /// The two sides `ξ_s ∘ d(σ)` and `e(σ) ∘ ξ_w` of the naturality square at `σ`.
    pub fn naturality(&self, op: &str) -> Result<(TermFamily, TermFamily)> {
        let sym = self.source.source().op(op)?;
        let lhs = family_compose(self.component(&sym.coarity)?, self.source.image(op)?)?;
        let rhs = family_compose(self.target.image(op)?, &self.on_word(&sym.arity)?)?;
        Ok((lhs, rhs))
    }
}

/// The operation at which strict naturality fails, if any.
pub fn strict_failure(xi: &Transformation) -> Result<Option<String>> {
    for op in xi.source.source().ops() {
        let (l, r) = xi.naturality(&op.name)?;
        if l != r {
            return Ok(Some(op.name.to_string()));
        }
    }
    Ok(None)
}

pub fn check_transformation_strict(xi: &Transformation) -> Result<bool> {
    Ok(strict_failure(xi)?.is_none())
}

/// Checks naturality modulo the axioms of `spec`.
pub fn check_transformation_mod(xi: &Transformation, spec: &Specification, models: &[(&str, &FiniteAlgebra)]) -> Result<Verdict> {
    if &spec.signature != xi.source.target() {
        return Err(Error::SignatureMismatch("specification is not over the target signature".into()));
    }
    check_models(spec, models)?;
    let mut all_proved = true;
    for op in xi.source.source().ops() {
        let (l, r) = xi.naturality(&op.name)?;
        if l == r {
            continue;
        }
        let eq = Equation::new(general_from_family(&l), general_from_family(&r))?;
        match decide_equation(&eq, spec, models)? {
            EqStatus::Proved => {}
            EqStatus::OnModels => all_proved = false,
            EqStatus::Fails(witness) => return Ok(Verdict::Refuted { item: op.name.to_string(), witness }),
        }
    }
    Ok(if all_proved { Verdict::Proved } else { Verdict::VerifiedOnModels(models.len()) })
}

/// `1_d`.
pub fn identity_transformation(d: &Polyderivator) -> Transformation {
    let components = d
        .source()
        .sorts()
        .iter()
        .map(|s| (s.clone(), TermFamily::identity(d.sort_map().get(s).expect("total sort map"))))
        .collect();
    Transformation { source: d.clone(), target: d.clone(), components }
}

/// `χ ∘ ξ` for `ξ : d ⇝ e` and `χ : e ⇝ f`.
pub fn vertical_compose(chi: &Transformation, xi: &Transformation) -> Result<Transformation> {
    if chi.source != xi.target {
        return Err(Error::EndpointMismatch("vertical composite of non-adjacent transformations".into()));
    }
    let mut components = IndexMap::new();
    for (s, c) in &xi.components {
        components.insert(s.clone(), family_compose(&chi.components[s], c)?);
    }
    Ok(Transformation { source: xi.source.clone(), target: chi.target.clone(), components })
}

/// Both formulas for `χ ∗ ξ : h∘d ⇝ i∘e`, with `ξ : d ⇝ e` and `χ : h ⇝ i`:
/// `χ_{ψ(s)} ∘ h♯(ξ_s)` and `i♯(ξ_s) ∘ χ_{φ(s)}`. They agree when `χ` is strictly natural.
pub fn horizontal_compose_both(chi: &Transformation, xi: &Transformation) -> Result<(Transformation, Transformation)> {
    if xi.source.target() != chi.source.source() {
        return Err(Error::EndpointMismatch("horizontal composite of non-composable transformations".into()));
    }
    let (h, i) = (&chi.source, &chi.target);
    let src = compose_polyderivators(h, &xi.source)?;
    let tgt = compose_polyderivators(i, &xi.target)?;
    let mut first = IndexMap::new();
    let mut second = IndexMap::new();
    for (s, c) in &xi.components {
        let a = family_compose(&chi.on_word(xi.target.sort_map().get(s)?)?, &h.translate_family(c)?)?;
        let b = family_compose(&i.translate_family(c)?, &chi.on_word(xi.source.sort_map().get(s)?)?)?;
        first.insert(s.clone(), a);
        second.insert(s.clone(), b);
    }
    Ok((
        Transformation { source: src.clone(), target: tgt.clone(), components: first },
        Transformation { source: src, target: tgt, components: second },
    ))
}

/// `χ ∗ ξ` by the first formula.
pub fn horizontal_compose(chi: &Transformation, xi: &Transformation) -> Result<Transformation> {
    Ok(horizontal_compose_both(chi, xi)?.0)
}

/// The homomorphism `d*(B) -> e*(B)` given by realizing each `ξ_s` in `B`.
pub fn induced_homomorphism(xi: &Transformation, b: &FiniteAlgebra) -> Result<SortedMapping> {
    let rd = reduct_algebra(&xi.source, b)?;
    let re = reduct_algebra(&xi.target, b)?;
    let mut map = IndexMap::new();
    for (s, c) in &xi.components {
        let in_sizes = b.word_sizes(c.domain())?;
        let out_sizes = b.word_sizes(c.codomain())?;
        let compiled = c.components().iter().map(|t| b.compile(t)).collect::<Result<Vec<_>>>()?;
        let mut digits = vec![0u32; in_sizes.len()];
        let mut out = vec![0u32; out_sizes.len()];
        let n = rd.carrier_size(s)?;
        let mut images = Vec::with_capacity(n);
        for idx in 0..n {
            decode(idx, &in_sizes, &mut digits);
            for (k, t) in compiled.iter().enumerate() {
                out[k] = b.eval(t, &digits);
            }
            images.push(encode(&out, &out_sizes) as u32);
        }
        map.insert(s.clone(), images);
    }
    if !check_homomorphism(&map, &rd, &re)? {
        return Err(Error::NotAHomomorphism("the realized components do not commute with the operations".into()));
    }
    Ok(map)
}

/// `ξ_X : ∐†_φ X -> ∐†_ψ X`, acting blockwise.
pub fn transformation_on_context(xi: &Transformation, x: &SortedSet) -> Result<GeneralTerm> {
    let phi = xi.source.sort_map();
    let offsets = phi.block_offsets(&x.sorts())?;
    let mut body = Vec::new();
    for (k, v) in x.vars().iter().enumerate() {
        let off = offsets[k];
        for t in xi.component(&v.sort)?.components() {
            body.push(t.map_vars(&|i| i + off));
        }
    }
    GeneralTerm::new(phi.coproduct_dagger(x)?, xi.target.sort_map().coproduct_dagger(x)?, body)
}
