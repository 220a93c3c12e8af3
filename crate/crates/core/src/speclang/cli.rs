//! The `polyderive` batch command line.
//!
//! Exit codes: 0 when the check succeeds or the verdict is not a refutation,
//! 1 on a refutation, 2 on usage and engine errors.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AlgebraEntry, MorphismEntry, TransformationEntry, Workspace};
use crate::algebras::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::hallbenabou::{benabou_spec, hall_spec, verify_equivalence};
use crate::kernel::{Sort, SortedSet};
use crate::morphisms::{check_pd_spec_morphism, compose_polyderivators, reduct_algebra, Verdict};
use crate::terms::{Term, TheoryKind};
use crate::transformations::{check_transformation_mod, strict_failure};

/// Used when `--file` is not given.
pub const DEFAULT_FIXTURE: &str = include_str!("../../fixtures/stone.spec");

#[derive(Parser, Debug)]
#[command(name = "polyderive", version, about = "Exact checks for many-sorted algebras, clones and polyderivators")]
pub struct Cli {
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug)]
pub struct FileArg {
    /// Source file; defaults to the bundled Stone example.
    #[arg(long)]
    pub file: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and resolve a file; optionally check a polyderivator between specs.
    Check {
        #[command(flatten)]
        file: FileArg,
        /// Print the canonical form of the file.
        #[arg(long)]
        print: bool,
        #[arg(long, requires_all = ["from_spec", "to_spec"])]
        morphism: Option<String>,
        #[arg(long)]
        from_spec: Option<String>,
        #[arg(long)]
        to_spec: Option<String>,
        /// Comma-separated models of the target spec.
        #[arg(long, value_delimiter = ',')]
        models: Vec<String>,
    },
    /// Evaluate a named term in an algebra at comma-separated element labels.
    Eval {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        term: String,
        #[arg(long, value_delimiter = ',')]
        args: Vec<String>,
    },
    /// Check an equation in an algebra, exhaustively or on `--sample` random valuations.
    Satisfy {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        equation: String,
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Translate a named term or equation along a polyderivator.
    Translate {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        morphism: String,
        #[arg(long, conflicts_with = "equation", required_unless_present = "equation")]
        term: Option<String>,
        #[arg(long)]
        equation: Option<String>,
    },
    /// Print the reduct of an algebra along a polyderivator.
    Reduct {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        morphism: String,
        #[arg(long)]
        algebra: String,
    },
    /// Print `outer ∘ inner`.
    Compose {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        outer: String,
        #[arg(long)]
        inner: String,
        #[arg(long, default_value = "composite")]
        name: String,
    },
    /// Check naturality, strictly or modulo the spec attached to the transformation.
    CheckTransformation {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        xi: String,
        /// Expected source morphism.
        #[arg(long)]
        from: Option<String>,
        /// Expected target morphism.
        #[arg(long)]
        to: Option<String>,
        /// Overrides the spec named in the file.
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, value_delimiter = ',')]
        models: Vec<String>,
    },
    /// Generate or verify the Hall and Bénabou clone specifications.
    HallBenabou {
        #[arg(long, value_delimiter = ',', required = true)]
        sorts: Vec<String>,
        #[arg(long)]
        bound: usize,
        #[arg(value_enum)]
        action: HbAction,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum HbAction {
    Verify,
    HallSpec,
    BenabouSpec,
}

fn load(file: &FileArg) -> Result<Workspace> {
    match &file.file {
        None => Workspace::parse(DEFAULT_FIXTURE),
        Some(path) => {
            let src = std::fs::read_to_string(path)
                .map_err(|e| Error::UnresolvedName(format!("file `{}`: {e}", path.display())))?;
            Workspace::parse(&src)
        }
    }
}

fn models<'a>(ws: &'a Workspace, names: &'a [String]) -> Result<Vec<(&'a str, &'a FiniteAlgebra)>> {
    names
        .iter()
        .map(|n| ws.algebra(n).map(|a: &AlgebraEntry| (n.as_str(), &a.algebra)))
        .collect()
}

fn verdict_code(v: &Verdict) -> i32 {
    if v.is_refuted() {
        1
    } else {
        0
    }
}

fn labels(a: &FiniteAlgebra, ctx: &SortedSet, vals: &[u32]) -> Result<String> {
    let parts = ctx.vars().iter().zip(vals).map(|(v, &x)| a.label(&v.sort, x).map(|l| l.to_string())).collect::<Result<Vec<_>>>()?;
    Ok(parts.join(","))
}

fn run_command(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let w = |out: &mut dyn Write, s: String| {
        writeln!(out, "{s}").ok();
    };
    match &cli.command {
        Command::Check { file, print, morphism, from_spec, to_spec, models: names } => {
            let ws = load(file)?;
            if *print {
                write!(out, "{}", ws.print()).ok();
            }
            if let (Some(m), Some(f), Some(t)) = (morphism, from_spec, to_spec) {
                let v = check_pd_spec_morphism(&ws.morphism(m)?.morphism, &ws.spec(f)?.spec, &ws.spec(t)?.spec, &models(&ws, names)?)?;
                w(out, v.to_string());
                return Ok(verdict_code(&v));
            }
            if !*print {
                w(
                    out,
                    format!(
                        "ok: {} signatures, {} specs, {} equations, {} terms, {} algebras, {} morphisms, {} transformations",
                        ws.signatures.len(),
                        ws.specs.len(),
                        ws.equations.len(),
                        ws.terms.len(),
                        ws.algebras.len(),
                        ws.morphisms.len(),
                        ws.transformations.len()
                    ),
                );
            }
            Ok(0)
        }
        Command::Eval { file, algebra, term, args } => {
            let ws = load(file)?;
            let a = &ws.algebra(algebra)?.algebra;
            let t: &Term = &ws.term(term)?.term;
            if args.len() != t.context().len() {
                return Err(Error::IndexOutOfRange { index: args.len(), len: t.context().len() });
            }
            let vals = t.context().vars().iter().zip(args).map(|(v, l)| a.element(&v.sort, l)).collect::<Result<Vec<_>>>()?;
            let r = a.realize(t, &vals)?;
            w(out, a.label(t.sort(), r)?.to_string());
            Ok(0)
        }
        Command::Satisfy { file, algebra, equation, sample } => {
            let ws = load(file)?;
            let a = &ws.algebra(algebra)?.algebra;
            let (_, eq) = ws.equation(equation)?;
            eq.check_signature(a.signature())?;
            let bad = match sample {
                None => a.counterexample(eq)?,
                Some(n) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    let sizes = a.word_sizes(&eq.context().sorts())?;
                    let mut found = None;
                    for _ in 0..*n {
                        if sizes.contains(&0) {
                            break;
                        }
                        let vals: Vec<u32> = sizes.iter().map(|&k| rng.gen_range(0..k as u32)).collect();
                        if a.realize_general(eq.lhs(), &vals)? != a.realize_general(eq.rhs(), &vals)? {
                            found = Some(vals);
                            break;
                        }
                    }
                    found
                }
            };
            match bad {
                None => {
                    w(out, "true".into());
                    Ok(0)
                }
                Some(vals) => {
                    w(out, format!("false at ({})", labels(a, eq.context(), &vals)?));
                    Ok(1)
                }
            }
        }
        Command::Translate { file, morphism, term, equation } => {
            let ws = load(file)?;
            let d = &ws.morphism(morphism)?.morphism;
            if let Some(t) = term {
                let f = d.translate_term(&ws.term(t)?.term)?;
                w(out, format!("over {} : {} -> {}", f.domain(), f.codomain(), f));
            } else if let Some(e) = equation {
                let eq = d.translate_equation(ws.equation(e)?.1)?;
                let side = |g: &crate::terms::GeneralTerm| g.body().iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
                w(out, format!("over {} : ({}) = ({})", eq.context().sorts(), side(eq.lhs()), side(eq.rhs())));
            }
            Ok(0)
        }
        Command::Reduct { file, morphism, algebra } => {
            let ws = load(file)?;
            let m: &MorphismEntry = ws.morphism(morphism)?;
            let r = reduct_algebra(&m.morphism, &ws.algebra(algebra)?.algebra)?;
            let mut doc = Workspace::default();
            doc.algebras.insert(
                format!("{morphism}_{algebra}"),
                AlgebraEntry { signature: m.source.clone(), algebra: r },
            );
            write!(out, "{}", doc.print()).ok();
            Ok(0)
        }
        Command::Compose { file, outer, inner, name } => {
            let ws = load(file)?;
            let (e, d) = (ws.morphism(outer)?, ws.morphism(inner)?);
            let c = compose_polyderivators(&e.morphism, &d.morphism)?;
            let mut doc = Workspace::default();
            doc.morphisms
                .insert(name.clone(), MorphismEntry { source: d.source.clone(), target: e.target.clone(), morphism: c });
            write!(out, "{}", doc.print()).ok();
            Ok(0)
        }
        Command::CheckTransformation { file, xi, from, to, spec, models: names } => {
            let ws = load(file)?;
            let entry: &TransformationEntry = ws.transformation(xi)?;
            for (want, got) in [(from, &entry.source), (to, &entry.target)] {
                if let Some(want) = want {
                    let same = want == got || ws.morphism(want)?.morphism == ws.morphism(got)?.morphism;
                    if !same {
                        return Err(Error::EndpointMismatch(format!("`{xi}` is not between `{want}` and the given morphism")));
                    }
                }
            }
            let verdict = match spec.as_ref().or(entry.spec.as_ref()) {
                Some(s) => check_transformation_mod(&entry.transformation, &ws.spec(s)?.spec, &models(&ws, names)?)?,
                None => match strict_failure(&entry.transformation)? {
                    None => Verdict::Proved,
                    Some(op) => Verdict::Refuted { item: op, witness: None },
                },
            };
            w(out, verdict.to_string());
            Ok(verdict_code(&verdict))
        }
        Command::HallBenabou { sorts, bound, action } => {
            let sorts = sorts.iter().map(|s| Sort::new(s)).collect::<Result<Vec<_>>>()?;
            match action {
                HbAction::Verify => {
                    let r = verify_equivalence(&sorts, *bound)?;
                    w(out, format!("hall equations: {}", r.hall_equations));
                    w(out, format!("benabou equations: {}", r.benabou_equations));
                    w(out, format!("d: {}", r.d_verdict));
                    w(out, format!("e: {}", r.e_verdict));
                    w(out, format!("chi: {}", r.chi));
                    w(out, format!("rho: {}", r.rho));
                    w(out, format!("chi (hall): {}", r.chi_hall));
                    w(out, format!("rho (hall): {}", r.rho_hall));
                    w(out, format!("rho . chi = 1: {}", r.rho_after_chi_is_identity));
                    w(out, format!("chi . rho = 1: {}", r.chi_after_rho_is_identity));
                    w(out, format!("hall round trips = 1: {}", r.hall_round_trips_are_identities));
                    w(out, format!("equivalence: {}", if r.holds() { "holds" } else { "fails" }));
                    Ok(if r.holds() { 0 } else { 1 })
                }
                HbAction::HallSpec | HbAction::BenabouSpec => {
                    let (sig_name, spec_name, spec) = match action {
                        HbAction::HallSpec => ("HTer", "Hall", hall_spec(&sorts, *bound)?),
                        _ => ("BTer", "Benabou", benabou_spec(&sorts, *bound)?),
                    };
                    debug_assert!(!matches!(spec.kind, TheoryKind::Plain));
                    let mut doc = Workspace::default();
                    doc.signatures.insert(sig_name.into(), spec.signature.clone());
                    doc.specs.insert(spec_name.into(), super::SpecEntry { signature: sig_name.into(), spec });
                    write!(out, "{}", doc.print()).ok();
                    Ok(0)
                }
            }
        }
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if e.use_stderr() {
                write!(err, "{e}").ok();
            } else {
                write!(out, "{e}").ok();
            }
            return code;
        }
    };
    match run_command(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            writeln!(err, "error[{}]: {e}", e.kind()).ok();
            2
        }
    }
}
