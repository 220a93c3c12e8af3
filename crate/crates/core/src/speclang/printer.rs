use std::fmt::Write;

use super::Workspace;
use crate::algebras::{FiniteAlgebra, Odometer};
use crate::kernel::Signature;
use crate::terms::{Equation, TermFamily, TheoryKind, Tree};

fn family(f: &TermFamily) -> String {
    let parts: Vec<String> = f.components().iter().map(Tree::to_string).collect();
    format!("({})", parts.join(", "))
}

fn equation(eq: &Equation) -> String {
    let side = |body: &[Tree]| match body {
        [t] => t.to_string(),
        _ => body.iter().map(Tree::to_string).collect::<Vec<_>>().join(", "),
    };
    format!("over {} : {} = {};", eq.context().sorts(), side(eq.lhs().body()), side(eq.rhs().body()))
}

fn signature(out: &mut String, name: &str, sig: &Signature) {
    writeln!(out, "signature {name} {{").unwrap();
    for s in sig.sorts() {
        writeln!(out, "  sort {s};").unwrap();
    }
    for op in sig.ops() {
        let args: Vec<String> = op.arity.iter().map(|s| format!("{s} ")).collect();
        writeln!(out, "  op {} : {}-> {};", op.name, args.concat(), op.coarity).unwrap();
    }
    writeln!(out, "}}").unwrap();
}

fn algebra(out: &mut String, name: &str, sig_name: &str, a: &FiniteAlgebra) {
    writeln!(out, "algebra {name} : {sig_name} {{").unwrap();
    let sig = a.signature();
    for s in sig.sorts() {
        let labels = a.carrier(s).expect("carrier of a declared sort");
        let labels: Vec<&str> = labels.iter().map(|l| &**l).collect();
        writeln!(out, "  carrier {s} = {};", labels.join(" ")).unwrap();
    }
    for op in sig.ops() {
        writeln!(out, "  table {} {{", op.name).unwrap();
        let table = a.table(&op.name).expect("table of a declared op");
        let mut odo = Odometer::new(table.sizes());
        while let Some(digits) = odo.next() {
            let mut row = String::from("    row ");
            for (d, s) in digits.iter().zip(op.arity.iter()) {
                write!(row, "{} ", a.label(s, *d).expect("element in range")).unwrap();
            }
            let v = table.get(digits);
            writeln!(out, "{row}-> {};", a.label(&op.coarity, v).expect("element in range")).unwrap();
        }
        writeln!(out, "  }}").unwrap();
    }
    writeln!(out, "}}").unwrap();
}

pub fn print_workspace(ws: &Workspace) -> String {
    let mut out = String::new();
    for (name, sig) in &ws.signatures {
        signature(&mut out, name, sig);
    }
    for (name, e) in &ws.specs {
        let kind = match &e.spec.kind {
            TheoryKind::Plain => String::new(),
            TheoryKind::Hall { sorts, bound } => format!(" hall {} {bound}", crate::kernel::Word::from(sorts.clone())),
            TheoryKind::Benabou { sorts, bound } => format!(" benabou {} {bound}", crate::kernel::Word::from(sorts.clone())),
        };
        writeln!(out, "spec {name} : {}{kind} {{", e.signature).unwrap();
        for (eq_name, eq) in &e.spec.equations {
            writeln!(out, "  eq {eq_name} {}", equation(eq)).unwrap();
        }
        writeln!(out, "}}").unwrap();
    }
    for (name, e) in &ws.equations {
        writeln!(out, "equation {name} : {} {}", e.signature, equation(&e.equation)).unwrap();
    }
    for (name, e) in &ws.terms {
        writeln!(out, "term {name} : {} over {} = {};", e.signature, e.term.context().sorts(), e.term.tree()).unwrap();
    }
    for (name, e) in &ws.algebras {
        algebra(&mut out, name, &e.signature, &e.algebra);
    }
    for (name, e) in &ws.morphisms {
        let d = &e.morphism;
        writeln!(out, "morphism {name} : {} -> {} {{", e.source, e.target).unwrap();
        for (s, w) in d.sort_map().images() {
            writeln!(out, "  sort {s} -> {w};").unwrap();
        }
        for (op, f) in d.images() {
            writeln!(out, "  op {op} -> {};", family(f)).unwrap();
        }
        writeln!(out, "}}").unwrap();
    }
    for (name, e) in &ws.transformations {
        let spec = e.spec.as_ref().map(|s| format!(" mod {s}")).unwrap_or_default();
        writeln!(out, "transformation {name} : {} => {}{spec} {{", e.source, e.target).unwrap();
        for (s, f) in e.transformation.components() {
            writeln!(out, "  sort {s} -> {};", family(f)).unwrap();
        }
        writeln!(out, "}}").unwrap();
    }
    out
}
