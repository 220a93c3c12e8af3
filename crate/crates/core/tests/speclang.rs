use polyderive::error::Error;
use polyderive::hallbenabou::{benabou_spec, hall_spec};
use polyderive::kernel::{Sort, Word};
use polyderive::speclang::{parse_term, SpecEntry, Workspace};

const FIXTURES: [(&str, &str); 4] = [
    ("stone", include_str!("../fixtures/stone.spec")),
    ("higman_neumann", include_str!("../fixtures/higman_neumann.spec")),
    ("godel", include_str!("../fixtures/godel.spec")),
    ("direct_power", include_str!("../fixtures/direct_power.spec")),
];

fn parse_err(src: &str) -> Error {
    Workspace::parse(src).unwrap_err()
}

#[test]
fn fixtures_round_trip() {
    for (name, src) in FIXTURES {
        let ws = Workspace::parse(src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let text = ws.print();
        assert_eq!(Workspace::parse(&text).unwrap(), ws, "{name}");
        assert_eq!(Workspace::parse(&text).unwrap().print(), text, "{name}");
    }
}

#[test]
fn generated_specs_round_trip() {
    let s = Sort::new("s").unwrap();
    for spec in [hall_spec(&[s.clone()], 1).unwrap(), benabou_spec(&[s.clone()], 1).unwrap()] {
        let mut ws = Workspace::default();
        ws.signatures.insert("C".into(), spec.signature.clone());
        ws.specs.insert("T".into(), SpecEntry { signature: "C".into(), spec });
        assert_eq!(Workspace::parse(&ws.print()).unwrap(), ws);
    }
}

#[test]
fn empty_document() {
    assert_eq!(Workspace::default().print(), "");
    assert_eq!(Workspace::parse("  # nothing\n").unwrap(), Workspace::default());
}

#[test]
fn signature_block() {
    let ws = Workspace::parse("signature BR { sort s; op zero : -> s; op add : s s -> s; }").unwrap();
    let sig = ws.signature("BR").unwrap();
    assert_eq!(sig.op_count(), 2);
    assert_eq!(sig.op("add").unwrap().arity.len(), 2);
}

#[test]
fn stone_polyderivator_block() {
    let src = "signature BA { sort s; op or : s s -> s; }\n\
               signature BR { sort s; op add : s s -> s; op mul : s s -> s; }\n\
               morphism d : BA -> BR { sort s -> (s); op or -> ( add(add(v0,v1), mul(v0,v1)) ); }";
    let ws = Workspace::parse(src).unwrap();
    let d = &ws.morphism("d").unwrap().morphism;
    assert_eq!(d.image("or").unwrap().components()[0].to_string(), "add(add(v0, v1), mul(v0, v1))");
}

#[test]
fn clone_sorts_in_source() {
    let src = "signature H { sort ((s s) s); sort ((s) (s s)); op k : ((s s) s) -> ((s) (s s)); }";
    let ws = Workspace::parse(src).unwrap();
    let sig = ws.signature("H").unwrap();
    let h = Sort::hall(Word::parse("(s s)").unwrap(), Sort::new("s").unwrap());
    assert!(sig.sorts().contains(&h));
}

#[test]
fn malformed_arity_is_located() {
    let err = parse_err("signature X {\n  sort s;\n  op f : s s s;\n}");
    match err {
        Error::SyntaxError { line, col, .. } => assert_eq!((line, col), (3, 15)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn bad_character_is_located() {
    assert!(matches!(parse_err("signature X {\n sort $;"), Error::SyntaxError { line: 2, col: 7, .. }));
}

#[test]
fn missing_row_is_a_typing_error() {
    let src = "signature X { sort s; op n : s -> s; }\n\
               algebra a : X { carrier s = 0 1; table n { row 0 -> 1; } }";
    assert!(matches!(parse_err(src), Error::TypingError(_)));
}

#[test]
fn unresolved_names() {
    assert!(matches!(parse_err("term t : Nope over (s) = v0;"), Error::UnresolvedName(_)));
    let src = "signature X { sort s; }\nterm t : X over (s) = g(v0);";
    assert!(matches!(parse_err(src), Error::UnresolvedName(_)));
    let src = "signature X { sort s; op c : -> s; }\nalgebra a : X { carrier s = 0; table c { row -> 7; } }";
    assert!(matches!(parse_err(src), Error::UnresolvedName(_)));
}

#[test]
fn duplicates_are_rejected() {
    assert!(matches!(parse_err("signature X { sort s; }\nsignature X { sort s; }"), Error::DuplicateName(_)));
    assert!(matches!(parse_err("signature X { sort s; op c : -> s; op c : -> s; }"), Error::DuplicateName(_)));
}

#[test]
fn sort_and_arity_errors() {
    let base = "signature X { sort s; sort t; op c : -> s; op f : s -> t; }\n";
    assert!(matches!(parse_err(&format!("{base}term a : X over (s) = f(v0, v0);")), Error::ArityMismatch { .. }));
    assert!(matches!(parse_err(&format!("{base}term a : X over (t) = f(v0);")), Error::SortMismatch { .. }));
    assert!(matches!(parse_err(&format!("{base}term a : X over (s) = v3;")), Error::IndexOutOfRange { .. }));
    assert!(matches!(parse_err(&format!("{base}equation e : X over (s) : c = f(v0);")), Error::SortMismatch { .. }));
}

#[test]
fn depth_limit() {
    let sig = Workspace::parse("signature X { sort s; op n : s -> s; }").unwrap().signature("X").unwrap().clone();
    let ctx = Word::parse("(s)").unwrap();
    let nest = |k: usize| format!("{}v0{}", "n(".repeat(k), ")".repeat(k));
    assert_eq!(parse_term(&nest(32), &sig, &ctx).unwrap().depth(), 32);
    assert_eq!(parse_term(&nest(33), &sig, &ctx).unwrap_err(), Error::DepthExceeded(32));
}

#[test]
fn compose_and_identity_forms() {
    let ws = Workspace::parse(FIXTURES[0].1).unwrap();
    let dcomp = &ws.morphism("dcomp").unwrap();
    assert_eq!((dcomp.source.as_str(), dcomp.target.as_str()), ("BR", "BR"));
    let neg = dcomp.morphism.image("neg").unwrap();
    assert_eq!(neg.components()[0].to_string(), "v0");
    assert!(matches!(parse_err("morphism m = compose(a, b);"), Error::UnresolvedName(_)));
}

#[test]
fn transformation_typing() {
    let src = format!("{}\ntransformation bad : sq => idM {{ sort s -> (v0, v1); }}", FIXTURES[3].1);
    assert!(matches!(parse_err(&src), Error::TypingError(_)));
}

#[test]
fn equation_lookup() {
    let ws = Workspace::parse(FIXTURES[0].1).unwrap();
    assert!(ws.equation("comm_add").is_ok());
    assert!(ws.equation("BRing.idem").is_ok());
    assert!(ws.equation("idem").is_ok());
    assert!(ws.equation("missing").is_err());
}
